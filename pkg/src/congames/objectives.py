"""Objectives, preorders and preferences over plays.

A play is only ever handled through its (occ, inf) state-set pair; the
package never materializes infinite sequences.  Circuit objectives read
the inf set, reachability/safety read occ, everything else reads inf.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Sequence

log = logging.getLogger(__name__)


class ObjectiveError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Boolean circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoolCircuit:
    """DAG of gates in topological order, one output gate.

    Each gate is a tuple: ("in", k) | ("const", b) | ("not", i) |
    ("and", i, j) | ("or", i, j), where i, j reference earlier gates.
    """

    gates: tuple
    output: int
    n_inputs: int

    def __post_init__(self):
        for g, gate in enumerate(self.gates):
            kind = gate[0]
            if kind == "in":
                if not 0 <= gate[1] < self.n_inputs:
                    raise ObjectiveError(f"gate {g}: input index out of range")
            elif kind == "const":
                pass
            elif kind == "not":
                if not 0 <= gate[1] < g:
                    raise ObjectiveError(f"gate {g}: reference must precede gate")
            elif kind in ("and", "or"):
                if not (0 <= gate[1] < g and 0 <= gate[2] < g):
                    raise ObjectiveError(f"gate {g}: reference must precede gate")
            else:
                raise ObjectiveError(f"gate {g}: unknown kind {kind!r}")
        if not 0 <= self.output < len(self.gates):
            raise ObjectiveError("output gate out of range")

    def inputs_read(self):
        return {g[1] for g in self.gates if g[0] == "in"}


def eval_circuit(circuit: BoolCircuit, inputs) -> bool:
    """Evaluate in topological order; ``inputs`` is an indexable of bools."""
    if len(inputs) != circuit.n_inputs:
        raise ObjectiveError(
            f"expected {circuit.n_inputs} inputs, got {len(inputs)}")
    vals = []
    for gate in circuit.gates:
        kind = gate[0]
        if kind == "in":
            v = bool(inputs[gate[1]])
        elif kind == "const":
            v = bool(gate[1])
        elif kind == "not":
            v = not vals[gate[1]]
        elif kind == "and":
            v = vals[gate[1]] and vals[gate[2]]
        else:
            v = vals[gate[1]] or vals[gate[2]]
        vals.append(v)
    return vals[circuit.output]


class CircuitBuilder:
    """Convenience builder keeping gates topologically ordered."""

    def __init__(self, n_inputs):
        self.gates = []
        self.n_inputs = n_inputs

    def _add(self, gate):
        self.gates.append(gate)
        return len(self.gates) - 1

    def inp(self, k):
        return self._add(("in", k))

    def const(self, b):
        return self._add(("const", 1 if b else 0))

    def not_(self, g):
        return self._add(("not", g))

    def and_(self, g1, g2):
        return self._add(("and", g1, g2))

    def or_(self, g1, g2):
        return self._add(("or", g1, g2))

    def big_or(self, gs):
        gs = list(gs)
        if not gs:
            return self.const(0)
        acc = gs[0]
        for g in gs[1:]:
            acc = self.or_(acc, g)
        return acc

    def big_and(self, gs):
        gs = list(gs)
        if not gs:
            return self.const(1)
        acc = gs[0]
        for g in gs[1:]:
            acc = self.and_(acc, g)
        return acc

    def build(self, output):
        return BoolCircuit(tuple(self.gates), output, self.n_inputs)


# Circuit textual format: one gate per line
#   g<id> := INPUT <k> | CONST <b> | NOT g<i> | AND g<i> g<j> | OR g<i> g<j>
# terminated by a line "OUTPUT g<id>".

def circuit_to_text(circuit: BoolCircuit) -> str:
    lines = []
    for i, gate in enumerate(circuit.gates):
        kind = gate[0]
        if kind == "in":
            rhs = f"INPUT {gate[1]}"
        elif kind == "const":
            rhs = f"CONST {gate[1]}"
        elif kind == "not":
            rhs = f"NOT g{gate[1]}"
        elif kind == "and":
            rhs = f"AND g{gate[1]} g{gate[2]}"
        else:
            rhs = f"OR g{gate[1]} g{gate[2]}"
        lines.append(f"g{i} := {rhs}")
    lines.append(f"OUTPUT g{circuit.output}")
    return "\n".join(lines)


def circuit_from_text(text: str, n_inputs) -> BoolCircuit:
    gates = []
    ids = {}
    output = None

    def ref(tok):
        if tok not in ids:
            raise ObjectiveError(f"circuit text references undefined gate {tok}")
        return ids[tok]

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.upper().startswith("OUTPUT"):
            output = ref(line.split()[1])
            continue
        lhs, rhs = (part.strip() for part in line.split(":=", 1))
        toks = rhs.split()
        op = toks[0].upper()
        if op == "INPUT":
            gate = ("in", int(toks[1]))
        elif op == "CONST":
            gate = ("const", int(toks[1]))
        elif op == "NOT":
            gate = ("not", ref(toks[1]))
        elif op == "AND":
            gate = ("and", ref(toks[1]), ref(toks[2]))
        elif op == "OR":
            gate = ("or", ref(toks[1]), ref(toks[2]))
        else:
            raise ObjectiveError(f"bad circuit line: {raw!r}")
        ids[lhs] = len(gates)
        gates.append(gate)
    if output is None:
        raise ObjectiveError("circuit text has no OUTPUT line")
    return BoolCircuit(tuple(gates), output, n_inputs)


# ---------------------------------------------------------------------------
# Deterministic automata over game states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DetAutomaton:
    """Deterministic automaton reading sequences of game states.

    ``delta[q][s]`` is total; acceptance is ("buchi", repeated state set)
    or ("rabin", tuple of (E, F) pairs over automaton states).
    """

    n_states: int
    n_letters: int
    delta: tuple          # delta[q] -> tuple of successor per letter
    initial: int
    acceptance: tuple     # ("buchi", frozenset) | ("rabin", ((E,F),...))

    def __post_init__(self):
        if len(self.delta) != self.n_states:
            raise ObjectiveError("delta must have one row per automaton state")
        for q, row in enumerate(self.delta):
            if len(row) != self.n_letters:
                raise ObjectiveError(f"delta row {q} is not total")
            for t in row:
                if not 0 <= t < self.n_states:
                    raise ObjectiveError(f"delta[{q}] targets unknown state")

    def run(self, word):
        """Sequence of automaton states while reading ``word`` (len+1 long)."""
        qs = [self.initial]
        for s in word:
            qs.append(self.delta[qs[-1]][s])
        return qs


def automaton_accepts_lasso(aut: DetAutomaton, prefix, cycle) -> bool:
    """Run the automaton along prefix.cycle^omega.

    Iterates the cycle until the (cycle position, automaton state) pair
    repeats, then evaluates acceptance on the detected loop.
    """
    q = aut.initial
    for s in prefix:
        q = aut.delta[q][s]
    seen = {}
    trace = []
    pos = 0
    while (pos, q) not in seen:
        seen[(pos, q)] = len(trace)
        for s in cycle:
            trace.append((q, s))
            q = aut.delta[q][s]
        pos = 0  # cycle position after a full traversal is always 0
    start = seen[(pos, q)]
    loop_states = {qq for qq, _ in trace[start:]} | {q}
    kind, data = aut.acceptance
    if kind == "buchi":
        return bool(loop_states & data)
    hit = frozenset(loop_states)
    return any(hit & e and not (hit & f) for e, f in data)


# ---------------------------------------------------------------------------
# Objectives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Objective:
    """Single omega-regular objective.

    kind: reach | safety | buchi | cobuchi | parity | rabin | streett |
          muller | circuit | detbuchi | detrabin
    data: target frozenset for the first four; priority tuple for parity;
          pair tuple for rabin/streett; (colors tuple, family frozenset of
          frozensets) for muller; BoolCircuit for circuit; DetAutomaton for
          the automata kinds.
    """

    kind: str
    data: object

    def referenced_states(self):
        if self.kind in ("reach", "safety", "buchi", "cobuchi"):
            return set(self.data)
        if self.kind == "parity":
            return set(range(len(self.data)))
        if self.kind in ("rabin", "streett"):
            out = set()
            for q, r in self.data:
                out |= set(q) | set(r)
            return out
        if self.kind == "muller":
            colors, _family = self.data
            return set(range(len(colors)))
        if self.kind == "circuit":
            return self.data.inputs_read()
        if self.kind in ("detbuchi", "detrabin"):
            return set(range(self.data.n_letters))
        raise ObjectiveError(f"unknown objective kind {self.kind!r}")


def reach(targets):
    return Objective("reach", frozenset(targets))


def safety(targets):
    return Objective("safety", frozenset(targets))


def buchi(targets):
    return Objective("buchi", frozenset(targets))


def cobuchi(targets):
    return Objective("cobuchi", frozenset(targets))


def parity(priorities):
    return Objective("parity", tuple(priorities))


def rabin(pairs):
    pairs = tuple((frozenset(q), frozenset(r)) for q, r in pairs)
    if not pairs:
        raise ObjectiveError("rabin pair list must be nonempty")
    return Objective("rabin", pairs)


def streett(pairs):
    pairs = tuple((frozenset(q), frozenset(r)) for q, r in pairs)
    if not pairs:
        raise ObjectiveError("streett pair list must be nonempty")
    return Objective("streett", pairs)


def muller(colors, family):
    return Objective("muller", (tuple(colors), frozenset(frozenset(f) for f in family)))


def circuit_objective(circ: BoolCircuit):
    return Objective("circuit", circ)


def det_buchi(aut: DetAutomaton):
    if aut.acceptance[0] != "buchi":
        raise ObjectiveError("detbuchi objective needs Buchi acceptance")
    return Objective("detbuchi", aut)


def det_rabin(aut: DetAutomaton):
    if aut.acceptance[0] != "rabin":
        raise ObjectiveError("detrabin objective needs Rabin acceptance")
    return Objective("detrabin", aut)


def eval_objective(occ, inf, obj: Objective) -> bool:
    """Satisfaction of ``obj`` by any play with these occ/inf sets.

    Automaton objectives are rejected here: their satisfaction is not a
    function of (occ, inf) over game states; use the product construction.
    """
    if not inf <= occ:
        raise ObjectiveError("inf must be a subset of occ")
    kind, data = obj.kind, obj.data
    if kind == "reach":
        return bool(occ & data)
    if kind == "safety":
        return not occ & data
    if kind == "buchi":
        return bool(inf & data)
    if kind == "cobuchi":
        return not inf & data
    if kind == "parity":
        return min(data[s] for s in inf) % 2 == 0
    if kind == "rabin":
        return any(inf & q and not inf & r for q, r in data)
    if kind == "streett":
        return all(not inf & q or inf & r for q, r in data)
    if kind == "muller":
        colors, family = data
        return frozenset(colors[s] for s in inf) in family
    if kind == "circuit":
        bits = [s in inf for s in range(data.n_inputs)]
        return eval_circuit(data, bits)
    raise ObjectiveError(
        f"objective kind {kind!r} cannot be evaluated on (occ, inf) sets")


# ---------------------------------------------------------------------------
# Preorders on payoff vectors
# ---------------------------------------------------------------------------

NAMED_PREORDERS = ("conjunction", "disjunction", "counting", "subset",
                   "maximise", "lexicographic")

TOTAL_PREORDERS = ("conjunction", "disjunction", "counting", "maximise",
                   "lexicographic")


@dataclass(frozen=True)
class Preorder:
    """Preorder on {0,1}^n payoff vectors.

    kind is one of the named preorders, or "circuit"/"monotone-circuit"
    with a BoolCircuit over 2n inputs (v then w) deciding v <= w.
    """

    kind: str
    circuit: Optional[BoolCircuit] = None
    arity: Optional[int] = None

    def __post_init__(self):
        if self.kind in ("circuit", "monotone-circuit"):
            if self.circuit is None or self.arity is None:
                raise ObjectiveError("circuit preorder needs a circuit and arity")
            if self.circuit.n_inputs != 2 * self.arity:
                raise ObjectiveError("circuit preorder must read 2n inputs")
            if self.kind == "monotone-circuit":
                _check_monotone_shape(self.circuit)
            if self.arity <= 4:
                _check_reflexive_transitive(self)
            else:
                log.warning("circuit preorder with arity %d accepted unchecked",
                            self.arity)
        elif self.kind not in NAMED_PREORDERS:
            raise ObjectiveError(f"unknown preorder kind {self.kind!r}")

    def is_total(self):
        return self.kind in TOTAL_PREORDERS


def _check_monotone_shape(circ: BoolCircuit):
    """Negations may only apply to the first n inputs (v side), and the
    w-side inputs must not be negated anywhere downstream."""
    n = circ.n_inputs // 2
    # a gate is "tainted" if a w-input can reach it through a NOT
    depends_w = [False] * len(circ.gates)
    for i, gate in enumerate(circ.gates):
        kind = gate[0]
        if kind == "in":
            depends_w[i] = gate[1] >= n
        elif kind == "const":
            depends_w[i] = False
        elif kind == "not":
            if depends_w[gate[1]]:
                raise ObjectiveError(
                    "monotone circuit preorder negates a w-side input")
            depends_w[i] = False
        else:
            depends_w[i] = depends_w[gate[1]] or depends_w[gate[2]]


def _holds(pre: Preorder, v, w) -> bool:
    """v <= w under the preorder (both are tuples of bits)."""
    kind = pre.kind
    if kind == "conjunction":
        return 0 in v or all(w)
    if kind == "disjunction":
        return not any(v) or 1 in w
    if kind == "counting":
        return sum(v) <= sum(w)
    if kind == "subset":
        return all(a <= b for a, b in zip(v, w))
    if kind == "maximise":
        vmax = max((i for i, b in enumerate(v) if b), default=-1)
        wmax = max((i for i, b in enumerate(w) if b), default=-1)
        return vmax <= wmax
    if kind == "lexicographic":
        if v == w:
            return True
        for a, b in zip(v, w):
            if a != b:
                return a < b
        return False
    return eval_circuit(pre.circuit, list(v) + list(w))


def _check_reflexive_transitive(pre: Preorder):
    n = pre.arity
    vecs = list(itertools.product((0, 1), repeat=n))
    for v in vecs:
        if not _holds(pre, v, v):
            raise ObjectiveError(f"circuit preorder is not reflexive at {v}")
    le = {(v, w) for v in vecs for w in vecs if _holds(pre, v, w)}
    for v, w in le:
        for u in vecs:
            if (w, u) in le and (v, u) not in le:
                raise ObjectiveError(
                    f"circuit preorder is not transitive: {v} <= {w} <= {u}")


def compare(pre: Preorder, v, w) -> str:
    """Classify (v <= w, w <= v): less / equivalent / greater / incomparable."""
    v, w = tuple(v), tuple(w)
    if len(v) != len(w):
        raise ObjectiveError("payoff vectors have different arities")
    if pre.kind in ("circuit", "monotone-circuit") and len(v) != pre.arity:
        raise ObjectiveError("payoff arity does not match preorder arity")
    vw = _holds(pre, v, w)
    wv = _holds(pre, w, v)
    if vw and wv:
        return "equivalent"
    if vw:
        return "less"
    if wv:
        return "greater"
    return "incomparable"


def pref_holds(pre: Preorder, v, w) -> bool:
    """v <= w (the asymmetric building block of compare)."""
    v, w = tuple(v), tuple(w)
    if len(v) != len(w):
        raise ObjectiveError("payoff vectors have different arities")
    return _holds(pre, v, w)


def preorder_to_circuit(pre: Preorder, n) -> BoolCircuit:
    """Circuit over 2n inputs computing v <= w for a named preorder."""
    if pre.kind in ("circuit", "monotone-circuit"):
        raise ObjectiveError("preorder is already a circuit")
    b = CircuitBuilder(2 * n)
    vs = [b.inp(i) for i in range(n)]
    ws = [b.inp(n + i) for i in range(n)]
    kind = pre.kind
    if kind == "subset":
        out = b.big_and([b.or_(b.not_(vs[i]), ws[i]) for i in range(n)])
    elif kind == "conjunction":
        out = b.or_(b.big_or([b.not_(v) for v in vs]), b.big_and(ws))
    elif kind == "disjunction":
        out = b.or_(b.big_and([b.not_(v) for v in vs]), b.big_or(ws))
    elif kind == "maximise":
        # for each i: v_i=1 implies some w_j=1 with j >= i
        terms = []
        for i in range(n):
            above = b.big_or(ws[i:])
            terms.append(b.or_(b.not_(vs[i]), above))
        out = b.big_and(terms)
    elif kind == "counting":
        # threshold comparison via iteratively computed "at least k" flags
        def at_least(bits):
            # flags[k] = at least k+1 of bits are set, built incrementally
            flags = []
            for bit in bits:
                new = []
                for k in range(len(flags) + 1):
                    if k == 0:
                        prev = b.const(1)
                    else:
                        prev = flags[k - 1]
                    carried = flags[k] if k < len(flags) else b.const(0)
                    new.append(b.or_(carried, b.and_(prev, bit)))
                flags = new
            return flags
        fv = at_least(vs)
        fw = at_least(ws)
        # sum(v) <= sum(w)  iff  for all k: at_least_k(v) -> at_least_k(w)
        out = b.big_and([b.or_(b.not_(fv[k]), fw[k]) for k in range(n)])
    elif kind == "lexicographic":
        # v = w, or exists i with v_i=0, w_i=1 and equal before i
        eqs = [b.not_(b.or_(b.and_(vs[i], b.not_(ws[i])),
                            b.and_(ws[i], b.not_(vs[i])))) for i in range(n)]
        all_eq = b.big_and(eqs)
        terms = [all_eq]
        for i in range(n):
            prefix_eq = b.big_and(eqs[:i]) if i else b.const(1)
            terms.append(b.big_and([prefix_eq, b.not_(vs[i]), ws[i]]))
        out = b.big_or(terms)
    else:
        raise ObjectiveError(f"unknown preorder kind {kind!r}")
    return b.build(out)


def is_monotone(pre: Preorder, n) -> bool:
    """Exhaustively check that bitwise v <= w implies v preorder-below w."""
    if n > 10:
        raise ObjectiveError("arity too large for exhaustive monotonicity check")
    for v in itertools.product((0, 1), repeat=n):
        for w in itertools.product((0, 1), repeat=n):
            if all(a <= c for a, c in zip(v, w)) and not _holds(pre, v, w):
                return False
    return True


# ---------------------------------------------------------------------------
# Preferences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Preference:
    """Single objective, or an ordered tuple of reach/Buchi targets.

    kind: "single" | "obuchi" | "oreach"; for the ordered kinds ``targets``
    is a nonempty tuple of frozensets and ``preorder`` has matching arity.
    """

    kind: str
    objective: Optional[Objective] = None
    targets: Optional[tuple] = None
    preorder: Optional[Preorder] = None

    def __post_init__(self):
        if self.kind == "single":
            if self.objective is None:
                raise ObjectiveError("single preference needs an objective")
        elif self.kind in ("obuchi", "oreach"):
            if not self.targets:
                raise ObjectiveError("ordered preference needs targets")
            if self.preorder is None:
                raise ObjectiveError("ordered preference needs a preorder")
            if self.preorder.kind in ("circuit", "monotone-circuit") \
                    and self.preorder.arity != len(self.targets):
                raise ObjectiveError("preorder arity does not match target count")
        else:
            raise ObjectiveError(f"unknown preference kind {self.kind!r}")

    @property
    def arity(self):
        return len(self.targets)

    def referenced_states(self):
        if self.kind == "single":
            return self.objective.referenced_states()
        out = set()
        for t in self.targets:
            out |= set(t)
        return out


def single(obj: Objective) -> Preference:
    return Preference("single", objective=obj)


def ordered_buchi(targets, pre: Preorder) -> Preference:
    return Preference("obuchi", targets=tuple(frozenset(t) for t in targets),
                      preorder=pre)


def ordered_reach(targets, pre: Preorder) -> Preference:
    return Preference("oreach", targets=tuple(frozenset(t) for t in targets),
                      preorder=pre)


def payoff_vector(occ, inf, pref: Preference):
    """Indicator vector of satisfied targets (occ for reach, inf for Buchi)."""
    if pref.kind == "obuchi":
        return tuple(1 if inf & t else 0 for t in pref.targets)
    if pref.kind == "oreach":
        return tuple(1 if occ & t else 0 for t in pref.targets)
    raise ObjectiveError("payoff vectors only exist for ordered preferences")


def satisfies(occ, inf, pref: Preference):
    """For single preferences: win/lose; ordered: the payoff vector."""
    if pref.kind == "single":
        return eval_objective(occ, inf, pref.objective)
    return payoff_vector(occ, inf, pref)


def prefers_at_most(pref: Preference, payoff_a, payoff_b) -> bool:
    """payoff_a <= payoff_b in the preference's order.

    For single objectives payoffs are bools (lose < win); for ordered
    preferences they are payoff vectors compared by the preorder.
    """
    if pref.kind == "single":
        return (not payoff_a) or bool(payoff_b)
    return pref_holds(pref.preorder, payoff_a, payoff_b)
