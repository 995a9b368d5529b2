"""Objective and preference rewritings.

Single-Buchi (co-)reductions for ordered objectives, deterministic-
automaton constructions for threshold comparisons, inf-set circuit
encodings, game/automaton products, the visited-set product for ordered
reachability, and the turn-based sequentialization used by the value
problem.
"""

from __future__ import annotations

import itertools

from .game import ConcurrentGame, GameError
from .objectives import (BoolCircuit, CircuitBuilder, DetAutomaton, Objective,
                         ObjectiveError, Preference, Preorder, ordered_buchi,
                         buchi as buchi_obj, rabin as rabin_obj, single)
from .solvers import ADAM, EVE, TurnArena
from .suspect import suspects


# ---------------------------------------------------------------------------
# (Co-)reductions of ordered objectives to a single target set
# ---------------------------------------------------------------------------

def reduce_to_single_buchi(targets, pre: Preorder, v, universe):
    """Target set T(v) with: payoff >= v  iff  the set is hit.

    Supported for the disjunction and maximise preorders; ``universe`` is
    the full state set (used when v is the bottom class, which every play
    secures).
    """
    v = tuple(v)
    if len(v) != len(targets):
        raise ObjectiveError("payoff arity does not match target count")
    if pre.kind == "disjunction":
        if not any(v):
            return frozenset(universe)
        return frozenset().union(*targets)
    if pre.kind == "maximise":
        if not any(v):
            return frozenset(universe)
        i0 = max(i for i, b in enumerate(v) if b)
        return frozenset().union(*targets[i0:])
    raise ObjectiveError(f"preorder {pre.kind!r} is not reducible to a single target")


def coreduce_to_single_buchi(targets, pre: Preorder, v, universe):
    """Target set T(v) with: payoff improves on v  iff  the set is hit."""
    v = tuple(v)
    if len(v) != len(targets):
        raise ObjectiveError("payoff arity does not match target count")
    if pre.kind == "subset":
        zero = [t for t, b in zip(targets, v) if not b]
        return frozenset().union(*zero) if zero else frozenset()
    if pre.kind == "disjunction":
        # total preorder: improving on v = securing the class above it
        if any(v):
            return frozenset()
        return frozenset().union(*targets)
    if pre.kind == "maximise":
        i0 = max((i for i, b in enumerate(v) if b), default=-1)
        above = targets[i0 + 1:]
        return frozenset().union(*above) if above else frozenset()
    raise ObjectiveError(
        f"preorder {pre.kind!r} is not co-reducible to a single target")


COREDUCIBLE_PREORDERS = ("disjunction", "maximise", "subset")
REDUCIBLE_PREORDERS = ("disjunction", "maximise")


# ---------------------------------------------------------------------------
# Deterministic Buchi automata recognising threshold comparisons
# ---------------------------------------------------------------------------

def _all_accepting(n_letters):
    return DetAutomaton(1, n_letters, (tuple(0 for _ in range(n_letters)),),
                        0, ("buchi", frozenset({0})))


def conjunction_automaton(targets, n_letters) -> DetAutomaton:
    """Accepts the plays visiting every target set infinitely often.

    States q0..qn; qi-1 advances to qi on states of target i and loops
    otherwise; qn (the repeated state) resets to q0 on every letter.
    """
    n = len(targets)
    if n < 1:
        raise ObjectiveError("conjunction automaton needs at least one target")
    delta = []
    for i in range(n):
        row = [i + 1 if s in targets[i] else i for s in range(n_letters)]
        delta.append(tuple(row))
    delta.append(tuple(0 for _ in range(n_letters)))
    return DetAutomaton(n + 1, n_letters, tuple(delta), 0,
                        ("buchi", frozenset({n})))


def subset_threshold_automaton(targets, u, n_letters) -> DetAutomaton:
    """Accepts plays whose payoff dominates ``u`` in the subset preorder."""
    chosen = [t for t, b in zip(targets, u) if b]
    if not chosen:
        return _all_accepting(n_letters)
    return conjunction_automaton(chosen, n_letters)


def lexicographic_automaton(targets, u, n_letters) -> DetAutomaton:
    """Accepts plays whose payoff is lexicographically at least ``u``.

    One state per set bit of ``u`` plus the repeated state q0; advancing
    on the next required target, resetting to q0 on any more significant
    target whose bit in ``u`` is zero.
    """
    u = tuple(u)
    n = len(targets)
    if len(u) != n:
        raise ObjectiveError("payoff arity does not match target count")
    members = [0] + [i + 1 for i, b in enumerate(u) if b]  # 1-based target ids
    pos = {m: k for k, m in enumerate(members)}

    def succ_of(m):
        later = [x for x in members if x > m]
        return later[0] if later else 0

    delta = []
    for m in members:
        row = []
        for s in range(n_letters):
            if m == 0:
                row.append(pos[succ_of(0)])
                continue
            resets = any(s in targets[k - 1]
                         for k in range(1, m) if u[k - 1] == 0)
            if s in targets[m - 1]:
                row.append(pos[succ_of(m)])
            elif resets:
                row.append(pos[0])
            else:
                row.append(pos[m])
        delta.append(tuple(row))
    return DetAutomaton(len(members), n_letters, tuple(delta), 0,
                        ("buchi", frozenset({0})))


def threshold_automaton(pref: Preference, u, n_letters) -> DetAutomaton:
    """Deterministic Buchi automaton for payoff >= u, for the preorders
    that admit one (conjunction, subset, lexicographic)."""
    kind = pref.preorder.kind
    if kind == "conjunction":
        if all(u):
            return conjunction_automaton(pref.targets, n_letters)
        return _all_accepting(n_letters)
    if kind == "subset":
        return subset_threshold_automaton(pref.targets, u, n_letters)
    if kind == "lexicographic":
        return lexicographic_automaton(pref.targets, u, n_letters)
    raise ObjectiveError(
        f"no deterministic-automaton reduction for preorder {kind!r}")


# ---------------------------------------------------------------------------
# Inf-set circuits for prefix-independent objectives
# ---------------------------------------------------------------------------

def objective_to_inf_circuit(obj: Objective, n_states) -> BoolCircuit:
    """Circuit over state inputs equivalent to ``obj`` on every inf set."""
    b = CircuitBuilder(n_states)
    kind, data = obj.kind, obj.data
    if kind == "buchi":
        out = b.big_or([b.inp(s) for s in sorted(data)])
    elif kind == "cobuchi":
        out = b.not_(b.big_or([b.inp(s) for s in sorted(data)]))
    elif kind == "parity":
        terms = []
        for s in range(n_states):
            if data[s] % 2 == 0:
                smaller_odd = [t for t in range(n_states)
                               if data[t] % 2 == 1 and data[t] < data[s]]
                terms.append(b.and_(b.inp(s), b.not_(
                    b.big_or([b.inp(t) for t in smaller_odd]))))
        out = b.big_or(terms)
    elif kind == "rabin":
        terms = []
        for q, r in data:
            hit_q = b.big_or([b.inp(s) for s in sorted(q)])
            hit_r = b.big_or([b.inp(s) for s in sorted(r)])
            terms.append(b.and_(hit_q, b.not_(hit_r)))
        out = b.big_or(terms)
    elif kind == "streett":
        terms = []
        for q, r in data:
            hit_q = b.big_or([b.inp(s) for s in sorted(q)])
            hit_r = b.big_or([b.inp(s) for s in sorted(r)])
            terms.append(b.or_(b.not_(hit_q), hit_r))
        out = b.big_and(terms)
    elif kind == "muller":
        colors, family = data
        terms = []
        for fset in sorted(family, key=sorted):
            lits = []
            universe = set(colors)
            for col in sorted(universe):
                states = [s for s in range(n_states) if colors[s] == col]
                hit = b.big_or([b.inp(s) for s in states])
                lits.append(hit if col in fset else b.not_(hit))
            unreachable = fset - universe
            if unreachable:
                lits.append(b.const(0))
            terms.append(b.big_and(lits))
        out = b.big_or(terms)
    elif kind == "circuit":
        return data
    else:
        raise ObjectiveError(
            f"objective kind {kind!r} depends on occ, not only inf")
    return b.build(out)


def parity_as_rabin(priorities) -> Objective:
    """Rabin pairs equivalent to a parity condition.

    Pair i accepts when some priority-2i state recurs while no smaller
    odd priority does.
    """
    d = max(priorities) if priorities else 0
    pairs = []
    for i in range(d // 2 + 1):
        q = frozenset(s for s, p in enumerate(priorities) if p == 2 * i)
        r = frozenset(s for s, p in enumerate(priorities)
                      if p % 2 == 1 and p < 2 * i)
        pairs.append((q, r))
    return rabin_obj(pairs)


# ---------------------------------------------------------------------------
# Game/automaton product
# ---------------------------------------------------------------------------

def _lift_targets(obj_targets, state_map):
    """state_map: product index -> original state index."""
    return frozenset(i for i, s in enumerate(state_map) if s in obj_targets)


def _lift_objective(obj: Objective, state_map, n_new) -> Objective:
    kind, data = obj.kind, obj.data
    if kind in ("reach", "safety", "buchi", "cobuchi"):
        return Objective(kind, _lift_targets(data, state_map))
    if kind == "parity":
        return Objective(kind, tuple(data[s] for s in state_map))
    if kind in ("rabin", "streett"):
        return Objective(kind, tuple(
            (_lift_targets(q, state_map), _lift_targets(r, state_map))
            for q, r in data))
    if kind == "muller":
        colors, family = data
        return Objective(kind, (tuple(colors[s] for s in state_map), family))
    if kind == "circuit":
        b = CircuitBuilder(n_new)
        per_state = []
        for s in range(data.n_inputs):
            copies = [b.inp(i) for i, t in enumerate(state_map) if t == s]
            per_state.append(b.big_or(copies))
        remap = []
        for gate in data.gates:
            k = gate[0]
            if k == "in":
                remap.append(per_state[gate[1]])
            elif k == "const":
                remap.append(b.const(gate[1]))
            elif k == "not":
                remap.append(b.not_(remap[gate[1]]))
            else:
                remap.append(b._add((k, remap[gate[1]], remap[gate[2]])))
        return Objective("circuit", b.build(remap[data.output]))
    if kind in ("detbuchi", "detrabin"):
        aut = data
        delta = tuple(tuple(row[s] for s in state_map) for row in aut.delta)
        return Objective(kind, DetAutomaton(aut.n_states, n_new, delta,
                                            aut.initial, aut.acceptance))
    raise ObjectiveError(f"cannot lift objective kind {kind!r}")


def _lift_preference(pref: Preference, state_map, n_new) -> Preference:
    if pref.kind == "single":
        return single(_lift_objective(pref.objective, state_map, n_new))
    targets = tuple(_lift_targets(t, state_map) for t in pref.targets)
    return Preference(pref.kind, targets=targets, preorder=pref.preorder)


def product_with_automaton(game: ConcurrentGame, agent,
                           aut: DetAutomaton) -> ConcurrentGame:
    """Synchronous product replacing one agent's objective by an internal
    condition over product states; other preferences lift by projection.

    The full Stat x Q product is built (no reachability pruning); product
    state (s, q) is reached after the automaton has read everything up to
    but excluding s.
    """
    if aut.n_letters != game.n_states:
        raise GameError("automaton alphabet must be the game's state set")
    n, m = game.n_states, aut.n_states
    names = tuple((game.states[s], q) for s in range(n) for q in range(m))

    def pid(s, q):
        return s * m + q

    state_map = tuple(s for s in range(n) for _ in range(m))
    allow = tuple(game.allow[s] for s in range(n) for _ in range(m))
    tab = []
    for s in range(n):
        for q in range(m):
            q2 = aut.delta[q][s]
            tab.append({mv: pid(t, q2) for mv, t in game.tab[s].items()})
    kind, acc = aut.acceptance
    if kind == "buchi":
        target = frozenset(pid(s, q) for s in range(n) for q in acc)
        own = single(buchi_obj(target))
    else:
        pairs = [(frozenset(pid(s, q) for s in range(n) for q in e),
                  frozenset(pid(s, q) for s in range(n) for q in f))
                 for e, f in acc]
        own = single(rabin_obj(pairs))
    prefs = []
    for a in range(len(game.agents)):
        if a == agent:
            prefs.append(own)
        else:
            prefs.append(_lift_preference(game.prefs[a], state_map, n * m))
    product = ConcurrentGame(names, game.agents, game.actions, allow,
                             tuple(tab), tuple(prefs))
    return product


def product_initial(game: ConcurrentGame, aut: DetAutomaton, start):
    """Product index of (start, automaton initial)."""
    return start * aut.n_states + aut.initial


# ---------------------------------------------------------------------------
# Visited-set product for ordered reachability
# ---------------------------------------------------------------------------

def visited_set_product(game: ConcurrentGame, start):
    """Product tracking the set of visited states, pruned to the part
    reachable from (start, {start}); ordered-reachability preferences
    become ordered-Buchi preferences over the product.

    Returns (product game, product start index, state map) where
    state_map[i] = (state, visited frozenset).
    """
    for a in range(len(game.agents)):
        if game.prefs[a].kind != "oreach":
            raise GameError(
                "visited-set product requires ordered reachability preferences")
    index = {}
    labels = []

    def node(s, vis):
        key = (s, vis)
        if key not in index:
            index[key] = len(labels)
            labels.append(key)
        return index[key]

    start_idx = node(start, frozenset({start}))
    tab = []
    allow = []
    i = 0
    while i < len(labels):
        s, vis = labels[i]
        allow.append(game.allow[s])
        tab.append({mv: node(t, vis | {t}) for mv, t in game.tab[s].items()})
        i += 1
    names = tuple((game.states[s], tuple(sorted(vis))) for s, vis in labels)
    prefs = []
    for a in range(len(game.agents)):
        pref = game.prefs[a]
        targets = tuple(
            frozenset(i for i, (s, vis) in enumerate(labels) if vis & t)
            for t in pref.targets)
        prefs.append(ordered_buchi(targets, pref.preorder))
    product = ConcurrentGame(names, game.agents, game.actions, tuple(allow),
                             tuple(tab), tuple(prefs))
    return product, start_idx, tuple(labels)


# ---------------------------------------------------------------------------
# Turn-based sequentialization for the value problem
# ---------------------------------------------------------------------------

def sequentialize_for_value(game: ConcurrentGame, agent):
    """Split each step: the agent picks her action, then the coalition of
    all other agents picks the rest of the move profile.

    Returns (arena, labels): labels[v] is ("s", state) for agent vertices
    and ("m", state, action) for coalition vertices; Eve is the agent.
    """
    others = [a for a in range(len(game.agents)) if a != agent]
    index = {}
    labels = []
    owner = []
    succ = []

    def vertex(label):
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
            owner.append(EVE if label[0] == "s" else ADAM)
            succ.append(None)
        return index[label]

    for s in range(game.n_states):
        vertex(("s", s))
    i = 0
    while i < len(labels):
        label = labels[i]
        if label[0] == "s":
            s = label[1]
            succ[i] = tuple(vertex(("m", s, c)) for c in game.allow[s][agent])
        else:
            _, s, c = label
            outs = []
            for rest in itertools.product(*(game.allow[s][a] for a in others)):
                move = [None] * len(game.agents)
                move[agent] = c
                for a, ca in zip(others, rest):
                    move[a] = ca
                outs.append(vertex(("s", game.tab[s][tuple(move)])))
            # deduplicate, preserving deterministic order
            succ[i] = tuple(dict.fromkeys(outs))
        i += 1
    return TurnArena(tuple(owner), tuple(succ)), tuple(labels)


# ---------------------------------------------------------------------------
# Game simulation checking
# ---------------------------------------------------------------------------

def check_game_simulation(game_a: ConcurrentGame, game_b: ConcurrentGame,
                          relation) -> bool:
    """Exhaustively verify that ``relation`` (pairs of state indices) is a
    game simulation of ``game_a`` by ``game_b``: every move of A from a
    related state has a matching move of B whose successor stays related
    and whose suspect sets refine A's, witnessed state by state."""
    if game_a.agents != game_b.agents:
        raise GameError("game simulation needs identical agent sets")
    rel = set(relation)
    by_b = {}
    for s, t in rel:
        by_b.setdefault(t, []).append(s)
    for s, sp in rel:
        for move in game_a.legal_moves(s):
            if not any(_matches(game_a, game_b, s, sp, move, move_b, rel)
                       for move_b in game_b.legal_moves(sp)):
                return False
    return True


def _matches(game_a, game_b, s, sp, move_a, move_b, rel):
    if (game_a.tab[s][move_a], game_b.tab[sp][move_b]) not in rel:
        return False
    for tp in range(game_b.n_states):
        susp_b = suspects(game_b, sp, tp, move_b)
        found = False
        for t in range(game_a.n_states):
            if (t, tp) in rel and \
                    susp_b & suspects(game_a, s, t, move_a) == susp_b:
                found = True
                break
        if not found:
            return False
    return True
