"""Zero-sum solvers for two-player turn-based arenas.

Vertices are integers; Eve is the protagonist everywhere.  All solvers
return winning regions, and strategies where the algorithm yields them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

EVE = True
ADAM = False

GENERIC_INF_GUARD = 9


class SolverError(ValueError):
    pass


@dataclass(frozen=True)
class TurnArena:
    """Two-player turn-based arena without dead ends."""

    owner: tuple                 # owner[v] is EVE or ADAM
    succ: tuple                  # succ[v] -> tuple of successors

    def __post_init__(self):
        for v, out in enumerate(self.succ):
            if not out:
                raise SolverError(f"vertex {v} has no successor")
            for u in out:
                if not 0 <= u < len(self.succ):
                    raise SolverError(f"vertex {v} has dangling edge to {u}")

    @property
    def n(self):
        return len(self.succ)

    def pred(self):
        p = [[] for _ in range(self.n)]
        for v, out in enumerate(self.succ):
            for u in out:
                p[u].append(v)
        return p


@dataclass
class WinningRegion:
    """Eve's winning vertices, with an optional strategy.

    ``strategy`` maps an Eve vertex to its chosen successor; for solvers
    that need memory, ``memory`` documents the product solved and
    ``memory_strategy`` maps (vertex, memory state) pairs.
    """

    region: frozenset
    strategy: dict = field(default_factory=dict)
    memory: Optional[str] = None
    memory_strategy: Optional[dict] = None
    adam_region: Optional[frozenset] = None
    adam_strategy: Optional[dict] = None


def attractor(arena: TurnArena, target, player, within=None):
    """Least set from which ``player`` forces a visit to ``target``.

    Returns (set, strategy) where the strategy maps the player's vertices
    in the attractor (outside the target) to an attracting successor.
    Restricted to ``within`` when given (edges leaving it are ignored for
    the player, and count against the opponent's forced moves).
    """
    if within is None:
        within = range(arena.n)
    within = set(within)
    target = set(target) & within
    pred = [[] for _ in range(arena.n)]
    out_deg = [0] * arena.n
    for v in within:
        for u in arena.succ[v]:
            if u in within:
                pred[u].append(v)
                out_deg[v] += 1
    attr = set(target)
    strategy = {}
    # count, per opponent vertex, successors not yet attracted
    remaining = {v: out_deg[v] for v in within}
    queue = list(target)
    while queue:
        u = queue.pop()
        for v in pred[u]:
            if v in attr:
                continue
            if arena.owner[v] == player:
                attr.add(v)
                strategy[v] = u
                queue.append(v)
            else:
                remaining[v] -= 1
                if remaining[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strategy


def _lowest_successor_in(arena, v, region):
    for u in arena.succ[v]:
        if u in region:
            return u
    return None


def solve_reach(arena: TurnArena, target):
    """Eve wins iff the play visits ``target`` at least once."""
    region, strat = attractor(arena, target, EVE)
    strategy = dict(strat)
    for v in region:
        if arena.owner[v] == EVE and v not in strategy:
            strategy[v] = arena.succ[v][0]
    adam_region = frozenset(range(arena.n)) - region
    adam_strategy = {v: _lowest_successor_in(arena, v, adam_region)
                     for v in adam_region if arena.owner[v] == ADAM}
    return WinningRegion(frozenset(region), strategy,
                         adam_region=adam_region, adam_strategy=adam_strategy)


def solve_safety(arena: TurnArena, avoid):
    """Eve wins iff the play never visits ``avoid``."""
    lost, adam_strat = attractor(arena, avoid, ADAM)
    region = frozenset(range(arena.n)) - lost
    strategy = {v: _lowest_successor_in(arena, v, region)
                for v in region if arena.owner[v] == EVE}
    return WinningRegion(region, strategy,
                         adam_region=frozenset(lost), adam_strategy=adam_strat)


def solve_buchi(arena: TurnArena, target):
    """Eve wins iff ``target`` is visited infinitely often.

    Classical repeated-attractor fixpoint; both strategies memoryless.
    """
    alive = set(range(arena.n))
    adam_region = set()
    adam_strategy = {}
    while True:
        reach_t, _ = attractor(arena, set(target) & alive, EVE, within=alive)
        dead = alive - reach_t
        if not dead:
            break
        # inside `dead`, Adam keeps Eve away from the target forever
        for v in dead:
            if arena.owner[v] == ADAM and v not in adam_strategy:
                u = _lowest_successor_in(arena, v, dead)
                if u is None:
                    u = _lowest_successor_in(arena, v, adam_region)
                adam_strategy[v] = u
        grabbed, pull = attractor(arena, dead, ADAM, within=alive)
        adam_strategy.update(pull)
        adam_region |= grabbed
        alive -= grabbed
    # within `alive`, Eve cycles through attractors to the target
    _, pull = attractor(arena, set(target) & alive, EVE, within=alive)
    strategy = dict(pull)
    for v in alive:
        if arena.owner[v] == EVE and v not in strategy:
            strategy[v] = _lowest_successor_in(arena, v, alive)
    return WinningRegion(frozenset(alive), strategy,
                         adam_region=frozenset(adam_region),
                         adam_strategy=adam_strategy)


def solve_cobuchi(arena: TurnArena, target):
    """Eve wins iff ``target`` is visited finitely often (dual of Buchi)."""
    dual = solve_buchi(_swap_owners(arena), target)
    return WinningRegion(dual.adam_region, dual.adam_strategy,
                         adam_region=dual.region, adam_strategy=dual.strategy)


def _swap_owners(arena: TurnArena):
    return TurnArena(tuple(not o for o in arena.owner), arena.succ)


# ---------------------------------------------------------------------------
# Conjunctions of reachability / Buchi objectives
# ---------------------------------------------------------------------------

def solve_conj_reach(arena: TurnArena, targets):
    """Eve wins iff every target set is visited at least once.

    Subset expansion: product vertices (v, mask of targets visited so far).
    The projected region contains v iff Eve wins from (v, initial mask).
    """
    k = len(targets)
    if k > 20:
        raise SolverError("too many reachability objectives for subset expansion")
    if k == 0:
        return WinningRegion(frozenset(range(arena.n)),
                             {v: arena.succ[v][0] for v in range(arena.n)
                              if arena.owner[v] == EVE})
    tmask = [0] * arena.n
    for i, t in enumerate(targets):
        for v in t:
            tmask[v] |= 1 << i
    full = (1 << k) - 1
    index = {}
    owner = []
    succ_sets = []
    order = []

    def node(v, m):
        key = (v, m)
        if key not in index:
            index[key] = len(order)
            order.append(key)
            owner.append(arena.owner[v])
            succ_sets.append(None)
        return index[key]

    seeds = [node(v, tmask[v]) for v in range(arena.n)]
    i = 0
    while i < len(order):
        v, m = order[i]
        succ_sets[i] = tuple(node(u, m | tmask[u]) for u in arena.succ[v])
        i += 1
    product = TurnArena(tuple(owner), tuple(succ_sets))
    goal = [i for i, (v, m) in enumerate(order) if m == full]
    sub = solve_reach(product, goal)
    region = frozenset(v for v in range(arena.n) if seeds[v] in sub.region)
    mem_strategy = {order[i]: order[s][0]
                    for i, s in ((i, sub.strategy.get(i)) for i in range(len(order)))
                    if s is not None}
    projected = {v: mem_strategy[(v, tmask[v])]
                 for v in region
                 if arena.owner[v] == EVE and (v, tmask[v]) in mem_strategy}
    return WinningRegion(region, projected, memory="visited-target subset",
                         memory_strategy=mem_strategy)


def solve_conj_buchi(arena: TurnArena, targets):
    """Eve wins iff every target set is visited infinitely often.

    Counter product: counter advances when the next target in round-robin
    order is visited, and resets after the last one; Eve's objective is a
    Buchi condition on full-counter vertices.
    """
    k = len(targets)
    if k == 0:
        return WinningRegion(frozenset(range(arena.n)),
                             {v: arena.succ[v][0] for v in range(arena.n)
                              if arena.owner[v] == EVE})
    member = [set() for _ in range(arena.n)]
    for i, t in enumerate(targets):
        for v in t:
            member[v].add(i)
    n = arena.n
    owner = []
    succ_sets = []
    for c in range(k + 1):
        for v in range(n):
            owner.append(arena.owner[v])

    def nid(v, c):
        return c * n + v

    def advance(c, u):
        if c == k:
            c = 0
        if c < k and c in member[u]:
            return c + 1
        return c

    for c in range(k + 1):
        for v in range(n):
            succ_sets.append(tuple(nid(u, advance(c, u)) for u in arena.succ[v]))
    product = TurnArena(tuple(owner), tuple(succ_sets))
    goal = [nid(v, k) for v in range(n)]
    sub = solve_buchi(product, goal)
    region = frozenset(v for v in range(n) if nid(v, 0) in sub.region)
    mem_strategy = {}
    for key, s in sub.strategy.items():
        c, v = divmod(key, n)
        sc, sv = divmod(s, n)
        mem_strategy[(v, c)] = (sv, sc)
    projected = {v: mem_strategy[(v, 0)][0]
                 for v in region
                 if arena.owner[v] == EVE and (v, 0) in mem_strategy}
    return WinningRegion(region, projected, memory="round-robin target counter",
                         memory_strategy=mem_strategy)


# ---------------------------------------------------------------------------
# Parity (Zielonka) and generic Inf-set conditions
# ---------------------------------------------------------------------------

def solve_parity_zielonka(arena: TurnArena, priorities):
    """Min-parity: Eve wins iff the least priority seen infinitely often
    is even.  Returns a WinningRegion with memoryless strategies for both
    players."""
    if len(priorities) != arena.n:
        raise SolverError("one priority per vertex required")

    succ = arena.succ
    owner = arena.owner

    def rec(vertices):
        if not vertices:
            return set(), set(), {}, {}
        d = min(priorities[v] for v in vertices)
        player = EVE if d % 2 == 0 else ADAM
        dverts = {v for v in vertices if priorities[v] == d}
        area, pull = attractor(arena, dverts, player, within=vertices)
        w0, w1, s0, s1 = rec(vertices - area)
        wp, sp = (w0, s0) if player == EVE else (w1, s1)
        wo, so = (w1, s1) if player == EVE else (w0, s0)
        if not wo:
            # `player` wins everywhere: attract to d-vertices, restart there
            strat = dict(sp)
            strat.update(pull)
            for v in dverts:
                if owner[v] == player and v not in strat:
                    for u in succ[v]:
                        if u in vertices:
                            strat[v] = u
                            break
            if player == EVE:
                return set(vertices), set(), strat, {}
            return set(), set(vertices), {}, strat
        grabbed, opull = attractor(arena, wo, not player, within=vertices)
        w0b, w1b, s0b, s1b = rec(vertices - grabbed)
        if player == EVE:
            wadam = w1b | grabbed
            sadam = dict(s1)
            sadam.update(opull)
            sadam.update(s1b)
            return w0b, wadam, s0b, sadam
        weve = w0b | grabbed
        seve = dict(s0)
        seve.update(opull)
        seve.update(s0b)
        return weve, w1b, seve, s1b

    w0, w1, s0, s1 = rec(set(range(arena.n)))
    return WinningRegion(frozenset(w0), s0,
                         adam_region=frozenset(w1), adam_strategy=s1)


def solve_generic_inf(arena: TurnArena, accept, relevant=None):
    """Solve an arbitrary Inf-set condition for Eve.

    ``accept`` is a predicate on frozensets of *relevant* vertices; a path
    is winning for Eve iff accept(Inf(path) & relevant).  Uses a
    latest-appearance-record expansion into a parity game; the number of
    relevant vertices is guarded.
    """
    if relevant is None:
        relevant = list(range(arena.n))
    relevant = sorted(set(relevant))
    if len(relevant) > GENERIC_INF_GUARD:
        raise SolverError(
            f"{len(relevant)} relevant vertices exceed the record-expansion "
            f"guard ({GENERIC_INF_GUARD})")
    rel = {v: i for i, v in enumerate(relevant)}
    m = len(relevant)
    if m == 0:
        win = bool(accept(frozenset()))
        if win:
            return WinningRegion(frozenset(range(arena.n)),
                                 {v: arena.succ[v][0] for v in range(arena.n)
                                  if arena.owner[v] == EVE})
        return WinningRegion(frozenset(), {},
                             adam_region=frozenset(range(arena.n)))

    accept_cache = {}

    def accepted(label_set):
        if label_set not in accept_cache:
            accept_cache[label_set] = bool(
                accept(frozenset(relevant[i] for i in label_set)))
        return accept_cache[label_set]

    rec0 = tuple(range(m))
    # lazily build the reachable record product; priorities are max-parity
    index = {}
    order = []
    owner = []
    prio_max = []

    def node(v, rec, hit):
        key = (v, rec, hit)
        if key not in index:
            index[key] = len(order)
            order.append(key)
            owner.append(arena.owner[v])
            if hit == 0:
                p = 0
            else:
                s = frozenset(rec[:hit])
                p = 2 * hit if accepted(s) else 2 * hit + 1
            prio_max.append(p)
        return index[key]

    def step(rec, v):
        if v not in rel:
            return rec, 0
        label = rel[v]
        pos = rec.index(label)
        new = (label,) + rec[:pos] + rec[pos + 1:]
        return new, pos + 1

    seeds = {}
    for v in range(arena.n):
        seeds[v] = node(v, rec0, 0)
    succ_sets = []
    i = 0
    while i < len(order):
        v, rec, _ = order[i]
        row = []
        for u in arena.succ[v]:
            nrec, hit = step(rec, u)
            row.append(node(u, nrec, hit))
        succ_sets.append(tuple(row))
        i += 1
    product = TurnArena(tuple(owner), tuple(succ_sets))
    top = max(prio_max)
    if top % 2:
        top += 1
    prio_min = [top - p for p in prio_max]
    sub = solve_parity_zielonka(product, prio_min)
    region = frozenset(v for v in range(arena.n) if seeds[v] in sub.region)
    mem_strategy = {}
    for i, s in sub.strategy.items():
        v, rec, hit = order[i]
        sv, srec, _ = order[s]
        mem_strategy[(v, rec)] = (sv, srec)
    strategy = {v: mem_strategy[(v, rec0)][0]
                for v in region
                if arena.owner[v] == EVE and (v, rec0) in mem_strategy}
    return WinningRegion(region, strategy, memory="latest-appearance record",
                         memory_strategy=mem_strategy,
                         adam_region=frozenset(range(arena.n)) - region)


# ---------------------------------------------------------------------------
# First-repetition search for monotone product arenas
# ---------------------------------------------------------------------------

class AndOrGame:
    """Game interface for the first-repetition search.

    ``owner(v)`` returns EVE/ADAM; ``successors(v)`` an ordered tuple;
    ``terminal(v)`` None or a final verdict; ``repeat_verdict(segment)``
    decides a branch that closed a cycle (``segment`` is the list of
    vertices from the first occurrence of the repeated vertex onward).
    """

    def owner(self, v):
        raise NotImplementedError

    def successors(self, v):
        raise NotImplementedError

    def terminal(self, v):
        return None

    def repeat_verdict(self, segment):
        raise NotImplementedError


def and_or_search(game: AndOrGame, start, cache=None):
    """Exhaustive AND-OR evaluation with first-repetition cutoff.

    Branches stop at the first repeated vertex; the verdict of the closed
    cycle decides the branch.  Verdicts of subtrees that did not inspect
    any vertex above their root are cached (their value is path
    independent); the cache may be shared between calls on the same game.
    """
    if cache is None:
        cache = {}
    path_index = {}
    path = []
    INF = float("inf")

    def visit(v):
        if v in cache:
            return cache[v], INF
        term = game.terminal(v)
        if term is not None:
            cache[v] = term
            return term, INF
        if v in path_index:
            i = path_index[v]
            return game.repeat_verdict(path[i:] + [v]), i
        depth = len(path)
        path_index[v] = depth
        path.append(v)
        want = game.owner(v)  # EVE wants True, ADAM wants False
        goal = want == EVE
        verdict = not goal
        low = INF
        for u in game.successors(v):
            val, lw = visit(u)
            if val == goal:
                verdict = goal
                low = lw
                break
            low = min(low, lw)
        path.pop()
        del path_index[v]
        if low >= depth:
            cache[v] = verdict
            return verdict, INF
        return verdict, low

    verdict, _ = visit(start)
    return verdict


def first_repetition_solve(game: AndOrGame, start, edges_monotone=None,
                           cache=None):
    """Winner at ``start`` of a Buchi-like condition on a monotone arena.

    ``edges_monotone(u, v)`` must certify the monotone components along
    every explored edge (sets that only grow / suspect sets that only
    shrink); it is checked as edges are first discovered.
    """
    if edges_monotone is not None:
        checked = set()
        orig = game.successors

        def checked_successors(v):
            out = orig(v)
            for u in out:
                if (v, u) not in checked:
                    if not edges_monotone(v, u):
                        raise SolverError(
                            "arena violates the monotone-component precondition")
                    checked.add((v, u))
            return out

        game = _WrappedGame(game, checked_successors)
    return and_or_search(game, start, cache=cache)


class _WrappedGame(AndOrGame):
    def __init__(self, inner, successors):
        self._inner = inner
        self._succ = successors

    def owner(self, v):
        return self._inner.owner(v)

    def successors(self, v):
        return self._succ(v)

    def terminal(self, v):
        return self._inner.terminal(v)

    def repeat_verdict(self, segment):
        return self._inner.repeat_verdict(segment)


# ---------------------------------------------------------------------------
# Strategy checking and brute-force enumeration
# ---------------------------------------------------------------------------

def tarjan_sccs(n, succ):
    """Strongly connected components, iterative Tarjan; list of lists in
    reverse topological order."""
    index = [0] * n
    low = [0] * n
    on_stack = [False] * n
    visited = [False] * n
    stack = []
    sccs = []
    counter = itertools.count(1)
    for root in range(n):
        if visited[root]:
            continue
        work = [(root, iter(succ(root)))]
        visited[root] = True
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for u in it:
                if not visited[u]:
                    visited[u] = True
                    index[u] = low[u] = next(counter)
                    stack.append(u)
                    on_stack[u] = True
                    work.append((u, iter(succ(u))))
                    advanced = True
                    break
                elif on_stack[u]:
                    low[v] = min(low[v], index[u])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def check_memoryless_winning(arena: TurnArena, eve_strategy, condition,
                             roots=None, monotone=True, subset_guard=12):
    """Does the memoryless Eve strategy win ``condition`` from ``roots``?

    ``condition`` is a predicate on frozensets of vertices (the Inf set of
    a play).  The arena restricted to the strategy is decomposed into
    SCCs; for monotone conditions it suffices that every reachable SCC
    that can host a play satisfies the condition; otherwise every
    strongly connected subset is checked (guarded).
    """
    if roots is None:
        roots = range(arena.n)

    def succ(v):
        if arena.owner[v] == EVE:
            if v not in eve_strategy:
                raise SolverError(f"strategy undefined at Eve vertex {v}")
            return (eve_strategy[v],)
        return arena.succ[v]

    reachable = set()
    frontier = list(roots)
    while frontier:
        v = frontier.pop()
        if v in reachable:
            continue
        reachable.add(v)
        frontier.extend(succ(v))

    n = arena.n
    sccs = [c for c in tarjan_sccs(n, lambda v: [u for u in succ(v) if u in reachable])
            if set(c) <= reachable]
    for comp in sccs:
        cset = set(comp)
        has_cycle = len(comp) > 1 or any(u in cset for u in succ(comp[0]))
        if not has_cycle:
            continue
        if monotone:
            if not condition(frozenset(comp)):
                return False
        else:
            if len(comp) > subset_guard:
                raise SolverError(
                    "SCC too large for exhaustive sub-cycle enumeration")
            for r in range(1, len(comp) + 1):
                for sub in itertools.combinations(comp, r):
                    sset = set(sub)
                    inner = [[u for u in succ(v) if u in sset] for v in sub]
                    if any(not row for row in inner):
                        continue
                    remap = {v: i for i, v in enumerate(sub)}
                    comps = tarjan_sccs(len(sub),
                                        lambda i: [remap[u] for u in inner[i]])
                    if len(comps) != 1:
                        continue
                    if len(sub) == 1 and sub[0] not in succ(sub[0]):
                        continue
                    if not condition(frozenset(sub)):
                        return False
    return True


def memoryless_strategies(arena: TurnArena, player, domain=None):
    """Iterate over all memoryless strategies of ``player`` (dicts)."""
    if domain is None:
        domain = [v for v in range(arena.n) if arena.owner[v] == player]
    domain = sorted(domain)
    for choice in itertools.product(*(arena.succ[v] for v in domain)):
        yield dict(zip(domain, choice))


def play_out(arena: TurnArena, start, eve_strategy, adam_strategy):
    """(prefix, cycle) of the unique play under two memoryless strategies."""
    seen = {}
    seq = []
    v = start
    while v not in seen:
        seen[v] = len(seq)
        seq.append(v)
        v = eve_strategy[v] if arena.owner[v] == EVE else adam_strategy[v]
    i = seen[v]
    return seq[:i], seq[i:]
