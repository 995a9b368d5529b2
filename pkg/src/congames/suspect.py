"""Suspect arena: the two-player turn-based abstraction of a concurrent game.

Eve proposes move profiles, Adam picks successor states; the suspect set
tracks which agents could have unilaterally caused the observed
transitions.  Vertices are interned to integers; suspect sets are agent
bitmasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .game import ConcurrentGame, GameError, mask_iter, mask_of, mask_size
from .solvers import ADAM, EVE, TurnArena


def suspects(game: ConcurrentGame, s, t, move):
    """Bitmask of agents that can unilaterally steer ``s`` to ``t``.

    An agent is suspect for (s, t) under ``move`` if changing only her own
    action can produce ``t``; when t == tab(s, move) every agent is.
    """
    if not game.is_legal(s, move):
        raise GameError(f"move {move} illegal at state {game.states[s]}")
    mask = 0
    for a in range(len(game.agents)):
        for alt in game.allow[s][a]:
            changed = move[:a] + (alt,) + move[a + 1:]
            if game.tab[s][changed] == t:
                mask |= 1 << a
                break
    return mask


@dataclass(frozen=True)
class SuspectArena:
    """Reachable suspect arena of a game, built from one initial state.

    Eve vertices are (state, suspect mask); Adam vertices are
    (state, suspect mask, move).  ``obey[v]`` marks, for an Adam vertex,
    the successor chosen when Adam obeys Eve.
    """

    game: ConcurrentGame
    arena: TurnArena
    labels: tuple          # labels[v] = (s, mask) or (s, mask, move)
    initial: int
    obey: dict             # adam vertex -> obeyed successor vertex
    index: dict            # label -> vertex id

    def is_eve(self, v):
        return self.arena.owner[v] == EVE

    def state_of(self, v):
        return self.labels[v][0]

    def mask_of(self, v):
        return self.labels[v][1]

    def eve_vertex(self, s, mask):
        return self.index.get((s, mask))

    def vertex_name(self, v):
        lab = self.labels[v]
        g = self.game
        agents = "{" + ",".join(g.agents[a] for a in mask_iter(lab[1])) + "}"
        if len(lab) == 2:
            return f"{g.states[lab[0]]} | {agents}"
        move = "<" + ",".join(g.actions[c] for c in lab[2]) + ">"
        return f"{g.states[lab[0]]} | {agents} | {move}"


def build_arena(game: ConcurrentGame, start) -> SuspectArena:
    """Reachable suspect arena from Eve(start, all agents)."""
    if not 0 <= start < game.n_states:
        raise GameError(f"unknown state index {start}")
    full = game.full_mask
    index = {}
    labels = []
    owner = []
    succ = []
    obey = {}

    def vertex(label):
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
            owner.append(EVE if len(label) == 2 else ADAM)
            succ.append(None)
        return index[label]

    initial = vertex((start, full))
    i = 0
    while i < len(labels):
        label = labels[i]
        if len(label) == 2:
            s, mask = label
            succ[i] = tuple(vertex((s, mask, m)) for m in game.legal_moves(s))
        else:
            s, mask, move = label
            obeyed = game.tab[s][move]
            out = []
            for t in range(game.n_states):
                tmask = mask & suspects(game, s, t, move) if t != obeyed else mask
                out.append(vertex((t, tmask)))
            succ[i] = tuple(out)
            obey[i] = index[(obeyed, mask)]
        i += 1
    arena = TurnArena(tuple(owner), tuple(succ))
    return SuspectArena(game, arena, tuple(labels), initial, obey, index)


def arena_size_bound(game: ConcurrentGame):
    """Reachable-vertex bound (|Stat|+|Tab|) * (1 + (|Stat|+|Tab|) * |Tab|)."""
    base = game.n_states + game.size()
    return base * (1 + base * game.size())


def deviation_targets(sarena: SuspectArena, obey_vertices):
    """All non-obey successors of the Adam vertices along an obey path.

    ``obey_vertices`` is the vertex sequence of a lasso that follows obey
    edges only (Eve and Adam vertices alternating).  Returns a list of
    (position, deviation vertex) pairs, deduplicated in first-seen order.
    """
    out = []
    seen = set()
    for pos, v in enumerate(obey_vertices):
        if sarena.is_eve(v):
            continue
        if v not in sarena.obey:
            raise GameError("vertex sequence leaves the obey subgraph")
        for u in sarena.arena.succ[v]:
            if u != sarena.obey[v] and (pos, u) not in seen:
                seen.add((pos, u))
                out.append((pos, u))
    return out


# ---------------------------------------------------------------------------
# Eve winning conditions per objective class
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EveWinCondition:
    """Winning condition for Eve over arena vertices.

    kind: "safety-t" (avoid set), "conj-reach" (list of target sets),
    "cobuchi-t" (avoid infinitely often), "conj-buchi", "streett-pairs",
    "inf-circuit" (predicate over the set of Eve vertices seen infinitely
    often, given as a callable on frozensets plus its relevant support).
    """

    kind: str
    data: object


def _vertices_with(sarena: SuspectArena, state_set, agent):
    """Arena vertices (Eve and Adam) at a state in ``state_set`` with
    ``agent`` still suspect."""
    bit = 1 << agent
    return frozenset(v for v, lab in enumerate(sarena.labels)
                     if lab[0] in state_set and lab[1] & bit)


def eve_condition(sarena: SuspectArena, losers) -> EveWinCondition:
    """Condition from Lemma-style reductions for single-objective games.

    ``losers`` is an agent bitmask; the class is read off the (uniform)
    preference kind of the game.
    """
    game = sarena.game
    kinds = {game.prefs[a].objective.kind for a in range(len(game.agents))
             if game.prefs[a].kind == "single"}
    if len(kinds) != 1:
        raise GameError("eve_condition needs a uniform single-objective class")
    kind = kinds.pop()
    if kind == "reach":
        avoid = frozenset().union(*[
            _vertices_with(sarena, game.prefs[a].objective.data, a)
            for a in mask_iter(losers)] or [frozenset()])
        return EveWinCondition("safety-t", avoid)
    if kind == "safety":
        targets = [_vertices_with(sarena, game.prefs[a].objective.data, a)
                   | frozenset(v for v, lab in enumerate(sarena.labels)
                               if not lab[1] & (1 << a))
                   for a in mask_iter(losers)]
        return EveWinCondition("conj-reach", tuple(targets))
    if kind == "buchi":
        avoid = frozenset().union(*[
            _vertices_with(sarena, game.prefs[a].objective.data, a)
            for a in mask_iter(losers)] or [frozenset()])
        return EveWinCondition("cobuchi-t", avoid)
    if kind == "cobuchi":
        targets = [_vertices_with(sarena, game.prefs[a].objective.data, a)
                   | frozenset(v for v, lab in enumerate(sarena.labels)
                               if not lab[1] & (1 << a))
                   for a in mask_iter(losers)]
        return EveWinCondition("conj-buchi", tuple(targets))
    raise GameError(f"no per-loser condition for objective kind {kind!r}")


def streett_condition(sarena: SuspectArena, losers) -> EveWinCondition:
    """Streett pairs over arena vertices for Rabin-objective games."""
    game = sarena.game
    pairs = []
    for a in mask_iter(losers):
        obj = game.prefs[a].objective
        if obj.kind != "rabin":
            raise GameError("streett_condition expects rabin objectives")
        for q, r in obj.data:
            q_prime = (_vertices_with(sarena, q, a)
                       | frozenset(v for v, lab in enumerate(sarena.labels)
                                   if not lab[1] & (1 << a)))
            r_prime = _vertices_with(sarena, r, a)
            pairs.append((q_prime, r_prime))
    return EveWinCondition("streett-pairs", tuple(pairs))


def dot_export(sarena: SuspectArena) -> str:
    """Graphviz rendering: Eve vertices as ellipses, Adam as boxes, obey
    edges bold."""
    lines = ["digraph suspect_arena {"]
    for v in range(sarena.arena.n):
        shape = "ellipse" if sarena.is_eve(v) else "box"
        label = sarena.vertex_name(v).replace('"', r'\"')
        extra = ' style="bold"' if v == sarena.initial else ""
        lines.append(f'  v{v} [shape={shape} label="{label}"{extra}];')
    for v in range(sarena.arena.n):
        for u in sarena.arena.succ[v]:
            style = ' [style="bold"]' if sarena.obey.get(v) == u else ""
            lines.append(f"  v{v} -> v{u}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
