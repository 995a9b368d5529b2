"""Finite concurrent game arenas with explicit transition tables.

States, agents and actions are interned to integers at construction; the
user-facing names live in side tables.  Agent sets are represented as
bitmasks throughout the package (``1 << agent_index``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


def mask_of(indices):
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def mask_iter(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_size(mask):
    return bin(mask).count("1")


class GameError(ValueError):
    """Raised for malformed games, unknown ids, or illegal moves."""


@dataclass(frozen=True)
class ConcurrentGame:
    """Concurrent game with per-state allowed actions and a total table.

    ``allow[s][a]`` is a tuple of action indices available to agent ``a``
    in state ``s``; ``tab[s]`` maps each legal move profile (a tuple of
    action indices, one per agent in declared order) to a successor state.
    ``prefs`` maps each agent index to a Preference (see objectives).
    """

    states: tuple
    agents: tuple
    actions: tuple
    allow: tuple            # allow[state][agent] -> tuple of action indices
    tab: tuple              # tab[state] -> dict: move tuple -> state index
    prefs: tuple            # prefs[agent] -> Preference

    _state_index: dict = field(default_factory=dict, repr=False, compare=False)
    _agent_index: dict = field(default_factory=dict, repr=False, compare=False)
    _action_index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self._state_index.update({n: i for i, n in enumerate(self.states)})
        self._agent_index.update({n: i for i, n in enumerate(self.agents)})
        self._action_index.update({n: i for i, n in enumerate(self.actions)})

    # -- lookups ---------------------------------------------------------

    def state(self, name):
        try:
            return self._state_index[name]
        except KeyError:
            raise GameError(f"unknown state {name!r}") from None

    def agent(self, name):
        try:
            return self._agent_index[name]
        except KeyError:
            raise GameError(f"unknown agent {name!r}") from None

    def action(self, name):
        try:
            return self._action_index[name]
        except KeyError:
            raise GameError(f"unknown action {name!r}") from None

    @property
    def n_states(self):
        return len(self.states)

    @property
    def n_agents(self):
        return len(self.agents)

    @property
    def full_mask(self):
        return (1 << len(self.agents)) - 1

    # -- moves -----------------------------------------------------------

    def legal_moves(self, s):
        """All legal move profiles at state ``s``, in lexicographic order."""
        return tuple(itertools.product(*(self.allow[s][a] for a in range(len(self.agents)))))

    def is_legal(self, s, move):
        return all(move[a] in self.allow[s][a] for a in range(len(self.agents)))

    def step(self, s, move):
        if not self.is_legal(s, move):
            raise GameError(f"move {move} illegal at state {self.states[s]}")
        return self.tab[s][move]

    def successors(self, s):
        """Distinct successor states of ``s`` (the underlying edge relation)."""
        return sorted(set(self.tab[s].values()))

    def size(self):
        """Size of the explicit encoding: number of table entries."""
        return sum(len(t) for t in self.tab)


def make_game(states, agents, actions, allow, tab, prefs):
    """Build a ConcurrentGame from name-keyed mappings.

    ``allow``: (state name, agent name) -> iterable of action names;
    ``tab``: (state name, tuple of action names) -> state name;
    ``prefs``: agent name -> Preference.
    """
    states = tuple(states)
    agents = tuple(agents)
    actions = tuple(actions)
    sidx = {n: i for i, n in enumerate(states)}
    aidx = {n: i for i, n in enumerate(agents)}
    cidx = {n: i for i, n in enumerate(actions)}
    allow_t = []
    for s in states:
        row = []
        for a in agents:
            acts = allow.get((s, a), ())
            row.append(tuple(sorted(cidx[c] for c in acts)))
        allow_t.append(tuple(row))
    tab_t = [dict() for _ in states]
    for (s, move), t in tab.items():
        tab_t[sidx[s]][tuple(cidx[c] for c in move)] = sidx[t]
    prefs_t = tuple(prefs[a] for a in agents) if prefs else tuple(None for _ in agents)
    return ConcurrentGame(states, agents, actions,
                          tuple(allow_t), tuple(tab_t), prefs_t)


def validate_game(game: ConcurrentGame):
    """Return a list of human-readable invariant violations (empty if none)."""
    problems = []
    n_agents = len(game.agents)
    for s in range(game.n_states):
        for a in range(n_agents):
            if not game.allow[s][a]:
                problems.append(
                    f"allow({game.states[s]},{game.agents[a]}) is empty")
            for c in game.allow[s][a]:
                if not 0 <= c < len(game.actions):
                    problems.append(
                        f"allow({game.states[s]},{game.agents[a]}) references "
                        f"unknown action index {c}")
        table = game.tab[s]
        legal = set(itertools.product(*(game.allow[s][a] for a in range(n_agents))))
        for move in legal:
            if move not in table:
                names = tuple(game.actions[c] for c in move)
                problems.append(f"tab({game.states[s]},{names}) is missing")
        for move, t in table.items():
            if move not in legal:
                names = tuple(game.actions[c] for c in move)
                problems.append(
                    f"tab({game.states[s]},{names}) entry for illegal move")
            if not 0 <= t < game.n_states:
                problems.append(
                    f"tab({game.states[s]},{move}) targets unknown state index {t}")
    for a in range(n_agents):
        pref = game.prefs[a]
        if pref is None:
            problems.append(f"agent {game.agents[a]} has no preference")
            continue
        for s in pref.referenced_states():
            if not 0 <= s < game.n_states:
                problems.append(
                    f"preference of {game.agents[a]} references unknown state index {s}")
    return problems


def edge_exists(game: ConcurrentGame, s, t):
    """True iff some legal move profile takes ``s`` to ``t``."""
    if not 0 <= s < game.n_states:
        raise GameError(f"unknown state index {s}")
    if not 0 <= t < game.n_states:
        raise GameError(f"unknown state index {t}")
    return any(u == t for u in game.tab[s].values())


@dataclass(frozen=True)
class Lasso:
    """Ultimately periodic play ``prefix . cycle^omega`` (state indices)."""

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if not self.cycle:
            raise GameError("lasso cycle must be nonempty")

    def normalized(self):
        """Rotate the cycle to its lexicographically least rotation.

        The prefix is extended so that the play is unchanged.
        """
        cyc = self.cycle
        k = min(range(len(cyc)), key=lambda i: cyc[i:] + cyc[:i])
        return Lasso(self.prefix + cyc[:k], cyc[k:] + cyc[:k])

    def states(self, n):
        """First ``n`` states of the play."""
        out = list(self.prefix)
        while len(out) < n:
            out.extend(self.cycle)
        return out[:n]


def lasso_sets(game: ConcurrentGame, lasso: Lasso):
    """(occ, inf) state sets of a lasso; validates every edge against tab."""
    seq = list(lasso.prefix) + list(lasso.cycle)
    for u, v in zip(seq, seq[1:]):
        if not edge_exists(game, u, v):
            raise GameError(
                f"lasso uses nonexistent edge {game.states[u]} -> {game.states[v]}")
    u, v = lasso.cycle[-1], lasso.cycle[0]
    if not edge_exists(game, u, v):
        raise GameError(
            f"lasso cycle does not close: no edge {game.states[u]} -> {game.states[v]}")
    occ = frozenset(seq)
    inf = frozenset(lasso.cycle)
    return occ, inf
