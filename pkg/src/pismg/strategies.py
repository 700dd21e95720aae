"""Pure stationary strategies and the Markov chain a pair of them induces.

A pure stationary strategy fixes one action in every state its player
controls; states controlled by the opponent do not appear in the choice
map (the player is a dummy there, and the full-profile notation is
recovered by inserting the opponent-controlled states with their single
implicit choice). A player controlling no states has exactly one, empty,
strategy.

Enumeration is odometer order over the controlled states taken
ascending: the choice at the lowest-indexed controlled state is the most
significant digit, so the choice at the highest-indexed one varies
fastest. Ordinals are 0-based positions in that order; display labels
f1..fD1 and g1..gD2 are the 1-based positions.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationLimitError
from .game import GameSpec, PLAYER_I, expected_sojourn

ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class PureStationaryStrategy:
    """One deterministic choice per controlled state.

    ``states`` lists the controlled states ascending, ``actions`` the
    0-based chosen action index per state (same order), ``ordinal`` the
    strategy's 0-based rank in enumeration order.
    """

    player: str
    states: tuple[int, ...]
    actions: tuple[int, ...]
    ordinal: int

    def action_at(self, state: int) -> int:
        return self.actions[self.states.index(state)]

    @property
    def label(self) -> str:
        prefix = "f" if self.player == PLAYER_I else "g"
        return f"{prefix}{self.ordinal + 1}"

    def describe(self, spec: GameSpec) -> str:
        if not self.states:
            return f"{self.label}: (no controlled states)"
        parts = ", ".join(
            f"{s}->{spec.state(s).actions[a].label}"
            for s, a in zip(self.states, self.actions)
        )
        return f"{self.label}: {parts}"


@dataclass(frozen=True)
class SemiStationaryStrategy:
    """A pure stationary strategy chosen per initial state: entry s - 1
    is the strategy the player commits to when play starts in state s."""

    player: str
    per_initial_state: tuple[PureStationaryStrategy, ...]

    def for_state(self, state: int) -> PureStationaryStrategy:
        return self.per_initial_state[state - 1]


@dataclass(frozen=True, eq=False)
class InducedChain:
    """Transition matrix, reward vector and expected-sojourn vector of
    the semi-Markov chain a fixed pure pair induces (0-based rows)."""

    q: np.ndarray
    r: np.ndarray
    tau: np.ndarray


def controlled_states(spec: GameSpec, player: str) -> tuple[int, ...]:
    return tuple(st.id for st in spec.states if st.controller == player)


def strategy_count(spec: GameSpec, player: str) -> int:
    return math.prod(
        len(spec.state(s).actions) for s in controlled_states(spec, player)
    )


def enumerate_pure(spec: GameSpec, player: str,
                   cap: int = ENUMERATION_CAP) -> tuple[PureStationaryStrategy, ...]:
    """All pure stationary strategies of one player, in odometer order.

    Refuses to materialize more than ``cap`` strategies; the raised
    :class:`EnumerationLimitError` carries the exact count."""
    states = controlled_states(spec, player)
    count = strategy_count(spec, player)
    if count > cap:
        raise EnumerationLimitError(
            f"player {player} has {count} pure stationary strategies, "
            f"above the cap of {cap}",
            count=count,
        )
    radices = [range(len(spec.state(s).actions)) for s in states]
    return tuple(
        PureStationaryStrategy(player, states, combo, ordinal)
        for ordinal, combo in enumerate(itertools.product(*radices))
    )


def strategy_from_ordinal(spec: GameSpec, player: str,
                          ordinal: int) -> PureStationaryStrategy:
    """Decode an ordinal without enumerating (mixed radix, lowest-indexed
    controlled state most significant)."""
    states = controlled_states(spec, player)
    radices = [len(spec.state(s).actions) for s in states]
    total = math.prod(radices)
    if not 0 <= ordinal < total:
        raise ValueError(
            f"ordinal {ordinal} out of range for player {player} "
            f"({total} strategies)"
        )
    digits: list[int] = []
    rest = ordinal
    for r in reversed(radices):
        rest, d = divmod(rest, r)
        digits.append(d)
    return PureStationaryStrategy(player, states, tuple(reversed(digits)), ordinal)


def ordinal_of(spec: GameSpec, player: str, actions: tuple[int, ...]) -> int:
    """Inverse of :func:`strategy_from_ordinal` on the choice tuple."""
    states = controlled_states(spec, player)
    if len(actions) != len(states):
        raise ValueError(
            f"player {player} controls {len(states)} states, got "
            f"{len(actions)} choices"
        )
    ordinal = 0
    for s, a in zip(states, actions):
        d = len(spec.state(s).actions)
        if not 0 <= a < d:
            raise ValueError(f"state {s}: action index {a} out of range 0..{d - 1}")
        ordinal = ordinal * d + a
    return ordinal


def strategy_from_labels(spec: GameSpec, player: str,
                         chosen: dict[int, str]) -> PureStationaryStrategy:
    """Build a strategy from a {state: action label} map covering exactly
    the player's controlled states."""
    states = controlled_states(spec, player)
    if set(chosen) != set(states):
        raise ValueError(
            f"player {player} controls states {list(states)}, "
            f"got choices for {sorted(chosen)}"
        )
    actions = []
    for s in states:
        labels = [a.label for a in spec.state(s).actions]
        if chosen[s] not in labels:
            raise ValueError(
                f"state {s}: no action labelled {chosen[s]!r} "
                f"(available: {labels})"
            )
        actions.append(labels.index(chosen[s]))
    actions_t = tuple(actions)
    return PureStationaryStrategy(
        player, states, actions_t, ordinal_of(spec, player, actions_t)
    )


def selected_action(spec: GameSpec, state: int,
                    f: PureStationaryStrategy, g: PureStationaryStrategy):
    """The action played at ``state`` under the pair (f, g)."""
    st = spec.state(state)
    strat = f if st.controller == PLAYER_I else g
    return st.actions[strat.action_at(state)]


def induce(spec: GameSpec, f: PureStationaryStrategy,
           g: PureStationaryStrategy) -> InducedChain:
    """Chain induced by a fixed pure pair. Each transition row is divided
    by its sum (validation already bounded the deviation), so the result
    is row-stochastic to machine precision. Only the controller's
    strategy is consulted at each state."""
    n = spec.n
    q = np.zeros((n, n))
    r = np.zeros(n)
    tau = np.zeros(n)
    for st in spec.states:
        act = selected_action(spec, st.id, f, g)
        row = q[st.id - 1]
        for tr in act.transitions:
            row[tr.to - 1] = tr.prob
        total = row.sum()
        if total != 1.0:
            row /= total
        r[st.id - 1] = act.reward
        tau[st.id - 1] = expected_sojourn(act)
    return InducedChain(q=q, r=r, tau=tau)
