"""Normal-form games: expected payoffs, pure Nash enumeration and 2-player support enumeration."""

from __future__ import annotations

import itertools
from math import comb
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .equilibria import Equilibrium, EquilibriumSet, check_limit
from .errors import DimensionMismatch, ModelValidationError


@dataclass(frozen=True, eq=False)
class NormalFormGame:
    """``payoffs[i]`` is agent i's tensor, axis j indexing agent j's actions."""

    agents: tuple[str, ...]
    actions: tuple[tuple[str, ...], ...]
    payoffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "actions", tuple(tuple(a) for a in self.actions))
        u = np.asarray(self.payoffs, dtype=float)
        shape = (len(self.agents),) + tuple(len(a) for a in self.actions)
        problems = []
        if len(self.actions) != len(self.agents):
            problems.append("one action list per agent is required")
        elif u.shape != shape:
            problems.append(f"payoff tensor has shape {u.shape}, expected {shape}")
        elif not np.all(np.isfinite(u)):
            problems.append("payoffs must be finite")
        for name, acts in zip(self.agents, self.actions):
            if not acts:
                problems.append(f"agent {name!r} has no actions")
            if len(set(acts)) != len(acts):
                problems.append(f"agent {name!r} has duplicate action labels")
        if problems:
            raise ModelValidationError(problems)
        object.__setattr__(self, "payoffs", u)

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.payoffs.shape[1:]

    def payoff(self, pure: Sequence[int]) -> np.ndarray:
        return self.payoffs[(slice(None),) + tuple(pure)]


def _check_profile(g: NormalFormGame, profile) -> list[np.ndarray]:
    if len(profile) != g.n_agents:
        raise DimensionMismatch(f"profile has {len(profile)} strategies for {g.n_agents} agents")
    out = []
    for i, s in enumerate(profile):
        s = np.asarray(s, dtype=float)
        if s.shape != (g.shape[i],):
            raise DimensionMismatch(
                f"strategy of {g.agents[i]!r} has length {s.size}, expected {g.shape[i]}"
            )
        out.append(s)
    return out


def expected_payoffs(g: NormalFormGame, profile) -> np.ndarray:
    """All agents' expected payoffs under a mixed profile (one probability vector per agent)."""
    strategies = _check_profile(g, profile)
    u = g.payoffs
    # contract the last axis repeatedly: agent m's axis first
    for s in reversed(strategies):
        u = u @ s
    return u


def expected_payoff(g: NormalFormGame, profile, agent: int) -> float:
    return float(expected_payoffs(g, profile)[agent])


def point_mass(n: int, k: int) -> np.ndarray:
    v = np.zeros(n)
    v[k] = 1.0
    return v


def pure_nash(g: NormalFormGame, config: SolverConfig = DEFAULT_CONFIG) -> EquilibriumSet:
    """All pure profiles with no unilateral gain above ``config.eps``, lexicographic."""
    check_limit(int(np.prod(g.shape, dtype=np.int64)), config.limit)
    stable = np.ones(g.shape, dtype=bool)
    for i in range(g.n_agents):
        best = g.payoffs[i].max(axis=i, keepdims=True)
        stable &= g.payoffs[i] >= best - config.eps
    eqs = [
        Equilibrium(tuple(int(k) for k in idx), tuple(float(x) for x in g.payoff(idx)))
        for idx in np.argwhere(stable)
    ]
    return EquilibriumSet("pure-nash", eqs)


def deviation_gain(g: NormalFormGame, profile) -> float:
    """Largest gain any agent gets from a pure unilateral deviation."""
    strategies = _check_profile(g, profile)
    base = expected_payoffs(g, strategies)
    gain = -np.inf
    for i, n in enumerate(g.shape):
        for k in range(n):
            alt = list(strategies)
            alt[i] = point_mass(n, k)
            gain = max(gain, expected_payoffs(g, alt)[i] - base[i])
    return float(gain)


def _indifference(m: np.ndarray) -> np.ndarray | None:
    """Mix over the columns of ``m`` making every row equal; None if singular.

    Solves [m, -1; 1, 0] [x; v] = [0; 1] for a square ``m``.
    """
    k = m.shape[0]
    a = np.zeros((k + 1, k + 1))
    a[:k, :k] = m
    a[:k, k] = -1.0
    a[k, :k] = 1.0
    b = np.zeros(k + 1)
    b[k] = 1.0
    if np.linalg.matrix_rank(a) < k + 1:
        return None
    return np.linalg.solve(a, b)[:k]


def mixed_nash_2p(g: NormalFormGame, config: SolverConfig = DEFAULT_CONFIG) -> EquilibriumSet:
    """Support enumeration over equal-size support pairs.

    Pure equilibria come out of the size-1 supports. Singular indifference
    systems set the ``degenerate`` flag and are skipped, so a continuum of
    equilibria is represented by the vertices other supports reach.
    """
    if g.n_agents != 2:
        raise DimensionMismatch("support enumeration needs exactly two agents")
    a, b = g.payoffs
    n1, n2 = a.shape
    check_limit(sum(comb(n1, k) * comb(n2, k) for k in range(1, min(n1, n2) + 1)), config.limit)
    found: list[tuple[np.ndarray, np.ndarray]] = []
    degenerate = False
    for k in range(1, min(n1, n2) + 1):
        for rows in itertools.combinations(range(n1), k):
            for cols in itertools.combinations(range(n2), k):
                y_s = _indifference(a[np.ix_(rows, cols)])
                x_s = _indifference(b[np.ix_(rows, cols)].T)
                if y_s is None or x_s is None:
                    degenerate = True
                    continue
                if y_s.min() < -config.eps or x_s.min() < -config.eps:
                    continue
                x = np.zeros(n1)
                y = np.zeros(n2)
                x[list(rows)] = np.clip(x_s, 0, None)
                y[list(cols)] = np.clip(y_s, 0, None)
                x /= x.sum()
                y /= y.sum()
                if deviation_gain(g, (x, y)) > config.eps:
                    continue
                if any(
                    max(np.abs(x - fx).max(), np.abs(y - fy).max()) <= config.dedup_tol
                    for fx, fy in found
                ):
                    continue
                found.append((x, y))
    eqs = [
        Equilibrium(
            (tuple(float(p) for p in x), tuple(float(p) for p in y)),
            tuple(float(v) for v in expected_payoffs(g, (x, y))),
        )
        for x, y in found
    ]
    return EquilibriumSet("mixed-nash", eqs, {"degenerate": degenerate})


def affine_transform(g: NormalFormGame, agent: int, scale: float, shift: float) -> NormalFormGame:
    u = g.payoffs.copy()
    u[agent] = scale * u[agent] + shift
    return NormalFormGame(g.agents, g.actions, u)
