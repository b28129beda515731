"""One-shot Bayesian games with a common prior over type profiles."""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .equilibria import WILDCARD, Equilibrium, EquilibriumSet, check_limit
from .errors import ModelValidationError, ZeroProbabilityType

PRIOR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BayesianGame:
    """``payoffs[i][t_1, ..., t_m, a_1, ..., a_m]`` is agent i's payoff."""

    agents: tuple[str, ...]
    actions: tuple[tuple[str, ...], ...]
    types: tuple[tuple[str, ...], ...]
    prior: np.ndarray
    payoffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "actions", tuple(tuple(a) for a in self.actions))
        object.__setattr__(self, "types", tuple(tuple(t) for t in self.types))
        prior = np.asarray(self.prior, dtype=float)
        u = np.asarray(self.payoffs, dtype=float)
        m = len(self.agents)
        tshape = tuple(len(t) for t in self.types)
        ashape = tuple(len(a) for a in self.actions)
        problems = []
        if len(self.actions) != m or len(self.types) != m:
            problems.append("one action list and one type list per agent are required")
        elif prior.shape != tshape:
            problems.append(f"prior has shape {prior.shape}, expected {tshape}")
        elif np.any(prior < 0) or abs(prior.sum() - 1.0) > PRIOR_TOL:
            problems.append(f"prior sums to {prior.sum():.12g}, not 1")
        elif u.shape != (m,) + tshape + ashape:
            problems.append(f"payoff table has shape {u.shape}, expected {(m,) + tshape + ashape}")
        elif not np.all(np.isfinite(u)):
            problems.append("payoffs must be finite")
        if problems:
            raise ModelValidationError(problems)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "payoffs", u)

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    def type_marginal(self, i: int) -> np.ndarray:
        axes = tuple(j for j in range(self.n_agents) if j != i)
        return self.prior.sum(axis=axes)


def belief_from_prior(prior: np.ndarray, i: int, t_i: int) -> np.ndarray:
    """P(t_-i | t_i): the slice of the (possibly unnormalized) prior at t_i, renormalized."""
    prior = np.asarray(prior, dtype=float)
    row = np.take(prior, t_i, axis=i)
    z = row.sum()
    if not z > 0:
        raise ZeroProbabilityType(f"type {t_i} of agent {i} has zero prior probability")
    return row / z


def belief(g: BayesianGame, i: int, t_i: int) -> np.ndarray:
    return belief_from_prior(g.prior, i, t_i)


def pure_type_strategy(g: BayesianGame, choice: Sequence[Sequence[int | None]]) -> list[np.ndarray]:
    """Point-mass TypeStrategy matrices (types x actions); wildcard rows become uniform."""
    out = []
    for i, per_type in enumerate(choice):
        n = len(g.actions[i])
        mat = np.full((len(g.types[i]), n), 1.0 / n)
        for t, a in enumerate(per_type):
            if a is not WILDCARD:
                mat[t] = 0.0
                mat[t, a] = 1.0
        out.append(mat)
    return out


def interim_expected_utility(
    g: BayesianGame, i: int, t_i: int, action: int, others: Sequence[np.ndarray]
) -> float:
    """Expected payoff of agent i with type t_i playing ``action`` against ``others``.

    ``others[j]`` is agent j's strategy as a (types x actions) matrix; entry i
    is ignored.
    """
    b = belief(g, i, t_i)
    m = g.n_agents
    total = 0.0
    other_idx = [j for j in range(m) if j != i]
    for t_rest in np.ndindex(*b.shape):
        w = b[t_rest]
        if w == 0.0:
            continue
        t = list(t_rest)
        t.insert(i, t_i)
        table = g.payoffs[i][tuple(t)]
        table = np.take(table, action, axis=i)
        # contract the remaining action axes (in agent order) with others' mixes
        for j in reversed(other_idx):
            table = table @ np.asarray(others[j], dtype=float)[t[j]]
        total += w * float(table)
    return total


def ex_ante_utilities(g: BayesianGame, strategy: Sequence[np.ndarray]) -> np.ndarray:
    out = np.zeros(g.n_agents)
    for t in np.ndindex(*g.prior.shape):
        p = g.prior[t]
        if p == 0.0:
            continue
        for i in range(g.n_agents):
            table = g.payoffs[i][t]
            for j in reversed(range(g.n_agents)):
                table = table @ strategy[j][t[j]]
            out[i] += p * float(table)
    return out


def pure_bne(g: BayesianGame, config: SolverConfig = DEFAULT_CONFIG) -> EquilibriumSet:
    """Pure Bayesian Nash equilibria, checked type by type (interim).

    Zero-probability types constrain nobody and are reported as WILDCARD.
    A profile is a tuple over agents of tuples over types of action indices.
    """
    positive = [g.type_marginal(i) > 0 for i in range(g.n_agents)]
    slots = [
        [range(len(g.actions[i])) if positive[i][t] else (WILDCARD,) for t in range(len(g.types[i]))]
        for i in range(g.n_agents)
    ]
    per_agent = [list(itertools.product(*s)) for s in slots]
    check_limit(int(np.prod([len(p) for p in per_agent], dtype=object)), config.limit)
    eqs = []
    for choice in itertools.product(*per_agent):
        strat = pure_type_strategy(g, choice)
        if _is_bne(g, choice, strat, positive, config.eps):
            eqs.append(Equilibrium(tuple(choice), tuple(float(x) for x in ex_ante_utilities(g, strat))))
    return EquilibriumSet("bne", eqs)


def _is_bne(g, choice, strat, positive, eps) -> bool:
    for i in range(g.n_agents):
        for t in range(len(g.types[i])):
            if not positive[i][t]:
                continue
            values = [interim_expected_utility(g, i, t, a, strat) for a in range(len(g.actions[i]))]
            if max(values) > values[choice[i][t]] + eps:
                return False
    return True


def is_bne(g: BayesianGame, choice, eps: float = 1e-9) -> bool:
    positive = [g.type_marginal(i) > 0 for i in range(g.n_agents)]
    return _is_bne(g, choice, pure_type_strategy(g, choice), positive, eps)
