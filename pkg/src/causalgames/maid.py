"""Influence diagrams and multi-agent influence diagrams (causal games).

A complete profile of decision rules turns a MAID into an ordinary causal
Bayesian network: decision rules become CPDs and each utility node becomes a
deterministic variable whose states are its distinct values. Expected
utilities, conditional expectations and post-policy interventions are then
plain queries on that network.

Pure profiles are tuples over decision nodes (declaration order); each entry
is a rule, i.e. a tuple with one action index per parent configuration.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .equilibria import Equilibrium, EquilibriumSet, check_limit
from .errors import (
    IncompleteProfile,
    ModelValidationError,
    UnknownNode,
)
from .factors import BayesNet, Cpd, DiscreteVariable, variable_elimination
from .graph import Admg, ValidationReport, validate_graph
from .intervention import mutilated_network
from .normal_form import NormalFormGame, pure_nash


@dataclass(frozen=True, eq=False)
class UtilityTable:
    """Deterministic utility: one real value per parent configuration."""

    node: str
    parents: tuple[DiscreteVariable, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        v = np.asarray(self.values, dtype=float).ravel()
        rows = int(np.prod([p.card for p in self.parents], dtype=int))
        if v.size != rows:
            raise ModelValidationError(f"utility table of {self.node!r} has {v.size} entries, expected {rows}")
        object.__setattr__(self, "values", v)

    @property
    def parent_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parents)


@dataclass(frozen=True, eq=False)
class DecisionRule:
    node: str
    parents: tuple[DiscreteVariable, ...]
    table: np.ndarray


@dataclass(frozen=True, eq=False)
class InducedModel:
    """The Bayesian network a complete profile induces, with utility values per state."""

    bn: BayesNet
    utility_values: dict[str, np.ndarray]


class Maid:
    def __init__(
        self,
        graph: Admg,
        variables: Mapping[str, DiscreteVariable],
        cpds: Mapping[str, Cpd],
        utilities: Mapping[str, UtilityTable],
    ):
        self.graph = graph
        self.agents = graph.agents
        self.variables = dict(variables)
        self.cpds = dict(cpds)
        self.utilities = dict(utilities)
        report = self.validate()
        if not report.ok:
            raise ModelValidationError(report.violations)
        self.decisions = graph.nodes_of_kind("decision")
        self._parents = {d: tuple(self.variables[p] for p in graph.parents(d)) for d in self.decisions}

    def validate(self) -> ValidationReport:
        g = self.graph
        report = validate_graph(g)
        if not report.ok:
            return report
        if not self.agents:
            report.violations.append("a MAID needs at least one agent")
        if g.bidirected:
            report.violations.append("bidirected edges carry no semantics in a MAID")
        for n, k in zip(g.nodes, g.kinds):
            parents = tuple(g.parents(n))
            if k.kind == "utility":
                if g.children(n):
                    report.violations.append(f"utility node {n!r} has children")
                u = self.utilities.get(n)
                if u is None:
                    report.violations.append(f"utility node {n!r} has no table")
                elif u.parent_names != parents:
                    report.violations.append(
                        f"utility table of {n!r} lists parents {list(u.parent_names)}, graph parents are {list(parents)}"
                    )
                elif not np.all(np.isfinite(u.values)):
                    report.violations.append(f"utility table of {n!r} has non-finite values")
                continue
            var = self.variables.get(n)
            if var is None:
                report.violations.append(f"node {n!r} has no state space")
                continue
            if k.kind == "chance":
                cpd = self.cpds.get(n)
                if cpd is None:
                    report.violations.append(f"chance node {n!r} has no CPD")
                elif cpd.parent_names != parents:
                    report.violations.append(
                        f"CPD of {n!r} lists parents {list(cpd.parent_names)}, graph parents are {list(parents)}"
                    )
                else:
                    report.violations.extend(cpd.check())
        for n in self.utilities:
            if n not in g or g.kind(n).kind != "utility":
                report.violations.append(f"utility table for non-utility node {n!r}")
        for n in self.cpds:
            if n not in g or g.kind(n).kind != "chance":
                report.violations.append(f"CPD for non-chance node {n!r}")
        return report

    # -- structure -------------------------------------------------------------
    def agent_decisions(self, agent: str) -> list[str]:
        return [d for d in self.decisions if self.graph.kind(d).agent == agent]

    def agent_utilities(self, agent: str) -> list[str]:
        return self.graph.nodes_of_kind("utility", agent)

    def decision_parents(self, d: str) -> tuple[DiscreteVariable, ...]:
        try:
            return self._parents[d]
        except KeyError:
            raise UnknownNode(f"{d!r} is not a decision node") from None

    def contexts(self, d: str) -> list[tuple[str, ...]]:
        """Parent configurations of ``d`` in table-row order."""
        return list(itertools.product(*(p.states for p in self.decision_parents(d))))

    def pure_rules(self, d: str) -> list[tuple[int, ...]]:
        n = self.variables[d].card
        return list(itertools.product(range(n), repeat=len(self.contexts(d))))

    def agent_bundles(self, agent: str) -> list[tuple[tuple[int, ...], ...]]:
        """Pure strategies of an agent: one rule per own decision, lexicographic."""
        return list(itertools.product(*(self.pure_rules(d) for d in self.agent_decisions(agent))))

    def compose(self, bundles: Sequence[Sequence[tuple[int, ...]]]) -> tuple[tuple[int, ...], ...]:
        """Join per-agent bundles (agent order) into a profile over decision nodes."""
        by_node = {}
        for agent, bundle in zip(self.agents, bundles):
            for d, rule in zip(self.agent_decisions(agent), bundle):
                by_node[d] = tuple(rule)
        return tuple(by_node[d] for d in self.decisions)

    def split(self, profile: Sequence[tuple[int, ...]]) -> list[tuple[tuple[int, ...], ...]]:
        pos = {d: k for k, d in enumerate(self.decisions)}
        return [tuple(profile[pos[d]] for d in self.agent_decisions(a)) for a in self.agents]

    def rule(self, d: str, spec) -> DecisionRule:
        """Build a rule from action indices, labels, or probability rows (one per context)."""
        var = self.variables[d]
        ctx = len(self.contexts(d))
        if isinstance(spec, DecisionRule):
            return spec
        rows = list(spec)
        if len(rows) != ctx:
            raise IncompleteProfile(f"rule for {d!r} has {len(rows)} rows, expected {ctx}")
        table = np.zeros((ctx, var.card))
        for r, entry in enumerate(rows):
            if isinstance(entry, (int, np.integer)):
                table[r, int(entry)] = 1.0
            elif isinstance(entry, str):
                table[r, var.index(entry)] = 1.0
            elif isinstance(entry, Mapping):
                for label, p in entry.items():
                    table[r, var.index(label)] = float(p)
            else:
                table[r] = np.asarray(entry, dtype=float)
        return DecisionRule(d, self.decision_parents(d), table)

    def rules(self, profile) -> dict[str, DecisionRule]:
        if isinstance(profile, Mapping):
            missing = [d for d in self.decisions if d not in profile]
            if missing:
                raise IncompleteProfile(f"no decision rule for {missing}")
            return {d: self.rule(d, profile[d]) for d in self.decisions}
        if len(profile) != len(self.decisions):
            raise IncompleteProfile(f"profile covers {len(profile)} of {len(self.decisions)} decision nodes")
        return {d: self.rule(d, r) for d, r in zip(self.decisions, profile)}


def induce_bn(m: Maid, profile) -> InducedModel:
    """Decision rules become CPDs; utility nodes become deterministic variables."""
    rules = m.rules(profile)
    variables = dict(m.variables)
    cpds = dict(m.cpds)
    for d, r in rules.items():
        cpds[d] = Cpd(m.variables[d], r.parents, r.table)
    values = {}
    for u, table in m.utilities.items():
        distinct = np.unique(table.values)
        var = DiscreteVariable(u, tuple(repr(float(x)) for x in distinct))
        rows = np.zeros((table.values.size, distinct.size))
        rows[np.arange(table.values.size), np.searchsorted(distinct, table.values)] = 1.0
        variables[u] = var
        cpds[u] = Cpd(var, table.parents, rows)
        values[u] = distinct
    return InducedModel(BayesNet(m.graph, variables, cpds), values)


def _utility_nodes(m: Maid, who: str) -> list[str]:
    if who in m.utilities:
        return [who]
    if who in m.agents:
        return m.agent_utilities(who)
    raise UnknownNode(f"{who!r} is neither an agent nor a utility node")


def _expectation(model: InducedModel, nodes, evidence=None, itv=None) -> float:
    bn = mutilated_network(model.bn, itv) if itv else model.bn
    total = 0.0
    for u in nodes:
        dist = variable_elimination(bn, [u], evidence or {})
        total += float(dist.values @ model.utility_values[u])
    return total


def agent_expected_utility(m: Maid, profile, agent: str) -> float:
    """Sum of the agent's utility-node expectations (or one node's, if named)."""
    return _expectation(induce_bn(m, profile), _utility_nodes(m, agent))


def expected_utilities(m: Maid, profile) -> np.ndarray:
    model = induce_bn(m, profile)
    return np.array([_expectation(model, m.agent_utilities(a)) for a in m.agents])


def conditional_eu(m: Maid, profile, who: str, evidence: Mapping[str, str]) -> float:
    """E[sum of utilities | evidence] in the induced network."""
    return _expectation(induce_bn(m, profile), _utility_nodes(m, who), evidence=evidence)


def interventional_eu(
    m: Maid, profile, who: str, itv: Mapping[str, str], evidence: Mapping[str, str] | None = None
) -> float:
    """Post-policy intervention: the profile stays fixed, then do(itv) is applied by surgery."""
    for n in itv:
        if n in m.utilities:
            raise ModelValidationError(f"cannot intervene on utility node {n!r}")
    return _expectation(induce_bn(m, profile), _utility_nodes(m, who), evidence=evidence, itv=itv)


def maid_strategic_form(m: Maid, config: SolverConfig = DEFAULT_CONFIG) -> tuple[NormalFormGame, list[list]]:
    """Payoff tensor over agents' pure rule bundles."""
    bundles = [m.agent_bundles(a) for a in m.agents]
    check_limit(int(np.prod([len(b) for b in bundles], dtype=object)), config.limit)
    shape = tuple(len(b) for b in bundles)
    u = np.zeros((len(m.agents),) + shape)
    for idx in np.ndindex(*shape):
        profile = m.compose([bundles[i][k] for i, k in enumerate(idx)])
        u[(slice(None),) + idx] = expected_utilities(m, profile)
    labels = [tuple(str(k) for k in range(len(b))) for b in bundles]
    return NormalFormGame(m.agents, labels, u), bundles


def maid_pure_nash(m: Maid, config: SolverConfig = DEFAULT_CONFIG) -> EquilibriumSet:
    """Pure Nash equilibria; a deviation changes all of one agent's rules at once."""
    nfg, bundles = maid_strategic_form(m, config)
    eqs = [
        Equilibrium(m.compose([bundles[i][k] for i, k in enumerate(e.profile)]), e.payoffs)
        for e in pure_nash(nfg, config)
    ]
    return EquilibriumSet("pure-nash", eqs)


def best_response_dynamics(
    m: Maid, start=None, max_iter: int = 100, config: SolverConfig = DEFAULT_CONFIG
) -> EquilibriumSet:
    """Heuristic: agents take turns (index order) switching to their first strict best response.

    Stops at a fixed point or after ``max_iter`` sweeps; the result is flagged
    ``converged``.
    """
    bundles = [m.agent_bundles(a) for a in m.agents]
    current = [0] * len(m.agents) if start is None else [bundles[i].index(b) for i, b in enumerate(m.split(start))]
    for _ in range(max_iter):
        changed = False
        for i in range(len(m.agents)):
            def eu(k):
                choice = [bundles[j][current[j] if j != i else k] for j in range(len(m.agents))]
                return expected_utilities(m, m.compose(choice))[i]

            values = [eu(k) for k in range(len(bundles[i]))]
            best = int(np.argmax(values))
            if values[best] > values[current[i]] + config.eps:
                current[i] = best
                changed = True
        if not changed:
            profile = m.compose([bundles[i][k] for i, k in enumerate(current)])
            eq = Equilibrium(profile, tuple(float(x) for x in expected_utilities(m, profile)))
            return EquilibriumSet("best-response", [eq], {"heuristic": True, "converged": True})
    return EquilibriumSet("best-response", [], {"heuristic": True, "converged": False})


def is_maid_nash(m: Maid, profile, eps: float = 1e-9) -> bool:
    base = expected_utilities(m, profile)
    split = m.split(profile)
    for i, agent in enumerate(m.agents):
        for alt in m.agent_bundles(agent):
            choice = list(split)
            choice[i] = alt
            if expected_utilities(m, m.compose(choice))[i] > base[i] + eps:
                return False
    return True
