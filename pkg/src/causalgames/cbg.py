"""Causal Bayesian games: uncertainty over which MAID is the true causal structure.

Profiles are graph-indexed: ``profile[i][g]`` is agent i's bundle of pure
decision rules in graph g (or WILDCARD when nothing constrains it).

Two equilibrium readings are offered.

``per-graph``
    For every agent i and graph g with positive second-order weight
    mu_i(mu_-i(g)), the bundle ``profile[i][g]`` is a best response inside g.
    Each (agent, graph) entry is chosen freely.

``ex-ante``
    Agent i maximizes sum_g mu_i(g) * EU_i(g). An agent cannot condition on
    a graph it cannot tell apart from another: graphs in which its decision
    nodes have the same parents (same state spaces) share one bundle.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .equilibria import WILDCARD, Equilibrium, EquilibriumSet, check_limit, compress_wildcards
from .errors import IncompleteProfile, ModelValidationError, UnknownGraph
from .graph import ValidationReport
from .maid import Maid, expected_utilities, maid_strategic_form

BELIEF_TOL = 1e-9
MODES = ("per-graph", "ex-ante")


@dataclass(frozen=True, eq=False)
class GraphFamily:
    names: tuple[str, ...]
    maids: tuple[Maid, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "maids", tuple(self.maids))

    @property
    def agents(self) -> tuple[str, ...]:
        return self.maids[0].agents if self.maids else ()

    def index(self, graph: str | int) -> int:
        if isinstance(graph, int):
            if 0 <= graph < len(self.maids):
                return graph
        elif graph in self.names:
            return self.names.index(graph)
        raise UnknownGraph(f"unknown graph {graph!r}")


@dataclass(frozen=True, eq=False)
class BeliefProfile:
    """Rows are agents, columns are graphs."""

    first_order: np.ndarray
    second_order: np.ndarray

    def __post_init__(self):
        for name in ("first_order", "second_order"):
            w = np.asarray(getattr(self, name), dtype=float)
            if w.ndim != 2 or np.any(w < 0) or np.any(np.abs(w.sum(axis=1) - 1.0) > BELIEF_TOL):
                raise ModelValidationError(f"{name} beliefs must be rows of nonnegative weights summing to 1")
            object.__setattr__(self, name, w)
        if self.first_order.shape != self.second_order.shape:
            raise ModelValidationError("first- and second-order belief matrices differ in shape")


def validate_family(f: GraphFamily) -> ValidationReport:
    report = ValidationReport()
    if not f.maids:
        report.violations.append("the family has no graphs")
        return report
    if len(set(f.names)) != len(f.names):
        report.violations.append("graph names must be unique")
    ref = f.maids[0]
    ref_space = _action_spaces(ref)
    for name, m in zip(f.names, f.maids):
        if m.agents != ref.agents:
            report.violations.append(f"graph {name!r} has agents {list(m.agents)}, expected {list(ref.agents)}")
            continue
        if _action_spaces(m) != ref_space:
            report.violations.append(f"graph {name!r} changes some agent's decisions or action sets")
        for a, b in itertools.permutations(m.decisions, 2):
            if m.graph.kind(a).agent != m.graph.kind(b).agent and m.graph.has_directed_path(a, b):
                report.violations.append(
                    f"graph {name!r}: directed path from {a!r} to {b!r} connects decisions of different agents"
                )
    return report


def _action_spaces(m: Maid):
    return {a: tuple((d, m.variables[d].states) for d in m.agent_decisions(a)) for a in m.agents}


def _check(f: GraphFamily, beliefs: BeliefProfile) -> None:
    report = validate_family(f)
    if not report.ok:
        raise ModelValidationError(report.violations)
    if beliefs.first_order.shape != (len(f.agents), len(f.maids)):
        raise ModelValidationError(
            f"belief matrices must be {len(f.agents)} x {len(f.maids)} (agents x graphs)"
        )


def signature(m: Maid, agent: str) -> tuple:
    """What agent observes about its own decision contexts in graph ``m``."""
    return tuple(
        (d, tuple((p.name, p.states) for p in m.decision_parents(d))) for d in m.agent_decisions(agent)
    )


def information_classes(f: GraphFamily, agent: str) -> list[list[int]]:
    """Graphs grouped by the agent's decision contexts, in first-appearance order."""
    groups: dict[tuple, list[int]] = {}
    for g, m in enumerate(f.maids):
        groups.setdefault(signature(m, agent), []).append(g)
    return list(groups.values())


def graph_profile(f: GraphFamily, profile, g: int):
    m = f.maids[g]
    bundles = []
    for i, agent in enumerate(f.agents):
        b = profile[i][g]
        if b is WILDCARD:
            raise IncompleteProfile(f"{agent!r} has no concrete strategy in graph {f.names[g]!r}")
        bundles.append(b)
    return m.compose(bundles)


def cbg_expected_utility(
    f: GraphFamily, beliefs: BeliefProfile, profile, agent: str, graph: str | int
) -> float:
    """mu_i(mu_-i(G)) times the agent's expected utility in the network G and the profile induce."""
    g = f.index(graph)
    i = f.agents.index(agent)
    w = beliefs.second_order[i, g]
    if w == 0.0:
        return 0.0
    return float(w * expected_utilities(f.maids[g], graph_profile(f, profile, g))[i])


def cbg_pure_bne(
    f: GraphFamily,
    beliefs: BeliefProfile,
    mode: str = "per-graph",
    config: SolverConfig = DEFAULT_CONFIG,
) -> EquilibriumSet:
    _check(f, beliefs)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    forms = [maid_strategic_form(m, config) for m in f.maids]
    if mode == "per-graph":
        entries = _per_graph(f, beliefs.second_order, forms, config)
    else:
        entries = _ex_ante(f, beliefs.first_order, forms, config)
    eqs = [Equilibrium(p, pay) for p, pay in entries]
    return EquilibriumSet(f"bne/{mode}", eqs, {"mode": mode})


def _per_graph(f, weights, forms, config):
    m_agents = len(f.agents)
    per_graph = []
    for g, (nfg, bundles) in enumerate(forms):
        constrained = [i for i in range(m_agents) if weights[i, g] > 0]
        stable = np.ones(nfg.shape, dtype=bool)
        for i in constrained:
            best = nfg.payoffs[i].max(axis=i, keepdims=True)
            stable &= nfg.payoffs[i] >= best - config.eps
        entries = []
        for idx in np.argwhere(stable):
            idx = tuple(int(k) for k in idx)
            prof = tuple((bundles[i][idx[i]],) for i in range(m_agents))
            entries.append((prof, tuple(float(x) for x in nfg.payoffs[(slice(None),) + idx])))
        free = [(i, 0) for i in range(m_agents) if i not in constrained]
        per_graph.append(compress_wildcards(entries, free, lambda i, _k, b=bundles: b[i]))
    check_limit(int(np.prod([len(e) for e in per_graph], dtype=object)), config.limit)

    out = []
    for combo in itertools.product(*per_graph):
        prof = tuple(tuple(combo[g][0][i][0] for g in range(len(f.maids))) for i in range(m_agents))
        out.append((prof, _weighted(weights, [pay for _, pay in combo])))
    return out


def _ex_ante(f, weights, forms, config):
    agents = f.agents
    classes = [information_classes(f, a) for a in agents]
    # bundle lists agree across a class because decision contexts agree
    options = [[forms[c[0]][1][i] for c in classes[i]] for i in range(len(agents))]
    check_limit(int(np.prod([len(o) for cl in options for o in cl], dtype=object)), config.limit)
    class_of = [{g: k for k, c in enumerate(cl) for g in c} for cl in classes]

    def payoff(g, choice, i, override=None):
        idx = []
        for j in range(len(agents)):
            k = choice[j][class_of[j][g]] if not (override and j == i) else override
            idx.append(k)
        return forms[g][0].payoffs[(i,) + tuple(idx)]

    entries = []
    spaces = [itertools.product(*(range(len(o)) for o in options[i])) for i in range(len(agents))]
    for choice in itertools.product(*(list(s) for s in spaces)):
        ok = True
        for i in range(len(agents)):
            for k, members in enumerate(classes[i]):
                w = weights[i, members]
                if w.sum() <= 0:
                    continue
                base = sum(wg * payoff(g, choice, i) for wg, g in zip(w, members))
                for alt in range(len(options[i][k])):
                    if alt == choice[i][k]:
                        continue
                    dev = sum(wg * payoff(g, choice, i, alt) for wg, g in zip(w, members))
                    if dev > base + config.eps:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if not ok:
            continue
        prof = tuple(tuple(options[i][k][choice[i][k]] for k in range(len(classes[i]))) for i in range(len(agents)))
        pays = [
            tuple(float(payoff(g, choice, i)) for i in range(len(agents)))
            for g in range(len(f.maids))
        ]
        entries.append((prof, _weighted(weights, pays)))

    free = [
        (i, k)
        for i in range(len(agents))
        for k, members in enumerate(classes[i])
        if weights[i, members].sum() <= 0
    ]
    entries = compress_wildcards(entries, free, lambda i, k: options[i][k])
    out = []
    for prof, pay in entries:
        graph_indexed = tuple(
            tuple(prof[i][class_of[i][g]] for g in range(len(f.maids))) for i in range(len(agents))
        )
        out.append((graph_indexed, pay))
    return out


def _weighted(weights, per_graph_payoffs: Sequence) -> tuple:
    """sum_g weights[i, g] * EU_i(g); None where any contributing graph is undetermined."""
    out = []
    for i in range(weights.shape[0]):
        total = 0.0
        for g, pay in enumerate(per_graph_payoffs):
            w = weights[i, g]
            if w == 0.0:
                continue
            if pay is None or pay[i] is None:
                total = None
                break
            total += float(w) * float(pay[i])
        out.append(total)
    return tuple(out)


def is_cbg_equilibrium(
    f: GraphFamily, beliefs: BeliefProfile, profile, mode: str = "per-graph", eps: float = 1e-9
) -> bool:
    """Best-response check of one concrete graph-indexed profile."""
    agents = f.agents
    if mode == "per-graph":
        for g, m in enumerate(f.maids):
            base = expected_utilities(m, graph_profile(f, profile, g))
            for i, a in enumerate(agents):
                if beliefs.second_order[i, g] <= 0:
                    continue
                for alt in m.agent_bundles(a):
                    p = [list(row) for row in profile]
                    p[i][g] = alt
                    if expected_utilities(m, graph_profile(f, p, g))[i] > base[i] + eps:
                        return False
        return True
    for i, a in enumerate(agents):
        for members in information_classes(f, a):
            w = beliefs.first_order[i, members]
            if w.sum() <= 0:
                continue
            if len({profile[i][g] for g in members}) != 1:
                return False

            def total(bundle):
                s = 0.0
                for wg, g in zip(w, members):
                    p = [list(row) for row in profile]
                    p[i][g] = bundle
                    s += wg * expected_utilities(f.maids[g], graph_profile(f, p, g))[i]
                return s

            base = total(profile[i][members[0]])
            if any(total(alt) > base + eps for alt in f.maids[members[0]].agent_bundles(a)):
                return False
    return True
