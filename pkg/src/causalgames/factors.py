"""Discrete variables, CPDs, factors and exact inference by variable elimination.

Table layout: for a CPD with parents (P1, ..., Pk) the rows enumerate parent
configurations with P1 varying slowest and Pk fastest; the child state varies
within a row. This is exactly numpy C-order, so a CPD table of shape
(prod |Pi|, |X|) reshapes to a factor over (P1, ..., Pk, X) with no copying.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    IncompleteAssignment,
    ModelValidationError,
    StateSpaceMismatch,
    UnknownNode,
    UnknownState,
    ZeroProbabilityEvidence,
)
from .graph import Admg, ValidationReport, topological_order, validate_graph

ROW_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteVariable:
    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not self.states:
            raise ModelValidationError(f"variable {self.name!r} has no states")
        if len(set(self.states)) != len(self.states):
            raise ModelValidationError(f"variable {self.name!r} has duplicate state labels")

    @property
    def card(self) -> int:
        return len(self.states)

    def index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise UnknownState(f"{state!r} is not a state of {self.name!r} {list(self.states)}") from None


@dataclass(frozen=True, eq=False)
class Factor:
    """Nonnegative table over the joint state space of ``variables``."""

    variables: tuple[DiscreteVariable, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        vals = np.asarray(self.values, dtype=float).reshape(tuple(v.card for v in self.variables))
        object.__setattr__(self, "values", vals)
        names = self.scope
        if len(set(names)) != len(names):
            raise StateSpaceMismatch(f"repeated variable in factor scope {names}")

    @property
    def scope(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def var(self, name: str) -> DiscreteVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise UnknownNode(f"{name!r} not in factor scope {self.scope}")

    def __getitem__(self, assignment: Mapping[str, str]) -> float:
        idx = tuple(v.index(assignment[v.name]) for v in self.variables)
        return float(self.values[idx])

    def total(self) -> float:
        return float(self.values.sum())

    def normalize(self) -> Factor:
        return Factor(self.variables, self.values / self.values.sum())

    def to_dict(self) -> dict[tuple[str, ...], float]:
        return {
            tuple(v.states[i] for v, i in zip(self.variables, idx)): float(self.values[idx])
            for idx in np.ndindex(*self.values.shape)
        }

    def __mul__(self, other: Factor) -> Factor:
        return factor_product(self, other)

    def __repr__(self) -> str:
        return f"Factor(scope={self.scope}, values={self.values.tolist()})"


def _merge_vars(*groups: Iterable[DiscreteVariable]) -> list[DiscreteVariable]:
    out: dict[str, DiscreteVariable] = {}
    for group in groups:
        for v in group:
            prev = out.get(v.name)
            if prev is None:
                out[v.name] = v
            elif prev.states != v.states:
                raise StateSpaceMismatch(
                    f"{v.name!r} has states {list(prev.states)} in one factor and {list(v.states)} in another"
                )
    return list(out.values())


def factor_product(a: Factor, b: Factor) -> Factor:
    merged = _merge_vars(a.variables, b.variables)
    pos = {v.name: i for i, v in enumerate(merged)}
    out = np.einsum(
        a.values,
        [pos[n] for n in a.scope],
        b.values,
        [pos[n] for n in b.scope],
        list(range(len(merged))),
    )
    return Factor(tuple(merged), out)


def factor_marginalize(f: Factor, names: Iterable[str]) -> Factor:
    """Sum out ``names`` from ``f``."""
    names = set(names)
    for n in names:
        f.var(n)
    axes = tuple(i for i, n in enumerate(f.scope) if n in names)
    keep = tuple(v for v in f.variables if v.name not in names)
    return Factor(keep, f.values.sum(axis=axes))


def factor_reduce(f: Factor, evidence: Mapping[str, str]) -> Factor:
    """Slice ``f`` at the observed states; observed variables leave the scope."""
    idx: list[int | slice] = []
    keep = []
    for v in f.variables:
        if v.name in evidence:
            idx.append(v.index(evidence[v.name]))
        else:
            idx.append(slice(None))
            keep.append(v)
    return Factor(tuple(keep), f.values[tuple(idx)])


def multiply_all(factors: Sequence[Factor]) -> Factor:
    result = Factor((), np.ones(()))
    for f in factors:
        result = factor_product(result, f)
    return result


@dataclass(frozen=True, eq=False)
class Cpd:
    """P(child | parents); ``table`` has one row per parent configuration."""

    child: DiscreteVariable
    parents: tuple[DiscreteVariable, ...]
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        rows = int(np.prod([p.card for p in self.parents], dtype=int))
        t = np.asarray(self.table, dtype=float)
        if t.size != rows * self.child.card:
            raise ModelValidationError(
                f"CPD of {self.child.name!r} has {t.size} entries, expected "
                f"{rows} x {self.child.card}"
            )
        object.__setattr__(self, "table", t.reshape(rows, self.child.card))

    @property
    def parent_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.parents)

    def check(self) -> list[str]:
        problems = []
        t = self.table
        if not np.all(np.isfinite(t)) or np.any(t < 0) or np.any(t > 1):
            problems.append(f"CPD of {self.child.name!r} has entries outside [0, 1]")
        bad = np.flatnonzero(np.abs(t.sum(axis=1) - 1.0) > ROW_TOL)
        for r in bad:
            problems.append(
                f"CPD of {self.child.name!r} row {int(r)} sums to {t[r].sum():.12g}, not 1"
            )
        return problems

    def row_index(self, assignment: Mapping[str, str]) -> int:
        r = 0
        for p in self.parents:
            r = r * p.card + p.index(assignment[p.name])
        return r

    def prob(self, assignment: Mapping[str, str]) -> float:
        return float(self.table[self.row_index(assignment), self.child.index(assignment[self.child.name])])

    def to_factor(self) -> Factor:
        return Factor(self.parents + (self.child,), self.table)

    @classmethod
    def point_mass(cls, child: DiscreteVariable, state: str) -> Cpd:
        row = np.zeros(child.card)
        row[child.index(state)] = 1.0
        return cls(child, (), row)


@dataclass(frozen=True, eq=False)
class BayesNet:
    graph: Admg
    variables: dict[str, DiscreteVariable]
    cpds: dict[str, Cpd]

    def __post_init__(self):
        report = self.validate()
        if not report.ok:
            raise ModelValidationError(report.violations)
        object.__setattr__(self, "order", tuple(topological_order(self.graph)))

    def validate(self) -> ValidationReport:
        report = validate_graph(self.graph)
        if self.graph.bidirected:
            report.violations.append("Bayesian network inference does not support bidirected edges")
        for n in self.graph.nodes:
            if n not in self.variables:
                report.violations.append(f"node {n!r} has no variable")
                continue
            cpd = self.cpds.get(n)
            if cpd is None:
                report.violations.append(f"node {n!r} has no CPD")
                continue
            if cpd.child != self.variables[n]:
                report.violations.append(f"CPD of {n!r} uses a different state space")
            if report.violations:
                continue
            expected = tuple(self.graph.parents(n))
            if cpd.parent_names != expected:
                report.violations.append(
                    f"CPD of {n!r} lists parents {list(cpd.parent_names)}, graph parents are {list(expected)}"
                )
            for p in cpd.parents:
                if p.name in self.variables and p != self.variables[p.name]:
                    report.violations.append(f"CPD of {n!r} uses a different state space for parent {p.name!r}")
            report.violations.extend(cpd.check())
        for n in self.variables:
            if n not in self.graph:
                report.violations.append(f"variable {n!r} is not a graph node")
        return report

    @property
    def names(self) -> tuple[str, ...]:
        return self.graph.nodes

    def var(self, name: str) -> DiscreteVariable:
        try:
            return self.variables[name]
        except KeyError:
            raise UnknownNode(f"unknown node {name!r}") from None

    def check_assignment(self, assignment: Mapping[str, str]) -> None:
        for k, s in assignment.items():
            self.var(k).index(s)

    def factors(self) -> list[Factor]:
        return [self.cpds[n].to_factor() for n in self.graph.nodes]

    def with_cpds(self, graph: Admg, replace: Mapping[str, Cpd]) -> BayesNet:
        cpds = dict(self.cpds)
        cpds.update(replace)
        return BayesNet(graph, dict(self.variables), cpds)


def joint_probability(bn: BayesNet, assignment: Mapping[str, str]) -> float:
    """Product of one CPD entry per node."""
    missing = [n for n in bn.names if n not in assignment]
    if missing:
        raise IncompleteAssignment(f"assignment does not cover {missing}")
    bn.check_assignment(assignment)
    p = 1.0
    for n in bn.names:
        p *= bn.cpds[n].prob(assignment)
    return p


def all_assignments(variables: Sequence[DiscreteVariable]) -> Iterable[dict[str, str]]:
    for combo in itertools.product(*(v.states for v in variables)):
        yield {v.name: s for v, s in zip(variables, combo)}


def variable_elimination(
    bn: BayesNet,
    query: Iterable[str],
    evidence: Mapping[str, str] | None = None,
) -> Factor:
    """P(query | evidence), normalized, over ``query`` in declaration order.

    Non-query, non-evidence nodes are summed out in reverse topological order.
    """
    evidence = dict(evidence or {})
    query = set(query)
    for q in query:
        bn.var(q)
    bn.check_assignment(evidence)
    overlap = query & evidence.keys()
    if overlap:
        raise ValueError(f"query and evidence overlap on {sorted(overlap)}")

    factors = [factor_reduce(f, evidence) for f in bn.factors()]
    hidden = [n for n in reversed(bn.order) if n not in query and n not in evidence]
    for h in hidden:
        touching = [f for f in factors if h in f.scope]
        if not touching:
            continue
        rest = [f for f in factors if h not in f.scope]
        rest.append(factor_marginalize(multiply_all(touching), [h]))
        factors = rest
    joint = multiply_all(factors)
    ordered = [bn.var(n) for n in bn.names if n in query]
    joint = Factor(
        tuple(ordered),
        np.transpose(joint.values, [joint.scope.index(v.name) for v in ordered]) if ordered else joint.values,
    )
    z = joint.total()
    if not z > 0:
        raise ZeroProbabilityEvidence(f"evidence {evidence} has probability zero")
    return joint.normalize()
