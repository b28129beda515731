"""The do-operator, computed two independent ways.

``truncated_query`` evaluates the truncated factorization by explicit
enumeration: drop the CPDs of intervened nodes, clamp their values and sum
the remaining product over every non-target, non-intervened node.
``surgery_query`` instead mutilates the graph, swaps intervened CPDs for
point masses and hands the result to variable elimination. The two never
share a code path beyond CPD lookup, which is what makes them useful as
oracles for each other.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import OverlappingSets
from .factors import BayesNet, Cpd, Factor, variable_elimination
from .graph import mutilate


@dataclass(frozen=True)
class Intervention:
    assignments: dict[str, str] = field(default_factory=dict)

    def check(self, bn: BayesNet) -> None:
        bn.check_assignment(self.assignments)

    def __bool__(self) -> bool:
        return bool(self.assignments)


def _as_itv(itv) -> Intervention:
    return itv if isinstance(itv, Intervention) else Intervention(dict(itv or {}))


def _targets(bn: BayesNet, targets: Iterable[str], itv: Intervention) -> list[str]:
    targets = set(targets)
    for t in targets:
        bn.var(t)
    itv.check(bn)
    overlap = targets & itv.assignments.keys()
    if overlap:
        raise OverlappingSets(f"targets and intervention overlap on {sorted(overlap)}")
    return [n for n in bn.names if n in targets]


def truncated_query(
    bn: BayesNet, targets: Iterable[str], itv: Intervention | Mapping[str, str]
) -> Factor:
    """P(targets | do(itv)) by brute-force summation of the truncated product."""
    itv = _as_itv(itv)
    order = _targets(bn, targets, itv)
    clamped = itv.assignments
    free = [bn.var(n) for n in bn.names if n not in clamped]
    kept = [bn.cpds[n] for n in bn.names if n not in clamped]
    tvars = [bn.var(n) for n in order]
    out = np.zeros(tuple(v.card for v in tvars))
    for combo in itertools.product(*(v.states for v in free)):
        x = dict(clamped)
        x.update((v.name, s) for v, s in zip(free, combo))
        p = 1.0
        for cpd in kept:
            p *= cpd.prob(x)
            if p == 0.0:
                break
        if p:
            out[tuple(v.index(x[v.name]) for v in tvars)] += p
    return Factor(tuple(tvars), out)


def mutilated_network(bn: BayesNet, itv: Intervention | Mapping[str, str]) -> BayesNet:
    """Graph surgery: cut edges into intervened nodes and pin them with point masses."""
    itv = _as_itv(itv)
    itv.check(bn)
    g = mutilate(bn.graph, itv.assignments)
    return bn.with_cpds(
        g, {n: Cpd.point_mass(bn.var(n), s) for n, s in itv.assignments.items()}
    )


def surgery_query(
    bn: BayesNet,
    targets: Iterable[str],
    itv: Intervention | Mapping[str, str],
    evidence: Mapping[str, str] | None = None,
) -> Factor:
    """P(targets | do(itv)) via the mutilated network.

    ``evidence`` conditions inside the post-intervention model, an extension
    the truncated formula does not cover.
    """
    itv = _as_itv(itv)
    _targets(bn, targets, itv)
    return variable_elimination(mutilated_network(bn, itv), targets, evidence)
