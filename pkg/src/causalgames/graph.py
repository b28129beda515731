"""Acyclic directed mixed graphs with chance / decision / utility node kinds.

Node identity is the node name. Declaration order is the canonical tie-break
for every ordering this module produces (parents, topological order, DOT).
"""

from __future__ import annotations

import heapq
from collections.abc import Iterable
from dataclasses import dataclass, field

from .errors import CyclicGraph, UnknownNode

KINDS = ("chance", "decision", "utility")


@dataclass(frozen=True)
class NodeKind:
    kind: str = "chance"
    agent: str | None = None

    def __str__(self) -> str:
        return self.kind if self.agent is None else f"{self.kind}[{self.agent}]"


CHANCE = NodeKind()


def decision(agent: str) -> NodeKind:
    return NodeKind("decision", agent)


def utility(agent: str) -> NodeKind:
    return NodeKind("utility", agent)


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def extend(self, other: ValidationReport, prefix: str = "") -> None:
        self.violations.extend(prefix + v for v in other.violations)
        self.warnings.extend(prefix + w for w in other.warnings)

    def __str__(self) -> str:
        lines = [f"error: {v}" for v in self.violations]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines) if lines else "ok"


@dataclass(frozen=True)
class Admg:
    """Directed + bidirected graph over declared nodes.

    Construction never fails on structural problems; call ``validate_graph``
    to get them as data. Edge lists keep duplicates so they can be reported.
    """

    nodes: tuple[str, ...]
    kinds: tuple[NodeKind, ...]
    directed: tuple[tuple[str, str], ...] = ()
    bidirected: tuple[tuple[str, str], ...] = ()
    agents: tuple[str, ...] = ()

    @classmethod
    def build(
        cls,
        nodes: Iterable[str | tuple[str, NodeKind]],
        directed: Iterable[tuple[str, str]] = (),
        bidirected: Iterable[tuple[str, str]] = (),
        agents: Iterable[str] = (),
    ) -> Admg:
        names, kinds = [], []
        for item in nodes:
            if isinstance(item, str):
                names.append(item)
                kinds.append(CHANCE)
            else:
                names.append(item[0])
                kinds.append(item[1])
        return cls(
            tuple(names),
            tuple(kinds),
            tuple((a, b) for a, b in directed),
            tuple((a, b) for a, b in bidirected),
            tuple(agents),
        )

    # index helpers are recomputed lazily; the dataclass is frozen
    @property
    def index(self) -> dict[str, int]:
        idx = self.__dict__.get("_index")
        if idx is None:
            idx = {}
            for i, n in enumerate(self.nodes):
                idx.setdefault(n, i)
            object.__setattr__(self, "_index", idx)
        return idx

    def __contains__(self, v: str) -> bool:
        return v in self.index

    def kind(self, v: str) -> NodeKind:
        self._check(v)
        return self.kinds[self.index[v]]

    def nodes_of_kind(self, kind: str, agent: str | None = None) -> list[str]:
        return [
            n
            for n, k in zip(self.nodes, self.kinds)
            if k.kind == kind and (agent is None or k.agent == agent)
        ]

    def _check(self, v: str) -> None:
        if v not in self.index:
            raise UnknownNode(f"unknown node {v!r}")

    def _sorted(self, vs: Iterable[str]) -> list[str]:
        return sorted(set(vs), key=self.index.__getitem__)

    def parents(self, v: str) -> list[str]:
        """Directed parents of ``v`` in declaration order."""
        self._check(v)
        return self._sorted(a for a, b in self.directed if b == v)

    def children(self, v: str) -> list[str]:
        self._check(v)
        return self._sorted(b for a, b in self.directed if a == v)

    def _reach(self, v: str, forward: bool) -> list[str]:
        self._check(v)
        adj: dict[str, list[str]] = {}
        for a, b in self.directed:
            src, dst = (a, b) if forward else (b, a)
            adj.setdefault(src, []).append(dst)
        seen: set[str] = set()
        stack = list(adj.get(v, ()))
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(adj.get(u, ()))
        seen.discard(v)
        return self._sorted(seen)

    def descendants(self, v: str) -> list[str]:
        return self._reach(v, forward=True)

    def ancestors(self, v: str) -> list[str]:
        return self._reach(v, forward=False)

    def has_directed_path(self, u: str, v: str) -> bool:
        return v in self.descendants(u)


def validate_graph(g: Admg) -> ValidationReport:
    report = ValidationReport()
    seen: set[str] = set()
    for n in g.nodes:
        if not n:
            report.violations.append("empty node name")
        if n in seen:
            report.violations.append(f"duplicate node {n!r}")
        seen.add(n)
    for n, k in zip(g.nodes, g.kinds):
        if k.kind not in KINDS:
            report.violations.append(f"node {n!r} has unknown kind {k.kind!r}")
        elif k.kind == "chance" and k.agent is not None:
            report.violations.append(f"chance node {n!r} cannot have an agent")
        elif k.kind != "chance" and k.agent not in g.agents:
            report.violations.append(f"{k.kind} node {n!r} names unknown agent {k.agent!r}")

    def check_edges(edges, label, unordered):
        keys = set()
        for a, b in edges:
            for end in (a, b):
                if end not in seen:
                    report.violations.append(f"{label} edge ({a}, {b}) references unknown node {end!r}")
            if a == b:
                report.violations.append(f"self-loop on {a!r} ({label})")
            key = frozenset((a, b)) if unordered else (a, b)
            if key in keys:
                report.violations.append(f"duplicate {label} edge ({a}, {b})")
            keys.add(key)

    check_edges(g.directed, "directed", unordered=False)
    check_edges(g.bidirected, "bidirected", unordered=True)
    for a, b in g.bidirected:
        for end in (a, b):
            if end in seen and g.kind(end).kind != "chance":
                report.violations.append(f"bidirected edge ({a}, {b}) touches non-chance node {end!r}")
    if not report.violations:
        try:
            topological_order(g)
        except CyclicGraph as exc:
            report.violations.append(str(exc))
    return report


def topological_order(g: Admg) -> list[str]:
    """Kahn's algorithm; among ready nodes the earliest-declared goes first."""
    idx = g.index
    indeg = {n: 0 for n in g.nodes}
    out: dict[str, list[str]] = {n: [] for n in g.nodes}
    for a, b in set(g.directed):
        if a not in idx or b not in idx:
            raise UnknownNode(f"edge ({a}, {b}) references an unknown node")
        indeg[b] += 1
        out[a].append(b)
    heap = [idx[n] for n in g.nodes if indeg[n] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = g.nodes[heapq.heappop(heap)]
        order.append(n)
        for c in out[n]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, idx[c])
    if len(order) != len(indeg):
        stuck = [n for n in g.nodes if n not in set(order)]
        raise CyclicGraph(f"directed cycle among {stuck}")
    return order


def mutilate(g: Admg, targets: Iterable[str]) -> Admg:
    """Remove every directed edge pointing into a target (graph surgery for do())."""
    targets = set(targets)
    for t in targets:
        g._check(t)
    return Admg(
        g.nodes,
        g.kinds,
        tuple(e for e in g.directed if e[1] not in targets),
        g.bidirected,
        g.agents,
    )


_SHAPES = {"chance": "ellipse", "decision": "box", "utility": "diamond"}


def _q(s: str) -> str:
    return '"' + s.replace('"', '\\"') + '"'


def to_dot(g: Admg, name: str = "G") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for n, k in zip(g.nodes, g.kinds):
        extra = f', xlabel={_q(k.agent)}' if k.agent else ""
        lines.append(f"  {_q(n)} [shape={_SHAPES.get(k.kind, 'ellipse')}{extra}];")
    for a, b in g.directed:
        lines.append(f"  {_q(a)} -> {_q(b)};")
    for a, b in g.bidirected:
        lines.append(f"  {_q(a)} -> {_q(b)} [dir=both, style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
