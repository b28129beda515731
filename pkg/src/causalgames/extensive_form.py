"""Game trees with chance moves and information sets.

A ``GameTree`` is built from nested ``Node`` objects and flattened in
preorder. Information sets are ordered by owning agent, then by first
appearance in preorder; a pure profile is a tuple holding one action index
per information set in that order.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .equilibria import Equilibrium, EquilibriumSet, check_limit
from .errors import ImperfectInformation, IncompleteProfile, ModelValidationError, UnknownNode
from .graph import ValidationReport
from .normal_form import NormalFormGame, pure_nash

PROB_TOL = 1e-9


@dataclass
class Node:
    kind: str  # "chance" | "decision" | "terminal"
    name: str | None = None
    agent: str | None = None
    infoset: str | None = None
    moves: list[tuple[str, Node]] = field(default_factory=list)
    probs: list[float] = field(default_factory=list)
    payoffs: Sequence[float] | Mapping[str, float] | None = None


def terminal(*payoffs: float, name: str | None = None) -> Node:
    return Node("terminal", name=name, payoffs=tuple(payoffs))


def decision(agent: str, moves: Mapping[str, Node], infoset: str | None = None, name: str | None = None) -> Node:
    return Node("decision", name=name, agent=agent, infoset=infoset, moves=list(moves.items()))


def chance(moves: Mapping[str, tuple[float, Node]], name: str | None = None) -> Node:
    return Node(
        "chance",
        name=name,
        moves=[(k, n) for k, (_, n) in moves.items()],
        probs=[p for p, _ in moves.values()],
    )


@dataclass(frozen=True)
class InformationSet:
    name: str
    agent: str
    members: tuple[int, ...]
    actions: tuple[str, ...]


@dataclass(frozen=True)
class Subgame:
    root: int
    nodes: frozenset[int]
    infosets: tuple[int, ...]


class GameTree:
    def __init__(self, agents: Sequence[str], root: Node):
        self.agents = tuple(agents)
        self.root_node = root
        self.nodes: list[Node] = []
        self.parent: list[int | None] = []
        self.children: list[list[int]] = []
        self._flatten(root, None)
        for i, n in enumerate(self.nodes):
            if n.name is None:
                n.name = f"n{i}"
        self.names = [n.name for n in self.nodes]
        self._build_infosets()

    def _flatten(self, node: Node, parent: int | None) -> int:
        i = len(self.nodes)
        self.nodes.append(node)
        self.parent.append(parent)
        self.children.append([])
        for _, child in node.moves:
            self.children[i].append(self._flatten(child, i))
        return i

    def _build_infosets(self) -> None:
        by_name: dict[str, list[int]] = {}
        for i, n in enumerate(self.nodes):
            if n.kind == "decision":
                label = n.infoset if n.infoset is not None else n.name
                by_name.setdefault(label, []).append(i)
        order = []
        for label, members in by_name.items():
            agent = self.nodes[members[0]].agent
            rank = self.agents.index(agent) if agent in self.agents else len(self.agents)
            order.append((rank, members[0], label, members))
        order.sort(key=lambda r: (r[0], r[1]))
        self.infosets = [
            InformationSet(
                label,
                self.nodes[members[0]].agent,
                tuple(members),
                tuple(a for a, _ in self.nodes[members[0]].moves),
            )
            for _, _, label, members in order
        ]
        self.infoset_of = {}
        for k, s in enumerate(self.infosets):
            for m in s.members:
                self.infoset_of[m] = k

    # -- helpers -------------------------------------------------------------
    def agent_index(self, agent: str) -> int:
        return self.agents.index(agent)

    def agent_infosets(self, i: int) -> list[int]:
        return [k for k, s in enumerate(self.infosets) if s.agent == self.agents[i]]

    def payoff_vector(self, i: int) -> np.ndarray:
        p = self.nodes[i].payoffs
        if isinstance(p, Mapping):
            return np.array([float(p[a]) for a in self.agents])
        return np.asarray(p, dtype=float)

    def move_child(self, i: int, action: str) -> int:
        for (label, _), c in zip(self.nodes[i].moves, self.children[i]):
            if label == action:
                return c
        raise UnknownNode(f"node {self.names[i]!r} has no move {action!r}")

    def subtree(self, i: int) -> list[int]:
        out, stack = [], [i]
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(reversed(self.children[u]))
        return out

    def is_perfect_information(self) -> bool:
        return all(len(s.members) == 1 for s in self.infosets)

    def n_pure_profiles(self) -> int:
        return int(np.prod([len(s.actions) for s in self.infosets], dtype=object)) if self.infosets else 1


def validate_efg(t: GameTree) -> ValidationReport:
    report = ValidationReport()
    seen = set()
    for i, n in enumerate(t.nodes):
        if n.name in seen:
            report.violations.append(f"duplicate node name {n.name!r}")
        seen.add(n.name)
        where = f"node {n.name!r}"
        if n.kind == "terminal":
            if n.moves:
                report.violations.append(f"{where}: terminal node has children")
            try:
                u = t.payoff_vector(i)
                if u.shape != (len(t.agents),) or not np.all(np.isfinite(u)):
                    report.violations.append(f"{where}: needs one finite payoff per agent")
            except (KeyError, TypeError, ValueError):
                report.violations.append(f"{where}: needs one finite payoff per agent")
            continue
        if not n.moves:
            report.violations.append(f"{where}: non-terminal node without children")
        labels = [a for a, _ in n.moves]
        if len(set(labels)) != len(labels):
            report.violations.append(f"{where}: duplicate move labels {labels}")
        if n.kind == "chance":
            p = np.asarray(n.probs, dtype=float)
            if p.shape != (len(n.moves),):
                report.violations.append(f"{where}: one probability per child required")
            elif np.any(p < 0) or abs(p.sum() - 1.0) > PROB_TOL:
                report.violations.append(f"{where}: chance probabilities {p.tolist()} are not a distribution")
        elif n.kind == "decision":
            if n.agent not in t.agents:
                report.violations.append(f"{where}: unknown agent {n.agent!r}")
        else:
            report.violations.append(f"{where}: unknown kind {n.kind!r}")

    for s in t.infosets:
        agents = {t.nodes[m].agent for m in s.members}
        if len(agents) > 1:
            report.violations.append(f"information set {s.name!r} mixes agents {sorted(map(str, agents))}")
        for m in s.members:
            acts = tuple(a for a, _ in t.nodes[m].moves)
            if set(acts) != set(s.actions) or len(acts) != len(s.actions):
                report.violations.append(
                    f"information set {s.name!r}: node {t.names[m]!r} offers {list(acts)}, expected {list(s.actions)}"
                )
        members = set(s.members)
        for m in s.members:
            if members & (set(t.subtree(m)) - {m}):
                report.warnings.append(f"information set {s.name!r} contains a node and its own descendant")
                break
    if not report.violations:
        report.warnings.extend(_recall_warnings(t))
    return report


def _recall_warnings(t: GameTree) -> list[str]:
    """Perfect recall: members of one set share the owner's own (set, action) history."""
    history: dict[int, tuple] = {0: ()}
    for i in range(len(t.nodes)):
        n = t.nodes[i]
        for (label, _), c in zip(n.moves, t.children[i]):
            step = ((n.agent, t.infosets[t.infoset_of[i]].name, label),) if n.kind == "decision" else ()
            history[c] = history[i] + step
    out = []
    for s in t.infosets:
        seqs = {tuple(h for h in history[m] if h[0] == s.agent) for m in s.members}
        if len(seqs) > 1:
            out.append(f"information set {s.name!r} violates perfect recall for {s.agent!r}")
    return out


def require_valid(t: GameTree) -> None:
    report = validate_efg(t)
    if not report.ok:
        raise ModelValidationError(report.violations)


# -- evaluation ---------------------------------------------------------------

def _behavioral(t: GameTree, profile) -> list[np.ndarray]:
    out = []
    for k, s in enumerate(t.infosets):
        if isinstance(profile, Mapping):
            if s.name not in profile:
                raise IncompleteProfile(f"no strategy for information set {s.name!r}")
            d = profile[s.name]
        else:
            if k >= len(profile):
                raise IncompleteProfile(f"no strategy for information set {s.name!r}")
            d = profile[k]
        if isinstance(d, str):
            vec = np.zeros(len(s.actions))
            vec[s.actions.index(d)] = 1.0
        elif isinstance(d, Mapping):
            vec = np.array([float(d.get(a, 0.0)) for a in s.actions])
        else:
            vec = np.asarray(d, dtype=float)
        if vec.shape != (len(s.actions),):
            raise IncompleteProfile(f"strategy for {s.name!r} has the wrong length")
        out.append(vec)
    return out


def expected_utilities(t: GameTree, profile, node: int = 0) -> np.ndarray:
    """Expected payoff vector below ``node`` under a behavioral profile.

    ``profile`` maps information-set names (or positions) to an action label,
    a probability vector over the set's actions, or a label->probability map.
    """
    strat = _behavioral(t, profile)

    def value(i: int) -> np.ndarray:
        n = t.nodes[i]
        if n.kind == "terminal":
            return t.payoff_vector(i)
        if n.kind == "chance":
            weights = n.probs
        else:
            s = t.infosets[t.infoset_of[i]]
            vec = strat[t.infoset_of[i]]
            weights = [vec[s.actions.index(a)] for a, _ in n.moves]
        total = np.zeros(len(t.agents))
        for w, c in zip(weights, t.children[i]):
            if w:
                total = total + w * value(c)
        return total

    return value(node)


def pure_value(t: GameTree, profile: Sequence[int], node: int = 0) -> np.ndarray:
    """Payoff vector below ``node`` for a pure profile (action index per information set)."""
    i = node
    n = t.nodes[i]
    if n.kind == "terminal":
        return t.payoff_vector(i)
    if n.kind == "chance":
        total = np.zeros(len(t.agents))
        for p, c in zip(n.probs, t.children[i]):
            if p:
                total = total + p * pure_value(t, profile, c)
        return total
    s = t.infosets[t.infoset_of[i]]
    return pure_value(t, profile, t.move_child(i, s.actions[profile[t.infoset_of[i]]]))


def profile_labels(t: GameTree, profile: Sequence[int]) -> dict[str, str]:
    return {s.name: s.actions[a] for s, a in zip(t.infosets, profile)}


def profile_from_labels(t: GameTree, labels: Mapping[str, str]) -> tuple[int, ...]:
    try:
        return tuple(s.actions.index(labels[s.name]) for s in t.infosets)
    except KeyError as exc:
        raise IncompleteProfile(f"no action for information set {exc.args[0]!r}") from None


# -- strategic form -------------------------------------------------------------

def agent_strategies(t: GameTree, i: int) -> list[tuple[int, ...]]:
    """Pure strategies of agent i: action indices over its own information sets."""
    sets = t.agent_infosets(i)
    return list(itertools.product(*(range(len(t.infosets[k].actions)) for k in sets)))


def _compose(t: GameTree, choice: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
    profile = [0] * len(t.infosets)
    for i, strat in enumerate(choice):
        for k, a in zip(t.agent_infosets(i), strat):
            profile[k] = a
    return tuple(profile)


def to_strategic_form(t: GameTree, config: SolverConfig = DEFAULT_CONFIG) -> NormalFormGame:
    require_valid(t)
    check_limit(t.n_pure_profiles(), config.limit)
    strategies = [agent_strategies(t, i) for i in range(len(t.agents))]
    labels = []
    for i, strats in enumerate(strategies):
        sets = [t.infosets[k] for k in t.agent_infosets(i)]
        if len(sets) == 1:
            labels.append(tuple(sets[0].actions[s[0]] for s in strats))
        elif not sets:
            labels.append(("-",))
        else:
            labels.append(
                tuple("(" + ",".join(st.actions[a] for st, a in zip(sets, s)) + ")" for s in strats)
            )
    shape = tuple(len(s) for s in strategies)
    u = np.zeros((len(t.agents),) + shape)
    for idx in np.ndindex(*shape):
        u[(slice(None),) + idx] = pure_value(t, _compose(t, [strategies[i][k] for i, k in enumerate(idx)]))
    return NormalFormGame(t.agents, labels, u)


def efg_pure_nash(t: GameTree, config: SolverConfig = DEFAULT_CONFIG) -> EquilibriumSet:
    """Pure Nash equilibria through the strategic form, mapped back to information sets."""
    nfg = to_strategic_form(t, config)
    strategies = [agent_strategies(t, i) for i in range(len(t.agents))]
    eqs = [
        Equilibrium(_compose(t, [strategies[i][k] for i, k in enumerate(e.profile)]), e.payoffs)
        for e in pure_nash(nfg, config)
    ]
    eqs.sort(key=lambda e: e.profile)
    return EquilibriumSet("pure-nash", eqs)


# -- subgames -------------------------------------------------------------------

def subgames(t: GameTree) -> list[Subgame]:
    """Nodes whose subtree holds every information set entirely or not at all."""
    out = []
    for i, n in enumerate(t.nodes):
        if i != 0 and n.kind == "terminal":
            continue
        nodes = frozenset(t.subtree(i))
        touched = []
        ok = True
        for k, s in enumerate(t.infosets):
            inside = sum(m in nodes for m in s.members)
            if inside and inside != len(s.members):
                ok = False
                break
            if inside:
                touched.append(k)
        if ok:
            out.append(Subgame(i, nodes, tuple(touched)))
    return out


def is_subgame_nash(t: GameTree, profile: Sequence[int], sub: Subgame, eps: float = 1e-9) -> bool:
    """No agent gains more than ``eps`` by jointly changing its actions inside ``sub``."""
    base = pure_value(t, profile, sub.root)
    for i in range(len(t.agents)):
        own = [k for k in sub.infosets if t.infosets[k].agent == t.agents[i]]
        if not own:
            continue
        for alt in itertools.product(*(range(len(t.infosets[k].actions)) for k in own)):
            p = list(profile)
            for k, a in zip(own, alt):
                p[k] = a
            if pure_value(t, p, sub.root)[i] > base[i] + eps:
                return False
    return True


def subgame_perfect(t: GameTree, config: SolverConfig = DEFAULT_CONFIG) -> EquilibriumSet:
    """Pure profiles that are Nash equilibria of every subgame."""
    require_valid(t)
    check_limit(t.n_pure_profiles(), config.limit)
    subs = subgames(t)
    eqs = []
    for profile in itertools.product(*(range(len(s.actions)) for s in t.infosets)):
        if all(is_subgame_nash(t, profile, s, config.eps) for s in subs):
            eqs.append(Equilibrium(tuple(profile), tuple(float(x) for x in pure_value(t, profile))))
    return EquilibriumSet("spe", eqs)


def backward_induction(t: GameTree, config: SolverConfig = DEFAULT_CONFIG) -> EquilibriumSet:
    """Bottom-up argmax on perfect-information trees; every tie is branched."""
    require_valid(t)
    if not t.is_perfect_information():
        shared = [s.name for s in t.infosets if len(s.members) > 1]
        raise ImperfectInformation(f"information sets with several nodes: {shared}")

    def options(i: int) -> list[tuple[np.ndarray, dict[int, int]]]:
        n = t.nodes[i]
        if n.kind == "terminal":
            return [(t.payoff_vector(i), {})]
        child_opts = [options(c) for c in t.children[i]]
        out = []
        for combo in itertools.product(*child_opts):
            merged: dict[int, int] = {}
            for _, assign in combo:
                merged.update(assign)
            if n.kind == "chance":
                out.append((sum(p * v for p, (v, _) in zip(n.probs, combo)), merged))
                continue
            k = t.infoset_of[i]
            s = t.infosets[k]
            me = t.agent_index(n.agent)
            best = max(v[me] for v, _ in combo)
            for (label, _), (v, _) in zip(n.moves, combo):
                if v[me] >= best - config.eps:
                    out.append((v, {**merged, k: s.actions.index(label)}))
        check_limit(len(out), config.limit)
        return out

    found = {}
    for v, assign in options(0):
        profile = tuple(assign[k] for k in range(len(t.infosets)))
        found.setdefault(profile, tuple(float(x) for x in v))
    eqs = [Equilibrium(p, found[p]) for p in sorted(found)]
    return EquilibriumSet("backward-induction", eqs)


# -- export -------------------------------------------------------------------

def tree_to_dot(t: GameTree, name: str = "tree") -> str:
    q = lambda s: '"' + str(s).replace('"', '\\"') + '"'  # noqa: E731
    lines = [f"digraph {q(name)} {{"]
    for i, n in enumerate(t.nodes):
        if n.kind == "terminal":
            label = "(" + ", ".join(f"{x:g}" for x in t.payoff_vector(i)) + ")"
            lines.append(f"  {q(n.name)} [shape=plaintext, label={q(label)}];")
        elif n.kind == "chance":
            lines.append(f"  {q(n.name)} [shape=circle, label={q(n.name)}];")
        else:
            lines.append(f"  {q(n.name)} [shape=box, label={q(n.name + ' ' + n.agent)}];")
    for i, n in enumerate(t.nodes):
        for j, ((label, _), c) in enumerate(zip(n.moves, t.children[i])):
            if n.kind == "chance":
                label = f"{label} ({n.probs[j]:g})"
            lines.append(f"  {q(n.name)} -> {q(t.names[c])} [label={q(label)}];")
    for s in t.infosets:
        for a, b in zip(s.members, s.members[1:]):
            lines.append(
                f"  {q(t.names[a])} -> {q(t.names[b])} [style=dashed, dir=none, constraint=false, label={q(s.name)}];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
