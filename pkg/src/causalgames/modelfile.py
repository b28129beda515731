"""Model documents: one JSON format for all six model kinds.

A document is a JSON object with ``format_version``, ``model_type`` and the
type-specific sections at top level. Tables follow the row layout of
:mod:`causalgames.factors` (first parent slowest, child state within a row).
Structure is checked with a JSON schema, then every name and state label is
resolved while the typed model is built.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .bayesian_game import BayesianGame
from .cbg import BeliefProfile, GraphFamily
from .errors import (
    ModelValidationError,
    ParseError,
    SchemaViolation,
    UnknownNode,
    UnknownState,
    UnresolvedReference,
)
from .extensive_form import GameTree, Node, require_valid
from .factors import BayesNet, Cpd, DiscreteVariable
from .graph import Admg, NodeKind
from .maid import Maid, UtilityTable
from .normal_form import NormalFormGame

FORMAT_VERSION = 1
MODEL_TYPES = ("bn", "nfg", "efg", "bayesian_game", "maid", "cbg")

_name = {"type": "string", "minLength": 1}
_names = {"type": "array", "items": _name}
_edge = {"type": "array", "items": _name, "minItems": 2, "maxItems": 2}
_row = {
    "oneOf": [
        {"type": "array", "items": {"type": "number"}},
        {"type": "object", "additionalProperties": {"type": "number"}},
    ]
}
_tensor = {"oneOf": [{"type": "number"}, {"type": "array", "items": {"$ref": "#/$defs/tensor"}}]}
_cpd = {
    "type": "object",
    "required": ["child", "table"],
    "properties": {"child": _name, "parents": _names, "table": {"type": "array", "items": _row}},
    "additionalProperties": False,
}
_utility = {
    "type": "object",
    "required": ["node", "table"],
    "properties": {"node": _name, "parents": _names, "table": {"type": "array", "items": {"type": "number"}}},
    "additionalProperties": False,
}
_graph_node = {
    "type": "object",
    "required": ["name"],
    "properties": {
        "name": _name,
        "kind": {"enum": ["chance", "decision", "utility"]},
        "agent": _name,
        "states": {"type": "array", "items": _name, "minItems": 1},
    },
    "additionalProperties": False,
}
_graph_sections = {
    "nodes": {"type": "array", "items": _graph_node, "minItems": 1},
    "edges": {"type": "array", "items": _edge},
    "bidirected": {"type": "array", "items": _edge},
    "cpds": {"type": "array", "items": _cpd},
    "utilities": {"type": "array", "items": _utility},
}
_tree_node = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["chance", "decision", "terminal"]},
        "name": _name,
        "agent": _name,
        "infoset": _name,
        "payoffs": {
            "oneOf": [
                {"type": "array", "items": {"type": "number"}},
                {"type": "object", "additionalProperties": {"type": "number"}},
            ]
        },
        "moves": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["action", "child"],
                "properties": {
                    "action": _name,
                    "prob": {"type": "number"},
                    "child": {"$ref": "#/$defs/tree_node"},
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
}
_header = {"format_version": {"const": FORMAT_VERSION}, "model_type": {"enum": list(MODEL_TYPES)}}


def _doc(required: list[str], props: dict) -> dict:
    return {
        "type": "object",
        "required": ["format_version", "model_type", *required],
        "properties": {**_header, **props},
        "additionalProperties": False,
    }


SCHEMAS: dict[str, dict] = {
    "bn": _doc(["nodes", "cpds"], {k: _graph_sections[k] for k in ("nodes", "edges", "bidirected", "cpds")}),
    "nfg": _doc(
        ["agents", "actions", "payoffs"],
        {
            "agents": {**_names, "minItems": 1},
            "actions": {"type": "object", "additionalProperties": {**_names, "minItems": 1}},
            "payoffs": {"type": "object", "additionalProperties": _tensor},
        },
    ),
    "efg": _doc(["agents", "tree"], {"agents": {**_names, "minItems": 1}, "tree": {"$ref": "#/$defs/tree_node"}}),
    "bayesian_game": _doc(
        ["agents", "actions", "types", "prior", "payoffs"],
        {
            "agents": {**_names, "minItems": 1},
            "actions": {"type": "object", "additionalProperties": {**_names, "minItems": 1}},
            "types": {"type": "object", "additionalProperties": {**_names, "minItems": 1}},
            "prior": _tensor,
            "payoffs": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["types", "payoffs"],
                    "properties": {
                        "types": {"type": "object", "additionalProperties": _name},
                        "payoffs": {"type": "object", "additionalProperties": _tensor},
                    },
                    "additionalProperties": False,
                },
            },
        },
    ),
    "maid": _doc(["agents", "nodes"], {"agents": {**_names, "minItems": 1}, **_graph_sections}),
    "cbg": _doc(
        ["agents", "graphs", "beliefs"],
        {
            "agents": {**_names, "minItems": 1},
            "graphs": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "type": "object",
                    "required": ["name", "nodes"],
                    "properties": {"name": _name, **_graph_sections},
                    "additionalProperties": False,
                },
            },
            "beliefs": {
                "type": "object",
                "required": ["first_order", "second_order"],
                "properties": {
                    "first_order": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
                    "second_order": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
                },
                "additionalProperties": False,
            },
        },
    ),
    "strategy": _doc(
        ["rules"],
        {
            "model_type": {"const": "strategy"},
            "model": _name,
            "rules": {
                "type": "object",
                "additionalProperties": {
                    "type": "array",
                    "items": {"oneOf": [_name, _row["oneOf"][0], _row["oneOf"][1]]},
                },
            },
        },
    ),
}
for _s in SCHEMAS.values():
    _s["$defs"] = {"tensor": _tensor, "tree_node": _tree_node}

SECTION_ORDER = (
    "model", "agents", "actions", "types", "prior", "nodes", "edges", "bidirected",
    "cpds", "utilities", "payoffs", "tree", "graphs", "beliefs", "rules",
)


@dataclass
class ModelDocument:
    format_version: int
    model_type: str
    body: dict[str, Any]
    _model: Any = field(default=None, compare=False, repr=False)

    @property
    def model(self):
        if self._model is None:
            self._model = build_model(self)
        return self._model

    def to_json(self) -> dict[str, Any]:
        out = {"format_version": self.format_version, "model_type": self.model_type}
        for key in SECTION_ORDER:
            if key in self.body:
                out[key] = self.body[key]
        for key in sorted(self.body):
            out.setdefault(key, self.body[key])
        return out


@dataclass(frozen=True, eq=False)
class CausalBayesianGame:
    family: GraphFamily
    beliefs: BeliefProfile

    @property
    def agents(self):
        return self.family.agents


# -- parsing ------------------------------------------------------------------

def _load_json(text: str) -> Any:
    if not text.strip():
        raise SchemaViolation("empty document")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _check_schema(data: Any, kinds=MODEL_TYPES) -> str:
    if not isinstance(data, dict):
        raise SchemaViolation("document must be a JSON object")
    if not data:
        raise SchemaViolation("empty document")
    kind = data.get("model_type")
    if kind not in kinds:
        raise SchemaViolation(f"model_type must be one of {list(kinds)}, got {kind!r}")
    try:
        jsonschema.validate(data, SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaViolation(f"{path}: {exc.message}") from None
    return kind


def parse_model(text: str) -> ModelDocument:
    """Parse, schema-check and resolve a model document (the typed model is built eagerly)."""
    data = _load_json(text)
    kind = _check_schema(data)
    body = {k: v for k, v in data.items() if k not in ("format_version", "model_type")}
    doc = ModelDocument(data["format_version"], kind, body)
    doc.model  # noqa: B018 - resolve references now so errors surface at parse time
    return doc


def serialize_model(doc: ModelDocument) -> str:
    return dumps(doc.to_json())


def dumps(obj: Any) -> str:
    """JSON with scalar-only arrays kept on one line."""
    return _dump(obj, 0) + "\n"


def _dump(obj: Any, level: int) -> str:
    pad = "  " * (level + 1)
    end = "  " * level
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {_dump(v, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if all(not isinstance(x, (dict, list)) for x in obj):
            return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))
        items = [pad + _dump(x, level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    return json.dumps(obj, ensure_ascii=False)


CORPUS = resources.files("causalgames") / "corpus"


def corpus_names() -> list[str]:
    return sorted(p.name[: -len(".json")] for p in CORPUS.iterdir() if p.name.endswith(".json"))


def resolve_path(name: str | Path) -> Path:
    """A filesystem path, or the name of a bundled corpus file (extension optional)."""
    p = Path(name)
    if p.is_file():
        return p
    for candidate in (CORPUS / str(name), CORPUS / f"{name}.json"):
        if candidate.is_file():
            return Path(str(candidate))
    raise ParseError(f"no such model file or corpus entry: {name}")


def read_text(name: str | Path) -> str:
    try:
        return resolve_path(name).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {name}: {exc}") from None


def load_model(name: str | Path) -> ModelDocument:
    return parse_model(read_text(name))


def load_strategy(name: str | Path, maid: Maid) -> dict[str, Any]:
    data = _load_json(read_text(name))
    _check_schema(data, kinds=("strategy",))
    rules = data["rules"]
    for d in rules:
        if d not in maid.decisions:
            raise UnresolvedReference(f"strategy names unknown decision node {d!r}")
    try:
        return maid.rules(rules)
    except (UnknownNode, UnknownState) as exc:
        raise UnresolvedReference(str(exc)) from None


# -- building -----------------------------------------------------------------

def build_model(doc: ModelDocument):
    builder = {
        "bn": _build_bn,
        "nfg": _build_nfg,
        "efg": _build_efg,
        "bayesian_game": _build_bayesian,
        "maid": _build_maid,
        "cbg": _build_cbg,
    }[doc.model_type]
    try:
        return builder(doc.body)
    except (UnknownNode, UnknownState, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        raise UnresolvedReference(f"unresolved reference: {msg}") from None


def _lookup(mapping: dict, key: str, what: str):
    if key not in mapping:
        raise UnresolvedReference(f"unknown {what} {key!r}")
    return mapping[key]


def _row(row, var: DiscreteVariable) -> list[float]:
    if isinstance(row, dict):
        out = [0.0] * var.card
        for label, p in row.items():
            if label not in var.states:
                raise UnresolvedReference(f"{label!r} is not a state of {var.name!r}")
            out[var.states.index(label)] = float(p)
        return out
    if len(row) != var.card:
        raise ModelValidationError(f"a table row of {var.name!r} has {len(row)} entries, expected {var.card}")
    return [float(x) for x in row]


def _graph_parts(body: dict, agents: tuple[str, ...], allow_kinds: bool):
    nodes, variables = [], {}
    for n in body["nodes"]:
        kind = n.get("kind", "chance")
        if not allow_kinds and kind != "chance":
            raise ModelValidationError(f"node {n['name']!r}: a Bayesian network has chance nodes only")
        if kind != "chance":
            agent = n.get("agent")
            if agent is None:
                raise ModelValidationError(f"{kind} node {n['name']!r} needs an agent")
            _lookup({a: a for a in agents}, agent, "agent")
            nk = NodeKind(kind, agent)
        else:
            nk = NodeKind()
        nodes.append((n["name"], nk))
        if kind != "utility":
            if "states" not in n:
                raise ModelValidationError(f"node {n['name']!r} needs states")
            variables[n["name"]] = DiscreteVariable(n["name"], tuple(n["states"]))
        elif "states" in n:
            raise ModelValidationError(f"utility node {n['name']!r} cannot declare states")
    names = {name for name, _ in nodes}
    for a, b in body.get("edges", []) + body.get("bidirected", []):
        for end in (a, b):
            if end not in names:
                raise UnresolvedReference(f"edge ({a}, {b}) names unknown node {end!r}")
    g = Admg.build(nodes, [tuple(e) for e in body.get("edges", [])], [tuple(e) for e in body.get("bidirected", [])], agents)

    cpds = {}
    for c in body.get("cpds", []):
        child = _lookup(variables, c["child"], "node")
        if c["child"] in cpds:
            raise ModelValidationError(f"two CPDs for {c['child']!r}")
        parent_names = c["parents"] if "parents" in c else g.parents(c["child"])
        parents = tuple(_lookup(variables, p, "node") for p in parent_names)
        rows = [_row(r, child) for r in c["table"]]
        cpds[c["child"]] = Cpd(child, parents, np.array(rows, dtype=float).reshape(-1))
    utilities = {}
    for u in body.get("utilities", []):
        if u["node"] not in names:
            raise UnresolvedReference(f"utility table for unknown node {u['node']!r}")
        parent_names = u["parents"] if "parents" in u else g.parents(u["node"])
        parents = tuple(_lookup(variables, p, "node") for p in parent_names)
        utilities[u["node"]] = UtilityTable(u["node"], parents, u["table"])
    return g, variables, cpds, utilities


def _build_bn(body: dict) -> BayesNet:
    g, variables, cpds, _ = _graph_parts(body, (), allow_kinds=False)
    return BayesNet(g, variables, cpds)


def _agent_sections(body: dict, key: str) -> list[tuple[str, ...]]:
    agents = body["agents"]
    section = body[key]
    for name in section:
        _lookup({a: a for a in agents}, name, "agent")
    return [tuple(_lookup(section, a, f"{key} entry for agent")) for a in agents]


def _build_nfg(body: dict) -> NormalFormGame:
    agents = tuple(body["agents"])
    actions = _agent_sections(body, "actions")
    payoffs = body["payoffs"]
    for name in payoffs:
        _lookup({a: a for a in agents}, name, "agent")
    tensors = [np.asarray(_lookup(payoffs, a, "payoff tensor for agent"), dtype=float) for a in agents]
    shape = tuple(len(a) for a in actions)
    for a, t in zip(agents, tensors):
        if t.shape != shape:
            raise ModelValidationError(f"payoff tensor of {a!r} has shape {t.shape}, expected {shape}")
    return NormalFormGame(agents, actions, np.stack(tensors))


def _tree(node: dict, agents) -> Node:
    kind = node["kind"]
    moves = node.get("moves", [])
    payoffs = node.get("payoffs")
    if isinstance(payoffs, dict):
        for a in payoffs:
            _lookup({x: x for x in agents}, a, "agent")
        payoffs = [payoffs.get(a, float("nan")) for a in agents]
    if kind == "decision" and node.get("agent") is not None:
        _lookup({x: x for x in agents}, node["agent"], "agent")
    return Node(
        kind,
        name=node.get("name"),
        agent=node.get("agent"),
        infoset=node.get("infoset"),
        moves=[(m["action"], _tree(m["child"], agents)) for m in moves],
        probs=[m.get("prob", float("nan")) for m in moves] if kind == "chance" else [],
        payoffs=tuple(payoffs) if payoffs is not None else None,
    )


def _build_efg(body: dict) -> GameTree:
    agents = tuple(body["agents"])
    t = GameTree(agents, _tree(body["tree"], agents))
    require_valid(t)
    return t


def _build_bayesian(body: dict) -> BayesianGame:
    agents = tuple(body["agents"])
    actions = _agent_sections(body, "actions")
    types = _agent_sections(body, "types")
    tshape = tuple(len(t) for t in types)
    ashape = tuple(len(a) for a in actions)
    prior = np.asarray(body["prior"], dtype=float)
    u = np.full((len(agents),) + tshape + ashape, np.nan)
    for entry in body["payoffs"]:
        idx = []
        for a, ts in zip(agents, types):
            label = _lookup(entry["types"], a, "type assignment for agent")
            if label not in ts:
                raise UnresolvedReference(f"{label!r} is not a type of {a!r}")
            idx.append(ts.index(label))
        for i, a in enumerate(agents):
            t = np.asarray(_lookup(entry["payoffs"], a, "payoff tensor for agent"), dtype=float)
            if t.shape != ashape:
                raise ModelValidationError(f"payoff tensor of {a!r} has shape {t.shape}, expected {ashape}")
            u[(i, *idx)] = t
    if np.isnan(u).any():
        raise ModelValidationError("payoffs do not cover every type profile")
    return BayesianGame(agents, actions, types, prior, u)


def _build_maid(body: dict, agents=None) -> Maid:
    agents = tuple(agents if agents is not None else body["agents"])
    g, variables, cpds, utilities = _graph_parts(body, agents, allow_kinds=True)
    return Maid(g, variables, cpds, utilities)


def _build_cbg(body: dict) -> CausalBayesianGame:
    agents = tuple(body["agents"])
    maids, names = [], []
    for gbody in body["graphs"]:
        try:
            maids.append(_build_maid(gbody, agents))
        except ModelValidationError as exc:
            raise ModelValidationError([f"graph {gbody['name']!r}: {v}" for v in exc.violations]) from None
        names.append(gbody["name"])
    family = GraphFamily(tuple(names), tuple(maids))
    b = body["beliefs"]
    beliefs = BeliefProfile(np.asarray(b["first_order"], dtype=float), np.asarray(b["second_order"], dtype=float))
    if beliefs.first_order.shape != (len(agents), len(maids)):
        raise ModelValidationError(f"belief matrices must be {len(agents)} x {len(maids)} (agents x graphs)")
    return CausalBayesianGame(family, beliefs)
