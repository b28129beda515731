"""Canonical text and JSON renderings of solver output, plus re-verification on load.

Text lines read ``agent: strategy; agent: strategy | EU agent=x agent=y`` with
agents in index order, decisions in declaration order, actions by state label
and numbers fixed at six decimals. Unconstrained entries print as ``*``.
"""

from __future__ import annotations

import itertools
import json
from collections.abc import Mapping
from typing import Any

import numpy as np

from .bayesian_game import BayesianGame, is_bne
from .cbg import GraphFamily, is_cbg_equilibrium
from .equilibria import WILDCARD, Equilibrium, EquilibriumSet
from .errors import IncompleteProfile, ModelValidationError, UnknownState
from .extensive_form import (
    GameTree,
    agent_strategies,
    is_subgame_nash,
    pure_value,
    subgames,
)
from .maid import Maid, is_maid_nash
from .modelfile import CausalBayesianGame
from .normal_form import NormalFormGame, deviation_gain

STAR = "*"


def fmt(x: float | None) -> str:
    if x is None:
        return STAR
    s = f"{float(x):.6f}"
    return "0.000000" if s == "-0.000000" else s


def _group(labels) -> str:
    labels = list(labels)
    return labels[0] if len(labels) == 1 else "(" + ",".join(labels) + ")"


def _rule_text(m: Maid, d: str, rule) -> str:
    states = m.variables[d].states
    return _group(states[a] for a in rule)


def _bundle_text(m: Maid, agent: str, bundle) -> str:
    if bundle is WILDCARD:
        return STAR
    return ", ".join(f"{d}={_rule_text(m, d, r)}" for d, r in zip(m.agent_decisions(agent), bundle))


def _mix_text(labels, probs) -> str:
    probs = [float(p) for p in probs]
    if max(probs) == 1.0:
        return labels[probs.index(1.0)]
    return "{" + ", ".join(f"{a}={fmt(p)}" for a, p in zip(labels, probs)) + "}"


def strategy_texts(model, profile) -> list[str]:
    """One rendered strategy per agent."""
    if isinstance(model, NormalFormGame):
        if all(isinstance(a, (int, np.integer)) for a in profile):
            return [acts[k] for acts, k in zip(model.actions, profile)]
        return [_mix_text(acts, p) for acts, p in zip(model.actions, profile)]
    if isinstance(model, GameTree):
        out = []
        for i in range(len(model.agents)):
            sets = model.agent_infosets(i)
            out.append(_group(model.infosets[k].actions[profile[k]] for k in sets) if sets else "-")
        return out
    if isinstance(model, BayesianGame):
        return [
            _group(STAR if a is WILDCARD else acts[a] for a in per_type)
            for acts, per_type in zip(model.actions, profile)
        ]
    if isinstance(model, Maid):
        return [_bundle_text(model, a, b) for a, b in zip(model.agents, model.split(profile))]
    if isinstance(model, CausalBayesianGame):
        f = model.family
        return [
            ", ".join(
                f"{name}{{{_bundle_text(m, agent, per_graph[g])}}}"
                for g, (name, m) in enumerate(zip(f.names, f.maids))
            )
            for agent, per_graph in zip(f.agents, profile)
        ]
    raise TypeError(f"no rendering for {type(model).__name__}")


def format_line(model, eq: Equilibrium) -> str:
    agents = model.agents
    strat = "; ".join(f"{a}: {s}" for a, s in zip(agents, strategy_texts(model, eq.profile)))
    eu = " ".join(f"{a}={fmt(x)}" for a, x in zip(agents, eq.payoffs))
    return f"{strat} | EU {eu}"


def _sort_key(profile):
    if profile is WILDCARD:
        return (-1,)
    if isinstance(profile, tuple):
        return tuple(_sort_key(p) for p in profile)
    return (profile,)


def canonical(model, eqs: EquilibriumSet) -> list[Equilibrium]:
    """Pure profiles sorted by action indices (wildcards first); mixed ones keep solver order."""
    if eqs.concept == "mixed-nash":
        return list(eqs)
    return sorted(eqs, key=lambda e: _sort_key(e.profile))


def format_text(model, eqs: EquilibriumSet) -> str:
    return "".join(format_line(model, e) + "\n" for e in canonical(model, eqs))


# -- JSON ---------------------------------------------------------------------

def profile_to_json(model, profile) -> Any:
    if isinstance(model, NormalFormGame):
        if all(isinstance(a, (int, np.integer)) for a in profile):
            return {a: acts[k] for a, acts, k in zip(model.agents, model.actions, profile)}
        return {
            a: {lab: float(p) for lab, p in zip(acts, probs)}
            for a, acts, probs in zip(model.agents, model.actions, profile)
        }
    if isinstance(model, GameTree):
        return {s.name: s.actions[k] for s, k in zip(model.infosets, profile)}
    if isinstance(model, BayesianGame):
        return {
            a: {t: (None if k is WILDCARD else acts[k]) for t, k in zip(types, per_type)}
            for a, acts, types, per_type in zip(model.agents, model.actions, model.types, profile)
        }
    if isinstance(model, Maid):
        return {d: [model.variables[d].states[k] for k in rule] for d, rule in zip(model.decisions, profile)}
    if isinstance(model, CausalBayesianGame):
        f = model.family
        out = {}
        for agent, per_graph in zip(f.agents, profile):
            out[agent] = {}
            for name, m, bundle in zip(f.names, f.maids, per_graph):
                out[agent][name] = None if bundle is WILDCARD else {
                    d: [m.variables[d].states[k] for k in rule] for d, rule in zip(m.agent_decisions(agent), bundle)
                }
        return out
    raise TypeError(f"no JSON rendering for {type(model).__name__}")


def _index(labels, label, what: str) -> int:
    if label not in labels:
        raise UnknownState(f"{label!r} is not an action of {what}")
    return labels.index(label)


def _rule_from_json(m: Maid, d: str, rows) -> tuple[int, ...]:
    rule = tuple(_index(m.variables[d].states, r, d) for r in rows)
    if len(rule) != len(m.contexts(d)):
        raise IncompleteProfile(f"rule for {d!r} has {len(rule)} rows, expected {len(m.contexts(d))}")
    return rule


def profile_from_json(model, obj: Mapping) -> Any:
    """Inverse of :func:`profile_to_json`."""
    try:
        if isinstance(model, NormalFormGame):
            first = obj[model.agents[0]]
            if isinstance(first, str):
                return tuple(_index(acts, obj[a], a) for a, acts in zip(model.agents, model.actions))
            return tuple(
                tuple(float(obj[a].get(lab, 0.0)) for lab in acts) for a, acts in zip(model.agents, model.actions)
            )
        if isinstance(model, GameTree):
            return tuple(_index(s.actions, obj[s.name], s.name) for s in model.infosets)
        if isinstance(model, BayesianGame):
            return tuple(
                tuple(
                    WILDCARD if obj[a][t] is None else _index(acts, obj[a][t], a)
                    for t in types
                )
                for a, acts, types in zip(model.agents, model.actions, model.types)
            )
        if isinstance(model, Maid):
            return tuple(_rule_from_json(model, d, obj[d]) for d in model.decisions)
        if isinstance(model, CausalBayesianGame):
            f = model.family
            return tuple(
                tuple(
                    WILDCARD
                    if obj[agent][name] is None
                    else tuple(_rule_from_json(m, d, obj[agent][name][d]) for d in m.agent_decisions(agent))
                    for name, m in zip(f.names, f.maids)
                )
                for agent in f.agents
            )
    except KeyError as exc:
        raise IncompleteProfile(f"profile is missing an entry for {exc.args[0]!r}") from None
    raise TypeError(f"no JSON reading for {type(model).__name__}")


def solve_report(model, model_type: str, eqs: EquilibriumSet, timing: float | None = None) -> dict:
    out = {
        "concept": eqs.concept,
        "model_type": model_type,
        "flags": dict(eqs.flags),
        "equilibria": [
            {"profile": profile_to_json(model, e.profile), "payoffs": dict(zip(model.agents, e.payoffs))}
            for e in canonical(model, eqs)
        ],
    }
    if timing is not None:
        out["timing_seconds"] = timing
    return out


def format_json(report: dict) -> str:
    return json.dumps(report, ensure_ascii=False, indent=2, sort_keys=False) + "\n"


# -- verification -------------------------------------------------------------

def _efg_nash(t: GameTree, profile, eps: float) -> bool:
    base = pure_value(t, profile)
    for i in range(len(t.agents)):
        sets = t.agent_infosets(i)
        for alt in agent_strategies(t, i):
            p = list(profile)
            for k, a in zip(sets, alt):
                p[k] = a
            if pure_value(t, p)[i] > base[i] + eps:
                return False
    return True


def verify_equilibrium(model, concept: str, profile, eps: float = 1e-9) -> bool:
    """Independent best-response check of one emitted profile."""
    if isinstance(model, NormalFormGame):
        if concept == "pure-nash":
            profile = tuple(np.eye(n)[k] for n, k in zip(model.shape, profile))
        return deviation_gain(model, profile) <= eps
    if isinstance(model, GameTree):
        if not _efg_nash(model, profile, eps):
            return False
        if concept in ("spe", "backward-induction"):
            return all(is_subgame_nash(model, profile, s, eps) for s in subgames(model))
        return True
    if isinstance(model, BayesianGame):
        return is_bne(model, profile, eps)
    if isinstance(model, Maid):
        return is_maid_nash(model, profile, eps)
    if isinstance(model, CausalBayesianGame):
        mode = concept.split("/", 1)[1] if "/" in concept else "per-graph"
        return _verify_cbg(model.family, model, profile, mode, eps)
    raise TypeError(f"cannot verify {type(model).__name__}")


def _verify_cbg(f: GraphFamily, model: CausalBayesianGame, profile, mode: str, eps: float) -> bool:
    # a wildcard entry is unconstrained, so any concrete filling must pass
    slots = [(i, g) for i, row in enumerate(profile) for g, b in enumerate(row) if b is WILDCARD]
    options = [f.maids[g].agent_bundles(f.agents[i]) for i, g in slots]
    for fill in itertools.product(*options):
        p = [list(row) for row in profile]
        for (i, g), b in zip(slots, fill):
            p[i][g] = b
        concrete = tuple(tuple(row) for row in p)
        if not is_cbg_equilibrium(f, model.beliefs, concrete, mode, eps):
            return False
    return True


def verify_report(model, report: Mapping, eps: float = 1e-9) -> list[str]:
    """Problems found when re-checking every listed profile; empty when all hold."""
    problems = []
    for k, entry in enumerate(report.get("equilibria", [])):
        try:
            profile = profile_from_json(model, entry["profile"])
        except (IncompleteProfile, UnknownState, ModelValidationError) as exc:
            problems.append(f"equilibrium {k}: {exc}")
            continue
        if not verify_equilibrium(model, report["concept"], profile, eps):
            problems.append(f"equilibrium {k} is not an equilibrium")
    return problems
