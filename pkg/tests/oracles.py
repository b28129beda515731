"""Reference computations that avoid the library's model classes.

Everything here works from plain JSON documents or raw numpy tables with
explicit loops, so agreement with the solvers is meaningful evidence.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from causalgames.factors import BayesNet, Cpd, DiscreteVariable
from causalgames.graph import Admg
from causalgames.modelfile import read_text

NEG = "¬"


def corpus_json(name: str) -> dict:
    return json.loads(read_text(name))


# -- Bayesian networks ------------------------------------------------------------

@st.composite
def random_bn(draw, max_nodes: int = 6, min_nodes: int = 1, zeros: bool = False) -> BayesNet:
    """A random DAG over binary nodes X0..Xn-1 (edges only go forward) with random CPDs."""
    n = draw(st.integers(min_nodes, max_nodes))
    names = [f"X{i}" for i in range(n)]
    edges = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    g = Admg.build(names, edges)
    variables = {v: DiscreteVariable(v, ("0", "1")) for v in names}
    cpds = {}
    prob = st.floats(0.0 if zeros else 0.02, 1.0 if zeros else 0.98)
    for v in names:
        parents = g.parents(v)
        rows = []
        for _ in range(2 ** len(parents)):
            p = draw(prob)
            rows.append([p, 1.0 - p])
        cpds[v] = Cpd(variables[v], tuple(variables[p] for p in parents), np.array(rows).reshape(-1))
    return BayesNet(g, variables, cpds)


def _row(bn: BayesNet, child: str, x: dict) -> int:
    # first parent slowest
    r = 0
    for p in bn.cpds[child].parents:
        r = r * p.card + p.states.index(x[p.name])
    return r


def brute_joint(bn: BayesNet) -> dict[tuple, float]:
    names = list(bn.graph.nodes)
    out = {}
    for combo in itertools.product(*(bn.variables[v].states for v in names)):
        x = dict(zip(names, combo))
        p = 1.0
        for v in names:
            table = np.asarray(bn.cpds[v].table).reshape(-1, bn.variables[v].card)
            p *= table[_row(bn, v, x), bn.variables[v].states.index(x[v])]
        out[combo] = p
    return out


def brute_conditional(bn: BayesNet, query: list[str], evidence: dict[str, str]) -> dict[tuple, float]:
    """P(query | evidence) by summing the full joint; None when the evidence has zero mass."""
    names = list(bn.graph.nodes)
    qs = [v for v in names if v in query]
    acc: dict[tuple, float] = {}
    for combo, p in brute_joint(bn).items():
        x = dict(zip(names, combo))
        if any(x[k] != s for k, s in evidence.items()):
            continue
        key = tuple(x[v] for v in qs)
        acc[key] = acc.get(key, 0.0) + p
    z = sum(acc.values())
    if z == 0:
        return None
    return {k: v / z for k, v in acc.items()}


# -- normal form ------------------------------------------------------------------

def nfg_pure_nash_oracle(doc: dict) -> set[tuple[str, ...]]:
    agents = doc["agents"]
    acts = [doc["actions"][a] for a in agents]
    tables = [np.asarray(doc["payoffs"][a], dtype=float) for a in agents]
    found = set()
    for cell in itertools.product(*(range(len(a)) for a in acts)):
        ok = True
        for i in range(len(agents)):
            for alt in range(len(acts[i])):
                dev = list(cell)
                dev[i] = alt
                if tables[i][tuple(dev)] > tables[i][cell] + 1e-9:
                    ok = False
        if ok:
            found.add(tuple(acts[i][k] for i, k in enumerate(cell)))
    return found


def two_by_two_mixed(a: np.ndarray, b: np.ndarray) -> tuple[Fraction, Fraction]:
    """Totally mixed equilibrium of a 2x2 bimatrix game from the indifference equations.

    Returns (p, q): p is the row player's weight on row 0, q the column player's on column 0.
    """
    a = [[Fraction(int(x)) for x in r] for r in a]
    b = [[Fraction(int(x)) for x in r] for r in b]
    # column player indifferent: p*b00 + (1-p)*b10 = p*b01 + (1-p)*b11
    p = (b[1][1] - b[1][0]) / (b[0][0] - b[1][0] - b[0][1] + b[1][1])
    q = (a[1][1] - a[0][1]) / (a[0][0] - a[0][1] - a[1][0] + a[1][1])
    return p, q


def is_mixed_nash(payoffs: np.ndarray, profile, eps: float = 1e-9) -> bool:
    x, y = (np.asarray(p, dtype=float) for p in profile)
    a, b = payoffs
    value = (x @ a @ y, x @ b @ y)
    return (a @ y).max() <= value[0] + eps and (x @ b).max() <= value[1] + eps


# -- trees --------------------------------------------------------------------------

def tree_infosets(node: dict, out=None) -> dict[str, tuple[str, list[str]]]:
    """Information set name -> (agent, actions), keyed the way the file names them."""
    out = {} if out is None else out
    if node["kind"] == "decision":
        key = node.get("infoset", node["name"])
        out.setdefault(key, (node["agent"], [m["action"] for m in node["moves"]]))
    for m in node.get("moves", []):
        tree_infosets(m["child"], out)
    return out


def tree_value(node: dict, choice: dict[str, str], agents) -> np.ndarray:
    if node["kind"] == "terminal":
        return np.asarray(node["payoffs"], dtype=float)
    if node["kind"] == "chance":
        return sum(m["prob"] * tree_value(m["child"], choice, agents) for m in node["moves"])
    key = node.get("infoset", node["name"])
    for m in node["moves"]:
        if m["action"] == choice[key]:
            return tree_value(m["child"], choice, agents)
    raise KeyError(choice[key])


def tree_profiles(doc: dict):
    sets = tree_infosets(doc["tree"])
    keys = list(sets)
    for combo in itertools.product(*(sets[k][1] for k in keys)):
        yield dict(zip(keys, combo))


def tree_is_nash(doc: dict, choice: dict[str, str], root: dict | None = None, eps: float = 1e-9) -> bool:
    root = doc["tree"] if root is None else root
    agents = doc["agents"]
    sets = tree_infosets(doc["tree"])
    base = tree_value(root, choice, agents)
    for i, agent in enumerate(agents):
        mine = [k for k, (a, _) in sets.items() if a == agent]
        for alt in itertools.product(*(sets[k][1] for k in mine)):
            dev = dict(choice)
            dev.update(zip(mine, alt))
            if tree_value(root, dev, agents)[i] > base[i] + eps:
                return False
    return True


def tree_nash_oracle(doc: dict) -> list[dict[str, str]]:
    return [c for c in tree_profiles(doc) if tree_is_nash(doc, c)]


def _members(node: dict, out: list) -> list:
    out.append(node)
    for m in node.get("moves", []):
        _members(m["child"], out)
    return out


def tree_subgame_roots(doc: dict) -> list[dict]:
    """Nodes whose subtree contains each information set entirely or not at all."""
    everything = _members(doc["tree"], [])
    key = lambda n: n.get("infoset", n.get("name"))  # noqa: E731
    count = {}
    for n in everything:
        if n["kind"] == "decision":
            count[key(n)] = count.get(key(n), 0) + 1
    roots = []
    for n in everything:
        if n["kind"] == "terminal":
            continue
        inside = {}
        for s in _members(n, []):
            if s["kind"] == "decision":
                inside[key(s)] = inside.get(key(s), 0) + 1
        if all(count[k] == c for k, c in inside.items()):
            roots.append(n)
    return roots


def tree_spe_oracle(doc: dict) -> list[dict[str, str]]:
    roots = tree_subgame_roots(doc)
    return [c for c in tree_profiles(doc) if all(tree_is_nash(doc, c, r) for r in roots)]


# -- Bayesian games ---------------------------------------------------------------------

def bayes_interim(doc: dict, agent: str, type_label: str, action: str, strategy: dict) -> float:
    """Interim expected payoff: strategy[agent][type] is an action label (others' entries used)."""
    agents = doc["agents"]
    i = agents.index(agent)
    prior = np.asarray(doc["prior"], dtype=float)
    types = [doc["types"][a] for a in agents]
    t_i = types[i].index(type_label)
    num, den = 0.0, 0.0
    for entry in doc["payoffs"]:
        tidx = tuple(types[k].index(entry["types"][a]) for k, a in enumerate(agents))
        if tidx[i] != t_i:
            continue
        w = prior[tidx]
        den += w
        cell = []
        for k, a in enumerate(agents):
            lab = action if k == i else strategy[a][entry["types"][a]]
            cell.append(doc["actions"][a].index(lab))
        num += w * np.asarray(entry["payoffs"][agent], dtype=float)[tuple(cell)]
    return num / den


def bayes_is_bne(doc: dict, strategy: dict, eps: float = 1e-9) -> bool:
    prior = np.asarray(doc["prior"], dtype=float)
    for i, a in enumerate(doc["agents"]):
        marg = prior.sum(axis=tuple(k for k in range(prior.ndim) if k != i))
        for t, label in enumerate(doc["types"][a]):
            if marg[t] == 0:
                continue
            base = bayes_interim(doc, a, label, strategy[a][label], strategy)
            for alt in doc["actions"][a]:
                if bayes_interim(doc, a, label, alt, strategy) > base + eps:
                    return False
    return True


# -- MAIDs ------------------------------------------------------------------------------------

def maid_eu(body: dict, rules: dict[str, list[str]]) -> dict[str, float]:
    """Expected utility per agent by enumerating every chance/decision assignment.

    ``rules[d]`` lists one action label per parent configuration, first parent slowest.
    """
    nodes = {n["name"]: n for n in body["nodes"]}
    parents = {n: [] for n in nodes}
    for a, b in body.get("edges", []):
        parents[b].append(a)
    order = [n["name"] for n in body["nodes"]]
    # graph parents in declaration order, as the file convention requires
    parents = {n: [p for p in order if p in parents[n]] for n in nodes}
    cpds = {c["child"]: c for c in body.get("cpds", [])}
    vars_ = [n for n in order if nodes[n].get("kind", "chance") != "utility"]

    def row(n, x, plist):
        r = 0
        for p in plist:
            r = r * len(nodes[p]["states"]) + nodes[p]["states"].index(x[p])
        return r

    eu: dict[str, float] = {}
    for combo in itertools.product(*(nodes[v]["states"] for v in vars_)):
        x = dict(zip(vars_, combo))
        p = 1.0
        for v in vars_:
            if nodes[v].get("kind", "chance") == "decision":
                p *= 1.0 if rules[v][row(v, x, parents[v])] == x[v] else 0.0
            else:
                c = cpds[v]
                r = c["table"][row(v, x, c.get("parents", parents[v]))]
                p *= r[nodes[v]["states"].index(x[v])] if isinstance(r, list) else r.get(x[v], 0.0)
        if p == 0.0:
            continue
        for u in body.get("utilities", []):
            agent = nodes[u["node"]]["agent"]
            eu[agent] = eu.get(agent, 0.0) + p * u["table"][row(u["node"], x, u.get("parents", parents[u["node"]]))]
    return eu


def maid_contexts(body: dict, d: str) -> int:
    nodes = {n["name"]: n for n in body["nodes"]}
    k = 1
    for a, b in body.get("edges", []):
        if b == d:
            k *= len(nodes[a]["states"])
    return k


def agent_rule_options(body: dict, agent: str) -> list[dict[str, list[str]]]:
    nodes = body["nodes"]
    mine = [n for n in nodes if n.get("kind") == "decision" and n["agent"] == agent]
    per = [
        [list(r) for r in itertools.product(n["states"], repeat=maid_contexts(body, n["name"]))] for n in mine
    ]
    return [dict(zip([n["name"] for n in mine], combo)) for combo in itertools.product(*per)]


def maid_is_nash(body: dict, agents, rules: dict[str, list[str]], eps: float = 1e-9) -> bool:
    base = maid_eu(body, rules)
    for a in agents:
        for alt in agent_rule_options(body, a):
            dev = {**rules, **alt}
            if maid_eu(body, dev).get(a, 0.0) > base.get(a, 0.0) + eps:
                return False
    return True


def maid_nash_oracle(body: dict, agents) -> list[dict[str, list[str]]]:
    options = [agent_rule_options(body, a) for a in agents]
    out = []
    for combo in itertools.product(*options):
        rules = {}
        for part in combo:
            rules.update(part)
        if maid_is_nash(body, agents, rules):
            out.append(rules)
    return out


# -- causal Bayesian games ------------------------------------------------------------------

def _decision_parents(body: dict, agent: str) -> tuple:
    nodes = {n["name"]: n for n in body["nodes"]}
    mine = [n["name"] for n in body["nodes"] if n.get("kind") == "decision" and n["agent"] == agent]
    return tuple((d, tuple(a for a, b in body.get("edges", []) if b == d and a in nodes)) for d in mine)


def cbg_is_equilibrium(doc: dict, profile: dict, mode: str, eps: float = 1e-9) -> bool:
    """``profile[agent][graph]`` maps decision -> labels (None entries are filled by every option)."""
    agents = doc["agents"]
    graphs = {g["name"]: g for g in doc["graphs"]}
    names = list(graphs)
    first = np.asarray(doc["beliefs"]["first_order"], dtype=float)
    second = np.asarray(doc["beliefs"]["second_order"], dtype=float)

    holes = [(a, g) for a in agents for g in names if profile[a][g] is None]
    for fill in itertools.product(*(agent_rule_options(graphs[g], a) for a, g in holes)):
        p = {a: dict(profile[a]) for a in agents}
        for (a, g), f in zip(holes, fill):
            p[a][g] = f

        def eu(g, agent, override=None):
            rules = {}
            for a in agents:
                rules.update(override if (a == agent and override is not None) else p[a][g])
            return maid_eu(graphs[g], rules).get(agent, 0.0)

        for i, a in enumerate(agents):
            if mode == "per-graph":
                for k, g in enumerate(names):
                    if second[i, k] <= 0:
                        continue
                    base = eu(g, a)
                    if any(eu(g, a, alt) > base + eps for alt in agent_rule_options(graphs[g], a)):
                        return False
                continue
            classes: dict[tuple, list[int]] = {}
            for k, g in enumerate(names):
                classes.setdefault(_decision_parents(graphs[g], a), []).append(k)
            for members in classes.values():
                w = first[i, members]
                if w.sum() <= 0:
                    continue
                if len({json.dumps(p[a][names[k]], sort_keys=True) for k in members}) != 1:
                    return False
                base = sum(wk * eu(names[k], a) for wk, k in zip(w, members))
                for alt in agent_rule_options(graphs[names[members[0]]], a):
                    if sum(wk * eu(names[k], a, alt) for wk, k in zip(w, members)) > base + eps:
                        return False
    return True
