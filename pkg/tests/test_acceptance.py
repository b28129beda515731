"""Acceptance criteria; the terminal summary prints one PASS/FAIL line per criterion."""

import copy
import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import (
    bayes_is_bne,
    brute_conditional,
    cbg_is_equilibrium,
    corpus_json,
    is_mixed_nash,
    maid_is_nash,
    nfg_pure_nash_oracle,
    random_bn,
    tree_is_nash,
    tree_spe_oracle,
    tree_subgame_roots,
    two_by_two_mixed,
)

from causalgames.bayesian_game import interim_expected_utility, pure_bne, pure_type_strategy
from causalgames.cbg import cbg_pure_bne
from causalgames.extensive_form import (
    backward_induction,
    efg_pure_nash,
    profile_labels,
    subgame_perfect,
    to_strategic_form,
)
from causalgames.factors import variable_elimination
from causalgames.intervention import surgery_query, truncated_query
from causalgames.maid import best_response_dynamics, conditional_eu, interventional_eu, maid_pure_nash
from causalgames.modelfile import load_model, load_strategy, parse_model
from causalgames.normal_form import mixed_nash_2p, pure_nash
from causalgames.report import profile_to_json

NA, ND = "¬a", "¬d"


def nfg_labels(g, eqs):
    return {tuple(g.actions[i][k] for i, k in enumerate(e.profile)) for e in eqs}


# -- 1 --------------------------------------------------------------------------------

@pytest.mark.criterion(1)
def test_c1_pure_nash_table1():
    g = load_model("table1_nfg").model
    assert nfg_labels(g, pure_nash(g)) == {("d", NA), (ND, "a")}
    assert nfg_pure_nash_oracle(corpus_json("table1_nfg")) == {("d", NA), (ND, "a")}


@pytest.mark.criterion(1)
def test_c1_mixed_nash_table1():
    g = load_model("table1_nfg").model
    result = mixed_nash_2p(g)
    p, q = two_by_two_mixed(*g.payoffs)
    assert (p, q) == (pytest.approx(0.001), pytest.approx(0.001))
    interior = [e.profile for e in result if 0 < e.profile[0][0] < 1]
    assert len(interior) == 1
    ((x, y),) = interior
    assert abs(x[0] - 0.001) <= 1e-9 and abs(y[0] - 0.001) <= 1e-9
    pure_part = {
        (g.actions[0][int(np.argmax(a))], g.actions[1][int(np.argmax(b))])
        for a, b in (e.profile for e in result)
        if max(a) == 1.0 and max(b) == 1.0
    }
    assert pure_part == {("d", NA), (ND, "a")}


# -- 2 --------------------------------------------------------------------------------

EX4_NE = [
    {"V1_1": "d", "V2_1": NA, "V2_2": NA},
    {"V1_1": "d", "V2_1": NA, "V2_2": "a"},
    {"V1_1": ND, "V2_1": "a", "V2_2": "a"},
]
EX4_SPE = [{"V1_1": "d", "V2_1": NA, "V2_2": "a"}]


def _canon(profiles):
    return sorted(json.dumps(p, sort_keys=True, ensure_ascii=False) for p in profiles)


@pytest.mark.criterion(2)
def test_c2_example4_nash():
    t = load_model("efg_example4").model
    assert _canon(profile_labels(t, e.profile) for e in efg_pure_nash(t)) == _canon(EX4_NE)


@pytest.mark.criterion(2)
def test_c2_example4_spe():
    t = load_model("efg_example4").model
    assert [profile_labels(t, e.profile) for e in subgame_perfect(t)] == EX4_SPE
    assert tree_spe_oracle(corpus_json("efg_example4")) == EX4_SPE


@pytest.mark.criterion(2)
def test_c2_backward_induction_agrees():
    t = load_model("efg_example4").model
    assert [profile_labels(t, e.profile) for e in backward_induction(t)] == EX4_SPE


# -- 3 --------------------------------------------------------------------------------

@pytest.mark.criterion(3)
def test_c3_strategic_form_equals_table1():
    nfg = to_strategic_form(load_model("efg_example3").model)
    table = load_model("table1_nfg").model
    assert nfg.actions == table.actions
    assert np.array_equal(nfg.payoffs, table.payoffs)


@pytest.mark.criterion(3)
def test_c3_equilibria_correspond():
    t = load_model("efg_example3").model
    table = load_model("table1_nfg").model
    collapsed = {(p["V1_1"], p["I2_1"]) for p in (profile_labels(t, e.profile) for e in efg_pure_nash(t))}
    assert collapsed == nfg_labels(table, pure_nash(table))


# -- 4 --------------------------------------------------------------------------------

@pytest.mark.criterion(4)
def test_c4_bne_example5():
    g = load_model("bayes_example5").model
    assert pure_bne(g).contains(((1,), (1, 1)))


@pytest.mark.criterion(4)
def test_c4_interim_utilities():
    g = load_model("bayes_example5").model
    s = pure_type_strategy(g, ((1,), (1, 1)))
    # deterrer against (¬a, ¬a): d -> 1/4*(-1) + 3/4*(-1); ¬d -> 1/4*0 + 3/4*0
    assert abs(interim_expected_utility(g, 0, 0, 0, s) - (0.25 * -1 + 0.75 * -1)) <= 1e-12
    assert abs(interim_expected_utility(g, 0, 0, 1, s) - (0.25 * 0 + 0.75 * 0)) <= 1e-12
    # adversary facing ¬d: t1 a -> -1, ¬a -> 0; t2 a -> -1, ¬a -> 0
    for t in (0, 1):
        assert abs(interim_expected_utility(g, 1, t, 0, s) - -1.0) <= 1e-12
        assert abs(interim_expected_utility(g, 1, t, 1, s) - 0.0) <= 1e-12


# -- 5 --------------------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_c5_eight_equilibria_with_sigma_hat():
    m = load_model("maid_example7").model
    result = maid_pure_nash(m)
    assert len(result) == 8
    assert result.contains(((0, 1), (1, 1, 0, 0)))


@pytest.mark.criterion(5)
def test_c5_conditional_and_interventional():
    m = load_model("maid_example7").model
    s = load_strategy("sigma_hat", m)
    assert abs(conditional_eu(m, s, "U1", {"D_D": "d"}) - 1.0) <= 1e-12
    assert abs(interventional_eu(m, s, "U1", {"D_D": "d"}) - 0.0) <= 1e-12


# -- 6 --------------------------------------------------------------------------------

# ((¬a, ¬a), ¬d): deterrer ¬d in both graphs, adversary never attacks
TARGET = (((1,),), ((1,),)), (((1, 1),), ((1,),))


@pytest.mark.criterion(6)
@pytest.mark.parametrize("reading", ["cbg_example8", "cbg_example8_prose"])
@pytest.mark.parametrize("mode", ["per-graph", "ex-ante"])
def test_c6_cbg_equilibrium(mode, reading):
    c = load_model(reading).model
    assert cbg_pure_bne(c.family, c.beliefs, mode).contains(TARGET)


# -- 7 --------------------------------------------------------------------------------

@st.composite
def intervention_case(draw):
    bn = draw(random_bn())
    names = list(bn.graph.nodes)
    itv_nodes = draw(st.lists(st.sampled_from(names), min_size=1, unique=True))
    itv = {n: draw(st.sampled_from(["0", "1"])) for n in itv_nodes}
    rest = [n for n in names if n not in itv]
    return bn, (draw(st.lists(st.sampled_from(rest), unique=True)) if rest else []), itv


@pytest.mark.criterion(7)
@settings(max_examples=250, deadline=None)
@given(intervention_case())
def test_c7_truncated_equals_surgery(case):
    bn, targets, itv = case
    a, b = truncated_query(bn, targets, itv), surgery_query(bn, targets, itv)
    assert np.abs(a.values - b.values).max(initial=0.0) <= 1e-12


@pytest.mark.criterion(7)
@settings(max_examples=250, deadline=None)
@given(random_bn(min_nodes=2), st.data())
def test_c7_root_do_equals_conditioning(bn, data):
    root = data.draw(st.sampled_from([n for n in bn.graph.nodes if not bn.graph.parents(n)]))
    state = data.draw(st.sampled_from(["0", "1"]))
    targets = [n for n in bn.graph.nodes if n != root]
    do = truncated_query(bn, targets, {root: state})
    see = variable_elimination(bn, targets, {root: state})
    assert np.abs(do.values - see.values).max() <= 1e-12


# -- 8 --------------------------------------------------------------------------------

@pytest.mark.criterion(8)
@settings(max_examples=150, deadline=None)
@given(random_bn(), st.data())
def test_c8_elimination_equals_enumeration(bn, data):
    names = list(bn.graph.nodes)
    query = data.draw(st.lists(st.sampled_from(names), min_size=1, unique=True))
    rest = [n for n in names if n not in query]
    evidence = {n: data.draw(st.sampled_from(["0", "1"])) for n in data.draw(st.lists(st.sampled_from(rest), unique=True))} if rest else {}
    oracle = brute_conditional(bn, query, evidence)
    got = variable_elimination(bn, query, evidence).to_dict()
    assert max(abs(got[k] - p) for k, p in oracle.items()) <= 1e-12


# -- 9 --------------------------------------------------------------------------------

def _solver_outputs():
    """(name, concept, model, equilibria) for every solver on every corpus model it accepts."""
    out = []
    g = load_model("table1_nfg").model
    out += [("table1_nfg", "pure-nash", g, pure_nash(g)), ("table1_nfg", "mixed-nash", g, mixed_nash_2p(g))]
    nfg3 = to_strategic_form(load_model("efg_example3").model)
    out += [("efg_example3/strategic", "mixed-nash", nfg3, mixed_nash_2p(nfg3))]
    for name in ("efg_example3", "efg_example4"):
        t = load_model(name).model
        out += [(name, "pure-nash", t, efg_pure_nash(t)), (name, "spe", t, subgame_perfect(t))]
        if t.is_perfect_information():
            out += [(name, "backward-induction", t, backward_induction(t))]
    b = load_model("bayes_example5").model
    out += [("bayes_example5", "bne", b, pure_bne(b))]
    for name in ("maid_example7", "influence_example6"):
        m = load_model(name).model
        out += [(name, "pure-nash", m, maid_pure_nash(m)), (name, "best-response", m, best_response_dynamics(m))]
    for name in ("cbg_example8", "cbg_example8_prose"):
        c = load_model(name).model
        for mode in ("per-graph", "ex-ante"):
            out += [(name, f"bne/{mode}", c, cbg_pure_bne(c.family, c.beliefs, mode))]
    return out


def _oracle_check(name, concept, model, profile) -> bool:
    base = name.split("/")[0]
    if concept in ("pure-nash", "mixed-nash") and hasattr(model, "shape"):
        mix = profile if concept == "mixed-nash" else [np.eye(n)[k] for n, k in zip(model.shape, profile)]
        return is_mixed_nash(model.payoffs, mix)
    doc = corpus_json(base)
    labels = profile_to_json(model, profile)
    if doc["model_type"] == "efg":
        ok = tree_is_nash(doc, labels)
        if concept != "pure-nash":
            ok = ok and all(tree_is_nash(doc, labels, r) for r in tree_subgame_roots(doc))
        return ok
    if doc["model_type"] == "bayesian_game":
        filled = {a: {t: (lab or doc["actions"][a][0]) for t, lab in v.items()} for a, v in labels.items()}
        return bayes_is_bne(doc, filled)
    if doc["model_type"] == "maid":
        return maid_is_nash(doc, doc["agents"], labels)
    return cbg_is_equilibrium(doc, labels, concept.split("/")[1])


SOLVER_OUTPUTS = _solver_outputs()


@pytest.mark.criterion(9)
@pytest.mark.parametrize("name, concept, model, eqs", SOLVER_OUTPUTS, ids=[f"{n}:{c}" for n, c, _, _ in SOLVER_OUTPUTS])
def test_c9_independent_reverification(name, concept, model, eqs):
    assert len(eqs) > 0
    for e in eqs:
        assert _oracle_check(name, concept, model, e.profile), e.profile


@pytest.mark.criterion(9)
@pytest.mark.parametrize("name", ["efg_example3", "efg_example4"])
def test_c9_spe_subset_of_nash(name):
    t = load_model(name).model
    assert set(subgame_perfect(t).profiles) <= set(efg_pure_nash(t).profiles)


def _rescale(doc, agent, scale, shift):
    doc = copy.deepcopy(doc)
    kind = doc["model_type"]
    f = lambda x: scale * x + shift  # noqa: E731
    if kind == "nfg":
        doc["payoffs"][agent] = np.vectorize(f)(np.asarray(doc["payoffs"][agent], float)).tolist()
    elif kind == "efg":
        i = doc["agents"].index(agent)

        def walk(n):
            if n["kind"] == "terminal":
                n["payoffs"][i] = f(n["payoffs"][i])
            for m in n.get("moves", []):
                walk(m["child"])

        walk(doc["tree"])
    elif kind == "bayesian_game":
        for entry in doc["payoffs"]:
            entry["payoffs"][agent] = np.vectorize(f)(np.asarray(entry["payoffs"][agent], float)).tolist()
    else:
        for body in doc.get("graphs", [doc]):
            owner = {n["name"]: n.get("agent") for n in body["nodes"]}
            for u in body["utilities"]:
                if owner[u["node"]] == agent:
                    u["table"] = [f(x) for x in u["table"]]
    return parse_model(json.dumps(doc)).model


def _profiles(kind, model, mode=None):
    if kind == "nfg":
        return sorted(pure_nash(model).profiles)
    if kind == "efg":
        return sorted(efg_pure_nash(model).profiles), sorted(subgame_perfect(model).profiles)
    if kind == "bayesian_game":
        return sorted(pure_bne(model).profiles, key=repr)
    if kind == "maid":
        return sorted(maid_pure_nash(model).profiles)
    return sorted(cbg_pure_bne(model.family, model.beliefs, mode).profiles, key=repr)


AFFINE_CASES = [
    (name, mode, agent)
    for name, modes in [
        ("table1_nfg", [None]), ("efg_example3", [None]), ("efg_example4", [None]), ("bayes_example5", [None]),
        ("maid_example7", [None]), ("influence_example6", [None]),
        ("cbg_example8", ["per-graph", "ex-ante"]), ("cbg_example8_prose", ["per-graph", "ex-ante"]),
    ]
    for mode in modes
    for agent in corpus_json(name)["agents"]
]


@pytest.mark.criterion(9)
@pytest.mark.parametrize("name, mode, agent", AFFINE_CASES)
def test_c9_affine_rescaling_invariance(name, mode, agent):
    doc = corpus_json(name)
    base = _profiles(doc["model_type"], load_model(name).model, mode)
    for scale, shift in [(2.5, -7.0), (0.001, 1000.0)]:
        assert _profiles(doc["model_type"], _rescale(doc, agent, scale, shift), mode) == base


# -- 10 -------------------------------------------------------------------------------

CLI_CORPUS = [
    ["validate", n] for n in ("table1_nfg", "efg_example3", "efg_example4", "bayes_example5", "deter_causal",
                              "influence_example6", "maid_example7", "cbg_example8", "cbg_example8_prose")
] + [
    ["solve", "table1_nfg", "--concept", "pure-nash"],
    ["solve", "table1_nfg", "--concept", "mixed-nash"],
    ["solve", "efg_example3", "--concept", "pure-nash"],
    ["solve", "efg_example3", "--concept", "spe"],
    ["solve", "efg_example4", "--concept", "pure-nash"],
    ["solve", "efg_example4", "--concept", "spe"],
    ["solve", "efg_example4", "--concept", "backward-induction"],
    ["solve", "bayes_example5", "--concept", "bne"],
    ["solve", "influence_example6", "--concept", "pure-nash"],
    ["solve", "maid_example7", "--concept", "pure-nash"],
    ["solve", "maid_example7", "--concept", "best-response"],
    ["solve", "cbg_example8", "--mode", "per-graph"],
    ["solve", "cbg_example8", "--mode", "ex-ante"],
    ["solve", "cbg_example8_prose", "--mode", "ex-ante", "--format", "json"],
    ["query", "deter_causal", "--target", "X_A", "--do", "X_D=d"],
    ["query", "deter_causal", "--target", "X_A", "--do", "X_D=d", "--route", "truncated"],
    ["query", "deter_causal", "--target", "X_A", "--given", "X_D=d"],
    ["query", "maid_example7", "--eu", "U1", "--strategy", "sigma_hat", "--given", "D_D=d"],
    ["query", "maid_example7", "--eu", "U1", "--strategy", "sigma_hat", "--do", "D_D=d"],
    ["export-dot", "efg_example3"],
    ["export-dot", "maid_example7"],
    ["export-dot", "cbg_example8"],
]


def _run_corpus() -> bytes:
    script = (
        "import sys, contextlib, io\n"
        "from causalgames.cli import main\n"
        f"cmds = {CLI_CORPUS!r}\n"
        "for argv in cmds:\n"
        "    code = main(argv)\n"
        "    sys.stdout.write(f'[exit {code}]\\n')\n"
    )
    return subprocess.run([sys.executable, "-c", script], capture_output=True, check=True).stdout


@pytest.mark.criterion(10)
def test_c10_byte_identical_runs():
    first, second = _run_corpus(), _run_corpus()
    assert first == second
    assert first.count(b"[exit 0]") == len(CLI_CORPUS)
