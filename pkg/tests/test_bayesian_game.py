import numpy as np
import pytest
from oracles import bayes_interim, bayes_is_bne, corpus_json

from causalgames.bayesian_game import (
    BayesianGame,
    belief,
    interim_expected_utility,
    is_bne,
    pure_bne,
    pure_type_strategy,
)
from causalgames.equilibria import WILDCARD
from causalgames.errors import ModelValidationError, ZeroProbabilityType
from causalgames.modelfile import load_model

NOT_D, NOT_A = 1, 1


@pytest.fixture
def ex5():
    return load_model("bayes_example5").model


def test_beliefs_follow_the_prior(ex5):
    assert belief(ex5, 0, 0).tolist() == [0.25, 0.75]
    assert belief(ex5, 1, 1).tolist() == [1.0]


def test_example5_equilibrium(ex5):
    result = pure_bne(ex5)
    target = ((NOT_D,), (NOT_A, NOT_A))
    assert result.contains(target)
    assert is_bne(ex5, target)
    doc = corpus_json("bayes_example5")
    strategy = {"deterrer": {"t0": "¬d"}, "adversary": {"t1": "¬a", "t2": "¬a"}}
    assert bayes_is_bne(doc, strategy)


def test_interim_utilities_hand_sums(ex5):
    s = pure_type_strategy(ex5, ((NOT_D,), (NOT_A, NOT_A)))
    # deterrer: 1/4 * u(t1, ., ¬a) + 3/4 * u(t2, ., ¬a)
    assert interim_expected_utility(ex5, 0, 0, 0, s) == pytest.approx(0.25 * -1 + 0.75 * -1, abs=1e-12)
    assert interim_expected_utility(ex5, 0, 0, 1, s) == pytest.approx(0.25 * 0 + 0.75 * 0, abs=1e-12)
    # adversary type t1 facing ¬d: attack gives -1, refrain gives 0
    assert interim_expected_utility(ex5, 1, 0, 0, s) == pytest.approx(-1.0, abs=1e-12)
    assert interim_expected_utility(ex5, 1, 1, 1, s) == pytest.approx(0.0, abs=1e-12)
    doc = corpus_json("bayes_example5")
    strategy = {"deterrer": {"t0": "¬d"}, "adversary": {"t1": "¬a", "t2": "¬a"}}
    assert interim_expected_utility(ex5, 0, 0, 0, s) == pytest.approx(
        bayes_interim(doc, "deterrer", "t0", "d", strategy), abs=1e-12
    )


def test_every_reported_profile_passes_the_oracle(ex5):
    doc = corpus_json("bayes_example5")
    for e in pure_bne(ex5):
        strategy = {
            a: {t: ex5.actions[i][k] for t, k in zip(ex5.types[i], e.profile[i])}
            for i, a in enumerate(ex5.agents)
        }
        assert bayes_is_bne(doc, strategy)


def zero_type_game():
    u = np.zeros((2, 1, 2, 2, 2))
    u[1, 0, 0] = [[1, 0], [1, 0]]  # type t1 of agent y prefers action 0
    return BayesianGame(("x", "y"), (("a", "b"), ("c", "d")), (("t",), ("t1", "t2")), [[1.0, 0.0]], u)


def test_zero_probability_types_are_wildcards():
    g = zero_type_game()
    result = pure_bne(g)
    assert all(e.profile[1][1] is WILDCARD for e in result)
    assert result.contains(((0,), (0, 1)))
    with pytest.raises(ZeroProbabilityType):
        belief(g, 1, 1)


def test_prior_must_be_a_distribution():
    with pytest.raises(ModelValidationError):
        BayesianGame(("x",), (("a",),), (("t", "s"),), [0.5, 0.6], np.zeros((1, 2, 1)))
