"""Causal games: graphical game models, exact inference, interventions and equilibrium solvers."""

from .bayesian_game import BayesianGame, interim_expected_utility, is_bne, pure_bne
from .cbg import (
    BeliefProfile,
    GraphFamily,
    cbg_expected_utility,
    cbg_pure_bne,
    is_cbg_equilibrium,
    validate_family,
)
from .config import DEFAULT_CONFIG, SolverConfig
from .equilibria import WILDCARD, Equilibrium, EquilibriumSet
from .errors import *  # noqa: F401,F403
from .extensive_form import (
    GameTree,
    backward_induction,
    efg_pure_nash,
    subgame_perfect,
    subgames,
    to_strategic_form,
    validate_efg,
)
from .factors import BayesNet, Cpd, DiscreteVariable, Factor, joint_probability, variable_elimination
from .graph import Admg, mutilate, to_dot, topological_order, validate_graph
from .intervention import Intervention, mutilated_network, surgery_query, truncated_query
from .maid import (
    Maid,
    best_response_dynamics,
    conditional_eu,
    expected_utilities,
    interventional_eu,
    is_maid_nash,
    maid_pure_nash,
)
from .modelfile import CausalBayesianGame, ModelDocument, load_model, parse_model, serialize_model
from .normal_form import NormalFormGame, mixed_nash_2p, pure_nash

__version__ = "0.1.0"
