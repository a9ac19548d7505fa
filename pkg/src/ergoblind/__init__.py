"""Ergodicity checks, finite abstraction and value approximation for blind stochastic games."""

from .abstraction import (
    AbstractGame,
    AbstractState,
    StableMatrixFamily,
    abstract_belief_set,
    abstract_update,
    build_abstract_game,
    proj,
    stable_approximation,
)
from .ergodicity import ErgodicityCertificate, n_epsilon, paz_bound, tau_bar, verify_ergodic
from .game import BlindGame, belief_step, forward_product, stage_reward, validate_game
from .io import dump_game, parse_game, parse_pfa
from .matrix import MatrixClassReport, classify, is_stable, pattern_of, pattern_product, reach_set, tau1
from .numeric import Budget
from .pfa import PFA, acceptance_probability, cyclic_block_payoff, exists_word_above_half, reduce_to_blind_mdp
from .solver import (
    SolverParams,
    approximate_uniform_value,
    matrix_game_value,
    mean_cycle_value,
    shapley_iterate,
)

__version__ = "0.1.0"

__all__ = [
    "AbstractGame",
    "AbstractState",
    "BlindGame",
    "Budget",
    "ErgodicityCertificate",
    "MatrixClassReport",
    "PFA",
    "SolverParams",
    "StableMatrixFamily",
    "abstract_belief_set",
    "abstract_update",
    "acceptance_probability",
    "approximate_uniform_value",
    "belief_step",
    "build_abstract_game",
    "classify",
    "cyclic_block_payoff",
    "dump_game",
    "exists_word_above_half",
    "forward_product",
    "is_stable",
    "matrix_game_value",
    "mean_cycle_value",
    "n_epsilon",
    "parse_game",
    "parse_pfa",
    "pattern_of",
    "pattern_product",
    "paz_bound",
    "proj",
    "reach_set",
    "reduce_to_blind_mdp",
    "shapley_iterate",
    "stable_approximation",
    "stage_reward",
    "tau1",
    "tau_bar",
    "validate_game",
    "verify_ergodic",
]
