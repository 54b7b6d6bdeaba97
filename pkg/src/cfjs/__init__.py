"""Conflict-free joint decision making between two players.

Two players with preferences ``A`` and ``B`` over ``N`` options must pick
different options.  The package computes the loss-minimising joint
selection matrices, models the photonic samplers that realise such
decisions (Pure HOM and OAM Attenuation) next to classical baselines,
samples from all of them and reproduces the method comparisons.
"""

from .core import (
    JointMatrix,
    Popularity,
    PreferencePair,
    loss,
    maape,
    mape,
    popularity,
    satisfied_preferences,
    validate_pair,
)
from .errors import CfjsError
from .optimal import construct_capped, construct_zero_loss, min_loss, optimal_matrix
from .optimize import OptimizerConfig, PhomSettings, optimize_settings, phom_pair_matrix
from .quantum import (
    HomDistribution,
    PhotonInput,
    attenuation_expected_matrix,
    hom_distribution,
    phom_joint_matrix,
)
from .samplers import random_order_matrix, uniform_random_matrix

__version__ = "0.1.0"

__all__ = [
    "CfjsError", "HomDistribution", "JointMatrix", "OptimizerConfig", "PhomSettings",
    "PhotonInput", "Popularity", "PreferencePair", "attenuation_expected_matrix",
    "construct_capped", "construct_zero_loss", "hom_distribution", "loss", "maape",
    "mape", "min_loss", "optimal_matrix", "optimize_settings", "phom_joint_matrix",
    "phom_pair_matrix", "popularity", "random_order_matrix", "satisfied_preferences",
    "uniform_random_matrix", "validate_pair",
]
