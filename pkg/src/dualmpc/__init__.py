"""Information-weighted dual MPC with online Bayesian identification."""

from .belief import ParamBelief, mat, prior_from_bias, regressor, update, vec
from .mpc import MpcConfig, Policy, policy
from .plant import Plant, double_integrator, regulation_cost, step
from .sim import EpisodeConfig, EpisodeLog, run_episode, run_monte_carlo, run_post_learning

__all__ = [
    "EpisodeConfig",
    "EpisodeLog",
    "MpcConfig",
    "ParamBelief",
    "Plant",
    "Policy",
    "double_integrator",
    "mat",
    "policy",
    "prior_from_bias",
    "regressor",
    "regulation_cost",
    "run_episode",
    "run_monte_carlo",
    "run_post_learning",
    "step",
    "update",
    "vec",
]
