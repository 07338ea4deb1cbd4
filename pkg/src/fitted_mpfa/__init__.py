"""MPFA and fitted-MPFA finite volume solvers for the two-asset Black-Scholes PDE."""

from .analytic import bvn_cdf, exact_boundary, mc_price, payoff, rainbow_max_call
from .error_metrics import ErrorReport, rel_l2_error
from .experiment import PRESETS, ExperimentConfig, make_config, run_experiment
from .grid import Axis1D, TensorGrid, build_graded, build_uniform
from .model import ModelParams
from .schemes import SCHEMES, SchemeOptions, semi_discrete
from .timestepper import ThetaScheme, run, step

__all__ = [
    "Axis1D", "ErrorReport", "ExperimentConfig", "ModelParams", "PRESETS", "SCHEMES", "SchemeOptions",
    "TensorGrid", "ThetaScheme", "build_graded", "build_uniform", "bvn_cdf", "exact_boundary", "make_config",
    "mc_price", "payoff", "rainbow_max_call", "rel_l2_error", "run", "run_experiment", "semi_discrete", "step",
]
