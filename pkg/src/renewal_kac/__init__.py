"""Exact simulation and convergence diagnostics for renewal-driven Kac-Stroock processes."""

__version__ = "0.1.0"

from .distributions import (  # noqa: E402
    DiscreteAtoms,
    Exponential,
    Gamma,
    InterArrivalLaw,
    MomentCertificate,
    Pareto,
    Uniform,
    certify,
    kac_constant,
    law_from_spec,
    moments,
    pth_moment,
    sample,
)
from .kac_stroock import KacProcessParams, PathEvaluation, evaluate_path, evaluate_x  # noqa: E402
from .renewal import RenewalPath, count_at, parity_at, simulate_path  # noqa: E402
from .rng import RngStream  # noqa: E402

__all__ = [
    "DiscreteAtoms",
    "Exponential",
    "Gamma",
    "InterArrivalLaw",
    "KacProcessParams",
    "MomentCertificate",
    "Pareto",
    "PathEvaluation",
    "RenewalPath",
    "RngStream",
    "Uniform",
    "certify",
    "count_at",
    "evaluate_path",
    "evaluate_x",
    "kac_constant",
    "law_from_spec",
    "moments",
    "parity_at",
    "pth_moment",
    "sample",
    "simulate_path",
]
