"""Gaussian covariance-matrix simulation of entanglement generation in
time-multiplexed coherent Ising machines: all-optical delay-line coupling,
nonlocal measurement-feedback coupling, and a matrix-product-state reference
construction, with an EPR-type multimode entanglement measure."""

from . import analysis, couplings, delay_line, feedback, gmps
from .analysis import (
    CharacteristicMoments,
    ModelFit,
    bloch_eigenvalue,
    characteristic_vectors,
    duan_check,
    entanglement_k,
    fit_model,
    gauged_moments,
    model_covariance,
    moment_variance,
    separability_oracle,
)
from .couplings import (
    BasisMatrix,
    CouplingRing,
    build_m,
    ferromagnetic_ring,
    gauge_signs,
    invert_m,
    path_product,
    random_ring,
    ring_from_signs,
    seam_gauge,
)
from .gaussian import VACUUM_VARIANCE, HomodyneOutcome, QuadState
from .rng import MeasurementStream, derive_seed, splitmix64
from .trajectory import DIVERGENCE_GUARD, Trajectory

__all__ = [
    "analysis", "couplings", "delay_line", "feedback", "gmps",
    "CharacteristicMoments", "ModelFit", "bloch_eigenvalue",
    "characteristic_vectors", "duan_check", "entanglement_k", "fit_model",
    "gauged_moments", "model_covariance", "moment_variance",
    "separability_oracle",
    "BasisMatrix", "CouplingRing", "build_m", "ferromagnetic_ring",
    "gauge_signs", "invert_m", "path_product", "random_ring",
    "ring_from_signs", "seam_gauge",
    "VACUUM_VARIANCE", "HomodyneOutcome", "QuadState",
    "MeasurementStream", "derive_seed", "splitmix64",
    "DIVERGENCE_GUARD", "Trajectory",
]

__version__ = "0.1.0"
