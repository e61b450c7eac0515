"""Exact and Monte Carlo moments of the sectional curvature of algebraic curvature tensors."""
from .curvature import (
    CurvatureTensor,
    InvalidTensorError,
    JacobiSpectrumModel,
    TwoPlaneSpan,
    direct_sum,
    make_constant_curvature,
    make_cpn,
    make_hpn,
    make_op2_spectrum,
    make_zero,
    random_tensor,
    ric0_norm_sq,
    ricci,
    scalar_curvature,
    sectional_curvature,
    validate,
)
from .moments import MomentSequence, psi, psi_from_spectrum, psi_sequence, spectrum_moments
from .poly import Polynomial

__version__ = "0.1.0"

__all__ = [
    "CurvatureTensor",
    "InvalidTensorError",
    "JacobiSpectrumModel",
    "MomentSequence",
    "Polynomial",
    "TwoPlaneSpan",
    "direct_sum",
    "make_constant_curvature",
    "make_cpn",
    "make_hpn",
    "make_op2_spectrum",
    "make_zero",
    "psi",
    "psi_from_spectrum",
    "psi_sequence",
    "random_tensor",
    "ric0_norm_sq",
    "ricci",
    "scalar_curvature",
    "sectional_curvature",
    "spectrum_moments",
    "validate",
]
