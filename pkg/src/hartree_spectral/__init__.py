"""Numerical nondegeneracy certificates for the bubble of the energy-critical
Hartree equation -Delta u = alpha(N, lam) (|x|^{-lam} * u^p) u^{p-1}.
"""

__version__ = "0.1.0"

from .errors import DomainError, NumericError, UsageError
from .spectral import (
    Params,
    SpectralLine,
    alpha_const,
    green_const,
    harmonic_dim,
    hls_sharp_constant,
    lambda_symbol,
    make_params,
    mu_closed,
    mu_ratio,
)
from .certifier import Certificate, certify, cross_validate, grid_certify

__all__ = [
    "DomainError",
    "NumericError",
    "UsageError",
    "Params",
    "SpectralLine",
    "alpha_const",
    "green_const",
    "harmonic_dim",
    "hls_sharp_constant",
    "lambda_symbol",
    "make_params",
    "mu_closed",
    "mu_ratio",
    "Certificate",
    "certify",
    "cross_validate",
    "grid_certify",
]
