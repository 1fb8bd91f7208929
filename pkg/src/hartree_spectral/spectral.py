"""Closed-form constants of the critical Hartree problem and the spectral
symbol of its linearization on spherical harmonics.

Every Gamma ratio goes through the log domain; ``Lambda_k`` for k in the
thousands and N = 10 involves Gamma values far outside binary64 range.
"""

from dataclasses import dataclass
import math

from .errors import DomainError
from .special import gamma_ratio, log_gamma, log_gamma_shift_ratio

_LOG2 = math.log(2.0)
_LOGPI = math.log(math.pi)


@dataclass(frozen=True)
class Params:
    """Problem instance: dimension ``N``, Riesz exponent ``lam``, power ``p``.

    Build with :func:`make_params`, which validates and derives ``p``.
    """

    N: int
    lam: float
    p: float

    def as_dict(self):
        return {"N": self.N, "lambda": self.lam, "p": self.p}


@dataclass(frozen=True)
class SpectralLine:
    """Per-degree record of the diagonalized linearized operator."""

    k: int
    mu_lambda: float
    mu_newton: float
    symbol: float
    dim: int

    def as_dict(self):
        return {
            "k": self.k,
            "mu_lambda": self.mu_lambda,
            "mu_newton": self.mu_newton,
            "symbol": self.symbol,
            "dim": self.dim,
        }


def _check_dimension(N):
    if isinstance(N, bool) or int(N) != N or N < 3:
        raise DomainError(f"dimension N must be an integer >= 3, got {N!r}")
    return int(N)


def make_params(N, lam) -> Params:
    """Validate ``(N, lam)`` and derive ``p = (2N - lam) / (N - 2)``.

    Raises
    ------
    DomainError
        If ``N < 3`` or ``lam`` is not strictly inside ``(0, N)``.
    """
    N = _check_dimension(N)
    lam = float(lam)
    if not (0.0 < lam < N):
        raise DomainError(f"lambda must lie in the open interval (0, {N}), got {lam!r}")
    return Params(N=N, lam=lam, p=(2.0 * N - lam) / (N - 2.0))


def alpha_const(params: Params) -> float:
    """Normalizing constant alpha(N, lam) that makes the bubble an exact solution."""
    N, lam = params.N, params.lam
    return N * (N - 2.0) * math.exp(
        log_gamma(N - 0.5 * lam) - log_gamma(0.5 * (N - lam)) - 0.5 * N * _LOGPI
    )


def log_sobolev_constant(N: int) -> float:
    """log of the sharp Sobolev constant S with ||u||_{2N/(N-2)}^2 <= S ||grad u||_2^2."""
    return (
        -math.log(math.pi * N * (N - 2.0))
        + (2.0 / N) * (log_gamma(float(N)) - log_gamma(0.5 * N))
    )


def log_hls_constant(N: int, lam: float) -> float:
    """log of the sharp diagonal HLS constant for exponent ``lam``.

    ``int int f(x) f(y) |x-y|^{-lam} <= C ||f||_q^2`` with ``q = 2N/(2N-lam)``.
    """
    return (
        0.5 * lam * _LOGPI
        + log_gamma(0.5 * (N - lam))
        - log_gamma(N - 0.5 * lam)
        + (lam / N - 1.0) * (log_gamma(0.5 * N) - log_gamma(float(N)))
    )


def hls_sharp_constant(params: Params) -> float:
    """Sharp constant C(N, lam) in (iint |f|^p |g|^p / |x-y|^lam)^{1/p} <= C ||grad f|| ||grad g||.

    Obtained by chaining the sharp HLS inequality (applied to |f|^p, whose
    L^{2N/(2N-lam)} norm is ||f||_{2N/(N-2)}^p) with the sharp Sobolev
    inequality; both are attained by the bubble, so the chain is sharp.
    """
    N, lam, p = params.N, params.lam, params.p
    return math.exp(log_hls_constant(N, lam) / p + log_sobolev_constant(N))


def green_const(N: int) -> float:
    """G(N) = Gamma(N/2) / (2 (N-2) pi^{N/2}), so that G |x|^{2-N} is the Green function of -Laplacian."""
    N = _check_dimension(N)
    return math.exp(log_gamma(0.5 * N) - 0.5 * N * _LOGPI) / (2.0 * (N - 2.0))


def _check_exponent(N, exponent):
    exponent = float(exponent)
    if not (0.0 < exponent < N):
        raise DomainError(f"kernel exponent must lie in (0, {N}), got {exponent!r}")
    return exponent


def _check_degree(k):
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError(f"degree must be a non-negative integer, got {k!r}")
    return int(k)


def log_mu_closed(N: int, exponent: float, k: int) -> float:
    """log of the Funk-Hecke eigenvalue of |xi - eta|^{-exponent} on S^N at degree k."""
    s = _check_exponent(N, exponent)
    k = _check_degree(k)
    return (
        (N - s) * _LOG2
        + 0.5 * N * _LOGPI
        + log_gamma_shift_ratio(k, 0.5 * s, N - 0.5 * s)
        + log_gamma(0.5 * (N - s))
        - log_gamma(0.5 * s)
    )


def mu_closed(params: Params, exponent: float, k: int) -> float:
    """Funk-Hecke eigenvalue mu_k(exponent) of the kernel |xi - eta|^{-exponent} on S^N.

    Parameters
    ----------
    params : Params
        Only ``params.N`` is used.
    exponent : float
        Kernel exponent in (0, N); the package uses ``lam`` and ``N - 2``.
    k : int
        Harmonic degree.
    """
    return math.exp(log_mu_closed(params.N, exponent, k))


def mu_ratio(params: Params, exponent: float, k: int) -> float:
    """mu_{k+1} / mu_k = (k + s/2) / (k + N - s/2), which is < 1 for s < N."""
    s = _check_exponent(params.N, exponent)
    k = _check_degree(k)
    return (k + 0.5 * s) / (k + params.N - 0.5 * s)


def log_lambda_prefactor(params: Params) -> float:
    """log of G(N) alpha(N, lam) 2^{-(p-1)(N-2)}."""
    N, lam = params.N, params.lam
    # G * alpha = N Gamma(N/2) Gamma(N - lam/2) / (2 pi^N Gamma((N - lam)/2))
    return (
        math.log(0.5 * N)
        + log_gamma(0.5 * N)
        + log_gamma(N - 0.5 * lam)
        - log_gamma(0.5 * (N - lam))
        - N * _LOGPI
        + (lam - N - 2.0) * _LOG2
    )


def lambda_symbol(params: Params, k: int) -> float:
    """Spectral symbol Lambda_k of the sphere-side linearized operator.

    ``Lambda_k = G alpha 2^{lam-N-2} mu_k(N-2) [p mu_k(lam) + (p-1) mu_0(lam)]``.
    The kernel of the linearization is the set of degrees with
    ``Lambda_k = 1``.
    """
    N, lam, p = params.N, params.lam, params.p
    k = _check_degree(k)
    log_pre = log_lambda_prefactor(params) + log_mu_closed(N, N - 2.0, k)
    log_mu0 = log_mu_closed(N, lam, 0)
    # bracket = mu_0(lam) [p r_k + (p - 1)] with r_k = mu_k(lam)/mu_0(lam)
    r_k = math.exp(log_mu_closed(N, lam, k) - log_mu0)
    return math.exp(log_pre + log_mu0) * (p * r_k + (p - 1.0))


def harmonic_dim(N: int, k: int) -> int:
    """Dimension of the degree-k spherical harmonics on S^N."""
    N = _check_dimension(N)
    k = _check_degree(k)
    if k == 0:
        return 1
    if k == 1:
        return N + 1
    return math.comb(k + N, k) - math.comb(k - 2 + N, k - 2)


def spectral_line(params: Params, k: int) -> SpectralLine:
    return SpectralLine(
        k=int(k),
        mu_lambda=mu_closed(params, params.lam, k),
        mu_newton=mu_closed(params, params.N - 2.0, k),
        symbol=lambda_symbol(params, k),
        dim=harmonic_dim(params.N, k),
    )


def lambda_grid(N: int, count: int = 50):
    """``count`` equally spaced interior points of (0, N)."""
    return [N * (i + 1) / (count + 1.0) for i in range(count)]


def bubble_convolution_constant(N: int, lam: float) -> float:
    """c with (|.|^{-lam} * u^p)(x) = c (1 + |x|^2)^{-lam/2} for the bubble u."""
    return math.exp(0.5 * N * _LOGPI) * gamma_ratio(0.5 * (N - lam), N - 0.5 * lam)
