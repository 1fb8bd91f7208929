"""Quadrature oracle for Funk-Hecke eigenvalues of |xi - eta|^{-s} on S^N.

The eigenvalue on degree-k harmonics reduces to a 1-D integral

    mu_k = |S^{N-1}| 2^{-s/2} int_{-1}^{1} (1-t)^{(N-2-s)/2} (1+t)^{(N-2)/2} Ct_k(t) dt

with ``Ct_k`` the Gegenbauer polynomial of index (N-1)/2 normalized to
``Ct_k(1) = 1``.  Both endpoint factors go into a Gauss-Jacobi weight, so the
remaining integrand is a polynomial and the rule is exact.

Two evaluations of that integral are offered:

``"direct"``
    Apply the rule to ``Ct_k`` itself.  The integrand oscillates and the
    result is tiny compared with the individual terms once k is large, so
    the relative accuracy decays roughly like ``mu_0 / mu_k`` times machine
    epsilon.
``"by_parts"`` (default)
    Move the k derivatives of the Rodrigues formula onto the kernel first.
    This gives

        mu_k = |S^{N-1}| 2^{-s/2} (s/2)_k / (2^k (N/2)_k)
               int (1-t)^{(N-2-s)/2} (1+t)^{(N-2)/2} (1+t)^k dt,

    whose integrand is positive, so there is no cancellation.  The same
    Jacobi weight and node budget apply.
"""

from dataclasses import dataclass
import math

from .errors import DomainError, UsageError
from .quadrature import gauss_jacobi_rule
from .special import gegenbauer_normalized, log_pochhammer, sphere_area
from .spectral import Params

METHODS = ("by_parts", "direct")


@dataclass(frozen=True)
class ZonalKernelSpec:
    """The zonal kernel ``|xi - eta|^{-exponent}`` on the sphere S^N."""

    N: int
    exponent: float

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 3:
            raise DomainError(f"N must be an integer >= 3, got {self.N!r}")
        if not (0.0 < self.exponent < self.N):
            raise DomainError(f"exponent must lie in (0, {self.N}), got {self.exponent!r}")

    @property
    def jacobi_exponents(self):
        """(a, b) of the weight (1-t)^a (1+t)^b that absorbs the kernel."""
        return 0.5 * (self.N - 2.0 - self.exponent), 0.5 * (self.N - 2.0)


def min_nodes(k: int) -> int:
    """Fewest Gauss nodes that integrate a degree-k polynomial exactly."""
    return (k + 2) // 2


def default_nodes(k: int) -> int:
    return k // 2 + 4


def mu_quadrature(spec: ZonalKernelSpec, k: int, n_nodes: int | None = None, method: str = "by_parts") -> float:
    """Funk-Hecke eigenvalue of ``spec`` at degree ``k`` by Gauss-Jacobi quadrature.

    Parameters
    ----------
    spec : ZonalKernelSpec
    k : int
        Harmonic degree.
    n_nodes : int, optional
        Rule size; defaults to ``k // 2 + 4``.
    method : {"by_parts", "direct"}

    Raises
    ------
    UsageError
        If ``n_nodes`` is too small to be exact for degree ``k`` or the
        method is unknown.
    """
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise DomainError(f"degree must be a non-negative integer, got {k!r}")
    k = int(k)
    if n_nodes is None:
        n_nodes = default_nodes(k)
    if n_nodes < min_nodes(k):
        raise UsageError(
            f"{n_nodes} nodes cannot integrate degree {k} exactly; need at least {min_nodes(k)}"
        )
    if method not in METHODS:
        raise UsageError(f"unknown method {method!r}; choose from {METHODS}")

    N, s = spec.N, float(spec.exponent)
    a, b = spec.jacobi_exponents
    rule = gauss_jacobi_rule(n_nodes, a, b)
    log_front = math.log(sphere_area(N - 1)) - 0.5 * s * math.log(2.0)

    if method == "direct":
        vals = gegenbauer_normalized(k, 0.5 * (N - 1.0), rule.nodes)
        return math.exp(log_front) * math.fsum(rule.weights * vals)

    # 1 + t from the rule's nodes; left-half nodes are accurate in d = 1 + t
    one_plus_t = 1.0 + rule.nodes
    moment = math.fsum(rule.weights * one_plus_t**k)
    log_front += log_pochhammer(0.5 * s, k) - log_pochhammer(0.5 * N, k) - k * math.log(2.0)
    return math.exp(log_front) * moment


def double_eigenvalue_first(params: Params, k: int, n_nodes: int | None = None) -> float:
    """Eigenvalue mu_k(N-2) mu_k(lam) of the iterated kernel |.|^{-(N-2)} o |.|^{-lam}.

    Computed as two independent single-layer quadratures, mirroring the
    Fubini argument rather than integrating over S^N x S^N.
    """
    outer = mu_quadrature(ZonalKernelSpec(params.N, params.N - 2.0), k, n_nodes)
    inner = mu_quadrature(ZonalKernelSpec(params.N, params.lam), k, n_nodes)
    return outer * inner


def double_eigenvalue_second(params: Params, k: int, n_nodes: int | None = None) -> float:
    """Eigenvalue mu_k(N-2) mu_0(lam): the inner lam-kernel only ever sees constants."""
    outer = mu_quadrature(ZonalKernelSpec(params.N, params.N - 2.0), k, n_nodes)
    inner = mu_quadrature(ZonalKernelSpec(params.N, params.lam), 0, n_nodes)
    return outer * inner


def t_symbol_oracle(params: Params, k: int, n_nodes: int | None = None) -> float:
    """Quadrature value of 2^{-(p-1)(N-2)} [p mu_k mu_k + (p-1) mu_k mu_0].

    Multiplying by ``G(N) alpha(N, lam)`` gives an independent estimate of
    the spectral symbol Lambda_k.
    """
    p = params.p
    scale = 2.0 ** (-(p - 1.0) * (params.N - 2.0))
    first = double_eigenvalue_first(params, k, n_nodes)
    second = double_eigenvalue_second(params, k, n_nodes)
    return scale * (p * first + (p - 1.0) * second)


def reflected_rule_integral(spec: ZonalKernelSpec, k: int, n_nodes: int | None = None) -> float:
    """The direct integral evaluated with the mirrored rule.

    Uses the rule for the swapped weight (1-t)^b (1+t)^a at reflected nodes
    -t, where ``Ct_k(-t) = (-1)^k Ct_k(t)``.  Agreement with the ``direct``
    method is a consistency check on the Jacobi rule.
    """
    k = int(k)
    n_nodes = default_nodes(k) if n_nodes is None else n_nodes
    a, b = spec.jacobi_exponents
    rule = gauss_jacobi_rule(n_nodes, b, a)
    vals = gegenbauer_normalized(k, 0.5 * (spec.N - 1.0), -rule.nodes)
    log_front = math.log(sphere_area(spec.N - 1)) - 0.5 * spec.exponent * math.log(2.0)
    return math.exp(log_front) * math.fsum(rule.weights * vals)
