"""Quadrature rules: Gauss-Jacobi and double-exponential (tanh-sinh, exp-sinh).

Gauss-Jacobi nodes come from the symmetric tridiagonal Jacobi matrix
(Golub-Welsch) and are then polished with Newton steps on the Jacobi
polynomial itself; weights use the closed derivative formula, which is more
accurate than squaring eigenvector components.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NumericError, UsageError
from .special import log_gamma, log_gamma_shift_ratio


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and positive weights for a 1-D weighted integral.

    ``weight_spec`` is either ``{"exponent_a": a, "exponent_b": b}`` for the
    Jacobi weight ``(1-t)^a (1+t)^b`` on [-1, 1], or
    ``{"scheme": "double-exponential", "interval": (lo, hi)}``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    weight_spec: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1 or nodes.size == 0:
            raise UsageError("nodes and weights must be non-empty 1-D arrays of equal length")
        if not np.all(weights > 0):
            raise NumericError("quadrature weights must be strictly positive")
        if nodes.size > 1 and not np.all(np.diff(nodes) > 0):
            raise NumericError("quadrature nodes must be strictly increasing")
        lo, hi = self.interval
        if not (nodes[0] > lo and nodes[-1] < hi):
            raise NumericError("quadrature nodes must lie inside the open interval")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def interval(self):
        if "interval" in self.weight_spec:
            return tuple(self.weight_spec["interval"])
        return (-1.0, 1.0)

    def __len__(self):
        return self.nodes.size

    def integrate(self, f):
        """Apply the rule to ``f``, which must accept an array of nodes."""
        return float(np.dot(self.weights, f(self.nodes)))


def _jacobi_q(n, a, b, e, f, d):
    """Endpoint-normalized Jacobi values q_m = P_m(x) / P_m(x_end) for m = n, n - 1.

    ``x_end`` is the endpoint whose weight exponent is ``e`` (``f`` is the
    other one) and ``d = |x - x_end|``.  Writing the three-term recurrence
    for the increments ``q_m - q_{m-1}`` leaves only positive coefficients,
    so nothing cancels near the endpoint even when ``e`` is close to -1 and
    P_m(x_end) is tiny.
    """
    ab = a + b
    delta = -(ab + 2.0) * d / (2.0 * (e + 1.0))
    q_prev, q = np.ones_like(d), 1.0 + delta
    for m in range(2, n + 1):
        c = 2.0 * m + ab
        cm1 = (2.0 * m - 1.0) + ab
        cm2 = (2.0 * m - 2.0) + ab
        coef_b = ((m - 1.0) + f) * c * (m - 1.0) / ((m + ab) * cm2 * (m + e))
        coef_c = -cm1 * c / (2.0 * (m + ab) * (m + e))
        delta = coef_b * delta + coef_c * d * q
        q_prev, q = q, q + delta
    return q, q_prev


def _jacobi_q_derivative(n, a, b, s0, s1, e, d, q, q_prev):
    """P_n'(x) / P_{n-1}(x_end) from the normalized pair, plus the ratio P_n(x_end) / P_{n-1}(x_end)."""
    c = 2.0 * n + a + b
    one_minus_x2 = d * (2.0 - d)
    # a - b - c x, written from the nearest endpoint
    lead = np.where(s0 > 0, -2.0 * (n + b), 2.0 * (n + a)) - c * s1 * d
    rho = s0 * (n + e) / n
    return (n * lead * rho * q + 2.0 * (n + a) * (n + b) * q_prev) / (c * one_minus_x2), rho


@lru_cache(maxsize=512)
def _gauss_jacobi_cached(n, a, b):
    k = np.arange(n, dtype=float)
    ab = a + b
    denom = (2.0 * k + ab) * (2.0 * k + ab + 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = np.where(denom == 0.0, 0.0, (b * b - a * a) / denom)
    diag[0] = (b - a) / (ab + 2.0)
    log_mass = (ab + 1.0) * math.log(2.0) + log_gamma(a + 1.0) + log_gamma(b + 1.0) - log_gamma(ab + 2.0)
    if n == 1:
        return diag.copy(), np.array([math.exp(log_mass)])

    j = np.arange(1, n, dtype=float)
    s = 2.0 * j + ab
    with np.errstate(divide="ignore", invalid="ignore"):
        off2 = 4.0 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s * s - 1.0))
    # j = 1 in closed form: the general expression is 0/0 when a + b = -1.
    off2[0] = 4.0 * (a + 1.0) * (b + 1.0) / ((ab + 2.0) ** 2 * (ab + 3.0))
    off = np.sqrt(off2)
    x = np.sort(eigh_tridiagonal(diag, off, eigvals_only=True))

    left = x < 0.0
    s0 = np.where(left, -1.0, 1.0)
    s1 = -s0
    d = np.where(left, 1.0 + x, 1.0 - x)
    e = np.where(left, b, a)
    f = np.where(left, a, b)
    for _ in range(4):
        q, q_prev = _jacobi_q(n, a, b, e, f, d)
        dq, rho = _jacobi_q_derivative(n, a, b, s0, s1, e, d, q, q_prev)
        step = s1 * rho * q / dq
        d = d - step
        if np.max(np.abs(step) / d) < 1e-17:
            break
    q, q_prev = _jacobi_q(n, a, b, e, f, d)
    dq, _ = _jacobi_q_derivative(n, a, b, s0, s1, e, d, q, q_prev)
    # Gamma(n+a+1) Gamma(n+b+1) / (Gamma(n+a+b+1) n!) as two shifted ratios,
    # which keeps full accuracy when the individual log-gammas are large
    log_g = (
        (ab + 1.0) * math.log(2.0)
        + log_gamma_shift_ratio(n - 1, a + 2.0, ab + 2.0)
        + log_gamma_shift_ratio(n - 1, b + 2.0, 2.0)
    )
    # |P_{n-1}(x_end)| = Gamma(n+e) / (Gamma(e+1) (n-1)!) at either end
    log_end_a = log_gamma_shift_ratio(n - 1, a + 1.0, 1.0) - log_gamma(a + 1.0)
    log_end_b = log_gamma_shift_ratio(n - 1, b + 1.0, 1.0) - log_gamma(b + 1.0)
    log_scale = log_g - 2.0 * np.where(left, log_end_b, log_end_a)
    w = np.exp(log_scale) / (d * (2.0 - d) * dq * dq)
    x = s0 + s1 * d
    order = np.argsort(x)
    return x[order], w[order]


def gauss_jacobi_rule(n: int, a: float, b: float) -> QuadratureRule:
    """n-point Gauss rule for the weight (1-t)^a (1+t)^b on [-1, 1].

    Exact for polynomials of degree <= 2n - 1.
    """
    if int(n) != n or n < 1:
        raise UsageError(f"number of nodes must be a positive integer, got {n!r}")
    if not (a > -1.0 and b > -1.0):
        raise DomainError(f"Jacobi exponents must exceed -1, got a={a!r}, b={b!r}")
    x, w = _gauss_jacobi_cached(int(n), float(a), float(b))
    return QuadratureRule(x, w, {"exponent_a": float(a), "exponent_b": float(b)})


# ---------------------------------------------------------------------------
# Double-exponential rules.
#
# The helpers below return (left, right, weight) triples: for a finite
# interval [0, L], ``left`` is the node and ``right = L - left`` computed
# without cancellation, so integrands with endpoint singularities can be
# evaluated accurately at nodes that sit within a few ulps of an endpoint.
# ---------------------------------------------------------------------------

_HALF_PI = 0.5 * math.pi


def _level_offsets(level, t_lo, t_hi, h0):
    """Abscissae k*h (h = h0 / 2**level) in [t_lo, t_hi] that are new at ``level``."""
    h = h0 / 2**level
    k_lo = math.ceil(t_lo / h)
    k_hi = math.floor(t_hi / h)
    k = np.arange(k_lo, k_hi + 1)
    if level > 0:
        k = k[k % 2 == 1]
    return k * h, h


def tanh_sinh_points(length, t, h):
    """Map abscissae ``t`` to nodes on [0, length] by x = length / (1 + exp(-pi sinh t))."""
    e = math.pi * np.sinh(t)
    left = length / (1.0 + np.exp(-e))
    right = length / (1.0 + np.exp(e))
    weight = h * length * math.pi * np.cosh(t) / ((1.0 + np.exp(-e)) * (1.0 + np.exp(e)))
    return left, right, weight


def exp_sinh_points(t, h):
    """Map abscissae ``t`` to nodes on (0, inf) by v = exp(pi/2 sinh t)."""
    v = np.exp(_HALF_PI * np.sinh(t))
    weight = h * _HALF_PI * np.cosh(t) * v
    return v, weight


def exp_sinh_window(v_min, v_max):
    """Abscissa range [t_lo, t_hi] whose exp-sinh nodes span [v_min, v_max]."""
    return (
        math.asinh(math.log(v_min) / _HALF_PI),
        math.asinh(math.log(v_max) / _HALF_PI),
    )


def tanh_sinh_window(tiny):
    """Abscissa bound T such that nodes come within ``tiny * length`` of the ends."""
    return math.asinh(math.log(1.0 / tiny) / math.pi)


def tanh_sinh_rule(level: int = 4, interval=(0.0, 1.0), tiny: float = 1e-15) -> QuadratureRule:
    """Tanh-sinh rule on a finite interval as a plain :class:`QuadratureRule`.

    Step is ``2**-level``; nodes closer than ``tiny`` (relative) to an
    endpoint are dropped so every node is strictly interior.
    """
    lo, hi = map(float, interval)
    if not hi > lo:
        raise UsageError("interval must have positive length")
    t_max = tanh_sinh_window(tiny)
    h = 2.0**-level
    k = np.arange(-math.floor(t_max / h), math.floor(t_max / h) + 1)
    left, right, w = tanh_sinh_points(hi - lo, k * h, h)
    x = lo + left
    keep = (x > lo) & (x < hi) & (w > 0)
    x, w = x[keep], w[keep]
    x, idx = np.unique(x, return_index=True)
    return QuadratureRule(x, w[idx], {"scheme": "double-exponential", "interval": (lo, hi)})


def exp_sinh_rule(level: int = 4, v_min: float = 1e-15, v_max: float = 1e15) -> QuadratureRule:
    """Exp-sinh rule on (0, inf) covering nodes in [v_min, v_max]."""
    t_lo, t_hi = exp_sinh_window(v_min, v_max)
    h = 2.0**-level
    k = np.arange(math.ceil(t_lo / h), math.floor(t_hi / h) + 1)
    v, w = exp_sinh_points(k * h, h)
    return QuadratureRule(v, w, {"scheme": "double-exponential", "interval": (0.0, math.inf)})


def de_integrate(evaluate, *, tol=1e-12, level0=3, max_level=8, abs_floor=0.0, label="integral"):
    """Refine a nested double-exponential sum until two levels agree.

    Parameters
    ----------
    evaluate : callable
        ``evaluate(level, first)`` returns the step-weighted sum over the
        abscissae of ``level``.  With ``first=True`` that is every abscissa
        of the level; otherwise only the odd multiples of the step, which
        are the ones not already present at ``level - 1``.
    tol : float
        Relative agreement required between consecutive levels.
    abs_floor : float
        Absolute agreement that is also accepted (for values near zero).

    Returns
    -------
    value, error_estimate, level

    Raises
    ------
    NumericError
        If ``max_level`` is reached without agreement.
    """
    total = evaluate(level0, first=True)
    prev = total
    history = [total]
    for level in range(level0 + 1, max_level + 1):
        total = 0.5 * prev + evaluate(level, first=False)
        err = abs(total - prev)
        history.append(total)
        if err <= max(tol * abs(total), abs_floor):
            return total, err, level
        prev = total
    raise NumericError(
        f"{label}: double-exponential refinement did not converge",
        {"levels": list(range(level0, max_level + 1)), "estimates": history, "error": err},
    )
