"""Special functions: log-gamma, gamma ratios, normalized Gegenbauer
polynomials and sphere areas.

Everything is plain binary64.  Gamma ratios are always formed in the log
domain, so arguments in the thousands are fine.
"""

import math

import numpy as np

from .errors import DomainError

# Lanczos approximation, g = 671/128 with 14 terms (Numerical Recipes 3rd ed.).
_LANCZOS_G = 671.0 / 128.0
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COEF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005

# Stirling branch: B_{2n} / (2n (2n - 1)) for n = 1..8, enough for x >= 10
_STIRLING_MIN = 10.0
_STIRLING_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
# ln 2 with a 32-bit head so e * _LN2_HI is exact, and ln(2 pi)/2 as hi + lo
_LN2_HI = 6.93147180369123816490e-01
_LN2_LO = 1.90821492927058770002e-10
_HALF_LN_2PI_HI = 0.9189385332046728
_HALF_LN_2PI_LO = -3.8782941580672414e-17
_SPLITTER = 134217729.0  # 2**27 + 1


def _lanczos_lgamma(x):
    tmp = x + _LANCZOS_G
    tmp = (x + 0.5) * math.log(tmp) - tmp
    ser = _LANCZOS_C0
    y = x
    for c in _LANCZOS_COEF:
        y += 1.0
        ser += c / y
    return tmp + math.log(_SQRT_2PI * ser / x)


def _two_prod(a, b):
    """Dekker's error-free product: a * b == p + q exactly."""
    p = a * b
    t = _SPLITTER * a
    a_hi = t - (t - a)
    a_lo = a - a_hi
    t = _SPLITTER * b
    b_hi = t - (t - b)
    b_lo = b - b_hi
    q = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, q


def _log_split(x):
    """ln x as hi + lo, with hi = e ln 2 exact and lo = ln m, m in [1/sqrt 2, sqrt 2)."""
    m, e = math.frexp(x)
    if m < 0.7071067811865476:
        m *= 2.0
        e -= 1
    return e * _LN2_HI, e * _LN2_LO + math.log1p(m - 1.0)


def _stirling_tail(x):
    z = 1.0 / (x * x)
    acc = 0.0
    for c in reversed(_STIRLING_COEF):
        acc = acc * z + c
    return acc / x


def _stirling_lgamma(x):
    # (x - 1/2) ln x - x + ln(2 pi)/2 + tail, summed without losing the
    # low bits of the large leading product
    y = x - 0.5
    hi, lo = _log_split(x)
    p1, q1 = _two_prod(y, hi)
    p2, q2 = _two_prod(y, lo)
    return math.fsum((p1, q1, p2, q2, -x, _HALF_LN_2PI_HI, _HALF_LN_2PI_LO, _stirling_tail(x)))


def log_gamma(x: float) -> float:
    """Natural logarithm of the gamma function for ``x > 0``.

    Uses the Lanczos series on ``[0.5, 10)``, the reflection formula below
    that, and a compensated Stirling series from 10 up, where the leading
    term is large enough that plain rounding would cost several ulps.  The
    exact zeros at 1 and 2 are returned exactly.
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"log_gamma requires a finite x > 0, got {x!r}")
    if x == 1.0 or x == 2.0:
        return 0.0
    if x < 0.5:
        # Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.log(math.pi / math.sin(math.pi * x)) - _lanczos_lgamma(1.0 - x)
    if x >= _STIRLING_MIN:
        return _stirling_lgamma(x)
    return _lanczos_lgamma(x)


def log_gamma_shift_ratio(k: int, a0: float, b0: float) -> float:
    """log(Gamma(k + a0) / Gamma(k + b0)) for an integer shift ``k >= 0``.

    For large k the two log-gammas are huge and nearly equal, so their
    difference is formed directly from the Stirling series with the exact
    offset ``a0 - b0``; the error then scales with the result rather than
    with log Gamma(k).
    """
    if not (a0 > 0 and b0 > 0):
        raise DomainError(f"offsets must be positive, got ({a0!r}, {b0!r})")
    a, b = k + a0, k + b0
    if min(a, b) < _STIRLING_MIN:
        return log_gamma(a) - log_gamma(b)
    d = a0 - b0
    # (a - 1/2) ln a - (b - 1/2) ln b - d  =  (b - 1/2) log1p(d / b) + d ln a - d
    return math.fsum(
        ((b - 0.5) * math.log1p(d / b), d * math.log(a), -d, _stirling_tail(a), -_stirling_tail(b))
    )


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b) for positive ``a`` and ``b`` without forming either."""
    if not (a > 0 and b > 0):
        raise DomainError(f"gamma_ratio requires a, b > 0, got ({a!r}, {b!r})")
    return math.exp(log_gamma(a) - log_gamma(b))


def log_beta(a: float, b: float) -> float:
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def gegenbauer_normalized(k: int, index: float, t):
    """Gegenbauer polynomial of degree ``k`` divided by its value at ``t = 1``.

    Parameters
    ----------
    k : int
        Degree, ``k >= 0``.
    index : float
        Gegenbauer parameter, ``index > 0``.  For the zonal harmonics of
        the sphere S^N this is ``(N - 1) / 2``.
    t : float or array_like
        Evaluation points in ``[-1, 1]``.

    Returns
    -------
    float or ndarray
        ``C_k(t) / C_k(1)``; the value at ``t = 1`` is exactly 1.

    Notes
    -----
    The recurrence is run directly on the normalized values,
    ``R_{j+1} = (2 (j + index) t R_j - j R_{j-1}) / (j + 2 index)``,
    which never overflows however large ``k`` gets.
    """
    if k < 0 or int(k) != k:
        raise DomainError(f"degree must be a non-negative integer, got {k!r}")
    if not index > 0:
        raise DomainError(f"Gegenbauer index must be positive, got {index!r}")
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise DomainError("Gegenbauer argument must lie in [-1, 1]")
    prev = np.ones_like(t)
    if k == 0:
        return float(prev) if scalar else prev
    cur = t.copy()
    for j in range(1, int(k)):
        prev, cur = cur, (2.0 * (j + index) * t * cur - j * prev) / (j + 2.0 * index)
    # the recurrence reproduces 1 at t = 1 only up to rounding; pin it
    cur = np.where(t == 1.0, 1.0, cur)
    return float(cur) if scalar else cur


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^n in R^{n+1}."""
    if n < 1 or int(n) != n:
        raise DomainError(f"sphere dimension must be an integer >= 1, got {n!r}")
    h = 0.5 * (n + 1)
    return 2.0 * math.exp(h * math.log(math.pi) - log_gamma(h))


def log_pochhammer(x: float, k: int) -> float:
    """log of the rising factorial (x)_k for x > 0."""
    return log_gamma(x + k) - log_gamma(x)
