"""Riesz potentials of separable functions c(|x|) Y_l(x/|x|) on R^N.

For a degree-l harmonic Y_l the potential keeps its angular factor:

    int |x - y|^{-e} c(|y|) Y_l(y/|y|) dy = d(|x|) Y_l(x/|x|),
    d(s) = int_0^inf K_l(s, r) c(r) r^{N-1} dr,

with the angular kernel

    K_l(s, r) = |S^{N-2}| int_{-1}^{1} (s^2 + r^2 - 2 s r t)^{-e/2} Ct_l(t) (1-t^2)^{(N-3)/2} dt

and ``Ct_l`` the Gegenbauer polynomial of index (N-2)/2 normalized at t = 1.
Moving the l derivatives of the Rodrigues formula onto the kernel gives the
equivalent, cancellation-free form

    K_l = |S^{N-2}| (e/2)_l (s r)^l / ((N-1)/2)_l
          int (s^2 + r^2 - 2 s r t)^{-e/2-l} (1-t^2)^{(N-3)/2+l} dt,

which is what is evaluated here.  The remaining integral depends on the
radii only through beta = (s-r)^2 / (4 s r):

* beta >= 0.1: the integrand is analytic on [-1, 1] and a 40-point
  Gauss-Jacobi rule is accurate to rounding;
* beta < 0.1: the near-singular factor is straightened out by
  u = beta (e^w - 1) and the w-integral is done by tanh-sinh.

The radial integral is split at r = s (where K_l may be singular) and at
r = 1 (the scale of every profile used in this package) and each piece is
integrated by nested tanh-sinh refinement, in log r away from the origin.
"""

from dataclasses import dataclass, field
import math
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, NumericError, UsageError
from .quadrature import gauss_jacobi_rule, tanh_sinh_points, tanh_sinh_window
from .special import log_beta, log_gamma, log_pochhammer, sphere_area
from .spectral import (
    Params,
    alpha_const,
    bubble_convolution_constant,
    green_const,
    hls_sharp_constant,
)

_BETA_SPLIT = 0.1
_GJ_NODES = 40
_INNER_LEVEL = 5
_INNER_TINY = 1e-20
_MAX_SPAN = 1e30  # largest r / max(s, 1) ever sampled


# ---------------------------------------------------------------------------
# angular kernel
# ---------------------------------------------------------------------------


def _inner_grid():
    h = 2.0**-_INNER_LEVEL
    t_max = tanh_sinh_window(_INNER_TINY)
    k = np.arange(-math.floor(t_max / h), math.floor(t_max / h) + 1)
    return tanh_sinh_points(1.0, k * h, h)


_INNER_LEFT, _INNER_RIGHT, _INNER_W = _inner_grid()


def _log_base_integral(sig, m, s, r, gap):
    """log of int_{-1}^{1} (s^2 + r^2 - 2 s r t)^{-sig} (1-t^2)^m dt.

    ``s > 0`` is a scalar; ``r > 0`` and ``gap = r - s`` (supplied
    separately so that it keeps full precision) are arrays.
    """
    beta = gap * gap / (4.0 * s * r)
    out = np.empty_like(r)

    big = beta >= _BETA_SPLIT
    if np.any(big):
        rule = gauss_jacobi_rule(_GJ_NODES, m, m)
        u = 0.5 * (1.0 + rule.nodes)
        b = beta[big][:, None]
        vals = np.exp(-sig * np.log1p(u[None, :] / b)) @ rule.weights
        out[big] = np.log(vals) - 2.0 * sig * np.log(np.abs(gap[big]))

    diag = gap == 0.0
    if np.any(diag):
        if m - sig <= -1.0:
            raise DomainError("angular kernel diverges on the diagonal s = r for this exponent")
        out[diag] = (
            math.log(2.0) + m * math.log(4.0) - sig * np.log(4.0 * s * r[diag])
            + log_beta(m - sig + 1.0, m + 1.0)
        )

    small = ~big & ~diag
    if np.any(small):
        b = beta[small][:, None]
        w_top = np.log1p(1.0 / b)
        wl = w_top * _INNER_LEFT[None, :]
        wr = w_top * _INNER_RIGHT[None, :]
        # u = b (e^w - 1), beta + u = b e^w, 1 - u = -(1 + b) expm1(w - W)
        with np.errstate(divide="ignore"):
            lg = wl * (1.0 - sig)
            if m != 0.0:
                lg = lg + m * (np.log(np.expm1(wl)) + np.log((1.0 + b) * -np.expm1(-wr)))
        vals = np.sum(np.exp(lg) * _INNER_W[None, :] * w_top, axis=1)
        bb = beta[small]
        out[small] = (
            math.log(2.0) + m * math.log(4.0) + np.log(vals)
            - sig * np.log(4.0 * s * r[small]) + (1.0 + m - sig) * np.log(bb)
        )
    return out


def _check_kernel_args(N, exponent, degree):
    if isinstance(N, bool) or int(N) != N or N < 3:
        raise DomainError(f"N must be an integer >= 3, got {N!r}")
    if not (0.0 < exponent < N):
        raise DomainError(f"exponent must lie in (0, {N}), got {exponent!r}")
    if isinstance(degree, bool) or int(degree) != degree or degree < 0:
        raise DomainError(f"harmonic degree must be a non-negative integer, got {degree!r}")


def _log_kernel_prefactor(N, exponent, degree):
    return (
        math.log(sphere_area(N - 2))
        + log_pochhammer(0.5 * exponent, degree)
        - log_pochhammer(0.5 * (N - 1.0), degree)
    )


def _log_kernel(N, exponent, degree, s, r, gap):
    """log K_l(s, r) for scalar s > 0 and arrays r > 0, gap = r - s."""
    a = 0.5 * (N - 3.0)
    sig = 0.5 * exponent + degree
    m = a + degree
    out = _log_base_integral(sig, m, s, r, gap)
    out += _log_kernel_prefactor(N, exponent, degree)
    if degree:
        out += degree * (math.log(s) + np.log(r))
    return out


def angular_kernel(N: int, exponent: float, degree: int, s: float, r):
    """Radial kernel K_l(s, r) of |x - y|^{-exponent} on degree-l harmonics.

    Parameters
    ----------
    N : int
        Dimension of the ambient space.
    exponent : float
        Riesz exponent in (0, N).
    degree : int
        Harmonic degree l.
    s, r : float or array_like
        Radii, not both zero.  ``r`` may be an array.

    Returns
    -------
    float or ndarray

    Raises
    ------
    DomainError
        For ``s = r = 0``, and on the diagonal ``s = r`` when
        ``exponent >= N - 1`` (the kernel is infinite there).
    """
    _check_kernel_args(N, exponent, degree)
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=float))
    s = float(s)
    if s < 0 or np.any(r < 0) or not math.isfinite(s) or not np.all(np.isfinite(r)):
        raise DomainError("radii must be finite and non-negative")
    if s == 0.0 and np.any(r == 0.0):
        raise DomainError("angular kernel is undefined at s = r = 0")
    if s == 0.0 or np.any(r == 0.0):
        out = np.empty_like(r)
        zero = r == 0.0 if s > 0 else np.ones_like(r, dtype=bool)
        big = np.maximum(s, r[zero])
        out[zero] = sphere_area(N - 1) * big**-exponent if degree == 0 else 0.0
        rest = ~zero
        if np.any(rest):
            out[rest] = np.exp(_log_kernel(N, exponent, degree, s, r[rest], r[rest] - s))
    else:
        out = np.exp(_log_kernel(N, exponent, degree, s, r, r - s))
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# separable profiles
# ---------------------------------------------------------------------------


def japanese(r):
    """<r> = (1 + r^2)^{1/2}."""
    return np.sqrt(1.0 + np.asarray(r, dtype=float) ** 2)


def _log1p_r2(r):
    """log(1 + r^2) without overflow for huge r."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        big = r > 1e8
        return np.where(big, 2.0 * np.log(np.where(big, r, 1.0)), np.log1p(np.where(big, 0.0, r * r)))


@dataclass(frozen=True)
class SeparableProfile:
    """A function c(r) Y_l(omega) on R^N, given by its radial part.

    Parameters
    ----------
    degree : int
        Harmonic degree l of the angular factor.
    radial : callable
        ``r -> c(r)``, vectorized over numpy arrays, finite on [0, inf).
    decay_exponent : float
        Declared theta with ``|c(r)| <~ <r>^{-theta}``.  Only used to pick
        truncation radii; it is spot-checked at r = 100 and r = 1000 on
        construction.
    """

    degree: int
    radial: Callable
    decay_exponent: float
    label: str = ""
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        if isinstance(self.degree, bool) or int(self.degree) != self.degree or self.degree < 0:
            raise UsageError(f"degree must be a non-negative integer, got {self.degree!r}")
        if not math.isfinite(self.decay_exponent) or self.decay_exponent < 0:
            raise UsageError(f"decay exponent must be finite and >= 0, got {self.decay_exponent!r}")
        if self.check:
            probe = np.array([0.0, 1.0, 1e2, 1e3])
            vals = np.asarray(self(probe), dtype=float)
            if not np.all(np.isfinite(vals)):
                raise UsageError(f"profile {self.label!r} is not finite at r in {probe.tolist()}")
            scaled = np.abs(vals[2:]) * japanese(probe[2:]) ** self.decay_exponent
            if scaled[1] > 10.0 * scaled[0] + 1e-300:
                raise UsageError(
                    f"profile {self.label!r} decays slower than the declared <r>^-{self.decay_exponent}"
                )

    def __call__(self, r):
        return self.radial(np.asarray(r, dtype=float))


def power_profile(theta: float, degree: int = 0) -> SeparableProfile:
    """c(r) = <r>^{-theta}."""
    return SeparableProfile(
        degree, lambda r: np.exp(-0.5 * theta * _log1p_r2(r)), float(theta), f"<r>^-{theta}"
    )


def bubble_power_profile(N: int, q: float) -> SeparableProfile:
    """c(r) = u(r)^q = (1 + r^2)^{-q (N-2)/2}, degree 0."""
    k = 0.5 * q * (N - 2.0)
    return SeparableProfile(0, lambda r: np.exp(-k * _log1p_r2(r)), q * (N - 2.0), f"u^{q}")


def generator_profile(N: int, j: int) -> SeparableProfile:
    """Radial part of phi_j: degree 1 for j <= N (times omega_j), degree 0 for j = N+1."""
    if isinstance(j, bool) or int(j) != j or not 1 <= j <= N + 1:
        raise UsageError(f"generator index must be in [1, {N + 1}], got {j!r}")
    half = 0.5 * N
    if j == N + 1:
        return SeparableProfile(
            0,
            lambda r: 0.5 * (N - 2.0) * (1.0 - r * r) * np.exp(-half * _log1p_r2(r)),
            N - 2.0,
            f"phi_{N + 1}",
        )
    return SeparableProfile(
        1, lambda r: (2.0 - N) * r * np.exp(-half * _log1p_r2(r)), N - 2.0, f"phi_{j}"
    )


# ---------------------------------------------------------------------------
# radial quadrature
# ---------------------------------------------------------------------------


@dataclass
class _Piece:
    """One tanh-sinh panel of the radial integral.

    ``kind`` is "lin" (variable r on [lo, hi]) or "log" (variable log r on
    [lo, hi]).  ``anchor`` names the end that sits at r = s, if any, so the
    distance r - s can be formed without cancellation.
    """

    kind: str
    lo: float
    hi: float
    anchor: str | None

    def nodes(self, level, first, t_max, s):
        h = 2.0**-level
        k = np.arange(-math.floor(t_max / h), math.floor(t_max / h) + 1)
        if not first:
            k = k[k % 2 != 0]
        left, right, w = tanh_sinh_points(self.hi - self.lo, k * h, h)
        keep = (left > 0) & (right > 0)
        left, right, w = left[keep], right[keep], w[keep]
        if self.kind == "lin":
            r = self.lo + left
            if self.anchor == "hi":
                gap = -right
                # measure r from whichever end is nearer so r never rounds to 0
                r = np.where(left < right, r, self.hi - right)
            else:
                gap = r - s
        else:
            rho = self.lo + left
            r = np.exp(rho)
            if self.anchor == "lo":
                gap = s * np.expm1(left)
            elif self.anchor == "hi":
                gap = s * np.expm1(-right)
                r = np.exp(np.where(left < right, rho, self.hi - right))
            else:
                gap = r - s
            w = w * r
        return r, gap, w


@dataclass(frozen=True)
class RadialResult:
    value: float
    error: float
    level: int
    evaluations: int
    tail: float


def _pieces(s, top):
    """Panels covering (0, top]: split at s and at 1."""
    if s == 0.0:
        return [_Piece("lin", 0.0, 1.0, None), _Piece("log", 0.0, math.log(top), None)]
    if s == 1.0:
        return [_Piece("lin", 0.0, 1.0, "hi"), _Piece("log", 0.0, math.log(top), "lo")]
    if s < 1.0:
        return [
            _Piece("lin", 0.0, s, "hi"),
            _Piece("log", math.log(s), 0.0, "lo"),
            _Piece("log", 0.0, math.log(top), None),
        ]
    return [
        _Piece("lin", 0.0, 1.0, None),
        _Piece("log", 0.0, math.log(s), "hi"),
        _Piece("log", math.log(s), math.log(top), "lo"),
    ]


def _integrate_radial(integrand, s, kappa, tol, singular_power, max_level=10, level0=3):
    """Integrate ``integrand(r, gap)`` over (0, inf) where it decays like r^{-1-kappa}.

    ``singular_power`` is the exponent q > -1 of the worst endpoint
    behaviour |r - s|^q; it sets how close to the endpoints nodes are placed.
    """
    scale = max(s, 1.0)
    eps_tail = 1e-3 * tol
    span = min(eps_tail ** (-1.0 / kappa), _MAX_SPAN)
    top = scale * span
    delta = min(1.0, singular_power + 1.0)
    tiny = max(1e-280, min(1e-3 * tol, (1e-3 * tol * delta) ** (1.0 / delta)))
    t_max = tanh_sinh_window(tiny)
    pieces = _pieces(s, top)

    # power-law estimate of the part beyond ``top``
    f_top = float(integrand(np.array([top]), np.array([top - s]))[0])
    tail = f_top * top / kappa

    def level_sum(level, first):
        r, gap, w = zip(*(p.nodes(level, first, t_max, s) for p in pieces))
        r, gap, w = np.concatenate(r), np.concatenate(gap), np.concatenate(w)
        f = integrand(r, gap) * w
        return math.fsum(f), math.fsum(np.abs(f)), r.size

    total, abs_total, evals = level_sum(level0, True)
    history = [total]
    err = math.inf
    for level in range(level0 + 1, max_level + 1):
        new, new_abs, n = level_sum(level, False)
        evals += n
        prev = total
        total = 0.5 * prev + new
        abs_total = 0.5 * abs_total + new_abs
        history.append(total)
        err = abs(total - prev)
        if err <= max(tol * abs(total), 1e-14 * abs_total):
            return RadialResult(total + tail, err, level, evals, tail)
    raise NumericError(
        "radial quadrature did not converge",
        {"s": s, "levels": [level0, max_level], "estimates": history, "error": err, "tail": tail},
    )


def _check_exponent(N, exponent):
    if not (0.0 < exponent < N):
        raise DomainError(f"exponent must lie in (0, {N}), got {exponent!r}")


def riesz_separable_full(N: int, exponent: float, profile: SeparableProfile, s: float, tol: float = 1e-10) -> RadialResult:
    """Like :func:`riesz_separable` but returns the quadrature diagnostics too."""
    _check_kernel_args(N, exponent, profile.degree)
    s = float(s)
    if not (s >= 0.0 and math.isfinite(s)):
        raise DomainError(f"radius must be finite and >= 0, got {s!r}")
    kappa = profile.decay_exponent + exponent - N
    if not kappa > 0.0:
        raise UsageError(
            f"Riesz potential needs theta + exponent > N; got theta={profile.decay_exponent}, "
            f"exponent={exponent}, N={N}"
        )
    ell = profile.degree
    if s == 0.0:
        if ell > 0:
            return RadialResult(0.0, 0.0, 0, 0, 0.0)
        area = math.log(sphere_area(N - 1))

        def integrand(r, gap):
            with np.errstate(divide="ignore"):
                return np.exp(area + (N - 1.0 - exponent) * np.log(r)) * profile(r)

        return _integrate_radial(integrand, 0.0, kappa, tol, N - 1.0 - exponent)

    def integrand(r, gap):
        lk = _log_kernel(N, exponent, ell, s, r, gap) + (N - 1.0) * np.log(r)
        return np.exp(lk) * profile(r)

    return _integrate_radial(integrand, s, kappa, tol, min(0.0, N - 1.0 - exponent))


def riesz_separable(N: int, exponent: float, profile: SeparableProfile, s: float, tol: float = 1e-10) -> float:
    """Radial part d(s) of the Riesz potential |x|^{-exponent} * (c(|x|) Y_l).

    Parameters
    ----------
    N : int
    exponent : float
        Riesz exponent in (0, N).
    profile : SeparableProfile
        Needs ``decay_exponent + exponent > N`` for the integral to converge.
    s : float
        Output radius, ``s >= 0``.
    tol : float
        Relative tolerance of the nested tanh-sinh refinement.

    Raises
    ------
    UsageError
        If the integrability condition fails.
    NumericError
        If refinement does not converge; ``.diagnostics`` holds the history.
    """
    return riesz_separable_full(N, exponent, profile, s, tol).value


# ---------------------------------------------------------------------------
# the bubble and the nonlinear term
# ---------------------------------------------------------------------------


def bubble_radial(N, s):
    return np.exp(-0.5 * (N - 2.0) * _log1p_r2(s))


def laplacian_bubble(N: int, s):
    """-Laplacian of the bubble: N (N-2) (1 + s^2)^{-(N+2)/2}."""
    return N * (N - 2.0) * np.exp(-0.5 * (N + 2.0) * _log1p_r2(s))


def laplacian_fd(f, N: int, s: float, h: float = 1e-4) -> float:
    """-Laplacian of a radial function by central differences.

    Uses f'' + (N-1) f'/s, and N f''(0) at the origin.
    """
    if s == 0.0:
        return -N * 2.0 * (f(h) - f(0.0)) / (h * h)
    d2 = (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h)
    d1 = (f(s + h) - f(s - h)) / (2.0 * h)
    return -(d2 + (N - 1.0) * d1 / s)


def bubble_convolution(params: Params, s):
    """Closed form of (|.|^{-lam} * u^p)(s) = c (1 + s^2)^{-lam/2}."""
    c = bubble_convolution_constant(params.N, params.lam)
    return c * np.exp(-0.5 * params.lam * _log1p_r2(s))


def bubble_potential(params: Params, s: float, tol: float = 1e-10) -> float:
    """(|.|^{-lam} * u^p)(s) by quadrature."""
    return riesz_separable(params.N, params.lam, bubble_power_profile(params.N, params.p), s, tol)


def bubble_residual(params: Params, s: float, tol: float = 1e-10) -> float:
    """-Laplacian u - alpha (|.|^{-lam} * u^p) u^{p-1} at radius s, with the potential by quadrature."""
    N, p = params.N, params.p
    conv = bubble_potential(params, s, tol)
    return float(laplacian_bubble(N, s) - alpha_const(params) * conv * bubble_radial(N, s) ** (p - 1.0))


def bubble_residual_relative(params: Params, s: float, tol: float = 1e-10) -> float:
    return abs(bubble_residual(params, s, tol)) / float(laplacian_bubble(params.N, s))


def nonlinear_operator(params: Params, profile: SeparableProfile, s, tol: float = 1e-10):
    """Radial part of N(phi) = p u^{p-1} (|.|^{-lam} * u^{p-1} phi) + (p-1) u^{p-2} phi (|.|^{-lam} * u^p).

    ``phi`` is the separable function described by ``profile`` (degree 0 or
    1, decay in [0, N-2]); the result has the same harmonic degree.  ``s``
    may be an array.
    """
    N, lam, p = params.N, params.lam, params.p
    if profile.degree > 1:
        raise UsageError("nonlinear_operator supports harmonic degree 0 and 1 only")
    if not 0.0 <= profile.decay_exponent <= N - 2.0:
        raise UsageError(f"profile decay must lie in [0, {N - 2}], got {profile.decay_exponent}")
    weighted = SeparableProfile(
        profile.degree,
        lambda r: bubble_radial(N, r) ** (p - 1.0) * profile(r),
        profile.decay_exponent + (p - 1.0) * (N - 2.0),
        f"u^(p-1) {profile.label}",
        check=False,
    )
    background = bubble_power_profile(N, p)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty_like(s_arr)
    for i, si in enumerate(s_arr):
        c = float(profile(np.array([si]))[0])
        u = float(bubble_radial(N, si))
        first = riesz_separable(N, lam, weighted, si, tol)
        second = 0.0 if c == 0.0 else riesz_separable(N, lam, background, si, tol)
        out[i] = p * u ** (p - 1.0) * first + (p - 1.0) * u ** (p - 2.0) * c * second
    return float(out[0]) if np.ndim(s) == 0 else out


def nonlinear_profile(params: Params, profile: SeparableProfile, tol: float = 1e-10) -> SeparableProfile:
    """N(phi) as a :class:`SeparableProfile` (decays four powers faster than phi)."""
    return SeparableProfile(
        profile.degree,
        lambda r: nonlinear_operator(params, profile, r, tol),
        profile.decay_exponent + 4.0,
        f"N({profile.label})",
    )


DEFAULT_FIXED_POINT_RADII = (0.0, 0.3, 0.7, 1.5, 3.0, 10.0)


@dataclass(frozen=True)
class FixedPointReport:
    j: int
    degree: int
    radii: tuple
    lhs: tuple
    rhs: tuple
    residuals: tuple
    max_residual: float


def fixed_point_report(params: Params, j: int, radii=DEFAULT_FIXED_POINT_RADII, tol: float = 1e-9) -> FixedPointReport:
    """Compare G alpha (|.|^{2-N} * N(phi_j)) with phi_j on a grid of radii.

    Residuals are relative to ``max(|phi_j(s)|, floor)`` with
    ``floor = 1e-8 max_s |phi_j(s)|``, which keeps the zero of
    phi_{N+1} at s = 1 harmless.
    """
    N = params.N
    phi = generator_profile(N, j)
    source = nonlinear_profile(params, phi, tol)
    scale = green_const(N) * alpha_const(params)
    radii = tuple(float(s) for s in radii)
    if not radii:
        raise UsageError("fixed-point check needs at least one radius")
    rhs = np.asarray(phi(np.array(radii)), dtype=float)
    lhs = np.array([scale * riesz_separable(N, N - 2.0, source, s, tol) for s in radii])
    floor = 1e-8 * float(np.max(np.abs(rhs))) if np.any(rhs) else 1e-300
    res = np.abs(lhs - rhs) / np.maximum(np.abs(rhs), floor)
    return FixedPointReport(j, phi.degree, radii, tuple(lhs), tuple(rhs), tuple(res), float(res.max()))


def fixed_point_residual(params: Params, j: int, radii=DEFAULT_FIXED_POINT_RADII, tol: float = 1e-9) -> float:
    """Max relative residual of the integral equation phi_j = G alpha |.|^{2-N} * N(phi_j)."""
    return fixed_point_report(params, j, radii, tol).max_residual


# ---------------------------------------------------------------------------
# HLS equality at the bubble
# ---------------------------------------------------------------------------


def dirichlet_energy_bubble(N: int) -> float:
    """||grad u||_2^2 = N (N-2) pi^{N/2} Gamma(N/2) / Gamma(N)."""
    return N * (N - 2.0) * math.exp(0.5 * N * math.log(math.pi) + log_gamma(0.5 * N) - log_gamma(float(N)))


def hls_double_integral(params: Params, scale: float = 1.0, tol: float = 1e-12) -> float:
    """D = iint (a u)^p(x) (a u)^p(y) |x-y|^{-lam} dx dy for a = ``scale``.

    The inner integral is the closed-form bubble potential; the outer one is
    a radial quadrature.
    """
    N, p = params.N, params.p
    area = sphere_area(N - 1)
    c_pot = bubble_convolution_constant(N, params.lam)
    expo = 0.5 * (p * (N - 2.0) + params.lam)  # = N

    def integrand(r, gap):
        return area * c_pot * np.exp(-expo * _log1p_r2(r)) * r ** (N - 1.0)

    res = _integrate_radial(integrand, 0.0, 2.0 * expo - N, tol, 0.0)
    return scale ** (2.0 * p) * res.value


def hls_equality_check(params: Params, scale: float = 1.0, tol: float = 1e-12) -> float:
    """Relative gap |D^{1/p} - C ||grad(a u)||^2| / (C ||grad(a u)||^2) at the bubble."""
    d = hls_double_integral(params, scale, tol)
    e = scale * scale * dirichlet_energy_bubble(params.N)
    c = hls_sharp_constant(params)
    return abs(d ** (1.0 / params.p) - c * e) / (c * e)


# ---------------------------------------------------------------------------
# decay regimes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    slope: float
    predicted: float
    regime: str
    log_coefficient: float | None
    radii: tuple
    values: tuple

    @property
    def slope_error(self):
        return abs(self.slope - self.predicted)


def decay_regime(N, lam, theta):
    if math.isclose(theta, N, rel_tol=0.0, abs_tol=1e-12):
        return "theta=N"
    return "theta<N" if theta < N else "theta>N"


def predicted_slope(N, lam, theta):
    return N - lam - theta if decay_regime(N, lam, theta) == "theta<N" else -lam


def default_decay_radii(N, lam, theta):
    hi = 1e6 if decay_regime(N, lam, theta) == "theta=N" else 1e4
    return tuple(np.geomspace(1e2, hi, 9))


def _log_linear_fit(log_s, y):
    """Least-squares y ~ A log s + B; returns (A, B, relative rms residual)."""
    design = np.column_stack([log_s, np.ones_like(log_s)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return coef[0], coef[1], float(np.sqrt(np.mean(resid**2)) / np.mean(np.abs(y)))


def decay_exponent_fit(N: int, lam: float, theta: float, radii=None, tol: float = 1e-10) -> DecayFit:
    """Fit the decay of J = |.|^{-lam} * <.>^{-theta} on a geometric grid.

    For theta != N the slope of log J against log s is fitted.  For
    theta = N the potential behaves like s^{-lam} (A log s + B); the
    exponent m is chosen so that J s^m is as close to linear in log s as
    possible; the slope is reported as -m and A as the log coefficient.
    """
    _check_exponent(N, lam)
    if not theta + lam > N:
        raise UsageError(f"decay lemma needs theta + lambda > N; got {theta} + {lam} <= {N}")
    radii = default_decay_radii(N, lam, theta) if radii is None else tuple(float(s) for s in radii)
    if len(radii) < 3 or min(radii) <= 0:
        raise UsageError("need at least three positive radii")
    profile = power_profile(theta)
    values = np.array([riesz_separable(N, lam, profile, s, tol) for s in radii])
    log_s = np.log(np.array(radii))
    regime = decay_regime(N, lam, theta)
    log_coef = None
    if regime == "theta=N":
        def badness(m):
            return _log_linear_fit(log_s, values * np.exp(m * log_s))[2]

        # the misfit is not unimodal in m: scan, then refine around the best
        grid = np.linspace(lam - 1.0, lam + 1.0, 201)
        best = grid[int(np.argmin([badness(m) for m in grid]))]
        opt = minimize_scalar(badness, bounds=(best - 0.01, best + 0.01), method="bounded",
                              options={"xatol": 1e-10})
        m = float(opt.x)
        a, _, _ = _log_linear_fit(log_s, values * np.exp(m * log_s))
        slope = -m
        log_coef = float(a)
    else:
        slope = float(np.polyfit(log_s, np.log(values), 1)[0])
    return DecayFit(slope, predicted_slope(N, lam, theta), regime, log_coef, radii, tuple(values))
