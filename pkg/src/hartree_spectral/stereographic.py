"""Stereographic projection R^N -> S^N, its conformal weight, the weighted
transfer maps and the bubble with its N+1 symmetry generators.

Points are numpy arrays whose last axis holds the coordinates, so every
function accepts a single point or a stack of points.  Functions passed to
:func:`pushforward` / :func:`pullback` must follow the same convention.
"""

import numpy as np

from .errors import DomainError, UsageError
from .quadrature import exp_sinh_rule, gauss_jacobi_rule
from .special import sphere_area

SOUTH_POLE_GUARD = 1e-9


def _as_points(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        raise DomainError("a point needs at least one coordinate")
    if not np.all(np.isfinite(x)):
        raise DomainError("point coordinates must be finite")
    return x


def project(x):
    """Stereographic image (2x, 1 - |x|^2) / (1 + |x|^2) on S^N."""
    x = _as_points(x)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    denom = 1.0 + r2
    return np.concatenate([2.0 * x / denom, (1.0 - r2) / denom], axis=-1)


def inverse_project(xi):
    """Inverse stereographic map, x_j = xi_j / (1 + xi_{N+1}).

    In the southern hemisphere ``1 + xi_{N+1}`` is evaluated as
    ``|xi'|^2 / (1 - xi_{N+1})`` to avoid cancellation.

    Raises
    ------
    DomainError
        Within ``1e-9`` of the south pole, or if ``xi`` is not a unit vector.
    """
    xi = _as_points(xi)
    if xi.shape[-1] < 2:
        raise DomainError("sphere points need at least two coordinates")
    norm = np.sqrt(np.sum(xi * xi, axis=-1))
    if np.any(np.abs(norm - 1.0) > 1e-12):
        raise DomainError("sphere points must have unit norm (to 1e-12)")
    head, last = xi[..., :-1], xi[..., -1:]
    if np.any(last < -1.0 + SOUTH_POLE_GUARD):
        raise DomainError("inverse projection is undefined at the south pole")
    h2 = np.sum(head * head, axis=-1, keepdims=True)
    south = last < 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(south, head * (1.0 - last) / h2, head / (1.0 + last))
    return x


def conformal_weight(x):
    """rho(x) = (2 / (1 + |x|^2))^{1/2}; the sphere metric is rho^4 dx^2."""
    x = _as_points(x)
    return np.sqrt(2.0 / (1.0 + np.sum(x * x, axis=-1)))


def pushforward(f, xi, N=None):
    """(S_* f)(xi) = rho^{2-N}(S^{-1} xi) f(S^{-1} xi)."""
    x = inverse_project(xi)
    N = x.shape[-1] if N is None else N
    return conformal_weight(x) ** (2.0 - N) * np.asarray(f(x), dtype=float)


def pullback(F, x, N=None):
    """(S^* F)(x) = rho^{N-2}(x) F(S x); inverse of :func:`pushforward`."""
    x = _as_points(x)
    N = x.shape[-1] if N is None else N
    return conformal_weight(x) ** (N - 2.0) * np.asarray(F(project(x)), dtype=float)


def _check_dim(N, x):
    if int(N) != N or N < 3:
        raise DomainError(f"N must be an integer >= 3, got {N!r}")
    if x.shape[-1] != N:
        raise DomainError(f"expected points in R^{N}, got last axis {x.shape[-1]}")


def bubble(N, x):
    """u(x) = (1 + |x|^2)^{-(N-2)/2}."""
    x = _as_points(x)
    _check_dim(N, x)
    return (1.0 + np.sum(x * x, axis=-1)) ** (-(N - 2.0) / 2.0)


def generator(N, j, x):
    """Kernel generator phi_j of the linearized equation, 1 <= j <= N+1.

    ``phi_j`` for ``j <= N`` comes from translations,
    ``(2-N) u x_j / (1+|x|^2)``; ``phi_{N+1}`` from dilation,
    ``(N-2)/2 u (1-|x|^2)/(1+|x|^2)``.
    """
    if isinstance(j, bool) or int(j) != j or not 1 <= j <= N + 1:
        raise UsageError(f"generator index must be in [1, {N + 1}], got {j!r}")
    x = _as_points(x)
    _check_dim(N, x)
    r2 = np.sum(x * x, axis=-1)
    u = (1.0 + r2) ** (-(N - 2.0) / 2.0)
    if j <= N:
        return (2.0 - N) * u * x[..., j - 1] / (1.0 + r2)
    return 0.5 * (N - 2.0) * u * (1.0 - r2) / (1.0 + r2)


def generator_image_coefficient(N, j):
    """c with S_* phi_j = c xi_j: 2^{(2-N)/2} (N-2)/2 times -1 (j <= N) or +1 (j = N+1)."""
    base = 2.0 ** ((2.0 - N) / 2.0) * 0.5 * (N - 2.0)
    return -base if j <= N else base


def degree1_normalization(N):
    """c^2 such that Y = c xi_j has unit L^2(S^N) norm, i.e. (N+1)/|S^N|."""
    return (N + 1.0) / sphere_area(N)


# -- random samples -----------------------------------------------------------


def random_sphere_points(N, m, rng):
    """``m`` uniform points on S^N (normalized Gaussians)."""
    g = rng.standard_normal((m, N + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def random_euclidean_points(N, m, rng, sigma=1.5):
    """``m`` points in R^N with log-normal radii, so both |x| << 1 and |x| >> 1 occur."""
    d = rng.standard_normal((m, N))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = rng.lognormal(0.0, sigma, size=(m, 1))
    return d * r


# -- pointwise identity checks ---------------------------------------------------


def _rel(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    return np.abs(a - b) / np.maximum(np.abs(b), np.finfo(float).tiny)


def distance_identity_error(N, m=1000, seed=0):
    """max over random pairs of the relative gap in |Sx - Sy| = |x - y| rho(x) rho(y)."""
    rng = np.random.default_rng(seed)
    x = random_euclidean_points(N, m, rng)
    y = random_euclidean_points(N, m, rng)
    lhs = np.linalg.norm(project(x) - project(y), axis=1)
    rhs = np.linalg.norm(x - y, axis=1) * conformal_weight(x) * conformal_weight(y)
    return float(np.max(_rel(lhs, rhs)))


def round_trip_error(N, m=1000, seed=0):
    """max relative error of inverse_project(project(x)) and project(inverse_project(xi))."""
    rng = np.random.default_rng(seed)
    x = random_euclidean_points(N, m, rng)
    back = inverse_project(project(x))
    err_x = np.linalg.norm(back - x, axis=1) / np.linalg.norm(x, axis=1)
    xi = random_sphere_points(N, m, rng)
    xi = xi[xi[:, -1] > -1.0 + SOUTH_POLE_GUARD]
    err_xi = np.linalg.norm(project(inverse_project(xi)) - xi, axis=1)
    return float(max(err_x.max(), err_xi.max()))


def generator_pushforward_error(N, m=1000, seed=0):
    """max relative error of S_* phi_j = c_j xi_j over all j and random sphere points.

    Also checks the bubble, whose image is the constant 2^{-(N-2)/2}.  The
    error is measured relative to ``|c_j|`` since xi_j itself may vanish.
    """
    rng = np.random.default_rng(seed)
    xi = random_sphere_points(N, m, rng)
    xi = xi[xi[:, -1] > -1.0 + SOUTH_POLE_GUARD]
    worst = 0.0
    for j in range(1, N + 2):
        c = generator_image_coefficient(N, j)
        got = pushforward(lambda x, j=j: generator(N, j, x), xi)
        worst = max(worst, float(np.max(np.abs(got - c * xi[:, j - 1])) / abs(c)))
    const = 2.0 ** (-(N - 2.0) / 2.0)
    got = pushforward(lambda x: bubble(N, x), xi)
    worst = max(worst, float(np.max(np.abs(got - const)) / const))
    return worst


def generator_span_error(N, m=200, seed=0):
    """Pushforward of random combinations sum c_j phi_j against the degree-1 formula."""
    rng = np.random.default_rng(seed)
    xi = random_sphere_points(N, m, rng)
    xi = xi[xi[:, -1] > -1.0 + SOUTH_POLE_GUARD]
    coef = rng.standard_normal(N + 1)

    def combo(x):
        return sum(coef[j - 1] * generator(N, j, x) for j in range(1, N + 2))

    signs = np.array([-1.0] * N + [1.0])
    expected = 2.0 ** ((2.0 - N) / 2.0) * 0.5 * (N - 2.0) * (xi @ (signs * coef))
    scale = 2.0 ** ((2.0 - N) / 2.0) * 0.5 * (N - 2.0) * np.sum(np.abs(coef))
    return float(np.max(np.abs(pushforward(combo, xi) - expected)) / scale)


def transfer_round_trip_error(N, m=1000, seed=0):
    """max relative error of pullback(pushforward(f)) = f for a fixed smooth f."""
    rng = np.random.default_rng(seed)
    x = random_euclidean_points(N, m, rng)

    def f(y):
        r2 = np.sum(y * y, axis=-1)
        # positive, so a relative error is meaningful everywhere
        return (2.0 + np.cos(y[..., 0])) / (1.0 + r2) + np.exp(-r2)

    def F(xi):
        return pushforward(f, xi, N)

    return float(np.max(_rel(pullback(F, x), f(x))))


# -- integral identities for zonal functions --------------------------------------


def sphere_zonal_integral(N, g, n_nodes=80):
    """int_{S^N} g(xi_{N+1}) dxi = |S^{N-1}| int g(t) (1-t^2)^{(N-2)/2} dt."""
    h = 0.5 * (N - 2.0)
    rule = gauss_jacobi_rule(n_nodes, h, h)
    return sphere_area(N - 1) * float(np.dot(rule.weights, g(rule.nodes)))


def euclidean_zonal_integral(N, g, level=6):
    """int_{R^N} g((S x)_{N+1}) rho^{2N}(x) dx by exp-sinh quadrature in |x|."""
    rule = exp_sinh_rule(level, 1e-12, 1e12)
    r = rule.nodes
    r2 = r * r
    t = (1.0 - r2) / (1.0 + r2)
    vals = g(t) * (2.0 / (1.0 + r2)) ** N * r ** (N - 1)
    return sphere_area(N - 1) * float(np.dot(rule.weights, vals))


def measure_identity_error(N, g):
    """Relative gap between the two sides of d xi = rho^{2N}(x) dx for zonal g."""
    a = sphere_zonal_integral(N, g)
    b = euclidean_zonal_integral(N, g)
    return abs(a - b) / abs(a)


def degree1_moment(N, n_nodes=4):
    """int_{S^N} xi_{N+1}^2 dxi by exact Gauss-Jacobi quadrature (= |S^N| / (N+1))."""
    return sphere_zonal_integral(N, lambda t: t * t, n_nodes)
