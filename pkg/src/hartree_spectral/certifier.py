"""Nondegeneracy certificate for the bubble of the critical Hartree equation.

The linearized operator is diagonal on spherical harmonics with symbol
Lambda_k.  The bubble is nondegenerate when Lambda_k = 1 exactly at k = 1:
Lambda_0 > 1, Lambda_1 = 1 and Lambda_k < 1 for every k >= 2.  The finite
check k <= k_max is made conclusive by the ratio mu_{k+1}/mu_k < 1 for both
kernels, which forces Lambda_k to keep decreasing beyond k_max.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import os

from .errors import UsageError
from .funk_hecke import ZonalKernelSpec, default_nodes, min_nodes, mu_quadrature
from .spectral import (
    Params,
    lambda_grid,
    make_params,
    mu_closed,
    mu_ratio,
    spectral_line,
)

DEFAULT_TOL = 1e-11
ORACLE_TOL = 1e-10
CHECK_NAMES = (
    "lambda0_gt_1",
    "lambda1_eq_1",
    "lambda_k_lt_1",
    "strictly_decreasing",
    "ratio_formula_lt_1",
    "oracle_agreement",
)


@dataclass(frozen=True)
class Certificate:
    params: Params
    k_max: int
    tol: float
    lines: tuple
    checks: dict
    margins: dict
    kernel_dim: int
    verdict: str

    @property
    def passed(self):
        return self.verdict == "pass"

    def as_dict(self):
        return {
            **self.params.as_dict(),
            "kmax": self.k_max,
            "tol": self.tol,
            "lines": [line.as_dict() for line in self.lines],
            "checks": dict(self.checks),
            "margins": dict(self.margins),
            "kernel_dim": self.kernel_dim,
            "verdict": self.verdict,
        }


def _check_k_max(k_max):
    if isinstance(k_max, bool) or int(k_max) != k_max or k_max < 2:
        raise UsageError(f"k_max must be an integer >= 2, got {k_max!r}")
    return int(k_max)


def cross_validate(params: Params, k_max: int, n_nodes: int | None = None) -> float:
    """Max relative gap between closed-form and quadrature mu_k for k <= k_max.

    Both kernels of the problem (exponents ``lam`` and ``N - 2``) are checked.
    """
    if isinstance(k_max, bool) or int(k_max) != k_max or k_max < 0:
        raise UsageError(f"k_max must be a non-negative integer, got {k_max!r}")
    n_nodes = default_nodes(k_max) if n_nodes is None else n_nodes
    if n_nodes < min_nodes(k_max):
        raise UsageError(f"{n_nodes} nodes are not exact up to degree {k_max}")
    worst = 0.0
    for s in (params.lam, params.N - 2.0):
        spec = ZonalKernelSpec(params.N, s)
        for k in range(int(k_max) + 1):
            closed = mu_closed(params, s, k)
            worst = max(worst, abs(mu_quadrature(spec, k, n_nodes) - closed) / closed)
    return worst


def certify(params: Params, k_max: int = 50, tol: float = DEFAULT_TOL, n_nodes: int | None = None) -> Certificate:
    """Check the spectral facts behind nondegeneracy for one (N, lam).

    A failed check is reported through ``verdict``, never raised.

    Raises
    ------
    UsageError
        If ``k_max < 2`` or ``tol`` is outside ``(0, 1e-6]``.
    """
    k_max = _check_k_max(k_max)
    if not (0.0 < tol <= 1e-6):
        raise UsageError(f"tol must lie in (0, 1e-6], got {tol!r}")
    lines = tuple(spectral_line(params, k) for k in range(k_max + 1))
    sym = [line.symbol for line in lines]

    # ratio < 1 for all k follows from s < N; the loop records it explicitly
    ratios_ok = all(
        mu_ratio(params, s, k) < 1.0 for s in (params.lam, params.N - 2.0) for k in range(k_max + 1)
    ) and params.lam < params.N and params.N - 2.0 < params.N
    oracle_err = cross_validate(params, k_max, n_nodes)

    checks = {
        "lambda0_gt_1": sym[0] > 1.0 + tol,
        "lambda1_eq_1": abs(sym[1] - 1.0) <= tol,
        "lambda_k_lt_1": all(v < 1.0 - tol for v in sym[2:]),
        "strictly_decreasing": all(b < a for a, b in zip(sym, sym[1:])),
        "ratio_formula_lt_1": bool(ratios_ok),
        "oracle_agreement": oracle_err <= ORACLE_TOL,
    }
    margins = {
        "lambda0_minus_1": sym[0] - 1.0,
        "lambda1_abs_err": abs(sym[1] - 1.0),
        "one_minus_lambda2": 1.0 - sym[2],
        "max_oracle_rel_err": oracle_err,
    }
    kernel_dim = sum(line.dim for line in lines if abs(line.symbol - 1.0) <= tol)
    verdict = "pass" if all(checks.values()) else "fail"
    return Certificate(params, k_max, tol, lines, checks, margins, kernel_dim, verdict)


@dataclass(frozen=True)
class GridCell:
    N: int
    lam: float
    verdict: str
    margins: dict
    failed: tuple


@dataclass(frozen=True)
class GridSummary:
    cells: tuple
    k_max: int
    tol: float

    @property
    def overall(self):
        return "pass" if all(c.verdict == "pass" for c in self.cells) else "fail"

    def worst_margins(self):
        """Smallest separations and largest errors over the grid."""
        m = [c.margins for c in self.cells]
        return {
            "lambda0_minus_1": min(x["lambda0_minus_1"] for x in m),
            "lambda1_abs_err": max(x["lambda1_abs_err"] for x in m),
            "one_minus_lambda2": min(x["one_minus_lambda2"] for x in m),
            "max_oracle_rel_err": max(x["max_oracle_rel_err"] for x in m),
        }


def default_threads():
    env = os.environ.get("HARTREE_SPECTRAL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def grid_certify(N_range, lambda_resolution: int = 50, k_max: int = 50, tol: float = DEFAULT_TOL, threads: int | None = None) -> GridSummary:
    """Certify every (N, lam) with N in ``N_range`` and ``lambda_resolution`` interior lam.

    Cells are evaluated in a thread pool; results keep grid order, so the
    summary does not depend on the thread count.
    """
    Ns = list(N_range)
    if not Ns:
        raise UsageError("N range is empty")
    if isinstance(lambda_resolution, bool) or int(lambda_resolution) != lambda_resolution or lambda_resolution < 1:
        raise UsageError(f"lambda resolution must be a positive integer, got {lambda_resolution!r}")
    _check_k_max(k_max)
    cells_in = [(N, lam) for N in Ns for lam in lambda_grid(N, int(lambda_resolution))]

    def run(cell):
        cert = certify(make_params(*cell), k_max, tol)
        failed = tuple(name for name in CHECK_NAMES if not cert.checks[name])
        return GridCell(cell[0], cell[1], cert.verdict, cert.margins, failed)

    threads = default_threads() if threads is None else int(threads)
    if threads <= 1:
        cells = [run(c) for c in cells_in]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cells = list(pool.map(run, cells_in))
    return GridSummary(tuple(cells), int(k_max), tol)
