import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hartree_spectral.errors import DomainError, NumericError, UsageError
from hartree_spectral.riesz import (
    SeparableProfile,
    angular_kernel,
    bubble_convolution,
    bubble_potential,
    bubble_radial,
    bubble_residual_relative,
    decay_exponent_fit,
    dirichlet_energy_bubble,
    fixed_point_report,
    generator_profile,
    japanese,
    hls_equality_check,
    laplacian_bubble,
    laplacian_fd,
    nonlinear_operator,
    power_profile,
    riesz_separable,
    riesz_separable_full,
)
from hartree_spectral.spectral import alpha_const, green_const, make_params
from hartree_spectral.special import sphere_area

# mpmath values, frozen
KERNEL_N4_E15_L1_S1_R2 = 1.2573645314398260417
# nested mp.quad over (r, t) for the bump exp(-1/(1-r^2)) on the unit ball
BUMP_POTENTIAL = {
    (4, 1.5, 0.5): 0.7487128718828580474,
    (4, 1.5, 2.0): 0.13412750908047254764,
    (3, 1.0, 0.3): 0.86559423295828787914,
    (5, 4.2, 0.6): 4.1453208035719822199,
}
RADII = (0.0, 0.5, 1.0, 2.0, 10.0, 100.0)


def kernel_oracle(N, e, ell, s, r):
    """Hypergeometric form of K_l(s, r) in 30-digit arithmetic."""
    mp.mp.dps = 30
    e, s, r = mp.mpf(e), mp.mpf(s), mp.mpf(r)
    lo, hi = min(s, r), max(s, r)
    z = (lo / hi) ** 2
    area = 2 * mp.pi ** (mp.mpf(N) / 2) / mp.gamma(mp.mpf(N) / 2)
    pre = area * mp.rf(e / 2, ell) / mp.rf(mp.mpf(N) / 2, ell)
    return float(pre * hi**-e * (lo / hi) ** ell * mp.hyp2f1(e / 2 + ell, e / 2 - mp.mpf(N) / 2 + 1, ell + mp.mpf(N) / 2, z))


def bump(r):
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


# --- angular kernel -------------------------------------------------------

def test_kernel_frozen_value():
    assert angular_kernel(4, 1.5, 1, 1.0, 2.0) == pytest.approx(KERNEL_N4_E15_L1_S1_R2, rel=1e-13)


@pytest.mark.parametrize(
    "N, e, ell, s, r",
    [
        (3, 1.0, 0, 0.5, 3.0),
        (3, 2.5, 1, 1.0, 1.0001),
        (5, 4.2, 0, 2.0, 2.3),
        (6, 4.0, 1, 0.01, 50.0),
        (8, 0.3, 1, 7.0, 6.999),
        (10, 9.5, 0, 1.0, 1.5),
        (4, 3.0, 1, 1e-3, 1e-3 * 1.3),
    ],
)
def test_kernel_against_hypergeometric_oracle(N, e, ell, s, r):
    assert angular_kernel(N, e, ell, s, r) == pytest.approx(kernel_oracle(N, e, ell, s, r), rel=1e-12)


def test_kernel_at_origin():
    for N, e in [(3, 1.0), (6, 4.0), (7, 6.5)]:
        assert angular_kernel(N, e, 0, 0.0, 2.0) == pytest.approx(sphere_area(N - 1) * 2.0**-e, rel=1e-15)
        assert angular_kernel(N, e, 1, 0.0, 2.0) == 0.0


def test_kernel_newtonian_closed_form():
    s = 1.7
    r = np.array([0.1, 0.9, 1.69, 1.71, 4.0, 300.0])
    expected = 4 * np.pi / np.maximum(s, r)
    assert np.allclose(angular_kernel(3, 1.0, 0, s, r), expected, rtol=1e-13, atol=0)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(min_value=3, max_value=9),
    st.floats(min_value=0.02, max_value=0.98),
    st.integers(min_value=0, max_value=1),
    st.floats(min_value=1e-3, max_value=1e3),
    st.floats(min_value=1e-3, max_value=1e3),
)
def test_kernel_symmetry_and_damping(N, frac, ell, s, r):
    e = N * frac
    if s == r and e >= N - 1:
        return
    k = angular_kernel(N, e, ell, s, r)
    assert k == pytest.approx(angular_kernel(N, e, ell, r, s), rel=1e-12)
    if ell == 1:
        assert abs(k) <= angular_kernel(N, e, 0, s, r) * (1 + 1e-13)


def test_kernel_domain_errors():
    with pytest.raises(DomainError):
        angular_kernel(4, 1.5, 0, 0.0, 0.0)
    with pytest.raises(DomainError):
        angular_kernel(4, 4.5, 0, 1.0, 2.0)
    with pytest.raises(DomainError):
        angular_kernel(4, 1.5, 0, -1.0, 2.0)


# --- profiles ---------------------------------------------------------------

def test_profile_validation():
    with pytest.raises(UsageError):
        SeparableProfile(-1, lambda r: r, 1.0)
    with pytest.raises(UsageError):
        SeparableProfile(0, lambda r: np.ones_like(r), 3.0, "constant")
    with pytest.raises(UsageError):
        with np.errstate(divide="ignore"):
            SeparableProfile(0, lambda r: 1.0 / (r - 1.0), 1.0, "pole")
    p = power_profile(2.5)
    assert p(np.array([0.0]))[0] == 1.0


# --- Riesz potential ----------------------------------------------------------

def test_bubble_potential_at_origin_newtonian():
    params = make_params(3, 1)
    assert bubble_potential(params, 0.0) == pytest.approx(4 * math.pi / 3, rel=1e-12)


@pytest.mark.parametrize("N", [3, 4, 5, 6, 7, 8])
def test_bubble_convolution_matches_closed_form(N):
    for lam in (0.1 * N, 0.5 * N, N - 1.0, 0.95 * N):
        params = make_params(N, lam)
        for s in RADII:
            got = bubble_potential(params, s)
            assert got == pytest.approx(float(bubble_convolution(params, s)), rel=1e-8)


@pytest.mark.parametrize("key", sorted(BUMP_POTENTIAL))
def test_bump_against_brute_force(key):
    N, e, s = key
    profile = SeparableProfile(0, bump, float(N), "bump")
    assert riesz_separable(N, e, profile, s) == pytest.approx(BUMP_POTENTIAL[key], rel=1e-7)


def test_degree_one_potential_vanishes_at_origin():
    assert riesz_separable(5, 3.0, generator_profile(5, 1), 0.0) == 0.0


def test_integrability_condition_is_usage_error():
    with pytest.raises(UsageError):
        riesz_separable(5, 2.0, power_profile(3.0), 1.0)


def test_non_convergence_reports_diagnostics():
    wild = SeparableProfile(0, lambda r: np.cos(1e5 * r) / (1.0 + r * r) ** 2, 4.0, "wild")
    with pytest.raises(NumericError) as info:
        riesz_separable(5, 2.0, wild, 1.0)
    diag = info.value.diagnostics
    assert {"s", "levels", "estimates", "error", "tail"} <= set(diag)
    assert len(diag["estimates"]) >= 2


def test_full_result_fields():
    res = riesz_separable_full(6, 4.0, power_profile(5.0), 2.0)
    assert res.error <= 1e-10 * abs(res.value)
    assert res.evaluations > 0 and 0 <= abs(res.tail) < 1e-10 * abs(res.value)


# --- bubble residual -----------------------------------------------------------

def test_laplacian_closed_form_against_finite_differences():
    for N in (3, 4, 6, 9):
        for s in (0.0, 0.3, 1.0, 2.5, 10.0):
            fd = laplacian_fd(lambda r: float(bubble_radial(N, r)), N, s)
            exact = float(laplacian_bubble(N, s))
            assert abs(fd - exact) <= 1e-6 * max(exact, 1e-3 * N * (N - 2))
    assert float(laplacian_bubble(5, 0.0)) == 15.0


@pytest.mark.parametrize("N, lam", [(3, 1.0), (6, 4.0)])
def test_bubble_residual_small(N, lam):
    params = make_params(N, lam)
    worst = [bubble_residual_relative(params, s) for s in (0.0, 1.0, 100.0)]
    assert max(worst) <= 1e-6
    # degradation from s = 0 to s = 100 stays within a factor 10 of the budget
    assert worst[-1] <= 10 * max(worst[0], 1e-12)


# --- nonlinear operator ---------------------------------------------------------

def test_nonlinear_operator_zero_and_linear():
    params = make_params(6, 4)
    zero = SeparableProfile(0, lambda r: np.zeros_like(r), 0.0, "zero")
    assert nonlinear_operator(params, zero, np.array([0.0, 1.0, 5.0])).tolist() == [0.0, 0.0, 0.0]
    phi = generator_profile(6, 7)
    two_phi = SeparableProfile(0, lambda r: 2.0 * phi(r), phi.decay_exponent, "2phi")
    s = np.array([0.0, 0.4, 2.0, 8.0])
    a = nonlinear_operator(params, phi, s)
    b = nonlinear_operator(params, two_phi, s)
    assert np.allclose(b, 2.0 * a, rtol=1e-12, atol=0)


def _minus_laplacian_generator(N, j, s):
    """-Laplacian of phi_j's radial part, differentiated in 30-digit arithmetic."""
    mp.mp.dps = 30
    if j == N + 1:
        c = lambda r: (N - 2) * (1 - r * r) * (1 + r * r) ** (-mp.mpf(N) / 2) / 2
        ell = 0
    else:
        c = lambda r: (2 - N) * r * (1 + r * r) ** (-mp.mpf(N) / 2)
        ell = 1
    s = mp.mpf(s)
    lap = mp.diff(c, s, 2) + (N - 1) * mp.diff(c, s) / s - ell * (ell + N - 2) * c(s) / s**2
    return float(-lap)


@pytest.mark.parametrize("N, lam, j", [(5, 2.0, 6), (5, 2.0, 1), (3, 1.0, 4), (7, 5.5, 1)])
def test_nonlinear_operator_on_generators_equals_laplacian(N, lam, j):
    # phi_j solves -Laplacian phi = alpha N(phi), which pins N(phi_j) pointwise
    params = make_params(N, lam)
    phi = generator_profile(N, j)
    for s in (0.4, 2.0, 6.0):
        expected = _minus_laplacian_generator(N, j, s) / alpha_const(params)
        assert nonlinear_operator(params, phi, s) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("N, lam", [(5, 2.0), (3, 1.0), (8, 6.4)])
def test_nonlinear_operator_decay(N, lam):
    # |N(phi)| <~ <s>^{-(N+2)} for phi = phi_{N+1}, whose decay is N - 2
    params = make_params(N, lam)
    s = np.geomspace(10.0, 1e3, 7)
    vals = np.abs(nonlinear_operator(params, generator_profile(N, N + 1), s))
    slope = np.polyfit(np.log(japanese(s)), np.log(vals), 1)[0]
    assert abs(slope + (N + 2)) <= 0.01
    weighted = vals * japanese(s) ** (N + 2)
    # <s>^{N+2} |N(phi)| settles to a finite limit
    assert np.all(np.diff(weighted) > 0)
    assert weighted[-1] / weighted[-2] - 1 <= 1e-4


@pytest.mark.xfail(
    strict=True,
    reason="sub-leading terms make the finite-range slope about 0.008 shallower than -(N+2); "
    "the rate itself is checked by test_nonlinear_operator_decay",
)
def test_nonlinear_operator_slope_literal_bound():
    N = 5
    params = make_params(N, 2.0)
    s = np.geomspace(10.0, 1e3, 7)
    vals = np.abs(nonlinear_operator(params, generator_profile(N, N + 1), s))
    slope = np.polyfit(np.log(s), np.log(vals), 1)[0]
    assert slope <= -(N + 2)


def test_nonlinear_operator_scope():
    params = make_params(5, 2.0)
    with pytest.raises(UsageError):
        nonlinear_operator(params, SeparableProfile(2, lambda r: np.exp(-r), 3.0), 1.0)
    with pytest.raises(UsageError):
        nonlinear_operator(params, power_profile(3.5), 1.0)


def test_fixed_point_at_origin():
    params = make_params(6, 4)
    rep = fixed_point_report(params, 7, radii=(0.0,))
    assert rep.lhs[0] == pytest.approx(2.0, rel=1e-5)
    assert rep.rhs[0] == 2.0
    assert rep.max_residual <= 1e-5
    assert green_const(6) * alpha_const(params) == pytest.approx(36 / math.pi**6, rel=1e-14)


def test_fixed_point_needs_radii():
    with pytest.raises(UsageError):
        fixed_point_report(make_params(6, 4), 1, radii=())


# --- HLS equality --------------------------------------------------------------

def test_dirichlet_energy():
    # N = 3: 3 * pi^{3/2} * Gamma(3/2) / Gamma(3) = 3 pi^2 / 4
    assert dirichlet_energy_bubble(3) == pytest.approx(3 * math.pi**2 / 4, rel=1e-14)


@pytest.mark.parametrize("N, lam", [(3, 1.0), (6, 4.0), (5, 3.7), (9, 0.4)])
def test_hls_equality(N, lam):
    assert hls_equality_check(make_params(N, lam)) <= 1e-9


def test_hls_gap_scale_invariant():
    params = make_params(6, 4)
    assert abs(hls_equality_check(params, 2.0) - hls_equality_check(params, 1.0)) <= 1e-12


# --- decay regimes -------------------------------------------------------------

@pytest.mark.parametrize("theta, regime, slope", [(4.0, "theta<N", -1.0), (7.0, "theta>N", -2.0), (5.0, "theta=N", -2.0)])
def test_decay_examples(theta, regime, slope):
    fit = decay_exponent_fit(5, 2.0, theta)
    assert fit.regime == regime
    assert fit.predicted == slope
    assert fit.slope_error <= 0.05
    if regime == "theta=N":
        assert fit.log_coefficient > 0
    else:
        assert fit.log_coefficient is None


def test_decay_precondition():
    with pytest.raises(UsageError):
        decay_exponent_fit(5, 2.0, 2.0)
    with pytest.raises(UsageError):
        decay_exponent_fit(5, 2.0, 4.0, radii=(10.0, 100.0))
