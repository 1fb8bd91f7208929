import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hartree_spectral.errors import DomainError, NumericError, UsageError
from hartree_spectral.quadrature import (
    QuadratureRule,
    exp_sinh_rule,
    gauss_jacobi_rule,
    tanh_sinh_rule,
)
from hartree_spectral.special import log_beta


def _mass(a, b):
    return math.exp((a + b + 1) * math.log(2.0) + log_beta(a + 1, b + 1))


def test_single_node_legendre():
    rule = gauss_jacobi_rule(1, 0.0, 0.0)
    assert rule.nodes.tolist() == [0.0]
    assert rule.weights[0] == pytest.approx(2.0, rel=1e-15)


def test_two_node_legendre():
    rule = gauss_jacobi_rule(2, 0.0, 0.0)
    assert rule.nodes == pytest.approx([-1 / math.sqrt(3), 1 / math.sqrt(3)], rel=1e-15)
    assert rule.weights == pytest.approx([1.0, 1.0], rel=1e-14)


@pytest.mark.parametrize("n, a, b", [(5, 0.5, -0.3), (30, 2.5, -0.9), (3, -0.99, -0.99), (64, 0.0, 3.0)])
def test_total_mass_is_beta_integral(n, a, b):
    rule = gauss_jacobi_rule(n, a, b)
    assert math.fsum(rule.weights) == pytest.approx(_mass(a, b), rel=1e-13)


def test_rule_invariants():
    rule = gauss_jacobi_rule(40, 1.5, -0.5)
    assert np.all(rule.weights > 0)
    assert np.all(np.diff(rule.nodes) > 0)
    assert rule.nodes[0] > -1 and rule.nodes[-1] < 1
    assert rule.weight_spec == {"exponent_a": 1.5, "exponent_b": -0.5}
    assert len(rule) == 40


def test_nodes_agree_with_scipy():
    from scipy.special import roots_jacobi

    x, _ = roots_jacobi(25, 1.3, 0.4)
    assert gauss_jacobi_rule(25, 1.3, 0.4).nodes == pytest.approx(x, abs=1e-14)


def test_exactness_on_monomials_worst_cases():
    mp.mp.dps = 30
    for n, a, b in [(40, 2.5, -0.9), (29, -0.95, 3.5), (100, -0.5, -0.5), (3, -0.99, -0.99)]:
        rule = gauss_jacobi_rule(n, a, b)
        for deg in (0, 1, n, 2 * n - 1):
            ref = mp.mpf(2) ** (a + b + deg + 1) * mp.beta(a + 1, b + deg + 1)
            got = math.fsum(rule.weights * (1 + rule.nodes) ** deg)
            assert abs(got / float(ref) - 1) <= 1e-13


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=1, max_value=30),
    st.floats(min_value=-0.9, max_value=3.0),
    st.floats(min_value=-0.9, max_value=3.0),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_random_polynomials_integrated_exactly(n, a, b, seed):
    # positive coefficients in the basis (1+t)^j keep the reference well conditioned
    rng = np.random.default_rng(seed)
    deg = 2 * n - 1
    coef = rng.uniform(0.1, 1.0, deg + 1)
    mp.mp.dps = 30
    ref = mp.fsum(
        mp.mpf(float(c)) * mp.mpf(2) ** (a + b + j + 1) * mp.beta(a + 1, b + j + 1) for j, c in enumerate(coef)
    )
    rule = gauss_jacobi_rule(n, a, b)
    poly = np.polynomial.polynomial.polyval(1 + rule.nodes, coef)
    assert abs(math.fsum(rule.weights * poly) / float(ref) - 1) <= 1e-12


def test_reflection_symmetry():
    r1 = gauss_jacobi_rule(17, 0.7, -0.4)
    r2 = gauss_jacobi_rule(17, -0.4, 0.7)
    assert r1.nodes == pytest.approx(-r2.nodes[::-1], abs=1e-15)
    assert r1.weights == pytest.approx(r2.weights[::-1], rel=1e-13)


@pytest.mark.parametrize("n", [0, -3, 2.5])
def test_degenerate_node_count_is_usage_error(n):
    with pytest.raises(UsageError):
        gauss_jacobi_rule(n, 0.0, 0.0)


@pytest.mark.parametrize("a, b", [(-1.0, 0.0), (0.0, -1.5)])
def test_non_integrable_weight_is_domain_error(a, b):
    with pytest.raises(DomainError):
        gauss_jacobi_rule(4, a, b)


def test_quadrature_rule_validation():
    with pytest.raises(NumericError):
        QuadratureRule(np.array([0.0, 0.5]), np.array([1.0, -1.0]))
    with pytest.raises(NumericError):
        QuadratureRule(np.array([0.5, 0.0]), np.array([1.0, 1.0]))
    with pytest.raises(NumericError):
        QuadratureRule(np.array([0.0, 1.0]), np.array([1.0, 1.0]))


def test_tanh_sinh_handles_endpoint_singularity():
    rule = tanh_sinh_rule(6, (0.0, 1.0), tiny=1e-200)
    assert rule.weight_spec["scheme"] == "double-exponential"
    # nodes are measured from the left end, so the singularity sits there
    val = rule.integrate(lambda x: x**-0.75)
    assert val == pytest.approx(4.0, rel=1e-10)


def test_exp_sinh_semi_infinite():
    rule = exp_sinh_rule(6, 1e-20, 1e20)
    # int_0^inf x^{1/2} / (1 + x)^3 dx = B(3/2, 3/2) = pi / 8
    val = rule.integrate(lambda x: np.sqrt(x) / (1.0 + x) ** 3)
    assert val == pytest.approx(math.pi / 8.0, rel=1e-10)
