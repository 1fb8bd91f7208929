import math

import pytest
from hypothesis import given, settings, strategies as st

from hartree_spectral.errors import DomainError, UsageError
from hartree_spectral.funk_hecke import (
    ZonalKernelSpec,
    default_nodes,
    double_eigenvalue_first,
    double_eigenvalue_second,
    min_nodes,
    mu_quadrature,
    reflected_rule_integral,
    t_symbol_oracle,
)
from hartree_spectral.spectral import alpha_const, green_const, lambda_grid, make_params, mu_closed

PI3 = math.pi**3


def test_examples():
    assert mu_quadrature(ZonalKernelSpec(3, 1.0), 0, 8) == pytest.approx(16 * math.pi / 3, rel=1e-13)
    assert mu_quadrature(ZonalKernelSpec(6, 4.0), 1, 8) == pytest.approx(PI3 / 3, rel=1e-13)


@settings(max_examples=40)
@given(st.integers(min_value=3, max_value=10), st.floats(min_value=0.01, max_value=0.99))
def test_degree_one_over_zero(N, frac):
    s = N * frac
    spec = ZonalKernelSpec(N, s)
    ratio = mu_quadrature(spec, 1) / mu_quadrature(spec, 0)
    assert ratio == pytest.approx(s / (2 * N - s), rel=1e-12)


@pytest.mark.parametrize("method", ["by_parts", "direct"])
def test_methods_agree_with_closed_form_low_degree(method):
    for N, s in [(3, 1.0), (5, 3.7), (10, 0.1), (4, 2.0)]:
        params = make_params(N, 1.0)
        for k in range(11):
            got = mu_quadrature(ZonalKernelSpec(N, s), k, method=method)
            assert got == pytest.approx(mu_closed(params, s, k), rel=1e-10)


def test_by_parts_sweep_matches_closed_form():
    worst = 0.0
    for N in range(3, 11):
        params = make_params(N, 1.0)
        for s in lambda_grid(N, 10) + [N - 2.0]:
            spec = ZonalKernelSpec(N, s)
            for k in range(0, 51, 5):
                closed = mu_closed(params, s, k)
                worst = max(worst, abs(mu_quadrature(spec, k) - closed) / closed)
    assert worst <= 1e-12


def test_node_plateau():
    for N, s, k in [(3, 2.9, 20), (10, 0.1, 50), (6, 4.0, 7), (8, 6.0, 33)]:
        spec = ZonalKernelSpec(N, s)
        base = mu_quadrature(spec, k, min_nodes(k))
        for extra in (1, 5, 20):
            assert mu_quadrature(spec, k, min_nodes(k) + extra) == pytest.approx(base, rel=1e-13)


def test_min_nodes_is_ceiling_half():
    for k in range(60):
        assert min_nodes(k) == math.ceil((k + 1) / 2)
        assert default_nodes(k) == k // 2 + 4


def test_insufficient_nodes_is_usage_error():
    spec = ZonalKernelSpec(6, 4.0)
    with pytest.raises(UsageError):
        mu_quadrature(spec, 10, 5)
    mu_quadrature(spec, 10, 6)


def test_unknown_method_is_usage_error():
    with pytest.raises(UsageError):
        mu_quadrature(ZonalKernelSpec(6, 4.0), 2, method="simpson")


@pytest.mark.parametrize("N, s", [(6, 0.0), (6, 6.0), (2, 1.0), (5, -1.0)])
def test_spec_validation(N, s):
    with pytest.raises(DomainError):
        ZonalKernelSpec(N, s)


def test_jacobi_exponents_integrable():
    for N in range(3, 11):
        for s in lambda_grid(N, 7):
            a, b = ZonalKernelSpec(N, s).jacobi_exponents
            assert a > -1 and b >= 0.5


@pytest.mark.parametrize("k", [0, 1, 2, 5, 8, 13])
def test_reflected_rule_parity_consistency(k):
    spec = ZonalKernelSpec(5, 2.7)
    direct = mu_quadrature(spec, k, method="direct")
    mirrored = reflected_rule_integral(spec, k)
    # nodes at -t with swapped exponents, Ct_k(-t) = (-1)^k Ct_k(t) undone inside
    assert mirrored == pytest.approx(direct, rel=1e-11, abs=1e-14 * mu_quadrature(spec, 0))


def test_double_eigenvalues_six_four():
    params = make_params(6, 4)
    assert double_eigenvalue_first(params, 1) == pytest.approx((PI3 / 3) ** 2, rel=1e-13)
    assert double_eigenvalue_first(params, 0) == pytest.approx((2 * PI3 / 3) ** 2, rel=1e-13)
    assert double_eigenvalue_second(params, 1) == pytest.approx((PI3 / 3) * (2 * PI3 / 3), rel=1e-13)
    assert double_eigenvalue_second(params, 0) == double_eigenvalue_first(params, 0)


def test_double_eigenvalues_grid():
    for N in (3, 5, 8, 10):
        for lam in lambda_grid(N, 5):
            params = make_params(N, lam)
            for k in (0, 1, 2, 9, 30):
                m_n = mu_closed(params, N - 2.0, k)
                assert double_eigenvalue_first(params, k) == pytest.approx(
                    m_n * mu_closed(params, lam, k), rel=1e-10
                )
                assert double_eigenvalue_second(params, k) == pytest.approx(
                    m_n * mu_closed(params, lam, 0), rel=1e-10
                )


@pytest.mark.parametrize("k, expected", [(0, 3.0), (1, 1.0), (2, 0.48)])
def test_t_symbol_oracle_desk_values(k, expected):
    params = make_params(6, 4)
    value = green_const(6) * alpha_const(params) * t_symbol_oracle(params, k)
    assert value == pytest.approx(expected, abs=1e-10)
