import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasijump.cauchy import LaurentRep
from quasijump.curves import ConformalMap
from quasijump.faber import (FaberError, disk_minus_projection, faber_polynomial,
                             faber_residual, faber_trace, grunsky_coefficients, i_f,
                             i_f_matrix, left_inverse_check, left_inverse_residuals,
                             series_inverse, series_mul, series_power, series_reciprocal)

small = st.complex_numbers(max_magnitude=0.3, allow_nan=False, allow_infinity=False)


@given(st.lists(small, min_size=2, max_size=6), st.lists(small, min_size=2, max_size=6))
@settings(max_examples=40, deadline=None)
def test_series_mul_matches_numpy(a, b):
    full = np.polynomial.polynomial.polymul(a, b)
    order = 5
    out = series_mul(np.array(a), np.array(b), order)
    expected = np.zeros(order + 1, dtype=complex)
    expected[:min(order + 1, full.size)] = full[:order + 1]
    assert np.allclose(out, expected, atol=1e-14)


@given(st.lists(small, min_size=1, max_size=5))
@settings(max_examples=40, deadline=None)
def test_reciprocal_and_power(tail):
    a = np.concatenate([[1.0], tail])
    order = 10
    inv = series_reciprocal(a, order)
    one = series_mul(a, inv, order)
    assert np.allclose(one, np.eye(1, order + 1)[0], atol=1e-12)
    assert np.allclose(series_power(a, 3, order), series_mul(series_mul(a, a, order), a, order),
                       atol=1e-12)


@given(st.lists(small, min_size=1, max_size=5))
@settings(max_examples=40, deadline=None)
def test_series_inverse_composes_to_identity(tail):
    a = np.concatenate([[0.0, 1.0], tail])
    order = 12
    b = series_inverse(a, order)
    # a(b(s)) = s as formal power series
    comp = np.zeros(order + 1, dtype=complex)
    power = np.eye(1, order + 1)[0].astype(complex)
    for c in a:
        comp += c * power
        power = series_mul(power, b, order)
    assert np.allclose(comp, np.eye(1, order + 1, 1)[0], atol=1e-10)


def test_faber_polynomials_of_quadratic_map():
    # f(z) = z + a z^2: f^{-1}(s) = s - a s^2 + 2 a^2 s^3 - ...
    a = 0.2
    f = ConformalMap("interior", [0, 1, a])
    assert faber_polynomial(f, 1).principal_part() == pytest.approx({-1: 1.0})
    p2 = faber_polynomial(f, 2).principal_part()
    assert p2[-2] == pytest.approx(1.0)
    assert p2[-1] == pytest.approx(2 * a)


def test_grunsky_of_quadratic_map():
    # Phi_1(f(z)) = 1/(z (1 + a z)) = z^{-1} + sum_k (-a)^{k+1} z^k
    a = 0.2
    beta = grunsky_coefficients(ConformalMap("interior", [0, 1, a]), 1, 12).beta
    assert beta == pytest.approx((-a) ** (np.arange(13) + 1), abs=1e-15)


def test_faber_leading_coefficient_scales_with_derivative():
    f = ConformalMap("interior", [1j, 2.0, 0.3])
    for n in (1, 2, 5):
        assert faber_polynomial(f, n).leading == pytest.approx(2.0 ** n)
        assert faber_residual(f, n) < 1e-12


def test_faber_evaluation_at_shifted_point():
    f = ConformalMap("interior", [0.5, 1, 0.1])
    F = faber_polynomial(f, 3)
    zeta = np.array([0.5 + 2.0, 0.5 - 1j])
    x = 1.0 / (zeta - 0.5)
    assert np.allclose(F(zeta), x * np.polyval(F.coeffs[::-1], x))


def test_grunsky_symmetry():
    # beta^n_k / n = beta^k_n / k for f'(0) = 1
    f = ConformalMap("interior", [0, 1, 0.15, -0.05j, 0.02])
    B = {n: grunsky_coefficients(f, n, 8).beta for n in range(1, 7)}
    for n in range(1, 7):
        for k in range(1, 7):
            assert B[n][k] / n == pytest.approx(B[k][n] / k, abs=1e-14)


def test_faber_identity_on_pairs(pair):
    for n in range(1, 13):
        assert faber_residual(pair.f, n) < 1e-10


def test_grunsky_raises_when_series_too_short():
    f = ConformalMap("interior", [0, 1, 0.45])
    with pytest.raises(FaberError):
        grunsky_coefficients(f, 12, 32, tol=1e-30)


def test_faber_rejects_bad_input():
    with pytest.raises(ValueError):
        faber_polynomial(ConformalMap("exterior", [1, 0]), 1)
    with pytest.raises(ValueError):
        faber_polynomial(ConformalMap("interior", [0, 1]), 0)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_i_f_of_monomial_is_faber_polynomial(pair, n):
    h = LaurentRep(pair, "minus", np.eye(1, n + 1, n)[0])
    u = i_f(h)
    ref = faber_trace(faber_polynomial(pair.f, n), pair, u.order)
    got = u.trace()
    assert np.abs(got.coeffs - ref.coeffs).max() < 1e-8


def test_i_f_on_circle_is_identity(circle):
    h = LaurentRep(circle, "minus", np.array([0, 0.5, -1j, 0.25]))
    u = i_f(h)
    assert u.coeffs[:4] == pytest.approx(h.coeffs, abs=1e-12)


def test_left_inverse(pair):
    assert left_inverse_residuals(pair, 8).max() < 1e-8
    h = LaurentRep(pair, "minus", np.array([0, 1.0, 0.5j, -0.25]))
    assert left_inverse_check(h) < 1e-8
    back = disk_minus_projection(pair, i_f(h), 3)
    assert back == pytest.approx(h.coeffs, abs=1e-8)


def test_i_f_is_bounded_below(noncircle):
    s = np.linalg.svd(i_f_matrix(noncircle, 12), compute_uv=False)
    assert s.min() > 0.3
    assert s.max() < 3.0


def test_i_f_requires_minus_side(perturbed):
    with pytest.raises(ValueError):
        i_f(LaurentRep(perturbed, "plus", np.array([0, 1.0])))
