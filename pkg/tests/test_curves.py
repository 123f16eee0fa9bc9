import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasijump.circle_space import FourierSeries, random_fourier_series
from quasijump.curves import (ConformalMap, ConformalPair, FitError, fit_missing_map,
                              is_simple_closed, make_circle_pair, make_ellipse_pair,
                              make_perturbed_pair, parse_curve)

TWO_PI = 2 * np.pi


def test_circle_pair_is_identity(circle):
    assert circle.boundary_mismatch == 0.0
    assert np.array_equal(circle.welding, circle.theta)
    h = FourierSeries.from_modes({-3: 1.0, 2: 0.5j})
    assert np.allclose(circle.compose_welding(h).resized(3).coeffs, h.coeffs, atol=1e-15)


def test_rotated_circle_welding_is_a_shift():
    pair = make_circle_pair(center=1 + 1j, radius=2.0, rotation=0.3)
    # f(e^{it}) = g(e^{i(t + 0.3)})
    assert pair.boundary_mismatch < 1e-14
    h = FourierSeries.from_modes({1: 1.0})
    out = pair.compose_welding(h, "forward")
    assert out[1] == pytest.approx(np.exp(0.3j), abs=1e-14)


def test_ellipse_boundary_on_ellipse(ellipse):
    z = ellipse.boundary(512)
    assert np.allclose((z.real / 1.2) ** 2 + (z.imag / 0.8) ** 2, 1.0, atol=1e-12)
    assert ellipse.f(0.0) == pytest.approx(0.0, abs=1e-15)


def test_ellipse_interior_map_symmetry(ellipse):
    # symmetric domain and symmetric normalisation: f has real coefficients
    # and only odd powers
    c = ellipse.f.coeffs
    assert np.abs(c.imag).max() < 1e-12
    assert np.abs(c[2::2]).max() < 1e-12


def test_perturbed_exterior_fit(perturbed):
    assert perturbed.boundary_mismatch < 1e-10
    assert perturbed.g.validate_univalence() > 0
    # g(inf) = inf with positive leading coefficient
    assert perturbed.g.derivative_coeff.real > 0
    assert abs(perturbed.g.derivative_coeff.imag) < 1e-12


@pytest.mark.parametrize("m, a", [(2, 0.2), (3, 0.15j), (4, 0.1 + 0.05j)])
def test_perturbed_family_fits(m, a):
    pair = make_perturbed_pair(a, m)
    assert pair.boundary_mismatch < 1e-10
    f_vals = pair.f(np.exp(1j * pair.theta))
    g_vals = pair.g(np.exp(1j * pair.welding))
    assert np.abs(f_vals - g_vals).max() < 1e-10


def test_welding_round_trip(pair, rng):
    h = random_fourier_series(32, rng)
    back = pair.compose_welding(pair.compose_welding(h, "forward"), "inverse")
    assert np.abs(back.resized(h.N).coeffs - h.coeffs).max() < 1e-10
    assert np.abs(back.coeffs).sum() - np.abs(back.resized(h.N).coeffs).sum() < 1e-10


def test_welding_is_increasing_homeomorphism(pair):
    d = np.diff(np.append(pair.welding, pair.welding[0] + TWO_PI))
    assert np.all(d > 0)
    assert pair.stretch >= 1.0


def test_welding_off_grid_interpolation(perturbed):
    t = np.array([0.123, 1.7, 5.9])
    phi = perturbed.phi(t)
    assert np.allclose(perturbed.f(np.exp(1j * t)), perturbed.g(np.exp(1j * phi)), atol=1e-8)
    assert np.allclose(perturbed.phi_inv(phi), t, atol=1e-8)


@pytest.mark.parametrize("z", [0.3 + 0.1j, -0.5j, 1.9, -2 + 3j])
def test_locate_inverts_maps(pair, z):
    side, w = pair.locate(z)
    F = pair.f if side == "interior" else pair.g
    assert F(w) == pytest.approx(z, abs=1e-12)
    assert (abs(w) < 1) == (side == "interior")


def test_level_curves(perturbed):
    lc = perturbed.level_curve("interior", 0.5, 64)
    w = 0.5 * np.exp(1j * lc.theta)
    assert np.allclose(lc.points, perturbed.f(w), atol=1e-14)
    with pytest.raises(ValueError):
        perturbed.level_curve("interior", 1.2)
    with pytest.raises(ValueError):
        perturbed.level_curve("exterior", 0.9)


def test_distance_to_boundary(circle):
    assert circle.distance_to_boundary([0.0, 3.0]) == pytest.approx([1.0, 2.0], abs=1e-6)


def test_pair_json_round_trip(perturbed, tmp_path):
    path = tmp_path / "pair.json"
    path.write_text(json.dumps(perturbed.to_json()))
    back = parse_curve(f"file:{path}")
    assert np.array_equal(back.welding, perturbed.welding)
    assert back.boundary_mismatch == pytest.approx(perturbed.boundary_mismatch)


@pytest.mark.parametrize("spec", ["square", "ellipse:1", "perturbed:0.2,0", "ellipse:0.5,1"])
def test_parse_curve_rejects(spec):
    with pytest.raises(ValueError):
        parse_curve(spec)


def test_parse_curve_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_curve(f"file:{tmp_path / 'nope.json'}")


def test_non_univalent_perturbation_rejected():
    with pytest.raises(ValueError):
        make_perturbed_pair(0.6, 2)


def test_mismatch_check_raises():
    f = ConformalMap("interior", [0, 1])
    g = ConformalMap("exterior", [1.0 + 1e-3, 0])
    pair = ConformalPair(f, g, np.linspace(0, TWO_PI, 64, endpoint=False),
                         np.linspace(0, TWO_PI, 64, endpoint=False))
    with pytest.raises(FitError):
        pair.check()


def test_conformal_map_validation():
    with pytest.raises(ValueError):
        ConformalMap("interior", [0, 0, 1])
    with pytest.raises(ValueError):
        ConformalMap("exterior", [1])
    m = ConformalMap("exterior", [2, 1, 0.5])
    w = np.array([1.5, -2j])
    assert np.allclose(m(w), 2 * w + 1 + 0.5 / w)
    assert np.allclose(m.deriv(w), 2 - 0.5 / w ** 2)
    assert m.validate_univalence() > 0


@given(st.floats(0.05, 0.95), st.integers(8, 64))
@settings(max_examples=25, deadline=None)
def test_on_circle_matches_direct_evaluation(r, M):
    f = ConformalMap("interior", [0.1, 1, 0.2, -0.05j])
    vals, wder = f.on_circle(r, M)
    w = r * np.exp(1j * TWO_PI * np.arange(M) / M)
    assert np.allclose(vals, f(w), atol=1e-13)
    assert np.allclose(wder, w * f.deriv(w), atol=1e-13)


def test_fit_missing_interior_map_of_joukowski():
    g = ConformalMap("exterior", [1.0, 0.0, 0.2])
    f, weld, inv, history = fit_missing_map(g)
    theta = TWO_PI * np.arange(weld.size) / weld.size
    assert np.abs(f(np.exp(1j * theta)) - g(np.exp(1j * weld))).max() < 1e-10
    assert history[-1] < 1e-10


def test_is_simple_closed():
    t = TWO_PI * np.arange(50) / 50
    assert is_simple_closed(np.exp(1j * t))
    bow = np.array([0, 1 + 1j, 1, 1j])
    assert not is_simple_closed(bow)
    assert is_simple_closed(make_ellipse_pair(2.0, 1.0).boundary(200))
