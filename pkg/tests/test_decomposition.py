import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quasijump.cauchy import LaurentRep
from quasijump.circle_space import FourierSeries, fourier_from_samples, random_fourier_series
from quasijump.decomposition import (K_matrix, K_singular_values, apply_K, apply_K_inverse,
                                     continuity_probe, convergence_study, monotone_decay,
                                     solve_batch, solve_riemann_hilbert)
from quasijump.reflection import DomainFunction


def plus_trace(pair, func, N=96, M=1024):
    t = 2 * np.pi * np.arange(M) / M
    return fourier_from_samples(func(pair.f(np.exp(1j * t))), N)


def test_circle_split_is_mode_split(circle, rng):
    h = random_fourier_series(16, rng)
    res = solve_riemann_hilbert(h, circle)
    assert res.u_plus.coeffs[:17] == pytest.approx(h.coeffs[16:], abs=1e-12)
    assert res.u_minus.coeffs[1:17] == pytest.approx(h.coeffs[:16][::-1], abs=1e-12)
    assert res.boundary_residual < 1e-10


def test_split_recovers_known_pieces(noncircle):
    p = noncircle.basepoint

    def up(z):
        return 1.0 + z - 0.25j * z ** 3

    def um(z):
        return 0.5 / (z - p) - 0.2 / (z - p) ** 3

    res = solve_riemann_hilbert(plus_trace(noncircle, lambda z: up(z) + um(z)), noncircle)
    assert res.ok
    for z in [0.2 + 0.1j, -0.4j]:
        assert res.u_plus(z) == pytest.approx(up(z), abs=1e-9)
    for z in [2.5, -1.0 + 2.0j]:
        assert res.u_minus(z) == pytest.approx(um(z), abs=1e-9)


def test_u_minus_vanishes_at_infinity(perturbed, rng):
    res = solve_riemann_hilbert(random_fourier_series(16, rng), perturbed)
    assert res.u_minus.coeffs[0] == 0
    assert abs(res.u_minus(1e8)) < 1e-7


@pytest.mark.parametrize("kind", ["plus", "minus"])
def test_expected_jump_one_sided(pair, kind):
    p = pair.basepoint
    if kind == "plus":
        h = DomainFunction.from_trace(pair, plus_trace(pair, lambda z: z ** 2 - 3 * z + 1))
    else:
        h = DomainFunction.from_plus_trace(pair, plus_trace(pair, lambda z: 1 / (z - p) ** 2),
                                           "minus")
    up, um = apply_K(h)
    vanishing = um if kind == "plus" else up
    assert vanishing.seminorm() < 1e-8
    if kind == "plus":
        assert abs(vanishing.coeffs[0]) < 1e-8


def test_K_inverse_round_trip(pair, rng):
    h = DomainFunction.from_trace(pair, random_fourier_series(24, rng))
    up, um = apply_K(h)
    back = apply_K_inverse(up, um)
    diff = back.trace().resized(24).coeffs - h.trace().coeffs
    assert np.abs(diff).max() < 1e-9


def test_K_inverse_rejects_mismatched_sides(perturbed):
    u = LaurentRep(perturbed, "plus", np.array([1.0]))
    with pytest.raises(ValueError):
        apply_K_inverse(u, u)


def test_K_on_circle_is_unitary(circle):
    s = K_singular_values(circle, 16)
    assert s == pytest.approx(np.ones_like(s), abs=1e-12)


def test_K_singular_values_bounded(noncircle):
    s = K_singular_values(noncircle, 16)
    assert 0.5 < s.min() <= 1.0 <= s.max() < 2.0
    assert K_matrix(noncircle, 16).shape[1] == 32


def test_ellipse_K_singular_values(ellipse):
    # regression values: sqrt(1 -+ q) with q = (A - B) / (A + B) = 0.2
    s = K_singular_values(ellipse, 32)
    assert s.min() == pytest.approx(np.sqrt(0.8), abs=1e-6)
    assert s.max() == pytest.approx(np.sqrt(1.2), abs=1e-6)


def test_batch_matches_single(perturbed, rng):
    hs = [random_fourier_series(16, rng) for _ in range(3)]
    a, b, res, _ = solve_batch(perturbed, np.stack([h.coeffs for h in hs], axis=1))
    single = solve_riemann_hilbert(hs[1], perturbed)
    n = single.u_plus.coeffs.size
    # batch and single solves may settle on different series lengths
    assert a[:n, 1] == pytest.approx(single.u_plus.coeffs, abs=1e-11)
    assert res[1] == pytest.approx(single.boundary_residual, abs=1e-11)


@given(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
       st.integers(0, 2 ** 32 - 1))
@settings(max_examples=10, deadline=None)
def test_solver_is_linear(perturbed, c, seed):
    rng = np.random.default_rng(seed)
    h1, h2 = random_fourier_series(8, rng), random_fourier_series(8, rng)
    data = np.stack([h1.coeffs, h2.coeffs, h1.coeffs + c * h2.coeffs], axis=1)
    a, b, _, _ = solve_batch(perturbed, data)
    scale = 1 + abs(c)
    assert np.abs(a[:, 2] - a[:, 0] - c * a[:, 1]).max() < 1e-10 * scale
    assert np.abs(b[:, 2] - b[:, 0] - c * b[:, 1]).max() < 1e-10 * scale


def test_result_json(perturbed, rng):
    res = solve_riemann_hilbert(random_fourier_series(8, rng), perturbed)
    data = json.loads(json.dumps(res.to_json()))
    assert set(data) == {"u_plus", "u_minus", "residual", "norms", "diagnostics"}
    assert data["residual"] == res.boundary_residual


def test_solver_flags_tolerance(perturbed, rng):
    res = solve_riemann_hilbert(random_fourier_series(8, rng), perturbed, tol=1e-30)
    assert not res.ok


def test_solver_rejects_non_series(perturbed):
    with pytest.raises(TypeError):
        solve_riemann_hilbert(np.zeros(3), perturbed)


def test_continuity_probe_on_circle(circle, rng):
    rep = continuity_probe(circle, random_fourier_series(16, rng), count=5, kind="modes")
    # on the circle the split is an orthogonal projection of each mode
    assert rep.ratios == pytest.approx((1.0, 1.0), rel=1e-6)
    assert rep.spread == pytest.approx(1.0, rel=1e-6)


def test_continuity_probe_kinds(perturbed, rng):
    h = random_fourier_series(16, rng)
    assert continuity_probe(perturbed, h, count=5).spread < 1.01
    with pytest.raises(ValueError):
        continuity_probe(perturbed, h, kind="walk")


def test_convergence_study_rows(ellipse, rng):
    h = random_fourier_series(8, rng)
    rows, traces = convergence_study(ellipse, h, [0.3j, 2.0], k_max=10)
    assert len(rows) == 2 * 8
    assert np.isnan(rows[0].step)
    assert all(monotone_decay(t.steps) for t in traces)
    assert rows[-1].raw_error == pytest.approx(abs(traces[-1].values[-1] - traces[-1].extrapolated))


def test_convergence_holomorphic_r_independent(perturbed):
    h = plus_trace(perturbed, lambda z: z ** 4 + 2j * z)
    _, traces = convergence_study(perturbed, h, [0.1 + 0.1j, 3.0])
    for t in traces:
        assert np.ptp(t.values.real) < 1e-10 and np.ptp(t.values.imag) < 1e-10


@pytest.mark.parametrize("steps, ok", [([1e-2, 1e-4, 1e-9], True), ([1e-2, 1e-1], False),
                                       ([1e-3, 1e-15, 3e-14], True), ([1e-3, 1e-15, 1e-12], False)])
def test_monotone_decay(steps, ok):
    assert monotone_decay(np.array(steps)) is ok
