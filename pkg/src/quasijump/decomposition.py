"""Splitting boundary data into boundary values of holomorphic functions on
the two sides of the curve.

Given ``h`` on the curve (plus-side chart), the solver returns ``u_+``
holomorphic inside and ``u_-`` holomorphic outside with ``u_-(inf) = 0``
such that the two boundary traces add up to ``h``.  The pieces are the two
projections of the jump of ``h``; the defect of the sum is reported as a
certificate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .cauchy import (DEFAULT_K_MAX, PROJECTION_K_MAX, ConvergenceTrace, LaurentRep,
                     cauchy_contour, project_coeffs)
from .circle_space import FourierSeries, norm_H0, norm_H0_coeffs, random_fourier_series
from .curves import ConformalPair
from .reflection import DomainFunction

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class JumpResult:
    """Solution of ``h = h_+ + h_-`` with certificates."""

    u_plus: LaurentRep
    u_minus: LaurentRep
    boundary_residual: float
    diagnostics: list = field(default_factory=list)
    norms: dict = field(default_factory=dict)
    tol: float = RESIDUAL_TOL

    @property
    def ok(self) -> bool:
        return bool(self.boundary_residual <= self.tol)

    def to_json(self) -> dict:
        return {
            "u_plus": [[c.real, c.imag] for c in self.u_plus.coeffs.tolist()],
            "u_minus": [[c.real, c.imag] for c in self.u_minus.coeffs.tolist()],
            "residual": self.boundary_residual,
            "norms": self.norms,
            "diagnostics": self.diagnostics,
        }


# ---------------------------------------------------------------------------
# batched kernels


def split_coeffs(pair: ConformalPair, coeffs: np.ndarray, n_out: Optional[int] = None,
                 k_max: int = PROJECTION_K_MAX):
    """``(a, b, info)``: pullback series of ``u_+`` (rows ``w^n``) and ``u_-``
    (rows ``w^{-n}``, row 0 zero) for each column of plus-chart data."""
    a, res_p, chg_p, plan_p = project_coeffs(pair, coeffs, "plus", "plus", n_out, k_max)
    b, res_m, chg_m, plan_m = project_coeffs(pair, coeffs, "minus", "plus", n_out, k_max)
    info = {"expansion_residual_plus": res_p, "expansion_residual_minus": res_m,
            "extrapolation_change_plus": chg_p, "extrapolation_change_minus": chg_m,
            "rho": plan_p.rho, "levels_plus": int(plan_p.radii.size),
            "levels_minus": int(plan_m.radii.size),
            "n_out_plus": int(a.shape[0] - 1), "n_out_minus": int(b.shape[0] - 1)}
    return a, b, info


def recombine_coeffs(pair: ConformalPair, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Plus-chart trace of ``u_+ + u_-`` from their pullback series (columns)."""
    n = max(a.shape[0], b.shape[0]) - 1
    tm = np.zeros((2 * n + 1,) + b.shape[1:], dtype=complex)
    tm[n - b.shape[0] + 1:n + 1] = b[::-1]
    plus_minus = pair.compose_coeffs(tm, "forward")
    K = max(n, (plus_minus.shape[0] - 1) // 2)
    total = np.zeros((2 * K + 1,) + a.shape[1:], dtype=complex)
    total[K:K + a.shape[0]] += a
    m = (plus_minus.shape[0] - 1) // 2
    total[K - m:K + m + 1] += plus_minus
    return total


def residual_coeffs(pair: ConformalPair, a: np.ndarray, b: np.ndarray,
                    h: np.ndarray) -> np.ndarray:
    """``norm_H0(trace(u_+) + C_phi trace(u_-) - h)`` per column."""
    total = recombine_coeffs(pair, a, b)
    K = (total.shape[0] - 1) // 2
    N = (h.shape[0] - 1) // 2
    if N > K:
        total = np.concatenate([np.zeros((N - K,) + total.shape[1:]), total,
                                np.zeros((N - K,) + total.shape[1:])])
        K = N
    total[K - N:K + N + 1] -= h
    return norm_H0_coeffs(total)


def _pointed(a: np.ndarray) -> np.ndarray:
    n = np.arange(a.shape[0]).reshape((-1,) + (1,) * (a.ndim - 1))
    return np.sqrt(np.abs(a[0]) ** 2 + np.sum(n * np.abs(a) ** 2, axis=0))


def _semi(b: np.ndarray) -> np.ndarray:
    n = np.arange(b.shape[0]).reshape((-1,) + (1,) * (b.ndim - 1))
    return np.sqrt(np.sum(n * np.abs(b) ** 2, axis=0))


# ---------------------------------------------------------------------------
# the map K and its inverse


def apply_K(h: DomainFunction, n_out: Optional[int] = None,
            k_max: int = PROJECTION_K_MAX) -> tuple[LaurentRep, LaurentRep]:
    """``(P(Omega^+) h, P(Omega^-) h)`` for ``h`` on the inner domain.

    Data living on the outer domain is first read in the plus chart.
    """
    data = h.plus_trace().coeffs
    a, b, info = split_coeffs(h.pair, data[:, None], n_out, k_max)
    up = LaurentRep(h.pair, "plus", a[:, 0], info["expansion_residual_plus"], info)
    um = LaurentRep(h.pair, "minus", b[:, 0], info["expansion_residual_minus"], info)
    return up, um


def apply_K_inverse(u_plus: LaurentRep, u_minus: LaurentRep) -> DomainFunction:
    """Harmonic function on the inner domain whose trace is the sum of the
    traces of ``u_+`` and ``u_-``."""
    if u_plus.side != "plus" or u_minus.side != "minus":
        raise ValueError("apply_K_inverse expects (plus-side, minus-side) representations")
    if u_plus.pair is not u_minus.pair:
        raise ValueError("both parts must live on the same conformal pair")
    total = recombine_coeffs(u_plus.pair, u_plus.coeffs[:, None], u_minus.coeffs[:, None])
    return DomainFunction.from_trace(u_plus.pair, FourierSeries(total[:, 0]), "plus")


def K_matrix(pair: ConformalPair, N: int, k_max: int = PROJECTION_K_MAX) -> np.ndarray:
    """Matrix of ``K`` on the 2N non-constant modes ``e_n / sqrt|n|``.

    Rows are weighted so that the Euclidean norm of a column is
    ``||u_+||_{D_p} + ...`` in the Hilbert sense: ``|a_0|^2 + sum n |a_n|^2``
    for ``u_+`` stacked with ``sum n |b_n|^2`` for ``u_-``.
    """
    n = np.arange(-N, N + 1)
    nz = np.nonzero(n != 0)[0]
    basis = np.zeros((2 * N + 1, 2 * N), dtype=complex)
    basis[nz, np.arange(2 * N)] = 1.0 / np.sqrt(np.abs(n[nz]))
    a, b, _ = split_coeffs(pair, basis, None, k_max)
    wa = np.sqrt(np.maximum(np.arange(a.shape[0]), 1.0))
    wb = np.sqrt(np.arange(b.shape[0]))
    return np.vstack([wa[:, None] * a, wb[:, None] * b])


def K_singular_values(pair: ConformalPair, N: int) -> np.ndarray:
    return np.linalg.svd(K_matrix(pair, N), compute_uv=False)


# ---------------------------------------------------------------------------
# solver


def _check_input(h: FourierSeries):
    if not isinstance(h, FourierSeries):
        raise TypeError("boundary data must be a FourierSeries in the plus-side chart")


def solve_batch(pair: ConformalPair, data: np.ndarray, n_out: Optional[int] = None,
                k_max: int = PROJECTION_K_MAX):
    """Solve for every column of plus-chart data at once.

    Returns ``(a, b, residuals, info)``.
    """
    data = np.asarray(data, dtype=complex)
    a, b, info = split_coeffs(pair, data, n_out, k_max)
    res = residual_coeffs(pair, a, b, data)
    return a, b, res, info


def solve_riemann_hilbert(h: FourierSeries, pair: ConformalPair, tol: float = RESIDUAL_TOL,
                          n_out: Optional[int] = None,
                          k_max: int = PROJECTION_K_MAX) -> JumpResult:
    """Split ``h`` (plus-side chart) into ``u_+`` and ``u_-``.

    The residual is ``norm_H0(trace(u_+) + C_phi trace(u_-) - h)``; a
    residual above ``tol`` is logged and flagged but the result is still
    returned.
    """
    _check_input(h)
    a, b, res, info = solve_batch(pair, h.coeffs[:, None], n_out, k_max)
    residual = float(res[0])
    up = LaurentRep(pair, "plus", a[:, 0], info["expansion_residual_plus"], info)
    um = LaurentRep(pair, "minus", b[:, 0], info["expansion_residual_minus"], info)
    norms = {
        "h_norm_H0": norm_H0(h),
        "u_plus_pointed": up.pointed_norm(),
        "u_plus_seminorm": up.seminorm(),
        "u_minus_seminorm": um.seminorm(),
    }
    diagnostics = [dict(info, residual=residual)]
    if residual > tol:
        logger.warning("boundary residual %.2e exceeds tolerance %.1e", residual, tol)
    return JumpResult(up, um, residual, diagnostics, norms, tol)


# ---------------------------------------------------------------------------
# continuity


@dataclass(frozen=True)
class ContinuityReport:
    eps: tuple
    max_response: tuple
    ratios: tuple

    @property
    def spread(self) -> float:
        """Largest ratio of Lipschitz estimates across the scales."""
        r = np.asarray(self.ratios)
        return float(r.max() / r.min())

    def as_dict(self) -> dict:
        return {"eps": list(self.eps), "max_response": list(self.max_response),
                "ratios": list(self.ratios), "spread": self.spread}


def _perturbations(N: int, count: int, rng: np.random.Generator, kind: str) -> np.ndarray:
    if kind == "random":
        cols = [random_fourier_series(N, rng).coeffs for _ in range(count)]
        return np.stack(cols, axis=1)
    if kind == "modes":
        modes = np.arange(-N, N + 1)
        pick = rng.choice(modes, size=min(count, modes.size), replace=False)
        out = np.zeros((2 * N + 1, pick.size), dtype=complex)
        out[pick + N, np.arange(pick.size)] = 1.0
        return out
    raise ValueError(f"unknown perturbation kind {kind!r}; use 'random' or 'modes'")


def continuity_probe(pair: ConformalPair, h: FourierSeries, eps: Sequence[float] = (1e-2, 1e-4),
                     count: int = 20, seed: int = 0, kind: str = "random",
                     k_max: int = PROJECTION_K_MAX) -> ContinuityReport:
    """Empirical Lipschitz constant of ``h -> (u_+, u_-)``.

    Each perturbation is scaled to ``norm_H0 = eps``; the response is
    ``||du_+||_{D_p} + ||du_-||_D`` and the ratio is the largest response
    over ``eps``.
    """
    rng = np.random.default_rng(seed)
    N = h.N
    delta = _perturbations(N, count, rng, kind)
    delta = delta / norm_H0_coeffs(delta)[None, :]
    responses, ratios = [], []
    for e in eps:
        data = np.concatenate([h.coeffs[:, None], h.coeffs[:, None] + e * delta], axis=1)
        a, b, _ = split_coeffs(pair, data, None, k_max)
        da = a[:, 1:] - a[:, :1]
        db = b[:, 1:] - b[:, :1]
        resp = float(np.max(_pointed(da) + _semi(db)))
        responses.append(resp)
        ratios.append(resp / e)
    return ContinuityReport(tuple(eps), tuple(responses), tuple(ratios))


# ---------------------------------------------------------------------------
# contour-limit study


@dataclass(frozen=True)
class ConvergenceRow:
    z: complex
    k: int
    r: float
    value: complex
    extrapolant: complex
    extrapolated: complex
    raw_error: float
    step: float


def convergence_study(pair: ConformalPair, h: FourierSeries, points,
                      k_max: int = DEFAULT_K_MAX, side: str = "plus"):
    """Per point and radius: contour value, running extrapolant, the distance
    of the raw value to the limit and the last change of the extrapolant.

    Returns ``(rows, traces)``.
    """
    dom = DomainFunction.from_plus_trace(pair, h, side)
    rows, traces = [], []
    for z in np.atleast_1d(np.asarray(points, dtype=complex)):
        tr: ConvergenceTrace = cauchy_contour(dom, z, side, k_max=k_max)
        traces.append(tr)
        ks = np.rint(-np.log2(np.abs(1.0 - tr.radii))).astype(int)
        for i, (k, r) in enumerate(zip(ks, tr.radii)):
            step = float(abs(tr.extrapolants[i] - tr.extrapolants[i - 1])) if i else float("nan")
            rows.append(ConvergenceRow(complex(z), int(k), float(r), complex(tr.values[i]),
                                       complex(tr.extrapolants[i]), tr.extrapolated,
                                       float(abs(tr.values[i] - tr.extrapolated)), step))
    return rows, traces


def monotone_decay(steps: np.ndarray, floor: float = 1e-13) -> bool:
    """Non-increasing sequence once entries below ``floor`` are treated as equal."""
    s = np.maximum(np.asarray(steps, dtype=float), floor)
    return bool(np.all(np.diff(s) <= 0.0))
