"""The jump operator as a limit of Cauchy integrals over level curves.

For data ``h`` harmonic on one side of the curve, the integral

    V(r, z) = (1/2 pi i) oint_{F(|w|=r)} h(zeta) / (zeta - z) dzeta

is taken over the image of ``|w| = r`` under ``F = f`` (``r < 1``) or
``F = g`` (``r > 1``), always counter-clockwise, and extrapolated to
``r -> 1``.  With the pullback of ``h`` written as ``sum c_n r^{+-|n|}
e^{in theta}`` the integral is linear in the coefficients:

    V(r, z) = sum_n c_n r^{+-|n|} K_n(r, z),
    K_n(r, z) = (1/2 pi) int e^{in theta} w F'(w) / (F(w) - z) dtheta,

and every moment ``K_n`` for one ``z`` comes out of a single FFT of the
sampled kernel.  The trapezoid rule is spectrally accurate here; the number
of nodes is doubled until the moments stop changing.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import roots_legendre

from .circle_space import FourierSeries, trim_coeffs
from .curves import ConformalMap, ConformalPair
from .reflection import DomainFunction, DomainSide, reflect

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

DEFAULT_K_MIN = 3
DEFAULT_K_MAX = 12
DISTANCE_FLOOR = 1e-3
CONVERGENCE_TOL = 1e-8
MAX_NODES = 2 ** 17
# amplification allowed when dividing level-curve coefficients by rho^n
AMPLIFICATION_CAP = 1e4
MAX_SERIES_ORDER = 1024
TAIL_TOL = 1e-10
PROJECTION_K_MAX = 14
MOMENT_CACHE_SIZE = 96


class ContourError(ValueError):
    """Raised when an evaluation point is too close to the curve."""


def r_schedule(side: DomainSide = "plus", k_max: int = DEFAULT_K_MAX,
               k_min: int = DEFAULT_K_MIN) -> np.ndarray:
    """Radii ``1 - 2^{-k}`` (plus) or ``1 + 2^{-k}`` (minus), ``k_min <= k <= k_max``."""
    if k_min < 1 or k_max < k_min:
        raise ValueError(f"need 1 <= k_min <= k_max, got {k_min}, {k_max}")
    k = np.arange(k_min, k_max + 1, dtype=float)
    sign = -1.0 if side == "plus" else 1.0
    return 1.0 + sign * 2.0 ** (-k)


def base_nodes(N: int) -> int:
    return max(1024, 16 * N)


# ---------------------------------------------------------------------------
# Richardson extrapolation


def richardson(values: np.ndarray, ratio: float = 2.0, depth: Optional[int] = None):
    """Romberg tableau for values at ``x_k = x_0 ratio^{-k}``, axis 0.

    Returns the running extrapolants ``E_k`` (the last entry of row ``k``
    of the tableau, of depth at most ``depth``).
    """
    values = np.asarray(values)
    L = values.shape[0]
    if depth is None:
        depth = L - 1
    prev = [values[0]]
    out = np.empty_like(values)
    out[0] = values[0]
    for i in range(1, L):
        row = [values[i]]
        for j in range(1, min(i, depth) + 1):
            fac = ratio ** j
            row.append(row[j - 1] + (row[j - 1] - prev[j - 1]) / (fac - 1.0))
        out[i] = row[-1]
        prev = row
    return out


@dataclass(frozen=True, eq=False)
class ConvergenceTrace:
    """Contour values along a radius schedule and their extrapolated limit.

    ``extrapolants[k]`` is the Richardson limit using levels ``0..k``;
    ``error_estimate`` bounds both ``|values[-1] - extrapolated|`` and the
    last change of the extrapolants.
    """

    z: complex
    side: DomainSide
    radii: np.ndarray
    values: np.ndarray
    extrapolants: np.ndarray
    extrapolated: complex
    error_estimate: float
    change: float
    converged: bool
    nodes: int = 0

    @property
    def errors(self) -> np.ndarray:
        """``|extrapolants[k] - extrapolated|``."""
        return np.abs(self.extrapolants - self.extrapolated)

    @property
    def steps(self) -> np.ndarray:
        """Successive differences of the running extrapolants."""
        return np.abs(np.diff(self.extrapolants))

    def summary(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "side": self.side,
            "levels": int(self.radii.size),
            "extrapolated": [self.extrapolated.real, self.extrapolated.imag],
            "error_estimate": self.error_estimate,
            "change": self.change,
            "converged": self.converged,
            "nodes": self.nodes,
        }


def _make_trace(z, side, radii, values, nodes=0, tol=CONVERGENCE_TOL) -> ConvergenceTrace:
    ext = richardson(values)
    best = complex(ext[-1])
    change = float(abs(ext[-1] - ext[-2])) if ext.size > 1 else float("inf")
    err = max(float(abs(values[-1] - best)), change)
    steps = np.abs(np.diff(ext))
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    converged = change <= tol * scale
    if steps.size >= 3 and not converged:
        logger.warning("contour limit at z=%s did not converge (last change %.2e)", z, change)
    return ConvergenceTrace(complex(z), side, np.asarray(radii), np.asarray(values), ext, best,
                            err, change, bool(converged), nodes)


# ---------------------------------------------------------------------------
# kernel moments


def _moments_at(Fw: np.ndarray, num: np.ndarray, z: np.ndarray, N: int) -> np.ndarray:
    """``K_n(r, z_p)``, ``-N <= n <= N``, from kernel samples on ``M`` nodes
    (``Fw = F(w_j)``, ``num = w_j F'(w_j)``)."""
    M = Fw.size
    kern = num[None, :] / (Fw[None, :] - z[:, None])
    mom = np.fft.ifft(kern, axis=1)
    return np.concatenate([mom[:, M - N:], mom[:, :N + 1]], axis=1) if N else mom[:, :1]


def kernel_moments(F: ConformalMap, r: float, z: np.ndarray, N: int,
                   M: Optional[int] = None, tol: float = 1e-9, chunk: int = 128):
    """Moments with adaptively refined node count.

    Returns ``(moments, nodes)``.  Starting from ``M`` nodes the count is
    doubled until the ``M``- and ``2M``-node moments, weighted by
    ``r^{+-|n|}``, agree to ``tol``; the error of the finer rule is then
    of order ``tol^2``.  The moments do not depend on the data, so recent
    results are cached and shared by repeated solves on one curve.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    return _cached_moments(F, float(r), z.tobytes(), int(N), M or base_nodes(N), tol, chunk)


@lru_cache(maxsize=MOMENT_CACHE_SIZE)
def _cached_moments(F: ConformalMap, r: float, zkey: bytes, N: int, M: int, tol: float,
                    chunk: int):
    z = np.frombuffer(zkey, dtype=complex)
    n = np.abs(np.arange(-N, N + 1))
    weight = r ** n if r < 1 else r ** (-n)
    out = np.empty((z.size, 2 * N + 1), dtype=complex)
    used = M
    samples = {}

    def nodes(m):
        if m not in samples:
            samples[m] = F.on_circle(r, m)
        return samples[m]

    for start in range(0, z.size, chunk):
        zc = z[start:start + chunk]
        m = M
        while True:
            Fw, num = nodes(2 * m)
            fine = _moments_at(Fw, num, zc, N)
            coarse = _moments_at(Fw[::2], num[::2], zc, N)
            gap = np.max(np.abs(fine - coarse) * weight, initial=0.0)
            if gap <= tol or 2 * m >= MAX_NODES:
                if gap > tol:
                    logger.warning("trapezoid rule unresolved at r=%g (gap %.2e)", r, gap)
                break
            m *= 2
        out[start:start + chunk] = fine
        used = max(used, 2 * m)
    out.setflags(write=False)
    return out, used


def _integration_map(pair: ConformalPair, side: DomainSide) -> ConformalMap:
    return pair.f if side == "plus" else pair.g


def _radial_weights(radii: np.ndarray, N: int) -> np.ndarray:
    n = np.abs(np.arange(-N, N + 1))
    return np.where(radii[:, None] < 1.0, radii[:, None] ** n, radii[:, None] ** (-n))


def _valid_levels(pair: ConformalPair, side: DomainSide, z: np.ndarray,
                  radii: np.ndarray, margin: float = 0.02) -> np.ndarray:
    """Levels whose contour keeps the conformal radius of each ``z`` at a
    relative distance above ``margin``.  Points of the integration side
    inside the level set would otherwise switch branch in the limit."""
    ok = np.ones((radii.size, z.size), dtype=bool)
    own = "interior" if side == "plus" else "exterior"
    for p, zp in enumerate(z):
        where, w = pair.locate(zp)
        if where != own:
            continue
        rho = abs(w)
        if side == "plus":
            ok[:, p] = radii > rho * (1.0 + margin)
        else:
            ok[:, p] = radii < rho / (1.0 + margin)
    return ok


def contour_values(pair: ConformalPair, coeffs: np.ndarray, z, side: DomainSide,
                   radii: np.ndarray, M: Optional[int] = None):
    """Contour integrals of the harmonic extensions of ``coeffs`` (columns,
    given in the chart of ``side``) at points ``z`` for every radius.

    Returns ``(values, nodes)`` with ``values`` of shape
    ``(levels, points) + coeffs.shape[1:]``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    # pad the order to a multiple of 64 so that nearby orders share moments
    N0 = (coeffs.shape[0] - 1) // 2
    N = -(-N0 // 64) * 64 if N0 > 64 else N0
    if N > N0:
        pad = np.zeros((N - N0,) + coeffs.shape[1:], dtype=complex)
        coeffs = np.concatenate([pad, coeffs, pad])
    F = _integration_map(pair, side)
    weights = _radial_weights(np.asarray(radii, dtype=float), N)
    flat = coeffs.reshape(coeffs.shape[0], -1)
    out = np.empty((len(radii), z.size, flat.shape[1]), dtype=complex)
    nodes = 0
    for k, r in enumerate(radii):
        mom, used = kernel_moments(F, float(r), z, N, M)
        nodes = max(nodes, used)
        out[k] = mom @ (weights[k][:, None] * flat)
    return out.reshape((len(radii), z.size) + coeffs.shape[1:]), nodes


def _check_distance(pair: ConformalPair, z: np.ndarray, floor: float):
    d = pair.distance_to_boundary(z)
    bad = np.nonzero(d < floor)[0]
    if bad.size:
        zb = z[bad[0]]
        raise ContourError(f"point {zb} lies {d[bad[0]]:.2e} from the curve, below the distance "
                           f"floor {floor:g}; evaluate the series representation instead")


def _side_data(h: DomainFunction, side: DomainSide) -> np.ndarray:
    """Boundary coefficients of ``h``'s extension to ``side`` in that chart."""
    if h.side != side:
        h = reflect(h)
    return h.rep.boundary_coeffs()


# ---------------------------------------------------------------------------
# public operations


def cauchy_contour(h: DomainFunction, z: complex, side_of_integration: Optional[DomainSide] = None,
                   r_sched: Optional[Sequence[float]] = None, *,
                   distance_floor: float = DISTANCE_FLOOR, k_max: int = DEFAULT_K_MAX,
                   tol: float = CONVERGENCE_TOL) -> ConvergenceTrace:
    """Limiting Cauchy integral of ``h`` at ``z`` over level curves of one side.

    ``h`` is first reflected if it lives on the other side.  Radii of the
    schedule for which ``z`` would fall outside the level set are skipped.
    """
    side = side_of_integration or h.side
    z = complex(z)
    zs = np.array([z])
    if np.isfinite(z):
        _check_distance(h.pair, zs, distance_floor)
    radii = np.asarray(r_sched if r_sched is not None else r_schedule(side, k_max), dtype=float)
    if side == "plus" and not np.all((radii > 0) & (radii < 1)):
        raise ValueError("plus-side radii must lie in (0, 1)")
    if side == "minus" and not np.all(radii > 1):
        raise ValueError("minus-side radii must exceed 1")
    if not np.isfinite(z):
        zero = np.zeros(radii.size, dtype=complex)
        return _make_trace(z, side, radii, zero, tol=tol)
    radii = radii[_valid_levels(h.pair, side, zs, radii)[:, 0]]
    if radii.size < 2:
        raise ContourError(f"point {z} is too close to the curve for the radius schedule; "
                           "raise k_max")
    vals, nodes = contour_values(h.pair, _side_data(h, side), zs, side, radii)
    return _make_trace(z, side, radii, vals[:, 0], nodes, tol=tol)


def jump(h: DomainFunction, z: complex, **kwargs) -> complex:
    """``J h (z)``, integrating over the plus side."""
    return cauchy_contour(h, z, "plus", **kwargs).extrapolated


def jump_traces(h: DomainFunction, points, side: DomainSide = "plus",
                k_max: int = DEFAULT_K_MAX, distance_floor: float = DISTANCE_FLOOR):
    """One :class:`ConvergenceTrace` per point."""
    return [cauchy_contour(h, z, side, k_max=k_max, distance_floor=distance_floor)
            for z in np.atleast_1d(np.asarray(points, dtype=complex))]


@dataclass(frozen=True, eq=False)
class LaurentRep:
    """Holomorphic function on one domain via its pullback series.

    ``plus``: ``u(f(w)) = sum_{n>=0} coeffs[n] w^n``.
    ``minus``: ``u(g(w)) = sum_{n>=1} coeffs[n] w^{-n}`` with ``coeffs[0] = 0``.
    """

    pair: ConformalPair
    side: DomainSide
    coeffs: np.ndarray
    residual: float = 0.0
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if self.side == "minus":
            c[0] = 0.0
        elif self.side != "plus":
            raise ValueError(f"side must be 'plus' or 'minus', not {self.side!r}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, pair: ConformalPair, side: DomainSide) -> "LaurentRep":
        return cls(pair, side, np.zeros(1))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def padded(self, n: int) -> np.ndarray:
        out = np.zeros(n + 1, dtype=complex)
        m = min(n, self.order)
        out[:m + 1] = self.coeffs[:m + 1]
        return out

    def seminorm(self) -> float:
        """Dirichlet seminorm ``sqrt(sum n |a_n|^2)``."""
        n = np.arange(self.coeffs.size)
        return float(np.sqrt(np.sum(n * np.abs(self.coeffs) ** 2)))

    def pointed_norm(self) -> float:
        """Norm pointed at ``f(0)`` (plus) or infinity (minus)."""
        return float(np.hypot(abs(self.coeffs[0]), self.seminorm()))

    def trace(self) -> FourierSeries:
        """Boundary values in the chart of the own side."""
        K = self.order
        c = np.zeros(2 * K + 1, dtype=complex)
        if self.side == "plus":
            c[K:] = self.coeffs
        else:
            c[:K + 1] = self.coeffs[::-1]
        return FourierSeries(c)

    def plus_trace(self, n_out: Optional[int] = None) -> FourierSeries:
        if self.side == "plus":
            return self.trace()
        return self.pair.compose_welding(self.trace(), "forward", n_out)

    def as_domain_function(self) -> DomainFunction:
        return DomainFunction.from_trace(self.pair, self.trace(), self.side)

    def eval_pullback(self, w):
        w = np.asarray(w, dtype=complex)
        x = w if self.side == "plus" else 1.0 / w
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def __call__(self, z):
        scalar = np.ndim(z) == 0
        own = "interior" if self.side == "plus" else "exterior"
        out = []
        for zi in np.atleast_1d(np.asarray(z, dtype=complex)):
            if not np.isfinite(zi):
                if self.side == "plus":
                    raise ValueError("infinity is not in the inner domain")
                out.append(0j)
                continue
            where, w = self.pair.locate(zi)
            if where != own:
                raise ValueError(f"point {zi} is not in the {self.side}-side domain")
            out.append(complex(self.eval_pullback(w)))
        return out[0] if scalar else np.array(out)

    def to_json(self) -> dict:
        return {"side": self.side, "coeffs": [[c.real, c.imag] for c in self.coeffs.tolist()]}


# ---------------------------------------------------------------------------
# projections


def projection_radius(n_out: int, cap: float = AMPLIFICATION_CAP) -> float:
    """Evaluation radius ``rho`` with ``rho^{-n_out} = cap``."""
    return float(cap ** (-1.0 / max(n_out, 1)))


@dataclass(frozen=True)
class ProjectionPlan:
    """Where the jump is sampled to expand ``P(Omega^{+-})`` in a series."""

    n_out: int
    samples: int
    rho: float
    radii: np.ndarray
    nodes: Optional[int] = None


def plan_projection(n_out: int, integration: DomainSide = "plus", target: DomainSide = "plus",
                    k_max: int = DEFAULT_K_MAX, k_min: int = DEFAULT_K_MIN) -> ProjectionPlan:
    """Sampling radius, sample count and usable radius levels.

    Samples sit on the level curve of radius ``rho`` (plus target) or
    ``1/rho`` (minus target); levels of the integration side that would
    not separate the samples from the curve are dropped.
    """
    rho = projection_radius(n_out)
    samples = 1
    while samples < 2 * n_out + 2:
        samples *= 2
    samples = max(samples, 64)
    radii = r_schedule(integration, k_max, k_min)
    if integration == target:
        lr = np.abs(np.log(radii))
        # keep levels whose log-gap to the samples is at least half theirs
        radii = radii[lr <= 0.5 * abs(np.log(rho))]
        if radii.size < 2:
            raise ContourError("radius schedule too shallow for the projection; raise k_max")
    return ProjectionPlan(n_out, samples, rho, radii)


def projection_matrix_values(pair: ConformalPair, coeffs: np.ndarray, integration: DomainSide,
                             target: DomainSide, plan: ProjectionPlan):
    """Contour values (levels, samples, columns) on the target level curve
    and the sample points."""
    theta = TWO_PI * np.arange(plan.samples) / plan.samples
    if target == "plus":
        z = pair.f(plan.rho * np.exp(1j * theta))
    else:
        z = pair.g(np.exp(1j * theta) / plan.rho)
    vals, nodes = contour_values(pair, coeffs, z, integration, plan.radii, plan.nodes)
    return vals, z, nodes


def _expand(limit: np.ndarray, plan: ProjectionPlan, target: DomainSide):
    """Series coefficients of the (signed) limit values on the sample curve.

    Returns ``(coeffs, residual)`` where ``residual`` measures the modes
    that must vanish for a holomorphic function of the target side.
    """
    S = plan.samples
    c = np.fft.fft(limit, axis=0) / S
    n = np.arange(plan.n_out + 1)
    if target == "plus":
        a = c[: plan.n_out + 1] / plan.rho ** n.reshape((-1,) + (1,) * (c.ndim - 1))
        wrong = c[S // 2 + 1:]
    else:
        # u(g(w)) = sum b_n w^{-n}; on |w| = 1/rho the mode e^{-in theta} carries b_n rho^n
        idx = (-n) % S
        a = c[idx] / plan.rho ** n.reshape((-1,) + (1,) * (c.ndim - 1))
        wrong = np.concatenate([c[1:S // 2], c[:1]])
    scale = max(1.0, float(np.abs(c).max(initial=0.0)))
    residual = float(np.abs(wrong).max(initial=0.0)) / scale
    return a, residual


def _bandwidth(coeffs: np.ndarray) -> int:
    return (trim_coeffs(coeffs, TAIL_TOL).shape[0] - 1) // 2


def _default_n_out(pair: ConformalPair, coeffs: np.ndarray, integration: DomainSide) -> int:
    """Starting series order: the bandwidth of the data in both charts
    with some headroom, rounded up so that similar data shares cached
    kernel moments."""
    other = pair.compose_coeffs(coeffs, "inverse" if integration == "plus" else "forward")
    band = max(_bandwidth(coeffs), _bandwidth(other))
    return int(np.ceil((1.25 * band + 16) / 64.0)) * 64


def project_coeffs(pair: ConformalPair, coeffs: np.ndarray, target: DomainSide,
                   integration: DomainSide = "plus", n_out: Optional[int] = None,
                   k_max: int = PROJECTION_K_MAX):
    """Pullback series of ``P(Omega^{target})`` applied to columns of
    boundary data given in the chart of ``integration``.

    Without ``n_out`` the series order starts from the bandwidth of the
    data in both charts and doubles until the tail has died out.

    Returns ``(series, residual, extrapolation_change, plan)``;
    ``series`` has ``n_out+1`` rows.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    adaptive = n_out is None
    n_out = n_out or _default_n_out(pair, coeffs, integration)
    while True:
        plan = plan_projection(n_out, integration, target, k_max)
        vals, _, _ = projection_matrix_values(pair, coeffs, integration, target, plan)
        ext = richardson(vals)
        limit = ext[-1]
        change = float(np.abs(ext[-1] - ext[-2]).max(initial=0.0)) if ext.shape[0] > 1 else 0.0
        sign = 1.0 if target == "plus" else -1.0
        series, residual = _expand(sign * limit, plan, target)
        if not adaptive or n_out >= MAX_SERIES_ORDER:
            break
        # the last eighth of the series must have died out
        tail = np.abs(series[-(n_out // 8):]).max(initial=0.0)
        if tail <= TAIL_TOL * max(1.0, float(np.abs(series).max(initial=0.0))):
            break
        n_out *= 2
    if target == "minus":
        residual = max(residual, float(np.abs(series[0]).max(initial=0.0)))
        series[0] = 0.0
    return series, residual, change, plan


def _project(h: DomainFunction, target: DomainSide, side_of_integration: Optional[DomainSide],
             n_out: Optional[int], k_max: int) -> LaurentRep:
    side = side_of_integration or "plus"
    data = _side_data(h, side)
    series, residual, change, plan = project_coeffs(h.pair, data, target, side, n_out, k_max)
    diag = {"expansion_residual": residual, "extrapolation_change": change,
            "rho": plan.rho, "levels": int(plan.radii.size), "n_out": plan.n_out}
    return LaurentRep(h.pair, target, series, residual, diag)


def project_plus(h: DomainFunction, side_of_integration: Optional[DomainSide] = None,
                 n_out: Optional[int] = None, k_max: int = PROJECTION_K_MAX) -> LaurentRep:
    """``P(Omega^+) h``: the jump restricted to the inner domain."""
    return _project(h, "plus", side_of_integration, n_out, k_max)


def project_minus(h: DomainFunction, side_of_integration: Optional[DomainSide] = None,
                  n_out: Optional[int] = None, k_max: int = PROJECTION_K_MAX) -> LaurentRep:
    """``P(Omega^-) h = -J h`` on the outer domain, normalised to vanish at infinity."""
    return _project(h, "minus", side_of_integration, n_out, k_max)


@dataclass(frozen=True)
class PiAgreement:
    max_difference: float
    points: np.ndarray
    plus_values: np.ndarray
    minus_values: np.ndarray
    traces_plus: list
    traces_minus: list


def pi_operators_agree(h_plus: DomainFunction, h_minus: Optional[DomainFunction], z_grid,
                       k_max: int = DEFAULT_K_MAX) -> PiAgreement:
    """Compare the limiting integrals of the two one-sided extensions.

    ``h_minus`` defaults to the reflection of ``h_plus``.
    """
    if h_minus is None:
        h_minus = reflect(h_plus)
    z_grid = np.atleast_1d(np.asarray(z_grid, dtype=complex))
    tp = jump_traces(h_plus, z_grid, "plus", k_max)
    tm = jump_traces(h_minus, z_grid, "minus", k_max)
    a = np.array([t.extrapolated for t in tp])
    b = np.array([t.extrapolated for t in tm])
    return PiAgreement(float(np.abs(a - b).max(initial=0.0)), z_grid, a, b, tp, tm)


def limit_values(pair: ConformalPair, coeffs: np.ndarray, z, side: DomainSide,
                 k_max: int = DEFAULT_K_MAX, distance_floor: float = DISTANCE_FLOOR):
    """Extrapolated contour limits for columns of data (chart of ``side``)
    at many points; points sharing the same usable levels are batched.

    Returns ``(limits, changes)`` of shape ``(points, columns)``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_distance(pair, z, distance_floor)
    radii = r_schedule(side, k_max)
    ok = _valid_levels(pair, side, z, radii)
    limits = np.empty((z.size, coeffs.shape[1]), dtype=complex)
    changes = np.empty((z.size, coeffs.shape[1]))
    groups = {}
    for p in range(z.size):
        groups.setdefault(ok[:, p].tobytes(), []).append(p)
    for key, idx in groups.items():
        mask = np.frombuffer(key, dtype=bool)
        if mask.sum() < 2:
            raise ContourError(f"point {z[idx[0]]} is too close to the curve for the schedule")
        vals, _ = contour_values(pair, coeffs, z[idx], side, radii[mask])
        ext = richardson(vals)
        limits[idx] = ext[-1]
        changes[idx] = np.abs(ext[-1] - ext[-2])
    return limits, changes


def pi_agreement_batch(pair: ConformalPair, plus_coeffs: np.ndarray, z_grid,
                       k_max: int = DEFAULT_K_MAX) -> np.ndarray:
    """``max_z |Pi_+ - Pi_-|`` for each column of plus-chart data.

    The minus-side data is the harmonic extension of the same boundary
    values, obtained through the welding.
    """
    plus_coeffs = np.asarray(plus_coeffs, dtype=complex)
    minus_coeffs = pair.compose_coeffs(plus_coeffs, "inverse")
    a, _ = limit_values(pair, plus_coeffs, z_grid, "plus", k_max)
    b, _ = limit_values(pair, minus_coeffs, z_grid, "minus", k_max)
    return np.abs(a - b).max(axis=0)


def default_z_grid(pair: ConformalPair, n: int = 20, inner: float = 0.5,
                   outer: float = 2.0) -> np.ndarray:
    """Half the points on an inner level curve, half on an outer one."""
    m = n // 2
    t = TWO_PI * (np.arange(m) + 0.25) / m
    zin = pair.f(inner * np.exp(1j * t))
    zout = pair.g(outer * np.exp(1j * (t + 0.1)))
    return np.concatenate([zin, zout])


# ---------------------------------------------------------------------------
# area-integral oracle on the unit disk


def t_operator_disk_oracle(phi: Callable, z: complex, n_radial: int = 64,
                           n_angular: int = 256) -> complex:
    """``(1/pi) iint_{|zeta|<1} phi(zeta) / (zeta - z) dA`` by polar quadrature.

    For ``|z| < 1`` the polar frame is centred at ``z``, which cancels the
    kernel singularity; otherwise it is centred at 0.  Gauss-Legendre in the
    radius, trapezoid in the angle.
    """
    z = complex(z)
    x, wx = roots_legendre(n_radial)
    alpha = TWO_PI * np.arange(n_angular) / n_angular
    e = np.exp(1j * alpha)
    if abs(z) < 1.0:
        b = np.real(np.conj(z) * e)
        smax = -b + np.sqrt(b * b + 1.0 - abs(z) ** 2)
        s = 0.5 * (x[:, None] + 1.0) * smax[None, :]
        zeta = z + s * e[None, :]
        # dA / (zeta - z) = s ds dalpha / (s e^{i alpha})
        integrand = phi(zeta) / e[None, :]
        radial = 0.5 * smax * (wx @ integrand)
        return complex(np.sum(radial) * (TWO_PI / n_angular) / np.pi)
    s = 0.5 * (x + 1.0)
    zeta = s[:, None] * e[None, :]
    integrand = phi(zeta) * s[:, None] / (zeta - z)
    return complex(0.5 * (wx @ integrand).sum() * (TWO_PI / n_angular) / np.pi)
