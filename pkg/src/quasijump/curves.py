"""Concrete quasicircles given by a pair of conformal maps.

``f`` maps the unit disk onto the bounded domain, ``g`` maps the exterior
disk onto the unbounded one with ``g(inf) = inf``.  The welding
``phi = g^{-1} o f`` is stored as samples on an equispaced grid together
with samples of its inverse, so compositions on that grid need no
interpolation.  Off-grid values use monotone cubic interpolation.

One of the two maps is known in closed form; the other is fitted with a
Theodorsen iteration in polar coordinates about the basepoint, which needs
the curve to be starlike about that point.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Literal, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .circle_space import FourierSeries, coeffs_from_samples, trim_coeffs

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi

DEFAULT_WELDING_GRID = 4096
DEFAULT_FIT_GRID = 4096
DEFAULT_MISMATCH_TOL = 1e-8
MAP_ORDERS = (64, 128, 256, 512)


class FitError(RuntimeError):
    """Raised when the missing conformal map cannot be fitted."""

    def __init__(self, message: str, history=()):
        super().__init__(message)
        self.history = list(history)


@dataclass(frozen=True, eq=False)
class ConformalMap:
    """Interior map ``sum_{n>=0} a_n z^n`` or exterior map
    ``c w + c_0 + sum_{n>=1} c_{-n} w^{-n}``.

    Exterior coefficients are stored as ``[c, c_0, c_{-1}, c_{-2}, ...]``.
    """

    side: Literal["interior", "exterior"]
    coeffs: np.ndarray
    kind: Literal["closed-form", "fitted"] = "closed-form"

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if self.side not in ("interior", "exterior"):
            raise ValueError(f"unknown side {self.side!r}")
        if c.ndim != 1 or c.size < 2:
            raise ValueError("a conformal map needs at least two coefficients")
        if c[1 if self.side == "interior" else 0] == 0:
            raise ValueError("leading derivative coefficient must be nonzero")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - (1 if self.side == "interior" else 2)

    @property
    def derivative_coeff(self) -> complex:
        """``f'(0)`` or ``g'(inf)``."""
        return complex(self.coeffs[1] if self.side == "interior" else self.coeffs[0])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        if self.side == "interior":
            return np.polynomial.polynomial.polyval(z, self.coeffs)
        x = 1.0 / z
        return self.coeffs[0] * z + np.polynomial.polynomial.polyval(x, self.coeffs[1:])

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        if self.side == "interior":
            n = np.arange(1, self.coeffs.size)
            return np.polynomial.polynomial.polyval(z, n * self.coeffs[1:])
        if self.coeffs.size <= 2:
            return np.full(z.shape, self.coeffs[0])
        x = 1.0 / z
        n = np.arange(1, self.coeffs.size - 1)
        tail = np.polynomial.polynomial.polyval(x, -n * self.coeffs[2:])
        return self.coeffs[0] + tail * x * x

    def on_circle(self, r: float, M: int):
        """``F(w_j)`` and ``w_j F'(w_j)`` at ``w_j = r e^{2 pi i j / M}`` via the FFT."""
        if self.side == "interior":
            n = np.arange(self.coeffs.size)
            a = self.coeffs * r ** n
        else:
            n = np.concatenate([[1], -np.arange(self.coeffs.size - 1)])
            a = self.coeffs * r ** n.astype(float)
        vals = np.zeros(M, dtype=complex)
        ders = np.zeros(M, dtype=complex)
        np.add.at(vals, n % M, a)
        np.add.at(ders, n % M, n * a)
        return np.fft.ifft(vals) * M, np.fft.ifft(ders) * M

    def to_json(self) -> list:
        return [[c.real, c.imag] for c in self.coeffs.tolist()]

    def validate_univalence(self, n: int = 256, radius: Optional[float] = None) -> float:
        """Smallest pairwise distance between ``n`` samples near the boundary.

        Distinct values are necessary (not sufficient) for univalence.
        """
        if radius is None:
            radius = 0.99 if self.side == "interior" else 1.01
        pts = self(radius * np.exp(1j * TWO_PI * np.arange(n) / n))
        d = np.abs(pts[:, None] - pts[None, :])
        d[np.diag_indices(n)] = np.inf
        dmin = float(d.min())
        if not dmin > 0.0:
            raise ValueError("map takes repeated values on the validation grid")
        return dmin


@dataclass(frozen=True, eq=False)
class LevelCurve:
    """Image of ``|w| = r`` under ``f`` (``r < 1``) or ``g`` (``r > 1``).

    ``dzdt`` is the derivative with respect to the circle angle, so that
    ``int F dz ~ (2 pi / M) sum F_j dzdt_j``.
    """

    side: Literal["interior", "exterior"]
    r: float
    theta: np.ndarray
    points: np.ndarray
    dzdt: np.ndarray

    @property
    def M(self) -> int:
        return self.points.size


def _unwrap_periodic(values: np.ndarray) -> np.ndarray:
    return np.unwrap(values)


def _solve_angle(curve: Callable, dcurve: Callable, center: complex, targets: np.ndarray,
                 start: np.ndarray, tol: float = 1e-15, max_iter: int = 60) -> np.ndarray:
    """Find ``t`` with ``arg(curve(e^{it}) - center) = targets`` (mod 2 pi).

    Vectorised safeguarded Newton; the polar angle must be increasing in
    ``t`` (starlike curve).
    """
    t = np.array(start, dtype=float)
    for _ in range(max_iter):
        w = np.exp(1j * t)
        val = curve(w) - center
        speed = np.real(w * dcurve(w) / val)
        if np.any(speed <= 0):
            raise FitError("curve is not starlike about its basepoint; "
                           "outside the supported curve class")
        res = np.angle(val * np.exp(-1j * targets))
        step = np.clip(res / speed, -0.5, 0.5)
        t -= step
        if np.max(np.abs(step)) < tol:
            break
    return t


def _conjugate(u: np.ndarray) -> np.ndarray:
    """Periodic conjugate function of real samples via the FFT."""
    M = u.size
    k = np.fft.fftfreq(M, d=1.0 / M)
    uh = np.fft.fft(u)
    vh = -1j * np.sign(k) * uh
    if M % 2 == 0:
        vh[M // 2] = 0.0
    return np.real(np.fft.ifft(vh))


def _theodorsen(curve: Callable, dcurve: Callable, center: complex, M: int, exterior: bool,
                tol: float = 1e-14, max_iter: int = 200):
    """Boundary correspondence of the Riemann map onto a starlike curve.

    Returns ``(t, history)``: ``t[j]`` is the curve parameter hit by
    ``e^{i theta_j}``, ``theta_j = 2 pi j / M``.
    """
    theta = TWO_PI * np.arange(M) / M
    sign = -1.0 if exterior else 1.0
    psi = theta.copy()
    t = theta.copy()
    history = []
    for _ in range(max_iter):
        t = _solve_angle(curve, dcurve, center, psi, t)
        log_rho = np.log(np.abs(curve(np.exp(1j * t)) - center))
        psi_new = theta + sign * _conjugate(log_rho)
        change = float(np.max(np.abs(psi_new - psi)))
        history.append(change)
        psi = psi_new
        if change < tol:
            break
    else:
        if history[-1] > 1e-10:
            raise FitError(f"Theodorsen iteration did not converge (last change {history[-1]:.2e})",
                           history)
    t = _solve_angle(curve, dcurve, center, psi, t)
    return _unwrap_periodic(t), history


def _check_monotone(samples: np.ndarray, what: str):
    d = np.diff(np.concatenate([samples, [samples[0] + TWO_PI]]))
    if np.any(d <= 0):
        raise FitError(f"{what} is not strictly increasing; curve outside supported class")


@dataclass(frozen=True, eq=False)
class ConformalPair:
    """Interior/exterior conformal maps of one curve and their welding.

    ``welding[j] = phi(theta_j)`` and ``welding_inv[j] = phi^{-1}(theta_j)``
    on ``theta_j = 2 pi j / M``, both unwrapped so that they increase by
    ``2 pi`` over a period.
    """

    f: ConformalMap
    g: ConformalMap
    welding: np.ndarray
    welding_inv: np.ndarray
    name: str = "curve"
    tol: float = DEFAULT_MISMATCH_TOL
    boundary_mismatch: float = field(init=False)
    fit_history: tuple = ()

    def __post_init__(self):
        if self.f.side != "interior" or self.g.side != "exterior":
            raise ValueError("pair needs an interior map f and an exterior map g")
        for attr in ("welding", "welding_inv"):
            arr = np.array(getattr(self, attr), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        if self.welding.shape != self.welding_inv.shape:
            raise ValueError("welding and its inverse must share a grid")
        _check_monotone(self.welding, "welding")
        _check_monotone(self.welding_inv, "inverse welding")
        object.__setattr__(self, "boundary_mismatch", self._mismatch())

    @property
    def M(self) -> int:
        return self.welding.size

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.M) / self.M

    @property
    def basepoint(self) -> complex:
        return complex(self.f.coeffs[0])

    def _mismatch(self) -> float:
        a = self.f(np.exp(1j * self.theta)) - self.g(np.exp(1j * self.welding))
        b = self.f(np.exp(1j * self.welding_inv)) - self.g(np.exp(1j * self.theta))
        return float(max(np.abs(a).max(), np.abs(b).max()))

    def check(self):
        if not self.boundary_mismatch <= self.tol:
            raise FitError(f"{self.name}: boundary mismatch {self.boundary_mismatch:.2e} "
                           f"exceeds tolerance {self.tol:.1e}", self.fit_history)
        return self

    # welding as a function -------------------------------------------------

    def _interp(self, samples: np.ndarray) -> Callable:
        x = np.concatenate([self.theta - TWO_PI, self.theta, self.theta + TWO_PI])
        y = np.concatenate([samples - TWO_PI, samples, samples + TWO_PI])
        return PchipInterpolator(x, y)

    def phi(self, theta):
        """Welding at arbitrary angles (monotone cubic off the grid)."""
        return self._eval_periodic(self.welding, theta)

    def phi_inv(self, theta):
        return self._eval_periodic(self.welding_inv, theta)

    def _eval_periodic(self, samples, theta):
        theta = np.asarray(theta, dtype=float)
        k = np.floor(theta / TWO_PI)
        return self._interp(samples)(theta - k * TWO_PI) + k * TWO_PI

    def welding_samples(self, M: int, direction: str = "forward") -> np.ndarray:
        """Welding values on an ``M``-point grid; exact when ``M`` divides the stored grid."""
        stored = self.welding if direction == "forward" else self.welding_inv
        if direction not in ("forward", "inverse"):
            raise ValueError(f"direction must be 'forward' or 'inverse', not {direction!r}")
        if self.M % M == 0:
            return stored[:: self.M // M]
        return self._eval_periodic(stored, TWO_PI * np.arange(M) / M)

    # compositions ----------------------------------------------------------

    def compose_coeffs(self, coeffs: np.ndarray, direction: str = "forward",
                       n_out: Optional[int] = None, M: Optional[int] = None) -> np.ndarray:
        """Coefficients of ``h o phi`` (or ``h o phi^{-1}``), column-wise.

        ``coeffs`` has ``2N+1`` rows ordered ``n = -N..N``.
        """
        coeffs = np.asarray(coeffs, dtype=complex)
        N = (coeffs.shape[0] - 1) // 2
        if M is None:
            # the stored grid is exact; leave it only when it cannot resolve
            # the stretched spectrum
            need = 2 * max(n_out or 0, int(np.ceil(N * self.stretch)) + 16) + 1
            M = self.M
            while M < need:
                M *= 2
        nodes = self.welding_samples(M, direction)
        basis = np.exp(1j * np.multiply.outer(nodes, np.arange(-N, N + 1)))
        if n_out is None:
            return trim_coeffs(coeffs_from_samples(basis @ coeffs, M // 2 - 1))
        return coeffs_from_samples(basis @ coeffs, n_out)

    def compose_welding(self, h: FourierSeries, direction: str = "forward",
                        n_out: Optional[int] = None) -> FourierSeries:
        """``h o phi`` (``forward``) or ``h o phi^{-1}`` (``inverse``).

        Without ``n_out`` the output order adapts to the spectrum, which the
        welding stretches by up to ``max phi'``.
        """
        return FourierSeries(self.compose_coeffs(h.coeffs, direction, n_out))

    @cached_property
    def stretch(self) -> float:
        """Largest slope of the welding or its inverse."""
        d = np.diff(np.concatenate([self.welding, [self.welding[0] + TWO_PI]]))
        di = np.diff(np.concatenate([self.welding_inv, [self.welding_inv[0] + TWO_PI]]))
        return float(max(d.max(), di.max()) * self.M / TWO_PI)

    # geometry --------------------------------------------------------------

    def level_curve(self, side: str, r: float, M: int = 1024) -> LevelCurve:
        if side == "interior":
            if not 0.0 < r < 1.0:
                raise ValueError(f"interior level curves need 0 < r < 1, got r={r}")
            F = self.f
        elif side == "exterior":
            if not r > 1.0:
                raise ValueError(f"exterior level curves need r > 1, got r={r}")
            F = self.g
        else:
            raise ValueError(f"side must be 'interior' or 'exterior', not {side!r}")
        theta = TWO_PI * np.arange(M) / M
        vals, wder = F.on_circle(r, M)
        return LevelCurve(side, r, theta, vals, 1j * wder)

    def boundary(self, M: Optional[int] = None) -> np.ndarray:
        M = M or self.M
        return self.f(np.exp(1j * TWO_PI * np.arange(M) / M))

    def distance_to_boundary(self, z) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        gamma = self.boundary()
        out = np.empty(z.shape)
        for i, zi in enumerate(z):
            out[i] = np.abs(gamma - zi).min()
        return out

    def locate(self, z: complex):
        """Return ``(side, w)`` with ``f(w) = z`` (``|w| < 1``) or ``g(w) = z``."""
        z = complex(z)
        if np.isinf(z):
            return "exterior", complex(np.inf)
        gamma = self.boundary()
        winding = np.sum(np.angle(np.roll(gamma - z, -1) / (gamma - z))) / TWO_PI
        if round(winding) == 1:
            side, F = "interior", self.f
            radii = np.linspace(0.0, 0.999, 64)
        else:
            side, F = "exterior", self.g
            radii = 1.0 + np.geomspace(1e-3, 1e3, 96)
        grid = np.multiply.outer(radii, np.exp(1j * TWO_PI * np.arange(128) / 128)).ravel()
        w = grid[np.argmin(np.abs(F(grid) - z))]
        for _ in range(100):
            step = (F(w) - z) / F.deriv(w)
            w = w - step
            if side == "interior" and abs(w) >= 1.0:
                w = w / abs(w) * 0.9999999
            if side == "exterior" and abs(w) <= 1.0:
                w = w / abs(w) * 1.0000001
            if abs(step) < 1e-15 * max(1.0, abs(w)):
                break
        return side, complex(w)

    # serialisation ---------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "f": self.f.to_json(),
            "g": self.g.to_json(),
            "f_kind": self.f.kind,
            "g_kind": self.g.kind,
            "welding": [[t, p] for t, p in zip(self.theta.tolist(), self.welding.tolist())],
            "welding_inverse": self.welding_inv.tolist(),
            "basepoint": [self.basepoint.real, self.basepoint.imag],
            "mismatch": self.boundary_mismatch,
            "tol": self.tol,
        }

    @classmethod
    def from_json(cls, data) -> "ConformalPair":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            f = ConformalMap("interior", [complex(a, b) for a, b in data["f"]],
                             data.get("f_kind", "fitted"))
            g = ConformalMap("exterior", [complex(a, b) for a, b in data["g"]],
                             data.get("g_kind", "fitted"))
            weld = np.array([p for _, p in data["welding"]], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed pair JSON: {exc}") from exc
        if "welding_inverse" in data:
            inv = np.array(data["welding_inverse"], dtype=float)
        else:
            inv = _inverse_welding_from_maps(f, g, weld.size)
        return cls(f, g, weld, inv, name=data.get("name", "file"),
                   tol=float(data.get("tol", DEFAULT_MISMATCH_TOL)))


def _inverse_welding_from_maps(f: ConformalMap, g: ConformalMap, M: int) -> np.ndarray:
    theta = TWO_PI * np.arange(M) / M
    center = complex(f.coeffs[0])
    target = np.angle(g(np.exp(1j * theta)) - center)
    start = np.unwrap(target)
    return _unwrap_periodic(_solve_angle(f, f.deriv, center, target, start))


def _forward_welding_from_maps(f: ConformalMap, g: ConformalMap, M: int) -> np.ndarray:
    theta = TWO_PI * np.arange(M) / M
    center = complex(f.coeffs[0])
    target = np.angle(f(np.exp(1j * theta)) - center)
    start = np.unwrap(target)
    return _unwrap_periodic(_solve_angle(g, g.deriv, center, target, start))


def _anchor(samples: np.ndarray) -> np.ndarray:
    """Shift an unwrapped welding so that its first sample lies in [-pi, pi)."""
    return samples - TWO_PI * np.floor((samples[0] + np.pi) / TWO_PI)


# ---------------------------------------------------------------------------
# fitting


def fit_missing_map(known: ConformalMap, center: complex = 0.0, *,
                    M: int = DEFAULT_FIT_GRID, welding_grid: int = DEFAULT_WELDING_GRID,
                    orders=MAP_ORDERS, target: float = 1e-13, max_iter: int = 200):
    """Fit the conformal map of the other side of ``known``'s boundary curve.

    Returns ``(fitted_map, welding, welding_inv, history)``.  The map order
    starts at ``orders[0]`` and doubles until the boundary mismatch is below
    ``target`` (or the largest order is reached).
    """
    exterior = known.side == "interior"
    t, history = _theodorsen(known, known.deriv, center, M, exterior=exterior,
                             max_iter=max_iter)
    samples = known(np.exp(1j * t))
    theta = TWO_PI * np.arange(welding_grid) / welding_grid
    best = None
    for order in orders:
        c = coeffs_from_samples(samples, order)
        if exterior:
            # g(w) = c w + c_0 + sum c_{-n} w^{-n}
            coeffs = np.concatenate([[c[order + 1]], c[order::-1]])[: order + 2]
            fitted = ConformalMap("exterior", coeffs, "fitted")
            f, g = known, fitted
        else:
            coeffs = c[order:].copy()
            coeffs[0] = center
            fitted = ConformalMap("interior", coeffs, "fitted")
            f, g = fitted, known
        weld = _anchor(_forward_welding_from_maps(f, g, welding_grid))
        inv = _anchor(_inverse_welding_from_maps(f, g, welding_grid))
        mism = max(np.abs(f(np.exp(1j * theta)) - g(np.exp(1j * weld))).max(),
                   np.abs(f(np.exp(1j * inv)) - g(np.exp(1j * theta))).max())
        logger.debug("order %d: mismatch %.3e", order, mism)
        if best is None or mism < best[-1]:
            best = (fitted, weld, inv, mism)
        if mism <= target:
            break
    fitted, weld, inv, _ = best
    return fitted, weld, inv, history


def make_circle_pair(center: complex = 0.0, radius: float = 1.0, rotation: float = 0.0,
                     M: int = DEFAULT_WELDING_GRID) -> ConformalPair:
    """Circle ``|z - center| = radius``; ``f(z) = center + radius e^{i rotation} z``."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    f = ConformalMap("interior", [center, radius * np.exp(1j * rotation)])
    g = ConformalMap("exterior", [radius, center])
    theta = TWO_PI * np.arange(M) / M
    return ConformalPair(f, g, theta + rotation, theta - rotation, name="circle",
                         fit_history=(0.0,)).check()


def make_ellipse_pair(A: float, B: float, center: complex = 0.0,
                      M: int = DEFAULT_WELDING_GRID) -> ConformalPair:
    """Ellipse with semi-axes ``A >= B > 0``; ``g`` is the Joukowski-type map."""
    if not A >= B > 0:
        raise ValueError(f"need A >= B > 0, got A={A}, B={B}")
    g = ConformalMap("exterior", [(A + B) / 2.0, center, (A - B) / 2.0])
    if A == B:
        return make_circle_pair(center, A, M=M)
    f, weld, inv, hist = fit_missing_map(g, center, welding_grid=M)
    return ConformalPair(f, g, weld, inv, name=f"ellipse:{A:g},{B:g}",
                         fit_history=tuple(hist)).check()


def make_perturbed_pair(a: complex, m: int, center: complex = 0.0,
                        M: int = DEFAULT_WELDING_GRID) -> ConformalPair:
    """Curve ``f(S^1)`` for ``f(z) = center + z + a z^m``, ``|a| < 1/m``."""
    m = int(m)
    if m < 2:
        raise ValueError("perturbation degree m must be >= 2")
    if not abs(a) < 1.0 / m:
        raise ValueError(f"|a| = {abs(a):g} must be < 1/m = {1.0 / m:g} for univalence")
    if a == 0:
        return make_circle_pair(center, M=M)
    coeffs = np.zeros(m + 1, dtype=complex)
    coeffs[0], coeffs[1], coeffs[m] = center, 1.0, a
    f = ConformalMap("interior", coeffs)
    g, weld, inv, hist = fit_missing_map(f, center, welding_grid=M)
    return ConformalPair(f, g, weld, inv, name=f"perturbed:{complex(a).real:g},{complex(a).imag:g},{m}",
                         fit_history=tuple(hist)).check()


def parse_curve(spec: str) -> ConformalPair:
    """``circle | ellipse:A,B | perturbed:a_re,a_im,m | file:path``."""
    kind, _, args = spec.partition(":")
    try:
        if kind == "circle":
            return make_circle_pair()
        if kind == "ellipse":
            A, B = (float(x) for x in args.split(","))
            return make_ellipse_pair(A, B)
        if kind == "perturbed":
            re_, im_, m = args.split(",")
            return make_perturbed_pair(complex(float(re_), float(im_)), int(m))
        if kind == "file":
            with open(args) as fh:
                return ConformalPair.from_json(json.load(fh))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad curve spec {spec!r}: {exc}") from exc
    raise ValueError(f"unknown curve spec {spec!r}; use circle, ellipse:A,B, "
                     "perturbed:a_re,a_im,m or file:path")


def is_simple_closed(points: np.ndarray) -> bool:
    """True if the closed polygon through ``points`` has no self-intersections."""
    p = np.asarray(points, dtype=complex)
    q = np.roll(p, -1)
    n = p.size

    def cross(a, b):
        return a.real * b.imag - a.imag * b.real

    for i in range(n):
        j = np.arange(i + 2, n)
        if i == 0:
            j = j[j != n - 1]
        if j.size == 0:
            continue
        d1 = cross(q[i] - p[i], p[j] - p[i])
        d2 = cross(q[i] - p[i], q[j] - p[i])
        d3 = cross(q[j] - p[j], p[i] - p[j])
        d4 = cross(q[j] - p[j], q[i] - p[j])
        if np.any((d1 * d2 < 0) & (d3 * d4 < 0)):
            return False
    return True
