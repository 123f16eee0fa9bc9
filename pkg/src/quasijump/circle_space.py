"""Fourier model of boundary functions on the unit circle and of harmonic
functions of finite Dirichlet energy on the two disks.

A boundary function is stored by its coefficients ``c_n``, ``-N <= n <= N``.
Its harmonic extension to the unit disk is

    H(z) = sum_{n>=0} c_n z^n + sum_{n>=1} c_{-n} conj(z)^n,

and to the exterior disk the same boundary values are carried by
``w^{-n}`` and ``conj(w)^{-n}``.  All Dirichlet integrals are normalised by
``1/pi`` so that ``z`` has unit energy on the disk.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

Side = Literal["interior", "exterior"]

DEFAULT_N = 64


def _as_complex_array(values) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FourierSeries:
    """Truncated Fourier series ``sum_{|n|<=N} c_n e^{in theta}``.

    ``coeffs[k]`` holds ``c_{k-N}``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = _as_complex_array(self.coeffs)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coefficient vector must be 1-D with odd length 2N+1")
        if not np.all(np.isfinite(c)):
            raise ValueError("Fourier coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    def __getitem__(self, n: int) -> complex:
        if abs(n) > self.N:
            return 0j
        return complex(self.coeffs[n + self.N])

    @classmethod
    def zeros(cls, N: int) -> "FourierSeries":
        return cls(np.zeros(2 * N + 1, dtype=complex))

    @classmethod
    def from_modes(cls, modes: dict, N: Optional[int] = None) -> "FourierSeries":
        """Build a series from a ``{n: c_n}`` mapping."""
        if N is None:
            N = max([abs(int(n)) for n in modes] + [0])
        c = np.zeros(2 * N + 1, dtype=complex)
        for n, value in modes.items():
            c[int(n) + N] += value
        return cls(c)

    def resized(self, N: int) -> "FourierSeries":
        """Zero-pad or truncate to order ``N``."""
        out = np.zeros(2 * N + 1, dtype=complex)
        m = min(N, self.N)
        out[N - m:N + m + 1] = self.coeffs[self.N - m:self.N + m + 1]
        return FourierSeries(out)

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        N = max(self.N, other.N)
        return FourierSeries(self.resized(N).coeffs + other.resized(N).coeffs)

    def __sub__(self, other: "FourierSeries") -> "FourierSeries":
        N = max(self.N, other.N)
        return FourierSeries(self.resized(N).coeffs - other.resized(N).coeffs)

    def __mul__(self, scalar) -> "FourierSeries":
        return FourierSeries(self.coeffs * scalar)

    __rmul__ = __mul__

    def __call__(self, theta) -> np.ndarray:
        """Evaluate the trigonometric sum at the angles ``theta``."""
        theta = np.asarray(theta, dtype=float)
        phases = np.exp(1j * np.multiply.outer(theta, self.modes))
        return phases @ self.coeffs

    def samples(self, M: int) -> np.ndarray:
        """Values at the ``M`` equispaced angles ``2 pi j / M``."""
        return samples_from_coeffs(self.coeffs, M)

    def is_real(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1])), initial=0.0) <= tol)

    def to_json(self) -> dict:
        return {"N": self.N, "coeffs": [[c.real, c.imag] for c in self.coeffs.tolist()]}

    @classmethod
    def from_json(cls, data: Union[dict, str]) -> "FourierSeries":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            N = int(data["N"])
            pairs = data["coeffs"]
        except (KeyError, TypeError) as exc:
            raise ValueError("FourierSeries JSON needs keys 'N' and 'coeffs'") from exc
        if len(pairs) != 2 * N + 1:
            raise ValueError(f"expected {2 * N + 1} coefficient pairs for N={N}, got {len(pairs)}")
        return cls(np.array([complex(re, im) for re, im in pairs]))


def samples_from_coeffs(coeffs: np.ndarray, M: int) -> np.ndarray:
    """Evaluate ``sum c_n e^{in theta_j}`` on ``M`` equispaced angles.

    ``coeffs`` may be 2-D, one series per column.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    N = (coeffs.shape[0] - 1) // 2
    if M < 2 * N + 1:
        raise ValueError(f"need M >= 2N+1 = {2 * N + 1} samples, got {M}")
    buf = np.zeros((M,) + coeffs.shape[1:], dtype=complex)
    buf[:N + 1] = coeffs[N:]
    if N:
        buf[M - N:] = coeffs[:N]
    return np.fft.ifft(buf, axis=0) * M


def coeffs_from_samples(samples: np.ndarray, N: int) -> np.ndarray:
    """Inverse of :func:`samples_from_coeffs`, truncating to order ``N``."""
    samples = np.asarray(samples, dtype=complex)
    M = samples.shape[0]
    if M < 2 * N + 1:
        raise ValueError(
            f"{M} samples cannot resolve modes up to N={N}; aliasing needs M >= {2 * N + 1}")
    c = np.fft.fft(samples, axis=0) / M
    return np.concatenate([c[M - N:], c[:N + 1]], axis=0) if N else c[:1]


def fourier_from_samples(samples, N: Optional[int] = None) -> FourierSeries:
    """Discrete Fourier coefficients of samples at ``theta_j = 2 pi j / M``.

    ``N`` defaults to the largest order the grid resolves.
    """
    samples = np.asarray(samples, dtype=complex)
    if samples.ndim != 1 or samples.size < 1:
        raise ValueError("samples must be a non-empty 1-D array")
    if N is None:
        N = (samples.size - 1) // 2
    return FourierSeries(coeffs_from_samples(samples, N))


def seminorm_H(h: FourierSeries) -> float:
    """``sqrt(sum |n| |c_n|^2)``."""
    return float(np.sqrt(np.sum(np.abs(h.modes) * np.abs(h.coeffs) ** 2)))


def norm_H0(h: FourierSeries) -> float:
    return float(np.hypot(abs(h[0]), seminorm_H(h)))


def seminorm_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Column-wise seminorm of (2N+1)-row coefficient arrays."""
    coeffs = np.asarray(coeffs)
    N = (coeffs.shape[0] - 1) // 2
    w = np.abs(np.arange(-N, N + 1)).reshape((-1,) + (1,) * (coeffs.ndim - 1))
    return np.sqrt(np.sum(w * np.abs(coeffs) ** 2, axis=0))


def norm_H0_coeffs(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    N = (coeffs.shape[0] - 1) // 2
    return np.hypot(np.abs(coeffs[N]), seminorm_coeffs(coeffs))


@dataclass(frozen=True, eq=False)
class HarmonicRep:
    """Complex harmonic function on the unit disk or its exterior.

    ``holo[k]`` is the coefficient of ``z^k`` (interior) or ``w^{-k}``
    (exterior).  ``antiholo[k]`` is ``v`` in the term ``conj(v) conj(z)^k``
    (resp. ``conj(v) conj(w)^{-k}``); ``antiholo[0]`` is always zero.
    """

    side: Side
    holo: np.ndarray
    antiholo: np.ndarray

    def __post_init__(self):
        if self.side not in ("interior", "exterior"):
            raise ValueError(f"side must be 'interior' or 'exterior', not {self.side!r}")
        u = _as_complex_array(self.holo)
        v = np.array(self.antiholo, dtype=complex)
        if u.ndim != 1 or v.shape != u.shape:
            raise ValueError("holo and antiholo must be 1-D arrays of equal length")
        v[0] = 0.0
        v.setflags(write=False)
        object.__setattr__(self, "holo", u)
        object.__setattr__(self, "antiholo", v)

    @property
    def N(self) -> int:
        return self.holo.size - 1

    def constant(self) -> complex:
        """``H(0)`` for interior reps, ``H(infinity)`` for exterior ones."""
        return complex(self.holo[0])

    def __call__(self, z):
        return eval_harmonic(self, z)

    def boundary_coeffs(self) -> np.ndarray:
        """Coefficients ``c_{-N}..c_N`` of the boundary values."""
        N = self.N
        c = np.zeros(2 * N + 1, dtype=complex)
        if self.side == "interior":
            c[N:] = self.holo
            c[:N] = np.conj(self.antiholo[1:])[::-1]
        else:
            c[:N + 1] = self.holo[::-1]
            c[N + 1:] = np.conj(self.antiholo[1:])
        return c

    @classmethod
    def from_boundary_coeffs(cls, coeffs: np.ndarray, side: Side) -> "HarmonicRep":
        coeffs = np.asarray(coeffs, dtype=complex)
        N = (coeffs.size - 1) // 2
        anti = np.zeros(N + 1, dtype=complex)
        if side == "interior":
            holo = coeffs[N:].copy()
            anti[1:] = np.conj(coeffs[:N][::-1])
        elif side == "exterior":
            holo = coeffs[:N + 1][::-1].copy()
            anti[1:] = np.conj(coeffs[N + 1:])
        else:
            raise ValueError(f"side must be 'interior' or 'exterior', not {side!r}")
        return cls(side, holo, anti)


def extend(h: FourierSeries, side: Side = "interior") -> HarmonicRep:
    """Harmonic extension of boundary data into the chosen disk."""
    return HarmonicRep.from_boundary_coeffs(h.coeffs, side)


def restrict(H: HarmonicRep) -> FourierSeries:
    """Boundary values of a harmonic rep."""
    return FourierSeries(H.boundary_coeffs())


def reflect_circle(H: HarmonicRep) -> HarmonicRep:
    """``H(z) -> H(1/conj(z))``: the same boundary values on the other side."""
    other = "exterior" if H.side == "interior" else "interior"
    return HarmonicRep.from_boundary_coeffs(H.boundary_coeffs(), other)


def dirichlet_seminorm(H: HarmonicRep) -> float:
    """Normalised Dirichlet energy ``sqrt(sum n (|u_n|^2 + |v_n|^2))``."""
    n = np.arange(H.N + 1)
    return float(np.sqrt(np.sum(n * (np.abs(H.holo) ** 2 + np.abs(H.antiholo) ** 2))))


def pointed_norm(H: HarmonicRep) -> float:
    """Dirichlet norm pointed at 0 (interior) or infinity (exterior)."""
    return float(np.hypot(abs(H.constant()), dirichlet_seminorm(H)))


@dataclass(frozen=True)
class NormReport:
    seminorm_H: float
    norm_H0: float
    dirichlet_seminorm: float
    pointed_norm: float
    basepoint_value: complex

    def as_dict(self) -> dict:
        return {
            "seminorm_H": self.seminorm_H,
            "norm_H0": self.norm_H0,
            "dirichlet_seminorm": self.dirichlet_seminorm,
            "pointed_norm": self.pointed_norm,
            "basepoint_value": [self.basepoint_value.real, self.basepoint_value.imag],
        }


def norm_report(h: FourierSeries, side: Side = "interior") -> NormReport:
    H = extend(h, side)
    return NormReport(
        seminorm_H=seminorm_H(h),
        norm_H0=norm_H0(h),
        dirichlet_seminorm=dirichlet_seminorm(H),
        pointed_norm=pointed_norm(H),
        basepoint_value=H.constant(),
    )


def _geometric_tail(c: np.ndarray, rho: float) -> float:
    """Crude bound for ``sum_{k>N} |c_k| rho^k`` from the last 8 coefficients."""
    mags = np.abs(c[-8:]) if c.size >= 8 else np.abs(c)
    if mags.size < 2 or not np.any(mags > 0):
        return 0.0
    k = np.arange(c.size - mags.size, c.size)
    keep = mags > 0
    slope = np.polyfit(k[keep], np.log(mags[keep]), 1)[0] if keep.sum() >= 2 else 0.0
    q = float(np.exp(slope)) * rho
    if q >= 1.0:
        return float("inf")
    last = float(mags[-1]) * rho ** (c.size - 1)
    return last * q / (1.0 - q)


def eval_harmonic(H: HarmonicRep, z, *, with_tail: bool = False):
    """Evaluate ``H`` at interior (or exterior, incl. ``inf``) points.

    With ``with_tail=True`` a pair ``(value, tail)`` is returned, ``tail``
    being a geometric extrapolation of the truncated part of the series.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    mod = np.abs(z)
    if H.side == "interior":
        if np.any(~np.isfinite(mod)) or np.any(mod >= 1.0):
            bad = z[~(mod < 1.0)][0]
            where = "on the unit circle" if abs(abs(bad) - 1.0) < 1e-15 else "outside the unit disk"
            raise ValueError(f"point {bad} is {where}; interior reps need |z| < 1")
        x = z
        rho = float(mod.max(initial=0.0))
    else:
        finite = np.isfinite(z)
        if np.any(mod[finite] <= 1.0):
            bad = z[finite][mod[finite] <= 1.0][0]
            raise ValueError(f"point {bad} is not in the exterior disk; exterior reps need |w| > 1")
        x = np.where(finite, 1.0 / np.where(finite, z, 1.0), 0.0)
        rho = float(np.abs(x).max(initial=0.0))
    powers = np.power.outer(x, np.arange(H.N + 1))
    value = powers @ H.holo + np.conj(powers) @ np.conj(H.antiholo)
    out = complex(value[0]) if scalar else value
    if not with_tail:
        return out
    tail = _geometric_tail(H.holo, rho) + _geometric_tail(H.antiholo, rho)
    return out, tail


def random_fourier_series(N: int, rng: np.random.Generator, decay: float = 1.25,
                          real: bool = False) -> FourierSeries:
    """Random series with ``c_n = xi_n / (1+|n|)^decay``, ``xi_n`` complex Gaussian."""
    n = np.arange(-N, N + 1)
    xi = (rng.standard_normal(2 * N + 1) + 1j * rng.standard_normal(2 * N + 1)) / np.sqrt(2.0)
    c = xi / (1.0 + np.abs(n)) ** decay
    if real:
        c = 0.5 * (c + np.conj(c[::-1]))
    return FourierSeries(c)


def trim_coeffs(coeffs: np.ndarray, rel_tol: float = 1e-14, min_N: int = 1) -> np.ndarray:
    """Drop symmetric outer modes whose magnitude is below ``rel_tol`` times
    the largest coefficient (column-wise arrays are trimmed jointly)."""
    coeffs = np.asarray(coeffs)
    N = (coeffs.shape[0] - 1) // 2
    mag = np.abs(coeffs).reshape(coeffs.shape[0], -1).max(axis=1)
    scale = mag.max(initial=0.0)
    if scale == 0.0:
        return coeffs[N - min(N, min_N):N + min(N, min_N) + 1]
    sym = np.maximum(mag[N:], mag[N::-1])
    big = np.nonzero(sym > rel_tol * scale)[0]
    keep = max(int(big.max()) if big.size else 0, min(min_N, N))
    return coeffs[N - keep:N + keep + 1]
