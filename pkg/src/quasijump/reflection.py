"""Harmonic reflection across a curve through its welding.

A harmonic function on the inner domain is stored by its pullback under
``f``; the reflection restricts the pullback to the circle, transports the
boundary values with ``phi^{-1}``, extends them harmonically to the exterior
disk and reads the result through ``g``.  The other direction is symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np

from .circle_space import (FourierSeries, HarmonicRep, dirichlet_seminorm, pointed_norm,
                           seminorm_coeffs, trim_coeffs)
from .curves import ConformalPair

DomainSide = Literal["plus", "minus"]

_DISK_SIDE = {"plus": "interior", "minus": "exterior"}


@dataclass(frozen=True, eq=False)
class DomainFunction:
    """Harmonic function on the inner (``plus``) or outer (``minus``) domain.

    ``rep`` is the pullback ``H o f`` on the unit disk or ``H o g`` on the
    exterior disk.
    """

    pair: ConformalPair
    side: DomainSide
    rep: HarmonicRep

    def __post_init__(self):
        if self.side not in _DISK_SIDE:
            raise ValueError(f"side must be 'plus' or 'minus', not {self.side!r}")
        if self.rep.side != _DISK_SIDE[self.side]:
            raise ValueError(f"a {self.side}-side function needs an {_DISK_SIDE[self.side]} rep")

    @classmethod
    def from_trace(cls, pair: ConformalPair, trace: FourierSeries,
                   side: DomainSide = "plus") -> "DomainFunction":
        """Harmonic extension of boundary data given in the chart of ``side``."""
        return cls(pair, side, HarmonicRep.from_boundary_coeffs(trace.coeffs, _DISK_SIDE[side]))

    @classmethod
    def from_plus_trace(cls, pair: ConformalPair, trace: FourierSeries,
                        side: DomainSide = "plus") -> "DomainFunction":
        """Extension to ``side`` of data given in the plus-side chart."""
        if side == "minus":
            trace = pair.compose_welding(trace, "inverse")
        return cls.from_trace(pair, trace, side)

    @property
    def N(self) -> int:
        return self.rep.N

    def trace(self) -> FourierSeries:
        """Boundary values in this function's own chart."""
        return FourierSeries(self.rep.boundary_coeffs())

    def plus_trace(self, n_out: Optional[int] = None) -> FourierSeries:
        """Boundary values expressed in the plus-side chart ``theta -> f(e^{i theta})``."""
        if self.side == "plus":
            return self.trace() if n_out is None else self.trace().resized(n_out)
        return self.pair.compose_welding(self.trace(), "forward", n_out)

    def seminorm(self) -> float:
        """Dirichlet seminorm on the domain (conformally invariant)."""
        return dirichlet_seminorm(self.rep)

    def pointed_norm(self) -> float:
        """Norm pointed at ``f(0)`` (plus) or at infinity (minus)."""
        return pointed_norm(self.rep)

    def __call__(self, z):
        """Evaluate at points of the domain."""
        scalar = np.ndim(z) == 0
        out = []
        for zi in np.atleast_1d(np.asarray(z, dtype=complex)):
            side, w = self.pair.locate(zi)
            if side != _DISK_SIDE[self.side]:
                raise ValueError(f"point {zi} is not in the {self.side}-side domain")
            out.append(self.rep(w))
        return out[0] if scalar else np.array(out)


def _reflect_coeffs(pair: ConformalPair, coeffs: np.ndarray, side: DomainSide,
                    n_out: Optional[int] = None) -> np.ndarray:
    direction = "inverse" if side == "plus" else "forward"
    return pair.compose_coeffs(coeffs, direction, n_out)


def reflect(h: DomainFunction, n_out: Optional[int] = None) -> DomainFunction:
    """Harmonic function on the opposite domain with the same boundary values."""
    out_side: DomainSide = "minus" if h.side == "plus" else "plus"
    c = _reflect_coeffs(h.pair, h.rep.boundary_coeffs(), h.side, n_out)
    return DomainFunction(h.pair, out_side, HarmonicRep.from_boundary_coeffs(c, _DISK_SIDE[out_side]))


def reflection_matrix(pair: ConformalPair, N: int, side: DomainSide = "plus") -> np.ndarray:
    """Matrix of reflection on the seminorm-normalised modes ``e_n/sqrt|n|``,
    ``0 < |n| <= N``, with rows weighted so that the Euclidean norm of a
    column is the seminorm of its image."""
    n = np.arange(-N, N + 1)
    nz = n != 0
    basis = np.zeros((2 * N + 1, 2 * N), dtype=complex)
    basis[np.nonzero(nz)[0], np.arange(2 * N)] = 1.0 / np.sqrt(np.abs(n[nz]))
    out = trim_coeffs(_reflect_coeffs(pair, basis, side))
    K = (out.shape[0] - 1) // 2
    weight = np.sqrt(np.abs(np.arange(-K, K + 1)))
    return weight[:, None] * out


def estimate_reflection_norm(pair: ConformalPair, N: int, side: DomainSide = "plus",
                             rtol: float = 1e-6, max_iter: int = 500, seed: int = 0) -> float:
    """Largest singular value of the truncated reflection, by power iteration."""
    A = reflection_matrix(pair, N, side)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(max_iter):
        y = A.conj().T @ (A @ x)
        new = float(np.sqrt(np.linalg.norm(y)))
        x = y / np.linalg.norm(y)
        if abs(new - sigma) <= rtol * new:
            sigma = new
            break
        sigma = new
    # Rayleigh quotient of the converged vector sharpens the estimate.
    return float(np.linalg.norm(A @ x))


def boundary_agreement(h: DomainFunction, reflected: DomainFunction) -> float:
    """``norm_H0`` of the difference of the two traces in the plus chart."""
    a = h.plus_trace().coeffs
    b = reflected.plus_trace().coeffs
    N = max(a.size, b.size) // 2
    diff = FourierSeries(a).resized(N).coeffs - FourierSeries(b).resized(N).coeffs
    return float(np.hypot(abs(diff[N]), seminorm_coeffs(diff)))
