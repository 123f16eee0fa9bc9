"""Faber polynomials of an interior map, Grunsky coefficients and the
operator ``I_f: h -> P(Omega^-)(h o f^{-1})``.

For ``f(z) = p + a_1 z + a_2 z^2 + ...`` the Faber polynomial ``Phi_n`` is
the principal part at ``p`` of ``(f^{-1}(zeta))^{-n}``, a polynomial in
``1/(zeta - p)`` without constant term.  Composing it with ``f`` leaves
``z^{-n}`` plus a power series whose coefficients are the Grunsky
coefficients ``beta_k^n``.

All series work here is formal (truncated power series with numpy
convolutions); the contour-integral route lives in :mod:`quasijump.cauchy`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cauchy import PROJECTION_K_MAX, LaurentRep, project_coeffs
from .circle_space import FourierSeries
from .curves import ConformalMap, ConformalPair

DEFAULT_K = 32
GUARD_TERMS = 8
FABER_TOL = 1e-10


class FaberError(ArithmeticError):
    """Raised when a Faber identity check fails."""


# ---------------------------------------------------------------------------
# truncated power series


def series_mul(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    """Product of two power series, truncated after ``z^order``."""
    return _padded(np.convolve(a[:order + 1], b[:order + 1]), order)


def series_reciprocal(a: np.ndarray, order: int) -> np.ndarray:
    """``1 / a(z)`` for ``a(0) != 0``."""
    a = np.asarray(a, dtype=complex)
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term has no reciprocal")
    a = np.concatenate([a, np.zeros(max(0, order + 1 - a.size))])[:order + 1]
    out = np.zeros(order + 1, dtype=complex)
    out[0] = 1.0 / a[0]
    for k in range(1, order + 1):
        out[k] = -np.dot(a[1:k + 1], out[k - 1::-1][:k]) / a[0]
    return out


def series_power(a: np.ndarray, n: int, order: int) -> np.ndarray:
    """``a(z)^n`` for an integer ``n >= 0`` by repeated squaring."""
    result = np.zeros(order + 1, dtype=complex)
    result[0] = 1.0
    base = np.asarray(a, dtype=complex)[:order + 1]
    while n:
        if n & 1:
            result = series_mul(result, base, order)
        n >>= 1
        if n:
            base = series_mul(base, base, order)
    return result


def series_inverse(a: np.ndarray, order: int) -> np.ndarray:
    """Compositional inverse of ``a(z) = a_1 z + a_2 z^2 + ...`` (``a_0 = 0``).

    Lagrange inversion: ``[w^n] a^{-1} = (1/n) [z^{n-1}] (z / a(z))^n``.
    """
    a = np.asarray(a, dtype=complex)
    if a.size < 2 or a[1] == 0:
        raise ZeroDivisionError("series inversion needs a nonzero linear coefficient")
    psi = series_reciprocal(a[1:], order)
    out = np.zeros(order + 1, dtype=complex)
    power = np.zeros(order + 1, dtype=complex)
    power[0] = 1.0
    for n in range(1, order + 1):
        power = series_mul(power, psi, order)
        out[n] = power[n - 1] / n
    return out


def _padded(coeffs: np.ndarray, order: int) -> np.ndarray:
    c = np.zeros(order + 1, dtype=complex)
    m = min(order + 1, coeffs.size)
    c[:m] = coeffs[:m]
    return c


# ---------------------------------------------------------------------------
# Faber polynomials and Grunsky coefficients


@dataclass(frozen=True, eq=False)
class FaberPolynomial:
    """``Phi_n(zeta) = sum_{k=1}^n coeffs[k-1] (zeta - p)^{-k}``.

    ``coeffs`` lists ``c_{-1}, ..., c_{-n}``; the leading ``c_{-n}`` equals
    ``f'(0)^n``.
    """

    n: int
    basepoint: complex
    coeffs: np.ndarray

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, zeta):
        x = 1.0 / (np.asarray(zeta, dtype=complex) - self.basepoint)
        return x * np.polynomial.polynomial.polyval(x, self.coeffs)

    def principal_part(self) -> dict:
        """``{k: c_k}`` for ``k = -n..-1``."""
        return {-k: complex(c) for k, c in enumerate(self.coeffs, start=1)}

    def pullback_exterior(self, g: ConformalMap, order: int) -> np.ndarray:
        """Coefficients of ``Phi_n(g(w))`` in powers ``w^{-k}``, ``k = 0..order``.

        With ``g(w) - p = w G(1/w)`` each term is ``x^k G(x)^{-k}``, ``x = 1/w``.
        """
        G = _padded(np.concatenate([[g.coeffs[0], g.coeffs[1] - self.basepoint], g.coeffs[2:]]),
                    order)
        inv = series_reciprocal(G, order)
        out = np.zeros(order + 1, dtype=complex)
        power = np.zeros(order + 1, dtype=complex)
        power[0] = 1.0
        for k in range(1, self.n + 1):
            power = series_mul(power, inv, order)
            out[k:] += self.coeffs[k - 1] * power[:order + 1 - k]
        return out


def _shifted(f: ConformalMap, order: int) -> np.ndarray:
    """``A(z)`` with ``f(z) - p = z A(z)``."""
    return _padded(np.asarray(f.coeffs[1:], dtype=complex), order)


def faber_polynomial(f: ConformalMap, n: int, K: int = DEFAULT_K) -> FaberPolynomial:
    """Principal part at ``p = f(0)`` of ``(f^{-1})^{-n}``.

    The inverse series is formed to order ``n + K + 8``.
    """
    if f.side != "interior":
        raise ValueError("Faber polynomials are defined here for interior maps")
    if n < 1:
        raise ValueError("Faber index n must be >= 1")
    order = n + K + GUARD_TERMS
    a = np.zeros(order + 1, dtype=complex)
    a[1:] = _shifted(f, order - 1)
    if a[1] == 0:
        raise ZeroDivisionError("f'(0) = 0: the map is not locally invertible at 0")
    inv = series_inverse(a, order)
    # f^{-1}(p + s) = s B(s); (f^{-1})^{-n} = s^{-n} B^{-n}
    B = inv[1:]
    Bn = series_power(series_reciprocal(B, order - 1), n, order - 1)
    # coefficient of s^{-k} is Bn[n - k]
    coeffs = np.array([Bn[n - k] for k in range(1, n + 1)])
    return FaberPolynomial(n, complex(f.coeffs[0]), coeffs)


@dataclass(frozen=True, eq=False)
class GrunskyBlock:
    """``Phi_n(f(z)) = z^{-n} + sum_{k>=0} beta[k] z^k``."""

    n: int
    beta: np.ndarray
    residual: float

    @property
    def K(self) -> int:
        return self.beta.size - 1


def faber_composed(f: ConformalMap, faber: FaberPolynomial, K: int) -> np.ndarray:
    """Laurent coefficients of ``Phi_n(f(z))`` for ``z^{-n}..z^K``."""
    n = faber.n
    order = n + K + GUARD_TERMS
    inv = series_reciprocal(_shifted(f, order), order)
    out = np.zeros(n + K + 1, dtype=complex)
    power = np.zeros(order + 1, dtype=complex)
    power[0] = 1.0
    for k in range(1, n + 1):
        power = series_mul(power, inv, order)
        # c_{-k} z^{-k} A(z)^{-k}: z^m lands at index m + n
        out[n - k:] += faber.coeffs[k - 1] * power[:K + k + 1]
    return out


def faber_residual(f: ConformalMap, n: int, K: int = DEFAULT_K) -> float:
    """Largest deviation of the negative-power part of ``Phi_n o f`` from ``z^{-n}``."""
    lau = faber_composed(f, faber_polynomial(f, n, K), K)
    neg = lau[:n].copy()
    neg[0] -= 1.0
    return float(np.abs(neg).max())


def grunsky_coefficients(f: ConformalMap, n: int, K: int = DEFAULT_K,
                         tol: float = FABER_TOL) -> GrunskyBlock:
    """``beta_0^n .. beta_K^n``, after checking the Faber identity."""
    lau = faber_composed(f, faber_polynomial(f, n, K), K)
    neg = lau[:n].copy()
    neg[0] -= 1.0
    residual = float(np.abs(neg).max())
    if not residual <= tol:
        raise FaberError(f"Faber identity residual {residual:.2e} for n={n} exceeds {tol:.0e}; "
                         "raise the inversion order")
    return GrunskyBlock(n, lau[n:].copy(), residual)


# ---------------------------------------------------------------------------
# the operator I_f and its left inverse


def _negative_trace(coeffs: np.ndarray) -> np.ndarray:
    """Circle trace of ``sum_{k>=1} b_k z^{-k}`` as ``2m+1`` Fourier coefficients."""
    coeffs = np.asarray(coeffs, dtype=complex)
    m = coeffs.shape[0] - 1
    out = np.zeros((2 * m + 1,) + coeffs.shape[1:], dtype=complex)
    out[:m] = coeffs[:0:-1]
    return out


def i_f_coeffs(pair: ConformalPair, coeffs: np.ndarray, n_out: Optional[int] = None,
               k_max: int = PROJECTION_K_MAX):
    """``I_f`` on columns of ``[0, b_1, ..., b_m]`` (coefficients of ``z^{-k}``).

    The pullback ``h o f^{-1}`` on the curve has the circle trace of ``h``
    in the plus chart; its minus-side projection is returned as ``g``-pullback
    series together with the expansion residual.
    """
    series, residual, _, _ = project_coeffs(pair, _negative_trace(coeffs), "minus", "plus",
                                            n_out, k_max)
    return series, residual


def i_f(h: LaurentRep, pair: Optional[ConformalPair] = None, n_out: Optional[int] = None,
        k_max: int = PROJECTION_K_MAX) -> LaurentRep:
    """``P(Omega^-) (h o f^{-1})`` for ``h`` holomorphic on the exterior disk
    and vanishing at infinity (``h.side == 'minus'``, read as a function of
    ``z`` in ``D^-``)."""
    pair = pair or h.pair
    if h.side != "minus":
        raise ValueError("I_f acts on functions of the exterior disk (side 'minus')")
    series, residual = i_f_coeffs(pair, h.coeffs, n_out, k_max)
    return LaurentRep(pair, "minus", series, residual, {"expansion_residual": residual})


def disk_minus_projection(pair: ConformalPair, u: LaurentRep, m: int) -> np.ndarray:
    """``P(D^-) C_f u`` for ``u`` on the outer domain: the negative Fourier
    modes ``z^{-1}..z^{-m}`` of the plus-chart trace of ``u``."""
    t = u.plus_trace()
    return np.array([t[-k] for k in range(m + 1)]) * (np.arange(m + 1) > 0)


def left_inverse_check(h: LaurentRep, pair: Optional[ConformalPair] = None,
                       n_out: Optional[int] = None) -> float:
    """Seminorm of ``P(D^-) C_f I_f h - h`` on the exterior disk."""
    pair = pair or h.pair
    u = i_f(h, pair, n_out)
    m = max(h.order, 1)
    back = disk_minus_projection(pair, u, m)
    t = u.plus_trace()
    # modes beyond the order of h must vanish as well
    extra = np.array([t[-k] for k in range(m + 1, t.N + 1)])
    k_extra = np.arange(m + 1, t.N + 1)
    diff = back - h.padded(m)
    k = np.arange(m + 1)
    total = np.sum(k * np.abs(diff) ** 2) + np.sum(k_extra * np.abs(extra) ** 2)
    return float(np.sqrt(total))


def left_inverse_residuals(pair: ConformalPair, m: int, n_out: Optional[int] = None) -> np.ndarray:
    """Residuals of the left-inverse identity on ``z^{-1}, ..., z^{-m}``, batched."""
    basis = np.zeros((m + 1, m), dtype=complex)
    basis[np.arange(1, m + 1), np.arange(m)] = 1.0
    series, _ = i_f_coeffs(pair, basis, n_out)
    n = series.shape[0] - 1
    trace = np.zeros((2 * n + 1, m), dtype=complex)
    trace[:n + 1] = series[::-1]
    plus = pair.compose_coeffs(trace, "forward")
    K = (plus.shape[0] - 1) // 2
    neg = plus[:K][::-1]                      # rows k = 1..K hold mode -k
    neg[:m] -= np.eye(m)
    k = np.arange(1, K + 1)[:, None]
    return np.sqrt(np.sum(k * np.abs(neg) ** 2, axis=0))


def i_f_matrix(pair: ConformalPair, m: int, n_out: Optional[int] = None) -> np.ndarray:
    """Matrix of ``I_f`` from ``span{z^{-1}..z^{-m}}`` (seminorm-normalised)
    to ``D(Omega^-)`` (rows weighted by ``sqrt(k)``)."""
    basis = np.zeros((m + 1, m), dtype=complex)
    basis[np.arange(1, m + 1), np.arange(m)] = 1.0 / np.sqrt(np.arange(1, m + 1))
    series, _ = i_f_coeffs(pair, basis, n_out)
    return np.sqrt(np.arange(series.shape[0]))[:, None] * series


def faber_trace(faber: FaberPolynomial, pair: ConformalPair, order: int) -> FourierSeries:
    """Minus-chart trace of ``Phi_n o g`` up to ``w^{-order}``."""
    c = faber.pullback_exterior(pair.g, order)
    out = np.zeros(2 * order + 1, dtype=complex)
    out[:order + 1] = c[::-1]
    return FourierSeries(out)
