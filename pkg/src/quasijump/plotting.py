"""Figures for the CLI reports.  matplotlib is imported lazily with the Agg
backend so the numerical modules never depend on it."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def convergence_figure(traces: Sequence, path: str, title: str = ""):
    """Raw and extrapolated contour errors against the level index."""
    plt = _pyplot()
    fig, (ax0, ax1) = plt.subplots(1, 2, figsize=(9, 3.6), sharex=True)
    for tr in traces:
        k = np.rint(-np.log2(np.abs(1.0 - tr.radii))).astype(int)
        label = f"z = {tr.z.real:.2f}{tr.z.imag:+.2f}i"
        ax0.semilogy(k, np.maximum(np.abs(tr.values - tr.extrapolated), 1e-17), "o-", ms=3,
                     label=label)
        ax1.semilogy(k[1:], np.maximum(tr.steps, 1e-17), "o-", ms=3)
    ax0.set_xlabel("k  (r = 1 - 2^-k)")
    ax0.set_ylabel("|value - limit|")
    ax1.set_xlabel("k")
    ax1.set_ylabel("extrapolant change")
    ax0.legend(fontsize=7)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def norms_figure(rows: Sequence[dict], path: str, title: str = ""):
    """Reflection norm and extreme singular values of K against truncation."""
    plt = _pyplot()
    N = [r["N"] for r in rows]
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.plot(N, [r["reflection_norm"] for r in rows], "o-", label="reflection norm")
    ax.plot(N, [r["k_sigma_min"] for r in rows], "s-", label="K smallest singular value")
    ax.plot(N, [r["k_sigma_max"] for r in rows], "^-", label="K largest singular value")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("truncation N")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def curve_figure(pair, path: str, levels: Sequence[float] = (0.5, 0.9, 1.1, 2.0)):
    """The curve with a few interior and exterior level curves."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    gamma = pair.boundary(1024)
    ax.plot(np.append(gamma.real, gamma.real[0]), np.append(gamma.imag, gamma.imag[0]), "k-")
    for r in levels:
        side = "interior" if r < 1 else "exterior"
        pts = pair.level_curve(side, r, 512).points
        ax.plot(np.append(pts.real, pts.real[0]), np.append(pts.imag, pts.imag[0]), "--", lw=0.8)
    ax.set_aspect("equal")
    ax.set_title(pair.name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
