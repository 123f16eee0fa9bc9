"""Jump decomposition of Dirichlet-bounded harmonic functions across
quasicircles given by explicit conformal maps."""

from .circle_space import FourierSeries, HarmonicRep, extend, restrict, random_fourier_series
from .curves import (ConformalMap, ConformalPair, FitError, make_circle_pair, make_ellipse_pair,
                     make_perturbed_pair, parse_curve)
from .reflection import DomainFunction, estimate_reflection_norm, reflect
from .cauchy import LaurentRep, cauchy_contour, jump, project_minus, project_plus
from .faber import faber_polynomial, grunsky_coefficients, i_f
from .decomposition import JumpResult, apply_K, apply_K_inverse, solve_riemann_hilbert

__all__ = [
    "FourierSeries", "HarmonicRep", "extend", "restrict", "random_fourier_series",
    "ConformalMap", "ConformalPair", "FitError", "make_circle_pair", "make_ellipse_pair",
    "make_perturbed_pair", "parse_curve",
    "DomainFunction", "estimate_reflection_norm", "reflect",
    "LaurentRep", "cauchy_contour", "jump", "project_minus", "project_plus",
    "faber_polynomial", "grunsky_coefficients", "i_f",
    "JumpResult", "apply_K", "apply_K_inverse", "solve_riemann_hilbert",
]
