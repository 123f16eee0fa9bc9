import numpy as np

from quasijump.circle_space import random_fourier_series
from quasijump.decomposition import convergence_study
from quasijump.plotting import convergence_figure, curve_figure, norms_figure


def test_figures_are_written(perturbed, tmp_path):
    _, traces = convergence_study(perturbed, random_fourier_series(8, np.random.default_rng(0)),
                                  [0.2j, 2.0], k_max=8)
    convergence_figure(traces, tmp_path / "c.png", "conv")
    norms_figure([{"N": 8, "reflection_norm": 1.1, "k_sigma_min": 0.9, "k_sigma_max": 1.1},
                  {"N": 16, "reflection_norm": 1.1, "k_sigma_min": 0.9, "k_sigma_max": 1.1}],
                 tmp_path / "n.png")
    curve_figure(perturbed, tmp_path / "g.png")
    for name in ("c.png", "n.png", "g.png"):
        assert (tmp_path / name).read_bytes()[:4] == b"\x89PNG"
