"""Command-line front end.

Exit codes: 0 success, 2 a numerical tolerance was breached, 1 usage or
input errors (one-line message on stderr).
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from contextlib import nullcontext
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import cauchy, circle_space, curves, decomposition, faber, reflection
from .circle_space import FourierSeries, random_fourier_series

EXIT_OK, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2
THREADS_ENV = "QUASIJUMP_THREADS"

logger = logging.getLogger("quasijump")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class ExperimentConfig:
    curve: str
    N: int
    k_max: int
    tol: float
    seed: int
    input: Optional[str] = None
    output: Optional[str] = None

    def __post_init__(self):
        if self.N <= 0 or self.k_max <= 0 or not self.tol > 0 or self.seed < 0:
            raise UsageError("--N, --r-max-k and --tol must be positive and --seed non-negative")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path: str, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc.msg} (line {exc.lineno})")


def _write_json(path: str, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=1)


def _load_series(cfg: ExperimentConfig) -> FourierSeries:
    if cfg.input is None:
        return random_fourier_series(cfg.N, np.random.default_rng(cfg.seed))
    try:
        return FourierSeries.from_json(_read_json(cfg.input))
    except ValueError as exc:
        raise UsageError(f"{cfg.input}: {exc}")


def _load_pair(spec: str) -> curves.ConformalPair:
    try:
        return curves.parse_curve(spec)
    except FileNotFoundError as exc:
        raise UsageError(f"curve file not found: {exc.filename}")
    except ValueError as exc:
        raise UsageError(str(exc))


def _config(args) -> ExperimentConfig:
    return ExperimentConfig(args.curve, args.N, args.r_max_k, args.tol, args.seed,
                            getattr(args, "input", None), args.out)


def _plotting():
    try:
        from . import plotting
        plotting._pyplot()
    except ImportError:
        raise UsageError("--figure needs matplotlib; install the 'plot' extra")
    return plotting


def _thread_limit():
    value = os.environ.get(THREADS_ENV)
    if not value:
        return nullcontext()
    try:
        n = int(value)
        if n < 1:
            raise ValueError
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {value!r}")
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=n)


# ---------------------------------------------------------------------------
# subcommands


def cmd_decompose(args) -> int:
    cfg = _config(args)
    pair = _load_pair(cfg.curve)
    h = _load_series(cfg)
    res = decomposition.solve_riemann_hilbert(h, pair, tol=cfg.tol)
    out = cfg.output or "result.json"
    _write_json(out, res.to_json())
    print(f"{pair.name}: residual {res.boundary_residual:.3e} (tol {cfg.tol:.1e}) -> {out}")
    return EXIT_OK if res.ok else EXIT_TOLERANCE


def cmd_reflect(args) -> int:
    cfg = _config(args)
    pair = _load_pair(cfg.curve)
    h = reflection.DomainFunction.from_trace(pair, _load_series(cfg), args.side)
    r = reflection.reflect(h)
    agree = reflection.boundary_agreement(h, r)
    out = cfg.output or "h_reflected.json"
    _write_json(out, r.trace().to_json())
    print(f"{pair.name}: reflected to the {r.side} side, boundary agreement {agree:.3e} -> {out}")
    return EXIT_OK if agree <= cfg.tol else EXIT_TOLERANCE


def _load_points(path: Optional[str], pair) -> np.ndarray:
    if path is None:
        return cauchy.default_z_grid(pair, 6)
    data = _read_json(path)
    try:
        return np.array([complex(p[0], p[1]) for p in data])
    except (TypeError, IndexError, ValueError):
        raise UsageError(f"{path}: points must be a list of [re, im] pairs")


def cmd_jump(args) -> int:
    cfg = _config(args)
    pair = _load_pair(cfg.curve)
    h = reflection.DomainFunction.from_trace(pair, _load_series(cfg))
    pts = _load_points(args.points, pair)
    try:
        traces = cauchy.jump_traces(h, pts, k_max=cfg.k_max)
    except cauchy.ContourError as exc:
        raise UsageError(str(exc))
    rows = []
    for tr in traces:
        for r, v in zip(tr.radii, tr.values):
            rows.append([tr.z.real, tr.z.imag, r, v.real, v.imag, tr.extrapolated.real,
                         tr.extrapolated.imag, tr.error_estimate])
    out = cfg.output or "trace.csv"
    _write_csv(out, ["z_re", "z_im", "r", "value_re", "value_im", "extrapolated_re",
                     "extrapolated_im", "err_est"], rows)
    bad = sum(not tr.converged for tr in traces)
    print(f"{pair.name}: {len(traces)} points, {bad} without converged limit -> {out}")
    return EXIT_OK if bad == 0 else EXIT_TOLERANCE


def cmd_faber(args) -> int:
    pair = _load_pair(args.curve)
    rows, worst = [], 0.0
    try:
        for n in range(1, args.n_max + 1):
            block = faber.grunsky_coefficients(pair.f, n, args.k_max)
            worst = max(worst, block.residual)
            rows += [[n, k, b.real, b.imag] for k, b in enumerate(block.beta)]
    except faber.FaberError as exc:
        print(f"{pair.name}: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    out = args.out or "grunsky.csv"
    _write_csv(out, ["n", "k", "beta_re", "beta_im"], rows)
    print(f"{pair.name}: Grunsky coefficients n<={args.n_max}, k<={args.k_max}, "
          f"Faber residual {worst:.2e} -> {out}")
    return EXIT_OK


def _parse_truncations(text: str):
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--truncations must be a comma-separated list of integers, got {text!r}")
    if not values or min(values) < 1:
        raise UsageError("--truncations needs positive integers")
    return values


def cmd_norms(args) -> int:
    pair = _load_pair(args.curve)
    rows = []
    for N in _parse_truncations(args.truncations):
        sv = decomposition.K_singular_values(pair, N)
        rows.append({"N": N, "reflection_norm": reflection.estimate_reflection_norm(pair, N),
                     "k_sigma_min": float(sv.min()), "k_sigma_max": float(sv.max())})
    out = args.out or "norms.csv"
    keys = ["N", "reflection_norm", "k_sigma_min", "k_sigma_max"]
    _write_csv(out, keys, [[r[k] for k in keys] for r in rows])
    if args.figure:
        _plotting().norms_figure(rows, args.figure, pair.name)
    drift = 0.0
    for a, b in zip(rows, rows[1:]):
        for k in keys[1:]:
            drift = max(drift, abs(b[k] - a[k]) / abs(a[k]))
    for r in rows:
        print(f"{pair.name} N={r['N']:4d}  reflection {r['reflection_norm']:.6f}  "
              f"K singular values [{r['k_sigma_min']:.6f}, {r['k_sigma_max']:.6f}]")
    print(f"largest relative change under truncation refinement {drift:.2e} (tol {args.tol:.1e})")
    return EXIT_OK if drift <= args.tol else EXIT_TOLERANCE


def cmd_convergence(args) -> int:
    cfg = _config(args)
    pair = _load_pair(cfg.curve)
    h = _load_series(cfg)
    pts = _load_points(args.points, pair)
    try:
        rows, traces = decomposition.convergence_study(pair, h, pts, cfg.k_max)
    except cauchy.ContourError as exc:
        raise UsageError(str(exc))
    out = cfg.output or "convergence.csv"
    _write_csv(out, ["z_re", "z_im", "k", "r", "value_re", "value_im", "extrapolant_re",
                     "extrapolant_im", "raw_error", "extrapolant_change"],
               [[r.z.real, r.z.imag, r.k, r.r, r.value.real, r.value.imag, r.extrapolant.real,
                 r.extrapolant.imag, r.raw_error, r.step] for r in rows])
    if args.figure:
        _plotting().convergence_figure(traces, args.figure, pair.name)
    ok = all(decomposition.monotone_decay(t.steps) and t.change <= cfg.tol for t in traces)
    worst = max(t.change for t in traces)
    print(f"{pair.name}: {len(traces)} points, last extrapolant change {worst:.2e} "
          f"(tol {cfg.tol:.1e}), monotone decay {'yes' if ok else 'no'} -> {out}")
    return EXIT_OK if ok else EXIT_TOLERANCE


# ---------------------------------------------------------------------------
# selftest


def _selftest_checks(pair, N: int, seed: int):
    rng = np.random.default_rng(seed)

    def isometry():
        err = 0.0
        for _ in range(20):
            h = random_fourier_series(N, rng)
            for side in ("interior", "exterior"):
                H = circle_space.extend(h, side)
                err = max(err, abs(circle_space.dirichlet_seminorm(H) - circle_space.seminorm_H(h)),
                          float(np.abs(circle_space.restrict(H).coeffs - h.coeffs).max()))
        return err, 1e-13

    def welding_round_trip():
        h = random_fourier_series(N, rng)
        back = pair.compose_welding(pair.compose_welding(h, "forward"), "inverse")
        return circle_space.norm_H0(back - h), 1e-8

    def reflection_agreement():
        h = reflection.DomainFunction.from_trace(pair, random_fourier_series(N, rng))
        return reflection.boundary_agreement(h, reflection.reflect(h)), 1e-7

    def jump_identity():
        data = np.stack([random_fourier_series(N, rng).coeffs for _ in range(4)], axis=1)
        return float(decomposition.solve_batch(pair, data)[2].max()), 1e-6

    def pi_agreement():
        data = np.stack([random_fourier_series(N, rng).coeffs for _ in range(2)], axis=1)
        return float(cauchy.pi_agreement_batch(pair, data, cauchy.default_z_grid(pair)).max()), 1e-6

    def faber_identity():
        return max(faber.faber_residual(pair.f, n) for n in range(1, 13)), 1e-10

    def left_inverse():
        return float(faber.left_inverse_residuals(pair, max(1, N // 4)).max()), 1e-6

    return [("circle isometry", isometry), ("welding round trip", welding_round_trip),
            ("reflection boundary agreement", reflection_agreement),
            ("jump identity", jump_identity), ("Pi agreement", pi_agreement),
            ("Faber identity", faber_identity), ("left inverse", left_inverse)]


def cmd_selftest(args) -> int:
    pair = _load_pair(args.curve)
    failures = 0
    print(f"selftest on {pair.name} (N={args.N}, boundary mismatch {pair.boundary_mismatch:.1e})")
    for name, check in _selftest_checks(pair, args.N, args.seed):
        t0 = time.perf_counter()
        value, tol = check()
        ok = value <= tol
        failures += not ok
        print(f"  {'PASS' if ok else 'FAIL'}  {name:32s} {value:.2e} <= {tol:.0e}  "
              f"({time.perf_counter() - t0:.2f}s)")
    print(f"{failures} failure(s)")
    return EXIT_OK if failures == 0 else EXIT_TOLERANCE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--curve", default="circle",
                        help="circle | ellipse:A,B | perturbed:a_re,a_im,m | file:path")
    common.add_argument("--N", type=int, default=circle_space.DEFAULT_N, help="truncation order")
    common.add_argument("--seed", type=int, default=0, help="seed for random test data")
    common.add_argument("--out", "--output", dest="out", default=None, help="output file")
    common.add_argument("-v", "--verbose", action="store_true")

    def data_args(p, tol):
        p.add_argument("--input", help="FourierSeries JSON (plus-side chart); random if omitted")
        p.add_argument("--r-max-k", dest="r_max_k", type=int, default=cauchy.DEFAULT_K_MAX,
                       help="deepest level k of the radius schedule r = 1 -+ 2^-k")
        p.add_argument("--tol", type=float, default=tol)

    parser = _Parser(prog="quasijump", description="Jump decomposition on concrete quasicircles.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", parents=[common], help="solve h = h+ + h-")
    data_args(p, decomposition.RESIDUAL_TOL)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("reflect", parents=[common], help="harmonic reflection across the curve")
    data_args(p, 1e-7)
    p.add_argument("--side", choices=["plus", "minus"], default="plus",
                   help="side on which the input data is harmonic")
    p.set_defaults(func=cmd_reflect)

    p = sub.add_parser("jump", parents=[common], help="contour traces of the jump operator")
    data_args(p, cauchy.CONVERGENCE_TOL)
    p.add_argument("--points", help="JSON list of [re, im] evaluation points")
    p.set_defaults(func=cmd_jump)

    p = sub.add_parser("faber", parents=[common], help="Grunsky coefficients")
    p.add_argument("--n-max", dest="n_max", type=int, default=12)
    p.add_argument("--k-max", dest="k_max", type=int, default=faber.DEFAULT_K)
    p.set_defaults(func=cmd_faber)

    p = sub.add_parser("norms", parents=[common], help="reflection norm and K singular values")
    p.add_argument("--truncations", default="16,32,64")
    p.add_argument("--tol", type=float, default=0.1,
                   help="allowed relative change between successive truncations")
    p.add_argument("--figure", help="also render a PNG figure")
    p.set_defaults(func=cmd_norms)

    p = sub.add_parser("convergence", parents=[common], help="contour-limit convergence table")
    data_args(p, cauchy.CONVERGENCE_TOL)
    p.add_argument("--points", help="JSON list of [re, im] evaluation points")
    p.add_argument("--figure", help="also render a PNG figure")
    p.set_defaults(func=cmd_convergence, N=16)

    p = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    p.set_defaults(func=cmd_selftest, N=16)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        with _thread_limit():
            return args.func(args)
    except UsageError as exc:
        print(f"quasijump: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except curves.FitError as exc:
        print(f"quasijump: error: conformal fit failed: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"quasijump: error: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
