"""Command-line interface: solve from a correspondence file, run benchmarks.

Correspondence files are UTF-8 text with one pair per line, six whitespace
separated floats ``x1 y1 z1 x2 y2 z2`` in calibrated ray coordinates; lines
starting with ``#`` are ignored.  Benchmark commands emit CSV (nine
significant digits) to stdout or ``--out``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .bench import (
    bench_threshold,
    format_csv,
    run_accuracy_experiment,
    run_ransac_experiment,
    run_timing,
)
from .errors import ScrewposeError
from .geom import BearingPair, sampson_batch
from .robust import RansacConfig, SolverKind, ransac_estimate
from .solvers import recover_scale, solve_2p_to, solve_3p_ra_st0, solve_4p_st0, solve_5p
from .synth import SyntheticConfig

_SAMPLE_SIZE = {
    SolverKind.FIVE_P: 5,
    SolverKind.FOUR_P_ST0: 4,
    SolverKind.THREE_P_RA_ST0: 3,
    SolverKind.TWO_P_TO: 2,
}


def read_correspondences(path: str) -> list:
    """Parse a correspondence file into bearing pairs."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.strip()
            if not body or body.startswith("#"):
                continue
            parts = body.split()
            if len(parts) != 6:
                raise ValueError(f"{path}:{lineno}: expected six floats, got {len(parts)}")
            vals = [float(p) for p in parts]
            pairs.append(BearingPair(vals[:3], vals[3:]))
    return pairs


def _direct_solve(kind: SolverKind, pairs, theta):
    if kind is SolverKind.FIVE_P:
        return solve_5p(pairs)
    if kind is SolverKind.FOUR_P_ST0:
        return solve_4p_st0(pairs)
    if kind is SolverKind.THREE_P_RA_ST0:
        return solve_3p_ra_st0(pairs, theta)
    return solve_2p_to(pairs)


def _cmd_solve(args) -> int:
    kind = SolverKind(args.solver)
    theta = math.radians(args.theta) if args.theta is not None else None
    if kind is SolverKind.THREE_P_RA_ST0 and theta is None:
        print("--theta is required for solver 3p-ra-st0", file=sys.stderr)
        return 2
    pairs = read_correspondences(args.input)
    q1 = np.array([p.q1 for p in pairs])
    q2 = np.array([p.q2 for p in pairs])

    if len(pairs) > _SAMPLE_SIZE[kind]:
        cfg = RansacConfig(solver_kind=kind, threshold=args.threshold, seed=args.seed)
        result = ransac_estimate(pairs, cfg, theta=theta)
        motion = result.motion
        inliers = result.inlier_count
    else:
        sols = _direct_solve(kind, pairs, theta)
        if len(sols) == 0:
            raise ScrewposeError("the solver returned no motions")
        best = None
        for m, e in zip(sols.motions, sols.essentials):
            count = int(np.count_nonzero(sampson_batch(e, q1, q2) <= args.threshold))
            if best is None or count > best[0]:
                best = (count, m)
        inliers, motion = best

    if args.delta is not None:
        motion = recover_scale(motion, args.delta)

    print(json.dumps({
        "R": [float(v) for v in motion.rotation.ravel()],
        "t": [float(v) for v in motion.translation],
        "inliers": inliers,
    }))
    return 0


def _parse_solvers(text: str) -> list:
    return [SolverKind(tok) for tok in text.split(",") if tok]


def _emit(csv_text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(csv_text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(csv_text)


def _cmd_bench_accuracy(args) -> int:
    rows = []
    for kind in _parse_solvers(args.solvers):
        rec = run_accuracy_experiment(args.trials, kind, base_seed=args.seed)
        for i in range(args.trials):
            rows.append({
                "solver": rec.solver,
                "trial": i,
                "accuracy": float(rec.accuracy[i]),
                "real_roots": int(rec.real_roots[i]),
                "solutions": int(rec.solution_counts[i]),
            })
        print(json.dumps(rec.summary()), file=sys.stderr)
    _emit(format_csv(["solver", "trial", "accuracy", "real_roots", "solutions"], rows), args.out)
    return 0


def _cmd_bench_ransac(args) -> int:
    grid = []
    for motion in args.motion.split(","):
        for noise in (float(v) for v in args.noise.split(",")):
            for screw in (float(v) for v in args.screw.split(",")):
                grid.append(SyntheticConfig(
                    motion_kind=motion,
                    pixel_noise_std=noise,
                    screw_disturb_std=screw,
                    angle_noise_std=args.angle_noise,
                ))
    rows = run_ransac_experiment(
        grid,
        _parse_solvers(args.solvers),
        n_seeds=args.seeds,
        n_points=args.points,
        outlier_ratio=args.outliers,
        base_seed=args.seed,
    )
    fields = ["solver", "motion_kind", "pixel_noise_std", "screw_disturb_std",
              "mean_rotation_error_deg", "mean_translation_error_deg",
              "fallback_rate", "n_seeds"]
    _emit(format_csv(fields, rows), args.out)
    return 0


def _cmd_bench_time(args) -> int:
    rows = [run_timing(kind, args.trials, base_seed=args.seed)
            for kind in _parse_solvers(args.solvers)]
    _emit(format_csv(["solver", "n_trials", "mean_ms", "median_ms"], rows), args.out)
    return 0


def _cmd_selftest(args) -> int:
    """Quick deterministic property checks; exits nonzero on any failure."""
    from .geom import rotation_angle, screw_translation
    from .robust import numerical_accuracy
    from .synth import generate_scene

    failures = 0

    def check(name, ok):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += not ok

    for kind in (SolverKind.FIVE_P, SolverKind.FOUR_P_ST0,
                 SolverKind.THREE_P_RA_ST0, SolverKind.TWO_P_TO):
        rec = run_accuracy_experiment(200, kind, base_seed=11)
        good = float(np.mean(rec.accuracy < 1e-6))
        check(f"noiseless recovery {kind.value} (>=99% below 1e-6)", good >= 0.99)

    rec = run_accuracy_experiment(200, SolverKind.THREE_P_RA_ST0, base_seed=23)
    check("3p-ra-st0 solution bound (<= 12)", int(rec.solution_counts.max()) <= 12)

    from .bench import _minimal_scene, _solve_scene

    worst_angle = worst_screw = worst_trace = 0.0
    for t in range(100):
        scene = _minimal_scene(SolverKind.THREE_P_RA_ST0, t, 37, 3)
        sols = _solve_scene(SolverKind.THREE_P_RA_ST0, scene)
        for m in sols.motions:
            worst_angle = max(worst_angle, abs(rotation_angle(m.rotation) - scene.measured_theta))
            worst_screw = max(worst_screw, abs(screw_translation(m)))
        scene = _minimal_scene(SolverKind.FOUR_P_ST0, t, 41, 4)
        for e in _solve_scene(SolverKind.FOUR_P_ST0, scene).essentials:
            worst_trace = max(worst_trace, abs(float(np.trace(e))))
    check("3p-ra-st0 honors the angle (<1e-7)", worst_angle < 1e-7)
    check("3p-ra-st0 honors zero screw (<1e-7)", worst_screw < 1e-7)
    check("4p-st0 essentials trace-free (<1e-10)", worst_trace < 1e-10)

    wins = 0
    for seed in range(20):
        cfg = SyntheticConfig(motion_kind="forward", rotation_angle_std=0.0,
                              pixel_noise_std=0.5, n_points=100, seed=900 + seed)
        scene = generate_scene(cfg)
        rc = RansacConfig(solver_kind=SolverKind.FOUR_P_ST0,
                          threshold=bench_threshold(0.5), seed=seed)
        wins += ransac_estimate(scene.pairs, rc).used_degenerate_fallback
    check("pure-translation fallback picked (>=90%)", wins >= 18)

    print(f"{'OK' if failures == 0 else 'FAILED'}: {failures} failure(s)")
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="screwpose",
        description="Minimal relative-pose solvers constrained by SE(3) invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="estimate pose from a correspondence file")
    p.add_argument("input", help="correspondence file (x1 y1 z1 x2 y2 z2 per line)")
    p.add_argument("--solver", required=True, choices=[k.value for k in SolverKind])
    p.add_argument("--theta", type=float, help="rotation angle in degrees (3p-ra-st0)")
    p.add_argument("--delta", type=float, help="known screw translation; rescales the output")
    p.add_argument("--threshold", type=float, default=1e-3, help="Sampson inlier gate")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("bench-accuracy", help="noiseless accuracy and root statistics")
    p.add_argument("--solvers", default="5p,4p-st0,3p-ra-st0")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=_cmd_bench_accuracy)

    p = sub.add_parser("bench-ransac", help="RANSAC error sweep on synthetic scenes")
    p.add_argument("--solvers", default="5p,4p-st0")
    p.add_argument("--motion", default="forward", help="comma list of forward,sideway")
    p.add_argument("--noise", default="0,0.5,1", help="comma list of pixel noise stds")
    p.add_argument("--screw", default="0", help="comma list of screw disturbance stds")
    p.add_argument("--angle-noise", type=float, default=0.0, dest="angle_noise")
    p.add_argument("--seeds", type=int, default=200)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--outliers", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=_cmd_bench_ransac)

    p = sub.add_parser("bench-time", help="per-solve wall-clock statistics")
    p.add_argument("--solvers", default="5p,4p-st0,3p-ra-st0,2p-to")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=_cmd_bench_time)

    p = sub.add_parser("selftest", help="run the built-in property checks")
    p.set_defaults(func=_cmd_selftest)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScrewposeError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
