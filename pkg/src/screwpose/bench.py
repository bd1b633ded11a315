"""Benchmark drivers: accuracy, RANSAC error sweeps, and solve timings.

Each driver is deterministic given its base seed.  Scenes for the accuracy
and timing runs are minimal (sample-size point count, noiseless, planar), so
every solver sees data satisfying its own motion assumptions; the same base
seed produces the same scene stream for every solver, which keeps real-root
statistics comparable across solvers.  Results are plain records that the CLI
serializes to CSV with nine significant digits.
"""

from __future__ import annotations

import io
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import EmptySolutionSet, ScrewposeError
from .robust import (
    RansacConfig,
    SolverKind,
    numerical_accuracy,
    ransac_estimate,
    rotation_error,
    translation_direction_error,
)
from .solvers import MIN_ANGLE, solve_2p_to, solve_3p_ra_st0, solve_4p_st0, solve_5p
from .synth import ScenePair, SyntheticConfig, generate_scene

_SAMPLE_SIZE = {
    SolverKind.FIVE_P: 5,
    SolverKind.FOUR_P_ST0: 4,
    SolverKind.THREE_P_RA_ST0: 3,
    SolverKind.TWO_P_TO: 2,
}
# stride separating redraw attempts from the per-trial seed lane
_REDRAW_STRIDE = 10_000_019


def _minimal_scene(kind: SolverKind, trial: int, base_seed: int, n_points: int) -> ScenePair:
    """Noiseless planar scene for one trial; redrawn while the angle is unusable."""
    attempt = 0
    # the translation-only solver assumes an identity rotation, so its
    # scenes must be generated without one
    angle_std = 0.0 if kind is SolverKind.TWO_P_TO else 5.0
    while True:
        cfg = SyntheticConfig(
            motion_kind="forward",
            n_points=n_points,
            rotation_angle_std=angle_std,
            seed=base_seed + trial + attempt * _REDRAW_STRIDE,
        )
        scene = generate_scene(cfg)
        if kind is not SolverKind.THREE_P_RA_ST0:
            return scene
        if MIN_ANGLE * 1.01 <= scene.measured_theta < math.pi:
            return scene
        attempt += 1


def _solve_scene(kind: SolverKind, scene: ScenePair):
    pairs = scene.pairs
    if kind is SolverKind.FIVE_P:
        return solve_5p(pairs)
    if kind is SolverKind.FOUR_P_ST0:
        return solve_4p_st0(pairs)
    if kind is SolverKind.THREE_P_RA_ST0:
        return solve_3p_ra_st0(pairs, scene.measured_theta)
    return solve_2p_to(pairs)


@dataclass(frozen=True)
class AccuracyRecord:
    """Per-trial accuracy and root statistics for one solver."""

    solver: str
    accuracy: np.ndarray  # min |R - truth| per trial; inf when nothing returned
    real_roots: np.ndarray
    solution_counts: np.ndarray

    def summary(self) -> dict:
        finite = self.accuracy[np.isfinite(self.accuracy)]
        below = float(np.mean(self.accuracy < 1e-6)) if self.accuracy.size else 0.0
        return {
            "solver": self.solver,
            "n_trials": int(self.accuracy.size),
            "median_accuracy": float(np.median(finite)) if finite.size else math.inf,
            "frac_below_1e_6": below,
            "mean_real_roots": float(np.mean(self.real_roots)),
            "max_solutions": int(np.max(self.solution_counts, initial=0)),
        }


def run_accuracy_experiment(
    n_trials: int, solver_kind: SolverKind, base_seed: int = 0
) -> AccuracyRecord:
    """Noiseless minimal-sample accuracy sweep (min |R - truth| per trial)."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    acc = np.empty(n_trials)
    roots = np.zeros(n_trials, dtype=int)
    counts = np.zeros(n_trials, dtype=int)
    size = _SAMPLE_SIZE[solver_kind]
    for trial in range(n_trials):
        scene = _minimal_scene(solver_kind, trial, base_seed, size)
        try:
            sols = _solve_scene(solver_kind, scene)
        except ScrewposeError:
            acc[trial] = math.inf
            continue
        roots[trial] = sols.real_root_count
        counts[trial] = len(sols)
        try:
            acc[trial] = numerical_accuracy(sols, scene.truth.rotation)
        except EmptySolutionSet:
            acc[trial] = math.inf
    return AccuracyRecord(solver_kind.value, acc, roots, counts)


def bench_threshold(pixel_noise_std: float, focal_px: float = 500.0) -> float:
    """Sampson gate for a noise level.

    Four ray-space pixels of slack keeps true inliers through the gate even
    where the Sampson gradient amplifies the noise (points near the epipole
    of a forward motion); the floor covers the noiseless case.
    """
    return max(1e-3, 4.0 * pixel_noise_std / focal_px)


@dataclass(frozen=True)
class RansacRow:
    solver: str
    motion_kind: str
    pixel_noise_std: float
    screw_disturb_std: float
    mean_rotation_error_deg: float
    mean_translation_error_deg: float
    fallback_rate: float
    n_seeds: int


def run_ransac_experiment(
    grid,
    solvers,
    n_seeds: int = 200,
    n_points: int = 100,
    outlier_ratio: float = 0.3,
    base_seed: int = 0,
) -> list:
    """Mean RANSAC errors for each (config template, solver) cell.

    ``grid`` is an iterable of SyntheticConfig templates; each is rerun with
    ``n_seeds`` different seeds (and the given point count and outlier ratio),
    and every solver in ``solvers`` is estimated on the identical scenes.
    """
    rows = []
    for template in grid:
        scenes = []
        for s in range(n_seeds):
            cfg = SyntheticConfig(
                motion_kind=template.motion_kind,
                pixel_noise_std=template.pixel_noise_std,
                angle_noise_std=template.angle_noise_std,
                screw_disturb_std=template.screw_disturb_std,
                rotation_angle_std=template.rotation_angle_std,
                n_points=n_points,
                outlier_ratio=outlier_ratio,
                focal_px=template.focal_px,
                fov_deg=template.fov_deg,
                seed=base_seed + s,
            )
            scenes.append(generate_scene(cfg))
        threshold = bench_threshold(template.pixel_noise_std, template.focal_px)
        for kind in solvers:
            rot, trans, fb = [], [], 0
            for s, scene in enumerate(scenes):
                rc = RansacConfig(solver_kind=kind, threshold=threshold, seed=base_seed + s)
                theta = scene.measured_theta if kind is SolverKind.THREE_P_RA_ST0 else None
                try:
                    res = ransac_estimate(scene.pairs, rc, theta=theta)
                except ScrewposeError:
                    continue
                rot.append(rotation_error(res.motion.rotation, scene.truth.rotation))
                trans.append(translation_direction_error(
                    res.motion.translation, scene.truth.translation))
                fb += res.used_degenerate_fallback
            rows.append(RansacRow(
                kind.value,
                template.motion_kind,
                template.pixel_noise_std,
                template.screw_disturb_std,
                float(np.mean(rot)) if rot else math.inf,
                float(np.mean(trans)) if trans else math.inf,
                fb / max(len(rot), 1),
                n_seeds,
            ))
    return rows


@dataclass(frozen=True)
class TimingRecord:
    solver: str
    n_trials: int
    mean_ms: float
    median_ms: float


def run_timing(solver_kind: SolverKind, n_trials: int, base_seed: int = 0) -> TimingRecord:
    """Wall-clock per-solve statistics on pre-generated minimal scenes."""
    if n_trials < 100:
        raise ValueError("timing needs at least 100 trials to be meaningful")
    size = _SAMPLE_SIZE[solver_kind]
    scenes = [_minimal_scene(solver_kind, t, base_seed, size) for t in range(n_trials)]
    times = np.empty(n_trials)
    for i, scene in enumerate(scenes):
        t0 = time.perf_counter()
        try:
            _solve_scene(solver_kind, scene)
        except ScrewposeError:
            pass
        times[i] = time.perf_counter() - t0
    times *= 1e3
    return TimingRecord(
        solver_kind.value, n_trials, float(np.mean(times)), float(np.median(times))
    )


def format_csv(fieldnames, rows) -> str:
    """CSV text with floats at nine significant digits."""
    out = io.StringIO()
    out.write(",".join(fieldnames) + "\n")
    for row in rows:
        cells = []
        for name in fieldnames:
            v = row[name] if isinstance(row, dict) else getattr(row, name)
            if isinstance(v, float):
                cells.append("%.9g" % v)
            else:
                cells.append(str(v))
        out.write(",".join(cells) + "\n")
    return out.getvalue()
