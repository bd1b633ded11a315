"""RANSAC over the minimal solvers, with the benchmark error metrics.

The estimator is a plain hypothesize-and-verify loop: draw a minimal sample,
run the requested solver, score every real solution against all pairs with
the Sampson distance, and keep the hypothesis with the most inliers.  The
iteration budget shrinks adaptively as the observed inlier ratio grows.

The screw-constrained solvers degenerate when the rotation is (near)
identity, so for those a second hypothesis stream runs two-point pure
translation models on the same data; whichever stream ends with more inliers
wins, with ties going to the translation-only model since the constrained
model explains nothing extra there.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptySolutionSet,
    NoModelFound,
    NotEnoughPoints,
    ScrewposeError,
)
from .geom import RigidMotion, rotation_angle, sampson_batch
from .solvers import (
    MIN_ANGLE,
    SolutionSet,
    solve_2p_to,
    solve_3p_ra_st0,
    solve_4p_st0,
    solve_5p,
)


class SolverKind(enum.Enum):
    """Which minimal solver generates hypotheses; values match the CLI flags."""

    FIVE_P = "5p"
    FOUR_P_ST0 = "4p-st0"
    THREE_P_RA_ST0 = "3p-ra-st0"
    TWO_P_TO = "2p-to"


_SAMPLE_SIZE = {
    SolverKind.FIVE_P: 5,
    SolverKind.FOUR_P_ST0: 4,
    SolverKind.THREE_P_RA_ST0: 3,
    SolverKind.TWO_P_TO: 2,
}
_WITH_FALLBACK = (SolverKind.FOUR_P_ST0, SolverKind.THREE_P_RA_ST0)


@dataclass(frozen=True)
class RansacConfig:
    solver_kind: SolverKind
    threshold: float = 1e-3  # Sampson, normalized ray units (about 0.5 px at f = 500)
    max_iterations: int = 500
    confidence: float = 0.99
    seed: int = 0

    def __post_init__(self):
        if self.threshold <= 0.0:
            raise ValueError("threshold must be positive")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie strictly between 0 and 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class RansacResult:
    motion: RigidMotion
    inlier_mask: np.ndarray
    iterations_used: int
    used_degenerate_fallback: bool

    @property
    def inlier_count(self) -> int:
        return int(np.count_nonzero(self.inlier_mask))


def _run_solver(kind: SolverKind, sample, theta) -> SolutionSet:
    if kind is SolverKind.FIVE_P:
        return solve_5p(sample)
    if kind is SolverKind.FOUR_P_ST0:
        return solve_4p_st0(sample)
    if kind is SolverKind.THREE_P_RA_ST0:
        return solve_3p_ra_st0(sample, theta)
    return solve_2p_to(sample)


def ransac_estimate(pairs, cfg: RansacConfig, theta: float | None = None) -> RansacResult:
    """Robustly estimate the relative pose of the pairs under the config.

    ``theta`` (radians) is required for the angle-constrained solver.  Every
    real solution of every minimal sample is scored over all pairs; the model
    with the most Sampson inliers wins.  A model must score more inliers than
    its own sample size, otherwise NoModelFound is raised (a minimal sample
    always explains itself).  Results are deterministic given the seed.
    """
    kind = cfg.solver_kind
    sample_size = _SAMPLE_SIZE[kind]
    n = len(pairs)
    if n < sample_size:
        raise NotEnoughPoints(f"{sample_size} pairs are needed, got {n}")
    if kind is SolverKind.THREE_P_RA_ST0 and theta is None:
        raise ValueError("theta is required for the angle-constrained solver")

    q1 = np.array([p.q1 for p in pairs])
    q2 = np.array([p.q2 for p in pairs])
    use_fallback = kind in _WITH_FALLBACK and n >= 2
    # below the angle cutoff the screw axis is ill-posed; trust only the
    # pure-translation stream there
    main_enabled = not (
        kind is SolverKind.THREE_P_RA_ST0 and not MIN_ANGLE <= theta < math.pi
    )
    adapt_size = sample_size if main_enabled else 2

    rng = np.random.default_rng(cfg.seed)
    best_motion = None
    best_mask = None
    best_count = -1
    best_is_fallback = False
    iterations = cfg.max_iterations

    for it in range(cfg.max_iterations):
        idx = rng.choice(n, size=sample_size, replace=False)
        if main_enabled:
            try:
                sols = _run_solver(kind, [pairs[j] for j in idx], theta)
            except ScrewposeError:
                sols = None
            if sols is not None:
                for motion, essential in zip(sols.motions, sols.essentials):
                    # a screw-constrained model rotating less than the cutoff
                    # is in the ill-posed regime; leave it to the 2P-TO stream
                    if use_fallback and rotation_angle(motion.rotation) < MIN_ANGLE:
                        continue
                    mask = sampson_batch(essential, q1, q2) <= cfg.threshold
                    count = int(np.count_nonzero(mask))
                    if count > best_count:
                        best_motion, best_mask = motion, mask
                        best_count, best_is_fallback = count, False

        if use_fallback:
            idx2 = rng.choice(n, size=2, replace=False)
            try:
                fb = solve_2p_to([pairs[j] for j in idx2])
            except ScrewposeError:
                fb = None
            if fb is not None:
                mask = sampson_batch(fb.essentials[0], q1, q2) <= cfg.threshold
                count = int(np.count_nonzero(mask))
                better = count > best_count
                tied = count == best_count and best_count >= 0 and not best_is_fallback
                if better or tied:
                    best_motion, best_mask = fb.motions[0], mask
                    best_count, best_is_fallback = count, True

        if best_count > 0:
            w = best_count / n
            miss = 1.0 - w ** adapt_size
            if miss <= 0.0:
                iterations = it + 1
                break
            needed = math.log(1.0 - cfg.confidence) / math.log(miss)
            if it + 1 >= needed:
                iterations = it + 1
                break

    win_size = 2 if best_is_fallback else sample_size
    if best_motion is None or best_count <= win_size:
        raise NoModelFound("no hypothesis scored more inliers than its own sample")
    return RansacResult(best_motion, best_mask, iterations, best_is_fallback)


def rotation_error(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Rotation angle of estimate^T truth, in degrees.

    Computed through the Frobenius identity |Ra - Rb| = 2 sqrt(2) sin(ang/2),
    which stays accurate for tiny angles where the trace formula loses half
    the working precision.
    """
    d = float(np.linalg.norm(estimate - truth))
    return math.degrees(2.0 * math.asin(min(1.0, d / (2.0 * math.sqrt(2.0)))))


def translation_direction_error(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Angle between the two translation directions, in degrees."""
    e = np.asarray(estimate, dtype=float)
    t = np.asarray(truth, dtype=float)
    dot = float(e @ t) / (float(np.linalg.norm(e)) * float(np.linalg.norm(t)))
    return math.degrees(math.acos(max(-1.0, min(1.0, dot))))


def numerical_accuracy(solutions: SolutionSet, truth: np.ndarray) -> float:
    """min_i |R_i - truth| over the returned rotations (Frobenius norm)."""
    if len(solutions) == 0:
        raise EmptySolutionSet("no motions to compare against the truth")
    return min(float(np.linalg.norm(m.rotation - truth)) for m in solutions.motions)
