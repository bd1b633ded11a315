"""Synthetic two-view scene generation for benchmarking the solvers.

Scenes mimic a calibrated camera with a 60 degree field of view and a 500 px
focal length.  The motion is a rotation of Gaussian-distributed angle about a
random axis plus a unit translation orthogonal to that axis (planar motion);
an optional disturbance along the axis controls how far the scene departs
from the zero-screw assumption.  Points live at depths of 2 to 10 baseline
units and are redrawn until visible in both views.  Pixel noise is applied in
the tangent plane of each ray, and outliers replace the second ray with a
random direction inside the field of view.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geom import BearingPair, RigidMotion, axis_angle_rotation

FORWARD = "forward"
SIDEWAY = "sideway"

_DEPTH_RANGE = (2.0, 10.0)


@dataclass(frozen=True)
class SyntheticConfig:
    """Knobs of the scene generator; defaults follow the benchmark protocol."""

    motion_kind: str = FORWARD
    pixel_noise_std: float = 0.0
    angle_noise_std: float = 0.0  # degrees, on the reported rotation angle
    screw_disturb_std: float = 0.0  # fraction of the unit translation
    rotation_angle_std: float = 5.0  # degrees
    n_points: int = 100
    outlier_ratio: float = 0.0
    focal_px: float = 500.0
    fov_deg: float = 60.0
    seed: int = 0

    def __post_init__(self):
        if self.motion_kind not in (FORWARD, SIDEWAY):
            raise ValueError("motion_kind must be 'forward' or 'sideway'")
        if not 0.0 <= self.outlier_ratio < 1.0:
            raise ValueError("outlier_ratio must be in [0, 1)")
        if self.n_points < 2:
            raise ValueError("n_points must be at least 2")


@dataclass(frozen=True)
class ScenePair:
    """One generated scene: ray pairs, true motion, and the noisy angle."""

    pairs: list
    truth: RigidMotion
    measured_theta: float
    inlier_mask_truth: np.ndarray


def _tangent_noise(q: np.ndarray, std: float, rng: np.random.Generator) -> np.ndarray:
    """Perturb a unit ray in its tangent plane by a Gaussian of given std."""
    ax = int(np.argmin(np.abs(q)))
    b1 = np.zeros(3)
    b1[ax] = 1.0
    b1 -= q[ax] * q
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(q, b1)
    out = q + std * rng.normal() * b1 + std * rng.normal() * b2
    return out / np.linalg.norm(out)


def _random_ray_in_fov(rng: np.random.Generator, half_tan: float) -> np.ndarray:
    x = rng.uniform(-half_tan, half_tan)
    y = rng.uniform(-half_tan, half_tan)
    v = np.array([x, y, 1.0])
    return v / np.linalg.norm(v)


def _in_fov(v: np.ndarray, half_tan: float) -> bool:
    return v[2] > 0.0 and abs(v[0]) <= half_tan * v[2] and abs(v[1]) <= half_tan * v[2]


def generate_scene(cfg: SyntheticConfig) -> ScenePair:
    """Build one deterministic scene from the config (same seed, same scene).

    The translation starts as the forward or sideway unit direction projected
    onto the plane orthogonal to the rotation axis, then picks up an optional
    Gaussian component along the axis, so ``screw_disturb_std = 0`` gives an
    exactly planar motion.
    """
    rng = np.random.default_rng(cfg.seed)
    half_tan = math.tan(0.5 * math.radians(cfg.fov_deg))

    theta = math.radians(cfg.rotation_angle_std) * rng.normal()
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    rotation = axis_angle_rotation(axis, theta)

    heading = np.array([0.0, 0.0, 1.0]) if cfg.motion_kind == FORWARD else np.array([1.0, 0.0, 0.0])
    planar = heading - (heading @ axis) * axis
    norm = np.linalg.norm(planar)
    if norm < 1e-8:
        # axis happened to align with the heading; fall back to the other one
        heading = np.array([1.0, 0.0, 0.0]) if cfg.motion_kind == FORWARD else np.array([0.0, 0.0, 1.0])
        planar = heading - (heading @ axis) * axis
        norm = np.linalg.norm(planar)
    t = planar / norm
    if cfg.screw_disturb_std > 0.0:
        t = t + axis * (cfg.screw_disturb_std * rng.normal())
    truth = RigidMotion(rotation, t)

    noise_std = cfg.pixel_noise_std / cfg.focal_px
    pairs = []
    while len(pairs) < cfg.n_points:
        q1 = _random_ray_in_fov(rng, half_tan)
        depth = rng.uniform(*_DEPTH_RANGE)
        x2 = depth * (rotation @ q1) - t
        mu = np.linalg.norm(x2)
        if mu < 1e-6:
            continue
        q2 = x2 / mu
        if not _in_fov(q2, half_tan):
            continue
        if noise_std > 0.0:
            q1 = _tangent_noise(q1, noise_std, rng)
            q2 = _tangent_noise(q2, noise_std, rng)
        pairs.append(BearingPair(q1, q2))

    n_out = int(round(cfg.outlier_ratio * cfg.n_points))
    inlier_mask = np.ones(cfg.n_points, dtype=bool)
    if n_out > 0:
        chosen = rng.choice(cfg.n_points, size=n_out, replace=False)
        for i in chosen:
            pairs[i] = BearingPair(pairs[i].q1, _random_ray_in_fov(rng, half_tan))
        inlier_mask[chosen] = False

    measured = abs(theta) + math.radians(cfg.angle_noise_std) * rng.normal()
    return ScenePair(pairs, truth, measured, inlier_mask)
