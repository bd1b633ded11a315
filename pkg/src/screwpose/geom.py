"""Core two-view geometry: rotations, rigid motions, essential matrices.

Conventions used throughout the package:

* Bearing vectors are unit 3-vectors in camera coordinates.  A correspondence
  (q1, q2) of the same point seen from two views satisfies the epipolar
  constraint q2^T E q1 = 0 with E = [t]x R, where (R, t) is the relative
  motion: a point with depth lam along q1 maps as mu*q2 = lam*R*q1 - t.
* `quat_to_rotation` maps the quaternion (sigma, u) through
  R = 2(uu^T - sigma [u]x) + (sigma^2 - |u|^2) I, which equals
  exp(-theta [u_hat]x) for sigma = cos(theta/2), |u| = sin(theta/2).
* The rotation AXIS reported by `rotation_axis` (and hence the sign of the
  screw translation) follows the exponential map: R = exp(theta [r]x) with
  theta in (0, pi).  Only the sign of the screw translation depends on this
  choice; anything that tests delta == 0 is convention-neutral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllCheiralityFailed,
    DegenerateAxis,
    ZeroTranslation,
)

# Rotations closer to identity than this have no usable axis.
ANGLE_EPSILON = 1e-6

# Relative singular-value cutoff for rank decisions on constraint matrices.
RANK_TOL = 1e-9


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix [v]x with [v]x w = v x w."""
    v = np.asarray(v, dtype=float)
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


@dataclass(frozen=True)
class UnitQuaternion:
    """Unit quaternion (sigma, u) with sigma the scalar part.

    Stored in canonical sign: sigma >= 0, and for sigma == 0 the first
    nonzero component of u is positive.
    """

    sigma: float
    u: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).reshape(3).copy()
        sigma = float(self.sigma)
        norm2 = sigma * sigma + u @ u
        if abs(norm2 - 1.0) > 1e-9:
            raise ValueError(f"quaternion not unit: |q|^2 = {norm2}")
        if sigma < 0.0 or (sigma == 0.0 and _first_nonzero(u) < 0.0):
            sigma = -sigma
            u = -u
        u.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "u", u)


def _first_nonzero(v: np.ndarray) -> float:
    for x in v:
        if x != 0.0:
            return x
    return 0.0


@dataclass(frozen=True)
class CayleyVector:
    """Cayley rotation parameters v = u / sigma."""

    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(3).copy()
        if not np.all(np.isfinite(v)):
            raise ValueError("cayley vector must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)


@dataclass(frozen=True)
class RigidMotion:
    """Relative pose (rotation, translation); mu*q2 = lam*R*q1 - t."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float).reshape(3, 3).copy()
        t = np.asarray(self.translation, dtype=float).reshape(3).copy()
        r.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)


@dataclass(frozen=True)
class BearingPair:
    """A correspondence of unit bearing vectors in the two views."""

    q1: np.ndarray
    q2: np.ndarray

    def __post_init__(self):
        for name in ("q1", "q2"):
            q = np.asarray(getattr(self, name), dtype=float).reshape(3).copy()
            n = np.linalg.norm(q)
            if n < 1e-12:
                raise ValueError(f"{name} has zero norm")
            q /= n
            q.setflags(write=False)
            object.__setattr__(self, name, q)


@dataclass(frozen=True)
class Se3Invariants:
    """Conjugation invariants of a rigid motion: rotation angle and screw translation."""

    theta: float
    delta: float


def quat_to_rotation(q: UnitQuaternion) -> np.ndarray:
    """Rotation matrix 2(uu^T - sigma [u]x) + (sigma^2 - |u|^2) I."""
    u = q.u
    return rotation_form(q.sigma, u)


def rotation_form(sigma: float, u: np.ndarray) -> np.ndarray:
    """The quaternion rotation form evaluated at raw, possibly non-unit (sigma, u).

    For unit arguments this is a rotation; in general it scales with
    sigma^2 + |u|^2, which is what the determinant identities between the
    elimination formulations are stated against.
    """
    u = np.asarray(u, dtype=float)
    return 2.0 * (np.outer(u, u) - sigma * skew(u)) + (sigma * sigma - u @ u) * np.eye(3)


def cayley_to_rotation(c: CayleyVector) -> np.ndarray:
    """Rotation (I - [v]x)(I + [v]x)^-1; cannot represent a half-turn."""
    v = c.v
    k = skew(v)
    # (I + [v]x)^-1 = (I - [v]x + vv^T) / (1 + |v|^2)
    inv = (np.eye(3) - k + np.outer(v, v)) / (1.0 + v @ v)
    return (np.eye(3) - k) @ inv


def cayley_form(v: np.ndarray) -> np.ndarray:
    """Polynomial Cayley form (I - [v]x) adj(I + [v]x) = (1 + |v|^2) R(v)."""
    v = np.asarray(v, dtype=float)
    k = skew(v)
    return (np.eye(3) - k) @ (np.eye(3) - k + np.outer(v, v))


def rotation_angle(r: np.ndarray) -> float:
    """Rotation angle in [0, pi] from the trace."""
    c = (float(np.trace(r)) - 1.0) / 2.0
    return math.acos(min(1.0, max(-1.0, c)))


def _hamilton_quat(r: np.ndarray) -> tuple[float, np.ndarray]:
    """Quaternion (w, xyz), w >= 0, with R = exp(2*acos(w) [xyz_hat]x)."""
    t = float(np.trace(r))
    if t > 0.0:
        s = 2.0 * math.sqrt(1.0 + t)
        w = 0.25 * s
        xyz = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]]) / s
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = 2.0 * math.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2])
        w = (r[2, 1] - r[1, 2]) / s
        xyz = np.array([0.25 * s, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s])
    elif r[1, 1] >= r[2, 2]:
        s = 2.0 * math.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2])
        w = (r[0, 2] - r[2, 0]) / s
        xyz = np.array([(r[0, 1] + r[1, 0]) / s, 0.25 * s, (r[1, 2] + r[2, 1]) / s])
    else:
        s = 2.0 * math.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1])
        w = (r[1, 0] - r[0, 1]) / s
        xyz = np.array([(r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, 0.25 * s])
    if w < 0.0:
        w, xyz = -w, -xyz
    return w, xyz


def rotation_to_quat(r: np.ndarray) -> UnitQuaternion:
    """Unit quaternion whose `quat_to_rotation` image is r."""
    w, xyz = _hamilton_quat(r)
    n = math.sqrt(w * w + xyz @ xyz)
    # quat_to_rotation uses the conjugate convention, so negate the vector part.
    return UnitQuaternion(w / n, -xyz / n)


def rotation_axis(r: np.ndarray) -> np.ndarray:
    """Unit axis with R = exp(theta [axis]x), theta in (0, pi]."""
    w, xyz = _hamilton_quat(r)
    n = float(np.linalg.norm(xyz))
    if 2.0 * math.atan2(n, w) < ANGLE_EPSILON:
        raise DegenerateAxis("rotation too close to identity for an axis")
    return xyz / n

def axis_angle_rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    """exp(angle [axis]x) for a unit axis (Rodrigues)."""
    axis = np.asarray(axis, dtype=float)
    k = skew(axis)
    return np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)


def screw_translation(h: RigidMotion) -> float:
    """Screw translation delta = r^T t along the rotation axis."""
    return float(rotation_axis(h.rotation) @ h.translation)


def se3_invariants(h: RigidMotion) -> Se3Invariants:
    """The conjugation-invariant pair (theta, delta) of a motion."""
    return Se3Invariants(rotation_angle(h.rotation), screw_translation(h))


def conjugate(h: RigidMotion, x: RigidMotion) -> RigidMotion:
    """Motion of h expressed in the frame moved by x, i.e. x^-1 h x."""
    rx, tx = x.rotation, x.translation
    r, t = h.rotation, h.translation
    return RigidMotion(rx.T @ r @ rx, rx.T @ (r @ tx - tx + t))


def essential_from_pose(h: RigidMotion) -> np.ndarray:
    """Essential matrix [t]x R scaled to Frobenius norm sqrt(2)."""
    t = h.translation
    if np.linalg.norm(t) < 1e-12:
        raise ZeroTranslation("cannot form an essential matrix without translation")
    e = skew(t) @ h.rotation
    return normalize_essential(e)


def normalize_essential(e: np.ndarray) -> np.ndarray:
    """Scale a nonzero 3x3 matrix to Frobenius norm sqrt(2)."""
    n = math.sqrt(float(np.vdot(e, e)))
    if n < 1e-15:
        raise ZeroTranslation("zero matrix cannot be normalized")
    return e * (math.sqrt(2.0) / n)


def triangulate_depths(
    rotation: np.ndarray, translation: np.ndarray, q1: np.ndarray, q2: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Least-squares depths (lam, mu) of lam*R*q1 - mu*q2 = t for stacked rays.

    q1, q2 are (n, 3) unit rays.  Returns (lam, mu, ok) where ok flags pairs
    whose rays stay independent after rotation (the 2x2 system is solvable).
    """
    a = q1 @ rotation.T               # (n, 3) rotated first rays
    c = np.einsum("ij,ij->i", a, q2)  # cos between R q1 and q2
    at = a @ translation
    bt = q2 @ translation
    det = 1.0 - c * c
    ok = det > 1e-12
    det_safe = np.where(ok, det, 1.0)
    lam = (at - c * bt) / det_safe
    mu = (c * at - bt) / det_safe
    return lam, mu, ok


def cheirality_counts(
    rotation: np.ndarray, translation: np.ndarray, q1: np.ndarray, q2: np.ndarray
) -> tuple[int, bool]:
    """(number of pairs in front of both views, whether all pairs pass)."""
    lam, mu, ok = triangulate_depths(rotation, translation, q1, q2)
    good = ok & (lam > 0.0) & (mu > 0.0)
    return int(np.count_nonzero(good)), bool(np.all(good))


def decompose_essential(e: np.ndarray, pairs) -> list[RigidMotion]:
    """Motions (R, t), |t| = 1, with [t]x R ~ e and all pairs in front of both views.

    The four sign/twist candidates from the SVD of e are screened by the
    cheirality of every correspondence; candidates that keep all triangulated
    depths positive in both views survive.
    """
    if len(pairs) == 0:
        raise ValueError("at least one pair is needed to resolve the decomposition")
    q1 = np.array([p.q1 for p in pairs])
    q2 = np.array([p.q2 for p in pairs])
    u, _, vh = np.linalg.svd(np.asarray(e, dtype=float))
    if np.linalg.det(u) < 0.0:
        u = -u
    if np.linalg.det(vh) < 0.0:
        vh = -vh
    w = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    t = u[:, 2]
    out = []
    for r in (u @ w @ vh, u @ w.T @ vh):
        for tc in (t, -t):
            _, all_ok = cheirality_counts(r, tc, q1, q2)
            if all_ok:
                out.append(RigidMotion(r, tc))
    if not out:
        raise AllCheiralityFailed("no decomposition places all points in front")
    return out


def epipolar_residual(e: np.ndarray, pair: BearingPair) -> float:
    """Sampson distance of q2^T E q1 (algebraic error over image-space gradient)."""
    return float(sampson_batch(e, pair.q1[None, :], pair.q2[None, :])[0])


def sampson_batch(e: np.ndarray, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Sampson distances for stacked rays q1, q2 of shape (n, 3)."""
    eq1 = q1 @ e.T        # rows E q1
    etq2 = q2 @ e         # rows E^T q2
    num = np.abs(np.einsum("ij,ij->i", q2, eq1))
    den2 = eq1[:, 0] ** 2 + eq1[:, 1] ** 2 + etq2[:, 0] ** 2 + etq2[:, 1] ** 2
    return num / np.sqrt(np.maximum(den2, 1e-30))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random rotation via a normalized 4-vector quaternion."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    if q[0] < 0.0:
        q = -q
    return quat_to_rotation(UnitQuaternion(q[0], q[1:]))


def random_motion(rng: np.random.Generator, translation_scale: float = 1.0) -> RigidMotion:
    """Random motion with uniform rotation and gaussian translation."""
    return RigidMotion(random_rotation(rng), translation_scale * rng.normal(size=3))
