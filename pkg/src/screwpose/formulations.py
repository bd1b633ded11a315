"""Polynomial formulations that eliminate the translation (or the pose)
from the epipolar constraints.

Three eliminations produce numeric matrices whose minors vanish at a valid
rotation:

* ``build_sir3``: rows annihilate the relative translation t (n x 3).
* ``build_sir6``: rows annihilate the six projective depths of a point
  triple (6 x 6).
* ``build_sir2``: with the world frame anchored at one of the points, rows
  annihilate that point's two depths (2 x 2).

``nulle_basis`` supports the essential-matrix route: a basis of the linear
space of 3 x 3 matrices compatible with the point pairs.  The determinant
identities tying the eliminations together hold for the polynomial forms of
the rotation parametrizations, which is what the builders evaluate; for a
unit quaternion that form IS the rotation, for Cayley parameters it carries
an extra factor 1 + |v|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankDeficient
from .geom import (
    RANK_TOL,
    CayleyVector,
    UnitQuaternion,
    cayley_form,
    rotation_form,
)


@dataclass(frozen=True)
class Sir3Matrix:
    """Coefficient matrix G with G t = 0; includes the planar row when st0."""

    g: np.ndarray
    st0: bool


@dataclass(frozen=True)
class Sir6Matrix:
    """6x6 matrix annihilating the depth vector of a point triple."""

    m: np.ndarray
    triple: tuple


@dataclass(frozen=True)
class Sir2Matrix:
    """Anchored 2x2 matrix annihilating the anchor point's depths.

    ``f`` stacks the rows of pairs (i, j) and (i, k).  When built with st0,
    ``st0_f`` replaces the (i, k) row with the planar-motion row.
    """

    f: np.ndarray
    st0_f: np.ndarray | None
    triple: tuple


@dataclass(frozen=True)
class NullEBasis:
    """Orthonormal basis (k, 3, 3) of matrices satisfying the linear constraints."""

    basis: np.ndarray


@dataclass(frozen=True)
class EssentialResiduals:
    """Residuals of the polynomial constraints an essential matrix satisfies.

    ``tau_residual`` and ``st0_cubics`` need the rotation trace and are only
    filled when it is supplied; the cubics additionally assume a planar
    (zero screw translation) motion.
    """

    det: float
    cubic_niner: np.ndarray
    trace: float
    tau_residual: float | None
    st0_cubics: np.ndarray | None


def _rotation_and_vector(rot_params):
    """Polynomial rotation form plus the axis-proportional parameter vector."""
    if isinstance(rot_params, UnitQuaternion):
        return rotation_form(rot_params.sigma, rot_params.u), rot_params.u
    if isinstance(rot_params, CayleyVector):
        return cayley_form(rot_params.v), rot_params.v
    r = np.asarray(rot_params, dtype=float)
    if r.shape != (3, 3):
        raise TypeError("rotation parameters must be a quaternion, Cayley vector, or 3x3 matrix")
    return r, None


def translation_row(rotation: np.ndarray, q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Coefficients of t in q2^T [t]x R q1 = 0, namely (R q1) x q2."""
    return np.cross(rotation @ q1, q2)


def build_sir3(rot_params, pairs, st0: bool = False) -> Sir3Matrix:
    """Stack translation rows for all pairs; st0 appends the axis row."""
    r, u = _rotation_and_vector(rot_params)
    rows = [translation_row(r, p.q1, p.q2) for p in pairs]
    if st0:
        if u is None:
            raise ValueError("the planar row needs a parameter vector, not a plain matrix")
        rows.append(np.asarray(u, dtype=float))
    return Sir3Matrix(np.array(rows), st0)


def build_sir6(rot_params, pairs, triple: tuple = (0, 1, 2)) -> Sir6Matrix:
    """6x6 matrix annihilating [lam_i, mu_i, lam_j, mu_j, lam_k, mu_k].

    Rows subtract the i-th point equation lam R q1 - mu q2 = t from the j-th
    and k-th ones, which removes the translation.
    """
    r, _ = _rotation_and_vector(rot_params)
    i, j, k = triple
    m = np.zeros((6, 6))
    for block, other in ((0, j), (3, k)):
        p = pairs[other]
        m[block : block + 3, 0] = -(r @ pairs[i].q1)
        m[block : block + 3, 1] = pairs[i].q2
        m[block : block + 3, 2 + (block // 3) * 2] = r @ p.q1
        m[block : block + 3, 3 + (block // 3) * 2] = -p.q2
    return Sir6Matrix(m, (i, j, k))


def _anchored_row(rotation: np.ndarray, anchor, other) -> np.ndarray:
    """Row with entries multiplying (lam_i, mu_i) for the anchored epipolar form."""
    a = other.q2 @ rotation @ np.cross(anchor.q1, other.q1)
    b = np.cross(anchor.q2, other.q2) @ rotation @ other.q1
    return np.array([a, b])


def build_sir2(rot_params, pairs, triple: tuple = (0, 1, 2), st0: bool = False) -> Sir2Matrix:
    """Anchored 2x2 matrix for a point triple, optionally with the planar row."""
    r, u = _rotation_and_vector(rot_params)
    i, j, k = triple
    row_j = _anchored_row(r, pairs[i], pairs[j])
    row_k = _anchored_row(r, pairs[i], pairs[k])
    f = np.array([row_j, row_k])
    st0_f = None
    if st0:
        if not isinstance(rot_params, UnitQuaternion):
            raise ValueError("the planar row is defined for the quaternion parametrization")
        st0_row = np.array([-(u @ pairs[i].q1), u @ pairs[i].q2])
        st0_f = np.array([row_j, st0_row])
    return Sir2Matrix(f, st0_f, (i, j, k))


def kron_rows(pairs) -> np.ndarray:
    """Linear epipolar constraints on vec(E), one row kron(q2, q1) per pair."""
    q1 = np.array([p.q1 for p in pairs])
    q2 = np.array([p.q2 for p in pairs])
    return (q2[:, :, None] * q1[:, None, :]).reshape(len(pairs), 9)


def trace_row() -> np.ndarray:
    """Coefficients of tr E over vec(E)."""
    return np.eye(3).reshape(9)


def nulle_basis(pairs, extra_rows=None) -> NullEBasis:
    """Orthonormal nullspace basis of the stacked linear constraints on E.

    Raises RankDeficient when the rows are not independent at the relative
    singular-value tolerance, since the solvers assume a nullspace of
    dimension exactly 9 - n_rows.
    """
    rows = kron_rows(pairs)
    if extra_rows is not None:
        rows = np.vstack([rows] + [np.asarray(r, dtype=float).reshape(1, 9) for r in extra_rows])
    n = rows.shape[0]
    if n > 8:
        raise ValueError("at most 8 linear constraints leave a nullspace")
    _, s, vh = np.linalg.svd(rows)
    if s[-1] <= RANK_TOL * s[0]:
        raise RankDeficient("epipolar constraint rows are linearly dependent")
    return NullEBasis(vh[n:].reshape(9 - n, 3, 3))


_CUBIC_TRIPLES = [
    (0, 1, 2),
    (0, 2, 1),
    (1, 0, 2),
    (1, 2, 0),
    (2, 0, 1),
    (2, 1, 0),
]


def _st0_cubics(e: np.ndarray, tau: float) -> np.ndarray:
    """Seven cubic residuals a planar-motion essential matrix satisfies."""
    a = e - e.T
    t1 = tau + 1.0
    out = np.empty(7)
    for n, (i, j, k) in enumerate(_CUBIC_TRIPLES):
        out[n] = (
            a[k, i] * e[i, i] * e[j, k]
            + a[i, j] * e[k, k] * e[i, i]
            - a[j, k]
            * (e[k, k] * e[i, k] - e[k, i] * e[j, j] + e[k, j] * e[j, i] + e[i, j] * e[j, k])
        ) * t1 + 2.0 * a[i, j] * a[j, k] ** 2
    out[6] = (
        a[0, 1] * a[1, 2] * e[2, 0]
        + a[0, 1] * a[2, 0] * e[2, 1]
        + a[0, 1] * e[0, 1] * e[2, 2]
        + a[1, 2] * a[2, 0] * e[1, 0]
        + a[1, 2] * e[0, 0] * e[1, 2]
        + a[2, 0] * e[1, 1] * e[2, 0]
    ) * t1 + 2.0 * a[0, 1] * a[1, 2] * a[2, 0]
    return out


def essential_constraint_residuals(e: np.ndarray, tau: float | None = None) -> EssentialResiduals:
    """Evaluate the polynomial constraints on a candidate essential matrix.

    ``tau`` is the trace of the rotation; passing it enables the trace-coupled
    quartic residual and the seven planar-motion cubics.
    """
    e = np.asarray(e, dtype=float)
    det = float(np.linalg.det(e))
    eet = e @ e.T
    cubic = 2.0 * eet @ e - np.trace(eet) * e
    tr = float(np.trace(e))
    tau_residual = None
    st0 = None
    if tau is not None:
        tr_eet = float(np.trace(eet))
        tr_ee = float(np.trace(e @ e))
        tau_residual = 0.5 * (tau * tau - 1.0) * tr_eet + (tau + 1.0) * tr_ee - tau * tr * tr
        st0 = _st0_cubics(e, tau)
    return EssentialResiduals(det, cubic, tr, tau_residual, st0)
