"""Minimal relative-pose solvers for calibrated cameras.

Four solvers with decreasing data needs as motion constraints are added:

* ``solve_5p``: five pairs, unconstrained motion (essential-matrix route).
* ``solve_4p_st0``: four pairs, planar motion (zero screw translation),
  enforced as a trace-free essential matrix.
* ``solve_3p_ra_st0``: three pairs, planar motion with known rotation angle,
  solved directly in rotation parameters.
* ``solve_2p_to``: two pairs, pure translation.

The two essential-matrix solvers share a hidden-variable pipeline: ten cubic
constraints on a four-dimensional matrix pencil are reduced to a 3x3
polynomial matrix in one variable whose determinant (degree 10) is solved
with the real-root machinery in ``poly``.  The angle-constrained solver
eliminates a 23 x 35 template down to a degree-12 univariate polynomial.

All returned translations have unit norm; the overall scale is unobservable
from bearings alone (``recover_scale`` restores it from a known screw
translation).  ``real_root_count`` on the returned set counts the real roots
of the characteristic polynomial before any filtering.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateAxis,
    DegenerateInput,
    NotEnoughPoints,
    RankDeficient,
    ZeroScrewDelta,
    ZeroScrewDirection,
)
from .formulations import kron_rows, trace_row
from .geom import (
    RANK_TOL,
    RigidMotion,
    normalize_essential,
    rotation_angle,
    rotation_axis,
    rotation_form,
    skew,
    triangulate_depths,
)
from .poly import _horner, isolate_and_refine, polymat_det3

MIN_ANGLE = math.radians(0.5)
_INFINITY_TOL = 1e-8


@dataclass(frozen=True)
class SolutionSet:
    """All motions returned by a solver, with their essential matrices.

    The lists run in parallel.  ``real_root_count`` is the number of real
    roots of the solver's characteristic polynomial; entries can be fewer
    when a root corresponds to a solution at infinity.
    """

    motions: list
    essentials: list
    real_root_count: int

    def __len__(self) -> int:
        return len(self.motions)


def _scatter_table(src_a, src_b, dst) -> np.ndarray:
    """Matrix turning flattened coefficient outer products into products."""
    index = {e: k for k, e in enumerate(dst)}
    out = np.zeros((len(src_a) * len(src_b), len(dst)))
    for i, ea in enumerate(src_a):
        for j, eb in enumerate(src_b):
            target = tuple(x + y for x, y in zip(ea, eb))
            out[i * len(src_b) + j, index[target]] = 1.0
    return out


# Monomial bases for the essential-matrix pipeline: degree <= 1, 2, 3 in the
# three pencil coordinates.  The degree-3 order is chosen so that after
# eliminating the first ten monomials the remaining ones separate into
# x * (z...), y * (z...) and pure z groups.
_DEG1 = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)]
_DEG2 = [
    (2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1),
    (0, 0, 2), (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0),
]
_DEG3 = [
    (3, 0, 0), (0, 3, 0), (2, 1, 0), (1, 2, 0), (2, 0, 1),
    (2, 0, 0), (0, 2, 1), (0, 2, 0), (1, 1, 1), (1, 1, 0),
    (1, 0, 2), (1, 0, 1), (1, 0, 0), (0, 1, 2), (0, 1, 1),
    (0, 1, 0), (0, 0, 3), (0, 0, 2), (0, 0, 1), (0, 0, 0),
]
_S11 = _scatter_table(_DEG1, _DEG1, _DEG2)
_S21 = _scatter_table(_DEG2, _DEG1, _DEG3)
_IDX20 = {e: i for i, e in enumerate(_DEG3)}

# Partial-derivative tables: d mono_i / d axis = coef * mono_at_reduced_exponent.
_D20_COEF = np.zeros((3, 20))
_D20_IDX = np.zeros((3, 20), dtype=int)
for _k in range(3):
    for _i, _e in enumerate(_DEG3):
        if _e[_k] > 0:
            _low = list(_e)
            _low[_k] -= 1
            _D20_COEF[_k, _i] = _e[_k]
            _D20_IDX[_k, _i] = _IDX20[tuple(_low)]

_, _, _tvh = np.linalg.svd(trace_row()[None, :])
_TRACE_FREE = _tvh[1:]


def _mul11(a, b):
    return np.outer(a, b).reshape(16) @ _S11


def _mul21(a, b):
    return np.outer(a, b).reshape(40) @ _S21


def _four_dim_span(rows: np.ndarray) -> np.ndarray:
    """Four right singular directions closest to the nullspace of the rows."""
    _, s, vh = np.linalg.svd(rows)
    if s[4] <= RANK_TOL * s[0]:
        raise RankDeficient("point pairs do not independently constrain the pencil")
    return vh[5:9].reshape(4, 3, 3)


def _trace_free_span(rows: np.ndarray) -> np.ndarray:
    """Same, restricted to trace-free matrices so tr E = 0 holds exactly."""
    proj = rows @ _TRACE_FREE.T
    _, s, vh = np.linalg.svd(proj)
    if s[3] <= RANK_TOL * s[0]:
        raise RankDeficient("point pairs do not independently constrain the pencil")
    return (vh[4:8] @ _TRACE_FREE).reshape(4, 3, 3)


def _cubic_constraint_rows(basis: np.ndarray) -> np.ndarray:
    """10 x 20 coefficients of det E = 0 and 2 E E^T E - tr(E E^T) E = 0.

    E runs over the pencil x b0 + y b1 + z b2 + b3, so every entry of E is an
    affine polynomial in (x, y, z) and the constraints are cubics.
    """
    e = np.moveaxis(basis, 0, -1)  # (3, 3, 4): per-entry (x, y, z, 1) coefficients
    eet = np.einsum('ika,jkb->ijab', e, e).reshape(3, 3, 16) @ _S11
    tr = eet[0, 0] + eet[1, 1] + eet[2, 2]
    cubic = 2.0 * np.einsum('ika,kjb->ijab', eet, e).reshape(3, 3, 40) @ _S21
    cubic -= np.einsum('a,ijb->ijab', tr, e).reshape(3, 3, 40) @ _S21
    m00 = _mul11(e[1, 1], e[2, 2]) - _mul11(e[1, 2], e[2, 1])
    m01 = _mul11(e[1, 0], e[2, 2]) - _mul11(e[1, 2], e[2, 0])
    m02 = _mul11(e[1, 0], e[2, 1]) - _mul11(e[1, 1], e[2, 0])
    det = _mul21(m00, e[0, 0]) - _mul21(m01, e[0, 1]) + _mul21(m02, e[0, 2])
    return np.vstack([cubic.reshape(9, 20), det[None, :]])


def _hidden_variable_matrix(n: np.ndarray) -> list:
    """3x3 polynomial matrix in z acting on (x, y, 1) after the elimination.

    ``n`` is the reduced tail of the constraint system: row r states that the
    r-th leading monomial equals -n[r] . tail.  Pairing rows whose leading
    monomials differ by a factor z cancels everything but the tail groups.
    Entries are ascending coefficient lists of pa - z * pb for tail groups
    pa, pb of the paired rows.
    """
    nl = n.tolist()
    rows = []
    for a, b in ((4, 5), (6, 7), (8, 9)):
        ra, rb = nl[a], nl[b]
        rows.append([
            [ra[2], ra[1] - rb[2], ra[0] - rb[1], -rb[0]],
            [ra[5], ra[4] - rb[5], ra[3] - rb[4], -rb[3]],
            [ra[9], ra[8] - rb[9], ra[7] - rb[8], ra[6] - rb[7], -rb[6]],
        ])
    return rows


def _mono20_vec(x, y, z) -> np.ndarray:
    xx, yy, zz = x * x, y * y, z * z
    return np.array([
        xx * x, yy * y, xx * y, x * yy, xx * z, xx, yy * z, yy, x * y * z, x * y,
        x * zz, x * z, x, y * zz, y * z, y, zz * z, zz, z, 1.0,
    ])


def _gn_step(j, r):
    """Gauss-Newton step solving (J^T J) s = -J^T r by the adjugate; None
    when the normal matrix is singular."""
    h = j.T @ j
    g = j.T @ r
    (h00, h01, h02), (_, h11, h12), (_, _, h22) = h.tolist()
    g0, g1, g2 = g.tolist()
    a00 = h11 * h22 - h12 * h12
    a01 = h02 * h12 - h01 * h22
    a02 = h01 * h12 - h02 * h11
    a11 = h00 * h22 - h02 * h02
    a12 = h01 * h02 - h00 * h12
    a22 = h00 * h11 - h01 * h01
    det = h00 * a00 + h01 * a01 + h02 * a02
    if det == 0.0 or not math.isfinite(det):
        return None
    return np.array([
        -(a00 * g0 + a01 * g1 + a02 * g2) / det,
        -(a01 * g0 + a11 * g1 + a12 * g2) / det,
        -(a02 * g0 + a12 * g1 + a22 * g2) / det,
    ])


def _polish_pencil_root(rows, x, y, z):
    """Gauss-Newton on the cubic constraints; the univariate root loses
    accuracy when two roots nearly coincide, the full system does not."""
    v = np.array([x, y, z])
    mono = _mono20_vec(*v)
    r = rows @ mono
    best = float(r @ r)
    for _ in range(3):
        if best < 1e-26:
            break
        j = rows @ (_D20_COEF * mono[_D20_IDX]).T
        step = _gn_step(j, r)
        if step is None:
            break
        vn = v + step
        mn = _mono20_vec(*vn)
        rn = rows @ mn
        cost = float(rn @ rn)
        if cost >= best:
            break
        v, mono, r, best = vn, mn, rn, cost
    return v


def _screw_of(rotation, tx: float, ty: float, tz: float) -> float:
    """Translation component along the rotation axis; rows-of-floats rotation."""
    v0 = rotation[2][1] - rotation[1][2]
    v1 = rotation[0][2] - rotation[2][0]
    v2 = rotation[1][0] - rotation[0][1]
    n = math.sqrt(v0 * v0 + v1 * v1 + v2 * v2)  # 2 sin(angle)
    if n > 1e-6:
        return (v0 * tx + v1 * ty + v2 * tz) / n
    # the skew part vanishes near angle 0 or pi; fall back to the quaternion
    try:
        return float(rotation_axis(np.array(rotation)) @ (tx, ty, tz))
    except DegenerateAxis:
        return 0.0


def _cofactor_rows(m):
    """Rows of the cofactor matrix: cross products of the other two rows."""
    (a0, a1, a2), (b0, b1, b2), (c0, c1, c2) = m
    return (
        (b1 * c2 - b2 * c1, b2 * c0 - b0 * c2, b0 * c1 - b1 * c0),
        (c1 * a2 - c2 * a1, c2 * a0 - c0 * a2, c0 * a1 - c1 * a0),
        (a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0),
    )


def _null3(m):
    """Right null direction of a near-rank-2 3x3 (rows of floats), else None.

    Every cofactor row is orthogonal to two rows of m; the largest one is the
    best-conditioned null estimate.  Near rank one they all vanish and the
    caller should fall back to a dense decomposition.
    """
    rows = _cofactor_rows(m)
    best, bn = None, 0.0
    for r in rows:
        n = r[0] * r[0] + r[1] * r[1] + r[2] * r[2]
        if n > bn:
            best, bn = r, n
    scale = max(abs(v) for row in m for v in row)
    if best is None or bn <= (1e-10 * scale * scale) ** 2:
        return None
    return best


def _best_motion(erows, q1l, q2l, prefer_planar):
    """Pick the decomposition candidate passing cheirality for most pairs.

    Ties are broken toward the smaller screw translation when the solver
    promised a planar motion (the twisted pair rarely is), else toward the
    first candidate.  The factorization is closed form: for e = [t]x R at
    Frobenius norm sqrt(2) the cofactor matrix equals t t^T R, so its largest
    column is the translation axis and cof(e) -+ [t]x e are the upright and
    twisted rotations.  Depths are linear in the translation, so a single
    triangulation per rotation scores both signs of t.

    ``erows``, ``q1l``, ``q2l`` are nested lists of floats; this runs once per
    candidate root and is kept free of array overhead on purpose.
    """
    (a0, a1, a2), (b0, b1, b2), (c0, c1, c2) = erows
    cof = _cofactor_rows(erows)
    n2 = tuple(cof[0][k] ** 2 + cof[1][k] ** 2 + cof[2][k] ** 2 for k in range(3))
    k = max(range(3), key=n2.__getitem__)
    nk = math.sqrt(n2[k])
    if nk <= 1e-14:
        return None
    tx, ty, tz = cof[0][k] / nk, cof[1][k] / nk, cof[2][k] / nk
    g0 = (ty * c0 - tz * b0, ty * c1 - tz * b1, ty * c2 - tz * b2)
    g1 = (tz * a0 - tx * c0, tz * a1 - tx * c1, tz * a2 - tx * c2)
    g2 = (tx * b0 - ty * a0, tx * b1 - ty * a1, tx * b2 - ty * a2)
    r_up = (
        (cof[0][0] - g0[0], cof[0][1] - g0[1], cof[0][2] - g0[2]),
        (cof[1][0] - g1[0], cof[1][1] - g1[1], cof[1][2] - g1[2]),
        (cof[2][0] - g2[0], cof[2][1] - g2[1], cof[2][2] - g2[2]),
    )
    r_tw = (
        (cof[0][0] + g0[0], cof[0][1] + g0[1], cof[0][2] + g0[2]),
        (cof[1][0] + g1[0], cof[1][1] + g1[1], cof[1][2] + g1[2]),
        (cof[2][0] + g2[0], cof[2][1] + g2[1], cof[2][2] + g2[2]),
    )
    btl = [u * tx + v * ty + w * tz for u, v, w in q2l]
    best_r = None
    best_sign = 1.0
    best_count = -1
    best_screw = None
    for r in (r_up, r_tw):
        (r00, r01, r02), (r10, r11, r12), (r20, r21, r22) = r
        cp = 0
        cm = 0
        for i, (x, y, z) in enumerate(q1l):
            ax = r00 * x + r01 * y + r02 * z
            ay = r10 * x + r11 * y + r12 * z
            az = r20 * x + r21 * y + r22 * z
            u, v, w = q2l[i]
            c = ax * u + ay * v + az * w
            if 1.0 - c * c <= 1e-12:
                continue
            at = ax * tx + ay * ty + az * tz
            bt = btl[i]
            lam = at - c * bt
            mu = c * at - bt
            if lam > 0.0:
                if mu > 0.0:
                    cp += 1
            elif lam < 0.0 and mu < 0.0:
                cm += 1
        screw = None
        for sign, count in ((1.0, cp), (-1.0, cm)):
            if count > best_count:
                best_r, best_sign, best_count, best_screw = r, sign, count, screw
                continue
            if count < best_count or not prefer_planar or best_r is r:
                continue
            # tie between the two rotations: keep the flatter screw motion
            if screw is None:
                screw = abs(_screw_of(r, tx, ty, tz))
            if best_screw is None:
                best_screw = abs(_screw_of(best_r, tx, ty, tz))
            if screw < best_screw:
                best_r, best_sign, best_screw = r, sign, screw
    if best_r is None:
        return None
    s = best_sign
    return RigidMotion(np.array(best_r), np.array([s * tx, s * ty, s * tz]))


def _solve_pencil(basis, q1, q2, prefer_planar) -> SolutionSet:
    rows = _cubic_constraint_rows(basis)
    try:
        n = np.linalg.solve(rows[:, :10], rows[:, 10:])
    except np.linalg.LinAlgError as exc:
        raise DegenerateInput("constraint elimination hit a singular pivot") from exc
    b_mat = _hidden_variable_matrix(n)
    p = polymat_det3(b_mat)
    roots = isolate_and_refine(p.coeffs)
    b_desc = [[b_mat[r][c][::-1] for c in range(3)] for r in range(3)]
    flat = [b.ravel().tolist() for b in basis]
    q1l, q2l = q1.tolist(), q2.tolist()
    motions, essentials = [], []
    for z0 in roots:
        m = [[_horner(b_desc[r][c], z0) for c in range(3)] for r in range(3)]
        v = _null3(m)
        if v is None:
            _, _, mvh = np.linalg.svd(np.array(m))
            v = mvh[-1]
        if abs(v[2]) <= _INFINITY_TOL * math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2):
            continue
        x0, y0, z1 = _polish_pencil_root(rows, v[0] / v[2], v[1] / v[2], z0)
        ev = [x0 * f0 + y0 * f1 + z1 * f2 + f3
              for f0, f1, f2, f3 in zip(flat[0], flat[1], flat[2], flat[3])]
        nrm = math.sqrt(sum(c * c for c in ev))
        if nrm < 1e-15:
            continue
        s = math.sqrt(2.0) / nrm
        ev = [c * s for c in ev]
        erows = [ev[0:3], ev[3:6], ev[6:9]]
        motion = _best_motion(erows, q1l, q2l, prefer_planar)
        if motion is None:
            continue
        motions.append(motion)
        essentials.append(np.array(erows))
    return SolutionSet(motions, essentials, len(roots))


def _ray_arrays(pairs):
    q1 = np.array([p.q1 for p in pairs])
    q2 = np.array([p.q2 for p in pairs])
    return q1, q2


def solve_5p(pairs) -> SolutionSet:
    """Relative pose from five or more bearing pairs, unconstrained motion."""
    if len(pairs) < 5:
        raise NotEnoughPoints("five point pairs are needed")
    q1, q2 = _ray_arrays(pairs)
    basis = _four_dim_span(kron_rows(pairs))
    return _solve_pencil(basis, q1, q2, prefer_planar=False)


def solve_4p_st0(pairs) -> SolutionSet:
    """Relative pose from four or more pairs under zero screw translation.

    The screw constraint is equivalent to tr E = 0, which restricts the
    pencil to trace-free matrices and frees one point pair.
    """
    if len(pairs) < 4:
        raise NotEnoughPoints("four point pairs are needed")
    q1, q2 = _ray_arrays(pairs)
    basis = _trace_free_span(kron_rows(pairs))
    return _solve_pencil(basis, q1, q2, prefer_planar=True)


# Monomial basis for the angle-constrained solver: degree <= 4 in the
# quaternion vector part (al, be, ga), ordered so the first ten monomials
# (the ones with al^2) are eliminated by the unit-norm rows and the last
# twelve collapse to univariate groups in ga.
_DEG2Q = [
    (2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1),
    (0, 0, 2), (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0),
]
_EXP35 = [
    (4, 0, 0), (3, 1, 0), (2, 2, 0), (3, 0, 1), (2, 1, 1),
    (2, 0, 2), (3, 0, 0), (2, 1, 0), (2, 0, 1), (2, 0, 0),
    (1, 3, 0), (1, 2, 1), (1, 2, 0), (1, 0, 3), (0, 4, 0),
    (0, 3, 1), (0, 2, 2), (0, 3, 0), (0, 2, 1), (0, 2, 0),
    (1, 1, 2), (1, 1, 1), (1, 1, 0), (1, 0, 2), (1, 0, 1),
    (1, 0, 0), (0, 1, 3), (0, 1, 2), (0, 1, 1), (0, 1, 0),
    (0, 0, 4), (0, 0, 3), (0, 0, 2), (0, 0, 1), (0, 0, 0),
]
_IDX35 = {e: i for i, e in enumerate(_EXP35)}
_S22 = _scatter_table(_DEG2Q, _DEG2Q, _EXP35)

_MONO_SHIFTS = []
for _em in ((1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)):
    _sh = np.zeros((35, 35))
    for _i, _e in enumerate(_EXP35):
        if sum(_e) <= 3:
            _sh[_i, _IDX35[(_e[0] + _em[0], _e[1] + _em[1], _e[2] + _em[2])]] = 1.0
    _MONO_SHIFTS.append(_sh)
_SHIFT_FLAT = np.concatenate(_MONO_SHIFTS, axis=1)

# The unit-norm rows split into a fixed pattern plus a sigma-dependent one.
_NORM_BASE = np.zeros((10, 35))
_NORM_UNIT = np.zeros((10, 35))
for _r, _m in enumerate(_DEG2Q):
    _NORM_BASE[_r, _IDX35[(_m[0] + 2, _m[1], _m[2])]] += 1.0
    _NORM_BASE[_r, _IDX35[(_m[0], _m[1] + 2, _m[2])]] += 1.0
    _NORM_BASE[_r, _IDX35[(_m[0], _m[1], _m[2] + 2)]] += 1.0
    _NORM_UNIT[_r, _IDX35[_m]] = 1.0

# Partial-derivative tables: d mono_i / d axis = coef * mono_at_reduced_exponent.
_D35_COEF = np.zeros((3, 35))
_D35_IDX = np.zeros((3, 35), dtype=int)
for _k in range(3):
    for _i, _e in enumerate(_EXP35):
        if _e[_k] > 0:
            low = list(_e)
            low[_k] -= 1
            _D35_COEF[_k, _i] = _e[_k]
            _D35_IDX[_k, _i] = _IDX35[tuple(low)]


def _mono35_vec(a, b, g) -> np.ndarray:
    pa = (1.0, a, a * a, a * a * a, a * a * a * a)
    pb = (1.0, b, b * b, b * b * b, b * b * b * b)
    pg = (1.0, g, g * g, g * g * g, g * g * g * g)
    return np.array([pa[i] * pb[j] * pg[k] for i, j, k in _EXP35])


def _polish_angle_root(rows, u_raw):
    """Gauss-Newton for the template system in the quaternion vector part."""
    v = np.asarray(u_raw, dtype=float)
    mono = _mono35_vec(*v)
    r = rows @ mono
    best = float(r @ r)
    for _ in range(3):
        if best < 1e-26:
            break
        j = rows @ (_D35_COEF * mono[_D35_IDX]).T
        step = _gn_step(j, r)
        if step is None:
            break
        vn = v + step
        mn = _mono35_vec(*vn)
        rn = rows @ mn
        cost = float(rn @ rn)
        if cost >= best:
            break
        v, mono, r, best = vn, mn, rn, cost
    return v


def _rotation_entry_polys(sigma: float) -> np.ndarray:
    """(3, 3, 10) quadratic coefficients of the rotation form in (al, be, ga)."""
    s2 = sigma * sigma
    d = 2.0 * sigma
    r = np.zeros((3, 3, 10))
    r[0, 0] = [1, 0, -1, 0, 0, -1, 0, 0, 0, s2]
    r[1, 1] = [-1, 0, 1, 0, 0, -1, 0, 0, 0, s2]
    r[2, 2] = [-1, 0, -1, 0, 0, 1, 0, 0, 0, s2]
    r[0, 1] = [0, 2, 0, 0, 0, 0, 0, 0, d, 0]
    r[1, 0] = [0, 2, 0, 0, 0, 0, 0, 0, -d, 0]
    r[0, 2] = [0, 0, 0, 2, 0, 0, 0, -d, 0, 0]
    r[2, 0] = [0, 0, 0, 2, 0, 0, 0, d, 0, 0]
    r[1, 2] = [0, 0, 0, 0, 2, 0, d, 0, 0, 0]
    r[2, 1] = [0, 0, 0, 0, 2, 0, -d, 0, 0, 0]
    return r


def _linear_poly(vec3) -> np.ndarray:
    p = np.zeros(10)
    p[6:9] = vec3
    return p


def _angle_template(q1, q2, sigma: float) -> np.ndarray:
    """23 x 35 coefficient rows of the angle-constrained system.

    Rows 0-9 multiply the unit-norm residual by each monomial of degree <= 2;
    row 10 is the anchored 2x2 determinant for the full triple; rows 11-22
    multiply the three planar anchored determinants by 1 and the three
    coordinates.  Only the determinant rows are rescaled, so the leading
    10 x 10 block keeps its unit-triangular structure.
    """
    rp = _rotation_entry_polys(sigma)
    rows = np.empty((23, 35))
    rows[:10] = _NORM_BASE + (sigma * sigma - 1.0) * _NORM_UNIT
    # Anchored-row entries a_ij, b_ij for the ordered pairs used below, all
    # pushed through the rotation entry polynomials in one contraction.
    ii = (0, 0, 1, 2)
    jj = (1, 2, 2, 0)
    q1i, q1j = q1[list(ii)], q1[list(jj)]
    q2i, q2j = q2[list(ii)], q2[list(jj)]
    c1 = _cross_rows(q1i, q1j)
    c2 = _cross_rows(q2i, q2j)
    outer = np.concatenate([
        q2j[:, :, None] * c1[:, None, :],
        c2[:, :, None] * q1j[:, None, :],
    ])
    ab = outer.reshape(8, 9) @ rp.reshape(9, 10)
    a01, a02, a12, a20 = ab[0], ab[1], ab[2], ab[3]
    b01, b02, b12, b20 = ab[4], ab[5], ab[6], ab[7]
    left = np.stack([a01, b01, a01, b01, a12, b12, a20, b20])
    right = np.stack([
        b02, a02,
        _linear_poly(q2[0]), _linear_poly(q1[0]),
        _linear_poly(q2[1]), _linear_poly(q1[1]),
        _linear_poly(q2[2]), _linear_poly(q1[2]),
    ])
    prod = (left[:, :, None] * right[:, None, :]).reshape(8, 100) @ _S22
    rows[10] = prod[0] - prod[1]
    dets = prod[2::2] + prod[3::2]
    rows[11:] = (dets @ _SHIFT_FLAT).reshape(3, 4, 35).reshape(12, 35)
    peaks = np.max(np.abs(rows[10:]), axis=1)
    if np.any(peaks <= 0.0):
        raise DegenerateInput("a constraint row vanished identically")
    rows[10:] /= peaks[:, None]
    return rows


def _reduce_template(rows: np.ndarray, sigma: float) -> np.ndarray:
    """Schur-eliminate the al^2 block, then row reduce to 13 x 12."""
    v = rows[:10, 10:]
    w = rows[10:, :10]
    x = rows[10:, 10:]
    z = v.copy()
    z[0] = v[0] - v[2] - v[5] - (sigma * sigma - 1.0) * v[9]
    b = x - w @ z
    try:
        return np.linalg.solve(b[:, :13], b[:, 13:])
    except np.linalg.LinAlgError as exc:
        raise DegenerateInput("template reduction hit a singular pivot") from exc


def _gamma_matrix(t: np.ndarray) -> list:
    """3x3 polynomial matrix in ga annihilating (al, be, 1) at solutions.

    Entries are ascending coefficient lists of ga * part(hi) - part(lo) for
    the three tail groups of the paired reduced rows.
    """
    tl = t.tolist()
    rows = []
    for hi, lo in ((12, 11), (11, 10), (9, 8)):
        rh, rl = tl[hi], tl[lo]
        rows.append([
            [-rl[2], rh[2] - rl[1], rh[1] - rl[0], rh[0]],
            [-rl[6], rh[6] - rl[5], rh[5] - rl[4], rh[4] - rl[3], rh[3]],
            [-rl[11], rh[11] - rl[10], rh[10] - rl[9], rh[9] - rl[8], rh[8] - rl[7], rh[7]],
        ])
    return rows


def _cross_rows(x, y):
    """Row-wise cross product of two (n, 3) arrays."""
    out = np.empty_like(x)
    out[:, 0] = x[:, 1] * y[:, 2] - x[:, 2] * y[:, 1]
    out[:, 1] = x[:, 2] * y[:, 0] - x[:, 0] * y[:, 2]
    out[:, 2] = x[:, 0] * y[:, 1] - x[:, 1] * y[:, 0]
    return out


def _perp_basis(u):
    """Two orthonormal rows spanning the plane orthogonal to unit u."""
    ax = np.argmin(np.abs(u))
    v1 = np.zeros(3)
    v1[ax] = 1.0
    v1 -= u[ax] * u
    v1 /= np.linalg.norm(v1)
    v2 = np.array([
        u[1] * v1[2] - u[2] * v1[1],
        u[2] * v1[0] - u[0] * v1[2],
        u[0] * v1[1] - u[1] * v1[0],
    ])
    return np.array([v1, v2])


def _planar_translation(rotation, u_hat, q1, q2):
    """Unit translation orthogonal to the rotation axis fitting the pairs.

    The epipolar rows are projected onto the axis-orthogonal plane and the
    smallest eigenvector of the 2x2 normal matrix picks the direction, so
    the planarity constraint holds exactly even on noisy data.
    """
    g = _cross_rows(q1 @ rotation.T, q2)
    perp = _perp_basis(u_hat / np.linalg.norm(u_hat))
    m = g @ perp.T
    h00 = float(m[:, 0] @ m[:, 0])
    h01 = float(m[:, 0] @ m[:, 1])
    h11 = float(m[:, 1] @ m[:, 1])
    disc = math.sqrt((h00 - h11) ** 2 + 4.0 * h01 * h01)
    lmin = 0.5 * (h00 + h11 - disc)
    va = (h01, lmin - h00)
    vb = (lmin - h11, h01)
    v = va if va[0] ** 2 + va[1] ** 2 >= vb[0] ** 2 + vb[1] ** 2 else vb
    n = math.sqrt(v[0] ** 2 + v[1] ** 2)
    if n <= 1e-30:
        v, n = (1.0, 0.0), 1.0
    t = (v[0] * perp[0] + v[1] * perp[1]) / n
    lam, mu, ok = triangulate_depths(rotation, t, q1, q2)
    plus = np.count_nonzero(ok & (lam > 0.0) & (mu > 0.0))
    minus = np.count_nonzero(ok & (lam < 0.0) & (mu < 0.0))
    return t if plus >= minus else -t


def solve_3p_ra_st0(pairs, theta: float) -> SolutionSet:
    """Relative pose from three pairs, known rotation angle, zero screw.

    ``theta`` is the rotation angle in radians, in (MIN_ANGLE, pi).  Every
    returned rotation has exactly this angle and every translation is exactly
    orthogonal to its rotation axis; the data only selects among such motions.
    """
    if len(pairs) < 3:
        raise NotEnoughPoints("three point pairs are needed")
    if not MIN_ANGLE <= theta < math.pi:
        raise DegenerateInput("rotation angle outside the solvable range")
    q1, q2 = _ray_arrays(pairs)
    sigma = math.cos(0.5 * theta)
    rows = _angle_template(q1, q2, sigma)
    t_red = _reduce_template(rows, sigma)
    c_mat = _gamma_matrix(t_red)
    p = polymat_det3(c_mat)
    roots = isolate_and_refine(p.coeffs)
    radius = math.sqrt(max(1.0 - sigma * sigma, 0.0))
    c_desc = [[c_mat[r][c][::-1] for c in range(3)] for r in range(3)]
    motions, essentials = [], []
    for g0 in roots:
        m = [[_horner(c_desc[r][c], g0) for c in range(3)] for r in range(3)]
        v = _null3(m)
        if v is None:
            _, _, mvh = np.linalg.svd(np.array(m))
            v = mvh[-1]
        if abs(v[2]) <= _INFINITY_TOL * math.sqrt(v[0] ** 2 + v[1] ** 2 + v[2] ** 2):
            continue
        u_raw = _polish_angle_root(rows, np.array([v[0] / v[2], v[1] / v[2], g0]))
        nu = np.linalg.norm(u_raw)
        if nu <= 1e-12:
            continue
        u_hat = (radius / nu) * u_raw
        rot = rotation_form(sigma, u_hat)
        t = _planar_translation(rot, u_hat, q1, q2)
        motions.append(RigidMotion(rot, t))
        essentials.append(normalize_essential(skew(t) @ rot))
    return SolutionSet(motions, essentials, len(roots))


def solve_2p_to(pairs) -> SolutionSet:
    """Translation direction from two or more pairs under pure translation."""
    if len(pairs) < 2:
        raise NotEnoughPoints("two point pairs are needed")
    q1, q2 = _ray_arrays(pairs)
    rows = _cross_rows(q1, q2)
    _, s, vh = np.linalg.svd(rows)
    if s[1] <= RANK_TOL * s[0]:
        raise RankDeficient("bearing pairs leave the translation direction undetermined")
    t = vh[2]
    lam, mu, ok = triangulate_depths(np.eye(3), t, q1, q2)
    plus = np.count_nonzero(ok & (lam > 0.0) & (mu > 0.0))
    minus = np.count_nonzero(ok & (lam < 0.0) & (mu < 0.0))
    if minus > plus:
        t = -t
    motion = RigidMotion(np.eye(3), t)
    return SolutionSet([motion], [normalize_essential(skew(t))], 1)


def recover_scale(motion: RigidMotion, delta: float) -> RigidMotion:
    """Rescale a unit-translation motion so its screw translation equals delta.

    This also resolves the sign ambiguity of the translation direction, since
    the screw translation is signed.
    """
    theta = rotation_angle(motion.rotation)
    if theta <= MIN_ANGLE:
        raise DegenerateAxis("rotation angle too small to define a screw axis")
    if delta == 0.0:
        raise ZeroScrewDelta("a zero screw translation leaves the scale undefined")
    proj = rotation_axis(motion.rotation) @ motion.translation
    if abs(proj) <= 1e-8:
        raise ZeroScrewDirection("translation is orthogonal to the screw axis")
    return RigidMotion(motion.rotation, motion.translation * (delta / proj))
