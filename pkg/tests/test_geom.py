import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from screwpose.errors import AllCheiralityFailed, DegenerateAxis, ZeroTranslation
from screwpose.geom import (
    BearingPair,
    CayleyVector,
    RigidMotion,
    UnitQuaternion,
    axis_angle_rotation,
    cayley_to_rotation,
    conjugate,
    decompose_essential,
    epipolar_residual,
    essential_from_pose,
    quat_to_rotation,
    random_motion,
    random_rotation,
    rotation_angle,
    rotation_axis,
    rotation_to_quat,
    screw_translation,
    se3_invariants,
    skew,
)


def synth_pairs(motion, rng, n, depth_range=(2.0, 10.0)):
    """Exact correspondences for a motion: mu*q2 = lam*R*q1 - t."""
    out = []
    for _ in range(n):
        q1 = rng.normal(size=3)
        q1[2] = abs(q1[2]) + 1.0
        q1 /= np.linalg.norm(q1)
        lam = rng.uniform(*depth_range)
        x2 = lam * motion.rotation @ q1 - motion.translation
        out.append(BearingPair(q1, x2))
    return out


class TestQuaternion:
    def test_identity(self):
        q = UnitQuaternion(1.0, np.zeros(3))
        assert np.allclose(quat_to_rotation(q), np.eye(3))

    def test_half_turn_x(self):
        q = UnitQuaternion(0.0, np.array([1.0, 0.0, 0.0]))
        assert np.allclose(quat_to_rotation(q), np.diag([1.0, -1.0, -1.0]))

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            UnitQuaternion(1.0, np.array([0.5, 0.0, 0.0]))

    def test_canonical_sign(self):
        q = UnitQuaternion(-0.5, np.array([-math.sqrt(0.75), 0.0, 0.0]))
        assert q.sigma == 0.5
        assert q.u[0] > 0.0
        q0 = UnitQuaternion(0.0, np.array([-1.0, 0.0, 0.0]))
        assert q0.u[0] == 1.0

    def test_round_trip_from_matrix(self, rng):
        for _ in range(300):
            r = random_rotation(rng)
            assert np.allclose(quat_to_rotation(rotation_to_quat(r)), r, atol=1e-12)

    @given(st.lists(st.floats(-1.0, 1.0), min_size=4, max_size=4))
    def test_angle_round_trip(self, raw):
        q = np.array(raw)
        n = np.linalg.norm(q)
        if n < 1e-3:
            return
        q /= n
        quat = UnitQuaternion(q[0], q[1:])
        angle = rotation_angle(quat_to_rotation(quat))
        assert angle == pytest.approx(2.0 * math.acos(min(1.0, abs(q[0]))), abs=1e-7)


class TestCayley:
    def test_zero_is_identity(self):
        assert np.allclose(cayley_to_rotation(CayleyVector(np.zeros(3))), np.eye(3))

    def test_quarter_turn_x(self):
        v = np.array([1.0, 0.0, 0.0])
        r = cayley_to_rotation(CayleyVector(v))
        # oracle: direct evaluation of (I - [v]x)(I + [v]x)^-1
        oracle = (np.eye(3) - skew(v)) @ np.linalg.inv(np.eye(3) + skew(v))
        assert np.allclose(r, oracle, atol=1e-14)
        assert rotation_angle(r) == pytest.approx(math.pi / 2, abs=1e-12)
        assert abs(rotation_axis(r) @ np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0)

    def test_matches_quaternion_chart(self, rng):
        # v = u / sigma must reproduce the quaternion rotation
        for _ in range(100):
            q = rng.normal(size=4)
            q /= np.linalg.norm(q)
            if abs(q[0]) < 0.1:
                continue
            quat = UnitQuaternion(abs(q[0]), np.sign(q[0]) * q[1:])
            r1 = quat_to_rotation(quat)
            r2 = cayley_to_rotation(CayleyVector(quat.u / quat.sigma))
            assert np.allclose(r1, r2, atol=1e-10)


class TestAngleAxis:
    def test_angle_of_identity(self):
        assert rotation_angle(np.eye(3)) == 0.0

    def test_quarter_turn(self):
        r = axis_angle_rotation(np.array([0.0, 0.0, 1.0]), math.pi / 2)
        assert rotation_angle(r) == pytest.approx(math.pi / 2, abs=1e-15)

    def test_axis_matches_construction(self, rng):
        for _ in range(200):
            ax = rng.normal(size=3)
            ax /= np.linalg.norm(ax)
            th = rng.uniform(1e-4, math.pi - 1e-4)
            assert np.allclose(rotation_axis(axis_angle_rotation(ax, th)), ax, atol=1e-8)

    def test_axis_near_half_turn(self, rng):
        ax = np.array([0.6, -0.8, 0.0])
        r = axis_angle_rotation(ax, math.pi - 1e-9)
        assert np.allclose(np.abs(rotation_axis(r)), np.abs(ax), atol=1e-6)


class TestScrew:
    def test_planar_motion_is_zero(self):
        r = axis_angle_rotation(np.array([0.0, 0.0, 1.0]), math.pi / 2)
        assert screw_translation(RigidMotion(r, [3.0, 4.0, 0.0])) == pytest.approx(0.0, abs=1e-15)

    def test_axis_component(self):
        r = axis_angle_rotation(np.array([0.0, 0.0, 1.0]), math.pi / 2)
        # oracle: the rotation axis is the unit eigenvector of R for eigenvalue 1,
        # with sign fixed by the antisymmetric part (R - R^T = 2 sin(theta) [axis]x)
        w, v = np.linalg.eig(r)
        axis = np.real(v[:, np.argmin(np.abs(w - 1.0))])
        vee = np.array([r[2, 1] - r[1, 2], r[0, 2] - r[2, 0], r[1, 0] - r[0, 1]])
        if axis @ vee < 0.0:
            axis = -axis
        t = np.array([3.0, 4.0, 5.0])
        assert axis @ t == pytest.approx(5.0, abs=1e-12)
        assert screw_translation(RigidMotion(r, t)) == pytest.approx(5.0, abs=1e-12)

    def test_near_identity_raises(self):
        with pytest.raises(DegenerateAxis):
            screw_translation(RigidMotion(np.eye(3), [1.0, 0.0, 0.0]))

    def test_invariants_record(self):
        r = axis_angle_rotation(np.array([1.0, 0.0, 0.0]), 0.3)
        inv = se3_invariants(RigidMotion(r, [2.0, 0.0, 0.0]))
        assert inv.theta == pytest.approx(0.3, abs=1e-12)
        assert inv.delta == pytest.approx(2.0, abs=1e-12)


class TestConjugation:
    def test_identity_frame_change(self, rng):
        h = random_motion(rng)
        g = conjugate(h, RigidMotion(np.eye(3), np.zeros(3)))
        assert np.allclose(g.rotation, h.rotation)
        assert np.allclose(g.translation, h.translation)

    def test_invariants_preserved(self, rng):
        # rotation angle and screw translation survive any change of frame
        for _ in range(10_000):
            h = random_motion(rng)
            x = random_motion(rng)
            g = conjugate(h, x)
            th = rotation_angle(h.rotation)
            assert abs(rotation_angle(g.rotation) - th) < 1e-10
            if th >= 1e-6:
                assert abs(screw_translation(g) - screw_translation(h)) < 1e-8


class TestEssential:
    def test_zero_translation_raises(self):
        with pytest.raises(ZeroTranslation):
            essential_from_pose(RigidMotion(np.eye(3), np.zeros(3)))

    def test_validity_and_trace(self, rng):
        for _ in range(10_000):
            h = random_motion(rng)
            e = essential_from_pose(h)
            assert abs(np.linalg.norm(e) - math.sqrt(2.0)) < 1e-12
            assert abs(np.linalg.det(e)) < 1e-10
            cubic = 2.0 * e @ e.T @ e - np.trace(e @ e.T) * e
            assert np.linalg.norm(cubic) < 1e-10
            th = rotation_angle(h.rotation)
            if th >= 1e-6:
                d = screw_translation(h) / np.linalg.norm(h.translation)
                rhs = -2.0 * math.sin(th) * d
                assert abs(np.trace(e) - rhs) <= 1e-9 * max(1.0, abs(rhs))

    def test_epipolar_zero_on_exact_pairs(self, rng):
        h = random_motion(rng)
        e = essential_from_pose(h)
        for p in synth_pairs(h, rng, 20):
            assert epipolar_residual(e, p) < 1e-12

    def test_sampson_pixel_scale(self, rng):
        # a 1 px offset at focal length 500 px shows up at roughly 1/500
        h = RigidMotion(axis_angle_rotation(np.array([0.0, 1.0, 0.0]), 0.1), [1.0, 0.0, 0.0])
        e = essential_from_pose(h)
        p = synth_pairs(h, rng, 1)[0]
        offset = np.array([0.0, 1.0 / 500.0, 0.0])
        q2 = p.q2 + offset - (p.q2 @ offset) * p.q2
        res = epipolar_residual(e, BearingPair(p.q1, q2))
        assert 0.1 / 500.0 < res < 10.0 / 500.0


class TestDecompose:
    def test_unique_recovery(self, rng):
        for _ in range(50):
            h = random_motion(rng)
            t = h.translation / np.linalg.norm(h.translation)
            h = RigidMotion(h.rotation, t)
            pairs = synth_pairs(h, rng, 5)
            got = decompose_essential(essential_from_pose(h), pairs)
            assert len(got) == 1
            assert np.linalg.norm(got[0].rotation - h.rotation) < 1e-8
            assert np.linalg.norm(got[0].translation - t) < 1e-8

    def test_empty_pairs_rejected(self):
        with pytest.raises(ValueError):
            decompose_essential(np.eye(3), [])

    def test_all_behind_raises(self, rng):
        h = RigidMotion(np.eye(3), np.array([1.0, 0.0, 0.0]))
        pairs = []
        for _ in range(5):
            q1 = rng.normal(size=3)
            q1[2] = abs(q1[2]) + 1.0
            q1 /= np.linalg.norm(q1)
            lam = -rng.uniform(2.0, 10.0)  # points behind the first camera
            pairs.append(BearingPair(q1, lam * q1 - h.translation))
        with pytest.raises(AllCheiralityFailed):
            decompose_essential(essential_from_pose(h), pairs)


class TestBearingPair:
    def test_normalizes(self):
        p = BearingPair([0.0, 0.0, 2.0], [3.0, 0.0, 4.0])
        assert np.linalg.norm(p.q1) == pytest.approx(1.0)
        assert np.linalg.norm(p.q2) == pytest.approx(1.0)

    def test_zero_ray_rejected(self):
        with pytest.raises(ValueError):
            BearingPair([0.0, 0.0, 0.0], [0.0, 0.0, 1.0])
