import json
import math

import numpy as np
import pytest

from screwpose.bench import (
    bench_threshold,
    format_csv,
    run_accuracy_experiment,
    run_ransac_experiment,
    run_timing,
)
from screwpose.cli import main, read_correspondences
from screwpose.geom import (
    epipolar_residual,
    essential_from_pose,
    rotation_angle,
    rotation_axis,
    screw_translation,
)
from screwpose.robust import SolverKind
from screwpose.synth import FORWARD, SIDEWAY, SyntheticConfig, generate_scene


class TestSceneGeneration:
    def test_noiseless_pairs_satisfy_epipolar(self):
        scene = generate_scene(SyntheticConfig(n_points=50, seed=1))
        e = essential_from_pose(scene.truth)
        for p in scene.pairs:
            assert abs(epipolar_residual(e, p)) < 1e-12

    def test_truth_is_planar_without_disturbance(self):
        for seed in range(10):
            scene = generate_scene(SyntheticConfig(seed=seed, n_points=4))
            assert abs(screw_translation(scene.truth)) < 1e-12
            assert np.linalg.norm(scene.truth.translation) == pytest.approx(1.0)

    def test_screw_disturbance_breaks_planarity(self):
        scene = generate_scene(SyntheticConfig(screw_disturb_std=0.05, seed=3,
                                               n_points=4))
        assert abs(screw_translation(scene.truth)) > 1e-6

    def test_same_seed_same_scene(self):
        cfg = SyntheticConfig(pixel_noise_std=0.7, outlier_ratio=0.2,
                              n_points=30, seed=8)
        a, b = generate_scene(cfg), generate_scene(cfg)
        assert a.measured_theta == b.measured_theta
        assert np.array_equal(a.inlier_mask_truth, b.inlier_mask_truth)
        for pa, pb in zip(a.pairs, b.pairs):
            assert np.array_equal(pa.q1, pb.q1)
            assert np.array_equal(pa.q2, pb.q2)

    def test_outlier_count(self):
        scene = generate_scene(SyntheticConfig(outlier_ratio=0.3, n_points=50,
                                               seed=2))
        assert len(scene.pairs) == 50
        assert int((~scene.inlier_mask_truth).sum()) == 15

    def test_outliers_violate_epipolar(self):
        scene = generate_scene(SyntheticConfig(outlier_ratio=0.4, n_points=50,
                                               seed=4))
        e = essential_from_pose(scene.truth)
        bad = [abs(epipolar_residual(e, p))
               for p, keep in zip(scene.pairs, scene.inlier_mask_truth) if not keep]
        assert np.median(bad) > 1e-3

    def test_measured_theta_noiseless(self):
        scene = generate_scene(SyntheticConfig(seed=5, n_points=4))
        assert scene.measured_theta == pytest.approx(
            abs(rotation_angle(scene.truth.rotation)), abs=1e-12)

    def test_measured_theta_noise_scale(self):
        """The reported angle carries Gaussian noise of the configured size."""
        errs = []
        for seed in range(2000):
            cfg = SyntheticConfig(angle_noise_std=0.2, n_points=2, seed=seed)
            scene = generate_scene(cfg)
            truth = abs(rotation_angle(scene.truth.rotation))
            errs.append(scene.measured_theta - truth)
        std_deg = math.degrees(np.std(errs))
        assert std_deg == pytest.approx(0.2, rel=0.1)

    def test_pixel_noise_scales_linearly(self):
        """Doubling the pixel budget doubles the epipolar residual spread."""
        def residual_std(noise):
            scene = generate_scene(SyntheticConfig(pixel_noise_std=noise,
                                                   n_points=500, seed=6))
            e = essential_from_pose(scene.truth)
            return np.std([epipolar_residual(e, p) for p in scene.pairs])

        assert residual_std(0.0) < 1e-12
        assert residual_std(1.0) / residual_std(0.5) == pytest.approx(2.0, rel=0.25)

    def test_rays_are_unit_norm(self):
        scene = generate_scene(SyntheticConfig(pixel_noise_std=1.0, n_points=20,
                                               seed=7))
        for p in scene.pairs:
            assert np.linalg.norm(p.q1) == pytest.approx(1.0)
            assert np.linalg.norm(p.q2) == pytest.approx(1.0)

    def test_first_rays_inside_fov(self):
        scene = generate_scene(SyntheticConfig(n_points=200, seed=9))
        half_tan = math.tan(math.radians(30.0))
        for p in scene.pairs:
            u = p.q1 / p.q1[2]
            assert max(abs(u[0]), abs(u[1])) <= half_tan * 1.0001

    @pytest.mark.parametrize("kind", [FORWARD, SIDEWAY])
    def test_motion_kinds(self, kind):
        heading = np.array([0.0, 0.0, 1.0]) if kind == FORWARD else np.array([1.0, 0.0, 0.0])
        for seed in range(5):
            scene = generate_scene(SyntheticConfig(motion_kind=kind, seed=seed,
                                                   n_points=4))
            # the unit translation is the heading projected off the rotation
            # axis, so it keeps a positive heading component and stays planar
            assert scene.truth.translation @ heading > 0.0
            axis = rotation_axis(scene.truth.rotation)
            assert abs(scene.truth.translation @ axis) < 1e-12

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SyntheticConfig(motion_kind="sideways")
        with pytest.raises(ValueError):
            SyntheticConfig(outlier_ratio=1.0)
        with pytest.raises(ValueError):
            SyntheticConfig(n_points=1)


class TestBench:
    def test_accuracy_experiment_summary(self):
        rec = run_accuracy_experiment(50, SolverKind.FIVE_P, base_seed=1)
        s = rec.summary()
        assert s["solver"] == "5p"
        assert s["n_trials"] == 50
        assert s["median_accuracy"] < 1e-9
        assert s["frac_below_1e_6"] >= 0.9
        assert 1 <= s["max_solutions"] <= 10

    def test_accuracy_deterministic(self):
        a = run_accuracy_experiment(20, SolverKind.FOUR_P_ST0, base_seed=2)
        b = run_accuracy_experiment(20, SolverKind.FOUR_P_ST0, base_seed=2)
        assert np.array_equal(a.accuracy, b.accuracy)
        assert np.array_equal(a.real_roots, b.real_roots)

    def test_timing_needs_enough_trials(self):
        with pytest.raises(ValueError):
            run_timing(SolverKind.FIVE_P, 50)

    def test_timing_record(self):
        rec = run_timing(SolverKind.TWO_P_TO, 100, base_seed=3)
        assert rec.n_trials == 100
        assert 0.0 < rec.median_ms < 100.0

    def test_threshold_floor_and_scaling(self):
        assert bench_threshold(0.0) == pytest.approx(1e-3)
        assert bench_threshold(0.5) == pytest.approx(4e-3)
        assert bench_threshold(1.0, focal_px=1000.0) == pytest.approx(4e-3)

    def test_ransac_experiment_rows(self):
        grid = [SyntheticConfig(motion_kind="forward", pixel_noise_std=0.5)]
        rows = run_ransac_experiment(grid, [SolverKind.FIVE_P], n_seeds=3,
                                     n_points=40, outlier_ratio=0.25, base_seed=1)
        assert len(rows) == 1
        row = rows[0]
        assert row.solver == "5p"
        assert row.n_seeds == 3
        assert row.mean_rotation_error_deg < 5.0

    def test_format_csv_nine_digits(self):
        rows = [{"a": 1.0 / 3.0, "b": "x", "c": 2}]
        text = format_csv(["a", "b", "c"], rows)
        assert text.splitlines()[0] == "a,b,c"
        assert text.splitlines()[1] == "0.333333333,x,2"


class TestCli:
    @pytest.fixture()
    def corr_file(self, tmp_path):
        scene = generate_scene(SyntheticConfig(pixel_noise_std=0.3, n_points=30,
                                               outlier_ratio=0.2, seed=21))
        path = tmp_path / "corr.txt"
        lines = ["# comment line", ""]
        for p in scene.pairs:
            lines.append(" ".join("%.17g" % v for v in (*p.q1, *p.q2)))
        path.write_text("\n".join(lines) + "\n")
        return path, scene

    def test_read_correspondences(self, corr_file):
        path, scene = corr_file
        pairs = read_correspondences(str(path))
        assert len(pairs) == 30
        assert pairs[0].q1 == pytest.approx(scene.pairs[0].q1)

    def test_read_rejects_short_lines(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 2 3 4 5\n")
        with pytest.raises(ValueError):
            read_correspondences(str(path))

    def test_solve_outputs_json(self, corr_file, capsys):
        path, scene = corr_file
        code = main(["solve", str(path), "--solver", "5p",
                     "--threshold", "0.004", "--seed", "1"])
        assert code == 0
        out = json.loads(capsys.readouterr().out)
        assert len(out["R"]) == 9
        assert len(out["t"]) == 3
        r = np.array(out["R"]).reshape(3, 3)
        assert np.linalg.norm(r - scene.truth.rotation) < 0.1
        assert out["inliers"] >= 15

    def test_solve_requires_theta_for_angle_solver(self, corr_file, capsys):
        path, _ = corr_file
        assert main(["solve", str(path), "--solver", "3p-ra-st0"]) == 2

    def test_solve_reports_errors(self, tmp_path, capsys):
        path = tmp_path / "two.txt"
        path.write_text("0 0 1 0 0 1\n0.1 0 1 0.1 0 1\n")
        code = main(["solve", str(path), "--solver", "5p"])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_bench_time_csv(self, capsys):
        code = main(["bench-time", "--solvers", "2p-to", "--trials", "100"])
        assert code == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "solver,n_trials,mean_ms,median_ms"
        assert lines[1].startswith("2p-to,100,")

    def test_bench_accuracy_to_file(self, tmp_path, capsys):
        out = tmp_path / "acc.csv"
        code = main(["bench-accuracy", "--solvers", "2p-to", "--trials", "5",
                     "--out", str(out)])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "solver,trial,accuracy,real_roots,solutions"
        assert len(lines) == 6
