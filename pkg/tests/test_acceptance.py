"""End-to-end acceptance checks for the solver family.

One test per shipped guarantee; each prints a PASS/FAIL line.  The heavy
noiseless sweep (10000 minimal scenes per solver) is shared by the count,
accuracy, and root-statistics checks.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from screwpose.bench import (
    _minimal_scene,
    bench_threshold,
    run_accuracy_experiment,
    run_ransac_experiment,
    run_timing,
)
from screwpose.geom import (
    RigidMotion,
    random_motion,
    rotation_angle,
    screw_translation,
    se3_invariants,
)
from screwpose.poly import polymat_det3
from screwpose.robust import RansacConfig, SolverKind, ransac_estimate
from screwpose.solvers import (
    _angle_template,
    _gamma_matrix,
    _ray_arrays,
    _reduce_template,
    recover_scale,
    solve_3p_ra_st0,
    solve_4p_st0,
)
from screwpose.synth import SyntheticConfig, generate_scene

N_SWEEP = 10_000
MAX_SOLUTIONS = {
    SolverKind.FIVE_P: 10,
    SolverKind.FOUR_P_ST0: 10,
    SolverKind.THREE_P_RA_ST0: 12,
}


def report(name, ok):
    print(f"{'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


@pytest.fixture(scope="module")
def sweep():
    """10000 noiseless minimal scenes per solver, timed."""
    records = {}
    start = time.perf_counter()
    for kind in (SolverKind.FIVE_P, SolverKind.FOUR_P_ST0,
                 SolverKind.THREE_P_RA_ST0):
        records[kind] = run_accuracy_experiment(N_SWEEP, kind, base_seed=0)
    elapsed = time.perf_counter() - start
    return records, elapsed


def test_solution_count_bounds_and_angle_polynomial_degree(sweep):
    records, elapsed = sweep
    violations = 0
    for kind, bound in MAX_SOLUTIONS.items():
        violations += int(np.count_nonzero(records[kind].solution_counts > bound))

    bad_degree = 0
    for trial in range(N_SWEEP):
        scene = _minimal_scene(SolverKind.THREE_P_RA_ST0, trial, 0, 3)
        sigma = math.cos(0.5 * scene.measured_theta)
        q1, q2 = _ray_arrays(scene.pairs)
        rows = _angle_template(q1, q2, sigma)
        p = polymat_det3(_gamma_matrix(_reduce_template(rows, sigma)))
        bad_degree += p.degree != 12

    ok = violations == 0 and bad_degree == 0 and elapsed < 60.0
    report(f"solution counts within 10/10/12, determinant degree 12 "
           f"({N_SWEEP} scenes, {elapsed:.1f}s)", ok)


def test_noiseless_accuracy(sweep):
    records, _ = sweep
    ok = True
    parts = []
    for kind, rec in records.items():
        frac = float(np.mean(rec.accuracy < 1e-6))
        median = float(np.median(rec.accuracy))
        parts.append(f"{kind.value}: {100 * frac:.2f}% below 1e-6, median {median:.1e}")
        ok = ok and frac >= 0.99 and median < 1e-9
    report("noiseless accuracy (" + "; ".join(parts) + ")", ok)


def test_theorem_suites_run_quickly():
    suites = ["tests/test_formulations.py", "tests/test_geom.py", "tests/test_poly.py"]
    root = Path(__file__).resolve().parents[1]
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", *suites, "-q", "-p", "no:cacheprovider"],
        cwd=root, capture_output=True, text=True)
    elapsed = time.perf_counter() - start
    ok = proc.returncode == 0 and elapsed < 30.0
    report(f"theorem suites green in {elapsed:.1f}s (< 30s)", ok)


def test_constraints_honored_exactly():
    n = 1000
    worst_angle = worst_screw = worst_trace = 0.0
    for trial in range(n):
        scene = _minimal_scene(SolverKind.THREE_P_RA_ST0, trial, 100, 3)
        sols = solve_3p_ra_st0(scene.pairs, scene.measured_theta)
        for m in sols.motions:
            worst_angle = max(worst_angle,
                              abs(rotation_angle(m.rotation) - scene.measured_theta))
            worst_screw = max(worst_screw, abs(screw_translation(m)))
        scene4 = _minimal_scene(SolverKind.FOUR_P_ST0, trial, 100, 4)
        for e in solve_4p_st0(scene4.pairs).essentials:
            worst_trace = max(worst_trace, abs(float(np.trace(e))))
    ok = worst_angle < 1e-7 and worst_screw < 1e-7 and worst_trace < 1e-10
    report(f"constraints honored over {n} scenes (worst angle gap "
           f"{worst_angle:.1e}, screw {worst_screw:.1e}, trace {worst_trace:.1e})", ok)


def test_planar_prior_beats_general_solver_on_planar_scenes():
    grid = [SyntheticConfig(motion_kind="forward", pixel_noise_std=0.5)]
    rows = run_ransac_experiment(
        grid, [SolverKind.FIVE_P, SolverKind.FOUR_P_ST0],
        n_seeds=200, n_points=100, outlier_ratio=0.3, base_seed=0)
    err = {row.solver: row.mean_translation_error_deg for row in rows}
    ok = err["4p-st0"] <= err["5p"]
    report(f"planar-prior solver at least as accurate (4p-st0 "
           f"{err['4p-st0']:.3f} deg vs 5p {err['5p']:.3f} deg, 200 seeds)", ok)


def test_degenerate_fallback_on_pure_translation():
    n = 200
    hits = 0
    threshold = bench_threshold(0.5)
    for i in range(n):
        cfg = SyntheticConfig(motion_kind="forward", rotation_angle_std=0.0,
                              pixel_noise_std=0.5, n_points=100, seed=1000 + i)
        scene = generate_scene(cfg)
        rcfg = RansacConfig(solver_kind=SolverKind.FOUR_P_ST0,
                            threshold=threshold, seed=i)
        hits += ransac_estimate(scene.pairs, rcfg).used_degenerate_fallback
    ok = hits >= 0.9 * n
    report(f"pure-translation fallback chosen in {hits}/{n} trials (>= 90%)", ok)


def test_median_solve_time_under_one_millisecond():
    ok = True
    parts = []
    for kind in (SolverKind.FIVE_P, SolverKind.FOUR_P_ST0,
                 SolverKind.THREE_P_RA_ST0):
        rec = run_timing(kind, 1000, base_seed=5)
        parts.append(f"{kind.value}: {rec.median_ms:.3f}ms")
        ok = ok and rec.median_ms < 1.0
    report("median solve time (" + "; ".join(parts) + ")", ok)


def test_planar_solver_keeps_more_real_roots(sweep):
    records, _ = sweep
    mean_4p = float(records[SolverKind.FOUR_P_ST0].real_roots.mean())
    mean_5p = float(records[SolverKind.FIVE_P].real_roots.mean())
    ok = mean_4p >= mean_5p
    report(f"mean real roots 4p-st0 {mean_4p:.2f} >= 5p {mean_5p:.2f}", ok)


def test_scale_recovery_roundtrip():
    rng = np.random.default_rng(2026)
    worst = 0.0
    done = 0
    while done < 1000:
        motion = random_motion(rng)
        delta = se3_invariants(motion).delta
        if abs(delta) < 1e-6:
            continue
        unit = RigidMotion(motion.rotation,
                           motion.translation / np.linalg.norm(motion.translation))
        restored = recover_scale(unit, delta)
        worst = max(worst,
                    float(np.abs(restored.translation - motion.translation).max()),
                    abs(se3_invariants(restored).delta - delta))
        done += 1
    ok = worst < 1e-9
    report(f"scale recovery over 1000 motions (worst error {worst:.1e})", ok)
