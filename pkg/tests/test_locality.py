"""Sampling, finite-difference Jacobians, the audit system and its chart."""

import numpy as np
import pytest

from quniverse import core, dynamics, locality


def test_sampler_is_bitwise_deterministic():
    one = locality.sample_interior_rep(123)
    two = locality.sample_interior_rep(123)
    assert np.array_equal(one.to_array(), two.to_array())


def test_sampler_stays_interior():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        rep = locality.sample_interior_rep(rng)
        assert np.all(rep.r > 0.0)
        assert abs(np.sum(rep.r**2) - 1.0) < 1e-12
        assert np.all((rep.theta > 0.0) & (rep.theta < 2 * np.pi))
        assert 0.0 < rep.omega_a < 1.0 and 0.0 < rep.omega_b < 1.0
        assert np.all((rep.h > -1.0) & (rep.h < 1.0))


def test_jacobian_of_norm_row_matches_gradient():
    rng = np.random.default_rng(1)
    for _ in range(25):
        rep = locality.sample_interior_rep(rng)
        # quadratic: central differences are truncation-free, so a larger
        # step only lowers the rounding floor
        jac = locality.numerical_jacobian(locality.rep_norm_sq, rep, h_step=1e-4)
        expected = np.concatenate([2.0 * rep.r, np.zeros(15)])
        assert np.max(np.abs(jac[0] - expected)) < 1e-10


def test_jacobian_mean_energy_gap_column_uncoupled():
    # without coupling the mean energy is linear in the gaps with slopes
    # R2^2 + R3^2 and R1^2 + R3^2
    rng = np.random.default_rng(2)
    for _ in range(10):
        rep = locality.sample_interior_rep(rng)
        x = rep.to_array()
        x[10:] = 0.0
        jac = locality.numerical_jacobian(locality.rep_mean_energy, x, h_step=1e-6)
        assert abs(jac[0, 8] - (rep.r[2] ** 2 + rep.r[3] ** 2)) < 1e-9
        assert abs(jac[0, 9] - (rep.r[1] ** 2 + rep.r[3] ** 2)) < 1e-9


def test_jacobian_exact_on_linear_maps():
    rng = np.random.default_rng(3)
    matrix = rng.normal(size=(6, 19))
    point = rng.normal(size=19)
    jac = locality.numerical_jacobian(lambda x: matrix @ x, point, h_step=1e-6)
    assert np.max(np.abs(jac - matrix)) < 1e-9


def test_jacobian_propagates_nonfinite_with_coordinate_name():
    def bad(x):
        return np.array([np.nan])

    with pytest.raises(locality.JacobianEvaluationError, match="R0"):
        locality.numerical_jacobian(bad, locality.sample_interior_rep(4), h_step=1e-6)


def test_raw_route_ties_to_extended_state():
    # the raw coordinate functions driving the Jacobians must agree with
    # the typed dynamics route on valid representations
    rng = np.random.default_rng(21)
    for _ in range(25):
        rep = locality.sample_interior_rep(rng)
        config = core.rep_to_config(rep)
        x = rep.to_array()
        for subsystem in dynamics.SUBSYSTEMS:
            raw = locality.rep_sigma1(x, subsystem)
            typed = dynamics.extended_state(config, subsystem).to_array()
            assert np.max(np.abs(raw - typed)) < 1e-12
        assert abs(locality.rep_mean_energy(x) - core.mean_energy(config)) < 1e-12
        assert abs(locality.rep_norm_sq(x) - 1.0) < 1e-12


def test_build_system_shape_and_rhs():
    system = locality.build_system(locality.sample_interior_rep(5), delta_e=1.0)
    assert system.matrix.shape == (14, 19)
    assert system.rhs.shape == (14,)
    assert system.rhs[13] == 1.0
    assert np.all(system.rhs[:13] == 0.0)
    with pytest.raises(ValueError, match="delta_e"):
        locality.build_system(locality.sample_interior_rep(5), delta_e=0.0)


def test_build_system_is_bitwise_deterministic():
    rep = locality.sample_interior_rep(6)
    one = locality.build_system(rep)
    two = locality.build_system(rep)
    assert np.array_equal(one.matrix, two.matrix)
    assert np.array_equal(one.rhs, two.rhs)


def test_build_system_gap_column_uncoupled():
    # without coupling the coherence derivative rotates at the gap, so the
    # gap column of those rows reproduces the coherence components
    rep = locality.sample_interior_rep(7)
    x = rep.to_array()
    x[10:] = 0.0
    system = locality.build_system(x)
    config = core.rep_to_config(core.ConfigRep.from_array(x))
    ext = dynamics.extended_state(config, "A")
    assert abs(system.matrix[3, 8] - (-ext.im_c)) < 1e-9
    assert abs(system.matrix[4, 8] - ext.re_c) < 1e-9
    assert abs(system.matrix[5, 8]) < 1e-9


def test_least_squares_consistent_underdetermined_system():
    matrix = np.hstack([np.eye(3), np.zeros((3, 2))])
    rhs = np.array([1.0, -2.0, 0.5])
    solution, residual = locality.solve_least_squares(matrix, rhs)
    assert residual < 1e-14
    assert np.max(np.abs(matrix @ solution - rhs)) < 1e-14


def test_least_squares_duplicated_row_is_inconsistent():
    # two copies of one unit row with targets 0 and 1: best split is 1/2
    # each, so the residual is exactly 1/sqrt(2)
    row = np.zeros(19)
    row[0] = 1.0
    matrix = np.vstack([row, row])
    rhs = np.array([0.0, 1.0])
    _, residual = locality.solve_least_squares(matrix, rhs)
    assert abs(residual - 1.0 / np.sqrt(2.0)) < 1e-12


def test_sampled_systems_are_solvable():
    rng = np.random.default_rng(8)
    for _ in range(5):
        system = locality.build_system(locality.sample_interior_rep(rng))
        _, residual = locality.solve_least_squares(system)
        assert residual < 1e-12


def test_residual_not_below_homogeneous_subsystem():
    rng = np.random.default_rng(9)
    for _ in range(5):
        system = locality.build_system(locality.sample_interior_rep(rng))
        _, full = locality.solve_least_squares(system)
        _, homogeneous = locality.solve_least_squares(
            system.matrix[:13], np.zeros(13)
        )
        assert homogeneous <= full + 1e-15
        assert homogeneous < 1e-14


def test_solutions_are_tangent_to_the_moduli_sphere():
    rng = np.random.default_rng(10)
    for _ in range(10):
        rep = locality.sample_interior_rep(rng)
        solution, residual = locality.solve_least_squares(locality.build_system(rep))
        assert residual < 1e-12
        assert abs(np.dot(rep.r, solution[:4])) < 1e-9


def test_run_experiment_rejects_empty_run():
    with pytest.raises(ValueError, match="at least 1"):
        locality.run_experiment(n=0, seed=0)


def test_run_experiment_is_deterministic():
    one = locality.run_experiment(n=5, seed=77, keep_samples=True)
    two = locality.run_experiment(n=5, seed=77, keep_samples=True)
    assert one.to_json_dict(per_sample=True) == two.to_json_dict(per_sample=True)


def test_run_experiment_small_batch_all_solvable():
    report = locality.run_experiment(n=50, seed=11)
    assert report.n_solvable == 50
    assert report.failed_indices == ()
    assert report.max_residual < 1e-13
    tighter = locality.run_experiment(n=50, seed=11, threshold=1e-13)
    assert tighter.n_solvable == 50


def test_solvable_flag_tracks_threshold():
    report = locality.run_experiment(n=10, seed=12, keep_samples=True)
    for sample in report.samples:
        assert sample.solvable == (sample.residual_norm < report.threshold)
    strict = locality.run_experiment(n=10, seed=12, threshold=1e-300, keep_samples=True)
    assert strict.n_solvable == 0
    assert all(not s.solvable for s in strict.samples)


def test_report_serialization_round_trip():
    report = locality.run_experiment(n=4, seed=13, keep_samples=True)
    payload = report.to_json_dict(per_sample=True)
    assert payload["n_samples"] == 4
    assert len(payload["samples"]) == 4
    assert payload["samples"][0][0] == 0
    bare = locality.run_experiment(n=4, seed=13)
    with pytest.raises(ValueError, match="per-sample"):
        bare.to_json_dict(per_sample=True)


def test_hyperspherical_radius_of_unit_vectors():
    rng = np.random.default_rng(14)
    for _ in range(100):
        moduli = rng.uniform(0.05, 1.0, 4)
        moduli /= np.linalg.norm(moduli)
        radius, *_ = locality.hyperspherical_forward(moduli)
        assert abs(radius - 1.0) < 1e-12


def test_hyperspherical_round_trip_from_moduli():
    rng = np.random.default_rng(15)
    for _ in range(1000):
        moduli = rng.uniform(0.02, 1.0, 4)
        back = locality.hyperspherical_backward(*locality.hyperspherical_forward(moduli))
        assert np.max(np.abs(back - moduli)) < 1e-12


def test_hyperspherical_round_trip_from_angles():
    rng = np.random.default_rng(16)
    for _ in range(1000):
        angles = rng.uniform(0.05, np.pi / 2 - 0.05, 3)
        moduli = locality.hyperspherical_backward(1.0, *angles)
        _, alpha, beta, gamma = locality.hyperspherical_forward(moduli)
        assert np.max(np.abs(np.array([alpha, beta, gamma]) - angles)) < 1e-12


def test_hyperspherical_pathological_points_raise():
    with pytest.raises(ValueError, match="pathological"):
        locality.hyperspherical_forward([0.0, 1.0, 0.0, 0.0])
    with pytest.raises(ValueError, match="pathological"):
        locality.hyperspherical_forward([0.0, 0.5, 0.5, 0.0])
    with pytest.raises(ValueError, match="zero moduli"):
        locality.hyperspherical_forward([0.0, 0.0, 0.0, 0.0])


def test_transport_of_zero_is_zero():
    rep = locality.sample_interior_rep(17)
    assert np.array_equal(locality.transport_solution(np.zeros(19), rep), np.zeros(18))


def test_transport_phase_increment_passes_through():
    # the chart touches only the moduli block; a pure phase increment maps
    # to the same slot shifted by one
    rep = locality.sample_interior_rep(18)
    dx = np.zeros(19)
    dx[4] = 0.25
    dy = locality.transport_solution(dx, rep)
    expected = np.zeros(18)
    expected[3] = 0.25
    assert np.array_equal(dy, expected)


def test_transport_requires_tangency():
    rep = locality.sample_interior_rep(19)
    dx = np.zeros(19)
    dx[0] = 1e-3
    with pytest.raises(ValueError, match="tangent"):
        locality.transport_solution(dx, rep)


def test_transported_solutions_satisfy_tangent_system():
    rng = np.random.default_rng(20)
    for _ in range(10):
        rep = locality.sample_interior_rep(rng)
        solution, _ = locality.solve_least_squares(locality.build_system(rep))
        transported = locality.transport_solution(solution, rep)
        matrix, rhs = locality.build_tangent_system(rep)
        assert np.linalg.norm(matrix @ transported - rhs) < 1e-8
