import numpy as np
import pytest

from ssreg.control import (
    CostModel,
    OptimizerSet,
    QuadraticCost,
    controller_step,
    hausdorff_distance,
    lyapunov_diagnostic,
    optimizer,
    run_closed_loop,
    run_static_loop,
    step_size_certificate,
    verify_pl_and_lipschitz,
)
from ssreg.core.exceptions import CertificateConditionError, ContractViolation
from ssreg.core.models import RunStatus
from ssreg.lti import random_admissible_system, steady_state_gains

from .helpers import well_conditioned_system


@pytest.fixture
def scalar_cost():
    return QuadraticCost.isotropic(1, 1, y_ref=4.0)


def _random_cost(rng, m, p):
    F = rng.standard_normal((m, m))
    K = rng.standard_normal((p, p))
    return QuadraticCost(F @ F.T + np.eye(m), K @ K.T + np.eye(p), rng.standard_normal(p))


def test_controller_step_example(scalar_cost):
    assert np.allclose(controller_step([0.0], [0.0], [[2.0]], scalar_cost, 0.1), [1.6])


def test_zero_step_keeps_input(scalar_cost):
    assert np.array_equal(controller_step([0.7], [3.0], [[2.0]], scalar_cost, 0.0), [0.7])
    with pytest.raises(ContractViolation):
        controller_step([0.7], [3.0], [[2.0]], scalar_cost, -0.1)


def test_controller_step_checks_gain_shape(scalar_cost):
    with pytest.raises(ContractViolation):
        controller_step([0.0], [0.0], np.ones((2, 1)), scalar_cost, 0.1)


def test_stationary_pair_is_fixed(scalar_cost):
    u_star = optimizer(scalar_cost, [[2.0]], [[1.0]], [0.0])
    assert np.allclose(u_star, [1.6])
    y = 2.0 * u_star
    assert np.allclose(controller_step(u_star, y, [[2.0]], scalar_cost, 0.1), u_star)


def test_optimizer_special_cases():
    cost = QuadraticCost.isotropic(2, 3)
    rng = np.random.default_rng(0)
    G = rng.standard_normal((3, 2))
    H = rng.standard_normal((3, 1))
    assert np.allclose(optimizer(cost, G, H, [0.0]), 0.0)

    scalar = QuadraticCost.isotropic(1, 1, y_ref=4.0)
    assert np.allclose(optimizer(scalar, [[2.0]], [[1.0]], [4.0]), 0.0)


def test_optimizer_is_a_fixed_point_for_random_costs():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m, p, r = 3, 4, 2
        cost = _random_cost(rng, m, p)
        G = rng.standard_normal((p, m))
        H = rng.standard_normal((p, r))
        w = rng.standard_normal(r)
        u_star = optimizer(cost, G, H, w)
        eta = 1.0 / cost.composite_lipschitz(G)
        u = u_star
        for _ in range(100):
            u = controller_step(u, G @ u + H @ w, G, cost, eta)
        assert np.linalg.norm(u - u_star) <= 1e-10 * max(1.0, np.linalg.norm(u_star))


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    cost = _random_cost(rng, 3, 2)
    G = rng.standard_normal((2, 3))
    H = rng.standard_normal((2, 1))
    w = rng.standard_normal(1)
    h = 1e-5
    for _ in range(10):
        u = rng.standard_normal(3)
        numeric = np.array([
            (cost.objective(u + h * e, G, H, w) - cost.objective(u - h * e, G, H, w)) / (2 * h)
            for e in np.eye(3)
        ])
        exact = cost.gradient(u, G, H, w)
        assert np.linalg.norm(numeric - exact) <= 1e-6 * max(1.0, np.linalg.norm(exact))


def test_quadratic_excess_matches_generic_definition():
    rng = np.random.default_rng(5)
    cost = _random_cost(rng, 2, 3)
    G = rng.standard_normal((3, 2))
    H = rng.standard_normal((3, 2))
    w = rng.standard_normal(2)
    u = rng.standard_normal(2)
    assert abs(cost.excess(u, G, H, w) - CostModel.excess(cost, u, G, H, w)) <= 1e-9


def test_cost_rejects_bad_weights():
    with pytest.raises(ContractViolation):
        QuadraticCost([[0.0]], [[1.0]], [0.0])
    with pytest.raises(ContractViolation):
        QuadraticCost([[1.0, 2.0], [0.0, 1.0]], [[1.0]], [0.0])
    with pytest.raises(ContractViolation):
        QuadraticCost([[1.0]], [[1.0]], [0.0, 1.0])


def test_hausdorff_distance():
    a = OptimizerSet.singleton([0.0, 0.0])
    b = OptimizerSet.singleton([3.0, 4.0])
    assert hausdorff_distance(a, b) == pytest.approx(5.0)
    assert hausdorff_distance(OptimizerSet(np.array([[0.0], [1.0]])), OptimizerSet(np.array([[0.0]]))) == pytest.approx(1.0)
    assert b.distance_to([3.0, 0.0]) == pytest.approx(4.0)


def test_scalar_certificate_constants(scalar_system, scalar_cost):
    cert = step_size_certificate(scalar_system, scalar_cost, [[2.0]], epsilon=0.5, Q=[[33.0]])
    assert cert.ell == pytest.approx(10.0)
    assert cert.a == pytest.approx(8.0)
    assert cert.P[0, 0] == pytest.approx(44.0)
    assert cert.b == pytest.approx(410.6667, rel=1e-5)
    assert cert.eta_star == pytest.approx(1.2029e-3, rel=1e-3)
    assert cert.eta_static == pytest.approx(0.2)
    assert cert.eta_star < cert.eta_static


def test_default_certificate_weight(scalar_system, scalar_cost):
    cert = step_size_certificate(scalar_system, scalar_cost, [[2.0]])
    assert cert.lambda_min_Q == pytest.approx(1.01 * 32.0)
    assert cert.alpha3_coefficient(0.5 * cert.eta_star) > 0


def test_certificate_preconditions(scalar_system, scalar_cost):
    for epsilon in (0.0, 1.0):
        with pytest.raises(ContractViolation):
            step_size_certificate(scalar_system, scalar_cost, [[2.0]], epsilon=epsilon)
    with pytest.raises(CertificateConditionError):
        step_size_certificate(scalar_system, scalar_cost, [[2.0]], epsilon=0.5, Q=[[10.0]])


def test_scalar_closed_loop_converges(scalar_system, scalar_cost):
    cert = step_size_certificate(scalar_system, scalar_cost, [[2.0]])
    eta = 0.5 * cert.eta_star
    record = run_closed_loop(scalar_system, scalar_cost, [[2.0]], eta, [0.0], [0.0], np.ones((5000, 1)), 5000)
    assert record.status == RunStatus.COMPLETED
    assert record.length == 5001
    assert record.terminal_error <= 1e-6
    assert np.allclose(record.optimizers, 0.8)


def test_scalar_lyapunov_decreases_every_step(scalar_system, scalar_cost):
    cert = step_size_certificate(scalar_system, scalar_cost, [[2.0]])
    record = run_closed_loop(scalar_system, scalar_cost, [[2.0]], 0.5 * cert.eta_star, [-1.0], [3.0],
                             np.ones((3000, 1)), 3000)
    diagnostic = lyapunov_diagnostic(scalar_system, scalar_cost, [[2.0]], [[2.0]], record, cert)
    assert diagnostic.all_ok
    assert diagnostic.values[-1] < diagnostic.values[0]
    assert len(diagnostic.pairs()) == record.length


def test_lyapunov_is_zero_at_equilibrium(scalar_system, scalar_cost):
    cert = step_size_certificate(scalar_system, scalar_cost, [[2.0]])
    record = run_closed_loop(scalar_system, scalar_cost, [[2.0]], 0.5 * cert.eta_star, [3.6], [0.8],
                             np.ones((100, 1)), 100)
    diagnostic = lyapunov_diagnostic(scalar_system, scalar_cost, [[2.0]], [[2.0]], record, cert)
    assert np.max(np.abs(diagnostic.values)) <= 1e-9
    assert diagnostic.all_ok
    assert record.terminal_error <= 1e-12


def test_random_closed_loops_converge_with_certificate():
    rng = np.random.default_rng(11)
    for index in range(10):
        n = 1 + index % 5
        m = 1 + index % 2
        r = 1 + index % 3
        system = well_conditioned_system(n, m, r, seed=index)
        gains = steady_state_gains(system)
        cost = QuadraticCost.isotropic(m, n, y_ref=rng.standard_normal(n))
        cert = step_size_certificate(system, cost, gains.G, gains=gains)
        assert cert.eta_star < cert.eta_static
        eta = 0.5 * cert.eta_star
        w = np.tile(rng.standard_normal(r), (10_000, 1))
        record = run_closed_loop(system, cost, gains.G, eta, rng.standard_normal(n), np.zeros(m), w, 10_000,
                                 gains=gains)
        assert record.terminal_error <= 1e-6
        diagnostic = lyapunov_diagnostic(system, cost, gains.G, gains.H, record, cert, gains=gains)
        assert diagnostic.all_ok


def test_admissible_random_systems_converge_with_certificate():
    rng = np.random.default_rng(12)
    for index in range(10):
        n = 1 + index % 5
        r = 1 + index % 2
        system = random_admissible_system(n, 1, n, r, seed=100 + index, spectral_radius_target=0.5)
        gains = steady_state_gains(system)
        y_ref = rng.standard_normal(n)
        # l 与 q 成正比, b 与 q^2 成正比; 取 q = l/(2b) 使 eta* 不被 b 压得过小
        unit = step_size_certificate(system, QuadraticCost.isotropic(1, n, y_ref=y_ref), gains.G, gains=gains)
        q = min(1.0, unit.ell / (2.0 * unit.b))
        cost = QuadraticCost.isotropic(1, n, q_u=q, q_y=q, y_ref=y_ref)
        cert = step_size_certificate(system, cost, gains.G, gains=gains)
        assert cert.eta_star < cert.eta_static
        w = np.tile(rng.standard_normal(r), (10_000, 1))
        record = run_closed_loop(system, cost, gains.G, 0.5 * cert.eta_star, rng.standard_normal(n), [0.0], w,
                                 10_000, gains=gains)
        assert record.terminal_error <= 1e-6
        diagnostic = lyapunov_diagnostic(system, cost, gains.G, gains.H, record, cert, gains=gains)
        assert diagnostic.all_ok


def test_drift_bound_holds_under_sinusoidal_disturbance(scalar_system, scalar_cost):
    cert = step_size_certificate(scalar_system, scalar_cost, [[2.0]])
    w = np.sin(2 * np.pi * np.arange(3001) / 200)[:, None]
    record = run_closed_loop(scalar_system, scalar_cost, [[2.0]], 0.5 * cert.eta_star, [0.0], [0.0], w, 3000)
    diagnostic = lyapunov_diagnostic(scalar_system, scalar_cost, [[2.0]], [[2.0]], record, cert)
    assert diagnostic.all_ok
    # 只含 d^T N d 的 sigma 形式忽略了交叉项, 最优点移动时会被突破
    assert np.any(~diagnostic.sigma_ok)


def test_sigma_form_only_fails_where_disturbance_moves(scalar_system, scalar_cost):
    cert = step_size_certificate(scalar_system, scalar_cost, [[2.0]])
    w = np.where(np.arange(3001) < 1000, 1.0, 2.0)[:, None]
    record = run_closed_loop(scalar_system, scalar_cost, [[2.0]], 0.5 * cert.eta_star, [0.0], [0.0], w, 3000)
    diagnostic = lyapunov_diagnostic(scalar_system, scalar_cost, [[2.0]], [[2.0]], record, cert)
    assert diagnostic.all_ok
    moving = record.norm_dw[:-1] > 0
    assert np.count_nonzero(moving) == 1
    assert np.all(diagnostic.drift[~moving] == 0.0)
    assert np.all(diagnostic.sigma_ok[~moving])


def test_drift_bound_holds_for_random_loops_with_moving_disturbance():
    for index in range(3):
        n, m, r = 2 + index, 1 + index % 2, 2
        system = well_conditioned_system(n, m, r, seed=20 + index)
        gains = steady_state_gains(system)
        cost = QuadraticCost.isotropic(m, n, y_ref=np.ones(n))
        cert = step_size_certificate(system, cost, gains.G, gains=gains)
        steps = np.arange(2001)[:, None]
        w = np.sin(2 * np.pi * steps / 100 + np.arange(r))
        record = run_closed_loop(system, cost, gains.G, 0.5 * cert.eta_star, np.zeros(n), np.zeros(m), w, 2000,
                                 gains=gains)
        diagnostic = lyapunov_diagnostic(system, cost, gains.G, gains.H, record, cert, gains=gains)
        assert diagnostic.all_ok


@pytest.mark.parametrize("factor", [1.5, 5.0])
def test_large_steps_diverge(scalar_system, scalar_cost, factor):
    eta = factor * 0.2
    record = run_closed_loop(scalar_system, scalar_cost, [[2.0]], eta, [0.0], [0.0], np.ones((5000, 1)), 5000)
    assert record.diverged
    assert record.diverged_at is not None
    assert record.length == record.diverged_at


def test_step_between_certificate_and_static_bound_can_still_converge(scalar_system, scalar_cost):
    cert = step_size_certificate(scalar_system, scalar_cost, [[2.0]])
    eta = 0.05
    assert cert.eta_star < eta < cert.eta_static
    record = run_closed_loop(scalar_system, scalar_cost, [[2.0]], eta, [0.0], [0.0], np.ones((2000, 1)), 2000)
    assert record.status == RunStatus.COMPLETED
    assert record.terminal_error <= 1e-6


def test_static_loop_step_threshold(scalar_cost):
    w = np.zeros((500, 1))
    converging = run_static_loop(scalar_cost, [[2.0]], [[1.0]], w, 0.15, [0.0], 500)
    assert converging.status == RunStatus.COMPLETED
    assert converging.errors[-1] <= 1e-10
    diverging = run_static_loop(scalar_cost, [[2.0]], [[1.0]], w, 0.3, [0.0], 500)
    assert diverging.status == RunStatus.DIVERGED


def test_slower_disturbance_gives_tighter_band(scalar_system, scalar_cost):
    cert = step_size_certificate(scalar_system, scalar_cost, [[2.0]])
    eta = 0.5 * cert.eta_star
    horizon = 8000
    bands = []
    for period in (2000, 4000, 8000):
        w = np.sin(2 * np.pi * np.arange(horizon + 1) / period)[:, None]
        record = run_closed_loop(scalar_system, scalar_cost, [[2.0]], eta, [3.2], [1.6], w, horizon)
        assert record.status == RunStatus.COMPLETED
        bands.append(float(np.max(record.tracking_error[1000:])))
    assert np.all(np.isfinite(bands))
    assert bands[0] >= bands[1] >= bands[2]


def test_quadratic_cost_satisfies_declared_constants():
    rng = np.random.default_rng(6)
    cost = _random_cost(rng, 3, 4)
    G = rng.standard_normal((4, 3))
    H = rng.standard_normal((4, 2))
    report = verify_pl_and_lipschitz(cost, G, H, rng.standard_normal(2), samples=200, radius=5.0, seed=1)
    assert report.lipschitz_ok
    assert report.pl_ok
    assert report.samples == 200


def test_understated_lipschitz_constant_is_reported(scalar_cost):
    report = verify_pl_and_lipschitz(scalar_cost, [[2.0]], [[1.0]], [0.0], samples=50, radius=1.0, seed=0,
                                     declared_lipschitz=5.0)
    assert not report.lipschitz_ok
    assert report.lipschitz_violations > 0
    assert report.pl_ok


def test_verification_arguments(scalar_cost):
    with pytest.raises(ContractViolation):
        verify_pl_and_lipschitz(scalar_cost, [[2.0]], [[1.0]], [0.0], samples=1, radius=1.0, seed=0)
    with pytest.raises(ContractViolation):
        verify_pl_and_lipschitz(scalar_cost, [[2.0]], [[1.0]], [0.0], samples=10, radius=0.0, seed=0)
