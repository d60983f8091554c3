import numpy as np
import pytest

from ssreg.core.exceptions import ContractViolation, InsufficientDataError
from ssreg.excitation import (
    build_hankel,
    fundamental_lemma_rank_check,
    min_samples,
    persistency_certificate,
    random_pe_input,
    trajectory_membership,
)
from ssreg.lti import Trajectory, random_admissible_system, simulate


def test_scalar_hankel():
    H = build_hankel([1.0, 2.0, 3.0, 4.0], 2)
    assert H.width == 3
    assert np.array_equal(H.entries, [[1, 2, 3], [2, 3, 4]])


def test_depth_one_hankel_is_transpose():
    signal = np.arange(12.0).reshape(4, 3)
    H = build_hankel(signal, 1)
    assert np.array_equal(H.entries, signal.T)


def test_vector_hankel_blocks():
    H = build_hankel([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]], 2)
    assert np.array_equal(H.entries, [[1, 3], [2, 4], [3, 5], [4, 6]])
    assert np.array_equal(H.block(1, 0), [3.0, 4.0])
    assert H.is_block_hankel()


def test_hankel_structure_on_random_signal():
    signal = np.random.default_rng(0).standard_normal((30, 3))
    H = build_hankel(signal, 5)
    assert H.entries.shape == (15, 26)
    assert H.is_block_hankel()
    for i in range(5):
        for j in range(26):
            assert np.array_equal(H.block(i, j), signal[i + j])


def test_hankel_requires_enough_samples():
    with pytest.raises(InsufficientDataError):
        build_hankel([1.0, 2.0], 3)
    with pytest.raises(ContractViolation):
        build_hankel([1.0, 2.0], 0)


@pytest.mark.parametrize(
    "signal, expected",
    [
        ([1.0, 1.0, 1.0, 1.0], False),
        ([1.0, 0.0, 0.0, 1.0], True),
        ([1.0, 2.0, 4.0, 8.0], False),
    ],
)
def test_order_two_certificates(signal, expected):
    cert = persistency_certificate(signal, 2)
    assert cert.is_pe is expected
    assert cert.rank_required == 2
    assert not cert.insufficient_length


def test_short_signal_reports_insufficient_length():
    cert = persistency_certificate([1.0, 0.0], 2)
    assert not cert.is_pe
    assert cert.insufficient_length


def test_min_samples_values():
    assert min_samples(1, 2) == 3
    assert min_samples(1, 1) == 1
    assert min_samples(10, 21) == 230
    with pytest.raises(ContractViolation):
        min_samples(0, 2)


def test_random_input_is_persistently_exciting():
    u = random_pe_input(2, 20, 3, seed=0)
    assert u.shape == (20, 2)
    assert persistency_certificate(u, 3).is_pe


def test_random_input_succeeds_across_seeds():
    for seed in range(100):
        u = random_pe_input(3, min_samples(3, 4), 4, seed=seed)
        assert persistency_certificate(u, 4).is_pe


def test_random_input_is_deterministic():
    assert np.array_equal(random_pe_input(2, 30, 3, seed=5), random_pe_input(2, 30, 3, seed=5))


def test_random_input_too_short():
    with pytest.raises(InsufficientDataError):
        random_pe_input(2, min_samples(2, 3) - 1, 3, seed=0)


def test_excitation_of_order_t_implies_lower_orders():
    u = random_pe_input(2, 40, 5, seed=1)
    for order in range(1, 5):
        assert persistency_certificate(u, order).is_pe


def test_rank_identity_for_scalar_system(scalar_system):
    u = random_pe_input(1, 20, 2, seed=0)
    traj = simulate(scalar_system, [0.3], u)
    assert fundamental_lemma_rank_check(scalar_system, traj, 1)


def test_rank_identity_fails_for_constant_input(scalar_system):
    traj = simulate(scalar_system, [0.0], np.ones(20))
    assert not fundamental_lemma_rank_check(scalar_system, traj, 2)


def test_rank_identity_preconditions(scalar_system):
    traj = simulate(scalar_system, [0.0], np.ones(10))
    with pytest.raises(ContractViolation):
        fundamental_lemma_rank_check(scalar_system, traj, 0)
    without_states = Trajectory(inputs=traj.inputs, outputs=traj.outputs)
    with pytest.raises(ContractViolation):
        fundamental_lemma_rank_check(scalar_system, without_states, 1)


def test_rank_identity_on_random_systems():
    rng = np.random.default_rng(2024)
    for index in range(50):
        n = int(rng.integers(1, 6))
        m = int(rng.integers(1, 3))
        L = int(rng.integers(1, 4))
        system = random_admissible_system(n, m, n, 1, seed=index, spectral_radius_target=0.8)
        T = min_samples(m, n + L) + 10
        u = random_pe_input(m, T, n + L, seed=1000 + index)
        traj = simulate(system, rng.standard_normal(n), u)
        assert fundamental_lemma_rank_check(system, traj, L)


def _data_trajectory(system, L, seed):
    rng = np.random.default_rng(seed)
    T = min_samples(system.m, system.n + L) + 10
    u = random_pe_input(system.m, T, system.n + L, seed=seed)
    return simulate(system, rng.standard_normal(system.n), u)


def test_membership_accepts_system_trajectories():
    L = 3
    for index in range(20):
        n = 1 + index % 4
        system = random_admissible_system(n, 1 + index % 2, n, 1, seed=index, spectral_radius_target=0.8)
        data = _data_trajectory(system, L, seed=index)
        rng = np.random.default_rng(500 + index)
        candidate = simulate(system, rng.standard_normal(n), rng.standard_normal((L, system.m)))
        is_member, residual, alpha = trajectory_membership(data, candidate.inputs, candidate.outputs[:L], L)
        assert is_member
        assert alpha.shape == (data.length - L + 1,)


def test_membership_rejects_perturbed_outputs():
    L = 3
    system = random_admissible_system(2, 1, 2, 1, seed=4, spectral_radius_target=0.8)
    data = _data_trajectory(system, L, seed=4)
    candidate = simulate(system, [0.5, -0.5], [[1.0], [0.0], [-1.0]])
    perturbed = np.array(candidate.outputs[:L])
    perturbed[1, 0] += 1.0
    is_member, residual, _ = trajectory_membership(data, candidate.inputs, perturbed, L)
    assert not is_member
    assert residual > 1e-3


def test_zero_candidate_is_member_with_zero_coefficients():
    L = 3
    system = random_admissible_system(2, 1, 2, 1, seed=8, spectral_radius_target=0.8)
    data = _data_trajectory(system, L, seed=8)
    is_member, residual, alpha = trajectory_membership(data, np.zeros((L, 1)), np.zeros((L, 2)), L)
    assert is_member
    assert residual == 0.0
    assert np.allclose(alpha, 0.0)


def test_membership_candidate_length_must_match():
    system = random_admissible_system(2, 1, 2, 1, seed=8, spectral_radius_target=0.8)
    data = _data_trajectory(system, 3, seed=8)
    with pytest.raises(ContractViolation):
        trajectory_membership(data, np.zeros((2, 1)), np.zeros((2, 2)), 3)
