import math

import numpy as np
import pytest

from qwitness.dense import DenseOperator, partial_trace, qubit_state, trace_distance
from qwitness.errors import ContractViolation, StructuralError
from qwitness.homogenizer import (
    HomogenizerConfig,
    _admissible,
    _admissible_surface_draws,
    classical_reservoir_check,
    homogenize_step,
    nonadditive_conservation_residual,
    partial_swap,
    run,
    step_recursion,
    xi_coefficient,
)

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def test_partial_swap_limits():
    assert np.allclose(partial_swap(0.0).mat, np.eye(4))
    assert np.allclose(partial_swap(math.pi / 2).mat, 1j * SWAP, atol=1e-15)


def test_partial_swap_is_unitary_and_exchange_symmetric():
    for eta in np.linspace(0, math.pi, 7):
        p = partial_swap(eta)
        assert p.is_unitary(tol=1e-12)
        assert np.allclose(SWAP @ p.mat @ SWAP, p.mat)  # symmetric under Q<->M


def test_partial_swap_conserves_nonadditive_charge():
    for eta in np.linspace(0.0, math.pi / 2, 16):
        assert nonadditive_conservation_residual(eta) < 1e-12
    assert nonadditive_conservation_residual(0.3) < 1e-12


def test_homogenize_step_limits():
    rho = qubit_state((0, 0, 1))
    xi = qubit_state((1, 0, 0))
    out_rho, out_xi = homogenize_step(rho, xi, 0.0)
    assert np.allclose(out_rho, rho) and np.allclose(out_xi, xi)
    out_rho, out_xi = homogenize_step(rho, xi, math.pi / 2)
    assert np.allclose(out_rho, xi) and np.allclose(out_xi, rho)


def test_homogenize_step_matches_closed_recursion():
    rho = qubit_state((0, 0, 1))
    xi = qubit_state((1, 0, 0))
    for eta in (0.2, 0.5, 1.0):
        state = rho
        for _ in range(5):
            exact = homogenize_step(state, xi, eta)
            closed = step_recursion(state, xi, eta)
            assert np.abs(exact[0] - closed[0]).max() < 1e-12
            assert np.abs(exact[1] - closed[1]).max() < 1e-12
            state = exact[0]


def test_homogenize_step_validates_states():
    with pytest.raises(ContractViolation):
        homogenize_step(np.diag([1.5, -0.5]).astype(complex), qubit_state((1, 0, 0)), 0.3)


def test_config_validation():
    with pytest.raises(StructuralError):
        HomogenizerConfig(n_steps=0)
    with pytest.raises(ContractViolation):
        HomogenizerConfig(rho0=np.diag([2.0, -1.0]).astype(complex))


def test_single_full_swap_reaches_reservoir_state():
    traj = run(HomogenizerConfig(n_steps=1, eta=math.pi / 2))
    assert np.allclose(traj.states[-1], traj.config.xi, atol=1e-14)
    assert traj.trace_distances[-1] == pytest.approx(0.0, abs=1e-14)


def test_xi_coefficient_law():
    for eta in (0.2, 0.5, 1.0):
        traj = run(HomogenizerConfig(n_steps=30, eta=eta))
        for n, (kappa, pred) in enumerate(
            zip(traj.xi_coefficients, traj.predicted_coefficients)
        ):
            assert pred == pytest.approx(1 - math.cos(eta) ** (2 * n), abs=1e-15)
            assert kappa == pytest.approx(pred, abs=1e-10)


def test_trajectory_distances_monotone_and_states_positive():
    rng = np.random.default_rng(4)
    for eta in (0.2, 0.4, 1.0):
        # also try a non-default initial state
        vec = rng.normal(size=3)
        vec = 0.8 * vec / np.linalg.norm(vec)
        traj = run(HomogenizerConfig(n_steps=20, eta=eta, rho0=qubit_state(tuple(vec))))
        for a, b in zip(traj.trace_distances, traj.trace_distances[1:]):
            assert b <= a + 1e-12
        for state in traj.states:
            assert np.linalg.eigvalsh(state).min() >= -1e-12
        for used in traj.reservoir_out:
            assert np.linalg.eigvalsh(used).min() >= -1e-12


def test_used_reservoir_state_matches_closed_form():
    cfg = HomogenizerConfig(n_steps=3, eta=0.5)
    traj = run(cfg)
    for n, used in enumerate(traj.reservoir_out):
        _, expected = step_recursion(traj.states[n], cfg.xi, cfg.eta)
        assert np.abs(used - expected).max() < 1e-12


def test_fresh_ancilla_steps_match_full_joint_simulation():
    # two collisions computed on the full three-qubit joint state
    eta = 0.45
    cfg = HomogenizerConfig(n_steps=2, eta=eta)
    traj = run(cfg)
    p = partial_swap(eta).mat
    u1 = np.kron(p, np.eye(2))          # acts on (Q, M1), M2 idle
    # P on (Q, M2) with M1 idle: permute the SWAP embedding
    perm = np.zeros((8, 8))
    for q in range(2):
        for m1 in range(2):
            for m2 in range(2):
                perm[q * 4 + m2 * 2 + m1, q * 4 + m1 * 2 + m2] = 1
    u2 = perm @ np.kron(p, np.eye(2)) @ perm
    joint0 = np.kron(np.kron(cfg.rho0, cfg.xi), cfg.xi)
    joint = u2 @ (u1 @ joint0 @ u1.conj().T) @ u2.conj().T
    rho_final = partial_trace(DenseOperator((2, 2, 2), joint), keep=(0,)).mat
    assert np.abs(rho_final - traj.states[-1]).max() < 1e-12


def test_xi_coefficient_degenerate_reservoir_state():
    assert math.isnan(xi_coefficient(qubit_state((0, 0, 1)), np.eye(2) / 2))


def test_admissibility_predicate():
    # (gamma + c)^2 = 1 and 4 a^2 + 4 b^2 + (gamma - c)^2 = 1
    good = np.array([[0.5, 0.0, 0.5, 0.5], [0.0, 0.0, 1.0, 0.0]])
    bad = np.array([[1.0, 1.0, 1.0, 1.0], [0.0, 0.0, 0.0, 0.0]])
    assert _admissible(good).all()
    assert not _admissible(bad).any()
    # unitarity check: U = cos I + i sin H is unitary iff H^2 = I
    from qwitness.homogenizer import _dense_family_members

    h = _dense_family_members(good)
    for m in h:
        u = math.cos(0.7) * np.eye(4) + 1j * math.sin(0.7) * m
        assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-12
    for m in _dense_family_members(bad):
        u = math.cos(0.7) * np.eye(4) + 1j * math.sin(0.7) * m
        assert np.linalg.norm(u.conj().T @ u - np.eye(4)) > 1e-6


def test_surface_draws_are_always_admissible():
    rng = np.random.default_rng(13)
    draws = _admissible_surface_draws(rng, 500)
    assert _admissible(draws).all()


def test_involution_mask_agrees_with_closed_form():
    from qwitness.homogenizer import _dense_family_members, _involution_mask

    rng = np.random.default_rng(21)
    params = np.vstack(
        [
            rng.uniform(-2, 2, size=(200, 4)),
            _admissible_surface_draws(rng, 200),
            np.array([[0.5, 0.0, 0.5, 0.5], [0.0, 0.0, 1.0, 0.0]]),
        ]
    )
    generic = _involution_mask(_dense_family_members(params))
    closed = _admissible(params, tol=1e-7)
    assert (generic == closed).all()


def test_reservoir_check_budget_zero_is_unproven():
    report = classical_reservoir_check(budget=0)
    assert report.verdict == "UNPROVEN"
    assert report.checks == []


def test_pure_dephasing_family_keeps_probe_in_the_equator():
    # alpha = beta = 0 admissible points only rotate |+> about z, so the
    # distance to |0><0| stays exactly 1/sqrt(2): check one member by hand
    eta = 0.6
    h = np.kron(np.diag([1.0, -1.0]).astype(complex), np.eye(2))  # gamma=1, c=0
    u = math.cos(eta) * np.eye(4) + 1j * math.sin(eta) * h
    rho = qubit_state((1, 0, 0))
    xi = qubit_state((0, 0, 1))
    for _ in range(6):
        joint = u @ np.kron(rho, xi) @ u.conj().T
        rho = partial_trace(DenseOperator((2, 2), joint), keep=(0,)).mat
        assert trace_distance(rho, xi) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_reservoir_check_reports_positive_gap_and_skip_counts():
    report = classical_reservoir_check(budget=300, seed=5, n_steps=4)
    assert report.verdict == "POSITIVE-GAP"
    # random box draws essentially never hit the admissibility surface
    assert report.findings["skipped"]["random"] == 300
    assert report.findings["skipped"]["surface"] == 0
    assert report.findings["min_final_trace_distance"] == pytest.approx(
        1 / math.sqrt(2), abs=1e-9
    )
    assert report.findings["min_image_distance"] >= 2.0 - 1e-9


def test_reservoir_check_deterministic():
    a = classical_reservoir_check(budget=100, seed=9, n_steps=3)
    b = classical_reservoir_check(budget=100, seed=9, n_steps=3)
    assert a.findings["min_final_trace_distance"] == b.findings["min_final_trace_distance"]
    assert a.findings["argmin_trace_distance"] == b.findings["argmin_trace_distance"]
