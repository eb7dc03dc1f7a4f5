import numpy as np
import pytest

from lgsp import filters, jumps, lindblad, trajectory
from lgsp.errors import StepSizeError

SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


@pytest.fixture(scope="module")
def damping_model():
    return lindblad.LindbladModel(np.zeros((2, 2)), [SIGMA_MINUS])


@pytest.fixture(scope="module")
def h2_model(h2_fock_space):
    bF, ham, eig = h2_fock_space
    diffs = np.diff(eig.values)
    filt = filters.IdealFilter(float(diffs[diffs > 1e-8].min()))
    cs = jumps.build_coupling_set("s1", 2, 2, bF, r=1)
    return lindblad.LindbladModel(ham, jumps.jump_set_exact(eig, cs, filt))


def test_config_validation():
    with pytest.raises(ValueError):
        trajectory.TrajectoryConfig(dt=-0.1, t_final=1.0)
    with pytest.raises(ValueError):
        trajectory.TrajectoryConfig(dt=0.1, t_final=1.0, variant="heun")
    cfg = trajectory.TrajectoryConfig(dt=0.1, t_final=3.0, sample_stride=5)
    assert cfg.n_steps == 30
    assert np.allclose(cfg.sample_times(), [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0])


def test_ground_state_has_no_jump_weight(h2_model, h2_fock_space):
    eig = h2_fock_space[2]
    probs = trajectory.jump_probabilities(h2_model, eig.ground_state, 0.1)
    assert np.max(probs[:-1]) <= 1e-12
    assert probs.sum() == pytest.approx(1.0)


def test_excited_qubit_jump_probability(damping_model):
    psi = np.array([0.0, 1.0], dtype=complex)
    probs = trajectory.jump_probabilities(damping_model, psi, 0.1)
    assert probs[0] == pytest.approx(0.1)
    assert probs.sum() == pytest.approx(1.0)


def test_probability_guard(damping_model):
    psi = np.array([0.0, 1.0], dtype=complex)
    with pytest.raises(StepSizeError):
        trajectory.jump_probabilities(damping_model, psi, 2.0, p_max=0.1)


def test_jumpless_evolution_matches_phase_dynamics():
    h = np.diag([0.0, 0.7]).astype(complex)
    model = lindblad.LindbladModel(h, [])
    psi0 = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
    cfg = trajectory.TrajectoryConfig(dt=0.001, t_final=1.0, exact_drift=True)
    res = trajectory.run_trajectory(model, psi0, cfg)
    exact = np.abs(psi0.conj() @ (np.diag(np.exp(-1j * np.diag(h) * 1.0)) @ psi0)) ** 2
    # energy is conserved and the state follows the exact phases
    assert np.max(np.abs(res.energy - res.energy[0])) <= 1e-10
    overlap = np.abs(res.states[-1].conj() @ (np.diag(np.exp(-1j * np.diag(h).real * 1.0)) @ psi0))
    assert overlap == pytest.approx(1.0, abs=1e-8)
    del exact


def test_determinism_bit_identical(h2_model):
    psi0 = np.zeros(16, dtype=complex)
    psi0[0] = 1.0
    cfg = trajectory.TrajectoryConfig(dt=0.1, t_final=5.0, n_traj=5,
                                      master_seed=11, p_max=0.5)
    a = trajectory.run_ensemble(h2_model, psi0, cfg)
    b = trajectory.run_ensemble(h2_model, psi0, cfg)
    assert np.array_equal(a.mean_energy, b.mean_energy)
    assert np.array_equal(a.mean_overlap, b.mean_overlap)
    assert np.array_equal(a.rho_mean, b.rho_mean)


def test_single_trajectory_ensemble_is_that_trajectory(h2_model):
    psi0 = np.zeros(16, dtype=complex)
    psi0[0] = 1.0
    cfg = trajectory.TrajectoryConfig(dt=0.1, t_final=3.0, n_traj=1,
                                      master_seed=4, p_max=0.5)
    single = trajectory.run_trajectory(h2_model, psi0, cfg, 0)
    ens = trajectory.run_ensemble(h2_model, psi0, cfg)
    assert np.array_equal(single.energy, ens.mean_energy)


def test_per_step_norm_stays_unit(h2_model):
    psi0 = np.zeros(16, dtype=complex)
    psi0[0] = 1.0
    cfg = trajectory.TrajectoryConfig(dt=0.1, t_final=3.0, p_max=0.5)
    res = trajectory.run_trajectory(h2_model, psi0, cfg, 3)
    norms = np.linalg.norm(res.states, axis=1)
    assert np.allclose(norms, 1.0, atol=1e-12)


def test_damping_ensemble_matches_analytic_channel(damping_model):
    psi0 = np.array([0.0, 1.0], dtype=complex)
    n_traj = 1500
    cfg = trajectory.TrajectoryConfig(dt=0.005, t_final=2.0, n_traj=n_traj,
                                      master_seed=9, sample_stride=40)
    ens = trajectory.run_ensemble(damping_model, psi0, cfg)
    pops = ens.rho_mean[:, 1, 1].real
    exact = np.exp(-ens.times)
    # binomial standard error of the excited population
    se = np.sqrt(np.maximum(exact * (1 - exact), 1e-12) / n_traj)
    assert np.all(np.abs(pops - exact) <= 3 * se + 3 * cfg.dt)


def test_variants_agree_in_ensemble_mean(damping_model):
    psi0 = np.array([0.0, 1.0], dtype=complex)
    common = dict(dt=0.005, t_final=2.0, n_traj=1500, sample_stride=40)
    a = trajectory.run_ensemble(damping_model, psi0,
                                trajectory.TrajectoryConfig(master_seed=1, **common))
    b = trajectory.run_ensemble(
        damping_model, psi0,
        trajectory.TrajectoryConfig(master_seed=2, variant="norm-decay", **common))
    pa = a.rho_mean[:, 1, 1].real
    pb = b.rho_mean[:, 1, 1].real
    stat = 3 * np.sqrt(np.maximum(pa * (1 - pa), 1e-12) / common["n_traj"])
    assert np.all(np.abs(pa - pb) <= 2 * stat + 5 * common["dt"])


def test_ground_start_energy_constant(h2_model, h2_fock_space):
    eig = h2_fock_space[2]
    cfg = trajectory.TrajectoryConfig(dt=0.1, t_final=10.0, n_traj=3,
                                      master_seed=5, p_max=0.5)
    ens = trajectory.run_ensemble(h2_model, eig.ground_state.astype(complex), cfg)
    assert np.max(np.abs(ens.mean_energy - eig.values[0])) <= 1e-6


def test_event_log_records_jumps(damping_model):
    psi0 = np.array([0.0, 1.0], dtype=complex)
    cfg = trajectory.TrajectoryConfig(dt=0.01, t_final=5.0, master_seed=3,
                                      log_events=True)
    res = trajectory.run_trajectory(damping_model, psi0, cfg, 0)
    assert len(res.events) >= 1
    t0, channel = res.events[0]
    assert channel == 0
    assert 0 < t0 <= 5.0
    # after the jump the qubit is in the ground state for good
    assert res.energy[-1] == pytest.approx(0.0, abs=1e-12)


def test_failed_trajectory_reports_seed(damping_model):
    psi0 = np.array([0.0, 1.0], dtype=complex)
    cfg = trajectory.TrajectoryConfig(dt=0.5, t_final=2.0, n_traj=2,
                                      master_seed=77, p_max=0.1)
    with pytest.raises(StepSizeError) as err:
        trajectory.run_ensemble(damping_model, psi0, cfg)
    assert "master seed 77" in str(err.value)


def test_accumulator_merge_is_order_independent(damping_model):
    psi0 = np.array([0.0, 1.0], dtype=complex)
    cfg = trajectory.TrajectoryConfig(dt=0.01, t_final=1.0, n_traj=4, master_seed=21)
    results = [trajectory.run_trajectory(damping_model, psi0, cfg, k) for k in range(4)]
    left = trajectory.EnsembleAccumulator.empty(cfg.sample_times(), 2)
    right = trajectory.EnsembleAccumulator.empty(cfg.sample_times(), 2)
    for r in results[:2]:
        left.add(r)
    for r in results[2:]:
        right.add(r)
    merged = left.merge(right)
    direct = trajectory.EnsembleAccumulator.empty(cfg.sample_times(), 2)
    for r in results:
        direct.add(r)
    assert merged.count == direct.count == 4
    assert np.allclose(merged.energy_sum, direct.energy_sum, atol=1e-14)
    assert np.allclose(merged.rho_sum, direct.rho_sum, atol=1e-14)


def test_ensemble_csv_schema(damping_model):
    psi0 = np.array([0.0, 1.0], dtype=complex)
    cfg = trajectory.TrajectoryConfig(dt=0.1, t_final=0.5, n_traj=2, master_seed=0)
    ens = trajectory.run_ensemble(damping_model, psi0, cfg,
                                  ground_state=np.array([1.0, 0.0]))
    lines = ens.to_csv().splitlines()
    assert lines[0] == "t,mean_energy,se_energy,mean_overlap,se_overlap"
    assert len(lines) == len(cfg.sample_times()) + 1
