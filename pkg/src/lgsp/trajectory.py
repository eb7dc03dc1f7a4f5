"""Quantum-jump Monte-Carlo unraveling of the Lindblad dynamics.

Two stochastic schemes reproduce the master equation in ensemble mean:

  per-step    at every step draw among the N jump channels with
              p_k = |K_k psi|^2 dt (no-jump otherwise); the no-jump
              branch applies the Euler drift of the effective
              non-Hermitian Hamiltonian and renormalizes;

  norm-decay  evolve the unnormalized state under the same drift, draw a
              single uniform R, and fire a jump (channel proportional to
              |K_k psi|^2) once the squared norm falls below R, then
              renormalize and redraw.

Randomness comes from the counter-based Philox generator keyed by
(master_seed, trajectory_index), so every trajectory owns an independent,
reproducible stream regardless of execution order, and ensembles reduce
their accumulators in trajectory order to stay bit-identical across
worker counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from io import StringIO

import numpy as np
from scipy import linalg as sla

from .errors import StepSizeError
from .lindblad import LindbladModel

VARIANTS = ("per-step", "norm-decay")
DEFAULT_P_MAX = 0.1


@dataclass(frozen=True)
class TrajectoryConfig:
    dt: float
    t_final: float
    n_traj: int = 1
    master_seed: int = 0
    variant: str = "per-step"
    sample_stride: int = 1  # record observables every this many steps
    p_max: float = DEFAULT_P_MAX
    exact_drift: bool = False  # exponential of the effective Hamiltonian per step
    log_events: bool = False

    def __post_init__(self):
        if self.dt <= 0 or self.t_final <= 0:
            raise ValueError("dt and t_final must be positive")
        if self.n_traj < 1:
            raise ValueError("need at least one trajectory")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))

    def sample_times(self) -> np.ndarray:
        idx = np.arange(0, self.n_steps + 1, self.sample_stride)
        return idx * self.dt

    def rng(self, traj_index: int) -> np.random.Generator:
        """Philox substream keyed by (master seed, trajectory index)."""
        return np.random.Generator(np.random.Philox(
            key=np.array([self.master_seed, traj_index], dtype=np.uint64)))


def jump_probabilities(model: LindbladModel, psi: np.ndarray, dt: float,
                       p_max: float = DEFAULT_P_MAX) -> np.ndarray:
    """Per-channel probabilities |K_k psi|^2 dt plus the no-jump remainder.

    Raises StepSizeError when the total jump probability exceeds p_max
    (quadrature error can overestimate it; reduce dt).
    """
    probs = np.empty(len(model.jumps) + 1)
    for k, j in enumerate(model.jumps):
        probs[k] = np.linalg.norm(j.matrix @ psi) ** 2 * dt
    total = probs[:-1].sum()
    if total > p_max:
        raise StepSizeError(
            f"total jump probability {total:.3g} exceeds guard {p_max}; reduce dt")
    probs[-1] = 1.0 - total
    return probs


@dataclass
class TrajectoryResult:
    times: np.ndarray
    energy: np.ndarray
    overlap: np.ndarray
    states: np.ndarray  # sampled normalized state vectors, shape (n_samples, d)
    events: list = field(default_factory=list)  # (t, channel) jump log


def _drift_operator(model: LindbladModel, dt: float, exact: bool):
    heff = -1j * model.h - 0.5 * model.kdagk_sum
    if exact:
        return sla.expm(heff * dt)
    return np.eye(model.dim) + dt * heff


def run_trajectory(model: LindbladModel, psi0: np.ndarray, cfg: TrajectoryConfig,
                   traj_index: int = 0, ground_state=None) -> TrajectoryResult:
    """Evolve one stochastic trajectory and sample its observables."""
    psi = np.asarray(psi0, dtype=complex).copy()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("initial state must be normalized")
    rng = cfg.rng(traj_index)
    drift = _drift_operator(model, cfg.dt, cfg.exact_drift)
    kmats = [j.matrix for j in model.jumps]
    n_jumps = len(kmats)
    g = None if ground_state is None else np.asarray(ground_state, dtype=complex)

    times = cfg.sample_times()
    energy = np.empty(len(times))
    overlap = np.full(len(times), np.nan)
    states = np.empty((len(times), model.dim), dtype=complex)
    events = []

    def record(slot, psi_now):
        nrm2 = np.linalg.norm(psi_now) ** 2
        psi_n = psi_now / np.sqrt(nrm2)
        energy[slot] = (psi_n.conj() @ model.h @ psi_n).real
        if g is not None:
            overlap[slot] = abs(g.conj() @ psi_n) ** 2
        states[slot] = psi_n

    record(0, psi)
    slot = 1
    if cfg.variant == "per-step":
        for n in range(cfg.n_steps):
            probs = jump_probabilities(model, psi, cfg.dt, cfg.p_max)
            k = rng.choice(n_jumps + 1, p=probs)
            if k < n_jumps:
                jpsi = kmats[k] @ psi
                psi = jpsi / np.linalg.norm(jpsi)
                if cfg.log_events:
                    events.append(((n + 1) * cfg.dt, k))
            else:
                psi = drift @ psi
                psi /= np.linalg.norm(psi)
            if (n + 1) % cfg.sample_stride == 0:
                record(slot, psi)
                slot += 1
    else:
        threshold = rng.random()
        for n in range(cfg.n_steps):
            psi = drift @ psi
            if np.linalg.norm(psi) ** 2 < threshold:
                weights = np.array([np.linalg.norm(k @ psi) ** 2 for k in kmats])
                total = weights.sum()
                if total <= 0:
                    raise StepSizeError("norm fell below threshold but no channel has weight")
                k = rng.choice(n_jumps, p=weights / total)
                jpsi = kmats[k] @ psi
                psi = jpsi / np.linalg.norm(jpsi)
                threshold = rng.random()
                if cfg.log_events:
                    events.append(((n + 1) * cfg.dt, k))
            if (n + 1) % cfg.sample_stride == 0:
                record(slot, psi)
                slot += 1
    return TrajectoryResult(times, energy, overlap, states, events)


@dataclass
class EnsembleAccumulator:
    """Order-independent sums over trajectories at shared sampling times."""

    times: np.ndarray
    count: int = 0
    energy_sum: np.ndarray = None
    energy_sq: np.ndarray = None
    overlap_sum: np.ndarray = None
    overlap_sq: np.ndarray = None
    rho_sum: np.ndarray = None

    @classmethod
    def empty(cls, times, dim):
        n = len(times)
        return cls(times=np.asarray(times), count=0,
                   energy_sum=np.zeros(n), energy_sq=np.zeros(n),
                   overlap_sum=np.zeros(n), overlap_sq=np.zeros(n),
                   rho_sum=np.zeros((n, dim, dim), dtype=complex))

    def add(self, result: TrajectoryResult):
        self.count += 1
        self.energy_sum += result.energy
        self.energy_sq += result.energy ** 2
        if not np.any(np.isnan(result.overlap)):
            self.overlap_sum += result.overlap
            self.overlap_sq += result.overlap ** 2
        self.rho_sum += np.einsum("ti,tj->tij", result.states, result.states.conj())

    def merge(self, other: "EnsembleAccumulator") -> "EnsembleAccumulator":
        if not np.array_equal(self.times, other.times):
            raise ValueError("accumulators sample different time grids")
        out = EnsembleAccumulator(
            self.times, self.count + other.count,
            self.energy_sum + other.energy_sum, self.energy_sq + other.energy_sq,
            self.overlap_sum + other.overlap_sum, self.overlap_sq + other.overlap_sq,
            self.rho_sum + other.rho_sum)
        return out


@dataclass
class EnsembleResult:
    times: np.ndarray
    mean_energy: np.ndarray
    se_energy: np.ndarray
    mean_overlap: np.ndarray
    se_overlap: np.ndarray
    rho_mean: np.ndarray  # (n_samples, d, d)
    n_traj: int

    def to_csv(self, stream=None) -> str:
        out = stream if stream is not None else StringIO()
        out.write("t,mean_energy,se_energy,mean_overlap,se_overlap\n")
        for row in zip(self.times, self.mean_energy, self.se_energy,
                       self.mean_overlap, self.se_overlap):
            out.write(",".join(f"{v:.12g}" for v in row) + "\n")
        return out.getvalue() if stream is None else ""


def run_ensemble(model: LindbladModel, psi0: np.ndarray, cfg: TrajectoryConfig,
                 ground_state=None) -> EnsembleResult:
    """Average cfg.n_traj trajectories; any failing trajectory aborts the run
    with its seed in the error message."""
    acc = EnsembleAccumulator.empty(cfg.sample_times(), model.dim)
    for idx in range(cfg.n_traj):
        try:
            acc.add(run_trajectory(model, psi0, cfg, idx, ground_state=ground_state))
        except Exception as exc:
            raise type(exc)(
                f"trajectory {idx} (master seed {cfg.master_seed}) failed: {exc}") from exc
    n = acc.count
    mean_e = acc.energy_sum / n
    mean_o = acc.overlap_sum / n
    var_e = np.maximum(acc.energy_sq / n - mean_e ** 2, 0.0)
    var_o = np.maximum(acc.overlap_sq / n - mean_o ** 2, 0.0)
    se = 1.0 / np.sqrt(n) if n > 1 else np.nan
    return EnsembleResult(acc.times, mean_e, np.sqrt(var_e) * se,
                          mean_o, np.sqrt(var_o) * se,
                          acc.rho_sum / n, n)
