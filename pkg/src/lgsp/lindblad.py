"""Lindblad generator, density-matrix propagation, and gap diagnostics.

The generator acts on density matrices as

    L[rho] = -i[H, rho] + sum_k ( K_k rho K_k^+ - 1/2 {K_k^+ K_k, rho} ).

Vectorization uses column stacking, vec(A X B) = (B^T kron A) vec(X).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from io import StringIO

import numpy as np
from scipy import linalg as sla

from .basis import SectorBasis, build_operator_matrix
from .errors import CapacityError, DiagnosticError
from .integrals import HamiltonianMatrix
from .jumps import JumpOperator
from .ode import DEFAULT_ATOL, DEFAULT_RTOL, integrate_on_grid

DEFAULT_VEC_CAP = 256  # dimension cap for materializing the d^2 x d^2 generator
ZERO_MODE_TOL = 1e-9


class LindbladModel:
    """Hamiltonian plus jump operators sharing one basis dimension."""

    def __init__(self, hamiltonian, jumps, basis: SectorBasis | None = None):
        if isinstance(hamiltonian, HamiltonianMatrix):
            self.h = hamiltonian.dense().astype(complex)
            basis = basis if basis is not None else hamiltonian.basis
        else:
            self.h = np.asarray(hamiltonian, dtype=complex)
        self.jumps = [j if isinstance(j, JumpOperator) else JumpOperator(np.asarray(j, complex), "adhoc")
                      for j in jumps]
        self.basis = basis
        d = self.h.shape[0]
        if self.h.shape != (d, d):
            raise ValueError("Hamiltonian must be square")
        for j in self.jumps:
            if j.matrix.shape != (d, d):
                raise ValueError("jump operator dimension differs from the Hamiltonian")
        self._kdagk = None
        self._h_eig = None
        self._rdm_ops = None

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    @property
    def kdagk_sum(self) -> np.ndarray:
        """sum_k K_k^+ K_k (cached)."""
        if self._kdagk is None:
            acc = np.zeros((self.dim, self.dim), dtype=complex)
            for j in self.jumps:
                acc += j.matrix.conj().T @ j.matrix
            self._kdagk = acc
        return self._kdagk

    def h_eigensystem(self):
        if self._h_eig is None:
            self._h_eig = np.linalg.eigh(self.h)
        return self._h_eig

    def rdm_operators(self):
        """Sparse matrices of a_j^+ a_i for the 1-RDM observable (cached)."""
        if self.basis is None:
            raise ValueError("model has no basis handle; cannot form the 1-RDM")
        if self._rdm_ops is None:
            n_spin = 2 * self.basis.n_spatial
            self._rdm_ops = {
                (i, j): build_operator_matrix([(j, "+"), (i, "-")], self.basis).matrix
                for i in range(1, n_spin + 1) for j in range(1, n_spin + 1)}
        return self._rdm_ops


@dataclass
class DensityMatrix:
    """Positive unit-trace state with its propagation time stamp."""

    matrix: np.ndarray
    time: float = 0.0

    def validate(self, herm_tol=1e-10, trace_tol=1e-8, psd_tol=1e-8):
        rho = self.matrix
        if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
            raise ValueError("density matrix is not Hermitian within tolerance")
        if abs(np.trace(rho).real - 1.0) > trace_tol or abs(np.trace(rho).imag) > trace_tol:
            raise ValueError("density matrix trace differs from 1 beyond tolerance")
        if np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < -psd_tol:
            raise ValueError("density matrix has an eigenvalue below -tolerance")
        return self


def apply_generator(model: LindbladModel, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != model.h.shape:
        raise ValueError("density matrix dimension differs from the model")
    out = -1j * (model.h @ rho - rho @ model.h)
    kk = model.kdagk_sum
    out -= 0.5 * (kk @ rho + rho @ kk)
    for j in model.jumps:
        out += j.matrix @ rho @ j.matrix.conj().T
    return out


def vectorized_generator(model: LindbladModel, cap: int = DEFAULT_VEC_CAP) -> np.ndarray:
    """Dense superoperator matrix L with vec(L[rho]) = L @ vec(rho) (column stacking)."""
    d = model.dim
    if d > cap:
        raise CapacityError(f"vectorized generator at dimension {d} exceeds cap {cap}")
    eye = np.eye(d)
    lmat = -1j * (np.kron(eye, model.h) - np.kron(model.h.T, eye))
    for j in model.jumps:
        k = j.matrix
        kk = k.conj().T @ k
        lmat += np.kron(k.conj(), k)
        lmat -= 0.5 * (np.kron(eye, kk) + np.kron(kk.T, eye))
    return lmat


def spectral_gap(model: LindbladModel, zero_tol: float = ZERO_MODE_TOL,
                 cap: int = DEFAULT_VEC_CAP) -> float:
    """Gap = -max Re(lambda) over nonzero generator eigenvalues.

    Eigenvalues with |lambda| <= zero_tol count as the stationary
    mode(s); their absence raises DiagnosticError.
    """
    vals = np.linalg.eigvals(vectorized_generator(model, cap=cap))
    zero = np.abs(vals) <= zero_tol
    if not np.any(zero):
        raise DiagnosticError("no stationary eigenvalue found within the zero threshold")
    rest = vals[~zero]
    if len(rest) == 0:
        raise DiagnosticError("generator has no nonzero modes; gap undefined")
    return float(-np.max(rest.real))


@dataclass(frozen=True)
class ParentHamiltonian:
    """H_dp = 1/2 sum K^+K with its gap and the Frobenius norm of [H, H_dp]."""

    matrix: np.ndarray
    gap: float
    commutator_norm: float


def dissipative_parent_hamiltonian(model: LindbladModel, cluster_tol=1e-9) -> ParentHamiltonian:
    if not model.jumps:
        raise ValueError("model has no jump operators")
    hdp = 0.5 * model.kdagk_sum
    hdp = 0.5 * (hdp + hdp.conj().T)
    xi = np.linalg.eigvalsh(hdp)
    above = xi[xi > xi[0] + cluster_tol]
    gap = float(above[0] - xi[0]) if len(above) else 0.0
    comm = model.h @ hdp - hdp @ model.h
    return ParentHamiltonian(hdp, gap, float(np.linalg.norm(comm, "fro")))


@dataclass
class Observables:
    energy: float
    overlap: float | None
    trace: float
    purity: float
    rdm: np.ndarray | None = None


def observables(model: LindbladModel, rho: np.ndarray, ground_state=None,
                with_rdm: bool = False) -> Observables:
    """Scalar observables of a state; 1-RDM entries are P_ij = Tr(rho a_j^+ a_i)."""
    rho = np.asarray(rho, dtype=complex)
    energy = float(np.trace(model.h @ rho).real)
    trace = float(np.trace(rho).real)
    purity = float(np.trace(rho @ rho).real)
    overlap = None
    if ground_state is not None:
        g = np.asarray(ground_state, dtype=complex)
        overlap = float((g.conj() @ rho @ g).real)
    rdm = None
    if with_rdm:
        ops = model.rdm_operators()
        n_spin = 2 * model.basis.n_spatial
        rdm = np.empty((n_spin, n_spin), dtype=complex)
        for (i, j), mat in ops.items():
            rdm[i - 1, j - 1] = (mat.multiply(rho.T)).sum()
        rdm = 0.5 * (rdm + rdm.conj().T)
    return Observables(energy, overlap, trace, purity, rdm)


@dataclass
class ObservableSeries:
    """Sampled scalar observables along a propagation (strictly increasing t)."""

    times: np.ndarray
    energy: np.ndarray
    overlap: np.ndarray  # NaN when no reference state was supplied
    trace: np.ndarray
    purity: np.ndarray
    rdms: list | None = field(default=None, repr=False)

    def to_csv(self, stream=None) -> str:
        out = stream if stream is not None else StringIO()
        out.write("t,energy,overlap,trace,purity\n")
        for row in zip(self.times, self.energy, self.overlap, self.trace, self.purity):
            out.write(",".join(f"{v:.12g}" for v in row) + "\n")
        return out.getvalue() if stream is None else ""


def propagate_density(model: LindbladModel, rho0, t_final: float,
                      sample_times=None, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                      ground_state=None, with_rdm: bool = False):
    """Adaptive Dormand-Prince propagation of the full master equation.

    The state is re-hermitized after every accepted step; positivity is
    monitored by the caller (see DensityMatrix.validate), not projected.
    Returns (ObservableSeries, final state).
    """
    if isinstance(rho0, DensityMatrix):
        rho0 = rho0.matrix
    rho0 = np.asarray(rho0, dtype=complex)
    DensityMatrix(rho0).validate()
    if sample_times is None:
        sample_times = np.linspace(0.0, t_final, 201)
    sample_times = np.asarray(sample_times, dtype=float)

    def rhs(_t, rho):
        return apply_generator(model, rho)

    def rehermitize(rho):
        return 0.5 * (rho + rho.conj().T)

    states = integrate_on_grid(rhs, rho0, sample_times, rtol=rtol, atol=atol,
                               post_step=rehermitize)
    obs = [observables(model, s, ground_state=ground_state, with_rdm=with_rdm)
           for s in states]
    series = ObservableSeries(
        times=sample_times,
        energy=np.array([o.energy for o in obs]),
        overlap=np.array([np.nan if o.overlap is None else o.overlap for o in obs]),
        trace=np.array([o.trace for o in obs]),
        purity=np.array([o.purity for o in obs]),
        rdms=[o.rdm for o in obs] if with_rdm else None)
    return series, states[-1]


def _dissipator_matrix(model: LindbladModel) -> np.ndarray:
    """Vectorized dissipative block (jump terms only)."""
    d = model.dim
    eye = np.eye(d)
    lk = np.zeros((d * d, d * d), dtype=complex)
    for j in model.jumps:
        k = j.matrix
        kk = k.conj().T @ k
        lk += np.kron(k.conj(), k)
        lk -= 0.5 * (np.kron(eye, kk) + np.kron(kk.T, eye))
    return lk


def trotter_step(model: LindbladModel, rho: np.ndarray, tau: float,
                 cap: int = DEFAULT_VEC_CAP) -> np.ndarray:
    """First-order split: exp(L_H tau) then exp(L_K tau); local error O(tau^2)."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if model.dim > cap:
        raise CapacityError(f"trotter step at dimension {model.dim} exceeds cap {cap}")
    rho = np.asarray(rho, dtype=complex)
    if tau == 0.0:
        return rho.copy()
    vals, vecs = model.h_eigensystem()
    u = vecs @ np.diag(np.exp(-1j * vals * tau)) @ vecs.conj().T
    rho = u @ rho @ u.conj().T
    if model.jumps:
        prop = sla.expm(_dissipator_matrix(model) * tau)
        rho = (prop @ rho.reshape(-1, order="F")).reshape(rho.shape, order="F")
    return rho


def dilated_step(model: LindbladModel, rho: np.ndarray, tau: float) -> np.ndarray:
    """One dissipative step through the Hermitian dilation of a single jump.

    rho' = Tr_a[ exp(-i Ktilde sqrt(tau)) (|0><0| kron rho) exp(+i ...) ]
    with Ktilde = [[0, K^+], [K, 0]]; agrees with exp(L_K tau) to O(tau^2).
    Models with several jumps must apply this sequentially per jump.
    """
    if len(model.jumps) != 1:
        raise ValueError("dilated step is defined for exactly one jump operator")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    rho = np.asarray(rho, dtype=complex)
    d = model.dim
    k = model.jumps[0].matrix
    ktil = np.zeros((2 * d, 2 * d), dtype=complex)
    ktil[:d, d:] = k.conj().T
    ktil[d:, :d] = k
    vals, vecs = np.linalg.eigh(ktil)
    u = vecs @ np.diag(np.exp(-1j * vals * np.sqrt(tau))) @ vecs.conj().T
    big = np.zeros((2 * d, 2 * d), dtype=complex)
    big[:d, :d] = rho
    big = u @ big @ u.conj().T
    return big[:d, :d] + big[d:, d:]
