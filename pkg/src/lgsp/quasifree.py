"""Hartree-Fock-level dynamics: closed 1-RDM equations and many-body models.

With a quadratic Hamiltonian sum F_pq a_p^+ a_q and jump operators linear
in the ladder operators, the one-particle reduced density matrix
P_ij = Tr(rho a_j^+ a_i) obeys the closed equation

    dP/dt = -i[F, P] + B - 1/2 ( P (B+C) + (B+C) P ),

with B, C the positive semidefinite filtered coefficient matrices.  For
the full single-ladder coupling set and an indicator filter, B + C = 1
and the flow contracts toward the aufbau projector at the universal
rate exp(-t).

Single-particle filter arguments are measured relative to the mid-gap
chemical potential mu = (eps_HOMO + eps_LUMO)/2, so occupied orbital
energies are negative and virtual ones positive regardless of the raw
Fock matrix gauge; the many-body Hartree-Fock models built here use the
same shifted energies so that the aufbau determinant is their ground
state in any sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from io import StringIO

import numpy as np

from .basis import SectorBasis, build_operator_matrix
from .errors import ApplicabilityError, SectorError
from .filters import FilterParams, IdealFilter
from .jumps import JumpOperator
from .lindblad import LindbladModel
from .ode import DEFAULT_ATOL, DEFAULT_RTOL, integrate_on_grid

HF_MODEL_KINDS = ("type1", "type2")


def _fix_eigenvector_phases(vecs):
    """Make the largest-magnitude entry of each eigenvector real positive."""
    out = vecs.copy()
    for k in range(out.shape[1]):
        idx = int(np.argmax(np.abs(out[:, k])))
        pivot = out[idx, k]
        if pivot != 0:
            out[:, k] *= np.conj(pivot) / abs(pivot)
    return out


@dataclass
class FockModel:
    """Hermitian Fock matrix with its eigensystem and electron count.

    eps holds the ascending orbital energies, phi the matching
    (phase-fixed) eigenvector columns.  mid_gap is the chemical potential
    (eps_HOMO + eps_LUMO)/2 used to center filter arguments;
    filter_scale is the largest safe indicator gap, the smaller of the
    distance from mu to the spectrum and the smallest distinct level
    spacing.
    """

    f: np.ndarray
    n_electrons: int
    phi: np.ndarray = field(init=False)
    eps: np.ndarray = field(init=False)

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=complex)
        n = self.f.shape[0]
        if self.f.shape != (n, n) or n % 2:
            raise ValueError("Fock matrix must be square with even (spin-orbital) dimension")
        if np.max(np.abs(self.f - self.f.conj().T)) > 1e-10:
            raise ValueError("Fock matrix is not Hermitian within 1e-10")
        if not 0 < self.n_electrons < n:
            raise ValueError("electron count must lie strictly inside 0..2L for a Fermi level")
        eps, phi = np.linalg.eigh(self.f)
        self.eps = eps.real
        self.phi = _fix_eigenvector_phases(phi)

    @property
    def n_spin(self) -> int:
        return self.f.shape[0]

    @property
    def mid_gap(self) -> float:
        ne = self.n_electrons
        return float(0.5 * (self.eps[ne - 1] + self.eps[ne]))

    @property
    def homo_lumo_gap(self) -> float:
        return float(self.eps[self.n_electrons] - self.eps[self.n_electrons - 1])

    @property
    def filter_scale(self) -> float:
        shifted = np.abs(self.eps - self.mid_gap)
        spacings = np.diff(self.eps)
        distinct = spacings[spacings > 1e-10]
        scale = float(np.min(shifted[shifted > 1e-12], initial=np.inf))
        if len(distinct):
            scale = min(scale, float(np.min(distinct)))
        if not np.isfinite(scale) or scale <= 0:
            raise ApplicabilityError("Fock spectrum has no resolvable gap at the Fermi level")
        return scale

    def aufbau_projector(self) -> np.ndarray:
        occ = self.phi[:, :self.n_electrons]
        return occ @ occ.conj().T


@dataclass(frozen=True)
class QuasiFreeCoefficients:
    """PSD coefficient matrices of the quasi-free 1-RDM equation of motion."""

    b: np.ndarray
    c: np.ndarray

    def full_set(self, tol=1e-8) -> bool:
        return bool(np.max(np.abs(self.b + self.c - np.eye(self.b.shape[0]))) <= tol)


def _filter_on_levels(model: FockModel, filt):
    if filt == "ideal" or isinstance(filt, IdealFilter):
        gap = filt.gap if isinstance(filt, IdealFilter) else model.filter_scale
        f = IdealFilter(gap)
    elif isinstance(filt, FilterParams):
        f = filt
    else:
        raise ValueError(f"unsupported filter mode {filt!r}")
    shifted = model.eps - model.mid_gap
    return f.freq(-shifted), f.freq(shifted)  # values at +/- (orbital energies)


def bc_matrices(model: FockModel, filt="ideal") -> QuasiFreeCoefficients:
    """B = f(F)f(F)^+, C = f(-F)f(-F)^+ evaluated spectrally through phi."""
    f_minus, f_plus = _filter_on_levels(model, filt)
    # f(F) acts at the (shifted) orbital energies; B needs f at +eps, C at -eps
    b = model.phi @ np.diag(f_plus ** 2) @ model.phi.conj().T
    c = model.phi @ np.diag(f_minus ** 2) @ model.phi.conj().T
    return QuasiFreeCoefficients(b, c)


@dataclass
class RdmTrajectory:
    times: np.ndarray
    matrices: list
    gauge: str = "raw"

    def mo_gauge(self, model: FockModel) -> "RdmTrajectory":
        if self.gauge == "molecular-orbital":
            return self
        mats = [model.phi.conj().T @ p @ model.phi for p in self.matrices]
        return RdmTrajectory(self.times, mats, "molecular-orbital")

    def to_csv(self, stream=None) -> str:
        """Row-major snapshots, one line per sample, with a gauge-tagged header."""
        out = stream if stream is not None else StringIO()
        n = self.matrices[0].shape[0]
        cols = ",".join(f"p{i + 1}{j + 1}" for i in range(n) for j in range(n))
        out.write(f"# gauge={self.gauge}\nt,{cols}\n")
        for t, p in zip(self.times, self.matrices):
            flat = ",".join(f"{v.real:.12g}{v.imag:+.12g}j" for v in p.reshape(-1))
            out.write(f"{t:.12g},{flat}\n")
        return out.getvalue() if stream is None else ""


def propagate_rdm(model: FockModel, coeffs: QuasiFreeCoefficients, p0, t_final,
                  sample_times=None, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL) -> RdmTrajectory:
    """Integrate the closed 1-RDM equation of motion with Dormand-Prince."""
    p0 = np.asarray(p0, dtype=complex)
    if sample_times is None:
        sample_times = np.linspace(0.0, t_final, 201)
    bc = coeffs.b + coeffs.c

    def rhs(_t, p):
        return (-1j * (model.f @ p - p @ model.f) + coeffs.b
                - 0.5 * (p @ bc + bc @ p))

    def rehermitize(p):
        return 0.5 * (p + p.conj().T)

    mats = integrate_on_grid(rhs, p0, np.asarray(sample_times, float),
                             rtol=rtol, atol=atol, post_step=rehermitize)
    return RdmTrajectory(np.asarray(sample_times, float), mats, "raw")


def type1_closed_form(model: FockModel, p0, t, coeffs: QuasiFreeCoefficients | None = None):
    """P(t) = exp(-iFt)(P0 - Pstar)exp(iFt) e^{-t} + Pstar with Pstar = f(F).

    Valid only in the full-coupling case B + C = 1 (checked to 1e-8).
    """
    coeffs = coeffs if coeffs is not None else bc_matrices(model, "ideal")
    if not coeffs.full_set(1e-8):
        raise ApplicabilityError("closed form requires B + C = identity within 1e-8")
    p0 = np.asarray(p0, dtype=complex)
    p_star = coeffs.b  # with B+C=1 the stationary point is B = f(F)^2 = f(F)
    phase = np.exp(-1j * model.eps * t)
    u = model.phi @ np.diag(phase) @ model.phi.conj().T
    return u @ (p0 - p_star) @ u.conj().T * np.exp(-t) + p_star


def hf_hamiltonian_matrix(model: FockModel, basis: SectorBasis):
    """Many-body sum_p (eps_p - mu) n_p on a molecular-orbital determinant basis."""
    if basis.n_spatial * 2 != model.n_spin:
        raise ValueError("basis spin-orbital count differs from the Fock matrix")
    shifted = model.eps - model.mid_gap
    diag = np.array([sum(shifted[p] for p in range(model.n_spin) if bits >> p & 1)
                     for bits in basis.dets])
    return np.diag(diag).astype(complex)


def build_hf_manybody_model(model: FockModel, kind: str, basis: SectorBasis) -> LindbladModel:
    """Lindblad model of the Hartree-Fock problem with indicator-filtered jumps.

    The basis is interpreted as molecular-orbital determinants, so the
    ladder operators of `basis` are the c_p of the model.  Jumps follow
    the quadratic-Hamiltonian closed forms:

      type1: creations on occupied levels, annihilations on virtual ones,
             mixed back to the raw orbital gauge by phi;
      type2: K_ij = sum_{p<q} c_p^+ c_q  phi*_ip phi_jq, index-ordered over
             the ascending-energy levels (degenerate pairs included, so
             the parent-Hamiltonian identities hold verbatim).

    Identically-zero jumps are dropped; the retained labels say which.
    """
    if kind not in HF_MODEL_KINDS:
        raise ValueError(f"kind must be one of {HF_MODEL_KINDS}")
    if kind == "type1" and not basis.is_fock:
        raise SectorError("type1 HF models break particle number; use a Fock basis")
    n_spin = model.n_spin
    ne = model.n_electrons
    h = hf_hamiltonian_matrix(model, basis)

    jumps = []
    if kind == "type1":
        # mo_create[m] is c_{m}^+ on the MO determinant basis (0-based m)
        mo_create = [build_operator_matrix([(m + 1, "+")], basis).matrix.toarray().astype(complex)
                     for m in range(n_spin)]
        for i in range(n_spin):
            # K_{i,+} = sum_{m occupied} c_m^+ phi*_{im}; K_{i,-} its virtual dual
            acc_c = sum(model.phi[i, m].conj() * mo_create[m] for m in range(ne))
            acc_a = sum(model.phi[i, m] * mo_create[m].conj().T for m in range(ne, n_spin))
            jumps.append(JumpOperator(acc_c, "closed-form", f"K+[a{i + 1}]"))
            jumps.append(JumpOperator(acc_a, "closed-form", f"K-[a{i + 1}]"))
        jumps = [j for j in jumps if np.max(np.abs(j.matrix)) > 1e-14]
    else:
        hop = {}
        for p in range(1, n_spin + 1):
            for q in range(p + 1, n_spin + 1):
                hop[p, q] = build_operator_matrix([(p, "+"), (q, "-")],
                                                  basis).matrix.toarray().astype(complex)
        for i in range(n_spin):
            for j in range(n_spin):
                acc = np.zeros((basis.dim, basis.dim), dtype=complex)
                for (p, q), mat in hop.items():
                    coef = np.conj(model.phi[i, p - 1]) * model.phi[j, q - 1]
                    if coef != 0.0:
                        acc += coef * mat
                if np.max(np.abs(acc)) > 1e-14:
                    jumps.append(JumpOperator(acc, "closed-form", f"K[{i + 1},{j + 1}]"))
    return LindbladModel(h, jumps, basis)


def mean_occupation_rates(diag, k):
    """<M_k> = sum_{p<k}(1 - n_p) + sum_{q>k} n_q from diagonal occupations."""
    return float(np.sum(1.0 - diag[:k - 1]) + np.sum(diag[k:]))


def meanfield_propagate(model: FockModel, p0, t_final, sample_times=None,
                        rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL) -> RdmTrajectory:
    """Mean-field truncated dynamics of the molecular-orbital 1-RDM.

    Diagonal occupations obey the closed transport system

        d n_r/dt = -<M_r> n_r + sum_{q>r} n_q,

    and each off-diagonal entry decays independently, driven by the
    diagonal trajectory:

        d P_sr/dt = [ -1/2 (1 + <M_r + M_s>) + i(eps_r - eps_s) ] P_sr.

    The input is the initial MO-gauge matrix; entries evolve as two
    decoupled subsystems (the diagonal never sees the off-diagonals).
    """
    p0 = np.asarray(p0, dtype=complex)
    n = model.n_spin
    if np.any(p0.diagonal().real < -1e-12) or np.any(p0.diagonal().real > 1 + 1e-12):
        raise ValueError("initial diagonal occupations must lie in [0, 1]")
    if sample_times is None:
        sample_times = np.linspace(0.0, t_final, 201)
    eps = model.eps

    def rhs(_t, p):
        diag = p.diagonal().real
        m = np.array([mean_occupation_rates(diag, k) for k in range(1, n + 1)])
        out = np.zeros_like(p)
        inflow = np.concatenate([np.cumsum(diag[::-1])[::-1][1:], [0.0]])
        np.fill_diagonal(out, -m * diag + inflow)
        for s in range(n):
            for r in range(n):
                if s != r:
                    rate = -0.5 * (1.0 + m[r] + m[s]) + 1j * (eps[r] - eps[s])
                    out[s, r] += rate * p[s, r]
        return out

    mats = integrate_on_grid(rhs, p0, np.asarray(sample_times, float), rtol=rtol, atol=atol)
    return RdmTrajectory(np.asarray(sample_times, float), mats, "molecular-orbital")
