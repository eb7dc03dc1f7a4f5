"""Coupling-operator sets and filtered jump operators.

Coupling sets are collections of primitive ladder operators in a rotated
single-particle basis (identity rotation = the raw orbital basis of the
SectorBasis):

  type1  all 4L single creation/annihilation operators (breaks particle
         number; Fock-space only),
  type2  all 4L^2 creation-annihilation pairs (number conserving),
  s1     the 8r type1 operators on the 2r spatial orbitals straddling the
         Fermi level,
  s2     the 16r^2 type2 pairs on that window,
  t2     the s2 subset hopping between adjacent spatial levels
         (|i - j| = 1), all four spin combinations per orbital pair.

The Fermi window is expressed through the highest occupied spatial
orbital n_F = ceil(N_e / 2): spatial orbitals n_F - r + 1 .. n_F + r.

A jump operator reweights a coupling operator A by a spectral filter,
either exactly in the eigenbasis of H or through the truncated
time-domain quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .basis import SectorBasis, build_operator_matrix, OperatorMatrix
from .errors import CapacityError, SectorError
from .filters import FilterParams, QuadratureGrid, filter_time
from .integrals import DEFAULT_DENSE_CAP, EigenSystem, HamiltonianMatrix

COUPLING_KINDS = ("type1", "type2", "s1", "s2", "t2")
_SPIN_TAGS = ("α", "β")


@dataclass(frozen=True)
class CouplingSet:
    """Primitive coupling operators over one basis, with their labels."""

    kind: str
    labels: tuple[str, ...]
    matrices: tuple[OperatorMatrix, ...]
    rotation: np.ndarray  # 2L x 2L unitary applied to the single-particle basis
    number_conserving: bool

    def __len__(self):
        return len(self.matrices)


def fermi_window(L: int, n_electrons: int, r: int) -> range:
    """Spatial orbitals n_F - r + 1 .. n_F + r around the Fermi level (1-based)."""
    if r < 1:
        raise ValueError("window half-width r must be >= 1")
    n_f = (n_electrons + 1) // 2
    lo, hi = n_f - r + 1, n_f + r
    if lo < 1 or hi > L:
        raise ValueError(
            f"active window [{lo}, {hi}] not contained in spatial orbitals 1..{L}")
    return range(lo, hi + 1)


def _check_unitary(phi, n_spin):
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (n_spin, n_spin):
        raise ValueError(f"rotation must be {n_spin}x{n_spin}")
    if np.max(np.abs(phi.conj().T @ phi - np.eye(n_spin))) > 1e-10:
        raise ValueError("rotation is not unitary within 1e-10")
    return phi


def _rotated_ladders(basis, phi, spin_orbitals):
    """Sparse matrices of c_p^+ and c_p, p in spin_orbitals, c^+ = a^+ Phi.

    Only valid on a Fock basis (single ladder operators change N)."""
    n_spin = 2 * basis.n_spatial
    raw_create = [build_operator_matrix([(r, "+")], basis).matrix for r in range(1, n_spin + 1)]
    creators, annihilators = {}, {}
    identity_rot = np.allclose(phi, np.eye(n_spin))
    for p in spin_orbitals:
        if identity_rot:
            cmat = raw_create[p - 1].astype(complex)
        else:
            cmat = sparse.csr_matrix((basis.dim, basis.dim), dtype=complex)
            for r in range(n_spin):
                if phi[r, p - 1] != 0.0:
                    cmat = cmat + phi[r, p - 1] * raw_create[r]
        creators[p] = cmat.tocsr()
        annihilators[p] = cmat.conj().T.tocsr()
    return creators, annihilators


def _rotated_pairs(basis, phi, pairs):
    """Sparse matrices of c_p^+ c_q on any basis, via raw a_r^+ a_s strings."""
    n_spin = 2 * basis.n_spatial
    identity_rot = np.allclose(phi, np.eye(n_spin))
    raw = {}

    def raw_pair(r, s):
        if (r, s) not in raw:
            raw[r, s] = build_operator_matrix([(r, "+"), (s, "-")], basis).matrix
        return raw[r, s]

    out = {}
    for p, q in pairs:
        if identity_rot:
            out[p, q] = raw_pair(p, q).astype(complex).tocsr()
            continue
        acc = sparse.csr_matrix((basis.dim, basis.dim), dtype=complex)
        for r in range(1, n_spin + 1):
            if phi[r - 1, p - 1] == 0.0:
                continue
            for s in range(1, n_spin + 1):
                coef = phi[r - 1, p - 1] * np.conj(phi[s - 1, q - 1])
                if coef != 0.0:
                    acc = acc + coef * raw_pair(r, s)
        out[p, q] = acc.tocsr()
    return out


def _spin_orbital_label(p):
    spatial, spin = (p + 1) // 2, (p - 1) % 2
    return f"{spatial}{_SPIN_TAGS[spin]}"


def build_coupling_set(kind: str, L: int, n_electrons: int, basis: SectorBasis,
                       r: int | None = None, rotation=None) -> CouplingSet:
    """Assemble the requested coupling set as matrices on `basis`.

    `rotation` is the 2L x 2L single-particle unitary (columns = rotated
    orbitals, e.g. molecular-orbital coefficients); identity by default.
    """
    if kind not in COUPLING_KINDS:
        raise ValueError(f"unknown coupling kind {kind!r}; choose from {COUPLING_KINDS}")
    if basis.n_spatial != L:
        raise ValueError("basis and coupling set disagree on the orbital count")
    n_spin = 2 * L
    phi = _check_unitary(rotation if rotation is not None else np.eye(n_spin), n_spin)
    number_conserving = kind in ("type2", "s2", "t2")
    if not number_conserving and not basis.is_fock:
        raise SectorError(f"{kind} couplings break particle number; use a Fock basis")

    if kind in ("type1", "type2"):
        spatials = range(1, L + 1)
    else:
        spatials = fermi_window(L, n_electrons, r)
    spin_orbs = [2 * i - 1 + s for i in spatials for s in (0, 1)]

    labels, mats = [], []
    if kind in ("type1", "s1"):
        creators, annihilators = _rotated_ladders(basis, phi, spin_orbs)
        for p in spin_orbs:
            labels.append(f"a†[{_spin_orbital_label(p)}]")
            mats.append(OperatorMatrix(basis, creators[p]))
        for p in spin_orbs:
            labels.append(f"a[{_spin_orbital_label(p)}]")
            mats.append(OperatorMatrix(basis, annihilators[p]))
    else:
        pairs = [(p, q) for p in spin_orbs for q in spin_orbs
                 if kind != "t2" or abs((p + 1) // 2 - (q + 1) // 2) == 1]
        pair_mats = _rotated_pairs(basis, phi, pairs)
        for p, q in pairs:
            labels.append(f"a†[{_spin_orbital_label(p)}]a[{_spin_orbital_label(q)}]")
            mats.append(OperatorMatrix(basis, pair_mats[p, q]))
    return CouplingSet(kind, tuple(labels), tuple(mats), phi, number_conserving)


@dataclass(frozen=True)
class JumpOperator:
    """Filtered coupling operator; provenance records how it was built."""

    matrix: np.ndarray
    provenance: str  # "exact-eigenbasis" | "quadrature" | "closed-form"
    source: str = ""

    @property
    def dim(self):
        return self.matrix.shape[0]


def _coupling_dense(A):
    if isinstance(A, OperatorMatrix):
        return A.matrix.toarray()
    if sparse.issparse(A):
        return A.toarray()
    return np.asarray(A)


def jump_exact(eig: EigenSystem, A, filt, label: str = "") -> JumpOperator:
    """Eigenbasis reweighting K = sum_ij f(lam_i - lam_j) <i|A|j> |i><j|.

    Degenerate eigenvalues are used as-is (the filter sees the raw
    difference, zero within a degenerate pair); `filt` is any object with
    a vectorized `freq`.
    """
    if not eig.complete:
        raise ValueError("jump_exact needs the complete eigendecomposition")
    v = eig.vectors
    a_eig = v.conj().T @ _coupling_dense(A) @ v
    omega = eig.values[:, None] - eig.values[None, :]
    k_eig = filt.freq(omega) * a_eig
    return JumpOperator(v @ k_eig @ v.conj().T, "exact-eigenbasis", label)


def jump_quadrature(ham: HamiltonianMatrix, A, params: FilterParams,
                    grid: QuadratureGrid, label: str = "",
                    dense_cap: int = DEFAULT_DENSE_CAP) -> JumpOperator:
    """Trapezoidal time-domain construction K = sum_l w_l f(s_l) A(s_l).

    The Heisenberg factors exp(iHs) A exp(-iHs) are evaluated through the
    eigendecomposition of H, so each node contributes
    exp(i(lam_i - lam_j)s_l) elementwise in the eigenbasis; this is the
    same operator as the matrix-exponential product, to solver accuracy.
    """
    if ham.dim > dense_cap:
        raise CapacityError(f"quadrature jump at dimension {ham.dim} exceeds cap {dense_cap}")
    eig = ham.eigensystem()
    v = eig.vectors
    a_eig = v.conj().T @ _coupling_dense(A) @ v
    omega = eig.values[:, None] - eig.values[None, :]
    fvals = filter_time(grid.nodes, params) * grid.weights
    k_eig = np.zeros_like(a_eig, dtype=complex)
    for s, wf in zip(grid.nodes, fvals):
        k_eig += wf * np.exp(1j * omega * s) * a_eig
    return JumpOperator(v @ k_eig @ v.conj().T, "quadrature", label)


def jump_set_exact(eig: EigenSystem, couplings: CouplingSet, filt) -> list[JumpOperator]:
    return [jump_exact(eig, A, filt, label) for A, label in zip(couplings.matrices, couplings.labels)]


def jump_set_quadrature(ham: HamiltonianMatrix, couplings: CouplingSet,
                        params: FilterParams, grid: QuadratureGrid) -> list[JumpOperator]:
    return [jump_quadrature(ham, A, params, grid, label)
            for A, label in zip(couplings.matrices, couplings.labels)]
