"""Determinant bases for the fermionic Fock space and fixed-number sectors.

Spin-orbital convention (fixed throughout the package): spatial orbital
``i`` (1-based, sorted by ascending orbital energy for molecular-orbital
inputs) contributes spin orbital ``2i-1`` for spin alpha and ``2i`` for
spin beta.  Spin orbital ``p`` occupies bit ``p-1`` of the determinant
bitmask.  Ladder operators carry the sign ``(-1)**n_below`` where
``n_below`` counts occupied spin orbitals with index strictly below the
acted one.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np
from scipy import sparse

from .errors import CapacityError, SectorError

DEFAULT_MAX_DETS = 100_000

CREATE = "create"
ANNIHILATE = "annihilate"
_KIND_ALIASES = {CREATE: CREATE, "+": CREATE, ANNIHILATE: ANNIHILATE, "-": ANNIHILATE}


def max_basis_dim():
    """Determinant-count cap; the LGSP_MAX_DIM environment variable overrides it."""
    env = os.environ.get("LGSP_MAX_DIM")
    return int(env) if env else DEFAULT_MAX_DETS


@dataclass(frozen=True)
class Determinant:
    """Occupation bitmask over the 2L spin orbitals of an L-orbital problem."""

    occupation: int
    n_spatial: int

    def __post_init__(self):
        if not 0 <= self.occupation < (1 << (2 * self.n_spatial)):
            raise ValueError("occupation bitmask out of range for 2L spin orbitals")

    @property
    def n_particles(self) -> int:
        return self.occupation.bit_count()

    def occupied(self) -> tuple[int, ...]:
        """1-based indices of occupied spin orbitals, ascending."""
        return tuple(p + 1 for p in range(2 * self.n_spatial) if self.occupation >> p & 1)


def _parity_below(bits: int, p: int) -> int:
    """Sign (-1)**(number of occupied spin orbitals with index < p)."""
    mask = (1 << (p - 1)) - 1
    return -1 if (bits & mask).bit_count() & 1 else 1


def ladder_action(det: Determinant, p: int, kind: str):
    """Apply a_p^dagger (kind="create") or a_p (kind="annihilate") to a determinant.

    Returns ``(new_determinant, sign)`` or ``None`` when the action
    annihilates the state.
    """
    kind = _KIND_ALIASES[kind]
    if not 1 <= p <= 2 * det.n_spatial:
        raise ValueError(f"spin-orbital index {p} out of range 1..{2 * det.n_spatial}")
    bits = det.occupation
    occupied = bits >> (p - 1) & 1
    if kind == CREATE:
        if occupied:
            return None
        new_bits = bits | (1 << (p - 1))
    else:
        if not occupied:
            return None
        new_bits = bits & ~(1 << (p - 1))
    return Determinant(new_bits, det.n_spatial), _parity_below(bits, p)


def _apply_string(bits: int, string, n_spin: int):
    """Apply a ladder string (rightmost factor first) to a raw bitmask."""
    sign = 1
    for p, kind in reversed(list(string)):
        kind = _KIND_ALIASES[kind]
        if not 1 <= p <= n_spin:
            raise ValueError(f"spin-orbital index {p} out of range 1..{n_spin}")
        occupied = bits >> (p - 1) & 1
        if kind == CREATE:
            if occupied:
                return None
            new_bits = bits | (1 << (p - 1))
        else:
            if not occupied:
                return None
            new_bits = bits & ~(1 << (p - 1))
        mask = (1 << (p - 1)) - 1
        if (bits & mask).bit_count() & 1:
            sign = -sign
        bits = new_bits
    return bits, sign


@dataclass(frozen=True)
class SectorBasis:
    """Ordered determinant basis of the Fock space or a fixed-N_e sector.

    Determinants are stored as raw bitmasks in ascending order, so the
    enumeration is deterministic and serialized results are reproducible.
    """

    n_spatial: int
    n_electrons: int | None  # None = full Fock space
    dets: tuple[int, ...]
    index: dict = field(repr=False, hash=False, compare=False)

    def __len__(self):
        return len(self.dets)

    @property
    def dim(self) -> int:
        return len(self.dets)

    @property
    def is_fock(self) -> bool:
        return self.n_electrons is None

    def determinant(self, i: int) -> Determinant:
        return Determinant(self.dets[i], self.n_spatial)

    def position(self, det: Determinant | int) -> int:
        bits = det.occupation if isinstance(det, Determinant) else det
        return self.index[bits]


def enumerate_basis(L: int, n_electrons: int | None = None, max_dets: int | None = None) -> SectorBasis:
    """Enumerate the Fock space (n_electrons=None) or the fixed-number sector.

    The Fock space holds 2**(2L) determinants, the sector C(2L, N_e).
    Raises CapacityError above the determinant cap (LGSP_MAX_DIM overrides).
    """
    if not 1 <= L <= 20:
        raise ValueError(f"spatial orbital count {L} outside 1..20")
    n_spin = 2 * L
    cap = max_dets if max_dets is not None else max_basis_dim()
    if n_electrons is None:
        dim = 1 << n_spin
        if dim > cap:
            raise CapacityError(f"Fock space dimension {dim} exceeds cap {cap}")
        dets = tuple(range(dim))
    else:
        if not 0 <= n_electrons <= n_spin:
            raise ValueError(f"electron count {n_electrons} outside 0..{n_spin}")
        dim = comb(n_spin, n_electrons)
        if dim > cap:
            raise CapacityError(f"sector dimension {dim} exceeds cap {cap}")
        dets = tuple(sorted(sum(1 << p for p in occ)
                            for occ in combinations(range(n_spin), n_electrons)))
    return SectorBasis(L, n_electrons, dets, {bits: i for i, bits in enumerate(dets)})


@dataclass(frozen=True)
class OperatorMatrix:
    """Sparse matrix representation of an operator on a SectorBasis.

    Entries are stored exactly as assembled (no drop tolerance)."""

    basis: SectorBasis
    matrix: sparse.csr_matrix

    @property
    def dim(self) -> int:
        return self.basis.dim

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()


def build_operator_matrix(ladder_string, basis: SectorBasis) -> OperatorMatrix:
    """Assemble the sparse matrix of a ladder-operator product on a basis.

    ``ladder_string`` is a sequence of ``(spin_orbital_index, kind)`` pairs
    written in operator order, i.e. the rightmost pair acts on the ket
    first.  ``kind`` is "create"/"+" or "annihilate"/"-".  On a
    fixed-number basis the string must preserve the particle number.
    """
    string = list(ladder_string)
    n_spin = 2 * basis.n_spatial
    if not basis.is_fock:
        delta = sum(1 if _KIND_ALIASES[kind] == CREATE else -1 for _, kind in string)
        if delta != 0:
            raise SectorError(
                f"ladder string changes particle number by {delta} on a fixed-number basis")
    rows, cols, vals = [], [], []
    for j, bits in enumerate(basis.dets):
        out = _apply_string(bits, string, n_spin)
        if out is None:
            continue
        new_bits, sign = out
        rows.append(basis.index[new_bits])
        cols.append(j)
        vals.append(float(sign))
    mat = sparse.csr_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim))
    return OperatorMatrix(basis, mat)


def number_operator(basis: SectorBasis) -> OperatorMatrix:
    """Total particle-number operator (diagonal in any determinant basis)."""
    diag = np.array([bits.bit_count() for bits in basis.dets], dtype=float)
    return OperatorMatrix(basis, sparse.diags(diag).tocsr())


def occupation_operator(basis: SectorBasis, p: int) -> OperatorMatrix:
    """Number operator n_p of a single spin orbital (1-based)."""
    diag = np.array([bits >> (p - 1) & 1 for bits in basis.dets], dtype=float)
    return OperatorMatrix(basis, sparse.diags(diag).tocsr())


def spin_orbital_index(spatial: int, spin: str) -> int:
    """Map (spatial orbital, spin) to the packed spin-orbital index."""
    if spin not in ("a", "b", "alpha", "beta"):
        raise ValueError(f"unknown spin label {spin!r}")
    return 2 * spatial - 1 if spin.startswith("a") else 2 * spatial
