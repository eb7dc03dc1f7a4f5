"""FCIDUMP parsing, spin expansion, and many-body Hamiltonian assembly.

One- and two-electron integrals live in the spatial-orbital basis with
chemists' notation ``(ij|kl)`` and 8-fold permutational symmetry, in
Hartree.  ``assemble_hamiltonian`` lifts them to the spin-orbital
second-quantized Hamiltonian

    H = sum_pq T_pq a_p^+ a_q
      + 1/2 sum_pqrs S_pqrs a_p^+ a_q^+ a_r a_s  +  E_core

on a determinant basis, and ``exact_eigensystem`` provides the dense
diagonalization oracle used for ground-state references and gaps.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from io import StringIO

import numpy as np
from scipy import sparse

from .basis import SectorBasis, build_operator_matrix
from .errors import CapacityError, ConsistencyError, FcidumpParseError

DEFAULT_DENSE_CAP = 4096

_HEADER_RE = re.compile(r"([A-Za-z0-9_]+)\s*=\s*([^,=]+?)(?:,|$)")


def _canonical_quad(i, j, k, l):
    """Canonical representative of the 8 chemists'-symmetry images (0-based)."""
    ij = (i, j) if i >= j else (j, i)
    kl = (k, l) if k >= l else (l, k)
    return ij + kl if ij >= kl else kl + ij


@dataclass
class IntegralSet:
    """Spatial one-/two-electron integrals plus core energy (all in Hartree)."""

    L: int
    n_electrons: int
    ms2: int = 0
    e_core: float = 0.0
    h: np.ndarray = None
    eri: dict = field(default_factory=dict)  # canonical 0-based quadruple -> value

    def __post_init__(self):
        if self.h is None:
            self.h = np.zeros((self.L, self.L))
        if not 0 <= self.n_electrons <= 2 * self.L:
            raise ValueError(f"electron count {self.n_electrons} outside 0..{2 * self.L}")
        if np.max(np.abs(self.h - self.h.T), initial=0.0) > 1e-12:
            raise ConsistencyError("one-electron integrals not symmetric within 1e-12")

    def eri_value(self, i, j, k, l) -> float:
        """(ij|kl) with 0-based spatial indices."""
        return self.eri.get(_canonical_quad(i, j, k, l), 0.0)

    def __eq__(self, other):
        return (isinstance(other, IntegralSet)
                and self.L == other.L and self.n_electrons == other.n_electrons
                and self.ms2 == other.ms2 and self.e_core == other.e_core
                and np.array_equal(self.h, other.h) and self.eri == other.eri)


def _tokens(value_line):
    return value_line.replace("D", "E").replace("d", "e").split()


def parse_fcidump(source) -> IntegralSet:
    """Parse an FCIDUMP stream (Molpro conventions) into an IntegralSet.

    Accepts a string, a file path opened by the caller, or any iterable of
    lines.  Symmetry-equivalent duplicate entries must agree within 1e-10.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = str(source).splitlines()

    header_text = []
    body_start = None
    for ln, line in enumerate(lines, start=1):
        stripped = line.strip()
        if ln == 1 and not stripped.upper().startswith("&FCI"):
            raise FcidumpParseError("header must start with &FCI", line=1)
        header_text.append(stripped)
        if stripped.upper().endswith("&END") or stripped == "/" or stripped.endswith("/"):
            body_start = ln
            break
    if body_start is None:
        raise FcidumpParseError("header not terminated by &END or /", line=len(lines))

    header = " ".join(header_text)
    header = re.sub(r"(?i)&FCI", "", header)
    header = re.sub(r"(?i)&END", "", header).rstrip("/ ")
    fields = {m.group(1).upper(): m.group(2).strip() for m in _HEADER_RE.finditer(header)}
    try:
        L = int(fields["NORB"])
        n_elec = int(fields["NELEC"])
    except (KeyError, ValueError) as exc:
        raise FcidumpParseError(f"missing or malformed NORB/NELEC ({exc})", line=1) from None
    ms2 = int(fields.get("MS2", "0").rstrip(","))

    h_seen, eri_seen = {}, {}
    e_core, e_core_seen = 0.0, False
    for ln in range(body_start, len(lines)):
        raw = lines[ln].strip()
        if not raw:
            continue
        toks = _tokens(raw)
        if len(toks) != 5:
            raise FcidumpParseError(f"expected 'value i j k l', got {raw!r}", line=ln + 1)
        try:
            val = float(toks[0])
            i, j, k, l = (int(t) for t in toks[1:])
        except ValueError:
            raise FcidumpParseError(f"non-numeric token in {raw!r}", line=ln + 1) from None
        for idx in (i, j, k, l):
            if not 0 <= idx <= L:
                raise ValueError(f"line {ln + 1}: orbital index {idx} out of range 0..{L}")
        if (i, j, k, l) == (0, 0, 0, 0):
            if e_core_seen and abs(val - e_core) > 1e-10:
                raise ConsistencyError(f"line {ln + 1}: conflicting core energies {e_core} vs {val}")
            e_core, e_core_seen = val, True
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpParseError(f"mixed zero/nonzero indices in {raw!r}", line=ln + 1)
            key = (max(i, j) - 1, min(i, j) - 1)
            if key in h_seen and abs(h_seen[key] - val) > 1e-10:
                raise ConsistencyError(
                    f"line {ln + 1}: conflicting h[{i},{j}] values {h_seen[key]} vs {val}")
            h_seen[key] = val
        elif 0 in (i, j, k, l):
            raise FcidumpParseError(f"mixed zero/nonzero indices in {raw!r}", line=ln + 1)
        else:
            key = _canonical_quad(i - 1, j - 1, k - 1, l - 1)
            if key in eri_seen and abs(eri_seen[key] - val) > 1e-10:
                raise ConsistencyError(
                    f"line {ln + 1}: conflicting ({i}{j}|{k}{l}) values {eri_seen[key]} vs {val}")
            eri_seen[key] = val

    h = np.zeros((L, L))
    for (a, b), val in h_seen.items():
        h[a, b] = h[b, a] = val
    return IntegralSet(L, n_elec, ms2=ms2, e_core=e_core, h=h, eri=dict(eri_seen))


def write_fcidump(ints: IntegralSet, stream=None) -> str:
    """Serialize an IntegralSet back to FCIDUMP text (full float64 precision)."""
    out = stream if stream is not None else StringIO()
    out.write(f"&FCI NORB={ints.L},NELEC={ints.n_electrons},MS2={ints.ms2},\n")
    out.write(f"  ORBSYM={'1,' * ints.L}\n  ISYM=1,\n&END\n")
    for key in sorted(ints.eri):
        i, j, k, l = (idx + 1 for idx in key)
        out.write(f" {ints.eri[key]:.17g} {i} {j} {k} {l}\n")
    for i in range(ints.L):
        for j in range(i + 1):
            if ints.h[i, j] != 0.0:
                out.write(f" {ints.h[i, j]:.17g} {i + 1} {j + 1} 0 0\n")
    out.write(f" {ints.e_core:.17g} 0 0 0 0\n")
    return out.getvalue() if stream is None else ""


@dataclass
class SpinIntegrals:
    """Spin-orbital view of an IntegralSet (see module docstring for T, S)."""

    ints: IntegralSet
    t: np.ndarray  # 2L x 2L one-body coefficients

    def value(self, p, q, r, s) -> float:
        """S_pqrs for the operator string a_p^+ a_q^+ a_r a_s (1-based spin orbitals)."""
        (ip, sp), (iq, sq) = _spatial_spin(p), _spatial_spin(q)
        (ir, sr), (is_, ss) = _spatial_spin(r), _spatial_spin(s)
        if sp != ss or sq != sr:
            return 0.0
        return self.ints.eri_value(ip, is_, iq, ir)


def _spatial_spin(p):
    """Spin orbital p (1-based) -> (0-based spatial index, spin bit)."""
    return (p - 1) // 2, (p - 1) % 2


def spin_expand(ints: IntegralSet) -> SpinIntegrals:
    """Lift spatial integrals to spin orbitals (alpha = 2i-1, beta = 2i)."""
    L = ints.L
    t = np.zeros((2 * L, 2 * L))
    for spin in (0, 1):
        t[spin::2, spin::2] = ints.h
    return SpinIntegrals(ints, t)


@dataclass
class EigenSystem:
    """Eigenpairs sorted by ascending eigenvalue; vectors are columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def complete(self) -> bool:
        return len(self.values) == self.vectors.shape[0]

    @property
    def ground_energy(self) -> float:
        return float(self.values[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def gap(self) -> float:
        return float(self.values[1] - self.values[0])


@dataclass
class HamiltonianMatrix:
    """Sparse Hermitian many-body Hamiltonian on a determinant basis."""

    basis: SectorBasis
    matrix: sparse.csr_matrix
    _norm2: float | None = field(default=None, repr=False)
    _eigs: EigenSystem | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.basis.dim

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def norm2(self, tol=1e-6, dense_cap=DEFAULT_DENSE_CAP) -> float:
        """Spectral norm; dense eigensolve at desk scale, power iteration beyond."""
        if self._norm2 is None:
            if self.dim <= dense_cap:
                eig = self.eigensystem(dense_cap=dense_cap)
                self._norm2 = float(np.max(np.abs(eig.values)))
            else:
                self._norm2 = _power_norm(self.matrix, tol)
        return self._norm2

    def eigensystem(self, k=None, dense_cap=DEFAULT_DENSE_CAP) -> EigenSystem:
        if self._eigs is None:
            self._eigs = exact_eigensystem(self, dense_cap=dense_cap)
        if k is None or k >= len(self._eigs.values):
            return self._eigs
        return EigenSystem(self._eigs.values[:k], self._eigs.vectors[:, :k])


def _power_norm(mat, tol, max_iter=10_000, seed=7):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(mat.shape[0])
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(max_iter):
        y = mat @ x
        new = np.linalg.norm(y)
        if new == 0.0:
            return 0.0
        x = y / new
        if abs(new - est) <= tol * max(new, 1e-300):
            return float(new)
        est = new
    return float(est)


def _spin_summed_excitation(basis, i, j):
    """E_ij = sum_sigma a+_{i sigma} a_{j sigma} for 1-based spatial i, j."""
    ops = []
    for spin_off in (0, 1):
        p, q = 2 * i - 1 + spin_off, 2 * j - 1 + spin_off
        ops.append(build_operator_matrix([(p, "+"), (q, "-")], basis).matrix)
    return (ops[0] + ops[1]).tocsr()


def assemble_hamiltonian(ints: IntegralSet, basis: SectorBasis) -> HamiltonianMatrix:
    """Assemble H on the given basis from spatial integrals.

    Uses the spin-summed excitation identity
    ``sum (ij|kl) a+ a+ a a = sum (ij|kl) (E_ij E_kl - delta_jk E_il)``
    which is algebraically the normal-ordered two-body string of the
    Hamiltonian; NELEC metadata of the integral set is not binding for
    the basis sector (any sector of the same L may be assembled).
    """
    L = ints.L
    if basis.n_spatial != L:
        raise ValueError(f"basis has {basis.n_spatial} spatial orbitals, integrals have {L}")
    dim = basis.dim
    exc = {}
    for i in range(1, L + 1):
        for j in range(1, L + 1):
            exc[i, j] = _spin_summed_excitation(basis, i, j)

    ham = sparse.csr_matrix((dim, dim))
    for i in range(1, L + 1):
        for j in range(1, L + 1):
            if ints.h[i - 1, j - 1] != 0.0:
                ham = ham + ints.h[i - 1, j - 1] * exc[i, j]

    if ints.eri:
        for i in range(1, L + 1):
            for j in range(1, L + 1):
                w = None
                for k in range(1, L + 1):
                    for l in range(1, L + 1):
                        val = ints.eri_value(i - 1, j - 1, k - 1, l - 1)
                        if val != 0.0:
                            w = val * exc[k, l] if w is None else w + val * exc[k, l]
                if w is not None:
                    ham = ham + 0.5 * (exc[i, j] @ w)
        for i in range(1, L + 1):
            for l in range(1, L + 1):
                c = sum(ints.eri_value(i - 1, j - 1, j - 1, l - 1) for j in range(1, L + 1))
                if c != 0.0:
                    ham = ham - 0.5 * c * exc[i, l]

    if ints.e_core != 0.0:
        ham = ham + ints.e_core * sparse.identity(dim, format="csr")
    ham.eliminate_zeros()
    return HamiltonianMatrix(basis, ham.tocsr())


def exact_eigensystem(ham: HamiltonianMatrix, k: int | None = None,
                      dense_cap=DEFAULT_DENSE_CAP) -> EigenSystem:
    """Dense Hermitian eigensolve oracle (ascending); CapacityError above cap."""
    if ham.dim > dense_cap:
        raise CapacityError(f"dense eigensolve of dimension {ham.dim} exceeds cap {dense_cap}")
    dense = ham.dense()
    vals, vecs = np.linalg.eigh(dense)
    if k is not None:
        vals, vecs = vals[:k], vecs[:, :k]
    return EigenSystem(vals, vecs)


def parse_fock_matrix(source) -> np.ndarray:
    """Read a Fock-matrix file: integer dimension line, then the square matrix.

    The matrix is symmetrized when the asymmetry is below 1e-10 and
    rejected otherwise.
    """
    if hasattr(source, "read"):
        lines = source.read().split("\n")
    else:
        lines = str(source).split("\n")
    lines = [ln for ln in (l.strip() for l in lines) if ln]
    if not lines:
        raise FcidumpParseError("empty Fock matrix file", line=1)
    try:
        n = int(lines[0])
    except ValueError:
        raise FcidumpParseError(f"expected integer dimension, got {lines[0]!r}", line=1) from None
    if len(lines) - 1 != n:
        raise FcidumpParseError(f"expected {n} matrix rows, found {len(lines) - 1}", line=len(lines))
    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        toks = _tokens(line)
        if len(toks) != n:
            raise FcidumpParseError(f"expected {n} entries per row, found {len(toks)}", line=ln)
        try:
            rows.append([float(t) for t in toks])
        except ValueError:
            raise FcidumpParseError(f"non-numeric token in row {ln}", line=ln) from None
    mat = np.array(rows)
    asym = np.max(np.abs(mat - mat.T), initial=0.0)
    if asym > 1e-10:
        raise ConsistencyError(f"Fock matrix asymmetry {asym:.3e} exceeds 1e-10")
    return 0.5 * (mat + mat.T)


def write_fock_matrix(mat: np.ndarray, stream=None) -> str:
    out = stream if stream is not None else StringIO()
    n = mat.shape[0]
    out.write(f"{n}\n")
    for row in np.asarray(mat):
        out.write(" ".join(f"{v:.17g}" for v in row) + "\n")
    return out.getvalue() if stream is None else ""
