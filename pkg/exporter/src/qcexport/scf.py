"""Restricted closed-shell Hartree-Fock with DIIS acceleration."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gto import Molecule, integral_tables


class ScfError(RuntimeError):
    """SCF failed to converge; carries the iteration log."""

    def __init__(self, message, log):
        super().__init__(message + "\n" + "\n".join(log))
        self.log = log


@dataclass
class ScfResult:
    mol: Molecule
    basis_name: str
    e_total: float
    e_nuc: float
    mo_energies: np.ndarray
    mo_coeffs: np.ndarray      # AO x MO
    fock_ao: np.ndarray
    overlap: np.ndarray
    hcore: np.ndarray
    eri_ao: np.ndarray
    n_occ: int
    iterations: int

    @property
    def n_orbitals(self):
        return len(self.mo_energies)


def _lowdin(s):
    vals, vecs = np.linalg.eigh(s)
    if np.min(vals) < 1e-10:
        raise ScfError("overlap matrix is near-singular", [f"min eigenvalue {np.min(vals):.3e}"])
    return vecs @ np.diag(vals ** -0.5) @ vecs.T


def _fock_matrix(hcore, eri, dens):
    j = np.einsum("pqrs,rs->pq", eri, dens)
    k = np.einsum("prqs,rs->pq", eri, dens)
    return hcore + j - 0.5 * k


def run_rhf(mol: Molecule, basis_name: str, max_iter=200, conv=1e-11,
            diis_size=8, level_shift=0.0) -> ScfResult:
    """Converge the closed-shell SCF equations; ScfError on failure."""
    if mol.n_electrons % 2:
        raise ScfError("restricted HF needs an even electron count",
                       [f"N_e = {mol.n_electrons}"])
    _funcs, s, hcore, eri = integral_tables(mol, basis_name)
    x = _lowdin(s)
    n_occ = mol.n_electrons // 2
    e_nuc = mol.nuclear_repulsion()

    # core-Hamiltonian guess
    f_oao = x.T @ hcore @ x
    _, c_oao = np.linalg.eigh(f_oao)
    c = x @ c_oao
    dens = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T

    log, err_hist, f_hist = [], [], []
    e_old, fock = 0.0, None
    for it in range(1, max_iter + 1):
        fock = _fock_matrix(hcore, eri, dens)
        e_elec = 0.5 * np.sum(dens * (hcore + fock))
        err = x.T @ (fock @ dens @ s - s @ dens @ fock) @ x
        err_norm = np.max(np.abs(err))
        log.append(f"iter {it:3d}  E = {e_elec + e_nuc:.12f}  |FDS-SDF| = {err_norm:.3e}")
        if err_norm < conv and abs(e_elec + e_nuc - e_old) < conv:
            mo_e, c_oao = np.linalg.eigh(x.T @ fock @ x)
            c = x @ c_oao
            return ScfResult(mol, basis_name, float(e_elec + e_nuc), float(e_nuc),
                             mo_e, c, fock, s, hcore, eri, n_occ, it)
        e_old = e_elec + e_nuc

        err_hist.append(err)
        f_hist.append(fock)
        if len(err_hist) > diis_size:
            err_hist.pop(0)
            f_hist.pop(0)
        if len(err_hist) >= 2:
            fock_eff = _diis_extrapolate(err_hist, f_hist)
        else:
            fock_eff = fock
        f_work = x.T @ fock_eff @ x
        if level_shift:
            # shift virtual orbitals of the previous iterate upward
            c_prev = np.linalg.solve(x, c)
            proj_occ = c_prev[:, :n_occ] @ c_prev[:, :n_occ].T
            f_work = f_work + level_shift * (np.eye(len(s)) - proj_occ)
        mo_e, c_oao = np.linalg.eigh(f_work)
        c = x @ c_oao
        dens = 2.0 * c[:, :n_occ] @ c[:, :n_occ].T
    raise ScfError(f"SCF not converged in {max_iter} iterations", log)


def _diis_extrapolate(err_hist, f_hist):
    m = len(err_hist)
    b = -np.ones((m + 1, m + 1))
    b[m, m] = 0.0
    for i in range(m):
        for j in range(m):
            b[i, j] = np.sum(err_hist[i] * err_hist[j])
    rhs = np.zeros(m + 1)
    rhs[m] = -1.0
    try:
        coefs = np.linalg.solve(b, rhs)[:m]
    except np.linalg.LinAlgError:
        return f_hist[-1]
    return sum(c * f for c, f in zip(coefs, f_hist))


def mo_integrals(res: ScfResult):
    """Spatial MO-basis h and (ij|kl) from the converged SCF solution."""
    c = res.mo_coeffs
    h_mo = c.T @ res.hcore @ c
    eri_mo = np.einsum("pi,pqrs->iqrs", c, res.eri_ao, optimize=True)
    eri_mo = np.einsum("qj,iqrs->ijrs", c, eri_mo, optimize=True)
    eri_mo = np.einsum("rk,ijrs->ijks", c, eri_mo, optimize=True)
    eri_mo = np.einsum("sl,ijks->ijkl", c, eri_mo, optimize=True)
    return h_mo, eri_mo
