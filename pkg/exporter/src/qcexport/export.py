"""Fixture export: FCIDUMP, Fock matrices, and reference energies."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fci import fci_ground_energy, hf_determinant_energy
from .geometries import GEOMETRIES, parse_xyz
from .gto import molecule_from_angstrom
from .scf import mo_integrals, run_rhf

FCI_DIM_CAP = 4000


def _fcidump_text(h_mo, eri_mo, e_core, n_electrons, threshold=1e-14):
    n = h_mo.shape[0]
    out = [f"&FCI NORB={n},NELEC={n_electrons},MS2=0,",
           f"  ORBSYM={'1,' * n}", "  ISYM=1,", "&END"]
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                for l in range(k + 1):
                    if (i * (i + 1)) // 2 + j < (k * (k + 1)) // 2 + l:
                        continue
                    val = eri_mo[i, j, k, l]
                    if abs(val) > threshold:
                        out.append(f" {val:.16e} {i + 1} {j + 1} {k + 1} {l + 1}")
    for i in range(n):
        for j in range(i + 1):
            if abs(h_mo[i, j]) > threshold:
                out.append(f" {h_mo[i, j]:.16e} {i + 1} {j + 1} 0 0")
    out.append(f" {e_core:.16e} 0 0 0 0")
    return "\n".join(out) + "\n"


def _interleave_spin(mat):
    """Lift a spatial matrix to spin orbitals with (alpha, beta) interleaving."""
    n = mat.shape[0]
    out = np.zeros((2 * n, 2 * n))
    out[0::2, 0::2] = mat
    out[1::2, 1::2] = mat
    return out


def _fock_text(mat):
    lines = [str(mat.shape[0])]
    for row in mat:
        lines.append(" ".join(f"{v:.16e}" for v in row))
    return "\n".join(lines) + "\n"


def export_fixture(molecule=None, basis=None, outdir=".", xyz_text=None,
                   charge=0, name=None, fci_roots=2, level_shift=0.0):
    """Run SCF + FCI and write fcidump, fock.txt, fock_oao.txt, reference.json.

    Returns the ScfResult.  The FCIDUMP is in the molecular-orbital basis
    (ascending orbital energy) so downstream active-space windows can use
    the identity rotation.
    """
    if xyz_text is not None:
        symbols, coords = parse_xyz(xyz_text)
        name = name or "custom"
        basis = basis or "sto-3g"
    else:
        if molecule not in GEOMETRIES:
            raise KeyError(f"unknown molecule {molecule!r}; choices: {sorted(GEOMETRIES)}")
        entry = GEOMETRIES[molecule]
        symbols, coords = entry["symbols"], entry["coords"]
        basis = basis or entry["default_basis"]
        name = name or molecule

    mol = molecule_from_angstrom(symbols, coords, charge)
    res = run_rhf(mol, basis, level_shift=level_shift)
    h_mo, eri_mo = mo_integrals(res)
    n = res.n_orbitals

    fci_elec, dim = None, None
    from math import comb
    dim = comb(2 * n, mol.n_electrons)
    if dim <= FCI_DIM_CAP:
        roots, dim = fci_ground_energy(h_mo, eri_mo, mol.n_electrons, n_roots=fci_roots)
        fci_elec = roots
    hf_det = hf_determinant_energy(h_mo, eri_mo, mol.n_electrons)

    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "fcidump").write_text(
        _fcidump_text(h_mo, eri_mo, res.e_nuc, mol.n_electrons))
    fock_mo = np.diag(res.mo_energies)
    (outdir / "fock.txt").write_text(_fock_text(_interleave_spin(fock_mo)))
    # orthonormalized-AO variant uses the symmetric (Lowdin) orthogonalizer
    vals, vecs = np.linalg.eigh(res.overlap)
    x = vecs @ np.diag(vals ** -0.5) @ vecs.T
    fock_oao = x.T @ res.fock_ao @ x
    (outdir / "fock_oao.txt").write_text(_fock_text(_interleave_spin(fock_oao)))

    reference = {
        "molecule": name,
        "basis": basis,
        "n_spatial_orbitals": n,
        "n_electrons": mol.n_electrons,
        "e_nuclear": res.e_nuc,
        "scf_energy": res.e_total,
        "scf_determinant_energy": hf_det + res.e_nuc,
        "orbital_energies": [float(e) for e in res.mo_energies],
        "fci_sector_dimension": dim,
        "scf_iterations": res.iterations,
    }
    if fci_elec is not None:
        reference["fci_energy"] = float(fci_elec[0] + res.e_nuc)
        if len(fci_elec) > 1:
            reference["fci_excited_energies"] = [float(e + res.e_nuc) for e in fci_elec[1:]]
    (outdir / "reference.json").write_text(json.dumps(reference, indent=2) + "\n")
    return res
