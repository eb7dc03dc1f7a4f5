"""Gaussian-orbital integrals over contracted Cartesian s/p shells.

McMurchie-Davidson scheme: Cartesian Gaussian products are expanded in
Hermite Gaussians (coefficients E), Coulomb-type integrals reduce to
Hermite Coulomb integrals R built on the Boys function.  Recursion depth
is tiny for s/p shells, so the plain recursive form is fast enough.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np
from scipy.special import hyp1f1

from .basis_data import ATOMIC_NUMBER, shells_for

ANGSTROM_TO_BOHR = 1.0 / 0.52917721067

_CART = {0: ((0, 0, 0),), 1: ((1, 0, 0), (0, 1, 0), (0, 0, 1))}


def _double_factorial(n):
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _prim_norm(alpha, lmn):
    l, m, n = lmn
    num = (2 * alpha / pi) ** 0.75 * (4 * alpha) ** ((l + m + n) / 2)
    den = sqrt(_double_factorial(2 * l - 1) * _double_factorial(2 * m - 1)
               * _double_factorial(2 * n - 1))
    return num / den


@dataclass
class BasisFunction:
    """One contracted Cartesian Gaussian."""

    center: np.ndarray
    lmn: tuple
    exps: np.ndarray
    coefs: np.ndarray  # includes primitive norms and the contraction normalization

    @property
    def l_total(self):
        return sum(self.lmn)


def _contracted(center, lmn, exps, raw_coefs):
    exps = np.asarray(exps, dtype=float)
    coefs = np.array([c * _prim_norm(a, lmn) for a, c in zip(exps, raw_coefs)])
    bf = BasisFunction(np.asarray(center, dtype=float), lmn, exps, coefs)
    self_overlap = overlap(bf, bf)
    bf.coefs = coefs / sqrt(self_overlap)
    return bf


@dataclass
class Molecule:
    symbols: list
    coords: np.ndarray  # Bohr
    charge: int = 0

    @property
    def n_electrons(self):
        return sum(ATOMIC_NUMBER[s] for s in self.symbols) - self.charge

    def nuclear_repulsion(self):
        e = 0.0
        for i in range(len(self.symbols)):
            for j in range(i):
                r = np.linalg.norm(self.coords[i] - self.coords[j])
                e += ATOMIC_NUMBER[self.symbols[i]] * ATOMIC_NUMBER[self.symbols[j]] / r
        return e


def molecule_from_angstrom(symbols, coords_angstrom, charge=0):
    return Molecule(list(symbols), np.asarray(coords_angstrom, float) * ANGSTROM_TO_BOHR, charge)


def build_basis(mol: Molecule, basis_name: str):
    funcs = []
    for sym, xyz in zip(mol.symbols, mol.coords):
        for l, exps, coefs in shells_for(sym, basis_name):
            for lmn in _CART[l]:
                funcs.append(_contracted(xyz, lmn, exps, coefs))
    return funcs


def _hermite_e(i, j, t, q_x, a, b):
    """Hermite expansion coefficient E_t^{ij} for one Cartesian direction."""
    p = a + b
    mu = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return np.exp(-mu * q_x * q_x)
    if j == 0:
        return ((1 / (2 * p)) * _hermite_e(i - 1, j, t - 1, q_x, a, b)
                - (mu * q_x / a) * _hermite_e(i - 1, j, t, q_x, a, b)
                + (t + 1) * _hermite_e(i - 1, j, t + 1, q_x, a, b))
    return ((1 / (2 * p)) * _hermite_e(i, j - 1, t - 1, q_x, a, b)
            + (mu * q_x / b) * _hermite_e(i, j - 1, t, q_x, a, b)
            + (t + 1) * _hermite_e(i, j - 1, t + 1, q_x, a, b))


def _overlap_prim(a, lmn1, pa, b, lmn2, pb):
    q = pa - pb
    s = 1.0
    for d in range(3):
        s *= _hermite_e(lmn1[d], lmn2[d], 0, q[d], a, b)
    return s * (pi / (a + b)) ** 1.5


def overlap(f1: BasisFunction, f2: BasisFunction):
    s = 0.0
    for a, ca in zip(f1.exps, f1.coefs):
        for b, cb in zip(f2.exps, f2.coefs):
            s += ca * cb * _overlap_prim(a, f1.lmn, f1.center, b, f2.lmn, f2.center)
    return s


def _kinetic_prim(a, lmn1, pa, b, lmn2, pb):
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * _overlap_prim(a, lmn1, pa, b, lmn2, pb)
    term1 = -2 * b * b * (
        _overlap_prim(a, lmn1, pa, b, (l2 + 2, m2, n2), pb)
        + _overlap_prim(a, lmn1, pa, b, (l2, m2 + 2, n2), pb)
        + _overlap_prim(a, lmn1, pa, b, (l2, m2, n2 + 2), pb))
    term2 = -0.5 * (
        l2 * (l2 - 1) * _overlap_prim(a, lmn1, pa, b, (l2 - 2, m2, n2), pb)
        + m2 * (m2 - 1) * _overlap_prim(a, lmn1, pa, b, (l2, m2 - 2, n2), pb)
        + n2 * (n2 - 1) * _overlap_prim(a, lmn1, pa, b, (l2, m2, n2 - 2), pb))
    return term0 + term1 + term2


def kinetic(f1: BasisFunction, f2: BasisFunction):
    s = 0.0
    for a, ca in zip(f1.exps, f1.coefs):
        for b, cb in zip(f2.exps, f2.coefs):
            s += ca * cb * _kinetic_prim(a, f1.lmn, f1.center, b, f2.lmn, f2.center)
    return s


def _boys(n, x):
    return hyp1f1(n + 0.5, n + 1.5, -x) / (2 * n + 1)


def _hermite_r(t, u, v, n, p, pc):
    """Hermite Coulomb integral R^n_{tuv}."""
    if t < 0 or u < 0 or v < 0:
        return 0.0
    if t == u == v == 0:
        return (-2 * p) ** n * _boys(n, p * (pc @ pc))
    if t == u == 0:
        val = pc[2] * _hermite_r(t, u, v - 1, n + 1, p, pc)
        if v > 1:
            val += (v - 1) * _hermite_r(t, u, v - 2, n + 1, p, pc)
        return val
    if t == 0:
        val = pc[1] * _hermite_r(t, u - 1, v, n + 1, p, pc)
        if u > 1:
            val += (u - 1) * _hermite_r(t, u - 2, v, n + 1, p, pc)
        return val
    val = pc[0] * _hermite_r(t - 1, u, v, n + 1, p, pc)
    if t > 1:
        val += (t - 1) * _hermite_r(t - 2, u, v, n + 1, p, pc)
    return val


def _nuclear_prim(a, lmn1, pa, b, lmn2, pb, c):
    p = a + b
    pcenter = (a * pa + b * pb) / p
    q = pa - pb
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        ex = _hermite_e(lmn1[0], lmn2[0], t, q[0], a, b)
        if ex == 0.0:
            continue
        for u in range(lmn1[1] + lmn2[1] + 1):
            ey = _hermite_e(lmn1[1], lmn2[1], u, q[1], a, b)
            if ey == 0.0:
                continue
            for v in range(lmn1[2] + lmn2[2] + 1):
                ez = _hermite_e(lmn1[2], lmn2[2], v, q[2], a, b)
                if ez == 0.0:
                    continue
                val += ex * ey * ez * _hermite_r(t, u, v, 0, p, pcenter - c)
    return 2 * pi / p * val


def nuclear_attraction(f1: BasisFunction, f2: BasisFunction, mol: Molecule):
    s = 0.0
    for a, ca in zip(f1.exps, f1.coefs):
        for b, cb in zip(f2.exps, f2.coefs):
            for sym, xyz in zip(mol.symbols, mol.coords):
                s -= ATOMIC_NUMBER[sym] * ca * cb * _nuclear_prim(
                    a, f1.lmn, f1.center, b, f2.lmn, f2.center, xyz)
    return s


def _eri_prim(a, lmn1, pa, b, lmn2, pb, c, lmn3, pc, d, lmn4, pd):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    pcent = (a * pa + b * pb) / p
    qcent = (c * pc + d * pd) / q
    pq = pcent - qcent
    qab = pa - pb
    qcd = pc - pd

    e1 = {}
    for t in range(lmn1[0] + lmn2[0] + 1):
        for u in range(lmn1[1] + lmn2[1] + 1):
            for v in range(lmn1[2] + lmn2[2] + 1):
                val = (_hermite_e(lmn1[0], lmn2[0], t, qab[0], a, b)
                       * _hermite_e(lmn1[1], lmn2[1], u, qab[1], a, b)
                       * _hermite_e(lmn1[2], lmn2[2], v, qab[2], a, b))
                if val != 0.0:
                    e1[t, u, v] = val
    e2 = {}
    for t in range(lmn3[0] + lmn4[0] + 1):
        for u in range(lmn3[1] + lmn4[1] + 1):
            for v in range(lmn3[2] + lmn4[2] + 1):
                val = (_hermite_e(lmn3[0], lmn4[0], t, qcd[0], c, d)
                       * _hermite_e(lmn3[1], lmn4[1], u, qcd[1], c, d)
                       * _hermite_e(lmn3[2], lmn4[2], v, qcd[2], c, d))
                if val != 0.0:
                    e2[t, u, v] = val

    val = 0.0
    for (t, u, v), c1 in e1.items():
        for (tt, uu, vv), c2 in e2.items():
            sign = -1.0 if (tt + uu + vv) % 2 else 1.0
            val += c1 * c2 * sign * _hermite_r(t + tt, u + uu, v + vv, 0, alpha, pq)
    return val * 2 * pi ** 2.5 / (p * q * sqrt(p + q))


def electron_repulsion(f1, f2, f3, f4):
    """Chemists' (f1 f2 | f3 f4)."""
    s = 0.0
    for a, ca in zip(f1.exps, f1.coefs):
        for b, cb in zip(f2.exps, f2.coefs):
            for c, cc in zip(f3.exps, f3.coefs):
                for d, cd in zip(f4.exps, f4.coefs):
                    s += ca * cb * cc * cd * _eri_prim(
                        a, f1.lmn, f1.center, b, f2.lmn, f2.center,
                        c, f3.lmn, f3.center, d, f4.lmn, f4.center)
    return s


def integral_tables(mol: Molecule, basis_name: str):
    """All AO-basis integral arrays: overlap, kinetic+nuclear core, and ERI."""
    funcs = build_basis(mol, basis_name)
    n = len(funcs)
    s = np.empty((n, n))
    hcore = np.empty((n, n))
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = overlap(funcs[i], funcs[j])
            hij = kinetic(funcs[i], funcs[j]) + nuclear_attraction(funcs[i], funcs[j], mol)
            hcore[i, j] = hcore[j, i] = hij
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    val = electron_repulsion(funcs[i], funcs[j], funcs[k], funcs[l])
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            eri[a, b, c, d] = eri[c, d, a, b] = val
    return funcs, s, hcore, eri
