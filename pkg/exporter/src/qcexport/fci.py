"""Dense full-CI reference energies from MO integrals.

Independent of any consumer of the exported files: determinants are
occupation bitmasks over 2L spin orbitals (alpha = even bit, beta = odd
bit of each spatial orbital), and the Hamiltonian is applied column by
column with explicit second-quantized strings using antisymmetrized
spin-orbital integrals <pq||rs>.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def _spin_eri(eri_mo, p, q, r, s):
    """<pq||rs> = (pr|qs) - (ps|qr) over spin orbitals (0-based, spatial = idx//2)."""
    sp, sq, sr, ss = p % 2, q % 2, r % 2, s % 2
    ip, iq, ir, is_ = p // 2, q // 2, r // 2, s // 2
    direct = eri_mo[ip, ir, iq, is_] if (sp == sr and sq == ss) else 0.0
    exchange = eri_mo[ip, is_, iq, ir] if (sp == ss and sq == sr) else 0.0
    return direct - exchange


def _annihilate(bits, p):
    if not bits >> p & 1:
        return None
    sign = -1 if (bits & ((1 << p) - 1)).bit_count() & 1 else 1
    return bits & ~(1 << p), sign


def _create(bits, p):
    if bits >> p & 1:
        return None
    sign = -1 if (bits & ((1 << p) - 1)).bit_count() & 1 else 1
    return bits | (1 << p), sign


def fci_ground_energy(h_mo, eri_mo, n_electrons, n_roots=1):
    """Lowest eigenvalue(s) of the N-electron sector (electronic part only)."""
    n_spatial = h_mo.shape[0]
    n_spin = 2 * n_spatial
    dets = sorted(sum(1 << p for p in occ)
                  for occ in combinations(range(n_spin), n_electrons))
    index = {d: i for i, d in enumerate(dets)}
    dim = len(dets)
    ham = np.zeros((dim, dim))

    for col, ket in enumerate(dets):
        occ = [p for p in range(n_spin) if ket >> p & 1]
        # one-body sum_pq h_pq a_p^+ a_q (spin-diagonal)
        for q in occ:
            half, s1 = _annihilate(ket, q)
            for p in range(q % 2, n_spin, 2):
                out = _create(half, p)
                if out is None:
                    continue
                bra, s2 = out
                ham[index[bra], col] += h_mo[p // 2, q // 2] * s1 * s2
        # two-body 1/4 sum <pq||rs> a_p^+ a_q^+ a_s a_r
        for r_idx in range(len(occ)):
            for s_idx in range(len(occ)):
                if r_idx == s_idx:
                    continue
                r, s = occ[r_idx], occ[s_idx]
                t1, sg1 = _annihilate(ket, r)
                mid = _annihilate(t1, s)
                if mid is None:
                    continue
                t2, sg2 = mid
                for q in range(n_spin):
                    made_q = _create(t2, q)
                    if made_q is None:
                        continue
                    t3, sg3 = made_q
                    for p in range(n_spin):
                        made_p = _create(t3, p)
                        if made_p is None:
                            continue
                        bra, sg4 = made_p
                        val = _spin_eri(eri_mo, p, q, r, s)
                        if val != 0.0:
                            ham[index[bra], col] += 0.25 * val * sg1 * sg2 * sg3 * sg4
    vals = np.linalg.eigvalsh(ham)
    return vals[:n_roots], dim


def hf_determinant_energy(h_mo, eri_mo, n_electrons):
    """<HF|H|HF> for the aufbau determinant (electronic part only)."""
    n_occ = n_electrons // 2
    e = 2.0 * sum(h_mo[i, i] for i in range(n_occ))
    for i in range(n_occ):
        for j in range(n_occ):
            e += 2.0 * eri_mo[i, i, j, j] - eri_mo[i, j, j, i]
    return float(e)
