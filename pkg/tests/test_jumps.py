import numpy as np
import pytest

from lgsp import basis, filters, integrals, jumps
from lgsp.errors import SectorError
from conftest import random_hermitian


def _two_level_eig():
    h = np.diag([0.0, 1.0])
    return integrals.EigenSystem(*np.linalg.eigh(h))


def test_coupling_counts():
    bF = basis.enumerate_basis(2)
    b2 = basis.enumerate_basis(2, 2)
    assert len(jumps.build_coupling_set("type1", 2, 2, bF)) == 8      # 4L
    assert len(jumps.build_coupling_set("type2", 2, 2, b2)) == 16     # 4L^2
    assert len(jumps.build_coupling_set("s1", 2, 2, bF, r=1)) == 8    # 8r
    assert len(jumps.build_coupling_set("s2", 2, 2, b2, r=1)) == 16   # 16r^2
    assert len(jumps.build_coupling_set("t2", 2, 2, b2, r=1)) == 8    # 2(2r-1)*4


def test_type2_identity_rotation_is_raw_pairs():
    b = basis.enumerate_basis(1, 1)
    cs = jumps.build_coupling_set("type2", 1, 1, b)
    assert len(cs) == 4
    raw = basis.build_operator_matrix([(1, "+"), (2, "-")], b).dense()
    idx = cs.labels.index("a†[1α]a[1β]")
    assert np.array_equal(cs.matrices[idx].dense(), raw)


def test_fermi_window_bounds():
    assert list(jumps.fermi_window(2, 2, 1)) == [1, 2]
    assert list(jumps.fermi_window(6, 6, 2)) == [2, 3, 4, 5]
    with pytest.raises(ValueError):
        jumps.fermi_window(2, 2, 2)  # window would leave 1..L


def test_type1_rejected_on_fixed_number_basis():
    b = basis.enumerate_basis(2, 2)
    with pytest.raises(SectorError):
        jumps.build_coupling_set("type1", 2, 2, b)


def test_nonunitary_rotation_rejected():
    b = basis.enumerate_basis(1)
    with pytest.raises(ValueError):
        jumps.build_coupling_set("type1", 1, 2, b, rotation=np.diag([1.0, 2.0]))


def test_type2_couplings_commute_with_number(h2_fock_space):
    bF, _, _ = h2_fock_space
    n_tot = basis.number_operator(bF).dense()
    rot = np.linalg.qr(random_hermitian(4, 3) + 2j * random_hermitian(4, 5))[0]
    cs = jumps.build_coupling_set("type2", 2, 2, bF, rotation=rot)
    for op in cs.matrices:
        dense = op.dense()
        assert np.max(np.abs(dense @ n_tot - n_tot @ dense)) <= 1e-12


def test_two_level_exact_jump_is_lowering_projector():
    eig = _two_level_eig()
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    k = jumps.jump_exact(eig, sx, filters.IdealFilter(1.0)).matrix
    expected = np.outer(eig.vectors[:, 0], eig.vectors[:, 1])
    assert np.allclose(k, expected, atol=1e-14)


def test_identity_coupling_filters_to_zero():
    eig = _two_level_eig()
    k = jumps.jump_exact(eig, np.eye(2), filters.IdealFilter(1.0)).matrix
    assert np.max(np.abs(k)) == 0.0


def test_exact_jump_annihilates_ground_state(h2_fock_space):
    _, _, eig = h2_fock_space
    bF = basis.enumerate_basis(2)
    filt = filters.IdealFilter(0.04)
    for op in jumps.build_coupling_set("type1", 2, 2, bF).matrices:
        k = jumps.jump_exact(eig, op, filt).matrix
        assert np.linalg.norm(k @ eig.ground_state) <= 1e-12


def test_strict_energy_ordering_with_ideal_filter(h2_fock_space):
    _, _, eig = h2_fock_space
    bF = basis.enumerate_basis(2)
    filt = filters.IdealFilter(0.04)
    omega = eig.values[:, None] - eig.values[None, :]
    assert np.all(filt.freq(omega)[omega >= 0] == 0.0)
    op = jumps.build_coupling_set("type1", 2, 2, bF).matrices[2]
    k = jumps.jump_exact(eig, op, filt).matrix
    k_eig = eig.vectors.conj().T @ k @ eig.vectors
    assert np.max(np.abs(k_eig[omega >= 0])) <= 1e-13


def test_erf_ground_state_leakage_bounded():
    # eigenbasis-offdiagonal coupling (no ground-state expectation) on a
    # spectrum separated beyond the filter edge: leakage <= f(gap) tail
    h = np.diag([0.0, 1.0, 1.5])
    eig = integrals.EigenSystem(*np.linalg.eigh(h))
    params = filters.FilterParams(a=4.0, b=0.3, delta_a=0.8, delta_b=0.3)
    rng = np.random.default_rng(0)
    a_op = rng.standard_normal((3, 3))
    np.fill_diagonal(a_op, 0.0)
    k = jumps.jump_exact(eig, a_op, params).matrix
    leak = np.linalg.norm(k @ eig.vectors[:, 0])
    tail = filters.filter_freq(1.0, params) * np.linalg.norm(a_op, 2) * np.sqrt(3)
    assert leak <= tail
    assert leak <= 1e-4


def test_incomplete_eigendecomposition_rejected(h2_fock_space):
    _, ham, _ = h2_fock_space
    partial = ham.eigensystem(k=4)
    with pytest.raises(ValueError):
        jumps.jump_exact(partial, np.eye(16), filters.IdealFilter(0.1))


def test_zero_coupling_gives_zero_quadrature_jump(h2_fock_space):
    _, ham, _ = h2_fock_space
    params, grid = filters.default_filter_params(ham.norm2(), ham.eigensystem().gap)
    k = jumps.jump_quadrature(ham, np.zeros((16, 16)), params, grid).matrix
    assert np.max(np.abs(k)) == 0.0


def test_quadrature_matches_exact_within_tolerance(h2_fock_space):
    bF, ham, eig = h2_fock_space
    params, grid = filters.default_filter_params(ham.norm2(), eig.gap)
    cs = jumps.build_coupling_set("type1", 2, 2, bF)
    for op in cs.matrices:
        kq = jumps.jump_quadrature(ham, op, params, grid).matrix
        ke = jumps.jump_exact(eig, op, params).matrix
        rel = np.linalg.norm(kq - ke, "fro") / np.linalg.norm(ke, "fro")
        assert rel <= 1e-2


def test_quadrature_refinement_monotone(h2_fock_space):
    bF, ham, eig = h2_fock_space
    params, grid = filters.default_filter_params(ham.norm2(), eig.gap)
    op = jumps.build_coupling_set("type1", 2, 2, bF).matrices[0]
    ke = jumps.jump_exact(eig, op, params).matrix
    errors = []
    for m in (max(grid.m // 4, 2), grid.m // 2, grid.m):
        kq = jumps.jump_quadrature(ham, op, params, filters.QuadratureGrid(grid.s_max, m)).matrix
        errors.append(np.linalg.norm(kq - ke, "fro") / np.linalg.norm(ke, "fro"))
    assert errors[0] > errors[1] > errors[2]


def test_channel_gauge_covariance(h2_fock_space):
    """Mixing the coupling set by a unitary leaves the channel action invariant."""
    bF, _, eig = h2_fock_space
    filt = filters.IdealFilter(0.04)
    cs = jumps.build_coupling_set("type1", 2, 2, bF)
    ks = [jumps.jump_exact(eig, op, filt).matrix for op in cs.matrices]
    u = np.linalg.qr(random_hermitian(len(ks), 11) + 1j * random_hermitian(len(ks), 13))[0]
    mixed = [sum(u[j, k] * ks[j] for j in range(len(ks))) for k in range(len(ks))]
    rho = random_hermitian(16, 21)
    sum_kdagk = sum(k.conj().T @ k for k in ks)
    sum_kdagk_mixed = sum(k.conj().T @ k for k in mixed)
    assert np.max(np.abs(sum_kdagk - sum_kdagk_mixed)) <= 1e-10
    act = sum(k @ rho @ k.conj().T for k in ks)
    act_mixed = sum(k @ rho @ k.conj().T for k in mixed)
    assert np.max(np.abs(act - act_mixed)) <= 1e-10


def test_provenance_recorded(h2_fock_space):
    bF, ham, eig = h2_fock_space
    params, grid = filters.default_filter_params(ham.norm2(), eig.gap)
    op = jumps.build_coupling_set("type1", 2, 2, bF).matrices[0]
    assert jumps.jump_exact(eig, op, params, "x").provenance == "exact-eigenbasis"
    assert jumps.jump_quadrature(ham, op, params, grid, "x").provenance == "quadrature"
