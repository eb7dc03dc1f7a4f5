import itertools

import numpy as np
import pytest

from lgsp import basis
from lgsp.errors import CapacityError, SectorError


def test_fock_dimension_h2_sized():
    assert basis.enumerate_basis(2).dim == 16


def test_fixed_number_dimension_h4_sized():
    assert basis.enumerate_basis(4, 4).dim == 70


def test_vacuum_sector_is_single_determinant():
    b = basis.enumerate_basis(1, 0)
    assert b.dim == 1
    assert b.dets == (0,)


def test_enumeration_is_deterministic_and_sorted():
    b1 = basis.enumerate_basis(3, 2)
    b2 = basis.enumerate_basis(3, 2)
    assert b1.dets == b2.dets
    assert list(b1.dets) == sorted(b1.dets)


def test_capacity_cap():
    with pytest.raises(CapacityError):
        basis.enumerate_basis(3, max_dets=10)


def test_capacity_env_override(monkeypatch):
    monkeypatch.setenv("LGSP_MAX_DIM", "8")
    with pytest.raises(CapacityError):
        basis.enumerate_basis(2)


def test_orbital_count_bounds():
    with pytest.raises(ValueError):
        basis.enumerate_basis(0)
    with pytest.raises(ValueError):
        basis.enumerate_basis(2, 5)


def test_create_above_two_occupied_has_plus_sign():
    det = basis.Determinant(0b011, 2)  # orbitals 1, 2 occupied
    new, sign = basis.ladder_action(det, 3, "create")
    assert new.occupied() == (1, 2, 3)
    assert sign == 1


def test_create_with_one_occupied_below_flips_sign():
    det = basis.Determinant(0b001, 2)
    new, sign = basis.ladder_action(det, 2, "create")
    assert new.occupied() == (1, 2)
    assert sign == -1


def test_annihilate_vacuum_gives_nothing():
    det = basis.Determinant(0, 1)
    assert basis.ladder_action(det, 1, "annihilate") is None


def test_double_create_gives_nothing():
    det = basis.Determinant(0b100, 2)
    assert basis.ladder_action(det, 3, "create") is None


def test_index_out_of_range():
    det = basis.Determinant(0, 2)
    with pytest.raises(ValueError):
        basis.ladder_action(det, 5, "create")


@pytest.mark.parametrize("L", [1, 2, 3])
def test_canonical_anticommutation_relations(L):
    """{a_p, a_q^+} = delta_pq, {a_p, a_q} = 0, exactly, on the Fock basis."""
    b = basis.enumerate_basis(L)
    n = 2 * L
    eye = np.eye(b.dim)
    ann = [basis.build_operator_matrix([(p, "-")], b).dense() for p in range(1, n + 1)]
    cre = [basis.build_operator_matrix([(p, "+")], b).dense() for p in range(1, n + 1)]
    for p, q in itertools.product(range(n), repeat=2):
        mixed = ann[p] @ cre[q] + cre[q] @ ann[p]
        target = eye if p == q else 0 * eye
        assert np.array_equal(mixed, target)
        same = ann[p] @ ann[q] + ann[q] @ ann[p]
        assert np.array_equal(same, np.zeros_like(same))


def test_ladder_squares_vanish():
    b = basis.enumerate_basis(2)
    for p in range(1, 5):
        a = basis.build_operator_matrix([(p, "-")], b).dense()
        c = basis.build_operator_matrix([(p, "+")], b).dense()
        assert not (a @ a).any()
        assert not (c @ c).any()


def test_number_operator_is_bit_diagonal():
    b = basis.enumerate_basis(1)
    n1 = basis.build_operator_matrix([(1, "+"), (1, "-")], b).dense()
    expected = np.diag([float(bits & 1) for bits in b.dets])
    assert np.array_equal(n1, expected)


def test_single_particle_hopping_matrix():
    # a_1^+ a_2 on the one-electron sector maps |orbital 2> to |orbital 1>
    b = basis.enumerate_basis(2, 1)
    mat = basis.build_operator_matrix([(1, "+"), (2, "-")], b).dense()
    expected = np.zeros((4, 4))
    expected[b.position(0b0001), b.position(0b0010)] = 1.0
    assert np.array_equal(mat, expected)


def test_number_preserving_string_commutes_with_total_number():
    b = basis.enumerate_basis(3)
    n_tot = basis.number_operator(b).dense()
    for string in ([(1, "+"), (4, "-")], [(2, "+"), (3, "+"), (5, "-"), (1, "-")]):
        mat = basis.build_operator_matrix(string, b).dense()
        assert np.array_equal(mat @ n_tot, n_tot @ mat)


def test_number_violating_string_rejected_on_sector():
    b = basis.enumerate_basis(2, 2)
    with pytest.raises(SectorError):
        basis.build_operator_matrix([(1, "+")], b)


def test_operator_entries_have_unit_magnitude_signs():
    b = basis.enumerate_basis(3)
    mat = basis.build_operator_matrix([(2, "+"), (5, "-")], b).matrix
    assert set(np.abs(mat.data)) <= {1.0}


def test_spin_orbital_index_convention():
    assert basis.spin_orbital_index(1, "alpha") == 1
    assert basis.spin_orbital_index(1, "beta") == 2
    assert basis.spin_orbital_index(3, "a") == 5
