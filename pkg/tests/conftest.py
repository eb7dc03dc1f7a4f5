import json
from pathlib import Path

import numpy as np
import pytest

from lgsp import basis, integrals

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def h2_ints():
    return integrals.parse_fcidump((FIXTURES / "h2" / "fcidump").read_text())


@pytest.fixture(scope="session")
def h2_reference():
    return json.loads((FIXTURES / "h2" / "reference.json").read_text())


@pytest.fixture(scope="session")
def h2_fock_space(h2_ints):
    """(basis, HamiltonianMatrix, EigenSystem) of H2/STO-3G on the Fock space."""
    b = basis.enumerate_basis(h2_ints.L)
    ham = integrals.assemble_hamiltonian(h2_ints, b)
    return b, ham, ham.eigensystem()


@pytest.fixture(scope="session")
def h4_fock_model():
    from lgsp import quasifree
    mat = integrals.parse_fock_matrix((FIXTURES / "h4_square" / "fock.txt").read_text())
    return quasifree.FockModel(mat, 4)


def random_hermitian(n, seed, complex_entries=True):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    if complex_entries:
        a = a + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


def random_rdm(n, seed):
    """Hermitian matrix with eigenvalues strictly inside (0, 1)."""
    h = random_hermitian(n, seed)
    vals, vecs = np.linalg.eigh(h)
    occ = 1.0 / (1.0 + np.exp(-vals))
    return vecs @ np.diag(occ) @ vecs.conj().T
