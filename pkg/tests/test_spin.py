import numpy as np
import pytest

from kickedtop.exceptions import PreconditionError, UnsupportedCaseError
from kickedtop.spin import (
    HalfInt, KickVector, TopConfig, build_jy, build_jz, fourier_site_basis, multipole_projector,
    uniform_kick,
)


@pytest.mark.parametrize("J, diag", [(0.5, [-0.5, 0.5]), (1, [-1, 0, 1]), (1.5, [-1.5, -0.5, 0.5, 1.5])])
def test_jz_diagonal(J, diag):
    assert np.array_equal(build_jz(J), np.diag(diag))


def test_halfint_exact():
    J = HalfInt.from_value(1.5)
    assert J.twice_value == 3 and J.d == 4 and not J.is_integer
    assert str(J) == "3/2" and str(HalfInt(4)) == "2"
    with pytest.raises(PreconditionError):
        HalfInt.from_value(0.25)
    with pytest.raises(PreconditionError):
        HalfInt(0)


@pytest.mark.parametrize("J", [0.5, 1, 3.5])
def test_uniform_kick(J):
    v = uniform_kick(J)
    assert np.allclose(v.coeffs, 1 / np.sqrt(int(2 * J + 1)))
    assert abs(np.sum(np.abs(v.coeffs) ** 2) - 1) <= 1e-12


def test_kick_vector_validation():
    with pytest.raises(PreconditionError):
        KickVector([1.0, 1.0])
    with pytest.raises(PreconditionError):
        KickVector.normalized([0, 0])
    v = KickVector.normalized([1, 2j, 0])
    assert not v.has_full_support()
    with pytest.raises(PreconditionError):
        TopConfig(1, 0.3, KickVector.normalized([1, 1]))


def test_jy_hermitian_spectrum():
    jy = build_jy(1.5)
    assert np.allclose(jy, jy.conj().T)
    assert np.allclose(np.linalg.eigvalsh(jy), [-1.5, -0.5, 0.5, 1.5])


@pytest.mark.parametrize("J", [0.5, 1, 1.5])
def test_multipole_projector_is_rank_one_projector(J):
    P = multipole_projector(J)
    assert np.linalg.norm(P @ P - P) <= 1e-12
    assert np.linalg.norm(P - P.conj().T) <= 1e-12
    assert abs(np.trace(P) - 1) <= 1e-12


def test_multipole_projector_targets_top_jy_state():
    jy = build_jy(1)
    w, V = np.linalg.eigh(jy)
    P = multipole_projector(1)
    assert np.allclose(np.diag(V.conj().T @ P @ V).real, [0, 0, 1], atol=1e-12)


def test_multipole_projector_unsupported():
    with pytest.raises(UnsupportedCaseError):
        multipole_projector(2)


def test_site_basis_column_zero_is_uniform_kick():
    for J in (0.5, 1, 2.5):
        assert np.allclose(fourier_site_basis(J)[:, 0], uniform_kick(J).coeffs, atol=1e-15)


def test_site_basis_d2_up_to_phase():
    B = fourier_site_basis(0.5)
    # rows M = -1/2, +1/2 pick up conjugate phases on the m = 1 column
    assert np.allclose(np.abs(B), np.full((2, 2), 1 / np.sqrt(2)))
    assert np.allclose(B[:, 1], np.array([-1j, 1j]) / np.sqrt(2))


@pytest.mark.parametrize("J", [0.5, 1.5, 3])
def test_site_basis_unitary_and_round_trip(J):
    B = fourier_site_basis(J)
    G = B.conj().T @ B
    assert np.max(np.abs(G - np.eye(B.shape[0]))) <= 1e-12
    Jz = build_jz(J)
    assert np.max(np.abs(B.conj().T @ (B @ Jz @ B.conj().T) @ B - Jz)) <= 1e-12
