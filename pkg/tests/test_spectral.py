import numpy as np
import pytest

from kickedtop.exceptions import PreconditionError
from kickedtop.floquet import build_floquet, char_poly
from kickedtop.polyroots import horner
from kickedtop.spectral import (
    eigendecompose, quasienergies_ordered, quasienergy, solvable_eigensystem, spectrum,
)
from kickedtop.spin import TopConfig, fourier_site_basis

EP_D1 = -1 / (17 + 12 * np.sqrt(2))


def nearest_error(a, b):
    return max(np.min(np.abs(a - x)) for x in b)


def test_solvable_d3_eigenvalues():
    cfg = TopConfig(1, 2 * np.pi / 3)
    lam = 0.8
    dec = spectrum(cfg, np.exp(1j * lam))
    target = np.exp(-1j * (2 * np.pi * np.array([-1, 0, 1]) + lam) / 3)
    assert nearest_error(dec.eigenvalues, target) <= 1e-12


def test_lambda_one_standard_basis():
    cfg = TopConfig(1, 0.9)
    dec = spectrum(cfg, 1.0)
    for n in range(3):
        v = dec.right_vecs[:, n]
        k = np.argmax(np.abs(v))
        assert abs(dec.eigenvalues[n] - np.exp(-0.9j * cfg.J.m_values()[k])) <= 1e-12
        assert abs(abs(v[k]) - 1) <= 1e-12


def test_residual_and_biorthonormality(rng):
    cfg = TopConfig(1.5, 1.7)
    for L in (0.6 + 0.3j, 2.0, np.exp(0.3j)):
        dec = spectrum(cfg, L)
        U = build_floquet(cfg, L).entries
        assert not dec.defective
        R, Lv = dec.right_vecs, dec.left_vecs
        assert np.max(np.abs(U @ R - R * dec.eigenvalues)) <= 1e-10
        assert np.max(np.abs(Lv @ R - np.eye(cfg.d))) <= 1e-8


def test_defect_flag_near_ep():
    dec = spectrum(TopConfig(1, np.pi), EP_D1 + 1e-9)
    assert dec.defective
    assert np.max(dec.defect_indicator) > 0.5


def test_unit_circle_iff_unimodular(rng):
    cfg = TopConfig(2, 0.4)
    on = spectrum(cfg, np.exp(2.1j)).eigenvalues
    assert np.max(np.abs(np.abs(on) - 1)) <= 1e-10
    off = spectrum(cfg, 0.5 * np.exp(2.1j)).eigenvalues
    assert np.max(np.abs(np.abs(off) - 1)) > 1e-3


def test_product_of_eigenvalues(rng):
    cfg = TopConfig(1.5, 2.2)
    for L in (0.3 - 0.2j, 1.7j):
        dec = spectrum(cfg, L)
        p = char_poly(build_floquet(cfg, L))
        assert abs(np.prod(dec.eigenvalues) - (-1) ** cfg.d * p[0]) <= 1e-9
        assert np.max(np.abs([horner(p, z)[0] for z in dec.eigenvalues])) <= 1e-8


@pytest.mark.parametrize("omega", [0.4, 1.3, 2.9])
def test_half_spin_quasienergies(omega):
    q = quasienergies_ordered(spectrum(TopConfig(0.5, omega), 1.0))
    assert q.real
    assert np.allclose(q.energies, [omega / 2, 2 * np.pi - omega / 2], atol=1e-12)


def test_spin_one_ordering_below_pi():
    omega = 1.1
    dec = spectrum(TopConfig(1, omega), 1.0)
    q = quasienergies_ordered(dec)
    assert np.allclose(q.energies, [0, omega, 2 * np.pi - omega], atol=1e-12)
    M = TopConfig(1, omega).J.m_values()
    labels = [M[np.argmax(np.abs(dec.right_vecs[:, k]))] for k in q.order]
    assert labels == [0, 1, -1]


def test_spin_one_ordering_above_pi():
    omega = 4.0
    dec = spectrum(TopConfig(1, omega), 1.0)
    q = quasienergies_ordered(dec)
    assert np.allclose(q.energies, [0, 2 * np.pi - omega, omega], atol=1e-12)
    M = TopConfig(1, omega).J.m_values()
    assert [M[np.argmax(np.abs(dec.right_vecs[:, k]))] for k in q.order] == [0, -1, 1]


def test_complex_lambda_flagged():
    q = quasienergies_ordered(spectrum(TopConfig(1, 1.0), 0.5))
    assert not q.real


def test_quasienergy_window():
    E = quasienergy(np.exp(-1j * np.array([0.0, -1e-15, 1.0, 2 * np.pi - 1e-3])))
    assert np.all((E >= 0) & (E < 2 * np.pi))
    assert E[0] == 0 and E[1] == 0


def test_closed_form_examples():
    cfg = TopConfig(1, 2 * np.pi / 3)
    z, E, _, _ = solvable_eigensystem(cfg, 1.0, 0)
    assert abs(z - 1) <= 1e-15 and abs(E) <= 1e-15
    _, E, _, _ = solvable_eigensystem(cfg, -1.0, 1)
    assert abs(E - np.pi) <= 1e-12


def test_closed_form_site_components():
    cfg = TopConfig(1.5, np.pi / 2)
    lam = 0.3 - 0.7j
    z, _, right, left = solvable_eigensystem(cfg, np.exp(1j * lam), -0.5)
    m = np.arange(4)
    # integer-step components follow z^m / sqrt(d) up to the half-integer wrap sign
    assert np.allclose(np.abs(right), np.abs(z ** m) / 2, atol=1e-14)
    assert abs(left @ right - 1) <= 1e-14


def test_closed_form_biorthonormal(rng):
    cfg = TopConfig(1.5, np.pi / 2)
    L = np.exp(1j * complex(rng.normal(), rng.normal()))
    Ms = cfg.J.m_values()
    R = np.array([solvable_eigensystem(cfg, L, M)[2] for M in Ms]).T
    Lv = np.array([solvable_eigensystem(cfg, L, M)[3] for M in Ms])
    assert np.max(np.abs(Lv @ R - np.eye(4))) <= 1e-12


@pytest.mark.parametrize("J, r", [(1, 1), (1.5, 1), (2, 1), (2, 3), (2.5, 1)])
def test_closed_form_matches_numerics(J, r, rng):
    d = int(2 * J + 1)
    cfg = TopConfig(J, 2 * np.pi * r / d)
    for L in (np.exp(0.37j), 0.4 + 0.9j):
        dec = spectrum(cfg, L)
        z = [solvable_eigensystem(cfg, L, M)[0] for M in cfg.J.m_values()]
        assert nearest_error(dec.eigenvalues, z) <= 1e-9
        B = fourier_site_basis(J)
        U = build_floquet(cfg, L).entries
        for M in cfg.J.m_values():
            zM, _, right, _ = solvable_eigensystem(cfg, L, M)
            v = B @ right
            assert np.max(np.abs(U @ v - zM * v)) <= 1e-10


def test_lambda_zero_eigenvectors_align_with_spin_states():
    cfg = TopConfig(1, 2 * np.pi / 3)
    B = fourier_site_basis(1)
    M = cfg.J.m_values()
    for k, Mk in enumerate(M):
        _, _, right, _ = solvable_eigensystem(cfg, 1.0, Mk)
        overlaps = np.abs(B @ right)
        assert np.allclose(overlaps, np.eye(3)[k], atol=1e-12)


def test_closed_form_rejects_unsolvable():
    with pytest.raises(PreconditionError):
        solvable_eigensystem(TopConfig(1, 1.0), 1.0, 0)
    with pytest.raises(PreconditionError):
        solvable_eigensystem(TopConfig(1, 2 * np.pi / 3), 1.0, 0.5)


def test_tie_breaking_by_previous_vectors():
    cfg = TopConfig(1, 0.0)
    dec = eigendecompose(build_floquet(cfg, 1.0))
    prev = dec.right_vecs[:, ::-1]
    q = quasienergies_ordered(dec, previous=prev)
    assert list(q.order) == [2, 1, 0]
