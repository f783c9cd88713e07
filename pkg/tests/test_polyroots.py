import numpy as np
import pytest

from kickedtop.polyroots import (
    aberth_roots, discriminant, horner, poly_from_roots, polyder, resultant, sylvester_matrix,
    trim_leading,
)


def test_horner_value_and_derivative():
    p, dp = horner([1, -3, 0, 2], 1.5)
    assert p == 1 - 4.5 + 2 * 1.5 ** 3
    assert dp == -3 + 6 * 1.5 ** 2


def test_roots_random(rng):
    for n in (2, 5, 9):
        roots = rng.normal(size=n) + 1j * rng.normal(size=n)
        found = aberth_roots(poly_from_roots(roots))
        assert max(np.min(np.abs(found - r)) for r in roots) <= 1e-10


def test_roots_with_seeds_and_multiple_root():
    c = poly_from_roots([1, 1, -2j])
    found = aberth_roots(c, seeds=[1, 1, -2j])
    assert np.sum(np.abs(found - 1) < 1e-6) == 2
    assert np.min(np.abs(found + 2j)) <= 1e-12


def test_degenerate_inputs():
    assert aberth_roots([5.0]).size == 0
    assert np.allclose(aberth_roots([2.0, 4.0, 0.0]), [-0.5])
    assert trim_leading([1, 2, 0, 0]).size == 2


def test_polyder():
    assert np.allclose(polyder([1, 2, 3]), [2, 6])
    assert np.allclose(polyder([7]), [0])


def test_sylvester_and_resultant():
    # x^2 - 1 and x - 1 share a root
    assert sylvester_matrix([1, 0, -1], [1, -1]).shape == (3, 3)
    assert abs(resultant([1, 0, -1], [1, -1])) <= 1e-14
    # |Res(x - a, x - b)| = |a - b|
    assert abs(abs(resultant([1, -2.0], [1, -5.0])) - 3) <= 1e-12


@pytest.mark.parametrize("roots", [[1, 2, 4], [1j, -1j, 3, 0.5]])
def test_discriminant_matches_root_product(roots):
    c = poly_from_roots(roots)
    r = np.asarray(roots, dtype=complex)
    expected = np.prod([(r[i] - r[j]) ** 2 for i in range(r.size) for j in range(i + 1, r.size)])
    assert abs(discriminant(c) - expected) <= 1e-9 * abs(expected)
