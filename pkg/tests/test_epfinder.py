import numpy as np
import pytest

from kickedtop.cubic import DIABOLIC, EXCEPTIONAL, ep_locations_J1
from kickedtop.epfinder import (
    chordal, classify_ep, direct_discriminant, discriminant_poly, discriminant_roots,
    ep_trajectory, find_eps,
)
from kickedtop.exceptions import SingularParameterError
from kickedtop.floquet import char_poly_affine_split
from kickedtop.spin import KickVector, TopConfig

A = 17 + 12 * np.sqrt(2)


def finite(recs):
    return np.array([r.Lambda for r in recs if not r.at_infinity and r.Lambda != 0])


def match_error(a, b):
    a, b = np.asarray(a), np.asarray(b)
    assert a.size == b.size
    return max(np.min(np.abs(a - x)) / max(1.0, abs(x)) for x in b)


def test_discriminant_poly_interpolates(rng):
    cfg = TopConfig(1.5, 1.3)
    dp = discriminant_poly(cfg)
    g, h = char_poly_affine_split(cfg)
    for w in rng.normal(size=5) + 1j * rng.normal(size=5):
        exact = direct_discriminant(g, h, w)
        assert abs(dp(w) - exact) <= 1e-8 * max(1.0, abs(exact))
    assert dp.max_holdout_error <= 1e-8


def test_discriminant_identically_zero():
    with pytest.raises(SingularParameterError):
        discriminant_poly(TopConfig(1, 0.0))


@pytest.mark.parametrize("omega", [np.pi / 6, np.pi / 3, 1.0, 2.0, 5 * np.pi / 6])
def test_matches_closed_form(omega):
    found = finite(find_eps(TopConfig(1, omega), monodromy=False))
    exact = [r.Lambda for r in ep_locations_J1(omega)]
    assert match_error(found, exact) <= 1e-8


def test_pi_case_kinds():
    recs = find_eps(TopConfig(1, np.pi), monodromy=True)
    by_pos = {round(r.Lambda.real, 6): r for r in recs}
    assert by_pos[1.0].kind == DIABOLIC
    ep = by_pos[round(-1 / A, 6)]
    assert ep.kind == EXCEPTIONAL and ep.order == 2
    assert abs(ep.Lambda + 1 / A) <= 1e-8
    assert ep.monodromy.nontrivial_cycles and abs(ep.monodromy.puiseux_exponent - 0.5) <= 0.15


def test_triple_point_at_origin():
    recs = find_eps(TopConfig(1, 2 * np.pi / 3))
    assert [(r.Lambda == 0, r.at_infinity, r.order) for r in recs] == [(True, False, 3), (False, True, 3)]
    for r in recs:
        assert r.monodromy.longest_cycle == 3
        assert abs(r.monodromy.puiseux_exponent - 1 / 3) <= 0.15


@pytest.mark.parametrize("J, omega", [(1.5, 1.0), (2, 0.7), (2.5, 2.2)])
def test_reciprocal_and_conjugate_symmetry(J, omega):
    L = finite(find_eps(TopConfig(J, omega), monodromy=False))
    assert L.size > 0
    assert match_error(1 / L, L) <= 1e-7
    assert match_error(np.conj(L), L) <= 1e-7


@pytest.mark.parametrize("J, omega", [(1.5, 1.0), (2, 0.7)])
def test_reflection_symmetry(J, omega):
    a = finite(find_eps(TopConfig(J, omega), monodromy=False))
    b = finite(find_eps(TopConfig(J, 2 * np.pi - omega), monodromy=False))
    assert match_error(a, b) <= 1e-8


@pytest.mark.parametrize("J", [1, 1.5, 2])
def test_solvable_omega_only_origin_and_infinity(J):
    d = int(2 * J + 1)
    recs = find_eps(TopConfig(J, 2 * np.pi / d), monodromy=False)
    assert len(recs) == 2
    assert {r.order for r in recs} == {d}
    assert finite(recs).size == 0


def test_discriminant_roots_degree_bookkeeping():
    dp = discriminant_poly(TopConfig(1.5, np.pi / 2))
    roots, n_zero, n_inf = discriminant_roots(dp)
    assert roots == [] and n_zero == 3 and n_inf == 3


def test_classify_diabolic_triple():
    rec = classify_ep(TopConfig(1, 0.0), 1.0)
    assert rec.kind == DIABOLIC and rec.order == 3
    assert list(rec.monodromy.permutation) == [0, 1, 2]


def test_classify_generic_point_is_trivial():
    rec = classify_ep(TopConfig(1, 1.0), 0.5 + 0.5j, monodromy=False)
    assert rec.order == 1


def test_nonuniform_kick_eps_are_degenerate():
    kick = KickVector.normalized([1, 0.5j, 2, 1 - 1j])
    cfg = TopConfig(1.5, 1.1, kick)
    recs = find_eps(cfg, monodromy=False)
    g, h = char_poly_affine_split(cfg)
    for L in finite(recs):
        assert abs(direct_discriminant(g, h, 1 / L)) <= 1e-6 * max(1, abs(1 / L)) ** 6


def test_chordal():
    assert chordal(np.inf, np.inf) == 0
    assert abs(chordal(0, np.inf) - 1) <= 1e-15
    assert abs(chordal(1, -1) - 1) <= 1e-15
    assert abs(chordal(2, 3) - chordal(0.5, 1 / 3)) <= 1e-15


def test_trajectory_links_and_merge():
    grid = np.linspace(2 * np.pi / 3 - 0.3, 2 * np.pi / 3 + 0.3, 7)
    traj = ep_trajectory(TopConfig(1, 1.0), grid)
    assert not traj.failures
    assert traj.links
    assert any(abs(m["omega"] - 2 * np.pi / 3) < 1e-9 for m in traj.merge_events)


def test_trajectory_records_failures():
    grid = np.array([0.0, 0.5])
    traj = ep_trajectory(TopConfig(1, 0.5), grid)
    assert list(traj.failures) == [0]
    assert traj.records[0] == [] and len(traj.records[1]) == 4
