"""Acceptance criteria 1-9, each printing one PASS/FAIL line."""
import time
from fractions import Fraction

import numpy as np
import pytest

from kickedtop.cli import _mu_grid
from kickedtop.cubic import discriminant_quartic, eval_descending, resultant_Dq
from kickedtop.epfinder import discriminant_poly, discriminant_roots, ep_trajectory, find_eps
from kickedtop.floquet import build_floquet, char_poly_affine_split
from kickedtop.holonomy import check_nonresonance, sweep_cycle
from kickedtop.polyroots import discriminant
from kickedtop.riemann import cycle_monodromy, emulation_suite, lasso, template_C
from kickedtop.spectral import spectrum
from kickedtop.spin import TopConfig

A = 17 + 12 * np.sqrt(2)


@pytest.fixture
def report(capsys):
    def _report(n, name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'}: {name} {detail}".rstrip())
        assert ok, f"criterion {n} failed: {detail}"
    return _report


def inner_finite(recs):
    return [r for r in recs if not r.at_infinity and abs(r.Lambda) < 1]


def test_criterion_1_solvable_exactness(report):
    t0 = time.perf_counter()
    worst_z = worst_slope = 0.0
    for J, omega in [(1, 2 * np.pi / 3), (1.5, np.pi / 2), (2.5, 2 * np.pi / 6)]:
        cfg = TopConfig(J, omega)
        d = cfg.d
        M = cfg.J.m_values()
        for lam in 2 * np.pi * np.arange(32) / 32:
            z = spectrum(cfg, np.exp(1j * lam)).eigenvalues
            target = np.exp(-1j * (2 * np.pi * M + lam) / d)
            worst_z = max(worst_z, max(np.min(np.abs(z - t)) for t in target))
        res = sweep_cycle(cfg)
        for b in range(d):
            slope, icpt = np.polyfit(res.lambda_grid, res.energies[:, b], 1)
            resid = np.max(np.abs(res.energies[:, b] - slope * res.lambda_grid - icpt))
            worst_slope = max(worst_slope, abs(slope - 1 / d), resid)
    dt = time.perf_counter() - t0
    ok = worst_z <= 1e-9 and worst_slope <= 1e-9 and dt < 5
    report(1, "solvable-case exactness", ok,
           f"(max |dz|={worst_z:.1e}, affine dev={worst_slope:.1e}, {dt:.1f}s)")


def _random_nonresonant(rng, d, n):
    out = []
    while len(out) < n:
        om = rng.uniform(0, 2 * np.pi)
        # keep clear of every resonance 2 pi q / p with p < d
        if all(abs(om * p / (2 * np.pi) - round(om * p / (2 * np.pi))) > 0.02 for p in range(1, d)):
            assert not check_nonresonance(om, d).resonant
            out.append(om)
    return out


def test_criterion_2_anholonomy_permutation(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    failures = []
    for J in (0.5, 1, 1.5, 2):
        d = int(2 * J + 1)
        for om in _random_nonresonant(rng, d, 20):
            res = sweep_cycle(TopConfig(J, om))
            if not (res.is_single_cycle and res.is_cyclic_shift):
                failures.append((J, om, res.permutation.tolist()))
            if J == 1:
                expected = ({0.0: 1.0, 1.0: -1.0, -1.0: 0.0} if om < np.pi
                            else {0.0: -1.0, -1.0: 1.0, 1.0: 0.0})
                if res.itinerary != expected:
                    failures.append((J, om, res.itinerary))
    dt = time.perf_counter() - t0
    report(2, "anholonomy permutation", not failures and dt < 30,
           f"(80 sweeps, {len(failures)} failures, {dt:.1f}s)")


def test_criterion_3_ep_oracle(report):
    recs = find_eps(TopConfig(1, np.pi))
    finite = [r for r in recs if not r.at_infinity]
    errs = []
    for target in (-A, -1 / A):
        best = min(finite, key=lambda r: abs(r.Lambda - target))
        errs.append(abs(best.Lambda - target) / max(1, abs(target)))
        errs.append(0.0 if best.kind == "exceptional" and best.order == 2 else np.inf)
    dia = min(finite, key=lambda r: abs(r.Lambda - 1))
    errs.append(abs(dia.Lambda - 1) if dia.kind == "diabolic" else np.inf)
    ok = len(finite) == 3 and max(errs) <= 1e-8
    report(3, "J=1 EP oracle at omega=pi", ok, f"(max position error {max(errs):.1e})")


def test_criterion_4_resultant_identity(report):
    worst = 0.0
    min_quotient = np.inf
    zeros = []
    for mu in _mu_grid(101):
        chk = resultant_Dq(mu)
        if chk.closed_form == 0:
            worst = max(worst, 0.0 if chk.sylvester == 0 else np.inf)
        else:
            worst = max(worst, float(abs(chk.sylvester - chk.closed_form) / abs(chk.closed_form)))
        if chk.sylvester == 0:
            zeros.append(mu)
        else:
            # strip the known zero factors; what remains must stay away from 0
            min_quotient = min(min_quotient, float(abs(chk.sylvester / (mu ** 9 * (1 + mu) ** 9))))
    on_grid_zero = {Fraction(0)}
    ok = worst <= 1e-6 and set(zeros) == on_grid_zero and min_quotient > 1e-12
    # mu = -1 sits just outside the grid; check it directly
    ok = ok and resultant_Dq(Fraction(-1)).sylvester == 0
    report(4, "resultant identity", ok,
           f"(max rel error {worst:.1e}, zeros at {[str(z) for z in zeros]} and -1, "
           f"min normalized |R| {min_quotient:.2f})")


def test_criterion_5_discriminant_quartic(report):
    rng = np.random.default_rng(5)
    worst = 0.0
    symmetric = True
    for _ in range(50):
        mu = rng.uniform(-1, 1 / 3)
        omega = np.arccos(-(3 * mu + 1) / 2)
        L = np.exp(complex(rng.normal(), rng.uniform(-np.pi, np.pi)))
        g, h = char_poly_affine_split(TopConfig(1, omega))
        direct = discriminant(g + h / L)
        D = discriminant_quartic(mu)
        worst = max(worst, abs(eval_descending(D, 1 / L) - direct) / abs(direct))
        symmetric &= D[0] == D[4] and D[1] == D[3]
    for mu in (Fraction(-1, 3), Fraction(1, 7)):
        D = discriminant_quartic(mu)
        symmetric &= D[0] == D[4] and D[1] == D[3]
    report(5, "discriminant quartic", worst <= 1e-9 and symmetric,
           f"(max rel error {worst:.1e}, symmetry {'exact' if symmetric else 'broken'})")


def test_criterion_6_bifurcation(report):
    t0 = time.perf_counter()
    # omega_k = k pi / 60; k = 40 is the triple point and k = 60 is omega = pi itself
    ks = np.arange(1, 61)
    grid = ks * np.pi / 60
    traj = ep_trajectory(TopConfig(1, grid[0]), grid)
    k3 = 39
    problems = []
    for k, om in enumerate(grid):
        inner = inner_finite(traj.records[k])
        if k == k3:
            pts = [complex(r.Lambda) for r in inner]
            spread = max(abs(a - b) for a in pts for b in pts) if len(pts) > 1 else 0.0
            if max(r.order for r in inner) != 3 or spread >= 1e-3 or max(abs(p) for p in pts) >= 1e-3:
                problems.append((om, "no order-3 cluster"))
        elif k < k3:
            ok = (len(inner) == 2 and all(r.order == 2 for r in inner)
                  and all(abs(r.Lambda.imag) > 1e-9 for r in inner)
                  and abs(inner[0].Lambda - np.conj(inner[1].Lambda)) <= 1e-8)
            if not ok:
                problems.append((om, "expected a conjugate pair"))
        elif ks[k] < 60:
            ok = (len(inner) == 2 and all(r.order == 2 for r in inner)
                  and all(abs(r.Lambda.imag) <= 1e-9 for r in inner))
            if not ok:
                problems.append((om, "expected two real 2EPs"))
    merged = any(abs(m["omega"] - grid[k3]) < 1e-12 for m in traj.merge_events)
    dt = time.perf_counter() - t0
    ok = not problems and merged and not traj.failures and dt < 120
    report(6, "bifurcation reproduction", ok,
           f"(60 points, {len(problems)} mismatches, merge at {grid[k3]:.4f}: {merged}, {dt:.1f}s)")


def test_criterion_7_monodromy(report):
    problems = []
    tri = find_eps(TopConfig(1, 2 * np.pi / 3))
    origin = next(r for r in tri if r.Lambda == 0 and not r.at_infinity)
    if origin.monodromy.longest_cycle != 3:
        problems.append("3EP loop is not a 3-cycle")
    expo3 = origin.monodromy.puiseux_exponent
    if abs(expo3 - 1 / 3) > 0.15:
        problems.append(f"3EP exponent {expo3}")
    cfg = TopConfig(1, np.pi / 6)
    recs = find_eps(cfg)
    inner = inner_finite(recs)
    expos = []
    for r in inner:
        m = r.monodromy
        if [len(c) for c in m.nontrivial_cycles] != [2]:
            problems.append(f"loop at {r.Lambda} is not a transposition")
        expos.append(m.puiseux_exponent)
        if abs(m.puiseux_exponent - 0.5) > 0.15:
            problems.append(f"2EP exponent {m.puiseux_exponent}")
    rep = emulation_suite(cfg, recs)
    names = {"C'", "C1", "C2"}
    if not (names <= set(rep.matches) and all(rep.matches[n] for n in names)):
        problems.append(f"templates disagree: {rep.matches}")
    report(7, "monodromy", not problems and len(inner) == 2,
           f"(3EP exponent {expo3:.3f}, 2EP exponents {[round(e, 3) for e in expos]}, "
           f"C'/C1/C2 match C: {not problems})")


def test_criterion_8_spin_three_halves(report):
    problems = []
    cfg = TopConfig(1.5, np.pi / 2)
    _, n_zero, n_inf = discriminant_roots(discriminant_poly(cfg))
    recs = find_eps(cfg)
    finite = [r for r in recs if not r.at_infinity]
    if not (len(finite) == 1 and finite[0].Lambda == 0 and finite[0].order == 4):
        problems.append("omega=pi/2 finite degeneracies are not a single order-4 point at 0")
    # the discriminant in w = 1/Lambda has a triple root at w = 0 and degree deficit 3
    if (n_zero, n_inf) != (3, 3):
        problems.append(f"discriminant multiplicities {(n_zero, n_inf)}")
    inner = inner_finite(find_eps(TopConfig(1.5, np.pi / 8)))
    if len(inner) != 3:
        problems.append(f"{len(inner)} inner EPs at omega=pi/8")
    for r in inner:
        if r.order != 2 or [len(c) for c in r.monodromy.nontrivial_cycles] != [2]:
            problems.append(f"EP at {r.Lambda} is not a transposition 2EP")
    report(8, "higher-order EP at J=3/2", not problems, f"({'; '.join(problems) or 'all checks'})")


def test_criterion_9_property_suite(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    problems = []
    for J in (0.5, 1, 1.5, 2, 3):
        cfg = TopConfig(J, rng.uniform(0.1, 6.2))
        for lam in rng.uniform(0, 2 * np.pi, 5):
            U = build_floquet(cfg, np.exp(1j * lam)).entries
            if np.linalg.norm(U.conj().T @ U - np.eye(cfg.d)) > 1e-12:
                problems.append(f"unitarity J={J}")
        for _ in range(5):
            dec = spectrum(cfg, np.exp(complex(rng.normal(), rng.normal())))
            if not dec.defective and np.max(np.abs(dec.left_vecs @ dec.right_vecs - np.eye(cfg.d))) > 1e-8:
                problems.append(f"biorthogonality J={J}")
    for J, om in [(1, 1.0), (1.5, 2.0), (2, 0.7)]:
        L = np.array([complex(r.Lambda) for r in find_eps(TopConfig(J, om), monodromy=False)
                      if not r.at_infinity and r.Lambda != 0])
        if max(np.min(np.abs(L - 1 / x)) / max(1, abs(1 / x)) for x in L) > 1e-7:
            problems.append(f"reciprocal symmetry J={J}")
    cfg = TopConfig(1, np.pi / 6)
    eps = find_eps(cfg, monodromy=False)
    inner = [complex(r.Lambda) for r in inner_finite(eps)]
    loops = [lasso(p, 0.05, [p + 0.05 * (1 - p) / abs(1 - p)]) for p in inner]
    pa, pb = (cycle_monodromy(cfg, lp, eps=eps, labels=False).permutation for lp in loops)
    pab = cycle_monodromy(cfg, loops[0].then(loops[1]), eps=eps, labels=False).permutation
    if not np.array_equal(pab, pb[pa]):
        problems.append("composition law")
    for J, om in [(1, 0.8), (1.5, 2.4), (2, 4.1)]:
        c = TopConfig(J, om)
        if not np.array_equal(sweep_cycle(c, steps=8 * c.d).permutation,
                              sweep_cycle(c, steps=1024).permutation):
            problems.append(f"sweep refinement J={J}")
    for path in [template_C()] + loops:
        a = cycle_monodromy(cfg, path, steps=64, eps=eps, labels=False).permutation
        b = cycle_monodromy(cfg, path, steps=1024, eps=eps, labels=False).permutation
        if not np.array_equal(a, b):
            problems.append(f"cycle refinement {path.name}")
    dt = time.perf_counter() - t0
    report(9, "property suite", not problems and dt < 180,
           f"({len(problems)} failures{': ' + ', '.join(problems) if problems else ''}, {dt:.1f}s)")
