"""Numerical atlas of exceptional points of U(Lambda) for any J.

Degeneracies are the zeros of the discriminant of det(z - U) = g(z) + w h(z)
as a polynomial in w = 1/Lambda. Working in w turns the degeneracy at
Lambda = infinity into an ordinary root at w = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cubic import DIABOLIC, EXCEPTIONAL, EPRecord, at_infinity_record
from .exceptions import (
    InterpolationError, RadiusError, SingularParameterError, SolverError, TrackingError,
)
from .floquet import build_floquet, char_poly_affine_split
from .polyroots import aberth_roots, discriminant, horner, polyder
from .spin import TopConfig
from .tracking import circle_points, cycles_of, track_polyline

#: eigenvalues closer than this (relative) count as one cluster
ORDER_RTOL = 1e-5
#: singular values below this fraction of ||U|| count towards geometric multiplicity
GEOMETRIC_RTOL = 1e-6
#: discriminant coefficients below this fraction of the largest are zero
COEFF_RTOL = 1e-12
#: w-roots closer than this (relative) are refined together as a multiple root
ROOT_CLUSTER_RTOL = 1e-5
LOOP_POINTS = 64


@dataclass
class DiscriminantPoly:
    """Disc_z[g + w h] as ascending coefficients in w."""

    coeffs: np.ndarray
    omega: float
    J: object
    radius: float
    max_holdout_error: float

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, w):
        return horner(self.coeffs, w)[0]


def direct_discriminant(g, h, w):
    return discriminant(g + w * h)


def discriminant_poly(config: TopConfig, radius=1.0, rtol=1e-8) -> DiscriminantPoly:
    """Interpolate the discriminant from 2d - 1 samples on |w| = radius.

    Three held-out samples check the interpolant; on mismatch the node
    circle is rescaled once in each direction before giving up.
    """
    g, h = char_poly_affine_split(config)
    n = 2 * config.d - 1
    last = None
    for rho in (radius, 2 * radius, radius / 2):
        nodes = rho * np.exp(2j * np.pi * np.arange(n) / n)
        vals = np.array([direct_discriminant(g, h, w) for w in nodes])
        if np.max(np.abs(vals)) <= 1e-14:
            raise SingularParameterError(
                "spectrum is degenerate for every Lambda at this omega")
        coeffs = np.fft.fft(vals) / n / rho ** np.arange(n)
        held = rho * np.array([0.7 * np.exp(0.37j), 1.3 * np.exp(2.1j), 1.0 * np.exp(-2.9j)])
        direct = np.array([direct_discriminant(g, h, w) for w in held])
        interp = horner(coeffs, held)[0]
        scale = np.array([np.sum(np.abs(coeffs) * abs(w) ** np.arange(n)) for w in held])
        err = float(np.max(np.abs(interp - direct) / np.maximum(np.abs(direct), scale)))
        last = err
        if err <= rtol:
            return DiscriminantPoly(coeffs, config.omega, config.J, rho, err)
    raise InterpolationError(f"discriminant interpolation failed (held-out error {last:.3g})")


@dataclass
class MonodromyReport:
    """Branch permutation after one loop around a degeneracy point.

    ``permutation[i] = j``: the branch starting on eigenvalue i of the loop's
    base point ends on eigenvalue j.
    """

    center: complex
    radius: float
    permutation: np.ndarray
    cycles: list
    puiseux_exponent: float | None
    base_eigenvalues: np.ndarray = field(repr=False, default=None)

    @property
    def nontrivial_cycles(self):
        return [c for c in self.cycles if len(c) > 1]

    @property
    def longest_cycle(self) -> int:
        return max(len(c) for c in self.cycles)


def _newton(coeffs, x0, tol=1e-15, maxiter=60):
    x = complex(x0)
    for _ in range(maxiter):
        p, dp = horner(coeffs, x)
        if dp == 0:
            break
        step = p / dp
        x -= step
        if abs(step) <= tol * max(1.0, abs(x)):
            break
    return x


def _cluster_roots(roots, rtol):
    groups = []
    used = np.zeros(roots.size, dtype=bool)
    for i in range(roots.size):
        if used[i]:
            continue
        grp = [i]
        used[i] = True
        for j in range(i + 1, roots.size):
            if not used[j] and abs(roots[j] - roots[i]) <= rtol * max(1.0, abs(roots[i])):
                grp.append(j)
                used[j] = True
        groups.append(grp)
    return groups


def discriminant_roots(dp: DiscriminantPoly, coeff_rtol=COEFF_RTOL, cluster_rtol=ROOT_CLUSTER_RTOL):
    """Roots of the discriminant in w with multiplicities.

    Returns ``(finite, n_zero, n_inf)``: a list of (w, multiplicity) with
    w != 0, the multiplicity of w = 0 and the number of roots at w = infinity
    (degree deficit). A cluster of m close roots is refined by Newton on the
    (m-1)-th derivative and kept as a multiple root only when the
    polynomial itself also vanishes there.
    """
    c = np.array(dp.coeffs, dtype=complex)
    scale = np.max(np.abs(c))
    if scale == 0:
        raise SolverError("discriminant vanishes identically")
    small = np.abs(c) <= coeff_rtol * scale
    lo = int(np.argmax(~small))
    hi = int(len(c) - 1 - np.argmax(~small[::-1]))
    n_zero, n_inf = lo, len(c) - 1 - hi
    core = c[lo:hi + 1]
    if core.size <= 1:
        return [], n_zero, n_inf
    roots = aberth_roots(core)
    out = []
    for grp in _cluster_roots(roots, cluster_rtol):
        m = len(grp)
        w0 = roots[grp].mean()
        if m == 1:
            out.append((_newton(core, w0), 1))
            continue
        dc = core
        for _ in range(m - 1):
            dc = polyder(dc)
        w = _newton(dc, w0)
        resid = abs(horner(core, w)[0]) / np.sum(np.abs(core) * abs(w) ** np.arange(core.size))
        if resid <= 1e-10:
            out.append((w, m))
        else:
            out.extend((_newton(core, roots[i]), 1) for i in grp)
    return out, n_zero, n_inf


def _eigs(config, Lambda):
    g, h = char_poly_affine_split(config)
    return aberth_roots(g + h / Lambda)


def _cluster_tol(k, rtol=ORDER_RTOL):
    # a k-fold EP located to ~1e-15 splits its eigenvalues by ~(1e-15)^(1/k)
    return max(rtol, 100 * 1e-15 ** (1.0 / k))


def _largest_cluster(z, rtol=ORDER_RTOL):
    """Indices of the largest group of eigenvalues that coalesce.

    A group of size k qualifies when its diameter is below the order-aware
    tolerance for k; larger groups win.
    """
    for k in range(z.size, 1, -1):
        tol = _cluster_tol(k, rtol)
        best = None
        for i in range(z.size):
            idx = np.argsort(np.abs(z - z[i]))[:k]
            diam = max(abs(z[a] - z[b]) for a in idx for b in idx)
            if diam <= tol * max(1.0, abs(z[i])) and (best is None or diam < best[0]):
                best = (diam, sorted(int(j) for j in idx))
        if best is not None:
            return best[1]
    return [int(np.argmin(np.abs(z)))]


def _loop_permutation(config, center, radius, points=LOOP_POINTS, variable="Lambda", ccw=True):
    g, h = char_poly_affine_split(config)
    loop = circle_points(center, radius, points)
    if not ccw:
        loop = loop[::-1]
    for attempt in range(3):
        try:
            track = track_polyline(g, h, loop, steps=points * 2 ** attempt, variable=variable)
            return track.final_permutation(), track.roots[0]
        except TrackingError:
            if attempt == 2:
                raise


def _puiseux_exponent(config, center, radius, cluster_size, variable="Lambda", invert=False):
    """Slope of log(cluster diameter) against log(distance from the EP)."""
    if cluster_size < 2:
        return None
    g, h = char_poly_affine_split(config)
    radii = radius * np.array([1.0, 0.5, 0.25])
    angles = 2 * np.pi * (np.arange(8) + 0.5) / 8
    logs = []
    for r in radii:
        acc = []
        for th in angles:
            x = center + r * np.exp(1j * th)
            w = x if variable == "w" else 1 / x
            z = aberth_roots(g + w * h)
            if invert:
                z = 1 / z
            centre = np.mean(z) if cluster_size == z.size else None
            if centre is None:
                # cluster members: the tightest group of the right size
                idx = min(
                    (np.argsort(np.abs(z - z[i]))[:cluster_size] for i in range(z.size)),
                    key=lambda s: np.ptp(z[s].real) + np.ptp(z[s].imag),
                )
            else:
                idx = np.arange(z.size)
            zz = z[idx]
            acc.append(np.log(max(abs(a - b) for a in zz for b in zz)))
        logs.append(np.mean(acc))
    slope = np.polyfit(np.log(radii), logs, 1)[0]
    return float(slope)


def _pick_radius(center, others, fraction=0.5):
    dists = [abs(center - o) for o in others if o is not None and np.isfinite(o) and o != center]
    if center != 0:
        dists.append(abs(center))
    if not dists:
        return 0.5
    return fraction * min(dists)


def classify_ep(config: TopConfig, Lambda0, candidates=(), monodromy=True, omega=None,
                exclusion=1e-3, order_hint=None) -> EPRecord:
    """Order, kind and monodromy of the degeneracy at Lambda0.

    Order is the size of the tightest eigenvalue cluster at Lambda0; kind
    follows from the number of near-zero singular values of U - z_c. The
    monodromy loop has radius half the distance to the nearest other
    candidate (or the origin).
    """
    omega = config.omega if omega is None else omega
    Lambda0 = complex(Lambda0)
    others = [complex(c) for c in candidates if c is not None and complex(c) != Lambda0 and np.isfinite(c)]
    if np.isinf(Lambda0.real) or np.isinf(Lambda0.imag):
        return _classify_infinity(config, others, monodromy, omega, order_hint)
    if Lambda0 == 0:
        return _classify_origin(config, others, monodromy, omega)
    z = _eigs(config, Lambda0)
    members = _largest_cluster(z)
    order = len(members)
    zc = z[members].mean()
    U = build_floquet(config, Lambda0).entries
    sv = np.linalg.svd(U - zc * np.eye(config.d), compute_uv=False)
    geometric = int(np.sum(sv <= GEOMETRIC_RTOL * np.linalg.norm(U, 2)))
    kind = DIABOLIC if geometric >= order and order > 1 else EXCEPTIONAL
    report = None
    if monodromy and order > 1:
        r = _pick_radius(Lambda0, others)
        for o in others:
            if abs(o - Lambda0) - r < exclusion * abs(o - Lambda0):
                raise RadiusError(f"loop of radius {r} touches the exclusion zone of {o}")
        perm, base = _loop_permutation(config, Lambda0, r)
        expo = _puiseux_exponent(config, Lambda0, 0.1 * r, order)
        report = MonodromyReport(Lambda0, r, perm, cycles_of(perm), expo, base)
    return EPRecord(Lambda0, order, kind, omega, monodromy=report)


def _classify_origin(config, others, monodromy, omega):
    g, h = char_poly_affine_split(config)
    # as Lambda -> 0 deg(h) roots stay finite, the rest run to infinity like Lambda^(-1/k)
    k = config.d - (np.max(np.flatnonzero(np.abs(h) > 1e-12 * np.max(np.abs(h)))))
    report = None
    if monodromy:
        r = _pick_radius(0j, others + [1 + 0j]) if others else 0.5
        perm, base = _loop_permutation(config, 0j, r)
        expo = _puiseux_exponent(config, 0j, r * 1e-2, k, invert=True) if k > 1 else None
        report = MonodromyReport(0j, r, perm, cycles_of(perm), expo, base)
    return EPRecord(0j, int(k), EXCEPTIONAL, omega, monodromy=report)


def _classify_infinity(config, others, monodromy, omega, order=None):
    if order is None:
        g, h = char_poly_affine_split(config)
        order = len(_largest_cluster(aberth_roots(g)))
    report = None
    if monodromy and order > 1:
        ws = [1 / o for o in others if o != 0]
        r = _pick_radius(0j, ws) if ws else 0.5
        r = min(r, 0.5)
        perm, base = _loop_permutation(config, 0j, r, variable="w")
        expo = _puiseux_exponent(config, 0j, r * 1e-2, order, variable="w")
        report = MonodromyReport(complex(np.inf), r, perm, cycles_of(perm), expo, base)
    return at_infinity_record(order, omega, monodromy=report)


def find_eps(config: TopConfig, monodromy=True) -> list[EPRecord]:
    """All degeneracy points of U(Lambda), including Lambda = 0 and infinity.

    Each discriminant root is mapped to Lambda = 1/w and classified.
    """
    dp = discriminant_poly(config)
    finite, n_zero, n_inf = discriminant_roots(dp)
    Ls = [1 / w for w, _ in finite]
    candidates = list(Ls)
    records = []
    for (w, mult), L in zip(finite, Ls):
        rec = classify_ep(config, L, candidates, monodromy=monodromy)
        records.append(replace(rec, multiplicity=mult))
    if n_inf:
        rec = classify_ep(config, 0j, candidates, monodromy=monodromy)
        records.append(replace(rec, multiplicity=n_inf, order=max(rec.order, n_inf + 1)))
    if n_zero:
        rec = classify_ep(config, complex(np.inf), candidates, monodromy=monodromy,
                          order_hint=n_zero + 1)
        records.append(replace(rec, multiplicity=n_zero))
    return sorted(records, key=_sort_key)


def _sort_key(rec):
    if rec.at_infinity:
        return (2, 0.0, 0.0)
    L = complex(rec.Lambda)
    return (0 if abs(L) < 1 else 1, abs(L), np.angle(L))


def chordal(a, b):
    """Distance on the Riemann sphere; ``inf`` is the north pole."""
    a_inf = not np.isfinite(a)
    b_inf = not np.isfinite(b)
    if a_inf and b_inf:
        return 0.0
    if a_inf:
        return 1 / np.sqrt(1 + abs(b) ** 2)
    if b_inf:
        return 1 / np.sqrt(1 + abs(a) ** 2)
    return abs(a - b) / np.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2))


@dataclass
class Trajectory:
    """EP lists over an omega grid with nearest-neighbour links.

    ``track_ids[k][i]`` labels record i at omega_grid[k]; records joined by a
    link share the id. ``merge_events`` lists coalescences, ``broken``
    lists records at step k that found no partner at step k + 1.
    """

    omega_grid: np.ndarray
    records: list
    track_ids: list
    links: list
    merge_events: list
    broken: list
    failures: dict


def _position(rec):
    return complex(np.inf) if rec.at_infinity else complex(rec.Lambda)


def ep_trajectory(config: TopConfig, omega_grid, link_threshold=0.25, merge_tol=1e-4,
                  monodromy=False) -> Trajectory:
    """Follow the EP configuration as omega varies over ``omega_grid``."""
    grid = np.asarray(omega_grid, dtype=float)
    per = []
    failures = {}
    for k, om in enumerate(grid):
        try:
            per.append(find_eps(config.with_omega(om), monodromy=monodromy))
        except (SolverError, InterpolationError, TrackingError, RadiusError,
                SingularParameterError) as exc:
            failures[k] = str(exc)
            per.append([])
    next_id = 0
    ids = []
    links, merges, broken = [], [], []
    for k, recs in enumerate(per):
        cur = [None] * len(recs)
        pos = [_position(r) for r in recs]
        for i in range(len(recs)):
            for j in range(i + 1, len(recs)):
                if chordal(pos[i], pos[j]) < merge_tol:
                    merges.append({"omega": float(grid[k]), "Lambda": pos[i], "kind": "coincident",
                                   "records": [i, j]})
        if k > 0 and per[k - 1] and recs:
            prev = per[k - 1]
            ppos = [_position(r) for r in prev]
            cost = np.array([[chordal(a, b) for b in pos] for a in ppos])
            rows, cols = linear_sum_assignment(cost)
            for a, b in zip(rows, cols):
                if cost[a, b] <= link_threshold:
                    cur[b] = ids[k - 1][a]
                    links.append((k - 1, int(a), k, int(b)))
            matched_prev = set(int(a) for a, b in zip(rows, cols) if cost[a, b] <= link_threshold)
            for a in range(len(prev)):
                if a in matched_prev:
                    continue
                b = int(np.argmin(cost[a]))
                if cost[a, b] <= link_threshold:
                    partners = [ids[k - 1][x] for x in range(len(prev))
                                if int(np.argmin(cost[x])) == b]
                    links.append((k - 1, a, k, b))
                    merges.append({"omega": float(grid[k]), "Lambda": pos[b], "kind": "merge",
                                   "order": recs[b].order, "tracks": sorted(set(partners))})
                else:
                    broken.append((k - 1, a))
        for i in range(len(recs)):
            if cur[i] is None:
                cur[i] = next_id
                next_id += 1
        ids.append(cur)
    # collapse duplicate merge reports for the same point
    seen = set()
    uniq = []
    for m in merges:
        key = (m["omega"], m["kind"], np.round(m["Lambda"], 9) if np.isfinite(m["Lambda"]) else "inf")
        if key not in seen:
            seen.add(key)
            uniq.append(m)
    return Trajectory(grid, per, ids, links, uniq, broken, failures)
