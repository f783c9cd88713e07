"""Riemann sheets of the quasienergies in the Lambda-plane and the
monodromy of closed paths.

Sheet M carries the branch that equals exp(-i omega M) at Lambda = 1. It is
continued along the unit circle from Lambda = 1 to Lambda = exp(i theta)
with theta in (-pi, pi], then radially to rho exp(i theta). This leaves two
kinds of seams: the negative real axis, where the unit-circle anholonomy
shows up, and radial cuts that run from each finite EP away from the unit
circle.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .epfinder import find_eps
from .exceptions import PreconditionError, TrackingError
from .floquet import char_poly_affine_split, precession_phases
from .spin import TopConfig
from .tracking import AMBIGUITY_RATIO, assign_nearest, circle_points, cycles_of, track_polyline

#: EP exclusion radius as a fraction of the distance to the nearest other EP
EXCLUSION_FRACTION = 1e-3
#: radial step in log(rho) for batched ray continuation
LOG_STEP = 0.01


def m_labels(config: TopConfig) -> np.ndarray:
    return config.J.m_values()


def _label(M) -> str:
    M = float(M)
    return str(int(M)) if M.is_integer() else f"{int(round(2 * M))}/2"


def _base_roots(config: TopConfig) -> np.ndarray:
    return precession_phases(config).copy()


# ---------------------------------------------------------------- batching

def _batched_roots(g, h, Lambdas):
    """Eigenvalues for many Lambda at once via companion matrices."""
    L = np.asarray(Lambdas, dtype=complex).ravel()
    d = g.size - 1
    c = g[None, :] + (1 / L)[:, None] * np.concatenate([h, np.zeros(d + 1 - h.size)])[None, :]
    c = c / c[:, -1:]
    C = np.zeros((L.size, d, d), dtype=complex)
    C[:, np.arange(1, d), np.arange(d - 1)] = 1
    C[:, :, -1] = -c[:, :d]
    z = np.linalg.eigvals(C)
    # one Newton polish per root
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for k in range(d, -1, -1):
        dp = dp * z + p
        p = p * z + c[:, k:k + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(dp != 0, p / dp, 0)
    return z - np.where(np.isfinite(step), step, 0)


def _batched_match(pred, cand, ratio=AMBIGUITY_RATIO, coincide=1e-7):
    """Row-wise nearest matching; returns (reordered cand, ok mask)."""
    n, d = pred.shape
    dist = np.abs(pred[:, :, None] - cand[:, None, :])
    perm = np.argmin(dist, axis=2)
    ok = np.all(np.sort(perm, axis=1) == np.arange(d)[None, :], axis=1)
    rows = np.arange(n)[:, None]
    matched = dist[rows, np.arange(d)[None, :], perm]
    scale = np.maximum(1.0, np.max(np.abs(cand), axis=1))[:, None, None]
    chosen = cand[rows, perm]
    same = np.abs(chosen[:, :, None] - cand[:, None, :]) <= coincide * scale
    rival = np.where(same, np.inf, dist).min(axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(matched == 0, 0.0, matched / rival)
    ok &= np.all(r <= ratio, axis=1)
    return chosen, ok


# --------------------------------------------------------------- EP guards

def exclusion_radii(eps) -> list[tuple[complex, float]]:
    """(position, radius) for every finite EP, including one at the origin."""
    pts = [complex(e.Lambda) for e in eps if not e.at_infinity]
    out = []
    for i, p in enumerate(pts):
        others = [abs(p - q) for j, q in enumerate(pts) if j != i]
        if p != 0:
            others.append(abs(p))
        scale = min(others) if others else 1.0
        out.append((p, EXCLUSION_FRACTION * scale))
    return out


def _segment_distance(a, b, p):
    ab = b - a
    t = 0.0 if ab == 0 else float(np.clip(((p - a) * np.conj(ab)).real / abs(ab) ** 2, 0, 1))
    return abs(a + t * ab - p)


def _hits_exclusion(a, b, guards):
    return any(_segment_distance(a, b, p) < r for p, r in guards)


def _hits_exclusion_many(a, b, guards):
    """Vectorised ``_hits_exclusion`` over arrays of segments."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    hit = np.zeros(a.shape, dtype=bool)
    ab = b - a
    den = np.where(ab == 0, 1, np.abs(ab) ** 2)
    for p, r in guards:
        t = np.clip(((p - a) * np.conj(ab)).real / den, 0, 1)
        hit |= np.abs(a + t * ab - p) < r
    return hit


# ------------------------------------------------------------ continuation

def _unwrap_energy(E_prev, z_prev, z_new):
    return E_prev - np.angle(z_new / z_prev)


def continue_to(config: TopConfig, Lambda, g=None, h=None, steps=64, guards=()):
    """Labelled eigenvalues and unwrapped Re E at a single point.

    Returns ``(z, E)`` with one entry per sheet, ordered by M ascending.
    ``E`` is real: the continued quasienergy's real part.
    """
    if g is None:
        g, h = char_poly_affine_split(config)
    Lambda = complex(Lambda)
    if Lambda == 0:
        raise PreconditionError("Lambda = 0 is a pole of the family")
    rho, theta = abs(Lambda), float(np.angle(Lambda))
    z0 = _base_roots(config)
    E0 = config.omega * m_labels(config)
    pts = [1 + 0j]
    if theta != 0:
        n_arc = max(2, int(np.ceil(abs(theta) / (np.pi / 64))))
        pts += list(np.exp(1j * theta * np.arange(1, n_arc + 1) / n_arc))
    path = np.array(pts)
    if rho != 1:
        radial = np.exp(1j * theta) * np.exp(np.linspace(0, np.log(rho), 2))
        path = np.concatenate([path, radial[1:]])
        for a, b in zip(radial[:-1], radial[1:]):
            if _hits_exclusion(a, b, guards):
                raise TrackingError("radial continuation passes an EP exclusion zone", Lambda)
    if path.size == 1:
        return z0, E0
    track = track_polyline(g, h, path, steps=steps, start_roots=z0)
    Z = track.roots
    E = E0 - np.concatenate([np.zeros((1, Z.shape[1])), np.cumsum(np.angle(Z[1:] / Z[:-1]), axis=0)])
    return Z[-1], E[-1]


def sheet_values(config: TopConfig, Lambdas, steps=64):
    """Re E_M at each point for every sheet (NaN where continuation fails)."""
    g, h = char_poly_affine_split(config)
    pts = np.atleast_1d(np.asarray(Lambdas, dtype=complex))
    out = np.full((pts.size, config.d), np.nan)
    zs = np.full((pts.size, config.d), np.nan + 0j)
    for i, L in enumerate(pts):
        try:
            zs[i], out[i] = continue_to(config, L, g, h, steps)
        except (TrackingError, PreconditionError):
            pass
    return zs, out


@dataclass
class SheetGrid:
    """Re E_M on a rectangular grid for one sheet.

    ``values[iy, ix]`` belongs to Lambda = re_lambda[ix] + i im_lambda[iy];
    cells that could not be reached are NaN with ``resolved`` False.
    """

    region: tuple
    resolution: tuple
    sheet_label: float
    re_lambda: np.ndarray
    im_lambda: np.ndarray
    values: np.ndarray
    resolved: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    seam: dict = field(default_factory=dict)
    eps: list = field(default_factory=list)

    @property
    def label(self) -> str:
        return _label(self.sheet_label)

    @property
    def unresolved_fraction(self) -> float:
        return float(1 - self.resolved.mean())


def _seam_description(eps, guard):
    cuts = []
    for e in eps:
        if e.at_infinity or e.Lambda == 0:
            continue
        L = complex(e.Lambda)
        cuts.append({"from_re": L.real, "from_im": L.imag,
                     "direction": "outward" if abs(L) > 1 else "inward"})
    return {"negative_real_axis": True, "unit_circle_point": [-1.0, 0.0],
            "radial_cuts": cuts, "guard_radius": guard,
            "relabel_rule": "z_{M+1}(-pi+0) = z_M(pi-0), M+1 taken mod d"}


def _ray_continuation(config, g, h, thetas, log_rhos, guards):
    """Labelled roots and Re E on a polar lattice of rays.

    Each ray starts on the unit circle, where the labels come from
    continuation along the circle, and proceeds outward and inward in
    geometric steps. Steps that are ambiguous for the batched matcher are
    redone with the adaptive tracker; a ray stops at an EP exclusion zone.
    """
    d = config.d
    nth, nr = thetas.size, log_rhos.size
    Z = np.full((nth, nr, d), np.nan + 0j)
    E = np.full((nth, nr, d), np.nan)
    # unit circle: two arcs from Lambda = 1
    z0 = _base_roots(config)
    E0 = config.omega * m_labels(config)
    circle_Z = np.empty((nth, d), dtype=complex)
    circle_E = np.empty((nth, d))
    for sign in (1, -1):
        idx = np.flatnonzero(np.sign(thetas) == sign) if sign > 0 else np.flatnonzero(thetas <= 0)
        idx = idx[np.argsort(np.abs(thetas[idx]))]
        if idx.size == 0:
            continue
        way = np.concatenate([[1 + 0j], np.exp(1j * thetas[idx])])
        fine = [way[0]]
        marks = []
        for a, b in zip(way[:-1], way[1:]):
            ta, tb = np.angle(a), np.angle(b)
            n = max(1, int(np.ceil(abs(tb - ta) / (np.pi / 128))))
            fine += list(np.exp(1j * (ta + (tb - ta) * np.arange(1, n + 1) / n)))
            marks.append(len(fine) - 1)
        track = track_polyline(g, h, np.array(fine), steps=len(fine) - 1, start_roots=z0)
        wp = track.waypoint_index
        Zt = track.roots
        Et = E0 - np.concatenate([np.zeros((1, d)), np.cumsum(np.angle(Zt[1:] / Zt[:-1]), axis=0)])
        sel = wp[np.array(marks)]
        circle_Z[idx] = Zt[sel]
        circle_E[idx] = Et[sel]
    k1 = int(np.argmin(np.abs(log_rhos)))
    Z[:, k1] = circle_Z * 1
    E[:, k1] = circle_E
    # radial continuation in both directions
    for direction in (1, -1):
        alive = np.ones(nth, dtype=bool)
        ks = range(k1 + 1, nr) if direction > 0 else range(k1 - 1, -1, -1)
        prev_k = k1
        prev2 = None
        for k in ks:
            L_prev = np.exp(log_rhos[prev_k] + 1j * thetas)
            L_new = np.exp(log_rhos[k] + 1j * thetas)
            alive &= ~_hits_exclusion_many(L_prev, L_new, guards)
            rays = np.flatnonzero(alive)
            if rays.size == 0:
                break
            zp = Z[rays, prev_k]
            pred = zp if prev2 is None else zp + (zp - Z[rays, prev2])
            cand = _batched_roots(g, h, L_new[rays])
            chosen, ok = _batched_match(pred, cand)
            for pos in np.flatnonzero(~ok):
                j = rays[pos]
                try:
                    t = track_polyline(g, h, [L_prev[j], L_new[j]], steps=4, start_roots=zp[pos])
                    chosen[pos] = t.roots[-1]
                    ok[pos] = True
                except TrackingError:
                    alive[j] = False
            good = rays[ok]
            Z[good, k] = chosen[ok]
            E[good, k] = _unwrap_energy(E[good, prev_k], Z[good, prev_k], Z[good, k])
            prev2, prev_k = prev_k, k
            if not ok.all():
                # keep prediction history consistent for the survivors
                prev2 = None
    return Z, E


def build_sheets(config: TopConfig, region=(-1.5, 1.5, -1.5, 1.5), resolution=(101, 101),
                 eps=None, guard=None, n_rays=None) -> list[SheetGrid]:
    """Sample Re E_M for every sheet M on a rectangular grid.

    Cells inside the guard disk at the origin or inside an EP exclusion
    radius are left unresolved, as are cells whose ray was stopped.
    """
    x0, x1, y0, y1 = map(float, region)
    nx, ny = map(int, resolution)
    if nx < 2 or ny < 2 or not (x1 > x0 and y1 > y0):
        raise PreconditionError("region must be a proper rectangle with at least 2x2 cells")
    g, h = char_poly_affine_split(config)
    if eps is None:
        eps = find_eps(config, monodromy=False)
    guards = exclusion_radii(eps)
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    X, Y = np.meshgrid(xs, ys)
    P = X + 1j * Y
    if guard is None:
        guard = 1e-2 * max(x1 - x0, y1 - y0)
    R = np.abs(P)
    usable = R > guard
    for p, r in guards:
        usable &= np.abs(P - p) > r
    if not usable.any():
        raise PreconditionError("no grid cell lies outside the guard disk")
    rmin, rmax = R[usable].min(), R[usable].max()
    lo = min(0.0, np.log(rmin)) - LOG_STEP
    hi = max(0.0, np.log(rmax)) + LOG_STEP
    n_in = int(np.ceil(-lo / LOG_STEP))
    n_out = int(np.ceil(hi / LOG_STEP))
    log_rhos = np.concatenate([-LOG_STEP * np.arange(n_in, 0, -1), [0.0], LOG_STEP * np.arange(1, n_out + 1)])
    if n_rays is None:
        n_rays = max(256, 2 * max(nx, ny))
    thetas = -np.pi + 2 * np.pi * (np.arange(n_rays) + 0.5) / n_rays
    Zr, Er = _ray_continuation(config, g, h, thetas, log_rhos, guards)
    # cell -> nearest ray sample, then exact roots at the cell matched to it
    T = np.angle(P)
    T = np.where(T == -np.pi, np.pi, T)
    jt = np.clip(np.round((T + np.pi) * n_rays / (2 * np.pi) - 0.5).astype(int), 0, n_rays - 1)
    kr = np.clip(np.round((np.log(np.where(R > 0, R, 1)) - log_rhos[0]) / LOG_STEP).astype(int),
                 0, log_rhos.size - 1)
    d = config.d
    vals = np.full((ny, nx, d), np.nan)
    zcell = np.full((ny, nx, d), np.nan + 0j)
    cells = np.flatnonzero(usable.ravel())
    ref_z = Zr[jt.ravel()[cells], kr.ravel()[cells]]
    ref_E = Er[jt.ravel()[cells], kr.ravel()[cells]]
    have = np.all(np.isfinite(ref_z), axis=1)
    cells, ref_z, ref_E = cells[have], ref_z[have], ref_E[have]
    Lc = P.ravel()[cells]
    cand = _batched_roots(g, h, Lc)
    chosen, ok = _batched_match(ref_z, cand)
    ref_L = np.exp(log_rhos[kr.ravel()[cells]] + 1j * thetas[jt.ravel()[cells]])
    for pos in np.flatnonzero(~ok):
        try:
            if _hits_exclusion(ref_L[pos], Lc[pos], guards):
                continue
            t = track_polyline(g, h, [ref_L[pos], Lc[pos]], steps=8, start_roots=ref_z[pos])
            chosen[pos] = t.roots[-1]
            ok[pos] = True
        except TrackingError:
            pass
    cells, chosen, ref_z, ref_E = cells[ok], chosen[ok], ref_z[ok], ref_E[ok]
    iy, ix = np.unravel_index(cells, (ny, nx))
    vals[iy, ix] = _unwrap_energy(ref_E, ref_z, chosen)
    zcell[iy, ix] = chosen
    resolved = np.all(np.isfinite(vals), axis=2)
    seam = _seam_description(eps, guard)
    out = []
    for i, M in enumerate(m_labels(config)):
        out.append(SheetGrid((x0, x1, y0, y1), (nx, ny), float(M), xs, ys, vals[:, :, i],
                             resolved.copy(), zcell[:, :, i], seam, list(eps)))
    return out


def seam_distance(Lambda, seam) -> float:
    """Distance from Lambda to the nearest declared seam curve."""
    L = complex(Lambda)
    best = np.inf
    if seam.get("negative_real_axis"):
        best = abs(L.imag) if L.real <= 0 else abs(L)
    for cut in seam.get("radial_cuts", []):
        p = complex(cut["from_re"], cut["from_im"])
        far = p * (1e6 if cut["direction"] == "outward" else 0.0)
        best = min(best, _segment_distance(p, far, L))
    return best


def jump_cells(grid: SheetGrid, ratio=5.0, floor=1e-2):
    """Cell pairs where Re E jumps instead of varying smoothly.

    A neighbour difference counts as a jump when it exceeds ``floor`` and is
    ``ratio`` times larger than both adjacent differences along the same
    grid line. Returns (midpoint, size) pairs.
    """
    v = grid.values
    out = []
    for axis in (0, 1):
        dv = np.abs(np.diff(v, axis=axis))
        pad = np.full_like(dv, np.nan)
        before = np.roll(dv, 1, axis=axis)
        after = np.roll(dv, -1, axis=axis)
        if axis == 0:
            before[0, :] = pad[0, :]
            after[-1, :] = pad[-1, :]
        else:
            before[:, 0] = pad[:, 0]
            after[:, -1] = pad[:, -1]
        nb = np.fmax(before, after)
        with np.errstate(invalid="ignore"):
            mask = (dv > floor) & ~(dv <= ratio * nb)
        iy, ix = np.nonzero(mask)
        for a, b in zip(iy, ix):
            c1 = complex(grid.re_lambda[b], grid.im_lambda[a])
            c2 = complex(grid.re_lambda[b + axis], grid.im_lambda[a + 1 - axis])
            out.append(((c1 + c2) / 2, float(dv[a, b])))
    return out


def ep_junctions(config: TopConfig, eps=None, offset=1e-4):
    """Sheet labels that coalesce at each finite EP.

    The point sampled sits just on the unit-circle side of the EP, so it is
    reached without crossing the EP's own radial cut.
    """
    if eps is None:
        eps = find_eps(config, monodromy=False)
    guards = exclusion_radii(eps)
    g, h = char_poly_affine_split(config)
    M = m_labels(config)
    out = []
    for e in eps:
        if e.at_infinity or e.Lambda == 0:
            out.append(e)
            continue
        L = complex(e.Lambda)
        r = next(rad for p, rad in guards if p == L)
        step = max(offset * abs(L), 10 * r)
        probe = L * (1 + step / abs(L)) if abs(L) < 1 else L * (1 - step / abs(L))
        try:
            z, _ = continue_to(config, probe, g, h)
        except TrackingError:
            out.append(e)
            continue
        k = e.order
        best = None
        for i in range(z.size):
            idx = np.argsort(np.abs(z - z[i]))[:k]
            diam = max(abs(z[a] - z[b]) for a in idx for b in idx)
            if best is None or diam < best[0]:
                best = (diam, sorted(idx))
        out.append(replace(e, merged_branches=tuple(float(M[i]) for i in best[1])))
    return out


# ---------------------------------------------------------------- monodromy

@dataclass
class CyclePath:
    """Closed polyline in the Lambda-plane, traversed in the given order."""

    waypoints: np.ndarray
    name: str = "custom"
    #: waypoint indices worth labelling (junctions of composed paths)
    marks: tuple = ()

    def __post_init__(self):
        w = np.asarray(self.waypoints, dtype=complex)
        if w.size < 3:
            raise PreconditionError("a cycle needs at least three waypoints")
        if abs(w[0] - w[-1]) > 1e-12 * max(1.0, abs(w[0])):
            raise PreconditionError("cycle is not closed (first waypoint != last)")
        if np.any(w == 0):
            raise PreconditionError("cycle passes through Lambda = 0")
        w[-1] = w[0]
        self.waypoints = w

    @property
    def base(self) -> complex:
        return complex(self.waypoints[0])

    @property
    def orientation(self) -> int:
        """+1 when the polygon winds counterclockwise around the origin."""
        w = self.waypoints
        turns = np.sum(np.angle(w[1:] / w[:-1])) / (2 * np.pi)
        return int(np.sign(round(turns))) if round(turns) else 0

    def then(self, other: "CyclePath", name=None) -> "CyclePath":
        if abs(self.base - other.base) > 1e-12:
            raise PreconditionError("paths must share the base point to compose")
        n = self.waypoints.size - 1
        marks = tuple(self.marks) + (n,) + tuple(n + m for m in other.marks)
        return CyclePath(np.concatenate([self.waypoints, other.waypoints[1:]]),
                         name or f"{self.name}*{other.name}", marks)

    def renamed(self, name) -> "CyclePath":
        return CyclePath(self.waypoints, name, self.marks)

    def label_points(self) -> list[int]:
        """Waypoints at which sheet labels are reported.

        Endpoints, composition junctions and both sides of every seam
        crossing.
        """
        idx = {0, self.waypoints.size - 1, *self.marks}
        for i, _, _ in seam_crossings(self.waypoints):
            idx.update((i, i + 1))
        return sorted(idx)


def seam_crossings(waypoints):
    """Crossings of the negative real axis as (segment index, point, sense).

    Sense +1 means moving from the upper to the lower half plane (the
    counterclockwise direction around the origin).
    """
    out = []
    w = np.asarray(waypoints, dtype=complex)
    for i, (a, b) in enumerate(zip(w[:-1], w[1:])):
        if a.imag == b.imag or (a.imag > 0) == (b.imag > 0) and a.imag != 0 and b.imag != 0:
            continue
        if a.imag == 0:
            continue
        t = a.imag / (a.imag - b.imag)
        if not 0 < t <= 1:
            continue
        x = a.real + t * (b.real - a.real)
        if x < 0:
            out.append((i, complex(x, 0), 1 if a.imag > 0 else -1))
    return out


@dataclass
class MonodromyResult:
    """Outcome of continuing all sheets once around a cycle.

    ``sheet_permutation[M] = M2``: the branch that starts on sheet M at the
    base point returns on sheet M2. ``label_history`` holds pairs
    (waypoint index, sheet label carried by each branch there).
    """

    path: CyclePath
    sheet_permutation: dict
    permutation: np.ndarray
    seam_crossings: list
    label_history: list
    halvings: int

    @property
    def cycles(self):
        M = list(self.sheet_permutation)
        return [tuple(M[i] for i in c) for c in cycles_of(self.permutation)]

    def to_dict(self) -> dict:
        return {
            "path": self.path.name,
            "waypoints": [[w.real, w.imag] for w in self.path.waypoints],
            "permutation": {_label(k): _label(v) for k, v in self.sheet_permutation.items()},
            "cycles": [[_label(m) for m in c] for c in self.cycles],
            "seam_crossings": [{"segment": i, "re_lambda": p.real, "sense": s}
                               for i, p, s in self.seam_crossings],
            "label_history": [{"waypoint": j, "labels": [_label(m) if m is not None else None
                                                         for m in row]}
                              for j, row in self.label_history],
            "halvings": self.halvings,
        }


def _labels_at(config, g, h, L, z, guards):
    try:
        zs, _ = continue_to(config, L, g, h, guards=guards)
    except (TrackingError, PreconditionError):
        return [None] * z.size
    perm = assign_nearest(z, zs)
    M = m_labels(config)
    return [float(M[p]) for p in perm]


def cycle_monodromy(config: TopConfig, path: CyclePath, steps=256, eps=None,
                    labels=True) -> MonodromyResult:
    """Continue every sheet around ``path`` and report the permutation."""
    if steps < 64:
        raise PreconditionError("steps must be at least 64")
    g, h = char_poly_affine_split(config)
    if eps is None:
        eps = find_eps(config, monodromy=False)
    guards = exclusion_radii(eps)
    w = path.waypoints
    for a, b in zip(w[:-1], w[1:]):
        if _hits_exclusion(a, b, guards):
            raise TrackingError("path enters an EP exclusion zone", complex(a))
    start, _ = continue_to(config, path.base, g, h, guards=guards)
    track = track_polyline(g, h, w, steps=steps, start_roots=start)
    perm = track.final_permutation()
    M = m_labels(config)
    history = []
    if labels:
        for j in path.label_points():
            k = track.waypoint_index[j]
            history.append((j, _labels_at(config, g, h, track.Lambdas[k], track.roots[k], guards)))
    sheet_perm = {float(M[i]): float(M[perm[i]]) for i in range(M.size)}
    return MonodromyResult(path, sheet_perm, perm, seam_crossings(w), history, track.halvings)


# ---------------------------------------------------------------- templates

def template_C(n=128) -> CyclePath:
    return CyclePath(circle_points(0, 1.0, n), "C")


def template_keyhole(rho, n=128) -> CyclePath:
    """1 -> rho along the real axis, once around |Lambda| = rho, back to 1."""
    circ = circle_points(0, rho, n)
    return CyclePath(np.concatenate([[1 + 0j], circ, [1 + 0j]]), "C'")


def lasso(target, radius, tail, n=64, name="lasso") -> CyclePath:
    """Base point, along ``tail`` to the loop, once ccw around ``target``, back.

    ``tail`` lists the waypoints after the base point; its last point must
    lie on the loop.
    """
    tail = np.asarray(tail, dtype=complex)
    start = tail[-1]
    ang = float(np.angle(start - target))
    loop = circle_points(target, radius, n, start_angle=ang)
    loop[0] = loop[-1] = start
    pts = np.concatenate([[1 + 0j], tail, loop[1:], tail[::-1][1:], [1 + 0j]])
    k = tail.size
    return CyclePath(pts, name, (k, k + loop.size - 1))


def _inner_eps(eps):
    return [complex(e.Lambda) for e in eps
            if not e.at_infinity and e.Lambda != 0 and abs(e.Lambda) < 1]


def _lasso_radius(p, pts):
    others = [abs(p - q) for q in pts if q != p] + [abs(p), abs(1 - abs(p))]
    return 0.3 * min(others)


def _tail_to(p, pts):
    """Waypoints from the base point to the loop around ``p``.

    The straight approach along the ray through ``p`` is used unless it
    passes close to another EP; then the tail detours through the upper
    half plane and enters the loop from above.
    """
    r = _lasso_radius(p, pts)
    entry = p + r * p / abs(p)
    blocked = any(_segment_distance(1 + 0j, entry, q) < 2 * _lasso_radius(q, pts)
                  for q in pts if q != p)
    if not blocked:
        return r, [entry]
    height = 0.5 * (1 - abs(p)) + abs(p.imag)
    return r, [complex(p.real, p.imag + height), p + 1j * r]


def _direct_lasso(p, pts, name):
    r, tail = _tail_to(p, pts)
    return lasso(p, r, tail, name=name)


def _tail_angle(p, pts):
    return np.angle(_tail_to(p, pts)[1][0] - 1) % (2 * np.pi)


def _far_side_lasso(p, around, pts, name):
    """Lasso around ``p`` whose tail first passes behind ``around``.

    The tail runs from the base point past ``around`` on the side away from
    ``p``, crosses the negative real axis close to the origin and then
    reaches ``p`` from the origin side.
    """
    r = _lasso_radius(p, pts)
    ra = _lasso_radius(around, pts)
    s = 1 if around.imag >= 0 else -1
    hub = 0.5 * min(abs(q) for q in pts)
    tail = [
        around + (around / abs(around)) * 2 * ra,
        around + 1j * s * 2 * ra,
        around - (around / abs(around)) * 2 * ra + 1j * s * 2 * ra,
        complex(0, s * hub),
        complex(-hub, 0),
        complex(0, -s * hub),
        # off the radial line through p, where sheet labels are ambiguous
        p - r * p / abs(p) * np.exp(0.25j * s),
    ]
    return lasso(p, r, tail, name=name)


def templates(config: TopConfig, eps=None) -> dict:
    """Named cycles C, C', C1, C2 for a configuration.

    C1 and C2 need a complex-conjugate pair of EPs inside the unit circle
    and nothing else there; otherwise an "enclose-all" product of lassos is
    built instead.
    """
    if eps is None:
        eps = find_eps(config, monodromy=False)
    out = {"C": template_C()}
    inner = _inner_eps(eps)
    radii = [abs(p) for p in inner]
    rho = 0.5 * (1 + max(radii)) if radii else 0.5
    out["C'"] = template_keyhole(rho)
    # Lassos with straight tails from the base point, taken in order of
    # increasing tail direction, compose to a loop homotopic to C.
    order = sorted(inner, key=lambda q: _tail_angle(q, inner))
    pair = len(inner) == 2 and all(abs(q.imag) > 1e-9 for q in inner)
    if pair and not any(e.Lambda == 0 and not e.at_infinity for e in eps):
        first, second = order
        l1 = _direct_lasso(first, inner, "loop(first)")
        l2 = _direct_lasso(second, inner, "loop(second)")
        out["C1"] = l1.then(l2).renamed("C1")
        # reversed order: the first EP is reached by a tail that passes
        # behind the second and crosses the seam twice
        out["C2"] = l2.then(_far_side_lasso(first, second, inner, "loop'(first)")).renamed("C2")
        out["C2-naive"] = l2.then(l1).renamed("C2-naive")
    elif inner:
        path = None
        for i, p in enumerate(order):
            lp = _direct_lasso(p, inner, f"loop{i}")
            path = lp if path is None else path.then(lp)
        out["enclose-all"] = path.renamed("enclose-all")
    return out


@dataclass
class EmulationReport:
    config: TopConfig
    reference: MonodromyResult
    results: dict
    matches: dict
    order_sensitive: bool | None

    @property
    def all_match(self) -> bool:
        return all(v for k, v in self.matches.items() if not k.endswith("naive"))

    def to_dict(self) -> dict:
        return {
            "reference": self.reference.to_dict(),
            "cycles": {k: v.to_dict() for k, v in self.results.items()},
            "matches_C": self.matches,
            "order_sensitive": self.order_sensitive,
        }


def emulation_suite(config: TopConfig, eps=None, steps=256) -> EmulationReport:
    """Compare the unit circle against the constructed non-Hermitian cycles."""
    if eps is None:
        eps = find_eps(config, monodromy=False)
    paths = templates(config, eps)
    results = {name: cycle_monodromy(config, p, steps=steps, eps=eps) for name, p in paths.items()}
    ref = results.pop("C")
    matches = {k: v.sheet_permutation == ref.sheet_permutation for k, v in results.items()}
    sensitive = None
    if "C2-naive" in results:
        sensitive = results["C2-naive"].sheet_permutation != results["C1"].sheet_permutation
    return EmulationReport(config, ref, results, matches, sensitive)
