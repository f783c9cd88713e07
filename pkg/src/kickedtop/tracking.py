"""Continuity tracking of eigenvalue branches along paths in the Lambda-plane."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import TrackingError
from .polyroots import aberth_roots

#: matched distance must stay below this fraction of the runner-up distance
AMBIGUITY_RATIO = 0.3


def assign_nearest(reference, candidates):
    """Permutation ``p`` minimising sum |reference[i] - candidates[p[i]]|."""
    cost = np.abs(reference[:, None] - candidates[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty_like(cols)
    perm[rows] = cols
    return perm


def assign_overlap(previous, current):
    """Match columns of ``current`` to columns of ``previous`` by |<prev|cur>|.

    Returns ``(perm, overlaps)`` where ``current[:, perm[i]]`` continues
    ``previous[:, i]``.
    """
    ov = np.abs(previous.conj().T @ current)
    rows, cols = linear_sum_assignment(-ov)
    perm = np.empty_like(cols)
    perm[rows] = cols
    return perm, ov[np.arange(ov.shape[0]), perm]


def ambiguity(predicted, roots, perm, coincide=1e-7):
    """Largest ratio of matched distance to runner-up distance over branches.

    Candidates that coincide with the matched root are not rivals: swapping
    identical branches changes nothing.
    """
    dist = np.abs(predicted[:, None] - roots[None, :])
    matched = dist[np.arange(dist.shape[0]), perm]
    scale = max(1.0, float(np.max(np.abs(roots)))) if roots.size else 1.0
    same = np.abs(roots[perm][:, None] - roots[None, :]) <= coincide * scale
    dist[same] = np.inf
    runner_up = dist.min(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(runner_up > 0, matched / runner_up, np.inf)
    ratio[matched == 0] = 0.0
    return float(ratio.max()) if ratio.size else 0.0


def roots_at(g, h, Lambda, seeds=None, variable="Lambda"):
    """Roots of g(z) + w h(z) with w = 1/Lambda (or w given directly)."""
    w = Lambda if variable == "w" else 1 / Lambda
    return aberth_roots(g + w * h, seeds=seeds)


@dataclass
class PathTrack:
    """Eigenvalue branches sampled along a path.

    ``roots[k, i]`` is branch i at ``Lambdas[k]``; ``waypoint_index[j]`` is the
    sample index at which waypoint j is reached.
    """

    Lambdas: np.ndarray
    roots: np.ndarray
    waypoint_index: np.ndarray
    halvings: int

    def final_permutation(self, tol=1e-6):
        """perm[i] = j when branch i ends on the starting value of branch j."""
        start, end = self.roots[0], self.roots[-1]
        perm = assign_nearest(end, start)
        scale = max(1.0, float(np.max(np.abs(start))))
        if np.max(np.abs(end - start[perm])) > tol * scale:
            raise TrackingError("path endpoints carry different spectra; is the path closed?",
                                complex(self.Lambdas[-1]))
        return perm


def track_polyline(g, h, waypoints, steps=64, start_roots=None, max_halvings=12,
                   ratio=AMBIGUITY_RATIO, variable="Lambda"):
    """Follow all roots of g + h/Lambda along a piecewise-linear path.

    With ``variable="w"`` the waypoints are values of w = 1/Lambda instead,
    which makes loops around Lambda = infinity ordinary small loops.

    ``steps`` sets the base step as total length / steps. A step is accepted
    when every branch's matched root is clearly the nearest to its linear
    prediction; otherwise the step is halved, up to ``max_halvings`` times.
    """
    pts = np.asarray(waypoints, dtype=complex)
    seg = np.abs(np.diff(pts))
    total = float(seg.sum())
    if total == 0:
        raise TrackingError("degenerate path of zero length")
    base = total / max(int(steps), 1)
    z = roots_at(g, h, pts[0], variable=variable) if start_roots is None else np.asarray(start_roots, dtype=complex)
    Ls, Zs = [pts[0]], [z]
    wp_index = [0]
    prev_z, last_step = None, base
    worst = 0
    for a, b, length in zip(pts[:-1], pts[1:], seg):
        if length == 0:
            wp_index.append(len(Ls) - 1)
            continue
        s = 0.0
        ds = base
        level = 0
        while s < length:
            step = min(ds, length - s)
            if length - s - step < 1e-6 * ds:
                # absorb slivers left over at the end of a segment
                step = length - s
            t = s + step
            L_new = a + (b - a) * (t / length)
            pred = z if prev_z is None else z + (z - prev_z) * min(step / last_step, 2.0)
            cand = roots_at(g, h, L_new, seeds=pred, variable=variable)
            perm = assign_nearest(pred, cand)
            if ambiguity(pred, cand, perm) > ratio:
                level += 1
                worst = max(worst, level)
                if level > max_halvings:
                    raise TrackingError("branch matching stayed ambiguous", complex(L_new))
                ds /= 2
                continue
            prev_z, z = z, cand[perm]
            last_step = step
            s = t
            Ls.append(L_new)
            Zs.append(z)
            if level > 0 and ds < base:
                ds *= 2
                level -= 1
        wp_index.append(len(Ls) - 1)
    return PathTrack(np.array(Ls), np.array(Zs), np.array(wp_index), worst)


def circle_points(center, radius, n, start_angle=0.0):
    """Closed ccw polygon with ``n`` sides (first point repeated at the end)."""
    theta = start_angle + 2 * np.pi * np.arange(n + 1) / n
    pts = center + radius * np.exp(1j * theta)
    pts[-1] = pts[0]
    return pts


def cycles_of(perm):
    """Cycle decomposition of a permutation given as an index array."""
    seen = set()
    cycles = []
    for i in range(len(perm)):
        if i in seen:
            continue
        cyc = [i]
        seen.add(i)
        j = int(perm[i])
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = int(perm[j])
        cycles.append(tuple(cyc))
    return cycles
