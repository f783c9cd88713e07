"""Adiabatic sweep of the kick strength around the unit circle and the
resulting permutation of quasienergies and eigenspaces."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import PreconditionError, ResonanceError, TrackingError
from .floquet import build_floquet
from .spectral import TWO_PI, eigendecompose, gauge_fix, quasienergies_ordered
from .spin import TopConfig
from .tracking import assign_overlap, cycles_of

OVERLAP_THRESHOLD = 0.9
MAX_HALVINGS = 12


@dataclass(frozen=True)
class ResonanceReport:
    omega: float
    d: int
    resonant: bool
    witness: tuple[int, int] | None = None


def check_nonresonance(omega, d, turns: Fraction | None = None, tol=1e-12) -> ResonanceReport:
    """Test omega against 2 pi q / p with 0 < |p| < d.

    When ``turns`` (omega / 2 pi as an exact fraction) is supplied the test
    is exact; otherwise omega p / 2 pi is compared to the nearest integer
    within ``tol``. The witness has the smallest positive p.
    """
    if d < 2:
        raise PreconditionError("resonance test needs d >= 2")
    for p in range(1, d):
        if turns is not None:
            x = turns * p
            if x.denominator == 1:
                return ResonanceReport(float(omega), d, True, (int(x), p))
            continue
        x = omega * p / TWO_PI
        q = round(x)
        if abs(x - q) <= tol * max(1.0, abs(x)):
            return ResonanceReport(float(omega), d, True, (int(q), p))
    return ResonanceReport(float(omega), d, False, None)


def _require_cycle_conditions(config: TopConfig):
    report = check_nonresonance(config.omega, config.d, config.omega_turns)
    if report.resonant:
        raise ResonanceError(report)
    if not config.kick.has_full_support():
        raise PreconditionError("every <J,M|v> must be nonzero for the cyclic condition")


@dataclass
class SweepResult:
    """Branches tracked over lambda in [0, 2 pi].

    Branch n starts on the rank-n quasienergy at lambda = 0.
    ``permutation[n] = m`` means branch n ends on the rank-m state, and
    ``itinerary[M] = s(M; C)`` maps the |J,M> label at the start to the label
    at the end.
    """

    config: TopConfig
    lambda_grid: np.ndarray
    eigenvalues: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    permutation: np.ndarray
    start_labels: np.ndarray
    itinerary: dict
    min_overlap: float
    halvings: int

    @property
    def cycles(self):
        return cycles_of(self.permutation)

    @property
    def is_single_cycle(self) -> bool:
        return len(self.cycles) == 1

    @property
    def is_cyclic_shift(self) -> bool:
        d = self.permutation.size
        return bool(np.array_equal(self.permutation, (np.arange(d) + 1) % d))


def _rank_labels(config: TopConfig, dec, order):
    """|J,M> label of each rank at lambda = 0 (largest eigenvector component)."""
    M = config.J.m_values()
    return np.array([M[np.argmax(np.abs(dec.right_vecs[:, k]))] for k in order])


def sweep_cycle(config: TopConfig, steps: int = 256, overlap_threshold=OVERLAP_THRESHOLD,
                max_halvings=MAX_HALVINGS) -> SweepResult:
    """Track every quasienergy branch once around the unit circle.

    Branches are matched between grid points by maximal eigenvector overlap;
    a step whose smallest overlap falls below ``overlap_threshold`` is halved.
    """
    _require_cycle_conditions(config)
    d = config.d
    if steps < 8 * d:
        raise PreconditionError(f"steps must be at least 8d = {8 * d}")
    dec0 = eigendecompose(build_floquet(config, 1.0))
    ranked = quasienergies_ordered(dec0)
    order = ranked.order
    start_labels = _rank_labels(config, dec0, order)
    if np.min(np.diff(ranked.energies)) <= 1e-12:
        raise PreconditionError("degenerate quasienergies at lambda = 0")

    vecs = dec0.right_vecs[:, order]
    z = dec0.eigenvalues[order]
    E = ranked.energies.copy()
    lams, Zs, Es, Vs = [0.0], [z], [E.copy()], [vecs]
    base = TWO_PI / steps
    lam, h, level = 0.0, base, 0
    min_ov, worst = 1.0, 0
    while lam < TWO_PI - 1e-15:
        step = min(h, TWO_PI - lam)
        new_lam = lam + step
        dec = eigendecompose(build_floquet(config, np.exp(1j * new_lam)), seeds=z)
        perm, ov = assign_overlap(vecs, dec.right_vecs)
        if ov.min() < overlap_threshold:
            level += 1
            worst = max(worst, level)
            if level > max_halvings:
                raise TrackingError("eigenvector overlap below threshold", new_lam)
            h /= 2
            continue
        min_ov = min(min_ov, float(ov.min()))
        vecs = gauge_fix(dec.right_vecs[:, perm], reference=vecs)
        z = dec.eigenvalues[perm]
        dE = np.mod(-np.angle(z) - E + np.pi, TWO_PI) - np.pi
        E = E + dE
        lam = new_lam
        lams.append(lam)
        Zs.append(z)
        Es.append(E.copy())
        Vs.append(vecs)
        if level > 0:
            h *= 2
            level -= 1
    final_perm, final_ov = assign_overlap(vecs, Vs[0])
    if final_ov.min() < 0.99:
        raise TrackingError("end-of-cycle states do not match the start basis", TWO_PI)
    itin = {float(start_labels[n]): float(start_labels[final_perm[n]]) for n in range(d)}
    return SweepResult(
        config=config,
        lambda_grid=np.array(lams),
        eigenvalues=np.array(Zs),
        energies=np.array(Es),
        vectors=np.array(Vs),
        permutation=final_perm,
        start_labels=start_labels,
        itinerary=itin,
        min_overlap=min_ov,
        halvings=worst,
    )


def itinerary(config: TopConfig) -> dict:
    """s(M; C) from the rank ordering at lambda = 0 and the cyclic shift.

    At lambda = 0 the state |J,M> carries quasienergy omega M (mod 2 pi).
    One cycle moves rank n to rank n + 1 (mod d).
    """
    _require_cycle_conditions(config)
    M = config.J.m_values()
    E = np.mod(config.omega * M, TWO_PI)
    E = np.where(E >= TWO_PI - 1e-13, 0.0, E)
    ranked = M[np.argsort(E, kind="stable")]
    d = config.d
    return {float(ranked[n]): float(ranked[(n + 1) % d]) for n in range(d)}
