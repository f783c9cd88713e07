"""Right/left eigendecomposition of U(Lambda) and quasienergies.

Eigenvalues are the Aberth roots of the characteristic polynomial, seeded
with the unperturbed spectrum exp(-i omega M). Eigenvectors come from the
null space of U - z, left vectors from the inverse of the right-vector matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import PreconditionError, SolverError
from .floquet import (FloquetMatrix, build_floquet, char_poly, lambda_from_Lambda,
                      precession_phases, solvable_r)
from .polyroots import aberth_roots
from .spin import TopConfig, fourier_site_basis

TWO_PI = 2 * np.pi

#: cond(R) above this marks the whole decomposition defective
CONDITION_LIMIT = 1e8
#: per-eigenvalue condition number ||L_n|| ||R_n|| above this sets the flag
EIGEN_CONDITION_LIMIT = 1e3
#: eigenvalues closer than this (relative) are candidates for a shared eigenspace;
#: a k-fold root is only resolved to about eps**(1/k)
CLUSTER_RTOL = 1e-4
#: singular values below this (relative to ||A||) count towards the null space
NULL_RTOL = 1e-10


@dataclass
class SpectralDecomposition:
    """Eigen-data of one Floquet matrix.

    ``right_vecs[:, n]`` and ``left_vecs[n, :]`` belong to ``eigenvalues[n]``
    and satisfy ``left_vecs @ right_vecs = I`` unless flagged.
    ``defect_indicator[n] = 1 - |<l_n|r_n>| / (|l_n| |r_n|)`` is zero for a
    normal matrix and tends to one at an exceptional point.
    """

    eigenvalues: np.ndarray
    right_vecs: np.ndarray
    left_vecs: np.ndarray
    quasienergies: np.ndarray
    defect_indicator: np.ndarray
    condition_flags: np.ndarray
    condition_number: float
    Lambda: complex | None = None

    @property
    def d(self) -> int:
        return self.eigenvalues.size

    @property
    def defective(self) -> bool:
        return bool(self.condition_flags.any())

    @property
    def complex_quasienergies(self) -> np.ndarray:
        """E = i log z, with Re E in [0, 2 pi) and Im E = log|z|."""
        return self.quasienergies + 1j * np.log(np.abs(self.eigenvalues))


def quasienergy(z) -> np.ndarray:
    """Real part of E = i log z folded into [0, 2 pi)."""
    E = np.mod(-np.angle(z), TWO_PI)
    # -0.0 and tiny negative phases fold onto 2 pi; they belong at 0
    return np.where(E >= TWO_PI - 1e-13, 0.0, E)


def gauge_fix(vecs, reference=None):
    """Fix eigenvector phases in place.

    Cold start: largest-magnitude component made real positive. With a
    reference set, each column is rotated so Re<ref|vec> is maximal.
    """
    vecs = np.array(vecs, dtype=complex)
    for n in range(vecs.shape[1]):
        v = vecs[:, n]
        if reference is not None:
            ov = np.vdot(reference[:, n], v)
            phase = ov / abs(ov) if abs(ov) > 0 else 1.0
        else:
            k = np.argmax(np.abs(v))
            phase = v[k] / abs(v[k]) if abs(v[k]) > 0 else 1.0
        vecs[:, n] = v / phase
    return vecs


def _clusters(z, rtol):
    scale = max(1.0, np.max(np.abs(z)))
    labels = -np.ones(z.size, dtype=int)
    nxt = 0
    for i in range(z.size):
        if labels[i] >= 0:
            continue
        labels[i] = nxt
        for j in range(i + 1, z.size):
            if labels[j] < 0 and abs(z[i] - z[j]) <= rtol * scale:
                labels[j] = nxt
        nxt += 1
    return labels


def right_eigenvectors(A, z, rtol=CLUSTER_RTOL):
    """Unit right eigenvectors of A for the eigenvalues ``z``.

    A cluster of k eigenvalues within ``rtol`` of each other receives the
    trailing k right singular vectors of A - z_c when those span a genuine
    k-dimensional eigenspace; otherwise each eigenvalue gets its own null
    vector (nearly parallel ones near an exceptional point).
    """
    d = A.shape[0]
    R = np.empty((d, z.size), dtype=complex)
    labels = _clusters(z, rtol)
    eye = np.eye(d)
    # one batched SVD of A - z_n for every eigenvalue
    _, _, vhs = np.linalg.svd(A[None, :, :] - z[:, None, None] * eye)
    for lab in np.unique(labels):
        idx = np.flatnonzero(labels == lab)
        if idx.size == 1:
            R[:, idx[0]] = vhs[idx[0], -1].conj()
            continue
        zc = z[idx].mean()
        _, sv, vh = np.linalg.svd(A - zc * eye)
        Q = vh[-idx.size:].conj().T
        spread = np.max(np.abs(z[idx] - zc))
        floor = NULL_RTOL * max(1.0, sv[0])
        if sv[-idx.size] <= max(floor, 10 * spread):
            # Rayleigh-Ritz inside the invariant subspace separates close pairs
            theta, Y = np.linalg.eig(Q.conj().T @ A @ Q)
            rows, cols = linear_sum_assignment(np.abs(theta[:, None] - z[idx][None, :]))
            R[:, idx[cols]] = (Q @ Y)[:, rows]
        else:
            R[:, idx] = vhs[idx, -1].conj().T
    return R / np.linalg.norm(R, axis=0)


def _seeds(U):
    if isinstance(U, FloquetMatrix):
        return precession_phases(U.config)
    return None


def eigendecompose(U, seeds=None, reference=None) -> SpectralDecomposition:
    """Eigenvalues, right and left eigenvectors of a Floquet matrix.

    ``reference`` (right vectors of a nearby decomposition, same ordering
    convention) switches the phase gauge to maximal overlap.
    """
    entries = U.entries if isinstance(U, FloquetMatrix) else np.asarray(U, dtype=complex)
    Lambda = U.Lambda if isinstance(U, FloquetMatrix) else None
    if not np.all(np.isfinite(entries)):
        raise SolverError("non-finite matrix entries", Lambda)
    if seeds is None:
        seeds = _seeds(U)
    coeffs = char_poly(entries)
    try:
        z = aberth_roots(coeffs, seeds=seeds)
    except SolverError as exc:
        raise SolverError(str(exc), Lambda) from exc
    R = gauge_fix(right_eigenvectors(entries, z), reference)
    cond = np.linalg.cond(R)
    if np.isfinite(cond) and cond < 1 / np.finfo(float).eps:
        L = np.linalg.inv(R)
    else:
        L = np.linalg.pinv(R)
    kappa = np.linalg.norm(L, axis=1) * np.linalg.norm(R, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        indicator = np.clip(1 - np.abs(np.einsum("ij,ji->i", L, R)) / kappa, 0.0, 1.0)
    flags = kappa > EIGEN_CONDITION_LIMIT
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        flags |= kappa > np.sqrt(EIGEN_CONDITION_LIMIT)
        if not flags.any():
            flags[:] = True
    return SpectralDecomposition(
        eigenvalues=z,
        right_vecs=R,
        left_vecs=L,
        quasienergies=quasienergy(z),
        defect_indicator=np.nan_to_num(indicator, nan=1.0),
        condition_flags=flags,
        condition_number=float(cond),
        Lambda=Lambda,
    )


class OrderedQuasienergies(NamedTuple):
    energies: np.ndarray
    order: np.ndarray
    real: bool


def quasienergies_ordered(dec: SpectralDecomposition, previous=None, tol=1e-10) -> OrderedQuasienergies:
    """Quasienergies sorted ascending in [0, 2 pi).

    ``order[n]`` is the index into ``dec.eigenvalues`` of rank n. Exact ties
    are broken by overlap with ``previous`` right vectors (column n of
    ``previous`` belongs to rank n) when given, else by index. ``real`` is
    False when the spectrum is off the unit circle, in which case the ranking
    uses Re E.
    """
    E = dec.quasienergies
    real = bool(np.max(np.abs(np.abs(dec.eigenvalues) - 1)) <= 1e-10)
    order = np.argsort(E, kind="stable")
    if previous is not None:
        sorted_E = E[order]
        start = 0
        while start < order.size:
            stop = start + 1
            while stop < order.size and sorted_E[stop] - sorted_E[start] <= tol:
                stop += 1
            if stop - start > 1:
                block = order[start:stop]
                ov = np.abs(previous[:, start:stop].conj().T @ dec.right_vecs[:, block])
                rows, cols = linear_sum_assignment(-ov)
                order[start:stop] = block[cols[np.argsort(rows)]]
            start = stop
    return OrderedQuasienergies(E[order], order, real)


def solvable_eigensystem(config: TopConfig, Lambda, M, basis="site"):
    """Closed-form eigenpair at omega = 2 pi r / d with the uniform kick.

    Returns ``(z, E, right, left)`` with z = exp(-i(2 pi r M + lambda)/d),
    E = (lambda + 2 pi r M)/d (complex when Lambda is off the unit circle),
    a column ``right`` and a row ``left`` with ``left @ right = 1``. In the
    site basis and r = 1 the components are z^m/sqrt(d) and z^-m/sqrt(d).
    """
    if not config.is_uniform_kick:
        raise PreconditionError("closed form requires the uniform kick")
    r = solvable_r(config)
    d = config.d
    if r is None or gcd(r, d) != 1:
        raise PreconditionError(f"omega={config.omega!r} is not 2 pi r/d with gcd(r, d) = 1")
    twoM = round(2 * M)
    if abs(2 * M - twoM) > 1e-12 or abs(twoM) > config.J.twice_value or (twoM - config.J.twice_value) % 2:
        raise PreconditionError(f"M={M!r} is not a magnetic quantum number for J={config.J}")
    lam = lambda_from_Lambda(Lambda)
    E = (lam + TWO_PI * r * M) / d
    z = np.exp(-1j * E)
    # walk the hopping chain 0 -> r -> 2r ... ; s_m are the entries U[m - r, m]
    wrap = -1.0 if config.J.twice_value % 2 else 1.0
    right = np.empty(d, dtype=complex)
    left = np.empty(d, dtype=complex)
    right[0] = left[0] = 1.0
    acc = 1.0 + 0j
    for n in range(1, d):
        m = (n * r) % d
        s = wrap if m - r < 0 else 1.0
        acc *= s
        right[m] = z ** n / acc
        left[m] = acc * z ** (-n)
    right /= np.sqrt(d)
    left /= np.sqrt(d)
    if basis == "spin":
        B = fourier_site_basis(config.J)
        right = B @ right
        left = left @ B.conj().T
    elif basis != "site":
        raise ValueError(f"unknown basis {basis!r}")
    return z, E, right, left


def spectrum(config: TopConfig, Lambda, **kwargs) -> SpectralDecomposition:
    """Shorthand for ``eigendecompose(build_floquet(config, Lambda))``."""
    return eigendecompose(build_floquet(config, Lambda), **kwargs)
