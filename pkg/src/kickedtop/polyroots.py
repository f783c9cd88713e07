"""Polynomial helpers on ascending coefficient arrays and an Aberth solver."""
from __future__ import annotations

import numpy as np

from .exceptions import SolverError


def horner(coeffs, z):
    """Evaluate p(z) and p'(z) for ascending ``coeffs`` (z may be an array)."""
    z = np.asarray(z, dtype=complex)
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def trim_leading(coeffs, rtol=0.0):
    """Drop top-degree coefficients whose magnitude is <= rtol * max|c|."""
    c = np.asarray(coeffs, dtype=complex)
    scale = np.max(np.abs(c)) if c.size else 0.0
    n = c.size
    while n > 1 and abs(c[n - 1]) <= rtol * scale:
        n -= 1
    return c[:n]


def _initial_guesses(c):
    # Bini's circle start: centroid plus a ring whose radius bounds the roots
    n = c.size - 1
    a = c / c[-1]
    center = -a[n - 1] / n
    radius = max(np.max(np.abs(a[:-1])) ** (1.0 / n), 1e-3) if n else 1.0
    k = np.arange(n)
    return center + radius * np.exp(2j * np.pi * k / n + 0.4j)


def aberth_roots(coeffs, seeds=None, tol=1e-15, maxiter=500):
    """All roots of the polynomial with ascending ``coeffs``.

    Seeds close to the final roots (for instance the spectrum at a nearby
    parameter) make the iteration converge in a handful of steps. Coincident
    seeds are split apart, since the Aberth correction is singular for them.
    """
    c = trim_leading(coeffs)
    n = c.size - 1
    if n < 1:
        return np.empty(0, dtype=complex)
    if n == 1:
        return np.array([-c[0] / c[1]])
    c = c / c[-1]
    if seeds is None:
        z = _initial_guesses(c)
    else:
        z = np.array(seeds, dtype=complex).ravel()[:n].copy()
        if z.size < n:
            z = np.concatenate([z, _initial_guesses(c)[z.size:]])
        scale = max(1.0, np.max(np.abs(z)))
        for i in range(n):
            for j in range(i):
                if abs(z[i] - z[j]) < 1e-7 * scale:
                    z[i] += 1e-5 * scale * np.exp(2j * np.pi * (i + 0.1) / n)
    active = np.ones(n, dtype=bool)
    prev = np.full(n, np.inf)
    for _ in range(maxiter):
        p, dp = horner(c, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(p == 0, 0, p / dp)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            step = ratio / (1 - ratio * s)
        step = np.where(np.isfinite(step), step, 0)
        step[~active] = 0
        z = z - step
        mag = np.abs(step)
        scale = 1 + np.abs(z)
        # converged, or stalled at rounding level
        small = (mag <= tol * scale) | ((mag <= 1e-11 * scale) & (mag >= 0.5 * prev))
        prev = np.where(active, mag, prev)
        active &= ~small
        if not active.any():
            return z
    if np.all(np.abs(horner(c, z)[0]) <= 1e-8 * np.max(np.abs(c)) * (1 + np.abs(z)) ** n):
        return z
    raise SolverError(f"Aberth iteration did not converge in {maxiter} steps")


def poly_from_roots(roots):
    """Monic ascending coefficients of prod (z - r)."""
    c = np.array([1.0 + 0j])
    for r in roots:
        c = np.concatenate([[0], c]) - r * np.concatenate([c, [0]])
    return c


def polymul(a, b):
    return np.convolve(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def polyder(c):
    c = np.asarray(c, dtype=complex)
    if c.size <= 1:
        return np.zeros(1, dtype=complex)
    return c[1:] * np.arange(1, c.size)


def sylvester_matrix(a, b):
    """Sylvester matrix of two polynomials given highest-degree-first.

    Rows hold shifted copies of ``a`` (deg b of them) followed by shifted
    copies of ``b`` (deg a of them).
    """
    a = np.asarray(a)
    b = np.asarray(b)
    m, n = a.size - 1, b.size - 1
    size = m + n
    dtype = np.result_type(a, b, float)
    S = np.zeros((size, size), dtype=dtype)
    for i in range(n):
        S[i, i:i + m + 1] = a
    for i in range(m):
        S[n + i, i:i + n + 1] = b
    return S


def resultant(a, b):
    """Sylvester-determinant resultant; coefficients highest-degree-first."""
    return np.linalg.det(sylvester_matrix(a, b))


def discriminant(coeffs):
    """Discriminant of a polynomial with ascending ``coeffs``.

    Uses Disc(f) = (-1)^(n(n-1)/2) Res(f, f') / a_n.
    """
    c = trim_leading(coeffs)
    n = c.size - 1
    if n < 1:
        return 0j
    high = c[::-1]
    dhigh = polyder(c)[::-1]
    res = resultant(high, dhigh)
    return (-1) ** (n * (n - 1) // 2) * res / c[-1]
