"""Floquet matrix U(Lambda) of the rank-1 kicked top and its characteristic polynomial.

``Lambda = exp(i*lambda)`` is the canonical parameter. U is unitary exactly
when |Lambda| = 1; off the circle it is a non-normal matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import hessenberg

from .exceptions import PreconditionError, SingularParameterError
from .polyroots import poly_from_roots
from .spin import TopConfig


@dataclass(frozen=True)
class FloquetMatrix:
    entries: np.ndarray
    config: TopConfig
    Lambda: complex
    basis: str = "spin"

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


def lambda_from_Lambda(Lambda) -> complex:
    """Kick strength lambda = -i log(Lambda), principal branch."""
    return -1j * np.log(complex(Lambda))


def Lambda_from_lambda(lam) -> complex:
    return np.exp(1j * complex(lam))


def _check_Lambda(Lambda):
    Lambda = complex(Lambda)
    if Lambda == 0 or not np.isfinite(Lambda):
        raise SingularParameterError(f"Floquet matrix undefined at Lambda={Lambda!r}")
    return Lambda


def precession_phases(config: TopConfig) -> np.ndarray:
    """Diagonal of exp(-i omega J_z): exp(-i omega M)."""
    return np.exp(-1j * config.omega * config.J.m_values())


def build_floquet(config: TopConfig, Lambda) -> FloquetMatrix:
    """U = exp(-i omega Jz) [(1 - |v><v|) + Lambda^-1 |v><v|]."""
    Lambda = _check_Lambda(Lambda)
    P = config.kick.projector()
    inner = np.eye(config.d, dtype=complex) + (1 / Lambda - 1) * P
    U = precession_phases(config)[:, None] * inner
    return FloquetMatrix(U, config, Lambda)


def build_floquet_stack(config: TopConfig, Lambdas) -> np.ndarray:
    """Batched U(Lambda) for an array of Lambda values, shape (..., d, d)."""
    Lambdas = np.asarray(Lambdas, dtype=complex)
    if np.any(Lambdas == 0):
        raise SingularParameterError("Floquet matrix undefined at Lambda=0")
    P = config.kick.projector()
    D = precession_phases(config)
    base = D[:, None] * (np.eye(config.d) - P)
    kicked = D[:, None] * P
    return base + (1 / Lambdas)[..., None, None] * kicked


def solvable_r(config: TopConfig, tol=1e-12) -> int | None:
    """Return r if omega = 2 pi r / d (mod 2 pi), else None."""
    d = config.d
    if config.omega_turns is not None:
        x = config.omega_turns * d
        return int(x) % d if x.denominator == 1 else None
    x = config.omega * d / (2 * np.pi)
    r = round(x)
    return int(r) % d if abs(x - r) <= tol * max(1.0, abs(x)) else None


def companion_floquet(config: TopConfig, Lambda) -> FloquetMatrix:
    """U(Lambda) in the site basis |m> at a solvable omega = 2 pi r / d.

    exp(-i omega Jz) shifts |m> to |m - r>. Wrapping below site 0 costs the
    factor exp(2 pi i J) = (-1)^(2J), so for half-integer J the corner entry
    carries a minus sign. The kick multiplies column 0 (the site |v> = |0>)
    by Lambda^-1.
    """
    Lambda = _check_Lambda(Lambda)
    if not config.is_uniform_kick:
        raise PreconditionError("companion form requires the uniform kick")
    r = solvable_r(config)
    if r is None:
        raise PreconditionError(f"omega={config.omega!r} is not of the form 2 pi r / d")
    d = config.d
    wrap = -1.0 if config.J.twice_value % 2 else 1.0
    U = np.zeros((d, d), dtype=complex)
    for m in range(d):
        target = m - r
        sign = 1.0
        if target < 0:
            target += d
            sign = wrap
        U[target, m] = sign
    U[:, 0] /= Lambda
    return FloquetMatrix(U, config, Lambda, basis="site")


def hessenberg_charpoly(A) -> np.ndarray:
    """Ascending coefficients of det(z - A) via Hessenberg reduction.

    The recurrence runs over leading principal minors of the upper
    Hessenberg form H:
        p_k = (z - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1}^{k} h_{j,j-1}) p_{i-1}
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    H = hessenberg(A)
    polys = [np.array([1.0 + 0j])]
    for k in range(n):
        pk = np.concatenate([[0], polys[k]]) - H[k, k] * np.concatenate([polys[k], [0]])
        prod = 1.0 + 0j
        for i in range(k - 1, -1, -1):
            prod *= H[i + 1, i]
            if prod == 0:
                break
            term = H[i, k] * prod * polys[i]
            pk[: term.size] -= term
        polys.append(pk)
    return polys[n]


def char_poly(U) -> np.ndarray:
    """Monic ascending coefficients of det(z - U), length d + 1."""
    entries = U.entries if isinstance(U, FloquetMatrix) else np.asarray(U)
    return hessenberg_charpoly(entries)


def char_poly_affine_split(config: TopConfig):
    """Return (g, h) with det(z - U(Lambda)) = g(z) + Lambda^-1 h(z).

    By the matrix determinant lemma, with D = exp(-i omega Jz) and
    c_M = |<J,M|v>|^2,
        h(z) = -sum_M c_M e_M prod_{M' != M} (z - e_M'),   e_M = exp(-i omega M)
    and g = prod_M (z - e_M) - h.
    """
    e = precession_phases(config)
    c = np.abs(config.kick.coeffs) ** 2
    d = config.d
    full = poly_from_roots(e)
    h = np.zeros(d + 1, dtype=complex)
    for k in range(d):
        partial = poly_from_roots(np.delete(e, k))
        h[:d] -= c[k] * e[k] * partial
    g = full - h
    return g, h


def char_poly_from_split(g, h, Lambda) -> np.ndarray:
    return g + h / complex(Lambda)


def solvable_turns(omega) -> Fraction | None:
    """Best small-denominator fraction for omega / 2 pi, when exact to 1e-12."""
    x = omega / (2 * np.pi)
    f = Fraction(x).limit_denominator(10_000)
    return f if abs(float(f) - x) <= 1e-12 else None
