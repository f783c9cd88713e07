"""Angular-momentum operators, kick vectors and the Fourier site basis.

All arrays are ordered by magnetic quantum number M = -J, ..., J ascending.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import PreconditionError, UnsupportedCaseError


@dataclass(frozen=True)
class HalfInt:
    """Spin quantum number stored as ``twice_value = 2J`` so J stays exact."""

    twice_value: int

    def __post_init__(self):
        if int(self.twice_value) != self.twice_value or self.twice_value < 1:
            raise PreconditionError(f"2J must be a positive integer, got {self.twice_value!r}")

    @classmethod
    def from_value(cls, J) -> "HalfInt":
        twice = Fraction(J) * 2
        if twice.denominator != 1:
            raise PreconditionError(f"J={J!r} is not an integer or half-integer")
        return cls(int(twice))

    @property
    def value(self) -> float:
        return self.twice_value / 2

    @property
    def d(self) -> int:
        return self.twice_value + 1

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def m_values(self) -> np.ndarray:
        return (np.arange(self.d) - self.twice_value / 2).astype(float)

    def __str__(self):
        return str(self.twice_value // 2) if self.is_integer else f"{self.twice_value}/2"


def _as_halfint(J) -> HalfInt:
    return J if isinstance(J, HalfInt) else HalfInt.from_value(J)


@dataclass(frozen=True)
class KickVector:
    """Coefficients <J,M|v> of the rank-1 kick, ordered M = -J..J."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        norm = np.sum(np.abs(c) ** 2)
        if abs(norm - 1.0) > 1e-12:
            raise PreconditionError(f"kick vector must have unit norm, got |v|^2={norm!r}")

    @classmethod
    def normalized(cls, coeffs) -> "KickVector":
        c = np.asarray(coeffs, dtype=complex).ravel()
        n = np.linalg.norm(c)
        if n == 0:
            raise PreconditionError("kick vector is zero")
        return cls(c / n)

    @property
    def d(self) -> int:
        return self.coeffs.size

    def projector(self) -> np.ndarray:
        return np.outer(self.coeffs, self.coeffs.conj())

    def has_full_support(self, tol: float = 1e-12) -> bool:
        """True when every <J,M|v> is nonzero (the cyclic condition)."""
        return bool(np.all(np.abs(self.coeffs) > tol))

    def __eq__(self, other):
        return isinstance(other, KickVector) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())


@dataclass(frozen=True)
class TopConfig:
    """Spin J, precession angle omega and kick vector defining U(Lambda).

    ``omega_turns`` optionally holds omega / 2pi as an exact fraction; it is
    filled in by the symbolic parser and used for exact resonance tests.
    """

    J: HalfInt
    omega: float
    kick: KickVector = None
    omega_turns: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        J = _as_halfint(self.J)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "omega", float(self.omega))
        kick = uniform_kick(J) if self.kick is None else self.kick
        if not isinstance(kick, KickVector):
            kick = KickVector(kick)
        if kick.d != J.d:
            raise PreconditionError(f"kick has dimension {kick.d}, expected d={J.d}")
        object.__setattr__(self, "kick", kick)

    @property
    def d(self) -> int:
        return self.J.d

    @property
    def is_uniform_kick(self) -> bool:
        return bool(np.allclose(self.kick.coeffs, 1 / np.sqrt(self.d), atol=1e-14, rtol=0))

    def with_omega(self, omega, omega_turns=None) -> "TopConfig":
        return TopConfig(self.J, omega, self.kick, omega_turns)


def build_jz(J) -> np.ndarray:
    J = _as_halfint(J)
    return np.diag(J.m_values())


def build_jplus(J) -> np.ndarray:
    J = _as_halfint(J)
    j = J.value
    m = J.m_values()
    # J+ |J,M> = sqrt(j(j+1) - M(M+1)) |J,M+1>, M+1 is the next index up
    off = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    return np.diag(off, k=-1)


def build_jy(J) -> np.ndarray:
    jp = build_jplus(J)
    return (jp - jp.conj().T) / 2j


def uniform_kick(J) -> KickVector:
    J = _as_halfint(J)
    return KickVector(np.full(J.d, 1 / np.sqrt(J.d), dtype=complex))


def multipole_projector(J) -> np.ndarray:
    """Rank-1 kick written as a polynomial in J_y (J = 1/2, 1, 3/2 only).

    Each polynomial vanishes on every J_y eigenvalue except +J, so the result
    projects onto the J_y highest-weight state.
    """
    J = _as_halfint(J)
    jy = build_jy(J)
    eye = np.eye(J.d)
    if J.twice_value == 1:
        return jy + 0.5 * eye
    if J.twice_value == 2:
        return 0.5 * (jy + eye) @ jy
    if J.twice_value == 3:
        return (jy + 1.5 * eye) @ (jy + 0.5 * eye) @ (jy - 0.5 * eye) / 6
    raise UnsupportedCaseError(f"no multipole projector tabulated for J={J}")


def fourier_site_basis(J) -> np.ndarray:
    """Columns are the site states |m>, m = 0..d-1, in the |J,M> basis.

    ``B[k, m] = exp(2j*pi*M_k*m/d)/sqrt(d)``. For half-integer J the site
    index is only periodic up to a sign, ``|m+d> = -|m>``.
    """
    J = _as_halfint(J)
    d = J.d
    M = J.m_values()
    m = np.arange(d)
    return np.exp(2j * np.pi * np.outer(M, m) / d) / np.sqrt(d)
