"""Closed-form degeneracy analysis of the J = 1 kicked top.

For d = 3 the characteristic polynomial is z^3 + f2 z^2 + f1 z + f0 with
coefficients affine in w = 1/Lambda, so its discriminant D is a quartic in w
and every degeneracy can be written down explicitly.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .exceptions import SingularParameterError
from .polyroots import sylvester_matrix

EXCEPTIONAL = "exceptional"
DIABOLIC = "diabolic"

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class EPRecord:
    """A degeneracy of U(Lambda) in the Lambda-plane.

    ``Lambda`` is ``complex('inf')`` when ``at_infinity`` is set.
    ``merged_branches`` lists the sheet labels M that coalesce, when known.
    """

    Lambda: complex
    order: int
    kind: str
    omega: float
    merged_branches: tuple = ()
    at_infinity: bool = False
    multiplicity: int | None = None
    monodromy: object = field(default=None, compare=False, repr=False)

    @property
    def w(self) -> complex:
        return 0j if self.at_infinity else (np.inf if self.Lambda == 0 else 1 / self.Lambda)

    def to_dict(self) -> dict:
        L = complex(self.Lambda)
        out = {
            "omega": self.omega,
            "re_lambda": None if self.at_infinity else L.real,
            "im_lambda": None if self.at_infinity else L.imag,
            "order": self.order,
            "kind": self.kind,
            "at_infinity": self.at_infinity,
            "merged_branches": list(self.merged_branches),
        }
        if self.multiplicity is not None:
            out["discriminant_multiplicity"] = self.multiplicity
        return out


def at_infinity_record(order, omega, **kw) -> EPRecord:
    return EPRecord(complex(np.inf, 0), order, EXCEPTIONAL, omega, at_infinity=True, **kw)


def mu_of_omega(omega):
    return -(1 + 2 * np.cos(omega)) / 3


@dataclass(frozen=True)
class CubicData:
    mu: float
    Lambda: complex
    f2: complex
    f1: complex
    f0: complex
    p: complex
    q: complex
    D: complex

    @property
    def coeffs(self) -> np.ndarray:
        """Ascending coefficients (f0, f1, f2, 1)."""
        return np.array([self.f0, self.f1, self.f2, 1.0], dtype=complex)


def cubic_data(omega, Lambda) -> CubicData:
    """Characteristic-cubic data at (omega, Lambda).

    q uses 2 f2^3 (the depressed-cubic constant term), which is what the
    tabulated coefficients q_n below expand from.
    """
    Lambda = complex(Lambda)
    if Lambda == 0:
        raise SingularParameterError("Lambda = 0")
    mu = mu_of_omega(omega)
    w = 1 / Lambda
    f2 = (2 + w) * mu
    f1 = -(1 + 2 * w) * mu
    f0 = -w
    p = (3 * f1 - f2 ** 2) / 9
    q = (2 * f2 ** 3 - 9 * f2 * f1 + 27 * f0) / 27
    D = -27 * (q ** 2 + 4 * p ** 3)
    return CubicData(mu, Lambda, f2, f1, f0, p, q, D)


def _cube_roots(x):
    r = complex(x) ** (1 / 3) if x != 0 else 0j
    return [r * cmath.exp(2j * cmath.pi * k / 3) for k in range(3)]


def cardano_roots(data: CubicData, rtol=1e-13) -> np.ndarray:
    """Three roots of the cubic by Cardano's formula.

    With D = 0 the roots are z_c + 2c (simple) and z_c - c (double), where
    c^3 = -q/2 and c^2 = -p select the cube root.
    """
    p, q = data.p, data.q
    zc = -data.f2 / 3
    scale = max(abs(q) ** 2, 4 * abs(p) ** 3)
    if abs(q ** 2 + 4 * p ** 3) <= rtol * scale or scale == 0:
        c = min(_cube_roots(-q / 2), key=lambda r: abs(r * r + p))
        return np.array([zc + 2 * c, zc - c, zc - c])
    # depressed cubic t^3 + P t + Q with P = 3p, Q = q
    P, Q = 3 * p, q
    s = cmath.sqrt(Q * Q / 4 + P ** 3 / 27)
    u3 = -Q / 2 + s if abs(-Q / 2 + s) >= abs(-Q / 2 - s) else -Q / 2 - s
    u = complex(u3) ** (1 / 3)
    v = -P / (3 * u) if u != 0 else 0j
    eps = cmath.exp(2j * cmath.pi / 3)
    t = np.array([u + v, u * eps + v / eps, u / eps + v * eps])
    return zc + t


def discriminant_quartic(mu):
    """Coefficients (D0, ..., D4) with D = sum_n Dn w^(4 - n), w = 1/Lambda.

    Works for float or Fraction ``mu``.
    """
    D0 = 4 * (mu + 1) * mu ** 3
    D1 = 4 * (mu + 1) * (9 + 5 * mu) * mu ** 2
    D2 = -3 * (mu + 1) * (9 - 9 * mu - 21 * mu ** 2 - 11 * mu ** 3)
    return [D0, D1, D2, D1, D0]


def q_cubic(mu):
    """Coefficients (q0, ..., q3) with q = sum_n qn w^(3 - n)."""
    if isinstance(mu, Fraction):
        F = Fraction
    else:
        def F(a, b=1):
            return a / b
    q0 = 2 * mu ** 3 * F(1, 27)
    q1 = 2 * mu ** 2 * (3 + 2 * mu) * F(1, 9)
    q2 = -(9 - 15 * mu ** 2 - 8 * mu ** 3) * F(1, 9)
    q3 = 2 * mu ** 2 * (9 + 8 * mu) * F(1, 27)
    return [q0, q1, q2, q3]


def eval_descending(coeffs, x):
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def bareiss_det(M):
    """Fraction-free exact determinant (Bareiss elimination)."""
    A = [list(map(Fraction, row)) for row in M]
    n = len(A)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return Fraction(0)
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def resultant_closed_form(mu):
    if isinstance(mu, Fraction):
        return Fraction(16, 27) * (3 - mu) ** 3 * mu ** 9 * (1 + mu) ** 9
    return 16 / 27 * (3 - mu) ** 3 * mu ** 9 * (1 + mu) ** 9


class ResultantCheck(NamedTuple):
    mu: object
    sylvester: object
    closed_form: object
    scale: float

    @property
    def relative_error(self) -> float:
        """|Sylvester - closed form| over the Hadamard bound of the matrix."""
        return float(abs(self.sylvester - self.closed_form)) / self.scale


def resultant_Dq(mu, exact=None) -> ResultantCheck:
    """Sylvester resultant R(D, q) of the quartic D and cubic q in w.

    ``exact`` defaults to True for Fraction input; the determinant is then
    computed without rounding. The closed form is returned alongside.
    """
    if exact is None:
        exact = isinstance(mu, Fraction)
    if exact:
        mu = Fraction(mu)
    D = discriminant_quartic(mu)
    q = q_cubic(mu)
    if exact:
        S = sylvester_matrix(np.array(D, dtype=object), np.array(q, dtype=object))
        value = bareiss_det(S.tolist())
    else:
        value = float(np.linalg.det(sylvester_matrix(np.array(D, float), np.array(q, float))))
    Dn = float(np.linalg.norm(np.array(D, dtype=float)))
    qn = float(np.linalg.norm(np.array(q, dtype=float)))
    scale = max(Dn ** 3 * qn ** 4, np.finfo(float).tiny)
    return ResultantCheck(mu, value, resultant_closed_form(mu), scale)


def y_roots_general(mu):
    """Roots in y = Lambda + 1/Lambda of D/(Lambda^-2) = 0, from the quadratic form."""
    mu = complex(mu)
    centre = -(9 + 5 * mu) / (2 * mu)
    half = cmath.sqrt(27 * (1 + mu) ** 2 / (4 * mu ** 3))
    return centre + half, centre - half


def _lambda_pair(y):
    s = cmath.sqrt(y * y - 4)
    return (y + s) / 2, (y - s) / 2


def eta_of_mu(mu):
    return np.sqrt(abs(mu) / 3)


def y_pm(eta):
    """Real y roots for 0 < mu <= 1/3."""
    base = -(3 + 5 * eta ** 2) * eta
    spread = 1 + 3 * eta ** 2
    return (base + spread) / (2 * eta ** 3), (base - spread) / (2 * eta ** 3)


def y_c(eta):
    """Complex y root for -1 < mu < 0 (its conjugate is the other root)."""
    return ((3 - 5 * eta ** 2) * eta + 1j * (1 - 3 * eta ** 2)) / (2 * eta ** 3)


def classify_mu(mu, tol=1e-12) -> str:
    if abs(mu + 1) <= tol:
        return "T2"
    if abs(mu) <= tol:
        return "T1"
    if abs(mu - 1 / 3) <= tol:
        return "D1"
    return "D2" if mu > 0 else "D3"


def ep_locations_J1(omega) -> list[EPRecord]:
    """Every finite (and at-infinity) degeneracy point of the J = 1 top.

    omega outside [0, pi] is reflected, since the configuration depends on
    cos(omega) only.
    """
    mu = mu_of_omega(omega)
    case = classify_mu(mu)
    E, Dk = EXCEPTIONAL, DIABOLIC
    if case == "T1":
        return [EPRecord(0j, 3, E, omega, multiplicity=2),
                at_infinity_record(3, omega, multiplicity=2)]
    if case == "T2":
        return [EPRecord(1 + 0j, 3, Dk, omega)]
    if case == "D1":
        a = 17 + 12 * SQRT2
        return [EPRecord(1 + 0j, 2, Dk, omega, multiplicity=2),
                EPRecord(complex(-a), 2, E, omega, multiplicity=1),
                EPRecord(complex(-1 / a), 2, E, omega, multiplicity=1)]
    eta = eta_of_mu(mu)
    if case == "D2":
        ys = y_pm(eta)
    else:
        yc = y_c(eta)
        ys = (yc, np.conj(yc))
    out = []
    for y in ys:
        for L in _lambda_pair(complex(y)):
            if case == "D2":
                L = complex(L.real, 0.0)
            out.append(EPRecord(L, 2, E, omega, multiplicity=1))
    return out


def split_inside(records):
    """Finite records strictly inside the unit circle."""
    return [r for r in records if not r.at_infinity and abs(r.Lambda) < 1 - 1e-12]
