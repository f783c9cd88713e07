"""Input checks shared by the estimators and the command line."""
from __future__ import annotations

import re
from fractions import Fraction

import numpy as np

from .exceptions import PreconditionError, SingularParameterError
from .spin import HalfInt, KickVector, TopConfig

_OMEGA_TOKEN = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?P<coef>\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+))?\s*$",
    re.IGNORECASE,
)


def parse_omega(token) -> tuple[float, Fraction | None]:
    """Parse omega from a number or a symbolic token such as ``2pi/3``.

    Returns ``(omega, turns)`` where ``turns`` is omega / 2 pi as an exact
    fraction for symbolic input and ``None`` for plain decimals.

    Examples
    --------
    >>> parse_omega("2pi/3")[1]
    Fraction(1, 3)
    >>> parse_omega("pi/6")[1]
    Fraction(1, 12)
    """
    if isinstance(token, (int, float, np.floating)):
        return check_finite_real(token, "omega"), None
    text = str(token).strip()
    m = _OMEGA_TOKEN.match(text)
    if m:
        coef = Fraction(m.group("coef")) if m.group("coef") else Fraction(1)
        den = int(m.group("den") or 1)
        if den == 0:
            raise PreconditionError(f"omega token {text!r} divides by zero")
        if m.group("sign") == "-":
            coef = -coef
        turns = coef / (2 * den)
        return np.pi * coef.numerator / (coef.denominator * den), turns
    try:
        value = float(text)
    except ValueError:
        raise PreconditionError(f"cannot parse omega from {text!r}") from None
    return check_finite_real(value, "omega"), None


def check_finite_real(x, name="value") -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise PreconditionError(f"{name} must be a real number, got {x!r}") from None
    if not np.isfinite(v):
        raise PreconditionError(f"{name} must be finite, got {x!r}")
    return v


def check_two_j(two_j) -> HalfInt:
    try:
        t = int(two_j)
    except (TypeError, ValueError):
        raise PreconditionError(f"2J must be a positive integer, got {two_j!r}") from None
    if t != float(two_j) or t < 1:
        raise PreconditionError(f"2J must be a positive integer, got {two_j!r}")
    return HalfInt(t)


def parse_kick(spec, d: int) -> KickVector | None:
    """``uniform`` (or None) or comma-separated coefficients, normalised.

    Coefficients may be complex in Python notation (``1+2j``).
    """
    if spec is None:
        return None
    if isinstance(spec, KickVector):
        return spec
    if isinstance(spec, str):
        if spec.strip().lower() in ("", "uniform"):
            return None
        try:
            coeffs = [complex(p.strip().replace(" ", "")) for p in spec.split(",")]
        except ValueError:
            raise PreconditionError(f"cannot parse kick coefficients {spec!r}") from None
    else:
        coeffs = list(spec)
    arr = np.asarray(coeffs, dtype=complex)
    if arr.size != d:
        raise PreconditionError(f"kick needs {d} coefficients, got {arr.size}")
    if not np.all(np.isfinite(arr)) or np.linalg.norm(arr) == 0:
        raise PreconditionError("kick coefficients must be finite and not all zero")
    return KickVector.normalized(arr)


def make_config(two_j, omega, kick=None) -> TopConfig:
    J = check_two_j(two_j)
    om, turns = parse_omega(omega)
    return TopConfig(J, om, parse_kick(kick, J.d), turns)


def check_lambda_array(Lambdas, allow_zero=False) -> np.ndarray:
    """Complex 1-d array of finite kick parameters.

    Real input is accepted. Zero is rejected unless ``allow_zero``.
    """
    arr = np.asarray(Lambdas)
    if arr.dtype == object:
        raise PreconditionError("Lambda values must be numeric")
    arr = np.atleast_1d(arr.astype(complex)).ravel()
    if arr.size == 0:
        raise PreconditionError("no Lambda values given")
    if not np.all(np.isfinite(arr)):
        raise PreconditionError("Lambda values must be finite")
    if not allow_zero and np.any(arr == 0):
        raise SingularParameterError("Lambda = 0 is a pole of the Floquet family")
    return arr


def check_omega_grid(grid) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(grid, dtype=float)).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise PreconditionError("omega grid must be a non-empty array of finite values")
    return arr


def parse_region(spec) -> tuple[float, float, float, float]:
    """``xmin,xmax,ymin,ymax`` as a string or sequence."""
    parts = spec.split(",") if isinstance(spec, str) else list(spec)
    if len(parts) != 4:
        raise PreconditionError("region needs four numbers: xmin,xmax,ymin,ymax")
    x0, x1, y0, y1 = (check_finite_real(p, "region bound") for p in parts)
    if not (x1 > x0 and y1 > y0):
        raise PreconditionError("region must satisfy xmin < xmax and ymin < ymax")
    return x0, x1, y0, y1


def parse_resolution(spec) -> tuple[int, int]:
    """``n`` or ``nx,ny``; each at least 2."""
    parts = str(spec).split(",") if not isinstance(spec, (tuple, list)) else list(spec)
    try:
        vals = [int(p) for p in parts]
    except ValueError:
        raise PreconditionError(f"cannot parse resolution {spec!r}") from None
    if len(vals) == 1:
        vals = vals * 2
    if len(vals) != 2 or min(vals) < 2:
        raise PreconditionError("resolution must be n or nx,ny with every entry >= 2")
    return vals[0], vals[1]


def parse_omega_scan(spec) -> np.ndarray:
    """``start,stop,n`` (inclusive); start and stop accept symbolic tokens."""
    parts = spec.split(",") if isinstance(spec, str) else list(spec)
    if len(parts) != 3:
        raise PreconditionError("omega scan needs start,stop,n")
    a = parse_omega(parts[0])[0]
    b = parse_omega(parts[1])[0]
    try:
        n = int(parts[2])
    except ValueError:
        raise PreconditionError(f"cannot parse scan count {parts[2]!r}") from None
    if n < 2 or not b > a:
        raise PreconditionError("omega scan needs stop > start and n >= 2")
    return np.linspace(a, b, n)
