"""Scalar q-calculus primitives.

All functions accept Python/numpy complex scalars. Complex powers ``q**eta``
with non-integer ``eta`` use the principal branch ``exp(eta * Log q)``;
integer exponents go through ordinary integer powering so that e.g.
``[2]_q == 1 + q`` holds exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, NumericOverflowError

__all__ = [
    "QContext",
    "q_power",
    "q_pochhammer",
    "q_number",
    "q_factorial",
    "q_derivative",
    "theta",
    "check_pole",
]


@dataclass(frozen=True)
class QContext:
    """Base ``q`` together with the numeric tolerances used downstream.

    ``pole_margin`` is the minimum distance any ``1 - eta q^k`` style
    denominator factor must keep from zero.
    """

    q: complex
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    pole_margin: float = 1e-3

    def __post_init__(self):
        q = complex(self.q)
        if not (cmath.isfinite(q) and 0.0 < abs(q) < 1.0):
            raise DomainError(f"base q must satisfy 0 < |q| < 1, got {q!r}")
        for name in ("rel_tol", "abs_tol", "pole_margin"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be strictly positive, got {val!r}")
        object.__setattr__(self, "q", q)

    @property
    def log_q(self) -> complex:
        return cmath.log(self.q)


def _as_int(eta) -> int | None:
    z = complex(eta)
    if z.imag == 0.0 and z.real.is_integer():
        return int(z.real)
    return None


def q_power(eta, ctx: QContext) -> complex:
    """``q**eta``; principal branch for non-integer exponents."""
    n = _as_int(eta)
    if n is not None:
        return ctx.q**n
    return cmath.exp(complex(eta) * ctx.log_q)


def _finite(z: complex, what: str) -> complex:
    if not cmath.isfinite(z):
        raise NumericOverflowError(f"{what} overflowed")
    return z


def q_pochhammer(eta, ctx: QContext, n: int) -> complex:
    """Finite q-shifted factorial ``(eta; q)_n`` by forward accumulation."""
    if n < 0:
        raise DomainError(f"n must be non-negative, got {n}")
    eta = complex(eta)
    q = ctx.q
    prod = 1.0 + 0.0j
    qr = 1.0 + 0.0j
    for _ in range(n):
        prod *= 1.0 - eta * qr
        qr *= q
    return _finite(prod, "q-Pochhammer product")


def q_number(eta, ctx: QContext) -> complex:
    """q-bracket ``[eta]_q = (1 - q**eta) / (1 - q)``."""
    return _finite((1.0 - q_power(eta, ctx)) / (1.0 - ctx.q), "q-number")


def q_factorial(m: int, ctx: QContext) -> complex:
    if m < 0:
        raise DomainError(f"m must be non-negative, got {m}")
    prod = 1.0 + 0.0j
    for r in range(1, m + 1):
        prod *= q_number(r, ctx)
    return _finite(prod, "q-factorial")


def q_derivative(f: Callable[[complex], complex], z, ctx: QContext) -> complex:
    """Jackson difference quotient ``(f(z) - f(qz)) / ((1 - q) z)``.

    The ``z = 0`` case needs the derivative of ``f`` itself; black-box
    callables cannot supply it, so use the series-aware derivatives in
    :mod:`qhorn.series` there.
    """
    z = complex(z)
    if z == 0:
        raise DomainError(
            "q_derivative is undefined at z = 0 for a black-box function; "
            "use the series-aware derivative (qhorn.series.q_partial_x/y)"
        )
    q = ctx.q
    return _finite((f(z) - f(q * z)) / ((1.0 - q) * z), "q-derivative")


def theta(f: Callable[[complex], complex], z, ctx: QContext) -> complex:
    """``z * D_{z,q} f(z)``; defined as 0 at the origin."""
    z = complex(z)
    if z == 0:
        return 0j
    return _finite((f(z) - f(ctx.q * z)) / (1.0 - ctx.q), "theta operator")


def check_pole(value, ctx: QContext, label: str) -> None:
    """Raise DomainError if ``|value| <= ctx.pole_margin``."""
    if abs(complex(value)) <= ctx.pole_margin:
        raise DomainError(f"pole guard: |{label}| = {abs(complex(value)):.3g} <= margin {ctx.pole_margin:g}")
