"""Encoded contiguous relations, q-derivative formulas and q-difference
equations for H6, H7 and their exponent forms.

Every record is an equation ``sum(lhs) == sum(rhs)`` over
:class:`~qhorn.series.TransformedSeries`. Operators are encoded term-wise:

* ``theta_x F(x q^j, ...)`` multiplies the r-th term by ``[r]_q``;
  ``theta_y`` likewise with ``[s]_q``.
* ``[A theta_x + B theta_y + C]_q`` multiplies by ``[A r + B s + C]_q``.
* ``[theta_x]_q [theta_y]_q`` is ``[r]_q [s]_q``.
* ``[theta_x^2]_q`` is ambiguous; the literal reading is ``([r]_q)**2`` and
  ``[r**2]_q`` is registered as an amended reading.
* ``D_{alpha,q} F`` is ``(F(alpha) - F(alpha q)) / ((1 - q) alpha)``, i.e. two
  series with prefactors.
* ``x^n D^n_{x,q} F`` (the derivative formulas, multiplied through by
  ``x^n`` so they stay finite at the origin) uses the falling bracket
  ``[r]_q [r-1]_q ... [r-n+1]_q``.

For exponent-form records the environment values ``a``, ``b``, ``c`` are
``q**alpha``, ``q**beta``, ``q**gamma``, so ``[alpha]_q == (1 - a)/(1 - q)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from ..series import H6, H7, Env, Multiplier, Prefactor, TransformedSeries

__all__ = ["Constraint", "Reading", "IdentityRecord", "registry", "get_record", "FAMILIES", "DERIVATIVE_ORDER"]

FAMILIES = ("H6", "H7", "H6exp", "H7exp")

# the x^n D^n formulas are registered at this order
DERIVATIVE_ORDER = 2


@dataclass(frozen=True)
class Constraint:
    """``fn(env)`` must stay farther than the pole margin from zero."""

    label: str
    fn: Callable = field(compare=False, repr=False)

    def value(self, env: Env) -> complex:
        return complex(self.fn(env))


@dataclass(frozen=True)
class Reading:
    """One way of reading a printed equation."""

    name: str
    lhs: tuple
    rhs: tuple
    rationale: str = ""

    @property
    def series(self) -> tuple:
        return self.lhs + self.rhs


@dataclass(frozen=True)
class IdentityRecord:
    id: str
    eq_label: str
    family: str
    lhs: tuple
    rhs: tuple
    constraints: tuple = ()
    variants: tuple = ()
    free_symbols: tuple = ()
    printed_constraint: str | None = None
    derivative: tuple | None = None

    def __post_init__(self):
        if not self.lhs or not self.rhs:
            raise ValueError(f"{self.id}: both sides must be non-empty")
        if self.family not in FAMILIES:
            raise ValueError(f"{self.id}: unknown family {self.family!r}")

    @property
    def kind(self) -> str:
        return H6 if self.family.startswith("H6") else H7

    @property
    def is_exp(self) -> bool:
        return self.family.endswith("exp")

    @property
    def literal(self) -> Reading:
        return Reading("literal", self.lhs, self.rhs, "as printed")

    @property
    def readings(self) -> tuple:
        return (self.literal,) + tuple(self.variants)

    def reading(self, name: str) -> Reading:
        for rd in self.readings:
            if rd.name == name:
                return rd
        raise KeyError(f"{self.id} has no reading {name!r}")

    def all_series(self):
        for rd in self.readings:
            yield from rd.series


# ---------------------------------------------------------------------------
# vocabulary


def _qb(n, q):
    return (1.0 - np.power(q, n)) / (1.0 - q)


TX = Multiplier("[r]", lambda r, s, e: _qb(r, e.q))
TY = Multiplier("[s]", lambda r, s, e: _qb(s, e.q))
TXY = Multiplier("[r+s]", lambda r, s, e: _qb(r + s, e.q))
T2XY = Multiplier("[2r+s]", lambda r, s, e: _qb(2 * r + s, e.q))
TX_TY = TX * TY
TX_TX = TX * TX
TY_TY = TY * TY
TXX_INNER = Multiplier("[r^2]", lambda r, s, e: _qb(r * r, e.q))
TYY_INNER = Multiplier("[s^2]", lambda r, s, e: _qb(s * s, e.q))
TXX_OUTER = Multiplier("[r]^2", lambda r, s, e: _qb(r, e.q) ** 2)
TYY_OUTER = Multiplier("[s]^2", lambda r, s, e: _qb(s, e.q) ** 2)
BR_ALPHA = Multiplier("[2r+s+alpha]", lambda r, s, e: (1.0 - e.a * np.power(e.q, 2 * r + s)) / (1.0 - e.q))
BR_BETA6 = Multiplier("[r+s+beta-1]", lambda r, s, e: (1.0 - e.b / e.q * np.power(e.q, r + s)) / (1.0 - e.q))
BR_BETA7 = Multiplier("[r+beta-1]", lambda r, s, e: (1.0 - e.b / e.q * np.power(e.q, r)) / (1.0 - e.q))
BR_GAMMA7 = Multiplier("[s+gamma-1]", lambda r, s, e: (1.0 - e.c / e.q * np.power(e.q, s)) / (1.0 - e.q))


def _falling(var: str, order: int) -> Multiplier:
    def fn(r, s, e):
        n = r if var == "x" else s
        out = np.ones(np.shape(n), dtype=complex)
        for i in range(order):
            out = out * _qb(n - i, e.q)
        return out

    return Multiplier(f"[{'r' if var == 'x' else 's'}]_{order}!", fn)


_SQUARE = {"outer": (TXX_OUTER, TYY_OUTER), "inner": (TXX_INNER, TYY_INNER)}


def _poch(v, q, n):
    out = 1.0
    for i in range(n):
        out *= 1.0 - v * q**i
    return out


def _qn(v, q):
    """[eta]_q from q**eta."""
    return (1.0 - v) / (1.0 - q)


def P(label: str, fn) -> Prefactor:
    return Prefactor(label, fn)


def S(kind, pre=None, mu=None, a=0, b=0, c=0, x=0, y=0, beta=None) -> TransformedSeries:
    return TransformedSeries(kind, a, b, c, x, y, pre, mu, beta)


def C(label, fn) -> Constraint:
    return Constraint(label, fn)


B_NE_1 = C("β ≠ 1", lambda e: 1 - e.b)
B_NE_Q = C("β ≠ q", lambda e: e.b - e.q)
BQ_NE_1 = C("βq ≠ 1", lambda e: 1 - e.b * e.q)
B_NE_0 = C("β ≠ 0", lambda e: e.b)
G_NE_1 = C("γ ≠ 1", lambda e: 1 - e.c)
G_NE_Q = C("γ ≠ q", lambda e: e.c - e.q)
GQ_NE_1 = C("γq ≠ 1", lambda e: 1 - e.c * e.q)
G_NE_0 = C("γ ≠ 0", lambda e: e.c)
A_NE_1 = C("α ≠ 1", lambda e: 1 - e.a)
A_NE_0 = C("α ≠ 0", lambda e: e.a)
EA_NE_1 = C("q^α ≠ 1", lambda e: 1 - e.a)
EB_NE_1 = C("q^β ≠ 1", lambda e: 1 - e.b)
EB_NE_Q = C("q^(β-1) ≠ 1", lambda e: e.b - e.q)
EC_NE_1 = C("q^γ ≠ 1", lambda e: 1 - e.c)
EC_NE_Q = C("q^(γ-1) ≠ 1", lambda e: e.c - e.q)


# ---------------------------------------------------------------------------
# numerator parameter alpha


def _e2_1():
    lhs = (S(H6, a=1),)
    rhs = (
        S(H6),
        S(H6, P("αx(1-αq)/(1-β)", lambda e: e.a * e.x * (1 - e.a * e.q) / (1 - e.b)), a=2, b=1),
        S(H6, P("αxq(1-αq)/(1-β)", lambda e: e.a * e.x * e.q * (1 - e.a * e.q) / (1 - e.b)), a=2, b=1, x=1),
        S(H6, P("αy/(1-β)", lambda e: e.a * e.y / (1 - e.b)), a=1, b=1, x=2),
    )
    amended = Reading(
        "amended-1",
        lhs,
        rhs,
        "fourth term's argument list (xq^2, y) completed with the missing 'q,' separator",
    )
    return IdentityRecord("E2.1", "2.1", "H6", lhs, rhs, (B_NE_1,), (amended,))


def _e2_2():
    pre_x = P("αx(1-αq)/(1-β)", lambda e: e.a * e.x * (1 - e.a * e.q) / (1 - e.b))
    pre_xq = P("αxq(1-αq)/(1-β)", lambda e: e.a * e.x * e.q * (1 - e.a * e.q) / (1 - e.b))
    lhs = (S(H6, a=1),)
    rhs = (
        S(H6),
        S(H6, P("αy/(1-β)", lambda e: e.a * e.y / (1 - e.b)), a=1, b=1),
        S(H6, pre_xq, a=2, b=1, x=1, y=1),
        S(H6, pre_x, a=2, b=1, y=1),
    )
    return IdentityRecord("E2.2", "2.2", "H6", lhs, rhs, (B_NE_1,))


def _e2_5():
    lhs = (S(H7, a=1),)
    rhs = (
        S(H7),
        S(H7, P("αx(1-αq)/(1-β)", lambda e: e.a * e.x * (1 - e.a * e.q) / (1 - e.b)), a=2, b=1),
        S(H7, P("αy/(1-γ)", lambda e: e.a * e.y / (1 - e.c)), a=1, c=1, x=2),
        S(H7, P("αxq(1-αq)/(1-β)", lambda e: e.a * e.x * e.q * (1 - e.a * e.q) / (1 - e.b)), a=2, b=1, x=1),
    )
    return IdentityRecord("E2.5", "2.5", "H7", lhs, rhs, (B_NE_1, G_NE_1))


def _e2_6():
    pre_y = P("αy/(1-γ)", lambda e: e.a * e.y / (1 - e.c))
    tail = (
        S(H7, P("αxq(1-αq)/(1-β)", lambda e: e.a * e.x * e.q * (1 - e.a * e.q) / (1 - e.b)), a=2, b=1, x=1, y=1),
        S(H7, P("αx(1-αq)/(1-β)", lambda e: e.a * e.x * (1 - e.a * e.q) / (1 - e.b)), a=2, b=1, y=1),
    )
    lhs = (S(H7, a=1),)
    rhs = (S(H7), S(H7, pre_y, a=1, c=1, beta="b")) + tail
    amended = Reading(
        "amended-1",
        lhs,
        (S(H7), S(H7, pre_y, a=1, c=1)) + tail,
        "undefined symbol b in the second term read as β",
    )
    return IdentityRecord("E2.6", "2.6", "H7", lhs, rhs, (B_NE_1, G_NE_1), (amended,), free_symbols=("b",))


# ---------------------------------------------------------------------------
# x^n D^n closed forms


def _derivative(eq, kind, var):
    n = DERIVATIVE_ORDER
    lhs = (S(kind, mu=_falling(var, n)),)
    if var == "x":
        pre = P(
            f"x^{n}(α;q)_{2 * n}/((β;q)_{n}(1-q)^{n})",
            lambda e: e.x**n * _poch(e.a, e.q, 2 * n) / (_poch(e.b, e.q, n) * (1 - e.q) ** n),
        )
        rhs = (S(kind, pre, a=2 * n, b=n),)
        cons = (B_NE_1, BQ_NE_1)
    elif kind == H7:
        pre = P(
            f"y^{n}(α;q)_{n}/((γ;q)_{n}(1-q)^{n})",
            lambda e: e.y**n * _poch(e.a, e.q, n) / (_poch(e.c, e.q, n) * (1 - e.q) ** n),
        )
        rhs = (S(kind, pre, a=n, c=n),)
        cons = (G_NE_1, GQ_NE_1)
    else:
        pre = P(
            f"y^{n}(α;q)_{n}/((β;q)_{n}(1-q)^{n})",
            lambda e: e.y**n * _poch(e.a, e.q, n) / (_poch(e.b, e.q, n) * (1 - e.q) ** n),
        )
        rhs = (S(kind, pre, a=n, b=n),)
        cons = (B_NE_1, BQ_NE_1)
    return IdentityRecord(f"E{eq}", eq, kind, lhs, rhs, cons, derivative=(var, n))


# ---------------------------------------------------------------------------
# theta forms of the alpha relations


def _theta_alpha(eq, kind, lead, extra, shift_alpha):
    """``[a' theta_lead + (1-a')/(1-q)] F' + a' extra... = (1-a')/(1-q) F''``

    with ``a' = alpha`` (F' = F, F'' = F(alpha q)) or ``a' = alpha/q``
    (F' = F(alpha/q), F'' = F). ``extra`` lists ``(multiplier, x_pow, y_pow)``.
    """
    if shift_alpha:
        k = -1
        ap = P("αq⁻¹", lambda e: e.a / e.q)
        cst = P("(1-αq⁻¹)/(1-q)", lambda e: (1 - e.a / e.q) / (1 - e.q))
        rhs = (S(kind, cst),)
    else:
        k = 0
        ap = P("α", lambda e: e.a)
        cst = P("(1-α)/(1-q)", lambda e: (1 - e.a) / (1 - e.q))
        rhs = (S(kind, cst, a=1),)
    lhs = (S(kind, ap, lead, a=k), S(kind, cst, a=k)) + tuple(S(kind, ap, mu, a=k, x=j, y=l) for mu, j, l in extra)
    return lhs, rhs


def _theta_records():
    cons6 = (B_NE_1,)
    cons7 = (B_NE_1, G_NE_1)
    out = []
    spec = [
        ("2.13", H6, TX, [(TX, 1, 0), (TY, 2, 0)], False),
        ("2.14", H6, TY, [(TX, 0, 1), (TX, 1, 1)], False),
        ("2.15", H6, TX, [(TY, 1, 1), (TY, 1, 0)], True),
        ("2.16", H6, TY, [(TX, 1, 1), (TX, 0, 1)], True),
        ("2.17", H7, TX, [(TX, 1, 0), (TY, 2, 0)], False),
        ("2.18", H7, TY, [(TX, 0, 1), (TX, 1, 1)], False),
        ("2.19", H7, TX, [(TY, 1, 0), (TY, 1, 1)], True),
        ("2.20", H7, TY, [(TX, 0, 1), (TX, 1, 1)], True),
    ]
    for eq, kind, lead, extra, shifted in spec:
        lhs, rhs = _theta_alpha(eq, kind, lead, extra, shifted)
        variants = ()
        if eq == "2.15":
            lhs_m, _ = _theta_alpha(eq, kind, lead, [(TX, 1, 1), (TY, 1, 0)], shifted)
            variants = (
                Reading(
                    "amended-1",
                    lhs_m,
                    rhs,
                    "theta_y on H6(αq⁻¹, xq, yq) read as theta_x, mirroring the operator pairing of Eq 2.16",
                ),
            )
        out.append(IdentityRecord(f"E{eq}", eq, kind, lhs, rhs, cons6 if kind == H6 else cons7, variants))
    return out


# ---------------------------------------------------------------------------
# denominator parameters


def _beta_down():
    bx = lambda e: e.b * e.x * (1 - e.a) * (1 - e.a * e.q) / ((e.q - e.b) * (1 - e.b))
    by = lambda e: e.b * e.y * (1 - e.a) / ((e.q - e.b) * (1 - e.b))
    gy = lambda e: e.c * e.y * (1 - e.a) / ((e.q - e.c) * (1 - e.c))
    pbx = P("βx(1-α)(1-αq)/((q-β)(1-β))", bx)
    pby = P("β(1-α)y/((q-β)(1-β))", by)
    return [
        IdentityRecord(
            "E2.21", "2.21", "H6", (S(H6, b=-1),), (S(H6), S(H6, pbx, a=2, b=1), S(H6, pby, a=1, b=1, x=1)), (B_NE_1, B_NE_Q)
        ),
        IdentityRecord(
            "E2.22", "2.22", "H6", (S(H6, b=-1),), (S(H6), S(H6, pby, a=1, b=1), S(H6, pbx, a=2, b=1, y=1)), (B_NE_1, B_NE_Q)
        ),
        IdentityRecord("E2.25", "2.25", "H7", (S(H7, b=-1),), (S(H7), S(H7, pbx, a=2, b=1)), (B_NE_1, B_NE_Q)),
        IdentityRecord(
            "E2.26",
            "2.26",
            "H7",
            (S(H7, c=-1),),
            (S(H7), S(H7, P("γy(1-α)/((q-γ)(1-γ))", gy), a=1, c=1)),
            (G_NE_1, G_NE_Q),
        ),
    ]


def _contiguous_down():
    pb = P("β/(β-q)", lambda e: e.b / (e.b - e.q))
    pq = P("-q/(β-q)", lambda e: -e.q / (e.b - e.q))
    pg = P("γ/(γ-q)", lambda e: e.c / (e.c - e.q))
    pgq = P("-q/(γ-q)", lambda e: -e.q / (e.c - e.q))
    out = []
    for eq, kind, rhs in (
        ("2.29", H6, (S(H6, pb, x=1, y=1), S(H6, pq))),
        ("2.30", H7, (S(H7, pb, x=1), S(H7, pq))),
    ):
        lhs = (S(kind, b=-1),)
        amended = Reading("amended-1", lhs, rhs, "side condition 'β ≠ p' (p undefined) read as β ≠ q")
        out.append(
            IdentityRecord(f"E{eq}", eq, kind, lhs, rhs, (B_NE_Q,), (amended,), printed_constraint="β ≠ p")
        )
    out.append(IdentityRecord("E2.31", "2.31", "H7", (S(H7, c=-1),), (S(H7, pg, y=1), S(H7, pgq)), (G_NE_Q,)))
    return out


def _theta_beta():
    bq = P("βq⁻¹", lambda e: e.b / e.q)
    bc = P("(1-βq⁻¹)/(1-q)", lambda e: (1 - e.b / e.q) / (1 - e.q))
    gq = P("γq⁻¹", lambda e: e.c / e.q)
    gc = P("(1-γq⁻¹)/(1-q)", lambda e: (1 - e.c / e.q) / (1 - e.q))
    return [
        IdentityRecord("E2.35", "2.35", "H6", (S(H6, bq, TX), S(H6, bc), S(H6, bq, TY, x=1)), (S(H6, bc, b=-1),), (B_NE_Q,)),
        IdentityRecord("E2.36", "2.36", "H6", (S(H6, bq, TY), S(H6, bc), S(H6, bq, TX, y=1)), (S(H6, bc, b=-1),), (B_NE_Q,)),
        IdentityRecord("E2.37", "2.37", "H7", (S(H7, bq, TX), S(H7, bc)), (S(H7, bc, b=-1),), (B_NE_Q,)),
        IdentityRecord("E2.38", "2.38", "H7", (S(H7, gq, TY), S(H7, gc)), (S(H7, gc, c=-1),), (G_NE_Q,)),
    ]


def _ab_h6():
    d = lambda e: (1 - e.b) * (1 - e.b * e.q)
    amb_x = P("(α-β)x(1-αq)/((1-β)(1-βq))", lambda e: (e.a - e.b) * e.x * (1 - e.a * e.q) / d(e))
    amb_y = P("(α-β)y/((1-β)(1-βq))", lambda e: (e.a - e.b) * e.y / d(e))
    a_xq = P("αxq(1-αq)/(1-βq)", lambda e: e.a * e.x * e.q * (1 - e.a * e.q) / (1 - e.b * e.q))
    a_y = P("αy/((1-β)(1-βq))", lambda e: e.a * e.y / d(e))
    a_x = P("αx(1-αq)/((1-β)(1-βq))", lambda e: e.a * e.x * (1 - e.a * e.q) / d(e))
    b_x = P("-βx(1-αq)/((1-β)(1-βq))", lambda e: -e.b * e.x * (1 - e.a * e.q) / d(e))
    b_y = P("-βy/((1-β)(1-βq))", lambda e: -e.b * e.y / d(e))
    lhs = (S(H6, a=1, b=1),)
    cons = (B_NE_1, BQ_NE_1)
    rows = {
        "2.39": (S(H6), S(H6, amb_x, a=2, b=2), S(H6, amb_y, a=1, b=2, x=1), S(H6, a_xq, a=2, b=2, x=1, y=1)),
        "2.40": (
            S(H6),
            S(H6, a_y, a=1, b=2),
            S(H6, a_xq, a=2, b=2, x=1, y=1),
            S(H6, a_x, a=2, b=2, y=1),
            S(H6, b_x, a=2, b=2),
            S(H6, b_y, a=1, b=2, x=1),
        ),
        "2.41": (
            S(H6),
            S(H6, a_x, a=2, b=2),
            S(H6, a_y, a=1, b=2, x=1),
            S(H6, a_xq, a=2, b=2, x=1, y=1),
            S(H6, b_y, a=1, b=2),
            S(H6, b_x, a=2, b=2, y=1),
        ),
        "2.42": (S(H6), S(H6, amb_y, a=1, b=2), S(H6, amb_x, a=2, b=2, y=1), S(H6, a_xq, a=2, b=2, x=1, y=1)),
    }
    return [IdentityRecord(f"E{eq}", eq, "H6", lhs, rhs, cons) for eq, rhs in rows.items()]


def _ab_h7():
    dbb = lambda e: (1 - e.b) * (1 - e.b * e.q)
    dbc = lambda e: (1 - e.b) * (1 - e.c)
    dcc = lambda e: (1 - e.c) * (1 - e.c * e.q)
    amb_x = P("(α-β)x(1-αq)/((1-β)(1-βq))", lambda e: (e.a - e.b) * e.x * (1 - e.a * e.q) / dbb(e))
    a_y_bc = P("αy/((1-β)(1-γ))", lambda e: e.a * e.y / dbc(e))
    a_xq_bb = P("αxq(1-αq)/((1-β)(1-βq))", lambda e: e.a * e.x * e.q * (1 - e.a * e.q) / dbb(e))
    ab_xq_bb = P("-αβxq(1-αq)/((1-β)(1-βq))", lambda e: -e.a * e.b * e.x * e.q * (1 - e.a * e.q) / dbb(e))
    a_y_c = P("αy/(1-γ)", lambda e: e.a * e.y / (1 - e.c))
    a_xq_b1 = P("αxq(1-αq)/(1-βq)", lambda e: e.a * e.x * e.q * (1 - e.a * e.q) / (1 - e.b * e.q))
    a_x_bb = P("αx(1-αq)/((1-β)(1-βq))", lambda e: e.a * e.x * (1 - e.a * e.q) / dbb(e))
    b_x_bb = P("-βx(1-αq)/((1-β)(1-βq))", lambda e: -e.b * e.x * (1 - e.a * e.q) / dbb(e))
    ab_y_bc = P("-αβy/((1-β)(1-γ))", lambda e: -e.a * e.b * e.y / dbc(e))
    ab_bc = P("-αβ/((1-β)(1-γ))", lambda e: -e.a * e.b / dbc(e))

    lhs_b = (S(H7, a=1, b=1),)
    lhs_c = (S(H7, a=1, c=1),)
    cons_b = (B_NE_1, G_NE_1, BQ_NE_1)
    cons_g = (B_NE_1, G_NE_1, GQ_NE_1)
    out = [
        IdentityRecord(
            "E2.43",
            "2.43",
            "H7",
            lhs_b,
            (
                S(H7),
                S(H7, amb_x, a=2, b=2),
                S(H7, a_y_bc, a=1, b=1, c=1, x=1),
                S(H7, a_xq_bb, a=2, b=2, x=1, y=1),
                S(H7, ab_xq_bb, a=2, b=2, x=1),
                S(H7, ab_bc, a=1, b=1, c=1, x=2),
            ),
            cons_b,
        ),
        IdentityRecord(
            "E2.44",
            "2.44",
            "H7",
            lhs_b,
            (S(H7), S(H7, amb_x, a=2, b=2), S(H7, a_y_c, a=1, b=1, c=1, x=1), S(H7, a_xq_b1, a=2, b=2, x=1, y=1)),
            cons_b,
        ),
    ]
    six_terms = (
        S(H7),
        S(H7, a_y_bc, a=1, b=1, c=1),
        S(H7, a_x_bb, a=2, b=2, y=1),
        S(H7, a_xq_bb, a=2, b=2, x=1, y=1),
        S(H7, b_x_bb, a=2, b=2),
        S(H7, ab_xq_bb, a=2, b=2, x=1),
        S(H7, ab_y_bc, a=1, b=1, c=1, x=2),
    )
    out.append(IdentityRecord("E2.45", "2.45", "H7", lhs_b, six_terms, cons_g))
    out.append(
        IdentityRecord(
            "E2.46",
            "2.46",
            "H7",
            lhs_b,
            (
                S(H7),
                S(H7, a_y_bc, a=1, b=1, c=1),
                S(H7, a_x_bb, a=2, b=2, y=1),
                S(H7, a_xq_b1, a=2, b=2, x=1, y=1),
                S(H7, b_x_bb, a=2, b=2),
                S(H7, ab_y_bc, a=1, b=1, c=1, x=1),
            ),
            cons_g,
        )
    )
    # printed identically to 2.45, but without a side condition
    out.append(IdentityRecord("E2.47", "2.47", "H7", lhs_b, six_terms, (B_NE_1, G_NE_1, BQ_NE_1)))

    a_x_bc = P("αx(1-αq)/((1-β)(1-γ))", lambda e: e.a * e.x * (1 - e.a * e.q) / dbc(e))
    a_y_cc = P("αy/((1-γ)(1-γq))", lambda e: e.a * e.y / dcc(e))
    a_xq_b = P("αxq(1-αq)/(1-β)", lambda e: e.a * e.x * e.q * (1 - e.a * e.q) / (1 - e.b))
    a_x_b = P("αx(1-αq)/(1-β)", lambda e: e.a * e.x * (1 - e.a * e.q) / (1 - e.b))
    b_y_cc = P("-βy/((1-γ)(1-γq))", lambda e: -e.b * e.y / dcc(e))
    ag_x_bc = P("-αγx(1-αq)/((1-β)(1-γ))", lambda e: -e.a * e.c * e.x * (1 - e.a * e.q) / dbc(e))
    amg_y = P("(α-γ)y/((1-γ)(1-γq))", lambda e: (e.a - e.c) * e.y / dcc(e))
    out.append(
        IdentityRecord(
            "E2.48",
            "2.48",
            "H7",
            lhs_c,
            (
                S(H7),
                S(H7, a_x_bc, a=2, b=1, c=1),
                S(H7, a_y_cc, a=1, c=2, x=1),
                S(H7, a_xq_b, a=2, b=1, c=1, x=1, y=1),
                S(H7, b_y_cc, a=1, c=2),
                S(H7, ag_x_bc, a=2, b=1, c=1, y=1),
            ),
            cons_g,
        )
    )
    out.append(
        IdentityRecord(
            "E2.49",
            "2.49",
            "H7",
            lhs_c,
            (
                S(H7),
                S(H7, amg_y, a=1, c=2),
                S(H7, a_x_b, a=2, b=1, c=1, y=1),
                S(H7, a_xq_b, a=2, b=1, c=1, x=1, y=1),
            ),
            cons_g,
        )
    )
    return out


def _contiguous_up():
    pb = P("β/(1-β)", lambda e: e.b / (1 - e.b))
    mb = P("-β/(1-β)", lambda e: -e.b / (1 - e.b))
    pg = P("γ/(1-γ)", lambda e: e.c / (1 - e.c))
    mg = P("-γ/(1-γ)", lambda e: -e.c / (1 - e.c))
    return [
        IdentityRecord("E2.50", "2.50", "H6", (S(H6, b=1),), (S(H6), S(H6, pb, b=1, x=1, y=1), S(H6, mb, b=1)), (B_NE_1,)),
        IdentityRecord("E2.51", "2.51", "H7", (S(H7, b=1),), (S(H7), S(H7, pb, b=1, x=1), S(H7, mb, b=1)), (B_NE_1,)),
        IdentityRecord("E2.52", "2.52", "H7", (S(H7, c=1),), (S(H7), S(H7, pg, c=1, y=1), S(H7, mg, c=1)), (G_NE_1,)),
    ]


def _d_alpha():
    def lhs(kind):
        return (
            S(kind, P("1/((1-q)α)", lambda e: 1 / ((1 - e.q) * e.a))),
            S(kind, P("-1/((1-q)α)", lambda e: -1 / ((1 - e.q) * e.a)), a=1),
        )

    m = P("-1/(1-α)", lambda e: -1 / (1 - e.a))
    mq = P("-q/(1-α)", lambda e: -e.q / (1 - e.a))
    cons = (A_NE_1, A_NE_0)
    out = []
    for eq, kind in (("2.53", H6), ("2.55", H7)):
        rhs = (S(kind, m, TX), S(kind, mq, TX, x=1), S(kind, m, TY, x=2))
        out.append(IdentityRecord(f"E{eq}", eq, kind, lhs(kind), rhs, cons + ((B_NE_1,) if kind == H6 else (B_NE_1, G_NE_1))))
    rhs54 = (S(H6, m, TY), S(H6, m, TX, y=1), S(H6, mq, TX, x=1, y=1))
    out.append(IdentityRecord("E2.54", "2.54", "H6", lhs(H6), rhs54, cons + (B_NE_1,)))
    rhs56 = (S(H7, m, TY), S(H7, m, TX, y=1), S(H6, mq, TX, x=1, y=1))
    amended = Reading(
        "amended-1",
        lhs(H7),
        (S(H7, m, TY), S(H7, m, TX, y=1), S(H7, mq, TX, x=1, y=1)),
        "H6 token inside the H7 relation read as H7",
    )
    out.append(IdentityRecord("E2.56", "2.56", "H7", lhs(H7), rhs56, cons + (B_NE_1, G_NE_1), (amended,)))
    return out


def _d_beta():
    def dq(kind, sym):
        if sym == "b":
            return (
                S(kind, P("1/((1-q)β)", lambda e: 1 / ((1 - e.q) * e.b))),
                S(kind, P("-1/((1-q)β)", lambda e: -1 / ((1 - e.q) * e.b)), b=1),
            )
        return (
            S(kind, P("1/((1-q)γ)", lambda e: 1 / ((1 - e.q) * e.c))),
            S(kind, P("-1/((1-q)γ)", lambda e: -1 / ((1 - e.q) * e.c)), c=1),
        )

    ib = P("1/(1-β)", lambda e: 1 / (1 - e.b))
    ig = P("1/(1-γ)", lambda e: 1 / (1 - e.c))
    return [
        IdentityRecord("E2.57", "2.57", "H6", dq(H6, "b"), (S(H6, ib, TX, b=1), S(H6, ib, TY, b=1, x=1)), (B_NE_1, B_NE_0)),
        IdentityRecord("E2.58", "2.58", "H6", dq(H6, "b"), (S(H6, ib, TY, b=1), S(H6, ib, TX, b=1, y=1)), (B_NE_1, B_NE_0)),
        IdentityRecord("E2.59", "2.59", "H7", dq(H7, "b"), (S(H7, ib, TX, b=1),), (B_NE_1, B_NE_0)),
        IdentityRecord("E2.60", "2.60", "H7", dq(H7, "c"), (S(H7, ig, TX, c=1),), (G_NE_1, G_NE_0)),
    ]


# ---------------------------------------------------------------------------
# exponent forms


def _exp_theta():
    ax2 = P("(1-q^α)(1-q^(α+1))x/((1-q^β)(1-q))", lambda e: (1 - e.a) * (1 - e.a * e.q) * e.x / ((1 - e.b) * (1 - e.q)))
    ay6 = P("(1-q^α)y/((1-q^β)(1-q))", lambda e: (1 - e.a) * e.y / ((1 - e.b) * (1 - e.q)))
    ay7 = P("(1-q^α)y/((1-q^γ)(1-q))", lambda e: (1 - e.a) * e.y / ((1 - e.c) * (1 - e.q)))
    return [
        IdentityRecord("E2.63", "2.63", "H6exp", (S(H6, mu=TX),), (S(H6, ax2, a=2, b=1),), (EB_NE_1,)),
        IdentityRecord("E2.64", "2.64", "H6exp", (S(H6, mu=TY),), (S(H6, ay6, a=1, b=1),), (EB_NE_1,)),
        IdentityRecord("E2.65", "2.65", "H7exp", (S(H7, mu=TX),), (S(H7, ax2, a=2, b=1),), (EB_NE_1,)),
        IdentityRecord("E2.66", "2.66", "H7exp", (S(H7, mu=TY),), (S(H7, ay7, a=1, c=1),), (EC_NE_1,)),
    ]


def _exp_brackets():
    qa = P("[α]_q", lambda e: _qn(e.a, e.q))
    qb1 = P("[β-1]_q", lambda e: _qn(e.b / e.q, e.q))
    qg1 = P("[γ-1]_q", lambda e: _qn(e.c / e.q, e.q))
    return [
        IdentityRecord("E2.67", "2.67", "H6exp", (S(H6, mu=BR_ALPHA),), (S(H6, qa, a=1),), (EB_NE_1,)),
        IdentityRecord("E2.68", "2.68", "H6exp", (S(H6, mu=BR_BETA6),), (S(H6, qb1, b=-1),), (EB_NE_1, EB_NE_Q)),
        IdentityRecord("E2.69", "2.69", "H7exp", (S(H7, mu=BR_ALPHA),), (S(H7, qa, a=1),), (EB_NE_1, EC_NE_1)),
        IdentityRecord("E2.70", "2.70", "H7exp", (S(H7, mu=BR_BETA7),), (S(H7, qb1, b=-1),), (EB_NE_1, EB_NE_Q)),
        IdentityRecord("E2.71", "2.71", "H7exp", (S(H7, mu=BR_GAMMA7),), (S(H7, qg1, c=-1),), (EC_NE_1, EC_NE_Q)),
    ]


def _exp_alpha_up():
    pre = P("(1-q)q^α/(1-q^α)", lambda e: (1 - e.q) * e.a / (1 - e.a))
    out = []
    for eq, kind, fam in (("2.72", H7, "H7exp"), ("2.73", H7, "H7exp"), ("2.74", H6, "H6exp"), ("2.75", H6, "H6exp")):
        if eq in ("2.72", "2.74"):
            rhs = (S(kind), S(kind, pre, TY), S(kind, pre, TX, y=1), S(kind, pre, TX, x=1, y=1))
        else:
            rhs = (S(kind), S(kind, pre, TX), S(kind, pre, TX, x=1), S(kind, pre, TY, x=2))
        out.append(IdentityRecord(f"E{eq}", eq, fam, (S(kind, a=1),), rhs, (EA_NE_1, EB_NE_1)))
    return out


# second-order prefactors (q^(2α+1) = a^2 q)
_QXAA = P("qx[α]_q[α]_q", lambda e: e.q * e.x * _qn(e.a, e.q) ** 2)
_2AQXA = P("2q^(α+1)x[α]_q", lambda e: 2 * e.a * e.q * e.x * _qn(e.a, e.q))
_2A2QX = P("2q^(2α+1)x", lambda e: 2 * e.a**2 * e.q * e.x)
_A2QX = P("q^(2α+1)x", lambda e: e.a**2 * e.q * e.x)
_QALPHA1 = P("[α+1]_q", lambda e: _qn(e.a * e.q, e.q))


def _second_order_76(kind, square):
    txx, tyy = _SQUARE[square]
    lhs = (S(kind, _QALPHA1, a=2),)
    rhs = (
        S(kind, a=1),
        S(kind, _QXAA),
        S(kind, _2AQXA, TY),
        S(kind, _2AQXA, TX, y=1),
        S(kind, _2AQXA, TX, x=1, y=1),
        S(kind, _2A2QX, TX_TY, y=1),
        S(kind, _2A2QX, TX_TY, x=1, y=1),
        S(kind, _2A2QX, txx, x=1, y=2),
        S(kind, _A2QX, tyy),
        S(kind, _A2QX, txx, y=2),
        S(kind, _A2QX, txx, x=2, y=2),
    )
    return lhs, rhs


def _second_order_77(kind, square, interior):
    txx, tyy = _SQUARE[square]
    lhs = (S(kind, _QALPHA1, a=2),)
    rhs = (
        S(kind, a=1),
        S(kind, _QXAA),
        S(kind, _2AQXA, TX),
        S(kind, _2AQXA, TX, x=1),
        S(kind, _2AQXA, TY, x=2),
        S(kind, _2A2QX, txx, x=1),
        S(kind, _2A2QX, TX_TY, x=2),
        S(interior, _2A2QX, TX_TY, x=3),
        S(kind, _A2QX, txx),
        S(kind, _A2QX, txx, x=2),
        S(kind, _A2QX, tyy, x=4),
    )
    return lhs, rhs


_INNER_WHY = "[theta^2]_q read as the q-number of the squared index, [r^2]_q"
_TOKEN_WHY = "interior H7 token inside the H6 relation read as H6"


def _with_square_variants(eq, fam, builder, kind, interior=None):
    """Literal (outer square) plus the inner-square reading; when an
    interior foreign token exists also the token-corrected readings."""
    args_l = (kind, "outer") + ((interior,) if interior else ())
    lhs, rhs = builder(*args_l)
    variants = [Reading("amended-1", *builder(kind, "inner", *((interior,) if interior else ())), _INNER_WHY)]
    if interior and interior != kind:
        variants.append(Reading("amended-2", *builder(kind, "outer", kind), _TOKEN_WHY))
        variants.append(Reading("amended-3", *builder(kind, "inner", kind), _INNER_WHY + "; " + _TOKEN_WHY))
    cons = (EA_NE_1, EB_NE_1) + ((EC_NE_1,) if kind == H7 or interior == H7 else ())
    return IdentityRecord(f"E{eq}", eq, fam, lhs, rhs, cons, tuple(variants))


def _second_order():
    return [
        _with_square_variants("2.76", "H7exp", _second_order_76, H7),
        _with_square_variants("2.77", "H7exp", _second_order_77, H7, H7),
        _with_square_variants("2.78", "H6exp", _second_order_76, H6),
        _with_square_variants("2.79", "H6exp", _second_order_77, H6, H7),
    ]


# partial q-differential equations
_AQY1 = P("q^(α+1)y/(1-q)", lambda e: e.a * e.q * e.y / (1 - e.q))
_M_AQY1 = P("-q^(α+1)y/(1-q)", lambda e: -e.a * e.q * e.y / (1 - e.q))
_M_YA = P("-yq^α", lambda e: -e.y * e.a)
_M_YALPHA = P("-y[α]_q/(1-q)", lambda e: -e.y * _qn(e.a, e.q) / (1 - e.q))
_M_XA = P("-xq^α", lambda e: -e.x * e.a)
_M_XALPHA = P("-x[α]_q", lambda e: -e.x * _qn(e.a, e.q))
_M_QXAA = P("-qx[α]_q[α]_q", lambda e: -e.q * e.x * _qn(e.a, e.q) ** 2)
_M_2AQXA = P("-2q^(α+1)x[α]_q", lambda e: -2 * e.a * e.q * e.x * _qn(e.a, e.q))
_M_A2QX = P("-q^(2α+1)x", lambda e: -e.a**2 * e.q * e.x)
_BQ = P("q^(β-1)", lambda e: e.b / e.q)
_M_BQ = P("-q^(β-1)", lambda e: -e.b / e.q)
_GQ = P("q^(γ-1)", lambda e: e.c / e.q)
_M_GQ = P("-q^(γ-1)", lambda e: -e.c / e.q)
_QBETA = P("[β]_q", lambda e: _qn(e.b, e.q))
_QGAMMA = P("[γ]_q", lambda e: _qn(e.c, e.q))
_QC_FREE = P("[c]_q", lambda e: _qn(e.free["c"], e.q))


def _pde_y(kind, fam, eq):
    """2.81/2.82 (H7) and 2.85/2.86 (H6)."""
    if kind == H7:
        head = (S(H7, _GQ, TY_TY), S(H7, _M_GQ, TY))
        cst = _QGAMMA
    else:
        head = (S(H6, _BQ, TY * TXY), S(H6, _M_BQ, TY))
        cst = _QBETA
    tail = (S(kind, _M_YA, T2XY), S(kind, _M_YALPHA))
    if eq in ("2.81", "2.85"):
        lhs = head + (S(kind, cst, TY), S(kind, _M_AQY1, TY)) + tail
        rhs = (S(kind, _AQY1, TX, y=1), S(kind, _AQY1, TX, x=1, y=1))
        return IdentityRecord(f"E{eq}", eq, fam, lhs, rhs, _pde_cons(kind))
    rhs = (S(kind, _AQY1, TX, x=1), S(kind, _AQY1, TY, x=2))
    if eq == "2.86":
        lhs = head + (S(kind, _M_AQY1, TX), S(kind, cst, TY)) + tail
        return IdentityRecord(f"E{eq}", eq, fam, lhs, rhs, _pde_cons(kind))
    # 2.82 prints [c]_q where [γ]_q belongs
    lhs = head + (S(kind, _QC_FREE, TY), S(kind, _M_AQY1, TX)) + tail
    fixed = head + (S(kind, _QGAMMA, TY), S(kind, _M_AQY1, TX)) + tail
    amended = Reading("amended-1", fixed, rhs, "undefined [c]_q read as [γ]_q")
    return IdentityRecord(f"E{eq}", eq, fam, lhs, rhs, _pde_cons(kind), (amended,), free_symbols=("c",))


def _pde_cons(kind):
    return (EA_NE_1, EB_NE_1, EC_NE_1) if kind == H7 else (EA_NE_1, EB_NE_1)


def _pde_x_rhs_83(kind, txx):
    return (
        S(kind, _2AQXA, TX, y=1),
        S(kind, _2AQXA, TX, x=1, y=1),
        S(kind, _2A2QX, TX_TY, y=1),
        S(kind, _2A2QX, TX_TY, x=1, y=1),
        S(kind, _2A2QX, txx, x=1, y=2),
        S(kind, _A2QX, txx, y=2),
        S(kind, _A2QX, txx, x=2, y=2),
    )


def _pde_x_rhs_84(kind, txx, tyy, interior):
    return (
        S(kind, _2AQXA, TX, x=1),
        S(kind, _2AQXA, TY, x=2),
        S(kind, _2A2QX, txx, x=1),
        S(kind, _2A2QX, TX_TY, x=2),
        S(interior, _2A2QX, TX_TY, x=3),
        S(kind, _A2QX, txx, x=2),
        S(kind, _A2QX, tyy, x=4),
    )


def _pde_x(eq, kind, square, interior=None):
    txx, tyy = _SQUARE[square]
    if kind == H7:
        quad = (S(H7, _BQ, TX_TX), S(H7, _M_BQ, TX))
    else:
        quad = (S(H6, _BQ, TX * TXY), S(H6, _M_BQ, TX))
    common = (S(kind, _QBETA, TY), S(kind, _M_XA, T2XY), S(kind, _M_XALPHA), S(kind, _M_QXAA))
    if eq in ("2.83", "2.87"):
        lhs = quad + common + (S(kind, _M_A2QX, tyy), S(kind, _M_2AQXA, TY))
        rhs = _pde_x_rhs_83(kind, txx)
    else:
        lhs = quad + common + (S(kind, _M_A2QX, txx), S(kind, _M_2AQXA, TX))
        rhs = _pde_x_rhs_84(kind, txx, tyy, interior or kind)
    return lhs, rhs


def _pde_x_record(eq, fam, kind, interior=None):
    def build(k, square, inner_kind=None):
        return _pde_x(eq, k, square, inner_kind)

    lhs, rhs = build(kind, "outer", interior)
    variants = [Reading("amended-1", *build(kind, "inner", interior), _INNER_WHY)]
    if interior and interior != kind:
        variants.append(Reading("amended-2", *build(kind, "outer", kind), _TOKEN_WHY))
        variants.append(Reading("amended-3", *build(kind, "inner", kind), _INNER_WHY + "; " + _TOKEN_WHY))
    cons = _pde_cons(H7 if interior == H7 else kind)
    return IdentityRecord(f"E{eq}", eq, fam, lhs, rhs, cons, tuple(variants))


def _pdes():
    return [
        _pde_y(H7, "H7exp", "2.81"),
        _pde_y(H7, "H7exp", "2.82"),
        _pde_x_record("2.83", "H7exp", H7),
        _pde_x_record("2.84", "H7exp", H7, H7),
        _pde_y(H6, "H6exp", "2.85"),
        _pde_y(H6, "H6exp", "2.86"),
        _pde_x_record("2.87", "H6exp", H6),
        _pde_x_record("2.88", "H6exp", H6, H7),
    ]


# ---------------------------------------------------------------------------


def _eq_key(rec: IdentityRecord):
    major, minor = rec.eq_label.split(".")
    return (int(major), int(minor))


@lru_cache(maxsize=1)
def _build() -> tuple:
    recs = [_e2_1(), _e2_2(), _e2_5(), _e2_6()]
    recs += [_derivative("2.9", H7, "x"), _derivative("2.10", H7, "y"), _derivative("2.11", H6, "x"), _derivative("2.12", H6, "y")]
    recs += _theta_records()
    recs += _beta_down()
    recs += _contiguous_down()
    recs += _theta_beta()
    recs += _ab_h6()
    recs += _ab_h7()
    recs += _contiguous_up()
    recs += _d_alpha()
    recs += _d_beta()
    recs += _exp_theta()
    recs += _exp_brackets()
    recs += _exp_alpha_up()
    recs += _second_order()
    recs += _pdes()
    recs.sort(key=_eq_key)
    ids = [r.id for r in recs]
    if len(set(ids)) != len(ids):
        raise RuntimeError("duplicate identity ids in registry")
    return tuple(recs)


def registry() -> list:
    """All encoded equations, ordered by equation number."""
    return list(_build())


def get_record(identity_id: str) -> IdentityRecord:
    key = identity_id if identity_id.startswith("E") else f"E{identity_id}"
    for rec in _build():
        if rec.id == key:
            return rec
    raise KeyError(f"unknown identity id {identity_id!r}")
