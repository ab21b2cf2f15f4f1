"""Truncated evaluation of the basic Horn double series H6 and H7.

    H6(a; b; q, x, y)    = sum (a;q)_{2r+s} / ((b;q)_{r+s} (q;q)_r (q;q)_s) x^r y^s
    H7(a; b, c; q, x, y) = sum (a;q)_{2r+s} / ((b;q)_r (c;q)_s (q;q)_r (q;q)_s) x^r y^s

Terms are generated on a rectangular grid by ratio recurrences (each term
from its left or upper neighbour), so no Pochhammer product is ever formed
on its own; this keeps the evaluator finite when q is close to 1 and the
individual products under/overflow. The grid is then summed along
anti-diagonals d = 2r + s, the weight carried by the numerator.

Parameter shifts are integer powers of q kept apart from the base values:
the factor ``1 - a q^(k+m)`` is formed as ``1 - a * q**(k+m)``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NumericOverflowError, TruncationWarning
from .qcore import QContext, q_power

__all__ = [
    "H6",
    "H7",
    "KINDS",
    "HornPoint",
    "ExpHornPoint",
    "EvalPolicy",
    "EvalResult",
    "Env",
    "Multiplier",
    "Prefactor",
    "TransformedSeries",
    "term_h6",
    "term_h7",
    "eval_h6",
    "eval_h7",
    "eval_h6_exp",
    "eval_h7_exp",
    "eval_series",
    "eval_transformed",
    "series_partial",
    "q_partial_x",
    "q_partial_y",
    "classical_horn_oracle",
    "classical_limit_check",
]

H6 = "H6"
H7 = "H7"
KINDS = (H6, H7)

# diagonals always scanned before the stopping rule may fire
_MIN_DIAGONALS = 8
_INITIAL_DIAGONALS = 64


def _c(z) -> complex:
    return complex(z)


@dataclass(frozen=True)
class HornPoint:
    """Parameter/argument tuple ``(alpha, beta, gamma, x, y)``.

    ``gamma`` is ignored by H6. ``free`` carries values for symbols that
    appear in a printed formula without ever being defined (kept as
    ``(name, value)`` pairs so the point stays hashable).
    """

    alpha: complex
    beta: complex
    gamma: complex = 0j
    x: complex = 0j
    y: complex = 0j
    free: tuple = ()

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "x", "y"):
            val = _c(getattr(self, name))
            if not cmath.isfinite(val):
                raise DomainError(f"{name} must be finite, got {val!r}")
            object.__setattr__(self, name, val)
        if abs(self.x) >= 1 or abs(self.y) >= 1:
            raise DomainError(f"arguments must satisfy |x|, |y| < 1, got x={self.x}, y={self.y}")
        object.__setattr__(self, "free", tuple((str(k), _c(v)) for k, v in self.free))

    @property
    def free_map(self) -> dict:
        return dict(self.free)


@dataclass(frozen=True)
class ExpHornPoint:
    """Exponent form: the series parameters are ``q**a_exp`` etc."""

    a_exp: complex
    b_exp: complex
    c_exp: complex = 0j
    x: complex = 0j
    y: complex = 0j
    free: tuple = ()

    def __post_init__(self):
        for name in ("a_exp", "b_exp", "c_exp", "x", "y"):
            object.__setattr__(self, name, _c(getattr(self, name)))
        if abs(self.x) >= 1 or abs(self.y) >= 1:
            raise DomainError(f"arguments must satisfy |x|, |y| < 1, got x={self.x}, y={self.y}")
        object.__setattr__(self, "free", tuple((str(k), _c(v)) for k, v in self.free))

    def to_horn_point(self, ctx: QContext) -> HornPoint:
        return HornPoint(
            q_power(self.a_exp, ctx),
            q_power(self.b_exp, ctx),
            q_power(self.c_exp, ctx),
            self.x,
            self.y,
            self.free,
        )


@dataclass(frozen=True)
class EvalPolicy:
    max_r: int = 200
    max_s: int = 200
    rel_tol: float = 1e-12
    tail_block: int = 3

    def __post_init__(self):
        if self.max_r < 1 or self.max_s < 1:
            raise DomainError("max_r and max_s must be >= 1")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be > 0")
        if self.tail_block < 1:
            raise DomainError("tail_block must be >= 1")

    def halved(self) -> "EvalPolicy":
        return EvalPolicy(self.max_r, self.max_s, self.rel_tol / 2, self.tail_block)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    terms_used: int
    tail_estimate: float
    truncated_cleanly: bool


@dataclass(frozen=True)
class Env:
    """Base values seen by prefactors and multipliers.

    For exponent-form series ``a``, ``b``, ``c`` hold ``q**alpha`` etc.,
    which is all any prefactor or q-bracket ever needs.
    """

    a: complex
    b: complex
    c: complex
    x: complex
    y: complex
    q: complex
    free: dict = field(default_factory=dict)

    @classmethod
    def from_point(cls, point: HornPoint, ctx: QContext) -> "Env":
        return cls(point.alpha, point.beta, point.gamma, point.x, point.y, ctx.q, point.free_map)

    def qn(self, qval):
        """q-bracket of an exponent given through its power ``q**eta``."""
        return (1 - qval) / (1 - self.q)


@dataclass(frozen=True)
class Multiplier:
    """Per-term factor ``mu(r, s)`` acting on a double series.

    ``fn`` receives integer grids ``r`` and ``s`` (the summation indices of
    the underlying series) plus the :class:`Env`.
    """

    label: str
    fn: Callable = field(compare=False, repr=False)

    def __call__(self, r, s, env: Env):
        return self.fn(r, s, env)

    def __mul__(self, other: "Multiplier") -> "Multiplier":
        return Multiplier(f"{self.label}*{other.label}", lambda r, s, e: self.fn(r, s, e) * other.fn(r, s, e))


@dataclass(frozen=True)
class Prefactor:
    label: str
    fn: Callable = field(compare=False, repr=False)

    def __call__(self, env: Env) -> complex:
        return complex(self.fn(env))


@dataclass(frozen=True)
class TransformedSeries:
    """One summand of an identity side.

    The series ``kind`` with parameters ``a q^a_shift``, ``b q^b_shift``,
    ``c q^c_shift``, arguments ``x q^x_pow`` and ``y q^y_pow``, each term
    multiplied by ``bracket(r, s)`` and the whole by ``prefactor(env)``.
    ``beta_symbol`` substitutes an undefined printed symbol for the beta
    slot (read from ``point.free``).
    """

    kind: str
    a_shift: int = 0
    b_shift: int = 0
    c_shift: int = 0
    x_pow: int = 0
    y_pow: int = 0
    prefactor: Prefactor | None = None
    bracket: Multiplier | None = None
    beta_symbol: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")

    @property
    def offsets(self) -> tuple:
        return (self.a_shift, self.b_shift, self.c_shift, self.x_pow, self.y_pow)

    def describe(self) -> str:
        parts = []
        if self.prefactor is not None:
            parts.append(self.prefactor.label)
        if self.bracket is not None:
            parts.append(f"[{self.bracket.label}]")
        args = []
        for sym, k in (("a", self.a_shift), ("b", self.b_shift), ("c", self.c_shift)):
            if k:
                args.append(f"{sym}q^{k}")
        for sym, k in (("x", self.x_pow), ("y", self.y_pow)):
            if k:
                args.append(f"{sym}q^{k}")
        if self.beta_symbol:
            args.append(f"b->{self.beta_symbol}")
        parts.append(f"{self.kind}({', '.join(args)})")
        return " ".join(parts)


# ---------------------------------------------------------------------------
# grid construction


class _Powers:
    """Lookup table ``q**n`` for a contiguous integer range."""

    def __init__(self, q: complex, lo: int, hi: int):
        self.lo = lo
        # integer powering keeps q**n exact whenever it is representable
        self.table = np.array([q**n for n in range(lo, hi + 1)], dtype=complex)

    def __getitem__(self, n):
        return self.table[np.asarray(n) - self.lo]


def _pole_scan(val: complex, shift: int, upto: int, qp: _Powers, ctx: QContext, label: str) -> None:
    if upto <= 0:
        return
    factors = 1.0 - val * qp[np.arange(shift, shift + upto)]
    worst = int(np.argmin(np.abs(factors)))
    if abs(factors[worst]) <= ctx.pole_margin:
        raise DomainError(
            f"pole guard: |1 - {label} q^{shift + worst}| = {abs(factors[worst]):.3g} "
            f"<= margin {ctx.pole_margin:g}"
        )


def _start_coefficient(kind, a, ka, b, kb, c, kc, dr, ds, qp) -> complex:
    """Coefficient c_{dr,ds} by direct products (only used off the origin)."""

    def poch(val, shift, n):
        out = 1.0 + 0j
        for m in range(n):
            out *= 1.0 - val * qp[shift + m]
        return out

    num = poch(a, ka, 2 * dr + ds)
    if kind == H6:
        den = poch(b, kb, dr + ds)
    else:
        den = poch(b, kb, dr) * poch(c, kc, ds)
    den *= poch(1.0, 1, dr) * poch(1.0, 1, ds)
    return num / den


def _term_grid(kind, point: HornPoint, ts: TransformedSeries, ctx: QContext, R: int, S: int, dr=0, ds=0, beta=None):
    """Terms ``c_{r+dr, s+ds} X^r Y^s`` for 0 <= r <= R, 0 <= s <= S.

    Returns ``(terms, nr, ns)`` with ``nr``/``ns`` the absolute series
    indices of every grid entry.
    """
    q = ctx.q
    a = point.alpha
    b = point.beta if beta is None else beta
    c = point.gamma
    ka, kb, kc = ts.a_shift, ts.b_shift, ts.c_shift
    X = point.x * q**ts.x_pow
    Y = point.y * q**ts.y_pow

    top = 2 * (R + dr) + S + ds + 2
    lo = min(0, ka, kb, kc)
    hi = max(ka, kb, kc, 0) + top + 1
    qp = _Powers(q, lo, hi)

    if kind == H6:
        _pole_scan(b, kb, R + dr + S + ds, qp, ctx, "beta")
    else:
        _pole_scan(b, kb, R + dr, qp, ctx, "beta")
        _pole_scan(c, kc, S + ds, qp, ctx, "gamma")

    nr_col = dr + np.arange(R)  # r-steps nr -> nr + 1
    num_r = (1.0 - a * qp[ka + 2 * nr_col + ds]) * (1.0 - a * qp[ka + 2 * nr_col + ds + 1])
    if kind == H6:
        den_r = 1.0 - b * qp[kb + nr_col + ds]
    else:
        den_r = 1.0 - b * qp[kb + nr_col]
    den_r = den_r * (1.0 - qp[nr_col + 1])
    col0 = np.empty(R + 1, dtype=complex)
    col0[0] = _start_coefficient(kind, a, ka, b, kb, c, kc, dr, ds, qp) if (dr or ds) else 1.0
    col0[1:] = col0[0] * np.cumprod(num_r / den_r * X)

    NR = (dr + np.arange(R + 1))[:, None]
    NS = (ds + np.arange(S))[None, :]  # s-steps ns -> ns + 1
    num_s = 1.0 - a * qp[ka + 2 * NR + NS]
    if kind == H6:
        den_s = 1.0 - b * qp[kb + NR + NS]
    else:
        den_s = np.broadcast_to(1.0 - c * qp[kc + NS], num_s.shape)
    den_s = den_s * (1.0 - qp[NS + 1])
    terms = np.empty((R + 1, S + 1), dtype=complex)
    terms[:, 0] = col0
    terms[:, 1:] = col0[:, None] * np.cumprod(num_s / den_s * Y, axis=1)

    nr = np.broadcast_to(NR, terms.shape)
    ns = np.broadcast_to((ds + np.arange(S + 1))[None, :], terms.shape)
    return terms, nr, ns


# ---------------------------------------------------------------------------
# anti-diagonal summation


def _tail(diag_abs: np.ndarray, d: int, block: int) -> float:
    """Geometric tail bound from the last observed nonzero diagonals."""
    lo = max(0, d - 2 * block)
    window = [(i, diag_abs[i]) for i in range(lo, d + 1) if diag_abs[i] > 0]
    if not window:
        return 0.0
    if len(window) == 1:
        return float(window[-1][1])
    (i0, a0), (i1, a1) = window[0], window[-1]
    # log space: subnormal diagonal sums would overflow a plain ratio
    log_rho = (math.log(a1) - math.log(a0)) / (i1 - i0)
    if log_rho >= 0.0:
        return math.inf
    rho = math.exp(log_rho)
    # the next diagonal after d can be as large as a1 * rho^(d + 1 - i1)
    return float(a1 * math.exp(log_rho * (d + 1 - i1)) / (1.0 - rho))


def _scan(diag_sum, diag_abs, D, policy: EvalPolicy):
    """Return ``(stop_d, partial_sum, tail)``; ``stop_d`` is None when the
    stopping rule never fires within ``D``."""
    partial = 0j
    run = 0
    for d in range(D + 1):
        partial += diag_sum[d]
        if diag_abs[d] <= policy.rel_tol * abs(partial):
            run += 1
        else:
            run = 0
        if d + 1 >= _MIN_DIAGONALS and run >= policy.tail_block:
            tail = _tail(diag_abs, d, policy.tail_block)
            if tail <= policy.rel_tol * abs(partial):
                return d, partial, tail
    return None, partial, _tail(diag_abs, D, policy.tail_block)


def _summed(grid_fn, policy: EvalPolicy, ctx: QContext) -> EvalResult:
    limit = max(1, min(2 * policy.max_r, policy.max_s))
    D = min(_INITIAL_DIAGONALS, limit)
    while True:
        terms, nr, ns = grid_fn(D // 2 + 1, D)
        r_idx = np.arange(terms.shape[0])[:, None]
        s_idx = np.arange(terms.shape[1])[None, :]
        d_idx = np.broadcast_to(2 * r_idx + s_idx, terms.shape)
        mask = d_idx <= D
        flat_d = d_idx[mask]
        flat_t = terms[mask]
        if not np.all(np.isfinite(flat_t)):
            raise NumericOverflowError("series term overflowed")
        diag_sum = np.bincount(flat_d, weights=flat_t.real, minlength=D + 1) + 1j * np.bincount(
            flat_d, weights=flat_t.imag, minlength=D + 1
        )
        diag_abs = np.bincount(flat_d, weights=np.abs(flat_t), minlength=D + 1)
        stop, value, tail = _scan(diag_sum, diag_abs, D, policy)
        if stop is not None:
            used = int(np.count_nonzero(flat_d <= stop))
            return EvalResult(complex(value), used, float(tail), True)
        if D >= limit:
            break
        D = min(2 * D, limit)
    if not cmath.isfinite(value):
        raise NumericOverflowError("series sum overflowed")
    warnings.warn(
        f"series not converged within {D} anti-diagonals (tail estimate {tail:.3g})",
        TruncationWarning,
        stacklevel=3,
    )
    return EvalResult(complex(value), int(mask.sum()), float(tail), False)


_PLAIN = {H6: TransformedSeries(H6), H7: TransformedSeries(H7)}


def eval_series(kind: str, point: HornPoint, ctx: QContext, policy: EvalPolicy | None = None) -> EvalResult:
    policy = policy or EvalPolicy()
    ts = _PLAIN[kind]
    return _summed(lambda R, S: _term_grid(kind, point, ts, ctx, R, S)[0:3], policy, ctx)


def eval_h6(point: HornPoint, ctx: QContext, policy: EvalPolicy | None = None) -> EvalResult:
    """H6 at ``point`` by anti-diagonal summation."""
    return eval_series(H6, point, ctx, policy)


def eval_h7(point: HornPoint, ctx: QContext, policy: EvalPolicy | None = None) -> EvalResult:
    """H7 at ``point`` by anti-diagonal summation."""
    return eval_series(H7, point, ctx, policy)


def eval_h6_exp(pt: ExpHornPoint, ctx: QContext, policy: EvalPolicy | None = None) -> EvalResult:
    return eval_h6(pt.to_horn_point(ctx), ctx, policy)


def eval_h7_exp(pt: ExpHornPoint, ctx: QContext, policy: EvalPolicy | None = None) -> EvalResult:
    return eval_h7(pt.to_horn_point(ctx), ctx, policy)


def _single_term(kind, point, ctx, r, s):
    if r < 0 or s < 0:
        raise DomainError("term indices must be non-negative")
    terms, _, _ = _term_grid(kind, point, _PLAIN[kind], ctx, r, s)
    return complex(terms[r, s])


def term_h6(point: HornPoint, ctx: QContext, r: int, s: int) -> complex:
    """Single term ``(a;q)_{2r+s} / ((b;q)_{r+s} (q;q)_r (q;q)_s) x^r y^s``."""
    return _single_term(H6, point, ctx, r, s)


def term_h7(point: HornPoint, ctx: QContext, r: int, s: int) -> complex:
    return _single_term(H7, point, ctx, r, s)


def _beta_for(ts: TransformedSeries, point: HornPoint):
    if ts.beta_symbol is None:
        return None
    try:
        return point.free_map[ts.beta_symbol]
    except KeyError:
        raise DomainError(f"point carries no value for free symbol {ts.beta_symbol!r}") from None


def eval_transformed(
    ts: TransformedSeries, point: HornPoint, ctx: QContext, policy: EvalPolicy | None = None
) -> EvalResult:
    """``prefactor * sum mu(r, s) t_{r,s}`` with shifted parameters/arguments."""
    policy = policy or EvalPolicy()
    env = Env.from_point(point, ctx)
    beta = _beta_for(ts, point)

    def grid(R, S):
        terms, nr, ns = _term_grid(ts.kind, point, ts, ctx, R, S, beta=beta)
        if ts.bracket is not None:
            terms = terms * ts.bracket(nr, ns, env)
        return terms, nr, ns

    res = _summed(grid, policy, ctx)
    if ts.prefactor is None:
        return res
    pre = ts.prefactor(env)
    if not cmath.isfinite(pre):
        raise NumericOverflowError(f"prefactor {ts.prefactor.label} is not finite")
    return EvalResult(res.value * pre, res.terms_used, res.tail_estimate * abs(pre), res.truncated_cleanly)


# ---------------------------------------------------------------------------
# q-partial derivatives


def _falling_bracket(n, order, q):
    """[n]_q [n-1]_q ... [n-order+1]_q on an integer grid."""
    out = np.ones(np.shape(n), dtype=complex)
    for i in range(order):
        out = out * (1.0 - q ** (np.asarray(n) - i).astype(float)) / (1.0 - q)
    return out


def series_partial(
    kind: str, point: HornPoint, ctx: QContext, policy: EvalPolicy | None = None, var: str = "x", order: int = 1
) -> EvalResult:
    """Term-wise q-derivative ``D^order`` of the series in ``var``.

    Sums ``[n]_q...[n-order+1]_q c_n z^(n-order)`` directly, so it is also
    valid at ``z = 0`` where the difference quotient is not.
    """
    if order < 1:
        raise DomainError("order must be >= 1")
    if var not in ("x", "y"):
        raise DomainError(f"var must be 'x' or 'y', got {var!r}")
    policy = policy or EvalPolicy()
    ts = _PLAIN[kind]
    dr, ds = (order, 0) if var == "x" else (0, order)

    def grid(R, S):
        terms, nr, ns = _term_grid(kind, point, ts, ctx, R, S, dr=dr, ds=ds)
        mult = _falling_bracket(nr if var == "x" else ns, order, ctx.q)
        return terms * mult, nr, ns

    return _summed(grid, policy, ctx)


def _closed_form(kind, point, ctx, policy, var, order):
    from .qcore import check_pole, q_pochhammer

    if order < 1:
        raise DomainError("order must be >= 1")
    q = ctx.q
    a, b, c = point.alpha, point.beta, point.gamma
    if var == "x":
        num = q_pochhammer(a, ctx, 2 * order)
        den = q_pochhammer(b, ctx, order)
        ts = TransformedSeries(kind, a_shift=2 * order, b_shift=order)
    else:
        num = q_pochhammer(a, ctx, order)
        if kind == H6:
            den = q_pochhammer(b, ctx, order)
            ts = TransformedSeries(kind, a_shift=order, b_shift=order)
        else:
            den = q_pochhammer(c, ctx, order)
            ts = TransformedSeries(kind, a_shift=order, c_shift=order)
    for i in range(order):
        check_pole(1.0 - (b if (var == "x" or kind == H6) else c) * q**i, ctx, f"1 - denominator parameter q^{i}")
    pre = num / (den * (1.0 - q) ** order)
    res = eval_transformed(ts, point, ctx, policy)
    return EvalResult(pre * res.value, res.terms_used, abs(pre) * res.tail_estimate, res.truncated_cleanly)


def q_partial_x(
    kind: str, point: HornPoint, ctx: QContext, policy: EvalPolicy | None = None, order: int = 1
) -> EvalResult:
    """``D_{x,q}^order`` via the shifted-parameter closed form.

    H6: (a;q)_{2n} / ((b;q)_n (1-q)^n) H6(a q^{2n}; b q^n)
    H7: (a;q)_{2n} / ((b;q)_n (1-q)^n) H7(a q^{2n}; b q^n, c)
    """
    return _closed_form(kind, point, ctx, policy, "x", order)


def q_partial_y(
    kind: str, point: HornPoint, ctx: QContext, policy: EvalPolicy | None = None, order: int = 1
) -> EvalResult:
    """``D_{y,q}^order`` via the shifted-parameter closed form.

    H6: (a;q)_n / ((b;q)_n (1-q)^n) H6(a q^n; b q^n)
    H7: (a;q)_n / ((c;q)_n (1-q)^n) H7(a q^n; b, c q^n)
    """
    return _closed_form(kind, point, ctx, policy, "y", order)


# ---------------------------------------------------------------------------
# classical (q -> 1) limit


def classical_horn_oracle(kind: str, alpha, beta, gamma, x, y, policy: EvalPolicy | None = None) -> complex:
    """Classical Horn H6/H7 by direct partial sums with rising factorials.

    Region |x| < 1/4, |y| < 1. Terms come from neighbour ratios, so the
    factorials themselves never materialise.
    """
    policy = policy or EvalPolicy()
    alpha, beta, gamma, x, y = map(complex, (alpha, beta, gamma, x, y))
    if not (abs(x) < 0.25 and abs(y) < 1):
        raise DomainError(f"classical oracle needs |x| < 1/4 and |y| < 1, got x={x}, y={y}")
    for name, val in (("beta", beta),) + ((("gamma", gamma),) if kind == H7 else ()):
        if val.imag == 0 and val.real <= 0 and val.real.is_integer():
            raise DomainError(f"{name} must not be a non-positive integer")
    R, S = policy.max_r, policy.max_s
    total = 0j
    row_start = 1.0 + 0j
    for r in range(R + 1):
        if r > 0:
            m = 2 * (r - 1)
            den = (beta + r - 1) * r
            row_start *= (alpha + m) * (alpha + m + 1) / den * x
        term = row_start
        row = term
        row_abs = abs(term)
        for s in range(S):
            if kind == H6:
                den = (beta + r + s) * (s + 1)
            else:
                den = (gamma + s) * (s + 1)
            term *= (alpha + 2 * r + s) / den * y
            row += term
            row_abs += abs(term)
            if abs(term) <= 1e-18 * max(abs(row), 1e-300) and s > 4:
                break
        total += row
        if r > 4 and row_abs <= 1e-17 * abs(total):
            break
    if not cmath.isfinite(total):
        raise NumericOverflowError("classical Horn sum overflowed")
    return total


def classical_limit_check(
    kind: str, exp_point: ExpHornPoint, q_sequence: Sequence[float], policy: EvalPolicy | None = None
) -> list:
    """Distance between the exponent-form q-series and classical Horn as q -> 1-.

    The q-series is evaluated at ``(x, (1 - q) y)``: the y-argument must be
    rescaled for the termwise limit to exist, since
    ``(q;q)_s / (1-q)^s -> s!`` and the numerator/denominator Pochhammers
    leave one uncompensated ``(1 - q)^s``.
    """
    qs = [float(q) for q in q_sequence]
    if not qs:
        return []
    if any(not (0 < q < 1) for q in qs) or any(b <= a for a, b in zip(qs, qs[1:])):
        raise DomainError("q_sequence must be strictly increasing inside (0, 1)")
    target = classical_horn_oracle(
        kind, exp_point.a_exp, exp_point.b_exp, exp_point.c_exp, exp_point.x, exp_point.y, policy
    )
    # near q = 1 the terms decay slowly in the index, so widen the budget
    budget = EvalPolicy(max_r=2000, max_s=2000, rel_tol=(policy or EvalPolicy()).rel_tol)
    out = []
    for q in qs:
        # denominators behave like (1 - q)[beta + k]_q here, so the pole
        # guard has to shrink with 1 - q or it rejects every point near q = 1
        ctx = QContext(q, pole_margin=1e-3 * (1 - q))
        pt = ExpHornPoint(exp_point.a_exp, exp_point.b_exp, exp_point.c_exp, exp_point.x, (1 - q) * exp_point.y)
        val = (eval_h6_exp if kind == H6 else eval_h7_exp)(pt, ctx, budget).value
        out.append((q, abs(val - target)))
    return out
