"""Pole-avoiding sampler, per-point identity checks and the registry audit."""

from __future__ import annotations

import cmath
import logging
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DomainError, QHornError
from ..qcore import QContext
from ..series import (
    H6,
    H7,
    EvalPolicy,
    Env,
    ExpHornPoint,
    HornPoint,
    eval_series,
    eval_transformed,
    q_partial_x,
    q_partial_y,
    series_partial,
)
from .registry import IdentityRecord, Reading, get_record, registry

__all__ = [
    "VERIFIED",
    "FAILED",
    "INCONCLUSIVE",
    "DISCREPANT",
    "SamplerConfig",
    "SampleList",
    "Verdict",
    "AuditReport",
    "sample_points",
    "check_identity",
    "check_derivative_identity",
    "audit_all",
    "point_to_dict",
]

log = logging.getLogger(__name__)

VERIFIED = "VERIFIED"
FAILED = "FAILED"
INCONCLUSIVE = "INCONCLUSIVE"
DISCREPANT = "DISCREPANT-LITERAL"

FAIL_THRESHOLD = 1e-3
# shifted denominators are scanned this many q-steps past their offset
_POLE_DEPTH = 48


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 42
    n_points: int = 25
    x_y_radius: float = 0.25
    param_annulus: tuple = (0.1, 0.9)
    q_range: tuple = (0.2, 0.8)
    q_phase: bool = False
    margin: float = 0.05
    max_rejection_rate: float = 0.999

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if self.n_points < 1:
            raise ConfigurationError("n_points must be >= 1")
        if not (0 < self.x_y_radius < 1):
            raise ConfigurationError("x_y_radius must lie in (0, 1)")
        lo, hi = self.param_annulus
        if not (0 < lo < hi):
            raise ConfigurationError("param_annulus must satisfy 0 < lo < hi")
        qlo, qhi = self.q_range
        if not (0 < qlo < qhi < 1):
            raise ConfigurationError("q_range must satisfy 0 < lo < hi < 1")
        if self.margin <= 0:
            raise ConfigurationError("margin must be > 0")

    def rng(self, salt: str = "") -> np.random.Generator:
        return np.random.default_rng([self.seed, zlib.crc32(salt.encode())])

    def sample_q(self, rng: np.random.Generator) -> complex:
        mod = rng.uniform(*self.q_range)
        phase = rng.uniform(-np.pi / 4, np.pi / 4) if self.q_phase else 0.0
        return complex(mod * cmath.exp(1j * phase))


class SampleList(list):
    """Sampled points; ``rejected`` counts the discarded candidates."""

    rejected: int = 0


def _disk(rng, radius):
    rad = radius * np.sqrt(rng.uniform())
    return complex(rad * cmath.exp(2j * np.pi * rng.uniform()))


def _annulus(rng, lo, hi):
    return complex(rng.uniform(lo, hi) * cmath.exp(2j * np.pi * rng.uniform()))


def _denominators(ts, point: HornPoint):
    """(value, first shift) for every denominator Pochhammer of ``ts``."""
    beta = point.free_map.get(ts.beta_symbol, point.beta) if ts.beta_symbol else point.beta
    out = [(beta, ts.b_shift)]
    if ts.kind == H7:
        out.append((point.gamma, ts.c_shift))
    return out


def _pole_gap(rec: IdentityRecord, point: HornPoint, q: complex) -> float:
    qs = q ** np.arange(-4, _POLE_DEPTH)
    gap = np.inf
    seen = set()
    for ts in rec.all_series():
        for val, shift in _denominators(ts, point):
            if (val, shift) in seen:
                continue
            seen.add((val, shift))
            gap = min(gap, float(np.min(np.abs(1 - val * qs[shift + 4 :]))))
    return gap


def _constraint_gap(rec: IdentityRecord, env: Env) -> float:
    return min((abs(c.value(env)) for c in rec.constraints), default=np.inf)


def _draw(rec: IdentityRecord, cfg: SamplerConfig, ctx: QContext, rng):
    lo, hi = cfg.param_annulus
    a, b, c = (_annulus(rng, lo, hi) for _ in range(3))
    x, y = _disk(rng, cfg.x_y_radius), _disk(rng, cfg.x_y_radius)
    free = tuple((name, _annulus(rng, lo, hi)) for name in rec.free_symbols)
    # gamma is drawn even for H6 records: H6 ignores it, but a printed
    # foreign H7 token inside an H6 relation needs a value
    if rec.is_exp:
        lq = ctx.log_q
        return ExpHornPoint(*(cmath.log(v) / lq for v in (a, b, c)), x, y, free)
    return HornPoint(a, b, c, x, y, free)


def _as_horn(point, ctx: QContext) -> HornPoint:
    return point.to_horn_point(ctx) if isinstance(point, ExpHornPoint) else point


def sample_points(cfg: SamplerConfig, record: IdentityRecord | str, ctx: QContext) -> SampleList:
    """Deterministic rejection sampler.

    Candidates must keep every declared constraint and every shifted
    denominator of every registered reading farther than ``cfg.margin`` from
    a pole.
    """
    rec = get_record(record) if isinstance(record, str) else record
    rng = cfg.rng(rec.id)
    out = SampleList()
    tries = 0
    limit = int(np.ceil(cfg.n_points / (1 - cfg.max_rejection_rate)))
    margin = max(cfg.margin, ctx.pole_margin)
    while len(out) < cfg.n_points:
        tries += 1
        if tries > limit:
            raise ConfigurationError(
                f"sampler exhausted for {rec.id}: {len(out)} of {cfg.n_points} points after {tries - 1} draws"
            )
        pt = _draw(rec, cfg, ctx, rng)
        hp = _as_horn(pt, ctx)
        env = Env.from_point(hp, ctx)
        if _constraint_gap(rec, env) <= margin or _pole_gap(rec, hp, ctx.q) <= margin:
            continue
        out.append(pt)
    out.rejected = tries - len(out)
    if out.rejected:
        log.debug("%s: rejected %d candidates", rec.id, out.rejected)
    return out


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Verdict:
    id: str
    point: object
    q: complex
    lhs_value: complex
    rhs_value: complex
    abs_residual: float
    rel_residual: float
    classification: str
    variant_used: str = "literal"
    cond: float = 1.0
    truncated_cleanly: bool = True
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "variant_used": self.variant_used,
            "point": point_to_dict(self.point),
            "q": _cplx(self.q),
            "lhs_value": _cplx(self.lhs_value),
            "rhs_value": _cplx(self.rhs_value),
            "abs_residual": _real(self.abs_residual),
            "rel_residual": _real(self.rel_residual),
            "cond": _real(self.cond),
            "truncated_cleanly": self.truncated_cleanly,
            "classification": self.classification,
            "reason": self.reason,
        }


def _cplx(z) -> dict | None:
    if z is None:
        return None
    z = complex(z)
    return {"re": _real(z.real), "im": _real(z.imag)}


def _real(v):
    if v is None:
        return None
    v = float(v)
    return v if np.isfinite(v) else None


def point_to_dict(point) -> dict:
    if isinstance(point, ExpHornPoint):
        d = {"a_exp": point.a_exp, "b_exp": point.b_exp, "c_exp": point.c_exp, "x": point.x, "y": point.y}
    else:
        d = {"alpha": point.alpha, "beta": point.beta, "gamma": point.gamma, "x": point.x, "y": point.y}
    out = {k: _cplx(v) for k, v in d.items()}
    if point.free:
        out["free"] = {k: _cplx(v) for k, v in point.free}
    return out


def classify(rel_residual: float, cond: float, rel_tol: float, clean: bool) -> str:
    if not np.isfinite(rel_residual):
        return INCONCLUSIVE
    if rel_residual >= FAIL_THRESHOLD:
        return FAILED
    if clean and rel_residual <= 10 * rel_tol * cond:
        return VERIFIED
    return INCONCLUSIVE


def _check_constraints(rec: IdentityRecord, env: Env, ctx: QContext) -> None:
    for con in rec.constraints:
        val = con.value(env)
        if abs(val) <= ctx.pole_margin:
            raise DomainError(f"{rec.id}: constraint {con.label} violated (|value| = {abs(val):.3g})")


def _side(series, hp: HornPoint, ctx, policy):
    total = 0j
    mags = 0.0
    clean = True
    for ts in series:
        res = eval_transformed(ts, hp, ctx, policy)
        total += res.value
        mags += abs(res.value)
        clean = clean and res.truncated_cleanly
    return total, mags, clean


def check_identity(
    identity, point, ctx: QContext, policy: EvalPolicy | None = None, variant: str | Reading = "literal"
) -> Verdict:
    """Evaluate both sides of one reading at one point and classify."""
    rec = get_record(identity) if isinstance(identity, str) else identity
    policy = policy or EvalPolicy()
    reading = variant if isinstance(variant, Reading) else rec.reading(variant)
    hp = _as_horn(point, ctx)
    env = Env.from_point(hp, ctx)
    _check_constraints(rec, env, ctx)
    lhs, lmag, lclean = _side(reading.lhs, hp, ctx, policy)
    rhs, rmag, rclean = _side(reading.rhs, hp, ctx, policy)
    scale = max(abs(lhs), abs(rhs), ctx.abs_tol)
    abs_res = abs(lhs - rhs)
    rel = abs_res / scale
    cond = (lmag + rmag) / scale
    clean = lclean and rclean
    return Verdict(
        rec.id,
        point,
        ctx.q,
        lhs,
        rhs,
        abs_res,
        rel,
        classify(rel, cond, policy.rel_tol, clean),
        reading.name,
        cond,
        clean,
    )


_DERIVATIVE_IDS = {"E2.9": (H7, "x"), "E2.10": (H7, "y"), "E2.11": (H6, "x"), "E2.12": (H6, "y")}


def _with_arg(point: HornPoint, var: str, z: complex) -> HornPoint:
    if var == "x":
        return HornPoint(point.alpha, point.beta, point.gamma, z, point.y, point.free)
    return HornPoint(point.alpha, point.beta, point.gamma, point.x, z, point.free)


def _iterated_quotient(kind, point: HornPoint, ctx, policy, var, order):
    """``D^order`` by repeated difference quotients of the plain evaluator.

    Returns (value, amplification, clean): ``amplification`` bounds how much
    the absolute values of the sampled function grow through the quotients.
    """
    q = ctx.q
    z = point.x if var == "x" else point.y
    vals, mags, clean = [], [], True
    for i in range(order + 1):
        res = eval_series(kind, _with_arg(point, var, z * q**i), ctx, policy)
        vals.append(res.value)
        mags.append(abs(res.value))
        clean = clean and res.truncated_cleanly
    for _ in range(order):
        den = [(1 - q) * z * q**i for i in range(len(vals) - 1)]
        vals = [(vals[i] - vals[i + 1]) / den[i] for i in range(len(den))]
        mags = [(mags[i] + mags[i + 1]) / abs(den[i]) for i in range(len(den))]
    return vals[0], mags[0], clean


def check_derivative_identity(
    identity: str, point, ctx: QContext, policy: EvalPolicy | None = None, order: int = 1
) -> Verdict:
    """Closed-form q-partial derivative against black-box difference quotients.

    At a zero argument the quotient is undefined, so the term-wise
    derivative of the series is used as the reference instead.
    """
    rec = get_record(identity) if isinstance(identity, str) else identity
    if rec.id not in _DERIVATIVE_IDS:
        raise DomainError(f"{rec.id} is not a q-derivative formula")
    if not 1 <= order <= 3:
        raise DomainError("order must be 1, 2 or 3")
    policy = policy or EvalPolicy()
    kind, var = _DERIVATIVE_IDS[rec.id]
    hp = _as_horn(point, ctx)
    closed = (q_partial_x if var == "x" else q_partial_y)(kind, hp, ctx, policy, order)
    tight = EvalPolicy(policy.max_r, policy.max_s, min(policy.rel_tol, 1e-15), policy.tail_block)
    z = hp.x if var == "x" else hp.y
    if z == 0:
        ref = series_partial(kind, hp, ctx, tight, var, order)
        oracle, amp, oclean = ref.value, abs(ref.value), ref.truncated_cleanly
    else:
        oracle, amp, oclean = _iterated_quotient(kind, hp, ctx, tight, var, order)
    scale = max(abs(closed.value), abs(oracle), ctx.abs_tol)
    abs_res = abs(closed.value - oracle)
    rel = abs_res / scale
    cond = (abs(closed.value) + amp) / scale
    clean = closed.truncated_cleanly and oclean
    return Verdict(
        rec.id,
        point,
        ctx.q,
        closed.value,
        oracle,
        abs_res,
        rel,
        classify(rel, cond, policy.rel_tol, clean),
        f"order-{order}",
        cond,
        clean,
    )


# ---------------------------------------------------------------------------
# audit


def _reading_summary(rec: IdentityRecord, reading: Reading, points, ctx, policy) -> dict:
    counts = {VERIFIED: 0, FAILED: 0, INCONCLUSIVE: 0}
    worst = None
    reasons = []
    for pt in points:
        try:
            v = check_identity(rec, pt, ctx, policy, reading)
        except QHornError as exc:
            counts[INCONCLUSIVE] += 1
            reasons.append(f"{type(exc).__name__}: {exc}")
            continue
        counts[v.classification] += 1
        if not v.truncated_cleanly:
            reasons.append("truncation budget exhausted")
        if worst is None or not (v.rel_residual <= worst.rel_residual):
            worst = v
    n = len(points)
    if counts[FAILED]:
        cls = FAILED
    elif counts[VERIFIED] == n and n > 1:
        cls = VERIFIED
    else:
        cls = INCONCLUSIVE
    witness = None
    if worst is not None:
        witness = point_to_dict(worst.point)
        witness.update(
            lhs=_cplx(worst.lhs_value),
            rhs=_cplx(worst.rhs_value),
            abs_residual=_real(worst.abs_residual),
            rel_residual=_real(worst.rel_residual),
            cond=_real(worst.cond),
        )
    return {
        "variant": reading.name,
        "rationale": reading.rationale,
        "classification": cls,
        "max_rel_residual": _real(worst.rel_residual) if worst is not None else None,
        "n_verified": counts[VERIFIED],
        "n_failed": counts[FAILED],
        "n_inconclusive": counts[INCONCLUSIVE],
        "reasons": sorted(set(reasons)),
        "witness": witness,
    }


def _audit_record(rec: IdentityRecord, cfg: SamplerConfig, ctx: QContext, policy: EvalPolicy) -> dict:
    try:
        points = sample_points(cfg, rec, ctx)
    except ConfigurationError as exc:
        points = []
        reason = str(exc)
    else:
        reason = ""
    readings = [_reading_summary(rec, rd, points, ctx, policy) for rd in rec.readings]
    literal = readings[0]
    chosen = literal
    cls = literal["classification"]
    if cls == FAILED:
        passing = [r for r in readings[1:] if r["classification"] == VERIFIED]
        if passing:
            chosen = passing[0]
            cls = DISCREPANT
    entry = {
        "id": rec.id,
        "eq": rec.eq_label,
        "family": rec.family,
        "variant": chosen["variant"],
        "n_points": len(points),
        "max_rel_residual": chosen["max_rel_residual"],
        "classification": cls,
        "witness": chosen["witness"],
        "literal_classification": literal["classification"],
        "literal_max_rel_residual": literal["max_rel_residual"],
        "constraints": [c.label for c in rec.constraints],
        "readings": readings,
    }
    if rec.printed_constraint:
        entry["printed_constraint"] = rec.printed_constraint
    if reason:
        entry["reason"] = reason
    return entry


def _threads() -> int:
    raw = os.environ.get("QHORN_THREADS", "")
    if not raw:
        return min(8, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f"QHORN_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigurationError(f"QHORN_THREADS must be a positive integer, got {raw!r}")
    return n


def _eq_key(entry):
    major, minor = entry["eq"].split(".")
    return (int(major), int(minor))


@dataclass
class AuditReport:
    seed: int
    q: complex
    policy: EvalPolicy
    sampler: SamplerConfig
    identities: list = field(default_factory=list)

    def to_dict(self) -> dict:
        counts = {}
        for e in self.identities:
            counts[e["classification"]] = counts.get(e["classification"], 0) + 1
        return {
            "seed": self.seed,
            "q": _cplx(self.q),
            "policy": {
                "max_r": self.policy.max_r,
                "max_s": self.policy.max_s,
                "rel_tol": self.policy.rel_tol,
                "tail_block": self.policy.tail_block,
            },
            "sampler": {
                "n_points": self.sampler.n_points,
                "x_y_radius": self.sampler.x_y_radius,
                "param_annulus": list(self.sampler.param_annulus),
                "margin": self.sampler.margin,
            },
            "summary": counts,
            "identities": self.identities,
        }

    def entry(self, identity_id: str) -> dict:
        for e in self.identities:
            if e["id"] == identity_id:
                return e
        raise KeyError(identity_id)

    @property
    def has_unexplained_failure(self) -> bool:
        return any(e["classification"] == FAILED for e in self.identities)


def audit_all(
    cfg: SamplerConfig | None = None, ctx: QContext | None = None, policy: EvalPolicy | None = None, ids=None
) -> AuditReport:
    """Sample, check and classify every record (or the ``ids`` subset)."""
    cfg = cfg or SamplerConfig()
    ctx = ctx or QContext(0.5)
    policy = policy or EvalPolicy()
    recs = registry() if not ids else [get_record(i) for i in ids]
    workers = _threads()
    if workers > 1 and len(recs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(lambda r: _audit_record(r, cfg, ctx, policy), recs))
    else:
        entries = [_audit_record(r, cfg, ctx, policy) for r in recs]
    entries.sort(key=_eq_key)
    return AuditReport(cfg.seed, ctx.q, policy, cfg, entries)
