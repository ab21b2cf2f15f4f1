"""``qhorn`` command line: eval, deriv, verify, audit and limit."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, fields

from .errors import ConfigurationError, DomainError, NumericOverflowError, QHornError
from .identities import (
    FAILED,
    SamplerConfig,
    audit_all,
    check_derivative_identity,
    check_identity,
    get_record,
    point_to_dict,
    sample_points,
)
from .qcore import QContext
from .report import FORMATS, dumps_json, render_report, write_atomic
from .series import (
    H6,
    H7,
    EvalPolicy,
    ExpHornPoint,
    HornPoint,
    classical_limit_check,
    eval_series,
    q_partial_x,
    q_partial_y,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SUBCOMMANDS = ("eval", "deriv", "verify", "audit", "limit")
FUNCTIONS = ("h6", "h7", "h6exp", "h7exp")
DEFAULT_Q_SEQ = (0.9, 0.99, 0.999, 0.9999)

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX = re.compile(rf"^([+-]?{_NUM})(?:([+-]{_NUM})i)?$")


class UsageError(QHornError, ValueError):
    pass


def parse_complex(text: str) -> complex:
    """``RE``, ``RE+IMi`` or ``RE-IMi``; no spaces."""
    m = _COMPLEX.match(text)
    if not m:
        raise UsageError(f"malformed complex literal {text!r}; expected RE, RE+IMi or RE-IMi")
    re_part = float(m.group(1))
    im_part = float(m.group(2)) if m.group(2) else 0.0
    return complex(re_part, im_part)


def format_complex(z: complex) -> str:
    z = complex(z)
    out = repr(z.real)
    if z.imag != 0:
        out += ("-" if math.copysign(1.0, z.imag) < 0 else "+") + repr(abs(z.imag)) + "i"
    return out


@dataclass(frozen=True)
class CliConfig:
    subcommand: str
    function: str | None = None
    q: complex = 0.5 + 0j
    alpha: complex | None = None
    beta: complex | None = None
    gamma: complex | None = None
    x: complex | None = None
    y: complex | None = None
    ids: tuple = ()
    variant: str = "literal"
    seed: int = 42
    n_points: int = 25
    tol: float = 1e-12
    max_terms: int = 200
    format: str = "json"
    output: str | None = None
    order: int | None = None
    var: str = "x"
    q_seq: tuple = DEFAULT_Q_SEQ


_SCALARS = ("q", "alpha", "beta", "gamma", "x", "y")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text):
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return val


def _seed(text):
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return val


def _pos_float(text):
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (val > 0 and math.isfinite(val)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return val


def _complex_arg(text):
    try:
        return parse_complex(text)
    except UsageError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _q_seq(text):
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed q sequence {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qhorn", description="Evaluate q-Horn H6/H7 series and audit their identities.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("--q", type=_complex_arg, default=0.5 + 0j)
    common.add_argument("--tol", type=_pos_float, default=1e-12)
    common.add_argument("--max-terms", dest="max_terms", type=_positive_int, default=200)
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--output")
    point = _Parser(add_help=False)
    for name in ("alpha", "beta", "gamma", "x", "y"):
        point.add_argument(f"--{name}", type=_complex_arg)

    ev = sub.add_parser("eval", parents=[common, point], help="evaluate a series at a point")
    ev.add_argument("--fn", dest="function", choices=FUNCTIONS, required=True)

    de = sub.add_parser("deriv", parents=[common, point], help="closed-form q-partial derivative")
    de.add_argument("--fn", dest="function", choices=FUNCTIONS, required=True)
    de.add_argument("--var", choices=("x", "y"), default="x")
    de.add_argument("--order", type=int, choices=(1, 2, 3), default=1)

    ve = sub.add_parser("verify", parents=[common, point], help="check one identity at one point")
    ve.add_argument("--id", dest="ids", action="append", required=True)
    ve.add_argument("--variant", default="literal")
    ve.add_argument("--seed", type=_seed, default=42)
    ve.add_argument("--order", type=int, choices=(1, 2, 3))

    au = sub.add_parser("audit", parents=[common], help="classify every registered identity")
    au.add_argument("--id", dest="ids", action="append", default=[])
    au.add_argument("--seed", type=_seed, default=42)
    au.add_argument("--n-points", dest="n_points", type=_positive_int, default=25)

    li = sub.add_parser("limit", parents=[common, point], help="distance to classical Horn as q -> 1")
    li.add_argument("--fn", dest="function", choices=FUNCTIONS, required=True)
    li.add_argument("--q-seq", dest="q_seq", type=_q_seq, default=DEFAULT_Q_SEQ)
    return p


_VALUE_FLAGS = {"--q", "--alpha", "--beta", "--gamma", "--x", "--y"}


def _glue_negative_values(argv):
    """argparse mistakes ``-0.3+0.1i`` for an option; bind it to its flag."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") and _COMPLEX.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def parse_args(argv) -> CliConfig:
    ns = _build_parser().parse_args(_glue_negative_values(list(argv)))
    vals = {k: v for k, v in vars(ns).items() if v is not None}
    if "ids" in vals:
        ids = []
        for chunk in vals["ids"]:
            ids.extend(t for t in chunk.split(",") if t)
        vals["ids"] = tuple(ids)
    if "q_seq" in vals:
        vals["q_seq"] = tuple(vals["q_seq"])
    cfg = CliConfig(**{f.name: vals[f.name] for f in fields(CliConfig) if f.name in vals})
    _validate(cfg)
    return cfg


def _validate(cfg: CliConfig) -> None:
    if not 0 < abs(cfg.q) < 1:
        raise UsageError(f"|q| must lie in (0, 1), got {format_complex(cfg.q)}")
    if cfg.function in ("h6", "h6exp") and cfg.gamma is not None:
        raise UsageError("--gamma conflicts with --fn h6/h6exp (H6 has no gamma parameter)")
    if cfg.subcommand in ("eval", "deriv", "limit"):
        missing = [n for n in ("alpha", "beta") if getattr(cfg, n) is None]
        if cfg.function in ("h7", "h7exp") and cfg.gamma is None:
            missing.append("gamma")
        if missing:
            raise UsageError("missing required flag(s): " + ", ".join(f"--{m}" for m in missing))
    if cfg.subcommand == "verify" and len(cfg.ids) != 1:
        raise UsageError("verify takes exactly one --id")
    if cfg.subcommand == "limit" and cfg.function not in ("h6exp", "h7exp", "h6", "h7"):
        raise UsageError("limit needs --fn")


def format_argv(cfg: CliConfig) -> list:
    """Inverse of :func:`parse_args` for valid configs."""
    argv = [cfg.subcommand]
    if cfg.function is not None:
        argv += ["--fn", cfg.function]
    for name in _SCALARS:
        val = getattr(cfg, name)
        if val is not None:
            argv.append(f"--{name}={format_complex(val)}")
    argv += ["--tol", repr(cfg.tol), "--max-terms", str(cfg.max_terms), "--format", cfg.format]
    if cfg.output is not None:
        argv += ["--output", cfg.output]
    if cfg.subcommand in ("verify", "audit"):
        for i in cfg.ids:
            argv += ["--id", i]
        argv += ["--seed", str(cfg.seed)]
    if cfg.subcommand == "verify":
        argv += ["--variant", cfg.variant]
        if cfg.order is not None:
            argv += ["--order", str(cfg.order)]
    if cfg.subcommand == "audit":
        argv += ["--n-points", str(cfg.n_points)]
    if cfg.subcommand == "deriv":
        argv += ["--var", cfg.var, "--order", str(cfg.order or 1)]
    if cfg.subcommand == "limit":
        argv += ["--q-seq", ",".join(repr(q) for q in cfg.q_seq)]
    return argv


# ---------------------------------------------------------------------------


def _policy(cfg: CliConfig) -> EvalPolicy:
    return EvalPolicy(cfg.max_terms, cfg.max_terms, cfg.tol)


def _kind(function: str) -> str:
    return H6 if function.startswith("h6") else H7


def _point(cfg: CliConfig, ctx: QContext) -> HornPoint:
    g = cfg.gamma if cfg.gamma is not None else 0j
    x = cfg.x if cfg.x is not None else 0j
    y = cfg.y if cfg.y is not None else 0j
    if cfg.function and cfg.function.endswith("exp"):
        return ExpHornPoint(cfg.alpha, cfg.beta, g, x, y).to_horn_point(ctx)
    return HornPoint(cfg.alpha, cfg.beta, g, x, y)


def _finite_or_none(v):
    return float(v) if math.isfinite(v) else None


def _cplx(z):
    return {"re": complex(z).real, "im": complex(z).imag}


def _render_record(rec: dict, fmt: str) -> bytes:
    if fmt == "json":
        return dumps_json(rec).encode()
    flat = {}
    for k, v in rec.items():
        if isinstance(v, dict) and set(v) == {"re", "im"}:
            flat[k] = format_complex(complex(v["re"], v["im"]))
        elif isinstance(v, dict):
            for kk, vv in v.items():
                flat[f"{k}.{kk}"] = format_complex(complex(vv["re"], vv["im"])) if isinstance(vv, dict) else vv
        else:
            flat[k] = v
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(flat.keys())
        w.writerow(flat.values())
        return buf.getvalue().encode()
    width = max(len(k) for k in flat)
    return ("".join(f"{k.ljust(width)}  {v}\n" for k, v in flat.items())).encode()


def _render_table(rows: list, fmt: str, key: str) -> bytes:
    if fmt == "json":
        return dumps_json({key: rows}).encode()
    cols = list(rows[0].keys()) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in cols])
        return buf.getvalue().encode()
    lines = ["  ".join(c.ljust(14) for c in cols).rstrip()]
    lines += ["  ".join(f"{r[c]:<14.6g}" if isinstance(r[c], float) else str(r[c]).ljust(14) for c in cols).rstrip() for r in rows]
    return ("\n".join(lines) + "\n").encode()


def _run_eval(cfg, ctx):
    res = eval_series(_kind(cfg.function), _point(cfg, ctx), ctx, _policy(cfg))
    out = {
        "function": cfg.function,
        "value": _cplx(res.value),
        "terms_used": res.terms_used,
        "tail_estimate": _finite_or_none(res.tail_estimate),
        "truncated_cleanly": res.truncated_cleanly,
    }
    return EXIT_OK, _render_record(out, cfg.format)


def _run_deriv(cfg, ctx):
    fn = q_partial_x if cfg.var == "x" else q_partial_y
    order = cfg.order or 1
    res = fn(_kind(cfg.function), _point(cfg, ctx), ctx, _policy(cfg), order)
    out = {
        "function": cfg.function,
        "var": cfg.var,
        "order": order,
        "value": _cplx(res.value),
        "terms_used": res.terms_used,
        "tail_estimate": _finite_or_none(res.tail_estimate),
        "truncated_cleanly": res.truncated_cleanly,
    }
    return EXIT_OK, _render_record(out, cfg.format)


def _verify_point(cfg, rec, ctx):
    if cfg.alpha is None and cfg.beta is None:
        sampler = SamplerConfig(seed=cfg.seed, n_points=1)
        return sample_points(sampler, rec, ctx)[0]
    if cfg.alpha is None or cfg.beta is None:
        raise UsageError("give both --alpha and --beta, or neither to sample a point")
    g = cfg.gamma if cfg.gamma is not None else 0j
    x = cfg.x if cfg.x is not None else 0j
    y = cfg.y if cfg.y is not None else 0j
    return (ExpHornPoint if rec.is_exp else HornPoint)(cfg.alpha, cfg.beta, g, x, y)


def _run_verify(cfg, ctx):
    try:
        rec = get_record(cfg.ids[0])
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    pt = _verify_point(cfg, rec, ctx)
    if cfg.order is not None:
        v = check_derivative_identity(rec, pt, ctx, _policy(cfg), cfg.order)
    else:
        try:
            v = check_identity(rec, pt, ctx, _policy(cfg), cfg.variant)
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    return EXIT_OK, _render_record(v.to_dict(), cfg.format)


def _run_audit(cfg, ctx):
    try:
        for i in cfg.ids:
            get_record(i)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    report = audit_all(SamplerConfig(seed=cfg.seed, n_points=cfg.n_points), ctx, _policy(cfg), ids=list(cfg.ids) or None)
    code = EXIT_FAILED if any(e["classification"] == FAILED for e in report.identities) else EXIT_OK
    return code, render_report(report, cfg.format)


def _run_limit(cfg, ctx):
    g = cfg.gamma if cfg.gamma is not None else 0j
    pt = ExpHornPoint(cfg.alpha, cfg.beta, g, cfg.x or 0j, cfg.y or 0j)
    rows = [{"q": q, "abs_error": err} for q, err in classical_limit_check(_kind(cfg.function), pt, cfg.q_seq, _policy(cfg))]
    return EXIT_OK, _render_table(rows, cfg.format, "limit")


_RUNNERS = {"eval": _run_eval, "deriv": _run_deriv, "verify": _run_verify, "audit": _run_audit, "limit": _run_limit}


def run(cfg: CliConfig) -> tuple:
    """Execute a parsed config; returns ``(exit_code, payload_bytes)``."""
    try:
        ctx = QContext(cfg.q, rel_tol=cfg.tol)
    except QHornError as exc:
        raise UsageError(str(exc)) from None
    return _RUNNERS[cfg.subcommand](cfg, ctx)


def _error_payload(exc: BaseException, code: int, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"error": {"type": type(exc).__name__, "message": str(exc), "exit_code": code}}, sort_keys=True) + "\n"
    return f"qhorn: error: {exc}\n"


def _requested_format(argv) -> str:
    for i, tok in enumerate(argv):
        if tok == "--format" and i + 1 < len(argv):
            return argv[i + 1] if argv[i + 1] in FORMATS else "json"
        if tok.startswith("--format="):
            val = tok.split("=", 1)[1]
            return val if val in FORMATS else "json"
    return "json"


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = _requested_format(argv)
    try:
        cfg = parse_args(argv)
        code, payload = run(cfg)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, ConfigurationError) as exc:
        sys.stderr.write(_error_payload(exc, EXIT_USAGE, fmt))
        return EXIT_USAGE
    except (DomainError, NumericOverflowError, QHornError, ArithmeticError) as exc:
        sys.stderr.write(_error_payload(exc, EXIT_NUMERIC, fmt))
        return EXIT_NUMERIC
    if cfg.output:
        write_atomic(cfg.output, payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    raise SystemExit(main())
