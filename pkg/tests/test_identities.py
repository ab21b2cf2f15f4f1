import json

import numpy as np
import pytest

from qhorn import H6, H7, ConfigurationError, DomainError, EvalPolicy, ExpHornPoint, HornPoint, QContext
from qhorn.identities import (
    DISCREPANT,
    FAILED,
    INCONCLUSIVE,
    VERIFIED,
    SamplerConfig,
    audit_all,
    check_derivative_identity,
    check_identity,
    get_record,
    registry,
    sample_points,
)
from qhorn.identities.audit import _as_horn
from qhorn.identities.registry import TX, TY, P, Reading, S
from qhorn.report import render_report

import oracles

CTX = QContext(0.5)


@pytest.fixture(scope="module")
def report():
    return audit_all(SamplerConfig(seed=42), CTX, EvalPolicy())


def test_registry_shape():
    recs = registry()
    assert len(recs) == 74
    ids = [r.id for r in recs]
    assert len(set(ids)) == 74
    blocks = {
        "2.1 2.2 2.5 2.6": 4,
        "2.9 2.10 2.11 2.12": 4,
    }
    for labels, n in blocks.items():
        assert sum(r.eq_label in labels.split() for r in recs) == n
    labels = [r.eq_label for r in recs]
    assert labels == sorted(labels, key=lambda s: tuple(int(p) for p in s.split(".")))
    for missing in ("2.3", "2.7", "2.23", "2.61", "2.80", "2.89"):
        assert missing not in labels


def test_registry_records_are_well_formed():
    env_point = HornPoint(0.3 + 0.1j, 0.4, 0.6j, 0.1, 0.2, (("b", 0.2), ("c", 0.3)))
    from qhorn.series import Env

    env = Env.from_point(env_point, CTX)
    for rec in registry():
        assert rec.lhs and rec.rhs
        assert rec.family in ("H6", "H7", "H6exp", "H7exp")
        for con in rec.constraints:
            assert np.isfinite(abs(con.value(env)))
        for rd in rec.readings:
            assert rd.lhs and rd.rhs
            for ts in rd.series:
                assert all(abs(o) <= 4 for o in ts.offsets)


def test_constraint_labels():
    rec = get_record("E2.29")
    assert "β ≠ q" in [c.label for c in rec.constraints]
    assert rec.printed_constraint == "β ≠ p"
    assert get_record("2.29") is rec
    with pytest.raises(KeyError):
        get_record("E2.80")


def test_origin_examples():
    for rid in ("E2.29", "E2.50"):
        v = check_identity(rid, HornPoint(0.3 + 0.2j, 0.45), CTX)
        assert v.lhs_value == pytest.approx(1)
        assert v.abs_residual <= 1e-15


def test_terminating_contiguous_example():
    pt = HornPoint(2.0, 0.3, 0.4, 0.2, 0.1)  # alpha = 1/q
    v = check_identity("E2.25", pt, CTX)
    assert v.classification == VERIFIED
    assert v.rel_residual < 1e-10
    # both sides are finite sums: compare against fresh-product oracles
    lhs = oracles.finite_sum(H7, 2.0, 0.15, 0.4, 0.2, 0.1, 0.5, 1)
    assert abs(v.lhs_value - lhs) <= 1e-14


def test_constraint_violation_is_a_domain_error():
    with pytest.raises(DomainError):
        check_identity("E2.29", HornPoint(0.3, 0.5 + 1e-5, x=0.1, y=0.1), CTX)
    with pytest.raises(DomainError):
        check_identity("E2.50", HornPoint(0.3, 1.0, x=0.1, y=0.1), CTX)


def test_unknown_reading():
    with pytest.raises(KeyError):
        check_identity("E2.29", HornPoint(0.3, 0.4), CTX, variant="amended-9")


def test_derivative_at_origin():
    a, b = 0.3, 0.6
    v = check_derivative_identity("E2.11", HornPoint(a, b), CTX, order=1)
    want = (1 - a) * (1 - a * 0.5) / ((1 - b) * (1 - 0.5))
    assert v.lhs_value == pytest.approx(want, rel=1e-14)
    assert v.rhs_value == pytest.approx(want, rel=1e-14)


def test_derivative_generic_point():
    v = check_derivative_identity("E2.10", HornPoint(0.4 - 0.2j, 0.3, 0.55, 0.2, 0.15j), CTX, order=2)
    assert v.classification == VERIFIED
    assert v.rel_residual < 1e-8


def test_derivative_terminating_exact():
    q = 0.5
    a = q**-4
    pt = HornPoint(a, 0.3, 0.7, 0.2, 0.25)
    v = check_derivative_identity("E2.12", pt, CTX, order=3)
    ref = oracles.iterated_quotient(lambda z: oracles.finite_sum(H6, a, 0.3, 0.7, 0.2, z, q, 4), 0.25, q, 3)
    assert abs(v.lhs_value - ref) <= 1e-12 * max(1, abs(ref))
    assert v.classification == VERIFIED


def test_derivative_rejects_bad_requests():
    with pytest.raises(DomainError):
        check_derivative_identity("E2.29", HornPoint(0.3, 0.4), CTX)
    with pytest.raises(DomainError):
        check_derivative_identity("E2.9", HornPoint(0.3, 0.4, 0.5, 0.1), CTX, order=4)


@pytest.mark.parametrize("rid", ["E2.9", "E2.10", "E2.11", "E2.12"])
def test_derivative_encodings_agree_with_quotients(rid):
    rec = get_record(rid)
    for pt in sample_points(SamplerConfig(seed=3, n_points=5), rec, CTX):
        a = check_identity(rec, pt, CTX)
        b = check_derivative_identity(rec, pt, CTX, order=2)
        assert a.classification == b.classification == VERIFIED


def test_sampler_determinism_and_bounds():
    cfg = SamplerConfig(seed=11, n_points=25)
    rec = get_record("E2.25")
    first = sample_points(cfg, rec, CTX)
    assert first == sample_points(cfg, rec, CTX)
    assert first != sample_points(SamplerConfig(seed=12, n_points=25), rec, CTX)
    for pt in first:
        assert abs(pt.x) <= cfg.x_y_radius and abs(pt.y) <= cfg.x_y_radius
        assert 0.1 <= abs(pt.alpha) <= 0.9
        for k in range(-2, 40):
            assert abs(1 - pt.beta * 0.5**k) > cfg.margin
        assert abs(pt.beta - 0.5) > cfg.margin


def test_sampler_exponent_families():
    pts = sample_points(SamplerConfig(seed=5, n_points=10), get_record("E2.67"), CTX)
    assert all(isinstance(p, ExpHornPoint) for p in pts)
    for p in pts:
        assert 0.1 <= abs(_as_horn(p, CTX).alpha) <= 0.9 + 1e-12


def test_sampler_free_symbols():
    pts = sample_points(SamplerConfig(seed=5, n_points=3), get_record("E2.6"), CTX)
    assert all("b" in p.free_map for p in pts)


def test_sampler_exhaustion():
    with pytest.raises(ConfigurationError):
        sample_points(SamplerConfig(n_points=3, margin=10.0), get_record("E2.29"), CTX)
    with pytest.raises(ConfigurationError):
        SamplerConfig(x_y_radius=1.0)


def test_single_point_never_verifies_an_identity():
    rep = audit_all(SamplerConfig(n_points=1), CTX, EvalPolicy(), ids=["E2.29"])
    assert rep.identities[0]["classification"] == INCONCLUSIVE


def test_audit_covers_registry(report):
    assert len(report.identities) == 74
    assert [e["id"] for e in report.identities] == [r.id for r in registry()]
    for e in report.identities:
        assert e["classification"] in (VERIFIED, FAILED, INCONCLUSIVE, DISCREPANT)
        assert e["n_points"] == 25


def test_audit_is_deterministic(report):
    again = audit_all(SamplerConfig(seed=42), CTX, EvalPolicy())
    assert render_report(report) == render_report(again)


def test_audit_is_thread_count_independent(report, monkeypatch):
    monkeypatch.setenv("QHORN_THREADS", "4")
    assert render_report(audit_all(SamplerConfig(seed=42), CTX, EvalPolicy())) == render_report(report)


def test_bad_thread_setting(monkeypatch):
    monkeypatch.setenv("QHORN_THREADS", "zero")
    with pytest.raises(ConfigurationError):
        audit_all(SamplerConfig(n_points=2), CTX, EvalPolicy(), ids=["E2.29", "E2.30"])


def test_typo_variants_are_discrepant(report):
    for rid in ("E2.6", "E2.15", "E2.82"):
        e = report.entry(rid)
        assert e["classification"] == DISCREPANT
        assert e["literal_classification"] == FAILED
        assert e["variant"] == "amended-1"
        assert e["max_rel_residual"] < 1e-9 < e["literal_max_rel_residual"]


def test_both_readings_reported_side_by_side(report):
    e = report.entry("E2.56")
    assert [r["variant"] for r in e["readings"]] == ["literal", "amended-1"]
    for r in e["readings"]:
        assert r["classification"] in (VERIFIED, FAILED, INCONCLUSIVE)
        assert r["witness"] is not None


def test_failed_entries_carry_evidence(report):
    for e in report.identities:
        if e["literal_classification"] != FAILED:
            continue
        lit = e["readings"][0]
        assert lit["witness"] is not None and lit["max_rel_residual"] >= 1e-3
        assert {"lhs", "rhs", "rel_residual"} <= set(lit["witness"])
        assert len(e["readings"]) == 1 + len(get_record(e["id"]).variants)


def test_report_is_valid_json(report):
    data = json.loads(render_report(report))
    assert set(data) >= {"seed", "q", "policy", "identities"}
    assert data["seed"] == 42 and data["q"] == {"re": 0.5, "im": 0.0}


def _scaled(reading, factor):
    def scale(ts):
        pre = ts.prefactor
        fn = (lambda e, pre=pre: factor * pre(e)) if pre is not None else (lambda e: factor)
        return S(ts.kind, P("scaled", fn), ts.bracket, *ts.offsets, beta=ts.beta_symbol)

    return Reading("scaled", tuple(map(scale, reading.lhs)), tuple(map(scale, reading.rhs)))


@pytest.mark.parametrize("rid", ["E2.1", "E2.19", "E2.43", "E2.67", "E2.81", "E2.53"])
def test_classification_invariant_under_common_rescaling(rid):
    rec = get_record(rid)
    for pt in sample_points(SamplerConfig(seed=9, n_points=4), rec, CTX):
        base = check_identity(rec, pt, CTX, EvalPolicy(), rec.literal)
        for factor in (1e-3, -2.5 + 1j, 1e4):
            other = check_identity(rec, pt, CTX, EvalPolicy(), _scaled(rec.literal, factor))
            assert other.classification == base.classification


def test_halving_tolerance_never_turns_verified_into_failed(report):
    verified = [e["id"] for e in report.identities if e["classification"] == VERIFIED][::4]
    tighter = audit_all(SamplerConfig(seed=42, n_points=5), CTX, EvalPolicy().halved(), ids=verified)
    assert all(e["classification"] != FAILED for e in tighter.identities)


def test_origin_neutrality_for_identities_that_hold(report):
    for e in report.identities:
        rec = get_record(e["id"])
        for rd, summary in zip(rec.readings, e["readings"]):
            if summary["classification"] != VERIFIED:
                continue
            pt = sample_points(SamplerConfig(seed=1, n_points=1), rec, CTX)[0]
            if isinstance(pt, ExpHornPoint):
                pt = ExpHornPoint(pt.a_exp, pt.b_exp, pt.c_exp, 0, 0, pt.free)
            else:
                pt = HornPoint(pt.alpha, pt.beta, pt.gamma, 0, 0, pt.free)
            v = check_identity(rec, pt, CTX, EvalPolicy(), rd)
            assert v.abs_residual <= CTX.abs_tol, (rec.id, rd.name)


def test_terminating_parameters_for_identities_that_hold(report):
    for e in report.identities:
        if e["classification"] != VERIFIED:
            continue
        rec = get_record(e["id"])
        pt = sample_points(SamplerConfig(seed=2, n_points=1), rec, CTX)[0]
        for N in (1, 2):
            if isinstance(pt, ExpHornPoint):
                p = ExpHornPoint(-N, pt.b_exp, pt.c_exp, pt.x, pt.y, pt.free)
            else:
                p = HornPoint(0.5**-N, pt.beta, pt.gamma, pt.x, pt.y, pt.free)
            v = check_identity(rec, p, CTX)
            assert v.abs_residual <= 1e-12, (rec.id, N, v.abs_residual)


def _corrected(rid):
    """The printed relation with one term repaired by hand."""
    rec = get_record(rid)
    lhs, rhs = list(rec.lhs), list(rec.rhs)
    if rid == "E2.19":
        lhs[2] = S(H7, lhs[2].prefactor, TX, a=-1, x=1)
        lhs[3] = S(H7, lhs[3].prefactor, TY, a=-1, x=2)
    elif rid == "E2.43":
        rhs[-1] = S(H7, P("-αβy/((1-β)(1-γ))", lambda e: -e.a * e.b * e.y / ((1 - e.b) * (1 - e.c))), a=1, b=1, c=1, x=2)
    elif rid == "E2.48":
        rhs[4] = S(H7, P("-γy/((1-γ)(1-γq))", lambda e: -e.c * e.y / ((1 - e.c) * (1 - e.c * e.q))), a=1, c=2)
    elif rid in ("E2.53", "E2.55"):
        rhs[1] = S(rec.kind, rhs[0].prefactor, TX, x=1)
    elif rid == "E2.54":
        rhs[2] = S(H6, rhs[0].prefactor, TX, x=1, y=1)
    elif rid == "E2.56":
        rhs[2] = S(H7, rhs[0].prefactor, TX, x=1, y=1)
    elif rid == "E2.60":
        rhs[0] = S(H7, rhs[0].prefactor, TY, c=1)
    return Reading("corrected", tuple(lhs), tuple(rhs))


@pytest.mark.parametrize("rid", ["E2.19", "E2.43", "E2.48", "E2.53", "E2.54", "E2.55", "E2.56", "E2.60"])
def test_failed_literals_are_one_term_from_a_valid_relation(rid, report):
    """Guards the encoding: the failures come from the printed relation, not
    from the evaluation machinery."""
    assert report.entry(rid)["classification"] == FAILED
    rec = get_record(rid)
    for pt in sample_points(SamplerConfig(seed=4, n_points=8), rec, CTX):
        assert check_identity(rec, pt, CTX, EvalPolicy(), _corrected(rid)).classification == VERIFIED


def test_second_order_family_per_reading(report):
    for rid in ("E2.76", "E2.77", "E2.78", "E2.79", "E2.83", "E2.84", "E2.87", "E2.88"):
        names = [r["variant"] for r in report.entry(rid)["readings"]]
        assert names[:2] == ["literal", "amended-1"]
        assert "[r^2]" in report.entry(rid)["readings"][1]["rationale"] or "squared" in report.entry(rid)["readings"][1]["rationale"]


def test_second_order_left_side_at_origin():
    """[alpha+1]_q on the left against 1 on the right at x = y = 0."""
    rec = get_record("E2.76")
    pt = ExpHornPoint(0.4 + 0.3j, 1.7, 2.2, 0, 0)
    v = check_identity(rec, pt, CTX)
    a = _as_horn(pt, CTX).alpha
    assert v.lhs_value == pytest.approx((1 - a * 0.5) / 0.5)
    assert v.rhs_value == pytest.approx(1)
