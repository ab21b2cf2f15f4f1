"""Identity registry, sampler and audit engine."""

from .audit import (
    DISCREPANT,
    FAILED,
    INCONCLUSIVE,
    VERIFIED,
    AuditReport,
    SampleList,
    SamplerConfig,
    Verdict,
    audit_all,
    check_derivative_identity,
    check_identity,
    point_to_dict,
    sample_points,
)
from .registry import DERIVATIVE_ORDER, FAMILIES, Constraint, IdentityRecord, Reading, get_record, registry

__all__ = [
    "DISCREPANT",
    "FAILED",
    "INCONCLUSIVE",
    "VERIFIED",
    "AuditReport",
    "SampleList",
    "SamplerConfig",
    "Verdict",
    "audit_all",
    "check_derivative_identity",
    "check_identity",
    "point_to_dict",
    "sample_points",
    "DERIVATIVE_ORDER",
    "FAMILIES",
    "Constraint",
    "IdentityRecord",
    "Reading",
    "get_record",
    "registry",
]
