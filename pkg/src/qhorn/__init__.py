"""Numerical q-Horn H6/H7 double series and an audit of their identities."""

from .errors import ConfigurationError, DomainError, NumericOverflowError, QHornError, TruncationWarning
from .qcore import QContext, q_derivative, q_factorial, q_number, q_pochhammer, q_power, theta
from .series import (
    H6,
    H7,
    EvalPolicy,
    EvalResult,
    ExpHornPoint,
    HornPoint,
    TransformedSeries,
    eval_h6,
    eval_h6_exp,
    eval_h7,
    eval_h7_exp,
    eval_series,
    eval_transformed,
    q_partial_x,
    q_partial_y,
)

__version__ = "0.1.0"
