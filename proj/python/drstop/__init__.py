"""Robust stopping thresholds under moment ambiguity."""

from ._core import (
    DrstopError,
    Spec,
    cox_upper_bound,
    mad_upper_bound,
    membership_discrepancy,
    moment_bound,
    simulate,
    tail_lower_bound,
    tail_probability_infimum,
    thresholds,
    turning_point,
    validate,
    verify_certificate,
    witness,
)

__all__ = [
    "DrstopError",
    "Spec",
    "cox_upper_bound",
    "mad_upper_bound",
    "membership_discrepancy",
    "moment_bound",
    "simulate",
    "tail_lower_bound",
    "tail_probability_infimum",
    "thresholds",
    "turning_point",
    "validate",
    "verify_certificate",
    "witness",
]
