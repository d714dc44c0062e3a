"""Parameter sampler, identity verifier and report writers."""

from .report import load_reports, report_emit, to_json, to_markdown
from .sampler import SampleConfig, sample_point
from .verify import (
    FAIL,
    PASS,
    SKIPPED,
    TrialRecord,
    VerificationReport,
    evaluate_trial,
    relative_error,
    tolerance,
    verify,
    verify_all,
)

__all__ = [
    "FAIL",
    "PASS",
    "SKIPPED",
    "SampleConfig",
    "TrialRecord",
    "VerificationReport",
    "evaluate_trial",
    "load_reports",
    "relative_error",
    "report_emit",
    "sample_point",
    "to_json",
    "to_markdown",
    "tolerance",
    "verify",
    "verify_all",
]
