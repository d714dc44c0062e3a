"""Numerical verification of catalog identities at sampled points."""

from __future__ import annotations

import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import mpmath
from mpmath import mp

from .. import __version__
from ..catalog import Catalog, Identity, default_catalog
from ..errors import QIdentError, SamplingExhaustedError
from ..expr import Evaluator, ParamEnv
from ..qcore import GUARD_DIGITS, TruncationControl
from .sampler import SampleConfig, sample_point

#: fraction of skipped trials above which a run fails
MAX_SKIPPED_FRACTION = 0.2
#: a negative variant counts as refuted when its error exceeds this
NEGATIVE_THRESHOLD = 1e-6

PASS, FAIL, SKIPPED = "pass", "fail", "skipped-degenerate"


def relative_error(x, y, digits: int):
    """``|x - y| / max(|x|, |y|, 10^-digits)``."""
    floor = mpmath.mpf(10) ** (-digits)
    return abs(x - y) / max(abs(x), abs(y), floor)


def tolerance(digits: int):
    return mpmath.mpf(10) ** (-(digits - 10))


def fmt(x, digits: int) -> str:
    """Complex number as ``"re,im"``."""
    x = mpmath.mpc(x)
    return f"{mpmath.nstr(x.real, digits)},{mpmath.nstr(x.imag, digits)}"


@dataclass
class TrialRecord:
    index: int
    params: dict
    status: str
    lhs: str | None = None
    rhs: list = field(default_factory=list)
    rel_errors: list = field(default_factory=list)
    rel_error: float | None = None
    terms: int = 0
    negative_rel_error: float | None = None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "params": self.params,
            "status": self.status,
            "values": {"lhs": self.lhs, "rhs": self.rhs},
            "rel_errors": self.rel_errors,
            "rel_error": self.rel_error,
            "terms": self.terms,
            "negative_rel_error": self.negative_rel_error,
            "reason": self.reason,
        }


@dataclass
class VerificationReport:
    id: str
    paper_label: str
    seed: int
    digits: int
    trials: list
    has_negative: bool = False
    error: str = ""
    exhausted: bool = False
    timestamp: str = ""

    @property
    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, SKIPPED: 0}
        for t in self.trials:
            out[t.status] += 1
        return out

    @property
    def passed(self) -> bool:
        c = self.counts
        if self.error or not self.trials or c[FAIL] or not c[PASS]:
            return False
        return c[SKIPPED] <= MAX_SKIPPED_FRACTION * len(self.trials)

    def aggregate(self) -> dict:
        errs = [t.rel_error for t in self.trials if t.rel_error is not None and t.status != SKIPPED]
        c = self.counts
        return {
            "max_rel_error": max(errs) if errs else None,
            "median_rel_error": statistics.median(errs) if errs else None,
            "pass_count": c[PASS],
            "fail_count": c[FAIL],
            "skipped_count": c[SKIPPED],
            "passed": self.passed,
        }

    def negative_result(self) -> dict | None:
        if not self.has_negative:
            return None
        errs = [t.negative_rel_error for t in self.trials if t.negative_rel_error is not None]
        failed = sum(e > NEGATIVE_THRESHOLD for e in errs)
        return {
            "evaluated": len(errs),
            "failed": failed,
            "fail_fraction": failed / len(errs) if errs else None,
            "min_rel_error": min(errs) if errs else None,
            "threshold": NEGATIVE_THRESHOLD,
        }

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "paper_label": self.paper_label,
            "tool": "qident",
            "version": __version__,
            "seed": self.seed,
            "digits": self.digits,
            "trials": [t.to_dict() for t in self.trials],
            "aggregate": self.aggregate(),
            "negative_variant_result": self.negative_result(),
            "error": self.error,
            "timestamp": self.timestamp,
        }


def evaluate_trial(identity: Identity, env: ParamEnv, index: int, digits: int) -> TrialRecord:
    """Evaluate every side of ``identity`` at ``env`` and compare them pairwise."""
    params = {k: fmt(v.value, digits) for k, v in sorted(env.bindings.items())}
    params["q"] = fmt(env.q.q.value, digits)
    ctl = TruncationControl.for_digits(digits)
    with mp.workdps(digits + GUARD_DIGITS):
        try:
            ev = Evaluator(identity.bind(env.raw(), ctl), ctl)
            values = [ev(e) for _, e in identity.sides()]
        except (QIdentError, ZeroDivisionError, ValueError, OverflowError) as exc:
            return TrialRecord(index, params, SKIPPED, reason=f"{type(exc).__name__}: {exc}")
        lhs = values[0]
        pair = max(relative_error(x, y, digits) for x, y in combinations(values, 2)) if len(values) > 1 else 0
        rec = TrialRecord(
            index,
            params,
            PASS if pair <= tolerance(digits) else FAIL,
            lhs=fmt(lhs, digits),
            rhs=[fmt(v, digits) for v in values[1:]],
            rel_errors=[float(relative_error(lhs, v, digits)) for v in values[1:]],
            rel_error=float(pair),
            terms=ev.terms,
        )
        if identity.negative_variant is not None:
            try:
                neg = ev(identity.negative_variant)
                rec.negative_rel_error = float(relative_error(lhs, neg, digits))
            except (QIdentError, ZeroDivisionError, ValueError, OverflowError) as exc:
                rec.reason = f"negative variant: {type(exc).__name__}: {exc}"
    return rec


def _run_trial(identity: Identity, cfg: SampleConfig, index: int) -> TrialRecord:
    env = sample_point(identity, cfg, index)
    return evaluate_trial(identity, env, index, cfg.digits)


def verify(identity: Identity, cfg: SampleConfig, executor=None) -> VerificationReport:
    """Run ``cfg.trials`` sampled trials of one identity.

    Sampling failures propagate as :class:`SamplingExhaustedError`.
    """
    indices = range(cfg.trials)
    if executor is not None:
        futures = [executor.submit(_run_trial, identity, cfg, k) for k in indices]
        records = [f.result() for f in futures]
    elif cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            return verify(identity, cfg, pool)
    else:
        records = [_run_trial(identity, cfg, k) for k in indices]
    return VerificationReport(
        identity.id,
        identity.paper_label,
        cfg.seed,
        cfg.digits,
        records,
        has_negative=identity.negative_variant is not None,
    )


def verify_all(cfg: SampleConfig, catalog: Catalog | None = None, ids=None) -> list:
    """Verify every identity (or those in ``ids``), ordered by catalog order.

    An identity whose sampler gives up yields a report flagged ``exhausted``.
    """
    catalog = catalog if catalog is not None else default_catalog()
    chosen = [catalog.get(k) for k in ids] if ids else list(catalog)
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    reports = []
    try:
        for identity in chosen:
            try:
                reports.append(verify(identity, cfg, pool))
            except SamplingExhaustedError as exc:
                reports.append(
                    VerificationReport(
                        identity.id, identity.paper_label, cfg.seed, cfg.digits, [],
                        has_negative=identity.negative_variant is not None,
                        error=str(exc), exhausted=True,
                    )
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return reports
