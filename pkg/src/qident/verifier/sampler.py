"""Seeded parameter sampling inside an identity's admissible region."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath import mp

from ..catalog import Identity
from ..errors import QIdentError, SamplingExhaustedError
from ..expr import Evaluator, ParamEnv, QPochInf, Theta, expand_idem, walk
from ..qcore import TruncationControl

DEFAULT_MODULUS_RANGE = (0.3, 1.8)
#: prefactors smaller than this in modulus count as a structural zero
PREFACTOR_FLOOR = 1e-8
#: working precision used to screen candidate points
SCREEN_DIGITS = 20


@dataclass(frozen=True)
class SampleConfig:
    """Sampling and verification settings.

    ``ranges`` overrides the modulus range of individual symbols; otherwise
    the range declared in the catalog entry applies.  ``q_range`` likewise
    overrides the entry's own q range when given.
    """

    seed: int = 0
    trials: int = 10
    digits: int = 30
    margin: float = 0.2
    ranges: dict = field(default_factory=dict)
    q_range: tuple | None = None
    complex_q: bool = False
    max_rejections: int = 10_000
    workers: int = 1

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.digits < 15:
            raise ValueError("digits must be at least 15")
        if not 0 < self.margin < 1:
            raise ValueError("margin floor must lie in (0, 1)")
        if self.max_rejections < 1:
            raise ValueError("max_rejections must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")
        for name, (lo, hi) in self.ranges.items():
            if not 0 < lo <= hi:
                raise ValueError(f"empty modulus range for {name!r}")
        if self.q_range is not None:
            lo, hi = self.q_range
            if not 0 < lo <= hi < 1:
                raise ValueError("q range must lie inside (0, 1)")

    def rng(self, trial_index: int) -> np.random.Generator:
        """Independent stream per trial, so trials can run in any order."""
        return np.random.default_rng(np.random.SeedSequence([self.seed, trial_index]))


def _prefactor_nodes(identity: Identity) -> list:
    nodes = []
    exprs = [identity.lhs, *identity.rhs_forms]
    if identity.negative_variant is not None:
        exprs.append(identity.negative_variant)
    for e in exprs:
        nodes.extend(n for n in walk(expand_idem(e)) if isinstance(n, (QPochInf, Theta)))
    return nodes


def _draw(identity: Identity, cfg: SampleConfig, rng: np.random.Generator) -> dict:
    point = {}
    for s in identity.symbols:
        lo, hi = cfg.ranges.get(s.name, (s.lo, s.hi))
        if s.real:
            point[s.name] = mpmath.mpf(float(rng.uniform(lo, hi)))
        else:
            r = math.exp(rng.uniform(math.log(lo), math.log(hi)))
            point[s.name] = mpmath.mpc(mpmath.rect(r, rng.uniform(-math.pi, math.pi)))
    qlo, qhi = cfg.q_range or identity.q_range
    qm = float(rng.uniform(qlo, qhi))
    if cfg.complex_q:
        point["q"] = mpmath.mpc(mpmath.rect(qm, rng.uniform(-math.pi, math.pi)))
    else:
        point["q"] = mpmath.mpf(qm)
    return point


def _admissible(identity: Identity, point: dict, cfg: SampleConfig, prefactors) -> bool:
    ctl = TruncationControl.for_digits(SCREEN_DIGITS)
    try:
        ev = Evaluator(identity.bind(point, ctl), ctl)
        for c in identity.all_constraints:
            if not c.admissible(ev, cfg.margin):
                return False
        for node in prefactors:
            if abs(ev(node)) < PREFACTOR_FLOOR:
                return False
    except (QIdentError, ZeroDivisionError, ValueError, OverflowError):
        return False
    return True


def sample_point(identity: Identity, cfg: SampleConfig, trial_index: int) -> ParamEnv:
    """Admissible parameters for ``trial_index``, reproducible from ``cfg.seed``.

    Raises :class:`SamplingExhaustedError` after ``cfg.max_rejections``
    rejected draws.
    """
    rng = cfg.rng(trial_index)
    prefactors = _prefactor_nodes(identity)
    for _ in range(cfg.max_rejections):
        point = _draw(identity, cfg, rng)
        with mp.workdps(SCREEN_DIGITS):
            ok = _admissible(identity, point, cfg, prefactors)
        if ok:
            q = point.pop("q")
            return ParamEnv(point, q, cfg.digits)
    raise SamplingExhaustedError(
        f"{identity.id}: no admissible point after {cfg.max_rejections} draws (trial {trial_index})"
    )
