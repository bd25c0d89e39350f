"""
Constructive half-bit certificates.

Any tuple inside the MAC-phase outer bound, pulled down by half a bit per
component, lands in the EER-BR MAC-phase region. certify_tuple builds the
(alpha, delta) witness explicitly and checks it along two independent paths:
the parametric form at the witness, and the closed-form predicate.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from twrc import LOGGER
from twrc.config import Settings
from twrc.helper.exceptions import CertificationError, DomainError, OutsideOuterBoundError, PreconditionError
from twrc.helper.rate_math import HALF_BIT, Snr, capacity_c, lattice_rate_d
from twrc.helper.regions import (
    ChannelConfig, RateTuple, Slack, bisect_extent, channel_bounds, eer_br_ma_member,
    eer_constants, eer_witness_member, outer_ma_member,
)
from twrc.helper.sweep import chunk_ranges, run_chunks
from twrc.helper.utils import parse_power_range


@dataclass(frozen=True)
class GapWitness:
    alpha: float                # EER-BR fraction realized by the shifted tuple
    outer_alpha: float          # min(r12, r21) / C(p_weak) of the unshifted tuple
    delta: float
    oriented: bool              # True when r12 <= r21
    shifted: RateTuple
    slacks: Tuple[Slack, ...]
    shift: float = HALF_BIT

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "outer_alpha": self.outer_alpha,
            "delta": self.delta,
            "oriented": "r12<=r21" if self.oriented else "r21<r12",
            "shifted": self.shifted.to_dict(),
            "slacks": [{"label": s.label, "value": s.value} for s in self.slacks],
            "shift": self.shift,
        }


def _repro(cfg: ChannelConfig, r: RateTuple, shift: float, **extra) -> dict:
    return {"cfg": cfg.to_dict(), "r": r.to_dict(), "shift": shift, **extra}


def certify_tuple(cfg: ChannelConfig, r: RateTuple, shift: float = HALF_BIT, tol: float = None) -> GapWitness:
    tol = Settings.TOLERANCE if tol is None else tol
    shift = float(shift)
    if not 0.0 <= shift <= HALF_BIT:
        raise DomainError(f"shift must lie in [0, 1/2], got {shift!r}")
    outer = outer_ma_member(cfg, r, tol)
    if not outer.member:
        raise OutsideOuterBoundError(outer.violated(tol))

    canonical = cfg if cfg.is_canonical else cfg.swapped()
    x = r if cfg.is_canonical else r.swapped()
    k = eer_constants(canonical)
    c_weak = capacity_c(canonical.p1)
    oriented = r.r12 <= r.r21
    longer = "r21" if oriented else "r12"

    short = min(x.r12, x.r21)
    outer_alpha = min(short / c_weak, 1.0) if c_weak > 0 else 0.0
    # the exchange surplus does not move under a common shift
    delta = abs(x.r12 - x.r21)
    shifted = r.shifted(shift)
    shifted_short = min(shifted.r12, shifted.r21)
    alpha = shifted_short / k.d if k.d > 0 and shifted_short > 0 else 0.0
    alpha = min(alpha, 1.0)

    witness = eer_witness_member(cfg, shifted, alpha, delta, longer, tol)
    closed = eer_br_ma_member(cfg, shifted, tol)
    if not (witness.member and closed.member):
        failed = witness if not witness.member else closed
        worst = failed.worst
        LOGGER.error(f"Certificate rejected for cfg={cfg} r={r}: {worst.label} = {worst.value:.6g}")
        raise CertificationError(
            f"shifted tuple rejected by {failed.region}: {worst.label} = {worst.value:.6g}",
            _repro(cfg, r, shift, alpha=alpha, delta=delta))
    return GapWitness(alpha, outer_alpha, delta, oriented, shifted, witness.slacks, shift)


def needed_shift(cfg: ChannelConfig, r: RateTuple, exchange_only: bool = False,
                 tol: float = None) -> Optional[float]:
    """
    Smallest s in [0, 1/2] with the s-shifted tuple in R₂,ma.

    Every slack of the closed-form predicate is affine in s between the
    points where a shifted rate clips at zero or alpha reaches 1, so the
    answer is bracketed at those points and solved linearly inside the
    bracket. With exchange_only only r12 and r21 move. Returns None when
    even s = 1/2 does not certify, which for a full shift means the
    half-bit guarantee broke.
    """
    tol = Settings.TOLERANCE if tol is None else tol

    def pulled(s):
        if exchange_only:
            return r.with_rates(r12=max(0.0, r.r12 - s), r21=max(0.0, r.r21 - s))
        return r.shifted(s)

    kinks = [r.r12, r.r21] if exchange_only else list(r)
    d = lattice_rate_d(min(cfg.p1, cfg.p2))
    if d > 0:
        kinks.append(min(r.r12, r.r21) - d)
    points = sorted({0.0, HALF_BIT, *(k for k in kinks if 0.0 < k < HALF_BIT)})

    previous = None
    for s in points:
        report = eer_br_ma_member(cfg, pulled(s), tol)
        if report.member:
            break
        previous = (s, report)
    else:
        return None
    if previous is None:
        return 0.0
    a, low = previous
    # aim at half the tolerance so the returned shift certifies despite rounding
    t = 0.0
    for g0, g1 in zip((x.value for x in low.slacks), (x.value for x in report.slacks)):
        if g0 < -0.5 * tol:
            t = max(t, (-0.5 * tol - g0) / (g1 - g0) if g1 > g0 else 1.0)
    return a + min(t, 1.0) * (s - a)


def conv_mac_suboptimality(symmetric_power) -> float:
    """Symmetric exchange-rate loss of decoding everything at the relay: min(C(P), C(2P)) - min(C(P), C(2P)/2)."""
    p = Snr(symmetric_power).value
    cp, c2p = capacity_c(p), capacity_c(2.0 * p)
    return min(cp, c2p) - min(cp, 0.5 * c2p)


@dataclass(frozen=True)
class PowerSampler:
    """Trial configurations: powers log-uniform in [low, high] unless a fixed channel/ray is pinned."""
    low: float = 1e-2
    high: float = 1e2
    fixed_cfg: Optional[ChannelConfig] = None
    fixed_ray: Optional[Tuple[float, float, float, float]] = None

    def __post_init__(self):
        if not (0 < self.low <= self.high and math.isfinite(self.high)):
            raise DomainError(f"power range must satisfy 0 < low <= high, got [{self.low}, {self.high}]")
        if self.fixed_ray is not None:
            ray = tuple(float(v) for v in self.fixed_ray)
            if len(ray) != 4 or min(ray) < 0 or max(ray) <= 0:
                raise DomainError("ray must have four non-negative components, not all zero")
            object.__setattr__(self, "fixed_ray", ray)

    @classmethod
    def from_settings(cls) -> "PowerSampler":
        low, high = parse_power_range(Settings.POWER_RANGE, "TWRC_POWER_RANGE")
        return cls(low, high)

    def draw(self, rng: np.random.Generator) -> Tuple[ChannelConfig, np.ndarray]:
        if self.fixed_cfg is not None:
            cfg = self.fixed_cfg
        else:
            p1, p2 = np.exp(rng.uniform(math.log(self.low), math.log(self.high), size=2))
            # the BC phase is not part of the half-bit argument
            cfg = ChannelConfig(float(p1), float(p2), 0.0, 0.0)
        if self.fixed_ray is not None:
            ray = np.array(self.fixed_ray)
        else:
            ray = np.abs(rng.normal(size=4))
        return cfg, ray / np.linalg.norm(ray)


def outer_ma_boundary(cfg: ChannelConfig, ray: np.ndarray, tol: float = None, iters: int = None) -> RateTuple:
    """Furthest point of C̄_ma along a non-negative direction, by bisection."""
    iters = Settings.BISECTION_ITERS if iters is None else iters
    hi = 2.0 * (channel_bounds(cfg).c12 + 1.0) / max(float(np.max(ray)), 1e-12)
    extent, _ = bisect_extent(
        lambda t: outer_ma_member(cfg, RateTuple.clipped(ray * t), tol).member, hi, iters)
    return RateTuple.clipped(ray * extent)


@dataclass
class ChunkResult:
    trials: int = 0
    max_needed_shift: float = 0.0
    max_exchange_shift: Optional[float] = None
    worst_trial: Optional[dict] = None
    failures: List[dict] = field(default_factory=list)


def sweep_chunk(sampler: PowerSampler, seed: int, start: int, stop: int,
                shift: float = HALF_BIT, tol: float = None) -> ChunkResult:
    result = ChunkResult()
    for index in range(start, stop):
        rng = np.random.default_rng([seed, index])
        cfg, ray = sampler.draw(rng)
        r = outer_ma_boundary(cfg, ray, tol)
        result.trials += 1
        try:
            certify_tuple(cfg, r, shift, tol)
        except CertificationError as e:
            result.failures.append({"trial": index, "seed": seed, "detail": e.detail, **_repro(cfg, r, shift)})
            continue
        need = needed_shift(cfg, r, tol=tol)
        if need is not None and need > result.max_needed_shift:
            result.max_needed_shift = need
            result.worst_trial = {"trial": index, "needed_shift": need, **_repro(cfg, r, shift)}
        exchange = needed_shift(cfg, r, exchange_only=True, tol=tol)
        if exchange is not None:
            result.max_exchange_shift = max(result.max_exchange_shift or 0.0, exchange)
    return result


@dataclass(frozen=True)
class GapSummary:
    trials: int
    failures: int
    max_needed_shift: float
    max_exchange_shift: Optional[float]
    seed: int
    power_range: Tuple[float, float]
    shift: float
    worst_trial: Optional[dict]
    failure_reports: Tuple[dict, ...]

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "max_needed_shift": self.max_needed_shift,
            "max_exchange_shift": self.max_exchange_shift,
            "seed": self.seed,
            "power_range": list(self.power_range),
            "shift": self.shift,
            "worst_trial": self.worst_trial,
            "failure_reports": list(self.failure_reports),
        }


def sweep_gap(sampler: PowerSampler, trials: int, seed: int, shift: float = HALF_BIT,
              tol: float = None, workers: int = None, chunk_size: int = None) -> GapSummary:
    """
    Certify `trials` random boundary tuples of C̄_ma.

    Trial i draws from np.random.default_rng([seed, i]), so the summary does not
    depend on the worker count or chunking.
    """
    if int(trials) != trials or trials < 1:
        raise PreconditionError(f"trials must be a positive integer, got {trials!r}")
    if int(seed) != seed or seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    trials = int(trials)
    LOGGER.info(f"Gap sweep started: {trials} trials, seed {seed}")
    jobs = [(sampler, seed, start, stop, shift, tol) for start, stop in chunk_ranges(trials, chunk_size)]
    chunks = run_chunks(sweep_chunk, jobs, workers)

    failures, worst, max_need, max_exchange = [], None, 0.0, None
    for chunk in chunks:
        failures.extend(chunk.failures)
        if chunk.worst_trial is not None and chunk.max_needed_shift > max_need:
            max_need, worst = chunk.max_needed_shift, chunk.worst_trial
        if chunk.max_exchange_shift is not None:
            max_exchange = max(max_exchange or 0.0, chunk.max_exchange_shift)
    for report in failures:
        LOGGER.error(f"Certification failure: {report}")
    LOGGER.info(f"Gap sweep finished: {len(failures)} failures, max needed shift {max_need:.6g}")
    return GapSummary(trials, len(failures), max_need, max_exchange, seed,
                      (sampler.low, sampler.high), shift, worst, tuple(failures))
