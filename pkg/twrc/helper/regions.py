"""
Rate regions of the Gaussian two-way relay channel with private relay messages.

Every region is exposed as a membership predicate returning a RegionReport with
one slack per defining inequality (bound minus load, in bits/symbol). A report is
a member exactly when every slack is >= -tol.

Regions:
    outer      C̄ = C̄_bc ∩ C̄_ma
    conv-mac   R₁ = R(C̄_bc, R₁,ma)     relay decodes every message
    eer-br     R₂ = R(C̄_bc, R₂,ma)     equal-exchange-rate with bit relabeling
    hull       conv{R₂ ∪ R₁}            see twrc.helper.hull
"""

import math
from dataclasses import dataclass, replace, field
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from twrc import LOGGER
from twrc.config import Settings
from twrc.helper.exceptions import DomainError, PreconditionError
from twrc.helper.rate_math import (
    Snr, capacity_c, lattice_rate_d, gamma, scheme2_private_rate, mac_bounds,
)
from twrc.helper.utils import db_to_linear

RATE_NAMES = ("r12", "r21", "r1r", "r2r")
REGIONS = ("outer", "conv-mac", "eer-br", "hull")


@dataclass(frozen=True)
class ChannelConfig:
    """MAC powers p1, p2 and relay-to-source SNRs pr1 (relay→S1), pr2 (relay→S2)."""
    p1: float
    p2: float
    pr1: float
    pr2: float

    def __post_init__(self):
        for name in ("p1", "p2", "pr1", "pr2"):
            object.__setattr__(self, name, Snr(getattr(self, name)).value)

    @classmethod
    def from_db(cls, p1, p2, pr1, pr2):
        return cls(*(db_to_linear(float(v)) for v in (p1, p2, pr1, pr2)))

    def swapped(self) -> "ChannelConfig":
        return ChannelConfig(self.p2, self.p1, self.pr2, self.pr1)

    @property
    def is_canonical(self) -> bool:
        return self.p1 <= self.p2

    def to_dict(self) -> dict:
        return {"p1": self.p1, "p2": self.p2, "pr1": self.pr1, "pr2": self.pr2}


@dataclass(frozen=True)
class RateTuple:
    """(R12, R21, R1r, R2r) in bits/symbol, all components >= 0."""
    r12: float = 0.0
    r21: float = 0.0
    r1r: float = 0.0
    r2r: float = 0.0

    def __post_init__(self):
        for name in RATE_NAMES:
            try:
                value = float(getattr(self, name))
            except (TypeError, ValueError):
                raise DomainError(f"{name} must be a real number")
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def clipped(cls, values: Iterable[float]) -> "RateTuple":
        """Build from possibly slightly negative values (LP round-off), clamping at 0."""
        return cls(*(max(0.0, float(v)) for v in values))

    def __iter__(self):
        return iter((self.r12, self.r21, self.r1r, self.r2r))

    def as_array(self) -> np.ndarray:
        return np.array(tuple(self), dtype=float)

    def swapped(self) -> "RateTuple":
        return RateTuple(self.r21, self.r12, self.r2r, self.r1r)

    def shifted(self, s: float) -> "RateTuple":
        """Componentwise max(0, r - s)."""
        return RateTuple.clipped(v - s for v in self)

    def scaled(self, t: float) -> "RateTuple":
        return RateTuple(*(v * t for v in self))

    def with_rates(self, **rates) -> "RateTuple":
        return replace(self, **rates)

    def to_dict(self) -> dict:
        return dict(zip(RATE_NAMES, self))


class Slack(NamedTuple):
    label: str
    value: float


@dataclass(frozen=True)
class EerWitness:
    """Time-sharing fraction and relabeled bit rate realizing an EER-BR tuple."""
    alpha: float
    delta: float
    longer: Optional[str]       # "r12", "r21" or None when the exchange rates are equal
    underlying_r1r: float
    underlying_r2r: float

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "delta": self.delta, "longer": self.longer,
                "underlying_r1r": self.underlying_r1r, "underlying_r2r": self.underlying_r2r}


@dataclass(frozen=True)
class RegionReport:
    region: str
    member: bool
    slacks: Tuple[Slack, ...]
    witness: Optional[object] = field(default=None, compare=False)

    @classmethod
    def from_slacks(cls, region: str, slacks: Sequence[Slack], tol: float = None, witness=None):
        tol = Settings.TOLERANCE if tol is None else tol
        slacks = tuple(Slack(label, float(value)) for label, value in slacks)
        return cls(region, all(s.value >= -tol for s in slacks), slacks, witness)

    @classmethod
    def combine(cls, region: str, *reports: "RegionReport", tol: float = None, witness=None):
        slacks = tuple(s for report in reports for s in report.slacks)
        return cls.from_slacks(region, slacks, tol, witness)

    @property
    def worst(self) -> Slack:
        return min(self.slacks, key=lambda s: s.value)

    def violated(self, tol: float = None) -> Tuple[Slack, ...]:
        tol = Settings.TOLERANCE if tol is None else tol
        return tuple(s for s in self.slacks if s.value < -tol)

    def to_dict(self) -> dict:
        return {
            "region": self.region,
            "member": self.member,
            "slacks": [{"label": s.label, "value": s.value} for s in self.slacks],
            "witness": self.witness.to_dict() if self.witness is not None else None,
        }


class ChannelBounds(NamedTuple):
    c1: float
    c2: float
    c12: float
    bc12: float     # C(pr2): the relay→S2 link carries W12
    bc21: float     # C(pr1)


class EerConstants(NamedTuple):
    """Canonical (p1 <= p2) constants of the EER-BR region."""
    d: float
    c1: float
    c2: float
    c12: float
    gamma: float
    c2p1: float


class PrivateBounds(NamedTuple):
    b1: float
    b2: float
    b12: float


@lru_cache(maxsize=8192)
def channel_bounds(cfg: ChannelConfig) -> ChannelBounds:
    c1, c2, c12 = mac_bounds(cfg.p1, cfg.p2)
    return ChannelBounds(c1, c2, c12, capacity_c(cfg.pr2), capacity_c(cfg.pr1))


@lru_cache(maxsize=8192)
def eer_constants(cfg: ChannelConfig) -> EerConstants:
    if not cfg.is_canonical:
        raise PreconditionError("EER-BR constants are defined for p1 <= p2")
    c1, c2, c12 = mac_bounds(cfg.p1, cfg.p2)
    return EerConstants(lattice_rate_d(cfg.p1), c1, c2, c12,
                        gamma(cfg.p1, cfg.p2), capacity_c(2.0 * cfg.p1))


def _canonical(cfg: ChannelConfig, r: RateTuple):
    if cfg.is_canonical:
        return cfg, r, False
    return cfg.swapped(), r.swapped(), True


def outer_bc_member(cfg: ChannelConfig, r: RateTuple, tol: float = None) -> RegionReport:
    b = channel_bounds(cfg)
    return RegionReport.from_slacks("outer-bc", (
        Slack("r12<=C(pr2)", b.bc12 - r.r12),
        Slack("r21<=C(pr1)", b.bc21 - r.r21),
    ), tol)


def outer_ma_member(cfg: ChannelConfig, r: RateTuple, tol: float = None) -> RegionReport:
    # symmetric under the canonical swap, so no relabeling is needed
    b = channel_bounds(cfg)
    return RegionReport.from_slacks("outer-ma", (
        Slack("r1r+r12<=C(p1)", b.c1 - r.r1r - r.r12),
        Slack("r2r+r21<=C(p2)", b.c2 - r.r2r - r.r21),
        Slack("r1r+r2r+max(r12,r21)<=C(p1+p2)", b.c12 - r.r1r - r.r2r - max(r.r12, r.r21)),
    ), tol)


def outer_member(cfg: ChannelConfig, r: RateTuple, tol: float = None) -> RegionReport:
    return RegionReport.combine("outer", outer_bc_member(cfg, r, tol), outer_ma_member(cfg, r, tol), tol=tol)


def classical_mac_member(cfg: ChannelConfig, r1r: float, r2r: float, tol: float = None) -> RegionReport:
    b = channel_bounds(cfg)
    return RegionReport.from_slacks("mac", (
        Slack("r1<=C(p1)", b.c1 - r1r),
        Slack("r2<=C(p2)", b.c2 - r2r),
        Slack("r1+r2<=C(p1+p2)", b.c12 - r1r - r2r),
    ), tol)


def conv_mac_ma_member(cfg: ChannelConfig, r: RateTuple, tol: float = None) -> RegionReport:
    b = channel_bounds(cfg)
    return RegionReport.from_slacks("conv-mac-ma", (
        Slack("r1r+r12<=C(p1)", b.c1 - r.r1r - r.r12),
        Slack("r2r+r21<=C(p2)", b.c2 - r.r2r - r.r21),
        Slack("r1r+r2r+r12+r21<=C(p1+p2)", b.c12 - r.r1r - r.r2r - r.r12 - r.r21),
    ), tol)


def conv_mac_member(cfg: ChannelConfig, r: RateTuple, tol: float = None) -> RegionReport:
    return RegionReport.combine("conv-mac", outer_bc_member(cfg, r, tol), conv_mac_ma_member(cfg, r, tol), tol=tol)


def _private_bounds(k: EerConstants, alpha: float) -> PrivateBounds:
    return PrivateBounds(
        max(0.0, (1.0 - alpha) * k.c1),
        max(0.0, k.c2 - alpha * k.gamma),
        max(0.0, k.c12 - alpha * k.c2p1),
    )


def eer_private_region(cfg: ChannelConfig, alpha: float) -> PrivateBounds:
    """
    Private-rate bounds of the EER scheme at time-sharing fraction alpha.

    Returned in canonical orientation: b1 bounds the weaker source (smaller MAC
    power), b2 the stronger one, b12 their sum. Bounds are clamped at 0.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    canonical = cfg if cfg.is_canonical else cfg.swapped()
    return _private_bounds(eer_constants(canonical), alpha)


def _eer_ma_report(cfg: ChannelConfig, r: RateTuple, tol: float = None) -> RegionReport:
    c, x, swapped = _canonical(cfg, r)
    k = eer_constants(c)
    short, delta = min(x.r12, x.r21), abs(x.r12 - x.r21)
    if k.d > 0:
        alpha = short / k.d
        lattice_slack = k.d - short
    else:
        # no lattice rate below p1 = 1/2: exchange only through relabeled bits
        alpha = 0.0
        lattice_slack = -short
    if x.r12 <= x.r21:
        u1, u2, longer = x.r1r, x.r2r + delta, "r21"
    else:
        u1, u2, longer = x.r1r + delta, x.r2r, "r12"
    b = _private_bounds(k, min(alpha, 1.0))
    slacks = (
        Slack("min(r12,r21)<=D(p_weak)", lattice_slack),
        Slack("weak-private<=(1-a)C(p_weak)", b.b1 - u1),
        Slack("strong-private<=C(p_strong)-a*Gamma", b.b2 - u2),
        Slack("private-sum<=C(p1+p2)-a*C(2p_weak)", b.b12 - u1 - u2),
    )
    if delta == 0:
        longer = None
    elif swapped:
        longer = "r12" if longer == "r21" else "r21"
    if swapped:
        u1, u2 = u2, u1
    witness = EerWitness(alpha, delta, longer, u1, u2)
    return RegionReport.from_slacks("eer-br-ma", slacks, tol, witness)


def eer_br_ma_member(cfg: ChannelConfig, r: RateTuple, tol: float = None) -> RegionReport:
    """
    MAC-phase membership in R₂,ma, decided in closed form.

    The private bounds shrink with alpha, so the smallest alpha covering the
    shorter exchange rate, alpha = min(r12, r21) / D(p1), decides membership.
    The surplus delta = |r12 - r21| of the longer exchange message rides on
    that source's private rate.
    """
    report = _eer_ma_report(cfg, r, tol)
    if not report.member:
        return replace(report, witness=None)
    return report


def eer_br_member(cfg: ChannelConfig, r: RateTuple, tol: float = None) -> RegionReport:
    ma = eer_br_ma_member(cfg, r, tol)
    return RegionReport.combine("eer-br", outer_bc_member(cfg, r, tol), ma, tol=tol, witness=ma.witness)


def eer_witness_member(cfg: ChannelConfig, r: RateTuple, alpha: float, delta: float,
                       longer: str = None, tol: float = None) -> RegionReport:
    """
    Check r against the parametric EER-BR form at a fixed (alpha, delta).

    r must be dominated by (aD, aD + delta, y1, y2 - delta) with (y1, y2) in
    R'_ts(alpha), or by the mirrored form when r12 is the longer exchange rate.
    `longer` pins the orientation ("r12" or "r21"); by default it follows r.
    """
    delta = float(delta)
    if delta < 0 or not math.isfinite(delta):
        raise DomainError(f"delta must be finite and >= 0, got {delta!r}")
    if longer is None:
        longer = "r21" if r.r12 <= r.r21 else "r12"
    elif longer not in ("r12", "r21"):
        raise DomainError(f"longer must be 'r12' or 'r21', got {longer!r}")
    c, x, swapped = _canonical(cfg, r)
    if swapped:
        longer = "r12" if longer == "r21" else "r21"
    k = eer_constants(c)
    b = eer_private_region(c, alpha)
    lattice = alpha * k.d
    if longer == "r21":
        short, long_, u1, u2 = x.r12, x.r21, x.r1r, x.r2r + delta
    else:
        short, long_, u1, u2 = x.r21, x.r12, x.r1r + delta, x.r2r
    return RegionReport.from_slacks("eer-br-witness", (
        Slack("short<=a*D", lattice - short),
        Slack("long<=a*D+delta", lattice + delta - long_),
        Slack("weak-private<=b1", b.b1 - u1),
        Slack("strong-private<=b2", b.b2 - u2),
        Slack("private-sum<=b12", b.b12 - u1 - u2),
    ), tol)


def scheme1_point(cfg: ChannelConfig, r1r: float, r2r: float, tol: float = None) -> RateTuple:
    """Scheme 1: private messages only, any pair in the classical MAC region."""
    if not classical_mac_member(cfg, r1r, r2r, tol).member:
        raise DomainError(f"({r1r}, {r2r}) is outside the MAC capacity region")
    return RateTuple(0.0, 0.0, r1r, r2r)


def scheme2_point(cfg: ChannelConfig) -> RateTuple:
    """Scheme 2 corner: (D(p_weak), D(p_weak), 0, C((p_strong - p_weak) / (1 + 2 p_weak)))."""
    c = cfg if cfg.is_canonical else cfg.swapped()
    d = lattice_rate_d(c.p1)
    point = RateTuple(d, d, 0.0, scheme2_private_rate(c.p1, c.p2))
    return point if cfg.is_canonical else point.swapped()


def region_member(region: str, cfg: ChannelConfig, r: RateTuple, tol: float = None,
                  grid_k: int = None) -> RegionReport:
    if region == "outer":
        return outer_member(cfg, r, tol)
    if region == "conv-mac":
        return conv_mac_member(cfg, r, tol)
    if region == "eer-br":
        return eer_br_member(cfg, r, tol)
    if region == "hull":
        from twrc.helper.hull import hull_member
        return hull_member(cfg, r, Settings.HULL_GRID_K if grid_k is None else grid_k, tol)
    raise DomainError(f"unknown region {region!r}; expected one of {', '.join(REGIONS)}")


@dataclass(frozen=True)
class SliceRow:
    region: str
    ray: int
    angle: float
    axis1: float
    axis2: float
    extent: float
    on_boundary: bool


@dataclass(frozen=True)
class SliceResult:
    axes: Tuple[str, str]
    fixed: Tuple[Tuple[str, float], ...]
    rows: Tuple[SliceRow, ...]
    diagnostic: Optional[str] = None


def bisect_extent(member, hi: float, iters: int) -> Tuple[float, bool]:
    """Furthest t in [0, hi] with member(t), for a downward-closed predicate."""
    if not member(0.0):
        return 0.0, False
    while member(hi):
        hi *= 2.0
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    return lo, True


def boundary_slice(cfg: ChannelConfig, fixed: Mapping[str, float], axes: Tuple[str, str],
                   resolution: int, regions: Sequence[str] = REGIONS, tol: float = None,
                   iters: int = None, grid_k: int = None) -> SliceResult:
    """
    Boundary of each region in a 2-D slice, sampled along rays in the positive quadrant.

    Two rate components are pinned by `fixed`, the other two span the slice plane.
    Ray j points at angle j/(resolution-1) * pi/2 from the axes[0] axis. Rows come
    ordered by (region, ray).
    """
    iters = Settings.BISECTION_ITERS if iters is None else iters
    if resolution < 2:
        raise PreconditionError(f"resolution must be >= 2, got {resolution}")
    axes = tuple(axes)
    if len(axes) != 2 or len(set(axes)) != 2 or len(fixed) != 2 or set(axes) | set(fixed) != set(RATE_NAMES):
        raise PreconditionError("slice needs two fixed components and the two remaining axes")
    for region in regions:
        if region not in REGIONS:
            raise DomainError(f"unknown region {region!r}")

    base = RateTuple(**{name: float(value) for name, value in fixed.items()})
    fixed_items = tuple((name, getattr(base, name)) for name in RATE_NAMES if name in fixed)
    origin = outer_member(cfg, base, tol)
    if not origin.member:
        diagnostic = "fixed components outside the outer bound: " + ", ".join(
            s.label for s in origin.violated(tol))
        LOGGER.warning(diagnostic)
        return SliceResult(axes, fixed_items, (), diagnostic)

    hi = 2.0 * (channel_bounds(cfg).c12 + 1.0)
    rows = []
    for region in regions:
        for ray in range(resolution):
            angle = 0.5 * math.pi * ray / (resolution - 1)
            u = (math.cos(angle), math.sin(angle))
            # exact zeros on the axes keep the endpoint rays on the axes
            if ray == 0:
                u = (1.0, 0.0)
            elif ray == resolution - 1:
                u = (0.0, 1.0)

            def member(t, u=u, region=region):
                point = base.with_rates(**{axes[0]: t * u[0], axes[1]: t * u[1]})
                return region_member(region, cfg, point, tol, grid_k).member

            extent, on_boundary = bisect_extent(member, hi, iters)
            rows.append(SliceRow(region, ray, angle, extent * u[0], extent * u[1], extent, on_boundary))
    return SliceResult(axes, fixed_items, tuple(rows))
