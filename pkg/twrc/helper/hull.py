"""
Membership in conv{R₂ ∪ R₁} by time sharing one EER-BR tuple with one conv-MAC tuple.

Each orientation piece of R₂ (r12 <= r21 or r21 <= r12) and R₁ are bounded
polytopes {x >= 0 : Gx <= h}. Mixing a ∈ piece and b ∈ R₁ with weight lam and
scaling r by theta gives the linear program

    maximize theta  s.t.  G a' <= lam h,  H b' <= (1 - lam) k,  a' + b' >= theta r

in (a', b', lam, theta). Solving with free lam rejects quickly; a member is only
reported once a grid lam yields a decomposition that the closed-form predicates
accept on their own.
"""

from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import linprog

from twrc.config import Settings
from twrc.helper.exceptions import PreconditionError
from twrc.helper.regions import (
    ChannelConfig, RateTuple, RegionReport, Slack, channel_bounds, eer_constants,
    conv_mac_member, eer_br_member,
)

THETA_MAX = 2.0
# decompositions are re-verified after pulling each component down by this much
LP_MARGIN = 1e-8
LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


@dataclass(frozen=True)
class HullWitness:
    lam: float
    eer_point: RateTuple
    mac_point: RateTuple
    theta: float

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "eer_point": self.eer_point.to_dict(),
                "mac_point": self.mac_point.to_dict(), "theta": self.theta}


class _Scale(NamedTuple):
    theta: float
    lam: float
    a: np.ndarray
    b: np.ndarray


def _bc_rows(cfg: ChannelConfig):
    b = channel_bounds(cfg)
    return [[1, 0, 0, 0], [0, 1, 0, 0]], [b.bc12, b.bc21]


def eer_piece(cfg: ChannelConfig, longer: str) -> Tuple[np.ndarray, np.ndarray]:
    """Rows (G, h) of one orientation piece of R₂ in canonical coordinates (p1 <= p2)."""
    k = eer_constants(cfg)
    # with D = 0 the lattice row pins the shorter exchange rate to 0, so its other coefficients are moot
    inv_d = 1.0 / k.d if k.d > 0 else 0.0
    if longer == "r21":
        rows = [
            [1, -1, 0, 0],
            [1, 0, 0, 0],
            [k.c1 * inv_d, 0, 1, 0],
            [k.gamma * inv_d - 1, 1, 0, 1],
            [k.c2p1 * inv_d - 1, 1, 1, 1],
        ]
    else:
        rows = [
            [-1, 1, 0, 0],
            [0, 1, 0, 0],
            [1, k.c1 * inv_d - 1, 1, 0],
            [0, k.gamma * inv_d, 0, 1],
            [1, k.c2p1 * inv_d - 1, 1, 1],
        ]
    rhs = [0.0, k.d, k.c1, k.c2, k.c12]
    bc, bc_rhs = _bc_rows(cfg)
    return np.array(rows + bc, dtype=float), np.array(rhs + bc_rhs, dtype=float)


def conv_mac_polytope(cfg: ChannelConfig) -> Tuple[np.ndarray, np.ndarray]:
    b = channel_bounds(cfg)
    bc, bc_rhs = _bc_rows(cfg)
    rows = [[1, 0, 1, 0], [0, 1, 0, 1], [1, 1, 1, 1]] + bc
    return np.array(rows, dtype=float), np.array([b.c1, b.c2, b.c12] + bc_rhs, dtype=float)


def _max_scale(G, h, H, k, r: np.ndarray, lam: Optional[float] = None) -> Optional[_Scale]:
    """Largest theta with theta*r below a lam-mixture of the two polytopes; lam free when None."""
    ng, nh = len(h), len(k)
    free = lam is None
    nvar = 8 + (1 if free else 0) + 1
    theta_col = nvar - 1
    a_ub, b_ub = [], []
    for i in range(ng):
        row = np.zeros(nvar)
        row[0:4] = G[i]
        if free:
            row[8] = -h[i]
            b_ub.append(0.0)
        else:
            b_ub.append(lam * h[i])
        a_ub.append(row)
    for i in range(nh):
        row = np.zeros(nvar)
        row[4:8] = H[i]
        if free:
            row[8] = k[i]
            b_ub.append(k[i])
        else:
            b_ub.append((1.0 - lam) * k[i])
        a_ub.append(row)
    for j in range(4):
        row = np.zeros(nvar)
        row[j] = row[4 + j] = -1.0
        row[theta_col] = r[j]
        a_ub.append(row)
        b_ub.append(0.0)
    cost = np.zeros(nvar)
    cost[theta_col] = -1.0
    bounds = [(0, None)] * 8 + ([(0, 1)] if free else []) + [(0, THETA_MAX)]
    res = linprog(cost, A_ub=np.array(a_ub), b_ub=np.array(b_ub), bounds=bounds,
                  method="highs", options=LP_OPTIONS)
    if res.status != 0:
        return None
    x = res.x
    return _Scale(float(x[theta_col]), float(x[8]) if free else float(lam), x[0:4], x[4:8])


def _decompose(s: _Scale, margin: float) -> Tuple[RateTuple, RateTuple]:
    lam, theta = s.lam, max(s.theta, 1e-300)
    a = RateTuple.clipped(s.a / (lam * theta) - margin) if lam > 0 else RateTuple()
    b = RateTuple.clipped(s.b / ((1.0 - lam) * theta) - margin) if lam < 1 else RateTuple()
    return a, b


def _certify(cfg, canonical_swap: bool, r: RateTuple, s: _Scale, tol: float) -> Optional[HullWitness]:
    for margin in (0.0, LP_MARGIN):
        a, b = _decompose(s, margin)
        if canonical_swap:
            a, b = a.swapped(), b.swapped()
        if not (eer_br_member(cfg, a, tol).member and conv_mac_member(cfg, b, tol).member):
            continue
        mix = s.lam * a.as_array() + (1.0 - s.lam) * b.as_array()
        if np.all(mix >= r.as_array() - tol):
            return HullWitness(s.lam, a, b, s.theta)
    return None


def _grid_order(grid_k: int, center: float) -> List[float]:
    grid = [i / grid_k for i in range(grid_k + 1)]
    return sorted(grid, key=lambda lam: (abs(lam - center), lam))


def hull_member(cfg: ChannelConfig, r: RateTuple, grid_k: int = None, tol: float = None) -> RegionReport:
    """
    One-sided membership test for conv{R₂ ∪ R₁}.

    Slacks: "hull-scale" is (theta - 1) * max(r) for the best lam in [0, 1];
    "grid-scale" the same for the certified grid lam.
    """
    grid_k = Settings.HULL_GRID_K if grid_k is None else int(grid_k)
    tol = Settings.TOLERANCE if tol is None else tol
    if grid_k < 1:
        raise PreconditionError(f"grid_k must be >= 1, got {grid_k}")

    eer = eer_br_member(cfg, r, tol)
    if eer.member:
        return RegionReport.from_slacks(
            "hull", [Slack("eer-br:" + s.label, s.value) for s in eer.slacks], tol,
            HullWitness(1.0, r, RateTuple(), 1.0))
    mac = conv_mac_member(cfg, r, tol)
    if mac.member:
        return RegionReport.from_slacks(
            "hull", [Slack("conv-mac:" + s.label, s.value) for s in mac.slacks], tol,
            HullWitness(0.0, RateTuple(), r, 1.0))

    swap = not cfg.is_canonical
    c = cfg.swapped() if swap else cfg
    x = r.swapped() if swap else r
    target = x.as_array()
    scale = float(np.max(target)) or 1.0
    H, k = conv_mac_polytope(c)

    pieces = []
    for longer in ("r21", "r12"):
        G, h = eer_piece(c, longer)
        free = _max_scale(G, h, H, k, target)
        if free is not None:
            pieces.append((free.theta, free.lam, G, h))
    best_free = max((p[0] for p in pieces), default=0.0)
    hull_slack = Slack("hull-scale", (best_free - 1.0) * scale)
    if hull_slack.value < -tol:
        return RegionReport.from_slacks("hull", [hull_slack], tol)

    best_grid = 0.0
    for theta_free, center, G, h in sorted(pieces, key=lambda p: -p[0]):
        if (theta_free - 1.0) * scale < -tol:
            continue
        # theta is concave in lam: once one grid point falls short, so does everything beyond it
        blocked = set()
        for lam in _grid_order(grid_k, center):
            side = lam > center
            if side in blocked:
                continue
            fixed = _max_scale(G, h, H, k, target, lam)
            if fixed is None or (fixed.theta - 1.0) * scale < -tol:
                blocked.add(side)
                if fixed is not None:
                    best_grid = max(best_grid, fixed.theta)
                continue
            best_grid = max(best_grid, fixed.theta)
            witness = _certify(cfg, swap, r, fixed, tol)
            if witness is not None:
                grid_slack = Slack("grid-scale", max(fixed.theta - 1.0, 0.0) * scale)
                return RegionReport.from_slacks("hull", [hull_slack, grid_slack], tol, witness)

    # no certified grid decomposition: report a strictly failing grid slack
    uncertified = min((best_grid - 1.0) * scale, 0.0) - max(LP_MARGIN, 2.0 * tol)
    return RegionReport.from_slacks("hull", [hull_slack, Slack("grid-scale", uncertified)], tol)
