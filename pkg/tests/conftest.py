import math

import numpy as np
import pytest

from twrc.helper.gap_certifier import outer_ma_boundary
from twrc.helper.regions import ChannelConfig, RateTuple, channel_bounds, eer_constants, eer_private_region


class RegionSampler:
    """Members of each region, built from their witnesses rather than filtered from uniform draws."""

    def __init__(self, seed: int):
        self.rng = np.random.default_rng(seed)

    def config(self, low: float = 0.01, high: float = 100.0) -> ChannelConfig:
        p = np.exp(self.rng.uniform(math.log(low), math.log(high), size=4))
        return ChannelConfig(*(float(v) for v in p))

    def _bc_clip(self, cfg: ChannelConfig, r: RateTuple) -> RateTuple:
        b = channel_bounds(cfg)
        return r.with_rates(r12=min(r.r12, b.bc12), r21=min(r.r21, b.bc21))

    def conv_mac(self, cfg: ChannelConfig) -> RateTuple:
        # a point of the MAC pentagon, each source's share split into exchange and private parts
        b = channel_bounds(cfg)
        theta, u, f1, f2 = self.rng.random(4)
        x1 = u * (theta * b.c1 + (1 - theta) * (b.c12 - b.c2))
        x2 = u * (theta * (b.c12 - b.c1) + (1 - theta) * b.c2)
        r = RateTuple.clipped((f1 * x1, f2 * x2, (1 - f1) * x1, (1 - f2) * x2))
        return self._bc_clip(cfg, r)

    def eer_br(self, cfg: ChannelConfig) -> RateTuple:
        # (alpha, delta, y1, y2) witness in canonical order, swapped back at the end
        canonical = cfg if cfg.is_canonical else cfg.swapped()
        d = eer_constants(canonical).d
        alpha, u1, u2, v = self.rng.random(4)
        if d == 0:
            alpha = 0.0
        b = eer_private_region(canonical, alpha)
        y1 = u1 * min(b.b1, b.b12)
        y2 = u2 * min(b.b2, b.b12 - y1)
        lattice = alpha * d
        if self.rng.random() < 0.5:
            delta = v * y2
            r = RateTuple.clipped((lattice, lattice + delta, y1, y2 - delta))
        else:
            delta = v * y1
            r = RateTuple.clipped((lattice + delta, lattice, y1 - delta, y2))
        r = self._bc_clip(canonical, r)
        return r if cfg.is_canonical else r.swapped()

    def outer(self, cfg: ChannelConfig) -> RateTuple:
        boundary = outer_ma_boundary(cfg, self.rng.random(4) + 1e-3)
        return self._bc_clip(cfg, boundary.scaled(self.rng.random()))

    def below(self, r: RateTuple) -> RateTuple:
        return RateTuple.clipped(r.as_array() * self.rng.random(4))


@pytest.fixture
def sampler():
    return RegionSampler(seed=20)
