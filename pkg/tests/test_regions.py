import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from twrc.helper.exceptions import DomainError, PreconditionError
from twrc.helper.rate_math import capacity_c, lattice_rate_d
from twrc.helper.regions import (
    REGIONS, ChannelConfig, RateTuple, boundary_slice, classical_mac_member, conv_mac_member,
    eer_br_ma_member, eer_br_member, eer_private_region, eer_witness_member, outer_bc_member,
    outer_ma_member, outer_member, region_member, scheme1_point, scheme2_point,
)

D1 = lattice_rate_d(1.0)
SYM = ChannelConfig(1, 1, 3, 3)

powers = st.floats(min_value=0.01, max_value=100.0)
rates = st.floats(min_value=0.0, max_value=4.0)
configs = st.builds(ChannelConfig, powers, powers, powers, powers)
tuples = st.builds(RateTuple, rates, rates, rates, rates)


class TestTypes:
    def test_rate_tuple_rejects_negative(self):
        with pytest.raises(DomainError):
            RateTuple(-1, 0, 0, 0)

    def test_rate_tuple_rejects_nan(self):
        with pytest.raises(DomainError):
            RateTuple(0, math.nan, 0, 0)

    def test_config_rejects_negative_power(self):
        with pytest.raises(DomainError):
            ChannelConfig(1, -1, 0, 0)

    def test_config_from_db(self):
        cfg = ChannelConfig.from_db(0, 10, 20, 0)
        assert (cfg.p1, cfg.p2, cfg.pr1, cfg.pr2) == pytest.approx((1, 10, 100, 1))

    def test_shifted_clamps(self):
        assert tuple(RateTuple(1, 0.2, 0.5, 0).shifted(0.5)) == (0.5, 0.0, 0.0, 0.0)

    def test_swapped(self):
        assert RateTuple(1, 2, 3, 4).swapped() == RateTuple(2, 1, 4, 3)
        assert ChannelConfig(1, 2, 3, 4).swapped() == ChannelConfig(2, 1, 4, 3)


class TestOuterBound:
    def test_bc_examples(self):
        assert outer_bc_member(ChannelConfig(1, 1, 3, 3), RateTuple(1, 1, 0, 0)).member
        assert outer_bc_member(ChannelConfig(1, 1, 0, 0), RateTuple(0, 0, 5, 7)).member
        report = outer_bc_member(ChannelConfig(1, 1, 1, 1), RateTuple(0.6, 0, 0, 0))
        assert not report.member
        assert report.worst.value == pytest.approx(-0.1)

    def test_ma_examples(self):
        cfg = ChannelConfig(1, 1, 0, 0)
        assert outer_ma_member(cfg, RateTuple(0.5, 0.5, 0, 0)).member
        report = outer_ma_member(cfg, RateTuple(0.5, 0.5, 0.1, 0))
        assert not report.member
        assert report.violated()[0].label == "r1r+r12<=C(p1)"
        assert outer_ma_member(cfg, RateTuple()).member

    def test_combined(self):
        assert outer_member(SYM, RateTuple()).member
        assert outer_member(SYM, RateTuple(0.5, 0.5, 0, 0)).member
        assert not outer_member(ChannelConfig(1, 1, 0.5, 3), RateTuple(0, 0.5, 0, 0)).member

    def test_private_only_is_classical_mac(self):
        cfg = ChannelConfig(1, 3, 2, 0.5)
        grid = np.linspace(0, 2.5, 100)
        for a in grid:
            for b in grid:
                r = RateTuple(0, 0, a, b)
                assert outer_member(cfg, r).member == classical_mac_member(cfg, a, b).member

    def test_exchange_only_is_min_of_links(self):
        cfg = ChannelConfig(1, 3, 2, 0.5)
        tol = 1e-9
        grid = np.linspace(0, 2.5, 100)
        for a in grid:
            for b in grid:
                expected = (a <= min(capacity_c(1), capacity_c(0.5)) + tol
                            and b <= min(capacity_c(3), capacity_c(2)) + tol)
                assert outer_member(cfg, RateTuple(a, b, 0, 0), tol).member == expected

    def test_member_iff_slacks(self):
        report = outer_member(SYM, RateTuple(0.5, 0.5, 0, 0))
        assert report.member == all(s.value >= -1e-9 for s in report.slacks)
        assert len(report.slacks) == 5


class TestConvMac:
    def test_examples(self):
        assert not conv_mac_member(SYM, RateTuple(0.5, 0.5, 0, 0)).member
        assert conv_mac_member(SYM, RateTuple(0.39, 0.39, 0, 0)).member
        assert conv_mac_member(SYM, RateTuple()).member


class TestEerPrivateRegion:
    def test_alpha_zero_is_mac(self):
        cfg = ChannelConfig(1, 3, 0, 0)
        assert eer_private_region(cfg, 0) == pytest.approx((capacity_c(1), capacity_c(3), capacity_c(4)))

    def test_symmetric_alpha_one(self):
        assert eer_private_region(ChannelConfig(1, 1, 0, 0), 1) == pytest.approx((0, 0, 0), abs=1e-12)

    def test_unequal_alpha_one(self):
        b1, b2, b12 = eer_private_region(ChannelConfig(1, 3, 0, 0), 1)
        assert b1 == pytest.approx(0, abs=1e-12)
        assert b2 == pytest.approx(0.3685, abs=1e-4)
        assert b12 == pytest.approx(0.3685, abs=1e-4)

    @pytest.mark.parametrize("alpha", [-0.1, 1.5])
    def test_alpha_domain(self, alpha):
        with pytest.raises(DomainError):
            eer_private_region(SYM, alpha)


class TestEerBr:
    def test_scheme_two_corner(self):
        report = eer_br_member(SYM, RateTuple(D1, D1, 0, 0))
        assert report.member
        assert report.witness.alpha == pytest.approx(1.0)
        assert report.witness.delta == 0.0

    def test_above_lattice_rate(self):
        assert not eer_br_member(SYM, RateTuple(0.3, 0.3, 0, 0)).member

    def test_origin(self):
        report = eer_br_member(SYM, RateTuple())
        assert report.member
        assert (report.witness.alpha, report.witness.delta) == (0.0, 0.0)

    def test_relabeled_surplus(self):
        report = eer_br_member(SYM, RateTuple(0, 0.2, 0, 0.1))
        assert report.member
        assert report.witness.delta == pytest.approx(0.2)
        assert report.witness.longer == "r21"
        assert report.witness.underlying_r2r == pytest.approx(0.3)

    def test_weak_lattice_rate_blocks_exchange(self):
        cfg = ChannelConfig(0.4, 2, 5, 5)
        assert not eer_br_member(cfg, RateTuple(0.01, 0.01, 0, 0)).member
        assert eer_br_member(cfg, RateTuple(0, 0.2, 0, 0)).member

    @given(cfg=configs, r=tuples)
    def test_canonical_swap_symmetry(self, cfg, r):
        assert eer_br_member(cfg, r).member == eer_br_member(cfg.swapped(), r.swapped()).member

    @given(cfg=configs, r=tuples)
    def test_witness_is_sound(self, cfg, r):
        report = eer_br_ma_member(cfg, r)
        assume(report.member)
        w = report.witness
        assert eer_witness_member(cfg, r, min(w.alpha, 1.0), w.delta, w.longer or "r21").member

    @given(cfg=configs, a=rates, b=rates)
    def test_private_only_reduces_to_mac(self, cfg, a, b):
        mac = classical_mac_member(cfg, a, b).member
        assert eer_br_ma_member(cfg, RateTuple(0, 0, a, b)).member == mac

    @settings(max_examples=1000, deadline=None)
    @given(cfg=configs)
    def test_scheme_points(self, cfg):
        report = eer_br_ma_member(cfg, scheme2_point(cfg))
        assert report.member
        if lattice_rate_d(min(cfg.p1, cfg.p2)) > 0:
            assert report.witness.alpha == pytest.approx(1.0)
            assert report.witness.delta == pytest.approx(0.0, abs=1e-12)
        c1 = capacity_c(cfg.p1)
        assert scheme1_point(cfg, c1, 0.0) == RateTuple(0, 0, c1, 0)

    def test_scheme1_outside_mac(self):
        with pytest.raises(DomainError):
            scheme1_point(SYM, 0.5, 0.5)

    def test_witness_form_mirror(self):
        r = RateTuple(0.2, 0, 0.1, 0)
        assert eer_witness_member(SYM, r, 0.0, 0.2, "r12").member
        assert not eer_witness_member(SYM, r, 0.0, 0.1, "r12").member


class TestWitnessBuiltMembers:
    # 2·10⁴ samples per region; 10⁵ takes minutes in pure Python
    @pytest.mark.parametrize("region", ["conv-mac", "eer-br"])
    def test_inner_regions_inside_outer_bound(self, sampler, region):
        draw = sampler.conv_mac if region == "conv-mac" else sampler.eer_br
        for _ in range(20000):
            cfg = sampler.config()
            r = draw(cfg)
            assert region_member(region, cfg, r).member
            assert outer_member(cfg, r).member

    # 5 configs x 2·10³ pairs rather than 10⁴ pairs per config
    @pytest.mark.parametrize("region, draw", [
        ("outer", "outer"), ("conv-mac", "conv_mac"), ("eer-br", "eer_br"),
    ])
    def test_downward_closed(self, sampler, region, draw):
        draw = getattr(sampler, draw)
        for _ in range(5):
            cfg = sampler.config()
            for _ in range(2000):
                r = draw(cfg)
                assert region_member(region, cfg, r).member
                assert region_member(region, cfg, sampler.below(r)).member

    @pytest.mark.parametrize("region", ["outer", "conv-mac", "eer-br"])
    def test_swap_symmetry(self, sampler, region):
        for _ in range(2000):
            cfg = sampler.config()
            # members and points pushed past the boundary
            for r in (sampler.eer_br(cfg), sampler.conv_mac(cfg).scaled(1.5), sampler.outer(cfg).scaled(1.2)):
                swapped = region_member(region, cfg.swapped(), r.swapped()).member
                assert region_member(region, cfg, r).member == swapped

    @given(cfg=configs, r=tuples)
    def test_outer_swap_symmetry_uniform(self, cfg, r):
        assert outer_member(cfg, r).member == outer_member(cfg.swapped(), r.swapped()).member


class TestRegionMember:
    def test_unknown_region(self):
        with pytest.raises(DomainError):
            region_member("inner", SYM, RateTuple())

    @pytest.mark.parametrize("region", REGIONS)
    def test_origin_everywhere(self, region):
        assert region_member(region, SYM, RateTuple()).member


class TestBoundarySlice:
    def test_rows_and_order(self):
        result = boundary_slice(SYM, {"r1r": 0, "r2r": 0}, ("r12", "r21"), 3)
        assert len(result.rows) == 12
        assert [(row.region, row.ray) for row in result.rows] == [(g, j) for g in REGIONS for j in range(3)]

    @pytest.mark.parametrize("region", ["outer", "conv-mac", "eer-br"])
    def test_r12_axis_endpoint(self, region):
        result = boundary_slice(SYM, {"r1r": 0, "r2r": 0}, ("r12", "r21"), 2, regions=(region,))
        first = result.rows[0]
        assert first.axis1 == pytest.approx(0.5, abs=1e-5)
        assert first.axis2 == 0.0
        assert first.on_boundary

    def test_nested_regions(self):
        result = boundary_slice(SYM, {"r1r": 0, "r2r": 0.1}, ("r12", "r21"), 5)
        extent = {(row.region, row.ray): row.extent for row in result.rows}
        for ray in range(5):
            assert extent["eer-br", ray] <= extent["hull", ray] + 1e-5
            assert extent["conv-mac", ray] <= extent["hull", ray] + 1e-5
            assert extent["hull", ray] <= extent["outer", ray] + 1e-5

    def test_fixed_outside_outer_bound(self):
        result = boundary_slice(SYM, {"r1r": 5, "r2r": 0}, ("r12", "r21"), 4)
        assert result.rows == ()
        assert "outside" in result.diagnostic

    def test_resolution_precondition(self):
        with pytest.raises(PreconditionError):
            boundary_slice(SYM, {"r1r": 0, "r2r": 0}, ("r12", "r21"), 1)

    def test_axes_must_complement_fixed(self):
        with pytest.raises(PreconditionError):
            boundary_slice(SYM, {"r1r": 0, "r12": 0}, ("r12", "r21"), 3)
