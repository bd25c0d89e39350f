import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from twrc.helper.exceptions import DomainError, PreconditionError
from twrc.helper.rate_math import (
    CD_GAP_MAX, Snr, capacity_c, cd_gap, gamma, lattice_rate_d, mac_bounds, scheme2_private_rate,
)

powers = st.floats(min_value=0.0, max_value=1e6, allow_nan=False, allow_infinity=False)


class TestCapacity:
    @pytest.mark.parametrize("x, expected", [(0, 0.0), (1, 0.5), (3, 1.0)])
    def test_values(self, x, expected):
        assert capacity_c(x) == pytest.approx(expected)

    def test_accepts_snr(self):
        assert capacity_c(Snr(3)) == pytest.approx(1.0)

    def test_array_input(self):
        assert_allclose(capacity_c(np.array([0.0, 1.0, 3.0])), [0.0, 0.5, 1.0])

    @pytest.mark.parametrize("bad", [-1.0, math.inf, math.nan])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            capacity_c(bad)

    @given(a=powers, b=powers)
    def test_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert capacity_c(lo) <= capacity_c(hi)


class TestLatticeRate:
    @pytest.mark.parametrize("x, expected", [(0.5, 0.0), (3.5, 1.0), (0.1, 0.0), (0.0, 0.0)])
    def test_values(self, x, expected):
        assert lattice_rate_d(x) == pytest.approx(expected)

    def test_domain(self):
        with pytest.raises(DomainError):
            lattice_rate_d(-0.1)

    @given(x=powers)
    def test_never_above_capacity(self, x):
        assert 0.0 <= lattice_rate_d(x) <= capacity_c(x)


class TestGamma:
    def test_equal_powers(self):
        assert gamma(1, 1) == pytest.approx(0.5)

    @pytest.mark.parametrize("p2", [0.0, 1.0, 50.0])
    def test_zero_weak_power(self, p2):
        assert gamma(0, p2) == pytest.approx(0.0, abs=1e-15)

    def test_unequal(self):
        expected = 0.5 * math.log2(3) + 1 - 0.5 * math.log2(5)
        assert gamma(1, 3) == pytest.approx(expected)
        assert gamma(1, 3) == pytest.approx(0.6315, abs=1e-4)

    def test_ordering_precondition(self):
        with pytest.raises(PreconditionError):
            gamma(2, 1)

    @given(a=powers, b=powers)
    def test_bounded_below_by_lattice_rate(self, a, b):
        p1, p2 = sorted((a, b))
        assert gamma(p1, p2) >= lattice_rate_d(p1) - 1e-12


class TestCdGap:
    def test_maximum_at_half(self):
        assert cd_gap(0.5) == pytest.approx(CD_GAP_MAX)
        assert CD_GAP_MAX == pytest.approx(0.292481, abs=1e-6)

    def test_zero(self):
        assert cd_gap(0) == 0.0

    def test_high_snr(self):
        assert cd_gap(100) == pytest.approx(0.5 * math.log2(101 / 100.5))
        assert cd_gap(100) == pytest.approx(0.00358, abs=1e-5)

    @given(x=powers)
    def test_within_constant(self, x):
        assert -1e-12 <= cd_gap(x) <= CD_GAP_MAX + 1e-12

    def test_grid_sup(self):
        grid = np.linspace(0.0, 20.0, 200001)
        assert np.max(cd_gap(grid)) <= CD_GAP_MAX + 1e-12


class TestSchemeTwoRate:
    @settings(max_examples=200)
    @given(a=powers, b=powers)
    def test_identities(self, a, b):
        p1, p2 = sorted((a, b))
        c1, c2, c12 = mac_bounds(p1, p2)
        rate = scheme2_private_rate(p1, p2)
        assert rate == pytest.approx(c2 - gamma(p1, p2), abs=1e-9)
        assert rate == pytest.approx(c12 - capacity_c(2 * p1), abs=1e-9)

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            scheme2_private_rate(3, 1)


class TestSnr:
    @pytest.mark.parametrize("bad", [-1e-9, math.inf, math.nan, "abc"])
    def test_rejects(self, bad):
        with pytest.raises(DomainError):
            Snr(bad)

    def test_float(self):
        assert float(Snr("2.5")) == 2.5


def test_gap_constant_on_log_grid():
    # the maximum sits on the kink at 0.5, which a plain log grid steps over
    grid = np.union1d(np.logspace(-4, 4, 10000), [0.5])
    gaps = cd_gap(grid)
    assert np.max(gaps) == pytest.approx(0.5 * math.log2(1.5), abs=1e-6)
    peak = grid[np.argmax(gaps)]
    assert peak == pytest.approx(0.5, rel=5e-3)


class TestScalarInequalities:
    @given(x=powers)
    def test_doubling_power_gains_at_most_half_bit(self, x):
        assert capacity_c(2 * x) - capacity_c(x) <= 0.5 + 1e-12

    @settings(max_examples=300)
    @given(a=powers, b=powers)
    def test_gamma_between_zero_and_half_bit_above_capacity(self, a, b):
        p1, p2 = sorted((a, b))
        g = gamma(p1, p2)
        assert g >= -1e-12
        assert g - capacity_c(p1) <= 0.5 + 1e-12
