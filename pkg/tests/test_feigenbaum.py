"""Tests for the superstable period-doubling cascade derivation."""

import numpy as np
import pytest

from nexlab.errors import DomainError
from nexlab.feigenbaum import derive_feigenbaum_parameter


def _superstable_oracle(k, lo, hi):
    """Real root of f_c^{2^k}(0) = 0 in (lo, hi) via companion-matrix roots.

    The polynomial in c is built by direct composition, independent of the
    bisection method under test.
    """
    poly = np.array([0.0])  # coefficients of x as polynomial in c, ascending
    for _ in range(2 ** k):
        sq = np.convolve(poly, poly)
        sq = np.concatenate([sq, np.zeros(1)])
        sq[1] += 1.0  # + c
        poly = np.trim_zeros(sq, "b")
    roots = np.roots(poly[::-1])
    real = roots[np.abs(roots.imag) < 1e-9].real
    inside = real[(real > lo) & (real < hi)]
    assert inside.size == 1
    return float(inside[0])


class TestCascade:
    def test_c1_is_exactly_minus_one(self):
        res = derive_feigenbaum_parameter(3)
        assert res.cs[0] == -1.0

    def test_c2_matches_root_oracle(self):
        res = derive_feigenbaum_parameter(2)
        oracle = _superstable_oracle(2, -1.5, -1.25)
        assert res.cs[1] == pytest.approx(oracle, abs=1e-10)

    def test_c3_matches_newton_oracle(self):
        # Newton's method on g(c) = f_c^8(0) with the analytic derivative
        # recurrence x' -> 2 x x' + 1, seeded by a coarse sign-change scan;
        # an independent solver for the same superstable condition.
        def g_and_dg(c):
            x, dx = 0.0, 0.0
            for _ in range(8):
                x, dx = x * x + c, 2 * x * dx + 1.0
            return x, dx

        grid = np.linspace(-1.42, -1.35, 200)
        vals = np.array([g_and_dg(c)[0] for c in grid])
        idx = np.nonzero(np.diff(np.sign(vals)))[0][0]
        c = 0.5 * (grid[idx] + grid[idx + 1])
        for _ in range(50):
            v, dv = g_and_dg(c)
            c -= v / dv
        res = derive_feigenbaum_parameter(3)
        assert res.cs[2] == pytest.approx(c, abs=1e-12)

    def test_sequence_strictly_decreasing(self):
        res = derive_feigenbaum_parameter(8)
        assert all(b < a for a, b in zip(res.cs, res.cs[1:]))

    def test_residuals_below_tolerance(self):
        res = derive_feigenbaum_parameter(8)
        assert all(r < 1e-12 for r in res.residuals)

    def test_gap_ratios_stabilize(self):
        res = derive_feigenbaum_parameter(10)
        # consecutive-gap ratios approach the doubling constant ~4.6692
        assert res.ratios[-1] == pytest.approx(4.6692, abs=5e-3)
        # and the tail is settling: last two ratios agree more closely
        # than the first two do
        assert (abs(res.ratios[-1] - res.ratios[-2])
                < abs(res.ratios[1] - res.ratios[0]))

    def test_limit_extrapolation(self):
        res = derive_feigenbaum_parameter(10)
        # cascade accumulation parameter, known to ~1e-9
        assert res.c_limit == pytest.approx(-1.401155189, abs=1e-6)

    @pytest.mark.parametrize("m", [0, 1, 15])
    def test_m_out_of_range(self, m):
        with pytest.raises(DomainError):
            derive_feigenbaum_parameter(m)
