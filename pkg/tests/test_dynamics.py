import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nexlab.dynamics import (GOLDEN_MEAN, BranchWord, PointCloud,
                             QuadraticMap, RotationNumber, cf_convergents,
                             cf_expand, cf_value, check_orbit_consistency,
                             derivative_chain, forward_orbit,
                             is_bounded_type, postcritical_cloud)
from nexlab.errors import ConsistencyError, DomainError


class TestContinuedFractions:
    def test_golden_mean_all_ones(self):
        assert cf_expand(GOLDEN_MEAN, 5) == [1, 1, 1, 1, 1]

    def test_rational_terminates(self):
        assert cf_expand(1 / 3, 5) == [3]

    def test_silver_mean(self):
        assert cf_expand(math.sqrt(2) - 1, 4) == [2, 2, 2, 2]

    def test_domain_error(self):
        with pytest.raises(DomainError):
            cf_expand(1.5, 3)
        with pytest.raises(DomainError):
            cf_expand(0.0, 3)

    @given(st.floats(min_value=1e-3, max_value=1 - 1e-3))
    @settings(max_examples=200, deadline=None)
    def test_roundtrip_within_convergent_bound(self, x):
        quotients = cf_expand(x, 12)
        _, qs = cf_convergents(quotients)
        rebuilt = cf_value(quotients)
        if len(qs) >= 2:
            bound = 1.0 / (qs[-1] * qs[-2])
        else:
            bound = 1.0 / qs[-1]
        assert abs(rebuilt - x) <= bound + 1e-12

    def test_bounded_type(self):
        assert is_bounded_type([1, 1, 1, 1], 1)
        assert not is_bounded_type([1, 5, 1], 4)
        assert is_bounded_type([2, 2, 2], 2)

    def test_rotation_number(self):
        rho = RotationNumber.golden()
        assert rho.bounded_type(1)
        assert not rho.terminated
        rational = RotationNumber.from_value(0.25, 10)
        assert rational.terminated


class TestQuadraticMap:
    def test_centered_evaluate(self):
        f = QuadraticMap.centered(0)
        assert f.evaluate(3) == (9, 6)

    def test_siegel_fixed_point(self):
        f = QuadraticMap.siegel(GOLDEN_MEAN)
        v, d = f.evaluate(0)
        assert v == 0
        assert d == f.lam
        assert abs(abs(f.lam) - 1.0) < 1e-15

    def test_siegel_critical_point(self):
        f = QuadraticMap.siegel(GOLDEN_MEAN)
        cp = f.critical_point
        assert cp == -f.lam / 2
        v, d = f.evaluate(cp)
        assert abs(d) < 1e-15
        assert abs(v - (-f.lam ** 2 / 4)) < 1e-15

    def test_evenness_about_critical_point(self):
        f = QuadraticMap.siegel(0.3)
        cp = f.critical_point
        for t in (0.1, 0.5 + 0.2j, -1.3j):
            assert abs(f(cp + t) - f(cp - t)) < 1e-12

    def test_inverse_images_centered(self):
        f = QuadraticMap.centered(0)
        pair = f.inverse_images(4)
        assert sorted(pair, key=lambda z: z.real) == [-2, 2]

    def test_inverse_images_siegel(self):
        f = QuadraticMap.siegel(GOLDEN_MEAN)
        pair = f.inverse_images(0)
        assert min(abs(pair - 0)) < 1e-15
        assert min(abs(pair + f.lam)) < 1e-15
        double = f.inverse_images(-f.lam ** 2 / 4)
        assert abs(double[0] - double[1]) < 1e-7

    @given(st.complex_numbers(max_magnitude=10, allow_nan=False),
           st.floats(min_value=0.01, max_value=0.99))
    @settings(max_examples=200, deadline=None)
    def test_vieta(self, w, theta):
        f = QuadraticMap.siegel(theta)
        a, b = f.inverse_images(w)
        scale = max(1.0, abs(w))
        assert abs((a + b) - (-f.lam)) <= 1e-12 * scale
        assert abs(a * b - (-w)) <= 1e-12 * scale


class TestOrbits:
    def test_superattracting_fixed(self):
        f = QuadraticMap.centered(0)
        o = forward_orbit(f, 0, 5)
        assert np.all(o.points == 0) and len(o.points) == 6
        assert not o.escaped

    def test_powers_of_two(self):
        f = QuadraticMap.centered(0)
        o = forward_orbit(f, 2, 3)
        assert list(o.points) == [2, 4, 16, 256]

    def test_basilica_period_two(self):
        f = QuadraticMap.centered(-1)
        o = forward_orbit(f, 0, 4)
        assert list(o.points) == [0, -1, 0, -1, 0]

    def test_escape_truncates(self):
        f = QuadraticMap.centered(0)
        o = forward_orbit(f, 2, 20)
        assert o.escaped
        assert abs(o.points[-1]) > 1e3


class TestPostcriticalCloud:
    def test_basilica_collapse(self):
        f = QuadraticMap.centered(-1)
        cloud = postcritical_cloud(f, 6)
        vals = sorted(set(np.round(cloud.points, 12)), key=lambda z: z.real)
        assert vals == [-1, 0]

    def test_c_zero(self):
        f = QuadraticMap.centered(0)
        cloud = postcritical_cloud(f, 10)
        assert np.all(cloud.points == 0)

    def test_siegel_bounded(self):
        f = QuadraticMap.siegel(GOLDEN_MEAN)
        cloud = postcritical_cloud(f, 10_000)
        assert len(cloud) == 10_000
        assert np.abs(cloud.points).max() <= 2.0


class TestPointCloud:
    @given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False),
                    min_size=1, max_size=200),
           st.complex_numbers(max_magnitude=8, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_nearest_matches_brute(self, pts, q):
        cloud = PointCloud(pts)
        _, d_fast = cloud.nearest(q)
        _, d_brute = cloud.nearest_brute(q)
        assert abs(d_fast - d_brute) <= 1e-12 * max(1.0, d_brute)

    def test_nearest_on_critical_orbit(self):
        f = QuadraticMap.siegel(GOLDEN_MEAN)
        cloud = postcritical_cloud(f, 1000)
        rng = np.random.default_rng(7)
        for _ in range(50):
            q = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            _, d_fast = cloud.nearest(q)
            _, d_brute = cloud.nearest_brute(q)
            assert d_fast == pytest.approx(d_brute, rel=1e-12)


class TestDerivativeChain:
    def test_fixed_point_chain(self):
        f = QuadraticMap.centered(0)
        chain = derivative_chain(f, np.ones(6))
        assert list(chain) == [1, 2, 4, 8, 16, 32]

    def test_siegel_center_chain(self):
        f = QuadraticMap.siegel(GOLDEN_MEAN)
        chain = derivative_chain(f, np.zeros(4))
        np.testing.assert_allclose(chain, 1.0, rtol=1e-12)

    def test_principal_orbit(self):
        f = QuadraticMap.centered(0)
        chain = derivative_chain(f, [16, 4, 2])
        assert list(chain) == [1, 8, 32]

    def test_inconsistent_orbit_raises(self):
        f = QuadraticMap.centered(0)
        with pytest.raises(ConsistencyError) as err:
            derivative_chain(f, [16, 4, 2.5])
        assert err.value.index == 2

    def test_matches_finite_differences(self):
        f = QuadraticMap.siegel(GOLDEN_MEAN)
        rng = np.random.default_rng(3)
        for _ in range(20):
            # Build a consistent backward orbit by random inverse branches.
            z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            pts = [z]
            for _ in range(10):
                pair = f.inverse_images(pts[-1])
                pts.append(complex(pair[rng.integers(2)]))
            chain = derivative_chain(f, pts)
            n = len(pts) - 1
            zn = pts[-1]
            h = 1e-6 * max(1.0, abs(zn))
            fn = lambda w: forward_orbit(f, w, n).points[-1]
            fd = abs(fn(zn + h) - fn(zn - h)) / (2 * h)
            if fd > 1e-12:
                assert abs(chain[-1] - fd) <= 1e-5 * fd


class TestBranchWord:
    def test_parse_and_str(self):
        w = BranchWord.parse("++-+")
        assert w.bits == (0, 0, 1, 0)
        assert str(w) == "++-+"
        assert len(w) == 4

    def test_from_int(self):
        assert BranchWord.from_int(5, 4).bits == (1, 0, 1, 0)

    def test_bad_symbol(self):
        with pytest.raises(DomainError):
            BranchWord.parse("+x")
