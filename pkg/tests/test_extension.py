import numpy as np
import pytest

from nexlab.dynamics import (GOLDEN_MEAN, BranchWord, PointCloud,
                             QuadraticMap, postcritical_cloud)
from nexlab.errors import DomainError, StrategyStuckError
from nexlab.extension import (BackwardOrbit, extend_backward,
                              hyperbolic_norm_bounds, leaf_type_report,
                              pullback_tube, regularity_probe, winding_number)


@pytest.fixture(scope="module")
def siegel():
    return QuadraticMap.siegel(GOLDEN_MEAN)


@pytest.fixture(scope="module")
def siegel_cloud(siegel):
    return postcritical_cloud(siegel, 20_000)


class TestExtendBackward:
    def test_explicit_word_principal(self):
        f = QuadraticMap.centered(0)
        orbit = extend_backward(f, 16, "explicit-word", 2,
                                word=BranchWord.parse("++"))
        assert list(orbit.points) == [16, 4, 2]

    def test_toward_target(self):
        f = QuadraticMap.centered(0)
        orbit = extend_backward(f, 4, "toward-target", 1, target=-1)
        assert orbit.points[1] == -2

    def test_random_strategy_is_consistent(self):
        f = QuadraticMap.siegel(GOLDEN_MEAN)
        rng = np.random.default_rng(0)
        orbit = extend_backward(f, 0.9 + 0.4j, "random", 30, rng=rng)
        assert orbit.depth == 30
        assert orbit.residual <= 1e-9 * max(1.0,
                                            np.abs(orbit.points).max())

    def test_outside_k_orbit(self, siegel, siegel_cloud):
        from nexlab.dynamics import escapes
        orbit = extend_backward(siegel, 1.8 + 0.4j,
                                "outside-K-nearest-boundary", 100,
                                cloud=siegel_cloud)
        # Oracle: every orbit point must be escape-verified outside K.
        for z in orbit.points:
            assert escapes(siegel, z, 1000)
        R = siegel_cloud.distances(orbit.points)
        assert R[-1] < R[0]

    def test_stuck_strategy_reports_partial(self):
        # c = 0 with z0 inside K: no preimage of an interior point escapes.
        f = QuadraticMap.centered(0)
        cloud = PointCloud([1.0 + 0j])
        with pytest.raises(StrategyStuckError) as err:
            extend_backward(f, 0.25, "outside-K-nearest-boundary", 3,
                            cloud=cloud)
        assert err.value.depth == 1
        assert err.value.partial_orbit.depth == 0


class TestWindingNumber:
    def test_circle_around_origin(self):
        poly = np.exp(2j * np.pi * np.arange(64) / 64)
        assert winding_number(poly, 0) == 1
        assert winding_number(poly, 2.0) == 0
        assert winding_number(poly[::-1], 0) == -1

    def test_disk_criterion_exact(self):
        # Depth-1 nonunivalence on disks is |z0 - cv| < R0, exactly.
        rng = np.random.default_rng(4)
        f = QuadraticMap.siegel(GOLDEN_MEAN)
        cv = f.critical_value
        angles = 2 * np.pi * np.arange(256) / 256
        for _ in range(50):
            z0 = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
            R0 = rng.uniform(0.05, 2.0)
            if abs(abs(z0 - cv) - R0) < 1e-3:
                continue  # stay off the measure-zero boundary case
            poly = z0 + R0 * np.exp(1j * angles)
            wound = winding_number(poly, cv) != 0
            assert wound == (abs(z0 - cv) < R0)


class TestPullbackTube:
    def test_disk_at_critical_value_nonunivalent(self, siegel):
        cv = siegel.critical_value
        pre = siegel.inverse_images(cv)
        orbit = BackwardOrbit.from_points(siegel, [cv, pre[0]])
        tube = pullback_tube(siegel, orbit, 0.05)
        assert tube.first_nonunivalent == 1

    def test_principal_orbit_univalent_and_koebe_sized(self):
        f = QuadraticMap.centered(0)
        orbit = extend_backward(f, 16, "explicit-word", 2,
                                word=BranchWord.parse("++"))
        tube = pullback_tube(f, orbit, 1.0, samples=256)
        assert tube.first_nonunivalent is None
        # Oracle: depth-1 image of the unit circle around 16 is, to Koebe
        # distortion accuracy, a circle of radius R0/|f'(4)| = 1/8 about 4.
        radii = np.abs(tube.polylines[1] - 4.0)
        assert radii.min() > (1 / 8) * 0.8
        assert radii.max() < (1 / 8) * 1.2

    def test_siegel_fixed_point_small_disk(self, siegel):
        orbit = BackwardOrbit.from_points(siegel, np.zeros(10))
        tube = pullback_tube(siegel, orbit, 0.1)
        assert tube.first_nonunivalent is None
        assert tube.ambiguous_at is None

    def test_forward_mapping_invariant(self, siegel):
        orbit = extend_backward(siegel, 1.7 + 0.3j, "toward-target", 8,
                                target=1.0 - siegel.lam)
        R0 = 0.2
        tube = pullback_tube(siegel, orbit, R0)
        for n in range(1, tube.depth + 1):
            back = siegel(tube.polylines[n])
            err = np.abs(back - tube.polylines[n - 1]).max()
            assert err <= 1e-8 * R0

    def test_quantitative_koebe_inclusion(self):
        f = QuadraticMap.centered(0)
        orbit = extend_backward(f, 16, "explicit-word", 4,
                                word=BranchWord.parse("++++"))
        P = 256
        tube = pullback_tube(f, orbit, 1.0, samples=P)
        from nexlab.dynamics import derivative_chain
        chain = derivative_chain(f, orbit)
        eps_p = 10.0 / P
        for n in range(1, tube.depth + 1):
            vn = 1.0 / chain[n]
            min_dist = np.abs(tube.polylines[n] - orbit.points[n]).min()
            assert min_dist >= 1.0 * vn / 4.0 * (1 - eps_p)

    def test_min_samples(self, siegel):
        orbit = BackwardOrbit.from_points(siegel, np.zeros(3))
        with pytest.raises(DomainError):
            pullback_tube(siegel, orbit, 0.1, samples=32)


class TestRegularityProbe:
    def test_repelling_fixed_point_positive_radius(self, siegel):
        beta = 1.0 - siegel.lam
        orbit = BackwardOrbit.from_points(siegel, np.full(50, beta))
        probe = regularity_probe(siegel, orbit, [0.2, 0.1, 0.05])
        assert probe.max_univalent_radius is not None
        assert probe.max_univalent_radius > 0

    def test_orbit_through_critical_point_fails_at_step(self, siegel):
        cp = siegel.critical_point
        cv = siegel.critical_value
        z0 = siegel(cv)
        orbit = BackwardOrbit.from_points(siegel, [z0, cv, cp])
        probe = regularity_probe(siegel, orbit, [0.4, 0.2, 0.1])
        for r in probe.radii:
            assert probe.first_failures[r] == 2
        assert probe.max_univalent_radius is None


class TestLeafTypeReport:
    def test_constant_repelling_orbit(self, siegel):
        beta = 1.0 - siegel.lam
        cloud = PointCloud([0j])
        orbit = BackwardOrbit.from_points(siegel, np.full(6, beta))
        report = leaf_type_report(siegel, orbit, cloud, R0=0.1)
        growth = abs(2.0 - siegel.lam)
        np.testing.assert_allclose(report.R, abs(beta), rtol=1e-12)
        np.testing.assert_allclose(
            report.D, [growth ** n for n in range(6)], rtol=1e-9)
        assert report.product[-1] > report.product[0]

    def test_constant_siegel_center_orbit(self, siegel):
        beta = 1.0 - siegel.lam
        cloud = PointCloud([beta])
        orbit = BackwardOrbit.from_points(siegel, np.zeros(5))
        report = leaf_type_report(siegel, orbit, cloud, R0=0.1)
        np.testing.assert_allclose(report.product, abs(beta), rtol=1e-9)

    def test_reciprocal_identity(self, siegel, siegel_cloud):
        orbit = extend_backward(siegel, 1.8 + 0.4j,
                                "outside-K-nearest-boundary", 40,
                                cloud=siegel_cloud)
        report = leaf_type_report(siegel, orbit, siegel_cloud)
        np.testing.assert_allclose(report.v * report.D, 1.0, rtol=1e-12)

    def test_witness_fields_present_with_field(self, siegel, siegel_cloud):
        from nexlab.deepness import distance_transform
        from nexlab.raster import fill_raster
        raster = fill_raster(siegel, (-2, 2, -2, 2), 256, 300)
        field = distance_transform(raster)
        orbit = extend_backward(siegel, 1.8 + 0.4j,
                                "outside-K-nearest-boundary", 10,
                                cloud=siegel_cloud)
        report = leaf_type_report(siegel, orbit, siegel_cloud,
                                  dist_field=field)
        assert report.witness_delta is not None
        assert len(report.witness_ok) == 11

    def test_empty_cloud_rejected(self, siegel):
        with pytest.raises(DomainError):
            PointCloud([])


class TestHyperbolicNormBounds:
    def test_values(self):
        cloud = PointCloud([0j])
        up, note = hyperbolic_norm_bounds(0.5, cloud)
        assert up == pytest.approx(2.0)
        up1, _ = hyperbolic_norm_bounds(1.0, cloud)
        assert up1 == pytest.approx(1.0)
        up2, _ = hyperbolic_norm_bounds(2.0, cloud)
        assert up2 == pytest.approx(up1 / 2)
        assert "lower-bound" in note

    def test_zero_distance_rejected(self):
        cloud = PointCloud([1.0 + 0j])
        with pytest.raises(DomainError):
            hyperbolic_norm_bounds(1.0, cloud)
