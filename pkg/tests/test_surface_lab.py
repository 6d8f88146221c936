"""
Unit tests for warped surfaces, geodesics and the sampled comparison checks
"""

import math

import numpy as np
import pytest

from geometry import surface_lab
from geometry.comparison_kernels import law_of_cosines
from geometry.surface_lab import (
    WarpedSurface, angle_at, circle_curvature, connect, distance, geodesic_curvature_profile,
    horocurvature_profile, horocycle_curvature, shoot, shoot_end, verify_tangent_circles,
    verify_triangle_comparison, wrap_angle,
)
from models.data_models import SurfacePoint
from models.errors import ConfigurationError, DomainError, IntegrationError, PinchingViolationError


@pytest.fixture(scope="module")
def plane():
    return WarpedSurface.from_warping('sinh(r)', 1.0, 1.0, name="hyperbolic-plane")


@pytest.fixture(scope="module")
def pinched():
    return WarpedSurface.from_curvature('1 + 3*tanh(r)^2', 1.0, 2.0, name="pinched")


class TestConstruction:

    def test_warping_curvature(self, plane):
        """f = sinh gives K = -1, including at the pole"""
        assert plane.curvature(1.3) == pytest.approx(-1.0, rel=1e-12)
        assert plane.curvature(0.0) == pytest.approx(-1.0, rel=1e-12)

    def test_curvature_defined_warping(self):
        """kappa = 1 reproduces f = sinh"""
        s = WarpedSurface.from_curvature('1', 1.0, 1.0)
        f, df = s.warp(1.0)
        assert f == pytest.approx(math.sinh(1.0), rel=1e-10)
        assert df == pytest.approx(math.cosh(1.0), rel=1e-10)

    def test_warping_initial_conditions(self):
        """f'(0) must be 1"""
        with pytest.raises(ConfigurationError):
            WarpedSurface.from_warping('2*sinh(r)', 1.0, 1.0)

    def test_pinching_checked(self):
        """Declared bounds must hold along the profile"""
        with pytest.raises(PinchingViolationError):
            WarpedSurface.from_curvature('1 + 3*tanh(r)^2', 1.0, 1.5)

    def test_from_spec(self):
        """Config objects select warping or curvature"""
        s = WarpedSurface.from_spec({'name': 'h2', 'warping': 'sinh(2*r)/2', 'a': 2, 'b': 2})
        assert s.curvature(1.0) == pytest.approx(-4.0, rel=1e-12)
        with pytest.raises(ConfigurationError):
            WarpedSurface.from_spec({'name': 'bad', 'a': 1, 'b': 1})
        with pytest.raises(ConfigurationError):
            WarpedSurface.from_spec({'warping': 'sinh(r)'})

    def test_wrap_angle(self):
        """Angles are reduced to (-pi, pi]"""
        assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
        assert wrap_angle(-math.pi) == math.pi
        assert wrap_angle(0.5) == 0.5


class TestGeodesics:

    def test_radial_shot(self, plane):
        """Outward radial geodesics increase r by the length"""
        end = shoot_end(plane, SurfacePoint(1.0, 0.4), 0.0, 2.0)
        assert end.position.r == pytest.approx(3.0)
        assert end.position.phi == pytest.approx(0.4)

    def test_through_pole(self, plane):
        """Inward radial geodesics pass the pole onto the opposite meridian"""
        end = shoot_end(plane, SurfacePoint(1.0, 0.0), math.pi, 3.0)
        assert end.position.r == pytest.approx(2.0)
        assert end.position.phi == pytest.approx(math.pi)

    def test_negative_length(self, plane):
        """Lengths must be non-negative"""
        with pytest.raises(DomainError):
            shoot(plane, SurfacePoint(1.0, 0.0), 1.0, -1.0)

    def test_clairaut_conserved(self, pinched):
        """f(r) sin(psi) is constant along a shot geodesic"""
        states = shoot(pinched, SurfacePoint(1.0, 0.0), 1.0, 3.0)
        values = [st.clairaut for st in states]
        assert max(values) - min(values) < 1e-9

    def test_clairaut_drift_is_an_integration_failure(self, pinched, monkeypatch):
        """A shot whose Clairaut constant drifts raises instead of returning"""
        monkeypatch.setattr(surface_lab, "clairaut_drift", lambda states: 1.0)
        with pytest.raises(IntegrationError, match="Clairaut"):
            shoot(pinched, SurfacePoint(1.0, 0.0), 1.0, 3.0)

    def test_clairaut_drift_reaches_distance(self, pinched, monkeypatch):
        """Distances are not computed from a drifting geodesic"""
        monkeypatch.setattr(surface_lab, "clairaut_drift", lambda states: 1.0)
        with pytest.raises(IntegrationError):
            distance(pinched, SurfacePoint(1.0, 0.0), SurfacePoint(1.5, 1.0))

    @pytest.mark.parametrize("x,y", [
        (SurfacePoint(1.0, 0.0), SurfacePoint(1.5, 1.0)),
        (SurfacePoint(2.0, 0.3), SurfacePoint(0.5, 2.9)),
        (SurfacePoint(1.0, 0.0), SurfacePoint(1.0, 2.0)),
    ])
    def test_distance_matches_law_of_cosines(self, plane, x, y):
        """Hyperbolic plane distances follow the law of cosines about the pole"""
        omega = abs(wrap_angle(y.phi - x.phi))
        assert distance(plane, x, y) == pytest.approx(law_of_cosines(1.0, x.r, y.r, omega), rel=1e-8)

    def test_distance_symmetric(self, pinched):
        """d(x, y) = d(y, x)"""
        x, y = SurfacePoint(0.7, 0.2), SurfacePoint(1.8, 1.9)
        assert distance(pinched, x, y) == pytest.approx(distance(pinched, y, x), rel=1e-9)

    def test_pole_distance(self, pinched):
        """Distance from the pole is r"""
        assert distance(pinched, SurfacePoint(0.0), SurfacePoint(1.7, 2.0)) == 1.7

    def test_connect_hits_target(self, pinched):
        """Shooting along the connecting direction reaches the target"""
        x, y = SurfacePoint(1.0, 0.0), SurfacePoint(2.0, 1.2)
        length, heading, _ = connect(pinched, x, y)
        end = shoot_end(pinched, x, heading, length).position
        assert end.r == pytest.approx(y.r, abs=1e-8)
        assert end.phi == pytest.approx(y.phi, abs=1e-8)

    def test_angle_at_vertex(self, plane):
        """Angle at the pole between two meridians is their phi difference"""
        assert angle_at(plane, SurfacePoint(0.0), SurfacePoint(1.0, 0.0), SurfacePoint(1.0, 1.0)) == \
            pytest.approx(1.0)


class TestCurvatures:

    def test_circle_curvature_constant(self, plane):
        """Circles of radius R have curvature coth R"""
        k = circle_curvature(plane, SurfacePoint(1.0, 0.3), 0.7, 1.0)
        assert k == pytest.approx(1.0 / math.tanh(0.7), rel=1e-9)

    def test_circle_radius_positive(self, plane):
        """Zero radius is rejected"""
        with pytest.raises(DomainError):
            circle_curvature(plane, SurfacePoint(1.0), 0.0, 1.0)

    def test_horocycle_curvature_constant(self, plane):
        """Horocycles of the hyperbolic plane have curvature 1"""
        k, certificate = horocycle_curvature(plane, SurfacePoint(1.0, 0.5), 1.0)
        assert k == pytest.approx(1.0, abs=1e-8)
        assert certificate <= 1e-9

    def test_horocurvature_profile_constant(self, plane):
        """Along any geodesic of the hyperbolic plane the horocycle curvature is 1"""
        profile = horocurvature_profile(plane, plane.state(1.0, 0.0, math.pi / 2), [-1.0, 0.0, 1.0])
        assert [t for t, _ in profile] == [-1.0, 0.0, 1.0]
        np.testing.assert_allclose([h for _, h in profile], 1.0, atol=1e-8)

    def test_horocurvature_varies_on_pinched(self, pinched):
        """A non-constant surface has varying horocycle curvature along a geodesic"""
        profile = horocurvature_profile(pinched, pinched.state(1.0, 0.0, math.pi / 2),
                                        np.linspace(-3.0, 3.0, 7))
        values = [h for _, h in profile]
        assert max(values) - min(values) > 1e-2
        assert all(1.0 - 1e-9 <= h <= 2.0 + 1e-9 for h in values)

    def test_geodesic_curvature_profile(self, plane):
        """The curvature along a geodesic of the hyperbolic plane is -1"""
        p = geodesic_curvature_profile(plane, plane.state(1.0, 0.0, math.pi / 2), 5.0)
        assert p.dim_n == 1
        assert p.at(0.3)[0, 0] == pytest.approx(-1.0, rel=1e-9)
        assert p.at(50.0)[0, 0] == pytest.approx(-1.0, rel=1e-9)


class TestSampledChecks:

    def test_triangle_equality_on_hyperbolic_plane(self, plane):
        """Both comparison bounds are equalities at constant curvature"""
        report = verify_triangle_comparison(plane, trials=2, seed=7, equality_tol=1e-8)
        assert report.passed
        assert len(report.records) == 2 * (3 * 2 + 2)
        assert report.tables[0].name == "triangles"
        assert len(report.tables[0].rows) == 6

    def test_triangle_bounds_on_pinched(self, pinched):
        """Lower F_a and upper F_b bounds hold on the pinched surface"""
        report = verify_triangle_comparison(pinched, trials=3, seed=7, thetas=[0.5])
        assert report.passed
        assert sum(r.group == "hinge" for r in report.records) == 6

    def test_triangles_deterministic(self, pinched):
        """The same seed reproduces the same residuals"""
        first = verify_triangle_comparison(pinched, trials=1, seed=11, thetas=[0.25])
        second = verify_triangle_comparison(pinched, trials=1, seed=11, thetas=[0.25])
        assert [r.residual for r in first.records] == [r.residual for r in second.records]

    def test_tangent_equality_on_hyperbolic_plane(self, plane):
        """Tangent-circle bounds are equalities at constant curvature"""
        report = verify_tangent_circles(plane, trials=2, seed=7, equality_tol=1e-8)
        assert report.passed
        assert len(report.records) == 8

    def test_tangent_bounds_on_pinched(self, pinched):
        """Tangent-circle and horocycle gaps lie between the a and b bounds"""
        report = verify_tangent_circles(pinched, trials=2, seed=7)
        assert report.passed
        assert report.tables[0].name == "tangent_pairs"
