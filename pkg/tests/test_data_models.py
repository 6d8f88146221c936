"""
Unit tests for the data models
"""

import math

import numpy as np
import pytest

from models.data_models import (
    BallPoint, BoundaryPoint, CheckRecord, ExperimentConfig, ExperimentKind, ModelCurvature, Report,
    RossFamily, RossProfile, SurfacePoint, VolumeCurve,
)
from models.errors import ConfigurationError, DomainError


def _record(name, residual, passed=True):
    return CheckRecord(name=name, computed=1.0, oracle=1.0, residual=residual, bound=1e-8, passed=passed)


class TestReport:

    def test_summary_counts(self):
        """Summary is consistent with the records"""
        report = Report(name="r", kind="tau")
        report.add(_record("a", 1e-12))
        report.add(_record("b", -3e-9))
        report.add(_record("c", 5e-10, passed=False))
        summary = report.summary
        assert (summary['total'], summary['passed'], summary['failed']) == (3, 2, 1)
        assert summary['worst_check'] == "b"
        assert summary['worst_residual'] == -3e-9
        assert not report.passed

    def test_empty_report_passes(self):
        """No records means nothing failed"""
        report = Report(name="empty", kind="tau")
        assert report.passed
        assert report.summary['worst_check'] is None

    def test_non_finite_values_cleaned(self):
        """NaN and infinities serialize as None"""
        record = CheckRecord(name="x", computed=math.nan, oracle=math.inf, residual=None, bound=1.0, passed=False)
        data = record.to_dict()
        assert data['computed'] is None
        assert data['oracle'] is None
        assert data['pass'] is False

    def test_extend_keeps_order(self):
        """extend appends records and tables in order"""
        first = Report(name="first", kind="tau", records=[_record("a", 0.0)])
        second = Report(name="second", kind="tau", records=[_record("b", 0.0), _record("c", 0.0)])
        first.extend(second)
        assert [r.name for r in first.records] == ["a", "b", "c"]


class TestExperimentConfig:

    @pytest.fixture
    def valid(self):
        return {
            'name': 'tau-ross',
            'kind': 'tau',
            'profiles': ['rh3-a1', 'ch2'],
            'tolerances': {'agreement': 1e-8},
            'grid': {'r_min': 0.5, 'r_max': 40.0, 'count': 80},
            'seed': 7,
            'output': {'dir': 'out', 'plots': True},
        }

    def test_from_dict(self, valid):
        """A valid config parses into typed fields"""
        config = ExperimentConfig.from_dict(valid)
        assert config.kind is ExperimentKind.TAU
        assert config.output_dir == 'out'
        assert config.plots is True
        assert config.tolerance('agreement', 1.0) == 1e-8
        assert config.tolerance('missing', 0.5) == 0.5

    def test_to_dict_echo(self, valid):
        """to_dict echoes the experiment fields"""
        echo = ExperimentConfig.from_dict(valid).to_dict()
        assert echo['kind'] == 'tau'
        assert echo['profiles'] == ['rh3-a1', 'ch2']

    @pytest.mark.parametrize("key,value,offending", [
        ('kind', 'volume', 'kind'),
        ('name', '', 'name'),
        ('tolerances', {'agreement': 0.0}, 'tolerances.agreement'),
        ('tolerances', {'agreement': True}, 'tolerances.agreement'),
        ('grid', {'radii': [1.0, 1.0]}, 'grid.radii'),
        ('grid', {'r_min': 2.0, 'r_max': 1.0}, 'grid'),
        ('grid', {'count': 1}, 'grid.count'),
        ('seed', 'seven', 'seed'),
        ('profiles', 'rh3-a1', 'profiles'),
        ('surface', 3, 'surface'),
    ])
    def test_validation(self, valid, key, value, offending):
        """Invalid fields raise ConfigurationError naming the key"""
        valid[key] = value
        with pytest.raises(ConfigurationError) as excinfo:
            ExperimentConfig.from_dict(valid)
        assert excinfo.value.key == offending

    def test_not_an_object(self):
        """The top level must be an object"""
        with pytest.raises(ConfigurationError):
            ExperimentConfig.from_dict(['tau'])


class TestGeometricTypes:

    def test_model_curvature(self):
        """Negative or non-finite constants are rejected"""
        assert ModelCurvature(0.0).is_flat
        with pytest.raises(DomainError):
            ModelCurvature(-1.0)
        with pytest.raises(DomainError):
            ModelCurvature(math.nan)

    def test_ross_family_multiplicities(self):
        """d = k - 1 for k = 1, 2, 4, 8"""
        assert [f.heavy_multiplicity for f in RossFamily] == [0, 1, 3, 7]

    def test_ross_profile_dimensions(self):
        """n and d follow from the family and real dimension"""
        ross = RossProfile(RossFamily.QUATERNIONIC, 8)
        assert (ross.n, ross.d) == (7, 3)

    def test_ball_point(self):
        """Points must lie in the open ball"""
        with pytest.raises(DomainError):
            BallPoint((0.6, 0.8))
        assert BallPoint((0.1, 0.2)).vector.shape == (2,)

    def test_boundary_point(self):
        """Boundary points must have unit norm"""
        with pytest.raises(DomainError):
            BoundaryPoint((0.5, 0.5))
        assert BoundaryPoint((0.6, 0.8)).coords == (0.6, 0.8)

    def test_surface_point(self):
        """Angles wrap into [0, 2 pi) and radii must be non-negative"""
        assert SurfacePoint(1.0, -math.pi / 2).phi == pytest.approx(1.5 * math.pi)
        assert SurfacePoint(0.0).is_pole
        with pytest.raises(DomainError):
            SurfacePoint(-0.1)

    def test_volume_curve_normalization(self):
        """normalized multiplies by exp(-rate r)"""
        vc = VolumeCurve(radii=np.array([1.0, 2.0]), log_sphere_vol=np.array([2.0, 4.0]),
                         log_ball_vol=np.array([1.0, 3.0]), dim_n=2)
        np.testing.assert_allclose(vc.normalized(2.0), [1.0, 1.0])
        np.testing.assert_allclose(vc.normalized_ball(1.0), [1.0, math.e])
