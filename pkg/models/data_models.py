"""
Data models for the geometry lab
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union
from enum import Enum

import numpy as np

from models.errors import ConfigurationError, DomainError


class ExperimentKind(Enum):
    """Kinds of experiments the runner knows"""
    COMPARISON = "comparison"
    TANGENCY = "tangency"
    TAU = "tau"
    ENTROPY = "entropy"
    MARGULIS = "margulis"
    MEASURES = "measures"
    MEANVALUE = "meanvalue"
    RICCATI_CROSSCHECK = "riccati-crosscheck"
    RIGIDITY = "rigidity"


class RossFamily(Enum):
    """Rank one symmetric spaces of noncompact type"""
    REAL = "real"
    COMPLEX = "complex"
    QUATERNIONIC = "quaternionic"
    OCTONIONIC = "octonionic"

    @property
    def division_dimension(self) -> int:
        return {"real": 1, "complex": 2, "quaternionic": 4, "octonionic": 8}[self.value]

    @property
    def heavy_multiplicity(self) -> int:
        """Multiplicity d of the curvature eigenvalue -4a^2"""
        return self.division_dimension - 1


@dataclass(frozen=True)
class ModelCurvature:
    """Curvature constant of the model plane, curvature is -a^2"""
    a: float

    def __post_init__(self):
        if not math.isfinite(self.a) or self.a < 0:
            raise DomainError(f"curvature constant must be finite and >= 0, got {self.a}")

    @property
    def is_flat(self) -> bool:
        return self.a == 0.0


@dataclass(frozen=True)
class ComparisonTriangle:
    """Hinge of the model plane: two sides, the enclosed angle and the opposite side"""
    r1: float
    r2: float
    alpha: float
    third_side: float

    def __post_init__(self):
        slack = 1e-12 * max(1.0, self.r1 + self.r2)
        if not abs(self.r1 - self.r2) - slack <= self.third_side <= self.r1 + self.r2 + slack:
            raise DomainError(f"third side {self.third_side} violates the triangle inequality "
                              f"for sides {self.r1}, {self.r2}")


@dataclass(frozen=True)
class RossProfile:
    """Constructor data for the curvature profile of a ROSS"""
    family: RossFamily
    real_dimension: int
    scale: float = 1.0

    def __post_init__(self):
        k = self.family.division_dimension
        if self.scale <= 0 or not math.isfinite(self.scale):
            raise ConfigurationError(f"scale must be positive, got {self.scale}", key="scale")
        if self.family is RossFamily.OCTONIONIC and self.real_dimension != 16:
            raise ConfigurationError("octonionic hyperbolic space exists only in real dimension 16",
                                     key="real_dimension")
        if self.real_dimension % k != 0 or self.real_dimension < 2 * k:
            raise ConfigurationError(
                f"{self.family.value} hyperbolic space needs a real dimension that is a multiple "
                f"of {k} and at least {2 * k}, got {self.real_dimension}", key="real_dimension")

    @property
    def n(self) -> int:
        return self.real_dimension - 1

    @property
    def d(self) -> int:
        return self.family.heavy_multiplicity


@dataclass(frozen=True)
class CurvatureProfile:
    """Curvature operator R(t) = R(gamma'(t), .)gamma'(t) in a parallel frame"""
    dim_n: int
    operator: Callable[[float], np.ndarray]
    lower_pinch: ModelCurvature
    upper_pinch: ModelCurvature
    name: str = "profile"
    diagonal: bool = True
    constant: bool = False
    description: str = ""
    ross: Optional[RossProfile] = None

    def at(self, t: float) -> np.ndarray:
        """Return R(t) as a fresh symmetric n x n array"""
        value = np.array(self.operator(float(t)), dtype=float)
        if value.shape != (self.dim_n, self.dim_n):
            raise DomainError(f"profile {self.name} returned shape {value.shape} at t={t}")
        return value

    def apply(self, t: float, J: np.ndarray) -> np.ndarray:
        """R(t) @ J, using the diagonal when the profile is diagonal"""
        R = self.at(t)
        if self.diagonal:
            return np.diag(R)[:, None] * J
        return R @ J

    @property
    def a(self) -> float:
        return self.lower_pinch.a

    @property
    def b(self) -> float:
        return self.upper_pinch.a


@dataclass(frozen=True)
class ManifoldParams:
    """Dimension n+1, pinching constants, horosphere mean curvature and entropy"""
    n: int
    a: ModelCurvature
    b: ModelCurvature
    h: float
    E: float


@dataclass
class JacobiTensor:
    """Pair (J(t), J'(t)) of n x n operators"""
    t: float
    J: np.ndarray
    Jprime: np.ndarray

    @property
    def wronskian(self) -> np.ndarray:
        return self.Jprime.T @ self.J - self.J.T @ self.Jprime


@dataclass
class JacobiTrajectory:
    """Samples of a Jacobi tensor flow with its Wronskian drift"""
    tensors: List[JacobiTensor]
    wronskian_drift: float = 0.0

    @property
    def end(self) -> JacobiTensor:
        return self.tensors[-1]


@dataclass
class ShapeOperator:
    """Symmetric shape operator at parameter t, optionally with a convergence certificate"""
    t: float
    A: np.ndarray
    certificate: Optional[float] = None

    @property
    def trace(self) -> float:
        return float(np.trace(self.A))


@dataclass
class AsymptoticDensity:
    """Asymptotic density tau with the radius used and its error bound"""
    tau: float
    radius_used: float
    error_bound: float


@dataclass
class SphereFlow:
    """Sphere Jacobi tensor sampled on a radius grid, with volume data in logarithms"""
    radii: np.ndarray
    log_theta: np.ndarray
    log_ball: np.ndarray
    tensors: List[JacobiTensor]
    wronskian_drift: float = 0.0


@dataclass
class VolumeCurve:
    """Sphere and ball volumes on an increasing radius grid (stored as logarithms)"""
    radii: np.ndarray
    log_sphere_vol: np.ndarray
    log_ball_vol: np.ndarray
    dim_n: int = 1

    @property
    def sphere_vol(self) -> np.ndarray:
        return np.exp(self.log_sphere_vol)

    def normalized(self, rate: float) -> np.ndarray:
        """Sphere volumes times exp(-rate * r)"""
        return np.exp(self.log_sphere_vol - rate * self.radii)

    def normalized_ball(self, rate: float) -> np.ndarray:
        return np.exp(self.log_ball_vol - rate * self.radii)


@dataclass
class MargulisValue:
    """Margulis function value m(x) with the ball limit m/(nh)"""
    m: float
    ball_limit: float
    certificate: float
    m_quadrature: float = float("nan")


@dataclass(frozen=True)
class SurfacePoint:
    """Polar coordinates about the pole of a warped surface"""
    r: float
    phi: float = 0.0

    def __post_init__(self):
        if not self.r >= 0:
            raise DomainError(f"surface radius must be >= 0, got {self.r}")
        object.__setattr__(self, "phi", float(self.phi) % (2 * math.pi))

    @property
    def is_pole(self) -> bool:
        return self.r == 0.0


@dataclass(frozen=True)
class GeodesicState:
    """Point and unit direction on a surface

    direction is the angle from the outward radial direction, positive towards
    increasing phi; at the pole it is the absolute polar angle of the ray.
    """
    position: SurfacePoint
    direction: float
    clairaut: float = 0.0


@dataclass(frozen=True)
class BallPoint:
    """Point of the open unit ball"""
    coords: Tuple[float, ...]

    def __post_init__(self):
        x = np.asarray(self.coords, dtype=float)
        if not np.all(np.isfinite(x)) or float(x @ x) >= 1.0:
            raise DomainError(f"ball point must lie in the open unit ball, got {self.coords}")
        object.__setattr__(self, "coords", tuple(float(c) for c in x))

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class BoundaryPoint:
    """Unit vector on the boundary sphere"""
    coords: Tuple[float, ...]

    def __post_init__(self):
        x = np.asarray(self.coords, dtype=float)
        norm = float(np.linalg.norm(x))
        if not math.isfinite(norm) or abs(norm - 1.0) > 1e-12:
            raise DomainError(f"boundary point must have unit norm, got norm {norm}")
        object.__setattr__(self, "coords", tuple(float(c) for c in x / norm))

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass
class DensityRatio:
    """Visual and harmonic density ratios at a boundary point"""
    visual: float
    harmonic: float


@dataclass
class CheckRecord:
    """One verified inequality or identity"""
    name: str
    computed: Optional[float]
    oracle: Optional[float]
    residual: Optional[float]
    bound: Optional[float]
    passed: bool
    certificate: Optional[float] = None
    group: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'group': self.group,
            'computed': _clean(self.computed),
            'oracle': _clean(self.oracle),
            'residual': _clean(self.residual),
            'bound': _clean(self.bound),
            'certificate': _clean(self.certificate),
            'pass': bool(self.passed),
        }


@dataclass
class Table:
    """Rectangular table written as CSV next to a report"""
    name: str
    columns: List[str]
    rows: List[List[Any]] = field(default_factory=list)


@dataclass
class Report:
    """Experiment output record"""
    name: str
    kind: str
    config: Dict[str, Any] = field(default_factory=dict)
    records: List[CheckRecord] = field(default_factory=list)
    provenance: Dict[str, Any] = field(default_factory=dict)
    tables: List[Table] = field(default_factory=list)

    def add(self, record: CheckRecord) -> CheckRecord:
        self.records.append(record)
        return record

    def extend(self, other: "Report"):
        """Merge another report's records and tables, keeping order"""
        self.records.extend(other.records)
        self.tables.extend(other.tables)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def summary(self) -> Dict[str, Any]:
        residuals = [(r.residual, r.name) for r in self.records
                     if r.residual is not None and math.isfinite(r.residual)]
        worst = max(residuals, key=lambda item: abs(item[0])) if residuals else (None, None)
        passed = sum(1 for r in self.records if r.passed)
        return {
            'total': len(self.records),
            'passed': passed,
            'failed': len(self.records) - passed,
            'worst_residual': _clean(worst[0]),
            'worst_check': worst[1],
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'kind': self.kind,
            'config': self.config,
            'records': [r.to_dict() for r in self.records],
            'summary': self.summary,
            'provenance': self.provenance,
        }


@dataclass
class ExperimentConfig:
    """Parsed experiment configuration file"""
    name: str
    kind: ExperimentKind
    profiles: List[Union[str, Dict[str, Any]]] = field(default_factory=list)
    surface: Optional[Union[str, Dict[str, Any]]] = None
    tolerances: Dict[str, float] = field(default_factory=dict)
    grid: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)
    output_dir: Optional[str] = None
    plots: bool = False

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """Validate and build a config, raising ConfigurationError with the offending key"""
        if not isinstance(data, dict):
            raise ConfigurationError("configuration must be a JSON object")

        name = data.get('name')
        if not isinstance(name, str) or not name.strip():
            raise ConfigurationError("a non-empty name is required", key="name")

        try:
            kind = ExperimentKind(data.get('kind'))
        except ValueError:
            allowed = ", ".join(k.value for k in ExperimentKind)
            raise ConfigurationError(f"unknown kind {data.get('kind')!r}, expected one of {allowed}",
                                     key="kind")

        profiles = data.get('profiles', [])
        if not isinstance(profiles, list) or not all(isinstance(p, (str, dict)) for p in profiles):
            raise ConfigurationError("must be a list of built-in names or profile objects", key="profiles")

        surface = data.get('surface')
        if surface is not None and not isinstance(surface, (str, dict)):
            raise ConfigurationError("must be a built-in name or a surface object", key="surface")

        tolerances = data.get('tolerances', {})
        if not isinstance(tolerances, dict):
            raise ConfigurationError("must be an object", key="tolerances")
        for key, value in tolerances.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0:
                raise ConfigurationError(f"tolerance must be a positive number, got {value!r}",
                                         key=f"tolerances.{key}")

        grid = data.get('grid', {})
        if not isinstance(grid, dict):
            raise ConfigurationError("must be an object", key="grid")
        radii = grid.get('radii')
        if radii is not None:
            if not isinstance(radii, list) or len(radii) < 2:
                raise ConfigurationError("must list at least two radii", key="grid.radii")
            if any(not isinstance(r, (int, float)) for r in radii) or \
                    any(b <= a for a, b in zip(radii, radii[1:])):
                raise ConfigurationError("radii must be strictly increasing numbers", key="grid.radii")
        if 'r_min' in grid or 'r_max' in grid:
            r_min, r_max = grid.get('r_min'), grid.get('r_max')
            if not isinstance(r_min, (int, float)) or not isinstance(r_max, (int, float)) \
                    or not 0 < r_min < r_max:
                raise ConfigurationError("need 0 < r_min < r_max", key="grid")
        count = grid.get('count')
        if count is not None and (not isinstance(count, int) or count < 2):
            raise ConfigurationError("must be an integer >= 2", key="grid.count")

        seed = data.get('seed')
        if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool)):
            raise ConfigurationError("must be an integer", key="seed")

        params = data.get('params', {})
        if not isinstance(params, dict):
            raise ConfigurationError("must be an object", key="params")

        output = data.get('output', {})
        if not isinstance(output, dict):
            raise ConfigurationError("must be an object", key="output")

        return cls(
            name=name.strip(),
            kind=kind,
            profiles=list(profiles),
            surface=surface,
            tolerances={k: float(v) for k, v in tolerances.items()},
            grid=dict(grid),
            seed=seed,
            params=dict(params),
            output_dir=output.get('dir'),
            plots=bool(output.get('plots', False)),
        )

    def to_dict(self) -> Dict[str, Any]:
        """Echo of the configuration as written into reports"""
        return {
            'name': self.name,
            'kind': self.kind.value,
            'profiles': self.profiles,
            'surface': self.surface,
            'tolerances': self.tolerances,
            'grid': self.grid,
            'seed': self.seed,
            'params': self.params,
        }

    def tolerance(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))


@dataclass
class ExperimentResponse:
    """Response from an experiment runner"""
    success: bool
    report: Optional[Report] = None
    error: Optional[str] = None
    error_category: Optional[str] = None
    execution_time: float = 0.0
    kind: Optional[ExperimentKind] = None


def _clean(value: Optional[float]) -> Optional[float]:
    """JSON-safe float: NaN and infinities become None"""
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None
