"""
Built-in curvature profiles, surfaces, boundary functions and the acceptance suite

Config files refer to these entries by name or describe their own objects with
the same fields; the resolvers below turn either form into geometry objects.
"""

from typing import Any, Callable, Dict, List, Tuple, Union

import numpy as np

from geometry.curvature_profiles import constant_profile, ross_from_spec, ross_profile, synthetic_profile
from geometry.surface_lab import WarpedSurface
from models.data_models import CurvatureProfile
from models.errors import ConfigurationError
from utils.expression_parser import parse_expression

Entry = Union[str, Dict[str, Any]]


def _real_hyperbolic(dim: int, a: float) -> Dict[str, Any]:
    return {
        'type': 'ross', 'family': 'real', 'real_dimension': dim, 'scale': a,
        'description': f"real hyperbolic space of dimension {dim}, curvature -{a:g}^2",
    }


BUILTIN_PROFILES: Dict[str, Dict[str, Any]] = {
    **{f"rh{dim}-a{a:g}": _real_hyperbolic(dim, a) for dim in (2, 3, 4) for a in (0.5, 1.0, 2.0)},
    'ch2': {'type': 'ross', 'family': 'complex', 'real_dimension': 4, 'scale': 1.0,
            'description': "complex hyperbolic plane, curvature in [-4, -1]"},
    'hh2': {'type': 'ross', 'family': 'quaternionic', 'real_dimension': 8, 'scale': 1.0,
            'description': "quaternionic hyperbolic plane, curvature in [-4, -1]"},
    'oh2': {'type': 'ross', 'family': 'octonionic', 'real_dimension': 16, 'scale': 1.0,
            'description': "octonionic hyperbolic plane (Cayley plane), curvature in [-4, -1]"},
    'synthetic-ah': {'type': 'synthetic', 'n': 2, 'entries': ['1', '2.25'], 'a': 1.0, 'b': 1.5,
                     'description': "constant diagonal profile diag(1, 2.25), asymptotically harmonic"},
    'tanh-bump': {'type': 'synthetic', 'n': 1, 'entries': ['1 + 3*tanh(t)^2'], 'a': 1.0, 'b': 2.0,
                  'description': "curvature -(1 + 3 tanh^2 t) along the geodesic, not asymptotically harmonic"},
}

BUILTIN_SURFACES: Dict[str, Dict[str, Any]] = {
    'hyperbolic-plane': {'warping': 'sinh(r)', 'a': 1.0, 'b': 1.0,
                         'description': "hyperbolic plane, f(r) = sinh r"},
    'hyperbolic-plane-a2': {'warping': 'sinh(2*r)/2', 'a': 2.0, 'b': 2.0,
                            'description': "hyperbolic plane of curvature -4, f(r) = sinh(2r)/2"},
    'pinched': {'curvature': '1 + 3*tanh(r)^2', 'a': 1.0, 'b': 2.0,
                'description': "default pinched surface, K(r) = -(1 + 3 tanh^2 r), (a, b) = (1, 2)"},
}

BUILTIN_BOUNDARY_FUNCTIONS: Dict[str, Dict[str, str]] = {
    'cosine': {'expression': 'cos(phi)', 'description': "first harmonic"},
    'gaussian-bump': {'expression': 'exp(-4*(1 - cos(phi)))', 'description': "smooth bump centred at phi = 0"},
    'tilted': {'expression': 'sin(phi) + 0.5*cos(2*phi)', 'description': "mixture of the first two harmonics"},
}

AH_SUITE = [name for name, spec in BUILTIN_PROFILES.items() if spec['type'] == 'ross'] + ['synthetic-ah']
ALL_SUITE = AH_SUITE + ['tanh-bump']

ACCEPTANCE_SUITE: List[Dict[str, Any]] = [
    {'name': 'tau-suite', 'kind': 'tau', 'profiles': AH_SUITE,
     'tolerances': {'agreement': 1e-8, 'oracle': 1e-8, 'certificate_slack': 1e-10, 'mean_curvature': 1e-7},
     'grid': {'r_min': 0.5, 'r_max': 40.0, 'count': 80}},
    {'name': 'riccati-suite', 'kind': 'riccati-crosscheck', 'profiles': ALL_SUITE,
     'tolerances': {'riccati': 1e-6}, 'grid': {'r_min': 0.1, 'r_max': 20.0, 'count': 40}},
    {'name': 'rigidity-suite', 'kind': 'rigidity', 'profiles': AH_SUITE,
     'tolerances': {'ricci': 1e-8, 'equality': 1e-9}},
    {'name': 'entropy-suite', 'kind': 'entropy', 'profiles': AH_SUITE,
     'tolerances': {'entropy_relative': 1e-2, 'isoperimetric_slack': 1e-8}},
    {'name': 'margulis-suite', 'kind': 'margulis', 'profiles': ['rh3-a1', 'rh2-a1', 'ch2', 'synthetic-ah'],
     'tolerances': {'pi': 1e-6, 'ball_limit': 1e-6, 'rate_slack': 1e-10}},
    {'name': 'comparison-pinched', 'kind': 'comparison', 'surface': 'pinched', 'seed': 7,
     'params': {'trials': 200, 'thetas': [0.25, 0.5, 0.75], 'exhibit': True},
     'tolerances': {'slack': 1e-6, 'exhibit_spread': 1e-2, 'ross_constant': 1e-9}},
    {'name': 'comparison-hyperbolic', 'kind': 'comparison', 'surface': 'hyperbolic-plane', 'seed': 7,
     'params': {'trials': 20, 'thetas': [0.25, 0.5, 0.75], 'equality': True},
     'tolerances': {'equality': 1e-8}},
    {'name': 'tangency-pinched', 'kind': 'tangency', 'surface': 'pinched', 'seed': 7,
     'params': {'trials': 100}, 'tolerances': {'slack': 1e-6}},
    {'name': 'tangency-hyperbolic', 'kind': 'tangency', 'surface': 'hyperbolic-plane', 'seed': 7,
     'params': {'trials': 10, 'equality': True}, 'tolerances': {'equality': 1e-8}},
    {'name': 'measures-suite', 'kind': 'measures', 'seed': 7,
     'params': {'samples': 100, 'dimensions': [1, 2], 'a': 1.0, 'visual_t': 30.0},
     'tolerances': {'harmonic': 1e-10, 'visual': 1e-4, 'cocycle': 1e-12}},
    {'name': 'meanvalue-suite', 'kind': 'meanvalue',
     'params': {'a': 1.0, 'xi_angle': 0.0, 'functions': list(BUILTIN_BOUNDARY_FUNCTIONS)},
     'tolerances': {'deviation': 5e-2}},
]


def _profile_from_spec(name: str, spec: Dict[str, Any]) -> CurvatureProfile:
    kind = spec.get('type')
    try:
        if kind == 'ross':
            ross = ross_from_spec(spec['family'], spec['real_dimension'], spec.get('scale', 1.0))
            return ross_profile(ross, name=name)
        if kind == 'constant':
            return constant_profile(int(spec['n']), float(spec['a']), name=name)
        if kind == 'synthetic':
            return synthetic_profile(int(spec['n']), list(spec['entries']), float(spec['a']), float(spec['b']),
                                     name=name, description=spec.get('description', ''))
    except KeyError as e:
        raise ConfigurationError(f"profile '{name}' is missing field {e.args[0]!r}", key="profiles")
    raise ConfigurationError(f"profile '{name}' has unknown type {kind!r} (ross, constant, synthetic)",
                             key="profiles")


def resolve_profile(entry: Entry) -> CurvatureProfile:
    """Built-in name or inline profile object -> CurvatureProfile"""
    if isinstance(entry, str):
        if entry not in BUILTIN_PROFILES:
            raise ConfigurationError(f"unknown built-in profile {entry!r}", key="profiles")
        return _profile_from_spec(entry, BUILTIN_PROFILES[entry])
    if isinstance(entry, dict):
        return _profile_from_spec(entry.get('name', 'inline'), entry)
    raise ConfigurationError(f"profile entry must be a name or an object, got {entry!r}", key="profiles")


def resolve_surface(entry: Entry) -> WarpedSurface:
    """Built-in name or inline surface object -> WarpedSurface"""
    if isinstance(entry, str):
        if entry not in BUILTIN_SURFACES:
            raise ConfigurationError(f"unknown built-in surface {entry!r}", key="surface")
        return WarpedSurface.from_spec({'name': entry, **BUILTIN_SURFACES[entry]})
    if isinstance(entry, dict):
        return WarpedSurface.from_spec(entry)
    raise ConfigurationError("a surface is required for this experiment kind", key="surface")


def resolve_boundary_function(entry: Entry) -> Tuple[str, Callable[[np.ndarray], np.ndarray]]:
    """(name, f) with f a function of the boundary angle phi"""
    if isinstance(entry, str):
        if entry in BUILTIN_BOUNDARY_FUNCTIONS:
            return entry, parse_expression(BUILTIN_BOUNDARY_FUNCTIONS[entry]['expression'], 'phi')
        raise ConfigurationError(f"unknown built-in boundary function {entry!r}", key="params.functions")
    if isinstance(entry, dict) and isinstance(entry.get('expression'), str):
        return entry.get('name', entry['expression']), parse_expression(entry['expression'], 'phi')
    raise ConfigurationError("boundary function needs a name or an 'expression'", key="params.functions")


def catalog() -> Dict[str, List[Dict[str, str]]]:
    """Built-ins with one-line descriptions"""
    return {
        'profiles': [{'name': name, 'description': spec['description']} for name, spec in BUILTIN_PROFILES.items()],
        'surfaces': [{'name': name, 'description': spec['description']} for name, spec in BUILTIN_SURFACES.items()],
        'boundary_functions': [{'name': name, 'description': f"{spec['description']}: {spec['expression']}"}
                               for name, spec in BUILTIN_BOUNDARY_FUNCTIONS.items()],
        'experiments': [{'name': cfg['name'], 'description': f"{cfg['kind']} experiment of the acceptance suite"}
                        for cfg in ACCEPTANCE_SUITE],
    }
