"""Euler-characteristic integration toolkit.

Integration of constructible functions over finite cell complexes,
network-sampled estimators, real-valued (floor/ceiling) Euler calculus,
and the Euler integral-transform suite, with a scene simulator, CLI, and
HTTP explorer service.
"""

__version__ = "0.1.0"

from .complexes import (
    ConstructibleFunction,
    CubicalComplex,
    SimplicialComplex,
    connected_components,
    euler_characteristic,
    usc_extension,
)
from .integrate import (
    CellularMap,
    count_targets,
    identity_map,
    integrate_by_excursions,
    integrate_by_level_sets,
    integrate_cf,
    projection_map,
    pushforward,
)

__all__ = [
    "ConstructibleFunction",
    "CubicalComplex",
    "SimplicialComplex",
    "euler_characteristic",
    "connected_components",
    "usc_extension",
    "integrate_cf",
    "integrate_by_level_sets",
    "integrate_by_excursions",
    "count_targets",
    "CellularMap",
    "identity_map",
    "projection_map",
    "pushforward",
]
