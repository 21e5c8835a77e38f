"""Cell complexes (cubical grids, simplicial) and constructible functions."""

from .cubical import CubicalComplex, read_pgm, write_pgm
from .simplicial import SimplicialComplex
from .functions import (
    ConstructibleFunction,
    connected_components,
    euler_characteristic,
    usc_extension,
)

__all__ = [
    "CubicalComplex",
    "SimplicialComplex",
    "ConstructibleFunction",
    "euler_characteristic",
    "connected_components",
    "usc_extension",
    "read_pgm",
    "write_pgm",
]
