"""Numerical laboratory for Kahler angles of surfaces in Hermitian 4-manifolds."""

from .ambient import AmbientManifold, conformal, euclidean_c2
from .errors import (
    AmbientDegenerate,
    ConfigError,
    FlowStalled,
    NotImmersed,
    NotSymplectic,
    StructureViolation,
)
from .flow import run_flow
from .functional import el_operator, l_beta
from .surface import ImmersedSurface, SurfaceGeometry, read_surface, write_surface

__version__ = "0.1.0"

__all__ = [
    "AmbientManifold",
    "conformal",
    "euclidean_c2",
    "ImmersedSurface",
    "SurfaceGeometry",
    "read_surface",
    "write_surface",
    "l_beta",
    "el_operator",
    "run_flow",
    "AmbientDegenerate",
    "ConfigError",
    "FlowStalled",
    "NotImmersed",
    "NotSymplectic",
    "StructureViolation",
    "__version__",
]
