"""Exact weight polytopes of finite root systems and the tessellations they form."""

from .apartment import AffineIsometry, Apartment, FaceDescriptor
from .errors import ConfigurationError, ConsistencyError, UsageError, WeylPolyError
from .projection import ProjectionResult, fiber, project, project_scaled
from .rootsys import RootSystem, WeylElement, build_root_system
from .tessellation import Tessellation, TessellationReport, ThickCell
from .weightpoly import PolyFace, WeightPolytope, build_affine, build_vectorial, intersect_polytopes

__all__ = [
    "AffineIsometry", "Apartment", "FaceDescriptor",
    "ConfigurationError", "ConsistencyError", "UsageError", "WeylPolyError",
    "ProjectionResult", "fiber", "project", "project_scaled",
    "RootSystem", "WeylElement", "build_root_system",
    "Tessellation", "TessellationReport", "ThickCell",
    "PolyFace", "WeightPolytope", "build_affine", "build_vectorial", "intersect_polytopes",
]
__version__ = "0.1.0"
