"""Exact Gram-orthogonal projection onto weight polytopes.

Every face of a polytope comes with a decomposition of the ambient space
into its support direction and its fiber cone, which are Gram-orthogonal.
A point ``x`` projects onto the face ``F`` exactly when, writing
``x = a + sum t_i g_i`` with ``a`` in the support and ``g_i`` the fiber
generators, all ``t_i >= 0`` and ``a`` lies in the relatively open face.
These sets partition the space; the scan checks that exactly one face accepts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import exactlin as el
from .errors import ConsistencyError, UsageError
from .weightpoly import PolyFace, WeightPolytope


@dataclass(frozen=True)
class ProjectionResult:
    point: tuple
    face_key: object
    fiber_generators: tuple
    coefficients: tuple  # x - point = sum coefficients[i] * fiber_generators[i]
    face: PolyFace

    def to_json(self) -> dict:
        key = self.face_key.to_json() if hasattr(self.face_key, "to_json") else list(self.face_key)
        return {
            "point": el.format_vector(self.point),
            "face_key": key,
            "face_dim": self.face.dim,
            "fiber_generators": [el.format_vector(g) for g in self.fiber_generators],
            "coefficients": el.format_vector(self.coefficients),
        }


def _scan(P: WeightPolytope, x: tuple) -> list[tuple[PolyFace, tuple, tuple]]:
    hits = []
    for key in P.order:
        F = P.faces[key]
        t, a = F.split(x)
        if any(c < 0 for c in t):
            continue
        if F.contains(a, closed=False):
            hits.append((F, t, a))
    return hits


def project(P: WeightPolytope, x: Sequence, certify: bool = True) -> ProjectionResult:
    """The orthogonal projection of ``x`` onto the closed polytope ``P``."""
    x = tuple(el.q(c) for c in x)
    if len(x) != P.n:
        raise UsageError(f"point has {len(x)} coordinates, expected {P.n}")
    hits = _scan(P, x)
    if len(hits) != 1:
        raise ConsistencyError(
            f"{len(hits)} faces accept the point; the fiber partition is violated",
            evidence={"point": el.format_vector(x), "faces": [str(h[0].key) for h in hits]},
        )
    F, t, a = hits[0]
    if certify:
        _certify(P, F, x, a)
    return ProjectionResult(a, F.key, F.fiber_generators, t, F)


def _certify(P: WeightPolytope, F: PolyFace, x: tuple, a: tuple) -> None:
    """Second route: Gram normal equations plus an LP cone certificate."""
    if F.dim < P.n:
        a2 = el.orthogonal_project_affine(x, F.center, list(F.directions), P.gram)
        if a2 != a:
            raise ConsistencyError("support projection disagrees with the normal equations")
        coeffs = el.cone_membership(list(F.fiber_generators), el.sub(x, a))
        if coeffs is None:
            raise ConsistencyError("residual is not in the fiber cone")
    elif a != x:
        raise ConsistencyError("interior point moved by the projection")


def project_scaled(P: WeightPolytope, eta, x: Sequence, certify: bool = True) -> ProjectionResult:
    """Projection onto the image of ``P`` under ``y -> lam + eta (y - lam)``."""
    eta = el.q(eta)
    if not (0 < eta <= 1):
        raise UsageError("eta must lie in (0, 1]")
    return project(P.scaled(eta), x, certify)


def homothety(lam: Sequence, eta, x: Sequence) -> tuple:
    eta = el.q(eta)
    return tuple(l + eta * (c - l) for l, c in zip(lam, x))


def homothety_inverse(lam: Sequence, eta, x: Sequence) -> tuple:
    eta = el.q(eta)
    return tuple(l + (c - l) / eta for l, c in zip(lam, x))


def fiber(P: WeightPolytope, boundary_point: Sequence) -> tuple:
    """Generators of the cone of points projecting onto a frontier point."""
    F = P.face_of_point(boundary_point)
    if F is None:
        raise UsageError("point is outside the polytope")
    if F.dim == P.n:
        raise UsageError("point is interior to the polytope")
    return F.fiber_generators


def variational_ok(P: WeightPolytope, x: Sequence, p: Sequence) -> bool:
    """``<x - p | y - p> <= 0`` for every extreme point ``y``."""
    r = el.sub(x, p)
    Br = el.mat_vec(P.gram, r)
    return all(el.dot(Br, el.sub(y, p)) <= 0 for y in P.extreme_points)
