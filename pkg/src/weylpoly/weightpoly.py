"""Vectorial and affine weight polytopes with their face lattices.

A weight polytope is ``lam + conv(W.b')`` where ``W`` is the Weyl group of a
full-rank root subsystem and ``b'`` is regular for it.  Its faces are built
combinatorially: the chamber of ``b'`` fixes a set of simple roots, and the
face attached to the vectorial face ``w.F_J`` is ``lam + w.conv(W_J.b')``.
No convex hull code is involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from gmpy2 import mpq

from . import exactlin as el
from .apartment import Apartment, FaceDescriptor
from .errors import ConfigurationError, ConsistencyError, UsageError
from .rootsys import RootSubsystem, RootSystem, WeylElement

VECTORIAL = "vectorial"
AFFINE = "affine"


@dataclass(eq=False)
class PolyFace:
    """One face of a weight polytope.

    ``directions`` span the direction of its support; ``equalities`` are
    ``(form, value)`` pairs cutting out the support; ``facets`` are
    ``(form, offset)`` pairs with ``form(x) <= offset`` on the closed face and
    equality exactly on one facet.  ``fiber_generators`` span the cone of
    points projecting onto the face.
    """

    key: object
    dim: int
    extreme_points: tuple
    center: tuple
    directions: tuple
    equalities: tuple
    facets: tuple = ()
    fiber_generators: tuple = ()
    word: tuple = ()
    J: tuple = ()
    witness: tuple = ()
    _decomp: Optional[tuple] = field(default=None, repr=False)

    def in_support(self, x: Sequence) -> bool:
        return all(el.dot(f, x) == v for f, v in self.equalities)

    def contains(self, x: Sequence, closed: bool = True) -> bool:
        if self.dim == 0:
            return tuple(x) == self.center
        if not self.in_support(x):
            return False
        if closed:
            return all(el.dot(f, x) <= off for f, off in self.facets)
        return all(el.dot(f, x) < off for f, off in self.facets)

    def split(self, x: Sequence) -> tuple[tuple, tuple]:
        """Write ``x = center + sum t_i fiber_i + sum s_j dir_j``; return ``(t, center + sum s_j dir_j)``."""
        inv, k = self._decomp
        coords = el.mat_vec(inv, el.sub(x, self.center))
        t = coords[:k]
        a = self.center
        for s, d in zip(coords[k:], self.directions):
            if s:
                a = tuple(ai + s * di for ai, di in zip(a, d))
        return t, a

    def to_json(self) -> dict:
        key = self.key.to_json() if isinstance(self.key, FaceDescriptor) else list(self.key)
        return {
            "key": key,
            "dim": self.dim,
            "extreme_points": [el.format_vector(p) for p in self.extreme_points],
            "center": el.format_vector(self.center),
        }


class WeightPolytope:
    """``lam + conv(W.b')`` for a full-rank root subsystem, with its face lattice."""

    def __init__(self, kind: str, rs: RootSystem, lam: Sequence, base_offset: Sequence,
                 subsystem_indices: Sequence[int], apartment: Optional[Apartment] = None,
                 eta=1, unscaled: Optional["WeightPolytope"] = None):
        self.kind = kind
        self.rs = rs
        self.n = rs.rank
        self.gram = rs.gram
        self.apartment = apartment
        self.lam = tuple(el.q(x) for x in lam)
        self.eta = el.q(eta)
        self.base_offset = tuple(el.q(x) for x in base_offset)
        self.sub = RootSubsystem(rs, subsystem_indices, self.base_offset)
        if not self.sub.is_full_rank:
            raise ConfigurationError("weight polytopes need a full-rank root system")
        for i in self.sub.indices:
            if el.dot(rs.roots[i], self.base_offset) == 0:
                raise ConfigurationError("base point is not regular for the root system")
        self._scaled: dict = {}
        self._unscaled = unscaled
        self._build()

    # ---- construction

    @property
    def base_point(self) -> tuple:
        return el.add(self.lam, self.base_offset)

    def _face_key(self, witness: tuple, sign_key: tuple):
        if self.kind == AFFINE:
            return self.apartment.step_face(self.lam, witness)
        return sign_key

    def _build(self) -> None:
        sub = self.sub
        lam = self.lam
        bp = self.base_offset
        weyl = sub.weyl_group_elements()
        ext = sorted({el.add(lam, w.apply(bp)) for w in weyl})
        self.extreme_points = tuple(ext)
        cw = sub.coweights()
        refl = sub.reflections()
        corts = sub.simple_coroots
        faces = {}
        order = []
        for sign_key, w, J, wit in sub.vectorial_faces():
            if self._unscaled is not None:
                key = self._unscaled.key_of_sign[sign_key]
            else:
                key = self._face_key(wit, sign_key)
            # orbit of b' under the parabolic subgroup W_J, then moved by w
            orb = _orbit([refl[k] for k in J], bp)
            pts = tuple(sorted(el.add(lam, w.apply(p)) for p in orb))
            center = el.barycenter(pts)
            dirs = tuple(w.apply(corts[k]) for k in J)
            eq_forms = el.nullspace(dirs, self.n) if dirs else [el.unit(self.n, i) for i in range(self.n)]
            eqs = tuple((f, el.dot(f, center)) for f in eq_forms) if len(J) < self.n else ()
            if self.kind == AFFINE:
                gens = tuple(el.sub(mu, lam) for mu in self.apartment_adjacent(key))
            else:
                gens = tuple(w.apply(cw[k]) for k in range(sub.rank) if k not in J)
            face = PolyFace(key=key, dim=len(J), extreme_points=pts, center=center, directions=dirs,
                            equalities=eqs, fiber_generators=gens, word=w.word, J=tuple(J), witness=wit)
            faces[key] = face
            order.append(key)
        self.faces = faces
        self.order = order
        self.key_of_sign = {sk: faces_key for (sk, _, _, _), faces_key in zip(sub.vectorial_faces(), order)}
        self._build_facets()
        self._build_decompositions()

    def apartment_adjacent(self, F: FaceDescriptor) -> list[tuple]:
        """Vertices ``mu`` of the closure of ``F`` with ``[lam, mu]`` an edge."""
        A = self.apartment
        out = []
        for mu in A.face_vertices(F):
            if mu == self.lam:
                continue
            enc = A.enclosure([self.lam, mu])
            if enc.face is not None and A.face_dim(enc.face) == 1:
                out.append(mu)
        return out

    def _build_facets(self) -> None:
        by_dim: dict[int, list[PolyFace]] = {}
        for f in self.faces.values():
            by_dim.setdefault(f.dim, []).append(f)
        for F in self.faces.values():
            if F.dim == 0:
                continue
            ext = set(F.extreme_points)
            facets = []
            for G in by_dim.get(F.dim - 1, []):
                if not set(G.extreme_points) <= ext:
                    continue
                form = self._facet_form(F, G)
                off = el.dot(form, G.center)
                val = el.dot(form, F.center)
                if val == off:
                    raise ConsistencyError("facet form does not separate face center from facet")
                if val > off:
                    form = el.scale(-1, form)
                    off = -off
                facets.append((form, off))
            F.facets = tuple(facets)

    def _facet_form(self, F: PolyFace, G: PolyFace) -> tuple:
        """A linear form vanishing on dir(G) and not on dir(F)."""
        rows = list(G.directions)
        candidates = el.nullspace(rows, self.n) if rows else [el.unit(self.n, i) for i in range(self.n)]
        for c in candidates:
            if any(el.dot(c, d) != 0 for d in F.directions):
                return c
        raise ConsistencyError("facet direction is not a hyperplane of the face")

    def _build_decompositions(self) -> None:
        for F in self.faces.values():
            gens = list(F.fiber_generators)
            if len(gens) + F.dim != self.n:
                raise ConsistencyError("fiber cone and face support do not have complementary dimensions",
                                       evidence=str(F.key))
            for g in gens:
                for d in F.directions:
                    if el.inner(g, d, self.gram) != 0:
                        raise ConsistencyError("fiber generator is not orthogonal to the face support")
            basis = gens + list(F.directions)
            inv = el.inverse(el.transpose(basis)) if basis else ()
            F._decomp = (inv, len(gens))

    # ---- queries

    def __len__(self) -> int:
        return len(self.faces)

    def face(self, key) -> PolyFace:
        try:
            return self.faces[key]
        except KeyError:
            raise UsageError(f"not a face key of this polytope: {key}") from None

    @property
    def top(self) -> PolyFace:
        return next(f for f in self.faces.values() if f.dim == self.n)

    def contains(self, x: Sequence, closed: bool = True) -> bool:
        return self.top.contains(x, closed)

    def separating_facet(self, x: Sequence) -> Optional[tuple]:
        for form, off in self.top.facets:
            if el.dot(form, x) > off:
                return form, off
        return None

    def face_of_point(self, x: Sequence) -> Optional[PolyFace]:
        x = tuple(el.q(c) for c in x)
        if not self.contains(x, closed=True):
            return None
        hits = [F for F in self.faces.values() if F.contains(x, closed=False)]
        if len(hits) != 1:
            raise ConsistencyError(f"{len(hits)} open faces contain the point",
                                   evidence=el.format_vector(x))
        return hits[0]

    def face_center(self, key) -> tuple:
        return self.face(key).center

    def scaled(self, eta) -> "WeightPolytope":
        """The image under ``x -> lam + eta (x - lam)``, with the same face keys."""
        eta = el.q(eta)
        if not (0 < eta <= 1):
            raise UsageError("eta must lie in (0, 1]")
        if eta == 1:
            return self
        hit = self._scaled.get(eta)
        if hit is None:
            hit = WeightPolytope(self.kind, self.rs, self.lam, el.scale(eta, self.base_offset),
                                 self.sub.indices, self.apartment, eta=eta, unscaled=self)
            self._scaled[eta] = hit
        return hit

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "lambda": el.format_vector(self.lam),
            "base_point": el.format_vector(self.base_point),
            "eta": el.format_q(self.eta),
            "extreme_points": [el.format_vector(p) for p in self.extreme_points],
            "faces": [self.faces[k].to_json() for k in self.order],
        }


def _orbit(mats, point) -> list[tuple]:
    seen = {tuple(point)}
    stack = [tuple(point)]
    while stack:
        x = stack.pop()
        for m in mats:
            y = el.mat_vec(m, x)
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return sorted(seen)


# --------------------------------------------------------------------------
# constructors


def build_vectorial(rs: RootSystem, b: Sequence) -> WeightPolytope:
    """``conv(W.b)`` for the whole root system; face keys are sign vectors."""
    b = tuple(el.q(x) for x in b)
    if len(b) != rs.rank:
        raise UsageError(f"base point has {len(b)} coordinates, expected {rs.rank}")
    if any(el.dot(r, b) == 0 for r in rs.positive_roots):
        raise ConfigurationError("base point is not regular")
    return WeightPolytope(VECTORIAL, rs, el.zeros(rs.rank), b, range(len(rs.roots)))


def build_affine(A: Apartment, lam: Sequence) -> WeightPolytope:
    """The closed affine weight polytope at the vertex ``lam``; keys are faces at ``lam``."""
    lam = tuple(el.q(x) for x in lam)
    sub = A.local_root_system(lam)  # raises on non-vertices
    C = A.dominating_alcove(A.locate_face(lam))
    bC = A.base_point(C)
    return WeightPolytope(AFFINE, A.rs, lam, el.sub(bC, lam), sub.indices, A)


def base_point(A: Apartment, C: FaceDescriptor) -> tuple:
    return A.base_point(C)


def face_of_point(P: WeightPolytope, x: Sequence) -> Optional[PolyFace]:
    return P.face_of_point(x)


def face_center(P: WeightPolytope, key) -> tuple:
    return P.face_center(key)


class PolytopeCache:
    """Memoized affine polytopes of one apartment."""

    def __init__(self, A: Apartment):
        self.A = A
        self._polys: dict = {}

    def __call__(self, lam: Sequence) -> WeightPolytope:
        lam = tuple(el.q(x) for x in lam)
        P = self._polys.get(lam)
        if P is None:
            P = build_affine(self.A, lam)
            self._polys[lam] = P
        return P


def intersect_polytopes(A: Apartment, vertices: Sequence[Sequence],
                        polys: Optional[PolytopeCache] = None) -> Optional[PolyFace]:
    """The closed face shared by the polytopes at ``vertices``, or None when it is empty."""
    vs = [tuple(el.q(x) for x in v) for v in vertices]
    if not vs:
        raise UsageError("need at least one vertex")
    if len(set(vs)) != len(vs):
        raise UsageError("vertices must be distinct")
    for v in vs:
        if not A.is_vertex(v):
            raise UsageError(f"not a vertex: {el.format_vector(v)}")
    enc = A.enclosure(vs)
    if enc.face is None:
        return None
    polys = polys or PolytopeCache(A)
    return polys(vs[0]).face(enc.face)
