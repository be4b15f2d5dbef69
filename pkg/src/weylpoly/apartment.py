"""The affine apartment: walls, faces, vertices, alcoves and the affine Weyl group.

A face is encoded by one integer code per positive root: ``2n`` means the
root is constantly ``n`` on the face, ``2n+1`` means it takes values in the
open interval ``]n, n+1[``.  Two faces are equal iff their codes are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

from . import exactlin as el
from .errors import ConfigurationError, ConsistencyError, UsageError
from .rootsys import RootSubsystem, RootSystem, reflection_matrix


# --------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class FaceDescriptor:
    """Per positive root: ``2n`` for Exact(n), ``2n+1`` for Between(n)."""

    codes: tuple

    def is_exact(self, i: int) -> bool:
        return self.codes[i] % 2 == 0

    def level(self, i: int) -> int:
        """The integer ``n`` of Exact(n) or Between(n)."""
        return self.codes[i] // 2

    @property
    def is_alcove(self) -> bool:
        return all(c % 2 == 1 for c in self.codes)

    def exact_roots(self) -> list[tuple[int, int]]:
        return [(i, c // 2) for i, c in enumerate(self.codes) if c % 2 == 0]

    def between_roots(self) -> list[tuple[int, int]]:
        return [(i, c // 2) for i, c in enumerate(self.codes) if c % 2 == 1]

    def contains_value(self, i: int, v, closed: bool = False) -> bool:
        c = self.codes[i]
        n = c // 2
        if c % 2 == 0:
            return v == n
        if closed:
            return n <= v <= n + 1
        return n < v < n + 1

    def to_json(self) -> dict:
        return {"exact": [[i, n] for i, n in self.exact_roots()],
                "between": [[i, n] for i, n in self.between_roots()]}

    @classmethod
    def from_json(cls, data: dict, npos: int) -> "FaceDescriptor":
        codes: list = [None] * npos
        for i, n in data.get("exact", []):
            codes[int(i)] = 2 * int(n)
        for i, n in data.get("between", []):
            codes[int(i)] = 2 * int(n) + 1
        if any(c is None for c in codes):
            raise UsageError("face descriptor does not cover every positive root")
        return cls(tuple(codes))

    @classmethod
    def from_pairs(cls, exact: Iterable = (), between: Iterable = (), npos: Optional[int] = None):
        return cls.from_json({"exact": list(exact), "between": list(between)}, npos)

    def __str__(self) -> str:
        parts = []
        for i, c in enumerate(self.codes):
            n = c // 2
            parts.append(f"a{i}={n}" if c % 2 == 0 else f"{n}<a{i}<{n + 1}")
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class AffineRoot:
    """The affine function ``x -> a(x) + level`` for a root ``a``."""

    root_index: int
    level: int


@dataclass(frozen=True)
class AffineIsometry:
    """``x -> linear @ x + translation``; optionally the word of wall reflections."""

    linear: tuple
    translation: tuple
    word: tuple = ()

    @classmethod
    def identity(cls, n: int) -> "AffineIsometry":
        return cls(el.identity(n), el.zeros(n), ())

    @classmethod
    def wall_reflection(cls, form, coroot, level: int, root_index: Optional[int] = None) -> "AffineIsometry":
        """Orthogonal reflection in ``{x : form(x) = level}``."""
        lin = reflection_matrix(form, coroot)
        return cls(lin, el.scale(mpq(level), coroot), ((root_index, level),))

    @classmethod
    def translation_by(cls, v) -> "AffineIsometry":
        n = len(v)
        return cls(el.identity(n), tuple(mpq(x) for x in v), ())

    def apply(self, x: Sequence) -> tuple:
        return el.add(el.mat_vec(self.linear, x), self.translation)

    def compose(self, other: "AffineIsometry") -> "AffineIsometry":
        """``self o other``."""
        lin = el.mat_mul(self.linear, other.linear)
        tr = el.add(el.mat_vec(self.linear, other.translation), self.translation)
        return AffineIsometry(lin, tr, self.word + other.word)

    def inverse(self) -> "AffineIsometry":
        inv = el.inverse(self.linear)
        return AffineIsometry(inv, el.scale(-1, el.mat_vec(inv, self.translation)), tuple(reversed(self.word)))

    def key(self) -> tuple:
        return (self.linear, self.translation)


@dataclass(frozen=True)
class Star:
    """Open star of a face: ``lo_i < a_i(x) < hi_i`` for every positive root ``i``."""

    face: FaceDescriptor
    strips: tuple  # (root index, lo, hi), open bounds

    def contains(self, x: Sequence, forms: Sequence) -> bool:
        for i, lo, hi in self.strips:
            v = el.dot(forms[i], x)
            if not (lo < v < hi):
                return False
        return True

    def contains_closed(self, x: Sequence, forms: Sequence) -> bool:
        for i, lo, hi in self.strips:
            v = el.dot(forms[i], x)
            if not (lo <= v <= hi):
                return False
        return True

    def halfspaces(self) -> list[tuple[int, int, int]]:
        return list(self.strips)


@dataclass(frozen=True)
class Enclosure:
    """Result of :func:`Apartment.enclosure`.

    ``halfspaces`` lists ``(root index, lo, hi)`` meaning ``lo <= a(x) <= hi``;
    ``face`` is the minimal face whose closure is this set, when there is one.
    """

    face: Optional[FaceDescriptor]
    halfspaces: tuple


# --------------------------------------------------------------------------
# the apartment


class Apartment:
    """The apartment of a root system together with a base point in the fundamental alcove."""

    def __init__(self, rs: RootSystem, base: Optional[Sequence] = None):
        self.rs = rs
        self.n = rs.rank
        self.npos = rs.npos
        self.forms = rs.positive_roots
        self.coforms = rs.positive_coroots
        self.rho = rs.rho_coweight()
        self._rho_values = tuple(el.dot(f, self.rho) for f in self.forms)
        self.bases = self._independent_bases()
        self._vert_cache: dict = {}
        self._base_cache: dict = {}
        self._gallery_cache: dict = {}
        self._local_cache: dict = {}
        self.C0 = FaceDescriptor((1,) * self.npos)
        self.C0_vertices = self.face_vertices(self.C0)
        if base is None:
            base = el.barycenter(self.C0_vertices)
        b = tuple(el.q(x) for x in base)
        if len(b) != self.n:
            raise UsageError(f"base point has {len(b)} coordinates, expected {self.n}")
        if any(el.is_integral(el.dot(f, b)) for f in self.forms):
            raise ConfigurationError("base point is not regular: it lies on a wall")
        if self.locate_face(b) != self.C0:
            raise ConfigurationError("base point is not in the fundamental alcove")
        self.base = b

    # ---- helpers

    def _independent_bases(self):
        out = []
        for idx in combinations(range(self.npos), self.n):
            M = [self.forms[i] for i in idx]
            if el.rank(M) == self.n:
                out.append((idx, el.inverse(M)))
        return out

    def values(self, x: Sequence) -> tuple:
        return tuple(el.dot(f, x) for f in self.forms)

    # ---- faces

    def locate_face(self, x: Sequence) -> FaceDescriptor:
        codes = []
        for f in self.forms:
            v = el.dot(f, x)
            if v.denominator == 1:
                codes.append(2 * int(v))
            else:
                codes.append(2 * el.floor_q(v) + 1)
        return FaceDescriptor(tuple(codes))

    def contains(self, F: FaceDescriptor, x: Sequence, closed: bool = False) -> bool:
        return all(F.contains_value(i, el.dot(f, x), closed) for i, f in enumerate(self.forms))

    def face_dim(self, F: FaceDescriptor) -> int:
        ex = [self.forms[i] for i, _ in F.exact_roots()]
        return self.n - (el.rank(ex) if ex else 0)

    def is_vertex(self, x: Sequence) -> bool:
        integral = [f for f in self.forms if el.is_integral(el.dot(f, x))]
        return bool(integral) and el.rank(integral) == self.n

    def fundamental_alcove(self) -> FaceDescriptor:
        return self.C0

    def face_vertices(self, F: FaceDescriptor) -> list[tuple]:
        """All vertices of the apartment in the closure of ``F``, sorted."""
        hit = self._vert_cache.get(F)
        if hit is not None:
            return list(hit)
        found = set()
        codes = F.codes
        for idx, inv in self.bases:
            choices = []
            for i in idx:
                n = codes[i] // 2
                choices.append((n,) if codes[i] % 2 == 0 else (n, n + 1))
            for vals in product(*choices):
                x = el.mat_vec(inv, [mpq(v) for v in vals])
                if x in found:
                    continue
                if self.contains(F, x, closed=True):
                    found.add(x)
        out = sorted(found)
        self._vert_cache[F] = tuple(out)
        return out

    def is_realizable(self, F: FaceDescriptor) -> bool:
        if len(F.codes) != self.npos:
            return False
        verts = self.face_vertices(F)
        return bool(verts) and self.locate_face(el.barycenter(verts)) == F

    def check_face(self, F: FaceDescriptor) -> FaceDescriptor:
        if not self.is_realizable(F):
            raise UsageError(f"face descriptor is not realizable: {F}")
        return F

    def face_barycenter(self, F: FaceDescriptor) -> tuple:
        return el.barycenter(self.face_vertices(F))

    def dominates(self, G: FaceDescriptor, F: FaceDescriptor) -> bool:
        """True when ``F`` lies in the closure of ``G``."""
        for i, (cg, cf) in enumerate(zip(G.codes, F.codes)):
            if cg % 2 == 0:
                if cf != cg:
                    return False
            else:
                if cf % 2 == 1:
                    if cf != cg:
                        return False
                else:
                    n = cg // 2
                    if cf // 2 not in (n, n + 1):
                        return False
        return True

    def subfaces(self, F: FaceDescriptor) -> list[FaceDescriptor]:
        """All faces in the closure of ``F`` (including ``F``), largest first."""
        verts = self.face_vertices(F)
        seen = {}
        for r in range(1, len(verts) + 1):
            for sub in combinations(verts, r):
                G = self.locate_face(el.barycenter(sub))
                if G not in seen and self.dominates(F, G):
                    seen[G] = None
        return sorted(seen, key=lambda G: (-self.face_dim(G), G.codes))

    # ---- stepping off a point (germs)

    def step_face(self, x: Sequence, direction: Sequence) -> FaceDescriptor:
        """The face containing ``x + t*direction`` for all small ``t > 0``."""
        eps = self.step_size(x, direction)
        return self.locate_face(el.add(x, el.scale(eps, direction)))

    def step_size(self, x: Sequence, direction: Sequence) -> mpq:
        eps = mpq(1)
        for f in self.forms:
            s = el.dot(f, direction)
            if s == 0:
                continue
            v = el.dot(f, x)
            if v.denominator == 1:
                gap = mpq(1)
            else:
                fl = el.floor_q(v)
                gap = (fl + 1 - v) if s > 0 else (v - fl)
            eps = min(eps, gap / (2 * abs(s)))
        return eps

    def dominating_alcove(self, F: FaceDescriptor) -> FaceDescriptor:
        """An alcove whose closure contains ``F`` (the one met by stepping along rho)."""
        if F.is_alcove:
            return F
        C = self.step_face(self.face_barycenter(F), self.rho)
        if not C.is_alcove:
            raise ConsistencyError("stepping along rho did not reach an alcove", evidence=str(F))
        return C

    def dominating_alcove_of_point(self, x: Sequence) -> FaceDescriptor:
        F = self.locate_face(x)
        if F.is_alcove:
            return F
        return self.locate_face(el.add(x, el.scale(self.step_size(x, self.rho), self.rho)))

    # ---- walls

    def is_wall_of(self, C: FaceDescriptor, i: int, k: int) -> bool:
        """Is ``{a_i = k}`` a wall of the closed face ``C`` (spans a facet of it)?"""
        f = self.forms[i]
        on = [v for v in self.face_vertices(C) if el.dot(f, v) == k]
        if len(on) < self.n:
            return False
        diffs = [el.sub(v, on[0]) for v in on[1:]]
        return el.rank(diffs) == self.n - 1

    def walls(self, C: FaceDescriptor) -> list[AffineRoot]:
        """Walls of an alcove, as (root index, level) with the wall ``a_i = level``."""
        out = []
        for i, n in C.between_roots():
            for k in (n, n + 1):
                if self.is_wall_of(C, i, k):
                    out.append(AffineRoot(i, k))
        return out

    def wall_reflection(self, i: int, k: int) -> AffineIsometry:
        return AffineIsometry.wall_reflection(self.forms[i], self.coforms[i], k, i)

    # ---- affine Weyl group

    def gallery_word(self, C: FaceDescriptor) -> AffineIsometry:
        """The unique affine Weyl element mapping the fundamental alcove onto ``C``."""
        if not C.is_alcove:
            raise UsageError("gallery_word needs an alcove")
        hit = self._gallery_cache.get(C)
        if hit is not None:
            return hit
        self.check_face(C)
        steps = []
        D = C
        x = self.face_barycenter(C)
        limit = 10000
        while D != self.C0:
            choice = None
            for i, n in D.between_roots():
                if n >= 1:
                    k = n
                elif n <= -1:
                    k = n + 1
                else:
                    continue
                if self.is_wall_of(D, i, k):
                    choice = (i, k)
                    break
            if choice is None:
                raise ConsistencyError("no separating wall found on the way to the fundamental alcove",
                                       evidence=str(D))
            r = self.wall_reflection(*choice)
            steps.append(r)
            x = r.apply(x)
            D = self.locate_face(x)
            if not D.is_alcove:
                raise ConsistencyError("wall reflection did not map an alcove to an alcove")
            limit -= 1
            if limit == 0:
                raise ConsistencyError("gallery walk did not terminate")
        w = AffineIsometry.identity(self.n)
        for r in steps:
            w = w.compose(r)
        self._gallery_cache[C] = w
        return w

    def fold(self, x: Sequence) -> tuple[tuple, AffineIsometry]:
        """Image of ``x`` in the closed fundamental alcove and the element ``w`` with w(image) = x."""
        C = self.dominating_alcove_of_point(x)
        w = self.gallery_word(C)
        return w.inverse().apply(x), w

    def fixator_generators(self, F: FaceDescriptor) -> list[AffineIsometry]:
        """Reflections in the walls of a dominating alcove that contain ``F``."""
        C = self.dominating_alcove(F)
        out = []
        for wall in self.walls(C):
            c = F.codes[wall.root_index]
            if c % 2 == 0 and c // 2 == wall.level:
                out.append(self.wall_reflection(wall.root_index, wall.level))
        return out

    def base_point(self, C: FaceDescriptor) -> tuple:
        """``w.b`` where ``w`` maps the fundamental alcove onto ``C``."""
        hit = self._base_cache.get(C)
        if hit is not None:
            return hit
        b = self.gallery_word(C).apply(self.base)
        if self.locate_face(b) != C:
            raise ConsistencyError("base point image does not lie in its alcove", evidence=str(C))
        self._base_cache[C] = b
        return b

    # ---- enclosure and star

    def enclosure(self, points: Sequence[Sequence]) -> Enclosure:
        if not points:
            raise UsageError("enclosure of an empty set")
        pts = [tuple(el.q(c) for c in p) for p in points]
        codes = []
        spaces = []
        fits = True
        for i, f in enumerate(self.forms):
            vals = [el.dot(f, p) for p in pts]
            lo, hi = min(vals), max(vals)
            flo = el.floor_q(lo)
            chi = -el.floor_q(-hi)
            spaces.append((i, flo, chi))
            if lo == hi and lo.denominator == 1:
                codes.append(2 * int(lo))
            elif hi <= flo + 1:
                codes.append(2 * flo + 1)
            else:
                fits = False
        face = FaceDescriptor(tuple(codes)) if fits else None
        if face is not None and self.locate_face(el.barycenter(pts)) != face:
            raise ConsistencyError("enclosure descriptor disagrees with the barycenter")
        return Enclosure(face, tuple(spaces))

    def star(self, F: FaceDescriptor) -> Star:
        strips = []
        for i, c in enumerate(F.codes):
            n = c // 2
            if c % 2 == 0:
                strips.append((i, n - 1, n + 1))
            else:
                strips.append((i, n, n + 1))
        return Star(F, tuple(strips))

    def in_star(self, F: FaceDescriptor, x: Sequence) -> bool:
        return self.star(F).contains(x, self.forms)

    def vertex_star(self, lam: Sequence) -> Star:
        return self.star(self.locate_face(lam))

    def enumerate_vertices_in_window(self, lo: Sequence, hi: Sequence) -> list[tuple]:
        """Vertices whose closed star meets the box ``[lo, hi]``, sorted."""
        lo = tuple(el.q(x) for x in lo)
        hi = tuple(el.q(x) for x in hi)
        if len(lo) != self.n or len(hi) != self.n or any(a > b for a, b in zip(lo, hi)):
            raise UsageError("window must satisfy lo <= hi componentwise")
        ranges = []
        for f in self.forms:
            mn = sum((c * (lo[k] if c > 0 else hi[k]) for k, c in enumerate(f)), el.ZERO)
            mx = sum((c * (hi[k] if c > 0 else lo[k]) for k, c in enumerate(f)), el.ZERO)
            ranges.append((el.floor_q(mn) - 1, -el.floor_q(-mx) + 1, mn, mx))
        found = set()
        out = []
        for idx, inv in self.bases:
            spans = [range(ranges[i][0], ranges[i][1] + 1) for i in idx]
            for vals in product(*spans):
                x = el.mat_vec(inv, [mpq(v) for v in vals])
                if x in found:
                    continue
                found.add(x)
                if self._closed_star_meets_box(x, lo, hi, ranges):
                    out.append(x)
        return sorted(out)

    def _closed_star_meets_box(self, lam, lo, hi, ranges) -> bool:
        vals = self.values(lam)
        A, b = [], []
        for (f, v, (_, _, mn, mx)) in zip(self.forms, vals, ranges):
            if v.denominator == 1:
                a_lo, a_hi = v - 1, v + 1
            else:
                fl = el.floor_q(v)
                a_lo, a_hi = mpq(fl), mpq(fl + 1)
            if a_hi < mn or a_lo > mx:
                return False
            A.append(f)
            b.append(a_hi)
            A.append(el.scale(-1, f))
            b.append(-a_lo)
        if all(l <= c <= h for l, c, h in zip(lo, lam, hi)):
            return True
        return el.polyhedron_point(A, b, lo, hi) is not None

    # ---- local root systems and the vertex cone bijection

    def local_root_system(self, lam: Sequence) -> RootSubsystem:
        lam = tuple(el.q(x) for x in lam)
        hit = self._local_cache.get(lam)
        if hit is not None:
            return hit
        if not self.is_vertex(lam):
            raise UsageError(f"not a vertex: {el.format_vector(lam)}")
        idx = [i for i, r in enumerate(self.rs.roots) if el.is_integral(el.dot(r, lam))]
        sub = RootSubsystem(self.rs, idx, self.rho)
        self._local_cache[lam] = sub
        return sub

    def vertex_cone_face(self, lam: Sequence, F: FaceDescriptor) -> tuple:
        """Sign vector of the cone ``R_{>0}(F - lam)`` over the positive roots integral at ``lam``."""
        lam = tuple(el.q(x) for x in lam)
        if not self.is_vertex(lam):
            raise UsageError(f"not a vertex: {el.format_vector(lam)}")
        key = []
        for i, f in enumerate(self.forms):
            v = el.dot(f, lam)
            c = F.codes[i]
            if v.denominator == 1:
                m = int(v)
                if c == 2 * m:
                    key.append(0)
                elif c == 2 * m + 1:
                    key.append(1)
                elif c == 2 * m - 1:
                    key.append(-1)
                else:
                    raise UsageError("the face does not dominate the vertex")
            elif c != 2 * el.floor_q(v) + 1:
                raise UsageError("the face does not dominate the vertex")
        return tuple(key)

    def cone_face_to_face(self, lam: Sequence, key: tuple) -> FaceDescriptor:
        """Inverse of :meth:`vertex_cone_face`: step from ``lam`` into the cone."""
        sub = self.local_root_system(lam)
        for k, w, J, wit in sub.vectorial_faces():
            if k == key:
                return self.step_face(tuple(el.q(x) for x in lam), wit)
        raise UsageError(f"not a vectorial face at this vertex: {key!r}")

    def faces_at_vertex(self, lam: Sequence) -> list[FaceDescriptor]:
        """All faces whose closure contains ``lam``."""
        lam = tuple(el.q(x) for x in lam)
        sub = self.local_root_system(lam)
        return [self.step_face(lam, wit) for _, _, _, wit in sub.vectorial_faces()]
