"""Partition queries and sample-based verification harnesses.

Every point lies in exactly one open face ``F_F`` of the family of affine
weight polytopes; and for ``0 < eta <= 1`` every point lies in exactly one
thick cell ``eta*x + (1-eta)*closure(F)``.  The harnesses below check both on
exact rational samples, recording violations instead of raising.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Optional, Sequence

from gmpy2 import mpq

from . import exactlin as el
from .apartment import Apartment, FaceDescriptor
from .errors import ConsistencyError, UsageError
from .projection import homothety, homothety_inverse, project
from .rootsys import RootSystem
from .weightpoly import PolyFace, PolytopeCache


# --------------------------------------------------------------------------
# sampling


def grid_points(lo: Sequence, hi: Sequence, count: int) -> list[tuple]:
    """``count`` evenly spaced rationals per axis, endpoints included."""
    axes = []
    for a, b in zip(lo, hi):
        a, b = el.q(a), el.q(b)
        if count == 1:
            axes.append([a])
        else:
            axes.append([a + (b - a) * k / (count - 1) for k in range(count)])
    return [tuple(p) for p in product(*axes)]


def random_points(lo: Sequence, hi: Sequence, count: int, seed: int, max_den: int = 997) -> list[tuple]:
    """Seeded rationals in the box with denominators at most ``max_den``."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        pt = []
        for a, b in zip(lo, hi):
            a, b = el.q(a), el.q(b)
            den = rng.randint(1, max_den)
            num_lo = -el.floor_q(-a * den)
            num_hi = el.floor_q(b * den)
            pt.append(mpq(rng.randint(num_lo, num_hi), den))
        out.append(tuple(pt))
    return out


def sample_plan(n: int, window=(-2, 2), grid: int = 41, rand: int = 500, seed: int = 7) -> list[tuple]:
    lo = (el.q(window[0]),) * n
    hi = (el.q(window[1]),) * n
    return grid_points(lo, hi, grid) + random_points(lo, hi, rand, seed)


# --------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class ThickCell:
    """The closed cell ``eta*anchor + (1-eta)*closure(face)``."""

    anchor: tuple
    eta: mpq
    face: FaceDescriptor
    closed_cell_vertices: tuple

    @property
    def dim(self) -> int:
        return _affine_rank(self.closed_cell_vertices)

    def bbox(self) -> tuple[tuple, tuple]:
        vs = self.closed_cell_vertices
        n = len(vs[0])
        return (tuple(min(v[k] for v in vs) for k in range(n)), tuple(max(v[k] for v in vs) for k in range(n)))

    def to_json(self) -> dict:
        return {
            "anchor": el.format_vector(self.anchor),
            "eta": el.format_q(self.eta),
            "face": self.face.to_json(),
            "closed_cell_vertices": [el.format_vector(v) for v in self.closed_cell_vertices],
        }


def _affine_rank(points) -> int:
    if len(points) <= 1:
        return 0
    return el.rank([el.sub(p, points[0]) for p in points[1:]])


@dataclass
class TessellationReport:
    samples_total: int = 0
    violations: list = field(default_factory=list)
    elapsed_ms: int = 0
    assignments: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "samples": self.samples_total,
            "violations": self.violations,
            "elapsed_ms": self.elapsed_ms,
            "checks": self.checks,
        }


# --------------------------------------------------------------------------
# the tessellation


class Tessellation:
    """Queries on the family of affine weight polytopes of one apartment."""

    def __init__(self, A: Apartment):
        self.A = A
        self.rs: RootSystem = A.rs
        self.n = A.n
        self.polys = PolytopeCache(A)

    @classmethod
    def of(cls, spec, base=None, gram_scale=1) -> "Tessellation":
        from .rootsys import build_root_system
        return cls(Apartment(build_root_system(spec, gram_scale=gram_scale), base))

    # ---- the tessellation theorem

    def weight_face(self, F: FaceDescriptor) -> PolyFace:
        """The face ``F_F`` (taken from the polytope at the first vertex of ``F``)."""
        lam = self.A.face_vertices(F)[0]
        return self.polys(lam).face(F)

    def locate_weight_face(self, x: Sequence) -> tuple[FaceDescriptor, PolyFace]:
        """The unique face ``F`` with ``x`` in the open cell ``F_F``."""
        x = tuple(el.q(c) for c in x)
        Fx = self.A.locate_face(x)
        hits = []
        for G in self.A.subfaces(Fx):
            PF = self.weight_face(G)
            if PF.contains(x, closed=False):
                hits.append((G, PF))
        if len(hits) != 1:
            raise ConsistencyError(f"{len(hits)} cells contain the point",
                                   evidence={"point": el.format_vector(x), "faces": [str(h[0]) for h in hits]})
        G, PF = hits[0]
        # second route: the vertices whose closed polytope contains x span G
        member = [lam for lam in self.A.face_vertices(Fx) if self.polys(lam).contains(x, closed=True)]
        if member != self.A.face_vertices(G):
            raise ConsistencyError("polytope membership set is not the vertex set of the cell's face",
                                   evidence={"point": el.format_vector(x), "face": str(G)})
        return G, PF

    def _check_sample(self, x: tuple) -> Optional[dict]:
        A = self.A
        Fx = A.locate_face(x)
        subs = A.subfaces(Fx)
        verts = A.face_vertices(Fx)
        member = {lam for lam in verts if self.polys(lam).contains(x, closed=True)}
        open_hits = []
        problems = []
        for G in subs:
            PF = self.weight_face(G)
            is_open = PF.contains(x, closed=False)
            if is_open:
                open_hits.append(G)
            # closure identity on this sample
            closed_cell = PF.contains(x, closed=True)
            inter = all(v in member for v in A.face_vertices(G))
            if closed_cell != inter:
                problems.append(f"closure identity fails for {G}")
            # every vertex polytope gives the same cell
            for lam in A.face_vertices(G)[1:]:
                other = self.polys(lam).face(G)
                if other.contains(x, closed=False) != is_open or other.contains(x, closed=True) != closed_cell:
                    problems.append(f"cell of {G} depends on the vertex used")
        if len(open_hits) != 1:
            problems.append(f"{len(open_hits)} cells contain the point")
        elif sorted(member) != A.face_vertices(open_hits[0]):
            problems.append("membership set differs from the vertex set")
        if problems:
            return {"point": el.format_vector(x), "faces": [str(G) for G in open_hits], "problems": problems}
        return None

    def verify_tessellation(self, samples: Sequence[Sequence]) -> TessellationReport:
        t0 = time.perf_counter()
        rep = TessellationReport()
        for x in samples:
            x = tuple(el.q(c) for c in x)
            rep.samples_total += 1
            try:
                v = self._check_sample(x)
            except ConsistencyError as exc:
                v = {"point": el.format_vector(x), "faces": [], "problems": [str(exc)]}
            if v is not None:
                rep.violations.append(v)
                rep.assignments.append(None)
            else:
                rep.assignments.append(self.locate_weight_face(x)[0])
        rep.elapsed_ms = int(1000 * (time.perf_counter() - t0))
        return rep

    # ---- thick cells

    def cell_vertices(self, anchor: Sequence, face: FaceDescriptor, eta) -> tuple:
        """``{lam + eta (anchor - lam) : lam in vert(face)}``; any ``0 <= eta <= 1``."""
        eta = el.q(eta)
        return tuple(sorted({homothety(lam, eta, anchor) for lam in self.A.face_vertices(face)}))

    def thick_cell(self, x: Sequence, eta) -> ThickCell:
        eta = _check_eta(eta)
        x = tuple(el.q(c) for c in x)
        F, _ = self.locate_weight_face(x)
        return ThickCell(x, eta, F, self.cell_vertices(x, F, eta))

    def in_cell(self, cell: ThickCell, y: Sequence) -> bool:
        """Exact membership in ``eta*anchor + (1-eta)*closure(face)``."""
        y = tuple(el.q(c) for c in y)
        if cell.eta == 1:
            return y == cell.anchor
        z = tuple((c - cell.eta * a) / (1 - cell.eta) for c, a in zip(y, cell.anchor))
        return self.A.contains(cell.face, z, closed=True)

    def _anchor_from_alcove(self, y: tuple, eta: mpq, C: FaceDescriptor) -> tuple[tuple, list]:
        verts = self.A.face_vertices(C)
        data = []
        for lam in verts:
            p = project(self.polys(lam).scaled(eta), y, certify=False).point
            f = homothety_inverse(lam, eta, p)
            J = [nu for nu in verts if self.polys(nu).contains(f, closed=True)]
            data.append((lam, f, J))
        N = min(len(J) for _, _, J in data)
        chosen = [(lam, f) for lam, f, J in data if len(J) == N]
        anchors = {f for _, f in chosen}
        if len(anchors) != 1:
            raise ConsistencyError("anchors recovered from different vertices disagree",
                                   evidence={"point": el.format_vector(y)})
        return anchors.pop(), sorted(lam for lam, _ in chosen)

    def locate_thick(self, y: Sequence, eta, debug: bool = False) -> ThickCell:
        """The unique thick cell containing ``y``."""
        eta = _check_eta(eta)
        y = tuple(el.q(c) for c in y)
        A = self.A
        C = A.dominating_alcove_of_point(y)
        f, J = self._anchor_from_alcove(y, eta, C)
        if debug and not A.locate_face(y).is_alcove:
            neg = el.scale(-1, A.rho)
            C2 = A.locate_face(el.add(y, el.scale(A.step_size(y, neg), neg)))
            f2, _ = self._anchor_from_alcove(y, eta, C2)
            if f2 != f:
                raise ConsistencyError("anchor depends on the alcove chosen at a wall point",
                                       evidence={"point": el.format_vector(y)})
        cell = self.thick_cell(f, eta)
        if J != self.A.face_vertices(cell.face):
            raise ConsistencyError("minimal membership set is not the vertex set of the anchor's face",
                                   evidence={"point": el.format_vector(y)})
        if not self.in_cell(cell, y):
            raise ConsistencyError("point is not in the cell of its anchor",
                                   evidence={"point": el.format_vector(y)})
        return cell

    def cells_intersect(self, c1: ThickCell, c2: ThickCell) -> bool:
        if len(c1.closed_cell_vertices) == 1:
            return self.in_cell(c2, c1.closed_cell_vertices[0])
        if len(c2.closed_cell_vertices) == 1:
            return self.in_cell(c1, c2.closed_cell_vertices[0])
        return el.hulls_intersect(c1.closed_cell_vertices, c2.closed_cell_vertices) is not None

    def verify_thickened(self, samples: Sequence[Sequence], eta, seed: int = 7,
                         roundtrips: bool = True) -> TessellationReport:
        eta = _check_eta(eta)
        rng = random.Random(seed)
        t0 = time.perf_counter()
        rep = TessellationReport()
        cells: dict[tuple, ThickCell] = {}
        checks = {"located": 0, "roundtrips": 0, "pairs_checked": 0, "interior_split": 0, "consistency": 0}
        for y in samples:
            y = tuple(el.q(c) for c in y)
            rep.samples_total += 1
            try:
                cell = self.locate_thick(y, eta, debug=True)
            except ConsistencyError as exc:
                rep.violations.append({"point": el.format_vector(y), "faces": [], "problems": [str(exc)]})
                rep.assignments.append(None)
                continue
            checks["located"] += 1
            rep.assignments.append(cell.anchor)
            cells.setdefault(cell.anchor, cell)
            problems = []
            # anchor consistency: each vertex projection is the homothety image of the anchor
            for lam in self.A.face_vertices(cell.face):
                p = project(self.polys(lam).scaled(eta), y, certify=False).point
                if p != homothety(lam, eta, cell.anchor):
                    problems.append("vertex projection is not the image of the anchor")
            checks["consistency"] += 1
            # interior or connective split
            Fy = self.A.locate_face(y)
            inside = [lam for lam in self.A.face_vertices(Fy)
                      if self.polys(lam).contains(homothety_inverse(lam, eta, y), closed=False)]
            vertex_anchor = self.A.face_dim(cell.face) == 0
            if bool(inside) != vertex_anchor or (vertex_anchor and inside != self.A.face_vertices(cell.face)):
                problems.append("interior/connective split disagrees with the anchor's face")
            checks["interior_split"] += 1
            if problems:
                rep.violations.append({"point": el.format_vector(y),
                                       "faces": [str(cell.face)], "problems": problems})
        # roundtrip on sampled points of each distinct cell
        if roundtrips:
            for anchor in sorted(cells):
                cell = cells[anchor]
                vs = cell.closed_cell_vertices
                pts = [vs[rng.randrange(len(vs))]]
                if len(vs) > 1:
                    w = [mpq(rng.randint(1, 97)) for _ in vs]
                    s = sum(w)
                    pts.append(el.lincomb([c / s for c in w], vs))
                for p in pts:
                    try:
                        got = self.locate_thick(p, eta).anchor
                    except ConsistencyError as exc:
                        got = str(exc)
                    checks["roundtrips"] += 1
                    if got != anchor:
                        rep.violations.append({"point": el.format_vector(p), "faces": [str(cell.face)],
                                               "problems": ["roundtrip recovered a different anchor"]})
        # pairwise disjointness of distinct cells with overlapping bounding boxes
        for c1, c2 in _overlapping_pairs(list(cells.values())):
            checks["pairs_checked"] += 1
            if self.cells_intersect(c1, c2):
                rep.violations.append({"point": el.format_vector(c1.anchor),
                                       "faces": [str(c1.face), str(c2.face)],
                                       "problems": ["two distinct closed cells intersect"]})
        rep.checks = checks
        rep.elapsed_ms = int(1000 * (time.perf_counter() - t0))
        return rep


def _check_eta(eta) -> mpq:
    eta = el.q(eta)
    if not (0 < eta <= 1):
        raise UsageError("eta must lie in (0, 1]")
    return eta


def _overlapping_pairs(cells: list[ThickCell]):
    """Pairs of cells whose closed bounding boxes meet (sweep along the first axis)."""
    boxes = sorted(((c.bbox(), i) for i, c in enumerate(cells)), key=lambda t: t[0][0][0])
    active: list = []
    for (lo, hi), i in boxes:
        active = [(l2, h2, j) for (l2, h2, j) in active if h2[0] >= lo[0]]
        for l2, h2, j in active:
            if all(l2[k] <= hi[k] and lo[k] <= h2[k] for k in range(len(lo))):
                yield cells[j], cells[i]
        active.append((lo, hi, i))


# --------------------------------------------------------------------------
# module-level conveniences


def locate_weight_face(T: Tessellation, x: Sequence):
    return T.locate_weight_face(x)


def verify_tessellation(spec, window=(-2, 2), grid: int = 41, rand: int = 500, seed: int = 7,
                        base=None, gram_scale=1) -> TessellationReport:
    T = Tessellation.of(spec, base, gram_scale)
    return T.verify_tessellation(sample_plan(T.n, window, grid, rand, seed))


def thick_cell(T: Tessellation, x: Sequence, eta) -> ThickCell:
    return T.thick_cell(x, eta)


def locate_thick(T: Tessellation, y: Sequence, eta) -> ThickCell:
    return T.locate_thick(y, eta)


def verify_thickened(spec, window=(-2, 2), eta=mpq(1, 2), grid: int = 41, rand: int = 500, seed: int = 7,
                     base=None, gram_scale=1) -> TessellationReport:
    T = Tessellation.of(spec, base, gram_scale)
    return T.verify_thickened(sample_plan(T.n, window, grid, rand, seed), eta, seed)
