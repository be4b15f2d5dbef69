"""Deterministic SVG rendering of rank-2 arrangements and tessellations.

All geometry is exact until serialization.  The drawing basis comes from a
Cholesky factor of the Gram matrix computed in decimal arithmetic (40 digits,
round-half-even), so that the figures are metrically faithful.  Coordinates
are written with at most 12 significant digits, round-half-even; a value
whose decimal expansion terminates within that budget is written exactly.
"""

from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Context, Decimal
from typing import Optional, Sequence

from gmpy2 import mpq

from . import exactlin as el
from .apartment import Apartment, FaceDescriptor
from .errors import UsageError
from .projection import homothety
from .tessellation import Tessellation

CTX = Context(prec=40, rounding=ROUND_HALF_EVEN)
OUT = Context(prec=12, rounding=ROUND_HALF_EVEN)
SIZE = Decimal(600)
MARGIN = Decimal(10)

POLY_PALETTE = ("#8fb8de", "#f2b880", "#a8d5a2", "#d9a6d6", "#f4e285", "#9ad1d4", "#e8a0a0", "#c5c5e8")
ROOT_PALETTE = ("#4a78c2", "#4caf50", "#e57fb0", "#f0a030", "#8e6cc0", "#30a0a0", "#b05050", "#707070")


# --------------------------------------------------------------------------
# number formatting


def to_decimal(x) -> Decimal:
    if isinstance(x, Decimal):
        return x
    x = mpq(x)
    return CTX.divide(Decimal(int(x.numerator)), Decimal(int(x.denominator)))


def fmt(x) -> str:
    """12 significant digits, round-half-even, trailing zeros removed."""
    d = OUT.plus(to_decimal(x))
    if d.is_zero():
        return "0"
    d = d.normalize(OUT)
    s = format(d, "f")
    return s


# --------------------------------------------------------------------------
# geometry helpers (exact)


def cholesky_decimal(gram) -> list[list[Decimal]]:
    """Lower-triangular ``L`` with ``L L^T = gram`` in 40-digit decimals."""
    n = len(gram)
    G = [[to_decimal(v) for v in row] for row in gram]
    L = [[Decimal(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            s = G[i][j]
            for k in range(j):
                s = CTX.subtract(s, CTX.multiply(L[i][k], L[j][k]))
            if i == j:
                L[i][j] = CTX.sqrt(s)
            else:
                L[i][j] = CTX.divide(s, L[j][j])
    return L


def convex_hull(points: Sequence[Sequence]) -> list[tuple]:
    """Counter-clockwise hull (monotone chain) of planar rational points; display only."""
    pts = sorted(set(tuple(p) for p in points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def clip_line_to_box(form, level, lo, hi) -> Optional[tuple[tuple, tuple]]:
    """Exact segment of ``{form(x) = level}`` inside the box, or None."""
    a, b = form
    pts = set()
    # intersections with the four box edges
    for x in (lo[0], hi[0]):
        if b != 0:
            y = (level - a * x) / b
            if lo[1] <= y <= hi[1]:
                pts.add((x, y))
    for y in (lo[1], hi[1]):
        if a != 0:
            x = (level - b * y) / a
            if lo[0] <= x <= hi[0]:
                pts.add((x, y))
    if len(pts) < 2:
        return None
    pts = sorted(pts)
    if pts[0] == pts[-1]:
        return None
    return pts[0], pts[-1]


# --------------------------------------------------------------------------
# scenes


class Scene:
    """Maps ambient rational points to SVG user coordinates."""

    def __init__(self, A: Apartment, lo: Sequence, hi: Sequence):
        if A.n != 2:
            raise UsageError("rendering needs a rank-2 root system")
        self.A = A
        self.lo = tuple(el.q(v) for v in lo)
        self.hi = tuple(el.q(v) for v in hi)
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise UsageError("window must satisfy lo <= hi")
        self.L = cholesky_decimal(A.rs.gram)
        corners = [(self.lo[0], self.lo[1]), (self.hi[0], self.lo[1]),
                   (self.hi[0], self.hi[1]), (self.lo[0], self.hi[1])]
        self.corners = corners
        eu = [self._euclid(c) for c in corners]
        self.minx = min(e[0] for e in eu)
        self.maxx = max(e[0] for e in eu)
        self.miny = min(e[1] for e in eu)
        self.maxy = max(e[1] for e in eu)
        extent = max(self.maxx - self.minx, self.maxy - self.miny)
        self.scale = CTX.divide(SIZE, extent) if extent > 0 else Decimal(1)
        self.width = CTX.add(CTX.multiply(self.maxx - self.minx, self.scale), 2 * MARGIN)
        self.height = CTX.add(CTX.multiply(self.maxy - self.miny, self.scale), 2 * MARGIN)
        self.layers: list[str] = []

    def _euclid(self, x) -> tuple[Decimal, Decimal]:
        # e = L^T x
        d = [to_decimal(v) for v in x]
        L = self.L
        e0 = CTX.add(CTX.multiply(L[0][0], d[0]), CTX.multiply(L[1][0], d[1]))
        e1 = CTX.multiply(L[1][1], d[1])
        return e0, e1

    def screen(self, x) -> tuple[str, str]:
        e0, e1 = self._euclid(x)
        sx = CTX.add(CTX.multiply(CTX.subtract(e0, self.minx), self.scale), MARGIN)
        sy = CTX.add(CTX.multiply(CTX.subtract(self.maxy, e1), self.scale), MARGIN)
        return fmt(sx), fmt(sy)

    def points_attr(self, pts) -> str:
        return " ".join(",".join(self.screen(p)) for p in pts)

    def add(self, text: str) -> None:
        self.layers.append(text)

    def polygon(self, pts, fill: str, stroke: str = "#000000", width: str = "0.8", cls: str = "") -> None:
        hull = convex_hull(pts)
        if len(hull) < 2:
            self.point(hull[0], fill if fill != "none" else stroke)
            return
        if len(hull) == 2:
            self.segment(hull[0], hull[1], stroke=fill if fill not in ("none", "#ffffff") else stroke, width="2")
            return
        c = f' class="{cls}"' if cls else ""
        self.add(f'<polygon{c} points="{self.points_attr(hull)}" fill="{fill}" stroke="{stroke}" '
                 f'stroke-width="{width}"/>')

    def segment(self, p, q, stroke: str = "#000000", width: str = "0.6", cls: str = "") -> None:
        (x1, y1), (x2, y2) = self.screen(p), self.screen(q)
        c = f' class="{cls}"' if cls else ""
        self.add(f'<line{c} x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{stroke}" stroke-width="{width}"/>')

    def point(self, p, fill: str = "#000000", r: str = "2") -> None:
        cx, cy = self.screen(p)
        self.add(f'<circle cx="{cx}" cy="{cy}" r="{r}" fill="{fill}"/>')

    def walls(self, stroke: str = "#555555", width: str = "0.6") -> int:
        A = self.A
        count = 0
        for i, f in enumerate(A.forms):
            vals = [el.dot(f, c) for c in self.corners]
            for k in range(el.floor_q(min(vals)), -el.floor_q(-max(vals)) + 1):
                seg = clip_line_to_box(f, mpq(k), self.lo, self.hi)
                if seg is not None:
                    self.segment(seg[0], seg[1], stroke=stroke, width=width, cls=f"wall root{i}")
                    count += 1
        return count

    def svg(self, title: str) -> str:
        head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
                f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{fmt(self.width)}" '
                f'height="{fmt(self.height)}" viewBox="0 0 {fmt(self.width)} {fmt(self.height)}">\n'
                f'<title>{title}</title>\n'
                f'<defs><clipPath id="window"><polygon points="{self.points_attr(self.corners)}"/></clipPath></defs>\n'
                f'<rect x="0" y="0" width="{fmt(self.width)}" height="{fmt(self.height)}" fill="#ffffff"/>\n'
                f'<g clip-path="url(#window)">\n')
        body = "\n".join(self.layers)
        tail = (f'\n</g>\n<polygon points="{self.points_attr(self.corners)}" fill="none" stroke="#000000" '
                f'stroke-width="1"/>\n</svg>\n')
        return head + body + tail


def _window(window, n=2):
    if window is None:
        window = (-2, 2)
    lo, hi = window
    if not isinstance(lo, (tuple, list)):
        lo = (lo,) * n
    if not isinstance(hi, (tuple, list)):
        hi = (hi,) * n
    return tuple(el.q(v) for v in lo), tuple(el.q(v) for v in hi)


def _orbit_class(A: Apartment, lam) -> int:
    img, _ = A.fold(lam)
    try:
        return A.C0_vertices.index(img)
    except ValueError:  # pragma: no cover - folding always lands on a vertex of C0
        return len(A.C0_vertices)


def _tessellation(spec, base) -> Tessellation:
    if isinstance(spec, Tessellation):
        return spec
    if isinstance(spec, Apartment):
        return Tessellation(spec)
    return Tessellation.of(spec, base)


def render_arrangement(spec, window=None, mark_vertices: bool = True) -> str:
    T = _tessellation(spec, None)
    A = T.A
    lo, hi = _window(window, A.n)
    sc = Scene(A, lo, hi)
    C0 = A.C0_vertices
    if len(C0) >= 3 and lo != hi:
        sc.polygon(C0, fill="#dddddd", stroke="none", width="0")
    sc.walls()
    if mark_vertices and lo != hi:
        for lam in A.enumerate_vertices_in_window(lo, hi):
            if all(a <= c <= b for a, c, b in zip(lo, lam, hi)):
                sc.point(lam, r="1.6")
    return sc.svg(f"arrangement {A.rs.name}")


def render_tessellation(spec, base=None, window=None) -> str:
    T = _tessellation(spec, base)
    A = T.A
    lo, hi = _window(window, A.n)
    sc = Scene(A, lo, hi)
    for lam in A.enumerate_vertices_in_window(lo, hi):
        P = T.polys(lam)
        cls = _orbit_class(A, lam)
        sc.polygon(P.extreme_points, fill=POLY_PALETTE[cls % len(POLY_PALETTE)], stroke="#000000", width="0.8")
    sc.walls(stroke="#999999", width="0.4")
    return sc.svg(f"tessellation {A.rs.name} b=({','.join(el.format_vector(A.base))})")


def render_thickened(spec, base=None, eta=mpq(1, 2), window=None) -> str:
    eta = el.q(eta)
    if not (0 < eta < 1):
        raise UsageError("eta must lie in (0, 1) for the thickened figure")
    T = _tessellation(spec, base)
    A = T.A
    lo, hi = _window(window, A.n)
    sc = Scene(A, lo, hi)
    verts = A.enumerate_vertices_in_window(lo, hi)
    faces = set()
    for lam in verts:
        faces.update(A.faces_at_vertex(lam))
    # connective cells: eta*closure(F_F) + (1 - eta)*closure(F), larger faces first
    for F in sorted(faces, key=lambda G: (-A.face_dim(G), G.codes)):
        d = A.face_dim(F)
        if d == 0:
            continue
        cell = T.weight_face(F).extreme_points
        pts = [tuple(eta * p + (1 - eta) * v for p, v in zip(c, w))
               for c in cell for w in A.face_vertices(F)]
        if d == A.n:
            fill = "#ffffff"
        else:
            i = F.exact_roots()[0][0]
            fill = ROOT_PALETTE[i % len(ROOT_PALETTE)]
        sc.polygon(pts, fill=fill, stroke="#000000", width="0.4")
    # scaled polytopes
    for lam in verts:
        P = T.polys(lam)
        pts = [homothety(lam, eta, p) for p in P.extreme_points]
        cls = _orbit_class(A, lam)
        sc.polygon(pts, fill=POLY_PALETTE[cls % len(POLY_PALETTE)], stroke="#000000", width="0.8")
    return sc.svg(f"thickened {A.rs.name} eta={el.format_q(eta)} b=({','.join(el.format_vector(A.base))})")
