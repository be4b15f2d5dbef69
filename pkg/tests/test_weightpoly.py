from __future__ import annotations

from itertools import combinations

import pytest
from gmpy2 import mpq

from conftest import tess
from helpers import rand_points
from weylpoly import exactlin as el
from weylpoly.apartment import Apartment
from weylpoly.errors import ConfigurationError, UsageError
from weylpoly.rootsys import build_root_system
from weylpoly.weightpoly import build_affine, build_vectorial, intersect_polytopes


def dims(P):
    out = {}
    for f in P.faces.values():
        out[f.dim] = out.get(f.dim, 0) + 1
    return out


def test_base_point_examples():
    A = Apartment(build_root_system("A1"), (mpq(1, 4),))
    assert A.base_point(A.C0) == (mpq(1, 4),)
    assert A.base_point(A.locate_face((mpq(3, 4),))) == (mpq(3, 4),)
    with pytest.raises(ConfigurationError):
        Apartment(build_root_system("A1"), (mpq(1, 2),))
    with pytest.raises(ConfigurationError):
        Apartment(build_root_system("A1"), (mpq(3, 4),))


def test_base_points_lie_in_their_alcoves(rank2):
    A = rank2.A
    for x in rand_points(2, 20, 17, -3, 3):
        C = A.dominating_alcove_of_point(x)
        assert A.locate_face(A.base_point(C)) == C


def test_vectorial_examples():
    hexagon = build_vectorial(build_root_system("A2"), (mpq(1, 3), mpq(1, 5)))
    assert len(hexagon.extreme_points) == 6
    assert dims(hexagon) == {0: 6, 1: 6, 2: 1}
    seg = build_vectorial(build_root_system("A1"), (mpq(1, 4),))
    assert seg.extreme_points == ((mpq(-1, 4),), (mpq(1, 4),))
    assert dims(seg) == {0: 2, 1: 1}
    assert len(build_vectorial(build_root_system("G2"), (mpq(1, 3), mpq(1, 7))).extreme_points) == 12
    with pytest.raises(ConfigurationError):
        build_vectorial(build_root_system("A2"), (1, 2))  # 2x - y = 0


@pytest.mark.parametrize("name,facets", [("A2", 6), ("B2", 8), ("G2", 12), ("A1xA1", 4)])
def test_vectorial_facet_counts(name, facets):
    rs = build_root_system(name)
    P = build_vectorial(rs, (mpq(2, 7), mpq(1, 9)))
    assert dims(P)[1] == facets
    assert len(P.top.facets) == facets


def test_affine_examples():
    A = Apartment(build_root_system("A1"), (mpq(1, 4),))
    P = build_affine(A, (0,))
    assert P.extreme_points == ((mpq(-1, 4),), (mpq(1, 4),))
    A2 = tess("A2").A
    assert len(build_affine(A2, (0, 0)).extreme_points) == 6
    B2 = tess("B2").A
    for v in B2.C0_vertices:
        P = build_affine(B2, v)
        expected = len(B2.local_root_system(v).weyl_group_elements())
        assert len(P.extreme_points) == expected
    assert sorted(len(build_affine(B2, v).extreme_points) for v in B2.C0_vertices) == [4, 8, 8]
    with pytest.raises(UsageError):
        build_affine(A2, (mpq(1, 3), mpq(1, 3)))


def _polys(T):
    A = T.A
    verts = list(A.C0_vertices) + A.face_vertices(A.locate_face((mpq(-4, 3), mpq(7, 11))))
    return [T.polys(v) for v in dict.fromkeys(verts)]


def test_faces_are_exposed_by_witness(rank2):
    # oracle: the face keyed by F is the set of extreme points maximizing <. | d> for d in F - lam
    A = rank2.A
    for P in _polys(rank2):
        for key, F in P.faces.items():
            d = el.sub(A.face_barycenter(key), P.lam)
            vals = [A.rs.inner(p, d) for p in P.extreme_points]
            top = max(vals)
            assert F.extreme_points == tuple(sorted(p for p, v in zip(P.extreme_points, vals) if v == top))


def test_vectorial_faces_are_exposed_by_witness():
    for name in ("A2", "B2", "G2"):
        rs = build_root_system(name)
        P = build_vectorial(rs, (mpq(3, 10), mpq(1, 8)))
        for F in P.faces.values():
            vals = [rs.inner(p, F.witness) for p in P.extreme_points]
            top = max(vals)
            assert F.extreme_points == tuple(sorted(p for p, v in zip(P.extreme_points, vals) if v == top))


def test_lattice_structure(rank2):
    A = rank2.A
    for P in _polys(rank2):
        keys = list(P.faces)
        assert len({P.faces[k].extreme_points for k in keys}) == len(keys)
        assert set(keys) == set(A.faces_at_vertex(P.lam))
        for k in keys:
            F = P.faces[k]
            # codimension identity, both sides by exact rank
            dirs = [el.sub(p, F.extreme_points[0]) for p in F.extreme_points[1:]]
            assert (el.rank(dirs) if dirs else 0) + A.face_dim(k) == A.n == F.dim + A.face_dim(k)
            # extreme points of the face = global extreme points in the closed face
            assert F.extreme_points == tuple(p for p in P.extreme_points if F.contains(p))
            # face center lies in the arrangement face
            assert A.contains(k, F.center)
        for k1, k2 in combinations(keys, 2):
            e1, e2 = set(P.faces[k1].extreme_points), set(P.faces[k2].extreme_points)
            if A.dominates(k2, k1):
                assert e2 < e1
            elif A.dominates(k1, k2):
                assert e1 < e2
            else:
                assert not (e1 <= e2) and not (e2 <= e1)


def test_membership_matches_hull_oracle(rank2):
    for P in _polys(rank2)[:3]:
        lo = [min(p[i] for p in P.extreme_points) - mpq(1, 4) for i in range(2)]
        hi = [max(p[i] for p in P.extreme_points) + mpq(1, 4) for i in range(2)]
        pts = [tuple(lo[i] + (hi[i] - lo[i]) * t for i, t in enumerate(u))
               for u in rand_points(2, 150, 31, 0, 1)]
        pts += list(P.extreme_points) + [el.barycenter(f.extreme_points) for f in P.faces.values()]
        for x in pts:
            inside = el.in_convex_hull(x, list(P.extreme_points)) is not None
            assert P.contains(x) == inside
            F = P.face_of_point(x)
            if inside:
                assert F is not None and F.contains(x, closed=False)
            else:
                assert F is None
                form, off = P.separating_facet(x)
                assert el.dot(form, x) > off
                assert all(el.dot(form, p) <= off for p in P.extreme_points)


def test_face_of_point_examples():
    A = Apartment(build_root_system("A1"), (mpq(1, 4),))
    P = build_affine(A, (0,))
    assert P.face_of_point((0,)).dim == 1
    assert P.face_of_point((mpq(1, 4),)).extreme_points == ((mpq(1, 4),),)
    assert P.face_of_point((mpq(1, 3),)) is None


def test_positivity_on_vectorial_faces():
    for name in ("A2", "B2", "G2"):
        rs = build_root_system(name)
        P = build_vectorial(rs, (mpq(1, 3), mpq(1, 5)))
        for key, F in P.faces.items():
            for s, i in zip(key, P.sub.key_roots):
                for p in F.extreme_points:
                    v = el.dot(rs.roots[i], p)
                    if s > 0:
                        assert v > 0
                    elif s < 0:
                        assert v < 0


def test_polytope_in_star(rank2):
    A = rank2.A
    for P in _polys(rank2):
        star = A.vertex_star(P.lam)
        assert all(star.contains(p, A.forms) for p in P.extreme_points)


def test_face_center_is_projection_onto_arrangement_face(rank2):
    # the center is where the polytope face meets the arrangement face F: the Gram-orthogonal
    # projection of b_C onto the affine span of F
    A = rank2.A
    for P in _polys(rank2):
        for key, F in P.faces.items():
            bC = A.base_point(A.dominating_alcove(key))
            vs = A.face_vertices(key)
            dirs = [el.sub(v, vs[0]) for v in vs[1:]]
            basis = []
            for d in dirs:
                if el.rank(basis + [d]) > len(basis):
                    basis.append(d)
            proj = el.orthogonal_project_affine(bC, vs[0], basis, A.rs.gram) if basis else vs[0]
            assert proj == F.center == el.barycenter(F.extreme_points)
            assert A.contains(key, proj)


def test_intersections():
    A = Apartment(build_root_system("A1"), (mpq(1, 4),))
    assert intersect_polytopes(A, [(0,), (mpq(1, 2),)]).extreme_points == ((mpq(1, 4),),)
    assert intersect_polytopes(A, [(0,), (1,)]) is None
    single = intersect_polytopes(A, [(0,)])
    assert single.extreme_points == build_affine(A, (0,)).extreme_points
    A2 = tess("A2").A
    face = intersect_polytopes(A2, A2.C0_vertices)
    assert face.extreme_points == (A2.base,)
    with pytest.raises(UsageError):
        intersect_polytopes(A2, [(0, 0), (0, 0)])


def test_intersections_match_closed_polytope_oracle(rank2):
    A = rank2.A
    verts = A.C0_vertices
    polys = [rank2.polys(v) for v in verts]
    for r in (2, 3):
        for idx in combinations(range(len(verts)), r):
            face = intersect_polytopes(A, [verts[i] for i in idx], rank2.polys)
            common = set(polys[idx[0]].extreme_points)
            for i in idx[1:]:
                common &= set(polys[i].extreme_points)
            # the closed intersection is the convex hull of the common extreme points
            assert set(face.extreme_points) == common
            for p in common:
                assert all(polys[i].contains(p) for i in idx)


def test_scaled_polytope():
    T = tess("A2")
    P = T.polys((0, 0))
    half = P.scaled(mpq(1, 2))
    assert half.extreme_points == tuple(sorted(el.scale(mpq(1, 2), p) for p in P.extreme_points))
    assert list(half.faces) == list(P.faces)
    assert P.scaled(1) is P
    with pytest.raises(UsageError):
        P.scaled(0)
    with pytest.raises(UsageError):
        P.scaled(mpq(3, 2))
