"""Acceptance criteria, each at its stated tolerance (exact) and runtime target.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""

from __future__ import annotations

import contextlib
import filecmp
import functools
import os
import random
import subprocess
import sys
import tempfile
import time
from itertools import combinations
from pathlib import Path

import pytest
from gmpy2 import mpq

from conftest import ACCEPTANCE_LINES, tess
from figures import FIGURES, GOLDEN_DIR, NON_BARYCENTRIC
from weylpoly import exactlin as el
from weylpoly.apartment import Apartment
from weylpoly.projection import project, variational_ok
from weylpoly.rootsys import build_root_system
from weylpoly.tessellation import grid_points, sample_plan
from weylpoly.weightpoly import build_affine, build_vectorial

TESTS_DIR = Path(__file__).resolve().parent
SYSTEMS = [("A1xA1", None), ("A2", None), ("A2", tuple(NON_BARYCENTRIC.split(","))), ("B2", None), ("G2", None)]
ETAS = [mpq(1, 3), mpq(1, 2), mpq(1)]
HALF, QUARTER, EIGHTH = mpq(1, 2), mpq(1, 4), mpq(1, 8)


def label(name, base):
    return name if base is None else f"{name} b=({','.join(base)})"


@contextlib.contextmanager
def criterion(k: int, title: str):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE_LINES.append(f"criterion {k} FAIL  {title}  ({type(exc).__name__}: {str(exc)[:120]})")
        raise
    ACCEPTANCE_LINES.append(f"criterion {k} PASS  {title}  [{time.perf_counter() - t0:.1f} s]")


# --------------------------------------------------------------------------
# shared runs (criterion 8 compares them under a rescaled Gram form)


@functools.lru_cache(maxsize=None)
def tessellation_run(name, base, scale):
    T = tess(name, base, scale)
    t0 = time.perf_counter()
    rep = T.verify_tessellation(sample_plan(2, (-2, 2), 41, 500, 7))
    return rep, time.perf_counter() - t0


@functools.lru_cache(maxsize=None)
def thickened_run(name, base, scale, eta):
    T = tess(name, base, scale)
    t0 = time.perf_counter()
    rep = T.verify_thickened(sample_plan(2, (-2, 2), 41, 500, 7), eta, 7)
    return rep, time.perf_counter() - t0


def lattice_signature(name, scale):
    rs = build_root_system(name, gram_scale=scale)
    T = tess(name, None, scale)
    out = [sorted((k, f.extreme_points) for k, f in build_vectorial(rs, T.A.base).faces.items())]
    for lam in T.A.C0_vertices:
        P = T.polys(lam)
        out.append(sorted((k.codes, f.extreme_points, f.dim) for k, f in P.faces.items()))
    return out


# --------------------------------------------------------------------------


def test_criterion_1_rank_one_closed_forms():
    with criterion(1, "rank-1 closed forms (A1, b = 1/4)"):
        t0 = time.perf_counter()
        T = tess("A1", ("1/4",))
        A = T.A
        for k in range(-4, 5):
            assert T.polys((k * HALF,)).extreme_points == ((k * HALF - QUARTER,), (k * HALF + QUARTER,))
        for k in range(-4, 4):
            C = A.locate_face((k * HALF + QUARTER,))
            assert C.is_alcove and T.weight_face(C).extreme_points == ((k * HALF + QUARTER,),)
        grid = grid_points((-1,), (1,), 101) + grid_points((-2,), (2,), 97)
        for (x,) in grid:
            F, _ = T.locate_weight_face((x,))
            r = 2 * x + HALF
            if r.denominator == 1:
                assert A.face_vertices(F) == [((int(r) - 1) * HALF,), (int(r) * HALF,)]
            else:
                assert A.face_vertices(F) == [(el.floor_q(r) * HALF,)]
        for (y,) in grid:
            cell = T.locate_thick((y,), HALF)
            lam = el.floor_q(2 * y + HALF) * HALF
            if abs(y - lam) < EIGHTH:
                assert cell.anchor == (lam + 2 * (y - lam),) and cell.closed_cell_vertices == ((y,),)
            else:
                b = el.floor_q(2 * y) * HALF
                assert cell.anchor == (b + QUARTER,)
                assert cell.closed_cell_vertices == ((b + EIGHTH,), (b + 3 * EIGHTH,))
        assert T.verify_tessellation(grid).ok and T.verify_thickened(grid, HALF).ok
        assert time.perf_counter() - t0 < 1.0


def test_criterion_2_orbit_and_face_counts():
    with criterion(2, "orbit and face counts (A2 6, B2 8, G2 12, 13 faces, B2 non-special 4)"):
        for name, count in (("A2", 6), ("B2", 8), ("G2", 12)):
            t0 = time.perf_counter()
            rs = build_root_system(name)
            P = build_vectorial(rs, Apartment(rs).base)
            assert len(P.extreme_points) == count
            if name == "A2":
                assert len(P.faces) == 13 == len(P.sub.vectorial_faces())
            assert time.perf_counter() - t0 < 1.0
        t0 = time.perf_counter()
        A = Apartment(build_root_system("B2"))
        non_special = [v for v in A.C0_vertices if len(A.local_root_system(v).positive) < A.npos]
        assert len(non_special) == 1
        assert len(build_affine(A, non_special[0]).extreme_points) == 4
        assert time.perf_counter() - t0 < 1.0


@pytest.mark.parametrize("name,base", SYSTEMS, ids=[label(*s) for s in SYSTEMS])
def test_criterion_3_tessellation(name, base):
    with criterion(3, f"tessellation partition, {label(name, base)}, 41^2 + 500 samples"):
        rep, secs = tessellation_run(name, base, 1)
        assert rep.samples_total == 41 * 41 + 500
        assert rep.violations == [], rep.violations[:3]
        assert all(a is not None for a in rep.assignments)
        assert secs < 60


@pytest.mark.parametrize("eta", ETAS, ids=[str(e) for e in ETAS])
@pytest.mark.parametrize("name,base", SYSTEMS, ids=[label(*s) for s in SYSTEMS])
def test_criterion_4_thickened(name, base, eta):
    with criterion(4, f"thickened tessellation, {label(name, base)}, eta = {eta}"):
        rep, secs = thickened_run(name, base, 1, eta)
        assert rep.violations == [], rep.violations[:3]
        c = rep.checks
        assert c["located"] == c["interior_split"] == c["consistency"] == rep.samples_total == 41 * 41 + 500
        assert c["roundtrips"] > 0
        assert secs < 120


def _convex_sample(rng, pts):
    w = [mpq(rng.randint(0, 30)) for _ in pts]
    w[rng.randrange(len(w))] += 1
    s = sum(w)
    return el.lincomb([c / s for c in w], pts, len(pts[0]))


def test_criterion_5_projection_properties():
    with criterion(5, "projection: variational inequality, neighbour containment, fiber soundness"):
        t0 = time.perf_counter()
        rng = random.Random(5)
        for name in ("A2", "B2"):
            T = tess(name)
            A = T.A
            polys = [T.polys(v) for v in A.C0_vertices]
            # 1000 exterior points
            done = 0
            while done < 1000:
                P = polys[done % len(polys)]
                x = tuple(P.lam[i] + mpq(rng.randint(-600, 600), rng.randint(1, 97)) for i in range(2))
                if P.contains(x):
                    continue
                r = project(P, x)
                assert P.contains(r.point) and not P.contains(x) and variational_ok(P, x, r.point)
                done += 1
            # 500 points per adjacent pair, both directions
            for Pl, Pm in combinations(polys, 2):
                for _ in range(500):
                    x = _convex_sample(rng, Pm.extreme_points)
                    p = project(Pl, x).point
                    assert Pl.contains(p) and Pm.contains(p)
                    x = _convex_sample(rng, Pl.extreme_points)
                    p = project(Pm, x).point
                    assert Pl.contains(p) and Pm.contains(p)
            # 200 cone points per class of boundary faces (vertex class, face type)
            classes = {}
            for i, P in enumerate(polys):
                for F in P.faces.values():
                    if F.dim < P.n:
                        classes.setdefault((i, F.dim, F.J), (P, F))
            for P, F in classes.values():
                for _ in range(200):
                    p = _convex_sample(rng, F.extreme_points)
                    t = [mpq(rng.randint(0, 40), rng.randint(1, 9)) for _ in F.fiber_generators]
                    y = el.add(p, el.lincomb(t, F.fiber_generators, 2))
                    assert project(P, y).point == p
        assert time.perf_counter() - t0 < 60


def test_criterion_6_structural_invariants():
    with criterion(6, "structural invariants (lattice, codimension, faces, positivity, star, Gram, Theta)"):
        t0 = time.perf_counter()
        for name in ("A2", "B2", "G2", "A1xA1"):
            T = tess(name)
            A = T.A
            rs = A.rs
            verts = list(A.C0_vertices)
            assert len(verts) >= 3
            for lam in verts:
                P = T.polys(lam)
                keys = list(P.faces)
                assert set(keys) == set(A.faces_at_vertex(lam))
                assert len({P.faces[k].extreme_points for k in keys}) == len(keys)
                star = A.vertex_star(lam)
                assert all(star.contains(p, A.forms) for p in P.extreme_points)
                for k in keys:
                    F = P.faces[k]
                    d = [el.sub(p, F.extreme_points[0]) for p in F.extreme_points[1:]]
                    assert (el.rank(d) if d else 0) == A.n - A.face_dim(k)
                    assert F.extreme_points == tuple(p for p in P.extreme_points if F.contains(p))
                for k1, k2 in combinations(keys, 2):
                    e1, e2 = set(P.faces[k1].extreme_points), set(P.faces[k2].extreme_points)
                    assert (e2 <= e1) == A.dominates(k2, k1)
                    assert (e1 <= e2) == A.dominates(k1, k2)
                # Theta o Xi = id at this vertex
                for key, *_ in A.local_root_system(lam).vectorial_faces():
                    assert A.vertex_cone_face(lam, A.cone_face_to_face(lam, key)) == key
            V = build_vectorial(rs, A.base)
            for key, F in V.faces.items():
                for s, i in zip(key, V.sub.key_roots):
                    for p in F.extreme_points:
                        v = el.dot(rs.roots[i], p)
                        assert (s > 0 and v > 0) or (s < 0 and v < 0) or s == 0
            pts = [A.base, (mpq(3, 7), mpq(-5, 3)), (mpq(-2), mpq(1, 9))]
            for i in range(rs.rank):
                s = rs.simple_reflection(i)
                for x in pts:
                    for y in pts:
                        assert rs.inner(el.mat_vec(s, x), el.mat_vec(s, y)) == rs.inner(x, y)
        assert time.perf_counter() - t0 < 30


def _render_in_subprocess(outdir: str, hashseed: str) -> None:
    env = dict(os.environ, PYTHONHASHSEED=hashseed)
    code = "import sys; from figures import render_all; render_all(sys.argv[1])"
    subprocess.run([sys.executable, "-c", code, outdir], cwd=TESTS_DIR, env=env, check=True)


def test_criterion_7_figure_goldens():
    with criterion(7, "figure goldens: byte-identical across two runs and equal to docs/figures"):
        with tempfile.TemporaryDirectory() as d1, tempfile.TemporaryDirectory() as d2:
            _render_in_subprocess(d1, "1")
            _render_in_subprocess(d2, "12345")
            names = [n for n, _ in FIGURES]
            match, mismatch, errors = filecmp.cmpfiles(d1, d2, names, shallow=False)
            assert match == names, (mismatch, errors)
            match, mismatch, errors = filecmp.cmpfiles(d1, GOLDEN_DIR, names, shallow=False)
            assert match == names, (mismatch, errors)
        notes = (GOLDEN_DIR.parent / "figures.md").read_text(encoding="utf-8")
        assert all(n in notes for n in names)


def test_criterion_8_normalization_independence():
    with criterion(8, "normalization independence (Gram form scaled by 3)"):
        for name in ("A2", "B2", "G2"):
            assert lattice_signature(name, 1) == lattice_signature(name, 3)
        for name, base in SYSTEMS:
            r1, _ = tessellation_run(name, base, 1)
            r3, _ = tessellation_run(name, base, 3)
            assert r3.ok and r1.assignments == r3.assignments
            for eta in ETAS:
                t1, _ = thickened_run(name, base, 1, eta)
                t3, _ = thickened_run(name, base, 3, eta)
                assert t3.ok and t1.assignments == t3.assignments
