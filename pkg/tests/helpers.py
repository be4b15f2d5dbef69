from __future__ import annotations

import random

from gmpy2 import mpq

from weylpoly import exactlin as el


def group_closure(gens, n, limit=5000):
    """BFS closure of a finite set of affine isometries, keyed by (linear, translation)."""
    from weylpoly.apartment import AffineIsometry

    e = AffineIsometry.identity(n)
    seen = {e.key(): e}
    frontier = [e]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = g.compose(s)
                if h.key() not in seen:
                    seen[h.key()] = h
                    nxt.append(h)
                    if len(seen) > limit:
                        raise AssertionError("group closure too large")
        frontier = nxt
    return seen


def rand_points(n, count, seed, lo=-2, hi=2, den=23):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        x = []
        for _ in range(n):
            d = rng.randint(1, den)
            x.append(mpq(rng.randint(lo * d, hi * d), d))
        out.append(tuple(x))
    return out


def alcoves_in_window(A, lo=-1, hi=1, count=200, seed=5):
    seen = {}
    for x in rand_points(A.n, count, seed, lo, hi):
        C = A.dominating_alcove_of_point(x)
        seen.setdefault(C, None)
    return list(seen)


def closed_face_halfspaces(F):
    """(lo, hi) value bounds of each positive root on the closure of ``F``."""
    out = []
    for c in F.codes:
        n = c // 2
        out.append((n, n) if c % 2 == 0 else (n, n + 1))
    return out


