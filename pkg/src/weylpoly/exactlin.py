"""Exact rational linear algebra and conic feasibility.

Scalars are ``gmpy2.mpq`` (always reduced, positive denominator), vectors are
tuples of scalars and matrices are tuples of row tuples.  Nothing in here
touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational as _RationalABC
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

from .errors import ConfigurationError, UsageError

Q = mpq
Vec = tuple
Mat = tuple

ZERO = mpq(0)
ONE = mpq(1)


# --------------------------------------------------------------------------
# scalars and parsing


def q(value) -> mpq:
    """Convert an int, an ``"p/q"`` string or an exact rational to ``mpq``."""
    if isinstance(value, str):
        text = value.strip()
        try:
            return mpq(text)
        except ValueError:
            raise UsageError(f"not a rational number: {value!r}") from None
    if isinstance(value, float):
        raise UsageError(f"refusing inexact float {value!r}; pass 'p/q' instead")
    if isinstance(value, (Integral, Fraction, _RationalABC)) or type(value) is mpq:
        return mpq(value)
    try:
        return mpq(value)
    except (TypeError, ValueError):
        raise UsageError(f"not a rational number: {value!r}") from None


def vec(values: Iterable) -> Vec:
    return tuple(q(v) for v in values)


def mat(rows: Iterable[Iterable]) -> Mat:
    out = tuple(vec(r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise UsageError("matrix rows have different lengths")
    return out


def parse_vector(text: str) -> Vec:
    """Parse ``"1/3,1/5"`` into a vector."""
    parts = [p for p in text.replace(" ", "").split(",") if p != ""]
    if not parts:
        raise UsageError(f"empty vector: {text!r}")
    return tuple(q(p) for p in parts)


def format_q(x) -> str:
    """Wire format: ``"p/q"``, or ``"p"`` when the denominator is one."""
    return str(mpq(x))


def format_vector(v: Sequence) -> list:
    return [format_q(x) for x in v]


def floor_q(x) -> int:
    x = mpq(x)
    return int(x.numerator // x.denominator)


def is_integral(x) -> bool:
    return mpq(x).denominator == 1


# --------------------------------------------------------------------------
# vectors and matrices


def zeros(n: int) -> Vec:
    return (ZERO,) * n


def unit(n: int, i: int) -> Vec:
    return tuple(ONE if k == i else ZERO for k in range(n))


def identity(n: int) -> Mat:
    return tuple(unit(n, i) for i in range(n))


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), ZERO)


def add(u: Sequence, v: Sequence) -> Vec:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> Vec:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Sequence) -> Vec:
    return tuple(c * a for a in v)


def lincomb(coeffs: Sequence, vectors: Sequence[Sequence], n: Optional[int] = None) -> Vec:
    if n is None:
        n = len(vectors[0])
    out = [ZERO] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for k in range(n):
                out[k] += c * v[k]
    return tuple(out)


def barycenter(points: Sequence[Sequence]) -> Vec:
    if not points:
        raise UsageError("barycenter of an empty set")
    n = len(points[0])
    m = mpq(len(points))
    return tuple(sum((p[k] for p in points), ZERO) / m for k in range(n))


def transpose(M: Sequence[Sequence]) -> Mat:
    return tuple(zip(*M)) if M else ()


def mat_vec(M: Sequence[Sequence], v: Sequence) -> Vec:
    return tuple(dot(row, v) for row in M)


def vec_mat(v: Sequence, M: Sequence[Sequence]) -> Vec:
    """Row vector times matrix, i.e. the linear form ``x -> v(M x)``."""
    n = len(M[0])
    return tuple(sum((v[i] * M[i][j] for i in range(len(M))), ZERO) for j in range(n))


def mat_mul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Mat:
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def inner(x: Sequence, y: Sequence, gram: Sequence[Sequence]):
    """``<x|y>`` for the scalar product with Gram matrix ``gram``."""
    return dot(x, mat_vec(gram, y))


def _shape(M) -> tuple[int, int]:
    m = len(M)
    n = len(M[0]) if m else 0
    for row in M:
        if len(row) != n:
            raise UsageError("matrix is not rectangular")
    return m, n


def rref(M: Sequence[Sequence]) -> tuple[list[list[mpq]], list[int]]:
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    R = [[mpq(x) for x in row] for row in M]
    m, n = _shape(R)
    pivots: list[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                Ri, Rr = R[i], R[r]
                R[i] = [a - f * b for a, b in zip(Ri, Rr)]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return R, pivots


def rank(M: Sequence[Sequence]) -> int:
    if not M:
        return 0
    return len(rref(M)[1])


def nullspace(M: Sequence[Sequence], ncols: Optional[int] = None) -> list[Vec]:
    """Basis of ``{x : M x = 0}``."""
    if not M:
        if ncols is None:
            raise UsageError("nullspace of an empty matrix needs ncols")
        return [unit(ncols, i) for i in range(ncols)]
    R, pivots = rref(M)
    n = len(R[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [ZERO] * n
        x[f] = ONE
        for row, pc in zip(R, pivots):
            x[pc] = -row[f]
        basis.append(tuple(x))
    return basis


def solve_linear(M: Sequence[Sequence], v: Sequence) -> tuple[Optional[Vec], list[Vec]]:
    """One exact solution of ``M x = v`` (or None) and a basis of the kernel of M."""
    m, n = _shape(M)
    if len(v) != m:
        raise UsageError(f"shape mismatch: matrix has {m} rows, vector has {len(v)} entries")
    if m == 0:
        return zeros(n), [unit(n, i) for i in range(n)]
    aug = [list(row) + [v[i]] for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if n in pivots:
        return None, nullspace(M)
    x = [ZERO] * n
    for row, pc in zip(R, pivots):
        x[pc] = row[n]
    return tuple(x), nullspace(M)


def inverse(M: Sequence[Sequence]) -> Mat:
    m, n = _shape(M)
    if m != n:
        raise UsageError("inverse of a non-square matrix")
    aug = [list(row) + list(unit(n, i)) for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if sum(1 for p in pivots if p < n) < n:
        raise UsageError("matrix is singular")
    return tuple(tuple(row[n:]) for row in R)


def determinant(M: Sequence[Sequence]):
    A = [[mpq(x) for x in row] for row in M]
    n = len(A)
    det = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return ZERO
        if p != c:
            A[c], A[p] = A[p], A[c]
            det = -det
        det *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return det


def is_symmetric(M: Sequence[Sequence]) -> bool:
    n = len(M)
    return all(M[i][j] == M[j][i] for i in range(n) for j in range(n))


def is_positive_definite(M: Sequence[Sequence]) -> bool:
    """Sylvester's criterion, exactly."""
    if not is_symmetric(M):
        return False
    n = len(M)
    return all(determinant([row[:k] for row in M[:k]]) > 0 for k in range(1, n + 1))


# --------------------------------------------------------------------------
# projection


def orthogonal_project_affine(point: Sequence, base: Sequence, directions: Sequence[Sequence],
                              gram: Sequence[Sequence]) -> Vec:
    """Gram-orthogonal projection of ``point`` onto ``base + span(directions)``."""
    if not directions:
        return tuple(mpq(x) for x in base)
    diff = sub(point, base)
    Bd = [mat_vec(gram, d) for d in directions]
    G = [[dot(di, bdj) for bdj in Bd] for di in directions]
    rhs = [dot(bd, diff) for bd in Bd]
    if determinant(G) == 0:
        raise ConfigurationError("degenerate Gram form or dependent directions")
    coeffs, _ = solve_linear(G, rhs)
    return add(base, lincomb(coeffs, directions, len(base)))


# --------------------------------------------------------------------------
# linear programming (phase one of the simplex method, Bland's rule)


def _phase_one(columns: Sequence[Sequence], target: Sequence):
    """Decide ``{z >= 0 : sum z_j columns[j] = target}``.

    Returns ``(z, None)`` when feasible, otherwise ``(None, f)`` with a linear
    form ``f`` such that ``f(columns[j]) >= 0`` for all j and ``f(target) < 0``.
    """
    m = len(target)
    k = len(columns)
    signs = [ONE if t >= 0 else -ONE for t in target]
    # tableau rows: k structural columns, m artificial columns, rhs
    T = []
    for i in range(m):
        row = [signs[i] * col[i] for col in columns]
        row += [ONE if j == i else ZERO for j in range(m)]
        row.append(signs[i] * target[i])
        T.append(row)
    basis = [k + i for i in range(m)]
    width = k + m + 1
    # reduced costs of "minimise the sum of artificials"
    cost = [ZERO] * width
    for j in range(k):
        cost[j] = -sum((T[i][j] for i in range(m)), ZERO)
    cost[width - 1] = -sum((T[i][width - 1] for i in range(m)), ZERO)
    while True:
        enter = next((j for j in range(k + m) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:  # cannot happen: phase one is bounded below by zero
            break
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        prow = T[leave]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [a - f * b for a, b in zip(T[i], prow)]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [a - f * b for a, b in zip(cost, prow)]
        basis[leave] = enter
    objective = -cost[-1]
    if objective == 0:
        z = [ZERO] * k
        for i, bj in enumerate(basis):
            if bj < k:
                z[bj] = T[i][-1]
        return tuple(z), None
    # dual of phase one: y_i = 1 - reduced cost of artificial i
    y = [ONE - cost[k + i] for i in range(m)]
    f = tuple(-signs[i] * y[i] for i in range(m))
    return None, f


def cone_decide(generators: Sequence[Sequence], target: Sequence):
    """Exact cone membership with certificates.

    Returns ``(coefficients, None)`` if ``target`` is a nonnegative combination
    of ``generators``, else ``(None, farkas_form)``.
    """
    target = tuple(mpq(t) for t in target)
    n = len(target)
    for g in generators:
        if len(g) != n:
            raise UsageError("generators and target have different dimensions")
    if all(t == 0 for t in target):
        return tuple(ZERO for _ in generators), None
    if not generators:
        # any form that is negative on the target separates it from {0}
        f = tuple(-t for t in target)
        return None, f
    if len(generators) <= n and rank(generators) == len(generators):
        # independent generators: the combination is unique if it exists
        sol, _ = solve_linear(transpose(generators), target)
        if sol is not None and all(c >= 0 for c in sol):
            return sol, None
    coeffs, cert = _phase_one(generators, target)
    if coeffs is not None:
        if lincomb(coeffs, generators, n) != target or any(c < 0 for c in coeffs):
            raise AssertionError("simplex returned an invalid cone combination")
    else:
        if any(dot(cert, g) < 0 for g in generators) or dot(cert, target) >= 0:
            raise AssertionError("simplex returned an invalid Farkas certificate")
    return coeffs, cert


def cone_membership(generators: Sequence[Sequence], target: Sequence) -> Optional[Vec]:
    """Nonnegative coefficients expressing ``target`` in ``cone(generators)``, or None."""
    return cone_decide(generators, target)[0]


def in_convex_hull(point: Sequence, vertices: Sequence[Sequence]) -> Optional[Vec]:
    """Barycentric weights of ``point`` w.r.t. ``vertices`` (exact LP), or None."""
    gens = [tuple(v) + (ONE,) for v in vertices]
    return cone_membership(gens, tuple(point) + (ONE,))


def hulls_intersect(P: Sequence[Sequence], R: Sequence[Sequence]) -> Optional[Vec]:
    """A common point of ``conv(P)`` and ``conv(R)``, or None when they are disjoint."""
    n = len(P[0])
    gens = []
    for p in P:
        gens.append(tuple(p) + (ONE, ZERO))
    for r in R:
        gens.append(tuple(-x for x in r) + (ZERO, ONE))
    target = zeros(n) + (ONE, ONE)
    coeffs = cone_membership(gens, target)
    if coeffs is None:
        return None
    return lincomb(coeffs[: len(P)], P, n)


def polyhedron_point(A: Sequence[Sequence], b: Sequence, lo: Sequence, hi: Sequence) -> Optional[Vec]:
    """A point of ``{x : lo <= x <= hi, A x <= b}``, or None."""
    n = len(lo)
    width = [h - l for l, h in zip(lo, hi)]
    if any(w < 0 for w in width):
        return None
    # variables: s (n, x = lo + s), slack for s <= width (n), slack for A rows (m)
    m = len(A)
    rows = []
    rhs = []
    for i in range(n):
        rows.append([ONE if j == i else ZERO for j in range(n)] + [ONE if j == i else ZERO for j in range(n)]
                    + [ZERO] * m)
        rhs.append(width[i])
    for r, (a, bi) in enumerate(zip(A, b)):
        rows.append(list(a) + [ZERO] * n + [ONE if j == r else ZERO for j in range(m)])
        rhs.append(bi - dot(a, lo))
    columns = transpose(rows)
    z, _ = _phase_one(columns, rhs)
    if z is None:
        return None
    return add(lo, z[:n])
