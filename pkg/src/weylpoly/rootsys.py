"""Finite crystallographic root systems realized over Q.

The ambient space is Q^n with the simple coroots as the standard basis.
Simple root i is row i of the Cartan matrix read as a linear form, so that
``alpha_i(alpha_j^vee) = cartan[i][j]`` and every reflection matrix is integral.
Points and coroots are column vectors, roots are row vectors (linear forms).
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

from . import exactlin as el
from .errors import ConfigurationError, UsageError

MAX_RANK = 8


# --------------------------------------------------------------------------
# Cartan matrices by name


def _cartan_A(n):
    return [[2 if i == j else (-1 if abs(i - j) == 1 else 0) for j in range(n)] for i in range(n)]


def _cartan_B(n):
    m = _cartan_A(n)
    if n >= 2:
        m[n - 2][n - 1] = -2
    return m


def _cartan_C(n):
    m = _cartan_B(n)
    return [list(r) for r in zip(*m)]


def _cartan_D(n):
    m = _cartan_A(n)
    m[n - 2][n - 1] = m[n - 1][n - 2] = 0
    m[n - 3][n - 1] = m[n - 1][n - 3] = -1
    return m


def _cartan_E(n):
    # Bourbaki labelling: 1-3-4-5-...-n with 2 attached to 4
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = 2
    edges = [(1, 3), (3, 4), (2, 4)] + [(k, k + 1) for k in range(4, n)]
    for a, b in edges:
        m[a - 1][b - 1] = m[b - 1][a - 1] = -1
    return m


def _cartan_F4():
    return [[2, -1, 0, 0], [-1, 2, -2, 0], [0, -1, 2, -1], [0, 0, -1, 2]]


def _cartan_G2():
    return [[2, -1], [-3, 2]]


def cartan_by_name(name: str) -> list[list[int]]:
    """Cartan matrix for a name like ``"B3"`` or a product ``"A1xA1"``."""
    parts = [p for p in re.split(r"[x×+* ]+", name.strip()) if p]
    if not parts:
        raise UsageError(f"empty root system type {name!r}")
    blocks = []
    for p in parts:
        m = re.fullmatch(r"([A-Ga-g])(\d+)", p)
        if not m:
            raise UsageError(f"unknown root system type {p!r}")
        letter, n = m.group(1).upper(), int(m.group(2))
        if letter == "A" and n >= 1:
            blocks.append(_cartan_A(n))
        elif letter == "B" and n >= 2:
            blocks.append(_cartan_B(n))
        elif letter == "C" and n >= 2:
            blocks.append(_cartan_C(n))
        elif letter == "D" and n >= 4:
            blocks.append(_cartan_D(n))
        elif letter == "E" and n in (6, 7, 8):
            blocks.append(_cartan_E(n))
        elif letter == "F" and n == 4:
            blocks.append(_cartan_F4())
        elif letter == "G" and n == 2:
            blocks.append(_cartan_G2())
        else:
            raise UsageError(f"unknown root system type {p!r}")
    size = sum(len(b) for b in blocks)
    out = [[0] * size for _ in range(size)]
    off = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = b[i][j]
        off += k
    return out


def _parse_matrix_text(text: str) -> list[list[int]]:
    text = text.strip()
    if text.startswith("["):
        rows = json.loads(text)
    else:
        rows = [[s for s in r.split(",") if s.strip()] for r in text.split(";")]
    try:
        out = [[int(x) for x in r] for r in rows]
    except (TypeError, ValueError):
        raise UsageError(f"Cartan matrix entries must be integers: {text!r}") from None
    return out


# --------------------------------------------------------------------------
# Weyl group elements


@dataclass(frozen=True)
class WeylElement:
    """A linear Weyl group element acting on points (coroot coordinates)."""

    matrix: tuple
    word: tuple = ()

    def apply(self, x: Sequence) -> tuple:
        return el.mat_vec(self.matrix, x)

    def apply_form(self, f: Sequence) -> tuple:
        """``w.f = f o w^{-1}``."""
        return el.vec_mat(f, el.inverse(self.matrix))

    def compose(self, other: "WeylElement") -> "WeylElement":
        """``self o other``."""
        return WeylElement(el.mat_mul(self.matrix, other.matrix), tuple(self.word) + tuple(other.word))

    def inverse(self) -> "WeylElement":
        return WeylElement(el.inverse(self.matrix), tuple(reversed(self.word)))

    @property
    def key(self) -> tuple:
        return self.matrix


def reflection_matrix(form: Sequence, coroot: Sequence) -> tuple:
    """Matrix of ``x -> x - form(x) coroot``."""
    n = len(coroot)
    return tuple(
        tuple((el.ONE if i == j else el.ZERO) - coroot[i] * form[j] for j in range(n)) for i in range(n)
    )


def generated_group(generators: Sequence[tuple], n: int, words: Optional[Sequence[tuple]] = None,
                    limit: int = 200000) -> list[WeylElement]:
    """All elements of the matrix group generated by ``generators``; identity first."""
    ident = el.identity(n)
    if words is None:
        words = [(i,) for i in range(len(generators))]
    start = WeylElement(ident, ())
    seen = {ident: start}
    order = [start]
    queue = deque([start])
    while queue:
        w = queue.popleft()
        for g, gw in zip(generators, words):
            m = el.mat_mul(w.matrix, g)
            if m not in seen:
                e = WeylElement(m, w.word + tuple(gw))
                seen[m] = e
                order.append(e)
                queue.append(e)
                if len(order) > limit:
                    raise ConfigurationError("group enumeration exceeded its size limit")
    return order


def orbit(generators: Sequence[tuple], point: Sequence) -> list[tuple]:
    """Orbit of ``point`` under the group generated by the matrices, sorted."""
    p = tuple(mpq(x) for x in point)
    seen = {p}
    queue = deque([p])
    while queue:
        x = queue.popleft()
        for g in generators:
            y = el.mat_vec(g, x)
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return sorted(seen)


# --------------------------------------------------------------------------
# root systems


@dataclass(frozen=True, eq=False)
class RootSystem:
    """A reduced finite root system in its standard realization.

    ``roots[i]`` is a linear form and ``coroots[i]`` its coroot.  The first
    ``npos`` entries are the positive roots (simple roots first, then by
    height); entry ``i + npos`` is the negative of entry ``i``.
    """

    rank: int
    cartan: tuple
    name: str
    roots: tuple
    coroots: tuple
    gram: tuple
    components: tuple
    symmetrizer: tuple
    gram_scale: mpq = mpq(1)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # ---- basic data

    @property
    def npos(self) -> int:
        return len(self.roots) // 2

    @property
    def all_roots(self) -> tuple:
        return self.roots

    @property
    def positive_roots(self) -> tuple:
        return self.roots[: self.npos]

    @property
    def positive_coroots(self) -> tuple:
        return self.coroots[: self.npos]

    @property
    def simple_roots(self) -> tuple:
        return self.roots[: self.rank]

    @property
    def simple_coroots(self) -> tuple:
        return self.coroots[: self.rank]

    def root_index(self, form: Sequence) -> int:
        idx = self._cache.get("index")
        if idx is None:
            idx = {r: i for i, r in enumerate(self.roots)}
            self._cache["index"] = idx
        try:
            return idx[tuple(form)]
        except KeyError:
            raise UsageError(f"not a root: {form!r}") from None

    def coefficients(self, form: Sequence) -> tuple:
        """Coordinates of a linear form in the basis of simple roots."""
        inv = self._cache.get("cartan_inv")
        if inv is None:
            inv = el.inverse(self.cartan)
            self._cache["cartan_inv"] = inv
        return el.vec_mat(form, inv)

    def height(self, form: Sequence):
        return sum(self.coefficients(form), el.ZERO)

    def simple_reflection(self, i: int) -> tuple:
        return reflection_matrix(self.roots[i], self.coroots[i])

    def reflection(self, i: int) -> tuple:
        return reflection_matrix(self.roots[i], self.coroots[i])

    def inner(self, x: Sequence, y: Sequence):
        return el.inner(x, y, self.gram)

    # ---- Weyl group

    def weyl_group_elements(self) -> list[WeylElement]:
        g = self._cache.get("weyl")
        if g is None:
            g = generated_group([self.simple_reflection(i) for i in range(self.rank)], self.rank)
            self._cache["weyl"] = g
        return g

    def weyl_generators(self) -> list[WeylElement]:
        return [WeylElement(self.simple_reflection(i), (i,)) for i in range(self.rank)]

    def fundamental_coweights(self) -> list[tuple]:
        inv = el.inverse(self.cartan)
        return [tuple(inv[r][i] for r in range(self.rank)) for i in range(self.rank)]

    def rho_coweight(self) -> tuple:
        cw = self.fundamental_coweights()
        return tuple(sum((w[k] for w in cw), el.ZERO) for k in range(self.rank))

    def full_subsystem(self, chamber_point: Optional[Sequence] = None) -> "RootSubsystem":
        if chamber_point is None:
            chamber_point = self.rho_coweight()
        return RootSubsystem(self, tuple(range(len(self.roots))), chamber_point)

    # ---- components

    def decompose_components(self) -> list["RootSystem"]:
        out = []
        for comp in self.components:
            sub = [[self.cartan[i][j] for j in comp] for i in comp]
            rs = build_root_system(sub, gram_scale=self.gram_scale)
            out.append(rs)
        return out

    def to_json(self) -> dict:
        return {
            "type": self.name,
            "rank": self.rank,
            "cartan": [[int(x) for x in row] for row in self.cartan],
            "roots": [el.format_vector(r) for r in self.roots],
            "coroots": [el.format_vector(c) for c in self.coroots],
            "positive_count": self.npos,
            "gram": [el.format_vector(r) for r in self.gram],
            "components": [list(c) for c in self.components],
        }


def _components(cartan) -> tuple:
    n = len(cartan)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(n):
            if i != j and cartan[i][j] != 0:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return tuple(tuple(g) for g in sorted(groups.values()))


def _symmetrizer(cartan, components) -> tuple:
    n = len(cartan)
    d: list = [None] * n
    for comp in components:
        root = comp[0]
        d[root] = mpq(1)
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j in comp:
                if j != i and cartan[i][j] != 0:
                    val = d[i] * cartan[i][j] / cartan[j][i]
                    if d[j] is None:
                        d[j] = val
                        queue.append(j)
                    elif d[j] != val:
                        raise ConfigurationError("Cartan matrix is not symmetrizable")
        # normalize so the shortest coroot has squared length 2
        m = min(d[i] for i in comp)
        for i in comp:
            d[i] = 2 * d[i] / m
    return tuple(d)


def _check_cartan(cartan) -> None:
    n = len(cartan)
    if n == 0:
        raise ConfigurationError("empty Cartan matrix")
    if n > MAX_RANK:
        raise ConfigurationError(f"rank {n} exceeds the supported maximum {MAX_RANK}")
    for row in cartan:
        if len(row) != n:
            raise ConfigurationError("Cartan matrix is not square")
    for i in range(n):
        if cartan[i][i] != 2:
            raise ConfigurationError(f"Cartan diagonal entry ({i},{i}) is {cartan[i][i]}, not 2")
        for j in range(n):
            if i != j:
                if cartan[i][j] > 0:
                    raise ConfigurationError(f"positive off-diagonal Cartan entry at ({i},{j})")
                if (cartan[i][j] == 0) != (cartan[j][i] == 0):
                    raise ConfigurationError(f"Cartan entries ({i},{j}) and ({j},{i}) disagree on vanishing")


def build_root_system(spec, gram_scale=1) -> RootSystem:
    """Build a root system from a type name, matrix text, or an integer matrix."""
    if isinstance(spec, str):
        if re.search(r"\d\s*[,;\]]|^\s*\[", spec) and not re.fullmatch(r"[A-Ga-g]\d+([x×+* ]+[A-Ga-g]\d+)*", spec.strip()):
            cartan_int = _parse_matrix_text(spec)
            name = "custom"
        else:
            cartan_int = cartan_by_name(spec)
            name = spec.strip()
    else:
        cartan_int = [[int(x) for x in row] for row in spec]
        name = "custom"
    _check_cartan(cartan_int)
    n = len(cartan_int)
    cartan = tuple(tuple(mpq(x) for x in row) for row in cartan_int)
    components = _components(cartan)
    d = _symmetrizer(cartan, components)
    if any(x <= 0 for x in d):
        raise ConfigurationError("symmetrizer is not positive")
    scale = el.q(gram_scale)
    if scale <= 0:
        raise ConfigurationError("Gram scale must be positive")
    gram = tuple(tuple(scale * d[i] * cartan[i][j] / 2 for j in range(n)) for i in range(n))
    if not el.is_positive_definite(gram):
        raise ConfigurationError("Cartan matrix is not of finite type: symmetrized form is not positive definite")

    simple = [cartan[i] for i in range(n)]
    simple_co = [el.unit(n, i) for i in range(n)]
    pairs = {(simple[i], simple_co[i]) for i in range(n)}
    pairs |= {(el.scale(-1, simple[i]), el.scale(-1, simple_co[i])) for i in range(n)}
    queue = deque(pairs)
    bound = 300  # E8 has 240 roots
    while queue:
        a, c = queue.popleft()
        for j in range(n):
            aj = a[j]  # a(e_j)
            cj = el.dot(simple[j], c)  # alpha_j(c)
            if aj == 0 and cj == 0:
                continue
            na = tuple(x - aj * y for x, y in zip(a, simple[j]))
            nc = tuple(x - (cj if k == j else 0) for k, x in enumerate(c))
            p = (na, nc)
            if p not in pairs:
                pairs.add(p)
                queue.append(p)
                if len(pairs) > bound:
                    raise ConfigurationError("root closure did not terminate: not of finite type")
    inv = el.inverse(cartan)

    def coeffs(a):
        return el.vec_mat(a, inv)

    positives = []
    for a, c in pairs:
        cf = coeffs(a)
        if all(x >= 0 for x in cf):
            positives.append((a, c, cf))
        elif not all(x <= 0 for x in cf):
            raise ConfigurationError("a root has mixed-sign coefficients: not a root system")
    positives.sort(key=lambda t: (sum(t[2]), tuple(-x for x in t[2])))
    roots = tuple(p[0] for p in positives) + tuple(el.scale(-1, p[0]) for p in positives)
    coroots = tuple(p[1] for p in positives) + tuple(el.scale(-1, p[1]) for p in positives)
    if len(roots) != len(pairs):
        raise ConfigurationError("roots are not closed under negation")
    for a, c in zip(roots, coroots):
        if el.dot(a, c) != 2:
            raise ConfigurationError("a root does not pair to 2 with its coroot")
    return RootSystem(n, cartan, name, roots, coroots, gram, components, d, scale)


def weyl_group_elements(rs: RootSystem) -> list[WeylElement]:
    return rs.weyl_group_elements()


def weyl_orbit(rs: RootSystem, subgroup_generators: Iterable[WeylElement], point: Sequence) -> list[tuple]:
    return orbit([g.matrix for g in subgroup_generators], point)


def fundamental_coweights(rs: RootSystem) -> list[tuple]:
    return rs.fundamental_coweights()


def invariant_gram(rs: RootSystem) -> tuple:
    return rs.gram


def decompose_components(rs: RootSystem) -> list[RootSystem]:
    return rs.decompose_components()


# --------------------------------------------------------------------------
# sub-root-systems (local systems at a vertex, or the whole system)


class RootSubsystem:
    """A closed sub-root-system with a positive system fixed by a chamber point.

    ``indices`` are indices into ``parent.roots``.  The positive system is
    ``{a : a(chamber_point) > 0}``; the chamber point must be regular.
    """

    def __init__(self, parent: RootSystem, indices: Sequence[int], chamber_point: Sequence):
        self.parent = parent
        self.n = parent.rank
        self.indices = tuple(sorted(indices))
        c = tuple(mpq(x) for x in chamber_point)
        self.chamber_point = c
        vals = {i: el.dot(parent.roots[i], c) for i in self.indices}
        if any(v == 0 for v in vals.values()):
            raise ConfigurationError("chamber point lies on a root hyperplane of the subsystem")
        self.positive = tuple(i for i in self.indices if vals[i] > 0)
        # key coordinates: parent-positive roots of the subsystem
        self.key_roots = tuple(i for i in self.indices if i < parent.npos)
        pos_set = set(self.positive)
        forms = {i: parent.roots[i] for i in self.positive}
        sums = set()
        for i, j in combinations(self.positive, 2):
            sums.add(el.add(forms[i], forms[j]))
        self.simple = tuple(i for i in self.positive if forms[i] not in sums)
        self.simple_forms = tuple(parent.roots[i] for i in self.simple)
        self.simple_coroots = tuple(parent.coroots[i] for i in self.simple)
        self.rank = len(self.simple)
        del pos_set
        self._weyl: Optional[list[WeylElement]] = None
        self._coweights: Optional[list[tuple]] = None
        self._faces: Optional[list] = None

    def __len__(self) -> int:
        return len(self.indices)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.n

    def reflections(self) -> list[tuple]:
        return [reflection_matrix(a, c) for a, c in zip(self.simple_forms, self.simple_coroots)]

    def weyl_group_elements(self) -> list[WeylElement]:
        if self._weyl is None:
            self._weyl = generated_group(self.reflections(), self.n)
        return self._weyl

    def generator_elements(self, subset: Optional[Iterable[int]] = None) -> list[WeylElement]:
        refl = self.reflections()
        ks = range(self.rank) if subset is None else subset
        return [WeylElement(refl[k], (k,)) for k in ks]

    def coweights(self) -> list[tuple]:
        """Dual basis to the simple roots of the subsystem (full rank only)."""
        if self._coweights is None:
            if not self.is_full_rank:
                raise UsageError("coweights need a full-rank subsystem")
            inv = el.inverse(self.simple_forms)
            self._coweights = [tuple(inv[r][k] for r in range(self.n)) for k in range(self.rank)]
        return self._coweights

    def sign_key(self, x: Sequence) -> tuple:
        """Signs of the parent-positive roots of the subsystem at ``x``."""
        out = []
        for i in self.key_roots:
            v = el.dot(self.parent.roots[i], x)
            out.append(1 if v > 0 else (-1 if v < 0 else 0))
        return tuple(out)

    def vectorial_faces(self) -> list[tuple]:
        """All vectorial faces as ``(key, w, J, witness)``; ``J`` are simple-root positions.

        The face ``w.F_J`` consists of the points ``w(sum_{k not in J} t_k coweight_k)``
        with ``t_k > 0``.  The witness is the point with all ``t_k = 1``.
        """
        if self._faces is None:
            cw = self.coweights()
            faces = {}
            for w in self.weyl_group_elements():
                for r in range(self.rank + 1):
                    for J in combinations(range(self.rank), r):
                        base = el.zeros(self.n)
                        for k in range(self.rank):
                            if k not in J:
                                base = el.add(base, cw[k])
                        wit = w.apply(base)
                        key = self.sign_key(wit)
                        if key not in faces:
                            faces[key] = (key, w, J, wit)
            self._faces = sorted(faces.values(), key=lambda f: (-len(f[2]), f[0]))
        return self._faces
