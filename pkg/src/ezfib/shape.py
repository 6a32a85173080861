"""Concrete Eilenberg-Zilber shape categories.

Three kinds are supported:

``simplex``
    The simplex category: objects ``[n] = {0..n}``, morphisms the monotone maps.
``cube``
    The cube category: objects ``{0,1}^n``, morphisms generated (under
    tensor and composition) by the two vertex inclusions and the collapse
    ``{0,1} -> {0}``.
``cube_conn``
    The cube category with max-connections ``(x, y) -> max(x, y)`` added.

Every morphism is stored as an explicit vertex table, so equality of
morphisms is equality of tables.  Hom-sets are the closure of the
elementary generators under composition and are cached per kind.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

KINDS = ("simplex", "cube", "cube_conn")


class CompositionError(ValueError):
    """Raised when composing morphisms whose objects do not match."""


class DomainError(ValueError):
    """Raised when an operation is applied outside its domain."""


@dataclass(frozen=True, order=True)
class ShapeObject:
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")

    def __str__(self):
        return f"{'[%d]' % self.dim if self.kind == 'simplex' else 'C%d' % self.dim}"


def num_vertices(kind: str, n: int) -> int:
    return n + 1 if kind == "simplex" else 2 ** n


@lru_cache(maxsize=None)
def vertices(kind: str, n: int) -> tuple:
    """Vertices of the object of dimension ``n`` in canonical (numeric) order."""
    if kind == "simplex":
        return tuple(range(n + 1))
    return tuple(itertools.product((0, 1), repeat=n))


def vertex_label(kind: str, v) -> str:
    if kind == "simplex":
        return str(v)
    return "".join(map(str, v)) if v else "*"


@dataclass(frozen=True)
class ShapeMorphism:
    """A morphism ``source -> target`` given by its table on vertex indices."""

    kind: str
    source: int
    target: int
    table: tuple
    name: str = field(default="", compare=False, hash=False)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.kind, self.source, self.target, self.table))
            object.__setattr__(self, "_hash", h)
        return h

    @property
    def dom(self) -> ShapeObject:
        return ShapeObject(self.kind, self.source)

    @property
    def cod(self) -> ShapeObject:
        return ShapeObject(self.kind, self.target)

    def is_mono(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def is_epi(self) -> bool:
        return len(set(self.table)) == num_vertices(self.kind, self.target)

    def is_identity(self) -> bool:
        return self.source == self.target and self.table == tuple(range(len(self.table)))

    def is_constant_vertex(self) -> bool:
        return len(set(self.table)) == 1

    def __call__(self, v):
        """Evaluate on a vertex (bit tuple or integer)."""
        verts = vertices(self.kind, self.source)
        return vertices(self.kind, self.target)[self.table[verts.index(v)]]

    def label(self) -> str:
        tgt = vertices(self.kind, self.target)
        return "[" + ",".join(vertex_label(self.kind, tgt[t]) for t in self.table) + "]"

    def __repr__(self):
        nm = f" {self.name}" if self.name else ""
        return f"<{self.kind}{nm} {self.source}->{self.target} {self.label()}>"


def compose(g: ShapeMorphism, f: ShapeMorphism) -> ShapeMorphism:
    """``g o f`` (apply ``f`` first)."""
    if f.kind != g.kind or f.target != g.source:
        raise CompositionError(f"cannot compose {g!r} after {f!r}")
    return ShapeMorphism(f.kind, f.source, g.target, tuple(g.table[v] for v in f.table))


def from_function(kind: str, m: int, n: int, fn) -> ShapeMorphism:
    src, tgt = vertices(kind, m), vertices(kind, n)
    index = {v: i for i, v in enumerate(tgt)}
    return ShapeMorphism(kind, m, n, tuple(index[fn(v)] for v in src))


def identity(kind: str, n: int) -> ShapeMorphism:
    return ShapeMorphism(kind, n, n, tuple(range(num_vertices(kind, n))))


def constant(kind: str, m: int, n: int, vertex_index: int) -> ShapeMorphism:
    return ShapeMorphism(kind, m, n, (vertex_index,) * num_vertices(kind, m))


# -- generators ---------------------------------------------------------------

def face(kind: str, n: int, i: int, e: int | None = None) -> ShapeMorphism:
    """Codimension-one face into the object of dimension ``n``.

    Cubes: ``d{i}_{e}`` inserts the constant ``e`` at coordinate ``i`` (1-based).
    Simplices: ``d{i}`` skips vertex ``i`` (0-based).
    """
    if kind == "simplex":
        if not 0 <= i <= n:
            raise DomainError("face index out of range")
        f = from_function(kind, n - 1, n, lambda v: v if v < i else v + 1)
        return ShapeMorphism(kind, n - 1, n, f.table, f"d{i}")
    if not 1 <= i <= n or e not in (0, 1):
        raise DomainError("face index out of range")
    f = from_function(kind, n - 1, n, lambda v: v[: i - 1] + (e,) + v[i - 1:])
    return ShapeMorphism(kind, n - 1, n, f.table, f"d{i}_{e}")


def degeneracy(kind: str, n: int, i: int) -> ShapeMorphism:
    """Degeneracy ``s{i}`` into the object of dimension ``n`` (source dim ``n+1``).

    Cubes: forget coordinate ``i`` (1-based, ``1 <= i <= n+1``).
    Simplices: repeat vertex ``i`` (0-based, ``0 <= i <= n``).
    """
    if kind == "simplex":
        if not 0 <= i <= n:
            raise DomainError("degeneracy index out of range")
        f = from_function(kind, n + 1, n, lambda v: v if v <= i else v - 1)
        return ShapeMorphism(kind, n + 1, n, f.table, f"s{i}")
    if not 1 <= i <= n + 1:
        raise DomainError("degeneracy index out of range")
    f = from_function(kind, n + 1, n, lambda v: v[: i - 1] + v[i:])
    return ShapeMorphism(kind, n + 1, n, f.table, f"s{i}")


def connection(n: int, i: int) -> ShapeMorphism:
    """Connection ``g{i}``: ``C_{n+1} -> C_n`` merging coordinates ``i, i+1`` by max."""
    if not 1 <= i <= n:
        raise DomainError("connection index out of range")
    f = from_function("cube_conn", n + 1, n,
                      lambda v: v[: i - 1] + (max(v[i - 1], v[i]),) + v[i + 1:])
    return ShapeMorphism("cube_conn", n + 1, n, f.table, f"g{i}")


@lru_cache(maxsize=None)
def faces_into(kind: str, n: int) -> tuple[ShapeMorphism, ...]:
    """All codimension-one faces into dimension ``n`` in canonical name order."""
    if n == 0:
        return ()
    if kind == "simplex":
        return tuple(face(kind, n, i) for i in range(n + 1))
    return tuple(face(kind, n, i, e) for i in range(1, n + 1) for e in (0, 1))


@lru_cache(maxsize=None)
def degeneracies_into(kind: str, n: int) -> tuple[ShapeMorphism, ...]:
    """Degeneracies and connections with target dimension ``n``."""
    if kind == "simplex":
        return tuple(degeneracy(kind, n, i) for i in range(n + 1))
    out = [degeneracy(kind, n, i) for i in range(1, n + 2)]
    if kind == "cube_conn":
        out += [connection(n, i) for i in range(1, n + 1)]
    return tuple(out)


def generators(kind: str, maxdim: int) -> list[ShapeMorphism]:
    """Elementary generators between objects of dimension ``<= maxdim``."""
    gens = []
    for n in range(maxdim + 1):
        gens += faces_into(kind, n)
        if n + 1 <= maxdim:
            gens += degeneracies_into(kind, n)
    return gens


def generator_by_name(kind: str, name: str, target_dim: int) -> ShapeMorphism:
    """Resolve a generator name acting on sections of dimension ``target_dim``."""
    if name.startswith("d"):
        if kind == "simplex":
            return face(kind, target_dim, int(name[1:]))
        i, e = name[1:].split("_")
        return face(kind, target_dim, int(i), int(e))
    if name.startswith("s"):
        return degeneracy(kind, target_dim, int(name[1:]))
    if name.startswith("g") and kind == "cube_conn":
        return connection(target_dim, int(name[1:]))
    raise DomainError(f"unknown generator {name!r} for kind {kind}")


# -- hom-sets by generator closure -------------------------------------------

@dataclass
class _Closure:
    homs: dict
    words: dict


@lru_cache(maxsize=None)
def _closure(kind: str, maxdim: int) -> _Closure:
    """All morphisms among objects of dim ``<= maxdim`` with a generator word each.

    Every morphism factors as a split epi followed by a mono through an object of
    no larger dimension, so intermediate objects never exceed ``maxdim``.
    """
    gens = generators(kind, maxdim)
    by_source: dict[int, list] = {}
    for g in gens:
        by_source.setdefault(g.source, []).append(g)
    words: dict = {}
    frontier = []
    for n in range(maxdim + 1):
        idn = identity(kind, n)
        words[idn] = ()
        frontier.append(idn)
    while frontier:
        nxt = []
        for f in frontier:
            for g in by_source.get(f.target, ()):
                h = compose(g, f)
                if h not in words:
                    words[h] = words[f] + (g,)
                    nxt.append(h)
        frontier = nxt
    homs: dict = {}
    for f in words:
        homs.setdefault((f.source, f.target), []).append(f)
    for key in homs:
        homs[key].sort(key=lambda f: f.table)
    return _Closure(homs, words)


def enumerate_homs(a: ShapeObject, b: ShapeObject) -> list[ShapeMorphism]:
    """Exact hom-set ``a -> b`` in canonical (lexicographic table) order."""
    if a.kind != b.kind:
        raise DomainError("objects of different kinds")
    return homs(a.kind, a.dim, b.dim)


def homs(kind: str, m: int, n: int) -> list[ShapeMorphism]:
    return list(_closure(kind, max(m, n)).homs.get((m, n), []))


def word(f: ShapeMorphism) -> tuple:
    """Generators ``(g1, ..., gk)`` with ``f = gk o ... o g1``."""
    return _closure(f.kind, max(f.source, f.target)).words[f]


def is_morphism(f: ShapeMorphism) -> bool:
    return f in _closure(f.kind, max(f.source, f.target)).words


# -- Reedy structure ------------------------------------------------------------

def reedy_factorize(f: ShapeMorphism) -> tuple[ShapeMorphism, ShapeMorphism]:
    """Return ``(minus, plus)`` with ``f = plus o minus``, minus split epi, plus mono."""
    image = sorted(set(f.table))
    kind = f.kind
    d = len(image) - 1 if kind == "simplex" else len(image).bit_length() - 1
    for plus in homs(kind, d, f.target):
        if sorted(plus.table) == image:
            for minus in homs(kind, f.source, d):
                if minus.is_epi() and compose(plus, minus) == f:
                    return minus, plus
    raise DomainError(f"no Reedy factorization for {f!r}")


def sections_of_epi(f: ShapeMorphism) -> list[ShapeMorphism]:
    """All ``g`` with ``f o g = id``; nonempty for split epis."""
    if not f.is_epi() or not is_morphism(f):
        raise DomainError(f"{f!r} is not in the degree-lowering class")
    idn = identity(f.kind, f.target)
    return [g for g in homs(f.kind, f.target, f.source) if compose(f, g) == idn]


def connection_unit_laws(n: int = 1) -> dict[str, bool]:
    """Evaluate the unit laws of the max-connection on tables."""
    g = connection(1, 1)
    left0 = face("cube_conn", 2, 1, 0)
    left1 = face("cube_conn", 2, 1, 1)
    return {
        "g(d0 x id) = id": compose(g, left0) == identity("cube_conn", 1),
        "g(d1 x id) = const1": compose(g, left1) == constant("cube_conn", 1, 1, 1),
    }


@dataclass
class EZReport:
    kind: str
    maxdim: int
    morphisms: int = 0
    factorization_failures: list = field(default_factory=list)
    ez1_failures: list = field(default_factory=list)
    ez2_failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.factorization_failures or self.ez1_failures or self.ez2_failures)

    def lines(self) -> list[str]:
        return [
            f"kind: {self.kind}",
            f"maxdim: {self.maxdim}",
            f"morphisms: {self.morphisms}",
            f"unique_reedy_factorization: {'pass' if not self.factorization_failures else 'fail'}",
            f"ez1_split_epis_have_sections: {'pass' if not self.ez1_failures else 'fail'}",
            f"ez2_sections_determine_epis: {'pass' if not self.ez2_failures else 'fail'}",
        ]


def verify_ez_axioms(kind: str, maxdim: int) -> EZReport:
    """Exhaustively check unique factorization, EZ1 and EZ2 up to ``maxdim``.

    Factorization uniqueness is checked by scanning every (epi, mono) pair
    through every intermediate object, independently of :func:`reedy_factorize`.
    """
    rep = EZReport(kind, maxdim)
    dims = range(maxdim + 1)
    epis = {(m, k): [f for f in homs(kind, m, k) if f.is_epi()] for m in dims for k in dims}
    monos = {(k, n): [f for f in homs(kind, k, n) if f.is_mono()] for k in dims for n in dims}
    for m in dims:
        for n in dims:
            for f in homs(kind, m, n):
                rep.morphisms += 1
                count = sum(1 for k in dims for e in epis[m, k] for p in monos[k, n]
                            if compose(p, e) == f)
                if count != 1:
                    rep.factorization_failures.append((f, count))
    for (m, k), es in epis.items():
        for e in es:
            if not sections_of_epi(e):
                rep.ez1_failures.append(e)
    for m in dims:
        same_source = [e for k in dims for e in epis[m, k]]
        secs = {e: frozenset(sections_of_epi(e)) for e in same_source}
        for e1, e2 in itertools.combinations(same_source, 2):
            if secs[e1] == secs[e2]:
                rep.ez2_failures.append((e1, e2))
    return rep
