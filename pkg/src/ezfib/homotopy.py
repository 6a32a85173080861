"""Cylinders, homotopies, boundary-equivalence and homotopy inverses.

The interval is the representable object of dimension one.  A homotopy
``h: I x X -> Y`` has ends ``h_e`` obtained by restricting along the two
constant sections of ``I``.  Every search here is an extension problem
solved by :func:`ezfib.lifting.extensions`, hence exhaustive.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import shape as sh
from .lifting import FAIL, LIMITED, PASS, Verdict, extensions, first_extension
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    boundary_subobject,
    fiber,
    identity_map,
    product,
    representable,
    yoneda_map,
)


def interval(kind: str, N: int) -> Presheaf:
    return representable(kind, 1, N)


def _end_value(i_morphism) -> int | None:
    """Which endpoint a section of the interval sits at, if constant."""
    t = i_morphism.table
    return t[0] if len(set(t)) == 1 else None


@dataclass
class Cylinder:
    base: Presheaf
    cyl: Presheaf
    proj: PresheafMorphism            # I x X -> X
    to_interval: PresheafMorphism     # I x X -> I
    ends: tuple                       # (X -> I x X at 0, at 1)
    end_of: tuple                     # per dim, per section: 0/1/None


def cylinder(X: Presheaf) -> Cylinder:
    """``I x X`` with both end inclusions and the projection."""
    cached = X.__dict__.get("_cylinder")
    if cached is not None:
        return cached
    I = interval(X.kind, X.N)
    P, pi, px = product(I, X)
    ihoms = [sh.homs(X.kind, d, 1) for d in range(X.N + 1)]
    end_of = tuple(tuple(_end_value(ihoms[d][pi.levels[d][k]]) for k in range(P.size(d)))
                   for d in range(X.N + 1))
    ends = []
    for e in (0, 1):
        levels = []
        for d in range(X.N + 1):
            c = ihoms[d].index(sh.constant(X.kind, d, 1, e))
            levels.append(tuple(c * X.size(d) + j for j in range(X.size(d))))
        ends.append(PresheafMorphism(X, P, tuple(levels)))
    cyl = Cylinder(X, P, px, pi, tuple(ends), end_of)
    X.__dict__["_cylinder"] = cyl
    return cyl


def end(h: PresheafMorphism, e: int) -> PresheafMorphism:
    """``h_e``: restriction of a homotopy ``I x X -> Y`` to ``{e} x X``."""
    X = _cylinder_base(h.source)
    return cylinder(X).ends[e].then(h)


def _cylinder_base(C: Presheaf) -> Presheaf:
    base = C.__dict__.get("_cylinder_of")
    if base is None:
        raise ValueError("not a cylinder built by this module")
    return base


def _register(cyl: Cylinder):
    cyl.cyl.__dict__["_cylinder_of"] = cyl.base
    return cyl


def homotopies(A: Presheaf, X: Presheaf, ends: dict | None = None,
               constant_on: tuple | None = None, base: tuple | None = None,
               rng: random.Random | None = None):
    """Enumerate homotopies ``I x A -> X``.

    ``ends`` maps ``0``/``1`` to prescribed maps ``A -> X``; ``constant_on``
    is ``(S, g)`` with ``S`` a subpresheaf of ``A`` and ``g: A -> X`` whose
    values on ``S`` the homotopy must keep constant; ``base = (q, b)`` with
    ``q: X -> B`` and ``b: A -> B`` keeps the homotopy over ``B``.
    """
    cyl = _register(cylinder(A))
    C = cyl.cyl
    ends = ends or {}
    fixed = {}
    pa = cyl.proj.levels
    for d in range(C.N + 1):
        for k in range(C.size(d)):
            a = pa[d][k]
            val = None
            if constant_on is not None and a in constant_on[0].keep[d]:
                val = constant_on[1].levels[d][a]
            e = cyl.end_of[d][k]
            if e is not None and e in ends:
                v2 = ends[e].levels[d][a]
                if val is not None and val != v2:
                    return
                val = v2
            if val is not None:
                fixed[(d, k)] = val
    bottom = None
    if base is not None:
        q, b = base
        bottom = (q, cyl.proj.then(b))
    yield from extensions(C, X, fixed, bottom, rng)


def constant_homotopy(f: PresheafMorphism) -> PresheafMorphism:
    cyl = _register(cylinder(f.source))
    return cyl.proj.then(f)


# -- boundary equivalence -----------------------------------------------------------------

@dataclass
class BoundaryEquivalenceWitness:
    dim: int
    x: int
    y: int
    h: PresheafMorphism


def _boundary_key(X: Presheaf, n: int, j: int, p: PresheafMorphism | None):
    return (X.faces(n, j), p.levels[n][j] if p is not None else None)


def boundary_homotopy(X: Presheaf, n: int, x: int, y: int,
                      p: PresheafMorphism | None = None, rng=None) -> PresheafMorphism | None:
    """Search ``h: I x a -> X`` constant on the boundary with ``h_0 = x``, ``h_1 = y``.

    With ``p: X -> Y`` the homotopy is required to lie over the constant
    homotopy at ``p(x)`` (boundary-equivalence in the slice over ``Y``).
    Runs inside the truncation; for ``n >= N`` this is only a necessary
    condition.
    """
    if _boundary_key(X, n, x, p) != _boundary_key(X, n, y, p):
        return None
    A = representable(X.kind, n, X.N)
    dA = boundary_subobject(X.kind, n, X.N)
    ux, uy = yoneda_map(X, n, x), yoneda_map(X, n, y)
    base = None
    if p is not None:
        base = (p, yoneda_map(p.target, n, p.levels[n][x]))
    return next(homotopies(A, X, {0: ux, 1: uy}, (dA, ux), base, rng), None)


def boundary_equivalent(X: Presheaf, n: int, x: int, y: int,
                        p: PresheafMorphism | None = None) -> Verdict:
    """Boundary-equivalence of two sections over the object of dimension ``n``."""
    if n >= X.N:
        return Verdict(LIMITED, None, [f"dimension {n} needs data above truncation {X.N}"])
    h = boundary_homotopy(X, n, x, y, p)
    if h is None:
        return Verdict(FAIL, None, [], 1)
    return Verdict(PASS, BoundaryEquivalenceWitness(n, x, y, h), [], 1)


@dataclass
class Partition:
    dim: int
    blocks: list
    reflexive: bool = True
    symmetric: bool = True
    transitive: bool = True
    limited: bool = False
    notes: list = field(default_factory=list)

    @property
    def is_equivalence(self) -> bool:
        return self.reflexive and self.symmetric and self.transitive

    def block_of(self, j: int) -> tuple:
        for b in self.blocks:
            if j in b:
                return b
        raise KeyError(j)


def relation_matrix(X: Presheaf, n: int, p: PresheafMorphism | None = None) -> dict:
    """All related ordered pairs ``(x, y)`` (same boundary, homotopy found)."""
    groups: dict = {}
    for j in range(X.size(n)):
        groups.setdefault(_boundary_key(X, n, j, p), []).append(j)
    rel = {}
    for members in groups.values():
        for x in members:
            for y in members:
                rel[(x, y)] = boundary_homotopy(X, n, x, y, p) is not None
    return rel


def partition_by_boundary_equivalence(X: Presheaf, n: int,
                                      p: PresheafMorphism | None = None) -> Partition:
    """Blocks of boundary-equivalent sections of dimension ``n``.

    The relation is computed on every pair with equal boundary and checked
    to be reflexive, symmetric and transitive; blocks are the connected
    components in canonical order.  At ``n >= N`` the truncated relation is
    used and the partition is flagged ``limited``.
    """
    rel = relation_matrix(X, n, p)
    part = Partition(n, [], limited=n >= X.N)
    if part.limited:
        part.notes.append(f"dimension {n} uses the relation truncated at {X.N}")
    elems = range(X.size(n))
    part.reflexive = all(rel.get((x, x), False) for x in elems)
    part.symmetric = all(rel.get((y, x), False) for (x, y), v in rel.items() if v)
    part.transitive = all(rel.get((x, z), False)
                          for (x, y), v in rel.items() if v
                          for (y2, z), w in rel.items() if w and y2 == y)
    parent = list(elems)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (x, y), v in rel.items():
        if v:
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    blocks: dict = {}
    for x in elems:
        blocks.setdefault(find(x), []).append(x)
    part.blocks = [tuple(b) for b in sorted(blocks.values())]
    return part


# -- maps and homotopy equivalences ---------------------------------------------------------

def homotopy_between(u: PresheafMorphism, v: PresheafMorphism,
                     over: tuple | None = None) -> PresheafMorphism | None:
    """A homotopy ``h`` with ``h_0 = u`` and ``h_1 = v``.

    ``over = (q, b)`` with ``q: target -> B`` and ``b: source -> B`` asks for a
    homotopy over ``B``.
    """
    return next(homotopies(u.source, u.target, {0: u, 1: v}, None, over), None)


@dataclass
class HomotopyInverse:
    g: PresheafMorphism
    h: PresheafMorphism  # 1_X => g f
    k: PresheafMorphism  # 1_Y => f g


def homotopy_inverse_search(f: PresheafMorphism, over: tuple | None = None,
                            limit: int | None = None) -> HomotopyInverse | None:
    """Search ``g`` with homotopies ``1_X => g f`` and ``1_Y => f g``.

    ``over = (pX, pY)`` restricts everything to maps and homotopies over a
    common base.  Exhaustive unless ``limit`` caps the candidates ``g``.
    """
    X, Y = f.source, f.target
    base_g = (over[0], over[1]) if over is not None else None
    for count, g in enumerate(extensions(Y, X, None, base_g)):
        if limit is not None and count >= limit:
            return None
        gf, fg = f.then(g), g.then(f)
        h = homotopy_between(identity_map(X), gf, (over[0], over[0]) if over else None)
        if h is None:
            continue
        k = homotopy_between(identity_map(Y), fg, (over[1], over[1]) if over else None)
        if k is None:
            continue
        return HomotopyInverse(g, h, k)
    return None


def induced_fiber_map(f: PresheafMorphism, p: PresheafMorphism, q: PresheafMorphism,
                      n: int, s: int):
    """``a x_S X -> a x_S Y`` over ``a`` for the section ``s`` of dimension ``n``."""
    FX, ax, xx = fiber(p, n, s)
    FY, ay, yy = fiber(q, n, s)
    index = [{(ay.levels[d][k], yy.levels[d][k]): k for k in range(FY.size(d))}
             for d in range(FX.N + 1)]
    levels = tuple(tuple(index[d][(ax.levels[d][k], f.levels[d][xx.levels[d][k]])]
                         for k in range(FX.size(d))) for d in range(FX.N + 1))
    return PresheafMorphism(FX, FY, levels), ax, ay


def is_weak_equivalence_fiberwise(f: PresheafMorphism, p: PresheafMorphism,
                                  q: PresheafMorphism, sections=None) -> Verdict:
    """``f: X -> Y`` over ``S`` via ``p``, ``q``: every fiber map over a section
    ``a -> S`` must be a homotopy equivalence over ``a``."""
    S = p.target
    if f.then(q) != p:
        return Verdict(FAIL, "map does not commute with the structure maps")
    secs = sections if sections is not None else list(S.sections())
    checked = 0
    for n, s in secs:
        fm, ax, ay = induced_fiber_map(f, p, q, n, s)
        checked += 1
        if homotopy_inverse_search(fm, (ax, ay)) is None:
            return Verdict(FAIL, f"fiber over {S.ids[n][s]} admits no homotopy inverse",
                           checked=checked)
    return Verdict(PASS, None, [f"{checked} fibers certified up to dimension {S.N}"], checked)


def is_homotopy_equivalence(f: PresheafMorphism) -> bool:
    return homotopy_inverse_search(f) is not None


# -- agreeing homotopies: sampling and pasting ---------------------------------------------

def random_homotopy(X: Presheaf, n: int, rng: random.Random) -> PresheafMorphism | None:
    A = representable(X.kind, n, X.N)
    return next(homotopies(A, X, rng=rng), None)


def agreeing_partner(h: PresheafMorphism, n: int, eps: int,
                     rng: random.Random) -> PresheafMorphism | None:
    """Random ``k`` agreeing with ``h`` on ``I x boundary U {1-eps} x a``."""
    X = h.target
    A = representable(X.kind, n, X.N)
    cyl = cylinder(A)
    dA = boundary_subobject(X.kind, n, X.N)
    fixed = {}
    for d in range(cyl.cyl.N + 1):
        for k in range(cyl.cyl.size(d)):
            a = cyl.proj.levels[d][k]
            if a in dA.keep[d] or cyl.end_of[d][k] == 1 - eps:
                fixed[(d, k)] = h.levels[d][k]
    return first_extension(cyl.cyl, X, fixed, None, rng)


def compose_boundary_homotopies(X: Presheaf, n: int, h: PresheafMorphism,
                                k: PresheafMorphism) -> PresheafMorphism | None:
    """Paste two boundary-constant homotopies ``x ~ y`` and ``y ~ z`` of
    ``n``-sections into one ``x ~ z`` by filling an open box in ``I x I x a``.

    The square has ``h`` on the bottom edge, ``k`` on the right edge and the
    constant homotopy at ``x`` on the left edge; the filler's top edge is the
    composite.  Needs ``n + 2 <= N``.
    """
    A = representable(X.kind, n, X.N)
    inner = _register(cylinder(A))
    outer = cylinder(inner.cyl)
    C = outer.cyl
    dA = boundary_subobject(X.kind, n, X.N)
    x_map = end(h, 0)
    fixed = {}
    for d in range(C.N + 1):
        for c in range(C.size(d)):
            s_end = outer.end_of[d][c]
            ta = outer.proj.levels[d][c]          # section of I x A
            t_end = inner.end_of[d][ta]
            a = inner.proj.levels[d][ta]
            if a in dA.keep[d] or s_end == 0:
                fixed[(d, c)] = x_map.levels[d][a]
            elif t_end == 0:
                # bottom edge: (s, 0, a) -> h(s, a)
                fixed[(d, c)] = h.levels[d][_swap_index(inner, outer, d, c)]
            elif s_end == 1:
                fixed[(d, c)] = k.levels[d][ta]
    G = first_extension(C, X, fixed)
    if G is None:
        return None
    # top edge: (s, 1, a) -> G
    top = []
    for d in range(C.N + 1):
        row = []
        for ia in range(inner.cyl.size(d)):
            s_sec = inner.to_interval.levels[d][ia]
            a = inner.proj.levels[d][ia]
            one = inner.ends[1].levels[d][a]
            row.append(G.levels[d][s_sec * inner.cyl.size(d) + one])
        top.append(tuple(row))
    return PresheafMorphism(inner.cyl, X, tuple(top))


def _swap_index(inner: Cylinder, outer: Cylinder, d: int, c: int) -> int:
    """For ``c = (s, (t, a))`` return the index of ``(s, a)`` in ``I x A``."""
    s_sec = outer.to_interval.levels[d][c]
    ta = outer.proj.levels[d][c]
    a = inner.proj.levels[d][ta]
    return s_sec * inner.base.size(d) + a
