"""Hofmann-Streicher classification at a finite size bound.

An element of the universe over the object ``a`` is a presheaf on the slice
over ``a``: for every morphism ``g: c -> a`` a finite set ``{0, ..., m-1}``
of elements (``m < kappa``) and restriction functions along every ``h``.
Restricting an element along ``f: b -> a`` just precomposes with ``f``, so
classifying maps are natural on the nose.  The universe itself is never
built; only its elements and maps into it are.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import shape as sh
from .homotopy import homotopy_inverse_search
from .lifting import PASS, FAIL, Verdict, anodynes, extensions, has_rlp, is_fibration
from .minimal import Certificate, PreconditionError, _check, glue_equivalence_extension
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    Subpresheaf,
    all_morphisms,
    fiber,
    identity_map,
    is_cartesian,
    pullback,
    representable,
    rep_section,
    tuple_id,
)

DEFAULT_KAPPA = 8


class KappaError(ValueError):
    """A fiber has at least ``kappa`` sections."""


# -- elements ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SmallPresheaf:
    """A presheaf on the slice over the object of dimension ``dim``.

    ``sizes[c][g]`` is the number of elements over the ``g``-th morphism
    ``c -> dim``; ``action[f][g]`` is the restriction from ``g`` (a morphism
    into ``dim`` with source ``f.target``) to ``g o f``.
    """

    kind: str
    N: int
    dim: int
    sizes: tuple
    action: tuple  # ((f, ((k -> k') per g)), ...) in all_morphisms order

    def restrict(self, f: sh.ShapeMorphism) -> "SmallPresheaf":
        """Base change along ``f: b -> dim``: the element at ``g`` becomes the one at ``f g``."""
        b = f.source
        gidx = [[rep_section(self.kind, self.dim, self.N, sh.compose(f, g))
                 for g in sh.homs(self.kind, c, b)] for c in range(self.N + 1)]
        sizes = tuple(tuple(self.sizes[c][k] for k in gidx[c]) for c in range(self.N + 1))
        table = dict(self.action)
        action = tuple((h, tuple(table[h][gi] for gi in gidx[h.target]))
                       for h in all_morphisms(self.kind, self.N))
        return SmallPresheaf(self.kind, self.N, b, sizes, action)

    def max_fiber(self) -> int:
        return max((m for level in self.sizes for m in level), default=0)

    def global_sections(self) -> int:
        """Elements over the identity, i.e. the fiber over the base object itself."""
        return self.sizes[self.dim][rep_section(self.kind, self.dim, self.N,
                                                sh.identity(self.kind, self.dim))]

    def to_map(self) -> PresheafMorphism:
        """Materialize as ``X -> a``."""
        kind, N, n = self.kind, self.N, self.dim
        A = representable(kind, n, N)
        secs = [[(g, k) for g in range(A.size(c)) for k in range(self.sizes[c][g])]
                for c in range(N + 1)]
        pos = [{s: i for i, s in enumerate(level)} for level in secs]
        ids = [tuple(tuple_id(A.ids[c][g], str(k)) for g, k in secs[c]) for c in range(N + 1)]
        table = dict(self.action)

        def restrict(f, i):
            g, k = secs[f.target][i]
            return pos[f.source][(A.act(f, g), table[f][g][k])]

        X = Presheaf.build_from_generators(kind, N, ids, restrict)
        return PresheafMorphism(X, A, tuple(tuple(g for g, _ in secs[c]) for c in range(N + 1)))


def small_from_map(p: PresheafMorphism, n: int, kappa: int = DEFAULT_KAPPA,
                   where: str = "") -> SmallPresheaf:
    """Read ``p: X -> a`` (``a`` of dimension ``n``) as an element over ``a``."""
    X = p.source
    kind, N = X.kind, X.N
    A = representable(kind, n, N)
    if p.target != A:
        raise ValueError("structure map must land in the representable")
    over = [[[] for _ in range(A.size(c))] for c in range(N + 1)]
    for c in range(N + 1):
        for x in range(X.size(c)):
            over[c][p.levels[c][x]].append(x)
    for c in range(N + 1):
        for g in range(A.size(c)):
            if len(over[c][g]) >= kappa:
                raise KappaError(f"fiber over {A.ids[c][g]}{where} has {len(over[c][g])} "
                                 f"sections, kappa = {kappa}")
    pos = [{x: k for level in over[c] for k, x in enumerate(level)} for c in range(N + 1)]
    sizes = tuple(tuple(len(l) for l in over[c]) for c in range(N + 1))
    action = tuple((f, tuple(tuple(pos[f.source][X.act(f, x)] for x in over[f.target][g])
                             for g in range(A.size(f.target))))
                   for f in all_morphisms(kind, N))
    return SmallPresheaf(kind, N, n, sizes, action)


def terminal_element(kind: str, n: int, N: int) -> SmallPresheaf:
    return small_from_map(identity_map(representable(kind, n, N)), n)


@dataclass
class UniverseMembership:
    element: SmallPresheaf
    verdict: Verdict

    @property
    def member(self) -> bool:
        return self.verdict.passed


def is_in_universe(e: SmallPresheaf) -> UniverseMembership:
    """Fibration elements: ``X -> a`` has the right lifting property against anodynes."""
    return UniverseMembership(e, has_rlp(e.to_map(), anodynes(e.N)))


# -- classifying maps -------------------------------------------------------------------

@dataclass
class ClassifyingMap:
    base: Presheaf
    values: tuple  # per dimension, per section: SmallPresheaf
    kappa: int = DEFAULT_KAPPA

    def __call__(self, d: int, s: int) -> SmallPresheaf:
        return self.values[d][s]

    def naturality_failures(self, limit: int = 1) -> list[str]:
        Y = self.base
        out = []
        for f in all_morphisms(Y.kind, Y.N):
            for s in range(Y.size(f.target)):
                if self.values[f.source][Y.act(f, s)] != self.values[f.target][s].restrict(f):
                    out.append(f"{f!r} on {Y.ids[f.target][s]}")
                    if len(out) >= limit:
                        return out
        return out

    def is_natural(self) -> bool:
        return not self.naturality_failures()

    def restrict_along(self, v: PresheafMorphism) -> "ClassifyingMap":
        """``y o v``."""
        return ClassifyingMap(v.source, tuple(
            tuple(self.values[d][v.levels[d][s]] for s in range(v.source.size(d)))
            for d in range(v.source.N + 1)), self.kappa)

    def membership(self) -> Verdict:
        """All values in the fibration part of the universe."""
        checked = 0
        seen = {}
        for d, level in enumerate(self.values):
            for s, e in enumerate(level):
                if e not in seen:
                    seen[e] = is_in_universe(e).member
                checked += 1
                if not seen[e]:
                    return Verdict(FAIL, f"value at {self.base.ids[d][s]} is not a fibration",
                                   checked=checked)
        return Verdict(PASS, None, [], checked)

    def __eq__(self, other):
        return (isinstance(other, ClassifyingMap) and self.base == other.base
                and self.values == other.values)


def hs_classify(p: PresheafMorphism, kappa: int = DEFAULT_KAPPA) -> ClassifyingMap:
    """Send each section ``s: a -> Y`` to the fiber ``a x_Y X -> a``."""
    Y = p.target
    values = []
    for d in range(Y.N + 1):
        row = []
        for s in range(Y.size(d)):
            _, to_a, _ = fiber(p, d, s)
            row.append(small_from_map(to_a, d, kappa, f" of section {Y.ids[d][s]}"))
        values.append(tuple(row))
    return ClassifyingMap(Y, tuple(values), kappa)


def _identity_slot(kind, d, N):
    return rep_section(kind, d, N, sh.identity(kind, d))


def realize(y: ClassifyingMap) -> PresheafMorphism:
    """The classified map: sections over ``c`` are pairs ``(s, k)`` with ``k`` a
    global element of ``y(s)``."""
    Y = y.base
    kind, N = Y.kind, Y.N
    secs = [[(s, k) for s in range(Y.size(c))
             for k in range(y.values[c][s].global_sections())] for c in range(N + 1)]
    pos = [{sk: i for i, sk in enumerate(level)} for level in secs]
    ids = [tuple(tuple_id(Y.ids[c][s], str(k)) for s, k in secs[c]) for c in range(N + 1)]
    tables = [{f: a for f, a in y.values[c][s].action}
              for c in range(N + 1) for s in range(Y.size(c))]
    offset = [sum(Y.size(e) for e in range(c)) for c in range(N + 1)]

    def restrict(f, i):
        s, k = secs[f.target][i]
        c = f.target
        act = tables[offset[c] + s][f][_identity_slot(kind, c, N)]
        return pos[f.source][(Y.act(f, s), act[k])]

    X = Presheaf.build_from_generators(kind, N, ids, restrict)
    return PresheafMorphism(X, Y, tuple(tuple(s for s, _ in secs[c]) for c in range(N + 1)))


def canonical_iso(p: PresheafMorphism, kappa: int = DEFAULT_KAPPA) -> PresheafMorphism:
    """The isomorphism ``X -> realize(hs_classify(p))`` over the base."""
    X, Y = p.source, p.target
    R = realize(hs_classify(p, kappa))
    pos = [{sid: i for i, sid in enumerate(R.source.ids[c])} for c in range(X.N + 1)]
    levels = []
    for c in range(X.N + 1):
        rank: dict = {}
        row = []
        for x in range(X.size(c)):
            s = p.levels[c][x]
            k = rank.get(s, 0)
            rank[s] = k + 1
            row.append(pos[c][tuple_id(Y.ids[c][s], str(k))])
        levels.append(tuple(row))
    return PresheafMorphism(X, R.source, tuple(levels))


# -- extension of classifying maps ------------------------------------------------------

def extend_classifier_along_mono(v: PresheafMorphism, p_ext: PresheafMorphism,
                                 y: ClassifyingMap, top: PresheafMorphism | None = None,
                                 fibrant: bool = False) -> ClassifyingMap:
    """Extend ``y`` on ``Y`` to ``y'`` on ``Y'`` classifying ``p_ext: X' -> Y'``.

    ``top: realize(y) -> X'`` exhibits ``realize(y)`` as the pullback of
    ``p_ext`` along ``v``; it is searched for when omitted.  Values over the
    image of ``v`` are those of ``y``; elsewhere the fibers of ``p_ext`` are
    used, with element names transported through ``top``.  With
    ``fibrant=True`` ``p_ext`` must be a fibration and every value is checked
    to lie in the fibration part.
    """
    if not v.is_mono():
        raise PreconditionError("hypothesis failed: v is a monomorphism")
    if y.base != v.source:
        raise PreconditionError("hypothesis failed: classifier lives on the domain of v")
    Y2, X2 = v.target, p_ext.source
    kind, N = Y2.kind, Y2.N
    R = realize(y)
    if top is None:
        P, to_y, to_x = pullback(v, p_ext)
        iso = next((f for f in extensions(R.source, P, base=(to_y, R)) if f.is_iso()), None)
        if iso is None:
            raise PreconditionError("hypothesis failed: y classifies the pullback of p'")
        top = iso.then(to_x)
    if not is_cartesian(top, R, p_ext, v):
        raise PreconditionError("hypothesis failed: square is cartesian")
    if fibrant and not is_fibration(p_ext).passed:
        raise PreconditionError("hypothesis failed: p' is a fibration")
    pre = [{v.levels[d][s]: s for s in range(v.source.size(d))} for d in range(N + 1)]
    # names[d][u]: list of sections of X2 over u, in element-name order
    names = []
    for d in range(N + 1):
        over = [[] for _ in range(Y2.size(d))]
        for x in range(X2.size(d)):
            over[p_ext.levels[d][x]].append(x)
        for u, s in pre[d].items():
            n = y.values[d][s].global_sections()
            over[u] = [None] * n
        names.append(over)
    for d in range(N + 1):
        for i, (s, k) in enumerate(_realized_pairs(R, d)):
            names[d][v.levels[d][s]][k] = top.levels[d][i]
    lookup = [[{x: k for k, x in enumerate(names[d][u])} for u in range(Y2.size(d))]
              for d in range(N + 1)]
    values = []
    for c in range(N + 1):
        row = []
        for s2 in range(Y2.size(c)):
            if s2 in pre[c]:
                row.append(y.values[c][pre[c][s2]])
                continue
            hs = [sh.homs(kind, d, c) for d in range(N + 1)]
            at = [[Y2.act(g, s2) for g in hs[d]] for d in range(N + 1)]
            sizes = tuple(tuple(len(names[d][u]) for u in at[d]) for d in range(N + 1))
            action = tuple((f, tuple(tuple(lookup[f.source][at[f.source][_after(kind, c, N, g, f)]]
                                           [X2.act(f, x)] for x in names[f.target][u])
                                     for g, u in zip(hs[f.target], at[f.target])))
                           for f in all_morphisms(kind, N))
            e = SmallPresheaf(kind, N, c, sizes, action)
            if e.max_fiber() >= y.kappa:
                raise KappaError(f"fiber over {Y2.ids[c][s2]} exceeds kappa = {y.kappa}")
            row.append(e)
        values.append(tuple(row))
    out = ClassifyingMap(Y2, tuple(values), y.kappa)
    if fibrant:
        m = out.membership()
        if not m.passed:
            raise PreconditionError(f"extension leaves the fibration part: {m.witness}")
    return out


def _after(kind, c, N, g, f):
    return rep_section(kind, c, N, sh.compose(g, f))


def _realized_pairs(R: PresheafMorphism, d: int):
    """The ``(s, k)`` pairs of a realized map, in section order."""
    out, rank = [], {}
    for s in R.levels[d]:
        k = rank.get(s, 0)
        rank[s] = k + 1
        out.append((s, k))
    return out


def realized_inclusion(v: PresheafMorphism, y: ClassifyingMap,
                       y_ext: ClassifyingMap) -> PresheafMorphism:
    """``realize(y) -> realize(y_ext)`` over ``v`` when ``y_ext o v = y``."""
    R, R2 = realize(y), realize(y_ext)
    pos = [{sk: i for i, sk in enumerate(_realized_pairs(R2, d))} for d in range(R.source.N + 1)]
    return PresheafMorphism(R.source, R2.source, tuple(
        tuple(pos[d][(v.levels[d][s], k)] for s, k in _realized_pairs(R, d))
        for d in range(R.source.N + 1)))


# -- relative hom and the equivalence subobject ---------------------------------------------

@dataclass
class RelHom:
    total: Presheaf
    structure: PresheafMorphism          # Hom_S(X, Y) -> S
    maps: dict = field(repr=False)       # (c, index) -> fiber map a x_S X -> a x_S Y
    fibers: dict = field(repr=False)     # (c, s) -> (FX, ax, FY, ay)


def rel_hom(p: PresheafMorphism, q: PresheafMorphism) -> RelHom:
    """``Hom_S(X, Y) -> S``: over ``s: a -> S`` the maps ``a x_S X -> a x_S Y`` over ``a``."""
    S = p.target
    if q.target != S:
        raise ValueError("rel_hom needs a common base")
    kind, N = S.kind, S.N
    fibers, enum = {}, {}
    for c in range(N + 1):
        for s in range(S.size(c)):
            FX, ax, _ = fiber(p, c, s)
            FY, ay, _ = fiber(q, c, s)
            fibers[(c, s)] = (FX, ax, FY, ay)
            maps = list(extensions(FX, FY, base=(ay, ax)))
            enum[(c, s)] = (maps, {m.levels: k for k, m in enumerate(maps)})
    secs = [[(s, k) for s in range(S.size(c)) for k in range(len(enum[(c, s)][0]))]
            for c in range(N + 1)]
    pos = [{sk: i for i, sk in enumerate(level)} for level in secs]
    ids = [tuple(tuple_id(S.ids[c][s], str(k)) for s, k in secs[c]) for c in range(N + 1)]

    def pair_index(F, to_a, to_x):
        return [{(to_a.levels[d][i], to_x.levels[d][i]): i for i in range(F.size(d))}
                for d in range(N + 1)]

    info = {}
    for key in fibers:
        FX, ax, xs = fiber(p, *key)
        FY, ay, ys = fiber(q, *key)
        info[key] = (ax, xs, pair_index(FX, ax, xs), ys, pair_index(FY, ay, ys))

    def restrict(f, i):
        c, b = f.target, f.source
        s, k = secs[c][i]
        phi = enum[(c, s)][0][k]
        s2 = S.act(f, s)
        _, _, x_at_c, y_of_c, _ = info[(c, s)]
        ax_b, xs_b, _, _, y_at_b = info[(b, s2)]
        levels = []
        for d in range(N + 1):
            bh = sh.homs(kind, d, b)
            row = []
            for i2 in range(len(xs_b.levels[d])):
                g = ax_b.levels[d][i2]
                fg = rep_section(kind, c, N, sh.compose(f, bh[g]))
                image = phi.levels[d][x_at_c[d][(fg, xs_b.levels[d][i2])]]
                row.append(y_at_b[d][(g, y_of_c.levels[d][image])])
            levels.append(tuple(row))
        return pos[b][(s2, enum[(b, s2)][1][tuple(levels)])]

    H = Presheaf.build_from_generators(kind, N, ids, restrict)
    structure = PresheafMorphism(H, S, tuple(tuple(s for s, _ in secs[c]) for c in range(N + 1)))
    maps = {(c, i): enum[(c, s)][0][k] for c in range(N + 1) for i, (s, k) in enumerate(secs[c])}
    return RelHom(H, structure, maps, fibers)


@dataclass
class EqSubobject:
    hom: RelHom
    sub: Subpresheaf
    total: Presheaf
    structure: PresheafMorphism   # Eq_S(X, Y) -> S
    inclusion: PresheafMorphism   # Eq_S(X, Y) -> Hom_S(X, Y)

    def is_action_closed(self) -> bool:
        return self.sub.is_closed()


def eq_subobject(p: PresheafMorphism, q: PresheafMorphism,
                 hom: RelHom | None = None) -> EqSubobject:
    """Sections of ``Hom_S(X, Y)`` whose fiber map is a homotopy equivalence over ``a``."""
    H = hom or rel_hom(p, q)
    S = p.target
    keep = []
    for c in range(S.N + 1):
        kept = set()
        for i in range(H.total.size(c)):
            s = H.structure.levels[c][i]
            _, ax, _, ay = H.fibers[(c, s)]
            if homotopy_inverse_search(H.maps[(c, i)], (ax, ay)) is not None:
                kept.add(i)
        keep.append(frozenset(kept))
    sub = Subpresheaf(H.total, tuple(keep))
    if not sub.is_closed():
        # keep the raw subset; the caller sees the failure via is_action_closed
        return EqSubobject(H, sub, H.total, H.structure, identity_map(H.total))
    E, inc = sub.to_presheaf()
    return EqSubobject(H, sub, E, inc.then(H.structure), inc)


def identity_section(p: PresheafMorphism, eq: EqSubobject | None = None) -> PresheafMorphism:
    """The section ``S -> Eq_S(X, X)`` picking the identity of every fiber."""
    eq = eq or eq_subobject(p, p)
    S = p.target
    H = eq.hom
    pos = [{j: k for k, j in enumerate(eq.inclusion.levels[d])} for d in range(S.N + 1)]
    levels = []
    for c in range(S.N + 1):
        row = []
        for s in range(S.size(c)):
            FX = H.fibers[(c, s)][0]
            ident = identity_map(FX).levels
            i = next(i for i in range(H.total.size(c))
                     if H.structure.levels[c][i] == s and H.maps[(c, i)].levels == ident)
            row.append(pos[c][i])
        levels.append(tuple(row))
    return PresheafMorphism(S, eq.total, tuple(levels))


# -- the univalence-witness pipeline ------------------------------------------------------

@dataclass
class UnivalenceWitness:
    y0: ClassifyingMap            # extended first classifier on Y'
    y1: ClassifyingMap            # given second classifier on Y'
    equivalence: PresheafMorphism  # realize(y0) -> realize(y1) over Y'
    certificate: Certificate

    def lines(self) -> list[str]:
        return self.certificate.lines()


def univalence_witness(y0: ClassifyingMap, y1: ClassifyingMap, e: PresheafMorphism,
                       j: PresheafMorphism, y1_ext: ClassifyingMap) -> UnivalenceWitness:
    """Extend ``(y0, y1, e)`` on ``Y`` along ``j: Y -> Y'`` given ``y1_ext`` on ``Y'``.

    ``e: realize(y0) -> realize(y1)`` must be a fiberwise equivalence over
    ``Y`` and ``y1_ext o j = y1``.  Returns ``y0'`` with ``y0' o j = y0`` and an
    equivalence ``realize(y0') -> realize(y1_ext)`` restricting to ``e``.
    """
    if y1_ext.restrict_along(j) != y1:
        raise PreconditionError("hypothesis failed: y1' extends y1")
    p0, p1, p1_ext = realize(y0), realize(y1), realize(y1_ext)
    i1 = realized_inclusion(j, y1, y1_ext)
    if j.is_iso() and j == identity_map(j.source):
        cert = Certificate([("input returned unchanged", _check(True))])
        return UnivalenceWitness(y0, y1, e, cert)
    if j.source.total == 0:
        y0_ext = y1_ext
        e_ext = identity_map(p1_ext.source)
        p0_ext_r = p1_ext
    else:
        g = glue_equivalence_extension(p0, e, p1, j, p1_ext, i1)
        if not g.certificate.passed:
            raise PreconditionError("gluing step failed its checks: " + "; ".join(g.lines()))
        y0_ext = extend_classifier_along_mono(j, g.p0_ext, y0, top=g.i0, fibrant=True)
        p0_ext_r = realize(y0_ext)
        into = realized_inclusion(j, y0, y0_ext)
        # realize(y0') -> X0' is the iso over Y' agreeing with i0 on realize(y0)
        iso = _iso_agreeing(p0_ext_r, g.p0_ext, into, g.i0)
        e_ext = iso.then(g.w_ext)
    from .homotopy import is_weak_equivalence_fiberwise
    into0 = realized_inclusion(j, y0, y0_ext)
    cert = Certificate([
        ("extended classifier is natural", _check(y0_ext.is_natural())),
        ("extended classifier restricts to y0", _check(y0_ext.restrict_along(j) == y0)),
        ("extended classifier lands in the fibration part", y0_ext.membership()),
        ("realized extension is a fibration", is_fibration(p0_ext_r)),
        ("extended map lies over the base", _check(e_ext.then(p1_ext) == p0_ext_r)),
        ("extended map restricts to e", _check(into0.then(e_ext) == e.then(i1))),
        ("extended map is a fiberwise weak equivalence",
         is_weak_equivalence_fiberwise(e_ext, p0_ext_r, p1_ext)),
    ])
    return UnivalenceWitness(y0_ext, y1_ext, e_ext, cert)


def _iso_agreeing(R: PresheafMorphism, p: PresheafMorphism, into: PresheafMorphism,
                  i0: PresheafMorphism) -> PresheafMorphism:
    """Iso ``R.source -> p.source`` over the base extending ``i0`` along ``into``."""
    fixed = {(d, into.levels[d][k]): i0.levels[d][k]
             for d in range(R.source.N + 1) for k in range(into.source.size(d))}
    for f in extensions(R.source, p.source, fixed, base=(p, R)):
        if f.is_iso():
            return f
    raise PreconditionError("realized extension is not isomorphic to the glued fibration")


def univalence_from_maps(p0: PresheafMorphism, e: PresheafMorphism, j: PresheafMorphism,
                         p1_ext: PresheafMorphism, kappa: int = DEFAULT_KAPPA) -> UnivalenceWitness:
    """Run :func:`univalence_witness` on concrete fibrations.

    ``p0: X0 -> Y``, ``p1_ext: X1' -> Y'`` and ``e: X0 -> X1'`` lying over
    ``j: Y -> Y'``; the classifiers are those of ``p0`` and ``p1_ext``.
    """
    if e.then(p1_ext) != p0.then(j):
        raise PreconditionError("hypothesis failed: e lies over j")
    y0 = hs_classify(p0, kappa)
    y1_ext = hs_classify(p1_ext, kappa)
    y1 = y1_ext.restrict_along(j)
    into = realized_inclusion(j, y1, y1_ext)
    back = canonical_iso(p0, kappa).inverse()
    fwd = canonical_iso(p1_ext, kappa)
    through = back.then(e).then(fwd)
    pre = [{k: i for i, k in enumerate(into.levels[d])} for d in range(into.source.N + 1)]
    e_r = PresheafMorphism(through.source, into.source, tuple(
        tuple(pre[d][k] for k in through.levels[d]) for d in range(through.source.N + 1)))
    return univalence_witness(y0, y1, e_r, j, y1_ext)
