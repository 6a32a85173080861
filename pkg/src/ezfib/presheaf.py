"""Finite, dimension-truncated presheaves over a shape kind.

A :class:`Presheaf` stores, for every dimension ``d <= N``, an ordered tuple
of section ids and, for every shape morphism ``f: a -> b`` with both
dimensions ``<= N``, the restriction table ``X_b -> X_a`` on section indices.
Sections are addressed internally as ``(dim, index)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

from . import shape as sh
from .shape import ShapeMorphism, ShapeObject


class PresheafError(ValueError):
    pass


class TruncationMismatch(PresheafError):
    pass


class NotMono(PresheafError):
    pass


@lru_cache(maxsize=None)
def all_morphisms(kind: str, N: int) -> tuple:
    out = []
    for m in range(N + 1):
        for n in range(N + 1):
            out.extend(sh.homs(kind, m, n))
    return tuple(out)


@lru_cache(maxsize=None)
def split_epis(kind: str, n: int) -> tuple:
    """Proper split epis out of dimension ``n`` with one chosen section each,
    ordered by increasing target dimension."""
    out = []
    for m in range(n):
        for p in sh.homs(kind, n, m):
            if p.is_epi():
                out.append((p, sh.sections_of_epi(p)[0]))
    return tuple(out)


def tuple_id(*parts: str) -> str:
    return "(" + ",".join(parts) + ")"


class Presheaf:
    """Immutable finite presheaf truncated at dimension ``N``."""

    def __init__(self, kind: str, N: int, ids, tables: dict):
        if kind not in sh.KINDS:
            raise PresheafError(f"unknown kind {kind!r}")
        self.kind = kind
        self.N = N
        self.ids = tuple(tuple(level) for level in ids)
        if len(self.ids) != N + 1:
            raise PresheafError("need one section list per dimension 0..N")
        self._tables = tables
        self._ez: dict = {}
        self._face_index: dict = {}

    # -- construction ----------------------------------------------------
    @classmethod
    def build(cls, kind: str, N: int, ids, restrict) -> "Presheaf":
        """Build from ``restrict(f, j) -> index`` giving the restriction of
        section ``j`` of dimension ``f.target`` along ``f``."""
        tables = {}
        for f in all_morphisms(kind, N):
            tables[f] = tuple(restrict(f, j) for j in range(len(ids[f.target])))
        return cls(kind, N, ids, tables)

    @classmethod
    def build_from_generators(cls, kind: str, N: int, ids, restrict) -> "Presheaf":
        """Like :meth:`build` but calls ``restrict`` on generators only."""
        gen_tables: dict = {}
        for g in sh.generators(kind, N):
            gen_tables.setdefault(g.name, {})[g.target] = tuple(
                restrict(g, j) for j in range(len(ids[g.target])))
        return cls.from_generator_tables(kind, N, ids, gen_tables)

    @classmethod
    def from_generator_tables(cls, kind: str, N: int, ids, gen_tables: dict) -> "Presheaf":
        """Build from generator actions; ``gen_tables[name][target_dim]`` is a tuple.

        Tables of composite morphisms are computed along their canonical
        generator word, so functoriality must be checked separately
        (:func:`validate_presheaf`).
        """
        tables = {}
        for f in all_morphisms(kind, N):
            t = tuple(range(len(ids[f.target])))
            # f = gk o ... o g1 acts contravariantly: apply gk's table first
            for g in reversed(sh.word(f)):
                try:
                    gt = gen_tables[g.name][g.target]
                except KeyError:
                    raise PresheafError(
                        f"missing action of generator {g.name} on dimension {g.target}") from None
                t = tuple(gt[j] for j in t)
            tables[f] = t
        return cls(kind, N, ids, tables)

    # -- access ------------------------------------------------------------
    def size(self, d: int) -> int:
        return len(self.ids[d]) if d <= self.N else 0

    @property
    def total(self) -> int:
        return sum(len(level) for level in self.ids)

    def sections(self):
        for d, level in enumerate(self.ids):
            for j in range(len(level)):
                yield d, j

    def table(self, f: ShapeMorphism) -> tuple:
        return self._tables[f]

    def act(self, f: ShapeMorphism, j: int) -> int:
        return self._tables[f][j]

    def index(self, d: int, sid: str) -> int:
        return self._index[d][sid]

    @cached_property
    def _index(self):
        return [{s: i for i, s in enumerate(level)} for level in self.ids]

    def shape_object(self, d: int) -> ShapeObject:
        return ShapeObject(self.kind, d)

    def faces(self, d: int, j: int) -> tuple:
        """Images of section ``j`` under the codimension-one faces."""
        return tuple(self._tables[f][j] for f in sh.faces_into(self.kind, d))

    def face_index(self, d: int) -> dict:
        """``faces tuple -> [section indices]`` for dimension ``d``."""
        idx = self._face_index.get(d)
        if idx is None:
            idx = {}
            for j in range(self.size(d)):
                idx.setdefault(self.faces(d, j), []).append(j)
            self._face_index[d] = idx
        return idx

    # -- Eilenberg-Zilber decomposition --------------------------------------
    def ez(self, d: int, j: int):
        """Return ``(p, m, y)``: split epi ``p: d -> m`` and nondegenerate ``y``
        of dimension ``m`` with section ``j`` equal to ``y`` restricted along ``p``."""
        key = (d, j)
        hit = self._ez.get(key)
        if hit is None:
            hit = (sh.identity(self.kind, d), d, j)
            for p, s in split_epis(self.kind, d):
                y = self._tables[s][j]
                if self._tables[p][y] == j:
                    hit = (p, p.target, y)
                    break
            self._ez[key] = hit
        return hit

    def is_degenerate(self, d: int, j: int) -> bool:
        return self.ez(d, j)[1] != d

    def nondegenerate(self, d: int) -> list[int]:
        return [j for j in range(self.size(d)) if not self.is_degenerate(d, j)]

    def dimension(self) -> int:
        """Largest dimension carrying a nondegenerate section (-1 if empty)."""
        for d in range(self.N, -1, -1):
            if self.nondegenerate(d):
                return d
        return -1

    def __eq__(self, other):
        return (isinstance(other, Presheaf) and self.kind == other.kind and self.N == other.N
                and self.ids == other.ids and self._tables == other._tables)

    def __hash__(self):
        return hash((self.kind, self.N, self.ids))

    def __repr__(self):
        return f"<Presheaf {self.kind} N={self.N} sizes={[len(l) for l in self.ids]}>"


# -- morphisms -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PresheafMorphism:
    """Levelwise map of section indices ``source -> target``."""

    source: Presheaf
    target: Presheaf
    levels: tuple

    def __post_init__(self):
        if self.source.kind != self.target.kind:
            raise PresheafError("morphism between presheaves of different kinds")
        if self.source.N != self.target.N:
            raise TruncationMismatch("morphism between different truncations")

    def __call__(self, d: int, j: int) -> int:
        return self.levels[d][j]

    def __eq__(self, other):
        return (isinstance(other, PresheafMorphism) and self.levels == other.levels
                and self.source == other.source and self.target == other.target)

    def __hash__(self):
        return hash(self.levels)

    def naturality_failures(self, limit: int = 1) -> list[str]:
        out = []
        X, Y = self.source, self.target
        for f in all_morphisms(X.kind, X.N):
            tx, ty = X.table(f), Y.table(f)
            lo, hi = self.levels[f.source], self.levels[f.target]
            for j in range(X.size(f.target)):
                if lo[tx[j]] != ty[hi[j]]:
                    out.append(f"{f!r} on {X.ids[f.target][j]}")
                    if len(out) >= limit:
                        return out
        return out

    def is_natural(self) -> bool:
        return not self.naturality_failures()

    def is_mono(self) -> bool:
        return all(len(set(l)) == len(l) for l in self.levels)

    def is_epi(self) -> bool:
        return all(len(set(l)) == self.target.size(d) for d, l in enumerate(self.levels))

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def inverse(self) -> "PresheafMorphism":
        inv = []
        for d, l in enumerate(self.levels):
            row = [0] * len(l)
            for j, k in enumerate(l):
                row[k] = j
            inv.append(tuple(row))
        return PresheafMorphism(self.target, self.source, tuple(inv))

    def then(self, g: "PresheafMorphism") -> "PresheafMorphism":
        """``g o self``."""
        if g.source is not self.target and g.source != self.target:
            raise PresheafError("cannot compose: object mismatch")
        return PresheafMorphism(self.source, g.target, tuple(
            tuple(g.levels[d][k] for k in l) for d, l in enumerate(self.levels)))

    def image(self) -> "Subpresheaf":
        return Subpresheaf(self.target, tuple(frozenset(l) for l in self.levels))

    def __repr__(self):
        return f"<PresheafMorphism {self.source!r} -> {self.target!r}>"


def identity_map(X: Presheaf) -> PresheafMorphism:
    return PresheafMorphism(X, X, tuple(tuple(range(X.size(d))) for d in range(X.N + 1)))


def compose_maps(*maps: PresheafMorphism) -> PresheafMorphism:
    """``compose_maps(f, g, h) = h o g o f``."""
    out = maps[0]
    for m in maps[1:]:
        out = out.then(m)
    return out


def terminal_map(X: Presheaf) -> PresheafMorphism:
    P = point(X.kind, X.N)
    return PresheafMorphism(X, P, tuple((0,) * X.size(d) for d in range(X.N + 1)))


def collapse_map(X: Presheaf, T: Presheaf) -> PresheafMorphism:
    """The unique map to ``T`` when ``T`` has one section in each dimension."""
    if any(T.size(d) != 1 for d in range(T.N + 1)):
        raise PresheafError("target is not terminal")
    return PresheafMorphism(X, T, tuple((0,) * X.size(d) for d in range(X.N + 1)))


def map_from_sections(source: Presheaf, target: Presheaf, assign) -> PresheafMorphism:
    return PresheafMorphism(source, target, tuple(
        tuple(assign(d, j) for j in range(source.size(d))) for d in range(source.N + 1)))


# -- subpresheaves -----------------------------------------------------------------

@dataclass(frozen=True)
class Subpresheaf:
    ambient: Presheaf
    keep: tuple  # per dimension, frozenset of indices

    def __contains__(self, sec) -> bool:
        d, j = sec
        return j in self.keep[d]

    def is_closed(self) -> bool:
        X = self.ambient
        return all(X.act(f, j) in self.keep[f.source]
                   for f in all_morphisms(X.kind, X.N) for j in self.keep[f.target])

    def union(self, other: "Subpresheaf") -> "Subpresheaf":
        return Subpresheaf(self.ambient, tuple(a | b for a, b in zip(self.keep, other.keep)))

    def __le__(self, other: "Subpresheaf") -> bool:
        return all(a <= b for a, b in zip(self.keep, other.keep))

    def sizes(self) -> list[int]:
        return [len(k) for k in self.keep]

    def to_presheaf(self) -> tuple[Presheaf, PresheafMorphism]:
        """Materialize as a presheaf (ambient ids and order kept) with its inclusion."""
        X = self.ambient
        order = [sorted(k) for k in self.keep]
        pos = [{j: i for i, j in enumerate(o)} for o in order]
        ids = [tuple(X.ids[d][j] for j in order[d]) for d in range(X.N + 1)]
        S = Presheaf.build(X.kind, X.N, ids,
                           lambda f, i: pos[f.source][X.act(f, order[f.target][i])])
        inc = PresheafMorphism(S, X, tuple(tuple(o) for o in order))
        return S, inc


def generated_subpresheaf(X: Presheaf, secs) -> Subpresheaf:
    """Smallest subpresheaf containing the given ``(dim, index)`` sections."""
    keep = [set() for _ in range(X.N + 1)]
    for d, j in secs:
        for f in all_morphisms(X.kind, X.N):
            if f.target == d:
                keep[f.source].add(X.act(f, j))
    return Subpresheaf(X, tuple(frozenset(k) for k in keep))


def empty_sub(X: Presheaf) -> Subpresheaf:
    return Subpresheaf(X, tuple(frozenset() for _ in range(X.N + 1)))


def full_sub(X: Presheaf) -> Subpresheaf:
    return Subpresheaf(X, tuple(frozenset(range(X.size(d))) for d in range(X.N + 1)))


# -- basic presheaves ---------------------------------------------------------------

def empty(kind: str, N: int) -> Presheaf:
    return Presheaf.build(kind, N, [()] * (N + 1), lambda f, j: j)


def point(kind: str, N: int) -> Presheaf:
    return Presheaf.build(kind, N, [("*",)] * (N + 1), lambda f, j: 0)


@lru_cache(maxsize=None)
def representable(kind: str, n: int, N: int) -> Presheaf:
    """Yoneda presheaf of the object of dimension ``n`` (sections are morphisms)."""
    if n > N:
        raise TruncationMismatch("representable above the truncation")
    hs = [sh.homs(kind, d, n) for d in range(N + 1)]
    pos = [{f: i for i, f in enumerate(h)} for h in hs]
    ids = [tuple(f.label() for f in h) for h in hs]
    return Presheaf.build(kind, N, ids,
                          lambda f, j: pos[f.source][sh.compose(hs[f.target][j], f)])


def rep_section(kind: str, n: int, N: int, f: ShapeMorphism) -> int:
    """Index of morphism ``f`` as a section of the representable of dim ``f.target``."""
    return sh.homs(kind, f.source, n).index(f)


def yoneda_map(X: Presheaf, n: int, j: int) -> PresheafMorphism:
    """The map ``a -> X`` classified by section ``j`` of dimension ``n``."""
    R = representable(X.kind, n, X.N)
    hs = [sh.homs(X.kind, d, n) for d in range(X.N + 1)]
    return PresheafMorphism(R, X, tuple(tuple(X.act(f, j) for f in hs[d]) for d in range(X.N + 1)))


def codiscrete(kind: str, labels, N: int) -> Presheaf:
    """Codiscrete complex: sections of dim ``d`` are all vertex labelings of the shape."""
    labels = tuple(labels)
    hs = {}
    ids = []
    for d in range(N + 1):
        nv = sh.num_vertices(kind, d)
        secs = list(itertools.product(range(len(labels)), repeat=nv))
        hs[d] = {s: i for i, s in enumerate(secs)}
        ids.append(tuple("".join(labels[c] for c in s) for s in secs))
    levels = {d: list(hs[d]) for d in hs}
    return Presheaf.build(kind, N, ids, lambda f, j: hs[f.source][
        tuple(levels[f.target][j][v] for v in f.table)])


def discrete(kind: str, labels, N: int) -> Presheaf:
    """Constant presheaf on a finite set (only degenerate sections above dim 0)."""
    labels = tuple(labels)
    return Presheaf.build(kind, N, [labels] * (N + 1), lambda f, j: j)


def nerve_of_group(elements, mult, N: int, names=None) -> Presheaf:
    """Simplicial nerve of a finite group given by its multiplication table.

    An ``n``-simplex is a tuple ``(g1..gn)``; vertex ``k`` of the corresponding
    path is ``g1...gk`` so a simplex is a map from ``[n]`` to the group up to a
    common left translation; restriction along ``f`` sends the path to the
    path of partial products between consecutive vertices of ``f``.
    """
    elements = tuple(elements)
    names = names or [str(g) for g in elements]
    e = next(g for g in elements if all(mult[g][h] == h for h in elements))
    inv = {g: next(h for h in elements if mult[g][h] == e) for g in elements}
    levels, pos, ids = [], [], []
    for d in range(N + 1):
        secs = list(itertools.product(elements, repeat=d))
        levels.append(secs)
        pos.append({s: i for i, s in enumerate(secs)})
        ids.append(tuple("|".join(names[elements.index(g)] for g in s) if s else "*" for s in secs))

    def vertices_of(s):
        v = [e]
        for g in s:
            v.append(mult[v[-1]][g])
        return v

    def restrict(f, j):
        v = vertices_of(levels[f.target][j])
        w = [v[t] for t in f.table]
        return pos[f.source][tuple(mult[inv[w[k]]][w[k + 1]] for k in range(len(w) - 1))]

    return Presheaf.build("simplex", N, ids, restrict)


def cyclic_group(n: int):
    els = tuple(range(n))
    return els, {a: {b: (a + b) % n for b in els} for a in els}


# -- validation ----------------------------------------------------------------------

@dataclass
class ValidationReport:
    passed: bool
    failures: list = field(default_factory=list)

    def lines(self) -> list[str]:
        return [f"functoriality: {'pass' if self.passed else 'fail'}"] + [
            f"violation: {w}" for w in self.failures]


def validate_presheaf(X: Presheaf, limit: int = 5) -> ValidationReport:
    """Check ``act(id) = id`` and ``act(g o f) = act(f) o act(g)``.

    Checking every generator ``g`` against every ``f`` suffices: the
    composite law for arbitrary ``g`` follows by induction on its word.
    """
    failures = []
    for n in range(X.N + 1):
        idn = sh.identity(X.kind, n)
        if X.table(idn) != tuple(range(X.size(n))):
            failures.append(f"identity on dimension {n} acts nontrivially")
    gens = sh.generators(X.kind, X.N)
    for f in all_morphisms(X.kind, X.N):
        tf = X.table(f)
        for g in gens:
            if g.source != f.target:
                continue
            tg = X.table(g)
            tgf = X.table(sh.compose(g, f))
            for j in range(X.size(g.target)):
                if tgf[j] != tf[tg[j]]:
                    x = X.ids[g.target][j]
                    failures.append(
                        f"{g.name}({x}) = {X.ids[g.source][tg[j]]} restricted along "
                        f"{f.label()} gives {X.ids[f.source][tf[tg[j]]]} but the composite "
                        f"{sh.compose(g, f).label()} gives {X.ids[f.source][tgf[j]]}")
                    if len(failures) >= limit:
                        return ValidationReport(False, failures)
    return ValidationReport(not failures, failures)


# -- EZ decomposition and boundaries ---------------------------------------------------

def ez_decompose(X: Presheaf, d: int, j: int) -> tuple[ShapeMorphism, tuple[int, int]]:
    """Unique ``(p, (m, y))`` with ``p`` a split epi and ``y`` nondegenerate."""
    p, m, y = X.ez(d, j)
    return p, (m, y)


def boundary_subobject(kind: str, n: int, N: int) -> Subpresheaf:
    """Boundary of the representable: morphisms into ``n`` whose mono part is proper."""
    R = representable(kind, n, N)
    keep = []
    for d in range(N + 1):
        keep.append(frozenset(i for i, f in enumerate(sh.homs(kind, d, n))
                              if not sh.reedy_factorize(f)[1].is_identity()))
    return Subpresheaf(R, tuple(keep))


def union_of_images(kind: str, n: int, N: int, monos) -> Subpresheaf:
    R = representable(kind, n, N)
    secs = [(m.source, rep_section(kind, n, N, m)) for m in monos]
    return generated_subpresheaf(R, secs) if secs else empty_sub(R)


@dataclass(frozen=True)
class Generator:
    """A generating inclusion ``K -> a`` with a representable codomain."""

    name: str
    dim: int
    sub: Subpresheaf

    def inclusion(self) -> PresheafMorphism:
        return self.sub.to_presheaf()[1]


def cofibration_generators(kind: str, maxdim: int, N: int) -> list[Generator]:
    return [Generator(f"boundary[{n}]", n, boundary_subobject(kind, n, N))
            for n in range(min(maxdim, N) + 1)]


def anodyne_generators(kind: str, maxdim: int, N: int) -> list[Generator]:
    """Open boxes (cube kinds) or horns (simplex) of dimension ``1..maxdim``."""
    out = []
    for n in range(1, min(maxdim, N) + 1):
        fs = sh.faces_into(kind, n)
        for omit in fs:
            name = (f"horn[{n},{omit.name[1:]}]" if kind == "simplex"
                    else f"box[{n},{omit.name[1:]}]")
            out.append(Generator(name, n, union_of_images(
                kind, n, N, [f for f in fs if f != omit])))
    return out


# -- cell decomposition ------------------------------------------------------------

@dataclass(frozen=True)
class Attachment:
    dim: int
    section: int
    boundary: tuple  # images (dim-1, index) of the codimension-one faces


@dataclass
class CellDecomposition:
    ambient: Presheaf
    base: Subpresheaf
    attachments: list

    def replay(self) -> Presheaf:
        """Rebuild the ambient presheaf by pushouts of ``boundary -> cell``.

        Each stage is a subpresheaf; attaching a cell adds the cell together
        with its degeneracies and checks that its boundary already lies in the
        stage, then the final stage is materialized with canonical ids.
        """
        X = self.ambient
        stage = self.base
        for att in self.attachments:
            for face_dim, face_idx in att.boundary:
                if face_idx not in stage.keep[face_dim]:
                    raise PresheafError("attaching map does not land in the current stage")
            cell = generated_subpresheaf(X, [(att.dim, att.section)])
            new = stage.union(cell)
            added = sum(new.sizes()) - sum(stage.sizes())
            expected = sum(1 for d in range(att.dim, X.N + 1)
                           for p in ([sh.identity(X.kind, d)] if d == att.dim else
                                     [q for q in sh.homs(X.kind, d, att.dim) if q.is_epi()]))
            if added != expected:
                raise PresheafError("attachment is not a pushout of a boundary inclusion")
            stage = new
        if stage != full_sub(X):
            raise PresheafError("replay did not exhaust the presheaf")
        return stage.to_presheaf()[0]


def cell_decomposition(L: Presheaf, K: Subpresheaf | None = None) -> CellDecomposition:
    """Nondegenerate sections of ``L`` outside ``K`` by dimension then order."""
    K = K if K is not None else empty_sub(L)
    atts = []
    for d in range(L.N + 1):
        fs = sh.faces_into(L.kind, d)
        for j in L.nondegenerate(d):
            if j not in K.keep[d]:
                atts.append(Attachment(d, j, tuple((d - 1, L.act(f, j)) for f in fs)))
    return CellDecomposition(L, K, atts)


# -- limits and colimits -------------------------------------------------------------

def _check_same(*Xs):
    kinds = {X.kind for X in Xs}
    Ns = {X.N for X in Xs}
    if len(kinds) != 1:
        raise PresheafError("presheaves of different kinds")
    if len(Ns) != 1:
        raise TruncationMismatch("presheaves with different truncations")


def product(X: Presheaf, Y: Presheaf):
    """Levelwise product with its two projections."""
    _check_same(X, Y)
    N = X.N
    pairs = [[(a, b) for a in range(X.size(d)) for b in range(Y.size(d))] for d in range(N + 1)]
    ny = [Y.size(d) for d in range(N + 1)]
    ids = [tuple(tuple_id(X.ids[d][a], Y.ids[d][b]) for a, b in pairs[d]) for d in range(N + 1)]

    def restrict(f, j):
        a, b = pairs[f.target][j]
        return X.act(f, a) * ny[f.source] + Y.act(f, b)

    P = Presheaf.build(X.kind, N, ids, restrict)
    p1 = PresheafMorphism(P, X, tuple(tuple(a for a, _ in pairs[d]) for d in range(N + 1)))
    p2 = PresheafMorphism(P, Y, tuple(tuple(b for _, b in pairs[d]) for d in range(N + 1)))
    return P, p1, p2


def pullback(f: PresheafMorphism, g: PresheafMorphism):
    """Levelwise fiber product ``X x_Z Y`` with ids ``(x,y)`` and projections."""
    X, Y = f.source, g.source
    _check_same(X, Y, f.target, g.target)
    if f.target != g.target:
        raise PresheafError("pullback needs a common codomain")
    N = X.N
    pairs, pos = [], []
    for d in range(N + 1):
        byz: dict = {}
        for b in range(Y.size(d)):
            byz.setdefault(g.levels[d][b], []).append(b)
        ps = [(a, b) for a in range(X.size(d)) for b in byz.get(f.levels[d][a], ())]
        pairs.append(ps)
        pos.append({p: i for i, p in enumerate(ps)})
    ids = [tuple(tuple_id(X.ids[d][a], Y.ids[d][b]) for a, b in pairs[d]) for d in range(N + 1)]

    def restrict(h, j):
        a, b = pairs[h.target][j]
        return pos[h.source][(X.act(h, a), Y.act(h, b))]

    P = Presheaf.build(X.kind, N, ids, restrict)
    p1 = PresheafMorphism(P, X, tuple(tuple(a for a, _ in pairs[d]) for d in range(N + 1)))
    p2 = PresheafMorphism(P, Y, tuple(tuple(b for _, b in pairs[d]) for d in range(N + 1)))
    return P, p1, p2


def fiber(p: PresheafMorphism, n: int, j: int):
    """``a x_Y X -> a`` for the section ``j`` of dimension ``n`` of ``Y``.

    Returns ``(F, proj_to_a, proj_to_X)``.
    """
    y = yoneda_map(p.target, n, j)
    F, to_a, to_x = pullback(y, p)
    return F, to_a, to_x


def coproduct(X: Presheaf, Y: Presheaf):
    _check_same(X, Y)
    N = X.N
    nx = [X.size(d) for d in range(N + 1)]
    ids = [tuple(tuple_id("0", s) for s in X.ids[d]) + tuple(tuple_id("1", s) for s in Y.ids[d])
           for d in range(N + 1)]

    def restrict(f, j):
        if j < nx[f.target]:
            return X.act(f, j)
        return nx[f.source] + Y.act(f, j - nx[f.target])

    C = Presheaf.build(X.kind, N, ids, restrict)
    i0 = PresheafMorphism(X, C, tuple(tuple(range(nx[d])) for d in range(N + 1)))
    i1 = PresheafMorphism(Y, C, tuple(tuple(nx[d] + j for j in range(Y.size(d)))
                                      for d in range(N + 1)))
    return C, i0, i1


def pushout(i: PresheafMorphism, u: PresheafMorphism):
    """Pushout of a mono ``i: W -> L`` along ``u: W -> A``.

    Returns ``(P, A -> P, L -> P)``; sections of ``P`` are those of ``A``
    followed by the sections of ``L`` outside the image of ``i``.
    """
    if not i.is_mono():
        raise NotMono("pushout requires a monomorphism")
    if i.source != u.source:
        raise PresheafError("pushout legs need a common source")
    W, L, A = i.source, i.target, u.target
    _check_same(W, L, A)
    N = L.N
    inv = [{k: j for j, k in enumerate(i.levels[d])} for d in range(N + 1)]
    outside = [[k for k in range(L.size(d)) if k not in inv[d]] for d in range(N + 1)]
    new_pos = [{k: A.size(d) + r for r, k in enumerate(outside[d])} for d in range(N + 1)]
    ids = [A.ids[d] + tuple(L.ids[d][k] for k in outside[d]) for d in range(N + 1)]

    def l_to_p(d, k):
        if k in inv[d]:
            return u.levels[d][inv[d][k]]
        return new_pos[d][k]

    def restrict(f, j):
        if j < A.size(f.target):
            return A.act(f, j)
        k = outside[f.target][j - A.size(f.target)]
        return l_to_p(f.source, L.act(f, k))

    P = Presheaf.build(L.kind, N, ids, restrict)
    a_to_p = PresheafMorphism(A, P, tuple(tuple(range(A.size(d))) for d in range(N + 1)))
    l_map = PresheafMorphism(L, P, tuple(tuple(l_to_p(d, k) for k in range(L.size(d)))
                                          for d in range(N + 1)))
    return P, a_to_p, l_map


def relabel(X: Presheaf, prefix: str) -> Presheaf:
    ids = [tuple(prefix + s for s in level) for level in X.ids]
    return Presheaf(X.kind, X.N, ids, X._tables)


def is_cartesian(top: PresheafMorphism, left: PresheafMorphism,
                 right: PresheafMorphism, bottom: PresheafMorphism) -> bool:
    """Whether the commutative square ``right o top = bottom o left`` is a pullback."""
    if top.then(right) != left.then(bottom):
        return False
    _, p1, p2 = pullback(bottom, right)
    P = p1.source
    # comparison map source -> P must be bijective
    X = top.source
    index = [{(p1.levels[d][k], p2.levels[d][k]): k for k in range(P.size(d))}
             for d in range(X.N + 1)]
    for d in range(X.N + 1):
        seen = set()
        for j in range(X.size(d)):
            k = index[d].get((left.levels[d][j], top.levels[d][j]))
            if k is None or k in seen:
                return False
            seen.add(k)
        if len(seen) != P.size(d):
            return False
    return True


# -- pushforward along a monomorphism -----------------------------------------------------

@dataclass
class Pushforward:
    """``v_* X -> Y'`` with the unit ``X -> v_* X`` making the square over ``v`` cartesian."""

    total: Presheaf
    structure: PresheafMorphism  # v_* X -> Y'
    unit: PresheafMorphism       # X -> v_* X


def pushforward_along_mono(v: PresheafMorphism, p: PresheafMorphism) -> Pushforward:
    """Right adjoint to base change along a mono ``v: Y -> Y'``, applied to ``p: X -> Y``.

    A section over ``s: c -> Y'`` is a pair ``(s, phi)`` with ``phi`` a map
    ``c x_{Y'} Y -> X`` over ``Y``, found by exhaustive enumeration.
    """
    from .lifting import extensions

    if not v.is_mono():
        raise NotMono("pushforward needs a monomorphism")
    if p.target != v.source:
        raise PresheafError("p must land in the domain of v")
    X, Yp = p.source, v.target
    kind, N = X.kind, X.N
    fibers = {}   # (c, s) -> (F, F->c, F->Y, [phi levels], {phi: k})
    for c in range(N + 1):
        for s in range(Yp.size(c)):
            F, to_c, to_y = pullback(yoneda_map(Yp, c, s), v)
            phis = [phi.levels for phi in extensions(F, X, base=(p, to_y))]
            fibers[(c, s)] = (F, to_c, to_y, phis, {ph: k for k, ph in enumerate(phis)})
    secs = [[(s, k) for s in range(Yp.size(c)) for k in range(len(fibers[(c, s)][3]))]
            for c in range(N + 1)]
    pos = [{sk: i for i, sk in enumerate(level)} for level in secs]
    ids = [tuple(tuple_id(Yp.ids[c][s], str(k)) for s, k in secs[c]) for c in range(N + 1)]
    # index of (g, y) inside each fiber presheaf
    pair_index = {key: [{(val[1].levels[d][i], val[2].levels[d][i]): i
                         for i in range(val[0].size(d))} for d in range(N + 1)]
                  for key, val in fibers.items()}

    def restrict(f, idx):
        c = f.target
        s, k = secs[c][idx]
        phi = fibers[(c, s)][3][k]
        s2 = Yp.act(f, s)
        F2, to_b, to_y2, _, lookup2 = fibers[(f.source, s2)]
        pidx = pair_index[(c, s)]
        levels = []
        for d in range(N + 1):
            row = []
            bh = sh.homs(kind, d, f.source)
            for i in range(F2.size(d)):
                g = bh[to_b.levels[d][i]]
                fg = rep_section(kind, c, N, sh.compose(f, g))
                row.append(phi[d][pidx[d][(fg, to_y2.levels[d][i])]])
            levels.append(tuple(row))
        return pos[f.source][(s2, lookup2[tuple(levels)])]

    T = Presheaf.build_from_generators(kind, N, ids, restrict)
    structure = PresheafMorphism(T, Yp, tuple(tuple(s for s, _ in secs[c]) for c in range(N + 1)))
    unit_levels = []
    for d in range(N + 1):
        row = []
        for x in range(X.size(d)):
            s = v.levels[d][p.levels[d][x]]
            F, to_c, to_y, _, lookup = fibers[(d, s)]
            phi = []
            for e in range(N + 1):
                ch = sh.homs(kind, e, d)
                phi.append(tuple(X.act(ch[to_c.levels[e][i]], x) for i in range(F.size(e))))
            row.append(pos[d][(s, lookup[tuple(phi)])])
        unit_levels.append(tuple(row))
    unit = PresheafMorphism(X, T, tuple(unit_levels))
    return Pushforward(T, structure, unit)


def truncate(X: Presheaf, M: int) -> Presheaf:
    """Forget sections above dimension ``M``."""
    if M > X.N:
        raise TruncationMismatch(f"cannot raise truncation {X.N} to {M}")
    return Presheaf(X.kind, M, X.ids[:M + 1],
                    {f: t for f, t in X._tables.items() if f.source <= M and f.target <= M})


def truncate_map(f: PresheafMorphism, M: int) -> PresheafMorphism:
    return PresheafMorphism(truncate(f.source, M), truncate(f.target, M), f.levels[:M + 1])
