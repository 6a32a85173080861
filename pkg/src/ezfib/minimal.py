"""Minimal complexes, minimal models and minimal fibrations.

A minimal model of a fibrant ``X`` is built in two passes.  First each
boundary-equivalence block gets one representative (degenerate sections
represent themselves) and ``S`` is the greedy maximal subobject made of
representatives.  Then the retraction ``r`` and the homotopy ``h`` are
extended cell by cell over ``X``: each new nondegenerate section ``x`` gets a
homotopy ``H`` with ``H_1 = x`` matching ``h`` on its boundary, and ``r(x)`` is
the representative at the end ``H_0``.

Slices are handled by passing the structure map ``p: X -> Y``; all
homotopies are then required to lie over constant homotopies of ``Y``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import shape as sh
from .homotopy import (
    _register,
    cylinder,
    end,
    homotopy_inverse_search,
    is_weak_equivalence_fiberwise,
    partition_by_boundary_equivalence,
)
from .lifting import (
    FAIL,
    LIMITED,
    PASS,
    LiftingProblem,
    Verdict,
    anodynes,
    bounded_soa_factorize,
    extensions,
    first_extension,
    is_fibration,
    is_trivial_fibration,
    solve_lifting,
)
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    Subpresheaf,
    boundary_subobject,
    generated_subpresheaf,
    identity_map,
    is_cartesian,
    point,
    pullback,
    pushforward_along_mono,
    representable,
    terminal_map,
)


class InvariantViolation(RuntimeError):
    """A step that cannot fail under the stated hypotheses failed anyway."""


class PreconditionError(ValueError):
    pass


# -- minimal complexes ------------------------------------------------------------------

def boundary_partitions(X: Presheaf, p: PresheafMorphism | None = None) -> list:
    return [partition_by_boundary_equivalence(X, n, p) for n in range(X.N + 1)]


def is_minimal_complex(X: Presheaf, p: PresheafMorphism | None = None,
                       partitions: list | None = None) -> Verdict:
    """Every boundary-equivalence block below the truncation is a singleton.

    With ``p`` the question is asked in the slice over ``p.target``, i.e. it
    decides whether ``p`` is a minimal fibration (given that it is one).
    """
    parts = partitions or boundary_partitions(X, p)
    checked = 0
    for part in parts:
        if part.limited:
            continue
        for block in part.blocks:
            checked += 1
            if len(block) > 1:
                names = ", ".join(X.ids[part.dim][j] for j in block)
                return Verdict(FAIL, f"dimension {part.dim}: {{{names}}} are boundary-equivalent",
                               checked=checked)
    notes = [f"blocks checked below dimension {X.N}"]
    if any(len(b) > 1 for b in parts[-1].blocks):
        notes.append(f"dimension {X.N} has non-singleton truncated blocks (not decisive)")
    return Verdict(PASS, None, notes, checked)


def is_minimal_fibration(p: PresheafMorphism) -> Verdict:
    return is_minimal_complex(p.source, p)


# -- minimal models ---------------------------------------------------------------------

@dataclass
class MinimalModel:
    X: Presheaf
    sub: Subpresheaf
    S: Presheaf
    i: PresheafMorphism          # S -> X
    r: PresheafMorphism          # X -> S
    h: PresheafMorphism          # I x X -> X, h_0 = i r, h_1 = id, constant on S
    p: PresheafMorphism | None = None
    selected: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def q(self) -> PresheafMorphism | None:
        return None if self.p is None else self.i.then(self.p)


def _select(X, parts, order):
    """Selected sections per dimension, with notes on degenerate collisions."""
    pick = min if order == "least" else max
    selected, notes = [], []
    for part in parts:
        n = part.dim
        chosen = set()
        for block in part.blocks:
            degs = [j for j in block if X.is_degenerate(n, j)]
            if len(degs) > 1:
                notes.append(f"dimension {n}: block holds {len(degs)} degenerate sections"
                             + (" (truncated relation)" if part.limited else ""))
            chosen.update(degs if degs else [pick(block)])
        selected.append(chosen)
    return selected, notes


def _maximal_selected(X, selected):
    keep = [set() for _ in range(X.N + 1)]
    for n in range(X.N + 1):
        for j in sorted(selected[n]):
            if X.is_degenerate(n, j):
                continue
            if all(f in keep[n - 1] for f in X.faces(n, j)):
                for d, ks in enumerate(generated_subpresheaf(X, [(n, j)]).keep):
                    keep[d] |= ks
    return Subpresheaf(X, tuple(frozenset(k) for k in keep))


def minimal_model(X: Presheaf, p: PresheafMorphism | None = None,
                  order: str = "least") -> MinimalModel:
    """Minimal model ``S`` of a fibrant ``X`` (of the fibration ``p`` when given).

    ``order`` picks the least or greatest section of each block as its
    representative.  Raises :class:`InvariantViolation` if a filler that
    must exist below the truncation is not found.
    """
    kind, N = X.kind, X.N
    parts = boundary_partitions(X, p)
    selected, notes = _select(X, parts, order)
    sub = _maximal_selected(X, selected)
    for part in parts:
        if not part.is_equivalence:
            notes.append(f"dimension {part.dim}: relation is not an equivalence")
    cylX = _register(cylinder(X))
    done = [set(k) for k in sub.keep]
    r_vals = [dict() for _ in range(N + 1)]
    h_vals = [[None] * cylX.cyl.size(d) for d in range(N + 1)]
    for d in range(N + 1):
        for s in sub.keep[d]:
            r_vals[d][s] = s
            for c in range(cylX.cyl.size(d)):
                if cylX.proj.levels[d][c] == s:
                    h_vals[d][c] = s
    for n in range(N + 1):
        for x in X.nondegenerate(n):
            if x in done[n]:
                continue
            A = representable(kind, n, N)
            cylA = _register(cylinder(A))
            dA = boundary_subobject(kind, n, N)
            homs = [sh.homs(kind, d, n) for d in range(N + 1)]
            fixed = {}
            for d in range(N + 1):
                for c in range(cylA.cyl.size(d)):
                    a = cylA.proj.levels[d][c]
                    xa = X.act(homs[d][a], x)
                    ia = cylA.to_interval.levels[d][c]
                    if a in dA.keep[d]:
                        fixed[(d, c)] = h_vals[d][ia * X.size(d) + xa]
                    elif cylA.end_of[d][c] == 1:
                        fixed[(d, c)] = xa
            base = None
            if p is not None:
                bottom = cylA.proj.levels
                pb = p.levels
                y_of = [tuple(pb[d][X.act(homs[d][a], x)] for a in range(A.size(d)))
                        for d in range(N + 1)]
                base = (p, PresheafMorphism(cylA.cyl, p.target, tuple(
                    tuple(y_of[d][bottom[d][c]] for c in range(cylA.cyl.size(d)))
                    for d in range(N + 1))))
            H = first_extension(cylA.cyl, X, fixed, base)
            if H is None:
                raise InvariantViolation(
                    f"no homotopy from {X.ids[n][x]} (dimension {n}) extending the boundary data")
            idn = homs[n].index(sh.identity(kind, n))
            zero = cylA.ends[0].levels[n][idn]
            y0 = H.levels[n][zero]
            y = y0
            if y0 not in sub.keep[n]:
                block = parts[n].block_of(y0)
                targets = [j for j in block if j in sub.keep[n]]
                H2 = None
                for y in targets:
                    fixed2 = dict(fixed)
                    for d in range(N + 1):
                        for a in range(A.size(d)):
                            fixed2[(d, cylA.ends[0].levels[d][a])] = X.act(homs[d][a], y)
                    H2 = first_extension(cylA.cyl, X, fixed2, base)
                    if H2 is not None:
                        break
                if H2 is None:
                    where = "at the truncation boundary" if n == N else "below the truncation"
                    raise InvariantViolation(
                        f"cell {X.ids[n][x]}: no homotopy ending in the model {where}")
                H = H2
            for d in range(n, N + 1):
                for e in homs[d]:
                    if not e.is_epi():
                        continue
                    t = X.act(e, x)
                    a = homs[d].index(e)
                    done[d].add(t)
                    r_vals[d][t] = X.act(e, y)
                    for ia in range(cylX.cyl.size(d) // X.size(d)):
                        h_vals[d][ia * X.size(d) + t] = H.levels[d][ia * A.size(d) + a]
    S, inc = sub.to_presheaf()
    pos = [{j: k for k, j in enumerate(inc.levels[d])} for d in range(N + 1)]
    r = PresheafMorphism(X, S, tuple(tuple(pos[d][r_vals[d][t]] for t in range(X.size(d)))
                                     for d in range(N + 1)))
    h = PresheafMorphism(cylX.cyl, X, tuple(tuple(row) for row in h_vals))
    return MinimalModel(X, sub, S, inc, r, h, p,
                        [sorted(s) for s in selected], notes)


@dataclass
class Certificate:
    items: list  # (name, Verdict)

    @property
    def passed(self) -> bool:
        return all(v.status == PASS for _, v in self.items)

    def lines(self) -> list[str]:
        return [f"{name}: {v.status}" + (f" ({v.witness})" if v.witness else "")
                for name, v in self.items]


def _check(flag: bool, witness=None) -> Verdict:
    return Verdict(PASS if flag else FAIL, None if flag else witness, checked=1)


def certify_minimal_model(mm: MinimalModel) -> Certificate:
    """Check every property of a minimal model directly."""
    X, S = mm.X, mm.S
    items = [
        ("i is a monomorphism", _check(mm.i.is_mono())),
        ("i and r are natural", _check(mm.i.is_natural() and mm.r.is_natural())),
        ("r o i = id", _check(mm.i.then(mm.r) == identity_map(S))),
        ("h is natural", _check(mm.h.is_natural(), mm.h.naturality_failures())),
        ("h_0 = i o r", _check(end(mm.h, 0) == mm.r.then(mm.i))),
        ("h_1 = id", _check(end(mm.h, 1) == identity_map(X))),
    ]
    cyl = cylinder(X)
    const = all(mm.h.levels[d][c] == cyl.proj.levels[d][c]
                for d in range(X.N + 1) for c in range(cyl.cyl.size(d))
                if cyl.proj.levels[d][c] in mm.sub.keep[d])
    items.append(("h constant on S", _check(const)))
    if mm.p is not None:
        pX = cyl.proj.then(mm.p)
        items.append(("h lies over the base", _check(mm.h.then(mm.p) == pX)))
        items.append(("p = q o r", _check(mm.r.then(mm.q) == mm.p)))
        items.append(("q is a minimal fibration", is_minimal_complex(S, mm.q)))
    else:
        items.append(("S is a minimal complex", is_minimal_complex(S)))
    items.append(("r is a trivial fibration", is_trivial_fibration(mm.r)))
    return Certificate(items)


def find_isomorphism(A: Presheaf, B: Presheaf) -> PresheafMorphism | None:
    if A.kind != B.kind or A.N != B.N:
        return None
    if any(A.size(d) != B.size(d) for d in range(A.N + 1)):
        return None
    for f in extensions(A, B):
        if f.is_iso():
            return f
    return None


# -- minimal fibrations -------------------------------------------------------------------

@dataclass
class MinimalFibrationFactorization:
    p: PresheafMorphism
    r: PresheafMorphism   # X -> S trivial fibration
    q: PresheafMorphism   # S -> Y minimal fibration
    model: MinimalModel

    @property
    def S(self) -> Presheaf:
        return self.model.S

    def retract_diagram(self) -> Verdict:
        """``q`` is a retract of ``p`` in the arrow category via ``(i, 1)`` and ``(r, 1)``."""
        i, r, p, q = self.model.i, self.r, self.p, self.q
        ok = i.then(p) == q and r.then(q) == p and i.then(r) == identity_map(self.S)
        return _check(ok, "retract equations fail")


def minimal_fibration_factorization(p: PresheafMorphism,
                                    order: str = "least") -> MinimalFibrationFactorization:
    mm = minimal_model(p.source, p, order)
    return MinimalFibrationFactorization(p, mm.r, mm.q, mm)


# -- characterization of minimal complexes ------------------------------------------------

@dataclass
class CharacterizationReport:
    conditions: dict          # label -> Verdict
    agree: bool

    def lines(self) -> list[str]:
        out = [f"({k}) {v.status}" + (f": {v.witness}" if v.witness else "")
               for k, v in self.conditions.items()]
        out.append("conditions agree: " + ("yes" if self.agree else "no"))
        return out


def _is_weq(f: PresheafMorphism) -> bool:
    return homotopy_inverse_search(f) is not None


def check_minimal_characterization(X: Presheaf, universe: list | None = None) -> CharacterizationReport:
    """Evaluate the five equivalent minimality conditions over a finite universe.

    ``universe`` lists comparison objects (same kind and truncation as
    ``X``); the point, ``X`` itself and its minimal model are always added.
    """
    objs = [point(X.kind, X.N), X]
    try:
        objs.append(minimal_model(X).S)
    except InvariantViolation:
        pass
    for U in universe or []:
        if U.kind == X.kind and U.N == X.N and all(U is not o for o in objs):
            objs.append(U)
    minimal = {id(U): is_minimal_complex(U).passed for U in objs}
    fibrant = {}

    def is_fib(U):
        if id(U) not in fibrant:
            fibrant[id(U)] = is_fibration(terminal_map(U)).passed
        return fibrant[id(U)]

    cond = {"i": is_minimal_complex(X)}
    w2 = w3 = w4 = w5 = None
    for U in objs:
        for f in extensions(X, U):
            if f.is_iso():
                continue
            if w2 is None and is_trivial_fibration(f).passed:
                w2 = f"trivial fibration onto {U!r} is not an isomorphism"
            if w4 is None and minimal[id(U)] and is_fib(U) and _is_weq(f):
                w4 = f"weak equivalence onto minimal {U!r} is not an isomorphism"
        for f in extensions(U, X):
            if f.is_iso():
                continue
            if w3 is None and f.is_mono() and is_fib(U) and _is_weq(f):
                w3 = f"trivial cofibration from fibrant {U!r} is not an isomorphism"
            if w5 is None and minimal[id(U)] and is_fib(U) and _is_weq(f):
                w5 = f"weak equivalence from minimal {U!r} is not an isomorphism"
    for k, w in (("ii", w2), ("iii", w3), ("iv", w4), ("v", w5)):
        cond[k] = Verdict(FAIL, w) if w else Verdict(PASS, None, [f"{len(objs)} objects scanned"])
    agree = len({v.status for v in cond.values()}) == 1
    return CharacterizationReport(cond, agree)


def weq_between_minimal_is_iso(f: PresheafMorphism) -> Verdict:
    """A homotopy equivalence between minimal complexes must be an isomorphism."""
    if not (is_minimal_complex(f.source).passed and is_minimal_complex(f.target).passed):
        return Verdict(LIMITED, None, ["endpoints are not both minimal"])
    if not _is_weq(f):
        return Verdict(PASS, None, ["not a weak equivalence; nothing to check"])
    return _check(f.is_iso(), "weak equivalence that is not an isomorphism")


# -- extension along trivial cofibrations -------------------------------------------------

@dataclass
class ExtensionResult:
    success: bool
    p_ext: PresheafMorphism | None = None      # X' -> Y'
    square_top: PresheafMorphism | None = None  # X -> X'
    certificate: Certificate | None = None
    notes: list = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"success: {'yes' if self.success else 'no'}"]
        out += [f"note: {n}" for n in self.notes]
        if self.certificate:
            out += self.certificate.lines()
        return out


def extend_fibration(v: PresheafMorphism, p: PresheafMorphism, budget: int = 3) -> ExtensionResult:
    """Extend a fibration ``p: X -> Y`` along a trivial cofibration ``v: Y -> Y'``.

    Minimal part first: factor ``v q`` through a fibration, take its minimal
    factorization and check that the comparison map to the pullback is an
    isomorphism; the trivial-fibration part is then pushed forward along the
    resulting mono.
    """
    if not v.is_mono():
        raise PreconditionError("v must be a monomorphism")
    if v.is_iso():
        cert = Certificate([("square is cartesian", _check(True))])
        return ExtensionResult(True, p.then(v), identity_map(p.source), cert, ["v is an isomorphism"])
    fac = minimal_fibration_factorization(p)
    soa = bounded_soa_factorize(fac.q.then(v), anodynes(p.source.N), budget)
    if not soa.success:
        return ExtensionResult(False, notes=[f"factorization budget {budget} exhausted",
                                             f"residual: {soa.residual}"])
    fac2 = minimal_fibration_factorization(soa.q)
    u = soa.j.then(fac2.r)                        # S -> X'
    P, to_y, to_x = pullback(v, fac2.q)
    index = [{(to_y.levels[d][k], to_x.levels[d][k]): k for k in range(P.size(d))}
             for d in range(P.N + 1)]
    S = fac.S
    try:
        comparison = PresheafMorphism(S, P, tuple(
            tuple(index[d][(fac.q.levels[d][s], u.levels[d][s])] for s in range(S.size(d)))
            for d in range(S.N + 1)))
    except KeyError as exc:
        raise InvariantViolation("comparison map does not land in the pullback") from exc
    if not comparison.is_iso():
        raise InvariantViolation(
            f"comparison map to the pullback is not an isomorphism: sizes "
            f"{[S.size(d) for d in range(S.N + 1)]} vs {[P.size(d) for d in range(P.N + 1)]}")
    push = pushforward_along_mono(u, fac.r)
    p_ext = push.structure.then(fac2.q)
    cert = Certificate([
        ("square is cartesian", _check(is_cartesian(push.unit, p, p_ext, v))),
        ("extension is a fibration", is_fibration(p_ext)),
        ("minimal part restricts to the minimal fibration of p",
         _check(comparison.is_iso())),
    ])
    return ExtensionResult(cert.passed, p_ext, push.unit, cert,
                           [f"{len(soa.passes)} factorization passes"])


# -- gluing along a cofibration -----------------------------------------------------------

@dataclass
class GlueResult:
    p0_ext: PresheafMorphism   # X0' -> Y'
    i0: PresheafMorphism       # X0 -> X0'
    w_ext: PresheafMorphism    # X0' -> X1'
    certificate: Certificate

    def lines(self) -> list[str]:
        return self.certificate.lines()


def _require(name: str, verdict) -> None:
    ok = verdict.passed if isinstance(verdict, Verdict) else bool(verdict)
    if not ok:
        raise PreconditionError(f"hypothesis failed: {name}")


def glue_equivalence_extension(p0: PresheafMorphism, w: PresheafMorphism,
                               p1: PresheafMorphism, j: PresheafMorphism,
                               p1_ext: PresheafMorphism, i1: PresheafMorphism,
                               check: bool = True) -> GlueResult:
    """Extend a weak equivalence ``w: X0 -> X1`` over ``Y`` along ``j: Y -> Y'``.

    ``p1`` is the pullback of ``p1_ext: X1' -> Y'`` along ``j`` with top map
    ``i1: X1 -> X1'``.  Returns ``p0_ext: X0' -> Y'`` restricting to ``p0``
    and ``w_ext: X0' -> X1'`` over ``Y'`` extending ``w``.
    """
    if check:
        _require("p0 is a fibration", is_fibration(p0))
        _require("p1 is a fibration", is_fibration(p1))
        _require("p1' is a fibration", is_fibration(p1_ext))
        _require("j is a monomorphism", j.is_mono())
        _require("square is cartesian", is_cartesian(i1, p1, p1_ext, j))
        _require("w lies over the base", w.then(p1) == p0)
        _require("w is a fiberwise weak equivalence", is_weak_equivalence_fiberwise(w, p0, p1))
    fac1 = minimal_fibration_factorization(p1_ext)
    S, k_y, k = pullback(j, fac1.q)
    index = [{(k_y.levels[d][s], k.levels[d][s]): s for s in range(S.size(d))}
             for d in range(S.N + 1)]
    X1 = p1.source
    r1 = PresheafMorphism(X1, S, tuple(
        tuple(index[d][(p1.levels[d][x], fac1.r.levels[d][i1.levels[d][x]])]
              for x in range(X1.size(d))) for d in range(X1.N + 1)))
    r0 = w.then(r1)
    if not is_trivial_fibration(r0).passed:
        raise InvariantViolation("r1 o w is not a trivial fibration")
    push = pushforward_along_mono(k, r0)
    p0_ext = push.structure.then(fac1.q)
    w_ext = solve_lifting(LiftingProblem(push.unit, fac1.r, w.then(i1), push.structure))
    if w_ext is None:
        raise InvariantViolation("no lift against the trivial fibration r1'")
    cert = Certificate([
        ("square is cartesian", _check(is_cartesian(push.unit, p0, p0_ext, j))),
        ("p0' is a fibration", is_fibration(p0_ext)),
        ("w' is a fiberwise weak equivalence",
         is_weak_equivalence_fiberwise(w_ext, p0_ext, p1_ext)),
        ("p1' o w' = p0'", _check(w_ext.then(p1_ext) == p0_ext)),
        ("w' o i0 = i1 o w", _check(push.unit.then(w_ext) == w.then(i1))),
    ])
    return GlueResult(p0_ext, push.unit, w_ext, cert)


def factor_through_pullback(p0: PresheafMorphism, w: PresheafMorphism, j: PresheafMorphism,
                            p1_ext: PresheafMorphism):
    """Pull ``p1_ext`` back along ``j`` and factor ``w: X0 -> X1'`` (over ``j``)
    through the pullback.  Returns ``(p1, i1, w1)``."""
    if w.then(p1_ext) != p0.then(j):
        raise PreconditionError("hypothesis failed: w lies over j")
    X1, p1, i1 = pullback(j, p1_ext)
    index = [{(p1.levels[d][k], i1.levels[d][k]): k for k in range(X1.size(d))}
             for d in range(X1.N + 1)]
    w1 = PresheafMorphism(p0.source, X1, tuple(
        tuple(index[d][(p0.levels[d][x], w.levels[d][x])] for x in range(p0.source.size(d)))
        for d in range(X1.N + 1)))
    return p1, i1, w1
