import pytest
from hypothesis import given, settings, strategies as st

from ezfib import shape as sh
from ezfib.fixtures import morphisms, presheaves
from ezfib.lifting import extensions
from ezfib.presheaf import (
    NotMono,
    Presheaf,
    PresheafError,
    TruncationMismatch,
    cell_decomposition,
    codiscrete,
    collapse_map,
    coproduct,
    cyclic_group,
    discrete,
    ez_decompose,
    fiber,
    generated_subpresheaf,
    identity_map,
    is_cartesian,
    nerve_of_group,
    point,
    product,
    pullback,
    pushforward_along_mono,
    pushout,
    representable,
    truncate,
    validate_presheaf,
    yoneda_map,
)

P = presheaves()


def sizes(X):
    return [X.size(d) for d in range(X.N + 1)]


# -- constructions against counting formulas ----------------------------------------------

def test_cube1_census():
    X = P["cube1"]
    assert X.N == 2
    assert sizes(X) == [2, 3, 4]
    assert [len(X.nondegenerate(d)) for d in range(3)] == [2, 1, 0]


@pytest.mark.parametrize("kind", sh.KINDS)
@pytest.mark.parametrize("n", [0, 1, 2])
def test_representable_sizes_are_hom_counts(kind, n):
    X = representable(kind, n, 2)
    assert sizes(X) == [len(sh.homs(kind, d, n)) for d in range(3)]
    assert X.dimension() == n


@pytest.mark.parametrize("kind", sh.KINDS)
def test_codiscrete_sizes(kind):
    X = codiscrete(kind, "abc", 2)
    assert sizes(X) == [3 ** sh.num_vertices(kind, d) for d in range(3)]


def test_nerve_sizes_and_nondegenerate():
    X = nerve_of_group(*cyclic_group(2), 3)
    assert sizes(X) == [1, 2, 4, 8]
    # nondegenerate simplices are tuples without the identity element
    assert [len(X.nondegenerate(d)) for d in range(4)] == [1, 1, 1, 1]


def test_codiscrete_nondegenerate_frozen():
    assert [len(P["codiscrete2"].nondegenerate(d)) for d in range(3)] == [2, 2, 10]


def test_discrete_is_zero_dimensional():
    X = discrete("cube", "ab", 2)
    assert X.dimension() == 0
    assert [len(X.nondegenerate(d)) for d in range(3)] == [2, 0, 0]


def test_point_and_empty_sections():
    assert sizes(point("simplex", 3)) == [1, 1, 1, 1]
    assert P["cube1-boundary"].dimension() == 0


@pytest.mark.parametrize("name", sorted(P))
def test_every_fixture_is_functorial(name):
    assert validate_presheaf(P[name]).passed


@pytest.mark.parametrize("name", sorted(morphisms()))
def test_every_fixture_map_is_natural(name):
    f, _, _ = morphisms()[name]
    assert f.is_natural()


def test_broken_table_is_reported():
    X = P["codiscrete2"]
    tables = dict(X._tables)
    s1 = sh.degeneracy("cube", 0, 1)
    tables[s1] = (3, 0)   # a -> bb, b -> aa: faces no longer undo the degeneracy
    bad = Presheaf("cube", X.N, X.ids, tables)
    rep = validate_presheaf(bad)
    assert not rep.passed
    assert rep.lines()[0] == "functoriality: fail"


# -- EZ decomposition ----------------------------------------------------------------------

@pytest.mark.parametrize("name", ["codiscrete2", "cube2", "nz2", "simplex-horn-3-1", "codiscrete2-family"])
def test_ez_decomposition(name):
    X = P[name]
    for d in range(X.N + 1):
        for j in range(X.size(d)):
            p, (m, y) = ez_decompose(X, d, j)
            assert p.is_epi() and p.target == m
            assert not X.is_degenerate(m, y)
            assert X.act(p, y) == j
            # uniqueness: no other split epi / nondegenerate pair gives j
            others = [(q, z) for m2 in range(d + 1) for q in sh.homs(X.kind, d, m2)
                      if q.is_epi() and sh.sections_of_epi(q)
                      for z in X.nondegenerate(m2) if X.act(q, z) == j]
            assert others == [(p, y)]


# -- limits and colimits -------------------------------------------------------------------

def test_product_sizes_and_projections():
    X, Y = P["codiscrete2"], P["cube1"]
    Z, p1, p2 = product(X, Y)
    assert sizes(Z) == [a * b for a, b in zip(sizes(X), sizes(Y))]
    assert p1.is_natural() and p2.is_natural()
    assert validate_presheaf(Z).passed


def test_product_mismatch():
    with pytest.raises(TruncationMismatch):
        product(point("cube", 1), point("cube", 2))
    with pytest.raises(PresheafError):
        product(point("cube", 1), point("simplex", 1))


def test_pullback_of_identity_and_fiber():
    p, _, _ = morphisms()["codiscrete2-family"]
    Q, a, b = pullback(p, identity_map(p.target))
    assert sizes(Q) == sizes(p.source)
    assert a.is_iso()
    assert is_cartesian(a, b, p, identity_map(p.target))
    F, to_c, to_x = fiber(p, 0, 0)
    assert sizes(F) == sizes(P["codiscrete2"])
    assert is_cartesian(to_x, to_c, p, yoneda_map(p.target, 0, 0))


def test_coproduct_and_pushout():
    A, i0, i1 = coproduct(P["cube0"], P["cube0"])
    assert sizes(A) == [2, 2, 2]
    inc, _, _ = morphisms()["cube1-boundary-inclusion"]
    # gluing the interval onto the boundary along the identity returns the interval
    Q, a_to_p, l_to_p = pushout(inc, identity_map(inc.source))
    assert sizes(Q) == sizes(P["cube1"])
    assert l_to_p.is_iso()
    with pytest.raises(NotMono):
        pushout(collapse_map(P["codiscrete2"], P["point"]), identity_map(P["codiscrete2"]))


def test_generated_subpresheaf_is_closed():
    X = P["codiscrete2"]
    S = generated_subpresheaf(X, [(1, X.index(1, "ab"))])
    assert S.is_closed()
    # the edge ab spans a copy of the interval
    assert S.sizes() == [2, 3, 4]


def test_cell_decomposition_replays():
    for name in ["cube2", "codiscrete2", "simplex3"]:
        X = P[name]
        dec = cell_decomposition(X)
        assert dec.replay() == X
        assert len(dec.attachments) == sum(len(X.nondegenerate(d)) for d in range(X.N + 1))


def test_truncate():
    X = truncate(P["nz2"], 1)
    assert sizes(X) == [1, 2]
    assert validate_presheaf(X).passed
    with pytest.raises(TruncationMismatch):
        truncate(X, 2)


# -- pushforward --------------------------------------------------------------------------

def test_pushforward_along_vertex():
    v, _, _ = morphisms()["vertex0"]
    p = collapse_map(P["codiscrete2"], P["cube0"])
    push = pushforward_along_mono(v, p)
    assert sizes(push.total) == [3, 7, 25]
    assert push.structure.is_natural() and push.unit.is_natural()
    assert is_cartesian(push.unit, p, push.structure, v)


def test_pushforward_global_sections_match_adjunction():
    # maps Y' -> v_* X over Y' correspond to maps Y -> X over Y
    v, _, _ = morphisms()["vertex0"]
    for name in ["codiscrete2", "discrete2", "cube1-boundary"]:
        p = collapse_map(P[name], P["cube0"])
        push = pushforward_along_mono(v, p)
        lhs = sum(1 for _ in extensions(v.target, push.total,
                                        base=(push.structure, identity_map(v.target))))
        rhs = sum(1 for _ in extensions(v.source, p.source, base=(p, identity_map(v.source))))
        assert lhs == rhs


def test_pushforward_needs_mono():
    p = collapse_map(P["codiscrete2"], P["point"])
    with pytest.raises(NotMono):
        pushforward_along_mono(collapse_map(P["codiscrete2"], P["point"]), p)


# -- properties ---------------------------------------------------------------------------

SMALL = ["codiscrete2", "cube1", "cube2", "discrete2", "cube1-boundary", "cube-box-2-1_0"]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_generated_subpresheaves_are_closed(name, data):
    X = P[name]
    secs = data.draw(st.lists(
        st.integers(0, X.N).flatmap(lambda d: st.tuples(st.just(d), st.integers(0, X.size(d) - 1))),
        max_size=4))
    S = generated_subpresheaf(X, secs)
    assert S.is_closed()
    Y, inc = S.to_presheaf()
    assert inc.is_mono() and inc.is_natural()
    assert validate_presheaf(Y).passed


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SMALL), st.sampled_from(SMALL))
def test_product_is_symmetric_up_to_iso(a, b):
    X, _, _ = product(P[a], P[b])
    Y, _, _ = product(P[b], P[a])
    assert sizes(X) == sizes(Y)
    assert [len(X.nondegenerate(d)) for d in range(X.N + 1)] == \
        [len(Y.nondegenerate(d)) for d in range(Y.N + 1)]
