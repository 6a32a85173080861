import pytest
from hypothesis import given, settings, strategies as st

from ezfib import shape as sh
from ezfib.fixtures import morphisms, presheaves
from ezfib.lifting import FAIL, PASS, extensions, is_fibration
from ezfib.minimal import PreconditionError, find_isomorphism
from ezfib.presheaf import (
    PresheafMorphism,
    collapse_map,
    identity_map,
    pullback,
    representable,
)
from ezfib.universe import (
    DEFAULT_KAPPA,
    KappaError,
    canonical_iso,
    eq_subobject,
    extend_classifier_along_mono,
    hs_classify,
    identity_section,
    is_in_universe,
    realize,
    realized_inclusion,
    rel_hom,
    small_from_map,
    terminal_element,
    univalence_from_maps,
)

P = presheaves()
M = morphisms()


def sizes(X):
    return [X.size(d) for d in range(X.N + 1)]


def discrete_over_vertex():
    """Two discrete points sitting over vertex 0 of the interval: not a fibration."""
    D, I = P["discrete2"], P["cube1"]
    v0 = M["vertex0"][0]
    return PresheafMorphism(D, I, tuple((v0.levels[d][0],) * D.size(d) for d in range(D.N + 1)))


SMALL_MAPS = ["discrete2-over-point", "cube1-boundary-over-point", "cube1-boundary-inclusion",
              "vertex0", "vertex1", "cube1-identity", "glue-p0", "nz2-over-point"]
# fibers must have fewer than kappa sections; N(Z/2) has exactly 8 three-simplices
KAPPA = {"nz2-over-point": 9, "codiscrete2-family": 32, "codiscrete2-square": 32}


# -- the size bound ---------------------------------------------------------------------

def test_default_kappa():
    assert DEFAULT_KAPPA == 8


def test_fiber_of_exactly_kappa_is_rejected():
    with pytest.raises(KappaError, match="8 sections, kappa = 8"):
        hs_classify(M["nz2-over-point"][0])


def test_large_fibers_are_rejected():
    p = M["codiscrete2-over-point"][0]
    with pytest.raises(KappaError, match="16 sections"):
        hs_classify(p)
    assert hs_classify(p, 17).is_natural()
    with pytest.raises(KappaError):
        hs_classify(p, 16)


# -- elements -----------------------------------------------------------------------------

def test_terminal_element():
    e = terminal_element("cube", 1, 2)
    assert e.global_sections() == 1 and e.max_fiber() == 1
    assert is_in_universe(e).member


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["cube1-boundary-inclusion", "cube1-identity"]), st.data())
def test_element_restriction_is_functorial(name, data):
    p = M[name][0]
    e = small_from_map(p, 1)
    f = data.draw(st.sampled_from(sh.homs("cube", data.draw(st.integers(0, 2)), 1)))
    g = data.draw(st.sampled_from(sh.homs("cube", data.draw(st.integers(0, 2)), f.source)))
    assert e.restrict(f).restrict(g) == e.restrict(sh.compose(f, g))
    assert e.restrict(sh.identity("cube", 1)) == e


def test_element_round_trips_through_its_map():
    p = M["cube1-boundary-inclusion"][0]
    e = small_from_map(p, 1)
    assert small_from_map(e.to_map(), 1) == e
    assert sizes(e.to_map().source) == sizes(p.source)


# -- classification -----------------------------------------------------------------------

@pytest.mark.parametrize("name", SMALL_MAPS)
def test_classifier_round_trip(name):
    p = M[name][0]
    kappa = KAPPA.get(name, DEFAULT_KAPPA)
    y = hs_classify(p, kappa)
    assert y.is_natural()
    iso = canonical_iso(p, kappa)
    R = realize(y)
    assert iso.is_iso() and iso.is_natural()
    assert iso.then(R) == p
    assert hs_classify(R, kappa) == y


@pytest.mark.parametrize("name", SMALL_MAPS + ["codiscrete2-family", "codiscrete2-square"])
def test_locality(name):
    p = M[name][0]
    y = hs_classify(p, KAPPA.get(name, DEFAULT_KAPPA))
    assert (y.membership().status == PASS) == (is_fibration(p).status == PASS)


def test_discrete_family_over_interval_is_not_in_the_universe():
    p = discrete_over_vertex()
    assert is_fibration(p).status == FAIL
    y = hs_classify(p)
    m = y.membership()
    assert m.status == FAIL
    assert "is not a fibration" in m.witness
    # the value over the nondegenerate edge is the culprit
    edge = P["cube1"].nondegenerate(1)[0]
    assert not is_in_universe(y(1, edge)).member


def test_restriction_of_classifier_classifies_the_pullback():
    p = M["codiscrete2-family"][0]
    v = M["vertex0"][0]
    y = hs_classify(p, 32)
    _, pb, _ = pullback(v, p)
    assert y.restrict_along(v) == hs_classify(pb, 32)


# -- extension along a mono ------------------------------------------------------------------

def test_extend_classifier_along_vertex():
    v = M["vertex0"][0]
    p_ext = M["codiscrete2-family"][0]
    _, pb, _ = pullback(v, p_ext)
    y = hs_classify(pb, 32)
    y_ext = extend_classifier_along_mono(v, p_ext, y, fibrant=True)
    assert y_ext.is_natural()
    assert y_ext.restrict_along(v) == y
    assert y_ext.membership().passed
    assert find_isomorphism(realize(y_ext).source, p_ext.source) is not None
    inc = realized_inclusion(v, y, y_ext)
    assert inc.is_mono() and inc.is_natural()


def test_extend_classifier_rejects_wrong_pullback():
    v = M["vertex0"][0]
    p_ext = M["codiscrete2-family"][0]
    y = hs_classify(identity_map(P["cube0"]), 32)
    with pytest.raises(PreconditionError, match="classifies the pullback"):
        extend_classifier_along_mono(v, p_ext, y)


# -- relative hom and Eq -----------------------------------------------------------------------

def test_rel_hom_over_point_counts_maps():
    p = M["cube1-boundary-over-point"][0]
    H = rel_hom(p, p)
    # vertices of Hom(X, X) are the endomaps of two discrete points
    assert H.total.size(0) == len(list(extensions(p.source, p.source))) == 4
    assert H.structure.is_natural()


def test_eq_of_two_points_with_themselves():
    p = M["cube1-boundary-over-point"][0]
    E = eq_subobject(p, p)
    assert E.is_action_closed()
    assert E.total.size(0) == 2     # the two bijections
    s = identity_section(p, E)
    assert s.is_natural()
    assert s.then(E.structure) == identity_map(p.target)
    assert is_fibration(E.structure).passed


def test_eq_between_inequivalent_fibers_is_empty():
    pt = identity_map(P["point"])
    two = M["cube1-boundary-over-point"][0]
    E = eq_subobject(pt, two)
    assert E.is_action_closed()
    assert sizes(E.total) == [0, 0, 0]


@pytest.mark.slow
def test_eq_over_codiscrete_family():
    p = M["codiscrete2-family"][0]
    E = eq_subobject(p, p)
    assert E.is_action_closed()
    # every fiber is contractible, so every map of fibers is an equivalence
    assert sizes(E.total) == sizes(E.hom.total)
    assert is_fibration(E.structure).passed
    s = identity_section(p, E)
    assert s.is_natural() and s.then(E.structure) == identity_map(p.target)


# -- univalence scenario ---------------------------------------------------------------------

def test_univalence_witness_on_scenario():
    p0, e, j, p1_ext = (M[k][0] for k in ("glue-p0", "glue-w", "vertex0", "codiscrete2-family"))
    w = univalence_from_maps(p0, e, j, p1_ext, kappa=32)
    assert w.certificate.passed, w.lines()
    assert len(w.lines()) == 7
    assert w.y0.restrict_along(j) == hs_classify(p0, 32)
    assert w.equivalence.is_natural()


def test_univalence_rejects_non_equivalence():
    j, p1_ext = M["vertex0"][0], M["codiscrete2-family"][0]
    d = collapse_map(P["discrete2"], P["cube0"])
    e = next(f for f in extensions(P["discrete2"], p1_ext.source)
             if f.then(p1_ext) == d.then(j))
    with pytest.raises(PreconditionError, match="weak equivalence"):
        univalence_from_maps(d, e, j, p1_ext, kappa=32)


def test_univalence_along_identity():
    p = M["cube1-identity"][0]
    ident = identity_map(p.source)
    w = univalence_from_maps(p, ident, identity_map(p.target), p)
    assert w.certificate.passed


def test_representable_identity_classifier():
    I = representable("cube", 1, 2)
    y = hs_classify(identity_map(I))
    assert all(e.global_sections() == 1 for level in y.values for e in level)
