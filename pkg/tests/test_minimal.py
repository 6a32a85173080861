import pytest

from ezfib.fixtures import morphisms, presheaves
from ezfib.lifting import FAIL, PASS, extensions, is_fibration, is_trivial_fibration
from ezfib.minimal import (
    PreconditionError,
    certify_minimal_model,
    check_minimal_characterization,
    extend_fibration,
    factor_through_pullback,
    find_isomorphism,
    glue_equivalence_extension,
    is_minimal_complex,
    is_minimal_fibration,
    minimal_fibration_factorization,
    minimal_model,
    weq_between_minimal_is_iso,
)
from ezfib.presheaf import collapse_map, identity_map, is_cartesian, pullback

P = presheaves()
M = morphisms()


def sizes(X):
    return [X.size(d) for d in range(X.N + 1)]


# -- minimal complexes -------------------------------------------------------------------

@pytest.mark.parametrize("name,expected", [
    ("point", PASS), ("discrete2", PASS), ("nz2", PASS), ("cube1-boundary", PASS),
    ("codiscrete2", FAIL), ("codiscrete3", FAIL), ("codiscrete2-square", FAIL),
])
def test_is_minimal_complex(name, expected):
    v = is_minimal_complex(P[name])
    assert v.status == expected
    if expected == FAIL:
        assert "dimension 0" in v.witness


# -- minimal models ----------------------------------------------------------------------

@pytest.mark.parametrize("name,model", [
    ("point", [1, 1, 1]), ("codiscrete2", [1, 1, 1]), ("codiscrete3", [1, 1, 1]),
    ("codiscrete2-square", [1, 1, 1]), ("discrete2", [2, 2, 2]), ("nz2", [1, 2, 4, 8]),
    ("cube1-boundary", [2, 2, 2]),
])
def test_minimal_model_certificates(name, model):
    mm = minimal_model(P[name])
    assert sizes(mm.S) == model
    cert = certify_minimal_model(mm)
    assert cert.passed, cert.lines()


def test_codiscrete_model_is_a_vertex():
    mm = minimal_model(P["codiscrete2"])
    assert mm.S.ids[0] == ("a",)
    assert minimal_model(P["codiscrete2"], order="greatest").S.ids[0] == ("b",)
    names = [line.split(":")[0] for line in certify_minimal_model(mm).lines()]
    assert "r o i = id" in names and "r is a trivial fibration" in names
    assert "h constant on S" in names


def test_minimal_complex_is_its_own_model():
    X = P["nz2"]
    mm = minimal_model(X)
    assert mm.i.is_iso() and mm.r.is_iso()
    assert mm.S == X


@pytest.mark.parametrize("name", ["codiscrete2", "codiscrete3", "nz2", "discrete2"])
def test_model_is_idempotent_and_order_independent(name):
    S = minimal_model(P[name]).S
    again = minimal_model(S)
    assert again.i.is_iso()
    other = minimal_model(P[name], order="greatest").S
    assert find_isomorphism(S, other) is not None


def test_weak_equivalences_between_minimal_complexes_are_isos():
    X = P["nz2"]
    seen = 0
    for f in extensions(X, X):
        v = weq_between_minimal_is_iso(f)
        assert v.status == PASS
        seen += 1
    assert seen == 2   # the identity and the collapse to the basepoint
    for f in extensions(P["discrete2"], P["discrete2"]):
        assert weq_between_minimal_is_iso(f).status == PASS


# -- characterization -----------------------------------------------------------------------

@pytest.mark.parametrize("name,status", [
    ("point", PASS), ("nz2", PASS), ("discrete2", PASS), ("codiscrete2", FAIL),
])
def test_characterization_conditions_agree(name, status):
    rep = check_minimal_characterization(P[name], [P["codiscrete2"], P["discrete2"]])
    assert rep.agree, rep.lines()
    assert {v.status for v in rep.conditions.values()} == {status}
    if status == FAIL:
        assert all(v.witness for v in rep.conditions.values())


# -- minimal fibrations ----------------------------------------------------------------------

FIBRATIONS = ["codiscrete2-family", "codiscrete2-square", "codiscrete2-over-point"]


@pytest.mark.parametrize("name", FIBRATIONS)
def test_minimal_fibration_factorization(name):
    p = M[name][0]
    fac = minimal_fibration_factorization(p)
    assert fac.r.then(fac.q) == p
    assert is_minimal_fibration(fac.q).passed
    assert is_fibration(fac.q).passed
    assert is_trivial_fibration(fac.r).passed
    assert fac.retract_diagram().passed
    assert certify_minimal_model(fac.model).passed


def test_family_minimal_fibration_is_the_base():
    fac = minimal_fibration_factorization(M["codiscrete2-family"][0])
    assert sizes(fac.S) == [2, 3, 4]
    assert fac.q.is_iso()


@pytest.mark.parametrize("name", FIBRATIONS)
def test_minimal_fibrations_are_pullback_stable(name):
    q = minimal_fibration_factorization(M[name][0]).q
    along = [f for f, _, _ in M.values() if f.target == q.target]
    assert along
    for f in along:
        _, _, pb = pullback(q, f)
        assert is_minimal_fibration(pb).passed


# -- extension along a trivial cofibration ----------------------------------------------------

def test_extend_fibration_along_vertex():
    v = M["vertex0"][0]
    p = collapse_map(P["codiscrete2"], P["cube0"])
    res = extend_fibration(v, p)
    assert res.success, res.lines()
    assert res.certificate.passed
    assert is_cartesian(res.square_top, p, res.p_ext, v)
    assert sizes(res.p_ext.source) == [3, 7, 25]


def test_extend_fibration_budget_zero():
    v = M["vertex0"][0]
    p = collapse_map(P["codiscrete2"], P["cube0"])
    res = extend_fibration(v, p, budget=0)
    assert not res.success
    assert any(n.startswith("residual: box[1,") for n in res.notes)


def test_extend_fibration_needs_mono():
    p = collapse_map(P["codiscrete2"], P["cube0"])
    with pytest.raises(PreconditionError):
        extend_fibration(collapse_map(P["cube1"], P["cube0"]), p)


# -- gluing -----------------------------------------------------------------------------------

def scenario():
    p0, w, j, p1_ext = (M[k][0] for k in ("glue-p0", "glue-w", "vertex0", "codiscrete2-family"))
    p1, i1, w1 = factor_through_pullback(p0, w, j, p1_ext)
    return p0, w1, p1, j, p1_ext, i1


def test_glue_scenario():
    p0, w1, p1, j, p1_ext, i1 = scenario()
    g = glue_equivalence_extension(p0, w1, p1, j, p1_ext, i1)
    assert g.certificate.passed, g.lines()
    assert [line.split(":")[0] for line in g.lines()] == [
        "square is cartesian", "p0' is a fibration", "w' is a fiberwise weak equivalence",
        "p1' o w' = p0'", "w' o i0 = i1 o w"]
    assert g.p0_ext.target == j.target


def test_glue_rejects_non_equivalence():
    p0, w1, p1, j, p1_ext, i1 = scenario()
    # replace the one-point fiber by two discrete points: no longer an equivalence
    d = collapse_map(P["discrete2"], P["cube0"])
    w_bad = next(f for f in extensions(P["discrete2"], p1.source) if f.then(p1) == d)
    with pytest.raises(PreconditionError, match="fiberwise weak equivalence"):
        glue_equivalence_extension(d, w_bad, p1, j, p1_ext, i1)


def test_factor_through_pullback_checks_base():
    p0, w, j, p1_ext = (M[k][0] for k in ("glue-p0", "glue-w", "vertex1", "codiscrete2-family"))
    with pytest.raises(PreconditionError):
        factor_through_pullback(p0, w, j, p1_ext)


def test_glue_along_identity():
    p = M["codiscrete2-family"][0]
    ident = identity_map(p.source)
    g = glue_equivalence_extension(p, ident, p, identity_map(p.target), p, ident)
    assert g.certificate.passed
