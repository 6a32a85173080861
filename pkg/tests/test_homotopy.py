import random

import pytest
from hypothesis import given, settings, strategies as st

from ezfib.fixtures import morphisms, presheaves
from ezfib.homotopy import (
    agreeing_partner,
    boundary_equivalent,
    boundary_homotopy,
    compose_boundary_homotopies,
    constant_homotopy,
    cylinder,
    end,
    homotopy_between,
    homotopy_inverse_search,
    is_homotopy_equivalence,
    is_weak_equivalence_fiberwise,
    partition_by_boundary_equivalence,
    random_homotopy,
)
from ezfib import shape as sh
from ezfib.lifting import FAIL, LIMITED, PASS, extensions, is_fibrant
from ezfib.presheaf import (
    collapse_map,
    identity_map,
    point,
    rep_section,
    representable,
    yoneda_map,
)

P = presheaves()
M = morphisms()


def sizes(X):
    return [X.size(d) for d in range(X.N + 1)]


def test_cylinder_structure():
    X = P["codiscrete2"]
    cyl = cylinder(X)
    I = representable("cube", 1, X.N)
    assert sizes(cyl.cyl) == [a * b for a, b in zip(sizes(I), sizes(X))]
    for e in (0, 1):
        assert cyl.ends[e].is_mono() and cyl.ends[e].is_natural()
        assert cyl.ends[e].then(cyl.proj) == identity_map(X)
    assert cylinder(X) is cyl


def test_constant_homotopy_ends():
    f = M["codiscrete2-vertex-a"][0]
    h = constant_homotopy(f)
    assert end(h, 0) == f and end(h, 1) == f


def test_homotopy_between_vertices():
    X = P["codiscrete2"]
    a, b = yoneda_map(X, 0, 0), yoneda_map(X, 0, 1)
    assert homotopy_between(a, b) is not None
    D = P["discrete2"]
    assert homotopy_between(yoneda_map(D, 0, 0), yoneda_map(D, 0, 1)) is None


# -- boundary-equivalence -------------------------------------------------------------------

def test_frozen_partitions():
    assert partition_by_boundary_equivalence(P["codiscrete2"], 0).blocks == [(0, 1)]
    assert partition_by_boundary_equivalence(P["discrete2"], 0).blocks == [(0,), (1,)]
    assert partition_by_boundary_equivalence(P["codiscrete3"], 0).blocks == [(0, 1, 2)]
    assert partition_by_boundary_equivalence(P["codiscrete2"], 1).blocks == [(0,), (1,), (2,), (3,)]
    assert partition_by_boundary_equivalence(P["nz2"], 1).blocks == [(0,), (1,)]


FIBRANT = ["point", "codiscrete2", "codiscrete3", "discrete2", "cube1-boundary", "nz2",
           "simplex-point", "codiscrete2-square"]


@pytest.mark.parametrize("name", FIBRANT)
def test_boundary_equivalence_is_an_equivalence(name):
    X = P[name]
    assert is_fibrant(X).passed
    for n in range(X.N):
        part = partition_by_boundary_equivalence(X, n)
        assert part.is_equivalence and not part.limited
        for block in part.blocks:
            if any(X.is_degenerate(n, j) for j in block):
                assert len(block) == 1


def test_top_dimension_is_limited():
    X = P["codiscrete2"]
    part = partition_by_boundary_equivalence(X, X.N)
    assert part.limited and part.notes
    assert boundary_equivalent(X, X.N, 0, 0).status == LIMITED


def test_boundary_equivalence_over_a_base():
    p = M["codiscrete2-family"][0]
    X = p.source
    # the two lifts of vertex 0 of the base are equivalent over it
    lifts = [j for j in range(X.size(0)) if p.levels[0][j] == 0]
    assert boundary_equivalent(X, 0, lifts[0], lifts[1], p).status == PASS
    over_other = [j for j in range(X.size(0)) if p.levels[0][j] == 1][0]
    assert boundary_equivalent(X, 0, lifts[0], over_other, p).status == FAIL


def test_compose_boundary_homotopies():
    X = P["codiscrete2"]
    h = boundary_homotopy(X, 0, 0, 1)
    k = boundary_homotopy(X, 0, 1, 0)
    g = compose_boundary_homotopies(X, 0, h, k)
    assert g is not None and g.is_natural()
    assert end(g, 0) == end(h, 0)
    assert end(g, 1) == end(k, 1)


# -- homotopy equivalences ----------------------------------------------------------------

def test_codiscrete_is_contractible():
    f = collapse_map(P["codiscrete2"], P["point"])
    inv = homotopy_inverse_search(f)
    assert inv is not None
    assert end(inv.h, 0) == identity_map(f.source)
    assert end(inv.h, 1) == f.then(inv.g)


def test_interval_contracts_only_with_connections():
    # plain cubes have no homotopy from the identity of the interval to an endpoint
    assert not is_homotopy_equivalence(M["vertex0"][0])
    I = representable("cube_conn", 1, 2)
    assert is_homotopy_equivalence(yoneda_map(I, 0, 1))


def test_discrete_points_are_not_equivalent_to_a_point():
    assert not is_homotopy_equivalence(collapse_map(P["discrete2"], P["point"]))
    assert not is_homotopy_equivalence(yoneda_map(P["discrete2"], 0, 0))


def test_fiberwise_weak_equivalence():
    p = M["codiscrete2-family"][0]
    v = is_weak_equivalence_fiberwise(identity_map(p.source), p, p)
    assert v.status == PASS
    sq = M["codiscrete2-square"][0]
    # the second projection C2 x C2 -> C2 is an equivalence over C2 with itself
    assert is_weak_equivalence_fiberwise(sq, sq, identity_map(sq.target)).status == PASS
    d = collapse_map(P["discrete2"], P["point"])
    c = collapse_map(P["codiscrete2"], P["point"])
    inc = next(f for f in extensions(P["discrete2"], P["codiscrete2"]) if f.is_mono())
    assert is_weak_equivalence_fiberwise(inc, d, c).status == FAIL


# -- agreeing homotopies yield boundary-equivalences ------------------------------------------

@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["codiscrete2", "codiscrete3", "nz2", "codiscrete2-square"]),
       st.integers(0, 1), st.integers(0, 10 ** 6))
def test_agreeing_homotopies_give_boundary_equivalent_ends(name, eps, seed):
    X = P[name]
    rng = random.Random(seed)
    n = rng.randrange(X.N)
    h = random_homotopy(X, n, rng)
    k = agreeing_partner(h, n, eps, rng)
    assert k is not None
    top = rep_section(X.kind, n, X.N, sh.identity(X.kind, n))
    x, y = end(h, eps).levels[n][top], end(k, eps).levels[n][top]
    assert boundary_homotopy(X, n, x, y) is not None


def test_point_partitions_are_trivial():
    X = point("cube", 2)
    assert all(len(partition_by_boundary_equivalence(X, n).blocks) == 1 for n in range(3))
