import os

import pytest
from hypothesis import given, settings, strategies as st

from ezfib.fixtures import data_dir, morphisms, presheaves, write_corpus
from ezfib.io import (
    FunctorialityError,
    NaturalityError,
    ParseError,
    format_presheaf,
    parse_morphism,
    parse_presheaf,
    read_morphism,
    read_presheaf,
    write_morphism,
    write_presheaf,
)
from ezfib.presheaf import empty, generated_subpresheaf

DATA = data_dir()
FILES = sorted(os.listdir(DATA))


def read(name):
    with open(os.path.join(DATA, name), encoding="utf-8") as fh:
        return fh.read()


def test_corpus_is_complete():
    expected = {f"{n}.psh" for n in presheaves()} | {f"{n}.map" for n in morphisms()}
    assert set(FILES) == expected


def test_corpus_matches_generator(tmp_path):
    write_corpus(str(tmp_path))
    for name in FILES:
        assert (tmp_path / name).read_text(encoding="utf-8") == read(name), name


@pytest.mark.parametrize("name", FILES)
def test_round_trip_is_byte_exact(name):
    text = read(name)
    path = os.path.join(DATA, name)
    if name.endswith(".psh"):
        assert format_presheaf(parse_presheaf(text, path)) == text
    else:
        mf = parse_morphism(text, path)
        assert mf.format() == text


def test_parsed_fixtures_equal_built_ones():
    for name, X in presheaves().items():
        assert read_presheaf(os.path.join(DATA, f"{name}.psh")) == X
    for name, (f, _, _) in morphisms().items():
        assert read_morphism(os.path.join(DATA, f"{name}.map")) == f


def test_cube1_file_census():
    X = read_presheaf(os.path.join(DATA, "cube1.psh"))
    assert X.N == 2 and X.size(0) == 2 and X.size(1) == 3
    assert len(X.nondegenerate(1)) == 1


def test_empty_presheaf():
    text = "shape cube\ntruncation 1\nsections\n  0:\n  1:\naction\n  s1 0:\n  d1_0 1:\n  d1_1 1:\n"
    X = parse_presheaf(text)
    assert X == empty("cube", 1)
    assert format_presheaf(X) == text


def test_write_and_read(tmp_path):
    X = presheaves()["codiscrete2"]
    f, _, _ = morphisms()["codiscrete2-over-point"]
    write_presheaf(X, tmp_path / "c.psh")
    write_presheaf(f.target, tmp_path / "p.psh")
    write_morphism(f, tmp_path / "f.map", "c.psh", "p.psh")
    assert read_morphism(tmp_path / "f.map") == f


# -- diagnostics --------------------------------------------------------------------------

def test_broken_degeneracy_row_names_generator_and_section():
    text = read("codiscrete2.psh").replace("s1 0: a->aa b->bb", "s1 0: a->bb b->aa")
    with pytest.raises(FunctorialityError) as exc:
        parse_presheaf(text, "bad.psh")
    msg = str(exc.value)
    assert "s1(a)" in msg and msg.startswith("bad.psh")


@pytest.mark.parametrize("edit,line,col,fragment", [
    (lambda t: t.replace("truncation 2", "truncation x"), 2, 12, "bad truncation"),
    (lambda t: t.replace("shape cube", "shape blob"), 1, 7, "unknown shape"),
    (lambda t: t.replace("  0: a b", "  0: a a"), 4, 8, "duplicate id"),
    (lambda t: t.replace("s1 0: a->aa", "s1 0: a->zz"), None, None, "not a section"),
    (lambda t: t.replace("s1 0: a->aa b->bb", "s1 0: a->aa"), None, None, "undefined on 'b'"),
    (lambda t: t + "extra\n", None, None, "trailing content"),
    (lambda t: t[:-1], None, None, "end with a newline"),
    (lambda t: t.replace("  0: a b", "  0: a  b"), 4, 5, "stray whitespace"),
])
def test_parse_errors(edit, line, col, fragment):
    with pytest.raises(ParseError) as exc:
        parse_presheaf(edit(read("codiscrete2.psh")), "bad.psh")
    assert fragment in str(exc.value)
    if line is not None:
        assert (exc.value.line, exc.value.col) == (line, col)


def test_morphism_errors():
    base = os.path.join(DATA, "x.map")
    text = read("codiscrete2-over-point.map")
    with pytest.raises(ParseError, match="no image for"):
        parse_morphism(text.replace(" b->*\n", "\n", 1), base)
    with pytest.raises(ParseError, match="not a target section"):
        parse_morphism(text.replace("a->*", "a->q", 1), base)
    # send both boundary vertices to the same endpoint: the degeneracy row no longer commutes
    inc = read("cube1-boundary-inclusion.map").replace("[1]->[1]", "[1]->[0]")
    with pytest.raises(NaturalityError):
        parse_morphism(inc, base)
    assert parse_morphism(read("codiscrete2-vertex-a.map"), base).morphism.is_natural()


# -- properties ---------------------------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["codiscrete2", "codiscrete3", "cube2", "nz2", "simplex3"]), st.data())
def test_subpresheaves_round_trip(name, data):
    X = presheaves()[name]
    d = data.draw(st.integers(0, X.N))
    j = data.draw(st.integers(0, X.size(d) - 1))
    Y, _ = generated_subpresheaf(X, [(d, j)]).to_presheaf()
    text = format_presheaf(Y)
    Z = parse_presheaf(text)
    assert Z == Y
    assert format_presheaf(Z) == text
