"""The shipped fixture corpus.

Every fixture is built here in code; ``python -m ezfib.fixtures DIR``
writes them as ``.psh``/``.map`` files (the copies under ``ezfib/data`` are
generated this way and compared against this module by the tests).
"""
from __future__ import annotations

import os
import sys
from functools import lru_cache
from importlib import resources

from .io import format_morphism, format_presheaf
from .presheaf import (
    Presheaf,
    PresheafMorphism,
    anodyne_generators,
    boundary_subobject,
    codiscrete,
    collapse_map,
    cyclic_group,
    discrete,
    identity_map,
    nerve_of_group,
    point,
    product,
    representable,
    yoneda_map,
)

CUBE_N = 2
SIMPLEX_N = 3


def data_dir() -> str:
    return str(resources.files("ezfib") / "data")


@lru_cache(maxsize=None)
def presheaves() -> dict[str, Presheaf]:
    """Name -> presheaf, in a fixed order."""
    out: dict[str, Presheaf] = {}
    N = CUBE_N
    out["point"] = point("cube", N)
    for n in range(N + 1):
        out[f"cube{n}"] = representable("cube", n, N)
    for n in (1, 2):
        out[f"cube{n}-boundary"] = boundary_subobject("cube", n, N).to_presheaf()[0]
    for gen in anodyne_generators("cube", N, N):
        tag = gen.name[len("box["):-1].replace(",", "-")
        out[f"cube-box-{tag}"] = gen.sub.to_presheaf()[0]
    out["codiscrete2"] = codiscrete("cube", "ab", N)
    out["codiscrete3"] = codiscrete("cube", "abc", N)
    out["discrete2"] = discrete("cube", "ab", N)
    out["codiscrete2-family"] = product(out["codiscrete2"], out["cube1"])[0]
    out["codiscrete2-square"] = product(out["codiscrete2"], out["codiscrete2"])[0]
    M = SIMPLEX_N
    out["simplex-point"] = point("simplex", M)
    for n in range(M + 1):
        out[f"simplex{n}"] = representable("simplex", n, M)
    for gen in anodyne_generators("simplex", M, M):
        if gen.dim == M:
            tag = gen.name[len("horn["):-1].replace(",", "-")
            out[f"simplex-horn-{tag}"] = gen.sub.to_presheaf()[0]
    out["nz2"] = nerve_of_group(*cyclic_group(2), M)
    return out


@lru_cache(maxsize=None)
def morphisms() -> dict[str, tuple[PresheafMorphism, str, str]]:
    """Name -> (morphism, source fixture, target fixture)."""
    P = presheaves()
    out = {}

    def add(name, f, src, tgt):
        assert f.source == P[src] and f.target == P[tgt], name
        out[name] = (PresheafMorphism(P[src], P[tgt], f.levels), src, tgt)

    for name in ("codiscrete2", "codiscrete3", "discrete2", "cube1-boundary"):
        add(f"{name}-over-point", collapse_map(P[name], P["point"]), name, "point")
    add("nz2-over-point", collapse_map(P["nz2"], P["simplex-point"]), "nz2", "simplex-point")
    fam, proj_c, proj_i = product(P["codiscrete2"], P["cube1"])
    add("codiscrete2-family", proj_i, "codiscrete2-family", "cube1")
    sq, first, second = product(P["codiscrete2"], P["codiscrete2"])
    add("codiscrete2-square", second, "codiscrete2-square", "codiscrete2")
    _, inc = boundary_subobject("cube", 1, CUBE_N).to_presheaf()
    add("cube1-boundary-inclusion", inc, "cube1-boundary", "cube1")
    add("vertex0", yoneda_map(P["cube1"], 0, 0), "cube0", "cube1")
    add("vertex1", yoneda_map(P["cube1"], 0, 1), "cube0", "cube1")
    add("codiscrete2-vertex-a", yoneda_map(P["codiscrete2"], 0, 0), "cube0", "codiscrete2")
    add("cube1-identity", identity_map(P["cube1"]), "cube1", "cube1")
    # gluing scenario over vertex0: a one-point fiber mapping into the codiscrete family
    add("glue-p0", identity_map(P["cube0"]), "cube0", "cube0")
    fam_index = {(proj_c.levels[d][k], proj_i.levels[d][k]): k
                 for d in range(CUBE_N + 1) for k in range(fam.size(d))}
    levels = tuple((fam_index[(_degenerate_a(P, d), _vertex0_in_cube1(P, d))],)
                   for d in range(CUBE_N + 1))
    add("glue-w", PresheafMorphism(P["cube0"], fam, levels), "cube0", "codiscrete2-family")
    return out


def _degenerate_a(P, d):
    return P["codiscrete2"].ids[d].index("a" * (2 ** d))


def _vertex0_in_cube1(P, d):
    return yoneda_map(P["cube1"], 0, 0).levels[d][0]


def write_corpus(directory: str) -> list[str]:
    os.makedirs(directory, exist_ok=True)
    written = []
    for name, X in presheaves().items():
        path = os.path.join(directory, f"{name}.psh")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_presheaf(X))
        written.append(path)
    for name, (f, src, tgt) in morphisms().items():
        path = os.path.join(directory, f"{name}.map")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_morphism(f, f"{src}.psh", f"{tgt}.psh"))
        written.append(path)
    return written


if __name__ == "__main__":
    for p in write_corpus(sys.argv[1] if len(sys.argv) > 1 else data_dir()):
        print(p)
