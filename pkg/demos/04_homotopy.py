"""Homotopies through the cylinder, boundary-equivalence and homotopy inverses.

Run: python demos/04_homotopy.py
"""

from ezfib.fixtures import morphisms, presheaves
from ezfib.homotopy import (
    boundary_homotopy,
    end,
    homotopy_inverse_search,
    is_homotopy_equivalence,
    partition_by_boundary_equivalence,
)
from ezfib.presheaf import collapse_map, representable, yoneda_map

P = presheaves()

for name in ("codiscrete3", "discrete2", "nz2"):
    X = P[name]
    print(name)
    for n in range(X.N + 1):
        part = partition_by_boundary_equivalence(X, n)
        blocks = [" ".join(X.ids[n][j] for j in b) for b in part.blocks]
        tag = "  (top dimension, truncated)" if part.limited else ""
        print(f"  dim {n}: blocks {len(blocks)}{tag}")
        if len(blocks) <= 4:
            print("    " + " | ".join(blocks))

# an explicit homotopy between the two vertices of codiscrete2, constant on the empty boundary
X = P["codiscrete2"]
h = boundary_homotopy(X, 0, X.index(0, "a"), X.index(0, "b"))
print("\nhomotopy a ~ b in codiscrete2: cylinder has", h.source.size(0), "vertices;",
      "ends", end(h, 0).levels[0], end(h, 1).levels[0])

inv = homotopy_inverse_search(collapse_map(X, P["point"]))
print("codiscrete2 -> point has a homotopy inverse:", inv is not None)
print("nz2 -> point has a homotopy inverse:",
      homotopy_inverse_search(collapse_map(P["nz2"], P["simplex-point"])) is not None)

# the interval contracts to a point only once connections are available
print("\n{0} -> interval is a homotopy equivalence")
print("  plain cubes:      ", is_homotopy_equivalence(morphisms()["vertex0"][0]))
print("  with connections: ", is_homotopy_equivalence(yoneda_map(representable("cube_conn", 1, 2), 0, 1)))
