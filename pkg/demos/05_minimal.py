"""Minimal models, minimal fibrations and gluing along the vertex of an interval.

Run: python demos/05_minimal.py
"""

from ezfib.fixtures import morphisms, presheaves
from ezfib.minimal import (
    certify_minimal_model,
    check_minimal_characterization,
    extend_fibration,
    factor_through_pullback,
    glue_equivalence_extension,
    minimal_fibration_factorization,
    minimal_model,
)
from ezfib.presheaf import collapse_map

P = presheaves()
M = morphisms()


def sizes(X):
    return [X.size(d) for d in range(X.N + 1)]


for name in ("codiscrete3", "discrete2", "nz2"):
    mm = minimal_model(P[name])
    print(f"{name}: {sizes(P[name])} retracts onto {sizes(mm.S)}")
    for line in certify_minimal_model(mm).lines():
        print("   ", line)

rep = check_minimal_characterization(P["codiscrete2"], [P["discrete2"]])
print("\nwhy codiscrete2 is not minimal:")
print("\n".join("   " + line for line in rep.lines()))

p = M["codiscrete2-square"][0]
fac = minimal_fibration_factorization(p)
print("\ncodiscrete2 x codiscrete2 -> codiscrete2 factors through", sizes(fac.S))
print("\n".join("   " + line for line in fac.retract_diagram().lines()))

# extend a fibration over {0} to the whole interval, then glue an equivalence along it
v = M["vertex0"][0]
ext = extend_fibration(v, collapse_map(P["codiscrete2"], P["cube0"]))
print("\nextension over the interval:", sizes(ext.p_ext.source))
print("\n".join("   " + line for line in ext.lines()))

p0, w, j, p1_ext = (M[k][0] for k in ("glue-p0", "glue-w", "vertex0", "codiscrete2-family"))
p1, i1, w1 = factor_through_pullback(p0, w, j, p1_ext)
g = glue_equivalence_extension(p0, w1, p1, j, p1_ext, i1)
print("\ngluing the point into the codiscrete family:")
print("\n".join("   " + line for line in g.lines()))
