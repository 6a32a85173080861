"""The classifier of small families, its fibration part, Eq and the univalence witness.

Run: python demos/06_universe.py
"""

from ezfib.fixtures import morphisms, presheaves
from ezfib.universe import (
    KappaError,
    canonical_iso,
    eq_subobject,
    hs_classify,
    identity_section,
    realize,
    univalence_from_maps,
)

P = presheaves()
M = morphisms()


def sizes(X):
    return [X.size(d) for d in range(X.N + 1)]


# every section of the base is sent to its fiber, renamed to 0..k-1
p = M["cube1-boundary-inclusion"][0]
y = hs_classify(p)
B = p.target
for d in range(B.N + 1):
    for s in range(B.size(d)):
        e = y(d, s)
        print(f"  {B.ids[d][s]:>10} -> fiber with {e.global_sections()} global sections, "
              f"largest level {e.max_fiber()}")
print("classifier natural:", y.is_natural(), "| realize o classify matches p:",
      canonical_iso(p).then(realize(y)) == p)
print("every value in the fibration part:", y.membership().status, y.membership().witness or "")

# fibers must stay below kappa
try:
    hs_classify(M["codiscrete2-over-point"][0])
except KappaError as exc:
    print("\nat the default bound:", exc)
print("with kappa 17:", hs_classify(M["codiscrete2-over-point"][0], 17).membership().status)

# Eq over the point: the self-equivalences of two discrete points are the two bijections
two = M["cube1-boundary-over-point"][0]
E = eq_subobject(two, two)
print("\nEq(2, 2) over the point:", sizes(E.total), "| identity section natural:",
      identity_section(two, E).is_natural())

# a family over {0} equivalent to the restriction of a bigger family over the interval
p0, e, j, p1_ext = (M[k][0] for k in ("glue-p0", "glue-w", "vertex0", "codiscrete2-family"))
w = univalence_from_maps(p0, e, j, p1_ext, kappa=32)
print("\nunivalence witness:")
print("\n".join("   " + line for line in w.lines()))
