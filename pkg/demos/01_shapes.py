"""Shape categories: hom-sets, Reedy factorization and the EZ axioms.

Run: python demos/01_shapes.py
"""

from ezfib import shape as sh

print("hom-set sizes Hom(m, n) for m, n <= 2")
for kind in sh.KINDS:
    print(f"  {kind:9}", [[len(sh.homs(kind, m, n)) for n in range(3)] for m in range(3)])

# the connection max(x, y) on the square, split into a degeneracy-free epi and a mono
g = sh.connection(1, 1)
e, m = sh.reedy_factorize(g)
print(f"\nconnection {g.label()} = {m.label()} o {e.label()}")
print("sections of that epi:", [s.label() for s in sh.sections_of_epi(e)])

for kind in sh.KINDS:
    rep = sh.verify_ez_axioms(kind, 3)
    print()
    print("\n".join(rep.lines()))
