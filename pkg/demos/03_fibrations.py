"""Kan fibrations by exhaustive lifting, and the small-object factorization.

Run: python demos/03_fibrations.py
"""

from ezfib.fixtures import morphisms, presheaves
from ezfib.lifting import anodynes, bounded_soa_factorize, is_fibrant, is_fibration, is_trivial_fibration

P = presheaves()
M = morphisms()

print("fibrant objects (every open box or horn has a filler):")
for name, X in sorted(P.items()):
    v = is_fibrant(X)
    print(f"  {name:18} {v.status}" + (f"   {v.witness}" if v.witness else ""))

print("\nmaps: fibration / trivial fibration")
for name, (f, _, _) in sorted(M.items()):
    a, b = is_fibration(f), is_trivial_fibration(f)
    print((f"  {name:28} {a.status:5} {b.status:5}" + (f"   {a.witness}" if a.witness else "")).rstrip())

# the boundary of the interval sits inside the interval, but the inclusion is no fibration;
# the factorization attaches fillers until it becomes one
f = M["cube1-boundary-inclusion"][0]
res = bounded_soa_factorize(f, anodynes(f.source.N), 3)
print("\nfactor the boundary inclusion as anodyne then fibration")
print("\n".join("  " + line for line in res.lines()))
middle = res.j.target
print("  middle object sections:", [middle.size(d) for d in range(middle.N + 1)])
