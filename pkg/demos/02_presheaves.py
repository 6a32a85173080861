"""Finite presheaves: the corpus, the file format and a few constructions.

Run: python demos/02_presheaves.py
"""

from ezfib.fixtures import presheaves
from ezfib.io import format_presheaf, parse_presheaf
from ezfib.fixtures import morphisms
from ezfib.presheaf import collapse_map, product, pushforward_along_mono

P = presheaves()


def sizes(X):
    return [X.size(d) for d in range(X.N + 1)]


print("corpus census (sections / nondegenerate per dimension)")
for name, X in sorted(P.items()):
    nd = [len(X.nondegenerate(d)) for d in range(X.N + 1)]
    print(f"  {name:18} {X.kind:8} {sizes(X)}  {nd}")

I = P["cube1"]
text = format_presheaf(I)
print("\nthe interval as a file:\n" + text)
assert parse_presheaf(text) == I

sq, _, _ = product(I, I)
print("interval x interval:", sizes(sq), "with", len(sq.nondegenerate(2)), "nondegenerate squares")

# every section of the interval decomposes as a degeneracy of a nondegenerate one
for d in range(I.N + 1):
    for j in range(I.size(d)):
        g, k, x = I.ez(d, j)
        print(f"  {I.ids[d][j]:>6} = {g.label()}^* {I.ids[k][x]}")

# right adjoint to pulling back along the vertex {0} -> interval
v = morphisms()["vertex0"][0]
p = collapse_map(P["codiscrete2"], P["cube0"])
q = pushforward_along_mono(v, p)
print("\npushforward of codiscrete2 along {0} -> interval:", sizes(q.total))
