"""Build the Milnor-Witt Gersten complex of P1 over F_3 and print its homology."""

from chowwitt.gersten import build, homology
from chowwitt.scheme import CatalogScheme, TwistData

X = CatalogScheme.parse("P1/Fp:3")
for twist in (0, -1):
    c = build(X, "mw-rational", TwistData(twist), n=-1, support=2)
    sizes = {p: c.size(p) for p in c.degrees}
    print(f"twist {twist}: term sizes {sizes}")
    for p, h in sorted(homology(c).items()):
        print(f"  H at delta={p}: {h.render()}")
