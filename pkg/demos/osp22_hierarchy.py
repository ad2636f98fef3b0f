"""
Integrable hierarchy of the osp(2|2) W-algebra
==============================================

Dress the Lax operator, read off the integrals of motion, evolve.
"""

from susypva.dsred import canonical_form
from susypva.hierarchy import Hierarchy, check_hierarchy, commutator_with_lax
from susypva.liesuper import builtin
from susypva.loopalg import LoopAlgebra

g, rd = builtin("osp22")
W = canonical_form(rd)
la = LoopAlgebra(rd)
print("Lambda   =", la.Lambda)
print("Lambda^2 =", la.Lambda_sq)

H = Hierarchy(W, la, window=5)
for n in range(3):
    print(f"rho_{n} =", H.rho(n).to_text())
    print("   quadratic part:", H.quadratic(n).to_text())

for n in range(2):
    for w, x in zip(W.wvars, H.flow(n)):
        print(f"d{w.name}/dt{n} = {x}")

# the dressed operator commutes with L_s up to the cutoff
X, valid = commutator_with_lax(H.dr_w, H.C, 1)
print("[M, L_s] vanishes through degree", valid, ":", not X)

print(check_hierarchy(H, 2).lines())
