"""
Drinfeld-Sokolov reduction for osp(2|2)
=======================================
"""

from susypva.dsred import canonical_form, check_gauge_invariance, reduced_spec, rewrite_in_w
from susypva.liesuper import builtin
from susypva.superpoly import parse_spoly

g, rd = builtin("osp22")
print(g.validate().ok, rd.validate().ok)

W = canonical_form(rd)
print("gauge element:", W.N)
for v, w in zip(W.wvars, W.w):
    print(f"{v.name} = {w}")

# h1bar alone is not gauge invariant; the report names the offending n
ubar = {v.name: v for v in W.ubar}
print(check_gauge_invariance(W, parse_spoly("h1bar", ubar)))

# products of invariants come back in the w's
print(rewrite_in_w(W, parse_spoly("e1bar*h2bar", ubar)))

W1, W2 = reduced_spec(W, 1), reduced_spec(W, 2)
print(W1.to_text())
print(W2.to_text())
