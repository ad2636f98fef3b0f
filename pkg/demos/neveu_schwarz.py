"""
The Neveu-Schwarz bracket and super KdV
=======================================

One odd generator psi, a lambda-bracket in the odd parameter X, and the
flow generated by the simplest Hamiltonian.
"""

from fractions import Fraction

from susypva.chibracket import check_pva, hamiltonian_flow, neveu_schwarz
from susypva.superpoly import Functional, parse_spoly

ns = neveu_schwarz()
print(ns.to_text())

# skew-symmetry and Jacobi are checked symbolically
print(check_pva(ns))

psi = ns.generators[0]
h = psi() * psi(1)
print("flow:", hamiltonian_flow(ns, h, psi()))

# the central charge only moves the linear term
for c in (Fraction(1, 2), 0, 2):
    print(c, hamiltonian_flow(neveu_schwarz(c), h, psi()))

# functionals are compared modulo total derivatives
p = lambda s: parse_spoly(s, ns.variables)
print(Functional(p("psi*psi'''")) == Functional(p("-psi'*psi''")))
