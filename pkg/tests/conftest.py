from fractions import Fraction

import pytest
from hypothesis import strategies as st

from susypva.superpoly import SPoly, Variable

U = Variable("u", 0, 0)
PSI = Variable("psi", 1, 1)
V = Variable("v", 0, 2)
PHI = Variable("phi", 1, 3)
GENS = [U, PSI, V, PHI]


@st.composite
def monomials(draw, gens=GENS, max_factors=3, max_order=2):
    m = SPoly.const(Fraction(draw(st.integers(-3, 3).filter(bool))))
    for _ in range(draw(st.integers(0, max_factors))):
        m = m * draw(st.sampled_from(gens))(draw(st.integers(0, max_order)))
    return m


@st.composite
def polys(draw, gens=GENS, max_terms=3, max_factors=3):
    out = SPoly()
    for _ in range(draw(st.integers(1, max_terms))):
        out = out + draw(monomials(gens, max_factors))
    return out


@pytest.fixture(scope="session")
def osp22():
    from susypva.liesuper import builtin

    return builtin("osp22")


@pytest.fixture(scope="session")
def osp22_w(osp22):
    from susypva.dsred import canonical_form

    return canonical_form(osp22[1])


@pytest.fixture(scope="session")
def osp22_loop(osp22):
    from susypva.loopalg import LoopAlgebra

    return LoopAlgebra(osp22[1])


@pytest.fixture(scope="session")
def osp22_hierarchy(osp22_w, osp22_loop):
    from susypva.hierarchy import Hierarchy

    return Hierarchy(osp22_w, osp22_loop, window=5)
