from fractions import Fraction

import pytest

from susypva.loopalg import GradedExp, LoopElem, Op, TruncationError
from susypva.superpoly import SPoly, Variable


def names_in(g, la, x):
    return sorted({g.names[a] for a, _ in x.c})


def test_lambda_square(osp22, osp22_loop):
    g, _ = osp22
    la = osp22_loop
    assert la.Lambda == LoopElem.basis(g.index("f2")) + LoopElem.basis(g.index("e2"), 1)
    assert la.Lambda_sq == LoopElem.basis(g.index("h2"), 1)


def test_degree_of_z(osp22, osp22_loop):
    g, _ = osp22
    assert osp22_loop.degree(g.index("e2"), 1) == 1 - 2
    assert osp22_loop.period == 2


def test_kernel_image_split(osp22, osp22_loop):
    g, _ = osp22
    la = osp22_loop
    K, I = set(), set()
    for d in range(-1, 1):
        basis, Kb, Ib, _ = la.slot_data(d)
        for vecs, acc in ((Kb, K), (Ib, I)):
            for w in vecs:
                acc.update(g.names[a] for (a, _), c in zip(basis, w) if c)
    assert K == {"f2", "h1", "h2", "e2"}
    assert I == {"f3", "f1", "e1", "e3"}


def test_centre(osp22, osp22_loop):
    g, _ = osp22
    z = osp22_loop.center_of_kernel()
    assert len(z) == 1
    d, vec = z[0]
    assert d == 0 and set(vec) == {(g.index("h2"), 0)}


def test_decompose_and_invert(osp22, osp22_loop):
    g, _ = osp22
    la = osp22_loop
    u = Variable("u", 0)
    x = LoopElem.basis(g.index("e1"), 0, SPoly.var(u)) + LoopElem.basis(g.index("h1"), 0, SPoly.var(u))
    k, i = la.decompose(x)
    assert k + i == x
    assert names_in(g, la, k) == ["h1"]
    t = la.invert_ad_lambda_sq(i)
    assert la.bracket(la.Lambda_sq, t) == i


def test_bracket_sign_with_odd_coefficient(osp22, osp22_loop):
    g, _ = osp22
    la = osp22_loop
    psi = Variable("psi", 1)
    a = LoopElem.basis(g.index("e1"), 0, SPoly.var(psi))
    b = LoopElem.basis(g.index("f1"))
    # [a (x) psi, b (x) 1] = (-1)^{p(b) p(psi)} [a, b] (x) psi
    assert la.bracket(a, b) == LoopElem.basis(g.index("h1"), 0, -SPoly.var(psi))


def test_form_pairs_opposite_powers(osp22, osp22_loop):
    g, _ = osp22
    la = osp22_loop
    x = LoopElem.basis(g.index("e3"), 1)
    y = LoopElem.basis(g.index("f3"), -1)
    assert la.form(x, y) == 4
    assert la.form(x, LoopElem.basis(g.index("f3"), 1)) == 0


def test_exp_ad_matches_graded_exp(osp22, osp22_loop):
    g, rd = osp22
    la = osp22_loop
    u = Variable("u", 0)
    L = Op(la.Lambda + LoopElem.basis(g.index("f1"), 0, SPoly.var(u)), d1=1)
    T = {1: LoopElem.basis(g.index("e3"), 0, SPoly.var(u)).scale(Fraction(1, 3))}
    full = la.exp_ad(T[1], L, 3)
    ge = GradedExp(la, L, T)
    for d in range(-1, 4):
        assert la.part(full.X, d) == ge.part(d)


def test_exp_ad_needs_positive_degree(osp22, osp22_loop):
    g, _ = osp22
    with pytest.raises(ValueError):
        osp22_loop.exp_ad(LoopElem.basis(g.index("f2")), Op(LoopElem()), 2)


def test_truncation_error_carries_slot():
    err = TruncationError("too far", slot=7)
    assert err.slot == 7
