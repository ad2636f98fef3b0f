from fractions import Fraction

import pytest

from susypva.acceptance import FLOWS, RHO
from susypva.chibracket import bracket
from susypva.dsred import reduced_spec
from susypva.hierarchy import (
    Hierarchy,
    check_hierarchy,
    check_lax_flows,
    commutator_with_lax,
    dressing,
    hamiltonian_h,
)
from susypva.loopalg import TruncationError
from susypva.superpoly import Functional, parse_spoly


def wp(H, text):
    return parse_spoly(text, {v.name: v for v in H.W.wvars})


@pytest.mark.parametrize("n", range(3))
def test_integrals(osp22_hierarchy, n):
    H = osp22_hierarchy
    assert H.rho(n) == Functional(wp(H, RHO[n]))


@pytest.mark.parametrize("n", range(2))
def test_flows(osp22_hierarchy, n):
    H = osp22_hierarchy
    assert H.flow(n) == [wp(H, x) for x in FLOWS[n]]


def test_quadratic_parts(osp22_hierarchy):
    H = osp22_hierarchy
    assert H.quadratic(1) == Functional(wp(H, "4*w1*w4"))
    assert H.quadratic(2) == Functional(wp(H, "2*w1''*w4"))


def test_flow_parities(osp22_hierarchy):
    H = osp22_hierarchy
    assert [H.flow_parity(n) for n in range(3)] == [0, 0, 0]


def test_default_centre_is_h2(osp22_w, osp22_loop, osp22):
    H = Hierarchy(osp22_w, osp22_loop, window=2)
    assert H.C == {osp22[0].index("h2"): Fraction(1)}


def test_rejects_non_central(osp22_w, osp22_loop, osp22):
    with pytest.raises(ValueError):
        Hierarchy(osp22_w, osp22_loop, {osp22[0].index("h1"): 1}, window=2)


def test_dressed_operator_commutes(osp22_hierarchy):
    H = osp22_hierarchy
    X, valid = commutator_with_lax(H.dr_w, H.C, 1)
    assert valid >= 5
    assert not X


def test_truncation(osp22_w, osp22_loop, osp22):
    dr = dressing(osp22_loop, osp22_w.Qc_formal(), 2)
    C = {osp22[0].index("h2"): 1}
    hamiltonian_h(dr, C, 1)
    with pytest.raises(TruncationError) as exc:
        hamiltonian_h(dr, C, 2)
    assert exc.value.slot == 4


def test_lax_flows_on_affine_variables(osp22_w, osp22_loop, osp22):
    H = Hierarchy(osp22_w, osp22_loop, {osp22[0].index("h2"): 1}, window=3)
    for n in (0, 1):
        assert check_lax_flows(osp22_w, H.dr_p, H.C, n).ok


def test_involution_under_first_bracket(osp22_hierarchy):
    H = osp22_hierarchy
    spec1 = reduced_spec(H.W, 1)
    val = bracket(spec1, H.rho(1).density, H.rho(2).density).at_zero()
    assert Functional(val).is_zero()


def test_apply_flow_is_a_derivation(osp22_hierarchy):
    H = osp22_hierarchy
    a, b = wp(H, "w1*w2'"), wp(H, "w4")
    lhs = H.apply_flow(1, a * b)
    rhs = H.apply_flow(1, a) * b + a * H.apply_flow(1, b)
    assert lhs == rhs


def test_check_hierarchy(osp22_hierarchy):
    rep = check_hierarchy(osp22_hierarchy, 2)
    assert rep.ok, rep.failures
