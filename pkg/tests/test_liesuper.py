import json
from fractions import Fraction

import pytest

from susypva.chibracket import bracket, check_compatibility, check_pva, parse_chipoly
from susypva.liesuper import (
    InputError,
    LieSuperAlgebra,
    ReductionData,
    affine_spec,
    bar_variables,
    builtin,
    load_json,
)


def br(g, a, b):
    return g.fmt(g.bracket(g.vec(a), g.vec(b)))


class TestOsp22:
    @pytest.mark.parametrize("a,b,want", [
        ("e1", "e2", "e3"), ("f1", "f2", "f3"), ("e1", "f1", "h1"), ("e2", "f2", "h2"),
        ("h2", "e1", "2*e1"), ("h1", "e2", "2*e2"), ("h1", "f2", "-2*f2"), ("h2", "f1", "-2*f1"),
    ])
    def test_relations(self, osp22, a, b, want):
        assert br(osp22[0], a, b) == want

    def test_h1_h2_are_central_in_cartan(self, osp22):
        g = osp22[0]
        assert not g.bracket(g.vec("h1"), g.vec("h2"))

    @pytest.mark.parametrize("a,b,want", [("e1", "f1", -2), ("e2", "f2", -2), ("e3", "f3", 4), ("h1", "h2", -4)])
    def test_pairings(self, osp22, a, b, want):
        g = osp22[0]
        assert g.form(g.vec(a), g.vec(b)) == want

    def test_validates(self, osp22):
        g, rd = osp22
        assert g.validate().ok
        assert rd.validate().ok
        assert (rd.i, rd.j) == (1, 1)

    def test_dual_basis(self, osp22):
        g, rd = osp22
        for t in rd.bminus:
            for s in range(g.dim):
                assert g.form(rd.dual[t], {s: Fraction(1)}) == (1 if s == t else 0)


@pytest.mark.parametrize("name", ["sl21", "sl(3|1)", "osp(4|4)"])
def test_builtins_validate(name):
    g, rd = builtin(name)
    assert g.validate().ok
    assert rd.validate().ok


def test_psl22_fails_injectivity():
    g, rd = builtin("psl(2|2)")
    assert g.validate().ok
    rep = rd.validate()
    assert not rep.ok
    assert any("(A-3)" in m for t, m in rep.items if t == "FAIL")


def test_unknown_builtin():
    with pytest.raises(ValueError):
        builtin("e8")


class TestMutations:
    def test_structure_constant_breaks_jacobi(self, osp22):
        g = osp22[0]
        a, b, c, x = next(iter(g.structure_entries()))
        bad = g.with_structure_constant(a, b, c, x + 1)
        assert not bad.validate().ok

    def test_form_entry_breaks_invariance(self, osp22):
        g = osp22[0]
        bad = g.with_form_entry(g.index("e1"), g.index("f1"), 1)
        assert not bad.validate().ok


class TestJson:
    def test_round_trip(self, osp22):
        g = osp22[0]
        g2, rd2 = load_json(json.dumps(g.to_json()))
        assert g2.names == g.names
        for a in range(g.dim):
            for b in range(g.dim):
                assert g2.bracket_basis(a, b) == g.bracket_basis(a, b)
                assert g2.form_matrix[a][b] == g.form_matrix[a][b]

    def test_parse_error_has_position(self):
        with pytest.raises(InputError, match="line 2, column"):
            load_json('{"basis": [\n  oops]}')

    def test_missing_key(self):
        with pytest.raises(InputError):
            load_json('{"brackets": []}')

    def test_reduction_block(self, osp22):
        g, rd = osp22
        doc = g.to_json()
        doc["reduction"] = {"n": ["e2", "e3"], "m": ["e2", "e3"], "f": {"f2": 1}, "s": {"e2": 1}}
        g2, rd2 = load_json(json.dumps(doc))
        assert rd2.validate().ok
        assert rd2.bminus == rd.bminus


class TestAffine:
    def test_first_bracket_value(self, osp22):
        g = osp22[0]
        spec = affine_spec(g, 1)
        v = {x.name: x for x in spec.generators}
        assert bracket(spec, v["e1bar"](), v["f1bar"]()) == parse_chipoly("-h1bar + 2*X", v)

    def test_second_bracket_vanishing_example(self, osp22):
        g, rd = osp22
        spec = affine_spec(g, 2, rd.s)
        v = {x.name: x for x in spec.generators}
        assert not bracket(spec, v["f2bar"](), v["f1bar"]())

    def test_bar_parities_flip(self, osp22):
        g = osp22[0]
        for x, p in zip(bar_variables(g), g.parities):
            assert x.parity == 1 - p

    @pytest.mark.parametrize("name", ["osp22", "sl21"])
    def test_axioms(self, name):
        g, rd = builtin(name)
        a1 = affine_spec(g, 1)
        a2 = affine_spec(g, 2, rd.s, variables=a1.generators)
        assert check_pva(a1) and check_pva(a2)
        assert check_compatibility(a1, a2)


def test_from_matrices_rejects_inhomogeneous():
    mats = [[[0, 1], [1, 0]]]
    with pytest.raises(ValueError):
        LieSuperAlgebra.from_matrices(["x"], mats, [0, 1], [0])


def test_reduction_rejects_even_f(osp22):
    g, rd = osp22
    bad = ReductionData(g, rd.n, rd.m, g.vec("h1"), rd.s, rd.v_basis)
    assert not bad.validate().ok
