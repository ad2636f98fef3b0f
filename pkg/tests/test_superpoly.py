from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import PHI, PSI, U, V, polys
from susypva.superpoly import (
    D,
    D_power,
    Functional,
    ParseError,
    SPoly,
    Variable,
    apply_D,
    functional_equal,
    is_total_derivative,
    normal_form,
    parse_spoly,
    partial,
    substitute,
    variational,
)

NAMES = {v.name: v for v in (U, PSI, V, PHI)}


def p(text):
    return parse_spoly(text, NAMES)


class TestArithmetic:
    def test_odd_variables_anticommute(self):
        assert PSI() * PHI() == -(PHI() * PSI())
        assert PSI() * PSI() == 0
        assert PSI(1) * PSI(1) != 0  # D psi is even

    def test_parity(self):
        assert p("u*psi").parity() == 1
        assert p("psi'").parity() == 0
        assert p("u'").parity() == 1
        with pytest.raises(ValueError):
            p("u + psi").parity()

    def test_constant_parameter_must_be_even(self):
        with pytest.raises(ValueError):
            Variable("eps", 1, -1, constant=True)

    def test_degree_and_parts(self):
        a = p("3 + u + u*v'")
        assert a.degree() == 2
        assert a.homogeneous_part(1) == U()
        assert a.constant_term() == 3


class TestDerivation:
    def test_D_squared_is_double_order(self):
        assert D(D(U())) == U(2)
        assert D_power(PSI(), 3) == PSI(3)

    def test_odd_leibniz(self):
        assert D(PSI() * U()) == PSI(1) * U() - PSI() * U(1)
        assert apply_D(U() * PSI()) == U(1) * PSI() + U() * PSI(1)

    @settings(max_examples=60, deadline=None)
    @given(polys(), polys())
    def test_leibniz_property(self, a, b):
        even, odd = a.split_parity()
        for part, sign in ((even, 1), (odd, -1)):
            assert D(part * b) == D(part) * b + (part * D(b)).scale(sign)

    @settings(max_examples=60, deadline=None)
    @given(polys())
    def test_D_squared_property(self, a):
        assert D(D(a)) == D_power(a, 2)

    def test_partial(self):
        assert partial(p("u*u'*v"), U, 1) == p("u*v")
        assert partial(p("psi*phi"), PHI) == -PSI()


class TestFunctionals:
    @settings(max_examples=40, deadline=None)
    @given(polys(max_factors=2))
    def test_total_derivatives_vanish(self, a):
        assert is_total_derivative(D(a))
        for v in (U, PSI, V, PHI):
            assert variational(D(a), v) == 0

    @settings(max_examples=40, deadline=None)
    @given(polys(max_factors=2))
    def test_normal_form_is_idempotent_and_equivalent(self, a):
        nf = normal_form(a)
        assert normal_form(nf) == nf
        assert functional_equal(a, nf)

    def test_integration_by_parts(self):
        assert Functional(p("u*v''")) == Functional(p("-u''*v"))
        assert Functional(p("u*u'")) == 0
        assert Functional(p("psi*psi'")) != 0

    def test_constant_is_not_a_total_derivative(self):
        assert not is_total_derivative(SPoly.const(1))

    def test_variational_sign_on_odd_order(self):
        # int psi psi' gives delta/delta psi = 2 psi'
        assert variational(p("psi*psi'"), PSI) == p("2*psi'")

    def test_functional_text(self):
        assert Functional(p("u'*v")).to_text() == Functional(p("-u*v'")).to_text()


class TestParser:
    def test_postfix_forms(self):
        assert p("(u*v)'") == D(U() * V())
        assert p("u^(3)") == U(3)
        assert p("(u*psi)''") == D(D(U() * PSI()))

    def test_fractions_and_powers(self):
        assert p("1/2*u^2") == (U() * U()).scale(Fraction(1, 2))

    @pytest.mark.parametrize("bad", ["u +", "w", "u*X", "(u"])
    def test_errors(self, bad):
        with pytest.raises(ParseError):
            p(bad)

    @settings(max_examples=40, deadline=None)
    @given(polys())
    def test_text_round_trip(self, a):
        assert p(a.to_text()) == a


def test_substitute_commutes_with_D():
    a = p("u*v' + u''")
    img = {U: p("psi*phi"), V: p("u^2")}
    assert substitute(D(a), img) == D(substitute(a, img))


@pytest.mark.parametrize("order", [0, 1, 2])
def test_var_orders(order):
    assert SPoly.var(U, order).max_order() == order
