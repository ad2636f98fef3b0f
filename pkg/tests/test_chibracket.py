import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import polys
from susypva.acceptance import _random_poly, _random_spec
from susypva.chibracket import (
    BracketSpec,
    ChiPoly,
    bracket,
    bracket_by_rules,
    check_compatibility,
    check_pva,
    check_sesquilinearity,
    check_skew_symmetry,
    flow_by_operator,
    hamiltonian_flow,
    induced_bracket,
    master_bracket,
    neveu_schwarz,
    parse_chipoly,
)
from susypva.superpoly import D, Functional, ParseError, SPoly, Variable, parse_spoly

NS = neveu_schwarz()
PSI = NS.generators[0]


def ns_poly(text):
    return parse_spoly(text, NS.variables)


class TestChiPoly:
    def test_chi_plus_D_on_constant(self):
        one = ChiPoly.const(SPoly.const(1))
        assert one.chi_plus_D() == parse_chipoly("X", {})

    def test_parse_and_text(self):
        x = parse_chipoly("psi'' - 3/2*X^2*psi", NS.variables)
        assert x[2] == ns_poly("-3/2*psi")
        assert parse_chipoly(x.to_text(), NS.variables) == x

    def test_at_zero(self):
        assert parse_chipoly("u + X*u'", {"u": Variable("u", 0)}).at_zero() == SPoly.var(Variable("u", 0))


class TestNeveuSchwarz:
    def test_axioms(self):
        assert check_pva(NS)
        assert check_sesquilinearity(NS, [PSI(), ns_poly("psi*psi'"), ns_poly("psi''")])

    def test_any_central_multiple_is_a_pva(self):
        assert check_pva(neveu_schwarz(Fraction(1, 2)))

    def test_broken_central_term(self):
        bad = BracketSpec.from_text("vars: psi:1\n{psi, psi} = psi'' - 3/2*X^2*psi + 1/2*X*psi' - X^3")
        rep = check_skew_symmetry(bad)
        assert not rep.ok and "residual" in rep.failures[0]

    def test_super_kdv_flow_values(self):
        h = ns_poly("psi*psi'")
        assert hamiltonian_flow(NS, h, PSI()) == ns_poly("-2*psi^(6) + 3*psi*psi^(3) + 3*psi'*psi''")
        assert hamiltonian_flow(neveu_schwarz(Fraction(1, 2)), h, PSI()) == ns_poly(
            "psi^(6) + 3*psi''*psi' + 3*psi*psi'''")

    def test_flow_by_operator_agrees(self):
        for text in ("psi*psi'", "psi*psi'''", "psi*psi'*psi''*psi'''"):
            h = ns_poly(text)
            assert flow_by_operator(NS, h, PSI) == hamiltonian_flow(NS, h, PSI())

    def test_induced_bracket_is_functional(self):
        x = induced_bracket(NS, ns_poly("psi*psi'"), ns_poly("psi*psi'''"))
        assert isinstance(x, Functional)
        assert x == 0

    def test_master_bracket_alias(self):
        assert master_bracket is bracket


class TestSkewExample:
    def test_odd_generator(self):
        u = Variable("u", 1)
        spec = BracketSpec([u], {(u, u): ChiPoly.const(SPoly.var(u))})
        rep = check_skew_symmetry(spec)
        assert not rep.ok
        assert "2*u" in rep.failures[0]

    def test_even_generator_fails_parity(self):
        u = Variable("u", 0)
        spec = BracketSpec([u], {(u, u): ChiPoly.const(SPoly.var(u))})
        assert spec.validate_parity()


class TestOracle:
    @pytest.mark.parametrize("seed", range(10))
    def test_master_formula_vs_rules(self, seed):
        rng = random.Random(seed)
        gens = [Variable("a", 0, 0), Variable("b", 1, 1), Variable("c", 0, 2)]
        spec = _random_spec(rng, gens)
        for _ in range(5):
            x, y = _random_poly(rng, gens), _random_poly(rng, gens)
            assert bracket(spec, x, y) == bracket_by_rules(spec, x, y)

    @settings(max_examples=25, deadline=None)
    @given(polys(NS.generators, max_terms=2, max_factors=3), polys(NS.generators, max_terms=2, max_factors=3))
    def test_sesquilinearity_property(self, a, b):
        for x in a.split_parity():
            if x:
                assert bracket(NS, D(x), b) == bracket(NS, x, b).chi()
                assert bracket(NS, x, b) == bracket_by_rules(NS, x, b)


class TestCompatibility:
    def test_scaled_spec_is_compatible(self):
        assert check_compatibility(NS, NS.scaled(2))

    def test_central_term_is_compatible(self):
        u = Variable("u", 1)
        s1 = BracketSpec([u], {(u, u): parse_chipoly("u'' + 1/2*X*u' - 3/2*X^2*u", {"u": u})})
        s2 = BracketSpec([u], {(u, u): parse_chipoly("X^5", {"u": u})})
        assert check_pva(s1) and check_pva(s2)
        assert check_compatibility(s1, s2)


class TestText:
    def test_round_trip(self):
        again = BracketSpec.from_text(NS.to_text(), generators=NS.generators)
        assert again.table(PSI, PSI) == NS.table(PSI, PSI)

    @pytest.mark.parametrize("bad", ["{psi} = 1", "psi psi = 1", "{psi, q} = 1"])
    def test_errors(self, bad):
        with pytest.raises(ParseError):
            BracketSpec.from_text("vars: psi:1\n" + bad)
