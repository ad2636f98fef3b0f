"""chi-brackets on super differential polynomials.

A :class:`ChiPoly` is ``sum_n chi^n c_n`` with ``chi`` kept on the left.
The odd symbol ``chi`` supercommutes with coefficients and satisfies
``D chi + chi D = -2 chi^2`` when ``D`` is moved through it.

A :class:`BracketSpec` holds the brackets of generator pairs.  The bracket
of arbitrary elements is computed by :func:`bracket` (closed formula in the
partial derivatives) and, independently, by :func:`bracket_by_rules`
(recursion on Leibniz rules and sesquilinearity).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .superpoly import (
    SPoly,
    Variable,
    D,
    Functional,
    format_terms,
    join_terms,
    parse_expression,
    partial,
    variational,
    ParseError,
)

__all__ = [
    "ChiPoly",
    "BracketSpec",
    "bracket",
    "master_bracket",
    "bracket_by_rules",
    "lambda_bracket",
    "induced_bracket",
    "hamiltonian_flow",
    "flow_by_operator",
    "jacobi_residual",
    "check_skew_symmetry",
    "check_jacobi",
    "check_sesquilinearity",
    "check_pva",
    "check_compatibility",
    "AxiomReport",
    "neveu_schwarz",
]


def _sign_flip(c: SPoly) -> SPoly:
    """``(-1)^{p(c)} c`` applied termwise."""
    ev, od = c.split_parity()
    return ev - od


class ChiPoly:
    __slots__ = ("c",)

    def __init__(self, coeffs: Mapping[int, SPoly] | None = None):
        self.c = {k: v for k, v in (coeffs or {}).items() if v}

    @classmethod
    def const(cls, p) -> "ChiPoly":
        return cls({0: SPoly.coerce(p)})

    def __getitem__(self, n) -> SPoly:
        return self.c.get(n, SPoly())

    def degree(self) -> int:
        return max(self.c, default=-1)

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if not isinstance(other, ChiPoly):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(frozenset(self.c.items()))

    def __add__(self, other: "ChiPoly") -> "ChiPoly":
        out = dict(self.c)
        for k, v in other.c.items():
            out[k] = out[k] + v if k in out else v
        return ChiPoly(out)

    def __neg__(self):
        return ChiPoly({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "ChiPoly":
        return ChiPoly({k: v.scale(s) for k, v in self.c.items()})

    def chi(self) -> "ChiPoly":
        """``chi * self``."""
        return ChiPoly({k + 1: v for k, v in self.c.items()})

    def D(self) -> "ChiPoly":
        """``D * self`` using ``D chi^(2k+1) = -chi^(2k+1) D - 2 chi^(2k+2)``."""
        out = ChiPoly()
        for k, v in self.c.items():
            if k % 2 == 0:
                out = out + ChiPoly({k: D(v)})
            else:
                out = out + ChiPoly({k: -D(v), k + 1: v.scale(-2)})
        return out

    def chi_plus_D(self, times: int = 1) -> "ChiPoly":
        x = self
        for _ in range(times):
            x = x.chi() + x.D()
        return x

    def left_mul(self, p: SPoly) -> "ChiPoly":
        """``p * self``: moving ``p`` past ``chi^n`` costs ``(-1)^{n p(p)}``."""
        if not p:
            return ChiPoly()
        pf = _sign_flip(p)
        return ChiPoly({k: (pf if k % 2 else p) * v for k, v in self.c.items()})

    def right_mul(self, p: SPoly) -> "ChiPoly":
        return ChiPoly({k: v * p for k, v in self.c.items()})

    def at_zero(self) -> SPoly:
        return self[0]

    def map(self, f) -> "ChiPoly":
        return ChiPoly({k: f(v) for k, v in self.c.items()})

    def to_text(self, chi: str = "X", latex: bool = False) -> str:
        parts = []
        for k in sorted(self.c):
            pre = "" if k == 0 else (chi if k == 1 else f"{chi}^{k}")
            if latex and k:
                pre = "\\chi" if k == 1 else f"\\chi^{{{k}}}"
            parts.extend(format_terms(self.c[k].terms, prefix=lambda m, p=pre: p, latex=latex))
        return join_terms(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"ChiPoly({self.to_text()!r})"


def parse_chipoly(text: str, variables: Mapping[str, Variable], chi: str = "X") -> ChiPoly:
    return ChiPoly(parse_expression(text, variables, chi=chi))


def skew_transform(x: ChiPoly, pa: int, pb: int) -> ChiPoly:
    """Given ``{b_chi a} = x``, return ``(-1)^{pa pb} sum_n (-D-chi)^n b_(n)a``."""
    out = ChiPoly()
    for n, c in x.c.items():
        y = ChiPoly.const(c).chi_plus_D(n)
        out = out + (y if n % 2 == 0 else -y)
    return out if not (pa and pb) else -out


class BracketSpec:
    """Generator brackets ``{u_i chi u_j}`` for a super differential algebra.

    Only the pairs given are stored.  A missing pair whose reverse is stored
    is completed by skew-symmetry on demand; other missing pairs are zero.
    ``params`` are constant variables (formal parameters) with zero brackets.
    """

    def __init__(self, generators: Sequence[Variable], table: Mapping, params: Sequence[Variable] = (),
                 name: str = ""):
        self.generators = list(generators)
        self.params = list(params)
        self.name = name
        self._gset = set(self.generators)
        self._table: dict = {}
        for (a, b), val in table.items():
            if a not in self._gset or b not in self._gset:
                raise ValueError(f"unknown generator in pair ({a}, {b})")
            self._table[(a, b)] = val if isinstance(val, ChiPoly) else ChiPoly(val)
        self._cache: dict = {}

    @property
    def variables(self) -> dict[str, Variable]:
        return {v.name: v for v in self.generators + self.params}

    def stored(self, a: Variable, b: Variable) -> ChiPoly | None:
        return self._table.get((a, b))

    def table(self, a: Variable, b: Variable) -> ChiPoly:
        key = (a, b)
        if key in self._table:
            return self._table[key]
        if key not in self._cache:
            rev = self._table.get((b, a))
            self._cache[key] = skew_transform(rev, b.parity, a.parity) if rev is not None else ChiPoly()
        return self._cache[key]

    def stored_pairs(self):
        return list(self._table)

    def is_generator(self, v: Variable) -> bool:
        return v in self._gset

    def scaled(self, s) -> "BracketSpec":
        return BracketSpec(self.generators, {k: v.scale(s) for k, v in self._table.items()}, self.params,
                           self.name)

    def combined(self, other: "BracketSpec", weight: SPoly) -> "BracketSpec":
        """``self + weight * other`` for an even constant ``weight``."""
        keys = set(self._table) | set(other._table)
        tab = {}
        for a, b in keys:
            tab[(a, b)] = self.table(a, b) + other.table(a, b).map(lambda c: weight * c)
        params = list(dict.fromkeys(self.params + other.params + sorted(weight.variables(), key=lambda v: v.key)))
        return BracketSpec(self.generators, tab, params, name=f"{self.name}+{other.name}")

    def to_text(self) -> str:
        lines = []
        for a, b in self._table:
            lines.append(f"{{{a.name}, {b.name}}} = {self._table[(a, b)].to_text()}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str, generators: Sequence[Variable] | None = None,
                  params: Sequence[Variable] = (), name: str = "") -> "BracketSpec":
        """Parse lines ``{a, b} = <chi-polynomial in X>``.

        Without ``generators`` a header ``vars: psi:1 u:0 ...`` (name:parity)
        must come first; ``params: eps`` declares formal parameters.
        """
        gens = list(generators) if generators is not None else []
        pars = list(params)
        tab = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("vars:"):
                for i, tok in enumerate(line[5:].split()):
                    nm, _, par = tok.partition(":")
                    gens.append(Variable(nm, int(par or 0), i))
                continue
            if line.startswith("params:"):
                for tok in line[7:].split():
                    pars.append(Variable(tok, 0, -1, constant=True))
                continue
            if not line.startswith("{") or "=" not in line:
                raise ParseError(f"malformed bracket line: {raw!r}")
            lhs, rhs = line.split("=", 1)
            names = [s.strip() for s in lhs.strip()[1:-1].split(",")]
            lookup = {v.name: v for v in gens + pars}
            if len(names) != 2 or any(n not in lookup for n in names):
                raise ParseError(f"bad generator pair in {raw!r}")
            tab[(lookup[names[0]], lookup[names[1]])] = parse_chipoly(rhs, lookup)
        if not gens:
            raise ParseError("no generators declared")
        return cls(gens, tab, pars, name)

    def validate_parity(self) -> list[str]:
        """Violations of ``p(c_n) = p(a) + p(b) + n + 1``."""
        bad = []
        for (a, b), x in self._table.items():
            for n, c in x.c.items():
                want = (a.parity + b.parity + n + 1) % 2
                for _, mono in c.monomials():
                    if mono.parity() != want:
                        bad.append(f"{{{a.name} chi {b.name}}}: chi^{n} coefficient has wrong parity")
                        break
        return bad


# ---------------------------------------------------------- master formula

def _derived_vars(a: SPoly, spec: BracketSpec):
    seen = set()
    for m, _ in a.items():
        for (v, o), _ in m:
            if spec.is_generator(v):
                seen.add((v, o))
    return sorted(seen, key=lambda f: (f[0].key, f[1]))


def _gen_bracket_with(spec: BracketSpec, uj: Variable, a: SPoly) -> ChiPoly:
    """``{u_j chi a}`` by the right Leibniz rule and right sesquilinearity."""
    out = ChiPoly()
    sg = (uj.parity + 1) % 2
    for ui, m in _derived_vars(a, spec):
        am = partial(a, ui, m)
        if not am:
            continue
        y = spec.table(uj, ui).chi_plus_D(m).right_mul(am)
        out = out - y if (m * sg) % 2 else out + y
    return out


def bracket(spec: BracketSpec, a: SPoly, b: SPoly) -> ChiPoly:
    """``{a chi b}`` as a closed sum over partial derivatives of ``a`` and ``b``.

    With ``a_(i,m)`` the partial derivative by ``u_i^(m)``,

        {a chi b} = sum_{j,n} (-1)^{n(p(a)+1)} (D+chi)^n {a chi u_j} b_(j,n)
        {a chi u_j} = (-1)^{p(a) j} sum_k (-D-chi)^k c_k,
        sum_k chi^k c_k = sum_{i,m} (-1)^{m(j+1)} (D+chi)^m {u_j chi u_i} a_(i,m).

    ``D`` and ``chi`` act on everything to their right.
    """
    a, b = SPoly.coerce(a), SPoly.coerce(b)
    unknown = (a.variables() | b.variables()) - set(spec.generators) - set(spec.params)
    if unknown:
        raise ValueError(f"variables not in the bracket spec: {sorted(v.name for v in unknown)}")
    out = ChiPoly()
    bvars = _derived_vars(b, spec)
    if not bvars:
        return out
    for ah in a.split_parity():
        if not ah:
            continue
        pa = ah.parity()
        with_gen = {}
        for uj, n in bvars:
            bn = partial(b, uj, n)
            if not bn:
                continue
            if uj not in with_gen:
                x = _gen_bracket_with(spec, uj, ah)
                with_gen[uj] = skew_transform(x, pa, uj.parity)
            y = with_gen[uj].chi_plus_D(n).right_mul(bn)
            out = out - y if (n * (pa + 1)) % 2 else out + y
    return out


# --------------------------------------------------- rule-based evaluation

master_bracket = bracket


def bracket_by_rules(spec: BracketSpec, a: SPoly, b: SPoly) -> ChiPoly:
    """``{a chi b}`` by recursion on Leibniz rules and sesquilinearity.

    Independent of :func:`bracket`; used as a cross-check.
    """
    a, b = SPoly.coerce(a), SPoly.coerce(b)
    memo: dict = {}
    out = ChiPoly()
    for ca, ma in a.monomials():
        for cb, mb in b.monomials():
            out = out + _rules_mono(spec, ma, mb, memo).scale(ca * cb)
    return out


def _split_first(mono: SPoly):
    ((m, _),) = mono.items()
    (f, e), rest = m[0], list(m[1:])
    first = SPoly({((f, 1),): 1})
    if e > 1:
        rest.insert(0, (f, e - 1))
    return first, SPoly({tuple(rest): 1})


def _factor_count(mono: SPoly) -> int:
    ((m, _),) = mono.items()
    return sum(e for _, e in m)


def _single(mono: SPoly):
    ((m, _),) = mono.items()
    return m[0][0]


def _rules_arrow(spec, x: SPoly, c: SPoly, y: SPoly, memo) -> ChiPoly:
    """``{x_{chi+D} c}_-> y = (-1)^{p(x)p(c)} sum_n (-chi-D)^n (c_(n)x . y)`` for monomials."""
    rev = _rules_mono(spec, c, x, memo)
    out = ChiPoly()
    for n, cn in rev.c.items():
        z = ChiPoly.const(cn * y).chi_plus_D(n)
        out = out - z if n % 2 else out + z
    return -out if (x.parity() and c.parity()) else out


def _rules_mono(spec, a: SPoly, b: SPoly, memo) -> ChiPoly:
    key = (a, b)
    if key in memo:
        return memo[key]
    na, nb = _factor_count(a), _factor_count(b)
    if na == 0 or nb == 0:
        res = ChiPoly()
    elif nb > 1:
        b1, b2 = _split_first(b)
        sgn = -1 if (b1.parity() and b2.parity()) else 1
        res = _rules_mono(spec, a, b1, memo).right_mul(b2) + \
            _rules_mono(spec, a, b2, memo).right_mul(b1).scale(sgn)
    elif _single(b)[1] > 0:
        v, o = _single(b)
        inner = _rules_mono(spec, a, SPoly.var(v, o - 1), memo)
        res = inner.chi_plus_D()
        if a.parity() == 0:
            res = -res
    elif na > 1:
        a1, a2 = _split_first(a)
        pa1, pa2, pc = a1.parity(), a2.parity(), b.parity()
        t1 = _rules_arrow(spec, a1, b, a2, memo)
        t2 = _rules_arrow(spec, a2, b, a1, memo)
        res = (t1 if not (pa2 and pc) else -t1) + (t2 if not (pa1 and (pa2 + pc) % 2) else -t2)
    elif _single(a)[1] > 0:
        v, o = _single(a)
        res = _rules_mono(spec, SPoly.var(v, o - 1), b, memo).chi()
    else:
        u, w = _single(a)[0], _single(b)[0]
        if spec.is_generator(u) and spec.is_generator(w):
            res = spec.table(u, w)
        else:
            res = ChiPoly()
    memo[key] = res
    return res


# ------------------------------------------------------------ consequences

def lambda_bracket(x: ChiPoly) -> dict[int, SPoly]:
    """Non-SUSY bracket ``sum_n (-lambda)^n a_(2n+1)b`` as ``{n: coeff of lambda^n}``."""
    return {n // 2: (x.c[n] if (n // 2) % 2 == 0 else -x.c[n]) for n in x.c if n % 2 == 1}


def induced_bracket(spec: BracketSpec, a, b) -> Functional:
    """``{int a, int b} = int {a chi b}|_{chi=0}``."""
    return Functional(bracket(spec, Functional(a).density, Functional(b).density).at_zero())


def hamiltonian_flow(spec: BracketSpec, h, u: SPoly) -> SPoly:
    """``{h chi u}|_{chi=0}``, the evolution of ``u`` under ``int h``."""
    return bracket(spec, Functional(h).density, u).at_zero()


def flow_by_operator(spec: BracketSpec, h: SPoly, ui: Variable) -> SPoly:
    """Evolution of a generator through variational derivatives.

    ``sum_j (-1)^{i(p(h)+j)} {u_j_D u_i}_-> delta h / delta u_j``, where the
    arrow at ``chi = 0`` is ``sum_n (-1)^{n(p_i+p_j) + n(n-1)/2} c_n D^n``.
    """
    out = SPoly()
    ph = h.parity()
    for uj in spec.generators:
        dh = variational(h, uj)
        if not dh:
            continue
        tab = spec.table(uj, ui)
        flip = (uj.parity + ui.parity) % 2
        term = SPoly()
        for n, c in tab.c.items():
            x = dh
            for _ in range(n):
                x = D(x)
            t = c * x
            term = term - t if (n * flip + n * (n - 1) // 2) % 2 else term + t
        out = out - term if (ui.parity * (ph + uj.parity)) % 2 else out + term
    return out


# ------------------------------------------------------------ axiom checks

class _CG:
    """Polynomials ``sum chi^m gamma^n c`` in normal order (chi left of gamma)."""

    def __init__(self, c=None):
        self.c = {k: v for k, v in (c or {}).items() if v}

    def add(self, m, n, v):
        k = (m, n)
        s = self.c[k] + v if k in self.c else v
        if s:
            self.c[k] = s
        else:
            self.c.pop(k, None)

    def __sub__(self, o):
        out = _CG(dict(self.c))
        for (m, n), v in o.c.items():
            out.add(m, n, -v)
        return out

    def is_zero(self):
        return not self.c


def _chi_gamma_power(k: int) -> dict:
    """``(chi+gamma)^k`` as ``{(a, b): coefficient}`` using ``chi gamma = -gamma chi``."""
    r, odd = divmod(k, 2)
    out = {}
    for s in range(r + 1):
        cf = comb(r, s)
        if odd:
            out[(2 * s + 1, 2 * (r - s))] = out.get((2 * s + 1, 2 * (r - s)), 0) + cf
            out[(2 * s, 2 * (r - s) + 1)] = out.get((2 * s, 2 * (r - s) + 1), 0) + cf
        else:
            out[(2 * s, 2 * (r - s))] = cf
    return out


def jacobi_residual(spec: BracketSpec, a: SPoly, b: SPoly, c: SPoly, evaluator=bracket) -> _CG:
    """LHS minus RHS of the Jacobi identity for homogeneous ``a, b, c``."""
    pa, pb = a.parity(), b.parity()
    lhs = _CG()
    for n, x in evaluator(spec, b, c).c.items():
        s0 = n * (pa + 1)
        for m, y in evaluator(spec, a, x).c.items():
            lhs.add(m, n, -y if (s0 + n * m) % 2 else y)
    rhs = _CG()
    s2 = (pa + 1) * (pb + 1)
    for m, x in evaluator(spec, a, c).c.items():
        s0 = s2 + m * (pb + 1)
        for n, y in evaluator(spec, b, x).c.items():
            rhs.add(m, n, -y if s0 % 2 else y)
    for m, x in evaluator(spec, a, b).c.items():
        s0 = pa + 1 + m
        for k, z in evaluator(spec, x, c).c.items():
            for (ea, eb), cf in _chi_gamma_power(k).items():
                rhs.add(m + ea, eb, z.scale(-cf if s0 % 2 else cf))
    return lhs - rhs


@dataclass
class AxiomReport:
    ok: bool
    failures: list[str] = field(default_factory=list)
    checked: int = 0

    def __bool__(self):
        return self.ok


def check_skew_symmetry(spec: BracketSpec, elements: Iterable[SPoly] | None = None) -> AxiomReport:
    if elements is None:
        elements = [SPoly.var(g) for g in spec.generators]
    els = list(elements)
    fails, count = [], 0
    for x in els:
        for y in els:
            count += 1
            lhs = bracket(spec, x, y)
            rhs = skew_transform(bracket(spec, y, x), x.parity(), y.parity())
            res = lhs - rhs
            if res:
                fails.append(f"skew-symmetry fails for ({x}, {y}): residual {res}")
    return AxiomReport(not fails, fails, count)


def check_jacobi(spec: BracketSpec, elements: Iterable[SPoly] | None = None) -> AxiomReport:
    if elements is None:
        elements = [SPoly.var(g) for g in spec.generators]
    els = list(elements)
    fails, count = [], 0
    for x in els:
        for y in els:
            for z in els:
                count += 1
                res = jacobi_residual(spec, x, y, z)
                if not res.is_zero():
                    terms = "; ".join(f"chi^{m} gamma^{n}: {v}" for (m, n), v in sorted(res.c.items()))
                    fails.append(f"Jacobi fails for ({x}, {y}, {z}): {terms}")
    return AxiomReport(not fails, fails, count)


def check_sesquilinearity(spec: BracketSpec, elements: Iterable[SPoly]) -> AxiomReport:
    els = list(elements)
    fails, count = [], 0
    for x in els:
        for y in els:
            count += 1
            base = bracket(spec, x, y)
            if bracket(spec, D(x), y) != base.chi():
                fails.append(f"left sesquilinearity fails for ({x}, {y})")
            right = base.chi_plus_D()
            if x.parity() == 0:
                right = -right
            if bracket(spec, x, D(y)) != right:
                fails.append(f"right sesquilinearity fails for ({x}, {y})")
    return AxiomReport(not fails, fails, count)


def check_pva(spec: BracketSpec) -> AxiomReport:
    """Parity, skew-symmetry and Jacobi on generators; enough for the whole algebra."""
    fails = spec.validate_parity()
    sk = check_skew_symmetry(spec)
    jac = check_jacobi(spec)
    fails += sk.failures + jac.failures
    return AxiomReport(not fails, fails, sk.checked + jac.checked)


def check_compatibility(spec1: BracketSpec, spec2: BracketSpec, param_name: str = "eps") -> AxiomReport:
    """Jacobi for ``spec1 + eps * spec2`` with ``eps`` a formal even parameter."""
    eps = Variable(param_name, 0, -1, constant=True)
    pencil = spec1.combined(spec2, SPoly.var(eps))
    return check_jacobi(pencil)


def neveu_schwarz(central=-1) -> BracketSpec:
    """``{psi chi psi} = psi'' - 3/2 chi^2 psi + 1/2 chi psi' + central chi^5`` on one odd generator."""
    c = Fraction(central)
    return BracketSpec.from_text(f"vars: psi:1\n{{psi, psi}} = psi'' - 3/2*X^2*psi + 1/2*X*psi' + ({c})*X^5",
                                 name=f"NS(c={c})")

