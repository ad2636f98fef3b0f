"""Super differential polynomials in an odd derivation D.

A :class:`Variable` ``u`` generates the derived variables ``u^(m) = D^m u``;
``u^(m)`` has parity ``p(u) + m``.  Monomials are kept sorted by
``(index, name, order)`` and signs follow the Koszul rule, so an odd
factor squared vanishes.

Variables flagged ``constant`` behave as formal parameters: they are even,
``D`` kills them, and no derived copies exist.
"""

from __future__ import annotations

import re
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping

from .linalg import rref

__all__ = [
    "Variable",
    "SPoly",
    "D",
    "D_power",
    "partial",
    "variational",
    "apply_derivation",
    "substitute",
    "normal_form",
    "is_total_derivative",
    "functional_equal",
    "variational_zero",
    "Functional",
    "functional_normal_form",
    "multiply",
    "apply_D",
    "partial_derivative",
    "variational_derivative",
    "parse_expression",
    "parse_spoly",
    "ParseError",
]


@dataclass(frozen=True, eq=False)
class Variable:
    name: str
    parity: int
    index: int = 0
    constant: bool = False
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        if self.constant and self.parity:
            raise ValueError("a constant parameter must be even")
        object.__setattr__(self, "key", (self.index, self.name))
        object.__setattr__(self, "_ident", (self.name, self.parity, self.index, self.constant))
        object.__setattr__(self, "_hash", hash(self._ident))

    def __eq__(self, other):
        return self is other or (isinstance(other, Variable) and self._ident == other._ident)

    def __hash__(self):
        return self._hash

    def __call__(self, order: int = 0) -> "SPoly":
        return SPoly.var(self, order)

    def __str__(self):
        return self.name


# A factor is (Variable, order); a monomial is a sorted tuple of (factor, exponent).

def _fkey(f):
    return (f[0].index, f[0].name, f[1])


def _fpar(f) -> int:
    return (f[0].parity + f[1]) & 1


def mono_parity(mono) -> int:
    p = 0
    for f, e in mono:
        if _fpar(f):
            p ^= e & 1
    return p


@lru_cache(maxsize=200_000)
def _mono_mul(m1, m2):
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    sign = 1
    odd2 = [_fkey(f) for f, _ in m2 if _fpar(f)]
    if odd2:
        inv = 0
        for f, _ in m1:
            if _fpar(f):
                k = _fkey(f)
                c = bisect_left(odd2, k)
                if c < len(odd2) and odd2[c] == k:
                    return 0, None
                inv += c
        if inv & 1:
            sign = -1
    merged = dict(m1)
    for f, e in m2:
        merged[f] = merged.get(f, 0) + e
    return sign, tuple(sorted(merged.items(), key=lambda it: _fkey(it[0])))


class SPoly:
    """Element of the super differential polynomial algebra over Q."""

    __slots__ = ("_t", "_h")

    def __init__(self, terms: Mapping | None = None):
        t = {}
        if terms:
            for m, c in terms.items():
                c = Fraction(c)
                if c:
                    t[m] = c
        self._t = t
        self._h = None

    @classmethod
    def _raw(cls, t: dict) -> "SPoly":
        obj = cls.__new__(cls)
        obj._t = t
        obj._h = None
        return obj

    @classmethod
    def const(cls, c) -> "SPoly":
        c = Fraction(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def var(cls, v: Variable, order: int = 0) -> "SPoly":
        if order < 0:
            raise ValueError("negative derivative order")
        if v.constant and order:
            return cls._raw({})
        return cls._raw({(((v, order), 1),): Fraction(1)})

    @staticmethod
    def coerce(x) -> "SPoly":
        if isinstance(x, SPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return SPoly.const(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to SPoly")

    @property
    def terms(self) -> Mapping:
        return self._t

    def items(self):
        return self._t.items()

    def __bool__(self):
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __add__(self, other):
        if not isinstance(other, SPoly):
            try:
                other = SPoly.coerce(other)
            except TypeError:
                return NotImplemented
        t = dict(self._t)
        for m, c in other._t.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return SPoly._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return SPoly._raw({m: -c for m, c in self._t.items()})

    def __sub__(self, other):
        if not isinstance(other, SPoly):
            try:
                other = SPoly.coerce(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return SPoly.coerce(other) - self

    def scale(self, c) -> "SPoly":
        c = Fraction(c)
        if not c:
            return SPoly._raw({})
        return SPoly._raw({m: c * v for m, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, SPoly):
            return NotImplemented
        t: dict = {}
        for m1, c1 in self._t.items():
            for m2, c2 in other._t.items():
                s, m = _mono_mul(m1, m2)
                if not s:
                    continue
                v = t.get(m, 0) + s * c1 * c2
                if v:
                    t[m] = v
                else:
                    t.pop(m, None)
        return SPoly._raw(t)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = SPoly.const(other)
        if not isinstance(other, SPoly):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def parity(self) -> int:
        """Parity of a homogeneous element; the zero polynomial counts as even."""
        ps = {mono_parity(m) for m in self._t}
        if len(ps) > 1:
            raise ValueError(f"inhomogeneous element: {self}")
        return ps.pop() if ps else 0

    def split_parity(self) -> tuple["SPoly", "SPoly"]:
        ev, od = {}, {}
        for m, c in self._t.items():
            (od if mono_parity(m) else ev)[m] = c
        return SPoly._raw(ev), SPoly._raw(od)

    def monomials(self) -> Iterator[tuple[Fraction, "SPoly"]]:
        """Yield ``(coefficient, monomial)`` pairs; each monomial is homogeneous."""
        for m, c in self._t.items():
            yield c, SPoly._raw({m: Fraction(1)})

    def variables(self) -> set[Variable]:
        return {f[0] for m in self._t for f, _ in m}

    def degree(self) -> int:
        """Largest polynomial degree, not counting constant parameters."""
        return max((_pdeg(m) for m in self._t), default=0)

    def homogeneous_part(self, deg: int) -> "SPoly":
        return SPoly._raw({m: c for m, c in self._t.items() if _pdeg(m) == deg})

    def constant_term(self) -> Fraction:
        return self._t.get((), Fraction(0))

    def coefficient(self, mono: "SPoly") -> Fraction:
        (m,) = mono._t
        return self._t.get(m, Fraction(0))

    def max_order(self) -> int:
        return max((f[1] for m in self._t for f, _ in m), default=0)

    def __repr__(self):
        return f"SPoly({format_spoly(self)!r})"

    def __str__(self):
        return format_spoly(self)

    def to_text(self) -> str:
        return format_spoly(self)

    def to_latex(self) -> str:
        return format_spoly(self, latex=True)


def _pdeg(m) -> int:
    return sum(e for f, e in m if not f[0].constant)


# ---------------------------------------------------------------- derivations

@lru_cache(maxsize=200_000)
def _D_mono(m) -> tuple:
    out = []
    ppar = 0
    for p, (f, e) in enumerate(m):
        v, o = f
        if not v.constant:
            nf = (v, o + 1)
            new = dict(m)
            if e == 1:
                del new[f]
            else:
                new[f] = e - 1
            if nf in new and _fpar(nf):
                pass
            else:
                new[nf] = new.get(nf, 0) + 1
                coef = -e if ppar else e
                out.append((tuple(sorted(new.items(), key=lambda it: _fkey(it[0]))), coef))
        if _fpar(f):
            ppar ^= e & 1
    return tuple(out)


def D(a: SPoly) -> SPoly:
    """The odd derivation ``D``."""
    t: dict = {}
    for m, c in a._t.items():
        for nm, k in _D_mono(m):
            v = t.get(nm, 0) + k * c
            if v:
                t[nm] = v
            else:
                t.pop(nm, None)
    return SPoly._raw(t)


def D_power(a: SPoly, k: int) -> SPoly:
    for _ in range(k):
        a = D(a)
    return a


def partial(a: SPoly, v: Variable, order: int = 0) -> SPoly:
    """Left partial derivative by ``v^(order)``; it has parity ``p(v)+order``."""
    target = (v, order)
    tpar = _fpar(target)
    t: dict = {}
    for m, c in a._t.items():
        ppar = 0
        for f, e in m:
            if f == target:
                new = dict(m)
                if e == 1:
                    del new[f]
                else:
                    new[f] = e - 1
                nm = tuple(sorted(new.items(), key=lambda it: _fkey(it[0])))
                k = c * e * (-1 if (tpar and ppar) else 1)
                s = t.get(nm, 0) + k
                if s:
                    t[nm] = s
                else:
                    t.pop(nm, None)
                break
            if _fpar(f):
                ppar ^= e & 1
    return SPoly._raw(t)


def variational(a: SPoly, v: Variable) -> SPoly:
    """Variational derivative ``delta a / delta v``."""
    out = SPoly()
    top = max((f[1] for m in a._t for f, _ in m if f[0] == v), default=-1)
    for m in range(top + 1):
        d = partial(a, v, m)
        if d:
            sgn = (m * v.parity + m * (m + 1) // 2) & 1
            term = D_power(d, m)
            out = out - term if sgn else out + term
    return out


def apply_derivation(a: SPoly, image: Callable[[Variable, int], SPoly], parity: int) -> SPoly:
    """Apply the derivation of the given parity sending ``v^(m)`` to ``image(v, m)``."""
    out = SPoly()
    for m, c in a._t.items():
        factors = [SPoly._raw({((f, e),): Fraction(1)}) for f, e in m]
        ppar = 0
        for p, (f, e) in enumerate(m):
            img = image(*f)
            if img:
                left = SPoly.const(c * e)
                for q in range(p):
                    left = left * factors[q]
                if e > 1:
                    left = left * SPoly._raw({((f, e - 1),): Fraction(1)})
                term = left * img
                for q in range(p + 1, len(m)):
                    term = term * factors[q]
                out = out - term if (parity and ppar) else out + term
            if _fpar(f):
                ppar ^= e & 1
    return out


def substitute(a: SPoly, images: Mapping[Variable, SPoly]) -> SPoly:
    """Differential substitution ``v -> images[v]``, ``v^(m) -> D^m images[v]``.

    Variables missing from ``images`` are left alone.
    """
    cache: dict = {}

    def img(v, o):
        if v not in images:
            return SPoly.var(v, o)
        if (v, o) not in cache:
            cache[(v, o)] = D_power(images[v], o)
        return cache[(v, o)]

    out = SPoly()
    for m, c in a._t.items():
        term = SPoly.const(c)
        for f, e in m:
            x = img(*f)
            for _ in range(e):
                term = term * x
        out = out + term
    return out


# ------------------------------------------------------- functionals mod D P

def _component(m):
    content = Counter()
    n = 0
    for (v, o), e in m:
        content[v] += e
        n += o * e
    return tuple(sorted(content.items(), key=lambda it: it[0].key)), n


def _orders(v: Variable, count: int, total: int, lo: int = 0) -> Iterator[tuple[int, ...]]:
    """Non-decreasing order tuples of length ``count`` summing to ``total``.

    Orders at which ``v^(o)`` is odd may appear at most once.
    """
    if count == 0:
        if total == 0:
            yield ()
        return
    if v.constant:
        if total == 0:
            yield (0,) * count
        return
    for o in range(lo, total // count + 1):
        odd = (v.parity + o) & 1
        for rest in _orders(v, count - 1, total - o, o + 1 if odd else o):
            yield (o,) + rest


def _component_monomials(content, n) -> list:
    out = []

    def rec(k, left, acc):
        if k == len(content):
            if left == 0:
                out.append(tuple(sorted(Counter(acc).items(), key=lambda it: _fkey(it[0]))))
            return
        v, cnt = content[k]
        for tot in range(left + 1):
            for ords in _orders(v, cnt, tot):
                rec(k + 1, left - tot, acc + [(v, o) for o in ords])

    rec(0, n, [])
    return out


def _mono_rank(m):
    keys = []
    for f, e in m:
        keys.extend([_fkey(f)] * e)
    return tuple(sorted(keys, reverse=True))


_ECHELON: dict = {}


def _echelon(content, n):
    key = (content, n)
    if key in _ECHELON:
        return _ECHELON[key]
    monos = _component_monomials(content, n)
    monos.sort(key=_mono_rank, reverse=True)
    pos = {m: i for i, m in enumerate(monos)}
    rows = []
    if n > 0:
        for m in _component_monomials(content, n - 1):
            row = [Fraction(0)] * len(monos)
            for nm, k in _D_mono(m):
                row[pos[nm]] += k
            if any(row):
                rows.append(row)
    red, piv = rref(rows, len(monos)) if rows else ([], [])
    res = (monos, pos, red, piv)
    _ECHELON[key] = res
    return res


def normal_form(a: SPoly) -> SPoly:
    """Canonical representative of the class of ``a`` modulo total derivatives.

    Works componentwise (fixed variable content and total order), where the
    image of ``D`` is a finite-dimensional subspace reduced to echelon form.
    Leading monomials, those with the highest derivatives, are eliminated.
    """
    groups: dict = {}
    for m, c in a._t.items():
        groups.setdefault(_component(m), {})[m] = c
    out: dict = {}
    for (content, n), terms in groups.items():
        if n == 0:
            out.update(terms)
            continue
        monos, pos, red, piv = _echelon(content, n)
        vec = [Fraction(0)] * len(monos)
        for m, c in terms.items():
            vec[pos[m]] += c
        for row, pc in zip(red, piv):
            if vec[pc]:
                f = vec[pc]
                vec = [x - f * y for x, y in zip(vec, row)]
        for i, x in enumerate(vec):
            if x:
                out[monos[i]] = x
    return SPoly._raw(out)


def is_total_derivative(a: SPoly) -> bool:
    """Zero-test for ``int a``; the normal form and the variational test must agree."""
    by_nf = normal_form(a).is_zero()
    by_var = variational_zero(a)
    if by_nf != by_var:
        raise ArithmeticError(f"normal form and variational test disagree on {a}")
    return by_nf


def variational_zero(a: SPoly) -> bool:
    """Constant term zero and every variational derivative zero."""
    if a.constant_term():
        return False
    return all(not variational(a, v) for v in a.variables() if not v.constant)


def functional_equal(a: SPoly, b: SPoly) -> bool:
    return is_total_derivative(a - b)


class Functional:
    """The class ``int a`` of a density modulo total derivatives."""

    __slots__ = ("density",)

    def __init__(self, density=0):
        self.density = density.density if isinstance(density, Functional) else SPoly.coerce(density)

    def normal_form(self) -> SPoly:
        return normal_form(self.density)

    def is_zero(self) -> bool:
        return is_total_derivative(self.density)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, SPoly)):
            other = Functional(other)
        if not isinstance(other, Functional):
            return NotImplemented
        return functional_equal(self.density, other.density)

    def __hash__(self):
        return hash(self.normal_form())

    def __add__(self, other):
        return Functional(self.density + Functional(other).density)

    def __sub__(self, other):
        return Functional(self.density - Functional(other).density)

    def __neg__(self):
        return Functional(-self.density)

    def scale(self, c) -> "Functional":
        return Functional(self.density.scale(c))

    def to_text(self) -> str:
        return f"int({self.normal_form().to_text()})"

    def to_latex(self) -> str:
        return rf"\int \big({self.normal_form().to_latex()}\big)"

    def __repr__(self):
        return f"Functional({self.normal_form().to_text()})"

    __str__ = to_text


def functional_normal_form(a) -> Functional:
    return Functional(normal_form(Functional(a).density))


# names used in the operation catalogue
multiply = SPoly.__mul__
apply_D = D
partial_derivative = partial
variational_derivative = variational


# ------------------------------------------------------------- text format

def _format_factor(v: Variable, o: int, e: int, latex: bool) -> str:
    name = v.name
    if latex:
        s = name if o == 0 else (name + "'" * o if o < 3 else f"{name}^{{({o})}}")
        return s if e == 1 else f"{{{s}}}^{{{e}}}"
    s = name + "'" * o if o < 3 else f"{name}^({o})"
    return s if e == 1 else f"{s}^{e}"


def _sorted_terms(t: Mapping):
    return sorted(t.items(), key=lambda it: (_pdeg(it[0]), [(_fkey(f), e) for f, e in it[0]]))


def format_terms(t: Mapping, prefix: Callable[[object], str] | None = None,
                 latex: bool = False, ordered=None) -> list[str]:
    parts = []
    items = ordered if ordered is not None else _sorted_terms(t)
    for m, c in items:
        body = [_format_factor(v, o, e, latex) for (v, o), e in m]
        if prefix is not None:
            pre = prefix(m)
            if pre:
                body = [pre] + body
        sep = " " if latex else "*"
        mag = abs(c)
        if not body:
            txt = _fmt_num(mag, latex)
        elif mag == 1:
            txt = sep.join(body)
        else:
            txt = _fmt_num(mag, latex) + sep + sep.join(body)
        parts.append(("-" if c < 0 else "+", txt))
    return parts


def _fmt_num(x: Fraction, latex: bool) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    if latex:
        return f"\\frac{{{x.numerator}}}{{{x.denominator}}}"
    return f"{x.numerator}/{x.denominator}"


def join_terms(parts) -> str:
    if not parts:
        return "0"
    s0, t0 = parts[0]
    out = ("-" if s0 == "-" else "") + t0
    for s, t in parts[1:]:
        out += f" {s} {t}"
    return out


def format_spoly(a: SPoly, latex: bool = False) -> str:
    return join_terms(format_terms(a._t, latex=latex))


# ------------------------------------------------------------- text parser

class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\^\(\s*\d+\s*\))|(\S))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise ParseError(f"unexpected input at {text[pos:]!r}")
        num, name, dord, sym = mt.groups()
        if num is not None:
            toks.append(("num", num))
        elif name is not None:
            toks.append(("name", name))
        elif dord is not None:
            toks.append(("dord", re.sub(r"\D", "", dord)))
        else:
            toks.append(("sym", sym))
        pos = mt.end()
    return toks


def parse_expression(text: str, variables: Mapping[str, Variable],
                     chi: str | None = None) -> dict[int, SPoly]:
    """Parse text into ``{k: c_k}`` meaning ``sum chi^k c_k`` (chi on the left).

    ``chi`` names an odd formal symbol; with ``chi=None`` only ``k = 0``
    occurs.  Products are taken in the written order with Koszul signs.
    """
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else ("end", "")

    def take():
        nonlocal pos
        t = peek()
        pos += 1
        return t

    def expr():
        sign = 1
        if peek() == ("sym", "-"):
            take()
            sign = -1
        elif peek() == ("sym", "+"):
            take()
        acc = _cscale(term(), sign)
        while peek() in (("sym", "+"), ("sym", "-")):
            s = -1 if take()[1] == "-" else 1
            acc = _cadd(acc, _cscale(term(), s))
        return acc

    def term():
        acc = factor()
        while True:
            if peek() == ("sym", "*"):
                take()
                acc = _cmul(acc, factor())
            elif peek()[0] in ("name", "num") or peek() == ("sym", "("):
                acc = _cmul(acc, factor())
            else:
                return acc

    def power(base):
        if peek() == ("sym", "^"):
            take()
            kind, val = take()
            if kind != "num":
                raise ParseError("expected integer exponent")
            out = {0: SPoly.const(1)}
            for _ in range(int(val)):
                out = _cmul(out, base)
            return out
        return base

    def factor():
        kind, val = take()
        if kind == "num":
            c = Fraction(int(val))
            if peek() == ("sym", "/"):
                take()
                k2, v2 = take()
                if k2 != "num":
                    raise ParseError("expected denominator")
                c /= int(v2)
            return power({0: SPoly.const(c)})
        if kind == "sym" and val == "(":
            inner = expr()
            if take() != ("sym", ")"):
                raise ParseError("unbalanced parenthesis")
            order = 0
            while peek() == ("sym", "'"):
                take()
                order += 1
            if peek()[0] == "dord":
                order += int(take()[1])
            if order:
                if set(inner) - {0}:
                    raise ParseError("derivative of an expression containing chi")
                inner = {0: D_power(inner.get(0, SPoly()), order)}
            return power(inner)
        if kind == "name":
            if chi is not None and val == chi:
                return power({1: SPoly.const(1)})
            if val not in variables:
                raise ParseError(f"unknown variable {val!r}")
            order = 0
            while peek() == ("sym", "'"):
                take()
                order += 1
            if peek()[0] == "dord":
                order += int(take()[1])
            return power({0: SPoly.var(variables[val], order)})
        raise ParseError(f"unexpected token {val!r}")

    if not toks:
        raise ParseError("empty expression")
    out = expr()
    if pos != len(toks):
        raise ParseError(f"trailing input near token {toks[pos][1]!r}")
    return {k: v for k, v in out.items() if v}


def _cadd(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] + v if k in out else v
    return out


def _cscale(a, s):
    return {k: v.scale(s) for k, v in a.items()}


def _cmul(a, b):
    # (chi^p x)(chi^q y) = (-1)^{q p(x)} chi^{p+q} x y
    out: dict = {}
    for p, x in a.items():
        for q, y in b.items():
            if q & 1:
                ev, od = x.split_parity()
                xs = ev - od
            else:
                xs = x
            # chi^2 is not zero: chi is a formal odd symbol, not a Grassmann one
            k = p + q
            prod = xs * y
            out[k] = out[k] + prod if k in out else prod
    return out


def parse_spoly(text: str, variables: Mapping[str, Variable] | Iterable[Variable]) -> SPoly:
    if not isinstance(variables, Mapping):
        variables = {v.name: v for v in variables}
    res = parse_expression(text, variables)
    if set(res) - {0}:
        raise ParseError("unexpected chi in a polynomial")
    return res.get(0, SPoly())
