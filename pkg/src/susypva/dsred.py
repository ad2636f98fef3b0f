"""SUSY Drinfeld-Sokolov reduction: canonical form, W-generators, reduced brackets.

The differential algebra ``P`` is generated by the parity-reversed duals
``qbar_t`` of a basis of ``b_-``.  The Lax operator is

    L(Q_u) = D + Q_u + f (x) 1,    Q_u = sum_t q^t (x) qbar_t,

and a gauge transformation ``exp(ad N)`` with ``N`` even in ``n (x) P``
brings it to ``D + Q^c + f`` with ``Q^c`` in ``V (x) P``.  The coefficients of
``Q^c`` along the chosen basis of ``V`` are the generators ``w``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .chibracket import BracketSpec, ChiPoly, bracket
from .linalg import inverse, rref
from .liesuper import LieSuperAlgebra, ReductionData, affine_spec, bar_variables
from .loopalg import LoopAlgebra, LoopElem, Op
from .superpoly import Functional, SPoly, Variable, substitute, variational

__all__ = [
    "WPresentation",
    "canonical_form",
    "lax_operator",
    "gauge_apply",
    "rewrite_in_w",
    "check_gauge_invariance",
    "reduced_bracket",
    "reduced_spec",
    "lax_form_bracket",
    "NotInWError",
]


class NotInWError(ValueError):
    """Raised when an expression is not a polynomial in the W-generators."""


def lax_operator(rd: ReductionData, variables: Sequence[Variable] | None = None,
                 with_s: bool = False) -> tuple[Op, LoopElem]:
    """``L(Q_u)`` (or ``L_s`` when ``with_s``) and ``Q_u`` itself."""
    g = rd.g
    ubar = list(variables) if variables is not None else bar_variables(g)
    Q = LoopElem()
    for t in rd.bminus:
        Q = Q + LoopElem.from_vec(rd.dual[t], 0, ubar[t]())
    X = Q + LoopElem.from_vec(rd.f, 0)
    if with_s:
        X = X + LoopElem.from_vec(rd.s, 1)
    return Op(X, d1=1), Q


def gauge_apply(la: LoopAlgebra, N: LoopElem, L: Op, dmax: int | None = None) -> Op:
    """``exp(ad N) L`` for ``N`` of positive degree."""
    if dmax is None:
        dmax = max(la.g.degrees)
    return la.exp_ad(N, L, dmax)


class WPresentation:
    """Canonical form data for one reduction.

    Attributes: ``ubar`` (affine generators, one per basis element of g),
    ``N`` (the gauge element), ``Qc`` (canonical Q), ``w`` (generators as
    polynomials in ``ubar``), ``wvars`` (formal W variables).
    """

    def __init__(self, rd: ReductionData, loop: LoopAlgebra | None = None):
        self.rd = rd
        self.g: LieSuperAlgebra = rd.g
        self.loop = loop if loop is not None else _GradedOnly(rd)
        self.ubar = bar_variables(self.g)
        self.P_vars = [self.ubar[t] for t in rd.bminus]
        self.m_vars = [self.ubar[a] for a in rd.m]
        self.L, self.Qu = lax_operator(rd, self.ubar)
        self._setup_projection()
        self.N, self.Lc = self._solve()
        self.w = self._read_w()
        self.wvars = [Variable(f"w{k + 1}", (self.g.parity_of(v) + 1) % 2, k)
                      for k, v in enumerate(rd.v_basis)]
        self._slice = None
        self._spec_cache: dict = {}

    # linear algebra on b = V + [f, n]
    def _setup_projection(self):
        g, rd = self.g, self.rd
        self.fn_vecs = rd.fn
        cols = [_dense(v, g.dim) for v in rd.v_basis] + [_dense(v, g.dim) for v in self.fn_vecs]
        n = len(cols)
        _, piv = rref(cols and [[c[r] for c in cols] for r in range(g.dim)])
        # piv are columns of the transposed matrix = independent rows (coordinates)
        rows_t = [[c[r] for c in cols] for r in range(g.dim)]
        _, piv_rows = rref([[rows_t[r][k] for r in range(g.dim)] for k in range(n)])
        if len(piv_rows) < n:
            raise ValueError("V + [f, n] is not a direct sum")
        self._proj_rows = piv_rows
        self._proj_inv = inverse([rows_t[r] for r in piv_rows])

    def _coords(self, x: LoopElem) -> list[SPoly]:
        """Coordinates of a z^0 element of b along ``V`` then ``[n, f]``."""
        vec = [x.coefficient(r, 0) for r in self._proj_rows]
        out = []
        for row in self._proj_inv:
            acc = SPoly()
            for cf, v in zip(row, vec):
                if cf and v:
                    acc = acc + v.scale(cf)
            out.append(acc)
        return out

    def _solve(self) -> tuple[LoopElem, Op]:
        g, rd, la = self.g, self.rd, self.loop
        dmax = max(g.degrees)
        bdegs = sorted({g.degrees[a] for a in range(g.dim) if rd.in_b({a: Fraction(1)})})
        N = LoopElem()
        L = self.L
        nv = len(rd.v_basis)
        for k in bdegs:
            cur = la.exp_ad(N, self.L, dmax) if N else self.L
            Xk = la.part(cur.X, k)
            coords = self._coords(Xk)
            step = LoopElem()
            for a, P in zip(rd.n, coords[nv:]):
                if not P or g.degrees[a] != k + rd.i:
                    continue
                r = P if g.parities[a] else -P
                step = step + LoopElem.basis(a, 0, r)
            N = N + step
        L = la.exp_ad(N, self.L, dmax) if N else self.L
        rest = L.X - LoopElem.from_vec(rd.f, 0)
        coords = self._coords(rest)
        if any(coords[nv:]):
            raise ArithmeticError("canonical form did not converge")
        return N, L

    def _read_w(self) -> list[SPoly]:
        rest = self.Lc.X - LoopElem.from_vec(self.rd.f, 0)
        coords = self._coords(rest)
        nv = len(self.rd.v_basis)
        check = LoopElem()
        for v, c in zip(self.rd.v_basis, coords[:nv]):
            check = check + LoopElem.from_vec(v, 0, c)
        if check != rest:
            raise ArithmeticError("canonical Q is not inside V")
        return coords[:nv]

    # naming
    def names(self) -> list[str]:
        return [v.name for v in self.wvars]

    def Qc_formal(self) -> LoopElem:
        """``Q^c`` with the formal W variables as coefficients."""
        out = LoopElem()
        for v, wv in zip(self.rd.v_basis, self.wvars):
            out = out + LoopElem.from_vec(v, 0, wv())
        return out

    def m_substitution(self) -> dict:
        """``mbar -> (f|m)`` for the generators attached to m."""
        g, rd = self.g, self.rd
        return {self.ubar[a]: SPoly.const(g.form(rd.f, {a: Fraction(1)})) for a in rd.m}

    def to_w(self, expr: SPoly) -> SPoly:
        return rewrite_in_w(self, expr)

    def from_w(self, expr: SPoly) -> SPoly:
        return substitute(expr, dict(zip(self.wvars, self.w)))


class _GradedOnly(LoopAlgebra):
    """Loop algebra without ``s``: only the grading and brackets are used."""

    def __init__(self, rd: ReductionData):
        self.rd = rd
        self.g = rd.g
        self.i = rd.i
        self.j = rd.j if rd.j else 0
        self.period = max(self.i + self.j, 1)
        self._slot_cache = {}


def canonical_form(rd: ReductionData) -> WPresentation:
    return WPresentation(rd)


def _leading_slice(W: WPresentation):
    """Slice variables, the inverse map on the slice, and the zeroed variables."""
    if W._slice is not None:
        return W._slice
    Pv = W.P_vars
    rows = []
    for w in W.w:
        rows.append([w.coefficient(SPoly.var(v)) for v in Pv])
    red, piv = rref(rows)
    if len(piv) < len(W.w):
        raise NotInWError("linear parts of the W-generators are dependent")
    lead = [Pv[c] for c in piv]
    zero = {v: SPoly() for v in Pv if v not in lead}
    restricted = [substitute(w, zero) for w in W.w]
    M = []
    for r in restricted:
        row = [r.coefficient(SPoly.var(v)) for v in lead]
        lin = SPoly()
        for c, v in zip(row, lead):
            lin = lin + SPoly.var(v).scale(c)
        if lin != r:
            raise NotInWError("W-generators are not linear on the slice; choose V spanned by dual vectors")
        M.append(row)
    Minv = inverse(M)
    # lead_k = sum_l Minv[k][l] w_l
    inv_map = {}
    for k, v in enumerate(lead):
        e = SPoly()
        for l, wv in enumerate(W.wvars):
            if Minv[k][l]:
                e = e + SPoly.var(wv).scale(Minv[k][l])
        inv_map[v] = e
    W._slice = (zero, inv_map)
    return W._slice


def rewrite_in_w(W: WPresentation, expr: SPoly) -> SPoly:
    """Express an element of ``P`` as a differential polynomial in the w's.

    Restricts to the slice where ``Q_u`` is already canonical, inverts the
    (linear) generators there, then verifies by substituting back.
    """
    expr = substitute(expr, W.m_substitution())
    extra = expr.variables() - set(W.P_vars)
    if extra:
        raise NotInWError(f"expression uses variables outside P: {sorted(v.name for v in extra)}")
    zero, inv_map = _leading_slice(W)
    cand = substitute(substitute(expr, zero), inv_map)
    if W.from_w(cand) != expr:
        raise NotInWError("expression is not gauge invariant (not in the W-algebra)")
    return cand


def affine_specs(W: WPresentation) -> tuple[BracketSpec, BracketSpec]:
    if "affine" not in W._spec_cache:
        a1 = affine_spec(W.g, 1, variables=W.ubar)
        a2 = affine_spec(W.g, 2, W.rd.s, variables=W.ubar) if W.rd.s else None
        W._spec_cache["affine"] = (a1, a2)
    return W._spec_cache["affine"]


def check_gauge_invariance(W: WPresentation, p: SPoly) -> tuple[bool, list]:
    """``p`` in ``P`` is gauge invariant iff ``{nbar chi p}_1`` vanishes after ``mbar -> (f|m)``."""
    a1, _ = affine_specs(W)
    sub = W.m_substitution()
    witnesses = []
    for a in W.rd.n:
        x = bracket(a1, W.ubar[a](), p).map(lambda c: substitute(c, sub))
        if x:
            witnesses.append((W.g.names[a], x))
    return (not witnesses), witnesses


def reduced_bracket(W: WPresentation, a: SPoly, b: SPoly, which: int = 1) -> ChiPoly:
    """``{a chi b}`` on the W-algebra for ``a, b`` polynomials in the w variables."""
    a1, a2 = affine_specs(W)
    spec = a1 if which == 1 else a2
    if spec is None:
        raise ValueError("second bracket needs s")
    sub = W.m_substitution()
    raw = bracket(spec, W.from_w(a), W.from_w(b))
    return ChiPoly({n: rewrite_in_w(W, substitute(c, sub)) for n, c in raw.c.items()})


def reduced_spec(W: WPresentation, which: int = 1) -> BracketSpec:
    key = ("reduced", which)
    if key not in W._spec_cache:
        tab = {}
        wv = W.wvars
        for x in range(len(wv)):
            for y in range(x, len(wv)):
                val = reduced_bracket(W, wv[x](), wv[y](), which)
                if val:
                    tab[(wv[x], wv[y])] = val
        W._spec_cache[key] = BracketSpec(wv, tab, name=f"W{which}({W.g.label})")
    return W._spec_cache[key]


def _gradient(W: WPresentation, a: SPoly) -> LoopElem:
    """``sum_t q_t (x) delta a / delta qbar_t`` over the generators of ``P``."""
    out = LoopElem()
    for t, v in zip(W.rd.bminus, W.P_vars):
        d = variational(a, v)
        if d:
            out = out + LoopElem.basis(t, 0, d)
    return out


def lax_form_bracket(W: WPresentation, la: LoopAlgebra, phi: SPoly, psi: SPoly,
                     which: int = 1, lax: str = "u") -> Functional:
    """Local bracket of ``int phi``, ``int psi`` (polynomials in the w's) through the Lax operator.

    ``lax="u"``: first bracket against ``L_u``, second against ``s``.
    ``lax="s"``: first bracket against ``L_s``, second against ``z^-1 L_s``.
    """
    a, b = _gradient(W, W.from_w(phi)), _gradient(W, W.from_w(psi))
    f = LoopElem.from_vec(W.rd.f, 0)
    s1 = LoopElem.from_vec(W.rd.s, 1) if W.rd.s else LoopElem()
    if which == 1:
        X = W.Qu + f + (s1 if lax == "s" else LoopElem())
        inner = la.D_act(b) + la.bracket(X, b)
        sign = -1
    else:
        if not W.rd.s:
            raise ValueError("second bracket needs s")
        if lax == "s":
            zinv = LoopElem({(c, k - 1): u for (c, k), u in (W.Qu + f + s1).c.items()})
            Db = LoopElem({(c, k - 1): u for (c, k), u in la.D_act(b).c.items()})
            inner = Db + la.bracket(zinv, b)
        else:
            inner = la.bracket(LoopElem.from_vec(W.rd.s, 0), b)
        sign = 1
    return Functional(la.form(a, inner).scale(sign))


def _dense(v: Mapping, n: int) -> list[Fraction]:
    row = [Fraction(0)] * n
    for k, c in v.items():
        row[k] = c
    return row
