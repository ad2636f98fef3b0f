"""Finite-dimensional Lie superalgebras with an invariant form and a Z-grading.

Elements are sparse vectors ``{basis index: Fraction}``.  Brackets are
stored for every ordered pair of basis elements; the form is a dense
rational matrix.  :class:`ReductionData` carries the reduction tuple
``(n, m, f, s)`` together with dual bases and the complement ``V``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

from .chibracket import BracketSpec, ChiPoly
from .linalg import inverse, rank, rref
from .superpoly import SPoly, Variable

Vec = dict

__all__ = [
    "LieSuperAlgebra",
    "ReductionData",
    "Report",
    "builtin",
    "affine_spec",
    "load_json",
    "vadd",
    "vscale",
]


def vadd(*vs: Mapping) -> Vec:
    out: dict = {}
    for v in vs:
        for k, c in v.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def vscale(v: Mapping, c) -> Vec:
    c = Fraction(c)
    return {k: c * x for k, x in v.items()} if c else {}


@dataclass
class Report:
    ok: bool = True
    items: list = field(default_factory=list)

    def fail(self, msg: str):
        self.ok = False
        self.items.append(("FAIL", msg))

    def note(self, msg: str):
        self.items.append(("info", msg))

    def extend(self, other: "Report"):
        self.ok = self.ok and other.ok
        self.items.extend(other.items)

    def __bool__(self):
        return self.ok

    def lines(self) -> list[str]:
        return [f"[{tag}] {msg}" for tag, msg in self.items]


class LieSuperAlgebra:
    def __init__(self, names: Sequence[str], parities: Sequence[int], degrees: Sequence[int],
                 brackets: Mapping[tuple[int, int], Mapping[int, Fraction]], form, label: str = ""):
        self.names = list(names)
        self.parities = [int(p) % 2 for p in parities]
        self.degrees = [int(d) for d in degrees]
        self.label = label
        n = len(self.names)
        if len(set(self.names)) != n:
            raise ValueError("basis names must be unique")
        self._br = {}
        for (a, b), v in brackets.items():
            v = {k: Fraction(c) for k, c in v.items() if c}
            if v:
                self._br[(a, b)] = v
        self.form_matrix = [[Fraction(form[a][b]) for b in range(n)] for a in range(n)]
        self._pos = {nm: i for i, nm in enumerate(self.names)}

    # basic access
    @property
    def dim(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        if name not in self._pos:
            raise KeyError(f"unknown basis element {name!r}")
        return self._pos[name]

    def vec(self, name: str) -> Vec:
        return {self.index(name): Fraction(1)}

    def bracket_basis(self, a: int, b: int) -> Vec:
        return self._br.get((a, b), {})

    def bracket(self, x: Mapping, y: Mapping) -> Vec:
        out: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for c, v in self._br.get((a, b), {}).items():
                    s = out.get(c, 0) + ca * cb * v
                    if s:
                        out[c] = s
                    else:
                        out.pop(c, None)
        return out

    def form(self, x: Mapping, y: Mapping) -> Fraction:
        return sum((ca * cb * self.form_matrix[a][b] for a, ca in x.items() for b, cb in y.items()),
                   Fraction(0))

    def parity_of(self, x: Mapping) -> int:
        ps = {self.parities[a] for a in x}
        if len(ps) > 1:
            raise ValueError("inhomogeneous element")
        return ps.pop() if ps else 0

    def degree_of(self, x: Mapping) -> int:
        ds = {self.degrees[a] for a in x}
        if len(ds) > 1:
            raise ValueError("element is not homogeneous for the grading")
        return ds.pop() if ds else 0

    def fmt(self, x: Mapping) -> str:
        if not x:
            return "0"
        parts = []
        for a in sorted(x):
            c = x[a]
            mag = abs(c)
            body = self.names[a] if mag == 1 else f"{mag}*{self.names[a]}"
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sg, b in parts[1:]:
            s += f" {sg} {b}"
        return s

    def max_degree(self) -> int:
        return max(abs(d) for d in self.degrees) if self.degrees else 0

    def elements_of_degree(self, k: int) -> list[int]:
        return [a for a in range(self.dim) if self.degrees[a] == k]

    # mutation helpers (used to probe the sensitivity of checks)
    def with_structure_constant(self, a: int, b: int, c: int, value) -> "LieSuperAlgebra":
        """Copy with the coefficient of ``c`` in ``[a, b]`` replaced; ``[b, a]`` follows by skew-symmetry."""
        br = {k: dict(v) for k, v in self._br.items()}
        value = Fraction(value)
        sgn = -1 if not (self.parities[a] and self.parities[b]) else 1
        for (x, y), val in (((a, b), value), ((b, a), sgn * value)):
            d = br.setdefault((x, y), {})
            d[c] = val
        return LieSuperAlgebra(self.names, self.parities, self.degrees, br, self.form_matrix, self.label + "*")

    def with_form_entry(self, a: int, b: int, value) -> "LieSuperAlgebra":
        """Copy with ``(a|b)`` replaced; ``(b|a)`` follows by supersymmetry."""
        form = [row[:] for row in self.form_matrix]
        value = Fraction(value)
        form[a][b] = value
        sgn = -1 if (self.parities[a] and self.parities[b]) else 1
        form[b][a] = sgn * value
        return LieSuperAlgebra(self.names, self.parities, self.degrees, self._br, form, self.label + "*")

    def structure_entries(self):
        """Nonzero ``(a, b, c, value)`` with ``a <= b``."""
        for (a, b), v in sorted(self._br.items()):
            if a <= b:
                for c, x in sorted(v.items()):
                    yield a, b, c, x

    # validation
    def validate(self) -> Report:
        rep = Report()
        n, P = self.dim, self.parities
        e = lambda i: {i: Fraction(1)}
        for a in range(n):
            for b in range(n):
                ab = self.bracket_basis(a, b)
                ba = self.bracket_basis(b, a)
                sgn = 1 if (P[a] and P[b]) else -1
                if vadd(ab, vscale(ba, -sgn)):
                    rep.fail(f"skew-symmetry: [{self.names[a]},{self.names[b]}]")
                for c, _ in ab.items():
                    if P[c] != (P[a] + P[b]) % 2:
                        rep.fail(f"parity: [{self.names[a]},{self.names[b]}] has component {self.names[c]}")
                    if self.degrees[c] != self.degrees[a] + self.degrees[b]:
                        rep.fail(f"grading: [{self.names[a]},{self.names[b]}] has component {self.names[c]}")
        for a, b, c in product(range(n), repeat=3):
            lhs = self.bracket(e(a), self.bracket(e(b), e(c)))
            rhs = vadd(self.bracket(self.bracket(e(a), e(b)), e(c)),
                       vscale(self.bracket(e(b), self.bracket(e(a), e(c))), -1 if (P[a] and P[b]) else 1))
            if vadd(lhs, vscale(rhs, -1)):
                rep.fail(f"Jacobi: ({self.names[a]}, {self.names[b]}, {self.names[c]})")
        F = self.form_matrix
        for a in range(n):
            for b in range(n):
                if F[a][b]:
                    if P[a] != P[b]:
                        rep.fail(f"form is not even: ({self.names[a]}|{self.names[b]})")
                    if self.degrees[a] != -self.degrees[b]:
                        rep.fail(f"form does not pair opposite degrees: ({self.names[a]}|{self.names[b]})")
                sgn = -1 if (P[a] and P[b]) else 1
                if F[a][b] != sgn * F[b][a]:
                    rep.fail(f"form not supersymmetric: ({self.names[a]}|{self.names[b]})")
        for a, b, c in product(range(n), repeat=3):
            lhs = self.form(self.bracket(e(a), e(b)), e(c))
            rhs = self.form(e(a), self.bracket(e(b), e(c)))
            if lhs != rhs:
                rep.fail(f"invariance: ([{self.names[a]},{self.names[b]}]|{self.names[c]}) = {lhs} "
                         f"but ({self.names[a]}|[{self.names[b]},{self.names[c]}]) = {rhs}")
        if rank(F) != n:
            rep.fail("form is degenerate")
        if rep.ok:
            rep.note(f"{self.label or 'algebra'}: dim {n} ({n - sum(P)}|{sum(P)}) passes all checks")
        return rep

    # construction
    @classmethod
    def from_matrices(cls, names, mats, row_parities, degrees, form_scale=1, label="",
                      quotient: Sequence | None = None) -> "LieSuperAlgebra":
        """Realize a subalgebra of gl(p|q) spanned by the given matrices.

        Brackets are supercommutators; the form is ``form_scale * str(XY)``.
        ``quotient`` optionally names a central matrix to divide out.
        """
        N = len(row_parities)

        def sparse(m):
            return {(r, c): Fraction(m[r][c]) for r in range(N) for c in range(N) if m[r][c]}

        M = [sparse(m) for m in mats]

        def mpar(m):
            ps = {(row_parities[r] + row_parities[c]) % 2 for r, c in m}
            if len(ps) != 1:
                raise ValueError("basis matrix is not homogeneous")
            return ps.pop()

        def mul(x, y):
            rows: dict = {}
            for (k, c), v in y.items():
                rows.setdefault(k, []).append((c, v))
            out: dict = {}
            for (r, k), u in x.items():
                for c, v in rows.get(k, ()):
                    out[(r, c)] = out.get((r, c), 0) + u * v
            return {key: v for key, v in out.items() if v}

        def strace(x):
            return sum(((-1 if row_parities[r] else 1) * v for (r, c), v in x.items() if r == c), Fraction(0))

        pars = [mpar(m) for m in M]
        span = M + ([sparse(quotient)] if quotient is not None else [])
        # coordinates: invert the span on a set of independent matrix entries
        entries = sorted({e for m in span for e in m})
        red, piv = rref([[m.get(e, 0) for e in entries] for m in span])
        if len(piv) < len(span):
            raise ValueError("basis matrices are linearly dependent")
        keys = [entries[c] for c in piv]
        coord = inverse([[m.get(e, 0) for m in span] for e in keys])
        brackets = {}
        for a, b in product(range(len(M)), repeat=2):
            sgn = -1 if (pars[a] and pars[b]) else 1
            comm = mul(M[a], M[b])
            for key, v in mul(M[b], M[a]).items():
                comm[key] = comm.get(key, 0) - sgn * v
            comm = {key: v for key, v in comm.items() if v}
            if not comm:
                continue
            rhs = [comm.get(e, 0) for e in keys]
            coeffs = [sum((r * x for r, x in zip(row, rhs) if x), Fraction(0)) for row in coord]
            recon: dict = {}
            for k, cf in enumerate(coeffs):
                if cf:
                    for key, v in span[k].items():
                        recon[key] = recon.get(key, 0) + cf * v
            if {key: v for key, v in recon.items() if v} != comm:
                raise ValueError(f"matrices do not close under the bracket at ({names[a]}, {names[b]})")
            brackets[(a, b)] = {k: v for k, v in enumerate(coeffs[:len(M)]) if v}
        form = [[form_scale * strace(mul(x, y)) for y in M] for x in M]
        return cls(names, pars, degrees, brackets, form, label)

    def to_json(self) -> dict:
        return {
            "basis": [{"name": n, "parity": p, "degree": d} for n, p, d in zip(self.names, self.parities, self.degrees)],
            "brackets": [[self.names[a], self.names[b], {self.names[c]: str(v) for c, v in sorted(val.items())}]
                         for (a, b), val in sorted(self._br.items()) if a <= b],
            "form": [[self.names[a], self.names[b], str(self.form_matrix[a][b])]
                     for a in range(self.dim) for b in range(a, self.dim) if self.form_matrix[a][b]],
        }


# ------------------------------------------------------------ reduction data

class ReductionData:
    """The tuple ``(g, n, m, f, s)`` plus dual bases, ``b``, ``b_-`` and ``V``.

    ``n`` and ``m`` are lists of basis indices.  ``b_-`` is spanned by the
    basis elements outside ``m``; ``q^t`` (``t`` in ``b_-``) is the dual
    vector with ``(q^t | q_s) = delta``, so the ``q^t`` span ``b``.
    """

    def __init__(self, algebra: LieSuperAlgebra, n: Sequence[int], m: Sequence[int], f: Mapping,
                 s: Mapping | None = None, v_basis: Sequence[Mapping] | None = None):
        self.g = algebra
        self.n = list(n)
        self.m = list(m)
        self.f = dict(f)
        self.s = dict(s) if s else None
        self.i = -algebra.degree_of(self.f)
        self.j = algebra.degree_of(self.s) if self.s else None
        self.bminus = [a for a in range(algebra.dim) if a not in set(self.m)]
        G = algebra.form_matrix
        try:
            Ginv = inverse(G)
        except ValueError:
            Ginv = None
        self.dual = None
        if Ginv is not None:
            # (q^t | e_s) = sum_a C[t][a] G[a][s] = delta  =>  C = G^{-1}
            self.dual = {t: {a: Ginv[t][a] for a in range(algebra.dim) if Ginv[t][a]} for t in range(algebra.dim)}
        self.fn = [algebra.bracket({a: Fraction(1)}, self.f) for a in self.n]
        self.v_basis = [dict(v) for v in v_basis] if v_basis is not None else self._default_v()

    @property
    def z_degree(self) -> int:
        return -(self.i + (self.j or 0))

    def b_basis(self) -> list[Vec]:
        return [self.dual[t] for t in self.bminus] if self.dual else []

    def in_b(self, x: Mapping) -> bool:
        return all(self.g.form(x, {a: Fraction(1)}) == 0 for a in self.m)

    def _default_v(self) -> list[Vec]:
        if self.dual is None:
            return []
        g = self.g
        cand = [{a: Fraction(1)} for a in range(g.dim) if self.in_b({a: Fraction(1)})]
        # fall back to the dual vectors if b is not spanned by basis elements
        if rank([_dense(x, g.dim) for x in cand]) < len(self.bminus):
            cand = self.b_basis()
        chosen: list = []
        rows = [_dense(x, g.dim) for x in self.fn if x]
        r = rank(rows) if rows else 0
        for x in cand:
            trial = rows + [_dense(x, g.dim)]
            if rank(trial) > r:
                rows, r = trial, r + 1
                chosen.append(x)
        return chosen

    def validate(self) -> Report:
        g = self.g
        rep = Report()
        one = lambda a: {a: Fraction(1)}
        nset, mset = set(self.n), set(self.m)
        if not mset <= nset:
            rep.fail("m is not contained in n")
        for a in self.n:
            if g.degrees[a] <= 0:
                rep.fail(f"n is not in g_{{>0}}: {g.names[a]}")
        for a in self.n:
            for b in self.n:
                if set(g.bracket_basis(a, b)) - nset:
                    rep.fail(f"n is not a subalgebra: [{g.names[a]},{g.names[b]}]")
                if b in mset and set(g.bracket_basis(a, b)) - mset:
                    rep.fail(f"m is not an n-module: [{g.names[a]},{g.names[b]}]")
        if not self.f or g.parity_of(self.f) != 1 or self.i <= 0:
            rep.fail("f must be odd of negative degree")
        if self.s is not None and (g.parity_of(self.s) != 1 or self.j <= 0):
            rep.fail("s must be odd of positive degree")
        if self.dual is None:
            rep.fail("form is degenerate; no dual basis")
            return rep
        for t in range(g.dim):
            for u in range(g.dim):
                if g.form(self.dual[t], one(u)) != (1 if t == u else 0):
                    rep.fail(f"dual basis mismatch at ({g.names[t]}, {g.names[u]})")
        # (A-1) g_{>=i} inside m
        for a in range(g.dim):
            if g.degrees[a] >= self.i and a not in mset:
                rep.fail(f"(A-1) g_{{>=i}} not in m: {g.names[a]}")
        # (A-2) [f, n] inside b
        for a, x in zip(self.n, self.fn):
            if not self.in_b(x):
                rep.fail(f"(A-2) [{g.names[a]}, f] = {g.fmt(x)} is not in b")
        # (A-3) ad f injective on n
        if self.n and rank([_dense(x, g.dim) for x in self.fn]) < len(self.n):
            rep.fail("(A-3) ad f restricted to n is not injective")
        # (A-4) [s, n] = 0
        if self.s is not None:
            for a in self.n:
                x = g.bracket(self.s, one(a))
                if x:
                    rep.fail(f"(A-4) [s, {g.names[a]}] = {g.fmt(x)}")
        # V + [f, n] = b
        rows = [_dense(x, g.dim) for x in self.fn] + [_dense(v, g.dim) for v in self.v_basis]
        if any(not self.in_b(v) for v in self.v_basis):
            rep.fail("V is not inside b")
        if rank(rows) != len(rows) or len(rows) != len(self.bminus):
            rep.fail(f"V + [f, n] is not a direct sum equal to b (dims {len(self.v_basis)} + {len(self.fn)}"
                     f" vs {len(self.bminus)})")
        if rep.ok:
            rep.note(f"reduction data valid: i = {self.i}, j = {self.j}, dim n = {len(self.n)}, "
                     f"dim m = {len(self.m)}, dim V = {len(self.v_basis)}")
        return rep

    def describe(self) -> dict:
        g = self.g
        return {
            "n": [g.names[a] for a in self.n],
            "m": [g.names[a] for a in self.m],
            "f": g.fmt(self.f),
            "s": g.fmt(self.s) if self.s else None,
            "i": self.i,
            "j": self.j,
            "V": [g.fmt(v) for v in self.v_basis],
        }


def _dense(v: Mapping, n: int) -> list[Fraction]:
    row = [Fraction(0)] * n
    for k, c in v.items():
        row[k] = c
    return row


# ------------------------------------------------------------- affine specs

def bar_variables(g: LieSuperAlgebra) -> list[Variable]:
    """Parity-reversed copies of the basis, in basis order."""
    return [Variable(nm + "bar", (p + 1) % 2, i) for i, (nm, p) in enumerate(zip(g.names, g.parities))]


def affine_spec(g: LieSuperAlgebra, which: int = 1, s: Mapping | None = None,
                variables: Sequence[Variable] | None = None) -> BracketSpec:
    """The affine SUSY PVA brackets on the parity-reversed generators.

    ``which=1``: ``{a chi b} = (-1)^{p(a)} ([a,b] + chi (a|b))``;
    ``which=2``: ``{a chi b} = (-1)^{p(a)+1} (s|[a,b])`` for odd ``s``.
    Only pairs with ``a <= b`` are stored.
    """
    V = list(variables) if variables is not None else bar_variables(g)
    tab = {}
    if which == 2:
        if not s or g.parity_of(s) != 1:
            raise ValueError("the second affine bracket needs an odd element s")
    elif which != 1:
        raise ValueError("which must be 1 or 2")
    for a in range(g.dim):
        for b in range(a, g.dim):
            ea, eb = {a: Fraction(1)}, {b: Fraction(1)}
            br = g.bracket(ea, eb)
            sgn = -1 if g.parities[a] else 1
            if which == 1:
                c0 = SPoly()
                for c, v in br.items():
                    c0 = c0 + SPoly.var(V[c]).scale(sgn * v)
                val = ChiPoly({0: c0, 1: SPoly.const(sgn * g.form(ea, eb))})
            else:
                val = ChiPoly({0: SPoly.const(-sgn * g.form(s, br))})
            if val:
                tab[(V[a], V[b])] = val
    return BracketSpec(V, tab, name=f"affine{which}({g.label})")


# ---------------------------------------------------------------- builtins

def _zeros(N):
    return [[0] * N for _ in range(N)]


def _unit(N, r, c, val=1):
    m = _zeros(N)
    m[r][c] = val
    return m


def osp22() -> tuple[LieSuperAlgebra, ReductionData]:
    # realized inside gl(2|1) with row parities (even, odd, even)
    par = [0, 1, 0]
    e1, f1 = _unit(3, 0, 1), _unit(3, 1, 0, 2)
    e2, f2 = _unit(3, 1, 2), _unit(3, 2, 1, -2)

    def mul(x, y):
        return [[sum(x[r][k] * y[k][c] for k in range(3)) for c in range(3)] for r in range(3)]

    def anti(x, y):
        a, b = mul(x, y), mul(y, x)
        return [[a[r][c] + b[r][c] for c in range(3)] for r in range(3)]

    e3, f3 = anti(e1, e2), anti(f1, f2)
    h1, h2 = anti(e1, f1), anti(e2, f2)
    names = ["f3", "f2", "f1", "h1", "h2", "e1", "e2", "e3"]
    mats = [f3, f2, f1, h1, h2, e1, e2, e3]
    degrees = [-1, -1, 0, 0, 0, 0, 1, 1]
    probe = LieSuperAlgebra.from_matrices(names, mats, par, degrees)
    scale = Fraction(-2) / probe.form(probe.vec("e1"), probe.vec("f1"))
    g = LieSuperAlgebra.from_matrices(names, mats, par, degrees, form_scale=scale, label="osp(2|2)")
    rd = ReductionData(g, n=[g.index("e2"), g.index("e3")], m=[g.index("e2"), g.index("e3")],
                       f=g.vec("f2"), s=g.vec("e2"),
                       v_basis=[g.vec("f1"), g.vec("h1"), g.vec("e2"), g.vec("e3")])
    return g, rd


def sl_mn(m: int, n: int) -> tuple[LieSuperAlgebra, ReductionData]:
    if not (m > n >= 1):
        raise ValueError("sl(m|n) family needs m > n >= 1")
    N = m + n
    par = [0] * m + [1] * n
    block = [0] * n + [1] * (m - n) + [2] * n
    bdeg = [[0, 1, 2], [-1, 0, 1], [-2, -1, 0]]
    names, mats, degs = [], [], []
    for r in range(N):
        for c in range(N):
            if r != c:
                names.append(f"E{r + 1}_{c + 1}")
                mats.append(_unit(N, r, c))
                degs.append(bdeg[block[r]][block[c]])
    for k in range(N - 1):
        h = _zeros(N)
        h[k][k] = 1
        h[k + 1][k + 1] = 1 if k == m - 1 else -1
        names.append(f"H{k + 1}")
        mats.append(h)
        degs.append(0)
    g = LieSuperAlgebra.from_matrices(names, mats, par, degs, label=f"sl({m}|{n})")
    f = {}
    s = {}
    for k in range(n):
        f[g.index(f"E{m + k + 1}_{k + 1}")] = Fraction(1)
        s[g.index(f"E{k + 1}_{m + k + 1}")] = Fraction(1)
    nn = [a for a in range(g.dim) if g.degrees[a] >= 1]
    mm = [a for a in range(g.dim) if g.degrees[a] >= 2]
    return g, ReductionData(g, nn, mm, f, s)


def osp_2n2n(n: int) -> tuple[LieSuperAlgebra, ReductionData]:
    if n < 1:
        raise ValueError("osp(2n|2n) needs n >= 1")
    N = 4 * n
    par = [0] * (2 * n) + [1] * (2 * n)
    off = [0, n, 2 * n, 3 * n]
    bdeg = [[0, 1, 0, 1], [-1, 0, -1, 0], [0, 1, 0, 1], [-1, 0, -1, 0]]
    names, mats, degs = [], [], []

    def add(name, entries, bi, bj):
        m = _zeros(N)
        for (B1, B2, r, c), v in entries:
            m[off[B1] + r][off[B2] + c] += v
        names.append(name)
        mats.append(m)
        degs.append(bdeg[bi][bj])

    for r in range(n):
        for c in range(n):
            add(f"A11_{r + 1}{c + 1}", [((0, 0, r, c), 1), ((1, 1, c, r), -1)], 0, 0)
            add(f"A33_{r + 1}{c + 1}", [((2, 2, r, c), 1), ((3, 3, c, r), -1)], 2, 2)
            add(f"A31_{r + 1}{c + 1}", [((2, 0, r, c), 1), ((1, 3, c, r), -1)], 2, 0)
            add(f"A32_{r + 1}{c + 1}", [((2, 1, r, c), 1), ((0, 3, c, r), 1)], 2, 1)
            add(f"A41_{r + 1}{c + 1}", [((3, 0, r, c), 1), ((1, 2, c, r), -1)], 3, 0)
            add(f"A42_{r + 1}{c + 1}", [((3, 1, r, c), 1), ((0, 2, c, r), 1)], 3, 1)
    for r in range(n):
        for c in range(r, n):
            ent12 = [((0, 1, r, c), 1)] + ([((0, 1, c, r), 1)] if c != r else [])
            ent21 = [((1, 0, r, c), 1)] + ([((1, 0, c, r), 1)] if c != r else [])
            add(f"A12_{r + 1}{c + 1}", ent12, 0, 1)
            add(f"A21_{r + 1}{c + 1}", ent21, 1, 0)
            if c != r:
                add(f"A34_{r + 1}{c + 1}", [((2, 3, r, c), 1), ((2, 3, c, r), -1)], 2, 3)
                add(f"A43_{r + 1}{c + 1}", [((3, 2, r, c), 1), ((3, 2, c, r), -1)], 3, 2)
    g = LieSuperAlgebra.from_matrices(names, mats, par, degs, label=f"osp({2 * n}|{2 * n})")
    f = {g.index(f"A41_{k + 1}{k + 1}"): Fraction(1) for k in range(n)}
    s = {g.index(f"A32_{k + 1}{k + 1}"): Fraction(1) for k in range(n)}
    g1 = g.elements_of_degree(1)
    return g, ReductionData(g, g1, g1, f, s)


def psl_nn(n: int, A: Sequence | None = None) -> tuple[LieSuperAlgebra, ReductionData]:
    """sl(n|n) modulo the identity, with ``s`` carrying a diagonal matrix ``A``."""
    if n < 1:
        raise ValueError("sl(n|n)/I needs n >= 1")
    diag = [Fraction(x) for x in (A if A is not None else [1] * n)]
    if len(diag) != n:
        raise ValueError("A must have n diagonal entries")
    N = 2 * n
    par = [0] * n + [1] * n
    blk = lambda r: 0 if r < n else 1
    bdeg = [[0, 1], [-1, 0]]
    names, mats, degs = [], [], []
    for r in range(N):
        for c in range(N):
            if r != c:
                names.append(f"E{r + 1}_{c + 1}")
                mats.append(_unit(N, r, c))
                degs.append(bdeg[blk(r)][blk(c)])
    for k in range(N - 1):
        if k == n - 1:
            continue
        h = _zeros(N)
        h[k][k], h[k + 1][k + 1] = 1, -1
        names.append(f"H{k + 1}")
        mats.append(h)
        degs.append(0)
    ident = [[int(r == c) for c in range(N)] for r in range(N)]
    g = LieSuperAlgebra.from_matrices(names, mats, par, degs, label=f"sl({n}|{n})/I", quotient=ident)
    f = {g.index(f"E{n + k + 1}_{k + 1}"): Fraction(1) for k in range(n)}
    s = {g.index(f"E{k + 1}_{n + k + 1}"): diag[k] for k in range(n) if diag[k]}
    g1 = g.elements_of_degree(1)
    return g, ReductionData(g, g1, g1, f, s)


def builtin(name: str, **params) -> tuple[LieSuperAlgebra, ReductionData]:
    """Built-in algebras: ``osp22``, ``sl(m|n)``, ``osp(2n|2n)``, ``psl(n|n)``.

    Accepted spellings include ``"osp(2|2)"``, ``"sl21"``, ``"sl(3|1)"``,
    ``"osp(4|4)"``, ``"sl(2|2)/I"``.
    """
    import re

    key = name.replace(" ", "").lower()
    if key in ("osp22", "osp(2|2)"):
        return osp22()
    mt = re.fullmatch(r"sl\(?(\d+)\|?(\d+)\)?", key)
    if mt:
        return sl_mn(int(params.get("m", mt.group(1))), int(params.get("n", mt.group(2))))
    mt = re.fullmatch(r"osp\(?(\d+)\|?(\d+)\)?", key)
    if mt:
        a, b = int(mt.group(1)), int(mt.group(2))
        if a != b or a % 2:
            raise ValueError("only osp(2n|2n) is built in")
        return osp_2n2n(a // 2)
    mt = re.fullmatch(r"(?:psl\(?(\d+)\|?(\d+)\)?|sl\((\d+)\|(\d+)\)/i)", key)
    if mt:
        a, b = [int(x) for x in mt.groups() if x is not None]
        if a != b:
            raise ValueError("sl(n|n)/I needs equal sizes")
        return psl_nn(a, params.get("A"))
    if key == "sl":
        return sl_mn(int(params["m"]), int(params["n"]))
    raise ValueError(f"unknown builtin algebra {name!r}")


# --------------------------------------------------------------- JSON input

class InputError(ValueError):
    pass


def load_json(text: str) -> tuple[LieSuperAlgebra, ReductionData | None]:
    """Parse the JSON algebra schema.

    ``{"basis": [{"name", "parity", "degree"}], "brackets": [[a, b, {c: coeff}]],
    "form": [[a, b, coeff]], "reduction": {"n": [...], "m": [...], "f": {...}, "s": {...}}}``.
    Missing bracket pairs follow from skew-symmetry, missing form entries from
    supersymmetry.  Coefficients are integers or strings ``"p/q"``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        basis = doc["basis"]
        names = [b["name"] for b in basis]
        pars = [int(b["parity"]) for b in basis]
        degs = [int(b.get("degree", 0)) for b in basis]
        pos = {nm: i for i, nm in enumerate(names)}
        br: dict = {}
        for a, b, val in doc.get("brackets", []):
            ia, ib = pos[a], pos[b]
            vec = {pos[c]: Fraction(v) for c, v in val.items()}
            br[(ia, ib)] = vec
        for (ia, ib), vec in list(br.items()):
            if (ib, ia) not in br:
                sgn = 1 if (pars[ia] and pars[ib]) else -1
                br[(ib, ia)] = {k: sgn * v for k, v in vec.items()}
        n = len(names)
        form = [[Fraction(0)] * n for _ in range(n)]
        seen = set()
        for a, b, v in doc.get("form", []):
            ia, ib = pos[a], pos[b]
            form[ia][ib] = Fraction(v)
            seen.add((ia, ib))
        for ia, ib in list(seen):
            if (ib, ia) not in seen:
                form[ib][ia] = (-1 if (pars[ia] and pars[ib]) else 1) * form[ia][ib]
        g = LieSuperAlgebra(names, pars, degs, br, form, label=doc.get("name", "input"))
        rd = None
        red = doc.get("reduction")
        if red:
            vecs = lambda d: {pos[k]: Fraction(v) for k, v in d.items()}
            v_basis = [vecs(v) for v in red["V"]] if "V" in red else None
            rd = ReductionData(g, [pos[x] for x in red["n"]], [pos[x] for x in red["m"]], vecs(red["f"]),
                               vecs(red["s"]) if red.get("s") else None, v_basis)
        return g, rd
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"invalid algebra document: {exc!r}") from None
