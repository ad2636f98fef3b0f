"""The loop superalgebra g((z^-1)) tensored with a differential superalgebra.

An element ``sum a z^k (x) u`` is stored as ``{(a, k): u}`` with ``a`` a basis
index of ``g`` and ``u`` an :class:`SPoly`.  The grading gives ``z`` degree
``-(i+j)`` so that ``Lambda = f + z s`` is homogeneous of degree ``-i``.

Operators ``c D + X`` and ``c D^2 + X`` are handled by :class:`Op`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Mapping

from .linalg import inverse, nullspace, rank, rref
from .liesuper import LieSuperAlgebra, ReductionData
from .superpoly import D as Dpoly
from .superpoly import SPoly

__all__ = ["LoopElem", "LoopAlgebra", "Op", "GradedExp", "TruncationError"]


class TruncationError(RuntimeError):
    """A requested grade lies outside the truncation window."""

    def __init__(self, msg: str, slot=None):
        super().__init__(msg)
        self.slot = slot


class LoopElem:
    __slots__ = ("c",)

    def __init__(self, c: Mapping | None = None):
        self.c = {}
        for k, v in (c or {}).items():
            v = SPoly.coerce(v)
            if v:
                self.c[k] = v

    @classmethod
    def basis(cls, a: int, k: int = 0, u=1) -> "LoopElem":
        return cls({(a, k): SPoly.coerce(u)})

    @classmethod
    def from_vec(cls, vec: Mapping, k: int = 0, u=1) -> "LoopElem":
        u = SPoly.coerce(u)
        return cls({(a, k): u.scale(c) for a, c in vec.items()})

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        return isinstance(other, LoopElem) and self.c == other.c

    def __add__(self, other: "LoopElem") -> "LoopElem":
        out = dict(self.c)
        for k, v in other.c.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return LoopElem._raw(out)

    def __neg__(self):
        return LoopElem._raw({k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    @classmethod
    def _raw(cls, c):
        e = cls.__new__(cls)
        e.c = c
        return e

    def scale(self, x) -> "LoopElem":
        x = Fraction(x)
        if not x:
            return LoopElem()
        return LoopElem._raw({k: v.scale(x) for k, v in self.c.items()})

    def rmul(self, u: SPoly) -> "LoopElem":
        """``(a (x) v) * u = a (x) v u``."""
        return LoopElem({k: v * u for k, v in self.c.items()})

    def map(self, fn) -> "LoopElem":
        return LoopElem({k: fn(v) for k, v in self.c.items()})

    def zpowers(self) -> set[int]:
        return {k for _, k in self.c}

    def coefficient(self, a: int, k: int = 0) -> SPoly:
        return self.c.get((a, k), SPoly())

    def __repr__(self):
        return f"LoopElem({self.c!r})"


class Op:
    """``d2 D^2 + d1 D + X`` with rational ``d1, d2`` and ``X`` a :class:`LoopElem`."""

    def __init__(self, X: LoopElem | None = None, d1=0, d2=0):
        self.X = X if X is not None else LoopElem()
        self.d1 = Fraction(d1)
        self.d2 = Fraction(d2)

    def __add__(self, other: "Op") -> "Op":
        return Op(self.X + other.X, self.d1 + other.d1, self.d2 + other.d2)

    def __sub__(self, other: "Op") -> "Op":
        return Op(self.X - other.X, self.d1 - other.d1, self.d2 - other.d2)

    def scale(self, c) -> "Op":
        return Op(self.X.scale(c), self.d1 * c, self.d2 * c)

    def __bool__(self):
        return bool(self.X) or bool(self.d1) or bool(self.d2)


class LoopAlgebra:
    """Loop algebra attached to reduction data with an odd ``s`` (``Lambda = f + z s``)."""

    def __init__(self, rd: ReductionData):
        if rd.s is None:
            raise ValueError("the loop algebra needs s")
        self.rd = rd
        self.g: LieSuperAlgebra = rd.g
        self.i, self.j = rd.i, rd.j
        self.period = self.i + self.j
        g = self.g
        self.Lambda = LoopElem.from_vec(rd.f, 0) + LoopElem.from_vec(rd.s, 1)
        self.Lambda_sq = self.bracket(self.Lambda, self.Lambda).scale(Fraction(1, 2))
        self._lsq_const = {(a, k): v.constant_term() for (a, k), v in self.Lambda_sq.c.items()}
        self._dmin = min(g.degrees)
        self._dmax = max(g.degrees)
        self._slot_cache: dict = {}

    # grading
    def degree(self, a: int, k: int) -> int:
        return self.g.degrees[a] - k * self.period

    def by_degree(self, x: LoopElem) -> dict[int, LoopElem]:
        out: dict = {}
        for (a, k), v in x.c.items():
            out.setdefault(self.degree(a, k), {})[(a, k)] = v
        return {d: LoopElem._raw(c) for d, c in out.items()}

    def part(self, x: LoopElem, d: int) -> LoopElem:
        return LoopElem._raw({(a, k): v for (a, k), v in x.c.items() if self.degree(a, k) == d})

    def truncate(self, x: LoopElem, dmax: int) -> LoopElem:
        return LoopElem._raw({(a, k): v for (a, k), v in x.c.items() if self.degree(a, k) <= dmax})

    def slot_basis(self, d: int) -> list[tuple[int, int]]:
        """Basis pairs ``(a, k)`` of the degree-``d`` subspace."""
        out = []
        for a, da in enumerate(self.g.degrees):
            if (da - d) % self.period == 0:
                out.append((a, (da - d) // self.period))
        return out

    # operations
    def bracket(self, x: LoopElem, y: LoopElem) -> LoopElem:
        g = self.g
        out: dict = {}
        for (a, m), u in x.c.items():
            pu = _par(u)
            for (b, n), v in y.c.items():
                br = g.bracket_basis(a, b)
                if not br:
                    continue
                uv = u * v
                if not uv:
                    continue
                if g.parities[b] and pu:
                    uv = -uv
                for c, cf in br.items():
                    key = (c, m + n)
                    t = uv.scale(cf)
                    s = out.get(key)
                    out[key] = t if s is None else s + t
        return LoopElem({k: v for k, v in out.items() if v})

    def D_act(self, x: LoopElem) -> LoopElem:
        g = self.g
        return LoopElem({(a, k): (-Dpoly(u) if g.parities[a] else Dpoly(u)) for (a, k), u in x.c.items()})

    def D2_act(self, x: LoopElem) -> LoopElem:
        return LoopElem({key: Dpoly(Dpoly(u)) for key, u in x.c.items()})

    def form(self, x: LoopElem, y: LoopElem) -> SPoly:
        g = self.g
        out = SPoly()
        for (a, m), u in x.c.items():
            pu = _par(u)
            for (b, n), v in y.c.items():
                if m + n != 0:
                    continue
                cf = g.form_matrix[a][b]
                if not cf:
                    continue
                if g.parities[b] and pu:
                    cf = -cf
                out = out + (u * v).scale(cf)
        return out

    def parity(self, x: LoopElem) -> int:
        ps = {(self.g.parities[a] + _par(u)) % 2 for (a, _), u in x.c.items()}
        if len(ps) > 1:
            raise ValueError("inhomogeneous loop element")
        return ps.pop() if ps else 0

    # operators D + X
    def bracket_op(self, T: LoopElem, L: Op) -> Op:
        """``[T, d2 D^2 + d1 D + X]`` for even ``T``."""
        out = self.bracket(T, L.X)
        if L.d1:
            out = out - self.D_act(T).scale(L.d1)
        if L.d2:
            out = out - self.D2_act(T).scale(L.d2)
        return Op(out)

    def exp_ad(self, T: LoopElem, L: Op, dmax: int) -> Op:
        """``e^{ad T} L`` truncated above degree ``dmax`` (``T`` of positive degree)."""
        degs = [self.degree(a, k) for a, k in T.c]
        if degs and min(degs) <= 0:
            raise ValueError("exp_ad needs T of positive degree")
        out = Op(self.truncate(L.X, dmax), L.d1, L.d2)
        term = Op(self.truncate(L.X, dmax), L.d1, L.d2)
        n = 0
        while True:
            n += 1
            nxt = self.truncate(self.bracket_op(T, term).X, dmax)
            if not nxt:
                break
            term = Op(nxt)
            out = out + Op(nxt.scale(Fraction(1, factorial(n))))
        return out

    def square_half(self, L: Op) -> Op:
        """``[L, L]/2`` for ``L = D + X`` odd."""
        if L.d2:
            raise ValueError("square_half expects d2 = 0")
        X = self.bracket(L.X, L.X).scale(Fraction(1, 2))
        if L.d1:
            X = X + self.D_act(L.X).scale(L.d1)
        return Op(X, 0, L.d1 * L.d1)

    # ad Lambda^2 on one degree slot
    def _ad_lsq_matrix(self, d: int) -> tuple[list, list, list]:
        """Matrix of ``ad Lambda^2`` from the degree-``d`` slot to degree ``d - 2i``."""
        src = self.slot_basis(d)
        dst = self.slot_basis(d - 2 * self.i)
        pos = {b: r for r, b in enumerate(dst)}
        M = [[Fraction(0)] * len(src) for _ in dst]
        for col, (a, k) in enumerate(src):
            for (b, m), cf in self._lsq_const.items():
                for c, v in self.g.bracket_basis(b, a).items():
                    M[pos[(c, k + m)]][col] += cf * v
        return M, src, dst

    def slot_data(self, d: int):
        """K and I bases of slot ``d`` plus the change of coordinates to them."""
        if d in self._slot_cache:
            return self._slot_cache[d]
        basis = self.slot_basis(d)
        n = len(basis)
        M, _, _ = self._ad_lsq_matrix(d)
        K = nullspace(M, n) if M else [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
        Mi, src_i, dst_i = self._ad_lsq_matrix(d + 2 * self.i)
        # columns of Mi span the image inside slot d (dst_i is the basis of slot d)
        assert dst_i == basis
        cols = [[Mi[r][c] for r in range(n)] for c in range(len(src_i))]
        red, piv = rref(cols) if cols else ([], [])
        I_basis = red
        if rank(K + I_basis) != n or len(K) + len(I_basis) != n:
            raise ValueError(f"ad Lambda^2 is not semisimple on slot {d}")
        full = K + I_basis
        to_coords = inverse([[full[r][c] for r in range(n)] for c in range(n)]) if n else []
        data = (basis, K, I_basis, to_coords)
        self._slot_cache[d] = data
        return data

    def decompose(self, x: LoopElem) -> tuple[LoopElem, LoopElem]:
        """Split ``x`` into its K and I parts."""
        kpart: dict = {}
        ipart: dict = {}
        for d, xd in self.by_degree(x).items():
            basis, K, I_b, C = self.slot_data(d)
            vec = [xd.coefficient(a, k) for a, k in basis]
            coords = [_lin(row, vec) for row in C]
            for tgt, vecs, cs in ((kpart, K, coords[:len(K)]), (ipart, I_b, coords[len(K):])):
                for w, cf in zip(vecs, cs):
                    if not cf:
                        continue
                    for (a, k), wc in zip(basis, w):
                        if wc:
                            t = cf.scale(wc)
                            s = tgt.get((a, k))
                            tgt[(a, k)] = t if s is None else s + t
        return LoopElem(kpart), LoopElem(ipart)

    def invert_ad_lambda_sq(self, y: LoopElem) -> LoopElem:
        """The unique ``x`` in I with ``[Lambda^2, x] = y`` (``y`` must lie in I)."""
        out = LoopElem()
        for d, yd in self.by_degree(y).items():
            M, src, dst = self._ad_lsq_matrix(d + 2 * self.i)
            _, _, I_src, _ = self.slot_data(d + 2 * self.i)
            # restrict ad Lambda^2 to I of the source slot: columns M * w
            A = [[sum((M[r][c] * w[c] for c in range(len(src))), Fraction(0)) for w in I_src]
                 for r in range(len(dst))]
            vec = [yd.coefficient(a, k) for a, k in dst]
            sol = _solve_poly(A, vec)
            if sol is None:
                raise ValueError(f"element of degree {d} is not in the image of ad Lambda^2")
            acc: dict = {}
            for w, cf in zip(I_src, sol):
                if not cf:
                    continue
                for (a, k), wc in zip(src, w):
                    if wc:
                        t = cf.scale(wc)
                        s = acc.get((a, k))
                        acc[(a, k)] = t if s is None else s + t
            out = out + LoopElem(acc)
        return out

    def in_kernel_part(self, x: LoopElem) -> bool:
        return not self.decompose(x)[1]

    def center_of_kernel(self, periods: int = 1) -> list[tuple[int, dict]]:
        """Basis of Z(K) as ``(degree, {(a, k): coeff})`` over one period of degrees."""
        lo = self._dmin
        degs = range(lo, lo + self.period * periods)
        kers = {d: self.slot_data(d) for d in degs}
        out = []
        for d in degs:
            basis, K, _, _ = kers[d]
            if not K:
                continue
            # unknown combination of K vectors commuting with every K vector of every slot
            rows = []
            for e in degs:
                b2, K2, _, _ = kers[e]
                for w2 in K2:
                    y = LoopElem({bk: SPoly.const(c) for bk, c in zip(b2, w2) if c})
                    images = []
                    for w in K:
                        x = LoopElem({bk: SPoly.const(c) for bk, c in zip(basis, w) if c})
                        images.append(self.bracket(x, y))
                    keys = sorted({k for im in images for k in im.c})
                    for key in keys:
                        rows.append([im.coefficient(*key).constant_term() for im in images])
            sols = nullspace(rows, len(K)) if rows else [[Fraction(int(r == c)) for c in range(len(K))]
                                                          for r in range(len(K))]
            for sol in sols:
                vec = {}
                for w, cf in zip(K, sol):
                    for bk, c in zip(basis, w):
                        if c * cf:
                            vec[bk] = vec.get(bk, 0) + c * cf
                vec = {k: v for k, v in vec.items() if v}
                if vec:
                    out.append((d, vec))
        return out


class GradedExp:
    """Degree parts of ``exp(ad T) L`` computed lazily, one degree at a time.

    ``T`` is given by its homogeneous parts of positive degree and may grow
    while parts are being read, as long as a new ``T_k`` only feeds degrees
    not yet read except through the first-order term (the situation of the
    dressing recursion).
    """

    def __init__(self, la: LoopAlgebra, L: Op, T: Mapping[int, LoopElem] | None = None):
        self.la = la
        self.base = la.by_degree(L.X)
        self.d1, self.d2 = L.d1, L.d2
        self.T: dict[int, LoopElem] = {}
        self.memo: dict[tuple[int, int], LoopElem] = {}
        self.bmin = min(self.base) if self.base else 0
        for k, t in sorted((T or {}).items()):
            self.add_T(k, t)

    def _first(self, a: int, d: int) -> LoopElem:
        """Contribution of ``T_a`` to the first-order term at degree ``d``."""
        la, Ta = self.la, self.T[a]
        out = la.bracket(Ta, self.base[d - a]) if (d - a) in self.base else LoopElem()
        if d == a:
            if self.d1:
                out = out - la.D_act(Ta).scale(self.d1)
            if self.d2:
                out = out - la.D2_act(Ta).scale(self.d2)
        return out

    def add_T(self, k: int, Tk: LoopElem):
        if k <= 0:
            raise ValueError("T must have positive degree")
        if not Tk:
            return
        if k in self.T:
            raise ValueError(f"T already has a degree-{k} part")
        self.T[k] = Tk
        for (n, d) in list(self.memo):
            if n == 1 and (d - k in self.base or d == k):
                self.memo[(1, d)] = self.memo[(1, d)] + self._first(k, d)
            elif n >= 2 and self.memo.get((n - 1, d - k)):
                raise ValueError("T grew below a degree that was already expanded")

    def term(self, n: int, d: int) -> LoopElem:
        if n == 0:
            return self.base.get(d, LoopElem())
        key = (n, d)
        if key in self.memo:
            return self.memo[key]
        out = LoopElem()
        if n == 1:
            for a in self.T:
                out = out + self._first(a, d)
        else:
            for a, Ta in self.T.items():
                prev = self.term(n - 1, d - a) if d - a >= self.bmin + (n - 1) else LoopElem()
                if prev:
                    out = out + self.la.bracket(Ta, prev)
        self.memo[key] = out
        return out

    def part(self, d: int) -> LoopElem:
        out = self.base.get(d, LoopElem())
        n = 1
        while d - n >= self.bmin:
            t = self.term(n, d)
            if t:
                out = out + t.scale(Fraction(1, factorial(n)))
            n += 1
        return out


def _par(u: SPoly) -> int:
    return u.parity() if u else 0


def _lin(row, vec) -> SPoly:
    out = SPoly()
    for r, v in zip(row, vec):
        if r and v:
            out = out + v.scale(r)
    return out


def _solve_poly(A, vec) -> list | None:
    """Solve ``A x = vec`` with rational ``A`` and polynomial right-hand side."""
    nr = len(A)
    nc = len(A[0]) if A else 0
    if nc == 0:
        return [] if all(not v for v in vec) else None
    # left inverse on the pivot rows, then verify
    cols_t = [[A[r][c] for r in range(nr)] for c in range(nc)]
    _, piv_rows = rref(cols_t)
    if len(piv_rows) < nc:
        raise ValueError("ad Lambda^2 restricted to I is not injective")
    sub = [[A[r][c] for c in range(nc)] for r in piv_rows]
    inv = inverse(sub)
    x = [_lin(row, [vec[r] for r in piv_rows]) for row in inv]
    for r in range(nr):
        if _lin(A[r], x) != vec[r]:
            return None
    return x
