"""Dressing of the Lax operator, Hamiltonians and the bi-Hamiltonian hierarchy.

With ``L_s = D + Q + Lambda`` and ``[L_s, L_s]/2 = D^2 + U + Lambda^2``, the
dressing transformation ``exp(ad T)`` (``T`` in I) brings the square to
``D^2 + H + Lambda^2`` with ``H`` in K.  Then ``exp(ad T) L_s = D + K + Lambda``
with ``K`` in K, and ``h_{z^n C} = (K | C z^n)`` for ``C`` in the centre of K.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .chibracket import BracketSpec, bracket, hamiltonian_flow
from .dsred import WPresentation, affine_specs, reduced_spec
from .liesuper import Report
from .linalg import inverse, rank, rref
from .loopalg import GradedExp, LoopAlgebra, LoopElem, Op, TruncationError
from .superpoly import D_power, Functional, SPoly, apply_derivation, normal_form

__all__ = [
    "Dressing",
    "dressing",
    "hamiltonian_h",
    "quadratic_part",
    "lax_pair_M",
    "lax_flow",
    "commutator_with_lax",
    "lax_flow_coordinates",
    "check_lax_flows",
    "evolution",
    "reduced_evolution",
    "Hierarchy",
    "check_hierarchy",
    "BiHamiltonianError",
]


class BiHamiltonianError(ArithmeticError):
    """The two bracket routes of a flow disagree."""


@dataclass
class Dressing:
    """``T`` (parts by degree), ``H`` and ``K`` for ``L_s(Q)``, exact through degree ``dmax``."""

    T: dict
    H: LoopElem
    K: LoopElem
    dmax: int
    loop: LoopAlgebra
    Q: LoopElem

    def T_total(self) -> LoopElem:
        out = LoopElem()
        for t in self.T.values():
            out = out + t
        return out

    def lax(self) -> Op:
        return Op(self.Q + self.loop.Lambda, d1=1)


def dressing(la: LoopAlgebra, Q: LoopElem, dmax: int) -> Dressing:
    """Solve for ``T`` and ``H`` through degree ``dmax`` and return the dressed ``K``."""
    if dmax < 0:
        raise ValueError("cutoff must be non-negative")
    L = Op(Q + la.Lambda, d1=1)
    sq = la.square_half(L)
    i = la.i
    square = GradedExp(la, Op(sq.X, d2=1))
    H = LoopElem()
    T: dict = {}
    for k in range(1, dmax + 2 * i + 1):
        d = -2 * i + k
        Rk, Ri = la.decompose(square.part(d))
        H = H + Rk
        if Ri:
            T[k] = la.invert_ad_lambda_sq(Ri)
            square.add_T(k, T[k])
    dressed = GradedExp(la, L, T)
    K = LoopElem()
    for d in range(-i, dmax + 1):
        Kd = dressed.part(d) - la.part(la.Lambda, d)
        if la.decompose(Kd)[1]:
            raise ArithmeticError(f"dressed operator has a component outside K at degree {d}")
        K = K + Kd
    return Dressing(T, H, K, dmax, la, Q)


def _check_center(la: LoopAlgebra, C: Mapping):
    elem = {(a, 0): Fraction(c) for a, c in C.items() if c}
    if not elem:
        raise ValueError("C is zero")
    d = la.g.degree_of(C)
    vecs = [v for deg, v in la.center_of_kernel() if (deg - d) % la.period == 0]
    # centre vectors of other degrees are z-shifts: compare up to the z-power
    shifted = []
    for v in vecs:
        ks = {k for _, k in v}
        shift = min(ks)
        shifted.append({(a, k - shift): c for (a, k), c in v.items()})
    keys = sorted({k for v in shifted for k in v} | set(elem))
    rows = [[v.get(k, 0) for k in keys] for v in shifted]
    if rank(rows + [[elem.get(k, 0) for k in keys]]) != rank(rows):
        raise ValueError("C is not in the centre of the kernel of ad Lambda^2")


def hamiltonian_h(dr: Dressing, C: Mapping, n: int) -> Functional:
    """``int h_{z^n C} = int (K | C z^n)``."""
    la = dr.loop
    need = n * la.period - la.g.degree_of(C)
    if need > dr.dmax:
        raise TruncationError(f"h_(z^{n} C) needs K at grade {need}, cutoff is {dr.dmax}", slot=need)
    return Functional(la.form(la.part(dr.K, need), LoopElem.from_vec(C, n)))


def _linear_part(x: LoopElem) -> LoopElem:
    return LoopElem({k: v.homogeneous_part(1) for k, v in x.c.items() if v.homogeneous_part(1)})


def quadratic_part(dr: Dressing, C: Mapping, n: int) -> Functional:
    """``int (Q_K | C z^n) + 1/2 int (Q_I | [C z^n, T_l])``, ``T_l`` the part of ``T`` linear in ``Q``.

    Valid when ``Q`` is linear in the generators; equals the part of
    ``h_{z^n C}`` of polynomial degree at most two.
    """
    la = dr.loop
    QK, QI = la.decompose(dr.Q)
    Cz = LoopElem.from_vec(C, n)
    Tl = _linear_part(dr.T_total())
    return Functional(la.form(QK, Cz) + la.form(QI, la.bracket(Cz, Tl)).scale(Fraction(1, 2)))


def lax_pair_M(dr: Dressing, C: Mapping, n: int, plus: bool = True, top: int | None = None) -> LoopElem:
    """``M = exp(-ad T)(C z^n)`` up to degree ``top``; with ``plus`` only non-negative z-powers."""
    la = dr.loop
    top = max(la.g.degrees) if top is None else top
    start = la.g.degree_of(C) - n * la.period
    if top - start > dr.dmax + 2 * la.i:
        raise TruncationError(f"M for z^{n} C needs T up to degree {top - start}", slot=top - start)
    neg = {k: t.scale(-1) for k, t in dr.T.items()}
    ex = GradedExp(la, Op(LoopElem.from_vec(C, n)), neg)
    M = LoopElem()
    for d in range(start, top + 1):
        M = M + ex.part(d)
    if plus:
        M = LoopElem({(a, k): v for (a, k), v in M.c.items() if k >= 0})
    return M


def commutator_with_lax(dr: Dressing, C: Mapping, n: int) -> tuple[LoopElem, int]:
    """``[M, L_s]`` for the full ``M``, through the top degree at which it is determined."""
    la = dr.loop
    top = dr.dmax + 2 * la.i + la.g.degree_of(C) - n * la.period
    M = lax_pair_M(dr, C, n, plus=False, top=top)
    X = la.bracket_op(M, dr.lax()).X
    valid = top - la.i
    return la.truncate(X, valid), valid


def lax_flow(dr: Dressing, C: Mapping, n: int) -> LoopElem:
    """``-[M^+, L_s]`` for ``M = M_{z^n C}``."""
    la = dr.loop
    return la.bracket_op(lax_pair_M(dr, C, n), dr.lax()).X.scale(-1)


def lax_flow_coordinates(W: WPresentation, dr: Dressing, C: Mapping, n: int) -> list[SPoly]:
    """``-[M^+_{z^n C}, L_s]`` written as ``sum_t q^t (x) X_t``; returns ``X_t`` per generator of ``P``."""
    rd, g = W.rd, W.g
    X = lax_flow(dr, C, n)
    ts = rd.bminus
    rows = [[rd.dual[t].get(r, 0) for t in ts] for r in range(g.dim)]
    _, piv = rref([[rows[r][k] for r in range(g.dim)] for k in range(len(ts))])
    inv = inverse([rows[r] for r in piv])
    vec = [X.coefficient(r, 0) for r in piv]
    out = []
    for idx in range(len(ts)):
        acc = SPoly()
        for j, cf in enumerate(inv[idx]):
            if cf and vec[j]:
                acc = acc + vec[j].scale(cf)
        out.append(acc)
    back = LoopElem()
    for t, x in zip(ts, out):
        back = back + LoopElem.from_vec(rd.dual[t], 0, x)
    if back != X:
        raise ArithmeticError("Lax flow leaves the span of the dual vectors")
    return out


def check_lax_flows(W: WPresentation, dr: Dressing, C: Mapping, n: int) -> Report:
    """``-[M^+_{z^n C}, L_s]`` against the second-bracket flow of ``h_{z^{n+1} C}`` on every generator of ``P``.

    ``dr`` must be the dressing of ``Q_u``.  On ``P`` the first bracket
    differs by gauge directions; the two agree only on W.
    """
    rep = Report()
    _, a2 = affine_specs(W)
    lax = lax_flow_coordinates(W, dr, C, n)
    h2 = hamiltonian_h(dr, C, n + 1)
    for v, x in zip(W.P_vars, lax):
        b2 = evolution(a2, h2, v())
        if x != b2:
            rep.fail(f"t_{n} {v.name}: Lax form {x} vs second bracket {b2}")
    if rep.ok:
        rep.note(f"t_{n}: Lax form agrees with the bracket flow on {len(lax)} generators")
    return rep


def evolution(spec: BracketSpec, h, t: SPoly) -> SPoly:
    """``d t / d t_h = {int h chi t}`` at ``chi = 0``."""
    return hamiltonian_flow(spec, h, t)


def reduced_evolution(W: WPresentation, dr: Dressing, C: Mapping, n: int, w) -> SPoly:
    """Flow of a W-generator under ``h_{z^n C}`` and the first bracket.

    Raises ``BiHamiltonianError`` unless it agrees with ``h_{z^{n+1} C}``
    under the second bracket.
    """
    w = w if isinstance(w, SPoly) else w()
    first = evolution(reduced_spec(W, 1), hamiltonian_h(dr, C, n), w)
    second = evolution(reduced_spec(W, 2), hamiltonian_h(dr, C, n + 1), w)
    if first != second:
        raise BiHamiltonianError(f"flow {n} of {w}: first bracket gives {first}, second gives {second}")
    return first


class Hierarchy:
    """Hamiltonians and flows of one reduction, computed within a window.

    The window ``w`` sets the dressing cutoff to ``w * (i + j)`` in degree,
    so ``h_{z^n C}`` is available for ``n <= w`` when ``C`` has degree 0.
    """

    def __init__(self, W: WPresentation, la: LoopAlgebra, C: Mapping | None = None, window: int = 5):
        self.W = W
        self.la = la
        self.window = window
        if C is None:
            centre = [v for d, v in la.center_of_kernel() if d == 0 and all(k == 0 for _, k in v)]
            if not centre:
                raise ValueError("no degree-0 element in the centre of K")
            C = {a: c for (a, _), c in centre[0].items()}
        _check_center(la, C)
        self.C = dict(C)
        self.dmax = window * la.period
        self._dr_w = None
        self._dr_p = None
        self._rho: dict = {}
        self._flows: dict = {}

    @property
    def dr_w(self) -> Dressing:
        """Dressing of the canonical operator ``Q^c`` (W variables)."""
        if self._dr_w is None:
            self._dr_w = dressing(self.la, self.W.Qc_formal(), self.dmax)
        return self._dr_w

    @property
    def dr_p(self) -> Dressing:
        """Dressing of ``Q_u`` (affine variables)."""
        if self._dr_p is None:
            self._dr_p = dressing(self.la, self.W.Qu, self.dmax)
        return self._dr_p

    def rho(self, n: int) -> Functional:
        if n not in self._rho:
            self._rho[n] = Functional(normal_form(hamiltonian_h(self.dr_w, self.C, n).density))
        return self._rho[n]

    def flow(self, n: int) -> list[SPoly]:
        if n not in self._flows:
            self._flows[n] = [reduced_evolution(self.W, self.dr_w, self.C, n, w) for w in self.W.wvars]
        return self._flows[n]

    def flow_parity(self, n: int) -> int:
        return (self.rho(n).density.parity() + 1) % 2

    def apply_flow(self, n: int, p: SPoly) -> SPoly:
        """The evolutionary derivation ``d/dt_n`` applied to a W-polynomial."""
        images = dict(zip(self.W.wvars, self.flow(n)))
        par = self.flow_parity(n)

        def img(v, o):
            x = images.get(v)
            if x is None:
                return SPoly()
            y = D_power(x, o)
            return -y if (par and o % 2) else y

        return apply_derivation(p, img, par)

    def quadratic(self, n: int) -> Functional:
        return quadratic_part(self.dr_w, self.C, n)


def check_hierarchy(H: Hierarchy, depth: int) -> Report:
    """Bi-Hamiltonian flows, involution, commuting flows, conservation, independence."""
    rep = Report()
    W = H.W
    spec2 = reduced_spec(W, 2)
    ns = range(depth + 1)
    for n in ns:
        try:
            H.flow(n)
        except BiHamiltonianError as exc:
            rep.fail(str(exc))
            return rep
    for m in ns:
        for n in ns:
            if m < n:
                val = Functional(bracket(spec2, H.rho(m).density, H.rho(n).density).at_zero())
                if not val.is_zero():
                    rep.fail(f"{{rho_{m}, rho_{n}}}_2 = {val.to_text()} is not zero")
                sign = -1 if (H.flow_parity(m) and H.flow_parity(n)) else 1
                for w, fm, fn in zip(W.wvars, H.flow(m), H.flow(n)):
                    c = H.apply_flow(m, fn) - H.apply_flow(n, fm).scale(sign)
                    if c:
                        rep.fail(f"[d/dt_{m}, d/dt_{n}] {w.name} = {c}")
            val = Functional(H.apply_flow(m, H.rho(n).density))
            if not val.is_zero():
                rep.fail(f"rho_{n} is not conserved by t_{m}: {val.to_text()}")
    quads = []
    for n in ns:
        q = H.quadratic(n)
        low = Functional(sum((H.rho(n).density.homogeneous_part(k) for k in (0, 1, 2)), SPoly()))
        if q != low:
            rep.fail(f"quadratic part formula disagrees with rho_{n}")
        quads.append(q.normal_form())
    monos = sorted({m for q in quads for m in q.terms}, key=repr)
    rows = [[q.terms.get(m, 0) for m in monos] for q in quads]
    if rank(rows) != len(quads):
        rep.fail("linear and quadratic parts of the Hamiltonians are linearly dependent")
    if rep.ok:
        rep.note(f"depth {depth}: bi-Hamiltonian, in involution, commuting, conserved, independent")
    return rep
