"""Branches of a plane curve at a point, by repeated blowing up.

A local equation f(u, w) with f(0, 0) = 0 is blown up until every branch
passes through a smooth point; there the implicit function theorem (Newton
iteration on power series) gives a parametrization.  Blowing up is
characteristic free, so wild ramification of a coordinate projection
causes no trouble.  Each branch is a place of the function field; its
residue field is generated by the constants met along the way.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ..algebra.finite import FiniteField, GF, canonical_embedding
from .series import LSeries

Poly = Dict[Tuple[int, int], object]   # (i, j) -> coefficient, u^i w^j


def multiplicity(f: Poly) -> int:
    return min(i + j for i, j in f)


def translate(f: Poly, F: FiniteField, s0, t0) -> Poly:
    """f(u + s0, w + t0), dropping zero coefficients."""
    if s0.is_zero() and t0.is_zero():
        return dict(f)
    by_j: Dict[int, Dict[int, object]] = {}
    for (i, j), c in f.items():
        by_j.setdefault(j, {})[i] = c
    lin_s = F.poly([s0, F.one])
    lin_t = F.poly([t0, F.one])
    # shift in u for each power of w
    rows: Dict[int, list] = {}
    for j, d in by_j.items():
        top = max(d)
        p = F.poly([d.get(i, F.zero) for i in range(top + 1)])
        if not s0.is_zero():
            p = p.compose(lin_s)
        rows[j] = p.coeffs()
    # shift in w for each power of u
    by_i: Dict[int, Dict[int, object]] = {}
    for j, cs in rows.items():
        for i, c in enumerate(cs):
            if not c.is_zero():
                by_i.setdefault(i, {})[j] = c
    out: Poly = {}
    for i, d in by_i.items():
        top = max(d)
        p = F.poly([d.get(j, F.zero) for j in range(top + 1)])
        if not t0.is_zero():
            p = p.compose(lin_t)
        for j, c in enumerate(p.coeffs()):
            if not c.is_zero():
                out[(i, j)] = c
    return out


def embed_poly(f: Poly, emb) -> Poly:
    return {e: emb(c) for e, c in f.items()}


@dataclass
class Branch:
    """One branch; ``steps`` lead from the root local coordinates to the leaf."""
    field: FiniteField
    steps: list            # ('A', c) : (u, w) = (u1, u1 (c + w1)); ('B',) : (u, w) = (w1 u1, w1)
    leaf: Poly             # smooth at the origin
    param: str             # 'u' or 'w': which leaf coordinate is the local parameter
    ext: int               # degree of ``field`` over the root point's field
    root_emb: object = None  # embedding root field -> branch field
    _cache: dict = field(default_factory=dict, repr=False)

    def leaf_series(self, prec: int):
        """(u(t), w(t)) at the leaf, exact modulo t^prec."""
        F = self.field
        f = self.leaf
        if self.param == "u":
            sol = _newton(F, f, prec, swap=False)
            return LSeries.gen(F, prec + 1), sol
        sol = _newton(F, f, prec, swap=True)
        return sol, LSeries.gen(F, prec + 1)

    def series(self, prec: int):
        """(u(t), w(t)) in the root local coordinates, modulo t^prec."""
        if prec in self._cache:
            return self._cache[prec]
        for k in sorted(self._cache):
            if k >= prec:
                return self._cache[k]
        u, w = self.leaf_series(prec)
        for step in reversed(self.steps):
            if step[0] == "A":
                c = step[1]
                w = u * (w + c)
            else:
                u = w * u
        u = _cap(u, prec)
        w = _cap(w, prec)
        self._cache[prec] = (u, w)
        return u, w


def _cap(s: LSeries, prec: int) -> LSeries:
    if s.abs_prec > prec:
        return LSeries(s.F, s.val, s.poly, prec - s.val)
    return s


def _newton(F: FiniteField, f: Poly, prec: int, swap: bool) -> LSeries:
    """Solve f(t, w(t)) = 0 (or f(u(t), t) = 0 when swap) with w(0) = 0."""
    cols: Dict[int, Dict[int, object]] = {}
    for (i, j), c in f.items():
        a, b = (j, i) if swap else (i, j)
        cols.setdefault(b, {})[a] = c
    deg = max(cols)
    coef = []
    for b in range(deg + 1):
        d = cols.get(b, {})
        top = max(d) if d else -1
        coef.append(F.poly([d.get(a, F.zero) for a in range(top + 1)]))
    dcoef = [coef[b] * b for b in range(1, deg + 1)]
    w = F.poly([])
    n = 1
    target = max(prec, 1)
    while True:
        n = min(2 * n, target)
        val = _horner(F, coef, w, n)
        der = _horner(F, dcoef, w, n)
        w = w - val.mul_low(der.inverse_series_trunc(n), n)
        if n >= target:
            # one more pass at full precision guards against stalls
            val = _horner(F, coef, w, n)
            if not val.is_zero():
                der = _horner(F, dcoef, w, n)
                w = w - val.mul_low(der.inverse_series_trunc(n), n)
            break
    return LSeries(F, 0, w, target)


def _horner(F, coef, w, n):
    acc = F.poly([])
    for c in reversed(coef):
        acc = acc.mul_low(w, n) + c.truncate(n) if not acc.is_zero() else c.truncate(n)
    return acc


def _tangent_factor_roots(F: FiniteField, cone_coeffs):
    """Irreducible factors of the tangent-cone polynomial; one root of each in an extension."""
    P = F.poly(cone_coeffs)
    out = []
    if P.degree() <= 0:
        return out
    _, facs = P.factor()
    for g, _ in facs:
        s = g.degree()
        if s == 1:
            cs = g.coeffs()
            out.append((1, F, None, -cs[0] / cs[1]))
            continue
        F2 = GF(F.p, F.k * s)
        emb = canonical_embedding(F, F2)
        g2 = emb.poly(g)
        roots = [r for r, _ in g2.roots()]
        roots.sort(key=lambda r: list(reversed(F2.coords(r))))
        out.append((s, F2, emb, roots[0]))
    return out


def branches(f: Poly, F: FiniteField, max_depth: int = 10000) -> List[Branch]:
    """All branches at the origin of f (f(0,0) must be 0)."""
    if (0, 0) in f:
        raise ValueError("the origin is not on the curve")
    out: List[Branch] = []
    stack = [(f, F, [], 1, None)]
    depth = 0
    while stack:
        depth += 1
        if depth > max_depth:
            raise RuntimeError("branch resolution did not terminate")
        g, K, steps, ext, emb = stack.pop()
        r = multiplicity(g)
        if r == 1:
            param = "u" if (0, 1) in g else "w"
            out.append(Branch(K, steps, g, param, ext, emb))
            continue
        cone = {e: c for e, c in g.items() if e[0] + e[1] == r}
        # directions (1, c): roots of cone(1, w1)
        cone_w = [K.zero] * (r + 1)
        for (i, j), c in cone.items():
            cone_w[j] = c
        gA = {(i + j - r, j): c for (i, j), c in g.items()}
        for s, K2, e2, c in _tangent_factor_roots(K, cone_w):
            if e2 is None:
                g2, steps2, emb2 = gA, steps, emb
            else:
                g2 = embed_poly(gA, e2)
                steps2 = [_embed_step(st, e2) for st in steps]
                emb2 = e2 if emb is None else _compose(emb, e2)
            g3 = translate(g2, K2, K2.zero, c)
            stack.append((g3, K2, steps2 + [("A", c)], ext * s, emb2))
        # direction (0, 1): tangent line u = 0
        if (0, r) not in cone:
            gB = {(i, i + j - r): c for (i, j), c in g.items()}
            stack.append((gB, K, steps + [("B",)], ext, emb))
    return out


def _embed_step(st, emb):
    if st[0] == "A":
        return ("A", emb(st[1]))
    return st


class _Composite:
    def __init__(self, first, second):
        self.first, self.second = first, second
        self.src, self.dst = first.src, second.dst

    def __call__(self, a):
        return self.second(self.first(a))

    def poly(self, P):
        return self.dst.poly([self(c) for c in P.coeffs()])


def _compose(e1, e2):
    return _Composite(e1, e2)
