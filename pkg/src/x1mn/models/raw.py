"""Plane models of X1(m, mn) by equating x-coordinates of multiples.

For a family carrying a point Q, the curve X1(m, mn) sits inside the
locus x(aQ) = x(bQ) with a = ceil((N+1)/2), b = floor((N-1)/2), N = mn,
which says aQ = -bQ, i.e. NQ = O (for even N also 2Q = O).  The remaining
components of that locus are struck out: lower levels N' | N, the loci
where Q meets <P> nontrivially, and degenerate fibres of the family.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import flint

from ..algebra.bipoly import BiPoly, NotASquare
from ..algebra.ratfunc import RatFunc
from ..algebra.rings import QQ, NumField, cyclotomic_field, euler_phi
from ..invariants import prime_divisors
from ..tate import (TateCurve, WeierstrassCurve, chain_x_multiple, division_x_multiple,
                    family_curve, kubert_bc)
from .conjugate import SplitFailed, split_conjugate

GENUS_ZERO_M = (4, 5, 6, 7, 8, 9, 10, 12)


class UnsupportedRange(ValueError):
    pass


class FactorSelectionAmbiguous(RuntimeError):
    pass


@dataclass
class RawModel:
    m: int
    n: int
    poly: BiPoly
    provenance: dict = field(default_factory=dict)
    component: Optional[BiPoly] = None

    @property
    def label(self):
        return (self.m, self.n)

    @property
    def field(self):
        return self.poly.ring

    @property
    def vars(self):
        return self.poly.vars

    def to_json(self):
        out = {"label": [self.m, self.n], "vars": list(self.vars),
               "field": self.field.to_json(), "provenance": _plain_json(self.provenance)}
        if self.component is not None:
            out["component"] = {"field": self.component.ring.to_json(), "poly": self.component.fmt()}
        return out


def _plain_json(obj):
    if isinstance(obj, dict):
        return {k: _plain_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain_json(v) for v in obj]
    if isinstance(obj, flint.fmpz):
        return int(obj)
    return obj


def fmpz_to_bipoly(p, vars_=None) -> BiPoly:
    vars_ = tuple(vars_ or p.context().names())
    return BiPoly._raw({tuple(e): flint.fmpq(int(c)) for e, c in p.to_dict().items()}, vars_, QQ)


def bipoly_to_fmpz(F: BiPoly):
    Fn = F.normalized()
    ctx = flint.fmpz_mpoly_ctx.get(F.vars, "lex")
    return ctx.from_dict({e: int(c.p) for e, c in Fn.terms.items()})


def _check_range(m: int, n: int):
    if m not in (1, 2, 3, 4):
        raise UnsupportedRange("raw models are built for m in {1,2,3,4}")
    if n < 1 or m * n < 5:
        raise UnsupportedRange("need mn >= 5")
    if m * m * n > 120:
        raise UnsupportedRange("need m^2 n <= 120")


def _setup(m: int):
    """(curve, P, Q, family tag) with Q generic on a two-parameter family."""
    if m == 1:
        ctx = flint.fmpz_mpoly_ctx.get(("b", "c"), "lex")
        b, c = RatFunc.gens(ctx)
        C = TateCurve(b, c)
        return C, C.P, C.P, "tate(b,c)"
    fam = family_curve(m)
    return fam.curve, fam.P, fam.Q, f"E{m}(q,t)"


def _split_ab(N: int) -> Tuple[int, int]:
    return (N + 2) // 2, (N - 1) // 2


class _Multiples:
    """x(kQ) on demand, via a supplied x-multiple routine (memoized)."""

    def __init__(self, fn):
        self.fn = fn
        self.cache: Dict[int, object] = {}

    def __getitem__(self, k: int):
        if k not in self.cache:
            self.cache[k] = self.fn(k)
        return self.cache[k]


def _chain_multiples(C: WeierstrassCurve, Q, upto: int) -> _Multiples:
    pts = [None, Q]
    for _ in range(2, upto + 1):
        pts.append(C.add(pts[-1], Q))
    return _Multiples(lambda k: pts[k][0])


def _level_condition(C, Q, xs: _Multiples, Np: int, two_division=None):
    if Np == 2:
        if two_division is not None:
            return two_division
        x, y = Q
        return (2 * y + C.a1 * x + C.a3).num
    a, b = _split_ab(Np)
    return (xs[a] - xs[b]).num


def _conditions(m: int, n: int, C, P, Q, xs: _Multiples, two_division=None):
    """(reason, polynomial) pairs whose zero loci are spurious components."""
    N = m * n
    out = []
    for Np in range(2, N):
        if N % Np == 0:
            out.append((f"level {Np}", _level_condition(C, Q, xs, Np, two_division)))
    for ell in prime_divisors(m):
        for j in range(1, ell // 2 + 1):
            R = C.mul(j * (m // ell), P)
            out.append((f"({N // ell})Q = {j * (m // ell)}P",
                        (xs[N // ell] - R[0]).num))
    disc = C.discriminant()
    out.append(("discriminant", disc.num))
    out.append(("discriminant pole", disc.den))
    for a in C.ainvs:
        if not a.den.is_constant():
            out.append(("coefficient pole", a.den))
    if not isinstance(Q[0], RatFunc) or not Q[0].den.is_constant():
        if isinstance(Q[0], RatFunc):
            out.append(("Q pole", Q[0].den))
    return [(r, g) for r, g in out if not g.is_constant()]


def _classify(F, conds):
    """Factor F over Q; split factors into spurious (with reasons) and the rest."""
    _, facs = F.factor()
    removed, kept = [], []
    for f, e in facs:
        if f.is_constant():
            continue
        reasons = [r for r, g in conds if not f.gcd(g).is_constant()]
        if reasons:
            removed.append({"factor": str(f), "bidegree": list(f.degrees()),
                            "multiplicity": int(e), "reasons": reasons})
        else:
            kept.append((f, int(e)))
    return removed, kept


def spurious_divisors(m: int, n: int) -> List[BiPoly]:
    """The conditions whose factors are struck from the raw x-equating polynomial."""
    _check_range(m, n)
    C, P, Q, _ = _setup(m)
    N = m * n
    xs = _chain_multiples(C, Q, N // 2 + 1)
    return [fmpz_to_bipoly(g) for _, g in _conditions(m, n, C, P, Q, xs)]


def raw_model(m: int, n: int, supplied_factor: Optional[BiPoly] = None) -> RawModel:
    """Model of X1(m, mn) over Q(zeta_m) from the families E_m (m = 2,3,4) or Tate form (m = 1)."""
    _check_range(m, n)
    C, P, Q, tag = _setup(m)
    N = m * n
    a, b = _split_ab(N)
    xs = _chain_multiples(C, Q, a)
    F = (xs[a] - xs[b]).num
    conds = _conditions(m, n, C, P, Q, xs)
    removed, kept = _classify(F, conds)
    prov = {"family": tag, "multiples": [a, b], "raw_bidegree": [int(e) for e in F.degrees()],
            "raw_terms": len(F), "removed": removed}
    if len(kept) != 1 or kept[0][1] != 1:
        raise FactorSelectionAmbiguous(
            f"{len(kept)} candidate factors remain for ({m},{n}): "
            f"{[(list(f.degrees()), e) for f, e in kept]}")
    G = kept[0][0]
    prov["selected_bidegree"] = [int(e) for e in G.degrees()]
    K = cyclotomic_field(m) if m in (3, 4) else QQ
    if K is QQ:
        return RawModel(m, n, fmpz_to_bipoly(G).normalized(), prov)
    if supplied_factor is not None:
        A = supplied_factor
        if not _divides_over_field(A, G):
            raise FactorSelectionAmbiguous("supplied factor does not divide the selected polynomial")
        prov["conjugate_split"] = {"method": "supplied", "verified": "divides the Q-irreducible factor"}
    else:
        try:
            A = split_conjugate(G, K)
        except SplitFailed as exc:
            raise FactorSelectionAmbiguous(f"conjugate split failed: {exc}") from None
        prov["conjugate_split"] = {"method": "multimodular", "field": K.to_json(),
                                   "verified": "A * conj(A) equals the Q-irreducible factor"}
    return RawModel(m, n, A.normalized(), prov)


def _divides_over_field(A: BiPoly, G) -> bool:
    Gb = fmpz_to_bipoly(G).base_change(A.ring)
    _, r = Gb.divmod(A)
    return r.is_zero()


# -- genus-zero X1(m): the general method ---------------------------------

def real_cyclotomic_field(m: int):
    """Q(zeta_m + zeta_m^-1) for the m used here; QQ when it has degree 1."""
    polys = {5: [-1, 1, 1], 8: [-2, 0, 1], 10: [-1, -1, 1], 12: [-3, 0, 1],
             7: [-1, -2, 1, 1], 9: [1, -3, 0, 1]}
    if euler_phi(m) <= 2:
        return QQ
    return NumField(polys[m], gen_name=f"w{m}", tag=f"real_cyclotomic({m})")


def _two_division_num(C, x):
    b2, b4, b6, _ = C.b_invariants()
    return (4 * x ** 3 + b2 * x * x + 2 * b4 * x + b6).num


def general_model(m: int, n: int, route: str = "divpoly", split: bool = True) -> RawModel:
    """F(t, x) for X1(m, mn) when X1(m) has genus 0, over Q.

    Q = (x, y) is the generic point of E(b(t), c(t)); h(t, x) is the
    numerator of x(aQ) - x(bQ).  With e(t, x, y) the curve equation,
    H = Res_y(e, h) is checked to be a perfect square, F = sqrt(H), and the
    spurious factors are removed from F.  ``route`` selects division
    polynomials or the chord-tangent chain for x(kQ).
    """
    if m not in GENUS_ZERO_M:
        raise UnsupportedRange("X1(m) must have genus zero")
    if n < 1 or m * m * n > 120:
        raise UnsupportedRange("need m^2 n <= 120")
    ctx = flint.fmpz_mpoly_ctx.get(("t", "x", "y"), "lex")
    t, x, y = RatFunc.gens(ctx)
    bb, cc = kubert_bc(m, t)
    C = TateCurve(bb, cc)
    N = m * n
    a, b = _split_ab(N)
    if route == "divpoly":
        def xk(k):
            num, den = division_x_multiple(C, x, k)
            return num / den
    elif route == "chain":
        def xk(k):
            return chain_x_multiple(C, x, k)
    else:
        raise ValueError("route must be 'divpoly' or 'chain'")
    xs = _Multiples(xk)
    h = (xs[a] - xs[b]).num
    e = C.equation(x, y)
    e_num = e.num
    H = e_num.resultant(h, "y")
    try:
        F3 = _sqrt_content(H)
    except NotASquare:
        raise
    ctx2 = flint.fmpz_mpoly_ctx.get(("t", "x"), "lex")
    F = _drop_y(F3, ctx2)
    conds = _conditions(m, n, C, C.P, (x, y), xs, two_division=_two_division_num(C, x))
    conds = [(r, _drop_y(g, ctx2)) for r, g in conds]
    removed, kept = _classify(F, conds)
    prov = {"family": f"E(b,c) with X1({m}) parametrization", "route": route,
            "multiples": [a, b], "h_bidegree": list(_drop_y(h, ctx2).degrees()),
            "resultant_square": True, "removed": removed}
    if len(kept) != 1 or kept[0][1] != 1:
        raise FactorSelectionAmbiguous(
            f"{len(kept)} candidate factors remain: {[(list(f.degrees()), e) for f, e in kept]}")
    G = kept[0][0]
    prov["selected_bidegree"] = [int(e) for e in G.degrees()]
    model = RawModel(m, n, fmpz_to_bipoly(G).normalized(), prov)
    r = euler_phi(m) // 2
    prov["expected_components"] = r
    prov["split_check"] = check_split_mod_p(G, m, r)
    if split and r == 2:
        Kp = real_cyclotomic_field(m)
        try:
            A = split_conjugate(G, Kp)
            model.component = A.normalized()
            prov["component_method"] = "multimodular over " + Kp.gen_name
        except SplitFailed as exc:
            prov["component_method"] = f"not computed: {exc}"
    return model


def _sqrt_content(H):
    c = H.content()
    Hp = H / c if c != 1 else H
    if Hp.leading_coefficient() < 0:
        Hp = -Hp
    try:
        return Hp.sqrt()
    except Exception as exc:
        raise NotASquare(str(exc)) from None


def _drop_y(p, ctx2):
    d = {}
    for e, c in p.to_dict().items():
        if e[2]:
            raise ValueError("polynomial involves y")
        d[(e[0], e[1])] = int(c)
    return ctx2.from_dict(d)


def check_split_mod_p(G, m: int, r: int, count: int = 3) -> dict:
    """Factor G modulo a few primes p = +-1 mod m; record the factor bidegrees.

    The Q-irreducible model of X1(m,mn)+ should split into r factors of
    equal bidegree exactly when p splits completely in Q(zeta_m)+.
    """
    out = {}
    p = 100
    vars_ = tuple(G.context().names())
    while len(out) < count:
        p += 1
        if not flint.fmpz(p).is_prime() or p % m not in (1, m - 1):
            continue
        d = {tuple(e): int(c) % p for e, c in G.to_dict().items()}
        ctx = flint.nmod_mpoly_ctx.get(vars_, modulus=p, ordering="lex")
        Gp = ctx.from_dict(d)
        if Gp.degrees() != G.degrees():
            continue
        _, facs = Gp.factor()
        out[p] = sorted([list(f.degrees()) for f, e in facs for _ in range(e)])
    ok = all(len(v) == r and all(x == v[0] for x in v) for v in out.values())
    return {"primes": {str(k): v for k, v in out.items()}, "consistent": ok}
