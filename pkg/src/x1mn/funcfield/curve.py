"""Plane curves over finite fields, resolved place by place.

The curve is F(x, y) = 0 with F over F_p, viewed inside P^1 x P^1 and
base changed to F_q, q = p^f.  Internally x is the variable of larger
degree, so fibres of the x-projection have at most b = deg_y F points.
Places over a closed point of the x-line come from factoring F(x0, y);
simple roots are smooth points parametrized by x - x0, everything else
goes through the blow-up resolution in ``local``.

Holomorphic differentials are h dx/F_y with deg h <= (a-2, b-2) subject
to the adjoint conditions at singular places; their count is the genus.
Riemann-Roch spaces use the same adjoint description with a denominator
in x only.
"""
from __future__ import annotations

import hashlib
import json
import math
import weakref
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import flint

from ..algebra.finite import GF, FiniteField, canonical_embedding
from .local import branches, multiplicity, translate
from .series import LSeries, PrecisionLoss

Poly = Dict[Tuple[int, int], int]


class BadPrime(ValueError):
    pass


class WeilViolation(ArithmeticError):
    pass


class ConstantFunction(ValueError):
    pass


class NotAbsolutelyIrreducible(ValueError):
    pass


def multiplicative_order(p: int, m: int) -> int:
    if m <= 2:
        return 1
    k, x = 1, p % m
    while x != 1:
        x = x * p % m
        k += 1
    return k


def _reduce_coeff(c, p: int, zbar) -> int:
    if isinstance(c, (int, flint.fmpz)):
        return int(c) % p
    if isinstance(c, (Fraction, flint.fmpq)):
        num, den = int(c.numerator if isinstance(c, Fraction) else c.p), int(
            c.denominator if isinstance(c, Fraction) else c.q)
        if den % p == 0:
            raise BadPrime(f"p = {p} divides a coefficient denominator")
        return num * pow(den, -1, p) % p
    # number-field element: evaluate at the chosen root of the defining polynomial
    acc = 0
    for i, a in enumerate(c.field.rational_coords(c)):
        acc += _reduce_coeff(a, p, None) * pow(zbar, i, p)
    return acc % p


def reduce_model(model, p: int, m: Optional[int] = None, n: Optional[int] = None,
                 label=None) -> "PlaneCurveFq":
    """Reduce a plane model modulo p.

    ``model`` is a RawModel, a BiPoly, or an object with ``poly``.  Models over
    Q(zeta) are reduced through the least root of the defining polynomial in
    F_p, so they need p to split completely there.  The residue field for
    counting is F_{p^f} with f the order of p modulo m.
    """
    poly = getattr(model, "poly", model)
    if m is None:
        m = getattr(model, "m", 1)
    if n is None:
        n = getattr(model, "n", None)
    if label is None and n is not None:
        label = (m, n)
    if not flint.fmpz(p).is_prime():
        raise BadPrime(f"{p} is not prime")
    if n is not None and (m * n) % p == 0:
        raise BadPrime(f"p = {p} divides mn = {m * n}")
    ring = poly.ring
    zbar = None
    if getattr(ring, "degree", 1) > 1:
        roots = flint.nmod_poly([_reduce_coeff(c, p, None) for c in ring.poly.coeffs()], p).roots()
        if not roots:
            raise BadPrime(f"the coefficient field does not split at p = {p}")
        zbar = min(int(r) for r, _ in roots)
    coeffs = {}
    for e, c in poly.terms.items():
        r = _reduce_coeff(c, p, zbar)
        if r:
            coeffs[e] = r
    for k in (0, 1):
        if max((e[k] for e in coeffs), default=-1) != poly.degree(poly.vars[k]):
            raise BadPrime(f"reduction mod {p} drops the degree in {poly.vars[k]}")
    f = multiplicative_order(p, m)
    curve = PlaneCurveFq(coeffs, p, f=f, vars=tuple(poly.vars), label=label)
    if not curve.is_irreducible_fp():
        raise BadPrime(f"reduction mod {p} is reducible")
    curve.meta = {"m": m, "n": n, "zeta_root": zbar}
    return curve


# ---------------------------------------------------------------------------
# places

class Place:
    """A place of the curve over its base field.

    The centre is given in a chart of P^1 x P^1: ``xc``/``yc`` say whether
    the coordinate is affine ('f') or inverted ('i'), and (s0, t0) is the
    centre in chart coordinates.  ``branch`` is None for a smooth point
    where the chart x-coordinate minus s0 is a uniformizer.
    """
    __slots__ = ("curve", "deg", "field", "xc", "yc", "s0", "t0", "branch", "mult",
                 "key", "gimg", "_series", "_cache", "__weakref__")

    def __init__(self, curve, deg, field, xc, yc, s0, t0, branch, mult, key, gimg):
        # weak reference: a cycle through the curve's caches would hand flint
        # values to the cyclic collector, which may free their context first
        self.curve = weakref.proxy(curve)
        self.deg = deg
        self.field = field
        self.xc, self.yc = xc, yc
        self.s0, self.t0 = s0, t0
        self.branch = branch
        self.mult = mult
        self.key = key
        self.gimg = gimg          # image of the base-field generator in ``field``
        self._series = {}
        self._cache = {}

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, Place) and self.key == other.key

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (self.deg, repr(self.key))

    def __repr__(self):
        kind = "smooth" if self.branch is None else f"branch(mult {self.mult})"
        return f"Place(deg={self.deg}, chart={self.xc}{self.yc}, {kind}, key={self.key})"

    @property
    def at_infinity(self) -> bool:
        return self.xc == "i" or self.yc == "i"

    def describe(self) -> dict:
        F = self.field
        return {"deg": self.deg, "chart": self.xc + self.yc, "field": F.to_json(),
                "s0": F.coords(self.s0), "t0": F.coords(self.t0),
                "singular": self.branch is not None and self.mult > 1}

    def chart_series(self, N: int):
        """Chart coordinates (S(t), T(t)) as polynomials modulo t^N."""
        if N in self._series:
            return self._series[N]
        for k in sorted(self._series):
            if k >= N:
                S, T = self._series[k]
                return S.truncate(N), T.truncate(N)
        F = self.field
        if self.branch is None:
            S = F.poly([self.s0, F.one]).truncate(N)
            T = self.curve._smooth_newton(self, N)
        else:
            u, w = self.branch.series(N)
            s0, t0 = self.s0, self.t0
            S = (u.poly.left_shift(u.val) + s0).truncate(N) if not u.is_zero() else F.poly([s0])
            T = (w.poly.left_shift(w.val) + t0).truncate(N) if not w.is_zero() else F.poly([t0])
        self._series[N] = (S, T)
        return S, T


class Divisor(dict):
    """Finite formal sum of places: Place -> multiplicity."""

    def __init__(self, data=None):
        super().__init__()
        if data:
            for P, k in (data.items() if isinstance(data, dict) else data):
                self.add(P, k)

    def add(self, P, k=1):
        v = self.get(P, 0) + k
        if v:
            self[P] = v
        elif P in self:
            del self[P]
        return self

    def degree(self) -> int:
        return sum(P.deg * k for P, k in self.items())

    def is_effective(self) -> bool:
        return all(k > 0 for k in self.values())

    def __add__(self, other):
        out = Divisor(self)
        for P, k in other.items():
            out.add(P, k)
        return out

    def __neg__(self):
        return Divisor({P: -k for P, k in self.items()})

    def __sub__(self, other):
        return self + (-other)

    def positive(self):
        return Divisor({P: k for P, k in self.items() if k > 0})

    def support(self):
        return sorted(self)

    def to_json(self):
        return [[P.describe(), k] for P, k in sorted(self.items())]


class CurveFunction:
    """num/den with num, den polynomials in the internal (x, y) coordinates."""

    def __init__(self, curve, num: Poly, den: Poly):
        self.curve = curve
        self.num = {e: c % curve.p for e, c in num.items() if c % curve.p}
        self.den = {e: c % curve.p for e, c in den.items() if c % curve.p}
        if not self.den:
            raise ZeroDivisionError("zero denominator")

    def valuation(self, P: Place) -> int:
        return self.curve.valuation(P, self.num) - self.curve.valuation(P, self.den)

    def inverse(self) -> "CurveFunction":
        return CurveFunction(self.curve, self.den, self.num)

    def user_form(self):
        c = self.curve
        return {"num": c.poly_to_user(self.num), "den": c.poly_to_user(self.den)}

    def to_json(self):
        c = self.curve
        return {"vars": list(c.vars), "num": _fmt_poly(c.poly_to_user(self.num), c.vars),
                "den": _fmt_poly(c.poly_to_user(self.den), c.vars)}


def _fmt_poly(P: Poly, vars_) -> str:
    if not P:
        return "0"
    parts = []
    for (i, j), c in sorted(P.items(), reverse=True):
        mon = []
        if i:
            mon.append(vars_[0] + (f"^{i}" if i > 1 else ""))
        if j:
            mon.append(vars_[1] + (f"^{j}" if j > 1 else ""))
        parts.append("*".join([str(c)] + mon) if mon and c != 1 else ("*".join(mon) if mon else str(c)))
    return " + ".join(parts)


def parse_poly(text: str, vars_, p: int) -> Poly:
    from ..algebra.bipoly import BiPoly
    P = BiPoly.parse(text, tuple(vars_))
    out = {}
    for e, c in P.terms.items():
        r = _reduce_coeff(c, p, None)
        if r:
            out[e] = r
    return out


# ---------------------------------------------------------------------------
# the curve

class PlaneCurveFq:
    def __init__(self, coeffs: Poly, p: int, f: int = 1, vars=("x", "y"), label=None,
                 swap: Optional[bool] = None):
        coeffs = {(int(e[0]), int(e[1])): int(c) % p for e, c in coeffs.items() if int(c) % p}
        if not coeffs:
            raise ValueError("zero polynomial")
        self.p = p
        self.f = f
        self.q = p ** f
        self.vars = tuple(vars)
        self.label = label
        self.meta = {}
        d0 = max(e[0] for e in coeffs)
        d1 = max(e[1] for e in coeffs)
        if swap is None:
            swap = d1 > d0
        self.swapped = swap
        self.F = {(e[1], e[0]) if swap else e: c for e, c in coeffs.items()}
        self.a = max(e[0] for e in self.F)
        self.b = max(e[1] for e in self.F)
        if self.b < 1 or self.a < 1:
            raise ValueError("the curve must involve both variables")
        self.Fp = GF(p)
        self.Fq = GF(p, f)
        self.ctx = flint.nmod_mpoly_ctx.get(("x", "y"), modulus=p)
        self.Fn = self.ctx.from_dict(self.F)
        self.Fy = _deriv(self.F, 1, p)
        self.Fx = _deriv(self.F, 0, p)
        self._fibers = {}
        self._places = {}
        self._holo = None
        self._special = {}
        self._omega = {}

    # -- coordinates -------------------------------------------------------
    def __repr__(self):
        return f"PlaneCurveFq({self.label}, p={self.p}, q={self.q}, bidegree={self.bidegree()})"

    def bidegree(self):
        """(deg in first user variable, deg in second)."""
        return (self.b, self.a) if self.swapped else (self.a, self.b)

    def poly_from_user(self, P: Poly) -> Poly:
        return {((e[1], e[0]) if self.swapped else tuple(e)): c % self.p for e, c in P.items() if c % self.p}

    def poly_to_user(self, P: Poly) -> Poly:
        return {((e[1], e[0]) if self.swapped else e): c for e, c in P.items()}

    def coordinate(self, name: str) -> CurveFunction:
        """The user coordinate ``name`` as a function on the curve."""
        k = self.vars.index(name)
        e = [0, 0]
        e[k] = 1
        return CurveFunction(self, self.poly_from_user({tuple(e): 1}), {(0, 0): 1})

    def function(self, num, den=None) -> CurveFunction:
        """A function from user-coordinate polynomials (dicts or strings)."""
        if isinstance(num, str):
            num = parse_poly(num, self.vars, self.p)
        if den is None:
            den = {(0, 0): 1}
        elif isinstance(den, str):
            den = parse_poly(den, self.vars, self.p)
        return CurveFunction(self, self.poly_from_user(num), self.poly_from_user(den))

    def digest(self) -> str:
        payload = json.dumps({"p": self.p, "f": self.f, "vars": list(self.vars),
                              "F": sorted([list(e), c] for e, c in self.poly_to_user(self.F).items())})
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_json(self):
        return {"label": list(self.label) if self.label else None, "p": self.p, "f": self.f,
                "q": self.q, "vars": list(self.vars), "bidegree": list(self.bidegree()),
                "digest": self.digest()}

    # -- global polynomial data -------------------------------------------
    def is_irreducible_fp(self) -> bool:
        _, facs = self.Fn.factor()
        return len(facs) == 1 and facs[0][1] == 1

    def _cols(self, P: Poly, xc: str, A: int):
        """Columns of P in the chart: list over j of coefficient lists in the chart x."""
        B = max((e[1] for e in P), default=0)
        cols = [dict() for _ in range(B + 1)]
        for (i, j), c in P.items():
            cols[j][A - i if xc == "i" else i] = c
        out = []
        for d in cols:
            top = max(d, default=-1)
            out.append([d.get(i, 0) for i in range(top + 1)])
        return out

    def _xpoly(self, coeffs) -> flint.nmod_poly:
        return flint.nmod_poly(list(coeffs), self.p)

    def special_x_polys(self) -> List[flint.nmod_poly]:
        """Irreducible factors over F_p of the x-values of singular points and y-infinite points."""
        if "polys" in self._special:
            return self._special["polys"]
        x, y = self.ctx.gens()
        Fy = self.ctx.from_dict(self.Fy) if self.Fy else self.ctx.from_dict({})
        Fx = self.ctx.from_dict(self.Fx) if self.Fx else self.ctx.from_dict({})
        R1 = _to_xpoly(self.Fn.resultant(Fy, "y") if self.Fy else self.ctx.from_dict({}), self.p)
        R2 = _to_xpoly(self.Fn.resultant(Fx, "y") if self.Fx else self.ctx.from_dict({}), self.p)
        if R1.is_zero():
            raise NotAbsolutelyIrreducible("F_y vanishes on the curve (inseparable in y)")
        g = R1.gcd(R2) if not R2.is_zero() else R1
        lead = self._xpoly(self._cols(self.F, "f", self.a)[self.b])
        polys = []
        for h in (g, lead):
            if h.degree() <= 0:
                continue
            _, facs = h.factor()
            for fac, _ in facs:
                fac = fac.monic() if hasattr(fac, "monic") else fac
                if all(fac != q for q in polys):
                    polys.append(fac)
        polys.sort(key=lambda h: (h.degree(), [int(c) for c in h.coeffs()]))
        self._special["polys"] = polys
        return polys

    # -- fibres -------------------------------------------------------------
    def _base(self, base_k: int) -> FiniteField:
        return GF(self.p, base_k)

    def _orbit_rep(self, L, x0, base_k: int):
        """Canonical representative of the base-Frobenius orbit of x0 and the orbit size."""
        orbit = [x0]
        y = x0.frobenius(base_k)
        while y != x0:
            orbit.append(y)
            y = y.frobenius(base_k)
        rep = min(orbit, key=lambda z: list(reversed(L.coords(z))))
        return rep, len(orbit)

    def fibre_points_of_poly(self, pi: flint.nmod_poly, base_k: int):
        """Closed points of the x-line over GF(p^base_k) lying over the F_p-irreducible pi."""
        d = pi.degree()
        k = d // math.gcd(d, base_k)
        L = GF(self.p, base_k * k)
        roots = [r for r, _ in L.poly([int(c) for c in pi.coeffs()]).roots()]
        reps = {}
        for r in roots:
            rep, size = self._orbit_rep(L, r, base_k)
            reps[tuple(L.coords(rep))] = rep
        return [(k, L, reps[key]) for key in sorted(reps)]

    def fibres_of_degree(self, k: int, base_k: int):
        """All closed points of the affine x-line of degree k over GF(p^base_k)."""
        L = GF(self.p, base_k * k)
        seen = set()
        out = []
        for x0 in L.elements():
            key = tuple(L.coords(x0))
            if key in seen:
                continue
            orbit = [x0]
            y = x0.frobenius(base_k)
            while y != x0:
                orbit.append(y)
                y = y.frobenius(base_k)
            for z in orbit:
                seen.add(tuple(L.coords(z)))
            if len(orbit) == k:
                out.append((k, L, x0))
        return out

    def fibre(self, k: int, L: FiniteField, x0, base_k: int, maxdeg: Optional[int] = None):
        """Places over the closed point x0 (None for x = infinity) of degree k."""
        fkey = ("inf",) if x0 is None else (k, tuple(L.coords(x0)))
        ckey = (base_k, fkey)
        if ckey in self._fibers:
            md, places = self._fibers[ckey]
            if md is None or (maxdeg is not None and md >= maxdeg):
                return [P for P in places if maxdeg is None or P.deg <= maxdeg]
        places = self._compute_fibre(k, L, x0, base_k, maxdeg, (base_k,) + fkey)
        self._fibers[ckey] = (maxdeg, places)
        return places

    def _compute_fibre(self, k, L, x0, base_k, maxdeg, fkey):
        p = self.p
        B = self._base(base_k)
        gimg = canonical_embedding(B, L).image if base_k > 1 else None
        if x0 is None:
            xc, s0 = "i", L.zero
        else:
            xc, s0 = "f", x0
        cols = self._cols(self.F, xc, self.a)
        phi = L.poly([L.poly(c)(s0) if c else L.zero for c in cols])
        out: List[Place] = []
        lim = None if maxdeg is None else maxdeg // k
        if phi.degree() >= 1:
            if lim == 1:
                # only rational points are wanted; root finding is much cheaper than factoring
                facs = [(L.poly([-r, L.one]), e) for r, e in phi.roots()]
            else:
                _, facs = phi.factor()
            facs = sorted(facs, key=lambda fe: (fe[0].degree(), _poly_key(L, fe[0])))
            for psi, e in facs:
                s = psi.degree()
                if lim is not None and s > lim:
                    continue
                if s == 1:
                    L2, emb = L, None
                    cs = psi.coeffs()
                    t0 = -cs[0] / cs[1]
                else:
                    L2 = GF(p, L.k * s)
                    emb = canonical_embedding(L, L2)
                    rts = [r for r, _ in emb.poly(psi).roots()]
                    t0 = min(rts, key=lambda z: list(reversed(L2.coords(z))))
                s0e = emb(s0) if emb else s0
                g2 = (emb(gimg) if emb else gimg) if gimg is not None else None
                pkey = (s, tuple(L2.coords(t0)))
                if e == 1:
                    out.append(Place(self, k * s, L2, xc, "f", s0e, t0, None, 1,
                                     fkey + (pkey, -1), g2))
                else:
                    loc = self._local_poly(self.F, xc, "f", L2, s0e, t0)
                    out.extend(self._branch_places(loc, L2, k * s, xc, "f", s0e, t0,
                                                   fkey + (pkey,), g2, maxdeg))
        if phi.degree() < self.b:
            loc = self._local_poly(self.F, xc, "i", L, s0, L.zero)
            out.extend(self._branch_places(loc, L, k, xc, "i", s0, L.zero,
                                           fkey + (("yinf",),), gimg, maxdeg))
        return out

    def _local_poly(self, P: Poly, xc, yc, L, s0, t0):
        chart = {}
        for (i, j), c in P.items():
            chart[(self.a - i if xc == "i" else i, self.b - j if yc == "i" else j)] = L(c)
        return translate(chart, L, s0, t0)

    def _branch_places(self, loc, L, deg0, xc, yc, s0, t0, key0, gimg, maxdeg):
        out = []
        r = multiplicity(loc)
        brs = branches(loc, L)
        for idx, br in enumerate(brs):
            deg = deg0 * br.ext
            if maxdeg is not None and deg > maxdeg:
                continue
            emb = br.root_emb
            s0e = emb(s0) if emb else s0
            t0e = emb(t0) if emb else t0
            g2 = (emb(gimg) if emb else gimg) if gimg is not None else None
            out.append(Place(self, deg, br.field, xc, yc, s0e, t0e, br, r, key0 + (idx,), g2))
        return out

    def _smooth_newton(self, P: Place, N: int):
        """T(t) for a smooth place with uniformizer S - s0 (chart y finite)."""
        L = P.field
        cols = self._cols(self.F, P.xc, self.a)
        lin = L.poly([P.s0, L.one])
        cs = [L.poly(c).compose(lin).truncate(N) if c else L.poly([]) for c in cols]
        dcs = [cs[j] * j for j in range(1, len(cs))]
        T = L.poly([P.t0])
        n = 1
        while n < N:
            n = min(2 * n, N)
            val = _horner_poly(cs, T, n)
            der = _horner_poly(dcs, T, n)
            T = T - val.mul_low(der.inverse_series_trunc(n), n)
        return T.truncate(N)

    # -- place tables --------------------------------------------------------
    def places_of_degree(self, k: int, base_k: Optional[int] = None) -> List[Place]:
        base_k = self.f if base_k is None else base_k
        return [P for P in self.places_up_to(k, base_k) if P.deg == k]

    def places_up_to(self, k: int, base_k: Optional[int] = None) -> List[Place]:
        """All places of degree <= k over GF(p^base_k) (default: the residue field F_q)."""
        base_k = self.f if base_k is None else base_k
        key = (base_k, k)
        if key in self._places:
            return self._places[key]
        for (bk, kk), pl in self._places.items():
            if bk == base_k and kk > k:
                return [P for P in pl if P.deg <= k]
        out = []
        B = self._base(base_k)
        out.extend(self.fibre(1, B, None, base_k, maxdeg=k))
        for j in range(1, k + 1):
            for (jj, L, x0) in self.fibres_of_degree(j, base_k):
                out.extend(self.fibre(jj, L, x0, base_k, maxdeg=k))
        out.sort()
        self._places[key] = out
        return out

    def place_counts(self, k: int, base_k: Optional[int] = None) -> List[int]:
        pl = self.places_up_to(k, base_k)
        counts = [0] * (k + 1)
        for P in pl:
            counts[P.deg] += 1
        return counts[1:]

    def zeta_counts(self, kmax: int, check: bool = True) -> List[int]:
        """N_1..N_kmax over F_q from the place table."""
        counts = self.place_counts(kmax)
        N = []
        for k in range(1, kmax + 1):
            N.append(sum(j * counts[j - 1] for j in range(1, k + 1) if k % j == 0))
        if check:
            g = self.genus()
            for k, Nk in enumerate(N, start=1):
                bound = 2 * g * math.isqrt(self.q ** k) + 2 * g
                if abs(Nk - (self.q ** k + 1)) > bound or (Nk - self.q ** k - 1) ** 2 > 4 * g * g * self.q ** k:
                    raise WeilViolation(f"N_{k} = {Nk} violates the Weil bound for genus {g}, q = {self.q}")
        return N

    def special_fibres(self, base_k: int = 1):
        """Fibres (over GF(p^base_k)) containing singular points, y-infinite points, and x = infinity."""
        out = [(1, self._base(base_k), None)]
        for pi in self.special_x_polys():
            out.extend(self.fibre_points_of_poly(pi, base_k))
        return out

    def singular_places(self, base_k: int = 1) -> List[Place]:
        out = []
        for (k, L, x0) in self.special_fibres(base_k):
            out.extend(P for P in self.fibre(k, L, x0, base_k) if P.branch is not None and P.mult > 1)
        return out

    def fibre_of_place(self, P: Place):
        return P.key[:2] if P.key[1] == "inf" else P.key[:3]

    # -- evaluation of polynomials at places ----------------------------------
    def _series_of(self, P: Place, G: Poly, N: int, A: Optional[int] = None,
                   B: Optional[int] = None) -> LSeries:
        """G(x(t), y(t)) as a Laurent series; the chart part is known modulo t^N."""
        L = P.field
        if A is None:
            A = max((e[0] for e in G), default=0)
        if B is None:
            B = max((e[1] for e in G), default=0)
        S, T = P.chart_series(N)
        cols: Dict[int, Dict[int, int]] = {}
        for (i, j), c in G.items():
            jj = B - j if P.yc == "i" else j
            ii = A - i if P.xc == "i" else i
            cols.setdefault(jj, {})[ii] = c
        modN = None
        acc = L.poly([])
        for jj in range(max(cols, default=0), -1, -1):
            if not acc.is_zero():
                acc = acc.mul_low(T, N)
            d = cols.get(jj)
            if d:
                top = max(d)
                cp = L.poly([d.get(i, 0) for i in range(top + 1)])
                if P.branch is None:
                    v = cp.compose(L.poly([P.s0, L.one])).truncate(N)
                elif top == 0:
                    v = cp
                else:
                    if modN is None:
                        modN = L.poly([0] * N + [1])
                    v = cp.compose_mod(S, modN) if S.degree() > 0 else L.poly([cp(S.constant_coefficient() if not S.is_zero() else L.zero)])
                acc = acc + v
        out = LSeries(L, 0, acc, N)
        if P.xc == "i" and A:
            out = out * LSeries(L, 0, S, N) ** (-A) if not S.is_zero() else out
        if P.yc == "i" and B:
            out = out * LSeries(L, 0, T, N) ** (-B)
        return out

    def valuation(self, P: Place, G: Poly, N0: int = 16, cap: int = 1 << 14) -> int:
        if not G:
            raise ValueError("valuation of zero")
        N = N0
        while N <= cap:
            s = self._series_of(P, G, N)
            if not s.is_zero():
                return s.val
            N *= 2
        raise PrecisionLoss("function appears to vanish on the curve")

    def _x_series(self, P: Place, N: int) -> LSeries:
        S, _ = P.chart_series(N)
        s = LSeries(P.field, 0, S, N)
        return s if P.xc == "f" else s.inverse()

    def _y_series(self, P: Place, N: int) -> LSeries:
        _, T = P.chart_series(N)
        s = LSeries(P.field, 0, T, N)
        return s if P.yc == "f" else s.inverse()

    def omega0(self, P: Place, N: int) -> LSeries:
        """dx/F_y at P as a series in the local parameter."""
        S, _ = P.chart_series(N + 1)
        L = P.field
        dS = LSeries(L, 0, S.derivative(), N)
        if P.xc == "f":
            dx = dS
        else:
            s = LSeries(L, 0, S.truncate(N), N)
            dx = -(dS * s.inverse() ** 2)
        Fy = self._series_of(P, self.Fy, N, self.a, self.b - 1)
        if Fy.is_zero():
            raise PrecisionLoss("F_y vanishes to the working precision")
        return dx / Fy

    def pole_orders(self, P: Place) -> Tuple[int, int]:
        """(order of pole of x, order of pole of y) at P."""
        px = 0
        py = 0
        if P.xc == "i":
            px = -self._x_val(P)
        if P.yc == "i":
            py = -self._y_val(P)
        return px, py

    def _x_val(self, P):
        N = 8
        while True:
            s = self._x_series(P, N)
            if not s.is_zero():
                return s.val
            N *= 2

    def _y_val(self, P):
        N = 8
        while True:
            s = self._y_series(P, N)
            if not s.is_zero():
                return s.val
            N *= 2

    def conductor(self, P: Place) -> int:
        """c_P = (a-2) pole_x + (b-2) pole_y - v_P(dx/F_y); zero at smooth points."""
        if "cond" in P._cache:
            return P._cache["cond"]
        N = 16
        while True:
            try:
                w = self.omega0(P, N)
                if not w.is_zero():
                    break
            except PrecisionLoss:
                pass
            N *= 2
            if N > 1 << 15:
                raise PrecisionLoss("cannot determine v(dx/F_y)")
        px, py = self.pole_orders(P)
        c = (self.a - 2) * px + (self.b - 2) * py - w.val
        P._cache["cond"] = c
        return c

    # -- linear conditions ----------------------------------------------------
    def _condition_rows(self, P: Place, monos: Sequence[Tuple[int, int]], factor_fn, thresh: int,
                        A: int, B: int):
        """F_p rows forcing v_P(sum c_m mono_m * factor) >= thresh for F_p coefficients c_m."""
        L = P.field
        N = max(16, thresh + 8)
        while True:
            try:
                fac = factor_fn(N)
            except PrecisionLoss:
                N *= 2
                if N > 1 << 15:
                    raise
                continue
            xs = self._x_series(P, N)
            ys = self._y_series(P, N)
            xp = [LSeries.const(L, L.one, N)]
            for _ in range(A):
                xp.append(xp[-1] * xs)
            yp = [LSeries.const(L, L.one, N)]
            for _ in range(B):
                yp.append(yp[-1] * ys)
            sers = [xp[i] * yp[j] * fac for (i, j) in monos]
            low = min(s.val for s in sers)
            if all(s.abs_prec >= thresh for s in sers):
                break
            N *= 2
            if N > 1 << 15:
                raise PrecisionLoss("conditions need too much precision")
        rows = []
        K = L.k
        for e in range(low, thresh):
            block = [[0] * len(monos) for _ in range(K)]
            nz = False
            for col, s in enumerate(sers):
                c = s.coeff(e)
                if not c.is_zero():
                    nz = True
                    for r, v in enumerate(L.coords(c)):
                        block[r][col] = v
            if nz:
                rows.extend(block)
        return rows

    # -- differentials and genus ------------------------------------------------
    def holomorphic_basis(self) -> List[Poly]:
        """F_p-basis of h with h dx/F_y holomorphic, deg h <= (a-2, b-2)."""
        if self._holo is not None:
            return self._holo
        if self.a < 2 or self.b < 2:
            self._holo = []
            return self._holo
        A, B = self.a - 2, self.b - 2
        monos = [(i, j) for j in range(B + 1) for i in range(A + 1)]
        rows = []
        for P in self.singular_places(1):
            rows.extend(self._condition_rows(P, monos, lambda N, P=P: self.omega0(P, N), 0, A, B))
        basis = _nullspace(rows, len(monos), self.p)
        self._holo = [{monos[i]: v for i, v in enumerate(vec) if v} for vec in basis]
        return self._holo

    def genus(self) -> int:
        return len(self.holomorphic_basis())

    def arithmetic_genus(self) -> int:
        return (self.a - 1) * (self.b - 1)

    # -- fast dimension counts through differentials ----------------------------
    def differential_jets(self, P: Place, m: int):
        """Rows over F_p: for each e < m, the coordinates of the t^e coefficients of the basis
        differentials at P, columns indexed by (basis element, F_q-coordinate)."""
        cache = P._cache.setdefault("jets", {})
        if cache and max(cache) >= m:
            M = max(cache)
            return cache[M][:m]
        H = self.holomorphic_basis()
        g = len(H)
        L = P.field
        f = self.f
        N = m + 2
        while True:
            try:
                w = self.omega0(P, N)
                sers = [self._series_of(P, h, N, self.a - 2, self.b - 2) * w for h in H]
                if all(s.abs_prec >= m for s in sers):
                    break
            except PrecisionLoss:
                pass
            N *= 2
            if N > 1 << 15:
                raise PrecisionLoss("differential jets")
        gp = [L.one]
        for _ in range(f - 1):
            gp.append(gp[-1] * P.gimg)
        out = []
        for e in range(m):
            block = [[0] * (g * f) for _ in range(L.k)]
            for i, s in enumerate(sers):
                c = s.coeff(e)
                if c.is_zero():
                    continue
                for l in range(f):
                    for r, v in enumerate(L.coords(c * gp[l]) if l else L.coords(c)):
                        block[r][i * f + l] = v
            out.append(block)
        cache[m] = out
        return out

    def ell_effective(self, D: Divisor) -> int:
        """dim L(D) over F_q for effective D, as deg D + 1 - rank of the jet matrix."""
        rows = []
        for P, k in D.items():
            if k < 0:
                raise ValueError("ell_effective needs an effective divisor")
            for block in self.differential_jets(P, k):
                rows.extend(block)
        r = _rank(rows, self.genus() * self.f, self.p)
        return D.degree() + 1 - r // self.f

    # -- Riemann-Roch --------------------------------------------------------
    def riemann_roch(self, D: Divisor) -> "RRBasis":
        """Basis of L(D) (over F_p; needs f = 1 or a divisor of F_p-places)."""
        if self.f != 1:
            raise NotImplementedError("explicit Riemann-Roch spaces are implemented over the prime field")
        p = self.p
        a, b = self.a, self.b
        fibres = {}
        for fib in self.special_fibres(1):
            fibres[_fkey(fib)] = fib
        for P in D:
            fib = self._fibre_of(P)
            fibres[_fkey(fib)] = fib
        table = []
        for key, (k, L, x0) in sorted(fibres.items(), key=lambda kv: repr(kv[0])):
            table.append(((k, L, x0), self.fibre(k, L, x0, 1)))
        beta = b - 1
        # denominator H = prod pi_s^{k_s}
        hfac = []
        for (k, L, x0), places in table:
            if x0 is None:
                continue
            pi = self._min_poly(L, x0)
            need = 0
            for P in places:
                pi_val = self.valuation(P, _xpoly_to_poly(pi))
                _, py = self.pole_orders(P)
                req = max(D.get(P, 0), 0) + self.conductor(P) - beta * py
                if req > 0:
                    need = max(need, -(-req // pi_val))
            if need:
                hfac.append((pi, need))
        H = flint.nmod_poly([1], p)
        for pi, e in hfac:
            H *= pi ** e
        degH = H.degree()
        alpha = max(degH, a)
        for (k, L, x0), places in table:
            if x0 is not None:
                continue
            for P in places:
                px, py = self.pole_orders(P)
                if px == 0:
                    continue
                req = max(D.get(P, 0), 0) + self.conductor(P) - beta * py
                alpha = max(alpha, degH + (-(-req // px)))
        Hd = _xpoly_to_poly(H)
        monos = [(i, j) for j in range(b) for i in range(alpha + 1)]
        rows = []
        for (k, L, x0), places in table:
            for P in places:
                t = self.valuation(P, Hd) - D.get(P, 0)
                rows.extend(self._condition_rows(P, monos, lambda N, L=P.field: LSeries.const(L, L.one, N),
                                                 t, alpha, b - 1))
        basis = _nullspace(rows, len(monos), p)
        funcs = []
        for vec in basis:
            G = {monos[i]: v for i, v in enumerate(vec) if v}
            funcs.append(CurveFunction(self, G, Hd))
        return RRBasis(D, funcs)

    def _min_poly(self, L, x0) -> flint.nmod_poly:
        """Minimal polynomial over F_p of x0."""
        conj = [x0]
        y = x0.frobenius(1)
        while y != x0:
            conj.append(y)
            y = y.frobenius(1)
        P = L.poly([L.one])
        for c in conj:
            P = P * L.poly([-c, L.one])
        return flint.nmod_poly([int(L.coords(c)[0]) for c in P.coeffs()], self.p)

    def _fibre_of(self, P: Place):
        if P.xc == "i":
            return (1, self._base(P.key[0]), None)
        base_k = P.key[0]
        k = P.key[1]
        L = GF(self.p, base_k * k)
        return (k, L, L.from_coords(P.key[2]))

    def places_above_poly(self, h: flint.nmod_poly, base_k: int = 1, include_infinity: bool = True):
        """All places over the roots of h (and x = infinity)."""
        out = []
        if include_infinity:
            out.extend(self.fibre(1, self._base(base_k), None, base_k))
        if h.degree() > 0:
            _, facs = h.factor()
            for pi, _ in facs:
                for (k, L, x0) in self.fibre_points_of_poly(pi, base_k):
                    out.extend(self.fibre(k, L, x0, base_k))
        return out

    def norm_in_x(self, G: Poly) -> flint.nmod_poly:
        """Res_y(F, G) as a polynomial in x (G constant in y gives G^b)."""
        Gn = self.ctx.from_dict(G)
        if max(e[1] for e in G) == 0:
            return _to_xpoly(Gn, self.p) ** self.b
        return _to_xpoly(self.Fn.resultant(Gn, "y"), self.p)

    def divisor_of(self, fn: CurveFunction) -> Divisor:
        """div(fn) over F_p-places (or base field places when f = 1)."""
        cand = self._candidate_places(fn.num) + self._candidate_places(fn.den)
        D = Divisor()
        seen = set()
        for P in cand:
            if P in seen:
                continue
            seen.add(P)
            v = fn.valuation(P)
            if v:
                D.add(P, v)
        return D

    def _candidate_places(self, G: Poly):
        h = self.norm_in_x(G) * self._xpoly(self._cols(self.F, "f", self.a)[self.b])
        return self.places_above_poly(h, 1, True)

    def function_degree(self, fn: CurveFunction, route: str = "poles") -> int:
        """[F_q(C) : F_q(fn)] by the pole divisor ('poles') or by a resultant ('resultant')."""
        if route == "resultant":
            return self._degree_resultant(fn)
        D = self.divisor_of(fn)
        poles = sum(-k * P.deg for P, k in D.items() if k < 0)
        zeros = sum(k * P.deg for P, k in D.items() if k > 0)
        if poles != zeros:
            raise ArithmeticError(f"zero degree {zeros} differs from pole degree {poles}")
        if poles == 0:
            raise ConstantFunction("the function is constant on the curve")
        return poles

    def _degree_resultant(self, fn: CurveFunction) -> int:
        ctx3 = flint.nmod_mpoly_ctx.get(("x", "y", "T"), modulus=self.p)
        F3 = ctx3.from_dict({(i, j, 0): c for (i, j), c in self.F.items()})
        A = ctx3.from_dict({(i, j, 0): c for (i, j), c in fn.num.items()}) if fn.num else ctx3.from_dict({})
        Bd = ctx3.from_dict({(i, j, 0): c for (i, j), c in fn.den.items()})
        T = ctx3.gens()[2]
        R = F3.resultant(A - T * Bd, "y")
        if R.is_zero():
            raise ConstantFunction("the function is constant on the curve")
        # content with respect to T, coefficients in F_p[x]
        byT: Dict[int, Dict[int, int]] = {}
        for (i, j, t), c in R.to_dict().items():
            byT.setdefault(t, {})[i] = int(c)
        cs = []
        for t, d in byT.items():
            cs.append(flint.nmod_poly([d.get(i, 0) for i in range(max(d) + 1)], self.p))
        g = cs[0]
        for c in cs[1:]:
            g = g.gcd(c)
        if max(byT) == 0:
            raise ConstantFunction("the function is constant on the curve")
        return max(c.degree() for c in cs) - g.degree()

    # -- certificates of absolute irreducibility ------------------------------
    def absolute_irreducibility_certificate(self, kmax: int = 4) -> dict:
        """F_p-irreducible plus smooth points of coprime degrees over F_p."""
        if not self.is_irreducible_fp():
            raise NotAbsolutelyIrreducible("reducible over F_p")
        found = []
        for k in range(1, kmax + 1):
            for P in self.places_of_degree(k, 1):
                if P.branch is None:
                    found.append(P)
                    break
            if found and math.gcd(*[Q.deg for Q in found]) == 1:
                return {"irreducible_over_Fp": True, "smooth_points": [Q.describe() for Q in found]}
        raise NotAbsolutelyIrreducible("no smooth points of coprime degrees found")


class RRBasis:
    def __init__(self, D: Divisor, functions: List[CurveFunction]):
        self.D = D
        self.functions = functions

    @property
    def dim(self) -> int:
        return len(self.functions)

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)


# ---------------------------------------------------------------------------
# helpers

def _fkey(fib):
    k, L, x0 = fib
    return ("inf",) if x0 is None else (k, tuple(L.coords(x0)))


def _poly_key(L, P):
    return [tuple(reversed(L.coords(c))) for c in reversed(P.coeffs())]


def _deriv(P: Poly, k: int, p: int) -> Poly:
    out = {}
    for e, c in P.items():
        if e[k]:
            v = c * e[k] % p
            if v:
                e2 = (e[0] - 1, e[1]) if k == 0 else (e[0], e[1] - 1)
                out[e2] = v
    return out


def _to_xpoly(P, p) -> flint.nmod_poly:
    d = {}
    for e, c in P.to_dict().items():
        if e[1]:
            raise ValueError("expected a polynomial in x only")
        d[e[0]] = int(c)
    if not d:
        return flint.nmod_poly([], p)
    return flint.nmod_poly([d.get(i, 0) for i in range(max(d) + 1)], p)


def _xpoly_to_poly(h: flint.nmod_poly) -> Poly:
    return {(i, 0): int(c) for i, c in enumerate(h.coeffs()) if int(c)}


def _horner_poly(cs, T, n):
    acc = None
    for c in reversed(cs):
        acc = c.truncate(n) if acc is None else acc.mul_low(T, n) + c.truncate(n)
    return acc


def _nullspace(rows: List[List[int]], ncols: int, p: int) -> List[List[int]]:
    if ncols == 0:
        return []
    if not rows:
        return [[1 if i == j else 0 for i in range(ncols)] for j in range(ncols)]
    M = flint.nmod_mat(len(rows), ncols, [v for r in rows for v in r], p)
    X, nullity = M.nullspace()
    out = []
    for j in range(nullity):
        out.append([int(X[i, j]) for i in range(ncols)])
    return _reduced(out, p)


def _reduced(vecs, p):
    """Reduced row echelon form of a list of vectors (a canonical basis)."""
    if not vecs:
        return []
    M = flint.nmod_mat(len(vecs), len(vecs[0]), [v for r in vecs for v in r], p)
    R, rank = M.rref()
    return [[int(R[i, j]) for j in range(len(vecs[0]))] for i in range(rank)]


def _rank(rows, ncols, p) -> int:
    if not rows or ncols == 0:
        return 0
    M = flint.nmod_mat(len(rows), ncols, [v for r in rows for v in r], p)
    return M.rank()
