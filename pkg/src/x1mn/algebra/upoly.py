"""Dense univariate polynomials over QQ or a NumField, and root finding in K."""
from __future__ import annotations

from typing import List

import flint

from .rings import QQ, NFElem, NumField, RationalField, to_fmpq


class UPoly:
    """Coefficient list, low degree first, over ``ring``; no trailing zeros."""

    __slots__ = ("ring", "c")

    def __init__(self, ring, coeffs):
        self.ring = ring
        cs = [ring(x) for x in coeffs]
        while cs and ring.is_zero(cs[-1]):
            cs.pop()
        self.c = cs

    @classmethod
    def _raw(cls, ring, cs):
        obj = cls.__new__(cls)
        obj.ring = ring
        while cs and ring.is_zero(cs[-1]):
            cs.pop()
        obj.c = cs
        return obj

    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def lc(self):
        return self.c[-1]

    def __add__(self, other):
        other = self._co(other)
        n = max(len(self.c), len(other.c))
        z = self.ring.zero
        cs = [(self.c[i] if i < len(self.c) else z) + (other.c[i] if i < len(other.c) else z) for i in range(n)]
        return UPoly._raw(self.ring, cs)

    __radd__ = __add__

    def __neg__(self):
        return UPoly._raw(self.ring, [-a for a in self.c])

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        other = self._co(other)
        if not self.c or not other.c:
            return UPoly._raw(self.ring, [])
        cs = [self.ring.zero] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if self.ring.is_zero(a):
                continue
            for j, b in enumerate(other.c):
                cs[i + j] = cs[i + j] + a * b
        return UPoly._raw(self.ring, cs)

    __rmul__ = __mul__

    def _co(self, other) -> "UPoly":
        if isinstance(other, UPoly):
            return other
        return UPoly(self.ring, [other])

    def __eq__(self, other):
        other = self._co(other)
        return len(self.c) == len(other.c) and all(a == b for a, b in zip(self.c, other.c))

    def __call__(self, x):
        acc = self.ring.zero
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def divmod(self, other: "UPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = len(r) - len(other.c)
        if dq < 0:
            return UPoly._raw(self.ring, []), self
        inv = self.ring.inv(other.lc())
        q = [self.ring.zero] * (dq + 1)
        for k in range(dq, -1, -1):
            coef = r[k + len(other.c) - 1] * inv
            q[k] = coef
            if self.ring.is_zero(coef):
                continue
            for j, b in enumerate(other.c):
                r[k + j] = r[k + j] - coef * b
        return UPoly._raw(self.ring, q), UPoly._raw(self.ring, r[: len(other.c) - 1])

    def __floordiv__(self, other):
        return self.divmod(self._co(other))[0]

    def __mod__(self, other):
        return self.divmod(self._co(other))[1]

    def monic(self) -> "UPoly":
        if not self.c:
            return self
        inv = self.ring.inv(self.lc())
        return UPoly._raw(self.ring, [a * inv for a in self.c])

    def derivative(self) -> "UPoly":
        return UPoly._raw(self.ring, [self.c[i] * i for i in range(1, len(self.c))])

    def gcd(self, other: "UPoly") -> "UPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def squarefree_part(self) -> "UPoly":
        return self // self.gcd(self.derivative())

    def shift(self, s) -> "UPoly":
        """f(x + s)."""
        result = UPoly._raw(self.ring, [])
        lin = UPoly(self.ring, [s, 1])
        for a in reversed(self.c):
            result = result * lin + a
        return result

    def fmt(self, var: str = "x") -> str:
        if not self.c:
            return "0"
        parts = []
        for i in range(len(self.c) - 1, -1, -1):
            a = self.c[i]
            if self.ring.is_zero(a):
                continue
            s = self.ring.fmt(a)
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if mono:
                parts.append(f"({s})*{mono}" if self.ring is not QQ else f"{s}*{mono}")
            else:
                parts.append(f"({s})" if self.ring is not QQ else s)
        return " + ".join(parts)

    def __repr__(self):
        return f"UPoly({self.fmt()})"


def resultant_field(a: UPoly, b: UPoly):
    """Res(a, b) over a field by the Euclidean remainder sequence."""
    ring = a.ring
    if a.is_zero() or b.is_zero():
        return ring.zero
    res = ring.one
    while True:
        da, db = a.degree(), b.degree()
        if db == 0:
            return res * b.lc() ** da
        r = a % b
        if r.is_zero():
            return ring.zero
        # Res(a,b) = (-1)^{da db} lc(b)^{da - dr} Res(b, r)
        if (da * db) % 2:
            res = -res
        res = res * b.lc() ** (da - r.degree())
        a, b = b, r


def norm_shifted(g: UPoly, s: int) -> flint.fmpq_poly:
    """N(x) = Res_z(f(z), g(x - s z)) with g over K = Q[z]/f."""
    K: NumField = g.ring
    deg_bound = g.degree() * K.degree
    pts = []
    for x0 in range(deg_bound + 1):
        # h(z) = g(x0 - s z) as a polynomial in z over Q, reduced mod f
        arg = flint.fmpq_poly([x0, -s])
        acc = flint.fmpq_poly([])
        for c in reversed(g.c):
            acc = (acc * arg + c.value) % K.poly
        pts.append((x0, K.poly.resultant(acc)))
    from .rings import _interpolate_q

    return _interpolate_q(pts)


def factor_over_field(g: UPoly) -> List[UPoly]:
    """Monic irreducible factors (without multiplicity) of g over its field.

    Over a number field K = Q[z]/f this is Trager's norm method: pick a shift
    s with N_s(x) = Res_z(f(z), g(x - s z)) squarefree; every Q-irreducible
    factor h of N_s gives the K-irreducible factor gcd(g, h(x + s z)).
    """
    if g.is_zero():
        raise ValueError("factorization of the zero polynomial")
    ring = g.ring
    if isinstance(ring, RationalField):
        poly = flint.fmpq_poly(list(g.c))
        if poly.degree() < 1:
            return []
        _, facs = poly.factor()
        out = []
        for h, _ in facs:
            h = h / h.leading_coefficient()
            out.append(UPoly(QQ, [flint.fmpq(c) for c in h.coeffs()]))
        return out
    sqf = g.squarefree_part().monic()
    if sqf.degree() < 1:
        return []
    K: NumField = ring
    zgen = K.gen()
    for s in range(0, 50):
        N = norm_shifted(sqf, s)
        if N.gcd(N.derivative()).degree() > 0:
            continue
        _, facs = N.factor()
        out = []
        for h, _ in facs:
            hk = UPoly(K, [flint.fmpq(c) for c in h.coeffs()]).shift(zgen * s)
            cand = sqf.gcd(hk)
            if cand.degree() >= 1:
                out.append(cand)
        return out
    raise RuntimeError("no squarefree norm found")


def roots_in_field(g: UPoly) -> list:
    """All roots of g lying in its coefficient field, with multiplicity.

    Over Q this is flint's rational root finder; over a number field the
    linear factors from ``factor_over_field`` are the roots.
    """
    if g.is_zero():
        raise ValueError("roots of the zero polynomial")
    ring = g.ring
    if isinstance(ring, RationalField):
        poly = flint.fmpq_poly(list(g.c))
        return [r for r, mult in poly.roots() for _ in range(mult)] if poly.degree() > 0 else []
    roots = [-f.c[0] for f in factor_over_field(g) if f.degree() == 1]
    out = []
    for r in roots:
        lin = UPoly(ring, [-r, 1])
        rem = g
        while True:
            q, m = rem.divmod(lin)
            if not m.is_zero():
                break
            out.append(r)
            rem = q
    return out
