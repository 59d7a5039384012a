"""Exact coefficient rings: the rationals and small number fields.

Rationals are carried as ``flint.fmpq`` inside the rings and exchanged with
callers as ``fractions.Fraction`` where a plain Python value is wanted.
Number field elements are residues of ``flint.fmpq_poly`` modulo a monic
irreducible defining polynomial.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import flint


class AlgebraError(ValueError):
    pass


def to_fmpq(c) -> flint.fmpq:
    if isinstance(c, flint.fmpq):
        return c
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    if isinstance(c, (int, flint.fmpz)):
        return flint.fmpq(int(c))
    if isinstance(c, str):
        return to_fmpq(Fraction(c))
    raise TypeError(f"cannot coerce {c!r} to a rational")


def fraction(c: flint.fmpq) -> Fraction:
    return Fraction(int(c.p), int(c.q))


class RationalField:
    """The field Q.  Elements are ``flint.fmpq``."""

    degree = 1
    name = "QQ"
    gen_name = None

    def __call__(self, c):
        if isinstance(c, NFElem):
            if c.field.degree == 1:
                return c.value[0] if c.value.degree() >= 0 else flint.fmpq(0)
            raise AlgebraError("number field element is not rational")
        return to_fmpq(c)

    zero = property(lambda self: flint.fmpq(0))
    one = property(lambda self: flint.fmpq(1))

    def is_zero(self, a) -> bool:
        return a == 0

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def rational_coords(self, a) -> list:
        return [a]

    def from_coords(self, coords):
        return to_fmpq(coords[0])

    def fmt(self, a) -> str:
        return str(fraction(a))

    def conjugates_count(self) -> int:
        return 1

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def to_json(self):
        return {"field": "QQ"}


QQ = RationalField()


class NumField:
    """Q[z]/(f) for a monic irreducible f of small degree."""

    def __init__(self, coeffs: Sequence, gen_name: str = "z", tag=None):
        poly = flint.fmpq_poly([to_fmpq(c) for c in coeffs])
        if poly.degree() < 1:
            raise AlgebraError("defining polynomial must have positive degree")
        if poly.leading_coefficient() != 1:
            raise AlgebraError("defining polynomial must be monic")
        _, facs = poly.factor()
        if len(facs) != 1 or facs[0][1] != 1:
            raise AlgebraError(f"defining polynomial {poly} is reducible over Q")
        self.poly = poly
        self.degree = poly.degree()
        self.gen_name = gen_name
        self.tag = tag
        self.name = f"Q({gen_name})"

    def __repr__(self):
        return f"NumField({self.poly.str(var=self.gen_name)})"

    def __eq__(self, other):
        return isinstance(other, NumField) and self.poly == other.poly and self.gen_name == other.gen_name

    def __hash__(self):
        return hash((str(self.poly), self.gen_name))

    def __call__(self, c) -> "NFElem":
        if isinstance(c, NFElem):
            if c.field != self:
                raise AlgebraError("element of a different field")
            return c
        if isinstance(c, flint.fmpq_poly):
            return NFElem(self, c % self.poly)
        return NFElem(self, flint.fmpq_poly([to_fmpq(c)]))

    @property
    def zero(self):
        return NFElem(self, flint.fmpq_poly([]))

    @property
    def one(self):
        return NFElem(self, flint.fmpq_poly([1]))

    def gen(self) -> "NFElem":
        return NFElem(self, flint.fmpq_poly([0, 1]) % self.poly)

    def is_zero(self, a) -> bool:
        return a.value.is_zero()

    def inv(self, a):
        return a.inverse()

    def rational_coords(self, a) -> list:
        cs = a.value.coeffs()
        return [flint.fmpq(cs[i]) if i < len(cs) else flint.fmpq(0) for i in range(self.degree)]

    def from_coords(self, coords):
        return NFElem(self, flint.fmpq_poly([to_fmpq(c) for c in coords]))

    def fmt(self, a) -> str:
        return a.fmt()

    def to_json(self):
        return {"field": "numfield", "poly": [str(fraction(c)) for c in self.poly.coeffs()],
                "gen": self.gen_name, "tag": self.tag}


class NFElem:
    __slots__ = ("field", "value")

    def __init__(self, field: NumField, value: flint.fmpq_poly):
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, NFElem):
            return other.value
        return flint.fmpq_poly([to_fmpq(other)])

    def __add__(self, other):
        if not _scalar_like(other):
            return NotImplemented
        return NFElem(self.field, self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        if not _scalar_like(other):
            return NotImplemented
        return NFElem(self.field, self.value - self._coerce(other))

    def __rsub__(self, other):
        return NFElem(self.field, self._coerce(other) - self.value)

    def __neg__(self):
        return NFElem(self.field, -self.value)

    def __mul__(self, other):
        if not _scalar_like(other):
            return NotImplemented
        return NFElem(self.field, (self.value * self._coerce(other)) % self.field.poly)

    __rmul__ = __mul__

    def inverse(self) -> "NFElem":
        if self.value.is_zero():
            raise ZeroDivisionError("inverse of zero")
        g, s, _ = self.value.xgcd(self.field.poly)
        # g is a nonzero constant since the modulus is irreducible
        return NFElem(self.field, (s / g.coeffs()[0]) % self.field.poly)

    def __truediv__(self, other):
        if isinstance(other, NFElem):
            return self * other.inverse()
        return NFElem(self.field, self.value / to_fmpq(other))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, NFElem):
            return self.field == other.field and self.value == other.value
        try:
            return self.value == self._coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(str(self.value))

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def is_rational(self) -> bool:
        return self.value.degree() <= 0

    def norm(self) -> flint.fmpq:
        if self.value.is_zero():
            return flint.fmpq(0)
        return self.field.poly.resultant(self.value)

    def minpoly(self) -> flint.fmpq_poly:
        """Minimal polynomial over Q via the characteristic polynomial."""
        # charpoly = Res_z(f(z), x - a(z)); take the irreducible factor
        n = self.field.degree
        pts = []
        # evaluate Res_z(f, c - a(z)) at n+1 points and interpolate
        for c in range(n + 1):
            pts.append((c, self.field.poly.resultant(flint.fmpq_poly([c]) - self.value)))
        char = _interpolate_q(pts)
        _, facs = char.factor()
        for fac, _ in facs:
            if _eval_in_field(fac, self).is_zero():
                return fac / fac.leading_coefficient()
        raise AlgebraError("minimal polynomial not found")

    def fmt(self) -> str:
        if self.value.is_zero():
            return "0"
        terms = []
        cs = self.value.coeffs()
        for i in range(len(cs) - 1, -1, -1):
            c = fraction(flint.fmpq(cs[i]))
            if c == 0:
                continue
            mono = "" if i == 0 else (self.field.gen_name if i == 1 else f"{self.field.gen_name}^{i}")
            if not mono:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        s = " + ".join(terms).replace("+ -", "- ")
        return s

    def __repr__(self):
        return f"NFElem({self.fmt()})"


def _scalar_like(x) -> bool:
    return isinstance(x, (NFElem, int, Fraction, flint.fmpq, flint.fmpz))


def _eval_in_field(poly: flint.fmpq_poly, a: NFElem) -> NFElem:
    acc = a.field.zero
    for c in reversed(poly.coeffs()):
        acc = acc * a + flint.fmpq(c)
    return acc


def _interpolate_q(points) -> flint.fmpq_poly:
    result = flint.fmpq_poly([])
    for i, (xi, yi) in enumerate(points):
        term = flint.fmpq_poly([yi])
        for j, (xj, _) in enumerate(points):
            if j != i:
                term = term * flint.fmpq_poly([-xj, 1]) / (xi - xj)
        result += term
    return result


def cyclotomic_poly(m: int) -> flint.fmpq_poly:
    return flint.fmpq_poly(flint.fmpz_poly.cyclotomic(m))


def euler_phi(m: int) -> int:
    result, k, p = m, m, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


@lru_cache(maxsize=None)
def cyclotomic_field(m: int):
    """Q(zeta_m) for m in {1,2,3,4,6}; QQ when phi(m) = 1."""
    if m not in (1, 2, 3, 4, 6):
        raise AlgebraError("only the cyclotomic fields of degree <= 2 are supported")
    if euler_phi(m) == 1:
        return QQ
    return NumField([int(c) for c in cyclotomic_poly(m).coeffs()], gen_name=f"zeta{m}",
                    tag=f"cyclotomic({m})")


def zeta(m: int):
    K = cyclotomic_field(m)
    if K is QQ:
        return flint.fmpq(1 if m == 1 else -1)
    return K.gen()


def number_field(coeffs: Iterable, gen_name: str = "a") -> NumField:
    return NumField(list(coeffs), gen_name=gen_name)
