"""Rational functions over Q in a few variables, kept in lowest terms.

Numerator and denominator are ``fmpz_mpoly`` values; rational constants are
absorbed by scaling.  Integer gcds are much faster than gcds over Q here.
"""
from __future__ import annotations

import flint

from .rings import to_fmpq


class RatFunc:
    """num/den with fmpz_mpoly parts, gcd-reduced, den with positive leading coefficient."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce: bool = True):
        ctx = num.context()
        if den is None:
            den = ctx.constant(1)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if reduce:
            g = num.gcd(den)
            if not g.is_one() and not g.is_zero():
                num = num / g
                den = den / g
        if den.leading_coefficient() < 0:
            num, den = -num, -den
        self.num = num
        self.den = den

    @classmethod
    def const(cls, ctx, c) -> "RatFunc":
        c = to_fmpq(c)
        return cls(ctx.constant(int(c.p)), ctx.constant(int(c.q)))

    @classmethod
    def gens(cls, ctx):
        return [cls(g) for g in ctx.gens()]

    def context(self):
        return self.num.context()

    def _co(self, other) -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        return RatFunc.const(self.context(), other)

    def __add__(self, other):
        o = self._co(other)
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        g = self.den.gcd(o.den)
        if g.is_one():
            # coprime denominators: the sum is already reduced
            return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den, reduce=False)
        d1, d2 = self.den / g, o.den / g
        num = self.num * d2 + o.num * d1
        h = num.gcd(g)
        if not h.is_one():
            num, g = num / h, g / h
        return RatFunc(num, g * d1 * d2, reduce=False)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        o = self._co(other)
        # cross-cancel before multiplying to limit swell
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n1, d2 = (self.num / g1, o.den / g1) if not (g1.is_one() or g1.is_zero()) else (self.num, o.den)
        n2, d1 = (o.num / g2, self.den / g2) if not (g2.is_one() or g2.is_zero()) else (o.num, self.den)
        return RatFunc(n1 * n2, d1 * d2, reduce=False)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc(self.den, self.num, reduce=False)

    def __truediv__(self, other):
        return self * self._co(other).inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunc(self.num ** e, self.den ** e, reduce=False)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __eq__(self, other):
        o = self._co(other)
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((str(self.num), str(self.den)))

    def evaluate(self, values, field=None):
        """Value at a point; ``field`` coerces integers (default: flint fmpq)."""
        num = eval_poly(self.num, values, field)
        den = eval_poly(self.den, values, field)
        return num / den


def eval_poly(poly, values, field=None):
    """Evaluate an fmpz_mpoly/fmpq_mpoly at values coerced through ``field``."""
    if field is None:
        field = flint.fmpq
    acc = field(0)
    for exps, c in zip(poly.monoms(), poly.coeffs()):
        if isinstance(c, flint.fmpq):
            term = field(int(c.p)) / field(int(c.q))
        else:
            term = field(int(c))
        for v, e in zip(values, exps):
            if e:
                term = term * v ** e
        acc = acc + term
    return acc

    def __repr__(self):
        if self.den.is_one():
            return f"RatFunc({self.num})"
        return f"RatFunc(({self.num})/({self.den}))"
