"""Truncated Laurent series over a finite field.

A series is t^val * (c_0 + c_1 t + ... + c_{prec-1} t^{prec-1} + O(t^prec)),
with the coefficients held in an ``fq_default_poly``.  ``prec`` is the
relative precision; ``val`` is only meaningful when c_0 != 0, otherwise
the series is known to vanish to order ``val + prec``.
"""
from __future__ import annotations

from ..algebra.finite import FiniteField


class PrecisionLoss(ArithmeticError):
    """Raised when a series is needed to more terms than are known."""


class LSeries:
    __slots__ = ("F", "val", "poly", "prec")

    def __init__(self, F: FiniteField, val: int, poly, prec: int):
        self.F = F
        self.prec = prec
        poly = poly.truncate(prec) if prec >= 0 else F.poly([])
        # normalize so that the constant coefficient is nonzero when possible
        if not poly.is_zero():
            k = 0
            cs = None
            if poly.constant_coefficient().is_zero():
                cs = poly.coeffs()
                while cs[k].is_zero():
                    k += 1
                poly = poly.right_shift(k)
            val += k
            prec -= k
        self.val = val
        self.poly = poly
        self.prec = prec

    @classmethod
    def from_coeffs(cls, F, coeffs, prec, val=0):
        return cls(F, val, F.poly(list(coeffs)), prec)

    @classmethod
    def const(cls, F, c, prec):
        return cls(F, 0, F.poly([c]), prec)

    @classmethod
    def gen(cls, F, prec):
        """The local parameter t itself."""
        return cls(F, 1, F.poly([F.one]), prec)

    def is_zero(self) -> bool:
        """Known to vanish to full precision (no information beyond)."""
        return self.poly.is_zero()

    @property
    def abs_prec(self) -> int:
        return self.val + self.prec

    def valuation(self) -> int:
        if self.poly.is_zero():
            raise PrecisionLoss("valuation not determined at this precision")
        return self.val

    def __mul__(self, other):
        if not isinstance(other, LSeries):
            return LSeries(self.F, self.val, self.poly * other, self.prec)
        prec = min(self.prec, other.prec)
        if self.poly.is_zero() or other.poly.is_zero():
            # zero to its precision: result known to vanish to order val_a + val_b + prec
            return LSeries(self.F, self.val + other.val, self.F.poly([]), prec)
        return LSeries(self.F, self.val + other.val, self.poly.mul_low(other.poly, prec), prec)

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, LSeries):
            other = LSeries.const(self.F, self.F(other), self.abs_prec)
        a, b = self, other
        if a.val > b.val:
            a, b = b, a
        shift = b.val - a.val
        abs_prec = min(a.abs_prec, b.abs_prec)
        prec = abs_prec - a.val
        if prec <= 0:
            return LSeries(self.F, abs_prec, self.F.poly([]), 0)
        poly = a.poly.truncate(prec) + b.poly.left_shift(shift).truncate(prec)
        return LSeries(self.F, a.val, poly, prec)

    __radd__ = __add__

    def __neg__(self):
        return LSeries(self.F, self.val, -self.poly, self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def inverse(self):
        if self.poly.is_zero():
            raise PrecisionLoss("inverse of a series with unknown valuation")
        inv = self.poly.inverse_series_trunc(self.prec)
        return LSeries(self.F, -self.val, inv, self.prec)

    def __truediv__(self, other):
        if isinstance(other, LSeries):
            return self * other.inverse()
        return self * (self.F.one / other)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return LSeries.const(self.F, self.F.one, self.prec)
        if self.poly.is_zero():
            return LSeries(self.F, self.val * k, self.F.poly([]), self.prec)
        return LSeries(self.F, self.val * k, self.poly.pow_trunc(k, self.prec), self.prec)

    def derivative(self):
        """d/dt, for series of nonnegative valuation or Laurent tails."""
        full = self.poly.left_shift(self.val) if self.val >= 0 else None
        if full is not None:
            d = full.derivative()
            return LSeries(self.F, 0, d, self.abs_prec - 1)
        # negative valuation: differentiate termwise
        cs = self.poly.coeffs()
        out = []
        for i, c in enumerate(cs):
            e = self.val + i
            out.append(c * e)
        return LSeries(self.F, self.val - 1, self.F.poly(out), self.prec)

    def coeff(self, n: int):
        """Coefficient of t^n (absolute exponent)."""
        if n >= self.abs_prec:
            raise PrecisionLoss(f"coefficient {n} beyond precision {self.abs_prec}")
        i = n - self.val
        if i < 0:
            return self.F.zero
        cs = self.poly.coeffs()
        return cs[i] if i < len(cs) else self.F.zero

    def coeffs_below(self, n: int):
        """Coefficients of t^e for e < n, as a dict e -> value (nonzero only)."""
        if n > self.abs_prec:
            raise PrecisionLoss(f"need {n} terms, have {self.abs_prec}")
        out = {}
        cs = self.poly.coeffs()
        for i, c in enumerate(cs):
            e = self.val + i
            if e >= n:
                break
            if not c.is_zero():
                out[e] = c
        return out

    def compose_poly(self, coeffs):
        """p(self) for a polynomial p given by coefficient list (low first)."""
        acc = LSeries.const(self.F, self.F.zero, self.prec if self.val >= 0 else self.prec)
        for c in reversed(coeffs):
            acc = acc * self + c
        return acc

    def __repr__(self):
        return f"LSeries(t^{self.val} * ({self.poly}) + O(t^{self.abs_prec}))"
