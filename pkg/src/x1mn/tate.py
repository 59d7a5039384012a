"""Weierstrass and Tate normal form arithmetic over exact coefficient rings.

Coefficients may be any field-like Python values supporting + - * / and
comparison with 0: flint ``fmpq``, ``fq_default``, ``nmod``, number field
elements, or ``RatFunc`` for the symbolic (q,t) families.  Points are pairs
(x, y); the point at infinity is ``None``.
"""
from __future__ import annotations

from typing import Optional, Tuple

import flint

from .algebra.ratfunc import RatFunc
from .algebra.rings import NFElem, NumField, QQ
from .algebra.upoly import UPoly, roots_in_field

O = None


class PointAtInfinity(ArithmeticError):
    pass


class NotOnCurve(ValueError):
    pass


class SingularCurve(ValueError):
    pass


class ExceedsCap:
    """Outcome of order_of_point when no order <= cap exists."""

    def __init__(self, cap: int):
        self.cap = cap

    def __repr__(self):
        return f"ExceedsCap({self.cap})"

    def __eq__(self, other):
        return isinstance(other, ExceedsCap) and other.cap == self.cap


def _iszero(a) -> bool:
    if isinstance(a, RatFunc):
        return a.is_zero()
    return a == 0


class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    def __init__(self, a1, a2, a3, a4, a6, check: bool = True):
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        self.zero = a1 - a1
        self.one = self.zero + 1
        if check and _iszero(self.discriminant()):
            raise SingularCurve("discriminant vanishes")

    @property
    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def b_invariants(self):
        a1, a2, a3, a4, a6 = self.ainvs
        b2 = a1 * a1 + 4 * a2
        b4 = 2 * a4 + a1 * a3
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    def discriminant(self):
        b2, b4, b6, b8 = self.b_invariants()
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def equation(self, x, y):
        a1, a2, a3, a4, a6 = self.ainvs
        return y * y + a1 * x * y + a3 * y - (x ** 3 + a2 * x * x + a4 * x + a6)

    def is_on(self, P) -> bool:
        return P is None or _iszero(self.equation(*P))

    def neg(self, P):
        if P is None:
            return None
        x, y = P
        return (x, -y - self.a1 * x - self.a3)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        a1, a2, a3, a4, a6 = self.ainvs
        x1, y1 = P
        x2, y2 = Q
        if _iszero(x1 - x2):
            den = y1 + y2 + a1 * x2 + a3
            if _iszero(den):
                return None
            # doubling (P == Q since x agrees and P != -Q)
            lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) / den
        else:
            lam = (y2 - y1) / (x2 - x1)
        x3 = lam * lam + a1 * lam - a2 - x1 - x2
        y3 = lam * (x1 - x3) - y1 - a1 * x3 - a3
        return (x3, y3)

    def double(self, P):
        return self.add(P, P)

    def mul(self, k: int, P):
        if k < 0:
            return self.mul(-k, self.neg(P))
        result = None
        addend = P
        while k:
            if k & 1:
                result = self.add(result, addend)
            k >>= 1
            if k:
                addend = self.double(addend)
        return result

    def two_division_poly_coeffs(self):
        """Coefficients (low first) of 4x^3 + b2 x^2 + 2 b4 x + b6."""
        b2, b4, b6, _ = self.b_invariants()
        return [b6, 2 * b4, b2, self.zero + 4]

    def __repr__(self):
        return f"WeierstrassCurve{self.ainvs!r}"


class TateCurve(WeierstrassCurve):
    """E(b,c): y^2 + (1-c)xy - by = x^3 - bx^2 with marked point P = (0,0)."""

    def __init__(self, b, c):
        self.b, self.c = b, c
        zero = b - b
        super().__init__(1 - c, -b, -b, zero, zero)
        self.P = (zero, zero)


def tate_from_rs(r, s) -> TateCurve:
    """Tate curve with b = rs(r-1), c = s(r-1)."""
    return TateCurve(r * s * (r - 1), s * (r - 1))


def multiple_x(C: WeierstrassCurve, Q, k: int):
    """x(kQ) by a binary addition chain; PointAtInfinity if kQ = O."""
    if k < 1:
        raise ValueError("k must be positive")
    R = C.mul(k, Q)
    if R is None:
        raise PointAtInfinity(f"{k}Q is the point at infinity")
    return R[0]


def order_of_point(C: WeierstrassCurve, P, cap: int):
    """Least k <= cap with kP = O, else ExceedsCap(cap)."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if not C.is_on(P):
        raise NotOnCurve("point does not satisfy the curve equation")
    R = P
    for k in range(1, cap + 1):
        if R is None:
            return k
        R = C.add(R, P)
    return ExceedsCap(cap)


def two_torsion_count(C: WeierstrassCurve, K=None) -> int:
    """Number of K-rational points of exact order 2 (K = QQ or a NumField)."""
    coeffs = C.two_division_poly_coeffs()
    if K is None:
        K = coeffs[0].field if isinstance(coeffs[0], NFElem) else QQ
    g = UPoly(K, coeffs)
    return len(set(roots_in_field(g)))


def division_x_multiple(C: WeierstrassCurve, x, k: int):
    """x(kQ) as a rational function of x = x(Q) via division polynomials.

    Independent of the chord-tangent chain; ``x`` may be any ring element
    (typically a polynomial variable).  Returns (numerator, denominator).
    """
    b2, b4, b6, b8 = C.b_invariants()
    F4 = 4 * x ** 3 + b2 * x * x + 2 * b4 * x + b6
    f = {0: x - x, 1: x - x + 1, 2: x - x + 1}
    f[3] = 3 * x ** 4 + b2 * x ** 3 + 3 * b4 * x * x + 3 * b6 * x + b8
    f[4] = (2 * x ** 6 + b2 * x ** 5 + 5 * b4 * x ** 4 + 10 * b6 * x ** 3 + 10 * b8 * x * x
            + (b2 * b8 - b4 * b6) * x + (b4 * b8 - b6 * b6))

    def get(n):
        if n in f:
            return f[n]
        m = n // 2
        if n % 2:
            if m % 2 == 0:
                val = F4 * F4 * get(m + 2) * get(m) ** 3 - get(m - 1) * get(m + 1) ** 3
            else:
                val = get(m + 2) * get(m) ** 3 - F4 * F4 * get(m - 1) * get(m + 1) ** 3
        else:
            val = get(m) * (get(m + 2) * get(m - 1) ** 2 - get(m - 2) * get(m + 1) ** 2)
        f[n] = val
        return val

    if k == 1:
        return x, x - x + 1
    fm, fk, fp = get(k - 1), get(k), get(k + 1)
    # x(kQ) = x - psi_{k-1} psi_{k+1} / psi_k^2, psi_n = f_n (n odd), psi_2 f_n (n even)
    if k % 2:
        num = x * fk * fk - F4 * fm * fp
        den = fk * fk
    else:
        num = x * F4 * fk * fk - fm * fp
        den = F4 * fk * fk
    return num, den


# -- the symbolic families in (q, t) --------------------------------------

_QT = flint.fmpz_mpoly_ctx.get(("q", "t"), "lex")


def qt_context():
    return _QT


class FamilyCurve:
    """A family E_m(q,t) with torsion point P_m of order m and marked point Q_m."""

    def __init__(self, m: int, curve: WeierstrassCurve, P, Q, q, t):
        self.m, self.curve, self.P, self.Q = m, curve, P, Q
        self.q, self.t = q, t

    def specialize(self, q0, t0, field=None):
        """Specialize q, t to values; coefficients are coerced via ``field``."""
        def ev(a: RatFunc):
            return a.evaluate([q0, t0], field)
        C = WeierstrassCurve(*[ev(a) for a in self.curve.ainvs])
        return C, tuple(ev(a) for a in self.P), tuple(ev(a) for a in self.Q)

    def __repr__(self):
        return f"FamilyCurve(E{self.m})"


def family_curve(m: int, check: bool = True) -> FamilyCurve:
    q, t = RatFunc.gens(_QT)
    zero = q - q
    if m == 2:
        a2 = t * t - 2 * q * t - 2
        a4 = -(t * t - 1) * (q * t + 1) ** 2
        C = WeierstrassCurve(zero, a2, zero, a4, zero)
        Q = ((t + 1) * (q * t + 1), t * (q * t + 1) * (t + 1))
    elif m == 3:
        a1 = q * t - q + t + 2
        a3 = q * t * t - q * t + t
        C = WeierstrassCurve(a1, zero, a3, zero, zero)
        Q = (-t, t * t)
    elif m == 4:
        k = (q * q - 1) * (t * t - 1) / 16
        C = WeierstrassCurve(zero + 1, k, k, zero, zero)
        Q = ((q + 1) * (t * t - 1) / 8, (q + 1) ** 2 * (t - 1) ** 2 * (t + 1) / 32)
    else:
        raise ValueError("families exist for m in {2, 3, 4}")
    fam = FamilyCurve(m, C, (zero, zero), Q, q, t)
    if check:
        if not C.is_on(Q):
            raise NotOnCurve(f"Q_{m} is not on E_{m}")
        if order_of_point(C, fam.P, m) != m:
            raise ValueError(f"P_{m} does not have order {m}")
    return fam


# -- genus-zero parametrizations of X1(m): b(t), c(t) ----------------------

def kubert_bc(m: int, t):
    """(b, c) with (0,0) of exact order m on E(b,c), for X1(m) of genus zero."""
    if m == 4:
        return t, t - t
    if m == 5:
        return t, t
    if m == 6:
        return t + t * t, t
    if m == 7:
        return t ** 3 - t * t, t * t - t
    if m == 8:
        b = (2 * t - 1) * (t - 1)
        return b, b / t
    if m == 9:
        c = t * t * (t - 1)
        return c * (t * t - t + 1), c
    if m == 10:
        d = t * t / (t - (t - 1) ** 2)
        c = t * d - t
        return c * d, c
    if m == 12:
        m_ = (3 * t - 3 * t * t - 1) / (t - 1)
        f = m_ / (1 - t)
        d = m_ + t
        c = f * d - f
        return c * d, c
    raise ValueError(f"X1({m}) parametrization not available")


# -- the function field of a curve over a rational function field ---------

class CurveFunctionElement:
    """A + B*y in K(x)[y]/(y^2 + (a1 x + a3) y - f(x)), A, B rational functions.

    Used to run the chord-tangent chain on the generic point (x, y) of a
    curve whose coefficients are rational functions.
    """

    __slots__ = ("A", "B", "curve")

    def __init__(self, curve: "CurveData", A, B=None):
        self.curve = curve
        self.A = A
        self.B = B if B is not None else A - A

    def _co(self, other):
        if isinstance(other, CurveFunctionElement):
            return other
        return CurveFunctionElement(self.curve, self.A - self.A + other)

    def __add__(self, other):
        o = self._co(other)
        return CurveFunctionElement(self.curve, self.A + o.A, self.B + o.B)

    __radd__ = __add__

    def __neg__(self):
        return CurveFunctionElement(self.curve, -self.A, -self.B)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        if not isinstance(other, CurveFunctionElement):
            return CurveFunctionElement(self.curve, self.A * other, self.B * other)
        cd = self.curve
        bb = self.B * other.B
        A = self.A * other.A + bb * cd.f
        B = self.A * other.B + other.A * self.B - bb * cd.s
        return CurveFunctionElement(cd, A, B)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = self._co(1)
        for _ in range(e):
            result = result * self
        return result

    def inverse(self):
        cd = self.curve
        conj_A = self.A - self.B * cd.s
        norm = self.A * self.A - self.A * self.B * cd.s - self.B * self.B * cd.f
        inv = 1 / norm
        return CurveFunctionElement(cd, conj_A * inv, -self.B * inv)

    def __truediv__(self, other):
        if not isinstance(other, CurveFunctionElement):
            return CurveFunctionElement(self.curve, self.A / other, self.B / other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._co(other) * self.inverse()

    def is_zero(self) -> bool:
        return _iszero(self.A) and _iszero(self.B)

    def __eq__(self, other):
        return (self - self._co(other)).is_zero()

    __hash__ = None


class CurveData:
    """Coefficient data y^2 + s(x) y = f(x) for CurveFunctionElement."""

    def __init__(self, C: WeierstrassCurve, x):
        self.s = C.a1 * x + C.a3
        self.f = x ** 3 + C.a2 * x * x + C.a4 * x + C.a6
        self.x = x


def chain_x_multiple(C: WeierstrassCurve, x, k: int):
    """x(kQ) for the generic point Q = (x, y) by chord-tangent arithmetic.

    The result lies in K(x); a nonzero y-part raises ArithmeticError.
    """
    cd = CurveData(C, x)
    zero = x - x
    X = CurveFunctionElement(cd, x)
    Y = CurveFunctionElement(cd, zero, zero + 1)
    lifted = WeierstrassCurve(*[CurveFunctionElement(cd, a) for a in C.ainvs], check=False)
    R = lifted.mul(k, (X, Y))
    if R is None:
        raise PointAtInfinity(f"{k}Q is the point at infinity")
    xr = R[0]
    if not _iszero(xr.B):
        raise ArithmeticError("x-coordinate of a multiple is not a function of x alone")
    return xr.A
