"""Sparse bivariate polynomials over QQ or a small number field.

The text format is a sum of monomials with explicit ``*`` and ``^``; the
parser accepts any expression built from the two variables, the field
generator, integers, ``+ - * / ^ **`` and parentheses, so displayed models
such as ``(u^2 + u)*v^3 + ...`` can be read verbatim.
"""
from __future__ import annotations

import re
from typing import Dict, Iterable, Optional, Tuple

import flint

from .rings import QQ, AlgebraError, NFElem, NumField, RationalField, fraction, to_fmpq
from .upoly import UPoly, resultant_field, roots_in_field

Exp = Tuple[int, int]


class NotASquare(AlgebraError):
    pass


class DegenerateInput(AlgebraError):
    pass


class BiPoly:
    __slots__ = ("vars", "ring", "terms")

    def __init__(self, terms: Dict[Exp, object], vars=("x", "y"), ring=QQ):
        self.vars = tuple(vars)
        self.ring = ring
        self.terms = {e: ring(c) for e, c in terms.items() if not ring.is_zero(ring(c))}

    @classmethod
    def _raw(cls, terms, vars, ring):
        obj = cls.__new__(cls)
        obj.vars = vars
        obj.ring = ring
        obj.terms = terms
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c, vars=("x", "y"), ring=QQ):
        return cls({(0, 0): c}, vars, ring)

    @classmethod
    def gens(cls, vars=("x", "y"), ring=QQ):
        return cls({(1, 0): 1}, vars, ring), cls({(0, 1): 1}, vars, ring)

    @classmethod
    def from_flint(cls, p, vars=None):
        vars = tuple(vars or p.context().names())
        return cls._raw({tuple(e): flint.fmpq(c) for e, c in p.to_dict().items() if c != 0}, vars, QQ)

    def flint_ctx(self):
        return flint.fmpq_mpoly_ctx.get(self.vars, "lex")

    def to_flint(self):
        if not isinstance(self.ring, RationalField):
            raise AlgebraError("flint conversion needs rational coefficients")
        return self.flint_ctx().from_dict(dict(self.terms))

    # -- basic queries ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(e == (0, 0) for e in self.terms)

    def var_index(self, var) -> int:
        if isinstance(var, int):
            return var
        return self.vars.index(var)

    def degree(self, var=None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(i + j for i, j in self.terms)
        k = self.var_index(var)
        return max(e[k] for e in self.terms)

    def num_terms(self) -> int:
        return len(self.terms)

    def leading(self) -> Tuple[Exp, object]:
        e = max(self.terms)
        return e, self.terms[e]

    def coeff(self, e: Exp):
        return self.terms.get(e, self.ring.zero)

    # -- arithmetic -------------------------------------------------------
    def _co(self, other) -> "BiPoly":
        if isinstance(other, BiPoly):
            if other.vars != self.vars:
                raise AlgebraError("variable mismatch")
            return other
        return BiPoly.const(other, self.vars, self.ring)

    def __add__(self, other):
        other = self._co(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e)
            v = c if v is None else v + c
            if self.ring.is_zero(v):
                t.pop(e, None)
            else:
                t[e] = v
        return BiPoly._raw(t, self.vars, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return BiPoly._raw({e: -c for e, c in self.terms.items()}, self.vars, self.ring)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        other = self._co(other)
        if isinstance(self.ring, RationalField) and len(self.terms) * len(other.terms) > 400:
            return BiPoly.from_flint(self.to_flint() * other.to_flint(), self.vars)
        t: Dict[Exp, object] = {}
        for (a, b), c in self.terms.items():
            for (i, j), d in other.terms.items():
                e = (a + i, b + j)
                v = t.get(e)
                t[e] = c * d if v is None else v + c * d
        return BiPoly._raw({e: c for e, c in t.items() if not self.ring.is_zero(c)}, self.vars, self.ring)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = BiPoly.const(1, self.vars, self.ring)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "BiPoly":
        c = self.ring(c)
        if self.ring.is_zero(c):
            return BiPoly._raw({}, self.vars, self.ring)
        return BiPoly._raw({e: v * c for e, v in self.terms.items()}, self.vars, self.ring)

    def __truediv__(self, c):
        if isinstance(c, BiPoly):
            return self.exact_div(c)
        return self.scale(self.ring.inv(self.ring(c)))

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            other = self._co(other)
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, tuple(sorted((e, str(c)) for e, c in self.terms.items()))))

    def divmod(self, other: "BiPoly"):
        """Division by lex leading terms; exact when the remainder is zero."""
        if isinstance(self.ring, RationalField):
            q, r = divmod(self.to_flint(), other.to_flint())
            return BiPoly.from_flint(q, self.vars), BiPoly.from_flint(r, self.vars)
        le, lc = other.leading()
        inv = self.ring.inv(lc)
        rem = BiPoly._raw(dict(self.terms), self.vars, self.ring)
        quo: Dict[Exp, object] = {}
        out: Dict[Exp, object] = {}
        while rem.terms:
            e, c = rem.leading()
            if e[0] >= le[0] and e[1] >= le[1]:
                m = (e[0] - le[0], e[1] - le[1])
                f = c * inv
                quo[m] = f
                rem = rem - other * BiPoly._raw({m: f}, self.vars, self.ring)
            else:
                out[e] = c
                del rem.terms[e]
        return BiPoly._raw(quo, self.vars, self.ring), BiPoly._raw(out, self.vars, self.ring)

    def exact_div(self, other: "BiPoly") -> "BiPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise AlgebraError("division is not exact")
        return q

    # -- evaluation and substitution -------------------------------------
    def derivative(self, var) -> "BiPoly":
        k = self.var_index(var)
        t = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = (e[0] - 1, e[1]) if k == 0 else (e[0], e[1] - 1)
                t[ne] = c * e[k]
        return BiPoly._raw(t, self.vars, self.ring)

    def __call__(self, a, b):
        acc = self.ring.zero if not isinstance(a, (flint.nmod, )) else 0
        for (i, j), c in self.terms.items():
            acc = acc + c * (a ** i) * (b ** j)
        return acc

    def specialize(self, var, value) -> UPoly:
        """Substitute var = value and return a UPoly in the other variable."""
        k = self.var_index(var)
        value = self.ring(value)
        cs: Dict[int, object] = {}
        for e, c in self.terms.items():
            d = e[1 - k]
            cs[d] = cs.get(d, self.ring.zero) + c * value ** e[k]
        n = max(cs) if cs else -1
        return UPoly(self.ring, [cs.get(i, self.ring.zero) for i in range(n + 1)])

    def as_upoly_in(self, var) -> Dict[int, UPoly]:
        """Map power of ``var`` to the coefficient UPoly in the other variable."""
        k = self.var_index(var)
        groups: Dict[int, Dict[int, object]] = {}
        for e, c in self.terms.items():
            groups.setdefault(e[k], {})[e[1 - k]] = c
        out = {}
        for p, d in groups.items():
            n = max(d)
            out[p] = UPoly(self.ring, [d.get(i, self.ring.zero) for i in range(n + 1)])
        return out

    def swap(self) -> "BiPoly":
        return BiPoly._raw({(j, i): c for (i, j), c in self.terms.items()}, (self.vars[1], self.vars[0]), self.ring)

    def rename(self, vars) -> "BiPoly":
        return BiPoly._raw(dict(self.terms), tuple(vars), self.ring)

    def base_change(self, ring) -> "BiPoly":
        return BiPoly({e: ring(c if not isinstance(c, flint.fmpq) else c) for e, c in self.terms.items()},
                      self.vars, ring)

    # -- normalization ----------------------------------------------------
    def normalized(self) -> "BiPoly":
        """Clear denominators, divide by the integer content and make the
        leading rational part of the lex-leading coefficient positive."""
        if not self.terms:
            return self
        den = 1
        num_gcd = 0
        coords = {e: self.ring.rational_coords(c) for e, c in self.terms.items()}
        for cs in coords.values():
            for a in cs:
                den = den * int(a.q) // _gcd(den, int(a.q))
        for cs in coords.values():
            for a in cs:
                num_gcd = _gcd(num_gcd, int(a.p * den // a.q))
        scale = flint.fmpq(den, num_gcd)
        _, lc = self.leading()
        lead_coords = self.ring.rational_coords(lc)
        top = [a for a in lead_coords if a != 0][-1]
        if top < 0:
            scale = -scale
        return self.scale(scale)

    def content_sign_equal(self, other: "BiPoly") -> bool:
        """Equality up to a nonzero rational scalar (used for golden tests)."""
        return self.normalized() == other.normalized()

    # -- formatting -------------------------------------------------------
    def fmt(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = []
            for k in range(2):
                if e[k] == 1:
                    mono.append(self.vars[k])
                elif e[k] > 1:
                    mono.append(f"{self.vars[k]}^{e[k]}")
            m = "*".join(mono)
            if isinstance(self.ring, RationalField):
                fc = fraction(c)
                neg = fc < 0
                mag = -fc if neg else fc
                if m and mag == 1:
                    body = m
                else:
                    body = str(mag) + ("*" + m if m else "")
            else:
                neg = False
                s = c.fmt()
                body = f"({s})" + ("*" + m if m else "")
            out.append(("- " if neg else "+ ") + body)
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __str__(self):
        return self.fmt()

    def __repr__(self):
        return f"BiPoly({self.fmt()})"

    @classmethod
    def parse(cls, text: str, vars=("x", "y"), ring=QQ) -> "BiPoly":
        return _Parser(text, tuple(vars), ring).parse()


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text, vars, ring):
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise AlgebraError(f"cannot parse polynomial near {text[pos:pos + 20]!r}")
            pos = m.end()
            if m.group(1):
                self.tokens.append(("num", int(m.group(1))))
            elif m.group(2):
                self.tokens.append(("id", m.group(2)))
            elif m.group(3):
                self.tokens.append(("op", "^" if m.group(3) == "**" else m.group(3)))
            # trailing whitespace gives an empty match that is skipped
        self.i = 0
        self.vars = vars
        self.ring = ring

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        v = self.expr()
        if self.i != len(self.tokens):
            raise AlgebraError(f"unexpected token {self.peek()}")
        return v

    def expr(self):
        sign = 1
        if self.peek() == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek() == ("op", "+"):
            self.take()
        v = self.term()
        if sign < 0:
            v = -v
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            v = v + t if op == "+" else v - t
        return v

    def term(self):
        v = self.power()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.power()
            if op == "*":
                v = v * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise AlgebraError("division only by nonzero constants")
                v = v.scale(self.ring.inv(rhs.coeff((0, 0))))
        return v

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, e = self.take()
            if kind != "num":
                raise AlgebraError("exponent must be a nonnegative integer")
            return base ** e
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return BiPoly.const(val, self.vars, self.ring)
        if kind == "id":
            if val == self.vars[0]:
                return BiPoly({(1, 0): 1}, self.vars, self.ring)
            if val == self.vars[1]:
                return BiPoly({(0, 1): 1}, self.vars, self.ring)
            if isinstance(self.ring, NumField) and val == self.ring.gen_name:
                return BiPoly.const(self.ring.gen(), self.vars, self.ring)
            raise AlgebraError(f"unknown symbol {val!r}")
        if (kind, val) == ("op", "("):
            v = self.expr()
            if self.take() != ("op", ")"):
                raise AlgebraError("unbalanced parentheses")
            return v
        if (kind, val) == ("op", "-"):
            return -self.power()
        raise AlgebraError(f"unexpected token {val!r}")


# -- resultants -------------------------------------------------------------

def _check_resultant_input(A: BiPoly, B: BiPoly, var):
    if A.is_zero() or B.is_zero():
        raise DegenerateInput("resultant of a zero polynomial")
    if A.degree(var) < 1 or B.degree(var) < 1:
        raise DegenerateInput("both polynomials must have positive degree in the eliminated variable")


def resultant(A: BiPoly, B: BiPoly, var, method: str = "auto") -> BiPoly:
    """Res_var(A, B) as a BiPoly in the remaining variable.

    ``method`` selects flint's multivariate resultant (rational coefficients
    only) or the evaluation/interpolation route implemented here, which works
    over any supported coefficient field.
    """
    _check_resultant_input(A, B, var)
    k = A.var_index(var)
    if method == "auto":
        method = "flint" if isinstance(A.ring, RationalField) else "interp"
    if method == "flint":
        R = A.to_flint().resultant(B.to_flint(), A.vars[k])
        return BiPoly.from_flint(R, A.vars)
    return _resultant_interp(A, B, k)


def _resultant_interp(A: BiPoly, B: BiPoly, k: int) -> BiPoly:
    ring = A.ring
    other = 1 - k
    da, db = A.degree(k), B.degree(k)
    bound = A.degree(other) * db + B.degree(other) * da
    lcA = {e[other]: c for e, c in A.terms.items() if e[k] == da}
    lcB = {e[other]: c for e, c in B.terms.items() if e[k] == db}
    pts, vals = [], []
    x0 = 0
    while len(pts) < bound + 1:
        xv = ring(x0)
        x0 += 1
        la = sum((c * xv ** i for i, c in lcA.items()), ring.zero)
        lb = sum((c * xv ** i for i, c in lcB.items()), ring.zero)
        if ring.is_zero(la) or ring.is_zero(lb):
            continue
        a = A.specialize(A.vars[other], xv)
        b = B.specialize(B.vars[other], xv)
        pts.append(xv)
        vals.append(resultant_field(a, b))
    poly = _newton_interpolate(ring, pts, vals)
    terms = {}
    for i, c in enumerate(poly.c):
        if not ring.is_zero(c):
            terms[(i, 0) if other == 0 else (0, i)] = c
    return BiPoly._raw(terms, A.vars, ring)


def _newton_interpolate(ring, xs, ys) -> UPoly:
    n = len(xs)
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * ring.inv(xs[i] - xs[i - j])
    result = UPoly(ring, [coef[-1]])
    for i in range(n - 2, -1, -1):
        result = result * UPoly(ring, [-xs[i], 1]) + coef[i]
    return result


# -- square roots and factor removal -----------------------------------------

def exact_sqrt(H: BiPoly, method: str = "auto") -> BiPoly:
    """F with F^2 = c*H, F normalized; raises NotASquare otherwise."""
    if H.is_zero():
        raise AlgebraError("square root of zero")
    if method == "auto":
        method = "flint" if isinstance(H.ring, RationalField) else "terms"
    Hn = H.normalized()
    if method == "flint":
        num = flint.fmpz_mpoly_ctx.get(H.vars, "lex").from_dict({e: int(c.p) for e, c in Hn.terms.items()})
        try:
            F = num.sqrt()
        except Exception as exc:  # flint raises a plain ValueError
            raise NotASquare(str(exc)) from None
        return BiPoly._raw({tuple(e): flint.fmpq(int(c)) for e, c in F.to_dict().items()}, H.vars, QQ).normalized()
    return _sqrt_terms(Hn).normalized()


def _sqrt_terms(H: BiPoly) -> BiPoly:
    ring = H.ring
    (e0, c0) = H.leading()
    if e0[0] % 2 or e0[1] % 2:
        raise NotASquare("leading exponent is odd")
    sq = roots_in_field(UPoly(ring, [-c0, 0, 1]))
    if not sq:
        raise NotASquare("leading coefficient is not a square")
    lead_e = (e0[0] // 2, e0[1] // 2)
    lead_c = sq[0]
    F = BiPoly._raw({lead_e: lead_c}, H.vars, ring)
    R = H - F * F
    two_lead_inv = ring.inv(lead_c * 2)
    half = (H.degree(0) // 2, H.degree(1) // 2)
    while not R.is_zero():
        e, c = R.leading()
        m = (e[0] - lead_e[0], e[1] - lead_e[1])
        if m[0] < 0 or m[1] < 0 or m >= lead_e or m[0] > half[0] or m[1] > half[1]:
            raise NotASquare("remainder cannot be cancelled")
        t = BiPoly._raw({m: c * two_lead_inv}, H.vars, ring)
        R = R - F * t * 2 - t * t
        F = F + t
    return F


def remove_known_factor(F: BiPoly, G: BiPoly):
    """Largest k with G^k | F, and F / G^k."""
    if G.is_zero() or G.is_constant():
        raise AlgebraError("factor must be nonconstant")
    k = 0
    cur = F
    while not cur.is_zero():
        q, r = cur.divmod(G)
        if not r.is_zero():
            break
        cur = q
        k += 1
    return cur, k


def factor_over_q(F: BiPoly):
    """Irreducible factors over Q with multiplicities (flint)."""
    c, facs = F.to_flint().factor()
    return c, [(BiPoly.from_flint(f, F.vars), m) for f, m in facs]


def map_degree(G: BiPoly, A: BiPoly, B: Optional[BiPoly] = None) -> int:
    """Degree of f = A/B on the curve G = 0 over Q (G irreducible over Q).

    With (x, y) the variables, Res_y(G, A - T*B) is, up to a factor in
    Q[x], the characteristic polynomial of f over Q(x), i.e. H(x, T)^k with
    H the relation between x and f and k = [Q(C) : Q(x, f)]; its degree in
    x after removing the content in Q[x] is [Q(C) : Q(f)].
    """
    if B is None:
        B = BiPoly.const(1, G.vars)
    x, y = G.vars
    ctx = flint.fmpq_mpoly_ctx.get((x, y, "_T"), "lex")

    def lift(P):
        return ctx.from_dict({(e[0], e[1], 0): c for e, c in P.terms.items()})

    T = ctx.gens()[2]
    Gl = lift(G)
    if G.degree(y) == 0:
        raise DegenerateInput("curve has no y")
    R = (lift(A) - T * lift(B)).resultant(Gl, y)
    if R.is_zero():
        raise AlgebraError("f is not defined on the curve")
    byT: Dict[int, object] = {}
    for e, c in R.to_dict().items():
        byT.setdefault(e[2], {})[(e[0], e[1], 0)] = c
    coeffs = [ctx.from_dict(d) for d in byT.values()]
    if len(coeffs) == 1:
        raise AlgebraError("f is constant on the curve")
    cont = coeffs[0]
    for c in coeffs[1:]:
        cont = cont.gcd(c)
    return max(c.degrees()[0] for c in coeffs) - cont.degrees()[0]
