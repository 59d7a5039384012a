"""Index, cusps, elliptic points and genus of Gamma_1(m, mn); gonality bounds.

Cosets of Gamma_1(m, mn) in SL_2(Z) are enumerated through their images in
SL_2(Z/N), N = mn, which suffices because Gamma(N) is contained in the group.
A right coset Gamma*g is determined by the bottom row of g together with its
top row modulo multiples of m times the bottom row.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

from .algebra.rings import euler_phi

LAMBDA1 = Fraction(975, 4096)


class NonIntegerGenus(ArithmeticError):
    pass


def prime_divisors(n: int) -> List[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def index_formula(m: int, n: int) -> int:
    """[PSL_2(Z) : image of Gamma_1(m,mn)] for mn >= 3."""
    N = m * n
    val = Fraction(m ** 3 * n ** 2, 2)
    for p in prime_divisors(N):
        val *= 1 - Fraction(1, p * p)
    if val.denominator != 1:
        raise ArithmeticError("index formula is not integral")
    return int(val)


@dataclass(frozen=True)
class GroupSpec:
    m: int
    n: int

    @property
    def level(self) -> int:
        return self.m * self.n

    def contains(self, g: Tuple[int, int, int, int]) -> bool:
        a, b, c, d = g
        N = self.level
        return (a - 1) % N == 0 and (d - 1) % N == 0 and c % N == 0 and b % self.m == 0


class _CosetSpace:
    """Right cosets of +-Gamma_1(m,mn) in SL_2(Z/N) with the S, T action."""

    def __init__(self, m: int, n: int):
        self.m, self.n, self.N = m, n, m * n

    def key(self, g):
        a, b, c, d = g
        N, m = self.N, self.m
        if m == 1:
            # the top row is determined by the bottom row up to Gamma
            return min((c % N, d % N), (-c % N, -d % N))
        step = N // m
        best = None
        for sign in (1, -1):
            aa, bb, cc, dd = (sign * a) % N, (sign * b) % N, (sign * c) % N, (sign * d) % N
            for k in range(step):
                cand = (cc, dd, (aa + k * m * cc) % N, (bb + k * m * dd) % N)
                if best is None or cand < best:
                    best = cand
        return best

    def mul(self, g, h):
        a, b, c, d = g
        e, f, gg, hh = h
        N = self.N
        return ((a * e + b * gg) % N, (a * f + b * hh) % N, (c * e + d * gg) % N, (c * f + d * hh) % N)

    def enumerate(self):
        S = (0, self.N - 1, 1, 0)
        T = (1, 1, 0, 1)
        start = (1, 0, 0, 1)
        reps: Dict[tuple, tuple] = {self.key(start): start}
        queue = deque([start])
        while queue:
            g = queue.popleft()
            for h in (S, T):
                g2 = self.mul(g, h)
                k = self.key(g2)
                if k not in reps:
                    reps[k] = g2
                    queue.append(g2)
        return reps


@dataclass(frozen=True)
class CurveInvariants:
    m: int
    n: int
    index: int
    cusps: int
    e2: int
    e3: int
    genus: int
    bound: Fraction

    def to_json(self):
        return {"label": [self.m, self.n], "index": self.index, "cusps": self.cusps,
                "e2": self.e2, "e3": self.e3, "genus": self.genus,
                "bound": f"{self.bound.numerator}/{self.bound.denominator}"}


@lru_cache(maxsize=None)
def coset_data(m: int, n: int) -> Tuple[int, int, int, int]:
    """(index, cusps, e2, e3) by explicit enumeration."""
    if m < 1 or n < 1:
        raise ValueError("m, n must be positive")
    if m * n == 1:
        return 1, 1, 1, 1
    sp = _CosetSpace(m, n)
    reps = sp.enumerate()
    S = (0, sp.N - 1, 1, 0)
    T = (1, 1, 0, 1)
    ST = sp.mul(S, T)
    e2 = sum(1 for k, g in reps.items() if sp.key(sp.mul(g, S)) == k)
    e3 = sum(1 for k, g in reps.items() if sp.key(sp.mul(g, ST)) == k)
    seen = set()
    cusps = 0
    for k, g in reps.items():
        if k in seen:
            continue
        cusps += 1
        h = g
        while True:
            kh = sp.key(h)
            if kh in seen:
                break
            seen.add(kh)
            h = sp.mul(h, T)
    return len(reps), cusps, e2, e3


def psl2_index(m: int, n: int) -> int:
    idx = coset_data(m, n)[0]
    if m * n >= 3 and idx != index_formula(m, n):
        raise ArithmeticError(f"coset enumeration {idx} disagrees with the index formula")
    return idx


def abramovich_bound(m: int, n: int) -> Fraction:
    return LAMBDA1 / 24 * psl2_index(m, n)


def abramovich_bound_formula(m: int, n: int) -> Fraction:
    """Bound from the closed index formula only (no enumeration)."""
    return LAMBDA1 / 24 * index_formula(m, n)


def cusp_elliptic_counts(m: int, n: int) -> Tuple[int, int, int]:
    _, c, e2, e3 = coset_data(m, n)
    if m * n >= 4 and (e2 or e3):
        raise ArithmeticError("elliptic points found at level >= 4")
    return c, e2, e3


def genus(m: int, n: int) -> int:
    mu = psl2_index(m, n)
    c, e2, e3 = cusp_elliptic_counts(m, n)
    g = 1 + Fraction(mu, 12) - Fraction(e2, 4) - Fraction(e3, 3) - Fraction(c, 2)
    if g.denominator != 1 or g < 0:
        raise NonIntegerGenus(f"genus formula gave {g} for ({m},{n})")
    return int(g)


def invariants(m: int, n: int) -> CurveInvariants:
    c, e2, e3 = cusp_elliptic_counts(m, n)
    return CurveInvariants(m, n, psl2_index(m, n), c, e2, e3, genus(m, n), abramovich_bound(m, n))


def weil_filter(d: int) -> List[int]:
    """All m with phi(m) | d (phi(m) <= d forces m <= 2d^2 + 2)."""
    return [m for m in range(1, 2 * d * d + 3) if d % euler_phi(m) == 0]


def candidate_sets(d: int):
    """(T1, T2) as sorted lists of labels (m, n).

    The bound is compared against the degree over Q(zeta_m): a point of degree
    d over Q gives one of degree d/phi(m) over Q(zeta_m).
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    T1, T2 = [], []
    for m in weil_filter(d):
        dm = Fraction(d, euler_phi(m))
        n = 1
        while True:
            if m * n >= 3:
                B = abramovich_bound_formula(m, n)
                # the index grows at least like m^2 n - 1, so the scan ends
                if B > 2 * dm:
                    break
                T1.append((m, n))
                if B <= dm:
                    T2.append((m, n))
            else:
                T1.append((m, n))
                T2.append((m, n))
            n += 1
    return sorted(T1), sorted(T2)


def tail_bound(m: int, d: int) -> dict:
    """Least n1 with B(m, mn) > 2 d/phi(m) for every n >= n1.

    The index is at least (3/5) m^3 n^2 / 2 because prod_p (1 - 1/p^2) = 6/pi^2
    exceeds 3/5; from n0 on this lower bound already exceeds the target, and
    the labels between n1 and n0 are checked exactly.
    """
    if m < 2:
        raise ValueError("the tail scan is for m >= 2")
    dm = Fraction(d, euler_phi(m))
    c = Fraction(975, 4096) / 24
    n0 = 1
    while c * Fraction(3, 5) * m ** 3 * n0 * n0 / 2 <= 2 * dm:
        n0 += 1
    n1 = n0
    while n1 > 1 and m * (n1 - 1) >= 3 and abramovich_bound_formula(m, n1 - 1) > 2 * dm:
        n1 -= 1
    return {"m": m, "d": d, "from_n": n1, "lower_bound_from": n0,
            "exact": {str(k): str(abramovich_bound_formula(m, k)) for k in range(n1, n0)}}


# Jacobian rank-zero facts over Q(zeta_m) (cited table).
RANK_ZERO_RANGE = {1: 36, 2: 21, 3: 10, 4: 6, 5: 4, 6: 5}


@dataclass(frozen=True)
class RankFact:
    value: object  # True or "unknown"
    note: str = ""

    def to_json(self):
        return {"rank_zero": self.value, "note": self.note}


def rank_zero(m: int, n: int) -> RankFact:
    top = RANK_ZERO_RANGE.get(m)
    if top is not None and n <= top:
        return RankFact(True, "cited rank-zero table")
    if m == 1 and n == 37:
        return RankFact("unknown", "rk J1(37)(Q) != 0")
    if top is not None and n == top + 1:
        return RankFact("unknown", "l_ratio_zero")
    return RankFact("unknown", "")
