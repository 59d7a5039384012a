"""Modular units built from the family: products of factors of the
discriminant and of the coordinates of the multiples kQ.

Divisors are read off over F_p; the exponent vectors whose divisor is
supported on cusps form a lattice, which is LLL-reduced and searched for
units of a given degree.  Degrees over Q are then recomputed exactly.
"""
from __future__ import annotations

import itertools
from math import gcd
from typing import Dict, List, Sequence, Tuple

import flint

from ..algebra.bipoly import BiPoly, map_degree
from ..models.raw import _setup
from .curve import Divisor, PlaneCurveFq


def family_factors(m: int, n: int, max_degree: int = 6) -> Dict[str, "flint.fmpz_mpoly"]:
    """Irreducible factors over Q of Delta and of x(kQ), y(kQ), k <= mn."""
    E, _, Q, _ = _setup(m)
    out: Dict[str, object] = {}

    def add(poly):
        _, facs = poly.factor()
        for f, _e in facs:
            if not f.is_constant() and f.total_degree() <= max_degree:
                out.setdefault(str(f), f)

    add(E.discriminant().num)
    R = Q
    for _ in range(m * n):
        if R is None:
            break
        for c in R:
            add(c.num)
            add(c.den)
        R = E.add(R, Q)
    return out


def unit_function(exps: Dict[str, int], vars_=("q", "t")) -> Tuple[BiPoly, BiPoly]:
    A = BiPoly.const(1, vars_)
    B = BiPoly.const(1, vars_)
    for s, e in sorted(exps.items()):
        g = BiPoly.parse(s, vars_)
        if e > 0:
            A = A * g ** e
        elif e < 0:
            B = B * g ** (-e)
    return A, B


def _modp(f, p: int) -> Dict[tuple, int]:
    d = {tuple(int(x) for x in e): int(c) % p for e, c in f.to_dict().items()}
    return {e: c for e, c in d.items() if c}


def units_of_degree(C: PlaneCurveFq, cusps, m: int, n: int, k: int, box: int = 1) -> List[Dict[str, int]]:
    """Products of family factors with cusp-supported divisor and pole degree k over F_p.

    The search covers all combinations with coefficients in [-box, box] of an
    LLL-reduced basis of the unit lattice; it is a witness generator, not an
    exhaustive enumeration.
    """
    cusps = set(cusps)
    names, divs = [], []
    for s, f in family_factors(m, n).items():
        d = _modp(f, C.p)
        if not d:
            continue
        try:
            D = C.divisor_of(C.function(d))
        except (ArithmeticError, ValueError):
            continue
        names.append(s)
        divs.append(D)
    others = sorted({P for D in divs for P in D if P not in cusps})
    A = flint.fmpz_mat([[D.get(P, 0) for P in others] for D in divs]) if others else None
    if A is None:
        vecs = [[int(i == j) for j in range(len(names))] for i in range(len(names))]
    else:
        K, r = A.transpose().nullspace()
        vecs = []
        for j in range(r):
            col = [flint.fmpq(K[i, j]) for i in range(K.nrows())]
            den = 1
            for x in col:
                den = den * int(x.q) // gcd(den, int(x.q))
            vecs.append([int(x * den) for x in col])
    if not vecs:
        return []
    L = flint.fmpz_mat(vecs).lll()
    basis = [[int(L[i, j]) for j in range(L.ncols())] for i in range(L.nrows())]
    found = {}
    for coeffs in itertools.product(range(-box, box + 1), repeat=len(basis)):
        if not any(coeffs):
            continue
        e = [sum(c * row[i] for c, row in zip(coeffs, basis)) for i in range(len(names))]
        tot: Dict = {}
        for ei, D in zip(e, divs):
            if ei:
                for P, v in D.items():
                    tot[P] = tot.get(P, 0) + ei * v
        poles = Divisor({P: -v for P, v in tot.items() if v < 0})
        if poles.degree() == k:
            key = tuple(sorted((repr(P.key), v) for P, v in poles.items()))
            found.setdefault(key, {names[i]: e[i] for i in range(len(names)) if e[i]})
    return list(found.values())


def pole_divisor(C: PlaneCurveFq, A: BiPoly, B: BiPoly) -> Divisor:
    D = C.divisor_of(C.function(A.fmt(), B.fmt()))
    return Divisor({P: -v for P, v in D.items() if v < 0})


def distinct_classes(C: PlaneCurveFq, divisors: Sequence[Divisor]) -> List[List[int]]:
    """Matrix of dim L(D_i - D_j); zero off the diagonal means pairwise distinct classes."""
    out = []
    for i, Di in enumerate(divisors):
        row = []
        for j, Dj in enumerate(divisors):
            row.append(None if i == j else C.riemann_roch(Di - Dj).dim)
        out.append(row)
    return out


def check_units(model, C: PlaneCurveFq, units: Sequence[Dict[str, int]]) -> dict:
    """Exact degree over Q and over F_p of each unit, and its pole divisor class matrix."""
    degs, divs = [], []
    for u in units:
        A, B = unit_function(u, model.vars)
        dq = map_degree(model.poly, A, B)
        D = pole_divisor(C, A, B)
        degs.append({"Q": dq, "Fp": D.degree()})
        divs.append(D)
    classes = distinct_classes(C, divs)
    distinct = all(v == 0 for row in classes for v in row if v is not None)
    return {"degrees": degs, "class_matrix": classes, "pairwise_distinct": distinct,
            "pole_divisors": [D.to_json() for D in divs]}
