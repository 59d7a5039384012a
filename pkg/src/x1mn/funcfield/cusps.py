"""Cusps on reduced plane models and functions supported on them.

Cusps are the poles of the j-invariant of the universal curve carried by
the model.  A function over Q whose divisor is supported on cusps reduces,
at a good prime p, to a function of the same degree whose divisor is
supported on the reductions of the cusps (distinct cusps stay distinct in
good reduction).  So an empty search over F_p proves the search over Q is
empty; a nonempty one is reported per prime.
"""
from __future__ import annotations

import itertools
import time
from typing import Dict, List, Optional, Sequence

import flint

from ..models.conjugate import rational_reconstruct
from ..models.raw import _setup
from .curve import CurveFunction, Divisor, PlaneCurveFq, reduce_model
from .search import DEFAULT_BUDGET, Echelon, _Walker, effective_counts


class IncompleteCuspData(ValueError):
    pass


def j_invariant_poly(m: int):
    """(num, den) of j = c4^3 / Delta for the family behind the m-models, as fmpq dicts."""
    C, _, _, _ = _setup(m)
    b2, b4, _, _ = C.b_invariants()
    c4 = b2 * b2 - 24 * b4
    j = c4 ** 3 / C.discriminant()
    return j.num, j.den


def _mpoly_to_dict(P, p: int) -> Dict:
    out = {}
    for e, c in P.to_dict().items():
        c = flint.fmpq(c) if not isinstance(c, flint.fmpq) else c
        r = int(c.p) * pow(int(c.q), -1, p) % p
        if r:
            out[(int(e[0]), int(e[1]))] = r
    return out


def j_function(C: PlaneCurveFq, m: int) -> CurveFunction:
    num, den = j_invariant_poly(m)
    return CurveFunction(C, C.poly_from_user(_mpoly_to_dict(num, C.p)),
                         C.poly_from_user(_mpoly_to_dict(den, C.p)))


def cusp_divisor(C: PlaneCurveFq, m: int, expected_degree: Optional[int] = None) -> Divisor:
    """Pole divisor of j over F_p; its degree is the index of the modular group."""
    jf = j_function(C, m)
    D = C.divisor_of(jf)
    poles = Divisor({P: -k for P, k in D.items() if k < 0})
    if expected_degree is not None and poles.degree() != expected_degree:
        raise IncompleteCuspData(f"j has pole degree {poles.degree()}, expected {expected_degree}")
    return poles


def _expansion_vectors(C, funcs, P, upto):
    """For each basis function, its coefficients of t^e, e < upto, at P."""
    N = upto + 16
    while True:
        rows = []
        ok = True
        for fn in funcs:
            num = C._series_of(P, fn.num, N)
            den = C._series_of(P, fn.den, N)
            if den.is_zero():
                ok = False
                break
            s = num / den if not num.is_zero() else num
            if s.abs_prec < upto:
                ok = False
                break
            rows.append([s.coeff(e) for e in range(upto)])
        if ok:
            return rows
        N *= 2
        if N > 1 << 15:
            raise ArithmeticError("expansion precision")


def search_one_prime(C: PlaneCurveFq, cusps: Sequence, d: int, budget: int = DEFAULT_BUDGET) -> dict:
    """All functions over F_p of degree k <= d with divisor supported on ``cusps``.

    For each k, effective cusp divisors D of degree k with dim L(D) >= 2 are
    found by the jet-rank walk; for each, L(D) is computed explicitly and
    every element is tested for poles exactly D and zeros on the cusps.
    """
    if C.f != 1:
        raise NotImplementedError("cusp search runs over the prime field")
    t0 = time.time()
    places = sorted(cusps)
    p = C.p
    found = []
    stats = {}
    for k in range(1, d + 1):
        cands = []

        def leaf(chosen, ech, k=k):
            if k + 1 - ech.rank < 2:
                return False
            D = Divisor()
            for i in chosen:
                D.add(places[i], 1)
            for P in D:
                if C.ell_effective(D - Divisor({P: 1})) == k + 1 - ech.rank:
                    return False
            cands.append(D)
            return False

        W = _Walker(C, places, k, Divisor(), k - 1, budget, leaf).run()
        expected = effective_counts(_counts(places, k), k)[k]
        if W.covered != expected:
            raise AssertionError(f"covered {W.covered} cusp divisors of degree {k}, expected {expected}")
        hits = []
        for D in cands:
            hits.extend(_cuspidal_elements(C, D, places, k))
        stats[k] = {"walk": W.stats(), "pole_divisors_with_sections": len(cands),
                    "functions": len(hits)}
        found.extend(hits)
    return {"p": p, "functions": found, "stats": stats, "wall_time": round(time.time() - t0, 3)}


def _counts(places, k):
    out = [0] * k
    for P in places:
        if P.deg <= k:
            out[P.deg - 1] += 1
    return out


def _cuspidal_elements(C, D: Divisor, cusps, k):
    """Elements of L(D) with poles exactly D and zero divisor supported on ``cusps``."""
    B = C.riemann_roch(D)
    funcs = list(B)
    den = funcs[0].den
    p = C.p
    lead = {P: [row[0] for row in _expansion_vectors_shift(C, funcs, P, -m, 1)] for P, m in D.items()}
    others = [P for P in cusps if P not in D]
    exps = {P: _expansion_vectors(C, funcs, P, k + 1) for P in others}
    out = []
    seen = set()
    for coeffs in itertools.product(range(p), repeat=len(funcs)):
        if not any(coeffs):
            continue
        # poles exactly D
        if any(_combo(P.field, coeffs, vals).is_zero() for P, vals in lead.items()):
            continue
        zdeg = 0
        for P, rows in exps.items():
            L = P.field
            for e in range(k + 1):
                c = L.zero
                for a, row in zip(coeffs, rows):
                    if a:
                        c += row[e] * a
                if not c.is_zero():
                    zdeg += e * P.deg
                    break
            else:
                zdeg += (k + 1) * P.deg
        if zdeg == k:
            num = {}
            for a, fn in zip(coeffs, funcs):
                for e, c in fn.num.items():
                    num[e] = (num.get(e, 0) + a * c) % p
            num = {e: c for e, c in num.items() if c}
            key = tuple(sorted(num.items()))
            if key not in seen:
                seen.add(key)
                out.append({"function": CurveFunction(C, num, den), "poles": D})
    return out


def _expansion_vectors_shift(C, funcs, P, start, count):
    """Coefficients of t^start .. t^(start+count-1) at P for each function."""
    N = 16 + max(0, start + count)
    while True:
        rows = []
        ok = True
        for fn in funcs:
            num = C._series_of(P, fn.num, N)
            den = C._series_of(P, fn.den, N)
            if den.is_zero():
                ok = False
                break
            s = num / den if not num.is_zero() else num
            if s.abs_prec < start + count:
                ok = False
                break
            rows.append([s.coeff(e) for e in range(start, start + count)])
        if ok:
            return rows
        N *= 2
        if N > 1 << 15:
            raise ArithmeticError("expansion precision")


def _combo(L, coeffs, vals):
    acc = L.zero
    for a, v in zip(coeffs, vals):
        if a:
            acc += v * a
    return acc


def good_primes(m: int, n: int, count: int = 2, start: int = 3) -> List[int]:
    out = []
    p = start
    while len(out) < count:
        if flint.fmpz(p).is_prime() and (m * n) % p:
            out.append(p)
        p += 1
    return out


def _centre(P, p: int):
    return (P.xc + P.yc, P.field.coords(P.s0)[0] % p, P.field.coords(P.t0)[0] % p)


def _red(a, p: int) -> int:
    a = flint.fmpq(a)
    return int(a.p) * pow(int(a.q), -1, p) % p


def _lift(residues: Dict[int, int]):
    """Smallest rational with the given residues (CRT + rational reconstruction), or None."""
    mod, r = 1, 0
    for p, a in residues.items():
        r += mod * ((a - r) * pow(mod, -1, p) % p)
        mod *= p
    return rational_reconstruct(r, mod)


def _lift_centre(chart, s, t, p0, centres, attain):
    """A rational centre reducing to (s, t) at p0 and to a centre in the same chart elsewhere."""
    others = attain[1:]
    options = [[c for c in centres[p] if c[0] == chart] for p in others]
    for combo in itertools.product(*options):
        xs = _lift({p0: s, **{p: c[1] for p, c in zip(others, combo)}})
        ys = _lift({p0: t, **{p: c[2] for p, c in zip(others, combo)}})
        if xs is None or ys is None:
            continue
        if all(_red(xs, p) == c[1] and _red(ys, p) == c[2] for p, c in zip(others, combo)):
            return xs, ys
    return None


def rational_cusps(model, primes: Sequence[int]) -> dict:
    """Identify the cusps of the model that are defined over Q.

    A Q-rational cusp reduces to a degree-1 cusp place at every good prime,
    so the least degree-1 count over ``primes`` bounds their number from
    above.  Centres at the primes attaining the least count are lifted to Q;
    a lifted centre is kept when it reduces to a degree-1 cusp centre, with
    at least the same number of branches, at every prime in ``primes``.
    """
    from ..invariants import psl2_index
    index = psl2_index(model.m, model.n)
    per_prime, centres = {}, {}
    for p in primes:
        C = reduce_model(model, p)
        cusps = cusp_divisor(C, model.m, expected_degree=index)
        cnt: Dict[tuple, int] = {}
        for P in cusps:
            if P.deg == 1:
                c = _centre(P, p)
                cnt[c] = cnt.get(c, 0) + 1
        centres[p] = cnt
        per_prime[p] = {"cusp_places": len(cusps), "degree_one": sum(cnt.values())}
    bound = min(v["degree_one"] for v in per_prime.values())
    attain = [p for p in primes if per_prime[p]["degree_one"] == bound]
    identified = []
    if len(attain) >= 2:
        p0 = attain[0]
        for (chart, s, t), mult in sorted(centres[p0].items()):
            cand = _lift_centre(chart, s, t, p0, centres, attain)
            if cand is None:
                continue
            xs, ys = cand
            if all(centres[p].get((chart, _red(xs, p), _red(ys, p)), 0) >= mult for p in primes):
                identified.append({"chart": chart, "centre": [str(xs), str(ys)], "branches": mult})
    count = sum(c["branches"] for c in identified)
    return {"upper_bound": bound, "count": count, "identified": identified,
            "complete": count == bound, "per_prime": per_prime, "primes": list(primes)}


def cuspidal_function_search(model, d: int, primes: Optional[Sequence[int]] = None,
                             rational_cusps: Optional[int] = None, budget: int = DEFAULT_BUDGET,
                             stop_when_empty: bool = True) -> dict:
    """Functions of degree <= d with cuspidal divisor, through reductions.

    Returns {"functions": [...], "per_prime": {...}, ...}.  ``functions`` is
    the empty list when some prime has no such function (which is then a
    proof); otherwise the per-prime lists are returned for inspection.
    """
    from ..invariants import psl2_index
    m, n = model.m, model.n
    if d < 1:
        return {"functions": [], "d": d, "per_prime": {}, "proved_empty": True}
    if primes is None:
        primes = good_primes(m, n)
    index = psl2_index(m, n)
    out = {"label": [m, n], "d": d, "primes": list(primes), "per_prime": {}}
    empty_somewhere = False
    for p in primes:
        C = reduce_model(model, p)
        cusps = cusp_divisor(C, m, expected_degree=index)
        deg1 = [P for P in cusps if P.deg == 1]
        if rational_cusps is not None and len(deg1) < rational_cusps:
            raise IncompleteCuspData(f"only {len(deg1)} cusps of degree 1 over F_{p}, "
                                     f"expected at least {rational_cusps}")
        res = search_one_prime(C, list(cusps), d, budget)
        out["per_prime"][p] = {
            "cusp_places": len(cusps), "cusp_degrees": sorted(P.deg for P in cusps),
            "degree_one_cusps": len(deg1), "functions": [
                {"function": h["function"].to_json(), "poles": h["poles"].to_json()} for h in res["functions"]],
            "stats": res["stats"], "wall_time": res["wall_time"]}
        if not res["functions"]:
            empty_somewhere = True
            if stop_when_empty:
                break
    out["proved_empty"] = empty_somewhere
    out["functions"] = [] if empty_somewhere else None
    return out
