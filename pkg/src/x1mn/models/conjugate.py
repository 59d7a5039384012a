"""Splitting a Q-irreducible bivariate polynomial over a quadratic field.

G in Z[u,v] is assumed to factor over K = Q(z), z^2 + s z + c = 0, as a
conjugate pair A * conj(A).  Write A = U + z V with U, V in Q[u,v] and A
monic for the lex order.  Modulo a prime p where z has two roots r, r',
G factors as A_p * B_p with A_p = U + r V and B_p = U + r' V, which solves
for U, V mod p.  Which of the two modular factors is A_p is fixed once and
for all by a univariate factorization over K at a specialization u = u0.
Chinese remaindering and rational reconstruction then give U, V, and the
result is accepted only when A * conj(A) reproduces G exactly.
"""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

import flint

from ..algebra.bipoly import BiPoly
from ..algebra.rings import NumField
from ..algebra.upoly import UPoly, factor_over_field


class SplitFailed(RuntimeError):
    pass


def rational_reconstruct(a: int, mod: int) -> Optional[flint.fmpq]:
    """n/d = a mod ``mod`` with |n|, d < sqrt(mod/2), or None."""
    a %= mod
    bound = int(flint.fmpz(mod // 2).isqrt())
    r0, r1 = mod, a
    s0, s1 = 0, 1
    while r1 > bound:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        s0, s1 = s1, s0 - qq * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if s1 < 0:
        r1, s1 = -r1, -s1
    if flint.fmpz(s1).gcd(flint.fmpz(mod)) != 1:
        return None
    return flint.fmpq(r1, s1)


def _primes_splitting(minpoly: Tuple[int, int, int], start: int = (1 << 31)):
    """Primes below ``start`` (descending) where z^2 + s z + c has two distinct roots.

    The default stays below 2^31: flint's factor output sorting overflows for
    larger moduli.
    """
    c, s, _ = minpoly
    disc = s * s - 4 * c
    p = start - 1
    while p > 3:
        if flint.fmpz(p).is_prime() and disc % p and pow(disc % p, (p - 1) // 2, p) == 1:
            yield p
        p -= 2 if p % 2 else 1


def _lex_key(e):
    return tuple(e)


def _monic_modp(poly) -> Dict[tuple, int]:
    d = poly.to_dict()
    p = poly.context().modulus()
    lead = max(d, key=_lex_key)
    inv = pow(int(d[lead]), -1, p)
    return {tuple(e): int(c) * inv % p for e, c in d.items()}


def _anchor_factor(G, K: NumField, u0: int):
    """The K-factor of G(u0, v) used to orient modular factors; None if unusable."""
    coeffs = {}
    for e, c in G.to_dict().items():
        coeffs[e[1]] = coeffs.get(e[1], 0) + int(c) * u0 ** e[0]
    deg = G.degrees()[1]
    if coeffs.get(deg, 0) == 0:
        return None
    poly = flint.fmpq_poly([coeffs.get(i, 0) for i in range(deg + 1)])
    if poly.gcd(poly.derivative()).degree() > 0:
        return None
    g = UPoly(K, [flint.fmpq(c) for c in poly.coeffs()])
    facs = factor_over_field(g)
    if len(facs) != 2 or facs[0].degree() != facs[1].degree():
        return None
    facs.sort(key=lambda f: f.fmt())
    return facs[0]


def _eval_u0(d: Dict[tuple, int], u0: int, p: int, deg: int) -> List[int]:
    out = [0] * (deg + 1)
    for (i, j), c in d.items():
        out[j] = (out[j] + c * pow(u0, i, p)) % p
    return out


def _nf_mod(a, r: int, p: int) -> int:
    acc = 0
    cs = a.value.coeffs()
    for k in range(len(cs) - 1, -1, -1):
        cq = flint.fmpq(cs[k])
        acc = (acc * r + int(cq.p) * pow(int(cq.q), -1, p)) % p
    return acc


def split_conjugate(G, K: NumField, max_primes: int = 200) -> BiPoly:
    """The factor A of G over the quadratic field K (see module docstring).

    ``G`` is an fmpz_mpoly in two variables.  Returns A as a BiPoly over K,
    normalized to have lex-leading coefficient 1.
    """
    if K.degree != 2:
        raise SplitFailed("only quadratic fields are supported")
    c0, s0, one = [flint.fmpq(x) for x in K.poly.coeffs()]
    if one != 1 or c0.q != 1 or s0.q != 1:
        raise SplitFailed("defining polynomial must be integral and monic")
    c, s = int(c0.p), int(s0.p)
    vars_ = tuple(G.context().names())
    deg_v = G.degrees()[1]
    anchor, u0 = None, None
    for u0 in list(range(2, 60)) + list(range(-2, -60, -1)):
        anchor = _anchor_factor(G, K, u0)
        if anchor is not None:
            break
    if anchor is None:
        raise SplitFailed("no specialization with a conjugate pair of factors")
    half = anchor.degree()
    Gdict = {tuple(e): int(v) for e, v in G.to_dict().items()}

    modulus = 1
    Ucrt: Dict[tuple, int] = {}
    Vcrt: Dict[tuple, int] = {}
    prev = None
    used = 0
    for p in _primes_splitting((c, s, 1)):
        if used >= max_primes:
            break
        ctx = flint.nmod_mpoly_ctx.get(vars_, modulus=p, ordering="lex")
        Gp = ctx.from_dict({e: v % p for e, v in Gdict.items()})
        if Gp.degrees() != G.degrees():
            continue
        _, facs = Gp.factor()
        if len(facs) != 2 or any(m != 1 for _, m in facs):
            continue
        roots = sorted(int(r) for r, _ in flint.nmod_poly([c, s, 1], p).roots())
        if len(roots) != 2:
            continue
        r, r2 = roots
        ref = [_nf_mod(a, r, p) for a in anchor.c]
        inv = pow(ref[-1], -1, p) if ref[-1] else None
        if inv is None:
            continue
        ref = [x * inv % p for x in ref]
        cand = [_monic_modp(f) for f, _ in facs]
        picks = []
        for idx, d in enumerate(cand):
            ev = _eval_u0(d, u0 % p, p, deg_v)
            top = max((j for j in range(len(ev)) if ev[j]), default=-1)
            if top != half:
                continue
            li = pow(ev[top], -1, p)
            if [x * li % p for x in ev[: half + 1]] == ref:
                picks.append(idx)
        if len(picks) != 1:
            continue
        Ap, Bp = cand[picks[0]], cand[1 - picks[0]]
        dinv = pow((r - r2) % p, -1, p)
        keys = set(Ap) | set(Bp)
        U, V = {}, {}
        for e in keys:
            a_, b_ = Ap.get(e, 0), Bp.get(e, 0)
            v = (a_ - b_) * dinv % p
            U[e] = (a_ - r * v) % p
            V[e] = v
        # Chinese remaindering
        newmod = modulus * p
        for target, img in ((Ucrt, U), (Vcrt, V)):
            for e in set(target) | set(img):
                x_old = target.get(e, 0)
                x_new = img.get(e, 0)
                # x = x_old mod modulus, x = x_new mod p
                k = (x_new - x_old) * pow(modulus % p, -1, p) % p
                target[e] = x_old + modulus * k
        modulus = newmod
        used += 1
        rec = _reconstruct(Ucrt, Vcrt, modulus)
        if rec is not None and rec == prev:
            A = _assemble(rec, K, vars_)
            if _check_norm(A, G, c, s):
                return A
        prev = rec
    raise SplitFailed("multimodular reconstruction did not converge")


def _reconstruct(Ucrt, Vcrt, modulus):
    out = {}
    for name, src in (("U", Ucrt), ("V", Vcrt)):
        for e, a in src.items():
            if a % modulus == 0:
                continue
            q = rational_reconstruct(a, modulus)
            if q is None:
                return None
            out[(name, e)] = q
    return out


def _assemble(rec, K: NumField, vars_) -> BiPoly:
    z = K.gen()
    terms = {}
    for (name, e), q in rec.items():
        add = K(q) if name == "U" else z * q
        terms[e] = terms.get(e, K.zero) + add
    return BiPoly(terms, vars_, K)


def _check_norm(A: BiPoly, G, c: int, s: int) -> bool:
    """A * conj(A) == G / lc(G) with conj(z) = -s - z, computed over Q."""
    ctx = flint.fmpq_mpoly_ctx.get(tuple(G.context().names()), "lex")
    U = {}
    V = {}
    for e, a in A.terms.items():
        cs = A.ring.rational_coords(a)
        if cs[0] != 0:
            U[e] = cs[0]
        if cs[1] != 0:
            V[e] = cs[1]
    Uq, Vq = ctx.from_dict(U), ctx.from_dict(V)
    # (U + zV)(U + z'V) with z + z' = -s, z z' = c
    norm = Uq * Uq - s * Uq * Vq + c * Vq * Vq
    Gq = ctx.from_dict({tuple(e): int(v) for e, v in G.to_dict().items()})
    lead = max(Gq.to_dict(), key=_lex_key)
    return norm == Gq / Gq.to_dict()[lead]
