"""Finite fields F_{p^k} with reproducible defining polynomials.

Every extension is defined by the lexicographically least monic irreducible
polynomial of its degree over F_p, comparing coefficient vectors from the
highest non-leading coefficient down.  The modulus is part of every
certificate so results can be replayed bit for bit.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator, List, Sequence

import flint

FqElem = flint.fq_default


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return bool(flint.fmpz(n).is_prime())


@lru_cache(maxsize=None)
def lex_least_irreducible(p: int, k: int) -> tuple:
    """Coefficients (low to high, monic) of the lex-least irreducible of degree k."""
    if k == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=k):
        # tail = (c_{k-1}, ..., c_0)
        coeffs = list(reversed(tail)) + [1]
        if coeffs[0] == 0:
            continue
        _, facs = flint.nmod_poly(coeffs, p).factor()
        if len(facs) == 1 and facs[0][1] == 1 and facs[0][0].degree() == k:
            return tuple(coeffs)
    raise ValueError("no irreducible polynomial found")


class FiniteField:
    """F_{p^k}; elements are flint ``fq_default`` values."""

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.k = k
        self.q = p ** k
        self.modulus = lex_least_irreducible(p, k)
        mod = flint.fmpz_mod_poly_ctx(p)(list(self.modulus))
        self.ctx = flint.fq_default_ctx(modulus=mod, var="w")
        self.poly_ctx = flint.fq_default_poly_ctx(self.ctx)
        self._gen = self.ctx.gen()

    def __repr__(self):
        return f"GF({self.p}^{self.k})"

    def __reduce__(self):
        return (GF, (self.p, self.k))

    def __call__(self, x) -> FqElem:
        if isinstance(x, flint.fq_default):
            return x
        if isinstance(x, (list, tuple)):
            return self.ctx(list(x))
        return self.ctx(int(x))

    @property
    def zero(self):
        return self.ctx.zero()

    @property
    def one(self):
        return self.ctx.one()

    def gen(self) -> FqElem:
        return self._gen

    def coords(self, a: FqElem) -> List[int]:
        cs = [int(c) for c in a.to_list()]
        return cs + [0] * (self.k - len(cs))

    def from_coords(self, cs: Sequence[int]) -> FqElem:
        return self.ctx([int(c) for c in cs])

    def elements(self) -> Iterator[FqElem]:
        for cs in itertools.product(range(self.p), repeat=self.k):
            yield self.ctx(list(reversed(cs)))

    def nonzero_elements(self) -> Iterator[FqElem]:
        for a in self.elements():
            if not a.is_zero():
                yield a

    def poly(self, coeffs) -> "flint.fq_default_poly":
        return self.poly_ctx(list(coeffs))

    def to_json(self):
        return {"p": self.p, "k": self.k, "modulus": list(self.modulus)}

    def frobenius(self, a: FqElem, times: int = 1) -> FqElem:
        return a.frobenius(times)


@lru_cache(maxsize=None)
def GF(p: int, k: int = 1) -> FiniteField:
    return FiniteField(p, k)


def poly_roots(F: FiniteField, coeffs) -> list:
    """Distinct roots in F of a polynomial given by F-coefficients."""
    P = F.poly(coeffs)
    if P.degree() <= 0:
        return []
    return [r for r, _ in P.roots()]


class Embedding:
    """Field embedding F_{p^a} -> F_{p^b} determined by the image of the generator."""

    def __init__(self, src: FiniteField, dst: FiniteField, image: FqElem):
        self.src, self.dst, self.image = src, dst, image
        powers = [dst.one]
        for _ in range(src.k - 1):
            powers.append(powers[-1] * image)
        self._powers = powers

    def __call__(self, a) -> FqElem:
        if self.src.k == 1:
            return self.dst.ctx(int(a.to_list()[0]) if a.to_list() else 0)
        acc = self.dst.zero
        for c, pw in zip(a.to_list(), self._powers):
            if c:
                acc += pw * int(c)
        return acc

    def poly(self, P) -> "flint.fq_default_poly":
        return self.dst.poly([self(c) for c in P.coeffs()])


def all_embeddings(src: FiniteField, dst: FiniteField) -> List[Embedding]:
    if src.p != dst.p or dst.k % src.k:
        raise ValueError("no embedding between these fields")
    roots = poly_roots(dst, [dst(c) for c in src.modulus])
    roots.sort(key=lambda r: list(reversed(dst.coords(r))))
    return [Embedding(src, dst, r) for r in roots]


@lru_cache(maxsize=None)
def canonical_embedding(src: FiniteField, dst: FiniteField) -> Embedding:
    """The embedding sending the generator to its least image (coordinate order)."""
    return all_embeddings(src, dst)[0]
