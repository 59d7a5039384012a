"""Published optimized models of X1(m, mn) and their verification.

An optimized model is a plane curve G(u, v) = 0 together with maps
q(u, v), t(u, v) back to the coordinates of the family model.  Models are
ingested (from the printed data below or from model files) and checked:
the maps must send G = 0 into the raw curve, and the plane-model genus
over a good prime must equal the modular genus.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import flint

from ..algebra.bipoly import BiPoly
from ..algebra.rings import QQ, cyclotomic_field
from ..invariants import genus as modular_genus
from ..tate import SingularCurve, family_curve, order_of_point


@dataclass
class OptimizedModel:
    m: int
    n: int
    poly: BiPoly
    maps: Optional[Dict[str, Tuple[BiPoly, BiPoly]]] = None
    source: str = ""
    name: str = ""

    @property
    def label(self):
        return (self.m, self.n)

    @property
    def vars(self):
        return self.poly.vars

    @property
    def field(self):
        return self.poly.ring

    def to_json(self):
        out = {"label": [self.m, self.n], "vars": list(self.vars), "field": self.field.to_json(),
               "source": self.source, "name": self.name, "maps": None}
        if self.maps:
            out["maps"] = {k: {"num": a.fmt(), "den": b.fmt()} for k, (a, b) in self.maps.items()}
        return out


def _p(text, vars_=("u", "v")):
    return BiPoly.parse(text, vars_)


def _model(m, n, poly, maps, source, name):
    mp = None
    if maps:
        mp = {k: (_p(a), _p(b)) for k, (a, b) in maps.items()}
    return OptimizedModel(m, n, _p(poly), mp, source, name)


# Printed models.  The first X1(2,14) model has bidegree (3,3); the second
# is the one used to produce a degree-5 function; X1(2,16) comes without maps.
_PRINTED = {
    "X1(2,14)": dict(
        m=2, n=7, name="X1(2,14)",
        poly="(u^2 + u)*v^3 + (u^3 + 2*u^2 - u - 1)*v^2 + (u^3 - u^2 - 4*u - 1)*v - u^2 - u",
        maps={"q": ("u + v", "v - u"),
              "t": ("(u - v)*(u + v)*(u + v + 2)",
                    "u^3 + u^2*v + 2*u^2 + u*v^2 + 2*u*v + v^3 + 2*v^2")},
        source="printed model with maps, bidegree (3,3)"),
    "X1(2,14)-alt": dict(
        m=2, n=7, name="X1(2,14)-alt",
        poly="v^3 - (u^3 + u^2 + u - 1)*v^2 - (u^5 + 3*u^4 + 3*u^3 + u^2 + u)*v + u^5 + u^4",
        maps={"q": ("v + 1", "v - 2*u + 1"),
              "t": ("(v + 1)*(2*u - v + 1)*(2*u*(u + 1) + v + 1)",
                    "v^3 + (2*u^2 + 1)*v^2 - (2*u^3 - 2*u^2 - 2*u - 1)*v + u^4 + (u + 1)^4")},
        source="printed model with maps, bidegree (5,3)"),
    "X1(2,16)": dict(
        m=2, n=8, name="X1(2,16)",
        poly="v^4 + (u^3 - 2*u)*v^3 - (2*u^4 + 2)*v^2 + (u^5 + u^3 + 2*u)*v + 1",
        maps=None,
        source="printed model, maps not printed"),
}


def printed_model(key: str) -> OptimizedModel:
    return _model(**_PRINTED[key])


def printed_models() -> List[str]:
    return list(_PRINTED)


# -- model files: polynomial text + JSON sidecar ----------------------------

def _ring_from_json(js):
    if js.get("type", "QQ") == "QQ" or js.get("degree", 1) == 1:
        return QQ
    tag = js.get("tag") or ""
    if tag.startswith("cyclotomic("):
        return cyclotomic_field(int(tag[len("cyclotomic("):-1]))
    from ..algebra.rings import NumField
    return NumField(js["poly"], gen_name=js.get("gen", "z"))


def write_model(model, path: str) -> Tuple[str, str]:
    """Write ``path``.txt (the polynomial) and ``path``.json (everything else)."""
    base = path[:-4] if path.endswith(".txt") else path
    with open(base + ".txt", "w") as fh:
        fh.write(model.poly.fmt() + "\n")
    meta = model.to_json()
    meta["kind"] = "optimized" if isinstance(model, OptimizedModel) else "raw"
    with open(base + ".json", "w") as fh:
        json.dump(meta, fh, indent=1, sort_keys=True)
    return base + ".txt", base + ".json"


def read_model(path: str):
    """Read a model file pair; returns an OptimizedModel or RawModel."""
    from .raw import RawModel
    base = path[:-4] if path.endswith((".txt", ".json")) else path
    if path.endswith(".json"):
        base = path[:-5]
    with open(base + ".json") as fh:
        meta = json.load(fh)
    with open(base + ".txt") as fh:
        text = fh.read().strip()
    ring = _ring_from_json(meta.get("field", {}))
    vars_ = tuple(meta["vars"])
    poly = BiPoly.parse(text, vars_, ring)
    m, n = meta["label"]
    if meta.get("kind") == "raw":
        return RawModel(m, n, poly, meta.get("provenance", {}))
    maps = None
    if meta.get("maps"):
        maps = {k: (BiPoly.parse(v["num"], vars_), BiPoly.parse(v["den"], vars_))
                for k, v in meta["maps"].items()}
    return OptimizedModel(m, n, poly, maps, meta.get("source", ""), meta.get("name", os.path.basename(base)))


# -- verification -------------------------------------------------------------

@dataclass
class VerificationReport:
    label: Tuple[int, int]
    checks: Dict[str, dict] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.get("ok") for c in self.checks.values())

    def to_json(self):
        return {"label": list(self.label), "ok": self.ok, "checks": self.checks}


def substitute_maps(raw_poly: BiPoly, maps, vars_) -> "flint.fmpq_mpoly":
    """Numerator of raw(q(u,v), t(u,v)) after clearing the map denominators."""
    ctx = flint.fmpq_mpoly_ctx.get(tuple(vars_), "lex")
    names = raw_poly.vars
    Nq, Dq = (ctx.from_dict(dict(P.terms)) for P in maps[names[0]])
    Nt, Dt = (ctx.from_dict(dict(P.terms)) for P in maps[names[1]])
    a, b = raw_poly.degree(names[0]), raw_poly.degree(names[1])
    powers = {}

    def pw(base, k):
        key = (id(base), k)
        if key not in powers:
            powers[key] = base ** k
        return powers[key]

    acc = ctx.from_dict({})
    for (i, j), c in raw_poly.terms.items():
        acc += pw(Nq, i) * pw(Dq, a - i) * pw(Nt, j) * pw(Dt, b - j) * c
    return acc


def check_maps(raw, opt: OptimizedModel) -> dict:
    """The maps send opt = 0 into raw = 0: opt divides the substituted numerator."""
    if not opt.maps:
        return {"ok": None, "skipped": "no maps"}
    N = substitute_maps(raw.poly, opt.maps, opt.vars)
    G = opt.poly.to_flint()
    if N.is_zero():
        return {"ok": False, "reason": "substitution is identically zero"}
    g = N.gcd(G)
    ok = g.total_degree() == G.total_degree()
    return {"ok": ok, "substituted_terms": len(N), "divides": ok}


def check_genus(opt, primes: Optional[List[int]] = None) -> dict:
    """Plane-model genus of ``opt`` over good primes against the modular genus."""
    from ..funcfield.curve import BadPrime, reduce_model
    target = modular_genus(opt.m, opt.n)
    got = {}
    p = 3
    primes = list(primes) if primes else []
    tried = 0
    while not primes or len(got) < len(primes):
        cand = primes[len(got)] if primes else p
        try:
            C = reduce_model(opt, cand)
            got[cand] = C.genus()
            if not primes:
                break
        except BadPrime:
            if primes:
                got[cand] = None
        p += 1
        tried += 1
        if tried > 50:
            break
    ok = bool(got) and all(v == target for v in got.values())
    return {"ok": ok, "modular_genus": target, "plane_genus": {str(k): v for k, v in got.items()}}


def check_nonsingular_point(opt, p: int = 0) -> dict:
    """A smooth F_p-point of opt maps to a family fibre with P of order m and Q of order mn."""
    if not opt.maps or opt.m not in (2, 3, 4):
        return {"ok": None, "skipped": "needs maps into a family model"}
    fam = family_curve(opt.m)
    N = opt.m * opt.n
    primes = [p] if p else [q for q in range(7, 200) if flint.fmpz(q).is_prime() and N % q
                               and q % opt.m == (1 % opt.m)]
    G = opt.poly
    Gu, Gv = G.derivative(G.vars[0]), G.derivative(G.vars[1])
    for q in primes:
        Fq = lambda a, q=q: flint.nmod(int(a), q)
        red = lambda P, q=q: {e: int(c.p) * pow(int(c.q), -1, q) % q for e, c in P.terms.items()}
        ev = lambda D, u, v, q=q: sum(c * pow(u, e[0], q) * pow(v, e[1], q) for e, c in D.items()) % q
        g, gu, gv = red(G), red(Gu), red(Gv)
        mq = {k: (red(a), red(b)) for k, (a, b) in opt.maps.items()}
        names = list(opt.maps)
        for u in range(q):
            for v in range(q):
                if ev(g, u, v) or (ev(gu, u, v) == 0 and ev(gv, u, v) == 0):
                    continue
                vals = []
                for k in names:
                    den = ev(mq[k][1], u, v)
                    if den == 0:
                        break
                    vals.append(ev(mq[k][0], u, v) * pow(den, -1, q) % q)
                if len(vals) != 2:
                    continue
                try:
                    C, P, Q = fam.specialize(Fq(vals[0]), Fq(vals[1]), Fq)
                    C = type(C)(*C.ainvs)
                except (SingularCurve, ZeroDivisionError):
                    continue
                oP = order_of_point(C, P, 4 * N)
                oQ = order_of_point(C, Q, 4 * N)
                return {"ok": oP == opt.m and oQ == N, "prime": q, "point": [u, v],
                        "qt": vals, "order_P": oP, "order_Q": oQ}
    return {"ok": False, "reason": "no usable smooth point found"}


def verify_model(raw, opt: OptimizedModel, primes: Optional[List[int]] = None) -> VerificationReport:
    if tuple(raw.label) != tuple(opt.label):
        raise ValueError(f"labels differ: {raw.label} vs {opt.label}")
    rep = VerificationReport(opt.label)
    rep.checks["maps"] = check_maps(raw, opt)
    if modular_genus(opt.m, opt.n) <= 1:
        rep.checks["nonsingular_point"] = check_nonsingular_point(opt)
    else:
        rep.checks["genus"] = check_genus(opt, primes)
        if opt.maps:
            rep.checks["nonsingular_point"] = check_nonsingular_point(opt)
    if not opt.maps:
        # nothing to substitute: the genus check alone carries the report
        rep.checks.pop("maps")
    return rep
