"""Assemble the sets Phi^inf(d) from cited facts and computed certificates.

For each admissible m (phi(m) | d) the labels (m, n) are scanned in n.  Each
label gets a decision and an evidence entry: the rule applied and the facts
it consumed, keyed by role.  Facts are either cited (a registry below) or
computed (a certificate id plus the digest of its result).  A verifier
replays every rule from the recorded facts, re-derives every computed fact
from its stored certificate and, optionally, reruns the certificates.

Decisions, with dm = d / phi(m) the degree over Q(zeta_m):
  yes  a function of degree k with k * phi(m) | d exists over Q(zeta_m)
       (genus <= 1 with a rational point, an explicit function on a verified
       model, or a composition through a forgetful map);
  no   B(m, mn) > 2 dm; or rank zero and B > dm; or rank zero and an F_p
       certificate excluding functions of degree <= dm; or one of the two
       special arguments for (2,18) at d=5 and (2,30) at d=6; or genus > 1
       when dm = 1.
Labels with m = 1 follow the cited classification.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .algebra.rings import euler_phi
from .certs import (CertStore, cert_id, check_record, ensure_all)
from .invariants import rank_zero, tail_bound, weil_filter
from .lowdegree import quintic_torsion_check

RESULT_VERSION = "1"


class MissingCertificate(LookupError):
    """Raised when certificates are absent and computing them is disabled."""

    def __init__(self, missing: List[dict]):
        self.missing = missing
        names = ", ".join(f"{j['kind']}{_short(j['params'])} [{j['purpose']}]" for j in missing)
        super().__init__(f"{len(missing)} certificate(s) missing: {names}")


def _short(params):
    keys = [k for k in ("m", "n", "p", "d", "r", "mode", "model", "primes") if k in params]
    return "(" + ", ".join(f"{k}={params[k]}" for k in keys) + ")"


# -- cited facts ----------------------------------------------------------------

M1_MEMBERS = {
    5: [n for n in range(1, 26) if n != 23],
    6: [n for n in range(1, 31) if n not in (23, 25, 29)],
}

CITED_DEGREE3 = (16, 18, 20)   # X1(N) over Q with a function of degree 3 (rank zero, N in Phi^inf(3))


def cited_fact(key: str) -> dict:
    """The cited registry; keys look like 'rank-zero(2,9)' or 'm1-classification(5)'."""
    name, _, arg = key.partition("(")
    args = tuple(int(a) for a in arg.rstrip(")").split(",") if a) if arg else ()
    if name == "m1-classification":
        d = args[0]
        if d not in M1_MEMBERS:
            raise KeyError(key)
        data = {"d": d, "members": M1_MEMBERS[d]}
        st = f"(1,n) in Phi^inf({d}) exactly for the listed n"
    elif name == "rank-zero":
        m, n = args
        rf = rank_zero(m, n)
        data = {"m": m, "n": n, "rank_zero": rf.value is True}
        st = f"J1({m},{m * n}) has rank zero over Q(zeta_{m})" if rf.value is True else \
            f"no rank-zero fact for J1({m},{m * n})"
    elif name == "rational-cusp":
        m, n = args
        data = {"m": m, "n": n}
        st = f"X1({m},{m * n}) has a Q(zeta_{m})-rational cusp"
    elif name == "degree-three":
        (N,) = args
        if N not in CITED_DEGREE3:
            raise KeyError(key)
        data = {"N": N, "degree": 3}
        st = f"Q(X1({N})) contains a function of degree 3"
    elif name == "low-degree-points" and args == (30,):
        data = {"degree_below": 6, "classes": 2}
        st = ("every non-cuspidal point of degree < 6 on X1(30) lies in the Galois orbit of "
              "one of the two quintic points (up to (Z/30)^* multiples of P0)")
    elif name == "finiteness":
        data = {}
        st = "a curve of genus > 1 over a number field has finitely many rational points"
    else:
        raise KeyError(key)
    return {"id": "cited:" + key, "provenance": "cited", "statement": st, "data": data}


def _cited_key(fid: str) -> str:
    return fid[len("cited:"):]


# -- computed facts ---------------------------------------------------------------

def extract(kind: str, params: dict, result: dict) -> dict:
    """The part of a certificate result a rule consumes."""
    if kind == "invariants":
        return {"genus": result["genus"], "index": result["index"], "bound": result["bound"]}
    if kind == "fp_gonality":
        out = {"outcome": result["outcome"], "d": result["d"], "q": result["q"],
               "mode": params.get("mode", "at_most")}
        if "degree" in result:
            out["degree"] = result["degree"]
        return out
    if kind == "wdr":
        return {"count": result["count"], "d": result["d"], "r": result["r"], "q": result["q"]}
    if kind == "place_data":
        return {"N1": result["N"][0], "degree_one_cusps": result["degree_one_cusps"], "q": result["q"]}
    if kind == "function_degree":
        return {"Q_degree": result["Q_degree"], "model_ok": result["model_ok"],
                "consistent": result["consistent"], "function": params["num"] + " / " + params.get("den", "1"),
                "model": params.get("model", "raw")}
    if kind == "units":
        return {"Q_degrees": [x["Q"] for x in result["degrees"]],
                "Fp_degrees": [x["Fp"] for x in result["degrees"]],
                "pairwise_distinct": result["pairwise_distinct"]}
    if kind == "rational_cusps":
        return {"count": result["count"], "upper_bound": result["upper_bound"], "complete": result["complete"]}
    if kind == "cusp_search":
        return {"proved_empty": result["proved_empty"], "d": result["d"]}
    if kind == "quintic_points":
        return {"ok": result["ok"], "degree_lower_bound": result["degree_lower_bound"]}
    if kind == "tail_bound":
        return {"from_n": result["from_n"]}
    raise KeyError(kind)


def computed_fact(record: dict, statement: str) -> dict:
    return {"id": "computed:" + record["id"], "provenance": "computed", "cert": record["id"],
            "digest": record["digest"], "statement": statement,
            "data": extract(record["kind"], record["params"], record["result"])}


# -- plan: which certificates each label needs -------------------------------------

# explicit functions: (model, numerator, denominator, prime for the F_p cross-check)
EXPLICIT = {
    (2, 7): [("printed:X1(2,14)", "u - v", "1", 11), ("printed:X1(2,14)", "u", "1", 11)],
    (2, 8): [("raw", "q", "1", 3)],
}
PLANNED_DEGREE = {("printed:X1(2,14)", "u - v"): 5, ("printed:X1(2,14)", "u"): 3, ("raw", "q"): 5}

# F_p gonality certificates: label -> (p, model)
FP_PLAN = {
    5: {(2, 10): (3, "raw"), (2, 11): (3, "raw"), (2, 12): (5, "raw"), (2, 13): (3, "raw")},
    6: {(2, 11): (3, "raw"), (2, 12): (5, "raw"), (2, 13): (3, "raw"), (2, 14): (3, "raw"),
        (3, 5): (7, "raw"), (4, 3): (5, "raw"), (6, 2): (5, "general")},
}

# forgetful maps X1(m, mn) -> X1(mn) (or X1(mn)/Q(zeta_m))
COMPOSITION = {6: {(2, 8): (1, 16), (2, 9): (1, 18), (2, 10): (1, 20), (3, 4): (1, 12)}}

UNITS_X1_2_18 = [
    {"q^2*t + 2*q + t": -1, "q^4*t - 4*q^2*t - 4*q - t": -1,
     "q^3*t + 3*q^2*t - q*t + 4*q + t": 1, "q^3*t - 3*q^2*t - q*t - 4*q - t": 1},
    {"t": 1, "q": -1, "q + 1": 1, "q - 1": 1, "q^2*t + 2*q + t": -1,
     "q^3*t + 3*q^2*t - q*t + 4*q + t": -1, "q^4*t + 4*q^3 + 6*q^2*t + 4*q + t": 1},
    {"t": 1, "q": -1, "q + 1": 1, "q - 1": 1, "q^2*t + 2*q + t": -1,
     "q^3*t - 3*q^2*t - q*t - 4*q - t": -1, "q^4*t + 4*q^3 + 6*q^2*t + 4*q + t": 1},
]

SPECIAL = {
    (5, (2, 9)): {
        "rule": "degree_five_on_X1(2,18)",
        "jobs": {
            "exact_degree": ("fp_gonality", {"m": 2, "n": 9, "p": 5, "d": 5, "mode": "exact", "model": "raw"}),
            "gonality_four": ("fp_gonality", {"m": 2, "n": 9, "p": 5, "d": 4, "mode": "at_most", "model": "raw"}),
            "gonality_three": ("fp_gonality", {"m": 2, "n": 9, "p": 5, "d": 3, "mode": "at_most", "model": "raw"}),
            "w52": ("wdr", {"m": 2, "n": 9, "p": 5, "d": 5, "r": 2, "model": "raw"}),
            "w41": ("wdr", {"m": 2, "n": 9, "p": 5, "d": 4, "r": 1, "model": "raw"}),
            "units": ("units", {"m": 2, "n": 9, "p": 5, "units": UNITS_X1_2_18, "model": "raw"}),
            "points": ("place_data", {"m": 2, "n": 9, "p": 5, "model": "raw"}),
            "rational_cusps": ("rational_cusps", {"m": 2, "n": 9, "primes": [5, 11, 7], "model": "raw"}),
        },
    },
    (6, (2, 15)): {
        "rule": "cuspidal_degree_six_on_X1(2,30)",
        "jobs": {
            "quintic_points": ("quintic_points", {}),
            "rational_cusps": ("rational_cusps", {"m": 2, "n": 15, "primes": [17, 23, 7], "model": "raw"}),
            "cusp_search": ("cusp_search", {"m": 2, "n": 15, "d": 6, "primes": [7], "model": "raw"}),
        },
        "cited": {"low_degree_points": "low-degree-points(30)"},
    },
}


def fp_params(m, n, d):
    p, model = FP_PLAN[d][(m, n)]
    return {"m": m, "n": n, "p": p, "d": d // euler_phi(m), "mode": "at_most", "model": model}


def inv_params(m, n):
    return {"m": m, "n": n}


def explicit_jobs(m, n, d):
    out = []
    for model, num, den, p in EXPLICIT.get((m, n), []):
        k = PLANNED_DEGREE[(model, num)]
        if d % (k * euler_phi(m)) == 0:
            out.append(("function_degree", {"m": m, "n": n, "model": model, "num": num, "den": den, "p": p}))
    return out


# -- rules -----------------------------------------------------------------------------

def _dm(m, d) -> Fraction:
    return Fraction(d, euler_phi(m))


def rule_m1(m, n, d, F):
    return "yes" if n in F["classification"]["members"] else "no"


def rule_finite(m, n, d, F):
    # X1(m, mn) covers X1(m, m), so its genus is at least that of X1(m, m)
    if _dm(m, d) == 1 and F["base_invariants"]["genus"] > 1 and "finiteness" in F:
        return "no"
    return None


def rule_low_genus(m, n, d, F):
    g = F["invariants"]["genus"]
    if "rational_point" not in F:
        return None
    dm = _dm(m, d)
    if dm.denominator == 1 and (g == 0 or (g == 1 and dm >= 2)):
        return "yes"
    return None


def rule_explicit(m, n, d, F):
    f = F["function"]
    if f["model_ok"] and f["consistent"] and d % (f["Q_degree"] * euler_phi(m)) == 0:
        return "yes"
    return None


def rule_composition(m, n, d, F):
    src, tgt = F["invariants"]["index"], F["target_invariants"]["index"]
    if src % tgt:
        return None
    k1 = src // tgt
    if "target_function" in F:
        k2 = F["target_function"]["degree"]
    elif F["target_invariants"]["genus"] == 0 and "target_point" in F:
        k2 = 1
    else:
        return None
    return "yes" if k1 * k2 == _dm(m, d) else None


def rule_bound(m, n, d, F):
    if Fraction(F["invariants"]["bound"]) > 2 * _dm(m, d):
        return "no"
    return None


def rule_bound_rank(m, n, d, F):
    if F["rank"]["rank_zero"] and Fraction(F["invariants"]["bound"]) > _dm(m, d):
        return "no"
    return None


def rule_fp(m, n, d, F):
    c = F["certificate"]
    if F["rank"]["rank_zero"] and c["outcome"] == "none" and c["mode"] == "at_most" and c["d"] >= _dm(m, d):
        return "no"
    return None


def rule_degree_five(m, n, d, F):
    """Conditions of the reduction criterion at p = d = 5 for X1(2,18).

    Injectivity of J(Q) -> J(F_5) (rank zero); no F_5 function of degree
    exactly 5; W_5^2(F_5) empty; gonality 4 over F_5 and W_4^1(F_5) of size 3,
    each class hit by a unit over Q of degree 4; every F_5-point the reduction
    of a rational cusp.
    """
    ok = (F["rank"]["rank_zero"]
          and F["exact_degree"]["outcome"] == "none" and F["exact_degree"]["mode"] == "exact"
          and F["exact_degree"]["d"] == 5
          and F["w52"]["count"] == 0
          and F["gonality_three"]["outcome"] == "none" and F["gonality_four"]["outcome"] == "found"
          and F["w41"]["count"] == 3
          and F["units"]["Q_degrees"] == [4, 4, 4] and F["units"]["Fp_degrees"] == [4, 4, 4]
          and F["units"]["pairwise_distinct"]
          and F["rational_cusps"]["complete"]
          and F["points"]["N1"] == F["points"]["degree_one_cusps"] == F["rational_cusps"]["count"])
    return "no" if ok and (m, n, d) == (2, 9, 5) else None


def rule_cuspidal_six(m, n, d, F):
    """X1(2,30): rank zero, no non-cuspidal points of degree < 6 (quintic check),
    so a degree-6 function can be moved to one with cuspidal divisor using two
    rational cusps; the cusp-supported search finds none."""
    ok = (F["rank"]["rank_zero"] and F["quintic_points"]["ok"]
          and F["quintic_points"]["degree_lower_bound"] >= 6
          and "low_degree_points" in F
          and F["rational_cusps"]["complete"] and F["rational_cusps"]["count"] >= 2
          and F["cusp_search"]["proved_empty"] and F["cusp_search"]["d"] >= 6)
    return "no" if ok and (m, n, d) == (2, 15, 6) else None


def rule_tail(m, n, d, F):
    """All n >= from_n have B(m, mn) > 2 dm."""
    return "no" if n >= F["tail"]["from_n"] else None


RULES = {
    "m1_classification": rule_m1,
    "finite_points": rule_finite,
    "low_genus": rule_low_genus,
    "explicit_function": rule_explicit,
    "composition": rule_composition,
    "gonality_bound": rule_bound,
    "rank_zero_bound": rule_bound_rank,
    "fp_certificate": rule_fp,
    "degree_five_on_X1(2,18)": rule_degree_five,
    "cuspidal_degree_six_on_X1(2,30)": rule_cuspidal_six,
    "bound_tail": rule_tail,
}


# -- assembling ---------------------------------------------------------------------

@dataclass
class Entry:
    m: int
    n: int
    decision: str
    rule: Optional[str]
    facts: Dict[str, str] = field(default_factory=dict)
    tail: bool = False
    missing: List[str] = field(default_factory=list)

    def to_json(self):
        out = {"m": self.m, "n": self.n, "label": f"({self.m},{self.m * self.n})",
               "decision": self.decision, "rule": self.rule, "facts": dict(sorted(self.facts.items()))}
        if self.tail:
            out["tail"] = True
        if self.missing:
            out["missing"] = self.missing
        return out


@dataclass
class PhiResult:
    degree: int
    members: List[Tuple[int, int]]
    entries: List[Entry]
    facts: Dict[str, dict]
    config: dict = field(default_factory=dict)

    @property
    def unresolved(self):
        return [e for e in self.entries if e.decision == "unresolved"]

    def to_json(self):
        return {"version": RESULT_VERSION, "degree": self.degree,
                "members": [[m, m * n] for m, n in self.members],
                "unresolved": [[e.m, e.m * e.n] for e in self.unresolved],
                "entries": [e.to_json() for e in self.entries],
                "facts": dict(sorted(self.facts.items())), "config": self.config,
                "table": format_table(self.degree, self.members)}


class _Assembler:
    def __init__(self, d, store, compute, threads, budget):
        self.d, self.store, self.compute = d, store, compute
        self.threads, self.budget = threads, budget
        self.facts: Dict[str, dict] = {}
        self.records: Dict[str, dict] = {}

    # planning pass: every job any label could need
    def plan(self, pairs, m_list):
        jobs = []
        for m, n in pairs:
            jobs.extend(self.jobs_for(m, n))
        for m in m_list:
            if m > 1:
                jobs.append(("tail_bound", {"m": m, "d": self.d}))
                jobs.append(("invariants", inv_params(m, 1)))
        return jobs

    def jobs_for(self, m, n):
        d = self.d
        out = [("invariants", inv_params(m, n))]
        out.extend(explicit_jobs(m, n, d))
        if (m, n) in COMPOSITION.get(d, {}):
            out.append(("invariants", inv_params(*COMPOSITION[d][(m, n)])))
        if (m, n) in FP_PLAN.get(d, {}):
            out.append(("fp_gonality", fp_params(m, n, d)))
        if (d, (m, n)) in SPECIAL:
            out.extend(SPECIAL[(d, (m, n))]["jobs"].values())
        return out

    def load(self, jobs, purposes):
        missing = []
        for kind, params in jobs:
            cid = cert_id(kind, params)
            if not self.store.has(cid):
                missing.append({"kind": kind, "params": params, "id": cid, "purpose": purposes.get(cid, "")})
        if missing and not self.compute:
            seen, uniq = set(), []
            for j in missing:
                if j["id"] not in seen:
                    seen.add(j["id"])
                    uniq.append(j)
            raise MissingCertificate(uniq)
        self.records.update(ensure_all(self.store, jobs, self.threads, self.budget))

    def computed(self, kind, params, statement):
        rec = self.records[cert_id(kind, params)]
        f = computed_fact(rec, statement)
        self.facts[f["id"]] = f
        return f

    def cited(self, key):
        f = cited_fact(key)
        self.facts[f["id"]] = f
        return f

    def decide(self, m, n) -> Entry:
        d = self.d
        label = f"X1({m},{m * n})"
        inv = self.computed("invariants", inv_params(m, n), f"index, genus and gonality bound of {label}")
        base = {"invariants": inv}
        candidates = []
        # memberships
        if inv["data"]["genus"] <= 1:
            candidates.append(("low_genus", {**base, "rational_point": self.cited(f"rational-cusp({m},{n})")}))
        for kind, params in explicit_jobs(m, n, d):
            f = self.computed(kind, params, f"degree over Q of {params['num']} on {params['model']} ({label})")
            candidates.append(("explicit_function", {**base, "function": f}))
        if (m, n) in COMPOSITION.get(d, {}):
            tm, tn = COMPOSITION[d][(m, n)]
            tinv = self.computed("invariants", inv_params(tm, tn), f"index and genus of X1({tm * tn})")
            F = {**base, "target_invariants": tinv}
            if tm * tn in CITED_DEGREE3:
                F["target_function"] = self.cited(f"degree-three({tm * tn})")
            else:
                F["target_point"] = self.cited(f"rational-cusp({tm},{tn})")
            candidates.append(("composition", F))
        # exclusions
        rank = self.cited(f"rank-zero({m},{n})")
        candidates.append(("gonality_bound", base))
        candidates.append(("rank_zero_bound", {**base, "rank": rank}))
        if (m, n) in FP_PLAN.get(d, {}):
            p = fp_params(m, n, d)
            f = self.computed("fp_gonality", p, f"no function of degree <= {p['d']} on {label} over F_{p['p']}")
            candidates.append(("fp_certificate", {**base, "rank": rank, "certificate": f}))
        if (d, (m, n)) in SPECIAL:
            spec = SPECIAL[(d, (m, n))]
            F = {"rank": rank}
            for role, (kind, params) in spec["jobs"].items():
                F[role] = self.computed(kind, params, f"{role.replace('_', ' ')} for {label}")
            for role, key in spec.get("cited", {}).items():
                F[role] = self.cited(key)
            candidates.append((spec["rule"], F))
        for rule, F in candidates:
            dec = RULES[rule](m, n, d, {k: v["data"] for k, v in F.items()})
            if dec is not None:
                return Entry(m, n, dec, rule, {k: v["id"] for k, v in F.items()})
        return Entry(m, n, "unresolved", None, {"invariants": inv["id"]},
                     missing=["no applicable membership or exclusion certificate"])


def _scan_pairs(d: int):
    """(m, n) for n below the tail start, per admissible m > 1."""
    pairs, ms = [], []
    for m in weil_filter(d):
        ms.append(m)
        if m == 1:
            continue
        if _dm(m, d) == 1 and m > 6:
            continue
        t = tail_bound(m, d)
        pairs.extend((m, n) for n in range(1, t["from_n"]))
    return pairs, ms


def phi_infinity(d: int, store: Optional[CertStore] = None, compute: bool = True,
                 threads: int = 1, budget: Optional[int] = None) -> PhiResult:
    store = store or CertStore()
    A = _Assembler(d, store, compute, threads, budget)
    pairs, ms = _scan_pairs(d)
    jobs = A.plan(pairs, ms)
    purposes = {}
    for m, n in pairs:
        for kind, params in A.jobs_for(m, n):
            purposes.setdefault(cert_id(kind, params), f"({m},{m * n})")
    A.load(jobs, purposes)
    entries: List[Entry] = []
    for m in ms:
        if m == 1:
            if d in M1_MEMBERS:
                f = A.cited(f"m1-classification({d})")
                for n in M1_MEMBERS[d]:
                    entries.append(Entry(1, n, "yes", "m1_classification", {"classification": f["id"]}))
                entries.append(Entry(1, 0, "no", "m1_classification", {"classification": f["id"]}, tail=True))
            else:
                entries.append(Entry(1, 0, "unresolved", None, tail=True,
                                     missing=["classification of (1,n) not in the cited registry"]))
            continue
        if _dm(m, d) == 1 and m > 6:
            inv = A.computed("invariants", inv_params(m, 1), f"genus of X1({m},{m})")
            F = {"base_invariants": inv, "finiteness": A.cited("finiteness")}
            dec = rule_finite(m, 1, d, {k: v["data"] for k, v in F.items()})
            entries.append(Entry(m, 1, dec or "unresolved", "finite_points" if dec else None,
                                 {k: v["id"] for k, v in F.items()}, tail=True))
            continue
        for mm, n in pairs:
            if mm == m:
                entries.append(A.decide(m, n))
        tail = A.computed("tail_bound", {"m": m, "d": d}, f"B(m,mn) > {2 * _dm(m, d)} for m={m} from the tail on")
        entries.append(Entry(m, tail["data"]["from_n"], "no", "bound_tail", {"tail": tail["id"]}, tail=True))
    members = sorted((e.m, e.n) for e in entries if e.decision == "yes" and not e.tail)
    config = {"degree": d, "compute": compute}
    return PhiResult(d, members, entries, A.facts, config)


def degree_function_exists(m: int, n: int, d: int, store: Optional[CertStore] = None,
                           compute: bool = True, budget: Optional[int] = None) -> dict:
    """Decision for one label: {'decision': yes|no|unresolved, 'rule', 'facts'}."""
    if d % euler_phi(m):
        raise ValueError(f"phi({m}) does not divide {d}")
    store = store or CertStore()
    A = _Assembler(d, store, compute, 1, budget)
    if m == 1:
        if d not in M1_MEMBERS:
            return {"decision": "unresolved", "rule": None, "facts": {}}
        f = A.cited(f"m1-classification({d})")
        return {"decision": rule_m1(m, n, d, {"classification": f["data"]}), "rule": "m1_classification",
                "facts": {f["id"]: f}}
    jobs = A.jobs_for(m, n)
    if _dm(m, d) == 1 and m > 6:
        jobs = [("invariants", inv_params(m, 1))]
    A.load(jobs, {})
    if _dm(m, d) == 1 and m > 6:
        inv = A.computed("invariants", inv_params(m, 1), f"genus of X1({m},{m})")
        F = {"base_invariants": inv["data"], "finiteness": A.cited("finiteness")["data"]}
        dec = rule_finite(m, n, d, F)
        return {"decision": dec or "unresolved", "rule": "finite_points", "facts": A.facts}
    e = A.decide(m, n)
    return {"decision": e.decision, "rule": e.rule, "evidence": e.to_json(), "facts": A.facts}


# -- text layout -----------------------------------------------------------------------

def format_table(d: int, members: List[Tuple[int, int]]) -> str:
    by_m: Dict[int, List[int]] = {}
    for m, n in members:
        by_m.setdefault(m, []).append(n)
    parts, singles = [], []
    for m in sorted(by_m):
        ns = sorted(by_m[m])
        lab = "n" if m == 1 else f"{m}n"
        if ns[0] == 1 and len(ns) >= 3:
            top = ns[-1]
            holes = [k for k in range(1, top + 1) if k not in ns]
            cond = f"1<=n<={top}" + (", n!=" + ",".join(map(str, holes)) if holes else "")
            parts.append(f"{{({m},{lab}): {cond}}}")
        else:
            singles.extend(f"({m},{m * n})" for n in ns)
    if singles:
        parts.append("{" + ",".join(singles) + "}")
    return f"Phi^inf({d}) = " + " u ".join(parts)


# -- verification ---------------------------------------------------------------------

def verify_result(result: dict, store: Optional[CertStore] = None, deep: bool = False) -> dict:
    """Replay every evidence entry of a PhiResult JSON."""
    store = store or CertStore()
    d = result["degree"]
    facts = result["facts"]
    problems: List[str] = []
    checked_certs: Dict[str, dict] = {}
    for fid, f in sorted(facts.items()):
        if f["provenance"] == "cited":
            try:
                ref = cited_fact(_cited_key(fid))
            except KeyError:
                problems.append(f"{fid}: not in the cited registry")
                continue
            if ref["data"] != f["data"]:
                problems.append(f"{fid}: cited data differs from the registry")
        elif f["provenance"] == "computed":
            cid = f["cert"]
            if not store.has(cid):
                problems.append(f"{fid}: certificate {cid} not in store")
                continue
            rec = store.load(cid)
            chk = check_record(rec, deep=deep)
            checked_certs[cid] = chk
            if not chk["ok"]:
                problems.append(f"{fid}: certificate check failed {chk}")
            if rec["digest"] != f["digest"]:
                problems.append(f"{fid}: digest does not match the stored certificate")
            if extract(rec["kind"], rec["params"], rec["result"]) != f["data"]:
                problems.append(f"{fid}: fact data not derivable from its certificate")
        else:
            problems.append(f"{fid}: no provenance")
    members = set()
    for e in result["entries"]:
        rule = e["rule"]
        if e["decision"] == "unresolved":
            problems.append(f"{e['label']}: unresolved")
            continue
        if rule not in RULES:
            problems.append(f"{e['label']}: unknown rule {rule}")
            continue
        missing = [fid for fid in e["facts"].values() if fid not in facts]
        if missing:
            problems.append(f"{e['label']}: facts missing {missing}")
            continue
        F = {role: facts[fid]["data"] for role, fid in e["facts"].items()}
        if e.get("tail") and e["m"] == 1:
            continue
        if RULES[rule](e["m"], e["n"], d, F) != e["decision"]:
            problems.append(f"{e['label']}: rule {rule} does not reproduce {e['decision']}")
        if e["decision"] == "yes":
            members.add((e["m"], e["m"] * e["n"]))
    # coverage: every scanned label has an entry, every admissible m a tail
    ms = weil_filter(d)
    tails = {e["m"] for e in result["entries"] if e.get("tail")}
    for m in ms:
        if m not in tails:
            problems.append(f"m={m}: no tail entry")
    for e in result["entries"]:
        if e.get("tail") and e["m"] > 1 and e["rule"] == "bound_tail":
            n1 = facts[e["facts"]["tail"]]["data"]["from_n"]
            have = {x["n"] for x in result["entries"] if x["m"] == e["m"] and not x.get("tail")}
            if have != set(range(1, n1)):
                problems.append(f"m={e['m']}: labels below the tail are not all decided")
    if members != {tuple(x) for x in result["members"]}:
        problems.append("member list does not match the replayed decisions")
    return {"ok": not problems, "problems": problems, "certificates_checked": len(checked_certs),
            "deep": deep}


def lemma54_check(perturb: int = 0) -> dict:
    """Name kept for the command line; see quintic_torsion_check."""
    return quintic_torsion_check(perturb)
