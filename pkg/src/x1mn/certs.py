"""Content-addressed certificates.

A certificate is the JSON record of one finite computation: its kind, its
parameters, the result and the digest of the curve it ran on.  The id is a
hash of (kind, parameters, version), so identical jobs share one file; the
result digest binds the stored evidence to the id.  Timing fields are kept
outside the hashed result.
"""
from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional

VERSION = "1"
TIMING_KEYS = ("wall_time", "elapsed", "timestamp")


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, (list, tuple)):
        return [strip_timing(v) for v in obj]
    return obj


def cert_id(kind: str, params: dict) -> str:
    payload = canonical({"kind": kind, "params": params, "version": VERSION})
    return kind + "-" + hashlib.sha256(payload.encode()).hexdigest()[:16]


def result_digest(result) -> str:
    return hashlib.sha256(canonical(strip_timing(result)).encode()).hexdigest()


def default_cache_dir() -> str:
    return os.environ.get("X1MN_CACHE") or os.path.join(os.path.expanduser("~"), ".cache", "x1mn")


class CertStore:
    """Directory of certificate records, one JSON file per id."""

    def __init__(self, root: Optional[str] = None):
        self.root = root or default_cache_dir()
        os.makedirs(self.root, exist_ok=True)

    def path(self, cid: str) -> str:
        return os.path.join(self.root, cid + ".json")

    def has(self, cid: str) -> bool:
        return os.path.exists(self.path(cid))

    def load(self, cid: str) -> dict:
        with open(self.path(cid)) as fh:
            return json.load(fh)

    def save(self, record: dict) -> str:
        cid = record["id"]
        tmp = self.path(cid) + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(record, fh, indent=1, sort_keys=True)
        os.replace(tmp, self.path(cid))
        return cid

    def remove(self, cid: str) -> bool:
        if self.has(cid):
            os.remove(self.path(cid))
            return True
        return False

    def ids(self) -> List[str]:
        return sorted(f[:-5] for f in os.listdir(self.root) if f.endswith(".json"))


# -- models -------------------------------------------------------------------

def build_model(m: int, n: int, model: str = "raw"):
    from .models.optimized import printed_model
    from .models.raw import general_model, raw_model
    if model == "raw":
        return raw_model(m, n)
    if model == "general":
        return general_model(m, n)
    if model.startswith("printed:"):
        return printed_model(model[len("printed:"):])
    raise ValueError(f"unknown model kind {model!r}")


def _curve(params):
    from .funcfield.curve import reduce_model
    M = build_model(params["m"], params["n"], params.get("model", "raw"))
    return M, reduce_model(M, params["p"])


# -- computations -------------------------------------------------------------

def _invariants(params, budget):
    from .invariants import invariants, rank_zero
    inv = invariants(params["m"], params["n"]).to_json()
    inv["rank"] = rank_zero(params["m"], params["n"]).to_json()
    return inv


def _fp_gonality(params, budget):
    from .funcfield.search import gonality_search
    _, C = _curve(params)
    res = gonality_search(C, params["d"], budget=budget, exact=params.get("mode") == "exact")
    out = {"outcome": "found" if res.found else "none", "d": params["d"], "q": C.q,
           "genus": C.genus(), "curve": C.to_json(), "certificate": res.certificate}
    if res.found:
        out["degree"] = res.degree
    return out


def _wdr(params, budget):
    from .funcfield.search import wdr_count
    _, C = _curve(params)
    count, cert = wdr_count(C, params["d"], params["r"], budget=budget, with_cert=True)
    return {"count": count, "d": params["d"], "r": params["r"], "q": C.q, "curve": C.to_json(),
            "certificate": cert}


def _place_data(params, budget):
    from .funcfield.cusps import cusp_divisor
    from .invariants import psl2_index
    M, C = _curve(params)
    k = params.get("k", 1)
    cusps = cusp_divisor(C, M.m, expected_degree=psl2_index(M.m, M.n))
    return {"N": C.zeta_counts(k), "q": C.q, "genus": C.genus(), "curve": C.to_json(),
            "cusp_places": len(cusps), "degree_one_cusps": sum(1 for P in cusps if P.deg == 1)}


def _function_degree(params, budget):
    from .algebra.bipoly import BiPoly, map_degree
    from .models.optimized import verify_model
    from .models.raw import raw_model
    M, C = _curve(params)
    A = BiPoly.parse(params["num"], M.vars)
    B = BiPoly.parse(params.get("den", "1"), M.vars)
    fn = C.function(params["num"], params.get("den", "1"))
    out = {"Q_degree": map_degree(M.poly, A, B), "Fp_degree": C.function_degree(fn),
           "Fp_degree_resultant": C.function_degree(fn, route="resultant"), "q": C.q,
           "curve": C.to_json()}
    if params.get("model", "raw").startswith("printed:"):
        rep = verify_model(raw_model(M.m, M.n), M)
        out["model_verification"] = rep.to_json()
        out["model_ok"] = rep.ok
    else:
        out["model_ok"] = True
    out["consistent"] = out["Q_degree"] == out["Fp_degree"] == out["Fp_degree_resultant"]
    return out


def _units(params, budget):
    from .funcfield.units import check_units
    M, C = _curve(params)
    res = check_units(M, C, params["units"])
    res["curve"] = C.to_json()
    res["q"] = C.q
    return res


def _rational_cusps(params, budget):
    from .funcfield.cusps import rational_cusps
    M = build_model(params["m"], params["n"], params.get("model", "raw"))
    res = rational_cusps(M, params["primes"])
    res["per_prime"] = {str(k): v for k, v in res["per_prime"].items()}
    return res


def _cusp_search(params, budget):
    from .funcfield.cusps import cuspidal_function_search
    M = build_model(params["m"], params["n"], params.get("model", "raw"))
    res = cuspidal_function_search(M, params["d"], params["primes"], budget=budget)
    res["per_prime"] = {str(k): v for k, v in res["per_prime"].items()}
    for v in res["per_prime"].values():
        v["stats"] = {str(k): s for k, s in v["stats"].items()}
    return res


def _tail_bound(params, budget):
    from .invariants import tail_bound
    return tail_bound(params["m"], params["d"])


def _quintic_points(params, budget):
    from .lowdegree import quintic_torsion_check
    return quintic_torsion_check()


COMPUTE: Dict[str, Callable] = {
    "invariants": _invariants,
    "fp_gonality": _fp_gonality,
    "wdr": _wdr,
    "place_data": _place_data,
    "function_degree": _function_degree,
    "units": _units,
    "rational_cusps": _rational_cusps,
    "cusp_search": _cusp_search,
    "quintic_points": _quintic_points,
    "tail_bound": _tail_bound,
}


def plain(x):
    # flint integers and rationals leak out of some certificates
    if type(x).__name__ == "fmpz":
        return int(x)
    return str(x)


def compute(kind: str, params: dict, budget: Optional[int] = None) -> dict:
    from .funcfield.search import DEFAULT_BUDGET
    if kind not in COMPUTE:
        raise KeyError(f"unknown certificate kind {kind!r}")
    t0 = time.time()
    result = COMPUTE[kind](params, budget or DEFAULT_BUDGET)
    result = json.loads(json.dumps(result, default=plain))
    return {"id": cert_id(kind, params), "kind": kind, "params": params, "version": VERSION,
            "result": result, "digest": result_digest(result),
            "timing": {"wall_time": round(time.time() - t0, 3)}}


def _compute_job(job):
    kind, params, budget = job
    return compute(kind, params, budget)


def ensure_all(store: CertStore, jobs: Iterable[tuple], threads: int = 1,
               budget: Optional[int] = None) -> Dict[str, dict]:
    """Load or compute every (kind, params) job; returns {id: record}."""
    jobs = list(jobs)
    out, todo = {}, []
    for kind, params in jobs:
        cid = cert_id(kind, params)
        if cid in out:
            continue
        if store.has(cid):
            out[cid] = store.load(cid)
        else:
            todo.append((kind, params, budget))
            out[cid] = None
    if threads > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            for rec in ex.map(_compute_job, todo):
                store.save(rec)
                out[rec["id"]] = rec
    else:
        for job in todo:
            rec = _compute_job(job)
            store.save(rec)
            out[rec["id"]] = rec
    return out


def check_record(record: dict, deep: bool = False) -> dict:
    """Id and digest binding; with ``deep`` the computation is rerun and compared."""
    out = {"id_ok": record["id"] == cert_id(record["kind"], record["params"]),
           "digest_ok": record["digest"] == result_digest(record["result"])}
    if deep:
        fresh = compute(record["kind"], record["params"])
        out["recomputed_ok"] = fresh["digest"] == record["digest"]
    out["ok"] = all(out.values())
    return out
