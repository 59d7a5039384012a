"""Command line: models, invariants, searches, the quintic check and pipeline runs.

Exit codes: 0 success, 1 a proof-relevant check failed, 2 usage error,
3 search budget exceeded (partial statistics are printed).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import List, Optional

from .certs import CertStore, plain, strip_timing

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=None, help="search node budget")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", default=None, help="write the JSON result here")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--cache", default=None, help="certificate directory (default $X1MN_CACHE)")
    common.add_argument("--no-timing", action="store_true", help="drop timing fields from the output")

    ap = argparse.ArgumentParser(prog="x1mn", description="Modular curves X1(m, mn): models and low-degree points")
    sub = ap.add_subparsers(dest="cmd", required=True)

    model = sub.add_parser("model", help="build or verify plane models")
    msub = model.add_subparsers(dest="model_cmd", required=True)
    b = msub.add_parser("build", parents=[common])
    b.add_argument("m", type=int)
    b.add_argument("n", type=int)
    b.add_argument("--route", choices=("auto", "family", "general"), default="auto")
    v = msub.add_parser("verify", parents=[common])
    v.add_argument("raw", help="model file, or raw:m,n")
    v.add_argument("opt", help="model file, or printed:NAME")
    v.add_argument("--primes", type=int, nargs="*", default=None)

    i = sub.add_parser("invariants", parents=[common])
    i.add_argument("m", type=int)
    i.add_argument("n", type=int)

    g = sub.add_parser("gonality", parents=[common])
    g.add_argument("m", type=int)
    g.add_argument("n", type=int)
    g.add_argument("--prime", type=int, required=True)
    g.add_argument("--degree", type=int, required=True)
    g.add_argument("--exact", action="store_true", help="functions of degree exactly d")
    g.add_argument("--model", default="auto", help="raw, general, printed:NAME or a model file")

    w = sub.add_parser("wdr", parents=[common])
    w.add_argument("m", type=int)
    w.add_argument("n", type=int)
    w.add_argument("--prime", type=int, required=True)
    w.add_argument("--d", type=int, required=True)
    w.add_argument("--r", type=int, required=True)
    w.add_argument("--model", default="auto")

    c = sub.add_parser("cusp-search", parents=[common])
    c.add_argument("m", type=int)
    c.add_argument("n", type=int)
    c.add_argument("--degree", type=int, required=True)
    c.add_argument("--primes", type=int, nargs="*", default=None)
    c.add_argument("--rational-cusps", type=int, nargs="*", default=None, metavar="P",
                   help="also identify the rational cusps using these primes")

    q = sub.add_parser("lemma54", parents=[common], help="order-30 points over the two quintic fields")
    q.add_argument("--perturb", type=int, default=0)

    p = sub.add_parser("pipeline", help="assemble Phi^inf(d)")
    psub = p.add_subparsers(dest="pipe_cmd", required=True)
    r = psub.add_parser("run", parents=[common])
    r.add_argument("--degree", type=int, required=True)
    r.add_argument("--no-compute", action="store_true", help="fail instead of computing missing certificates")
    pv = psub.add_parser("verify", parents=[common])
    pv.add_argument("file")
    pv.add_argument("--deep", action="store_true", help="rerun every certificate")
    return ap


def _check_args(args) -> Optional[str]:
    from .algebra.finite import is_prime
    if args.threads < 1:
        return "--threads must be at least 1"
    if getattr(args, "m", 1) < 1 or getattr(args, "n", 1) < 1:
        return "m and n must be positive"
    if getattr(args, "prime", None) is not None and not is_prime(args.prime):
        return f"{args.prime} is not prime"
    return None


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "cache", "no_timing")}
    return cfg


def _model_for(m: int, n: int, spec: str = "auto"):
    from .certs import build_model
    from .models.optimized import read_model
    if spec == "auto":
        spec = "raw" if m in (1, 2, 3, 4) else "general"
    if spec in ("raw", "general") or spec.startswith("printed:"):
        return build_model(m, n, spec)
    if os.path.exists(spec) or os.path.exists(spec + ".json"):
        return read_model(spec)
    raise UsageError(f"unknown model {spec!r}")


def _named_model(spec: str):
    from .models.optimized import printed_model, read_model
    from .models.raw import raw_model
    if spec.startswith("raw:"):
        m, n = (int(x) for x in spec[4:].split(","))
        return raw_model(m, n)
    if spec.startswith("printed:"):
        return printed_model(spec[len("printed:"):])
    if os.path.exists(spec) or os.path.exists(spec + ".json"):
        return read_model(spec)
    raise UsageError(f"cannot read model {spec!r}")


# -- subcommands: each returns (payload, exit code, text) ---------------------

def cmd_model_build(args):
    from .models.optimized import write_model
    from .models.raw import general_model, raw_model
    t0 = time.time()
    route = args.route
    if route == "auto":
        route = "family" if args.m in (1, 2, 3, 4) else "general"
    M = raw_model(args.m, args.n) if route == "family" else general_model(args.m, args.n)
    out = M.to_json()
    out.update({"poly": M.poly.fmt(), "terms": len(M.poly.terms),
                "bidegree": [M.poly.degree(v) for v in M.vars], "wall_time": round(time.time() - t0, 3)})
    if args.out:
        base = args.out[:-5] if args.out.endswith(".json") else args.out
        out["files"] = list(write_model(M, base))
        args.out = None   # the model files are the artifact
    text = f"X1({args.m},{args.m * args.n}): {out['terms']} terms, bidegree {out['bidegree']}\n{out['poly']}"
    return out, EXIT_OK, text


def cmd_model_verify(args):
    from .models.optimized import verify_model
    raw, opt = _named_model(args.raw), _named_model(args.opt)
    rep = verify_model(raw, opt, args.primes)
    out = rep.to_json()
    lines = [f"{k}: {'ok' if c.get('ok') else 'FAIL' if c.get('ok') is False else 'skipped'}"
             for k, c in rep.checks.items()]
    return out, EXIT_OK if rep.ok else EXIT_FAIL, "\n".join(lines)


def cmd_invariants(args):
    from .invariants import invariants, rank_zero
    inv = invariants(args.m, args.n)
    out = inv.to_json()
    out["rank_zero"] = rank_zero(args.m, args.n).value
    text = (f"X1({args.m},{args.m * args.n}): index {inv.index}, cusps {inv.cusps}, genus {inv.genus}, "
            f"bound {out['bound']}, rank zero {out['rank_zero']}")
    return out, EXIT_OK, text


def cmd_gonality(args):
    from .funcfield.curve import reduce_model
    from .funcfield.search import DEFAULT_BUDGET, gonality_search
    C = reduce_model(_model_for(args.m, args.n, args.model), args.prime)
    res = gonality_search(C, args.degree, budget=args.budget or DEFAULT_BUDGET, exact=args.exact)
    out = {"outcome": "Found" if res.found else "NoneOfDegreeAtMost", "d": args.degree,
           "genus": C.genus(), "certificate": res.certificate}
    if res.found:
        out["degree"] = res.degree
        text = f"Found: function of degree {res.degree} over F_{C.q}"
    else:
        text = f"NoneOfDegreeAtMost({args.degree}) over F_{C.q}" + (" (exact degree)" if args.exact else "")
    return out, EXIT_OK, text


def cmd_wdr(args):
    from .funcfield.curve import reduce_model
    from .funcfield.search import DEFAULT_BUDGET, wdr_count
    C = reduce_model(_model_for(args.m, args.n, args.model), args.prime)
    count, cert = wdr_count(C, args.d, args.r, budget=args.budget or DEFAULT_BUDGET, with_cert=True)
    return {"count": count, "certificate": cert}, EXIT_OK, f"#W_{args.d}^{args.r}(F_{C.q}) = {count}"


def cmd_cusp_search(args):
    from .funcfield.cusps import cuspidal_function_search, rational_cusps
    from .funcfield.search import DEFAULT_BUDGET
    M = _model_for(args.m, args.n)
    res = cuspidal_function_search(M, args.degree, args.primes, budget=args.budget or DEFAULT_BUDGET)
    res["per_prime"] = {str(k): v for k, v in res["per_prime"].items()}
    text = "empty: no cusp-supported function of degree <= %d" % args.degree if res["proved_empty"] else \
        "functions found at every prime tried"
    if args.rational_cusps:
        rc = rational_cusps(M, args.rational_cusps)
        rc["per_prime"] = {str(k): v for k, v in rc["per_prime"].items()}
        res["rational_cusps"] = rc
        text += f"\nrational cusps: {rc['count']} identified (upper bound {rc['upper_bound']})"
    return res, EXIT_OK, text


def cmd_lemma54(args):
    from .pipeline import lemma54_check
    rep = lemma54_check(args.perturb)
    lines = []
    for p in rep["points"]:
        lines.append(f"{p['field']}: order {p.get('order')}, 2-torsion {p.get('two_torsion')}"
                     + ("" if p["ok"] else f"  FAIL {p.get('discrepancy') or p.get('error')}"))
    return rep, EXIT_OK if rep["ok"] else EXIT_FAIL, "\n".join(lines)


def cmd_pipeline_run(args):
    from .pipeline import MissingCertificate, phi_infinity
    if args.degree < 1:
        raise UsageError("--degree must be positive")
    store = CertStore(args.cache)
    try:
        res = phi_infinity(args.degree, store, compute=not args.no_compute, threads=args.threads,
                           budget=args.budget)
    except MissingCertificate as exc:
        out = {"error": "MissingCertificate", "missing": exc.missing}
        return out, EXIT_FAIL, str(exc)
    out = res.to_json()
    lines = [out["table"]]
    if out["unresolved"]:
        lines.append("unresolved: " + ", ".join(f"({a},{b})" for a, b in out["unresolved"]))
    for e in out["entries"]:
        lines.append(f"  {e['label']:>9} {e['decision']:<10} {e['rule']}")
    return out, EXIT_OK if not out["unresolved"] else EXIT_FAIL, "\n".join(lines)


def cmd_pipeline_verify(args):
    from .pipeline import verify_result
    with open(args.file) as fh:
        result = json.load(fh)
    rep = verify_result(result, CertStore(args.cache), deep=args.deep)
    text = "verified" if rep["ok"] else "FAILED\n" + "\n".join(rep["problems"])
    return rep, EXIT_OK if rep["ok"] else EXIT_FAIL, text


DISPATCH = {
    ("model", "build"): cmd_model_build,
    ("model", "verify"): cmd_model_verify,
    ("invariants", None): cmd_invariants,
    ("gonality", None): cmd_gonality,
    ("wdr", None): cmd_wdr,
    ("cusp-search", None): cmd_cusp_search,
    ("lemma54", None): cmd_lemma54,
    ("pipeline", "run"): cmd_pipeline_run,
    ("pipeline", "verify"): cmd_pipeline_verify,
}


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    from .funcfield.search import BudgetExceeded
    from .models.raw import UnsupportedRange
    stdout = stdout or sys.stdout
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    key = (args.cmd, getattr(args, "model_cmd", None) or getattr(args, "pipe_cmd", None))
    problem = _check_args(args)
    if problem:
        print(f"x1mn: {problem}", file=sys.stderr)
        return EXIT_USAGE
    try:
        payload, code, text = DISPATCH[key](args)
    except (UsageError, UnsupportedRange, FileNotFoundError) as exc:
        print(f"x1mn: {exc}", file=sys.stderr)
        ap.print_usage(sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        payload = {"error": "BudgetExceeded", "message": str(exc), "stats": exc.stats}
        print(json.dumps({"config": _config(args), **payload}, indent=1, sort_keys=True, default=plain), file=stdout)
        return EXIT_BUDGET
    if isinstance(payload, dict):
        payload = json.loads(json.dumps({**payload, "config": _config(args)}, default=plain))
        if args.no_timing:
            payload = strip_timing(payload)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True, default=plain)
    if args.format == "text":
        print(text, file=stdout)
    else:
        print(json.dumps(payload, indent=1, sort_keys=True, default=plain), file=stdout)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
