import json
import os
from fractions import Fraction

import pytest

from x1mn.algebra.rings import euler_phi
from x1mn.certs import CertStore, cert_id, check_record, compute, result_digest, strip_timing
from x1mn.cli import run
from x1mn.invariants import genus, index_formula, invariants, psl2_index
from x1mn.models.optimized import read_model, write_model
from x1mn.models.raw import raw_model


def _cli(argv):
    import io
    buf = io.StringIO()
    code = run(argv, stdout=buf)
    return code, buf.getvalue()


# -- invariants ---------------------------------------------------------------

def test_worked_examples():
    assert invariants(1, 7).index == 24
    inv = invariants(2, 15)
    assert inv.index == 576 and inv.bound == Fraction(2925, 512)


@pytest.mark.parametrize("m,n", [(1, n) for n in range(5, 40)] + [(2, n) for n in range(2, 20)]
                         + [(3, n) for n in range(1, 8)] + [(4, n) for n in range(1, 6)] + [(6, 1), (6, 2)])
def test_index_routes_agree(m, n):
    assert psl2_index(m, n) == index_formula(m, n)


def _genus_x1(N):
    # closed form for X1(N), N >= 5
    s = Fraction(N * N, 24)
    for p in {p for p in range(2, N + 1) if N % p == 0 and all(p % k for k in range(2, p))}:
        s *= 1 - Fraction(1, p * p)
    s -= Fraction(sum(euler_phi(d) * euler_phi(N // d) for d in range(1, N + 1) if N % d == 0), 4)
    return 1 + s


@pytest.mark.parametrize("N", range(5, 60))
def test_genus_x1_closed_form(N):
    assert genus(1, N) == _genus_x1(N)


def test_known_small_genera():
    assert [genus(1, N) for N in (11, 13, 23)] == [1, 2, 12]
    assert genus(2, 7) == 4 and genus(2, 9) == 7


# -- certificates -------------------------------------------------------------

def test_cert_ids_and_digests(tmp_path):
    params = {"m": 2, "n": 15}
    rec = compute("invariants", params)
    assert rec["id"] == cert_id("invariants", params)
    assert rec["id"] != cert_id("invariants", {"m": 2, "n": 14})
    assert rec["digest"] == result_digest(rec["result"])
    assert result_digest({**rec["result"], "wall_time": 9.0}) == rec["digest"]
    store = CertStore(str(tmp_path))
    store.save(rec)
    back = store.load(rec["id"])
    assert check_record(back, deep=True)["ok"]
    back["result"]["index"] += 1
    assert not check_record(back)["digest_ok"]
    back = store.load(rec["id"])
    back["params"]["n"] = 14
    assert not check_record(back)["id_ok"]
    assert store.ids() == [rec["id"]]


def test_strip_timing_nested():
    obj = {"a": 1, "elapsed": 2, "b": [{"timestamp": 3, "c": 4}]}
    assert strip_timing(obj) == {"a": 1, "b": [{"c": 4}]}


# -- CLI ----------------------------------------------------------------------

def _strip_config(text):
    js = json.loads(text)
    js.get("config", {}).pop("threads", None)
    return strip_timing(js)


def test_cli_deterministic_modulo_timing_and_threads():
    a = _cli(["gonality", "2", "7", "--prime", "3", "--degree", "2"])
    b = _cli(["gonality", "2", "7", "--prime", "3", "--degree", "2", "--threads", "2"])
    assert a[0] == b[0] == 0
    assert _strip_config(a[1]) == _strip_config(b[1])


def test_cli_budget_exit_code():
    code, out = _cli(["gonality", "2", "9", "--prime", "5", "--degree", "4", "--exact", "--budget", "10"])
    assert code == 3
    assert "budget" in out.lower()


def test_cli_usage_errors():
    assert _cli(["invariants", "0", "3"])[0] == 2
    assert _cli(["gonality", "2", "7", "--prime", "9", "--degree", "2"])[0] == 2
    assert _cli(["model", "verify", "raw:2,7", "no-such-file"])[0] == 2


def test_model_file_round_trip(tmp_path):
    base = str(tmp_path / "x1_2_14")
    code, out = _cli(["model", "build", "2", "7", "--out", base + ".json"])
    assert code == 0
    assert os.path.exists(base + ".txt") and os.path.exists(base + ".json")
    back = read_model(base)
    M = raw_model(2, 7)
    assert back.poly == M.poly and (back.m, back.n) == (2, 7)
    write_model(back, str(tmp_path / "again"))
    assert read_model(str(tmp_path / "again")).poly == M.poly
    code, _ = _cli(["model", "verify", "raw:2,7", "printed:X1(2,14)"])
    assert code == 0
