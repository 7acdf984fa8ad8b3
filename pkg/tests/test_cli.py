import json
import subprocess
import sys

import pytest

from mfrf import cli, zoo
from mfrf.classify import InvariantViolation, Verdict
from mfrf.cli import run
from mfrf.elo import apply_sequence
from mfrf.gje import mfrf_reduce
from mfrf.jsonio import certificate_from_json, state_from_json, state_to_json


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj), encoding="utf-8")
    return str(p)


def state_file(tmp_path, name, state):
    return write(tmp_path, name, state_to_json(state))


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    docs = [json.loads(line) for line in out.splitlines() if line.strip()]
    return code, docs, err


def test_equiv_lme_ghz(tmp_path, capsys):
    a = state_file(tmp_path, "lme4.json", zoo.lme_elementary(4, -1))
    b = state_file(tmp_path, "ghz4.json", zoo.ghz(4))
    code, docs, _ = invoke(capsys, "equiv", a, b)
    assert code == 0 and docs[0]["verdict"] == "equivalent"
    cert = certificate_from_json(docs[0]["certificate"])
    assert apply_sequence(zoo.lme_elementary(4, -1), cert).equal_up_to_global_scale(zoo.ghz(4))


def test_equiv_inequivalent_and_pairs(tmp_path, capsys):
    g = state_file(tmp_path, "g.json", zoo.ghz(3))
    w = state_file(tmp_path, "w.json", zoo.w(3))
    code, docs, _ = invoke(capsys, "equiv", g, w, g, g, "--jobs", "2")
    assert code == 0
    assert [d["verdict"] for d in docs] == ["inequivalent", "equivalent"]
    assert docs[0]["witness"]["site_ranks_a"] == [2, 2, 2]


def test_equiv_unknown_exit_code(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(cli, "slocc_equivalent", lambda a, b, n: Verdict("unknown", reason="no fixed point"))
    g = state_file(tmp_path, "g.json", zoo.ghz(3))
    code, docs, _ = invoke(capsys, "equiv", g, g)
    assert code == 2 and docs == [{"verdict": "unknown", "reason": "no fixed point"}]


def test_invariant_violation_exit_3(tmp_path, capsys, monkeypatch):
    def broken(*args):
        raise InvariantViolation("replay mismatch")

    monkeypatch.setattr(cli, "slocc_equivalent", broken)
    g = state_file(tmp_path, "g.json", zoo.ghz(3))
    code, docs, err = invoke(capsys, "equiv", g, g)
    assert code == 3 and docs == [] and "replay mismatch" in err


def test_classify3_w(tmp_path, capsys):
    code, docs, _ = invoke(capsys, "classify3", state_file(tmp_path, "w.json", zoo.w(3)))
    assert code == 0 and docs[0]["class"] == "W"


def test_verify_v1_mu(tmp_path, capsys):
    v1 = state_file(tmp_path, "v1.json", zoo.hypergraph_named("V1"))
    mu = state_file(tmp_path, "mu.json", zoo.hypergraph_named("MU"))
    # L_4(0,-1,1) acts first, then L_3(1,1,0)
    cert = write(tmp_path, "cert_v1.json", [
        {"site": 4, "op": "L", "args": [0, "-1", 1]},
        {"site": 3, "op": "L", "args": [1, "1", 0]},
    ])
    code, docs, _ = invoke(capsys, "verify", v1, mu, cert)
    assert code == 0 and docs == [True]
    code, docs, _ = invoke(capsys, "verify", mu, v1, cert)
    assert code == 0 and docs == [False]


def test_reduce_roundtrip_and_trace(tmp_path, capsys):
    path = state_file(tmp_path, "h3.json", zoo.hypergraph_named("H3_QUTRIT"))
    code, docs, err = invoke(capsys, "reduce", path, "--trace")
    assert code == 0
    doc = docs[0]
    assert state_from_json(doc["reduced"]) == mfrf_reduce(zoo.hypergraph_named("H3_QUTRIT")).reduced
    cert = certificate_from_json(doc["certificate"])
    assert len(err.splitlines()) == len(cert)
    out = apply_sequence(zoo.hypergraph_named("H3_QUTRIT"), cert)
    assert out.equal_up_to_global_scale(state_from_json(doc["reduced"]))


def test_reduce_float(tmp_path, capsys):
    path = state_file(tmp_path, "w.json", zoo.w(3))
    code, docs, _ = invoke(capsys, "reduce", path, "--float", "--tol", "1e-9")
    assert code == 0
    assert all("float" in t["amp"] for t in docs[0]["reduced"]["terms"])


def test_decompose(tmp_path, capsys):
    m = write(tmp_path, "m.json", [["1", "0", "0"], ["2", "1", "0"], ["0", "4", "5"]])
    code, docs, _ = invoke(capsys, "decompose", m)
    assert code == 0
    assert docs[0] == [
        {"site": 1, "op": "S", "args": [2, "5"]},
        {"site": 1, "op": "L", "args": [1, "4", 2]},
        {"site": 1, "op": "L", "args": [0, "2", 1]},
    ]


def test_zoo(capsys):
    code, docs, _ = invoke(capsys, "zoo")
    assert code == 0 and "ghz" in docs[0]["families"]
    code, docs, _ = invoke(capsys, "zoo", "ghz", "3", "3")
    assert state_from_json(docs[0]) == zoo.ghz(3, 3)
    code, docs, _ = invoke(capsys, "zoo", "lme", "3", "zeta:8:1")
    assert code == 0 and len(docs[0]["terms"]) == 8
    code, docs, _ = invoke(capsys, "zoo", "named", "v18")
    assert state_from_json(docs[0]) == zoo.hypergraph_named("V18")
    code, docs, _ = invoke(capsys, "zoo", "hankel", "3", "2", "1", "1", "0", "0")
    assert state_from_json(docs[0]) == zoo.hankel_state(3, 2, [1, 1, 0, 0])


@pytest.mark.parametrize("argv", [
    ["zoo", "nope"], ["zoo", "ghz", "x"], ["zoo", "named", "V2"], ["zoo", "lme", "3", "zeta:8"],
    ["bogus"], ["reduce", "/nonexistent.json"], ["reduce", "x", "--max-passes", "0"],
])
def test_malformed_input_exit_1(argv, capsys):
    code, _, err = invoke(capsys, *argv)
    assert code == 1 and err


def test_malformed_files_exit_1(tmp_path, capsys):
    bad_json = tmp_path / "bad.json"
    bad_json.write_text("{", encoding="utf-8")
    assert run(["reduce", str(bad_json)]) == 1
    wrong = write(tmp_path, "wrong.json", {"dims": [2, 2], "terms": [{"idx": [0, 9], "amp": "1"}]})
    assert run(["reduce", wrong]) == 1
    singular = write(tmp_path, "s.json", [["1", "2"], ["2", "4"]])
    assert run(["decompose", singular]) == 1
    g = state_file(tmp_path, "g.json", zoo.ghz(3))
    assert run(["equiv", g]) == 1
    assert run(["classify3", state_file(tmp_path, "q.json", zoo.ghz(2, 3))]) == 1
    capsys.readouterr()


def test_console_entry_point(tmp_path):
    path = state_file(tmp_path, "w.json", zoo.w(3))
    proc = subprocess.run([sys.executable, "-m", "mfrf.cli", "classify3", path], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["class"] == "W"
    assert proc.stdout.endswith("\n")
