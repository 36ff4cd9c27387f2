import json
import math
import os
import shutil
import stat

import pytest
from click.testing import CliRunner

from zkcustody import field
from zkcustody.cli import main
from zkcustody.field import genesis_id
from zkcustody.handoff import decode_handoff


def run(ws, *args, expect=0):
    paths = ["--ledger", str(ws / "ledger.json"), "--pk", str(ws / "proving.key"), "--vk", str(ws / "verification.key")]
    result = CliRunner().invoke(main, [*paths, *args])
    assert result.exit_code == expect, (result.output, result.exception)
    return result


@pytest.fixture(scope="module")
def keyfiles(tmp_path_factory):
    base = tmp_path_factory.mktemp("keys")
    out = run(base, "setup", "--seed", "42").output
    return base, out


@pytest.fixture
def ws(tmp_path, keyfiles):
    base, _ = keyfiles
    for name in ("proving.key", "verification.key"):
        shutil.copy(base / name, tmp_path / name)
    run(tmp_path, "--keys", str(tmp_path / "a.json"), "keygen")
    run(tmp_path, "--keys", str(tmp_path / "b.json"), "keygen")
    return tmp_path


def ledger_doc(ws):
    return json.loads((ws / "ledger.json").read_text())


def test_setup_output(keyfiles):
    _, out = keyfiles
    assert "constraints: 731" in out
    assert "verification key fingerprint: 0x" in out


def test_setup_seeded_deterministic(tmp_path, keyfiles):
    base, _ = keyfiles
    run(tmp_path, "setup", "--seed", "42")
    for name in ("proving.key", "verification.key"):
        assert (tmp_path / name).read_bytes() == (base / name).read_bytes()
    assert (tmp_path / "verification.key").read_bytes()[:8] == b"WZKVK\0\0\0"


def test_keygen(tmp_path):
    out = run(tmp_path, "--keys", str(tmp_path / "k.json"), "keygen").output.strip()
    assert out.startswith("0x") and len(out) == 42
    assert json.loads((tmp_path / "k.json").read_text())["address"] == out
    assert stat.S_IMODE(os.stat(tmp_path / "k.json").st_mode) == 0o600


def test_plant(ws, keyfiles):
    _, setup_out = keyfiles
    out = run(ws, "--keys", str(ws / "a.json"), "plant", "--tag", str(ws / "t1.wtag")).output
    assert f"p_id: {genesis_id()}" in out
    doc = ledger_doc(ws)
    assert len(doc["records"]) == 1
    assert doc["records"][0]["p_id"] == str(genesis_id())
    assert f"verification key fingerprint: {doc['verification_key_fingerprint']}" in setup_out
    assert (ws / "t1.wtag").stat().st_size == 1024
    run(ws, "--keys", str(ws / "a.json"), "plant", "--tag", str(ws / "t2.wtag"))
    doc = ledger_doc(ws)
    assert len({r["w_id"] for r in doc["records"]}) == 2


def test_plant_missing_proving_key(ws):
    os.remove(ws / "proving.key")
    result = run(ws, "--keys", str(ws / "a.json"), "plant", "--tag", str(ws / "t.wtag"), expect=2)
    assert str(ws / "proving.key") in result.output
    assert not (ws / "t.wtag").exists()
    assert not (ws / "ledger.json").exists()


def test_corrupt_proving_key(ws):
    (ws / "proving.key").write_bytes(b"garbage")
    run(ws, "--keys", str(ws / "a.json"), "plant", "--tag", str(ws / "t.wtag"), expect=2)


def fig2(ws):
    a, b = str(ws / "a.json"), str(ws / "b.json")
    run(ws, "--keys", a, "plant", "--tag", str(ws / "tree.wtag"))
    handoff = run(ws, "--keys", a, "handoff", "--tag", str(ws / "tree.wtag")).output.strip()
    run(ws, "--keys", b, "derive", "--handoff", handoff, "--tag", str(ws / "log.wtag"))
    return handoff


def test_fig2_scenario(ws):
    handoff = fig2(ws)
    assert handoff.startswith("WHND1.") and len(handoff) == 92
    tree, log = ledger_doc(ws)["records"]
    assert log["p_id"] == tree["w_id"]
    assert tree["p_id"] == str(genesis_id())
    out = run(ws, "trace", "--id", log["w_id"]).output.splitlines()
    assert out == [
        f"{log['w_id']}  {log['p_id']}  {log['registrant']}",
        f"{tree['w_id']}  {tree['p_id']}  {tree['registrant']}",
        "VERIFIED",
    ]
    assert tree["registrant"] != log["registrant"]


def test_trace_json(ws):
    fig2(ws)
    log = ledger_doc(ws)["records"][1]
    doc = json.loads(run(ws, "--json", "trace", "--id", log["w_id"]).output)
    assert doc["verified"] is True
    assert [r["w_id"] for r in doc["chain"]][0] == log["w_id"]


def test_handoff_requires_matching_key(ws):
    run(ws, "--keys", str(ws / "a.json"), "plant", "--tag", str(ws / "tree.wtag"))
    result = run(ws, "--keys", str(ws / "b.json"), "handoff", "--tag", str(ws / "tree.wtag"), expect=1)
    assert "AuthFailure" in result.output


def test_derive_mutated_handoff(ws):
    handoff = fig2(ws)
    before = (ws / "ledger.json").read_bytes()
    i = 40
    mutated = handoff[:i] + ("A" if handoff[i] != "A" else "B") + handoff[i + 1 :]
    result = run(ws, "--keys", str(ws / "b.json"), "derive", "--handoff", mutated, "--tag", str(ws / "x.wtag"), expect=1)
    assert "ConsistencyError" in result.output or "BadEncoding" in result.output
    assert (ws / "ledger.json").read_bytes() == before
    assert not (ws / "x.wtag").exists()


def test_derive_twice_from_same_handoff(ws):
    handoff = fig2(ws)
    run(ws, "--keys", str(ws / "b.json"), "derive", "--handoff", handoff, "--tag", str(ws / "log2.wtag"))
    tree, log1, log2 = ledger_doc(ws)["records"]
    assert log1["p_id"] == log2["p_id"] == tree["w_id"]
    assert log1["w_id"] != log2["w_id"]
    for rec in (log1, log2):
        assert run(ws, "trace", "--id", rec["w_id"]).output.endswith("VERIFIED\n")


def test_trace_failures(ws):
    fig2(ws)
    run(ws, "trace", "--id", "12345", expect=1)
    run(ws, "trace", "--id", "not-a-number", expect=1)


def test_trace_missing_ledger(ws):
    run(ws, "trace", "--id", "1", expect=2)


def test_tampered_ledger_file(ws):
    fig2(ws)
    doc = ledger_doc(ws)
    doc["records"][0]["signature"] = doc["records"][1]["signature"]
    (ws / "ledger.json").write_text(json.dumps(doc))
    result = run(ws, "trace", "--id", doc["records"][1]["w_id"], expect=1)
    assert "CorruptLedger" in result.output


def test_ledger_write_failure_removes_tag(ws):
    (ws / "ledger.json").mkdir()
    run(ws, "--keys", str(ws / "a.json"), "plant", "--tag", str(ws / "t.wtag"), expect=2)
    assert not (ws / "t.wtag").exists()


def test_no_nonces_in_artifacts(ws):
    handoff = fig2(ws)
    log_handoff = run(ws, "--keys", str(ws / "b.json"), "handoff", "--tag", str(ws / "log.wtag")).output.strip()
    ledger_bytes = (ws / "ledger.json").read_bytes()
    for text in (handoff, log_handoff):
        n = decode_handoff(text).p_nonce
        raw = field.to_bytes(n)
        assert raw not in ledger_bytes and raw.hex().encode() not in ledger_bytes and str(n).encode() not in ledger_bytes
        for tag in ("tree.wtag", "log.wtag"):
            assert raw not in (ws / tag).read_bytes()


def test_bench(ws):
    doc = json.loads(run(ws, "--json", "bench", "--trials", "2").output)
    assert len(doc["timings_ms"]) == 2
    assert all(t > 0 and math.isfinite(t) for t in doc["timings_ms"])
    assert doc["all_verified"] is True
    assert doc["constraints"] == 731
    out = run(ws, "bench", "--trials", "1").output
    assert "constraints: 731" in out and "mean:" in out


def test_bench_rejects_zero_trials(ws):
    run(ws, "bench", "--trials", "0", expect=2)


def test_permissive_flag_is_accepted(ws):
    fig2(ws)
    log = ledger_doc(ws)["records"][1]
    run(ws, "--permissive", "trace", "--id", log["w_id"])
