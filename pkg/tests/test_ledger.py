import copy
import json
import random
import threading
from dataclasses import replace

import pytest

from zkcustody import crypto, field
from zkcustody.crypto import Signature
from zkcustody.errors import (
    BrokenChain,
    CorruptLedger,
    CycleDetected,
    DuplicateId,
    IoError,
    NotFound,
    ProofInvalid,
    Rejected,
    SignatureInvalid,
    UnknownParent,
    ZeroId,
)
from zkcustody.field import P, genesis_id
from zkcustody.ledger import CustodyRecord, Ledger, fingerprint, make_record
from zkcustody.relation import Proof


@pytest.fixture
def recs(world):
    return world["records"]


@pytest.fixture
def ledger(vk, recs):
    lg = Ledger(vk)
    for name in ("tree1", "log1", "log2", "tree2"):
        lg.register(recs[name])
    return lg


def _snapshot(lg):
    return len(lg), dict(lg._by_id), {k: list(v) for k, v in lg._children.items()}


def test_tree_then_log(vk, recs):
    lg = Ledger(vk)
    tree = lg.register(recs["tree1"])
    assert tree.p_id == genesis_id()
    log = lg.register(recs["log1"])
    assert log.p_id == tree.w_id
    assert len(lg) == 2


def test_get(ledger, recs):
    before = _snapshot(ledger)
    assert ledger.get(recs["log1"].w_id) == recs["log1"]
    with pytest.raises(NotFound):
        ledger.get(12345)
    assert _snapshot(ledger) == before


def test_children(ledger, recs):
    assert ledger.children(recs["tree1"].w_id) == [recs["log1"], recs["log2"]]
    assert ledger.children(genesis_id()) == [recs["tree1"], recs["tree2"]]
    assert ledger.children(99) == []


def test_trace(ledger, recs):
    result = ledger.trace(recs["log2"].w_id)
    assert [r.w_id for r in result.chain] == [recs["log2"].w_id, recs["tree1"].w_id]
    assert result.verified and result.failures == []
    assert result.chain[-1].p_id == genesis_id()
    assert result.registrants == [recs["log2"].registrant, recs["tree1"].registrant]
    assert len(ledger.trace(recs["tree2"].w_id).chain) == 1
    with pytest.raises(NotFound):
        ledger.trace(7)


def test_flipped_proof_byte(vk, recs, alice):
    rec = recs["orphan"]
    lg = Ledger(vk, strict_parent=False)
    proof = bytearray(rec.proof)
    proof[100] ^= 0x01
    bad = make_record(alice, Proof(bytes(proof)), rec.public_io)
    with pytest.raises(ProofInvalid):
        lg.register(bad)
    assert len(lg) == 0


def test_zero_id(vk, recs, prove_record, bob):
    lg = Ledger(vk)
    lg.register(recs["tree1"])
    rec, _ = prove_record(bob, recs["tree1"].w_id, 424242, random.Random(1))
    assert rec.w_id == 0
    with pytest.raises(ZeroId):
        lg.register(rec)
    assert len(lg) == 1


def test_duplicate(ledger, recs):
    with pytest.raises(DuplicateId):
        ledger.register(recs["log1"])


def test_unknown_parent_strict(vk, recs):
    lg = Ledger(vk)
    with pytest.raises(UnknownParent):
        lg.register(recs["log1"])
    with pytest.raises(UnknownParent):
        lg.register(recs["orphan"])


def test_permissive_accepts_orphan_but_trace_breaks(vk, recs):
    lg = Ledger(vk, strict_parent=False)
    lg.register(recs["orphan"])
    with pytest.raises(BrokenChain):
        lg.trace(recs["orphan"].w_id)


def test_signature_checks(vk, recs, alice, bob):
    lg = Ledger(vk)
    tree = recs["tree1"]
    # claims alice but signed by bob
    forged = replace(tree, signature=crypto.sign(bob.private_key, tree.message()))
    with pytest.raises(SignatureInvalid):
        lg.register(forged)
    # claims bob with alice's signature
    with pytest.raises(SignatureInvalid):
        lg.register(replace(tree, registrant=bob.address))
    garbage = replace(tree, signature=Signature(1, 1, 0))
    with pytest.raises(SignatureInvalid):
        lg.register(garbage)
    assert len(lg) == 0


def test_substituted_ids_rejected(vk, recs, alice):
    lg = Ledger(vk)
    tree = recs["tree1"]
    moved = CustodyRecord((tree.w_id + 1) % P, tree.p_id, tree.proof, tree.signature, tree.registrant)
    resigned = replace(moved, signature=crypto.sign(alice.private_key, moved.message()))
    for rec in (moved, resigned):
        with pytest.raises(Rejected) as info:
            lg.register(rec)
        assert info.value.reason in ("proof-invalid", "signature-invalid")
    assert len(lg) == 0


def test_rejection_atomicity(ledger, recs):
    before = _snapshot(ledger)
    bad = [
        recs["log1"],
        replace(recs["orphan"]),
        replace(recs["tree2"], w_id=0),
        replace(recs["tree2"], w_id=5),
        replace(recs["tree2"], w_id=5, signature=Signature(1, 1, 0)),
    ]
    for rec in bad:
        with pytest.raises(Rejected):
            ledger.register(rec)
        assert _snapshot(ledger) == before


def test_forgery_resistance(vk, recs, alice, bob):
    """Without the parent nonce, replayed or random proofs never register a child."""
    lg = Ledger(vk)
    parent = lg.register(recs["tree1"])
    r = random.Random(61)
    sources = [recs[n] for n in ("log1", "log2", "tree2", "orphan")]
    accepted = 0
    for i in range(100):
        w_id = r.randrange(1, P)
        kind = i % 3
        if kind == 0:
            proof = r.choice(sources).proof
        elif kind == 1:
            proof = r.randbytes(256)
        else:
            proof = bytearray(r.choice(sources).proof)
            proof[r.randrange(256)] ^= r.randrange(1, 256)
            proof = bytes(proof)
        msg = crypto.custody_message(w_id, parent.w_id, proof)
        signer = r.choice([alice, bob])
        rec = CustodyRecord(w_id, parent.w_id, proof, crypto.sign(signer.private_key, msg), signer.address)
        try:
            lg.register(rec)
            accepted += 1
        except Rejected:
            pass
    assert accepted == 0
    assert len(lg) == 1


def test_audit(ledger):
    assert ledger.audit() == []


def test_trace_flags_tampered_storage(ledger, recs):
    lg = copy.copy(ledger)
    tampered = replace(recs["tree1"], signature=Signature(1, 1, 0))
    lg._by_id = dict(ledger._by_id)
    lg._by_id[tampered.w_id] = tampered
    result = lg.trace(recs["log1"].w_id)
    assert not result.verified
    assert result.failures == [f"{tampered.w_id}: signature-invalid"]


def test_cycle_detection(vk, recs):
    lg = Ledger(vk)
    a = replace(recs["tree1"], p_id=recs["log1"].w_id)
    b = recs["log1"]
    lg._by_id = {a.w_id: a, b.w_id: b}
    with pytest.raises(CycleDetected):
        lg.trace(b.w_id)


def test_save_load_round_trip(tmp_path, ledger, vk):
    path = tmp_path / "ledger.json"
    ledger.save(path)
    loaded = Ledger.load(path, vk)
    assert loaded == ledger
    assert loaded.children(genesis_id()) == ledger.children(genesis_id())
    doc = json.loads(path.read_text())
    assert doc["version"] == 1
    assert doc["verification_key_fingerprint"] == fingerprint(vk)
    row = doc["records"][0]
    assert set(row) == {"w_id", "p_id", "proof", "signature", "registrant"}
    assert row["p_id"] == str(genesis_id())
    assert row["proof"].startswith("0x") and len(row["proof"]) == 2 + 512


def test_load_empty(vk):
    text = json.dumps({"version": 1, "verification_key_fingerprint": fingerprint(vk), "records": []})
    assert len(Ledger.from_json(text, vk)) == 0


def test_edit_proof_hex_character(ledger, vk):
    doc = json.loads(ledger.to_json())
    hexstr = doc["records"][1]["proof"]
    i = 40
    doc["records"][1]["proof"] = hexstr[:i] + ("0" if hexstr[i] != "0" else "1") + hexstr[i + 1 :]
    with pytest.raises(CorruptLedger):
        Ledger.from_json(json.dumps(doc), vk)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(version=2),
        lambda d: d.update(verification_key_fingerprint="0x" + "00" * 32),
        lambda d: d.update(records={}),
        lambda d: d["records"].append({"w_id": "1"}),
        lambda d: d["records"].append(d["records"][0]),
        lambda d: d["records"].reverse(),
        lambda d: d["records"][0].update(w_id="0" + d["records"][0]["w_id"]),
        lambda d: d["records"][0].update(proof=d["records"][0]["proof"].upper().replace("0X", "0x")),
        lambda d: d["records"][0].update(extra=1),
        lambda d: d["records"][0].update(registrant=d["records"][2]["registrant"]),
        lambda d: d["records"][0].update(signature="0x" + "11" * 65),
        lambda d: d["records"].pop(0),
    ],
)
def test_corrupt_files(ledger, vk, mutate):
    doc = json.loads(ledger.to_json())
    mutate(doc)
    with pytest.raises(CorruptLedger):
        Ledger.from_json(json.dumps(doc), vk)


def test_load_other_vk(ledger, other_vk):
    with pytest.raises(CorruptLedger):
        Ledger.from_json(ledger.to_json(), other_vk)


def test_invalid_json(vk):
    with pytest.raises(CorruptLedger):
        Ledger.from_json("{", vk)


def test_io_errors(tmp_path, ledger, vk):
    with pytest.raises(IoError):
        Ledger.load(tmp_path / "missing.json", vk)
    with pytest.raises(IoError):
        ledger.save(tmp_path / "no" / "such" / "dir.json")


def test_no_nonce_in_serialized_ledger(world, vk, recs):
    lg = Ledger(vk, strict_parent=False)
    for rec in recs.values():
        lg.register(rec)
    text = lg.to_json().encode()
    for n in world["nonces"]:
        raw = field.to_bytes(n)
        assert raw not in text
        assert raw.hex().encode() not in text
        assert str(n).encode() not in text


def test_concurrent_registration(vk, recs):
    lg = Ledger(vk)
    lg.register(recs["tree1"])
    outcomes = []

    def worker(rec):
        try:
            lg.register(rec)
            outcomes.append("ok")
        except DuplicateId:
            outcomes.append("dup")

    threads = [threading.Thread(target=worker, args=(recs[n],)) for n in ("log1", "log1", "log2", "log2", "tree2")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(outcomes) == ["dup", "dup", "ok", "ok", "ok"]
    assert len(lg) == 4


def test_record_json_round_trip(recs):
    for rec in recs.values():
        assert CustodyRecord.from_json(rec.to_json()) == rec
