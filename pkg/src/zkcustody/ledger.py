"""Append-only custody ledger that stores only fully verified records.

A record is appended iff its proof verifies against ``(p_id, w_id)``, its
signature verifies under the registrant address, ``w_id`` is nonzero and
unused, and (strict mode) its parent is genesis or already registered.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from . import crypto, relation
from .crypto import Address, Signature
from .errors import (
    BrokenChain,
    CorruptLedger,
    CycleDetected,
    DuplicateId,
    IoError,
    NotFound,
    ProofInvalid,
    SignatureInvalid,
    UnknownParent,
    ZeroId,
)
from .field import check, from_decimal, genesis_id
from .groth16 import VerificationKey
from .relation import Proof, PublicIO
from .util import atomic_write

FILE_VERSION = 1


@dataclass(frozen=True)
class CustodyRecord:
    w_id: int
    p_id: int
    proof: bytes
    signature: Signature
    registrant: Address

    @property
    def public_io(self) -> PublicIO:
        return PublicIO(p_id=self.p_id, w_id=self.w_id)

    def message(self) -> bytes:
        return crypto.custody_message(self.w_id, self.p_id, self.proof)

    def to_json(self) -> dict:
        return {
            "w_id": str(self.w_id),
            "p_id": str(self.p_id),
            "proof": "0x" + self.proof.hex(),
            "signature": self.signature.hex(),
            "registrant": str(self.registrant),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CustodyRecord":
        return cls(
            w_id=from_decimal(doc["w_id"]),
            p_id=from_decimal(doc["p_id"]),
            proof=_unhex(doc["proof"]),
            signature=Signature.from_bytes(_unhex(doc["signature"])),
            registrant=Address.from_hex(doc["registrant"]),
        )


def _unhex(text: str) -> bytes:
    if not isinstance(text, str) or not text.startswith("0x"):
        raise ValueError("expected 0x-prefixed hex")
    return bytes.fromhex(text[2:])


def make_record(keys: crypto.KeyPair, proof: Proof, io: PublicIO) -> CustodyRecord:
    """Sign a proof's public io as the given registrant."""
    sig = crypto.sign(keys.private_key, crypto.custody_message(io.w_id, io.p_id, proof.data))
    return CustodyRecord(io.w_id, io.p_id, proof.data, sig, keys.address)


@dataclass
class TraceResult:
    chain: list[CustodyRecord]
    verified: bool
    registrants: list[Address]
    failures: list[str] = field(default_factory=list)


def fingerprint(vk: VerificationKey) -> str:
    return "0x" + hashlib.sha256(vk.to_bytes()).hexdigest()


class Ledger:
    def __init__(self, verification_key: VerificationKey, strict_parent: bool = True):
        self.verification_key = verification_key
        self.strict_parent = strict_parent
        self._records: list[CustodyRecord] = []
        self._by_id: dict[int, CustodyRecord] = {}
        self._children: dict[int, list[CustodyRecord]] = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(list(self._records))

    def __eq__(self, other):
        if not isinstance(other, Ledger):
            return NotImplemented
        return self.verification_key == other.verification_key and self._records == other._records

    @property
    def records(self) -> tuple[CustodyRecord, ...]:
        return tuple(self._records)

    def check(self, record: CustodyRecord) -> None:
        """Raise the first applicable rejection, or return if ``record`` is acceptable."""
        check(record.w_id)
        check(record.p_id)
        if record.w_id == 0:
            raise ZeroId("w_id is 0: the parent check inside the proof failed")
        if record.w_id in self._by_id:
            raise DuplicateId(f"w_id {record.w_id} is already registered")
        if self.strict_parent and record.p_id != genesis_id() and record.p_id not in self._by_id:
            raise UnknownParent(f"parent {record.p_id} is not registered")
        self._verify(record)

    def _verify(self, record: CustodyRecord) -> None:
        if not relation.verify(self.verification_key, record.proof, record.public_io):
            raise ProofInvalid(f"proof does not verify for w_id {record.w_id}")
        if not crypto.verify_sig(record.registrant, record.message(), record.signature):
            raise SignatureInvalid(f"signature does not match registrant {record.registrant}")

    def register(self, record: CustodyRecord) -> CustodyRecord:
        with self._lock:
            self.check(record)
            self._records.append(record)
            self._by_id[record.w_id] = record
            self._children.setdefault(record.p_id, []).append(record)
        return record

    def get(self, w_id: int) -> CustodyRecord:
        try:
            return self._by_id[w_id]
        except KeyError:
            raise NotFound(f"no record for w_id {w_id}") from None

    def children(self, p_id: int) -> list[CustodyRecord]:
        return list(self._children.get(p_id, ()))

    def trace(self, w_id: int) -> TraceResult:
        """Walk parent links to genesis, re-verifying every record from stored bytes."""
        record = self.get(w_id)
        chain, failures, seen = [], [], set()
        genesis = genesis_id()
        while True:
            if record.w_id in seen:
                raise CycleDetected(f"w_id {record.w_id} reached twice")
            seen.add(record.w_id)
            chain.append(record)
            try:
                self._verify(record)
            except (ProofInvalid, SignatureInvalid) as exc:
                failures.append(f"{record.w_id}: {exc.reason}")
            if record.p_id == genesis:
                break
            parent = self._by_id.get(record.p_id)
            if parent is None:
                raise BrokenChain(f"parent {record.p_id} of {record.w_id} is not registered")
            record = parent
        return TraceResult(chain, not failures, [r.registrant for r in chain], failures)

    def audit(self) -> list[int]:
        """Ids of stored records that no longer pass verification (expected empty)."""
        bad = []
        for record in self._records:
            try:
                self._verify(record)
            except (ProofInvalid, SignatureInvalid):
                bad.append(record.w_id)
        return bad

    # ------------------------------------------------------------------ persistence

    def to_json(self) -> str:
        doc = {
            "version": FILE_VERSION,
            "verification_key_fingerprint": fingerprint(self.verification_key),
            "records": [r.to_json() for r in self._records],
        }
        return json.dumps(doc, indent=2)

    def save(self, destination: Path | str) -> None:
        try:
            atomic_write(destination, self.to_json().encode())
        except OSError as exc:
            raise IoError(f"cannot write ledger {destination}: {exc}") from exc

    @classmethod
    def from_json(cls, text: str, verification_key: VerificationKey, strict_parent: bool = True) -> "Ledger":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CorruptLedger(f"ledger is not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("version") != FILE_VERSION:
            raise CorruptLedger("unsupported ledger file version")
        if doc.get("verification_key_fingerprint") != fingerprint(verification_key):
            raise CorruptLedger("ledger was written for a different verification key")
        records = doc.get("records")
        if not isinstance(records, list):
            raise CorruptLedger("ledger records must be a list")
        ledger = cls(verification_key, strict_parent)
        for i, entry in enumerate(records):
            label = entry.get("w_id", f"#{i}") if isinstance(entry, dict) else f"#{i}"
            try:
                record = CustodyRecord.from_json(entry)
            except (KeyError, TypeError, ValueError, AttributeError) as exc:
                raise CorruptLedger(f"record {label} is malformed: {exc}") from None
            if CustodyRecord.to_json(record) != entry:
                raise CorruptLedger(f"record {label} is not in canonical form")
            try:
                ledger.register(record)
            except Exception as exc:
                raise CorruptLedger(f"record {label} failed re-verification: {exc}") from None
        return ledger

    @classmethod
    def load(cls, source: Path | str, verification_key: VerificationKey, strict_parent: bool = True) -> "Ledger":
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise IoError(f"cannot read ledger {source}: {exc}") from exc
        return cls.from_json(text, verification_key, strict_parent)
