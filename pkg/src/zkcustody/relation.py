"""The CalculateID relation as a plain function and as a proof system.

    p_hash = hash(p_nonce)
    p_eq   = (p_hash == p_id)
    w_hash = hash(w_nonce)
    w_id   = w_hash * p_eq

``p_id`` is the public input, ``w_id`` the public output, and both nonces are
private.  A zero output means the parent check failed.  Trees use
``p_nonce = 0`` and ``p_id = genesis_id()``; the circuit has no special case.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache

from . import groth16
from .errors import KeyMismatch, ZeroNonce
from .field import MIMC_ROUNDS, P, check, hash1, mimc_constants
from .groth16 import ProvingKey, VerificationKey
from .r1cs import LC, ConstraintSystem


@dataclass(frozen=True)
class PublicIO:
    p_id: int
    w_id: int

    def to_bytes(self) -> bytes:
        return self.p_id.to_bytes(32, "big") + self.w_id.to_bytes(32, "big")


@dataclass(frozen=True)
class Witness:
    p_nonce: int
    w_nonce: int

    def __post_init__(self):
        check(self.p_nonce)
        check(self.w_nonce)
        if self.w_nonce == 0:
            raise ZeroNonce("w_nonce must be nonzero")

    def __repr__(self):
        return "Witness(<redacted>)"


@dataclass(frozen=True)
class Proof:
    data: bytes

    def hex(self) -> str:
        return "0x" + self.data.hex()


def eval_relation(p_id: int, p_nonce: int, w_nonce: int) -> int:
    """Reference evaluation: ``hash1(w_nonce)`` if ``hash1(p_nonce) == p_id`` else 0."""
    check(p_id)
    check(p_nonce)
    check(w_nonce)
    if w_nonce == 0:
        raise ZeroNonce("w_nonce must be nonzero")
    p_eq = 1 if hash1(p_nonce) == p_id else 0
    return hash1(w_nonce) * p_eq % P


# --------------------------------------------------------------------------- circuit


def mimc7_gadget(cs: ConstraintSystem, x: LC, tag: str) -> LC:
    """MiMC7 with key 0: four multiplications per round (t^2, t^4, t^6, t^7)."""
    cts = mimc_constants()
    cur = x
    for i in range(MIMC_ROUNDS):
        t = cur + cts[i] if i else cur
        t2 = cs.mul(t, t, f"{tag}.t2[{i}]")
        t4 = cs.mul(t2, t2, f"{tag}.t4[{i}]")
        t6 = cs.mul(t4, t2, f"{tag}.t6[{i}]")
        cur = cs.mul(t6, t, f"{tag}.t7[{i}]")
    return cur


def is_equal_gadget(cs: ConstraintSystem, a: LC, b: LC, tag: str) -> LC:
    diff = a - b

    def inverse(w):
        d = diff.evaluate(w)
        return pow(d, -1, P) if d else 0

    inv = cs.witness(f"{tag}.inv", inverse)
    out = cs.witness(f"{tag}.out", lambda w: 0 if diff.evaluate(w) else 1)
    cs.enforce(diff, inv, 1 - out)
    cs.enforce(diff, out, 0)
    return out


@dataclass(frozen=True)
class RelationCircuit:
    cs: ConstraintSystem
    w_id: int
    p_id: int
    p_nonce: int
    w_nonce: int
    p_hash: int
    p_eq: int
    w_hash: int

    @property
    def constraint_count(self) -> int:
        return self.cs.n_constraints

    def assign(self, p_id: int, p_nonce: int, w_nonce: int) -> list[int]:
        return self.cs.solve(p_id=p_id, p_nonce=p_nonce, w_nonce=w_nonce)

    def is_satisfied(self, assignment) -> bool:
        return self.cs.is_satisfied(assignment)


def _index(lc: LC) -> int:
    (idx,) = lc.terms
    return idx


@lru_cache(maxsize=1)
def build_relation() -> RelationCircuit:
    cs = ConstraintSystem()
    w_id = cs.public("w_id", computed=True)
    p_id = cs.public("p_id")
    p_nonce = cs.private("p_nonce")
    w_nonce = cs.private("w_nonce")
    p_hash = mimc7_gadget(cs, p_nonce, "p_hash")
    p_eq = is_equal_gadget(cs, p_hash, p_id, "p_eq")
    w_hash = mimc7_gadget(cs, w_nonce, "w_hash")
    cs.bind(w_id, lambda w: w_hash.evaluate(w) * p_eq.evaluate(w))
    cs.enforce(w_hash, p_eq, w_id)
    return RelationCircuit(
        cs, _index(w_id), _index(p_id), _index(p_nonce), _index(w_nonce), _index(p_hash), _index(p_eq), _index(w_hash)
    )


# --------------------------------------------------------------------------- proof system


def setup(circuit: RelationCircuit | None = None, rng: random.Random | None = None):
    """Generate ``(ProvingKey, VerificationKey)``; pass a seeded rng for reproducible keys."""
    circuit = circuit or build_relation()
    return groth16.setup(circuit.cs, rng)


def prove(pk: ProvingKey, p_id: int, witness: Witness, rng: random.Random | None = None) -> tuple[Proof, PublicIO]:
    circuit = build_relation()
    if pk.circuit_digest != circuit.cs.digest():
        raise KeyMismatch("proving key was not generated for the custody relation")
    check(p_id)
    assignment = circuit.assign(p_id, witness.p_nonce, witness.w_nonce)
    proof = groth16.prove(pk, circuit.cs, assignment, rng)
    io = PublicIO(p_id=p_id, w_id=assignment[circuit.w_id])
    del assignment
    return Proof(proof), io


def verify(vk: VerificationKey, proof: Proof | bytes, io: PublicIO) -> bool:
    """True iff ``proof`` attests a satisfying witness for ``io``; malformed input gives False."""
    if vk.circuit_digest != build_relation().cs.digest():
        return False
    data = proof.data if isinstance(proof, Proof) else proof
    if not isinstance(data, (bytes, bytearray)):
        return False
    # public variable order is (w_id, p_id)
    return groth16.verify(vk, bytes(data), [io.w_id, io.p_id])
