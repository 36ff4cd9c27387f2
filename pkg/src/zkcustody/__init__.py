"""Zero-knowledge chain of custody for physical objects.

Each object's id is the MiMC7 hash of a secret nonce.  A transition from a
parent object to a child is proven with a Groth16 proof of knowledge of the
parent nonce, and the ledger accepts only records whose proof and signature
verify.
"""

from .field import P, genesis_id, hash1, id_of, random_nonce
from .ledger import CustodyRecord, Ledger, TraceResult, make_record
from .relation import Proof, PublicIO, Witness, build_relation, eval_relation, prove, setup, verify

__all__ = [
    "P",
    "CustodyRecord",
    "Ledger",
    "Proof",
    "PublicIO",
    "TraceResult",
    "Witness",
    "build_relation",
    "eval_relation",
    "genesis_id",
    "hash1",
    "id_of",
    "make_record",
    "prove",
    "random_nonce",
    "setup",
    "verify",
]
