"""Scalar-field arithmetic and the MiMC-7 identity hash.

Identities are ``id = hash1(nonce)`` where ``hash1`` is circomlib's MiMC7
with 91 rounds and key 0 over the BN254 scalar field.  Values are plain
Python ints in ``[0, P)``.
"""

from __future__ import annotations

import random
import secrets
from functools import lru_cache

from Crypto.Hash import keccak

from .errors import FieldRangeError, ZeroNonce

P = 21888242871839275222246405745257275088548364400416034343698204186575808495617

FieldElement = int
Nonce = int
ObjectId = int

MIMC_ROUNDS = 91
MIMC_SEED = b"mimc"


def _keccak256(data: bytes) -> bytes:
    return keccak.new(digest_bits=256, data=data).digest()


@lru_cache(maxsize=1)
def mimc_constants() -> tuple[int, ...]:
    """Round constants: c[0] = 0, then an iterated keccak chain from the seed."""
    out = [0]
    c = _keccak256(MIMC_SEED)
    for _ in range(1, MIMC_ROUNDS):
        c = _keccak256(c)
        out.append(int.from_bytes(c, "big") % P)
    return tuple(out)


def mimc7(x: int, k: int = 0) -> int:
    cts = mimc_constants()
    for i in range(MIMC_ROUNDS):
        t = (x + k + cts[i]) % P
        x = pow(t, 7, P)
    return (x + k) % P


def hash1(x: FieldElement) -> FieldElement:
    check(x)
    return mimc7(x, 0)


def id_of(nonce: Nonce) -> ObjectId:
    check(nonce)
    if nonce == 0:
        raise ZeroNonce("nonce 0 is reserved for the genesis parent")
    return mimc7(nonce, 0)


@lru_cache(maxsize=1)
def genesis_id() -> ObjectId:
    """Synthetic parent id of every tree: the hash of nonce 0."""
    return mimc7(0, 0)


def random_nonce(rng: random.Random | None = None) -> Nonce:
    """Uniform nonzero field element. ``rng`` is only for seeded tests."""
    if rng is None:
        return 1 + secrets.randbelow(P - 1)
    return rng.randrange(1, P)


def check(x) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FieldRangeError(f"field element must be int, got {type(x).__name__}")
    if not 0 <= x < P:
        raise FieldRangeError("value outside the scalar field")
    return x


# --- encodings -------------------------------------------------------------


def to_bytes(x: FieldElement) -> bytes:
    return check(x).to_bytes(32, "big")


def from_bytes(data: bytes) -> FieldElement:
    if len(data) != 32:
        raise FieldRangeError(f"expected 32 bytes, got {len(data)}")
    x = int.from_bytes(data, "big")
    if x >= P:
        raise FieldRangeError("encoded value is not reduced")
    return x


def to_decimal(x: FieldElement) -> str:
    return str(check(x))


def from_decimal(text: str) -> FieldElement:
    if not text or not text.isascii() or not text.isdigit():
        raise FieldRangeError(f"not an unsigned decimal: {text!r}")
    if len(text) > 1 and text[0] == "0":
        raise FieldRangeError("leading zeros are not canonical")
    return check(int(text))


def to_hex(x: FieldElement) -> str:
    return "0x" + to_bytes(x).hex()


def from_hex(text: str) -> FieldElement:
    if not text.startswith("0x") or len(text) != 66:
        raise FieldRangeError("expected 0x-prefixed 32-byte hex")
    try:
        raw = bytes.fromhex(text[2:])
    except ValueError:
        raise FieldRangeError("invalid hex digits") from None
    return from_bytes(raw)
