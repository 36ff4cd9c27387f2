"""Actor identities on secp256k1: keys, addresses, signatures, hybrid encryption.

Addresses follow the Ethereum convention (last 20 bytes of the Keccak-256 of
the uncompressed public key without its prefix byte).  Signatures are
recoverable ECDSA over ``keccak256(message)`` with low-s normalization.

Hybrid encryption: ephemeral-static ECDH, HKDF-SHA-256 over the shared x
coordinate, AES-256-GCM with a random 12-byte iv and the ephemeral public key
as associated data.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from dataclasses import dataclass
from pathlib import Path

import coincurve
from Crypto.Hash import keccak
from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from .errors import AuthFailure, InvalidPoint
from .util import atomic_write

CURVE_ORDER = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
HALF_ORDER = CURVE_ORDER // 2
MESSAGE_TAG = b"WTRACE1"
_HKDF_INFO = b"zkcustody/ecies/v1"


def keccak256(data: bytes) -> bytes:
    return keccak.new(digest_bits=256, data=data).digest()


@dataclass(frozen=True)
class Address:
    raw: bytes

    def __post_init__(self):
        if len(self.raw) != 20:
            raise ValueError("address must be 20 bytes")

    def __str__(self):
        return "0x" + self.raw.hex()

    @classmethod
    def from_hex(cls, text: str) -> "Address":
        if not text.startswith("0x") or len(text) != 42:
            raise ValueError(f"bad address {text!r}")
        return cls(bytes.fromhex(text[2:]))


@dataclass(frozen=True)
class KeyPair:
    private_key: bytes
    public_key: bytes  # compressed, 33 bytes

    @property
    def address(self) -> Address:
        return address_of(self.public_key)

    def __repr__(self):
        return f"KeyPair(address={self.address})"

    def to_json(self) -> str:
        return json.dumps(
            {
                "private_key": "0x" + self.private_key.hex(),
                "public_key": "0x" + self.public_key.hex(),
                "address": str(self.address),
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "KeyPair":
        try:
            doc = json.loads(text)
            kp = from_private_key(bytes.fromhex(doc["private_key"].removeprefix("0x")))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ValueError(f"malformed key file: {exc!r}") from None
        if "public_key" in doc and doc["public_key"] != "0x" + kp.public_key.hex():
            raise ValueError("key file public key does not match its private key")
        if "address" in doc and doc["address"].lower() != str(kp.address):
            raise ValueError("key file address does not match its private key")
        return kp

    def save(self, path: Path | str) -> None:
        atomic_write(path, self.to_json().encode(), mode=0o600)

    @classmethod
    def load(cls, path: Path | str) -> "KeyPair":
        return cls.from_json(Path(path).read_text())


def from_private_key(secret: bytes | int) -> KeyPair:
    if isinstance(secret, int):
        if not 0 < secret < CURVE_ORDER:
            raise ValueError("private key out of range")
        secret = secret.to_bytes(32, "big")
    if len(secret) != 32 or not 0 < int.from_bytes(secret, "big") < CURVE_ORDER:
        raise ValueError("private key out of range")
    sk = coincurve.PrivateKey(secret)
    return KeyPair(secret, sk.public_key.format(compressed=True))


def keygen(rng: random.Random | None = None) -> KeyPair:
    if rng is None:
        return from_private_key(coincurve.PrivateKey().secret)
    return from_private_key(rng.randrange(1, CURVE_ORDER))


def _public(public_key: bytes) -> coincurve.PublicKey:
    try:
        return coincurve.PublicKey(bytes(public_key))
    except (ValueError, TypeError) as exc:
        raise InvalidPoint(f"not a secp256k1 public key: {exc}") from None


def address_of(public_key: bytes) -> Address:
    raw = _public(public_key).format(compressed=False)[1:]
    return Address(keccak256(raw)[-20:])


@dataclass(frozen=True)
class Signature:
    r: int
    s: int
    recovery_hint: int

    def to_bytes(self) -> bytes:
        return self.r.to_bytes(32, "big") + self.s.to_bytes(32, "big") + bytes([self.recovery_hint])

    @classmethod
    def from_bytes(cls, data: bytes) -> "Signature":
        if len(data) != 65:
            raise ValueError("signature must be 65 bytes")
        return cls(int.from_bytes(data[:32], "big"), int.from_bytes(data[32:64], "big"), data[64])

    def hex(self) -> str:
        return "0x" + self.to_bytes().hex()


def sign(private_key: bytes, message: bytes) -> Signature:
    if not message:
        raise ValueError("refusing to sign an empty message")
    raw = coincurve.PrivateKey(private_key).sign_recoverable(keccak256(message), hasher=None)
    sig = Signature.from_bytes(raw)
    assert sig.s <= HALF_ORDER  # libsecp256k1 always emits low-s
    return sig


def recover(message: bytes, sig: Signature) -> bytes:
    pub = coincurve.PublicKey.from_signature_and_message(sig.to_bytes(), keccak256(message), hasher=None)
    return pub.format(compressed=True)


def verify_sig(address: Address, message: bytes, sig: Signature) -> bool:
    try:
        if not (0 < sig.r < CURVE_ORDER and 0 < sig.s <= HALF_ORDER and sig.recovery_hint in (0, 1)):
            return False
        return address_of(recover(message, sig)) == address
    except Exception:
        return False


def custody_message(w_id: int, p_id: int, proof: bytes) -> bytes:
    """Canonical bytes a registrant signs for one ledger record."""
    return MESSAGE_TAG + w_id.to_bytes(32, "big") + p_id.to_bytes(32, "big") + hashlib.sha256(proof).digest()


# --------------------------------------------------------------------------- ECIES


@dataclass(frozen=True)
class HybridCiphertext:
    ephemeral_public_key: bytes
    iv: bytes
    body: bytes
    auth_tag: bytes

    OVERHEAD = 33 + 12 + 16

    def to_bytes(self) -> bytes:
        return self.ephemeral_public_key + self.iv + self.body + self.auth_tag

    @classmethod
    def from_bytes(cls, data: bytes) -> "HybridCiphertext":
        if len(data) < cls.OVERHEAD:
            raise ValueError("ciphertext shorter than its fixed overhead")
        return cls(data[:33], data[33:45], data[45:-16], data[-16:])


def _derive_key(shared_x: bytes, ephemeral: bytes) -> bytes:
    return HKDF(algorithm=hashes.SHA256(), length=32, salt=ephemeral, info=_HKDF_INFO).derive(shared_x)


def _shared_x(public_key: coincurve.PublicKey, secret: bytes) -> bytes:
    return public_key.multiply(secret).format(compressed=True)[1:]


def encrypt(recipient_public_key: bytes, plaintext: bytes) -> HybridCiphertext:
    recipient = _public(recipient_public_key)
    eph = coincurve.PrivateKey()
    eph_pub = eph.public_key.format(compressed=True)
    key = _derive_key(_shared_x(recipient, eph.secret), eph_pub)
    iv = os.urandom(12)
    sealed = AESGCM(key).encrypt(iv, plaintext, eph_pub)
    return HybridCiphertext(eph_pub, iv, sealed[:-16], sealed[-16:])


def decrypt(private_key: bytes, ct: HybridCiphertext) -> bytes:
    try:
        eph = coincurve.PublicKey(ct.ephemeral_public_key)
        key = _derive_key(_shared_x(eph, private_key), ct.ephemeral_public_key)
        return AESGCM(key).decrypt(ct.iv, ct.body + ct.auth_tag, ct.ephemeral_public_key)
    except (InvalidTag, ValueError, TypeError):
        raise AuthFailure("ciphertext failed authentication") from None
