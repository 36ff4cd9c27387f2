"""Byte-image emulation of the NFC chip attached to each wood object.

Layout of the 1024-byte image (all integers big-endian)::

    0    "WTAG"
    4    version (0x01)
    5    3 zero bytes
    8    object id, 32 bytes
    40   ciphertext length, u16
    42   ciphertext: ephemeral key || iv || body || auth tag
    ...  zero fill

The payload (header + ciphertext) must fit in 720 bytes, the usable share of
a MIFARE Classic 1k once sector trailers are set aside.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

from . import crypto, field
from .errors import BadMagic, IdMismatch, PayloadTooLarge, TruncatedPayload, UnsupportedVersion
from .util import atomic_write

MAGIC = b"WTAG"
VERSION = 1
CAPACITY = 1024
USABLE = 720
HEADER = 42


@dataclass(frozen=True)
class TagImage:
    raw: bytes

    def __post_init__(self):
        if len(self.raw) != CAPACITY:
            raise TruncatedPayload(f"tag image must be {CAPACITY} bytes, got {len(self.raw)}")

    def save(self, path: Path | str) -> None:
        atomic_write(path, self.raw)

    @classmethod
    def load(cls, path: Path | str) -> "TagImage":
        return cls(Path(path).read_bytes())


def provision_tag(device_public_key: bytes, nonce: int) -> TagImage:
    """Write ``id_of(nonce)`` in the clear and the nonce encrypted to the device key.

    The caller is responsible for discarding its copy of ``nonce`` afterwards.
    """
    object_id = field.id_of(nonce)
    ct = crypto.encrypt(device_public_key, field.to_bytes(nonce)).to_bytes()
    return _pack(object_id, ct)


def _pack(object_id: int, ct: bytes) -> TagImage:
    if HEADER + len(ct) > USABLE:
        raise PayloadTooLarge(f"payload of {HEADER + len(ct)} bytes exceeds {USABLE}")
    head = MAGIC + bytes([VERSION, 0, 0, 0]) + field.to_bytes(object_id) + struct.pack(">H", len(ct))
    body = head + ct
    return TagImage(body + bytes(CAPACITY - len(body)))


def read_tag(tag: TagImage) -> tuple[int, crypto.HybridCiphertext]:
    raw = tag.raw
    if raw[:4] != MAGIC:
        raise BadMagic("not a wood tag image")
    if raw[4] != VERSION:
        raise UnsupportedVersion(f"tag version {raw[4]}")
    (length,) = struct.unpack(">H", raw[40:42])
    if HEADER + length > USABLE:
        raise TruncatedPayload(f"declared ciphertext length {length} runs past usable capacity")
    if length < crypto.HybridCiphertext.OVERHEAD:
        raise TruncatedPayload(f"declared ciphertext length {length} is shorter than the fixed overhead")
    try:
        object_id = field.from_bytes(raw[8:40])
    except ValueError:
        raise TruncatedPayload("stored id is not a field element") from None
    return object_id, crypto.HybridCiphertext.from_bytes(raw[HEADER : HEADER + length])


def recover_nonce(device_private_key: bytes, tag: TagImage) -> int:
    object_id, ct = read_tag(tag)
    plain = crypto.decrypt(device_private_key, ct)
    try:
        nonce = field.from_bytes(plain)
    except ValueError:
        raise IdMismatch("decrypted payload is not a nonce") from None
    if nonce == 0 or field.id_of(nonce) != object_id:
        raise IdMismatch("decrypted nonce does not hash to the stored id")
    return nonce
