"""Text encoding of the (parent id, parent nonce) pair passed between custodians.

``WHND1.`` followed by unpadded base64url of ``p_id || p_nonce`` (32 bytes
each, big-endian).  The string carries a secret nonce and must travel over a
private channel.
"""

from __future__ import annotations

import base64
import binascii
from dataclasses import dataclass

from . import field
from .errors import BadEncoding, BadPrefix, ConsistencyError, InconsistentPayload

PREFIX = "WHND1."
BODY_LEN = 86
_ALPHABET = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_")


@dataclass(frozen=True)
class HandoffPayload:
    p_id: int
    p_nonce: int

    def __repr__(self):
        return f"HandoffPayload(p_id={self.p_id}, p_nonce=<redacted>)"


def encode_handoff(payload: HandoffPayload) -> str:
    if field.hash1(payload.p_nonce) != field.check(payload.p_id):
        raise InconsistentPayload("hash of p_nonce does not equal p_id")
    raw = field.to_bytes(payload.p_id) + field.to_bytes(payload.p_nonce)
    return PREFIX + base64.urlsafe_b64encode(raw).decode().rstrip("=")


def decode_handoff(s: str) -> HandoffPayload:
    if not isinstance(s, str) or not s.startswith(PREFIX):
        raise BadPrefix("handoff string must start with " + PREFIX)
    body = s[len(PREFIX) :]
    if len(body) != BODY_LEN or not set(body) <= _ALPHABET:
        raise BadEncoding("handoff body must be 86 base64url characters")
    try:
        raw = base64.urlsafe_b64decode(body + "==")
    except (binascii.Error, ValueError):
        raise BadEncoding("handoff body is not base64url") from None
    if len(raw) != 64 or base64.urlsafe_b64encode(raw).decode().rstrip("=") != body:
        raise BadEncoding("handoff body is not in canonical form")
    try:
        p_id, p_nonce = field.from_bytes(raw[:32]), field.from_bytes(raw[32:])
    except ValueError:
        raise BadEncoding("handoff values are outside the field") from None
    if field.hash1(p_nonce) != p_id:
        raise ConsistencyError("handoff nonce does not hash to its id")
    return HandoffPayload(p_id, p_nonce)
