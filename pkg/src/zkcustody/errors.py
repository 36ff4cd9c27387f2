"""Exception taxonomy shared by all modules."""


class CustodyError(Exception):
    """Base class for every error raised by zkcustody."""


class IoError(CustodyError, OSError):
    pass


# field / relation


class ZeroNonce(CustodyError, ValueError):
    """Zero is reserved as the genesis parent nonce."""


class FieldRangeError(CustodyError, ValueError):
    pass


class KeyMismatch(CustodyError):
    """Proving key does not belong to the custody relation."""


# crypto


class InvalidPoint(CustodyError, ValueError):
    pass


class AuthFailure(CustodyError):
    """Ciphertext failed authentication (wrong key or tampering)."""


# tag


class TagError(CustodyError, ValueError):
    pass


class BadMagic(TagError):
    pass


class UnsupportedVersion(TagError):
    pass


class TruncatedPayload(TagError):
    pass


class PayloadTooLarge(TagError):
    pass


class IdMismatch(TagError):
    pass


# handoff


class InconsistentPayload(CustodyError, ValueError):
    pass


class BadEncoding(CustodyError, ValueError):
    pass


class BadPrefix(BadEncoding):
    pass


class ConsistencyError(CustodyError, ValueError):
    pass


# ledger


class Rejected(CustodyError):
    """A record was refused by the ledger; the ledger is unchanged."""

    reason = "rejected"


class ProofInvalid(Rejected):
    reason = "proof-invalid"


class SignatureInvalid(Rejected):
    reason = "signature-invalid"


class ZeroId(Rejected):
    reason = "zero-id"


class DuplicateId(Rejected):
    reason = "duplicate-id"


class UnknownParent(Rejected):
    reason = "unknown-parent"


class NotFound(CustodyError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class BrokenChain(CustodyError):
    pass


class CycleDetected(CustodyError):
    pass


class CorruptLedger(CustodyError):
    pass
