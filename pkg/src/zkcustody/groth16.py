"""Groth16 preprocessing zkSNARK over BN254.

Single-party setup: whoever runs :func:`setup` learns the toxic waste and
could forge proofs.  This is test-grade trust, suitable for emulating the
setup ceremony, not for production.

Public variables of the constraint system (plus the constant one) become
public inputs; every other variable is private.  For each public variable an
extra QAP row ``x_i * 0 = 0`` keeps the input polynomials linearly
independent.
"""

from __future__ import annotations

import random
import secrets
import struct
from dataclasses import dataclass

from gmpy2 import mpz

from . import bn254 as bn
from .r1cs import ConstraintSystem

R = int(bn.R)
SCHEME_ID = b"groth16-bn254"
PK_MAGIC = b"WZKPK\0\0\0"
VK_MAGIC = b"WZKVK\0\0\0"
FORMAT_VERSION = 1
PROOF_SIZE = 256
_GENERATOR = 5


class KeyFormatError(ValueError):
    pass


# --------------------------------------------------------------------------- FFT


def _root_of_unity(n: int) -> int:
    w = pow(_GENERATOR, (R - 1) // n, R)
    if n > 1 and pow(w, n // 2, R) != R - 1:
        raise ValueError(f"no primitive root of order {n}")
    return w


def _fft(values, omega):
    n = len(values)
    a = [mpz(v) for v in values]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            a[i], a[j] = a[j], a[i]
    roots = [mpz(1)] * (n // 2)
    for k in range(1, n // 2):
        roots[k] = roots[k - 1] * omega % R
    size = 2
    while size <= n:
        half = size // 2
        step = n // size
        tw = roots[::step]
        for start in range(0, n, size):
            for k in range(half):
                u = a[start + k]
                v = a[start + k + half] * tw[k] % R
                a[start + k] = (u + v) % R
                a[start + k + half] = (u - v) % R
        size *= 2
    return a


def _ifft(values, omega):
    n = len(values)
    out = _fft(values, pow(omega, -1, R))
    n_inv = pow(n, -1, R)
    return [x * n_inv % R for x in out]


# --------------------------------------------------------------------------- keys


@dataclass(frozen=True)
class VerificationKey:
    circuit_digest: bytes
    n_public: int
    alpha1: tuple
    beta2: tuple
    gamma2: tuple
    delta2: tuple
    ic: list

    def to_bytes(self) -> bytes:
        out = [_header(VK_MAGIC), self.circuit_digest, struct.pack(">I", self.n_public)]
        out += [_enc_g1(self.alpha1), _enc_g2(self.beta2), _enc_g2(self.gamma2), _enc_g2(self.delta2)]
        out.append(struct.pack(">I", len(self.ic)))
        out += [_enc_g1(p) for p in self.ic]
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "VerificationKey":
        rd = _Reader(data)
        rd.header(VK_MAGIC)
        digest = rd.take(32)
        n_public = rd.u32()
        alpha1, beta2, gamma2, delta2 = rd.g1(True), rd.g2(True), rd.g2(True), rd.g2(True)
        ic = [rd.g1(True) for _ in range(rd.u32())]
        rd.end()
        if len(ic) != n_public + 1:
            raise KeyFormatError("input commitment count does not match public inputs")
        return cls(digest, n_public, alpha1, beta2, gamma2, delta2, ic)


@dataclass(frozen=True)
class ProvingKey:
    circuit_digest: bytes
    n_vars: int
    n_public: int
    domain_size: int
    alpha1: tuple
    beta1: tuple
    delta1: tuple
    beta2: tuple
    delta2: tuple
    a_query: list
    b1_query: list
    b2_query: list
    k_query: list
    h_query: list

    def to_bytes(self) -> bytes:
        out = [
            _header(PK_MAGIC),
            self.circuit_digest,
            struct.pack(">III", self.n_vars, self.n_public, self.domain_size),
            _enc_g1(self.alpha1),
            _enc_g1(self.beta1),
            _enc_g1(self.delta1),
            _enc_g2(self.beta2),
            _enc_g2(self.delta2),
        ]
        for query, enc in (
            (self.a_query, _enc_g1),
            (self.b1_query, _enc_g1),
            (self.b2_query, _enc_g2),
            (self.k_query, _enc_g1),
            (self.h_query, _enc_g1),
        ):
            out.append(struct.pack(">I", len(query)))
            out += [enc(p) for p in query]
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "ProvingKey":
        rd = _Reader(data)
        rd.header(PK_MAGIC)
        digest = rd.take(32)
        n_vars, n_public, domain = struct.unpack(">III", rd.take(12))
        alpha1, beta1, delta1 = rd.g1(), rd.g1(), rd.g1()
        beta2, delta2 = rd.g2(), rd.g2()
        queries = []
        for reader in (rd.g1, rd.g1, rd.g2, rd.g1, rd.g1):
            queries.append([reader() for _ in range(rd.u32())])
        rd.end()
        a_q, b1_q, b2_q, k_q, h_q = queries
        if not (len(a_q) == len(b1_q) == len(b2_q) == n_vars) or len(k_q) != n_vars - n_public - 1:
            raise KeyFormatError("query lengths do not match the circuit shape")
        if len(h_q) != domain - 1:
            raise KeyFormatError("h query does not match the domain size")
        return cls(digest, n_vars, n_public, domain, alpha1, beta1, delta1, beta2, delta2, a_q, b1_q, b2_q, k_q, h_q)


def _header(magic: bytes) -> bytes:
    return magic + bytes([FORMAT_VERSION, len(SCHEME_ID)]) + SCHEME_ID


def _enc_g1(p) -> bytes:
    if p is None:
        return bytes(64)
    return int(p[0]).to_bytes(32, "big") + int(p[1]).to_bytes(32, "big")


def _enc_g2(p) -> bytes:
    # EIP-197 order: imaginary part first
    if p is None:
        return bytes(128)
    (x0, x1), (y0, y1) = p
    return b"".join(int(c).to_bytes(32, "big") for c in (x1, x0, y1, y0))


def _dec_g1(data: bytes, check: bool):
    if data == bytes(64):
        return None
    x, y = int.from_bytes(data[:32], "big"), int.from_bytes(data[32:], "big")
    if x >= bn.Q or y >= bn.Q:
        raise KeyFormatError("coordinate not reduced modulo the base field")
    p = (mpz(x), mpz(y))
    if check and not bn.g1_on_curve(p):
        raise KeyFormatError("G1 point not on curve")
    return p


def _dec_g2(data: bytes, check: bool):
    if data == bytes(128):
        return None
    x1, x0, y1, y0 = (mpz(int.from_bytes(data[i : i + 32], "big")) for i in range(0, 128, 32))
    if max(x1, x0, y1, y0) >= bn.Q:
        raise KeyFormatError("coordinate not reduced modulo the base field")
    p = ((x0, x1), (y0, y1))
    if check and not bn.g2_in_subgroup(p):
        raise KeyFormatError("G2 point not in the prime-order subgroup")
    return p


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(data)
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise KeyFormatError("truncated key file")
        out = bytes(self.data[self.pos : self.pos + n])
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def header(self, magic: bytes):
        if self.take(8) != magic:
            raise KeyFormatError("bad key file magic")
        version, n = self.take(2)
        if version != FORMAT_VERSION:
            raise KeyFormatError(f"unsupported key file version {version}")
        if self.take(n) != SCHEME_ID:
            raise KeyFormatError("unknown proof scheme")

    def g1(self, check: bool = False):
        return _dec_g1(self.take(64), check)

    def g2(self, check: bool = False):
        return _dec_g2(self.take(128), check)

    def end(self):
        if self.pos != len(self.data):
            raise KeyFormatError("trailing bytes in key file")


# --------------------------------------------------------------------------- QAP


def _qap_rows(cs: ConstraintSystem):
    rows = [(c.a, c.b, c.c) for c in cs.constraints]
    for i in range(cs.n_public + 1):
        rows.append(({i: 1}, {}, {}))
    return rows


def domain_size(cs: ConstraintSystem) -> int:
    n = 1
    while n < cs.n_constraints + cs.n_public + 1:
        n *= 2
    return n


def setup(cs: ConstraintSystem, rng: random.Random | None = None) -> tuple[ProvingKey, VerificationKey]:
    rand = (lambda: rng.randrange(1, R)) if rng is not None else (lambda: 1 + secrets.randbelow(R - 1))
    rows = _qap_rows(cs)
    n = domain_size(cs)
    omega = _root_of_unity(n)
    while True:
        tau, alpha, beta, gamma, delta = (rand() for _ in range(5))
        if pow(tau, n, R) != 1:
            break

    z_tau = (pow(tau, n, R) - 1) % R
    # Lagrange basis at tau: L_j = Z(tau)/n * w^j / (tau - w^j)
    scale = z_tau * pow(n, -1, R) % R
    lag = []
    wj = 1
    for _ in range(n):
        lag.append(scale * wj * pow(tau - wj, -1, R) % R)
        wj = wj * omega % R

    m = cs.n_vars
    u, v, w = [0] * m, [0] * m, [0] * m
    for j, (a, b, c) in enumerate(rows):
        for i, coeff in a.items():
            u[i] = (u[i] + coeff * lag[j]) % R
        for i, coeff in b.items():
            v[i] = (v[i] + coeff * lag[j]) % R
        for i, coeff in c.items():
            w[i] = (w[i] + coeff * lag[j]) % R

    g1 = bn.FixedBase(bn.G1_GEN, "g1")
    g2 = bn.FixedBase(bn.G2_GEN, "g2")

    def many_g1(scalars):
        return bn.g1_batch_to_affine([g1.mul(s) for s in scalars])

    def many_g2(scalars):
        return bn.g2_batch_to_affine([g2.mul(s) for s in scalars])

    gamma_inv = pow(gamma, -1, R)
    delta_inv = pow(delta, -1, R)
    lin = [(beta * u[i] + alpha * v[i] + w[i]) % R for i in range(m)]
    npub = cs.n_public + 1

    ic = many_g1([lin[i] * gamma_inv % R for i in range(npub)])
    k_query = many_g1([lin[i] * delta_inv % R for i in range(npub, m)])
    a_query = many_g1(u)
    b1_query = many_g1(v)
    b2_query = many_g2(v)
    h_scalars = []
    t = z_tau * delta_inv % R
    for _ in range(n - 1):
        h_scalars.append(t)
        t = t * tau % R
    h_query = many_g1(h_scalars)

    alpha1, beta1, delta1 = many_g1([alpha, beta, delta])
    beta2, gamma2, delta2 = many_g2([beta, gamma, delta])
    digest = cs.digest()
    pk = ProvingKey(
        digest, m, cs.n_public, n, alpha1, beta1, delta1, beta2, delta2, a_query, b1_query, b2_query, k_query, h_query
    )
    vk = VerificationKey(digest, cs.n_public, alpha1, beta2, gamma2, delta2, ic)
    return pk, vk


# --------------------------------------------------------------------------- prove / verify


def _h_coefficients(cs: ConstraintSystem, assignment, n: int):
    rows = _qap_rows(cs)
    ea, eb, ec = [0] * n, [0] * n, [0] * n
    for j, (a, b, c) in enumerate(rows):
        ea[j] = sum(k * assignment[i] for i, k in a.items()) % R
        eb[j] = sum(k * assignment[i] for i, k in b.items()) % R
        ec[j] = sum(k * assignment[i] for i, k in c.items()) % R
    omega = _root_of_unity(n)
    shift = [mpz(1)] * n
    for k in range(1, n):
        shift[k] = shift[k - 1] * _GENERATOR % R
    coset = []
    for evals in (ea, eb, ec):
        coeffs = _ifft(evals, omega)
        coset.append(_fft([cf * s % R for cf, s in zip(coeffs, shift)], omega))
    z_inv = pow(pow(_GENERATOR, n, R) - 1, -1, R)
    h_evals = [(a * b - c) * z_inv % R for a, b, c in zip(*coset)]
    h = _ifft(h_evals, omega)
    shift_inv = pow(_GENERATOR, -1, R)
    s = 1
    for k in range(n):
        h[k] = h[k] * s % R
        s = s * shift_inv % R
    if h[n - 1]:
        raise ValueError("assignment does not satisfy the constraint system")
    return h[: n - 1]


def prove(pk: ProvingKey, cs: ConstraintSystem, assignment, rng: random.Random | None = None) -> bytes:
    """Proof bytes ``A (G1) || B (G2) || C (G1)``, 256 bytes."""
    if len(assignment) != pk.n_vars:
        raise ValueError("assignment length does not match the proving key")
    rand = (lambda: rng.randrange(1, R)) if rng is not None else (lambda: 1 + secrets.randbelow(R - 1))
    r, s = rand(), rand()
    h = _h_coefficients(cs, assignment, pk.domain_size)

    a = bn.g1_add(bn.g1_msm(pk.a_query, assignment), bn.g1_from_affine(pk.alpha1))
    a = bn.g1_add(a, bn.g1_mul(pk.delta1, r))
    b2 = bn.g2_add(bn.g2_msm(pk.b2_query, assignment), bn.g2_from_affine(pk.beta2))
    b2 = bn.g2_add(b2, bn.g2_mul(pk.delta2, s))
    b1 = bn.g1_add(bn.g1_msm(pk.b1_query, assignment), bn.g1_from_affine(pk.beta1))
    b1 = bn.g1_add(b1, bn.g1_mul(pk.delta1, s))

    priv = assignment[pk.n_public + 1 :]
    # K and H terms share one MSM: fewer bucket aggregations than two
    c = bn.g1_msm(pk.k_query + pk.h_query, [*priv, *h])
    a_aff, b1_aff = bn.g1_to_affine(a), bn.g1_to_affine(b1)
    c = bn.g1_add(c, bn.g1_mul(a_aff, s))
    c = bn.g1_add(c, bn.g1_mul(b1_aff, r))
    c = bn.g1_add(c, bn.g1_neg(bn.g1_mul(pk.delta1, r * s % R)))
    return _enc_g1(a_aff) + _enc_g2(bn.g2_to_affine(b2)) + _enc_g1(bn.g1_to_affine(c))


def verify(vk: VerificationKey, proof: bytes, public_inputs) -> bool:
    """Check ``proof`` against the public variables (excluding the constant one)."""
    if len(proof) != PROOF_SIZE or len(public_inputs) != vk.n_public:
        return False
    if any(not 0 <= x < R for x in public_inputs):
        return False
    try:
        a = _dec_g1(proof[:64], True)
        b = _dec_g2(proof[64:192], True)
        c = _dec_g1(proof[192:], True)
    except KeyFormatError:
        return False
    acc = bn.g1_msm(vk.ic, [1, *public_inputs])
    lin = bn.g1_to_affine(acc)
    neg_a = None if a is None else (a[0], -a[1] % bn.Q)
    return bn.pairing_product_is_one([(neg_a, b), (vk.alpha1, vk.beta2), (lin, vk.gamma2), (c, vk.delta2)])
