"""BN254 (alt_bn128) curve groups and the optimal ate pairing.

Field elements are gmpy2 ``mpz`` values; Fq2 elements are ``(re, im)`` tuples
with ``u^2 = -1``.  Towers follow the usual layout::

    Fq6  = Fq2[v] / (v^3 - xi),  xi = 9 + u
    Fq12 = Fq6[w] / (w^2 - v)

G1 and G2 points are kept in Jacobian coordinates ``(X, Y, Z)``; ``Z == 0``
marks the point at infinity.  Affine points are ``(x, y)`` tuples or ``None``.
"""

from __future__ import annotations

import gmpy2
from gmpy2 import mpz

Q = mpz(21888242871839275222246405745257275088696311157297823662689037894645226208583)
R = mpz(21888242871839275222246405745257275088548364400416034343698204186575808495617)

_invert = gmpy2.invert

# --------------------------------------------------------------------------- Fq2


def f2_add(a, b):
    return ((a[0] + b[0]) % Q, (a[1] + b[1]) % Q)


def f2_sub(a, b):
    return ((a[0] - b[0]) % Q, (a[1] - b[1]) % Q)


def f2_neg(a):
    return (-a[0] % Q, -a[1] % Q)


def f2_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = a0 * b0
    t1 = a1 * b1
    return ((t0 - t1) % Q, ((a0 + a1) * (b0 + b1) - t0 - t1) % Q)


def f2_sqr(a):
    a0, a1 = a
    return ((a0 + a1) * (a0 - a1) % Q, 2 * a0 * a1 % Q)


def f2_scale(a, k):
    return (a[0] * k % Q, a[1] * k % Q)


def f2_inv(a):
    a0, a1 = a
    d = _invert(a0 * a0 + a1 * a1, Q)
    return (a0 * d % Q, -a1 * d % Q)


def f2_conj(a):
    return (a[0], -a[1] % Q)


def f2_mul_xi(a):
    # (a0 + a1 u)(9 + u)
    a0, a1 = a
    return ((9 * a0 - a1) % Q, (a0 + 9 * a1) % Q)


def f2_pow(a, e):
    out = F2_ONE
    base = a
    while e:
        if e & 1:
            out = f2_mul(out, base)
        base = f2_sqr(base)
        e >>= 1
    return out


F2_ZERO = (mpz(0), mpz(0))
F2_ONE = (mpz(1), mpz(0))
XI = (mpz(9), mpz(1))

# --------------------------------------------------------------------------- Fq6


def f6_add(a, b):
    return (f2_add(a[0], b[0]), f2_add(a[1], b[1]), f2_add(a[2], b[2]))


def f6_sub(a, b):
    return (f2_sub(a[0], b[0]), f2_sub(a[1], b[1]), f2_sub(a[2], b[2]))


def f6_neg(a):
    return (f2_neg(a[0]), f2_neg(a[1]), f2_neg(a[2]))


def f6_mul(a, b):
    a0, a1, a2 = a
    b0, b1, b2 = b
    t0 = f2_mul(a0, b0)
    t1 = f2_mul(a1, b1)
    t2 = f2_mul(a2, b2)
    c0 = f2_add(f2_mul_xi(f2_sub(f2_sub(f2_mul(f2_add(a1, a2), f2_add(b1, b2)), t1), t2)), t0)
    c1 = f2_add(f2_sub(f2_sub(f2_mul(f2_add(a0, a1), f2_add(b0, b1)), t0), t1), f2_mul_xi(t2))
    c2 = f2_add(f2_sub(f2_sub(f2_mul(f2_add(a0, a2), f2_add(b0, b2)), t0), t2), t1)
    return (c0, c1, c2)


def f6_mul_v(a):
    # multiply by v: (a0, a1, a2) -> (xi*a2, a0, a1)
    return (f2_mul_xi(a[2]), a[0], a[1])


def f6_inv(a):
    a0, a1, a2 = a
    c0 = f2_sub(f2_sqr(a0), f2_mul_xi(f2_mul(a1, a2)))
    c1 = f2_sub(f2_mul_xi(f2_sqr(a2)), f2_mul(a0, a1))
    c2 = f2_sub(f2_sqr(a1), f2_mul(a0, a2))
    t = f2_add(f2_mul(a0, c0), f2_mul_xi(f2_add(f2_mul(a2, c1), f2_mul(a1, c2))))
    ti = f2_inv(t)
    return (f2_mul(c0, ti), f2_mul(c1, ti), f2_mul(c2, ti))


F6_ZERO = (F2_ZERO, F2_ZERO, F2_ZERO)
F6_ONE = (F2_ONE, F2_ZERO, F2_ZERO)

# --------------------------------------------------------------------------- Fq12


def f12_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = f6_mul(a0, b0)
    t1 = f6_mul(a1, b1)
    c1 = f6_sub(f6_sub(f6_mul(f6_add(a0, a1), f6_add(b0, b1)), t0), t1)
    return (f6_add(t0, f6_mul_v(t1)), c1)


def f12_sqr(a):
    a0, a1 = a
    t = f6_mul(a0, a1)
    c0 = f6_sub(f6_sub(f6_mul(f6_add(a0, a1), f6_add(a0, f6_mul_v(a1))), t), f6_mul_v(t))
    return (c0, f6_add(t, t))


def f12_conj(a):
    return (a[0], f6_neg(a[1]))


def f12_inv(a):
    a0, a1 = a
    t = f6_inv(f6_sub(f6_mul(a0, a0), f6_mul_v(f6_mul(a1, a1))))
    return (f6_mul(a0, t), f6_neg(f6_mul(a1, t)))


def f12_mul_line(f, l0, l1, l2):
    """Multiply ``f`` by the sparse element ``l0 + l1*w + l2*w^3``."""
    a0, a1 = f
    # line = (l0, 0, 0) + (l1, l2, 0) w
    t0 = (f2_mul(a0[0], l0), f2_mul(a0[1], l0), f2_mul(a0[2], l0))
    t1 = _f6_mul_01(a1, l1, l2)
    s = (f2_add(l0, l1), l2, F2_ZERO)
    c1 = f6_sub(f6_sub(_f6_mul_01(f6_add(a0, a1), s[0], s[1]), t0), t1)
    return (f6_add(t0, f6_mul_v(t1)), c1)


def _f6_mul_01(a, b0, b1):
    # a * (b0 + b1 v)
    a0, a1, a2 = a
    t0 = f2_mul(a0, b0)
    t1 = f2_mul(a1, b1)
    c0 = f2_add(f2_mul_xi(f2_sub(f2_mul(f2_add(a1, a2), b1), t1)), t0)
    c1 = f2_sub(f2_sub(f2_mul(f2_add(a0, a1), f2_add(b0, b1)), t0), t1)
    c2 = f2_add(f2_sub(f2_mul(f2_add(a0, a2), b0), t0), t1)
    return (c0, c1, c2)


F12_ONE = (F6_ONE, F6_ZERO)


def _frob_coeffs():
    # gamma[n][k] = xi^(k (q^n - 1) / 6) for the w^k coefficient
    table = {}
    for n in (1, 2, 3):
        qn = Q**n
        table[n] = [f2_pow(XI, k * (qn - 1) // 6) for k in range(6)]
    return table


_FROB = _frob_coeffs()


def f12_frobenius(a, n):
    """Raise ``a`` to the power ``q^n`` (n in 1..3)."""
    g = _FROB[n]
    (c00, c01, c02), (c10, c11, c12) = a
    # w^k layout: k = 2i + j  for coefficient c_j,i
    coeffs = [c00, c10, c01, c11, c02, c12]
    out = []
    for k, c in enumerate(coeffs):
        if n & 1:
            c = f2_conj(c)
        out.append(f2_mul(c, g[k]))
    return ((out[0], out[2], out[4]), (out[1], out[3], out[5]))


def f12_pow(a, e):
    out = F12_ONE
    for bit in bin(e)[2:]:
        out = f12_sqr(out)
        if bit == "1":
            out = f12_mul(out, a)
    return out


# --------------------------------------------------------------------------- G1

G1_GEN = (mpz(1), mpz(2))
G2_GEN = (
    (
        mpz(10857046999023057135944570762232829481370756359578518086990519993285655852781),
        mpz(11559732032986387107991004021392285783925812861821192530917403151452391805634),
    ),
    (
        mpz(8495653923123431417604973247489272438418190587263600148770280649306958101930),
        mpz(4082367875863433681332203403145435568316851327593401208105741076214120093531),
    ),
)
B2 = f2_mul((mpz(3), mpz(0)), f2_inv(XI))

G1_INF = (mpz(1), mpz(1), mpz(0))
G2_INF = (F2_ONE, F2_ONE, F2_ZERO)


def g1_on_curve(p) -> bool:
    if p is None:
        return True
    x, y = p
    return 0 <= x < Q and 0 <= y < Q and (y * y - x * x * x - 3) % Q == 0


def g1_double(p):
    X, Y, Z = p
    if not Z:
        return p
    A = X * X % Q
    B = Y * Y % Q
    C = B * B % Q
    D = 2 * ((X + B) ** 2 - A - C) % Q
    E = 3 * A
    F = E * E % Q
    X3 = (F - 2 * D) % Q
    return (X3, (E * (D - X3) - 8 * C) % Q, 2 * Y * Z % Q)


def g1_add(p, q):
    X1, Y1, Z1 = p
    X2, Y2, Z2 = q
    if not Z1:
        return q
    if not Z2:
        return p
    Z1Z1 = Z1 * Z1 % Q
    Z2Z2 = Z2 * Z2 % Q
    U1 = X1 * Z2Z2 % Q
    U2 = X2 * Z1Z1 % Q
    S1 = Y1 * Z2 * Z2Z2 % Q
    S2 = Y2 * Z1 * Z1Z1 % Q
    H = (U2 - U1) % Q
    r = 2 * (S2 - S1) % Q
    if not H:
        if not r:
            return g1_double(p)
        return G1_INF
    I = 4 * H * H % Q
    J = H * I % Q
    V = U1 * I % Q
    X3 = (r * r - J - 2 * V) % Q
    Y3 = (r * (V - X3) - 2 * S1 * J) % Q
    Z3 = ((Z1 + Z2) ** 2 - Z1Z1 - Z2Z2) * H % Q
    return (X3, Y3, Z3)


def g1_add_affine(p, q):
    """Mixed addition: Jacobian ``p`` plus affine ``q`` (not infinity)."""
    X1, Y1, Z1 = p
    x2, y2 = q
    if not Z1:
        return (x2, y2, mpz(1))
    Z1Z1 = Z1 * Z1 % Q
    U2 = x2 * Z1Z1 % Q
    S2 = y2 * Z1 * Z1Z1 % Q
    H = (U2 - X1) % Q
    r = 2 * (S2 - Y1) % Q
    if not H:
        if not r:
            return g1_double(p)
        return G1_INF
    HH = H * H % Q
    I = 4 * HH
    J = H * I % Q
    V = X1 * I % Q
    X3 = (r * r - J - 2 * V) % Q
    Y3 = (r * (V - X3) - 2 * Y1 * J) % Q
    Z3 = ((Z1 + H) ** 2 - Z1Z1 - HH) % Q
    return (X3, Y3, Z3)


def g1_neg(p):
    return (p[0], -p[1] % Q, p[2])


def g1_to_affine(p):
    X, Y, Z = p
    if not Z:
        return None
    zi = _invert(Z, Q)
    zi2 = zi * zi % Q
    return (X * zi2 % Q, Y * zi2 * zi % Q)


def g1_from_affine(a):
    if a is None:
        return G1_INF
    return (mpz(a[0]), mpz(a[1]), mpz(1))


def g1_batch_to_affine(points):
    """Normalize many Jacobian points with a single inversion."""
    zs = [p[2] for p in points]
    inv = _batch_invert(zs, Q)
    out = []
    for (X, Y, Z), zi in zip(points, inv):
        if not Z:
            out.append(None)
            continue
        zi2 = zi * zi % Q
        out.append((X * zi2 % Q, Y * zi2 * zi % Q))
    return out


def g1_mul(p, k):
    """Scalar multiplication of an affine point (double-and-add)."""
    k = int(k) % R
    acc = G1_INF
    if p is None or not k:
        return acc
    for bit in bin(k)[2:]:
        acc = g1_double(acc)
        if bit == "1":
            acc = g1_add_affine(acc, p)
    return acc


def g1_in_subgroup(p) -> bool:
    # the BN254 G1 cofactor is 1
    return g1_on_curve(p)


# --------------------------------------------------------------------------- G2


def g2_on_curve(p) -> bool:
    if p is None:
        return True
    x, y = p
    if not all(0 <= c < Q for c in (*x, *y)):
        return False
    return f2_sub(f2_sqr(y), f2_add(f2_mul(f2_sqr(x), x), B2)) == F2_ZERO


def g2_double(p):
    X, Y, Z = p
    if Z == F2_ZERO:
        return p
    A = f2_sqr(X)
    B = f2_sqr(Y)
    C = f2_sqr(B)
    D = f2_sub(f2_sub(f2_sqr(f2_add(X, B)), A), C)
    D = f2_add(D, D)
    E = f2_add(f2_add(A, A), A)
    F = f2_sqr(E)
    X3 = f2_sub(F, f2_add(D, D))
    C8 = f2_scale(C, 8)
    Y3 = f2_sub(f2_mul(E, f2_sub(D, X3)), C8)
    YZ = f2_mul(Y, Z)
    return (X3, Y3, f2_add(YZ, YZ))


def g2_add(p, q):
    X1, Y1, Z1 = p
    X2, Y2, Z2 = q
    if Z1 == F2_ZERO:
        return q
    if Z2 == F2_ZERO:
        return p
    Z1Z1 = f2_sqr(Z1)
    Z2Z2 = f2_sqr(Z2)
    U1 = f2_mul(X1, Z2Z2)
    U2 = f2_mul(X2, Z1Z1)
    S1 = f2_mul(Y1, f2_mul(Z2, Z2Z2))
    S2 = f2_mul(Y2, f2_mul(Z1, Z1Z1))
    H = f2_sub(U2, U1)
    r = f2_sub(S2, S1)
    if H == F2_ZERO:
        if r == F2_ZERO:
            return g2_double(p)
        return G2_INF
    r = f2_add(r, r)
    H2 = f2_add(H, H)
    I = f2_sqr(H2)
    J = f2_mul(H, I)
    V = f2_mul(U1, I)
    X3 = f2_sub(f2_sub(f2_sqr(r), J), f2_add(V, V))
    S1J = f2_mul(S1, J)
    Y3 = f2_sub(f2_mul(r, f2_sub(V, X3)), f2_add(S1J, S1J))
    Z3 = f2_mul(f2_sub(f2_sub(f2_sqr(f2_add(Z1, Z2)), Z1Z1), Z2Z2), H)
    return (X3, Y3, Z3)


def g2_add_affine(p, q):
    X1, Y1, Z1 = p
    x2, y2 = q
    if Z1 == F2_ZERO:
        return (x2, y2, F2_ONE)
    Z1Z1 = f2_sqr(Z1)
    U2 = f2_mul(x2, Z1Z1)
    S2 = f2_mul(y2, f2_mul(Z1, Z1Z1))
    H = f2_sub(U2, X1)
    r = f2_sub(S2, Y1)
    if H == F2_ZERO:
        if r == F2_ZERO:
            return g2_double(p)
        return G2_INF
    r = f2_add(r, r)
    HH = f2_sqr(H)
    I = f2_scale(HH, 4)
    J = f2_mul(H, I)
    V = f2_mul(X1, I)
    X3 = f2_sub(f2_sub(f2_sqr(r), J), f2_add(V, V))
    YJ = f2_mul(Y1, J)
    Y3 = f2_sub(f2_mul(r, f2_sub(V, X3)), f2_add(YJ, YJ))
    Z3 = f2_sub(f2_sub(f2_sqr(f2_add(Z1, H)), Z1Z1), HH)
    return (X3, Y3, Z3)


def g2_neg(p):
    return (p[0], f2_neg(p[1]), p[2])


def g2_to_affine(p):
    X, Y, Z = p
    if Z == F2_ZERO:
        return None
    zi = f2_inv(Z)
    zi2 = f2_sqr(zi)
    return (f2_mul(X, zi2), f2_mul(Y, f2_mul(zi2, zi)))


def g2_from_affine(a):
    if a is None:
        return G2_INF
    return (a[0], a[1], F2_ONE)


def g2_batch_to_affine(points):
    zs = [p[2] for p in points]
    # invert norms in Fq, then recover each Fq2 inverse
    norms = [(z[0] * z[0] + z[1] * z[1]) % Q for z in zs]
    inv_norms = _batch_invert(norms, Q)
    out = []
    for (X, Y, Z), n in zip(points, inv_norms):
        if Z == F2_ZERO:
            out.append(None)
            continue
        zi = (Z[0] * n % Q, -Z[1] * n % Q)
        zi2 = f2_sqr(zi)
        out.append((f2_mul(X, zi2), f2_mul(Y, f2_mul(zi2, zi))))
    return out


def g2_mul(p, k):
    k = int(k) % R
    acc = G2_INF
    if p is None or not k:
        return acc
    for bit in bin(k)[2:]:
        acc = g2_double(acc)
        if bit == "1":
            acc = g2_add_affine(acc, p)
    return acc


def g2_in_subgroup(p) -> bool:
    if not g2_on_curve(p):
        return False
    if p is None:
        return True
    acc = G2_INF
    for bit in bin(R)[2:]:
        acc = g2_double(acc)
        if bit == "1":
            acc = g2_add_affine(acc, p)
    return acc[2] == F2_ZERO


# --------------------------------------------------------------------------- helpers


def _batch_invert(values, mod):
    """Montgomery's trick; zero entries map to zero."""
    prefix = []
    acc = mpz(1)
    for v in values:
        prefix.append(acc)
        if v:
            acc = acc * v % mod
    inv = _invert(acc, mod) if acc else mpz(0)
    out = [mpz(0)] * len(values)
    for i in range(len(values) - 1, -1, -1):
        v = values[i]
        if v:
            out[i] = inv * prefix[i] % mod
            inv = inv * v % mod
    return out


def _window_size(n: int) -> int:
    if n < 8:
        return 2
    if n < 32:
        return 3
    if n < 128:
        return 5
    if n < 512:
        return 6
    if n < 2048:
        return 7
    return 9


def _msm(bases, scalars, add_affine, add, double, inf):
    pairs = [(b, int(s) % R) for b, s in zip(bases, scalars) if b is not None]
    pairs = [(b, s) for b, s in pairs if s]
    if not pairs:
        return inf
    c = _window_size(len(pairs))
    mask = (1 << c) - 1
    nwin = (R.bit_length() + c - 1) // c
    total = inf
    for w in range(nwin - 1, -1, -1):
        for _ in range(c):
            total = double(total)
        shift = w * c
        buckets = [None] * (mask + 1)
        for b, s in pairs:
            d = (s >> shift) & mask
            if d:
                cur = buckets[d]
                buckets[d] = add_affine(inf, b) if cur is None else add_affine(cur, b)
        running = inf
        acc = inf
        for d in range(mask, 0, -1):
            bk = buckets[d]
            if bk is not None:
                running = add(running, bk)
            acc = add(acc, running)
        total = add(total, acc)
    return total


def g1_msm(bases, scalars):
    """Multi-scalar multiplication over affine G1 bases (Pippenger)."""
    return _msm(bases, scalars, g1_add_affine, g1_add, g1_double, G1_INF)


def g2_msm(bases, scalars):
    return _msm(bases, scalars, g2_add_affine, g2_add, g2_double, G2_INF)


class FixedBase:
    """Windowed table of multiples of one affine point, for repeated use."""

    def __init__(self, point, group: str = "g1", window: int = 8):
        if group == "g1":
            self._add, self._dbl, self._to_aff, inf = g1_add, g1_double, g1_batch_to_affine, G1_INF
            self._madd = g1_add_affine
            base = g1_from_affine(point)
        else:
            self._add, self._dbl, self._to_aff, inf = g2_add, g2_double, g2_batch_to_affine, G2_INF
            self._madd = g2_add_affine
            base = g2_from_affine(point)
        self.inf = inf
        self.window = window
        nwin = (R.bit_length() + window - 1) // window
        rows = []
        for _ in range(nwin):
            row = [inf]
            cur = inf
            for _ in range((1 << window) - 1):
                cur = self._add(cur, base)
                row.append(cur)
            rows.append(self._to_aff(row))
            for _ in range(window):
                base = self._dbl(base)
        self.rows = rows

    def mul(self, k):
        k = int(k) % R
        acc = self.inf
        mask = (1 << self.window) - 1
        i = 0
        while k:
            d = k & mask
            if d:
                acc = self._madd(acc, self.rows[i][d])
            k >>= self.window
            i += 1
        return acc


# --------------------------------------------------------------------------- pairing

ATE_LOOP = 29793968203157093288  # 6x + 2 for x = 4965661367192848881

_FROB_X = f2_pow(XI, (Q - 1) // 3)
_FROB_Y = f2_pow(XI, (Q - 1) // 2)
_FROB2_X = f2_pow(XI, (Q * Q - 1) // 3)
_FROB2_Y = f2_pow(XI, (Q * Q - 1) // 2)


def _line(t, slope, px, py):
    # l(P) = yP - slope*xP*w + (slope*xT - yT)*w^3
    xt, yt = t
    l0 = (py, mpz(0))
    l1 = f2_neg(f2_scale(slope, px))
    l2 = f2_sub(f2_mul(slope, xt), yt)
    return l0, l1, l2


def _dbl_step(t):
    x, y = t
    slope = f2_mul(f2_scale(f2_sqr(x), 3), f2_inv(f2_add(y, y)))
    x3 = f2_sub(f2_sqr(slope), f2_add(x, x))
    y3 = f2_sub(f2_mul(slope, f2_sub(x, x3)), y)
    return slope, (x3, y3)


def _add_step(t, q):
    x1, y1 = t
    x2, y2 = q
    slope = f2_mul(f2_sub(y2, y1), f2_inv(f2_sub(x2, x1)))
    x3 = f2_sub(f2_sub(f2_sqr(slope), x1), x2)
    y3 = f2_sub(f2_mul(slope, f2_sub(x1, x3)), y1)
    return slope, (x3, y3)


def miller_loop(pairs):
    """Product of optimal ate Miller loops over ``[(g1_affine, g2_affine), ...]``."""
    pairs = [(p, q) for p, q in pairs if p is not None and q is not None]
    f = F12_ONE
    if not pairs:
        return f
    ts = [q for _, q in pairs]
    bits = bin(ATE_LOOP)[3:]
    for bit in bits:
        f = f12_sqr(f)
        for i, (p, q) in enumerate(pairs):
            slope, nt = _dbl_step(ts[i])
            f = f12_mul_line(f, *_line(ts[i], slope, p[0], p[1]))
            ts[i] = nt
            if bit == "1":
                slope, nt = _add_step(ts[i], q)
                f = f12_mul_line(f, *_line(ts[i], slope, p[0], p[1]))
                ts[i] = nt
    for i, (p, q) in enumerate(pairs):
        qx, qy = q
        q1 = (f2_mul(f2_conj(qx), _FROB_X), f2_mul(f2_conj(qy), _FROB_Y))
        nq2 = (f2_mul(qx, _FROB2_X), f2_neg(f2_mul(qy, _FROB2_Y)))
        slope, nt = _add_step(ts[i], q1)
        f = f12_mul_line(f, *_line(ts[i], slope, p[0], p[1]))
        slope, _ = _add_step(nt, nq2)
        f = f12_mul_line(f, *_line(nt, slope, p[0], p[1]))
    return f


_HARD_EXP = (Q**4 - Q**2 + 1) // R


def final_exponentiation(f):
    # easy part: f^((q^6 - 1)(q^2 + 1))
    f = f12_mul(f12_conj(f), f12_inv(f))
    f = f12_mul(f12_frobenius(f, 2), f)
    return f12_pow(f, _HARD_EXP)


def pairing(p, q):
    """Reduced optimal ate pairing e(P, Q) for affine P in G1, Q in G2."""
    return final_exponentiation(miller_loop([(p, q)]))


def pairing_product_is_one(pairs) -> bool:
    return final_exponentiation(miller_loop(pairs)) == F12_ONE
