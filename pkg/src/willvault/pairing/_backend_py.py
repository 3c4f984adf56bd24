"""Pure-Python pairing backend over the 254-bit BN curve (alt_bn128).

Optimal-ate pairing with a D-type sextic twist.  Field towers:
Fp2 = Fp[i]/(i^2+1), Fp6 = Fp2[v]/(v^3 - xi) with xi = 9+i,
Fp12 = Fp6[w]/(w^2 - v).

Fp2 elements are (c0, c1) int tuples, Fp6 elements are 3-tuples of Fp2,
Fp12 elements are (base, w-part) pairs of Fp6.  Everything here is
functional on tuples; the compiled backend mirrors the same algorithms
on fixed 4x64-bit Montgomery limbs.
"""

from __future__ import annotations

import hashlib

# Curve constants ------------------------------------------------------------

P = 21888242871839275222246405745257275088696311157297823662689037894645226208583
ORDER = 21888242871839275222246405745257275088548364400416034343698204186575808495617
U = 4965661367192848881
SIX_U_PLUS_2 = 6 * U + 2
CURVE_B = 3

G1_X, G1_Y = 1, 2

# Standard twist generator for this curve.
G2_X = (
    10857046999023057135944570762232829481370756359578518086990519993285655852781,
    11559732032986387107991004021392285783925812861821192530917403151452391805634,
)
G2_Y = (
    8495653923123431417604973247489272438418190587263600148770280649306958101930,
    4082367875863433681332203403145435568316851327593401208105741076214120093531,
)

HASH_DOMAIN = b"willvault/h1/v1:"


def _naf(x: int) -> list[int]:
    out = []
    while x > 0:
        if x & 1:
            d = 2 - (x & 3)
            x -= d
        else:
            d = 0
        out.append(d)
        x >>= 1
    return out


# NAF digits of the Miller loop count, most-significant first, top digit dropped.
_LOOP_NAF = list(reversed(_naf(SIX_U_PLUS_2)))[1:]


# Fp ------------------------------------------------------------------------


def _inv(a: int) -> int:
    return pow(a, P - 2, P)


def _sqrt_fp(a: int) -> int | None:
    # p = 3 mod 4
    r = pow(a, (P + 1) // 4, P)
    return r if r * r % P == a % P else None


# Fp2 -----------------------------------------------------------------------

FP2_ZERO = (0, 0)
FP2_ONE = (1, 0)


def f2_add(a, b):
    return ((a[0] + b[0]) % P, (a[1] + b[1]) % P)


def f2_sub(a, b):
    return ((a[0] - b[0]) % P, (a[1] - b[1]) % P)


def f2_neg(a):
    return (-a[0] % P, -a[1] % P)


def f2_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = a0 * b0
    t1 = a1 * b1
    return ((t0 - t1) % P, ((a0 + a1) * (b0 + b1) - t0 - t1) % P)


def f2_sqr(a):
    a0, a1 = a
    return ((a0 + a1) * (a0 - a1) % P, 2 * a0 * a1 % P)


def f2_scalar(a, k: int):
    return (a[0] * k % P, a[1] * k % P)


def f2_conj(a):
    return (a[0], -a[1] % P)


def f2_inv(a):
    a0, a1 = a
    t = _inv((a0 * a0 + a1 * a1) % P)
    return (a0 * t % P, -a1 * t % P)


def f2_mul_xi(a):
    # multiply by xi = 9 + i
    a0, a1 = a
    return ((9 * a0 - a1) % P, (9 * a1 + a0) % P)


def f2_pow(a, e: int):
    result = FP2_ONE
    base = a
    while e > 0:
        if e & 1:
            result = f2_mul(result, base)
        base = f2_sqr(base)
        e >>= 1
    return result


def f2_sqrt(a):
    """Square root in Fp2 via the norm trick; None when a is not a square."""
    a0, a1 = a
    if a1 == 0:
        r = _sqrt_fp(a0)
        if r is not None:
            return (r, 0)
        r = _sqrt_fp(-a0 % P)
        if r is None:
            return None
        return (0, r)
    n = (a0 * a0 + a1 * a1) % P
    s = _sqrt_fp(n)
    if s is None:
        return None
    inv2 = _inv(2)
    t2 = (a0 + s) * inv2 % P
    t = _sqrt_fp(t2)
    if t is None:
        t2 = (a0 - s) * inv2 % P
        t = _sqrt_fp(t2)
        if t is None:
            return None
    c1 = a1 * _inv(2 * t % P) % P
    cand = (t, c1)
    return cand if f2_sqr(cand) == (a0 % P, a1 % P) else None


XI = (9, 1)

# xi^(k*(p-1)/6) for k = 1..5, used by the Frobenius maps.
_XI1 = [f2_pow(XI, k * (P - 1) // 6) for k in range(1, 6)]
# Norms of the above: real Fp2 elements for Frobenius squared.
_XI2 = [f2_mul(x, f2_conj(x)) for x in _XI1]

TWIST_B = f2_mul(f2_inv(XI), (CURVE_B, 0))


# Fp6 -----------------------------------------------------------------------

FP6_ZERO = (FP2_ZERO, FP2_ZERO, FP2_ZERO)
FP6_ONE = (FP2_ONE, FP2_ZERO, FP2_ZERO)


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
    c0 = f2_add(t0, f2_mul_xi(f2_sub(f2_mul(f2_add(a1, a2), f2_add(b1, b2)),
                                     f2_add(t1, t2))))
    c1 = f2_add(f2_sub(f2_mul(f2_add(a0, a1), f2_add(b0, b1)), f2_add(t0, t1)),
                f2_mul_xi(t2))
    c2 = f2_add(f2_sub(f2_mul(f2_add(a0, a2), f2_add(b0, b2)), f2_add(t0, t2)), t1)
    return (c0, c1, c2)


def f6_sqr(a):
    a0, a1, a2 = a
    s0 = f2_sqr(a0)
    s1 = f2_scalar(f2_mul(a0, a1), 2)
    s2 = f2_sqr(f2_add(f2_sub(a0, a1), a2))
    s3 = f2_scalar(f2_mul(a1, a2), 2)
    s4 = f2_sqr(a2)
    c0 = f2_add(s0, f2_mul_xi(s3))
    c1 = f2_add(s1, f2_mul_xi(s4))
    c2 = f2_sub(f2_add(f2_add(s1, s2), s3), f2_add(s0, s4))
    return (c0, c1, c2)


def f6_scalar(a, k):
    return (f2_mul(a[0], k), f2_mul(a[1], k), f2_mul(a[2], k))


def f6_mul_tau(a):
    # multiply by v
    return (f2_mul_xi(a[2]), a[0], a[1])


def f6_inv(a):
    a0, a1, a2 = a
    A = f2_sub(f2_sqr(a0), f2_mul_xi(f2_mul(a1, a2)))
    B = f2_sub(f2_mul_xi(f2_sqr(a2)), f2_mul(a0, a1))
    C = f2_sub(f2_sqr(a1), f2_mul(a0, a2))
    F = f2_add(f2_mul(a0, A), f2_mul_xi(f2_add(f2_mul(a2, B), f2_mul(a1, C))))
    Finv = f2_inv(F)
    return (f2_mul(A, Finv), f2_mul(B, Finv), f2_mul(C, Finv))


# Fp12 ----------------------------------------------------------------------

FP12_ONE = (FP6_ONE, FP6_ZERO)


def f12_mul(a, b):
    a0, a1 = a
    b0, b1 = b
    t0 = f6_mul(a0, b0)
    t1 = f6_mul(a1, b1)
    c1 = f6_sub(f6_mul(f6_add(a0, a1), f6_add(b0, b1)), f6_add(t0, t1))
    c0 = f6_add(t0, f6_mul_tau(t1))
    return (c0, c1)


def f12_sqr(a):
    a0, a1 = a
    t = f6_mul(a0, a1)
    c0 = f6_sub(f6_sub(f6_mul(f6_add(a0, a1), f6_add(a0, f6_mul_tau(a1))), t),
                f6_mul_tau(t))
    return (c0, f6_add(t, t))


def f12_conj(a):
    return (a[0], f6_neg(a[1]))


def f12_inv(a):
    a0, a1 = a
    t = f6_inv(f6_sub(f6_sqr(a0), f6_mul_tau(f6_sqr(a1))))
    return (f6_mul(a0, t), f6_neg(f6_mul(a1, t)))


def f12_pow(a, e: int):
    if e < 0:
        return f12_pow(f12_inv(a), -e)
    result = FP12_ONE
    base = a
    while e > 0:
        if e & 1:
            result = f12_mul(result, base)
        base = f12_sqr(base)
        e >>= 1
    return result


def f12_frobenius(a):
    (a0, a1, a2), (b0, b1, b2) = a
    na = (f2_conj(a0), f2_mul(f2_conj(a1), _XI1[1]), f2_mul(f2_conj(a2), _XI1[3]))
    nb = (f2_mul(f2_conj(b0), _XI1[0]), f2_mul(f2_conj(b1), _XI1[2]),
          f2_mul(f2_conj(b2), _XI1[4]))
    return (na, nb)


def f12_frobenius_p2(a):
    (a0, a1, a2), (b0, b1, b2) = a
    na = (a0, f2_mul(a1, _XI2[1]), f2_mul(a2, _XI2[3]))
    nb = (f2_mul(b0, _XI2[0]), f2_mul(b1, _XI2[2]), f2_mul(b2, _XI2[4]))
    return (na, nb)


# Jacobian point arithmetic ---------------------------------------------------
# Generic over the coordinate field; fns is a dict of field callbacks.

class _FieldOps:
    __slots__ = ("add", "sub", "neg", "mul", "sqr", "scalar", "inv",
                 "zero", "one", "is_zero")

    def __init__(self, add, sub, neg, mul, sqr, scalar, inv, zero, one, is_zero):
        self.add = add
        self.sub = sub
        self.neg = neg
        self.mul = mul
        self.sqr = sqr
        self.scalar = scalar
        self.inv = inv
        self.zero = zero
        self.one = one
        self.is_zero = is_zero


_FP_OPS = _FieldOps(
    add=lambda a, b: (a + b) % P,
    sub=lambda a, b: (a - b) % P,
    neg=lambda a: -a % P,
    mul=lambda a, b: a * b % P,
    sqr=lambda a: a * a % P,
    scalar=lambda a, k: a * k % P,
    inv=_inv,
    zero=0,
    one=1,
    is_zero=lambda a: a % P == 0,
)

_FP2_OPS = _FieldOps(
    add=f2_add,
    sub=f2_sub,
    neg=f2_neg,
    mul=f2_mul,
    sqr=f2_sqr,
    scalar=f2_scalar,
    inv=f2_inv,
    zero=FP2_ZERO,
    one=FP2_ONE,
    is_zero=lambda a: a == FP2_ZERO,
)


def _pt_double(f: _FieldOps, pt):
    x, y, z = pt
    A = f.sqr(x)
    B = f.sqr(y)
    C = f.sqr(B)
    D = f.scalar(f.sub(f.sub(f.sqr(f.add(x, B)), A), C), 2)
    E = f.scalar(A, 3)
    F = f.sqr(E)
    nx = f.sub(F, f.scalar(D, 2))
    ny = f.sub(f.mul(E, f.sub(D, nx)), f.scalar(C, 8))
    nz = f.scalar(f.mul(y, z), 2)
    return (nx, ny, nz)


def _pt_add(f: _FieldOps, a, b):
    if f.is_zero(a[2]):
        return b
    if f.is_zero(b[2]):
        return a
    z1z1 = f.sqr(a[2])
    z2z2 = f.sqr(b[2])
    u1 = f.mul(a[0], z2z2)
    u2 = f.mul(b[0], z1z1)
    s1 = f.mul(f.mul(a[1], b[2]), z2z2)
    s2 = f.mul(f.mul(b[1], a[2]), z1z1)
    h = f.sub(u2, u1)
    r = f.sub(s2, s1)
    if f.is_zero(h) and f.is_zero(r):
        return _pt_double(f, a)
    if f.is_zero(h):
        return (f.one, f.one, f.zero)  # P + (-P)
    r = f.scalar(r, 2)
    i = f.sqr(f.scalar(h, 2))
    j = f.mul(h, i)
    v = f.mul(u1, i)
    nx = f.sub(f.sub(f.sqr(r), j), f.scalar(v, 2))
    ny = f.sub(f.mul(r, f.sub(v, nx)), f.scalar(f.mul(s1, j), 2))
    nz = f.mul(f.sub(f.sub(f.sqr(f.add(a[2], b[2])), z1z1), z2z2), h)
    return (nx, ny, nz)


def _pt_mul(f: _FieldOps, pt, k: int):
    if k < 0:
        pt = (pt[0], f.neg(pt[1]), pt[2])
        k = -k
    acc = (f.one, f.one, f.zero)
    if k == 0 or f.is_zero(pt[2]):
        return acc
    for bit in bin(k)[2:]:
        acc = _pt_double(f, acc)
        if bit == "1":
            acc = _pt_add(f, acc, pt)
    return acc


def _pt_affine(f: _FieldOps, pt):
    x, y, z = pt
    if f.is_zero(z):
        return None
    zinv = f.inv(z)
    zinv2 = f.sqr(zinv)
    return (f.mul(x, zinv2), f.mul(y, f.mul(zinv2, zinv)), f.one)


# Public element classes ------------------------------------------------------


class G1:
    __slots__ = ("x", "y", "z")

    def __init__(self, x, y, z=1):
        self.x, self.y, self.z = x, y, z

    @classmethod
    def generator(cls):
        return cls(G1_X, G1_Y, 1)

    @classmethod
    def identity(cls):
        return cls(1, 1, 0)

    def is_identity(self):
        return self.z % P == 0

    def add(self, other: "G1") -> "G1":
        return G1(*_pt_add(_FP_OPS, (self.x, self.y, self.z),
                           (other.x, other.y, other.z)))

    def double(self) -> "G1":
        return G1(*_pt_double(_FP_OPS, (self.x, self.y, self.z)))

    def neg(self) -> "G1":
        return G1(self.x, -self.y % P, self.z)

    def mul(self, k: int) -> "G1":
        return G1(*_pt_mul(_FP_OPS, (self.x, self.y, self.z), k % ORDER))

    def affine(self):
        pt = _pt_affine(_FP_OPS, (self.x, self.y, self.z))
        return None if pt is None else (pt[0], pt[1])

    def eq(self, other: "G1") -> bool:
        return self.to_bytes() == other.to_bytes()

    def is_on_curve(self) -> bool:
        if self.is_identity():
            return True
        x, y = self.affine()
        return (y * y - x * x * x - CURVE_B) % P == 0

    def to_bytes(self) -> bytes:
        aff = self.affine()
        if aff is None:
            return b"\x00" + b"\x00" * 32
        x, y = aff
        flag = 2 | (y & 1)
        return bytes([flag]) + x.to_bytes(32, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "G1":
        if len(data) != 33:
            raise ValueError("G1 encoding must be 33 bytes")
        flag = data[0]
        if flag == 0:
            return cls.identity()
        if flag not in (2, 3):
            raise ValueError("bad G1 flag byte")
        x = int.from_bytes(data[1:], "big")
        if x >= P:
            raise ValueError("G1 x out of range")
        y = _sqrt_fp((x * x * x + CURVE_B) % P)
        if y is None:
            raise ValueError("G1 x not on curve")
        if y & 1 != flag & 1:
            y = P - y
        return cls(x, y, 1)

    @classmethod
    def hash_to_point(cls, data: bytes) -> "G1":
        """Deterministic try-and-increment hashing onto the curve (cofactor 1)."""
        for ctr in range(256):
            h = hashlib.sha256(HASH_DOMAIN + data + bytes([ctr])).digest()
            x = int.from_bytes(h, "big") % P
            y = _sqrt_fp((x * x * x + CURVE_B) % P)
            if y is not None:
                if y & 1:
                    y = P - y
                return cls(x, y, 1)
        raise ValueError("hash_to_point failed")  # pragma: no cover


class G2:
    __slots__ = ("x", "y", "z")

    def __init__(self, x, y, z=FP2_ONE):
        self.x, self.y, self.z = x, y, z

    @classmethod
    def generator(cls):
        return cls(G2_X, G2_Y, FP2_ONE)

    @classmethod
    def identity(cls):
        return cls(FP2_ONE, FP2_ONE, FP2_ZERO)

    def is_identity(self):
        return self.z == FP2_ZERO

    def add(self, other: "G2") -> "G2":
        return G2(*_pt_add(_FP2_OPS, (self.x, self.y, self.z),
                           (other.x, other.y, other.z)))

    def double(self) -> "G2":
        return G2(*_pt_double(_FP2_OPS, (self.x, self.y, self.z)))

    def neg(self) -> "G2":
        return G2(self.x, f2_neg(self.y), self.z)

    def mul(self, k: int) -> "G2":
        return G2(*_pt_mul(_FP2_OPS, (self.x, self.y, self.z), k % ORDER))

    def affine(self):
        pt = _pt_affine(_FP2_OPS, (self.x, self.y, self.z))
        return None if pt is None else (pt[0], pt[1])

    def eq(self, other: "G2") -> bool:
        return self.to_bytes() == other.to_bytes()

    def is_on_curve(self) -> bool:
        if self.is_identity():
            return True
        x, y = self.affine()
        lhs = f2_sqr(y)
        rhs = f2_add(f2_mul(f2_sqr(x), x), TWIST_B)
        return lhs == rhs

    def to_bytes(self) -> bytes:
        aff = self.affine()
        if aff is None:
            return b"\x00" + b"\x00" * 64
        x, y = aff
        if y[0] != 0:
            high = y[0] & 1
        else:
            high = y[1] & 1
        flag = 2 | high
        return bytes([flag]) + x[0].to_bytes(32, "big") + x[1].to_bytes(32, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "G2":
        if len(data) != 65:
            raise ValueError("G2 encoding must be 65 bytes")
        flag = data[0]
        if flag == 0:
            return cls.identity()
        if flag not in (2, 3):
            raise ValueError("bad G2 flag byte")
        x = (int.from_bytes(data[1:33], "big"), int.from_bytes(data[33:], "big"))
        if x[0] >= P or x[1] >= P:
            raise ValueError("G2 x out of range")
        y = f2_sqrt(f2_add(f2_mul(f2_sqr(x), x), TWIST_B))
        if y is None:
            raise ValueError("G2 x not on twist")
        bit = y[0] & 1 if y[0] != 0 else y[1] & 1
        if bit != flag & 1:
            y = f2_neg(y)
        pt = cls(x, y, FP2_ONE)
        return pt


class GT:
    __slots__ = ("val",)

    def __init__(self, val):
        self.val = val

    @classmethod
    def one(cls):
        return cls(FP12_ONE)

    def is_one(self):
        return self.val == FP12_ONE

    def mul(self, other: "GT") -> "GT":
        return GT(f12_mul(self.val, other.val))

    def inv(self) -> "GT":
        return GT(f12_inv(self.val))

    def pow(self, e: int) -> "GT":
        return GT(f12_pow(self.val, e % ORDER))

    def eq(self, other: "GT") -> bool:
        return self.val == other.val

    def to_bytes(self) -> bytes:
        out = bytearray()
        for six in self.val:
            for two in six:
                for c in two:
                    out += c.to_bytes(32, "big")
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "GT":
        if len(data) != 384:
            raise ValueError("GT encoding must be 384 bytes")
        coords = [int.from_bytes(data[i * 32:(i + 1) * 32], "big") for i in range(12)]
        if any(c >= P for c in coords):
            raise ValueError("GT coordinate out of range")
        it = iter(coords)
        val = tuple(
            tuple((next(it), next(it)) for _ in range(3))
            for _ in range(2)
        )
        return cls(val)


# Pairing ---------------------------------------------------------------------


def _line_double(r, q):
    """Tangent line at twist point r, evaluated at G1 point q = (qx, qy)."""
    rx, ry, rz = r
    qx, qy = q
    r_t = f2_sqr(rz)
    A = f2_sqr(rx)
    B = f2_sqr(ry)
    C = f2_sqr(B)
    D = f2_sub(f2_sqr(f2_add(rx, B)), f2_add(A, C))
    D = f2_scalar(D, 2)
    E = f2_scalar(A, 3)
    F = f2_sqr(E)
    C8 = f2_scalar(C, 8)
    nx = f2_sub(F, f2_scalar(D, 2))
    ny = f2_sub(f2_mul(E, f2_sub(D, nx)), C8)
    nz = f2_sub(f2_sqr(f2_add(ry, rz)), f2_add(B, r_t))
    a = f2_sub(f2_sqr(f2_add(rx, E)), f2_add(f2_add(A, F), f2_scalar(B, 4)))
    b = f2_scalar(f2_neg(f2_mul(E, r_t)), 2)
    b = (b[0] * qx % P, b[1] * qx % P)
    c = f2_scalar(f2_mul(nz, r_t), 2)
    c = (c[0] * qy % P, c[1] * qy % P)
    return a, b, c, (nx, ny, nz)


def _line_add(r, p, q, p_y2):
    """Line through twist points r and p, evaluated at G1 point q."""
    rx, ry, rz = r
    px, py = p[0], p[1]
    qx, qy = q
    r_t = f2_sqr(rz)
    B = f2_mul(px, r_t)
    D = f2_sub(f2_sub(f2_sqr(f2_add(py, rz)), p_y2), r_t)
    D = f2_mul(D, r_t)
    H = f2_sub(B, rx)
    I = f2_sqr(H)
    E = f2_scalar(I, 4)
    J = f2_mul(H, E)
    L1 = f2_sub(D, f2_scalar(ry, 2))
    V = f2_mul(rx, E)
    nx = f2_sub(f2_sub(f2_sqr(L1), J), f2_scalar(V, 2))
    nz = f2_sub(f2_sub(f2_sqr(f2_add(rz, H)), r_t), I)
    ny = f2_sub(f2_mul(L1, f2_sub(V, nx)), f2_scalar(f2_mul(ry, J), 2))
    t = f2_sub(f2_sub(f2_sqr(f2_add(py, nz)), p_y2), f2_sqr(nz))
    a = f2_sub(f2_scalar(f2_mul(L1, px), 2), t)
    c = f2_scalar(nz, 2)
    c = (c[0] * qy % P, c[1] * qy % P)
    b = f2_neg(L1)
    b = f2_scalar((b[0] * qx % P, b[1] * qx % P), 2)
    return a, b, c, (nx, ny, nz)


def _mul_line_impl(f, a, b, c):
    """Sparse multiplication of f by the line c + (b + a*v)*w."""
    f0, f1 = f
    A = (b, a, FP2_ZERO)
    t1 = f6_mul(A, f1)
    t3 = f6_scalar(f0, c)
    nx = f6_sub(f6_sub(f6_mul(f6_add(f0, f1), f6_add_c0(A, c)), t1), t3)
    ny = f6_add(t3, f6_mul_tau(t1))
    return (ny, nx)


def f6_add_c0(a, c):
    return (f2_add(a[0], c), a[1], a[2])


def miller_loop(q: G2, p: G1):
    qa = q.affine()
    pa = p.affine()
    if qa is None or pa is None:
        return FP12_ONE
    Q = (qa[0], qa[1])
    Pt = (pa[0], pa[1])
    mQ = (Q[0], f2_neg(Q[1]))
    Qp = f2_sqr(Q[1])
    mQp = f2_sqr(mQ[1])
    f = FP12_ONE
    T = (Q[0], Q[1], FP2_ONE)
    for digit in _LOOP_NAF:
        f = f12_sqr(f)
        a, b, c, T = _line_double(T, Pt)
        f = _mul_line_impl(f, a, b, c)
        if digit == 1:
            a, b, c, T = _line_add(T, Q, Pt, Qp)
            f = _mul_line_impl(f, a, b, c)
        elif digit == -1:
            a, b, c, T = _line_add(T, mQ, Pt, mQp)
            f = _mul_line_impl(f, a, b, c)
    # Frobenius twists of Q for the two final additions
    q1 = (f2_mul(f2_conj(Q[0]), _XI1[1]), f2_mul(f2_conj(Q[1]), _XI1[2]))
    q2x = f2_scalar(Q[0], _XI2[1][0])
    q2 = (q2x, Q[1])
    q1p = f2_sqr(q1[1])
    a, b, c, T = _line_add(T, q1, Pt, q1p)
    f = _mul_line_impl(f, a, b, c)
    q2p = f2_sqr(q2[1])
    a, b, c, T = _line_add(T, q2, Pt, q2p)
    f = _mul_line_impl(f, a, b, c)
    return f


def final_exponentiation(f):
    t1 = f12_conj(f)
    inv = f12_inv(f)
    t1 = f12_mul(t1, inv)
    t1 = f12_mul(t1, f12_frobenius_p2(t1))

    fp1 = f12_frobenius(t1)
    fp2 = f12_frobenius_p2(t1)
    fp3 = f12_frobenius(fp2)

    fu1 = f12_pow(t1, U)
    fu2 = f12_pow(fu1, U)
    fu3 = f12_pow(fu2, U)

    y3 = f12_conj(f12_frobenius(fu1))
    fu2p = f12_frobenius(fu2)
    fu3p = f12_frobenius(fu3)
    y2 = f12_frobenius_p2(fu2)

    y0 = f12_mul(f12_mul(fp1, fp2), fp3)
    y1 = f12_conj(t1)
    y5 = f12_conj(fu2)
    y4 = f12_conj(f12_mul(fu1, fu2p))
    y6 = f12_conj(f12_mul(fu3, fu3p))

    t0 = f12_mul(f12_mul(f12_sqr(y6), y4), y5)
    t1b = f12_mul(f12_mul(y3, y5), t0)
    t0 = f12_mul(t0, y2)
    t1b = f12_mul(f12_sqr(t1b), t0)
    t1b = f12_sqr(t1b)
    t0 = f12_mul(t1b, y1)
    t1b = f12_mul(t1b, y0)
    t0 = f12_sqr(t0)
    return f12_mul(t0, t1b)


def pair(p: G1, q: G2) -> GT:
    if p.is_identity() or q.is_identity():
        return GT.one()
    return GT(final_exponentiation(miller_loop(q, p)))
