# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pairing backend over the 254-bit BN curve (alt_bn128).

Same algorithms as the pure-Python backend, on fixed 4x64-bit limbs with
Montgomery multiplication (CIOS).  Byte encodings are identical between the
two backends; the equivalence test suite relies on that.
"""

import hashlib

ctypedef unsigned long long u64
cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"

CURVE_NAME = "bn254"

P = 21888242871839275222246405745257275088696311157297823662689037894645226208583
ORDER = 21888242871839275222246405745257275088548364400416034343698204186575808495617
U_PARAM = 4965661367192848881

HASH_DOMAIN = b"willvault/h1/v1:"

# ---------------------------------------------------------------------------
# Fp: 4-limb little-endian, Montgomery form
# ---------------------------------------------------------------------------

cdef struct fp:
    u64 l[4]

cdef u64 P_LIMBS[4]
P_LIMBS[0] = 0x3C208C16D87CFD47ULL
P_LIMBS[1] = 0x97816A916871CA8DULL
P_LIMBS[2] = 0xB85045B68181585DULL
P_LIMBS[3] = 0x30644E72E131A029ULL

cdef u64 R1_LIMBS[4]
R1_LIMBS[0] = 0xD35D438DC58F0D9DULL
R1_LIMBS[1] = 0x0A78EB28F5C70B3DULL
R1_LIMBS[2] = 0x666EA36F7879462CULL
R1_LIMBS[3] = 0x0E0A77C19A07DF2FULL

cdef u64 R2_LIMBS[4]
R2_LIMBS[0] = 0xF32CFC5B538AFA89ULL
R2_LIMBS[1] = 0xB5E71911D44501FBULL
R2_LIMBS[2] = 0x47AB1EFF0A417FF6ULL
R2_LIMBS[3] = 0x06D89F71CAB8351FULL

cdef u64 PM2_LIMBS[4]
PM2_LIMBS[0] = 0x3C208C16D87CFD45ULL
PM2_LIMBS[1] = 0x97816A916871CA8DULL
PM2_LIMBS[2] = 0xB85045B68181585DULL
PM2_LIMBS[3] = 0x30644E72E131A029ULL

cdef u64 SQRT_EXP_LIMBS[4]
SQRT_EXP_LIMBS[0] = 0x4F082305B61F3F52ULL
SQRT_EXP_LIMBS[1] = 0x65E05AA45A1C72A3ULL
SQRT_EXP_LIMBS[2] = 0x6E14116DA0605617ULL
SQRT_EXP_LIMBS[3] = 0x0C19139CB84C680AULL

cdef u64 N0 = 0x87D20782E4866389ULL
cdef u64 U_PARAM_C = 4965661367192848881ULL

cdef fp FP_ZERO
cdef fp FP_ONE          # Montgomery form of 1
cdef fp FP_R2

cdef inline void fp_copy(fp *r, const fp *a) nogil:
    r.l[0] = a.l[0]; r.l[1] = a.l[1]; r.l[2] = a.l[2]; r.l[3] = a.l[3]

cdef inline bint fp_is_zero(const fp *a) nogil:
    return a.l[0] == 0 and a.l[1] == 0 and a.l[2] == 0 and a.l[3] == 0

cdef inline bint fp_eq(const fp *a, const fp *b) nogil:
    return (a.l[0] == b.l[0] and a.l[1] == b.l[1]
            and a.l[2] == b.l[2] and a.l[3] == b.l[3])

cdef inline int fp_cmp_p(const u64 *t) nogil:
    # compare 4-limb value against p
    cdef int i
    for i in range(3, -1, -1):
        if t[i] > P_LIMBS[i]:
            return 1
        if t[i] < P_LIMBS[i]:
            return -1
    return 0

cdef inline void _sub_p(u64 *t) nogil:
    cdef u128 acc
    cdef u64 borrow = 0
    cdef int i
    for i in range(4):
        acc = <u128>t[i] - P_LIMBS[i] - borrow
        t[i] = <u64>acc
        borrow = 1 if (acc >> 64) != 0 else 0

cdef inline void fp_add(fp *r, const fp *a, const fp *b) nogil:
    cdef u128 acc = 0
    cdef u64 carry = 0
    cdef int i
    for i in range(4):
        acc = <u128>a.l[i] + b.l[i] + carry
        r.l[i] = <u64>acc
        carry = <u64>(acc >> 64)
    if carry or fp_cmp_p(r.l) >= 0:
        _sub_p(r.l)

cdef inline void fp_sub(fp *r, const fp *a, const fp *b) nogil:
    cdef u128 acc
    cdef u64 borrow = 0
    cdef int i
    for i in range(4):
        acc = <u128>a.l[i] - b.l[i] - borrow
        r.l[i] = <u64>acc
        borrow = 1 if (acc >> 64) != 0 else 0
    cdef u64 carry = 0
    if borrow:
        acc = 0
        for i in range(4):
            acc = <u128>r.l[i] + P_LIMBS[i] + carry
            r.l[i] = <u64>acc
            carry = <u64>(acc >> 64)

cdef inline void fp_neg(fp *r, const fp *a) nogil:
    if fp_is_zero(a):
        fp_copy(r, a)
    else:
        fp_sub(r, &FP_ZERO, a)

cdef inline void fp_dbl(fp *r, const fp *a) nogil:
    fp_add(r, a, a)

cdef void fp_mul(fp *r, const fp *a, const fp *b) nogil:
    # CIOS Montgomery multiplication
    cdef u64 t[6]
    cdef u128 acc
    cdef u64 carry, m
    cdef int i, j
    for i in range(6):
        t[i] = 0
    for i in range(4):
        carry = 0
        for j in range(4):
            acc = <u128>a.l[i] * b.l[j] + t[j] + carry
            t[j] = <u64>acc
            carry = <u64>(acc >> 64)
        acc = <u128>t[4] + carry
        t[4] = <u64>acc
        t[5] = <u64>(acc >> 64)

        m = t[0] * N0
        acc = <u128>m * P_LIMBS[0] + t[0]
        carry = <u64>(acc >> 64)
        for j in range(1, 4):
            acc = <u128>m * P_LIMBS[j] + t[j] + carry
            t[j - 1] = <u64>acc
            carry = <u64>(acc >> 64)
        acc = <u128>t[4] + carry
        t[3] = <u64>acc
        t[4] = t[5] + <u64>(acc >> 64)
    if t[4] != 0 or fp_cmp_p(t) >= 0:
        _sub_p(t)
    r.l[0] = t[0]; r.l[1] = t[1]; r.l[2] = t[2]; r.l[3] = t[3]

cdef inline void fp_sqr(fp *r, const fp *a) nogil:
    fp_mul(r, a, a)

cdef void fp_pow_limbs(fp *r, const fp *a, const u64 *e) nogil:
    # MSB-first ladder over a 4-limb exponent
    cdef fp acc
    cdef int i, b
    cdef bint started = 0
    fp_copy(&acc, &FP_ONE)
    for i in range(3, -1, -1):
        for b in range(63, -1, -1):
            if started:
                fp_sqr(&acc, &acc)
            if (e[i] >> b) & 1:
                if started:
                    fp_mul(&acc, &acc, a)
                else:
                    fp_copy(&acc, a)
                    started = 1
    fp_copy(r, &acc)

cdef inline void fp_inv(fp *r, const fp *a) nogil:
    fp_pow_limbs(r, a, PM2_LIMBS)

cdef bint fp_sqrt(fp *r, const fp *a) nogil:
    # p = 3 mod 4
    cdef fp cand, chk
    fp_pow_limbs(&cand, a, SQRT_EXP_LIMBS)
    fp_sqr(&chk, &cand)
    if not fp_eq(&chk, a):
        return 0
    fp_copy(r, &cand)
    return 1

cdef void fp_from_object(fp *r, object v):
    cdef fp raw
    cdef u64 limb
    cdef int i
    v = v % P
    for i in range(4):
        limb = <u64>(v & 0xFFFFFFFFFFFFFFFF)
        raw.l[i] = limb
        v >>= 64
    fp_mul(r, &raw, &FP_R2)

cdef object fp_to_object(const fp *a):
    # leave Montgomery form: REDC(a) == a * 1
    cdef fp one_raw, out
    one_raw.l[0] = 1; one_raw.l[1] = 0; one_raw.l[2] = 0; one_raw.l[3] = 0
    fp_mul(&out, a, &one_raw)
    cdef object v = 0
    cdef int i
    for i in range(3, -1, -1):
        v = (v << 64) | out.l[i]
    return v

cdef bint fp_is_odd(const fp *a) nogil:
    # parity of the canonical (non-Montgomery) value
    cdef fp one_raw, out
    one_raw.l[0] = 1; one_raw.l[1] = 0; one_raw.l[2] = 0; one_raw.l[3] = 0
    fp_mul(&out, a, &one_raw)
    return out.l[0] & 1

# ---------------------------------------------------------------------------
# Fp2 = Fp[i]/(i^2 + 1)
# ---------------------------------------------------------------------------

cdef struct fp2:
    fp c0
    fp c1

cdef fp2 F2_ZERO, F2_ONE, F2_XI, F2_TWIST_B
cdef fp2 XI1[5]
cdef fp2 XI2[5]

cdef inline void f2_copy(fp2 *r, const fp2 *a) nogil:
    fp_copy(&r.c0, &a.c0); fp_copy(&r.c1, &a.c1)

cdef inline bint f2_is_zero(const fp2 *a) nogil:
    return fp_is_zero(&a.c0) and fp_is_zero(&a.c1)

cdef inline bint f2_eq(const fp2 *a, const fp2 *b) nogil:
    return fp_eq(&a.c0, &b.c0) and fp_eq(&a.c1, &b.c1)

cdef inline void f2_add(fp2 *r, const fp2 *a, const fp2 *b) nogil:
    fp_add(&r.c0, &a.c0, &b.c0); fp_add(&r.c1, &a.c1, &b.c1)

cdef inline void f2_sub(fp2 *r, const fp2 *a, const fp2 *b) nogil:
    fp_sub(&r.c0, &a.c0, &b.c0); fp_sub(&r.c1, &a.c1, &b.c1)

cdef inline void f2_neg(fp2 *r, const fp2 *a) nogil:
    fp_neg(&r.c0, &a.c0); fp_neg(&r.c1, &a.c1)

cdef inline void f2_conj(fp2 *r, const fp2 *a) nogil:
    fp_copy(&r.c0, &a.c0); fp_neg(&r.c1, &a.c1)

cdef void f2_mul(fp2 *r, const fp2 *a, const fp2 *b) nogil:
    cdef fp t0, t1, s0, s1
    fp_mul(&t0, &a.c0, &b.c0)
    fp_mul(&t1, &a.c1, &b.c1)
    fp_add(&s0, &a.c0, &a.c1)
    fp_add(&s1, &b.c0, &b.c1)
    fp_mul(&s0, &s0, &s1)
    fp_sub(&s0, &s0, &t0)
    fp_sub(&s0, &s0, &t1)
    fp_sub(&r.c0, &t0, &t1)
    fp_copy(&r.c1, &s0)

cdef void f2_sqr(fp2 *r, const fp2 *a) nogil:
    cdef fp t0, t1
    fp_add(&t0, &a.c0, &a.c1)
    fp_sub(&t1, &a.c0, &a.c1)
    fp_mul(&t0, &t0, &t1)
    fp_mul(&t1, &a.c0, &a.c1)
    fp_copy(&r.c0, &t0)
    fp_dbl(&r.c1, &t1)

cdef inline void f2_dbl(fp2 *r, const fp2 *a) nogil:
    fp_dbl(&r.c0, &a.c0); fp_dbl(&r.c1, &a.c1)

cdef inline void f2_small(fp2 *r, const fp2 *a, int k) nogil:
    # multiply by a small nonnegative constant via doubling chain (k in 2,3,4,8)
    cdef fp2 t
    if k == 2:
        f2_dbl(r, a)
    elif k == 3:
        f2_dbl(&t, a); f2_add(r, &t, a)
    elif k == 4:
        f2_dbl(&t, a); f2_dbl(r, &t)
    elif k == 8:
        f2_dbl(&t, a); f2_dbl(&t, &t); f2_dbl(r, &t)

cdef inline void f2_scale_fp(fp2 *r, const fp2 *a, const fp *k) nogil:
    fp_mul(&r.c0, &a.c0, k); fp_mul(&r.c1, &a.c1, k)

cdef void f2_mul_xi(fp2 *r, const fp2 *a) nogil:
    # multiply by xi = 9 + i
    cdef fp t0, t1, n0, n1
    fp_dbl(&t0, &a.c0); fp_dbl(&t0, &t0); fp_dbl(&t0, &t0)
    fp_add(&t0, &t0, &a.c0)          # 9*c0
    fp_dbl(&t1, &a.c1); fp_dbl(&t1, &t1); fp_dbl(&t1, &t1)
    fp_add(&t1, &t1, &a.c1)          # 9*c1
    fp_sub(&n0, &t0, &a.c1)
    fp_add(&n1, &t1, &a.c0)
    fp_copy(&r.c0, &n0); fp_copy(&r.c1, &n1)

cdef void f2_inv(fp2 *r, const fp2 *a) nogil:
    cdef fp t0, t1
    fp_sqr(&t0, &a.c0)
    fp_sqr(&t1, &a.c1)
    fp_add(&t0, &t0, &t1)
    fp_inv(&t0, &t0)
    fp_mul(&r.c0, &a.c0, &t0)
    fp_mul(&t1, &a.c1, &t0)
    fp_neg(&r.c1, &t1)

cdef bint f2_sqrt(fp2 *r, const fp2 *a) nogil:
    cdef fp n, s, t2, t, half, invt, c1
    cdef fp2 cand, chk
    if fp_is_zero(&a.c1):
        if fp_sqrt(&t, &a.c0):
            fp_copy(&r.c0, &t); fp_copy(&r.c1, &FP_ZERO)
            return 1
        fp_neg(&t, &a.c0)
        if fp_sqrt(&t, &t):
            fp_copy(&r.c0, &FP_ZERO); fp_copy(&r.c1, &t)
            return 1
        return 0
    fp_sqr(&n, &a.c0)
    fp_sqr(&s, &a.c1)
    fp_add(&n, &n, &s)
    if not fp_sqrt(&s, &n):
        return 0
    # half = inverse of 2
    cdef fp two
    fp_add(&two, &FP_ONE, &FP_ONE)
    fp_inv(&half, &two)
    fp_add(&t2, &a.c0, &s)
    fp_mul(&t2, &t2, &half)
    if not fp_sqrt(&t, &t2):
        fp_sub(&t2, &a.c0, &s)
        fp_mul(&t2, &t2, &half)
        if not fp_sqrt(&t, &t2):
            return 0
    fp_dbl(&invt, &t)
    fp_inv(&invt, &invt)
    fp_mul(&c1, &a.c1, &invt)
    fp_copy(&cand.c0, &t); fp_copy(&cand.c1, &c1)
    f2_sqr(&chk, &cand)
    if not f2_eq(&chk, a):
        return 0
    f2_copy(r, &cand)
    return 1

cdef void f2_pow_object(fp2 *r, const fp2 *a, object e):
    cdef fp2 acc, base
    f2_copy(&acc, &F2_ONE)
    f2_copy(&base, a)
    while e > 0:
        if e & 1:
            f2_mul(&acc, &acc, &base)
        f2_sqr(&base, &base)
        e >>= 1
    f2_copy(r, &acc)

# ---------------------------------------------------------------------------
# Fp6 = Fp2[v]/(v^3 - xi), Fp12 = Fp6[w]/(w^2 - v)
# ---------------------------------------------------------------------------

cdef struct fp6:
    fp2 c0
    fp2 c1
    fp2 c2

cdef struct fp12:
    fp6 c0
    fp6 c1

cdef fp6 F6_ZERO, F6_ONE
cdef fp12 F12_ONE

cdef inline void f6_copy(fp6 *r, const fp6 *a) nogil:
    f2_copy(&r.c0, &a.c0); f2_copy(&r.c1, &a.c1); f2_copy(&r.c2, &a.c2)

cdef inline bint f6_eq(const fp6 *a, const fp6 *b) nogil:
    return f2_eq(&a.c0, &b.c0) and f2_eq(&a.c1, &b.c1) and f2_eq(&a.c2, &b.c2)

cdef inline void f6_add(fp6 *r, const fp6 *a, const fp6 *b) nogil:
    f2_add(&r.c0, &a.c0, &b.c0); f2_add(&r.c1, &a.c1, &b.c1); f2_add(&r.c2, &a.c2, &b.c2)

cdef inline void f6_sub(fp6 *r, const fp6 *a, const fp6 *b) nogil:
    f2_sub(&r.c0, &a.c0, &b.c0); f2_sub(&r.c1, &a.c1, &b.c1); f2_sub(&r.c2, &a.c2, &b.c2)

cdef inline void f6_neg(fp6 *r, const fp6 *a) nogil:
    f2_neg(&r.c0, &a.c0); f2_neg(&r.c1, &a.c1); f2_neg(&r.c2, &a.c2)

cdef void f6_mul(fp6 *r, const fp6 *a, const fp6 *b) nogil:
    cdef fp2 t0, t1, t2, s0, s1, s2, u0, u1
    f2_mul(&t0, &a.c0, &b.c0)
    f2_mul(&t1, &a.c1, &b.c1)
    f2_mul(&t2, &a.c2, &b.c2)
    # c0 = t0 + xi*((a1+a2)(b1+b2) - t1 - t2)
    f2_add(&s0, &a.c1, &a.c2)
    f2_add(&s1, &b.c1, &b.c2)
    f2_mul(&u0, &s0, &s1)
    f2_sub(&u0, &u0, &t1)
    f2_sub(&u0, &u0, &t2)
    f2_mul_xi(&u0, &u0)
    # c1 = (a0+a1)(b0+b1) - t0 - t1 + xi*t2
    f2_add(&s0, &a.c0, &a.c1)
    f2_add(&s1, &b.c0, &b.c1)
    f2_mul(&u1, &s0, &s1)
    f2_sub(&u1, &u1, &t0)
    f2_sub(&u1, &u1, &t1)
    f2_mul_xi(&s2, &t2)
    f2_add(&u1, &u1, &s2)
    # c2 = (a0+a2)(b0+b2) - t0 - t2 + t1
    f2_add(&s0, &a.c0, &a.c2)
    f2_add(&s1, &b.c0, &b.c2)
    f2_mul(&s2, &s0, &s1)
    f2_sub(&s2, &s2, &t0)
    f2_sub(&s2, &s2, &t2)
    f2_add(&s2, &s2, &t1)
    f2_add(&r.c0, &t0, &u0)
    f2_copy(&r.c1, &u1)
    f2_copy(&r.c2, &s2)

cdef void f6_sqr(fp6 *r, const fp6 *a) nogil:
    cdef fp2 s0, s1, s2, s3, s4, t
    f2_sqr(&s0, &a.c0)
    f2_mul(&s1, &a.c0, &a.c1)
    f2_dbl(&s1, &s1)
    f2_sub(&t, &a.c0, &a.c1)
    f2_add(&t, &t, &a.c2)
    f2_sqr(&s2, &t)
    f2_mul(&s3, &a.c1, &a.c2)
    f2_dbl(&s3, &s3)
    f2_sqr(&s4, &a.c2)
    # c0 = s0 + xi*s3 ; c1 = s1 + xi*s4 ; c2 = s1 + s2 + s3 - s0 - s4
    f2_mul_xi(&t, &s3)
    f2_add(&r.c0, &s0, &t)
    f2_mul_xi(&t, &s4)
    f2_add(&r.c1, &s1, &t)
    f2_add(&t, &s1, &s2)
    f2_add(&t, &t, &s3)
    f2_sub(&t, &t, &s0)
    f2_sub(&r.c2, &t, &s4)

cdef inline void f6_scale_f2(fp6 *r, const fp6 *a, const fp2 *k) nogil:
    f2_mul(&r.c0, &a.c0, k); f2_mul(&r.c1, &a.c1, k); f2_mul(&r.c2, &a.c2, k)

cdef inline void f6_mul_tau(fp6 *r, const fp6 *a) nogil:
    cdef fp2 t
    f2_mul_xi(&t, &a.c2)
    f2_copy(&r.c2, &a.c1)
    f2_copy(&r.c1, &a.c0)
    f2_copy(&r.c0, &t)

cdef void f6_inv(fp6 *r, const fp6 *a) nogil:
    cdef fp2 A, B, C, F, t0, t1
    f2_sqr(&A, &a.c0)
    f2_mul(&t0, &a.c1, &a.c2)
    f2_mul_xi(&t0, &t0)
    f2_sub(&A, &A, &t0)
    f2_sqr(&t0, &a.c2)
    f2_mul_xi(&t0, &t0)
    f2_mul(&t1, &a.c0, &a.c1)
    f2_sub(&B, &t0, &t1)
    f2_sqr(&t0, &a.c1)
    f2_mul(&t1, &a.c0, &a.c2)
    f2_sub(&C, &t0, &t1)
    f2_mul(&t0, &a.c2, &B)
    f2_mul(&t1, &a.c1, &C)
    f2_add(&t0, &t0, &t1)
    f2_mul_xi(&t0, &t0)
    f2_mul(&t1, &a.c0, &A)
    f2_add(&F, &t0, &t1)
    f2_inv(&F, &F)
    f2_mul(&r.c0, &A, &F)
    f2_mul(&r.c1, &B, &F)
    f2_mul(&r.c2, &C, &F)

cdef inline void f12_copy(fp12 *r, const fp12 *a) nogil:
    f6_copy(&r.c0, &a.c0); f6_copy(&r.c1, &a.c1)

cdef inline bint f12_eq(const fp12 *a, const fp12 *b) nogil:
    return f6_eq(&a.c0, &b.c0) and f6_eq(&a.c1, &b.c1)

cdef void f12_mul(fp12 *r, const fp12 *a, const fp12 *b) nogil:
    cdef fp6 t0, t1, s0, s1
    f6_mul(&t0, &a.c0, &b.c0)
    f6_mul(&t1, &a.c1, &b.c1)
    f6_add(&s0, &a.c0, &a.c1)
    f6_add(&s1, &b.c0, &b.c1)
    f6_mul(&s0, &s0, &s1)
    f6_sub(&s0, &s0, &t0)
    f6_sub(&s0, &s0, &t1)
    f6_mul_tau(&t1, &t1)
    f6_add(&r.c0, &t0, &t1)
    f6_copy(&r.c1, &s0)

cdef void f12_sqr(fp12 *r, const fp12 *a) nogil:
    cdef fp6 t, s0, s1
    f6_mul(&t, &a.c0, &a.c1)
    f6_add(&s0, &a.c0, &a.c1)
    f6_mul_tau(&s1, &a.c1)
    f6_add(&s1, &a.c0, &s1)
    f6_mul(&s0, &s0, &s1)
    f6_sub(&s0, &s0, &t)
    f6_mul_tau(&s1, &t)
    f6_sub(&r.c0, &s0, &s1)
    f6_add(&r.c1, &t, &t)

cdef inline void f12_conj(fp12 *r, const fp12 *a) nogil:
    f6_copy(&r.c0, &a.c0)
    f6_neg(&r.c1, &a.c1)

cdef void f12_inv(fp12 *r, const fp12 *a) nogil:
    cdef fp6 t0, t1
    f6_sqr(&t0, &a.c0)
    f6_sqr(&t1, &a.c1)
    f6_mul_tau(&t1, &t1)
    f6_sub(&t0, &t0, &t1)
    f6_inv(&t0, &t0)
    f6_mul(&r.c0, &a.c0, &t0)
    f6_mul(&t1, &a.c1, &t0)
    f6_neg(&r.c1, &t1)

cdef void f12_frobenius(fp12 *r, const fp12 *a) nogil:
    cdef fp12 t
    f2_conj(&t.c0.c0, &a.c0.c0)
    f2_conj(&t.c0.c1, &a.c0.c1)
    f2_mul(&t.c0.c1, &t.c0.c1, &XI1[1])
    f2_conj(&t.c0.c2, &a.c0.c2)
    f2_mul(&t.c0.c2, &t.c0.c2, &XI1[3])
    f2_conj(&t.c1.c0, &a.c1.c0)
    f2_mul(&t.c1.c0, &t.c1.c0, &XI1[0])
    f2_conj(&t.c1.c1, &a.c1.c1)
    f2_mul(&t.c1.c1, &t.c1.c1, &XI1[2])
    f2_conj(&t.c1.c2, &a.c1.c2)
    f2_mul(&t.c1.c2, &t.c1.c2, &XI1[4])
    f12_copy(r, &t)

cdef void f12_frobenius_p2(fp12 *r, const fp12 *a) nogil:
    cdef fp12 t
    f2_copy(&t.c0.c0, &a.c0.c0)
    f2_mul(&t.c0.c1, &a.c0.c1, &XI2[1])
    f2_mul(&t.c0.c2, &a.c0.c2, &XI2[3])
    f2_mul(&t.c1.c0, &a.c1.c0, &XI2[0])
    f2_mul(&t.c1.c1, &a.c1.c1, &XI2[2])
    f2_mul(&t.c1.c2, &a.c1.c2, &XI2[4])
    f12_copy(r, &t)

cdef void f12_pow_u64(fp12 *r, const fp12 *a, u64 e) nogil:
    cdef fp12 acc
    cdef int bit = 63
    cdef bint started = 0
    f12_copy(&acc, &F12_ONE)
    while bit >= 0:
        if started:
            f12_sqr(&acc, &acc)
        if (e >> bit) & 1:
            if started:
                f12_mul(&acc, &acc, a)
            else:
                f12_copy(&acc, a)
                started = 1
        bit -= 1
    f12_copy(r, &acc)

cdef void f12_pow_object(fp12 *r, const fp12 *a, object e):
    # 4-bit window over an arbitrary-size Python exponent
    cdef fp12 table[16]
    cdef fp12 acc
    cdef int i, nib
    if e == 0:
        f12_copy(r, &F12_ONE)
        return
    f12_copy(&table[0], &F12_ONE)
    f12_copy(&table[1], a)
    for i in range(2, 16):
        f12_mul(&table[i], &table[i - 1], a)
    cdef object digits = []
    while e > 0:
        digits.append(e & 15)
        e >>= 4
    f12_copy(&acc, &F12_ONE)
    cdef bint started = 0
    for i in range(len(digits) - 1, -1, -1):
        if started:
            f12_sqr(&acc, &acc); f12_sqr(&acc, &acc)
            f12_sqr(&acc, &acc); f12_sqr(&acc, &acc)
        nib = digits[i]
        if nib:
            if started:
                f12_mul(&acc, &acc, &table[nib])
            else:
                f12_copy(&acc, &table[nib])
                started = 1
        elif not started:
            continue
        else:
            pass
    f12_copy(r, &acc)

# ---------------------------------------------------------------------------
# Curve points (Jacobian)
# ---------------------------------------------------------------------------

cdef struct g1pt:
    fp x
    fp y
    fp z

cdef struct g2pt:
    fp2 x
    fp2 y
    fp2 z

cdef fp FP_B3          # curve b = 3 in Montgomery form
cdef g1pt G1_GEN
cdef g2pt G2_GEN

cdef inline bint g1_is_inf(const g1pt *a) nogil:
    return fp_is_zero(&a.z)

cdef inline bint g2_is_inf(const g2pt *a) nogil:
    return f2_is_zero(&a.z)

cdef void g1_double(g1pt *r, const g1pt *a) nogil:
    cdef fp A, B, C, D, E, F, t, nx, ny, nz
    fp_sqr(&A, &a.x)
    fp_sqr(&B, &a.y)
    fp_sqr(&C, &B)
    fp_add(&t, &a.x, &B)
    fp_sqr(&t, &t)
    fp_sub(&t, &t, &A)
    fp_sub(&t, &t, &C)
    fp_dbl(&D, &t)
    fp_dbl(&E, &A)
    fp_add(&E, &E, &A)
    fp_sqr(&F, &E)
    fp_dbl(&t, &D)
    fp_sub(&nx, &F, &t)
    fp_dbl(&C, &C); fp_dbl(&C, &C); fp_dbl(&C, &C)
    fp_sub(&t, &D, &nx)
    fp_mul(&t, &E, &t)
    fp_sub(&ny, &t, &C)
    fp_mul(&t, &a.y, &a.z)
    fp_dbl(&nz, &t)
    fp_copy(&r.x, &nx); fp_copy(&r.y, &ny); fp_copy(&r.z, &nz)

cdef void g1_add(g1pt *r, const g1pt *a, const g1pt *b) nogil:
    cdef fp z1z1, z2z2, u1, u2, s1, s2, h, rr, i, j, v, t, nx, ny, nz
    if g1_is_inf(a):
        r.x = b.x; r.y = b.y; r.z = b.z
        return
    if g1_is_inf(b):
        r.x = a.x; r.y = a.y; r.z = a.z
        return
    fp_sqr(&z1z1, &a.z)
    fp_sqr(&z2z2, &b.z)
    fp_mul(&u1, &a.x, &z2z2)
    fp_mul(&u2, &b.x, &z1z1)
    fp_mul(&s1, &a.y, &b.z)
    fp_mul(&s1, &s1, &z2z2)
    fp_mul(&s2, &b.y, &a.z)
    fp_mul(&s2, &s2, &z1z1)
    fp_sub(&h, &u2, &u1)
    fp_sub(&rr, &s2, &s1)
    if fp_is_zero(&h):
        if fp_is_zero(&rr):
            g1_double(r, a)
            return
        fp_copy(&r.x, &FP_ONE); fp_copy(&r.y, &FP_ONE); fp_copy(&r.z, &FP_ZERO)
        return
    fp_add(&t, &a.z, &b.z)
    fp_dbl(&rr, &rr)
    fp_dbl(&i, &h)
    fp_sqr(&i, &i)
    fp_mul(&j, &h, &i)
    fp_mul(&v, &u1, &i)
    fp_sqr(&nx, &rr)
    fp_sub(&nx, &nx, &j)
    fp_dbl(&u2, &v)
    fp_sub(&nx, &nx, &u2)
    fp_sub(&ny, &v, &nx)
    fp_mul(&ny, &rr, &ny)
    fp_mul(&u2, &s1, &j)
    fp_dbl(&u2, &u2)
    fp_sub(&ny, &ny, &u2)
    fp_sqr(&t, &t)
    fp_sub(&t, &t, &z1z1)
    fp_sub(&t, &t, &z2z2)
    fp_mul(&nz, &t, &h)
    fp_copy(&r.x, &nx); fp_copy(&r.y, &ny); fp_copy(&r.z, &nz)

cdef void g1_mul_limbs(g1pt *r, const g1pt *a, const u64 *k) nogil:
    cdef g1pt acc
    cdef int i, b
    fp_copy(&acc.x, &FP_ONE); fp_copy(&acc.y, &FP_ONE); fp_copy(&acc.z, &FP_ZERO)
    for i in range(3, -1, -1):
        for b in range(63, -1, -1):
            g1_double(&acc, &acc)
            if (k[i] >> b) & 1:
                g1_add(&acc, &acc, a)
    r.x = acc.x; r.y = acc.y; r.z = acc.z

cdef void g2_double(g2pt *r, const g2pt *a) nogil:
    cdef fp2 A, B, C, D, E, F, t, nx, ny, nz
    f2_sqr(&A, &a.x)
    f2_sqr(&B, &a.y)
    f2_sqr(&C, &B)
    f2_add(&t, &a.x, &B)
    f2_sqr(&t, &t)
    f2_sub(&t, &t, &A)
    f2_sub(&t, &t, &C)
    f2_dbl(&D, &t)
    f2_small(&E, &A, 3)
    f2_sqr(&F, &E)
    f2_dbl(&t, &D)
    f2_sub(&nx, &F, &t)
    f2_small(&C, &C, 8)
    f2_sub(&t, &D, &nx)
    f2_mul(&t, &E, &t)
    f2_sub(&ny, &t, &C)
    f2_mul(&t, &a.y, &a.z)
    f2_dbl(&nz, &t)
    f2_copy(&r.x, &nx); f2_copy(&r.y, &ny); f2_copy(&r.z, &nz)

cdef void g2_add(g2pt *r, const g2pt *a, const g2pt *b) nogil:
    cdef fp2 z1z1, z2z2, u1, u2, s1, s2, h, rr, i, j, v, t, nx, ny, nz
    if g2_is_inf(a):
        r.x = b.x; r.y = b.y; r.z = b.z
        return
    if g2_is_inf(b):
        r.x = a.x; r.y = a.y; r.z = a.z
        return
    f2_sqr(&z1z1, &a.z)
    f2_sqr(&z2z2, &b.z)
    f2_mul(&u1, &a.x, &z2z2)
    f2_mul(&u2, &b.x, &z1z1)
    f2_mul(&s1, &a.y, &b.z)
    f2_mul(&s1, &s1, &z2z2)
    f2_mul(&s2, &b.y, &a.z)
    f2_mul(&s2, &s2, &z1z1)
    f2_sub(&h, &u2, &u1)
    f2_sub(&rr, &s2, &s1)
    if f2_is_zero(&h):
        if f2_is_zero(&rr):
            g2_double(r, a)
            return
        f2_copy(&r.x, &F2_ONE); f2_copy(&r.y, &F2_ONE)
        f2_copy(&r.z, &F2_ZERO)
        return
    f2_add(&t, &a.z, &b.z)
    f2_dbl(&rr, &rr)
    f2_dbl(&i, &h)
    f2_sqr(&i, &i)
    f2_mul(&j, &h, &i)
    f2_mul(&v, &u1, &i)
    f2_sqr(&nx, &rr)
    f2_sub(&nx, &nx, &j)
    f2_dbl(&u2, &v)
    f2_sub(&nx, &nx, &u2)
    f2_sub(&ny, &v, &nx)
    f2_mul(&ny, &rr, &ny)
    f2_mul(&u2, &s1, &j)
    f2_dbl(&u2, &u2)
    f2_sub(&ny, &ny, &u2)
    f2_sqr(&t, &t)
    f2_sub(&t, &t, &z1z1)
    f2_sub(&t, &t, &z2z2)
    f2_mul(&nz, &t, &h)
    f2_copy(&r.x, &nx); f2_copy(&r.y, &ny); f2_copy(&r.z, &nz)

cdef void g2_mul_limbs(g2pt *r, const g2pt *a, const u64 *k) nogil:
    cdef g2pt acc
    cdef int i, b
    f2_copy(&acc.x, &F2_ONE); f2_copy(&acc.y, &F2_ONE); f2_copy(&acc.z, &F2_ZERO)
    for i in range(3, -1, -1):
        for b in range(63, -1, -1):
            g2_double(&acc, &acc)
            if (k[i] >> b) & 1:
                g2_add(&acc, &acc, a)
    r.x = acc.x; r.y = acc.y; r.z = acc.z

cdef bint g1_affine(fp *ax, fp *ay, const g1pt *a) nogil:
    cdef fp zi, zi2
    if g1_is_inf(a):
        return 0
    fp_inv(&zi, &a.z)
    fp_sqr(&zi2, &zi)
    fp_mul(ax, &a.x, &zi2)
    fp_mul(&zi2, &zi2, &zi)
    fp_mul(ay, &a.y, &zi2)
    return 1

cdef bint g2_affine(fp2 *ax, fp2 *ay, const g2pt *a) nogil:
    cdef fp2 zi, zi2
    if g2_is_inf(a):
        return 0
    f2_inv(&zi, &a.z)
    f2_sqr(&zi2, &zi)
    f2_mul(ax, &a.x, &zi2)
    f2_mul(&zi2, &zi2, &zi)
    f2_mul(ay, &a.y, &zi2)
    return 1

# ---------------------------------------------------------------------------
# Pairing
# ---------------------------------------------------------------------------

cdef int LOOP_NAF[65]
cdef int LOOP_NAF_LEN = 0

cdef void _mul_line(fp12 *f, const fp2 *a, const fp2 *b, const fp2 *c) nogil:
    # f *= (c + (b + a*v) * w)
    cdef fp6 A, t1, t3, s
    f2_copy(&A.c0, b)
    f2_copy(&A.c1, a)
    f2_copy(&A.c2, &F2_ZERO)
    f6_mul(&t1, &A, &f.c1)
    f6_scale_f2(&t3, &f.c0, c)
    f2_add(&A.c0, &A.c0, c)
    f6_add(&s, &f.c0, &f.c1)
    f6_mul(&s, &s, &A)
    f6_sub(&s, &s, &t1)
    f6_sub(&s, &s, &t3)
    f6_mul_tau(&t1, &t1)
    f6_add(&f.c0, &t3, &t1)
    f6_copy(&f.c1, &s)

cdef void _line_double(fp2 *la, fp2 *lb, fp2 *lc, g2pt *T, const fp *qx, const fp *qy) nogil:
    cdef fp2 r_t, A, B, C, D, E, F, t, nx, ny, nz
    f2_sqr(&r_t, &T.z)
    f2_sqr(&A, &T.x)
    f2_sqr(&B, &T.y)
    f2_sqr(&C, &B)
    f2_add(&t, &T.x, &B)
    f2_sqr(&t, &t)
    f2_sub(&t, &t, &A)
    f2_sub(&t, &t, &C)
    f2_dbl(&D, &t)
    f2_small(&E, &A, 3)
    f2_sqr(&F, &E)
    f2_dbl(&t, &D)
    f2_sub(&nx, &F, &t)
    f2_sub(&t, &D, &nx)
    f2_mul(&t, &E, &t)
    f2_small(&C, &C, 8)
    f2_sub(&ny, &t, &C)
    f2_add(&t, &T.y, &T.z)
    f2_sqr(&t, &t)
    f2_sub(&t, &t, &B)
    f2_sub(&nz, &t, &r_t)
    # a = (x + E)^2 - A - F - 4B
    f2_add(&t, &T.x, &E)
    f2_sqr(&t, &t)
    f2_sub(&t, &t, &A)
    f2_sub(&t, &t, &F)
    f2_small(&B, &B, 4)
    f2_sub(la, &t, &B)
    # b = -2*E*r_t * qx
    f2_mul(&t, &E, &r_t)
    f2_dbl(&t, &t)
    f2_neg(&t, &t)
    f2_scale_fp(lb, &t, qx)
    # c = 2*nz*r_t * qy
    f2_mul(&t, &nz, &r_t)
    f2_dbl(&t, &t)
    f2_scale_fp(lc, &t, qy)
    f2_copy(&T.x, &nx); f2_copy(&T.y, &ny); f2_copy(&T.z, &nz)

cdef void _line_add(fp2 *la, fp2 *lb, fp2 *lc, g2pt *T,
                    const fp2 *px, const fp2 *py, const fp2 *py2,
                    const fp *qx, const fp *qy) nogil:
    cdef fp2 r_t, B, D, H, I, E, J, L1, V, nx, ny, nz, t, t2
    f2_sqr(&r_t, &T.z)
    f2_mul(&B, px, &r_t)
    f2_add(&D, py, &T.z)
    f2_sqr(&D, &D)
    f2_sub(&D, &D, py2)
    f2_sub(&D, &D, &r_t)
    f2_mul(&D, &D, &r_t)
    f2_sub(&H, &B, &T.x)
    f2_sqr(&I, &H)
    f2_small(&E, &I, 4)
    f2_mul(&J, &H, &E)
    f2_sub(&L1, &D, &T.y)
    f2_sub(&L1, &L1, &T.y)
    f2_mul(&V, &T.x, &E)
    f2_sqr(&nx, &L1)
    f2_sub(&nx, &nx, &J)
    f2_dbl(&t, &V)
    f2_sub(&nx, &nx, &t)
    f2_add(&nz, &T.z, &H)
    f2_sqr(&nz, &nz)
    f2_sub(&nz, &nz, &r_t)
    f2_sub(&nz, &nz, &I)
    f2_sub(&t, &V, &nx)
    f2_mul(&t, &t, &L1)
    f2_mul(&t2, &T.y, &J)
    f2_dbl(&t2, &t2)
    f2_sub(&ny, &t, &t2)
    # t = (py + nz)^2 - py2 - nz^2
    f2_add(&t, py, &nz)
    f2_sqr(&t, &t)
    f2_sub(&t, &t, py2)
    f2_sqr(&t2, &nz)
    f2_sub(&t, &t, &t2)
    # a = 2*L1*px - t
    f2_mul(&t2, &L1, px)
    f2_dbl(&t2, &t2)
    f2_sub(la, &t2, &t)
    # c = 2*nz*qy
    f2_dbl(&t, &nz)
    f2_scale_fp(lc, &t, qy)
    # b = -2*L1*qx
    f2_neg(&t, &L1)
    f2_dbl(&t, &t)
    f2_scale_fp(lb, &t, qx)
    f2_copy(&T.x, &nx); f2_copy(&T.y, &ny); f2_copy(&T.z, &nz)

cdef void _miller(fp12 *f, const g2pt *q, const g1pt *p) nogil:
    cdef fp2 qx, qy, mqy, qy2, mqy2, la, lb, lc
    cdef fp px, py
    cdef g2pt T
    cdef int i, d
    if not g2_affine(&qx, &qy, q) or not g1_affine(&px, &py, p):
        f12_copy(f, &F12_ONE)
        return
    f2_neg(&mqy, &qy)
    f2_sqr(&qy2, &qy)
    f2_sqr(&mqy2, &mqy)
    f12_copy(f, &F12_ONE)
    f2_copy(&T.x, &qx); f2_copy(&T.y, &qy); f2_copy(&T.z, &F2_ONE)
    for i in range(LOOP_NAF_LEN):
        d = LOOP_NAF[i]
        f12_sqr(f, f)
        _line_double(&la, &lb, &lc, &T, &px, &py)
        _mul_line(f, &la, &lb, &lc)
        if d == 1:
            _line_add(&la, &lb, &lc, &T, &qx, &qy, &qy2, &px, &py)
            _mul_line(f, &la, &lb, &lc)
        elif d == -1:
            _line_add(&la, &lb, &lc, &T, &qx, &mqy, &mqy2, &px, &py)
            _mul_line(f, &la, &lb, &lc)
    # q1 = (conj(qx)*XI1[1], conj(qy)*XI1[2]); q2 = (qx*XI2[1].c0, qy)
    cdef fp2 q1x, q1y, q2x, q1y2, qy2b
    f2_conj(&q1x, &qx)
    f2_mul(&q1x, &q1x, &XI1[1])
    f2_conj(&q1y, &qy)
    f2_mul(&q1y, &q1y, &XI1[2])
    f2_sqr(&q1y2, &q1y)
    _line_add(&la, &lb, &lc, &T, &q1x, &q1y, &q1y2, &px, &py)
    _mul_line(f, &la, &lb, &lc)
    f2_scale_fp(&q2x, &qx, &XI2[1].c0)
    f2_sqr(&qy2b, &qy)
    _line_add(&la, &lb, &lc, &T, &q2x, &qy, &qy2b, &px, &py)
    _mul_line(f, &la, &lb, &lc)

cdef void _final_exp(fp12 *r, const fp12 *f) nogil:
    cdef fp12 t1, inv, t2, fp1, fp2_, fp3, fu1, fu2, fu3
    cdef fp12 y0, y1, y2, y3, y4, y5, y6, t0, tb
    f12_conj(&t1, f)
    f12_inv(&inv, f)
    f12_mul(&t1, &t1, &inv)
    f12_frobenius_p2(&t2, &t1)
    f12_mul(&t1, &t1, &t2)

    f12_frobenius(&fp1, &t1)
    f12_frobenius_p2(&fp2_, &t1)
    f12_frobenius(&fp3, &fp2_)

    f12_pow_u64(&fu1, &t1, <u64>U_PARAM_C)
    f12_pow_u64(&fu2, &fu1, <u64>U_PARAM_C)
    f12_pow_u64(&fu3, &fu2, <u64>U_PARAM_C)

    f12_frobenius(&y3, &fu1)
    f12_conj(&y3, &y3)
    cdef fp12 fu2p, fu3p
    f12_frobenius(&fu2p, &fu2)
    f12_frobenius(&fu3p, &fu3)
    f12_frobenius_p2(&y2, &fu2)

    f12_mul(&y0, &fp1, &fp2_)
    f12_mul(&y0, &y0, &fp3)
    f12_conj(&y1, &t1)
    f12_conj(&y5, &fu2)
    f12_mul(&y4, &fu1, &fu2p)
    f12_conj(&y4, &y4)
    f12_mul(&y6, &fu3, &fu3p)
    f12_conj(&y6, &y6)

    f12_sqr(&t0, &y6)
    f12_mul(&t0, &t0, &y4)
    f12_mul(&t0, &t0, &y5)
    f12_mul(&tb, &y3, &y5)
    f12_mul(&tb, &tb, &t0)
    f12_mul(&t0, &t0, &y2)
    f12_sqr(&tb, &tb)
    f12_mul(&tb, &tb, &t0)
    f12_sqr(&tb, &tb)
    f12_mul(&t0, &tb, &y1)
    f12_mul(&tb, &tb, &y0)
    f12_sqr(&t0, &t0)
    f12_mul(r, &t0, &tb)

# ---------------------------------------------------------------------------
# Python-facing classes
# ---------------------------------------------------------------------------

cdef void _scalar_to_limbs(object k, u64 *out):
    cdef int i
    k = k % ORDER
    for i in range(4):
        out[i] = <u64>(k & 0xFFFFFFFFFFFFFFFF)
        k >>= 64

cdef class G1:
    cdef g1pt pt

    @staticmethod
    cdef G1 _wrap(g1pt p):
        cdef G1 obj = G1.__new__(G1)
        obj.pt = p
        return obj

    @classmethod
    def generator(cls):
        return G1._wrap(G1_GEN)

    @classmethod
    def identity(cls):
        cdef g1pt p
        fp_copy(&p.x, &FP_ONE); fp_copy(&p.y, &FP_ONE); fp_copy(&p.z, &FP_ZERO)
        return G1._wrap(p)

    def is_identity(self):
        return g1_is_inf(&self.pt)

    def add(self, G1 other):
        cdef g1pt out
        g1_add(&out, &self.pt, &other.pt)
        return G1._wrap(out)

    def double(self):
        cdef g1pt out
        g1_double(&out, &self.pt)
        return G1._wrap(out)

    def neg(self):
        cdef g1pt out = self.pt
        fp_neg(&out.y, &out.y)
        return G1._wrap(out)

    def mul(self, k):
        cdef u64 limbs[4]
        cdef g1pt out
        _scalar_to_limbs(k, limbs)
        g1_mul_limbs(&out, &self.pt, limbs)
        return G1._wrap(out)

    def affine(self):
        cdef fp ax, ay
        if not g1_affine(&ax, &ay, &self.pt):
            return None
        return (fp_to_object(&ax), fp_to_object(&ay))

    def eq(self, G1 other):
        return self.to_bytes() == other.to_bytes()

    def is_on_curve(self):
        cdef fp ax, ay, lhs, rhs
        if g1_is_inf(&self.pt):
            return True
        g1_affine(&ax, &ay, &self.pt)
        fp_sqr(&lhs, &ay)
        fp_sqr(&rhs, &ax)
        fp_mul(&rhs, &rhs, &ax)
        fp_add(&rhs, &rhs, &FP_B3)
        return bool(fp_eq(&lhs, &rhs))

    def to_bytes(self):
        cdef fp ax, ay
        if not g1_affine(&ax, &ay, &self.pt):
            return b"\x00" + b"\x00" * 32
        flag = 2 | (1 if fp_is_odd(&ay) else 0)
        return bytes([flag]) + int(fp_to_object(&ax)).to_bytes(32, "big")

    @classmethod
    def from_bytes(cls, data):
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
        cdef fp fx, rhs, fy
        fp_from_object(&fx, x)
        fp_sqr(&rhs, &fx)
        fp_mul(&rhs, &rhs, &fx)
        fp_add(&rhs, &rhs, &FP_B3)
        if not fp_sqrt(&fy, &rhs):
            raise ValueError("G1 x not on curve")
        if (1 if fp_is_odd(&fy) else 0) != (flag & 1):
            fp_neg(&fy, &fy)
        cdef g1pt p
        fp_copy(&p.x, &fx); fp_copy(&p.y, &fy); fp_copy(&p.z, &FP_ONE)
        return G1._wrap(p)

    @classmethod
    def hash_to_point(cls, data):
        cdef fp fx, rhs, fy
        cdef g1pt p
        for ctr in range(256):
            h = hashlib.sha256(HASH_DOMAIN + data + bytes([ctr])).digest()
            x = int.from_bytes(h, "big") % P
            fp_from_object(&fx, x)
            fp_sqr(&rhs, &fx)
            fp_mul(&rhs, &rhs, &fx)
            fp_add(&rhs, &rhs, &FP_B3)
            if fp_sqrt(&fy, &rhs):
                if fp_is_odd(&fy):
                    fp_neg(&fy, &fy)
                fp_copy(&p.x, &fx); fp_copy(&p.y, &fy); fp_copy(&p.z, &FP_ONE)
                return G1._wrap(p)
        raise ValueError("hash_to_point failed")

cdef class G2:
    cdef g2pt pt

    @staticmethod
    cdef G2 _wrap(g2pt p):
        cdef G2 obj = G2.__new__(G2)
        obj.pt = p
        return obj

    @classmethod
    def generator(cls):
        return G2._wrap(G2_GEN)

    @classmethod
    def identity(cls):
        cdef g2pt p
        f2_copy(&p.x, &F2_ONE); f2_copy(&p.y, &F2_ONE); f2_copy(&p.z, &F2_ZERO)
        return G2._wrap(p)

    def is_identity(self):
        return g2_is_inf(&self.pt)

    def add(self, G2 other):
        cdef g2pt out
        g2_add(&out, &self.pt, &other.pt)
        return G2._wrap(out)

    def double(self):
        cdef g2pt out
        g2_double(&out, &self.pt)
        return G2._wrap(out)

    def neg(self):
        cdef g2pt out = self.pt
        f2_neg(&out.y, &out.y)
        return G2._wrap(out)

    def mul(self, k):
        cdef u64 limbs[4]
        cdef g2pt out
        _scalar_to_limbs(k, limbs)
        g2_mul_limbs(&out, &self.pt, limbs)
        return G2._wrap(out)

    def affine(self):
        cdef fp2 ax, ay
        if not g2_affine(&ax, &ay, &self.pt):
            return None
        return ((fp_to_object(&ax.c0), fp_to_object(&ax.c1)),
                (fp_to_object(&ay.c0), fp_to_object(&ay.c1)))

    def eq(self, G2 other):
        return self.to_bytes() == other.to_bytes()

    def is_on_curve(self):
        cdef fp2 ax, ay, lhs, rhs
        if g2_is_inf(&self.pt):
            return True
        g2_affine(&ax, &ay, &self.pt)
        f2_sqr(&lhs, &ay)
        f2_sqr(&rhs, &ax)
        f2_mul(&rhs, &rhs, &ax)
        f2_add(&rhs, &rhs, &F2_TWIST_B)
        return bool(f2_eq(&lhs, &rhs))

    def to_bytes(self):
        cdef fp2 ax, ay
        if not g2_affine(&ax, &ay, &self.pt):
            return b"\x00" + b"\x00" * 64
        if not fp_is_zero(&ay.c0):
            high = 1 if fp_is_odd(&ay.c0) else 0
        else:
            high = 1 if fp_is_odd(&ay.c1) else 0
        flag = 2 | high
        return (bytes([flag])
                + int(fp_to_object(&ax.c0)).to_bytes(32, "big")
                + int(fp_to_object(&ax.c1)).to_bytes(32, "big"))

    @classmethod
    def from_bytes(cls, data):
        if len(data) != 65:
            raise ValueError("G2 encoding must be 65 bytes")
        flag = data[0]
        if flag == 0:
            return cls.identity()
        if flag not in (2, 3):
            raise ValueError("bad G2 flag byte")
        x0 = int.from_bytes(data[1:33], "big")
        x1 = int.from_bytes(data[33:], "big")
        if x0 >= P or x1 >= P:
            raise ValueError("G2 x out of range")
        cdef fp2 fx, rhs, fy
        fp_from_object(&fx.c0, x0)
        fp_from_object(&fx.c1, x1)
        f2_sqr(&rhs, &fx)
        f2_mul(&rhs, &rhs, &fx)
        f2_add(&rhs, &rhs, &F2_TWIST_B)
        if not f2_sqrt(&fy, &rhs):
            raise ValueError("G2 x not on twist")
        if not fp_is_zero(&fy.c0):
            bit = 1 if fp_is_odd(&fy.c0) else 0
        else:
            bit = 1 if fp_is_odd(&fy.c1) else 0
        if bit != (flag & 1):
            f2_neg(&fy, &fy)
        cdef g2pt p
        f2_copy(&p.x, &fx); f2_copy(&p.y, &fy); f2_copy(&p.z, &F2_ONE)
        return G2._wrap(p)

cdef class GT:
    cdef fp12 val

    @staticmethod
    cdef GT _wrap(fp12 v):
        cdef GT obj = GT.__new__(GT)
        obj.val = v
        return obj

    @classmethod
    def one(cls):
        return GT._wrap(F12_ONE)

    def is_one(self):
        return f12_eq(&self.val, &F12_ONE)

    def mul(self, GT other):
        cdef fp12 out
        f12_mul(&out, &self.val, &other.val)
        return GT._wrap(out)

    def inv(self):
        cdef fp12 out
        f12_inv(&out, &self.val)
        return GT._wrap(out)

    def pow(self, e):
        cdef fp12 out
        f12_pow_object(&out, &self.val, e % ORDER)
        return GT._wrap(out)

    def eq(self, GT other):
        return bool(f12_eq(&self.val, &other.val))

    def to_bytes(self):
        parts = []
        cdef fp2 *coeffs[6]
        coeffs[0] = &self.val.c0.c0
        coeffs[1] = &self.val.c0.c1
        coeffs[2] = &self.val.c0.c2
        coeffs[3] = &self.val.c1.c0
        coeffs[4] = &self.val.c1.c1
        coeffs[5] = &self.val.c1.c2
        cdef int i
        for i in range(6):
            parts.append(int(fp_to_object(&coeffs[i].c0)).to_bytes(32, "big"))
            parts.append(int(fp_to_object(&coeffs[i].c1)).to_bytes(32, "big"))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data):
        if len(data) != 384:
            raise ValueError("GT encoding must be 384 bytes")
        vals = [int.from_bytes(data[i * 32:(i + 1) * 32], "big") for i in range(12)]
        if any(v >= P for v in vals):
            raise ValueError("GT coordinate out of range")
        cdef fp12 out
        cdef fp2 *coeffs[6]
        coeffs[0] = &out.c0.c0
        coeffs[1] = &out.c0.c1
        coeffs[2] = &out.c0.c2
        coeffs[3] = &out.c1.c0
        coeffs[4] = &out.c1.c1
        coeffs[5] = &out.c1.c2
        cdef int i
        for i in range(6):
            fp_from_object(&coeffs[i].c0, vals[2 * i])
            fp_from_object(&coeffs[i].c1, vals[2 * i + 1])
        return GT._wrap(out)


def pair(G1 p, G2 q):
    cdef fp12 f, out
    if g1_is_inf(&p.pt) or g2_is_inf(&q.pt):
        return GT.one()
    _miller(&f, &q.pt, &p.pt)
    _final_exp(&out, &f)
    return GT._wrap(out)

# ---------------------------------------------------------------------------
# Module initialisation
# ---------------------------------------------------------------------------

cdef void _init_constants():
    global LOOP_NAF_LEN
    cdef int i
    for i in range(4):
        FP_ZERO.l[i] = 0
        FP_ONE.l[i] = R1_LIMBS[i]
        FP_R2.l[i] = R2_LIMBS[i]
    fp_from_object(&FP_B3, 3)
    # Fp2 constants
    fp_copy(&F2_ZERO.c0, &FP_ZERO); fp_copy(&F2_ZERO.c1, &FP_ZERO)
    fp_copy(&F2_ONE.c0, &FP_ONE); fp_copy(&F2_ONE.c1, &FP_ZERO)
    fp_from_object(&F2_XI.c0, 9)
    fp_from_object(&F2_XI.c1, 1)
    # Fp6 / Fp12 identities
    f2_copy(&F6_ZERO.c0, &F2_ZERO); f2_copy(&F6_ZERO.c1, &F2_ZERO)
    f2_copy(&F6_ZERO.c2, &F2_ZERO)
    f2_copy(&F6_ONE.c0, &F2_ONE); f2_copy(&F6_ONE.c1, &F2_ZERO)
    f2_copy(&F6_ONE.c2, &F2_ZERO)
    f6_copy(&F12_ONE.c0, &F6_ONE)
    f6_copy(&F12_ONE.c1, &F6_ZERO)
    # twist coefficient b/xi
    cdef fp2 xi_inv
    f2_inv(&xi_inv, &F2_XI)
    cdef fp2 b_f2
    fp_copy(&b_f2.c0, &FP_B3); fp_copy(&b_f2.c1, &FP_ZERO)
    f2_mul(&F2_TWIST_B, &xi_inv, &b_f2)
    # Frobenius coefficients xi^(k*(p-1)/6)
    for i in range(5):
        f2_pow_object(&XI1[i], &F2_XI, (i + 1) * (P - 1) // 6)
        f2_conj(&XI2[i], &XI1[i])
        f2_mul(&XI2[i], &XI2[i], &XI1[i])
    # generators
    fp_from_object(&G1_GEN.x, 1)
    fp_from_object(&G1_GEN.y, 2)
    fp_copy(&G1_GEN.z, &FP_ONE)
    fp_from_object(&G2_GEN.x.c0, 10857046999023057135944570762232829481370756359578518086990519993285655852781)
    fp_from_object(&G2_GEN.x.c1, 11559732032986387107991004021392285783925812861821192530917403151452391805634)
    fp_from_object(&G2_GEN.y.c0, 8495653923123431417604973247489272438418190587263600148770280649306958101930)
    fp_from_object(&G2_GEN.y.c1, 4082367875863433681332203403145435568316851327593401208105741076214120093531)
    f2_copy(&G2_GEN.z, &F2_ONE)
    # Miller loop NAF digits of 6u+2, MSB first, top digit dropped
    naf = []
    x = 6 * U_PARAM + 2
    while x > 0:
        if x & 1:
            d = 2 - (x & 3)
            x -= d
        else:
            d = 0
        naf.append(d)
        x >>= 1
    naf = list(reversed(naf))[1:]
    LOOP_NAF_LEN = len(naf)
    for i in range(LOOP_NAF_LEN):
        LOOP_NAF[i] = naf[i]

_init_constants()
