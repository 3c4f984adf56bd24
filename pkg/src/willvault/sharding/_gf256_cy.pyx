# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled GF(2^8) kernels for the secret-sharing hot loops.

Field: GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x + 1 (0x11b).
Shares are produced per byte: share_j = data XOR sum_k coeffs[k] * x_j^(k+1),
a single C pass per share; combination is an XOR accumulation of payloads
scaled by their Lagrange coefficients.
"""

from cpython.bytes cimport PyBytes_FromStringAndSize

ctypedef unsigned char u8

cdef u8 GF_EXP[510]
cdef u8 GF_LOG[256]

cdef void _init_tables():
    # generator 3 = x+1 (2 is not primitive modulo x^8+x^4+x^3+x+1)
    cdef int x = 1
    cdef int i
    for i in range(255):
        GF_EXP[i] = <u8>x
        GF_LOG[x] = <u8>i
        x ^= x << 1
        if x & 0x100:
            x ^= 0x11B
    for i in range(255, 510):
        GF_EXP[i] = GF_EXP[i - 255]
    GF_LOG[0] = 0

_init_tables()

cdef inline u8 _mul(u8 a, u8 b) nogil:
    if a == 0 or b == 0:
        return 0
    return GF_EXP[GF_LOG[a] + GF_LOG[b]]


def gf_mul(int a, int b):
    """Single multiplication, exposed for table cross-checks."""
    return _mul(<u8>a, <u8>b)


def gf_pow(int a, int e):
    cdef u8 acc = 1
    cdef int i
    for i in range(e):
        acc = _mul(acc, <u8>a)
    return acc


def gf_inv(int a):
    if a == 0:
        raise ZeroDivisionError("no inverse of 0 in GF(256)")
    return GF_EXP[255 - GF_LOG[<u8>a]]


def split_shares(const u8[::1] data, coeffs, xs):
    """Evaluate per-byte polynomials at every x in xs.

    ``coeffs`` is a list of byte strings (degree 1..t-1 coefficient rows,
    each as long as data); returns one payload per x.
    """
    cdef Py_ssize_t n = data.shape[0]
    cdef Py_ssize_t i, k
    cdef int nc = len(coeffs)
    cdef u8 x, xp
    cdef const u8[::1] row
    cdef u8[::1] out_view
    results = []
    for x_obj in xs:
        x = <u8>x_obj
        out = bytearray(n)
        out_view = out
        for i in range(n):
            out_view[i] = data[i]
        xp = 1
        for k in range(nc):
            xp = _mul(xp, x)
            row = coeffs[k]
            if row.shape[0] != n:
                raise ValueError("coefficient row length mismatch")
            with nogil:
                _xor_scaled(&out_view[0], &row[0], n, xp)
        results.append(bytes(out))
    return results


cdef void _xor_scaled(u8 *acc, const u8 *row, Py_ssize_t n, u8 scalar) nogil:
    cdef Py_ssize_t i
    cdef int log_s
    if scalar == 0:
        return
    if scalar == 1:
        for i in range(n):
            acc[i] ^= row[i]
        return
    log_s = GF_LOG[scalar]
    for i in range(n):
        if row[i] != 0:
            acc[i] ^= GF_EXP[log_s + GF_LOG[row[i]]]


def combine_shares(payloads, lambdas):
    """XOR-accumulate payloads scaled by their Lagrange coefficients at zero."""
    if not payloads:
        raise ValueError("no payloads")
    cdef Py_ssize_t n = len(payloads[0])
    cdef u8[::1] out_view
    cdef const u8[::1] row
    cdef u8 lam
    out = bytearray(n)
    out_view = out
    for payload, lam_obj in zip(payloads, lambdas):
        row = payload
        lam = <u8>lam_obj
        if row.shape[0] != n:
            raise ValueError("payload length mismatch")
        with nogil:
            _xor_scaled(&out_view[0], &row[0], n, lam)
    return bytes(out)
