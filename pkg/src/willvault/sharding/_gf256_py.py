"""Pure-Python GF(2^8) kernels.

Same contract as the compiled module.  Scaling a whole byte row by a field
constant is done with ``bytes.translate`` over a per-scalar lookup table and
XOR via big-int arithmetic, which keeps the fallback usable on large files.
"""

from __future__ import annotations

_GF_EXP = [0] * 510
_GF_LOG = [0] * 256

# generator 3 = x+1 (2 is not primitive modulo x^8+x^4+x^3+x+1)
_x = 1
for _i in range(255):
    _GF_EXP[_i] = _x
    _GF_LOG[_x] = _i
    _x ^= _x << 1
    if _x & 0x100:
        _x ^= 0x11B
for _i in range(255, 510):
    _GF_EXP[_i] = _GF_EXP[_i - 255]


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _GF_EXP[_GF_LOG[a] + _GF_LOG[b]]


def gf_pow(a: int, e: int) -> int:
    acc = 1
    for _ in range(e):
        acc = gf_mul(acc, a)
    return acc


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("no inverse of 0 in GF(256)")
    return _GF_EXP[255 - _GF_LOG[a]]


_SCALE_TABLES: dict[int, bytes] = {}


def _scale_table(scalar: int) -> bytes:
    table = _SCALE_TABLES.get(scalar)
    if table is None:
        table = bytes(gf_mul(b, scalar) for b in range(256))
        _SCALE_TABLES[scalar] = table
    return table


def _xor_bytes(a: bytes, b: bytes) -> bytes:
    n = len(a)
    return (int.from_bytes(a, "little") ^ int.from_bytes(b, "little")).to_bytes(n, "little")


def split_shares(data: bytes, coeffs: list[bytes], xs: list[int]) -> list[bytes]:
    n = len(data)
    results = []
    for x in xs:
        acc = data
        xp = 1
        for row in coeffs:
            if len(row) != n:
                raise ValueError("coefficient row length mismatch")
            xp = gf_mul(xp, x)
            if xp == 0:
                continue
            scaled = row if xp == 1 else row.translate(_scale_table(xp))
            acc = _xor_bytes(acc, scaled)
        results.append(bytes(acc))
    return results


def combine_shares(payloads: list[bytes], lambdas: list[int]) -> bytes:
    if not payloads:
        raise ValueError("no payloads")
    n = len(payloads[0])
    acc = bytes(n)
    for payload, lam in zip(payloads, lambdas):
        if len(payload) != n:
            raise ValueError("payload length mismatch")
        if lam == 0:
            continue
        scaled = payload if lam == 1 else payload.translate(_scale_table(lam))
        acc = _xor_bytes(acc, scaled)
    return bytes(acc)
