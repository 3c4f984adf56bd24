"""Shamir secret sharing of encrypted files across storage locations.

Each byte of the input is the constant term of an independent random
polynomial of degree t-1 over GF(2^8); share i holds the evaluations at
x = i.  Any t shares reconstruct the file exactly; fewer reveal nothing.

The per-byte loops run in the compiled kernel when available; set
``WILLVAULT_PURE_PYTHON=1`` to force the pure fallback.
"""

from __future__ import annotations

import math
import os
import random
import secrets
import struct
from dataclasses import dataclass

from willvault.sharding import _gf256_py

if os.environ.get("WILLVAULT_PURE_PYTHON"):
    _kernel = _gf256_py
    KERNEL_NAME = "python"
else:
    try:
        from willvault.sharding import _gf256_cy as _kernel  # type: ignore[no-redef]
        KERNEL_NAME = "compiled"
    except ImportError:  # pragma: no cover - build-environment dependent
        _kernel = _gf256_py
        KERNEL_NAME = "python"

__all__ = [
    "Share",
    "ShareManifest",
    "TooFewLocations",
    "InvalidThreshold",
    "ThresholdNotMet",
    "InconsistentShares",
    "default_threshold",
    "split",
    "combine",
    "KERNEL_NAME",
]

SHARE_MAGIC = b"DWSHARE1"
MAX_SHARES = 255


class TooFewLocations(ValueError):
    """Splitting needs at least two storage locations."""


class InvalidThreshold(ValueError):
    """Threshold outside 2..share-count (or too many shares)."""


class ThresholdNotMet(ValueError):
    """Insufficient shares to reconstruct the file."""


class InconsistentShares(ValueError):
    """Shares disagree on file id, counts, or payload length."""


@dataclass(frozen=True)
class Share:
    file_id: str
    share_id: int  # 1..total; doubles as the evaluation point
    total: int
    threshold: int
    payload: bytes

    @property
    def x_coordinate(self) -> int:
        return self.share_id

    def to_bytes(self) -> bytes:
        fid = self.file_id.encode("utf-8")
        header = SHARE_MAGIC + struct.pack(
            ">HBBBQ", len(fid), self.share_id, self.total, self.threshold,
            len(self.payload))
        return header + fid + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "Share":
        if data[:8] != SHARE_MAGIC:
            raise ValueError("not a share file (bad magic)")
        if len(data) < 21:
            raise ValueError("truncated share header")
        fid_len, share_id, total, threshold, payload_len = struct.unpack(
            ">HBBBQ", data[8:21])
        fid_end = 21 + fid_len
        file_id = data[21:fid_end].decode("utf-8")
        payload = data[fid_end:fid_end + payload_len]
        if len(data[21:fid_end]) != fid_len or len(payload) != payload_len:
            raise ValueError("truncated share file")
        return cls(file_id, share_id, total, threshold, payload)


class ShareManifest:
    """Append-only record of where each share was placed."""

    def __init__(self):
        self._entries: list[tuple[str, int, str]] = []
        self._seen: set[tuple[str, int]] = set()

    def record(self, file_id: str, share_id: int, location_id: str) -> None:
        key = (file_id, share_id)
        if key in self._seen:
            raise ValueError(f"share {key} already placed")
        self._seen.add(key)
        self._entries.append((file_id, share_id, location_id))

    @property
    def entries(self) -> list[tuple[str, int, str]]:
        return list(self._entries)

    def placements(self, file_id: str) -> list[tuple[int, str]]:
        return [(sid, loc) for fid, sid, loc in self._entries if fid == file_id]

    def to_json(self) -> list[dict]:
        return [
            {"file_id": fid, "share_id": sid, "location_id": loc}
            for fid, sid, loc in self._entries
        ]

    @classmethod
    def from_json(cls, rows: list[dict]) -> "ShareManifest":
        manifest = cls()
        for row in rows:
            manifest.record(row["file_id"], row["share_id"], row["location_id"])
        return manifest


def default_threshold(n: int) -> int:
    """Half the locations, rounded up, but never below two."""
    if n < 2:
        raise TooFewLocations(f"need at least 2 locations, got {n}")
    return max(2, math.ceil(n / 2))


def split(
    data: bytes,
    n: int,
    t: int,
    rng: random.Random | None = None,
    file_id: str = "",
) -> list[Share]:
    if not data:
        raise ValueError("cannot split empty data")
    if n < 2:
        raise TooFewLocations(f"need at least 2 locations, got {n}")
    if n > MAX_SHARES:
        raise InvalidThreshold(f"at most {MAX_SHARES} shares supported")
    if not 2 <= t <= n:
        raise InvalidThreshold(f"threshold {t} outside 2..{n}")
    randbytes = rng.randbytes if rng is not None else secrets.token_bytes
    coeffs = [randbytes(len(data)) for _ in range(t - 1)]
    xs = list(range(1, n + 1))
    payloads = _kernel.split_shares(data, coeffs, xs)
    return [
        Share(file_id=file_id, share_id=x, total=n, threshold=t, payload=pl)
        for x, pl in zip(xs, payloads)
    ]


def combine(shares: list[Share]) -> bytes:
    if not shares:
        raise ThresholdNotMet("no shares supplied")
    meta = {(s.file_id, s.total, s.threshold, len(s.payload)) for s in shares}
    if len(meta) != 1:
        raise InconsistentShares(f"shares disagree on metadata: {sorted(meta)}")
    threshold = shares[0].threshold
    distinct: dict[int, Share] = {}
    for s in shares:
        if not 1 <= s.share_id <= s.total:
            raise InconsistentShares(f"share id {s.share_id} out of range")
        distinct.setdefault(s.share_id, s)
    if len(distinct) < threshold:
        raise ThresholdNotMet(
            f"need {threshold} distinct shares, got {len(distinct)}")
    chosen = [distinct[x] for x in sorted(distinct)][:threshold]
    xs = [s.share_id for s in chosen]
    lambdas = []
    for xi in xs:
        num, den = 1, 1
        for xj in xs:
            if xj == xi:
                continue
            num = _kernel.gf_mul(num, xj)
            den = _kernel.gf_mul(den, xi ^ xj)
        lambdas.append(_kernel.gf_mul(num, _kernel.gf_inv(den)))
    return _kernel.combine_shares([s.payload for s in chosen], lambdas)
