"""Length-prefixed binary container shared by every serialized artifact.

Layout: 8-byte magic, u16 version, length-prefixed curve id, then tagged
sections, each ``u8 tag | u32 length | payload``.  Sections keep their
write order, so serialization is deterministic.
"""

from __future__ import annotations

import struct

VERSION = 1


class ContainerError(ValueError):
    pass


def pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack(">H", len(raw)) + raw


def unpack_str(data: bytes, off: int) -> tuple[str, int]:
    if off + 2 > len(data):
        raise ContainerError("truncated string field")
    (n,) = struct.unpack_from(">H", data, off)
    off += 2
    return data[off:off + n].decode("utf-8"), off + n


def pack_bytes(b: bytes) -> bytes:
    return struct.pack(">I", len(b)) + b


def unpack_bytes(data: bytes, off: int) -> tuple[bytes, int]:
    (n,) = struct.unpack_from(">I", data, off)
    off += 4
    return data[off:off + n], off + n


def write_container(magic: bytes, curve: str,
                    sections: list[tuple[int, bytes]]) -> bytes:
    if len(magic) != 8:
        raise ContainerError("magic must be 8 bytes")
    out = bytearray()
    out += magic
    out += struct.pack(">H", VERSION)
    out += pack_str(curve)
    for tag, payload in sections:
        out += struct.pack(">BI", tag, len(payload))
        out += payload
    return bytes(out)


def read_container(data: bytes, magic: bytes) -> tuple[str, dict[int, bytes]]:
    if len(data) < 10 or data[:8] != magic:
        raise ContainerError(f"bad magic (expected {magic!r})")
    (version,) = struct.unpack_from(">H", data, 8)
    if version != VERSION:
        raise ContainerError(f"unsupported container version {version}")
    curve, off = unpack_str(data, 10)
    sections: dict[int, bytes] = {}
    while off < len(data):
        if off + 5 > len(data):
            raise ContainerError("truncated section header")
        tag, n = struct.unpack_from(">BI", data, off)
        off += 5
        if off + n > len(data):
            raise ContainerError("truncated section")
        sections[tag] = data[off:off + n]
        off += n
    return curve, sections
