"""Group context facade over the selected pairing backend.

The context carries the generators, the scalar order, the attribute
hash-to-curve map, and an instrumentation counter for pairing evaluations.
Scheme code only talks to this facade, so the compiled and pure backends
(and the exponent-transparent mock used in tests) are interchangeable.
"""

from __future__ import annotations

import random
from typing import Protocol


class UnsupportedSecurityLevel(ValueError):
    """No supported curve exists at the requested security level."""


class GroupContext(Protocol):
    name: str
    order: int

    def g1(self): ...
    def g2(self): ...
    def gt_base(self): ...
    def hash_to_g1(self, attribute: str): ...
    def pair(self, a, b): ...
    def random_scalar(self, rng: random.Random | None = None) -> int: ...

    def g1_to_bytes(self, el) -> bytes: ...
    def g1_from_bytes(self, data: bytes): ...
    def g2_to_bytes(self, el) -> bytes: ...
    def g2_from_bytes(self, data: bytes): ...
    def gt_to_bytes(self, el) -> bytes: ...
    def gt_from_bytes(self, data: bytes): ...


class PairingGroup:
    """Bilinear group triple (G1, G2, GT) of prime order with map e."""

    def __init__(self, backend):
        self._m = backend
        self.name = getattr(backend, "CURVE_NAME", "bn254")
        self.order = backend.ORDER
        self._g1 = backend.G1.generator()
        self._g2 = backend.G2.generator()
        self._gt = backend.pair(self._g1, self._g2)
        self._h1_cache: dict[str, object] = {}
        self.pairing_count = 0

    def g1(self):
        return self._g1

    def g2(self):
        return self._g2

    def gt_base(self):
        return self._gt

    def hash_to_g1(self, attribute: str):
        cached = self._h1_cache.get(attribute)
        if cached is None:
            cached = self._m.G1.hash_to_point(attribute.encode("utf-8"))
            self._h1_cache[attribute] = cached
        return cached

    def pair(self, a, b):
        self.pairing_count += 1
        return self._m.pair(a, b)

    def random_scalar(self, rng: random.Random | None = None) -> int:
        rng = rng or random.SystemRandom()
        return rng.randrange(1, self.order)

    def g1_to_bytes(self, el) -> bytes:
        return el.to_bytes()

    def g1_from_bytes(self, data: bytes):
        el = self._m.G1.from_bytes(data)
        if not el.is_on_curve():
            raise ValueError("G1 point not on curve")
        return el

    def g2_to_bytes(self, el) -> bytes:
        return el.to_bytes()

    def g2_from_bytes(self, data: bytes):
        el = self._m.G2.from_bytes(data)
        if not el.is_on_curve():
            raise ValueError("G2 point not on twist")
        return el

    def gt_to_bytes(self, el) -> bytes:
        return el.to_bytes()

    def gt_from_bytes(self, data: bytes):
        return self._m.GT.from_bytes(data)

    @property
    def element_sizes(self) -> tuple[int, int, int]:
        return 33, 65, 384


_DEFAULT_GROUP: PairingGroup | None = None


def default_group() -> PairingGroup:
    """Shared 128-bit pairing group over the active backend."""
    global _DEFAULT_GROUP
    if _DEFAULT_GROUP is None:
        from willvault.pairing import backend
        _DEFAULT_GROUP = PairingGroup(backend)
    return _DEFAULT_GROUP


def group_for_security_level(bits: int) -> PairingGroup:
    if bits != 128:
        raise UnsupportedSecurityLevel(
            f"no supported curve at {bits} bits (only 128 is available)")
    return default_group()
