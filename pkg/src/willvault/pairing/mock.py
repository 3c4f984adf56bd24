"""Exponent-transparent stand-in group for tests.

Elements are their own discrete logs modulo a shared prime order, and the
"pairing" multiplies exponents.  Completely insecure, but every algebraic
identity of a real bilinear group holds, exponents are directly inspectable,
and operations cost nothing.  Used to assert exponent arithmetic (noise
cancellation, polynomial recombination) at toy parameters and to run bulk
randomized oracles quickly.
"""

from __future__ import annotations

import hashlib
import random

_MOCK_ORDER = 21888242871839275222246405745257275088548364400416034343698204186575808495617


class MockElem:
    """Group element represented by its exponent; tag prevents cross-group mixups."""

    __slots__ = ("exp", "tag")

    def __init__(self, exp: int, tag: str):
        self.exp = exp % _MOCK_ORDER
        self.tag = tag

    def add(self, other):
        assert self.tag == other.tag
        return MockElem(self.exp + other.exp, self.tag)

    def neg(self):
        return MockElem(-self.exp, self.tag)

    def mul(self, other):
        # matches the real API: scalar mul on points, group op on GT
        if self.tag == "gt":
            assert isinstance(other, MockElem) and other.tag == "gt"
            return MockElem(self.exp + other.exp, "gt")
        return MockElem(self.exp * (other % _MOCK_ORDER), self.tag)

    # GT-flavoured aliases (multiplicative notation)
    def pow(self, k: int):
        return MockElem(self.exp * (k % _MOCK_ORDER), self.tag)

    def inv(self):
        return MockElem(-self.exp, self.tag)

    def is_one(self):
        return self.exp == 0

    def is_identity(self):
        return self.exp == 0

    def eq(self, other):
        return self.tag == other.tag and self.exp == other.exp

    def to_bytes(self) -> bytes:
        return self.tag.encode("ascii")[:1] + self.exp.to_bytes(32, "big")


class MockGroup:
    """Drop-in GroupContext whose elements expose their exponents."""

    name = "mock-exponent"

    def __init__(self, order: int = _MOCK_ORDER):
        self.order = order
        self.pairing_count = 0

    def g1(self):
        return MockElem(1, "1")

    def g2(self):
        return MockElem(1, "2")

    def gt_base(self):
        return MockElem(1, "gt")

    def hash_to_g1(self, attribute: str):
        h = hashlib.sha256(b"mock-h1:" + attribute.encode("utf-8")).digest()
        return MockElem(int.from_bytes(h, "big") % self.order, "1")

    def pair(self, a, b):
        self.pairing_count += 1
        assert {a.tag, b.tag} == {"1", "2"}, "pairing needs one G1 and one G2 element"
        return MockElem(a.exp * b.exp, "gt")

    def random_scalar(self, rng: random.Random | None = None) -> int:
        rng = rng or random.SystemRandom()
        return rng.randrange(1, self.order)

    def g1_to_bytes(self, el) -> bytes:
        return el.to_bytes()

    def g1_from_bytes(self, data: bytes):
        return self._from_bytes(data, "1")

    def g2_to_bytes(self, el) -> bytes:
        return el.to_bytes()

    def g2_from_bytes(self, data: bytes):
        return self._from_bytes(data, "2")

    def gt_to_bytes(self, el) -> bytes:
        return el.to_bytes()

    def gt_from_bytes(self, data: bytes):
        return self._from_bytes(data, "g")

    def _from_bytes(self, data: bytes, tag_byte: str):
        if len(data) != 33 or data[:1].decode("ascii") != tag_byte:
            raise ValueError("bad mock element encoding")
        tag = {"1": "1", "2": "2", "g": "gt"}[tag_byte]
        return MockElem(int.from_bytes(data[1:], "big"), tag)

    @property
    def element_sizes(self) -> tuple[int, int, int]:
        return 33, 33, 33
