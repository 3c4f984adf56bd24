"""Heir key derivation and envelope encryption of scheme user keys.

An heir's keypair is derived deterministically from their password and a
per-deployment salt (memory-hard KDF), so a lost private key is recoverable
from the password alone.  User keys travel to heirs wrapped in an ephemeral
ECDH envelope with an authenticated symmetric layer.
"""

from __future__ import annotations

import hashlib
import json
import secrets
from dataclasses import dataclass
from pathlib import Path

from willvault import symmetric
from willvault.pairing import backend

ENVELOPE_MAGIC = b"DWENV001"
MIN_SALT_BYTES = 16


class WeakInput(ValueError):
    """Password empty or salt too short."""


class AuthFailure(ValueError):
    """Envelope failed authentication (wrong key or tampering)."""


@dataclass(frozen=True)
class KdfConfig:
    """Scrypt parameters committed per deployment."""

    n: int = 2 ** 14
    r: int = 8
    p: int = 1
    salt: bytes = b""

    def to_json(self) -> str:
        return json.dumps({"kdf": "scrypt", "n": self.n, "r": self.r,
                           "p": self.p, "salt": self.salt.hex()},
                          sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "KdfConfig":
        raw = json.loads(text)
        if raw.get("kdf") != "scrypt":
            raise ValueError(f"unsupported kdf {raw.get('kdf')!r}")
        return cls(n=raw["n"], r=raw["r"], p=raw["p"],
                   salt=bytes.fromhex(raw["salt"]))

    def save(self, path: Path | str) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path: Path | str) -> "KdfConfig":
        return cls.from_json(Path(path).read_text())

    @classmethod
    def generate(cls) -> "KdfConfig":
        return cls(salt=secrets.token_bytes(MIN_SALT_BYTES))


@dataclass(frozen=True)
class HeirKeypair:
    sk: int
    pk: object  # curve point

    @property
    def pk_bytes(self) -> bytes:
        return self.pk.to_bytes()

    @property
    def pk_hex(self) -> str:
        return self.pk_bytes.hex()


@dataclass(frozen=True)
class Envelope:
    ephemeral_pk: bytes
    nonce: bytes
    sealed: bytes

    def to_bytes(self) -> bytes:
        return (ENVELOPE_MAGIC
                + len(self.ephemeral_pk).to_bytes(2, "big") + self.ephemeral_pk
                + len(self.nonce).to_bytes(2, "big") + self.nonce
                + len(self.sealed).to_bytes(4, "big") + self.sealed)

    @classmethod
    def from_bytes(cls, data: bytes) -> "Envelope":
        if data[:8] != ENVELOPE_MAGIC:
            raise ValueError("not an envelope (bad magic)")
        off = 8
        n = int.from_bytes(data[off:off + 2], "big")
        off += 2
        eph = data[off:off + n]
        off += n
        n = int.from_bytes(data[off:off + 2], "big")
        off += 2
        nonce = data[off:off + n]
        off += n
        if len(data) < off + 4:
            raise ValueError("truncated envelope")
        n = int.from_bytes(data[off:off + 4], "big")
        off += 4
        sealed = data[off:off + n]
        if len(eph) == 0 or len(sealed) != n:
            raise ValueError("truncated envelope")
        return cls(eph, nonce, sealed)


def derive_keypair(password: str, salt: bytes,
                   config: KdfConfig | None = None) -> HeirKeypair:
    """Deterministic keypair from (password, salt); same inputs, same keys."""
    if not password:
        raise WeakInput("password must not be empty")
    if len(salt) < MIN_SALT_BYTES:
        raise WeakInput(f"salt must be at least {MIN_SALT_BYTES} bytes")
    cfg = config or KdfConfig()
    counter = 0
    while True:
        material = hashlib.scrypt(
            password.encode("utf-8"),
            salt=salt + (counter.to_bytes(1, "big") if counter else b""),
            n=cfg.n, r=cfg.r, p=cfg.p, dklen=64)
        sk = int.from_bytes(material, "big") % backend.ORDER
        if sk != 0:
            break
        counter += 1  # pragma: no cover - probability ~2^-254
    pk = backend.G1.generator().mul(sk)
    return HeirKeypair(sk=sk, pk=pk)


def _session_key(shared, ephemeral_pk: bytes, recipient_pk: bytes) -> bytes:
    return hashlib.sha256(
        b"willvault/env/v1:" + shared.to_bytes() + ephemeral_pk + recipient_pk
    ).digest()


def envelope_encrypt(pk, blob: bytes) -> Envelope:
    """Ephemeral ECDH to the recipient point, then AEAD over the blob."""
    if not blob:
        raise ValueError("refusing to wrap an empty blob")
    if isinstance(pk, (bytes, bytearray)):
        pk = backend.G1.from_bytes(bytes(pk))
    eph_sk = secrets.randbelow(backend.ORDER - 1) + 1
    eph_pk = backend.G1.generator().mul(eph_sk)
    shared = pk.mul(eph_sk)
    key = _session_key(shared, eph_pk.to_bytes(), pk.to_bytes())
    nonce, sealed = symmetric.seal(key, blob, aad=ENVELOPE_MAGIC)
    return Envelope(eph_pk.to_bytes(), nonce, sealed)


def envelope_decrypt(sk: int, env: Envelope) -> bytes:
    eph = backend.G1.from_bytes(env.ephemeral_pk)
    my_pk = backend.G1.generator().mul(sk)
    shared = eph.mul(sk)
    key = _session_key(shared, env.ephemeral_pk, my_pk.to_bytes())
    try:
        return symmetric.unseal(key, env.nonce, env.sealed, aad=ENVELOPE_MAGIC)
    except symmetric.SymmetricAuthFailure as exc:
        raise AuthFailure("envelope failed authentication") from exc
