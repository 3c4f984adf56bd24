"""Authenticated symmetric layer under the hybrid encryption.

A group-element session key is hashed down to a 256-bit AES-GCM key; every
payload gets a fresh 96-bit nonce.  Authentication failures surface as
:class:`SymmetricAuthFailure` so partial-decryption reports can name the
exact payload that was tampered with.
"""

from __future__ import annotations

import hashlib
import secrets

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

_KEY_DOMAIN = b"willvault/dem/v1:"
NONCE_BYTES = 12


class SymmetricAuthFailure(ValueError):
    """Ciphertext failed authentication (wrong key or tampering)."""


def key_from_element(element_bytes: bytes) -> bytes:
    """Derive the 256-bit payload key from a serialized group element."""
    return hashlib.sha256(_KEY_DOMAIN + element_bytes).digest()


def seal(key: bytes, plaintext: bytes, aad: bytes = b"",
         nonce: bytes | None = None) -> tuple[bytes, bytes]:
    nonce = nonce if nonce is not None else secrets.token_bytes(NONCE_BYTES)
    ct = AESGCM(key).encrypt(nonce, plaintext, aad)
    return nonce, ct


def unseal(key: bytes, nonce: bytes, ciphertext: bytes, aad: bytes = b"") -> bytes:
    try:
        return AESGCM(key).decrypt(nonce, ciphertext, aad)
    except InvalidTag as exc:
        raise SymmetricAuthFailure("payload failed authentication") from exc
