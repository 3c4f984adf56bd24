"""Hostile-input fuzzing: malformed blobs must fail with typed errors,
never with raw struct/index crashes."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from willvault import pdcpabe, sharding
from willvault.keyvault import Envelope
from willvault.pairing.mock import MockGroup
from willvault.policy import EmptyPolicyError, PolicySyntaxError, parse_policy

OK_ERRORS = (ValueError,)  # includes MalformedCiphertext, ContainerError


@settings(max_examples=150, deadline=None)
@given(st.text(max_size=40))
def test_parse_policy_never_crashes(text):
    try:
        parse_policy(text)
    except (PolicySyntaxError, EmptyPolicyError):
        pass


def _valid_ciphertext_blob():
    g = MockGroup()
    pp, mk = pdcpabe.setup(128, rng=random.Random(1), group=g)
    ct = pdcpabe.encrypt(pp, [("m0", b"data", "(A and B)"), ("m1", b"d2", "C")],
                         rng=random.Random(2))
    return ct.to_bytes(g), g


def test_truncated_ciphertext_rejected_typed():
    blob, g = _valid_ciphertext_blob()
    for cut in [0, 5, 9, 15, len(blob) // 2, len(blob) - 3]:
        with pytest.raises(OK_ERRORS):
            pdcpabe.Ciphertext.from_bytes(blob[:cut], g)


def test_bitflipped_ciphertext_rejected_or_parses():
    blob, g = _valid_ciphertext_blob()
    rng = random.Random(3)
    for _ in range(40):
        pos = rng.randrange(len(blob))
        mutated = bytearray(blob)
        mutated[pos] ^= 1 << rng.randrange(8)
        try:
            pdcpabe.Ciphertext.from_bytes(bytes(mutated), g)
        except OK_ERRORS:
            pass  # typed rejection is fine; silent parse is fine too
        # anything else (struct.error, KeyError, IndexError) fails the test


def test_truncated_share_rejected_typed():
    share = sharding.split(b"data", 3, 2, rng=random.Random(1),
                           file_id="f")[0]
    blob = share.to_bytes()
    for cut in [8, 12, 20, len(blob) - 1]:
        with pytest.raises(ValueError):
            sharding.Share.from_bytes(blob[:cut])


def test_truncated_envelope_rejected_typed():
    from willvault.keyvault import KdfConfig, derive_keypair, envelope_encrypt
    pair = derive_keypair("pw", b"0123456789abcdef", config=KdfConfig(n=2 ** 4))
    blob = envelope_encrypt(pair.pk, b"blob").to_bytes()
    for cut in [8, 10, 30, len(blob) - 1]:
        with pytest.raises(ValueError):
            Envelope.from_bytes(blob[:cut])


def test_userkey_params_garbage_rejected():
    g = MockGroup()
    for cls, magic in [(pdcpabe.UserKey, b"PDCPKEY1"),
                       (pdcpabe.PublicParams, b"PDCPPAR1")]:
        with pytest.raises(ValueError):
            if cls is pdcpabe.PublicParams:
                cls.from_bytes(magic + b"\x00" * 30, g)
            else:
                cls.from_bytes(magic + b"\x00" * 30, g)
