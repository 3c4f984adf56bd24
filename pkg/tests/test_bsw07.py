import random

import pytest

from willvault import bsw07, pdcpabe, policy
from willvault.pairing.mock import MockGroup
from willvault.policy import And, Attr, Or


@pytest.fixture(scope="module")
def real():
    return bsw07.bsw_setup(128)


@pytest.fixture()
def mock():
    return bsw07.bsw_setup(128, rng=random.Random(21), group=MockGroup())


def test_round_trip_single_attribute(real):
    pp, mk = real
    key = bsw07.bsw_keygen(mk, pp, {"A"})
    ct = bsw07.bsw_encrypt(pp, b"hello", "A")
    assert bsw07.bsw_decrypt(pp, key, ct) == b"hello"


def test_denial_is_none(real):
    pp, mk = real
    key = bsw07.bsw_keygen(mk, pp, {"B"})
    ct = bsw07.bsw_encrypt(pp, b"hello", "A")
    assert bsw07.bsw_decrypt(pp, key, ct) is None


def test_one_ciphertext_per_message(mock):
    pp, _ = mock
    cts = [bsw07.bsw_encrypt(pp, f"m{i}".encode(), "(A and B)") for i in range(5)]
    assert len(cts) == 5
    assert all(ct.leaf_pair_count() == 2 for ct in cts)


def test_repeated_encryptions_independent(real):
    pp, _ = real
    ct1 = bsw07.bsw_encrypt(pp, b"m", "(A and B)")
    ct2 = bsw07.bsw_encrypt(pp, b"m", "(A and B)")
    assert not ct1.c.eq(ct2.c)
    assert not ct1.c_tilde.eq(ct2.c_tilde)


def test_serialization_round_trip(real):
    pp, mk = real
    key = bsw07.bsw_keygen(mk, pp, {"A", "C"})
    ct = bsw07.bsw_encrypt(pp, b"secret", "((A and C) or B)")
    ct2 = bsw07.Bsw07Ciphertext.from_bytes(ct.to_bytes(pp.group), pp.group)
    assert bsw07.bsw_decrypt(pp, key, ct2) == b"secret"


def test_repeated_attribute_in_policy(mock):
    pp, mk = mock
    ct = bsw07.bsw_encrypt(pp, b"m", "((A and B) or (A and C))")
    assert ct.leaf_pair_count() == 4  # leaf slots, not distinct attributes
    key = bsw07.bsw_keygen(mk, pp, {"A", "C"})
    assert bsw07.bsw_decrypt(pp, key, ct) == b"m"


_NAMES = ["A", "B", "C", "D", "E"]


def _random_expr(rng, depth=0):
    if depth >= 3 or rng.random() < 0.35:
        return Attr(rng.choice(_NAMES))
    cls = And if rng.random() < 0.5 else Or
    return cls(_random_expr(rng, depth + 1), _random_expr(rng, depth + 1))


def test_random_oracle_mock_bulk(mock):
    pp, mk = mock
    for trial in range(1000):
        rng = random.Random(10_000 + trial)
        expr = _random_expr(rng)
        attrs = {n for n in _NAMES if rng.random() < 0.45} or {"Z"}
        key = bsw07.bsw_keygen(mk, pp, attrs, rng=rng)
        ct = bsw07.bsw_encrypt(pp, b"m", expr, rng=rng)
        assert (bsw07.bsw_decrypt(pp, key, ct) is not None) == \
            policy.evaluate(expr, attrs)


def test_agreement_with_multi_file_scheme(mock):
    """Both schemes grant access to exactly the same (policy, attrs) pairs."""
    g = MockGroup()
    rng = random.Random(77)
    bpp, bmk = bsw07.bsw_setup(group=g, rng=rng)
    ppp, pmk = pdcpabe.setup(group=g, rng=rng)
    for trial in range(100):
        trng = random.Random(20_000 + trial)
        expr = _random_expr(trng)
        attrs = {n for n in _NAMES if trng.random() < 0.45} or {"Z"}
        bkey = bsw07.bsw_keygen(bmk, bpp, attrs, rng=trng)
        bct = bsw07.bsw_encrypt(bpp, b"m", expr, rng=trng)
        pkey = pdcpabe.keygen(pmk, ppp, attrs, rng=trng)
        pct = pdcpabe.encrypt(ppp, [("m0", b"m", expr)], rng=trng)
        bsw_ok = bsw07.bsw_decrypt(bpp, bkey, bct) is not None
        pd_ok = "m0" in pdcpabe.decrypt(ppp, pkey, pct).recovered
        assert bsw_ok == pd_ok == policy.evaluate(expr, attrs)
