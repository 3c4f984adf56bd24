import random

import pytest
from hypothesis import given, settings, strategies as st

from willvault import sharding
from willvault.sharding import (
    InconsistentShares,
    InvalidThreshold,
    Share,
    ShareManifest,
    ThresholdNotMet,
    TooFewLocations,
    _gf256_py,
    combine,
    default_threshold,
    split,
)

rng = random.Random(99)


# ---------------------------------------------------------------------------
# Thresholds
# ---------------------------------------------------------------------------

def test_default_threshold_half():
    assert default_threshold(4) == 2
    assert default_threshold(5) == 3
    assert default_threshold(10) == 5


def test_default_threshold_minimum_two():
    assert default_threshold(2) == 2
    assert default_threshold(3) == 2


def test_default_threshold_too_few():
    with pytest.raises(TooFewLocations):
        default_threshold(1)


# ---------------------------------------------------------------------------
# Split / combine basics
# ---------------------------------------------------------------------------

def test_split_combine_any_two_of_three():
    data = b"attack at dawn"
    shares = split(data, 3, 2, rng=rng, file_id="f1")
    for pick in [(0, 1), (0, 2), (1, 2)]:
        assert combine([shares[i] for i in pick]) == data


def test_too_few_shares_rejected():
    data = b"secret"
    shares = split(data, 5, 3, rng=rng)
    with pytest.raises(ThresholdNotMet):
        combine(shares[:2])


def test_duplicate_shares_do_not_count():
    data = b"secret"
    shares = split(data, 5, 3, rng=rng)
    with pytest.raises(ThresholdNotMet):
        combine([shares[0], shares[0], shares[0]])


def test_share_sizes_equal_input():
    data = rng.randbytes(1 << 20)  # 1 MiB
    shares = split(data, 3, 2, rng=rng)
    assert all(len(s.payload) == len(data) for s in shares)
    assert combine(shares[:2]) == data


def test_invalid_threshold():
    with pytest.raises(InvalidThreshold):
        split(b"x", 3, 1, rng=rng)
    with pytest.raises(InvalidThreshold):
        split(b"x", 3, 4, rng=rng)
    with pytest.raises(TooFewLocations):
        split(b"x", 1, 1, rng=rng)


def test_empty_data_rejected():
    with pytest.raises(ValueError):
        split(b"", 3, 2, rng=rng)


def test_inconsistent_shares_rejected():
    a = split(b"aaaa", 3, 2, rng=rng, file_id="f1")
    b = split(b"bbbbbb", 3, 2, rng=rng, file_id="f2")
    with pytest.raises(InconsistentShares):
        combine([a[0], b[1]])


def test_single_share_is_not_the_data():
    data = b"\x00" * 64
    shares = split(data, 4, 2, rng=rng)
    assert all(s.payload != data for s in shares)  # overwhelming probability


def test_distinct_x_coordinates():
    shares = split(b"data", 10, 5, rng=rng)
    xs = [s.x_coordinate for s in shares]
    assert len(set(xs)) == 10
    assert all(x != 0 for x in xs)


def test_corrupted_share_changes_output():
    data = b"precious bytes"
    shares = split(data, 3, 2, rng=rng)
    bad = Share(shares[0].file_id, shares[0].share_id, 3, 2,
                bytes([shares[0].payload[0] ^ 0x55]) + shares[0].payload[1:])
    assert combine([bad, shares[1]]) != data


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------

def test_share_file_round_trip():
    share = split(b"some data", 4, 2, rng=rng, file_id="platform-0")[2]
    blob = share.to_bytes()
    assert blob.startswith(b"DWSHARE1")
    assert Share.from_bytes(blob) == share


def test_share_file_bad_magic():
    with pytest.raises(ValueError):
        Share.from_bytes(b"NOTSHARE" + b"\x00" * 16)


def test_manifest_append_only():
    m = ShareManifest()
    m.record("f1", 1, "loc-a")
    m.record("f1", 2, "loc-b")
    with pytest.raises(ValueError):
        m.record("f1", 1, "loc-c")
    assert m.placements("f1") == [(1, "loc-a"), (2, "loc-b")]
    assert ShareManifest.from_json(m.to_json()).entries == m.entries


# ---------------------------------------------------------------------------
# Property tests
# ---------------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(
    data=st.binary(min_size=1, max_size=512),
    n=st.integers(min_value=2, max_value=12),
    seed=st.integers(min_value=0, max_value=2**30),
)
def test_random_subsets_reconstruct(data, n, seed):
    r = random.Random(seed)
    t = r.randint(2, n)
    shares = split(data, n, t, rng=r)
    subset = r.sample(shares, t)
    assert combine(subset) == data
    if t > 2:
        with pytest.raises(ThresholdNotMet):
            combine(r.sample(shares, t - 1))


@settings(max_examples=30, deadline=None)
@given(data=st.binary(min_size=1, max_size=256), seed=st.integers(0, 2**30))
def test_extra_shares_are_harmless(data, seed):
    r = random.Random(seed)
    shares = split(data, 6, 3, rng=r)
    assert combine(shares) == data


# ---------------------------------------------------------------------------
# Kernel equivalence: compiled vs pure
# ---------------------------------------------------------------------------

def _gf_mul_schoolbook(a: int, b: int) -> int:
    """Independent carry-less multiply + reduce, no tables."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        a <<= 1
        if a & 0x100:
            a ^= 0x11B
        b >>= 1
    return acc


def test_field_mul_matches_schoolbook_oracle():
    for a in range(0, 256, 3):
        for b in range(0, 256, 5):
            want = _gf_mul_schoolbook(a, b)
            assert _gf256_py.gf_mul(a, b) == want
            assert sharding._kernel.gf_mul(a, b) == want
    for a in range(1, 256):
        assert _gf256_py.gf_mul(a, _gf256_py.gf_inv(a)) == 1


@pytest.mark.skipif(sharding.KERNEL_NAME != "compiled",
                    reason="compiled kernel not built")
class TestKernelEquivalence:
    def test_field_tables_agree(self):
        k = sharding._kernel
        for a in range(0, 256, 7):
            for b in range(0, 256, 11):
                assert k.gf_mul(a, b) == _gf256_py.gf_mul(a, b)
        for a in range(1, 256):
            assert k.gf_inv(a) == _gf256_py.gf_inv(a)

    def test_split_agree(self):
        r = random.Random(5)
        data = r.randbytes(1024)
        coeffs = [r.randbytes(1024) for _ in range(3)]
        xs = list(range(1, 8))
        assert (sharding._kernel.split_shares(data, coeffs, xs)
                == _gf256_py.split_shares(data, coeffs, xs))

    def test_combine_agree(self):
        r = random.Random(6)
        payloads = [r.randbytes(512) for _ in range(4)]
        lambdas = [r.randrange(1, 256) for _ in range(4)]
        assert (sharding._kernel.combine_shares(payloads, lambdas)
                == _gf256_py.combine_shares(payloads, lambdas))

    def test_end_to_end_pure_kernel(self, monkeypatch):
        monkeypatch.setattr(sharding, "_kernel", _gf256_py)
        data = b"cross-kernel check"
        shares = split(data, 5, 3, rng=random.Random(1))
        assert combine(shares[1:4]) == data
