import random

import pytest

from willvault import bsw07, pdcpabe, policy
from willvault.pairing import UnsupportedSecurityLevel
from willvault.pairing.mock import MockGroup
from willvault.policy import And, Attr, Or


@pytest.fixture(scope="module")
def real():
    pp, mk = pdcpabe.setup(128)
    return pp, mk


@pytest.fixture()
def mock():
    return pdcpabe.setup(128, rng=random.Random(11), group=MockGroup())


def _mk_items(*specs):
    return [(f"m{i}", f"payload {i}".encode(), pol) for i, pol in enumerate(specs)]


# ---------------------------------------------------------------------------
# Setup / keygen contracts
# ---------------------------------------------------------------------------

def test_setup_rejects_unsupported_level():
    with pytest.raises(UnsupportedSecurityLevel):
        pdcpabe.setup(80)


def test_setup_params_agree_with_master(real):
    pp, mk = real
    g = pp.group
    # e(f1, g2) == e(g1, g2)^beta1 and e(g1, g_alpha) == egg_alpha
    assert g.pair(pp.f1, g.g2()).eq(g.pair(g.g1(), g.g2()).pow(mk.beta1))
    assert g.pair(g.g1(), mk.g_alpha).eq(pp.egg_alpha)


def test_setup_randomness(real):
    pp1, _ = real
    pp2, _ = pdcpabe.setup(128)
    assert not pp1.egg_alpha.eq(pp2.egg_alpha)


def test_keygen_component_count(mock):
    pp, mk = mock
    attrs = {f"a{i}" for i in range(30)}
    key = pdcpabe.keygen(mk, pp, attrs)
    assert key.element_count() == 1 + 1 + 2 * 30


def test_keygen_rejects_empty(mock):
    pp, mk = mock
    with pytest.raises(pdcpabe.EmptyAttributeSet):
        pdcpabe.keygen(mk, pp, set())


def test_encrypt_rejects_empty(mock):
    pp, _ = mock
    with pytest.raises(pdcpabe.EmptyInput):
        pdcpabe.encrypt(pp, [])


# ---------------------------------------------------------------------------
# Exponent-arithmetic harness (toy parameters with extractable exponents)
# ---------------------------------------------------------------------------

def test_noise_cancellation_by_exponent_arithmetic():
    """Verify ck recovery algebra directly on discrete logs."""
    g = MockGroup()
    rng = random.Random(5)
    pp, mk = pdcpabe.setup(128, rng=rng, group=g)
    key = pdcpabe.keygen(mk, pp, {"A", "B"}, rng=rng)
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)"), rng=rng)
    dct = ct.data_node_cts["fg0000"]

    # exponents are directly visible in the mock group
    alpha = mk.g_alpha.exp
    # r is recoverable from D3 = g^(r/beta3)
    r = key.d3.exp * mk.beta3 % g.order
    s_eps = dct.c1.exp * pow(mk.beta1, -1, g.order) % g.order
    eps = dct.c3.exp * pow(mk.beta3, -1, g.order) % g.order
    s = (s_eps - eps) % g.order
    ck_exp = (dct.c.exp - alpha * s_eps) % g.order

    # C * e(g,g)^(r*s) * e(C3,D3) / e(C1,D1) == ck, in the exponent:
    lhs = (dct.c.exp + r * s + eps * r - s_eps * (alpha + r)) % g.order
    assert lhs == ck_exp

    report = pdcpabe.decrypt(pp, key, ct)
    assert report.recovered == {"m0": b"payload 0"}


def test_link_value_recombination_exponents():
    """Recovered gate value equals the propagated secret, leaf by leaf."""
    g = MockGroup()
    rng = random.Random(9)
    pp, mk = pdcpabe.setup(128, rng=rng, group=g)
    ct = pdcpabe.encrypt(pp, _mk_items("((A and B) or C)"), rng=rng)
    root_id, root_tag = ct.data_node_cts["fg0000"].root_ref
    rec = [r for r in ct.link_shares[root_id] if r.tag == root_tag][0]
    assert rec.kind == "or"
    # all children of an OR propagation carry the parent's value
    child_values = []
    for cid, ctag in rec.children:
        if cid in ct.attr_cts:
            pair = [p for p in ct.attr_cts[cid] if p.tag == ctag][0]
            child_values.append(pair.c_hat.exp)
    assert len(set(child_values)) <= 1


# ---------------------------------------------------------------------------
# Round trips and partial decryption
# ---------------------------------------------------------------------------

def test_round_trip_real_curve(real):
    pp, mk = real
    key = pdcpabe.keygen(mk, pp, {"A", "B"})
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)", "C"))
    report = pdcpabe.decrypt(pp, key, ct)
    assert report.recovered == {"m0": b"payload 0"}
    assert report.denied_groups() == {"fg0001"}
    assert report.denied[0][1] == "policy not satisfied"


def test_partial_decryption_miss_and_hit(real):
    pp, mk = real
    key_c = pdcpabe.keygen(mk, pp, {"C"})
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)", "C"))
    report = pdcpabe.decrypt(pp, key_c, ct)
    assert report.recovered == {"m1": b"payload 1"}
    assert report.denied_groups() == {"fg0000"}


def test_identical_policies_share_group(mock):
    pp, mk = mock
    ct = pdcpabe.encrypt(pp, [
        ("m1", b"b1", "(A and B)"),
        ("m2", b"b2", "(B and A)"),
    ])
    assert len(ct.data_node_cts) == 1
    assert len(ct.payloads) == 2
    key = pdcpabe.keygen(mk, pp, {"A", "B"})
    report = pdcpabe.decrypt(pp, key, ct)
    assert set(report.recovered) == {"m1", "m2"}


def test_single_attribute_policy(mock):
    pp, mk = mock
    ct = pdcpabe.encrypt(pp, _mk_items("OnlyOne"))
    assert ct.attribute_pair_count() == 1
    assert len(ct.dag.link_nodes) == 0
    key = pdcpabe.keygen(mk, pp, {"OnlyOne"})
    assert pdcpabe.decrypt(pp, key, ct).recovered == {"m0": b"payload 0"}


def test_pair_count_independent_of_item_count(mock):
    pp, _ = mock
    rng = random.Random(3)
    policies = ["(A and B)", "(C or (A and B))"]
    few = pdcpabe.encrypt(
        pp, [(f"m{i}", b"x", policies[i % 2]) for i in range(2)], rng=rng)
    many = pdcpabe.encrypt(
        pp, [(f"m{i}", b"x", policies[i % 2]) for i in range(100)], rng=rng)
    assert len(many.data_node_cts) == 2
    assert many.attribute_pair_count() == few.attribute_pair_count()


def test_duplicate_child_gate(mock):
    pp, mk = mock
    ct = pdcpabe.encrypt(pp, _mk_items("(A and A)", "(A or A)"))
    key = pdcpabe.keygen(mk, pp, {"A"})
    report = pdcpabe.decrypt(pp, key, ct)
    assert set(report.recovered) == {"m0", "m1"}
    key_b = pdcpabe.keygen(mk, pp, {"B"})
    assert not pdcpabe.decrypt(pp, key_b, ct).recovered


def test_seeded_operations_reproducible(mock):
    pp, mk = mock
    g = pp.group
    k1 = pdcpabe.keygen(mk, pp, {"A", "B"}, rng=random.Random(42))
    k2 = pdcpabe.keygen(mk, pp, {"A", "B"}, rng=random.Random(42))
    assert k1.to_bytes(g) == k2.to_bytes(g)
    items = _mk_items("(A and B)", "C")
    c1 = pdcpabe.encrypt(pp, items, rng=random.Random(9)).to_bytes(g)
    c2 = pdcpabe.encrypt(pp, items, rng=random.Random(9)).to_bytes(g)
    assert c1 == c2


# ---------------------------------------------------------------------------
# Sharing economics
# ---------------------------------------------------------------------------

def test_subset_policy_saves_attribute_pairs(mock):
    """A policy that is a sub-expression of another adds no pairs at all."""
    pp, mk = mock
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)", "((A and B) or C)"))
    standalone = sum(policy.leaf_occurrences(policy.parse_policy(p))
                     for p in ["(A and B)", "((A and B) or C)"])
    assert standalone == 5
    assert ct.attribute_pair_count() == 3
    # access semantics survive the sharing
    for attrs, want in [({"A", "B"}, {"m0", "m1"}), ({"C"}, {"m1"}),
                        ({"A"}, set()), ({"B", "C"}, {"m1"})]:
        key = pdcpabe.keygen(mk, pp, attrs)
        assert set(pdcpabe.decrypt(pp, key, ct).recovered) == want


def test_shared_conjunct_under_and_saves_pairs(mock):
    pp, mk = mock
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)", "((A and B) and D)"))
    standalone = 2 + 3
    assert ct.attribute_pair_count() < standalone
    for attrs, want in [({"A", "B"}, {"m0"}), ({"A", "B", "D"}, {"m0", "m1"}),
                        ({"D"}, set())]:
        key = pdcpabe.keygen(mk, pp, attrs)
        assert set(pdcpabe.decrypt(pp, key, ct).recovered) == want


def test_fewer_pairs_than_standalone_bsw07(real):
    pp, mk = real
    policies = ["(A and B)", "((A and B) or C)"]
    ct = pdcpabe.encrypt(pp, _mk_items(*policies))
    bpp, bmk = bsw07.bsw_setup(group=pp.group)
    bsw_pairs = sum(
        bsw07.bsw_encrypt(bpp, b"m", p).leaf_pair_count() for p in policies)
    assert ct.attribute_pair_count() < bsw_pairs


# ---------------------------------------------------------------------------
# Collusion resistance at the API level
# ---------------------------------------------------------------------------

def test_collusion_merged_key_fails(real):
    pp, mk = real
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)"))
    key_a = pdcpabe.keygen(mk, pp, {"A"})
    key_b = pdcpabe.keygen(mk, pp, {"B"})
    assert not pdcpabe.decrypt(pp, key_a, ct).recovered
    assert not pdcpabe.decrypt(pp, key_b, ct).recovered
    merged = pdcpabe.UserKey(
        attrs=frozenset({"A", "B"}),
        d1=key_a.d1,
        d3=key_a.d3,
        components={**key_a.components, **key_b.components},
    )
    report = pdcpabe.decrypt(pp, merged, ct)
    assert not report.recovered
    assert report.denied  # auth failure or denial, never plaintext


# ---------------------------------------------------------------------------
# Caching, hygiene, serialization, tampering
# ---------------------------------------------------------------------------

def test_pairing_cache_reduces_work(real):
    pp, mk = real
    key = pdcpabe.keygen(mk, pp, {"A", "B", "C"})
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)", "((A and B) or C)",
                                       "((A and B) and C)"))
    cached = pdcpabe.decrypt(pp, key, ct, use_cache=True)
    uncached = pdcpabe.decrypt(pp, key, ct, use_cache=False)
    assert cached.recovered == uncached.recovered
    assert cached.pairings_used < uncached.pairings_used


def test_ciphertext_contains_no_scalar_secrets(mock):
    """Int-typed leaves of the ciphertext are ids, tags, and node indices only."""
    pp, _ = mock
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)", "C"))
    for fg, dct in ct.data_node_cts.items():
        for name in ("c", "c1", "c2", "c3"):
            assert not isinstance(getattr(dct, name), int), \
                f"{fg}.{name} leaks a scalar"
        assert all(isinstance(x, int) for x in dct.root_ref)
    for pairs in ct.attr_cts.values():
        for p in pairs:
            assert not isinstance(p.c_hat, int)
            assert not isinstance(p.c_hat_prime, int)
    for recs in ct.link_shares.values():
        for rec in recs:
            assert rec.kind in ("and", "or", "pass")
            assert all(isinstance(c, tuple) for c in rec.children)


def test_serialized_ciphertext_has_no_scalar_section(real):
    """The wire form carries exactly the public structure sections."""
    pp, _ = real
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)"))
    blob = ct.to_bytes(pp.group)
    from willvault import container
    curve, sections = container.read_container(blob, pdcpabe.CIPHERTEXT_MAGIC)
    assert set(sections) == {1, 2, 3, 4, 5, 6}


def test_ciphertext_serialization_round_trip(real):
    pp, mk = real
    key = pdcpabe.keygen(mk, pp, {"A", "C"})
    ct = pdcpabe.encrypt(pp, _mk_items("(A or B)", "C", "(A and C)"))
    ct2 = pdcpabe.Ciphertext.from_bytes(ct.to_bytes(pp.group), pp.group)
    r1 = pdcpabe.decrypt(pp, key, ct)
    r2 = pdcpabe.decrypt(pp, key, ct2)
    assert r1.recovered == r2.recovered
    assert ct.to_bytes(pp.group) == ct2.to_bytes(pp.group)


def test_key_and_params_serialization_round_trip(real):
    pp, mk = real
    g = pp.group
    pp2 = pdcpabe.PublicParams.from_bytes(pp.to_bytes(), g)
    assert pp2.egg_alpha.eq(pp.egg_alpha)
    mk2 = pdcpabe.MasterKey.from_bytes(mk.to_bytes(g), g)
    assert mk2.beta1 == mk.beta1 and mk2.g_alpha.eq(mk.g_alpha)
    key = pdcpabe.keygen(mk, pp, {"A", "B"})
    key2 = pdcpabe.UserKey.from_bytes(key.to_bytes(g), g)
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)"))
    assert pdcpabe.decrypt(pp, key2, ct).recovered == {"m0": b"payload 0"}


def test_tampered_payload_reported_not_raised(real):
    pp, mk = real
    key = pdcpabe.keygen(mk, pp, {"A"})
    ct = pdcpabe.encrypt(pp, [("m0", b"data0", "A"), ("m1", b"data1", "A")])
    fg, nonce, sealed = ct.payloads["m0"]
    ct.payloads["m0"] = (fg, nonce, sealed[:-1] + bytes([sealed[-1] ^ 1]))
    report = pdcpabe.decrypt(pp, key, ct)
    assert report.recovered == {"m1": b"data1"}
    assert any("authentication failure: m0" in reason for _, reason in report.denied)


def test_malformed_ciphertext_detected(real):
    pp, mk = real
    key = pdcpabe.keygen(mk, pp, {"A"})
    ct = pdcpabe.encrypt(pp, _mk_items("(A and B)"))
    ct.attr_cts = {nid: pairs[:0] for nid, pairs in ct.attr_cts.items()}
    with pytest.raises(pdcpabe.MalformedCiphertext):
        pdcpabe.decrypt(pp, key, ct)


# ---------------------------------------------------------------------------
# Randomized oracle (bulk on the mock group; the acceptance suite re-runs
# this at production parameters)
# ---------------------------------------------------------------------------

_NAMES = ["A", "B", "C", "D", "E", "F"]


def _random_expr(rng, depth=0):
    if depth >= 3 or rng.random() < 0.35:
        return Attr(rng.choice(_NAMES))
    cls = And if rng.random() < 0.5 else Or
    return cls(_random_expr(rng, depth + 1), _random_expr(rng, depth + 1))


def test_random_oracle_mock_bulk():
    g = MockGroup()
    seed_rng = random.Random(1234)
    pp, mk = pdcpabe.setup(128, rng=seed_rng, group=g)
    for trial in range(200):
        rng = random.Random(trial)
        n_pol = rng.randrange(1, 4)
        exprs = [_random_expr(rng) for _ in range(n_pol)]
        items = [(f"m{i}", f"payload-{i}".encode(), e)
                 for i, e in enumerate(exprs)]
        ct = pdcpabe.encrypt(pp, items, rng=rng)
        attrs = {n for n in _NAMES if rng.random() < 0.4} or {"Z"}
        key = pdcpabe.keygen(mk, pp, attrs, rng=rng)
        report = pdcpabe.decrypt(pp, key, ct)
        for i, e in enumerate(exprs):
            want = policy.evaluate(e, attrs)
            got = f"m{i}" in report.recovered
            assert got == want, f"trial {trial}: {e} with {attrs}"
        covered = set(report.recovered) | {
            pid for pid, (fg, _, _) in ct.payloads.items()
            if fg in report.denied_groups()}
        assert covered == set(ct.payloads)
