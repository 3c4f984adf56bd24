import random

import pytest

from willvault.policy import PolicySyntaxError
from willvault.willfile import (
    ContentPolicy,
    DigitalWill,
    Heir,
    InvariantViolation,
    PlatformLink,
    SchemaViolation,
    StoragePrefs,
    TriggerConfig,
    coverage_warnings,
    parse_xml,
    serialize_xml,
    validate,
)


def _minimal_will(**overrides) -> DigitalWill:
    fields = dict(
        will_id="will-001",
        creator_id="creator-1",
        heirs=(Heir("heir-1", "heir1@example.test", "aa" * 33, ("Family",)),),
        platform_links=(PlatformLink("social", "token-placeholder",
                                     ("posts/*",)),),
        content_policies=(ContentPolicy("posts/*", "Family"),),
        trigger=TriggerConfig(vote_threshold=1, freeze_duration_s=3600),
        storage=StoragePrefs(("loc-a", "loc-b"), 2),
    )
    fields.update(overrides)
    return DigitalWill(**fields)


def test_minimal_round_trip():
    will = _minimal_will()
    blob = serialize_xml(will)
    assert parse_xml(blob) == will


def test_serialization_deterministic():
    will = _minimal_will()
    assert serialize_xml(will) == serialize_xml(will)


def test_extension_preserved_byte_identical():
    ext = b'<x:providerQuirk xmlns:x="urn:example:quirk" mode="7">' \
          b'<x:inner>keep me</x:inner></x:providerQuirk>'
    will = _minimal_will(extensions=(ext,))
    blob = serialize_xml(will)
    parsed = parse_xml(blob)
    assert parsed.extensions == (ext,)
    blob2 = serialize_xml(parsed)
    assert ext in blob2
    assert parse_xml(blob2) == parsed


def test_multiple_extensions_keep_order():
    e1 = b'<a:one xmlns:a="urn:x:a"/>'
    e2 = b'<b:two xmlns:b="urn:x:b" attr="v&gt;1"/>'
    will = _minimal_will(extensions=(e1, e2))
    assert parse_xml(serialize_xml(will)).extensions == (e1, e2)


def test_foreign_will_with_extension_parses():
    doc = b"""<?xml version="1.0"?>
<w:digitalWill xmlns:w="urn:beyondlife:will:1" id="w9">
  <w:creator id="c9"/>
  <w:heirs><w:heir id="h1" contact="" publicKey="">
    <w:attribute name="Kin"/></w:heir></w:heirs>
  <w:platforms/>
  <w:policies><w:policy selector="*" expression="Kin"/></w:policies>
  <w:trigger voteThreshold="1" freezeDurationSeconds="0"/>
  <w:storage/>
  <y:extra xmlns:y="urn:y">  spaced   <y:deep/> </y:extra>
</w:digitalWill>
"""
    will = parse_xml(doc)
    assert will.will_id == "w9"
    assert will.extensions == (
        b'<y:extra xmlns:y="urn:y">  spaced   <y:deep/> </y:extra>',)
    # round-trips from our serializer too
    assert parse_xml(serialize_xml(will)) == will


def test_zero_vote_threshold_is_schema_violation():
    will = _minimal_will(trigger=TriggerConfig(0, 10))
    blob = serialize_xml(_minimal_will()).replace(
        b'voteThreshold="1"', b'voteThreshold="0"')
    with pytest.raises(SchemaViolation):
        parse_xml(blob)
    with pytest.raises(InvariantViolation):
        serialize_xml(will)


def test_threshold_above_heirs_rejected():
    with pytest.raises(InvariantViolation):
        serialize_xml(_minimal_will(trigger=TriggerConfig(5, 10)))


def test_empty_heirs_rejected():
    with pytest.raises(InvariantViolation):
        serialize_xml(_minimal_will(heirs=()))


def test_bad_policy_surfaces_policy_error():
    will = _minimal_will(
        content_policies=(ContentPolicy("posts/*", "Family and"),))
    with pytest.raises(PolicySyntaxError):
        serialize_xml(will)


def test_malformed_xml_rejected():
    with pytest.raises(SchemaViolation):
        parse_xml(b"<not-even-xml")


def test_wrong_root_rejected():
    with pytest.raises(SchemaViolation):
        parse_xml(b'<w:other xmlns:w="urn:beyondlife:will:1" id="x"/>')


def test_missing_trigger_reports_path():
    doc = serialize_xml(_minimal_will())
    doc = doc.replace(
        b'  <w:trigger voteThreshold="1" freezeDurationSeconds="3600"'
        b' authorityOverrideAllowed="true"/>\n', b"")
    with pytest.raises(SchemaViolation) as exc:
        parse_xml(doc)
    assert "trigger" in str(exc.value)


def test_coverage_warning_for_useless_heir():
    will = _minimal_will(
        heirs=(Heir("h1", "", "", ("Family",)),
               Heir("h2", "", "", ("Stranger",))),
        trigger=TriggerConfig(1, 0),
    )
    warnings = coverage_warnings(will)
    assert warnings == ["heir h2 satisfies no content policy"]
    validate(will)  # warn-level only


def test_validate_passes_good_will():
    validate(_minimal_will())


# ---------------------------------------------------------------------------
# Randomized round-trip property
# ---------------------------------------------------------------------------

_WORDS = ["Family", "Friend", "Lawyer", "Partner", "Colleague", "Kin"]


def _random_will(rng: random.Random) -> DigitalWill:
    n_heirs = rng.randint(1, 4)
    heirs = tuple(
        Heir(f"heir-{i}", f"h{i}@example.test" if rng.random() < 0.8 else "",
             rng.randbytes(8).hex(),
             tuple(rng.sample(_WORDS, rng.randint(0, 3))))
        for i in range(n_heirs))
    platforms = tuple(
        PlatformLink(f"plat-{i}", f"tok-{rng.randrange(999)}",
                     tuple(f"sel/{j}" for j in range(rng.randint(0, 3))))
        for i in range(rng.randint(0, 3)))
    pols = []
    for i in range(rng.randint(0, 4)):
        a, b = rng.sample(_WORDS, 2)
        expr = rng.choice([a, f"({a} and {b})", f"({a} or {b})"])
        pols.append(ContentPolicy(f"sel/{i}", expr))
    exts = []
    for i in range(rng.randint(0, 2)):
        exts.append(
            f'<e{i}:ext xmlns:e{i}="urn:ext:{i}" v="{rng.randrange(100)}"/>'
            .encode())
    n_loc = rng.choice([0, 2, 3, 4])
    locs = tuple(f"loc-{i}" for i in range(n_loc))
    thr = rng.randint(2, n_loc) if n_loc and rng.random() < 0.5 else None
    return DigitalWill(
        will_id=f"will-{rng.randrange(10_000)}",
        creator_id=f"creator-{rng.randrange(100)}",
        heirs=heirs,
        platform_links=platforms,
        content_policies=tuple(pols),
        trigger=TriggerConfig(rng.randint(1, n_heirs), rng.randrange(0, 10_000),
                              rng.random() < 0.5),
        storage=StoragePrefs(locs, thr),
        extensions=tuple(exts),
    )


def test_hundred_randomized_wills_round_trip():
    for seed in range(100):
        will = _random_will(random.Random(seed))
        blob = serialize_xml(will)
        parsed = parse_xml(blob)
        assert parsed == will, f"seed {seed}"
        assert serialize_xml(parsed) == blob, f"seed {seed}"
