"""Portable XML digital-will documents.

Core elements live in the ``urn:beyondlife:will:1`` namespace.  Foreign-
namespace elements appearing directly under the root are provider
extensions: they are captured as exact byte slices of the source document
and re-emitted verbatim, so third-party additions survive any number of
parse/serialize round trips unchanged.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from xml.parsers import expat
from xml.sax.saxutils import quoteattr

from willvault import policy

CORE_NS = "urn:beyondlife:will:1"
_NS_SEP = "\x1f"
_ATTR_TOKEN = re.compile(r"[A-Za-z0-9_]+")


class SchemaViolation(ValueError):
    """Document does not match the will schema; carries the element path."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{message} (at {path})")
        self.path = path


class InvariantViolation(ValueError):
    """In-memory will violates a structural invariant."""


@dataclass(frozen=True)
class Heir:
    heir_id: str
    contact: str
    public_key: str  # hex-encoded curve point reference
    attributes: tuple[str, ...]


@dataclass(frozen=True)
class PlatformLink:
    platform_id: str
    access_token: str  # synthetic placeholder only; never a live credential
    asset_selectors: tuple[str, ...]


@dataclass(frozen=True)
class ContentPolicy:
    selector: str
    expression: str


@dataclass(frozen=True)
class TriggerConfig:
    vote_threshold: int
    freeze_duration_s: int
    authority_override_allowed: bool = True


@dataclass(frozen=True)
class StoragePrefs:
    location_ids: tuple[str, ...] = ()
    share_threshold: int | None = None


@dataclass(frozen=True)
class DigitalWill:
    will_id: str
    creator_id: str
    heirs: tuple[Heir, ...]
    platform_links: tuple[PlatformLink, ...]
    content_policies: tuple[ContentPolicy, ...]
    trigger: TriggerConfig
    storage: StoragePrefs = StoragePrefs()
    extensions: tuple[bytes, ...] = ()


# ---------------------------------------------------------------------------
# Invariants
# ---------------------------------------------------------------------------


def _check_invariants(will: DigitalWill) -> list[str]:
    problems = []
    if not will.will_id:
        problems.append("will id is empty")
    if not will.heirs:
        problems.append("heirs list is empty")
    if will.trigger.vote_threshold < 1:
        problems.append("vote threshold must be at least 1")
    if will.heirs and will.trigger.vote_threshold > len(will.heirs):
        problems.append("vote threshold exceeds heir count")
    if will.trigger.freeze_duration_s < 0:
        problems.append("freeze duration must be nonnegative")
    seen = set()
    for heir in will.heirs:
        if heir.heir_id in seen:
            problems.append(f"duplicate heir id {heir.heir_id!r}")
        seen.add(heir.heir_id)
        for attr in heir.attributes:
            if not _ATTR_TOKEN.fullmatch(attr):
                problems.append(f"bad attribute token {attr!r}")
    for cp in will.content_policies:
        policy.parse_policy(cp.expression)  # PolicySyntaxError propagates
    if will.storage.location_ids and len(will.storage.location_ids) < 2:
        problems.append("storage needs at least two locations when specified")
    if will.storage.share_threshold is not None:
        t = will.storage.share_threshold
        n = len(will.storage.location_ids)
        if t < 2 or (n and t > n):
            problems.append(f"share threshold {t} out of range for {n} locations")
    return problems


def validate(will: DigitalWill) -> None:
    problems = _check_invariants(will)
    if problems:
        raise InvariantViolation("; ".join(problems))


def coverage_warnings(will: DigitalWill) -> list[str]:
    """Heirs whose granted attributes satisfy none of the content policies."""
    warnings = []
    exprs = [policy.parse_policy(cp.expression) for cp in will.content_policies]
    for heir in will.heirs:
        if exprs and not any(policy.evaluate(e, set(heir.attributes))
                             for e in exprs):
            warnings.append(
                f"heir {heir.heir_id} satisfies no content policy")
    return warnings


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


class _Node:
    __slots__ = ("name", "attrs", "children", "path")

    def __init__(self, name, attrs, path):
        self.name = name
        self.attrs = attrs
        self.children = []
        self.path = path


def _scan_tag_end(data: bytes, start: int) -> int:
    """Index just past the '>' closing the tag that starts at ``start``."""
    in_quote = None
    i = start
    while i < len(data):
        c = data[i:i + 1]
        if in_quote:
            if c == in_quote:
                in_quote = None
        elif c in (b'"', b"'"):
            in_quote = c
        elif c == b">":
            return i + 1
        i += 1
    raise SchemaViolation("unterminated tag", "/")


def _check_fragment_self_contained(fragment: bytes) -> None:
    """Extensions must declare their namespaces locally to stay portable."""
    probe = expat.ParserCreate(namespace_separator=_NS_SEP)
    try:
        probe.Parse(fragment, True)
    except expat.ExpatError as exc:
        raise SchemaViolation(
            "extension element is not a namespace-self-contained fragment",
            "/digitalWill") from exc


def parse_xml(data: bytes) -> DigitalWill:
    """Parse a will document; foreign root children are kept byte-exact."""
    parser = expat.ParserCreate(namespace_separator=_NS_SEP)
    root: list[_Node] = []
    stack: list[_Node] = []
    extensions: list[bytes] = []
    ext_stack: list[int] = []  # start byte of the open extension element
    depth = 0

    def split_name(raw: str) -> tuple[str, str]:
        if _NS_SEP in raw:
            uri, local = raw.split(_NS_SEP, 1)
            return uri, local
        return "", raw

    def start(raw_name, attrs):
        nonlocal depth
        uri, local = split_name(raw_name)
        if ext_stack:
            depth += 1
            return
        if depth == 1 and uri != CORE_NS:
            ext_stack.append(parser.CurrentByteIndex)
            depth += 1
            return
        if depth > 0 and uri != CORE_NS:
            raise SchemaViolation(
                f"foreign element {local!r} outside the extension area",
                _path(stack) + "/" + local)
        path = _path(stack) + "/" + local
        node = _Node(local, dict(attrs), path)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)
        depth += 1

    def end(raw_name):
        nonlocal depth
        depth -= 1
        if ext_stack:
            if depth == 1:
                start_byte = ext_stack.pop()
                idx = parser.CurrentByteIndex
                if data[idx:idx + 2] == b"</":
                    # paired close: the event points at its '<'
                    end_byte = _scan_tag_end(data, idx)
                else:
                    # self-closing: the event index is already past the tag
                    end_byte = idx
                fragment = data[start_byte:end_byte]
                _check_fragment_self_contained(fragment)
                extensions.append(fragment)
            return
        stack.pop()

    def _path(nodes):
        return "/" + "/".join(n.name for n in nodes) if nodes else ""

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise SchemaViolation(f"not well-formed XML: {exc}", "/") from exc

    if not root or root[0].name != "digitalWill":
        raise SchemaViolation("root element must be digitalWill", "/")
    doc = root[0]
    will = _build_will(doc, extensions)
    problems = _check_invariants(will)
    if problems:
        raise SchemaViolation("; ".join(problems), doc.path)
    return will


def _req_attr(node: _Node, name: str) -> str:
    if name not in node.attrs:
        raise SchemaViolation(f"missing attribute {name!r}", node.path)
    return node.attrs[name]


def _only(node: _Node, name: str) -> _Node:
    found = [c for c in node.children if c.name == name]
    if len(found) != 1:
        raise SchemaViolation(
            f"expected exactly one {name!r} element, found {len(found)}",
            node.path)
    return found[0]


def _maybe(node: _Node, name: str) -> _Node | None:
    found = [c for c in node.children if c.name == name]
    if len(found) > 1:
        raise SchemaViolation(f"more than one {name!r} element", node.path)
    return found[0] if found else None


def _int_attr(node: _Node, name: str) -> int:
    raw = _req_attr(node, name)
    try:
        return int(raw)
    except ValueError:
        raise SchemaViolation(f"attribute {name!r} must be an integer",
                              node.path) from None


def _build_will(doc: _Node, extensions: list[bytes]) -> DigitalWill:
    will_id = _req_attr(doc, "id")
    creator = _only(doc, "creator")
    heirs = []
    for h in _only(doc, "heirs").children:
        if h.name != "heir":
            raise SchemaViolation(f"unexpected element {h.name!r}", h.path)
        attrs = tuple(_req_attr(a, "name") for a in h.children
                      if a.name == "attribute")
        heirs.append(Heir(_req_attr(h, "id"), h.attrs.get("contact", ""),
                          h.attrs.get("publicKey", ""), attrs))
    platforms = []
    platforms_node = _maybe(doc, "platforms")
    for p in (platforms_node.children if platforms_node else []):
        if p.name != "platform":
            raise SchemaViolation(f"unexpected element {p.name!r}", p.path)
        selectors = tuple(_req_attr(a, "selector") for a in p.children
                          if a.name == "asset")
        platforms.append(PlatformLink(_req_attr(p, "id"),
                                      p.attrs.get("accessToken", ""),
                                      selectors))
    policies = []
    policies_node = _maybe(doc, "policies")
    for cp in (policies_node.children if policies_node else []):
        if cp.name != "policy":
            raise SchemaViolation(f"unexpected element {cp.name!r}", cp.path)
        policies.append(ContentPolicy(_req_attr(cp, "selector"),
                                      _req_attr(cp, "expression")))
    trig = _only(doc, "trigger")
    trigger = TriggerConfig(
        vote_threshold=_int_attr(trig, "voteThreshold"),
        freeze_duration_s=_int_attr(trig, "freezeDurationSeconds"),
        authority_override_allowed=(
            trig.attrs.get("authorityOverrideAllowed", "true") == "true"),
    )
    storage_node = _maybe(doc, "storage")
    if storage_node is not None:
        locs = tuple(_req_attr(l, "id") for l in storage_node.children
                     if l.name == "location")
        thr = (int(storage_node.attrs["shareThreshold"])
               if "shareThreshold" in storage_node.attrs else None)
        storage = StoragePrefs(locs, thr)
    else:
        storage = StoragePrefs()
    return DigitalWill(
        will_id=will_id,
        creator_id=_req_attr(creator, "id"),
        heirs=tuple(heirs),
        platform_links=tuple(platforms),
        content_policies=tuple(policies),
        trigger=trigger,
        storage=storage,
        extensions=tuple(extensions),
    )


# ---------------------------------------------------------------------------
# Serialization (deterministic element and attribute order)
# ---------------------------------------------------------------------------


def serialize_xml(will: DigitalWill) -> bytes:
    problems = _check_invariants(will)
    if problems:
        raise InvariantViolation("; ".join(problems))
    q = quoteattr
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    out.append(f'<w:digitalWill xmlns:w="{CORE_NS}" id={q(will.will_id)}>')
    out.append(f'  <w:creator id={q(will.creator_id)}/>')
    out.append('  <w:heirs>')
    for h in will.heirs:
        out.append(f'    <w:heir id={q(h.heir_id)} contact={q(h.contact)}'
                   f' publicKey={q(h.public_key)}>')
        for a in h.attributes:
            out.append(f'      <w:attribute name={q(a)}/>')
        out.append('    </w:heir>')
    out.append('  </w:heirs>')
    out.append('  <w:platforms>')
    for p in will.platform_links:
        out.append(f'    <w:platform id={q(p.platform_id)}'
                   f' accessToken={q(p.access_token)}>')
        for s in p.asset_selectors:
            out.append(f'      <w:asset selector={q(s)}/>')
        out.append('    </w:platform>')
    out.append('  </w:platforms>')
    out.append('  <w:policies>')
    for cp in will.content_policies:
        out.append(f'    <w:policy selector={q(cp.selector)}'
                   f' expression={q(cp.expression)}/>')
    out.append('  </w:policies>')
    t = will.trigger
    out.append(f'  <w:trigger voteThreshold="{t.vote_threshold}"'
               f' freezeDurationSeconds="{t.freeze_duration_s}"'
               f' authorityOverrideAllowed='
               f'"{"true" if t.authority_override_allowed else "false"}"/>')
    thr = (f' shareThreshold="{will.storage.share_threshold}"'
           if will.storage.share_threshold is not None else "")
    out.append(f'  <w:storage{thr}>')
    for loc in will.storage.location_ids:
        out.append(f'    <w:location id={q(loc)}/>')
    out.append('  </w:storage>')
    body = "\n".join(out).encode("utf-8")
    for ext in will.extensions:
        body += b"\n  " + ext
    body += b"\n</w:digitalWill>\n"
    return body
