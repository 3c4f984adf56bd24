"""Append-only hash-chained action log and the behaviour inspector.

Every broker action lands in a chain where each entry commits to the full
prefix before it, so any mutation, deletion, or reorder of persisted
entries is detectable.  The inspector replays a verified chain against the
expected will-lifecycle rules and reports deviations.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

CHAIN_MAGIC = "DWCHAIN1"
GENESIS_HASH = b"\x00" * 32

ACTIONS = (
    "DeployWill", "UpdateWill", "DeleteWill", "TriggerRequest", "VoteCast",
    "FreezeStart", "Veto", "AuthorityOverride", "Activate", "PullData",
    "EncryptData", "SplitUpload", "KeyDistribute", "RetrieveShares",
)


class ChainCorrupt(ValueError):
    """Chain failed verification at append time."""


def _digest_payload(payload) -> bytes:
    if payload is None:
        return hashlib.sha256(b"").digest()
    if isinstance(payload, (bytes, bytearray)):
        return hashlib.sha256(bytes(payload)).digest()
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    ).digest()


def _entry_hash(seq: int, timestamp_ms: int, actor: str, action: str,
                subject: str, payload_digest: bytes, prev_hash: bytes) -> bytes:
    h = hashlib.sha256()
    h.update(struct.pack(">QQ", seq, timestamp_ms))
    for part in (actor, action, subject):
        raw = part.encode("utf-8")
        h.update(struct.pack(">H", len(raw)))
        h.update(raw)
    h.update(payload_digest)
    h.update(prev_hash)
    return h.digest()


@dataclass(frozen=True)
class LogEntry:
    seq: int
    timestamp_ms: int
    actor: str
    action: str
    subject: str
    payload_digest: bytes
    prev_hash: bytes
    entry_hash: bytes
    payload: object = field(default=None, compare=False, repr=False)

    def recomputed_hash(self) -> bytes:
        return _entry_hash(self.seq, self.timestamp_ms, self.actor, self.action,
                           self.subject, self.payload_digest, self.prev_hash)


class Chain:
    """Single-writer append-only chain; reads share immutable entries."""

    def __init__(self, entries: list[LogEntry] | None = None):
        self.entries: list[LogEntry] = list(entries or [])

    def __len__(self) -> int:
        return len(self.entries)

    def tip_hash(self) -> bytes:
        return self.entries[-1].entry_hash if self.entries else GENESIS_HASH

    def append(self, actor: str, action: str, subject: str,
               payload=None, timestamp_ms: int = 0) -> LogEntry:
        if action not in ACTIONS:
            raise ValueError(f"unknown action {action!r}")
        bad = verify_chain(self.entries)
        if bad is not None:
            raise ChainCorrupt(f"chain corrupt at seq {bad}")
        seq = len(self.entries)
        digest = _digest_payload(payload)
        prev = self.tip_hash()
        entry = LogEntry(
            seq=seq, timestamp_ms=timestamp_ms, actor=actor, action=action,
            subject=subject, payload_digest=digest, prev_hash=prev,
            entry_hash=_entry_hash(seq, timestamp_ms, actor, action, subject,
                                   digest, prev),
            payload=payload,
        )
        self.entries.append(entry)
        return entry

    def for_subject(self, subject: str) -> list[LogEntry]:
        return [e for e in self.entries if e.subject == subject]

    # -- persistence ---------------------------------------------------------

    def save(self, path: Path | str) -> None:
        lines = [CHAIN_MAGIC]
        for e in self.entries:
            lines.append("\t".join([
                str(e.seq), str(e.timestamp_ms), e.actor, e.action, e.subject,
                e.payload_digest.hex(), e.prev_hash.hex(), e.entry_hash.hex(),
            ]))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: Path | str) -> "Chain":
        lines = Path(path).read_text().splitlines()
        if not lines or lines[0] != CHAIN_MAGIC:
            raise ValueError("not a chain file (bad magic)")
        entries = []
        for line in lines[1:]:
            if not line.strip():
                continue
            seq, ts, actor, action, subject, pd, ph, eh = line.split("\t")
            entries.append(LogEntry(
                seq=int(seq), timestamp_ms=int(ts), actor=actor, action=action,
                subject=subject, payload_digest=bytes.fromhex(pd),
                prev_hash=bytes.fromhex(ph), entry_hash=bytes.fromhex(eh)))
        return cls(entries)


def verify_chain(entries: list[LogEntry]) -> int | None:
    """Recompute every link; None when intact, else the earliest bad seq."""
    prev = GENESIS_HASH
    for i, e in enumerate(entries):
        if e.seq != i:
            return i
        if e.prev_hash != prev:
            return i
        if e.recomputed_hash() != e.entry_hash:
            return i
        prev = e.entry_hash
    return None


# ---------------------------------------------------------------------------
# Broker Behaviours Inspector
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WillRuleParams:
    vote_threshold: int
    freeze_duration_ms: int


@dataclass(frozen=True)
class InspectionFinding:
    seq: int
    rule_id: str
    description: str
    severity: str = "halt"


_EXECUTION_ACTIONS = {"PullData", "EncryptData", "SplitUpload", "KeyDistribute"}


def inspect(chain: Chain | list[LogEntry],
            will_params: dict[str, WillRuleParams]) -> list[InspectionFinding]:
    """Replay a verified chain against the expected lifecycle rules.

    R1: Activate needs enough distinct votes or an authority override.
    R2: Activate must come after the freeze window opened by FreezeStart,
        unless overridden.
    R3: execution actions only after Activate.
    R4: a veto inside the freeze window forbids Activate.
    """
    entries = chain.entries if isinstance(chain, Chain) else chain
    if verify_chain(entries) is not None:
        raise ChainCorrupt("inspect requires an intact chain")
    findings: list[InspectionFinding] = []
    voters: dict[str, set[str]] = {}
    freeze_at: dict[str, int] = {}
    vetoed: dict[str, bool] = {}
    overridden: dict[str, bool] = {}
    activated: dict[str, bool] = {}

    for e in entries:
        wid = e.subject
        if e.action == "VoteCast":
            voters.setdefault(wid, set()).add(e.actor)
        elif e.action == "FreezeStart":
            freeze_at[wid] = e.timestamp_ms
            vetoed[wid] = False
        elif e.action == "Veto":
            vetoed[wid] = True
        elif e.action == "AuthorityOverride":
            overridden[wid] = True
        elif e.action == "Activate":
            params = will_params.get(wid)
            override = overridden.get(wid, False)
            if params is not None and not override:
                if len(voters.get(wid, ())) < params.vote_threshold:
                    findings.append(InspectionFinding(
                        e.seq, "R1",
                        f"activation of {wid} with "
                        f"{len(voters.get(wid, ()))} votes, "
                        f"threshold {params.vote_threshold}, no override"))
                if wid not in freeze_at:
                    findings.append(InspectionFinding(
                        e.seq, "R2",
                        f"activation of {wid} without a freeze window"))
                elif e.timestamp_ms < freeze_at[wid] + params.freeze_duration_ms:
                    findings.append(InspectionFinding(
                        e.seq, "R2",
                        f"activation of {wid} before the freeze window elapsed"))
            if vetoed.get(wid):
                findings.append(InspectionFinding(
                    e.seq, "R4",
                    f"activation of {wid} despite a veto in the freeze window"))
            activated[wid] = True
        elif e.action in _EXECUTION_ACTIONS:
            if not activated.get(wid):
                findings.append(InspectionFinding(
                    e.seq, "R3",
                    f"{e.action} for {wid} before activation"))
    return findings
