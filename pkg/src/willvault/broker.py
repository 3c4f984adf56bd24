"""Digital-will broker: lifecycle state machine and execution pipeline.

Deploy/update/delete, heir voting with a freeze window and creator veto,
authority override, and the four-step execution (pull, encrypt, split and
upload, distribute keys) followed by threshold retrieval.  Every externally
visible operation lands in the hash-chained ledger; a simulated clock is
injected so freeze periods are deterministic under test.
"""

from __future__ import annotations

import enum
import json
import random
import time
from dataclasses import dataclass, field

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from willvault import keyvault, pdcpabe, sharding, willfile
from willvault.adapters import AdapterFailure, FixtureAdapter
from willvault.ledger import Chain, WillRuleParams
from willvault.pairing.group import default_group
from willvault.pdcpabe import Ciphertext, DecryptionReport, UserKey
from willvault.sharding import ShareManifest, ThresholdNotMet
from willvault.storage import StorageProvider, StorageUnavailable
from willvault.willfile import DigitalWill

__all__ = [
    "WillState", "WillRecord", "Broker", "SimClock", "ExecutionReport",
    "ValidationError", "UnknownWill", "IllegalState", "NotAnHeir",
    "FreezeExpired", "AuthError", "BadAttestation", "StorageFailure",
    "generate_authority_keys", "sign_override",
]


class ValidationError(ValueError):
    pass


class UnknownWill(KeyError):
    pass


class IllegalState(RuntimeError):
    pass


class NotAnHeir(PermissionError):
    pass


class FreezeExpired(RuntimeError):
    pass


class AuthError(PermissionError):
    pass


class BadAttestation(ValueError):
    pass


class StorageFailure(RuntimeError):
    pass


class WillState(enum.Enum):
    DEPLOYED = "Deployed"
    VOTING_OPEN = "VotingOpen"
    FROZEN = "Frozen"
    ACTIVATED = "Activated"
    EXECUTED = "Executed"
    CANCELLED = "Cancelled"


class SimClock:
    """Injected time source; the broker never reads the wall clock."""

    def __init__(self, start_ms: int = 0):
        self._now = start_ms

    def now_ms(self) -> int:
        return self._now

    def advance(self, ms: int) -> int:
        self._now += ms
        return self._now

    def set(self, now_ms: int) -> None:
        if now_ms < self._now:
            raise ValueError("clock cannot run backwards")
        self._now = now_ms


@dataclass
class WillRecord:
    will: DigitalWill
    state: WillState
    version: int = 1
    votes: set[str] = field(default_factory=set)
    freeze_deadline_ms: int | None = None
    key_envelopes: dict[str, bytes] = field(default_factory=dict)
    manifest: ShareManifest = field(default_factory=ShareManifest)
    platform_files: dict[str, str] = field(default_factory=dict)  # platform -> file id
    share_threshold: int | None = None


@dataclass
class ExecutionReport:
    will_id: str
    platforms_pulled: int = 0
    assets_pulled: int = 0
    ciphertexts: int = 0
    shares_placed: int = 0
    keys_distributed: int = 0
    step_timings_ms: dict[str, float] = field(default_factory=dict)
    manifest: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({
            "will_id": self.will_id,
            "counts": {
                "platforms_pulled": self.platforms_pulled,
                "assets_pulled": self.assets_pulled,
                "ciphertexts": self.ciphertexts,
                "shares_placed": self.shares_placed,
                "keys_distributed": self.keys_distributed,
            },
            "timings_ms": self.step_timings_ms,
            "manifest": self.manifest,
            "warnings": self.warnings,
        }, indent=2, sort_keys=True)


def generate_authority_keys() -> tuple[Ed25519PrivateKey, bytes]:
    sk = Ed25519PrivateKey.generate()
    return sk, sk.public_key().public_bytes_raw()


def sign_override(authority_sk: Ed25519PrivateKey, will_id: str) -> bytes:
    return authority_sk.sign(will_id.encode("utf-8") + b"OVERRIDE")


class Broker:
    """One broker instance: single writer per will, one shared ledger."""

    def __init__(self, providers: list[StorageProvider],
                 adapters: dict[str, FixtureAdapter] | None = None,
                 authority_public_key: bytes | None = None,
                 clock: SimClock | None = None,
                 group=None,
                 rng: random.Random | None = None):
        self.providers = list(providers)
        self.adapters = dict(adapters or {})
        self.clock = clock or SimClock()
        self.group = group or default_group()
        self.rng = rng
        self.chain = Chain()
        self.wills: dict[str, WillRecord] = {}
        self.authority_public_key = authority_public_key
        self.pp, self.mk = pdcpabe.setup(128, rng=rng, group=self.group)

    # -- helpers ---------------------------------------------------------------

    def _log(self, actor: str, action: str, subject: str, payload=None):
        return self.chain.append(actor, action, subject, payload,
                                 timestamp_ms=self.clock.now_ms())

    def _record(self, will_id: str) -> WillRecord:
        try:
            return self.wills[will_id]
        except KeyError:
            raise UnknownWill(will_id) from None

    def _heir(self, record: WillRecord, heir_id: str) -> willfile.Heir:
        for heir in record.will.heirs:
            if heir.heir_id == heir_id:
                return heir
        raise NotAnHeir(f"{heir_id} is not an heir of {record.will.will_id}")

    def inspection_params(self) -> dict[str, WillRuleParams]:
        return {
            wid: WillRuleParams(
                vote_threshold=rec.will.trigger.vote_threshold,
                freeze_duration_ms=rec.will.trigger.freeze_duration_s * 1000)
            for wid, rec in self.wills.items()
        }

    # -- lifecycle ---------------------------------------------------------------

    def deploy(self, will: DigitalWill | bytes) -> str:
        if isinstance(will, (bytes, bytearray)):
            will = willfile.parse_xml(bytes(will))
        try:
            willfile.validate(will)
        except willfile.InvariantViolation as exc:
            raise ValidationError(str(exc)) from exc
        if will.will_id in self.wills:
            raise ValidationError(f"will {will.will_id} already deployed")
        self.wills[will.will_id] = WillRecord(will=will, state=WillState.DEPLOYED)
        self._log("broker", "DeployWill", will.will_id,
                  payload=willfile.serialize_xml(will))
        return will.will_id

    def update_will(self, will_id: str, new_will: DigitalWill) -> int:
        record = self._record(will_id)
        if record.state is not WillState.DEPLOYED:
            raise IllegalState(f"cannot update a will in {record.state.value}")
        if new_will.will_id != will_id:
            raise ValidationError("updated will must keep its id")
        try:
            willfile.validate(new_will)
        except willfile.InvariantViolation as exc:
            raise ValidationError(str(exc)) from exc
        record.will = new_will
        record.version += 1
        self._log("broker", "UpdateWill", will_id,
                  payload=willfile.serialize_xml(new_will))
        return record.version

    def delete_will(self, will_id: str) -> WillState:
        record = self._record(will_id)
        if record.state is not WillState.DEPLOYED:
            raise IllegalState(f"cannot delete a will in {record.state.value}")
        record.state = WillState.CANCELLED
        self._log("broker", "DeleteWill", will_id)
        return record.state

    def request_trigger(self, will_id: str, heir_id: str) -> WillState:
        record = self._record(will_id)
        self._heir(record, heir_id)
        if record.state not in (WillState.DEPLOYED, WillState.VOTING_OPEN):
            raise IllegalState(f"cannot trigger a will in {record.state.value}")
        self._log(heir_id, "TriggerRequest", will_id)
        if record.state is WillState.DEPLOYED:
            record.state = WillState.VOTING_OPEN
        return record.state

    def vote(self, will_id: str, heir_id: str) -> WillState:
        record = self._record(will_id)
        self._heir(record, heir_id)
        if record.state is WillState.DEPLOYED:
            self.request_trigger(will_id, heir_id)
        elif record.state is not WillState.VOTING_OPEN:
            raise IllegalState(f"cannot vote on a will in {record.state.value}")
        duplicate = heir_id in record.votes
        record.votes.add(heir_id)
        self._log(heir_id, "VoteCast", will_id,
                  payload={"duplicate": duplicate, "counted": not duplicate})
        threshold = record.will.trigger.vote_threshold
        if not duplicate and len(record.votes) >= threshold:
            record.state = WillState.FROZEN
            record.freeze_deadline_ms = (
                self.clock.now_ms()
                + record.will.trigger.freeze_duration_s * 1000)
            self._log("broker", "FreezeStart", will_id,
                      payload={"deadline_ms": record.freeze_deadline_ms})
        return record.state

    def veto(self, will_id: str, creator_credential: str) -> WillState:
        record = self._record(will_id)
        if record.state is not WillState.FROZEN:
            raise IllegalState(f"cannot veto a will in {record.state.value}")
        if creator_credential != record.will.creator_id:
            raise AuthError("veto requires the creator's credential")
        if self.clock.now_ms() >= record.freeze_deadline_ms:
            raise FreezeExpired("freeze window already elapsed")
        record.state = WillState.CANCELLED
        self._log(record.will.creator_id, "Veto", will_id)
        return record.state

    def authority_override(self, will_id: str, attestation: bytes) -> WillState:
        record = self._record(will_id)
        if record.state is not WillState.VOTING_OPEN:
            raise IllegalState(
                f"override only applies while voting is open, not "
                f"{record.state.value}")
        if not record.will.trigger.authority_override_allowed:
            raise IllegalState("this will forbids authority override")
        if self.authority_public_key is None:
            raise BadAttestation("no authority key configured")
        try:
            Ed25519PublicKey.from_public_bytes(
                self.authority_public_key).verify(
                attestation, will_id.encode("utf-8") + b"OVERRIDE")
        except (InvalidSignature, ValueError) as exc:
            raise BadAttestation("attestation does not verify") from exc
        self._log("authority", "AuthorityOverride", will_id)
        record.state = WillState.ACTIVATED
        self._log("broker", "Activate", will_id, payload={"via": "override"})
        return record.state

    def tick(self, now_ms: int | None = None) -> list[tuple[str, WillState]]:
        if now_ms is not None:
            self.clock.set(now_ms)
        changes = []
        for wid, record in self.wills.items():
            if (record.state is WillState.FROZEN
                    and self.clock.now_ms() >= record.freeze_deadline_ms):
                record.state = WillState.ACTIVATED
                self._log("broker", "Activate", wid,
                          payload={"via": "freeze-expiry"})
                changes.append((wid, record.state))
        return changes

    # -- execution pipeline -----------------------------------------------------

    def _policy_for(self, will: DigitalWill, selector: str) -> str | None:
        import fnmatch
        for cp in will.content_policies:
            if fnmatch.fnmatchcase(selector, cp.selector):
                return cp.expression
        return None

    def _locations(self, will: DigitalWill) -> list[StorageProvider]:
        if will.storage.location_ids:
            by_id = {p.location_id: p for p in self.providers}
            return [by_id[loc] for loc in will.storage.location_ids
                    if loc in by_id]
        return list(self.providers)

    def execute(self, will_id: str) -> ExecutionReport:
        record = self._record(will_id)
        if record.state is not WillState.ACTIVATED:
            raise IllegalState(f"cannot execute a will in {record.state.value}")
        will = record.will
        report = ExecutionReport(will_id=will_id)

        locations = self._locations(will)
        n = len(locations)
        if n < 2:
            raise StorageFailure(f"need at least 2 storage locations, have {n}")
        threshold = will.storage.share_threshold or sharding.default_threshold(n)
        record.share_threshold = threshold

        # 1. pull
        t0 = time.perf_counter()
        pulled: dict[str, list[tuple[str, bytes]]] = {}
        for link in will.platform_links:
            adapter = self.adapters.get(link.platform_id)
            if adapter is None:
                report.warnings.append(
                    f"no adapter for platform {link.platform_id}; skipped")
                self._log("broker", "PullData", will_id,
                          payload={"platform": link.platform_id,
                                   "status": "no-adapter"})
                continue
            try:
                assets = adapter.fetch(link.asset_selectors)
            except AdapterFailure as exc:
                report.warnings.append(
                    f"platform {link.platform_id} failed: {exc}")
                self._log("broker", "PullData", will_id,
                          payload={"platform": link.platform_id,
                                   "status": "failed", "error": str(exc)})
                continue
            pulled[link.platform_id] = assets
            report.platforms_pulled += 1
            report.assets_pulled += len(assets)
            self._log("broker", "PullData", will_id,
                      payload={"platform": link.platform_id,
                               "assets": [s for s, _ in assets]})
        report.step_timings_ms["pull"] = (time.perf_counter() - t0) * 1000

        # 2. encrypt: one ciphertext per platform over all its assets
        t0 = time.perf_counter()
        ciphertexts: dict[str, bytes] = {}
        for platform_id, assets in pulled.items():
            items = []
            for selector, blob in assets:
                expr = self._policy_for(will, selector)
                if expr is None:
                    report.warnings.append(
                        f"asset {selector} matches no content policy; skipped")
                    continue
                items.append((selector, blob, expr))
            if not items:
                report.warnings.append(
                    f"platform {platform_id} produced no policy-covered assets")
                continue
            ct = pdcpabe.encrypt(self.pp, items, rng=self.rng)
            blob = ct.to_bytes(self.group)
            ciphertexts[platform_id] = blob
            report.ciphertexts += 1
            self._log("broker", "EncryptData", will_id,
                      payload={"platform": platform_id, "bytes": len(blob),
                               "payloads": len(items)})
        report.step_timings_ms["encrypt"] = (time.perf_counter() - t0) * 1000

        # 3. split and upload
        t0 = time.perf_counter()
        for platform_id, blob in ciphertexts.items():
            file_id = f"{will_id}.{platform_id}"
            shares = sharding.split(blob, n, threshold, rng=self.rng,
                                    file_id=file_id)
            placements = []
            failures = []
            spare = [p for p in locations]
            for share, primary in zip(shares, locations):
                target_order = [primary] + [p for p in spare if p is not primary]
                placed = False
                for provider in target_order:
                    if provider is not primary and provider.holds(file_id):
                        continue
                    try:
                        provider.put(file_id, share.share_id, share.to_bytes())
                    except StorageUnavailable as exc:
                        if provider is primary:
                            failures.append(
                                f"{provider.location_id}: {exc}")
                        continue
                    record.manifest.record(file_id, share.share_id,
                                           provider.location_id)
                    placements.append((share.share_id, provider.location_id))
                    placed = True
                    if provider is not primary:
                        report.warnings.append(
                            f"share {share.share_id} of {file_id} diverted "
                            f"from {primary.location_id} to "
                            f"{provider.location_id}")
                    break
                if not placed:
                    report.warnings.append(
                        f"share {share.share_id} of {file_id} could not be "
                        f"placed anywhere")
            distinct = {loc for _, loc in placements}
            if len(distinct) < threshold:
                raise StorageFailure(
                    f"only {len(distinct)} providers hold {file_id}, "
                    f"threshold is {threshold}")
            record.platform_files[platform_id] = file_id
            report.shares_placed += len(placements)
            self._log("broker", "SplitUpload", will_id,
                      payload={"file_id": file_id, "threshold": threshold,
                               "placements": placements,
                               "failures": failures})
        report.step_timings_ms["split_upload"] = (time.perf_counter() - t0) * 1000

        # 4. key generation and distribution
        t0 = time.perf_counter()
        for heir in will.heirs:
            if not heir.attributes:
                report.warnings.append(
                    f"heir {heir.heir_id} has no granted attributes; no key")
                continue
            if not heir.public_key:
                report.warnings.append(
                    f"heir {heir.heir_id} has no public key on file; no key")
                continue
            user_key = pdcpabe.keygen(self.mk, self.pp, set(heir.attributes),
                                      rng=self.rng)
            envelope = keyvault.envelope_encrypt(
                bytes.fromhex(heir.public_key),
                user_key.to_bytes(self.group))
            record.key_envelopes[heir.heir_id] = envelope.to_bytes()
            report.keys_distributed += 1
            self._log("broker", "KeyDistribute", will_id,
                      payload={"heir": heir.heir_id,
                               "attributes": sorted(heir.attributes)})
        report.step_timings_ms["key_distribute"] = (time.perf_counter() - t0) * 1000

        record.state = WillState.EXECUTED
        report.manifest = record.manifest.to_json()
        return report

    # -- retrieval ---------------------------------------------------------------

    def retrieve(self, will_id: str, heir_id: str,
                 heir_sk: int) -> dict[str, DecryptionReport]:
        record = self._record(will_id)
        if record.state is not WillState.EXECUTED:
            raise IllegalState(f"cannot retrieve from a will in "
                               f"{record.state.value}")
        try:
            self._heir(record, heir_id)
        except NotAnHeir as exc:
            raise AuthError(str(exc)) from exc
        env_blob = record.key_envelopes.get(heir_id)
        if env_blob is None:
            raise AuthError(f"no key was distributed to {heir_id}")
        try:
            key_bytes = keyvault.envelope_decrypt(
                heir_sk, keyvault.Envelope.from_bytes(env_blob))
        except keyvault.AuthFailure as exc:
            raise AuthError("heir key does not open the envelope") from exc
        user_key = UserKey.from_bytes(key_bytes, self.group)

        by_id = {p.location_id: p for p in self.providers}
        threshold = record.share_threshold
        results: dict[str, DecryptionReport] = {}
        if not record.platform_files:
            self._log("broker", "RetrieveShares", will_id,
                      payload={"heir": heir_id, "files": 0})
        for platform_id, file_id in record.platform_files.items():
            placements = sorted(record.manifest.placements(file_id))
            shares: list[sharding.Share] = []
            requests = 0
            queue = iter(placements)
            # ask exactly the threshold number of providers first;
            # extend to further placements only when a request fails
            while len(shares) < threshold:
                try:
                    share_id, loc = next(queue)
                except StopIteration:
                    break
                provider = by_id.get(loc)
                if provider is None:
                    continue
                requests += 1
                try:
                    blob = provider.get(file_id, share_id)
                except StorageUnavailable:
                    continue
                try:
                    shares.append(sharding.Share.from_bytes(blob))
                except ValueError:
                    continue
            self._log("broker", "RetrieveShares", will_id,
                      payload={"heir": heir_id, "file_id": file_id,
                               "requests": requests,
                               "shares": len(shares)})
            if len(shares) < threshold:
                raise ThresholdNotMet(
                    f"only {len(shares)} shares of {file_id} retrievable")
            ct_blob = sharding.combine(shares)
            ct = Ciphertext.from_bytes(ct_blob, self.group)
            results[platform_id] = pdcpabe.decrypt(self.pp, user_key, ct)
        return results

    # -- portability ---------------------------------------------------------------

    def export_state(self) -> dict:
        """Initialization parameters a successor broker needs to take over."""
        return {
            "public_params": self.pp.to_bytes().hex(),
            "master_key": self.mk.to_bytes(self.group).hex(),
            "manifests": {wid: rec.manifest.to_json()
                          for wid, rec in self.wills.items()},
            "chain": [(e.seq, e.action, e.subject, e.entry_hash.hex())
                      for e in self.chain.entries],
        }
