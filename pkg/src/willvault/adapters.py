"""Mock platform adapters that stand in for real service-provider APIs.

Each adapter serves JSON documents from a committed synthetic fixture
(social feed, mailbox, file drive).  Output is deterministic: the same
fixture and selectors always produce the same bytes.
"""

from __future__ import annotations

import fnmatch
import json
from importlib import resources


class AdapterFailure(RuntimeError):
    """Platform could not be reached or refused the token."""


BUILTIN_FIXTURES = ("social", "email", "cloudfile")


def _load_builtin(name: str) -> dict:
    ref = resources.files("willvault") / "fixtures" / f"{name}.json"
    return json.loads(ref.read_text())


class FixtureAdapter:
    """Adapter fed from a fixture document: {"assets": [{selector, content}]}."""

    def __init__(self, platform_id: str, fixture: dict | str):
        self.platform_id = platform_id
        if isinstance(fixture, str):
            fixture = _load_builtin(fixture)
        self._assets = fixture["assets"]
        self.unavailable = False

    def asset_selectors(self) -> list[str]:
        return [a["selector"] for a in self._assets]

    def fetch(self, selectors) -> list[tuple[str, bytes]]:
        """Assets whose selector matches any requested pattern, as JSON bytes."""
        if self.unavailable:
            raise AdapterFailure(f"platform {self.platform_id} unreachable")
        out = []
        for asset in self._assets:
            sel = asset["selector"]
            if any(fnmatch.fnmatchcase(sel, pat) for pat in selectors):
                blob = json.dumps(asset["content"], sort_keys=True,
                                  separators=(",", ":")).encode("utf-8")
                out.append((sel, blob))
        return out


def builtin_adapter(platform_id: str, kind: str) -> FixtureAdapter:
    if kind not in BUILTIN_FIXTURES:
        raise ValueError(f"unknown fixture kind {kind!r}")
    return FixtureAdapter(platform_id, kind)
