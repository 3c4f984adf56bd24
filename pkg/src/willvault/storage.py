"""Simulated storage providers for share placement.

Providers count every request they receive (the retrieval-economy tests
rely on this) and can be faulted: unavailable providers raise, corrupting
providers serve flipped bytes, slow ones just record the configured delay.
"""

from __future__ import annotations

from pathlib import Path


class StorageUnavailable(RuntimeError):
    """Provider is down or the requested share is missing."""


class StorageProvider:
    """In-memory provider; subclasses may override the blob store."""

    def __init__(self, location_id: str):
        self.location_id = location_id
        self.unavailable = False
        self.corrupting = False
        self.slow_ms = 0
        self.get_requests = 0
        self.put_requests = 0
        self._blobs: dict[tuple[str, int], bytes] = {}

    def set_fault(self, unavailable: bool = False, corrupting: bool = False,
                  slow_ms: int = 0) -> None:
        self.unavailable = unavailable
        self.corrupting = corrupting
        self.slow_ms = slow_ms

    def reset_counters(self) -> None:
        self.get_requests = 0
        self.put_requests = 0

    def put(self, file_id: str, share_id: int, blob: bytes) -> None:
        self.put_requests += 1
        if self.unavailable:
            raise StorageUnavailable(f"{self.location_id} is unavailable")
        self._store(file_id, share_id, blob)

    def get(self, file_id: str, share_id: int) -> bytes:
        self.get_requests += 1
        if self.unavailable:
            raise StorageUnavailable(f"{self.location_id} is unavailable")
        blob = self._load(file_id, share_id)
        if blob is None:
            raise StorageUnavailable(
                f"{self.location_id} has no share {share_id} of {file_id}")
        if self.corrupting:
            blob = blob[:-1] + bytes([blob[-1] ^ 0xFF]) if blob else blob
        return blob

    def list_shares(self) -> list[tuple[str, int]]:
        return sorted(self._blobs)

    def holds(self, file_id: str) -> bool:
        return any(fid == file_id for fid, _ in self.list_shares())

    # -- storage backend ------------------------------------------------------

    def _store(self, file_id: str, share_id: int, blob: bytes) -> None:
        self._blobs[(file_id, share_id)] = blob

    def _load(self, file_id: str, share_id: int) -> bytes | None:
        return self._blobs.get((file_id, share_id))


class DirectoryStorageProvider(StorageProvider):
    """On-disk provider: one directory per location, one file per share."""

    def __init__(self, root: Path | str, location_id: str):
        super().__init__(location_id)
        self.root = Path(root) / location_id
        self.root.mkdir(parents=True, exist_ok=True)

    def _share_path(self, file_id: str, share_id: int) -> Path:
        return self.root / f"{file_id}.{share_id}.share"

    def _store(self, file_id: str, share_id: int, blob: bytes) -> None:
        self._share_path(file_id, share_id).write_bytes(blob)

    def _load(self, file_id: str, share_id: int) -> bytes | None:
        path = self._share_path(file_id, share_id)
        return path.read_bytes() if path.exists() else None

    def list_shares(self) -> list[tuple[str, int]]:
        out = []
        for p in self.root.glob("*.share"):
            stem = p.name[:-len(".share")]
            file_id, _, share_id = stem.rpartition(".")
            out.append((file_id, int(share_id)))
        return sorted(out)
