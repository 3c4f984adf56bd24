"""Pairing backends and group contexts.

The compiled backend (Cython, fixed-limb Montgomery arithmetic) is used when
available; otherwise the pure-Python implementation takes over.  Set
``WILLVAULT_PURE_PYTHON=1`` to force the pure backend.
"""

from __future__ import annotations

import os

from willvault.pairing import _backend_py

if os.environ.get("WILLVAULT_PURE_PYTHON"):
    backend = _backend_py
    BACKEND_NAME = "python"
else:
    try:
        from willvault.pairing import _backend_cy as backend  # type: ignore[no-redef]
        BACKEND_NAME = "compiled"
    except ImportError:  # pragma: no cover - build-environment dependent
        backend = _backend_py
        BACKEND_NAME = "python"

from willvault.pairing.group import (  # noqa: E402
    PairingGroup,
    UnsupportedSecurityLevel,
    default_group,
    group_for_security_level,
)
from willvault.pairing.mock import MockGroup  # noqa: E402

__all__ = [
    "backend",
    "BACKEND_NAME",
    "PairingGroup",
    "MockGroup",
    "UnsupportedSecurityLevel",
    "default_group",
    "group_for_security_level",
]
