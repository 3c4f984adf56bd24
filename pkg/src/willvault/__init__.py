"""willvault: posthumous data escrow toolkit.

Multi-file attribute-based encryption with partial decryption over a shared
access DAG, a single-message baseline scheme for comparison, Shamir sharding
across simulated storage providers, a portable XML will format, an append-only
audited action ledger, and the broker lifecycle tying them together.
"""

from willvault import (  # noqa: F401
    bsw07,
    keyvault,
    ledger,
    pdcpabe,
    policy,
    sharding,
    willfile,
)

__version__ = "0.1.0"

__all__ = [
    "policy",
    "pdcpabe",
    "bsw07",
    "sharding",
    "willfile",
    "ledger",
    "keyvault",
    "__version__",
]
