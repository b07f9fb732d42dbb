"""Deterministic seed derivation.

Every stage (synthesis, undersampling, splitting, each training run) owns an
independent RNG stream derived from one global seed, so stages can be re-run
in isolation and results never depend on execution order.
"""

import hashlib


def derive_seed(*parts) -> int:
    """Map a key tuple (ints, strings) to a stable 63-bit seed.

    Uses SHA-256 of the string form; stable across processes and platforms,
    unlike the builtin ``hash``.
    """
    key = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1
