import hashlib

import numpy as np


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary hashable parts.

    Uses the ``repr`` of each part, so ``0.1`` and ``"0.1"`` differ. Python's
    builtin ``hash`` is salted per process and cannot be used here.
    """
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        h.update(repr(p).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


def rng_for(*parts) -> np.random.Generator:
    return np.random.default_rng(derive_seed(*parts))
