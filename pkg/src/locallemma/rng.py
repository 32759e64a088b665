"""Deterministic seed derivation.

All randomness in the package flows from one root seed through labeled
derivations, so every experiment is replayable from its report.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(root: int, *labels) -> int:
    material = repr((int(root),) + tuple(str(x) for x in labels)).encode()
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")


def derived_rng(root: int, *labels) -> random.Random:
    return random.Random(derive_seed(root, *labels))
