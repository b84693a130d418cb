"""Counter-based seed splitting.

Every random decision draws from a stream keyed by ``(seed, purpose, counters...)``,
so adding a new consumer never shifts the numbers seen by existing ones.
"""

import hashlib
import random


def derive_seed(seed: int, *labels) -> int:
    key = repr((int(seed),) + tuple(labels)).encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def substream(seed: int, *labels) -> random.Random:
    return random.Random(derive_seed(seed, *labels))
