"""Deterministic random-stream derivation.

All randomness in the package flows from a single integer seed.  Sub-streams
are derived by hashing (seed, *tags) into a Philox key, so the stream a
component sees depends only on the seed and the component's tag tuple, never
on execution order.  Batch generation is chunked; each chunk owns the stream
(seed, *tags, chunk_index), which makes results independent of how chunks
would be scheduled across workers.
"""

import hashlib

import numpy as np

CHUNK = 1 << 15


def derive_seed(seed, *tags):
    """Stable 63-bit sub-seed from (seed, *tags)."""
    digest = _digest(seed, *tags)
    return int.from_bytes(digest[:8], "little") >> 1


def substream(seed, *tags):
    """Generator whose Philox key is derived from (seed, *tags)."""
    digest = _digest(seed, *tags)
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))


def chunk_streams(seed, tags, n):
    """Yield (start, stop, Generator) triples covering range(n) in fixed chunks."""
    start = 0
    idx = 0
    while start < n:
        stop = min(start + CHUNK, n)
        yield start, stop, substream(seed, *tags, idx)
        start = stop
        idx += 1


def _digest(seed, *tags):
    parts = [repr(int(seed))]
    for tag in tags:
        parts.append(repr(tag))
    return hashlib.sha256("|".join(parts).encode()).digest()
