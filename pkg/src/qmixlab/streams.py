"""Counter-based random streams.

Every Monte Carlo sample batch ("block") draws from its own Philox stream,
keyed by the user seed with the block index placed in the high word of the
256-bit counter.  Block b therefore yields the same numbers no matter which
worker computes it or in what order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK_SIZE = 4096


def block_rng(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    """Generator for (seed, stream, block).  `stream` separates independent
    uses of the same seed (e.g. two samplers in one check)."""
    if seed < 0 or block < 0 or stream < 0:
        raise ValueError("seed, block and stream must be nonnegative")
    counter = (int(stream) << 224) | (int(block) << 192)
    return np.random.Generator(np.random.Philox(key=int(seed) & ((1 << 128) - 1), counter=counter))


def block_sizes(n: int, block_size: int = BLOCK_SIZE):
    full, rem = divmod(n, block_size)
    sizes = [block_size] * full
    if rem:
        sizes.append(rem)
    return sizes


def map_blocks(fn, n, jobs=1, block_size=BLOCK_SIZE):
    """Evaluate fn(block_index, size) for each block and return the results
    in block order.  The result never depends on `jobs`."""
    sizes = block_sizes(n, block_size)
    args = list(enumerate(sizes))
    if jobs <= 1 or len(args) <= 1:
        return [fn(b, s) for b, s in args]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda a: fn(*a), args))
