"""Seed derivation and PRNG construction.

All randomness in the package flows through numpy's PCG64 bit generator,
constructed from an explicit integer seed, so any run is reproducible
bit-for-bit on every platform for a given numpy version.

Sub-seeds are derived from a master seed with a fixed scheme: stream k of
master seed s is SeedSequence([s, k]).  The harness uses three streams:

    0  model parameter initialization
    1  optimizer state initialization (gravity velocity draws)
    2  mini-batch shuffling
"""

import numpy as np

STREAM_MODEL = 0
STREAM_OPTIMIZER = 1
STREAM_SHUFFLE = 2


def rng_from(seed):
    """PCG64 generator for a plain integer seed."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def derive_subseed(master_seed, stream):
    """64-bit sub-seed for one of the documented streams of a master seed."""
    ss = np.random.SeedSequence([int(master_seed), int(stream)])
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(hi) << 32 | int(lo)


def rng_for_epoch(shuffle_seed, epoch_index):
    """Generator driving the permutation of one epoch."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence([int(shuffle_seed), int(epoch_index)]))
    )
