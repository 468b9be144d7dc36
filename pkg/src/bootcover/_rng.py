"""Random streams.

Every random draw in the package goes through a ``numpy.random.Generator``.
Experiment streams are keyed by ``(master_seed, trial, purpose)`` through
``SeedSequence.spawn_key`` so that each trial, and each resampling method
within it, owns an independent stream that does not depend on execution
order or on which other methods were requested.
"""
import numpy as np

#: purpose tags for :func:`child_stream`
SAMPLE = 0
STANDARD = 1
BAYESIAN = 2

_TWO_M52 = 2.0 ** -52


def as_generator(stream):
    """Coerce ``None``, an int seed, or a Generator into a Generator."""
    if isinstance(stream, np.random.Generator):
        return stream
    return np.random.default_rng(stream)


def child_stream(master_seed, *key):
    if master_seed < 0:
        raise ValueError(f"master_seed must be nonnegative, got {master_seed}")
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))


def raw_to_open_uniform(raw):
    """Map raw uint64 words onto (k + 1/2) / 2**52, k the top 52 bits."""
    return ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * _TWO_M52


def open_uniform(stream, size):
    """Uniform variates on the open interval (0, 1); never exactly 0 or 1."""
    # random_raw takes the bit generator's lock itself
    return raw_to_open_uniform(as_generator(stream).bit_generator.random_raw(size))
