"""
Counter-based uniforms

Every value is a pure function of (seed, stream, index): the Philox key is
seed + (stream << 64) and the counter is the index, so any index range can
be produced by any worker and the concatenation is identical to a serial run.
"""
from enum import IntEnum

import numpy as np

_MASK64 = (1 << 64) - 1
_WORDS_PER_COUNTER = 4


class Stream(IntEnum):
    """Independent substreams drawn from one seed"""
    SAMPLES = 0
    SIGNS = 1
    CAP_CENTRES = 2


def uniform_block(seed: int, stream: int, start: int, stop: int, width: int = _WORDS_PER_COUNTER) -> np.ndarray:
    """
    Uniforms in [0, 1) for indices start..stop-1

    Args:
        seed: 64-bit seed
        stream: Substream id
        start: First index (inclusive)
        stop: Last index (exclusive)
        width: Values per index, at most 4

    Returns:
        Array of shape (stop - start, width) with 53-bit resolution
    """
    if not 1 <= width <= _WORDS_PER_COUNTER:
        raise ValueError(f"width must be between 1 and {_WORDS_PER_COUNTER}")
    count = max(0, stop - start)
    if count == 0:
        return np.empty((0, width), dtype=np.float64)
    key = (int(seed) & _MASK64) + (int(stream) << 64)
    bit_generator = np.random.Philox(key=key, counter=int(start))
    raw = bit_generator.random_raw(count * _WORDS_PER_COUNTER).reshape(count, _WORDS_PER_COUNTER)
    raw = raw[:, :width]
    return (raw >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)
