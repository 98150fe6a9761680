"""
Exact int64 keys for integer vectors

A vector v with |v_i| <= bound is packed as sum_i (v_i + bound) * base**i with
base = 2*bound + 1. Packing is injective, and the key of -v is 2*centre - key(v).
"""
import numpy as np

from ..exceptions import ToralValidationError

_KEY_LIMIT = 1 << 62


class KeyPacker:
    """Packs integer d-vectors with coordinates in [-bound, bound]"""

    def __init__(self, bound: int, d: int):
        self.bound = int(max(bound, 1))
        self.d = int(d)
        self.base = 2 * self.bound + 1
        if self.base ** self.d >= _KEY_LIMIT:
            raise ToralValidationError(
                f"key range exceeded: coordinates up to {self.bound} in dimension {self.d} do not fit an int64 key"
            )
        self._weights = np.array([self.base ** i for i in range(self.d)], dtype=np.int64)
        self.centre = int(self.bound * int(self._weights.sum()))

    def pack(self, vectors: np.ndarray) -> np.ndarray:
        """Pack an (m, d) integer array into m keys"""
        vectors = np.asarray(vectors, dtype=np.int64)
        if vectors.size and int(np.abs(vectors).max()) > self.bound:
            raise ToralValidationError("key range exceeded: coordinate outside packing bound")
        return (vectors + self.bound) @ self._weights

    def negate(self, keys: np.ndarray) -> np.ndarray:
        """Keys of the negated vectors"""
        return np.int64(2 * self.centre) - np.asarray(keys, dtype=np.int64)


def fold_sums(points: np.ndarray, h: int) -> np.ndarray:
    """
    All ordered h-fold sums of rows of points

    Row t of the result is the sum for the tuple whose indices are the
    base-N digits of t, most significant first.

    Args:
        points: (N, d) integer array
        h: Tuple length, h >= 0

    Returns:
        (N**h, d) int64 array
    """
    points = np.asarray(points, dtype=np.int64)
    d = points.shape[1]
    sums = np.zeros((1, d), dtype=np.int64)
    for _ in range(h):
        sums = (sums[:, None, :] + points[None, :, :]).reshape(-1, d)
    return sums
