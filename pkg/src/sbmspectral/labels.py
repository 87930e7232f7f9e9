"""Two-community +/-1 labelings."""

import numpy as np

from .errors import ParameterError


class Labeling:
    """Vector of +1/-1 community signs (read-only)."""

    __slots__ = ("signs",)

    def __init__(self, signs):
        s = np.array(signs, dtype=np.int8).ravel()
        if s.size and not np.all((s == 1) | (s == -1)):
            raise ParameterError("labeling entries must be +1 or -1")
        s.setflags(write=False)
        self.signs = s

    @classmethod
    def ground_truth(cls, n):
        """+1 for the first n/2 vertices, -1 for the rest."""
        if n % 2:
            raise ParameterError("n must be even")
        return cls(np.repeat(np.array([1, -1], dtype=np.int8), n // 2))

    @classmethod
    def from_vector(cls, u, zero_tol=0.0):
        """Sign rounding; entries with |u_i| < zero_tol (or exactly 0) become +1.

        Returns ``(labeling, zero_count)``.
        """
        u = np.asarray(u, dtype=np.float64)
        zero = (np.abs(u) < zero_tol) | (u == 0)
        signs = np.where(u < 0, -1, 1).astype(np.int8)
        signs[zero] = 1
        return cls(signs), int(zero.sum())

    def __len__(self):
        return self.signs.size

    def __neg__(self):
        return Labeling(-self.signs)

    def __eq__(self, other):
        return isinstance(other, Labeling) and np.array_equal(self.signs, other.signs)

    __hash__ = None

    def __repr__(self):
        return f"Labeling(n={len(self)})"

    def tolist(self):
        return [int(v) for v in self.signs]
