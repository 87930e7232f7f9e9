"""Reproducible random streams.

Two primitives:

* :func:`uniform_stream` -- a counter-based Philox4x64-10 generator
  (``numpy.random.Philox``) keyed by a 64-bit seed, counter starting at 0.
  Each raw 64-bit word becomes a double in [0, 1) from its top 53 bits,
  ``(w >> 11) * 2**-53``.  Only the bit generator is used (never the
  ``Generator`` distribution methods), so the stream is fixed by the Philox
  definition and identical on every platform and numpy release.
* :func:`derive_seed` -- a stateless SplitMix64-based mix of a master seed
  with integer coordinates (cell indices, trial index, ...).  Seeds derived
  this way never depend on execution order.
"""

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0


def splitmix64(x):
    """SplitMix64 output function on a Python int (mod 2**64)."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master, *coords):
    """Stable 64-bit seed for ``(master, coords...)``.

    ``h = splitmix64(master)``, then for each coordinate ``c``:
    ``h = splitmix64(h ^ splitmix64(c + 1))``.
    """
    h = splitmix64(int(master) & MASK64)
    for c in coords:
        h = splitmix64(h ^ splitmix64((int(c) + 1) & MASK64))
    return h


class UniformStream:
    """Sequential view of the Philox uniform stream for one seed."""

    def __init__(self, seed):
        if not 0 <= int(seed) <= MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self._bitgen = np.random.Philox(key=int(seed))

    def raw(self, count):
        return self._bitgen.random_raw(int(count))

    def uniform(self, count):
        return (self.raw(count) >> np.uint64(11)).astype(np.float64) * _INV_2_53

    def normal(self, count):
        """Standard normals by Box-Muller on consecutive uniform pairs."""
        m = (int(count) + 1) // 2
        u = self.uniform(2 * m)
        r = np.sqrt(-2.0 * np.log1p(-u[:m]))
        theta = 2.0 * np.pi * u[m:]
        return np.concatenate([r * np.cos(theta), r * np.sin(theta)])[: int(count)]

    def choice(self, n, size):
        """``size`` distinct integers from ``range(n)`` (partial Fisher-Yates)."""
        if size > n:
            raise ValueError("cannot choose more items than available")
        pool = np.arange(n)
        u = self.uniform(size)
        for i in range(size):
            j = i + int(u[i] * (n - i))
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:size].copy()


def uniform_stream(seed):
    return UniformStream(seed)
