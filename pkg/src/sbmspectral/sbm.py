"""Two-block symmetric stochastic block model.

Vertices ``0 .. n/2-1`` form community +1 and ``n/2 .. n-1`` community -1.
Within-block pairs are linked with probability ``p``, cross-block pairs with
``q``.  In the critical regime ``p = alpha*ln(n)/n`` and
``q = beta*ln(n)/n`` (natural log).

Sampling draws one uniform per unordered pair ``{i, j}``, ``i <= j``, in
row-major order over the upper triangle (diagonal included) from the Philox
stream keyed by the seed (see :mod:`sbmspectral.rng`); pair ``(i, j)`` is an
edge iff its uniform is ``< p`` (same block) or ``< q``.  The diagonal is
always drawn, then zeroed when ``self_loops`` is off, so the off-diagonal
pattern is the same under either setting.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .config import DEFAULT
from .errors import ParameterError
from .labels import Labeling
from .matrix import SymMatrix
from .rng import MASK64, uniform_stream


@dataclass(frozen=True)
class SbmParams:
    n: int
    p: float
    q: float
    self_loops: bool = True
    alpha: float = None
    beta: float = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ParameterError("n must be an integer")
        if self.n < 4 or self.n % 2:
            raise ParameterError(f"n must be even and >= 4, got {self.n}")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0) or math.isnan(v):
                raise ParameterError(f"{name}={v} is not a probability")
        if self.q > self.p:
            raise ParameterError(f"need q <= p, got p={self.p}, q={self.q}")

    @classmethod
    def critical(cls, n, alpha, beta, self_loops=True):
        """p = alpha ln(n)/n, q = beta ln(n)/n."""
        if not alpha > 0 or not beta >= 0:
            raise ParameterError("need alpha > 0 and beta >= 0")
        if n < 2:
            raise ParameterError(f"n must be even and >= 4, got {n}")
        scale = math.log(n) / n
        return cls(n, alpha * scale, beta * scale, self_loops, float(alpha), float(beta))

    @classmethod
    def direct(cls, n, p, q, self_loops=True):
        return cls(n, float(p), float(q), self_loops)

    @property
    def half(self):
        return self.n // 2

    @property
    def is_critical(self):
        return self.alpha is not None

    def to_dict(self):
        d = {"n": self.n, "p": self.p, "q": self.q, "self_loops": self.self_loops}
        if self.is_critical:
            d.update(alpha=self.alpha, beta=self.beta)
        return d


@dataclass(frozen=True, eq=False)
class SampledGraph:
    params: SbmParams
    adjacency: SymMatrix
    seed: int
    ground_truth: Labeling

    @property
    def n(self):
        return self.params.n


def sample(params, seed, storage_cutoff=None):
    """Draw an adjacency matrix from the SBM; bit-identical for equal inputs."""
    if not isinstance(params, SbmParams):
        raise ParameterError("params must be SbmParams")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ParameterError("seed must be a 64-bit unsigned integer")
    cutoff = DEFAULT.storage_cutoff if storage_cutoff is None else storage_cutoff
    n, h, p, q = params.n, params.half, params.p, params.q
    stream = uniform_stream(seed)
    rows, cols = [], []
    thresholds = np.empty(n)
    for i in range(n):
        m = n - i
        u = stream.uniform(m)
        # columns i..n-1: same block while j < h (for i < h), always for i >= h
        if i < h:
            thresholds[: h - i] = p
            thresholds[h - i : m] = q
        else:
            thresholds[:m] = p
        hit = np.flatnonzero(u < thresholds[:m]) + i
        if not params.self_loops and hit.size and hit[0] == i:
            hit = hit[1:]
        rows.append(np.full(hit.size, i, dtype=np.int64))
        cols.append(hit)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    adjacency = _symmetric_from_upper(r, c, n, cutoff)
    return SampledGraph(params, adjacency, seed, Labeling.ground_truth(n))


def _symmetric_from_upper(r, c, n, cutoff):
    if n <= cutoff:
        a = np.zeros((n, n))
        a[r, c] = 1.0
        a[c, r] = 1.0
        return SymMatrix(a, check=False)
    off = r != c
    rr = np.concatenate([r, c[off]])
    cc = np.concatenate([c, r[off]])
    a = sp.csr_matrix((np.ones(rr.size), (rr, cc)), shape=(n, n))
    return SymMatrix(a, check=False)


def u2star(n):
    """Unit vector (1,...,1,-1,...,-1)/sqrt(n)."""
    h = n // 2
    v = np.empty(n)
    v[:h] = 1.0
    v[h:] = -1.0
    return v / math.sqrt(n)


def expectation_matrices(params):
    """Return ``(Astar, DstarScale, u2star)``.

    ``Astar`` is p on within-block entries (diagonal included) and q across;
    ``D* = DstarScale * I`` with ``DstarScale = n(p+q)/2``.
    """
    n, h = params.n, params.half
    a = np.full((n, n), params.q)
    a[:h, :h] = params.p
    a[h:, h:] = params.p
    return SymMatrix(a, check=False), n * (params.p + params.q) / 2.0, u2star(n)


def expectation_graph(params):
    """A* wrapped as a :class:`SampledGraph` (seed 0) for deterministic checks."""
    a, _, _ = expectation_matrices(params)
    return SampledGraph(params, a, 0, Labeling.ground_truth(params.n))


# --- edge-list text format -------------------------------------------------


def write_edge_list(adjacency, fh):
    """``n <n>`` header, then ``i j`` per edge (1-based, i <= j)."""
    n = adjacency.n
    upper = sp.triu(adjacency.tocsr()).tocoo()
    if upper.nnz and not np.all(upper.data == 1.0):
        raise ParameterError("edge list export needs a 0/1 adjacency matrix")
    order = np.lexsort((upper.col, upper.row))
    fh.write(f"n {n}\n")
    for k in order:
        fh.write(f"{upper.row[k] + 1} {upper.col[k] + 1}\n")


def read_edge_list(fh, storage_cutoff=None):
    cutoff = DEFAULT.storage_cutoff if storage_cutoff is None else storage_cutoff
    header = fh.readline().split()
    if len(header) != 2 or header[0] != "n":
        raise ParameterError("edge list must start with 'n <count>'")
    n = int(header[1])
    rows, cols = [], []
    for lineno, line in enumerate(fh, start=2):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise ParameterError(f"line {lineno}: expected 'i j'")
        i, j = int(parts[0]) - 1, int(parts[1]) - 1
        if not (0 <= i <= j < n):
            raise ParameterError(f"line {lineno}: need 1 <= i <= j <= n")
        rows.append(i)
        cols.append(j)
    r = np.asarray(rows, dtype=np.int64)
    c = np.asarray(cols, dtype=np.int64)
    return _symmetric_from_upper(r, c, n, cutoff)
