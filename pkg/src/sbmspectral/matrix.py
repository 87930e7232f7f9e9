"""Immutable symmetric real matrix with a dense or CSR view."""

import io

import numpy as np
import scipy.sparse as sp

from .config import DEFAULT
from .errors import ParameterError


class SymMatrix:
    """Symmetric real matrix.

    Storage is either a read-only dense ``ndarray`` or a CSR matrix with
    sorted indices and no duplicates.  Symmetry is checked exactly at
    construction, so the logical matrix always equals its transpose.
    Use :meth:`auto` to pick storage from the size.
    """

    __slots__ = ("_data",)

    def __init__(self, data, check=True):
        if sp.issparse(data):
            m = sp.csr_matrix(data, dtype=np.float64, copy=True)
            m.sum_duplicates()
            m.sort_indices()
            m.eliminate_zeros()
        else:
            m = np.array(data, dtype=np.float64, copy=True)
            if m.ndim != 2:
                raise ParameterError("matrix must be two-dimensional")
        if m.shape[0] != m.shape[1]:
            raise ParameterError(f"matrix must be square, got shape {m.shape}")
        if check:
            _check_symmetric(m)
        if isinstance(m, np.ndarray):
            m.setflags(write=False)
        else:
            for arr in (m.data, m.indices, m.indptr):
                arr.setflags(write=False)
        self._data = m

    @classmethod
    def auto(cls, data, cutoff=None, check=True):
        """Dense storage up to ``cutoff`` rows, CSR above."""
        cutoff = DEFAULT.storage_cutoff if cutoff is None else cutoff
        n = data.shape[0]
        if n > cutoff and not sp.issparse(data):
            data = sp.csr_matrix(data)
        elif n <= cutoff and sp.issparse(data):
            data = data.toarray()
        return cls(data, check=check)

    @property
    def n(self):
        return self._data.shape[0]

    @property
    def shape(self):
        return self._data.shape

    @property
    def is_sparse(self):
        return sp.issparse(self._data)

    def toarray(self):
        if self.is_sparse:
            return self._data.toarray()
        return np.array(self._data)

    def tocsr(self):
        if self.is_sparse:
            return self._data.copy()
        return sp.csr_matrix(self._data)

    @property
    def raw(self):
        """Underlying read-only storage (ndarray or CSR); do not mutate."""
        return self._data

    def matvec(self, x):
        return self._data @ x

    def __matmul__(self, x):
        return self._data @ x

    def diagonal(self):
        return np.asarray(self._data.diagonal(), dtype=np.float64)

    def row_sums(self):
        return np.asarray(self._data.sum(axis=1), dtype=np.float64).ravel()

    def gershgorin_bound(self):
        """Upper bound on the spectral norm: max absolute row sum."""
        if self.is_sparse:
            return float(abs(self._data).sum(axis=1).max()) if self.n else 0.0
        return float(np.abs(self._data).sum(axis=1).max()) if self.n else 0.0

    def __sub__(self, other):
        return _combine(self, other, -1.0)

    def __add__(self, other):
        return _combine(self, other, 1.0)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix) or other.shape != self.shape:
            return NotImplemented
        return bool(np.array_equal(self.toarray(), other.toarray()))

    __hash__ = None

    def __repr__(self):
        kind = "csr" if self.is_sparse else "dense"
        return f"SymMatrix(n={self.n}, storage={kind})"

    def dump_text(self):
        """Plain-text dense dump, one row per line, ``repr`` precision."""
        out = io.StringIO()
        for row in self.toarray():
            out.write(" ".join(repr(float(v)) for v in row))
            out.write("\n")
        return out.getvalue()

    def dump_csv(self):
        """Sparse ``i,j,value`` dump (0-based, upper triangle incl. diagonal)."""
        coo = sp.triu(self.tocsr()).tocoo()
        order = np.lexsort((coo.col, coo.row))
        lines = ["i,j,value"]
        for k in order:
            lines.append(f"{coo.row[k]},{coo.col[k]},{float(coo.data[k])!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load_csv(cls, text, n):
        rows, cols, vals = [], [], []
        for line in text.splitlines()[1:]:
            if not line.strip():
                continue
            i, j, v = line.split(",")
            rows.append(int(i))
            cols.append(int(j))
            vals.append(float(v))
        upper = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        full = upper + sp.triu(upper, k=1).T
        return cls.auto(full)


def _check_symmetric(m):
    if sp.issparse(m):
        diff = m - m.T
        diff.eliminate_zeros()
        if diff.nnz:
            raise ParameterError("matrix is not exactly symmetric")
    elif not np.array_equal(m, m.T):
        raise ParameterError("matrix is not exactly symmetric")


def _combine(a, b, sign):
    if not isinstance(b, SymMatrix):
        return NotImplemented
    if a.shape != b.shape:
        raise ParameterError("dimension mismatch")
    if a.is_sparse and b.is_sparse:
        return SymMatrix(a.raw + sign * b.raw, check=False)
    return SymMatrix(a.toarray() + sign * b.toarray(), check=False)
