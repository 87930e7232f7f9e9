"""Two-step spectral clustering (Fiedler vector + sign rounding) and metrics."""

import enum
import json
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .eigensolver import generalized_smallest_k, orient, smallest_k
from .errors import ParameterError
from .graph_matrices import unnormalized_laplacian
from .labels import Labeling


class Method(str, enum.Enum):
    UNNORMALIZED = "unnormalized"
    NORMALIZED = "normalized"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParameterError(f"unknown method {value!r}") from None


@dataclass(frozen=True, eq=False)
class ClusterResult:
    labeling: Labeling
    fiedler: np.ndarray
    lambda2: float
    gap_flag: bool
    zero_entries: int
    method: Method
    lambda3: float = None
    spectrum: object = None  # the full Spectrum, kept for reuse; not serialized

    @property
    def degenerate_gap(self):
        return self.gap_flag

    def to_dict(self):
        return {
            "method": self.method.value,
            "lambda2": float(self.lambda2),
            "gap_flag": bool(self.gap_flag),
            "zero_entries": int(self.zero_entries),
            "labeling": self.labeling.tolist(),
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def cluster_unnormalized(A, tol=None, reference=None, seed=0, tolerances=DEFAULT):
    """Sign pattern of the second eigenvector of ``L = D - A``."""
    L = unnormalized_laplacian(A, tolerances)
    spec = smallest_k(L, min(3, A.n), tol, kernel=np.ones(A.n), seed=seed, tolerances=tolerances)
    return _round(spec, Method.UNNORMALIZED, reference, tolerances)


def cluster_normalized(A, tol=None, reference=None, seed=0, tolerances=DEFAULT):
    """Sign pattern of the second eigenvector of ``L u = lambda D u``.

    Raises :class:`IsolatedVertexError` when some degree is zero.
    """
    L = unnormalized_laplacian(A, tolerances)
    spec = generalized_smallest_k(L, A.row_sums(), min(3, A.n), tol, kernel=np.ones(A.n),
                                  seed=seed, tolerances=tolerances)
    return _round(spec, Method.NORMALIZED, reference, tolerances)


def cluster(A, method, **kwargs):
    method = Method.parse(method)
    if method is Method.UNNORMALIZED:
        return cluster_unnormalized(A, **kwargs)
    return cluster_normalized(A, **kwargs)


def _round(spec, method, reference, tolerances):
    u = spec.vector(1)
    if reference is not None:
        u = orient(u, reference)
    labeling, zeros = Labeling.from_vector(u, tolerances.zero_tol)
    return ClusterResult(
        labeling=labeling,
        fiedler=u,
        lambda2=float(spec.eigenvalues[1]),
        gap_flag=spec.gap_flag,
        zero_entries=zeros,
        method=method,
        lambda3=float(spec.eigenvalues[2]) if spec.k > 2 else None,
        spectrum=spec,
    )


def agreement(result, truth):
    """Fraction of vertices labelled correctly, maximised over a global flip."""
    a = np.asarray(getattr(result, "signs", result))
    b = np.asarray(getattr(truth, "signs", truth))
    if a.shape != b.shape:
        raise ParameterError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ParameterError("empty labeling")
    same = int(np.count_nonzero(a == b))
    return max(same, a.size - same) / a.size


def exactly_recovered(result, truth):
    """True iff agreement is 1 and no Fiedler entry was rounded from zero."""
    return result.zero_entries == 0 and agreement(result.labeling, truth) == 1.0
