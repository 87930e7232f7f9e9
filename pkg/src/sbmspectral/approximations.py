"""Closed-form approximations to the Fiedler vector and their quality metrics.

All vectors are raw formula outputs (never re-normalised); the metrics are
scale sensitive.  ``z`` is the ground-truth sign vector.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .clustering import Method
from .config import DEFAULT
from .eigensolver import generalized_smallest_k, orient, smallest_k
from .errors import IsolatedVertexError, NearSingularResolventError, NumericError, ParameterError
from .graph_matrices import unnormalized_laplacian
from .matrix import SymMatrix
from .rng import derive_seed, uniform_stream
from .sbm import u2star


class ApproxKind(str, enum.Enum):
    U2_STAR = "U2Star"
    SHIFTED_POWER = "ShiftedPower"
    RESOLVENT_LAMBDA2_L = "ResolventLambda2L"
    RESOLVENT_LAMBDA2_LSTAR = "ResolventLambda2LStar"
    NORMALIZED_LAMBDA2 = "NormalizedLambda2"
    NORMALIZED_LAMBDA2_STAR = "NormalizedLambda2Star"

    @classmethod
    def parse(cls, value):
        try:
            return cls(value)
        except ValueError:
            raise ParameterError(f"unknown approximation kind {value!r}") from None

    @property
    def method(self):
        """Which Fiedler vector this approximation targets (None: both)."""
        if self is ApproxKind.U2_STAR:
            return None
        if self in (ApproxKind.NORMALIZED_LAMBDA2, ApproxKind.NORMALIZED_LAMBDA2_STAR):
            return Method.NORMALIZED
        return Method.UNNORMALIZED


KINDS_BY_METHOD = {
    Method.UNNORMALIZED: (ApproxKind.U2_STAR, ApproxKind.SHIFTED_POWER,
                          ApproxKind.RESOLVENT_LAMBDA2_L, ApproxKind.RESOLVENT_LAMBDA2_LSTAR),
    Method.NORMALIZED: (ApproxKind.U2_STAR, ApproxKind.NORMALIZED_LAMBDA2,
                        ApproxKind.NORMALIZED_LAMBDA2_STAR),
}


@dataclass(frozen=True)
class ApproxSpectra:
    """Eigenvalues the formulas need: lambda_2(L) and lambda_2 of (L, D)."""

    lambda2_L: float = None
    lambda2_N: float = None


@dataclass(frozen=True)
class ApproxReport:
    kind: ApproxKind
    sup_error: float
    margin: float
    recovered_by_sign: bool

    def to_dict(self):
        return {"kind": self.kind.value, "sup_error": self.sup_error,
                "margin": self.margin, "recovered_by_sign": self.recovered_by_sign}


def approx_vector(kind, graph, spectra, tolerances=DEFAULT):
    """The approximation ``u~_2`` of the given kind.

    * U2Star: ``u2*``
    * ShiftedPower: ``(c P - L) u2* / (c - lambda_2(L))``, ``c = n(p+q)/2``, ``P = I - J/n``
    * ResolventLambda2L: ``(D - lambda_2(L) I)^-1 A u2*``
    * ResolventLambda2LStar: same with ``lambda_2(L*) = nq``
    * NormalizedLambda2: ``(1 - lambda_2(NL))^-1 D^-1 A u2*``
    * NormalizedLambda2Star: same with ``lambda_2(NL*) = 2q/(p+q)``
    """
    kind = ApproxKind.parse(kind) if not isinstance(kind, ApproxKind) else kind
    params = graph.params
    n, p, q = params.n, params.p, params.q
    A = graph.adjacency
    ustar = u2star(n)
    if kind is ApproxKind.U2_STAR:
        return ustar

    if kind is ApproxKind.SHIFTED_POWER:
        lam = _need(spectra.lambda2_L, "lambda2_L")
        c = n * (p + q) / 2.0
        denom = c - lam
        if abs(denom) <= tolerances.resolvent_tol:
            raise NearSingularResolventError(-1, denom)
        Lu = unnormalized_laplacian(A, tolerances).matvec(ustar)
        # P u2* = u2* since u2* is orthogonal to the constant vector
        return (c * (ustar - ustar.mean()) - Lu) / denom

    d = A.row_sums()
    Au = A.matvec(ustar)
    if kind in (ApproxKind.RESOLVENT_LAMBDA2_L, ApproxKind.RESOLVENT_LAMBDA2_LSTAR):
        lam = _need(spectra.lambda2_L, "lambda2_L") if kind is ApproxKind.RESOLVENT_LAMBDA2_L else n * q
        shifted = d - lam
        bad = np.flatnonzero(np.abs(shifted) <= tolerances.resolvent_tol)
        if bad.size:
            raise NearSingularResolventError(int(bad[0]), float(shifted[bad[0]]))
        return Au / shifted

    zero = np.flatnonzero(d <= 0)
    if zero.size:
        raise IsolatedVertexError(int(zero[0]))
    if kind is ApproxKind.NORMALIZED_LAMBDA2:
        lam = _need(spectra.lambda2_N, "lambda2_N")
    else:
        lam = 2.0 * q / (p + q)
    denom = 1.0 - lam
    if abs(denom) <= tolerances.resolvent_tol:
        raise NearSingularResolventError(-1, denom)
    return Au / d / denom


def _need(value, name):
    if value is None:
        raise ParameterError(f"approximation needs {name}")
    return value


def approx_report(kind, graph, u2, approx=None, spectra=None, tolerances=DEFAULT):
    """sup-norm error and sign margin of an approximation, both scaled by sqrt(n).

    ``u2`` is re-oriented against ``u2*`` here, so its raw sign is irrelevant.
    """
    kind = ApproxKind.parse(kind) if not isinstance(kind, ApproxKind) else kind
    n = graph.params.n
    if approx is None:
        approx = approx_vector(kind, graph, spectra or ApproxSpectra(), tolerances)
    u = orient(u2, u2star(n))
    z = graph.ground_truth.signs
    root = math.sqrt(n)
    sup_error = root * float(np.max(np.abs(u - approx)))
    margin = root * float(np.min(z * approx))
    return ApproxReport(kind, sup_error, margin, margin > 0)


def fiedler_pair(A, method, seed=0, tolerances=DEFAULT):
    """``(lambda_2, u_2)`` of L or of (L, D), unit Euclidean norm."""
    L = unnormalized_laplacian(A, tolerances)
    ones = np.ones(A.n)
    if Method.parse(method) is Method.UNNORMALIZED:
        spec = smallest_k(L, 2, kernel=ones, seed=seed, tolerances=tolerances)
    else:
        spec = generalized_smallest_k(L, A.row_sums(), 2, kernel=ones, seed=seed, tolerances=tolerances)
    return float(spec.eigenvalues[1]), spec.vector(1)


def leave_one_out_matrix(A, params, m):
    """A with row and column ``m`` replaced by their expectations."""
    n, h = params.n, params.half
    col = np.where((np.arange(n) < h) == (m < h), params.p, params.q)
    if A.is_sparse:
        M = A.raw.tolil(copy=True)
        M[m, :] = col
        M[:, m] = col[:, None]
        return SymMatrix(M.tocsr(), check=False)
    M = A.toarray()
    M[m, :] = col
    M[:, m] = col
    return SymMatrix(M, check=False)


def leave_one_out_diagnostic(graph, method, sample_m=None, count=10, seed=0, tolerances=DEFAULT):
    """``||u_2 - u_2^(m)|| / ||u_2||_inf`` for each sampled vertex ``m``.

    ``sample_m`` defaults to ``count`` distinct vertices drawn from a stream
    derived from ``(graph.seed, seed)``; the result is a sampled maximum, not
    the maximum over all n vertices.  Returns ``{m: ratio}``.
    """
    method = Method.parse(method)
    n = graph.params.n
    if sample_m is None:
        stream = uniform_stream(derive_seed(graph.seed, seed, 0x100))
        sample_m = sorted(int(v) for v in stream.choice(n, min(count, n)))
    for m in sample_m:
        if not 0 <= m < n:
            raise ParameterError(f"vertex index {m} out of range")
    _, u2 = fiedler_pair(graph.adjacency, method, seed, tolerances)
    u2 = orient(u2, u2star(n))
    scale = float(np.max(np.abs(u2)))
    out = {}
    for m in sample_m:
        Am = leave_one_out_matrix(graph.adjacency, graph.params, m)
        _, um = fiedler_pair(Am, method, seed, tolerances)
        um = orient(um, u2)
        out[int(m)] = float(np.linalg.norm(u2 - um)) / scale
    return out
