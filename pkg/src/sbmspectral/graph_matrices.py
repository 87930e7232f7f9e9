"""Degrees, graph Laplacians, and spectral norms.

Degrees are plain row sums ``d_i = sum_j A_ij``, so a self-loop counts once.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .config import DEFAULT
from .eigensolver import lanczos_smallest, symmetric_scale
from .errors import IsolatedVertexError, NumericError, ParameterError
from .matrix import SymMatrix
from .rng import uniform_stream


@dataclass(frozen=True, eq=False)
class DegreeProfile:
    degrees: np.ndarray
    d_min: float
    d_max: float
    d_out: np.ndarray
    d_out_star_scale: float = None  # n*q/2 when the model is known

    def d_out_deviation(self):
        """``d_out - d_out*`` (needs ``d_out_star_scale``)."""
        if self.d_out_star_scale is None:
            raise ParameterError("d_out* unknown: pass q to degree_profile")
        return self.d_out - self.d_out_star_scale


def degree_profile(A, reference, q=None):
    """Row sums and cross-community degrees of ``A`` against ``reference``.

    ``q`` (the cross-block edge probability) fills in ``d_out* = n q / 2``.
    """
    signs = np.asarray(getattr(reference, "signs", reference))
    if signs.shape != (A.n,):
        raise ParameterError(f"reference has length {signs.size}, matrix has n={A.n}")
    degrees = A.row_sums()
    other = (signs < 0).astype(np.float64)
    # cross-community degree: row sums restricted to columns of the other block
    to_minus = A.matvec(other)
    to_plus = A.matvec(1.0 - other)
    d_out = np.where(signs > 0, to_minus, to_plus)
    return DegreeProfile(
        degrees=degrees,
        d_min=float(degrees.min()),
        d_max=float(degrees.max()),
        d_out=d_out,
        d_out_star_scale=None if q is None else A.n * q / 2.0,
    )


def unnormalized_laplacian(A, tolerances=DEFAULT):
    """``L = diag(A 1) - A``."""
    d = A.row_sums()
    if A.is_sparse:
        L = sp.diags(d, format="csr") - A.raw
    else:
        L = -A.toarray()
        L[np.diag_indices_from(L)] += d
    L = SymMatrix(L, check=False)
    rs = np.abs(L.row_sums())
    limit = tolerances.row_sum_tol * max(1.0, float(np.abs(d).max(initial=0.0)))
    if rs.size and rs.max() > limit:
        raise NumericError(f"Laplacian row sums not zero (max {rs.max():.3e})")
    return L


def normalized_laplacian(A, tolerances=DEFAULT):
    """``D^{-1/2} (D - A) D^{-1/2}``; raises on an isolated vertex."""
    d = A.row_sums()
    zero = np.flatnonzero(d <= 0)
    if zero.size:
        raise IsolatedVertexError(int(zero[0]))
    return symmetric_scale(unnormalized_laplacian(A, tolerances), 1.0 / np.sqrt(d))


def spectral_norm(M, tol=None, seed=0, method="auto", tolerances=DEFAULT):
    """``||M||_2`` of a symmetric matrix to relative accuracy ``tol``.

    ``method``: ``"dense"`` (LAPACK, used automatically for
    ``n <= exact_norm_cutoff``), ``"lanczos"`` (extreme Ritz values of ``M``
    and ``-M``; the automatic choice above the cut-off), or ``"power"``.
    """
    tol = tolerances.norm_tol if tol is None else tol
    n = M.n
    if n == 0:
        return 0.0
    if method == "auto":
        method = "dense" if n <= tolerances.exact_norm_cutoff else "lanczos"
    if method == "dense":
        vals = sla.eigvalsh(M.toarray())
        return float(max(abs(vals[0]), abs(vals[-1])))
    bound = M.gershgorin_bound()
    if bound == 0.0:
        return 0.0
    if method == "lanczos":
        start = uniform_stream(seed).normal(n)
        lo, _, _ = lanczos_smallest(M.matvec, n, 1, tol * bound, start,
                                    max_basis=tolerances.lanczos_max_basis,
                                    max_restarts=tolerances.lanczos_max_restarts, seed=seed)
        hi, _, _ = lanczos_smallest(lambda x: -M.matvec(x), n, 1, tol * bound, start,
                                    max_basis=tolerances.lanczos_max_basis,
                                    max_restarts=tolerances.lanczos_max_restarts, seed=seed)
        return float(max(abs(lo[0]), abs(hi[0])))
    if method == "power":
        return _power_norm(M, tol, seed, tolerances.power_max_iter)
    raise ParameterError(f"unknown method {method!r}")


def _power_norm(M, tol, seed, max_iter):
    x = uniform_stream(seed).normal(M.n)
    x /= np.linalg.norm(x)
    est = 0.0
    prev_inc = None
    for it in range(max_iter):
        y = M.matvec(x)
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        # ||M x|| increases monotonically to ||M||; increments decay geometrically,
        # so the remaining error is about inc * r / (1 - r)
        inc = new - est
        if it > 2 and prev_inc is not None and prev_inc > 0:
            r = min(inc / prev_inc, 0.999)
            if inc <= 0 or inc * max(r, 0.0) / (1.0 - r) <= tol * new:
                return new
        prev_inc = inc if it > 0 else None
        est = new
        x = y / new
    raise NumericError("power iteration did not converge", {"iterations": max_iter, "estimate": est})
