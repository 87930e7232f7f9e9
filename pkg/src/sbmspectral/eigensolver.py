"""Smallest eigenpairs of symmetric and Laplacian-type generalized problems.

Dense path (``n <= dense_cutoff``): LAPACK ``?syevr`` through
``scipy.linalg.eigh`` (Householder tridiagonalisation + MRRR/QR).

Sparse path: Lanczos with full reorthogonalisation (classical Gram-Schmidt
applied twice against every stored basis vector) and thick restarts.  The
basis is kept orthogonal to a known kernel vector, if one is supplied, and
eigenpairs are extracted by Rayleigh-Ritz on the stored basis so that every
reported residual is a true ``||M u - lambda u||``.

A known kernel (``L 1 = 0`` for a Laplacian) is handled the same way on both
paths: it is reported as pair 0 and the remaining pairs are computed on its
orthogonal complement.  On the dense path this is done by the Hotelling
shift ``M + sigma k k^T`` with ``sigma`` above the Gershgorin bound.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .config import DEFAULT
from .errors import IsolatedVertexError, NumericError, ParameterError
from .matrix import SymMatrix
from .rng import uniform_stream


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenpairs with residual certificates.

    ``eigenvectors`` holds the pairs as columns.  For a generalized problem
    the vectors are D-orthogonal and the residual is
    ``||L u - lambda D u|| / ||D^{1/2} u||``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    gap_flag: bool
    norm_estimate: float
    generalized: bool = False
    info: dict = field(default_factory=dict)

    @property
    def k(self):
        return self.eigenvalues.size

    def vector(self, i):
        return self.eigenvectors[:, i]


def smallest_k(M, k, tol=None, kernel=None, seed=0, tolerances=DEFAULT):
    """The ``k`` algebraically smallest eigenpairs of ``M``.

    ``kernel``, if given, must be an eigenvector of the smallest eigenvalue
    (e.g. the constant vector for a graph Laplacian); it is returned as pair 0.
    ``seed`` fixes the Lanczos start vector.
    """
    if not isinstance(M, SymMatrix):
        M = SymMatrix(M)
    n = M.n
    if not 1 <= k <= n:
        raise ParameterError(f"need 1 <= k <= n, got k={k}, n={n}")
    tol = tolerances.solver_tol if tol is None else tol
    norm_est = M.gershgorin_bound()
    scale = max(1.0, norm_est)

    kvec = None
    if kernel is not None:
        kvec = np.asarray(kernel, dtype=np.float64)
        nrm = np.linalg.norm(kvec)
        if nrm == 0:
            raise ParameterError("kernel vector is zero")
        kvec = kvec / nrm

    info = {}
    if n <= tolerances.dense_cutoff:
        vals, vecs = _dense_smallest(M.toarray(), k, kvec, norm_est)
        info["path"] = "dense"
    else:
        start = uniform_stream(seed).normal(n)
        kk = k if kvec is None else k - 1
        if kk > 0:
            vals, vecs, lz = lanczos_smallest(
                M.matvec, n, kk, tol * scale, start,
                deflate=None if kvec is None else kvec[:, None],
                max_basis=tolerances.lanczos_max_basis,
                max_restarts=tolerances.lanczos_max_restarts,
                seed=seed,
            )
            info.update(lz)
        else:
            vals, vecs = np.empty(0), np.empty((n, 0))
        if kvec is not None:
            vals = np.concatenate([[kvec @ M.matvec(kvec)], vals])
            vecs = np.column_stack([kvec, vecs])
        info["path"] = "lanczos"

    residuals = np.array(
        [np.linalg.norm(M.matvec(vecs[:, i]) - vals[i] * vecs[:, i]) for i in range(k)]
    )
    worst = residuals.max(initial=0.0)
    if worst > tol * scale:
        raise NumericError(
            f"eigenpair residual {worst:.3e} exceeds {tol * scale:.3e}",
            dict(info, residuals=residuals.tolist()),
        )
    return Spectrum(vals, vecs, residuals, _gap_flag(vals, scale, tolerances), norm_est, False, info)


def generalized_smallest_k(L, D, k, tol=None, kernel=None, seed=0, tolerances=DEFAULT):
    """Smallest eigenpairs of ``L u = lambda D u`` for positive diagonal ``D``.

    Solved through the symmetric reduction ``D^{-1/2} L D^{-1/2}``; vectors are
    mapped back by ``D^{-1/2}`` and scaled to unit Euclidean norm.  ``kernel``
    is a vector with ``L kernel = 0`` (the constant vector for a Laplacian).
    """
    if not isinstance(L, SymMatrix):
        L = SymMatrix(L)
    d = np.asarray(D, dtype=np.float64)
    if d.ndim == 2:
        d = np.diag(d)
    if d.shape != (L.n,):
        raise ParameterError("D must be a length-n diagonal")
    bad = np.flatnonzero(~(d > 0))
    if bad.size:
        raise IsolatedVertexError(int(bad[0]))
    tol = tolerances.solver_tol if tol is None else tol
    s = 1.0 / np.sqrt(d)
    reduced = symmetric_scale(L, s)
    red_kernel = None if kernel is None else np.sqrt(d) * np.asarray(kernel, dtype=np.float64)
    spec = smallest_k(reduced, k, tol, red_kernel, seed, tolerances)

    vecs = spec.eigenvectors * s[:, None]
    vecs /= np.linalg.norm(vecs, axis=0)
    vals = spec.eigenvalues
    sqrt_d = np.sqrt(d)
    residuals = np.array(
        [
            np.linalg.norm(L.matvec(vecs[:, i]) - vals[i] * d * vecs[:, i])
            / np.linalg.norm(sqrt_d * vecs[:, i])
            for i in range(k)
        ]
    )
    return Spectrum(vals, vecs, residuals, spec.gap_flag, spec.norm_estimate, True, dict(spec.info))


def symmetric_scale(M, s):
    """``diag(s) M diag(s)``, computed so the result is exactly symmetric."""
    if M.is_sparse:
        coo = M.raw.tocoo()
        w = s[coo.row] * s[coo.col]
        return SymMatrix(sp.csr_matrix((coo.data * w, (coo.row, coo.col)), shape=M.shape), check=False)
    return SymMatrix(M.toarray() * np.outer(s, s), check=False)


def orient(u, reference):
    """Return ``s*u`` with ``s`` in {+1,-1} so that ``<s*u, reference> >= 0``.

    A zero inner product keeps ``s = +1``.
    """
    u = np.asarray(u, dtype=np.float64)
    if not np.any(u):
        raise ParameterError("cannot orient the zero vector")
    return -u if float(u @ np.asarray(reference, dtype=np.float64)) < 0 else u.copy()


def _gap_flag(vals, scale, tolerances):
    if vals.size < 3:
        return False
    return bool(abs(vals[2] - vals[1]) < tolerances.gap_tol * scale)


def _dense_smallest(a, k, kvec, norm_est):
    n = a.shape[0]
    if kvec is None:
        vals, vecs = sla.eigh(a, subset_by_index=[0, k - 1])
        return vals, vecs
    if k == 1:
        return np.array([kvec @ a @ kvec]), kvec[:, None].copy()
    if k > n:
        raise ParameterError("k exceeds the dimension")
    # the kernel moves to ~sigma, above every other eigenvalue
    sigma = 2.0 * norm_est + 1.0
    shifted = a + sigma * np.outer(kvec, kvec)
    vals, vecs = sla.eigh(shifted, subset_by_index=[0, k - 2])
    vecs = vecs - np.outer(kvec, kvec @ vecs)
    vecs /= np.linalg.norm(vecs, axis=0)
    vals = np.array([vecs[:, i] @ a @ vecs[:, i] for i in range(k - 1)])
    return np.concatenate([[kvec @ a @ kvec], vals]), np.column_stack([kvec, vecs])


def lanczos_smallest(matvec, n, k, tol_abs, start, deflate=None, max_basis=160,
                     max_restarts=200, check_every=10, seed=0):
    """Thick-restart Lanczos with full reorthogonalisation.

    Returns ``(values, vectors, info)`` for the ``k`` smallest eigenpairs of
    the symmetric operator ``matvec`` restricted to the orthogonal complement
    of the columns of ``deflate``.  Converged when every wanted Ritz residual
    is ``<= tol_abs``.
    """
    defl = np.zeros((n, 0)) if deflate is None else np.asarray(deflate, dtype=np.float64)
    dim = n - defl.shape[1]
    if not 1 <= k <= dim:
        raise ParameterError(f"cannot compute {k} pairs in a {dim}-dimensional space")
    max_basis = int(min(max(max_basis, 2 * k + 10), dim))
    Q = np.empty((n, max_basis))
    W = np.empty((n, max_basis))
    fallback = uniform_stream(seed ^ 0x5DEECE66D)

    def project(v, m):
        for _ in range(2):
            if defl.shape[1]:
                v = v - defl @ (defl.T @ v)
            if m:
                v = v - Q[:, :m] @ (Q[:, :m].T @ v)
        return v

    def fresh(m):
        for _ in range(10):
            v = project(fallback.normal(n), m)
            nv = np.linalg.norm(v)
            if nv > 1e-8:
                return v / nv
        return None

    q = project(np.asarray(start, dtype=np.float64), 0)
    nq = np.linalg.norm(q)
    q = q / nq if nq > 1e-12 else fresh(0)

    m = 0
    matvecs = 0
    restarts = 0
    exhausted = False
    last_res = None
    while True:
        while m < max_basis and not exhausted:
            Q[:, m] = q
            W[:, m] = matvec(q)
            matvecs += 1
            m += 1
            if m >= k and (m % check_every == 0 or m == max_basis):
                theta, X, res, _ = _rayleigh_ritz(Q, W, m, k)
                last_res = res
                if np.all(res <= tol_abs):
                    return theta, X, _info(matvecs, restarts, m, res)
            r = project(W[:, m - 1], m)
            beta = np.linalg.norm(r)
            if beta <= 1e-10 * max(np.linalg.norm(W[:, m - 1]), 1e-300):
                # invariant subspace found; continue with a fresh direction
                q = fresh(m) if m < dim else None
                if q is None:
                    exhausted = True
            else:
                q = r / beta
        theta, X, res, (Y, evals) = _rayleigh_ritz(Q, W, m, k)
        last_res = res
        if np.all(res <= tol_abs):
            return theta, X, _info(matvecs, restarts, m, res)
        if exhausted or restarts >= max_restarts:
            raise NumericError(
                "Lanczos did not converge",
                _info(matvecs, restarts, m, last_res),
            )
        restarts += 1
        keep = int(min(m - 1, max(k + 10, max_basis // 3)))
        Qk = Q[:, :m] @ Y[:, :keep]
        Wk = W[:, :m] @ Y[:, :keep]
        # continuation direction: residual of the worst wanted Ritz pair
        j = int(np.argmax(res))
        r = Wk[:, j] - evals[j] * Qk[:, j]
        Q[:, :keep] = Qk
        W[:, :keep] = Wk
        m = keep
        r = project(r, m)
        nr = np.linalg.norm(r)
        q = r / nr if nr > 1e-14 else fresh(m)
        if q is None:
            exhausted = True


def _rayleigh_ritz(Q, W, m, k):
    H = Q[:, :m].T @ W[:, :m]
    H = 0.5 * (H + H.T)
    evals, Y = np.linalg.eigh(H)
    X = Q[:, :m] @ Y[:, :k]
    R = W[:, :m] @ Y[:, :k] - X * evals[:k]
    res = np.linalg.norm(R, axis=0)
    return evals[:k].copy(), X, res, (Y, evals)


def _info(matvecs, restarts, basis, res):
    return {
        "matvecs": matvecs,
        "restarts": restarts,
        "basis": basis,
        "max_residual": None if res is None else float(np.max(res)),
    }
