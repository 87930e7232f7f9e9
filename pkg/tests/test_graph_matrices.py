import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import complete, path3, random_symmetric
from sbmspectral import (
    IsolatedVertexError,
    Labeling,
    ParameterError,
    SbmParams,
    SymMatrix,
    degree_profile,
    normalized_laplacian,
    sample,
    spectral_norm,
    u2star,
    unnormalized_laplacian,
)

REF4 = Labeling([1, 1, -1, -1])


def test_degree_profile_examples():
    prof = degree_profile(SymMatrix(np.ones((4, 4))), REF4)
    assert prof.degrees.tolist() == [4, 4, 4, 4] and prof.d_out.tolist() == [2, 2, 2, 2]
    prof = degree_profile(SymMatrix(np.zeros((4, 4))), REF4)
    assert prof.degrees.tolist() == [0, 0, 0, 0] and prof.d_min == 0
    a = np.zeros((4, 4))
    a[0, 2] = a[2, 0] = 1
    prof = degree_profile(SymMatrix(a), REF4)
    assert prof.degrees.tolist() == [1, 0, 1, 0] and prof.d_out.tolist() == [1, 0, 1, 0]
    with pytest.raises(ParameterError):
        degree_profile(SymMatrix(a), Labeling([1, -1]))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32))
def test_degree_profile_invariants(seed):
    g = sample(SbmParams.direct(20, 0.5, 0.2), seed)
    prof = degree_profile(g.adjacency, g.ground_truth)
    assert prof.d_min == prof.degrees.min() and prof.d_max == prof.degrees.max()
    assert np.all(prof.d_out >= 0) and np.all(prof.d_out <= prof.degrees)


def test_unnormalized_spectra():
    assert np.allclose(np.linalg.eigvalsh(unnormalized_laplacian(path3()).toarray()), [0, 1, 3], atol=1e-12)
    assert np.allclose(np.linalg.eigvalsh(unnormalized_laplacian(complete(4)).toarray()), [0, 4, 4, 4], atol=1e-12)
    assert not unnormalized_laplacian(SymMatrix(np.zeros((3, 3)))).toarray().any()


def test_normalized_spectra():
    vals = np.linalg.eigvalsh(normalized_laplacian(complete(4)).toarray())
    assert np.allclose(vals, [0, 4 / 3, 4 / 3, 4 / 3], atol=1e-12)
    vals = np.linalg.eigvalsh(normalized_laplacian(complete(2)).toarray())
    assert np.allclose(vals, [0, 2], atol=1e-12)
    a = np.zeros((3, 3))
    a[0, 1] = a[1, 0] = 1
    with pytest.raises(IsolatedVertexError) as exc:
        normalized_laplacian(SymMatrix(a))
    assert exc.value.vertex == 2


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([8, 16, 32]))
def test_laplacians_psd_with_kernel(seed, n):
    g = sample(SbmParams.direct(n, 0.7, 0.3), seed)
    A = g.adjacency
    L = unnormalized_laplacian(A)
    assert np.abs(L @ np.ones(n)).max() <= 1e-12
    assert np.linalg.eigvalsh(L.toarray()).min() >= -1e-10
    # the ⟨u2*, L u2*⟩ = (2/n)⟨d_out, 1⟩ identity
    u = u2star(n)
    dout = degree_profile(A, g.ground_truth).d_out
    assert u @ (L @ u) == pytest.approx(2 / n * dout.sum(), abs=1e-12)
    d = A.row_sums()
    if d.min() > 0:
        N = normalized_laplacian(A)
        assert np.abs(N @ np.sqrt(d)).max() <= 1e-10
        assert np.linalg.eigvalsh(N.toarray()).min() >= -1e-10


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([8, 20, 32]))
def test_eigenproblem_equivalences(seed, n):
    g = sample(SbmParams.direct(n, 0.8, 0.3), seed)
    A = g.adjacency
    d = A.row_sums()
    if d.min() == 0:
        return
    import scipy.linalg as sla

    L = unnormalized_laplacian(A).toarray()
    gen_vals, gen_vecs = sla.eigh(L, np.diag(d))
    assert np.allclose(gen_vals, np.linalg.eigvalsh(normalized_laplacian(A).toarray()), atol=1e-8)
    # (lambda, u) of (L, D)  <=>  (1 - lambda, u) of D^-1 A
    P = A.toarray() / d[:, None]
    for lam, u in zip(gen_vals, gen_vecs.T):
        assert np.linalg.norm(P @ u - (1 - lam) * u) <= 1e-8 * max(1, np.linalg.norm(u))


def test_spectral_norm_examples(rng):
    assert spectral_norm(SymMatrix(np.diag([1.0, -3.0, 2.0]))) == pytest.approx(3, abs=1e-12)
    assert spectral_norm(SymMatrix(np.ones((4, 4)))) == pytest.approx(4, abs=1e-12)
    x = random_symmetric(rng, 10)
    assert spectral_norm(SymMatrix(x)) == pytest.approx(np.abs(np.linalg.eigvalsh(x)).max(), rel=1e-6)


@pytest.mark.parametrize("method", ["power", "lanczos"])
def test_spectral_norm_iterative(rng, method):
    x = random_symmetric(rng, 200)
    exact = np.abs(np.linalg.eigvalsh(x)).max()
    got = spectral_norm(SymMatrix(x), tol=1e-6, method=method)
    assert abs(got - exact) <= 1e-6 * exact


def test_spectral_norm_sparse_matches_dense():
    g = sample(SbmParams.critical(300, 10, 2), 3)
    dense = g.adjacency
    sparse = SymMatrix.auto(dense.toarray(), cutoff=10)
    exact = np.abs(np.linalg.eigvalsh(dense.toarray())).max()
    assert spectral_norm(sparse, tol=1e-8) == pytest.approx(exact, rel=1e-8)


def test_spectral_norm_unknown_method():
    with pytest.raises(ParameterError):
        spectral_norm(SymMatrix(np.eye(70)), method="magic")
