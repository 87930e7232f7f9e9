import numpy as np
import pytest

from sbmspectral import (
    ApproxKind,
    ApproxSpectra,
    IsolatedVertexError,
    Method,
    NearSingularResolventError,
    ParameterError,
    SbmParams,
    approx_report,
    approx_vector,
    expectation_graph,
    fiedler_pair,
    leave_one_out_diagnostic,
    leave_one_out_matrix,
    sample,
    u2star,
)
from sbmspectral.approximations import KINDS_BY_METHOD
from sbmspectral.eigensolver import orient


def test_u2star_kind():
    g = sample(SbmParams.critical(100, 10, 2), 0)
    assert np.array_equal(approx_vector(ApproxKind.U2_STAR, g, ApproxSpectra()), u2star(100))
    rep = approx_report("U2Star", g, u2star(100))
    assert rep.sup_error == 0 and rep.margin == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("kind", list(ApproxKind))
def test_expectation_reproduces_u2star(kind):
    g = expectation_graph(SbmParams.critical(200, 10, 2))
    lam_L, _ = fiedler_pair(g.adjacency, Method.UNNORMALIZED)
    lam_N, _ = fiedler_pair(g.adjacency, Method.NORMALIZED)
    v = approx_vector(kind, g, ApproxSpectra(lam_L, lam_N))
    assert np.abs(v - u2star(200)).max() <= 1e-8


def test_resolvent_closed_form_on_expectation():
    params = SbmParams.direct(20, 0.6, 0.2)
    g = expectation_graph(params)
    v = approx_vector(ApproxKind.RESOLVENT_LAMBDA2_L, g, ApproxSpectra(lambda2_L=20 * 0.2))
    assert np.allclose(v, u2star(20), atol=1e-14)


def test_exact_u2_has_zero_error():
    g = sample(SbmParams.critical(200, 10, 2), 1)
    lam, u = fiedler_pair(g.adjacency, "unnormalized")
    rep = approx_report("ResolventLambda2L", g, u, approx=orient(u, u2star(200)))
    assert rep.sup_error == 0


def test_orientation_invariance():
    g = sample(SbmParams.critical(300, 10, 2), 2)
    lam, u = fiedler_pair(g.adjacency, "unnormalized")
    s = ApproxSpectra(lambda2_L=lam)
    a = approx_report("ResolventLambda2L", g, u, spectra=s)
    b = approx_report("ResolventLambda2L", g, -u, spectra=s)
    assert a == b


def test_missing_spectra():
    g = sample(SbmParams.critical(100, 10, 2), 0)
    with pytest.raises(ParameterError):
        approx_vector("ShiftedPower", g, ApproxSpectra())
    with pytest.raises(ParameterError):
        approx_vector("NoSuchKind", g, ApproxSpectra())


def test_near_singular_resolvent():
    g = sample(SbmParams.critical(100, 10, 2), 0)
    d = g.adjacency.row_sums()
    with pytest.raises(NearSingularResolventError) as exc:
        approx_vector("ResolventLambda2L", g, ApproxSpectra(lambda2_L=float(d[7])))
    assert d[exc.value.vertex] == d[7]
    with pytest.raises(NearSingularResolventError):
        approx_vector("NormalizedLambda2", g, ApproxSpectra(lambda2_N=1.0))


def test_isolated_vertex_in_normalized_kind():
    g = sample(SbmParams.direct(8, 0.0, 0.0), 0)
    with pytest.raises(IsolatedVertexError):
        approx_vector("NormalizedLambda2Star", g, ApproxSpectra())


def test_kind_methods():
    assert ApproxKind.U2_STAR.method is None
    assert ApproxKind.NORMALIZED_LAMBDA2.method is Method.NORMALIZED
    assert ApproxKind.SHIFTED_POWER.method is Method.UNNORMALIZED
    assert set(KINDS_BY_METHOD[Method.UNNORMALIZED]) | set(KINDS_BY_METHOD[Method.NORMALIZED]) == set(ApproxKind)


def test_leave_one_out_matrix():
    params = SbmParams.critical(40, 10, 2)
    g = sample(params, 3)
    Am = leave_one_out_matrix(g.adjacency, params, 5).toarray()
    A = g.adjacency.toarray()
    expect = np.where(np.arange(40) < 20, params.p, params.q)
    assert np.array_equal(Am[5], expect) and np.array_equal(Am[:, 5], expect)
    mask = np.ones(40, bool)
    mask[5] = False
    assert np.array_equal(Am[np.ix_(mask, mask)], A[np.ix_(mask, mask)])


def test_leave_one_out_complete_graph_zero():
    # A equal to A* makes A^(m) = A; p = q = 1 has a repeated lambda_2, so use q < p
    g = expectation_graph(SbmParams.direct(10, 1.0, 0.5))
    ratios = leave_one_out_diagnostic(g, "unnormalized", sample_m=[0, 3, 9])
    assert all(r < 1e-8 for r in ratios.values())


def test_leave_one_out_sign_invariant_and_defaults():
    g = sample(SbmParams.critical(200, 10, 2), 4)
    r = leave_one_out_diagnostic(g, "normalized", count=5, seed=1)
    assert len(r) == 5 and all(v >= 0 for v in r.values())
    assert r == leave_one_out_diagnostic(g, "normalized", count=5, seed=1)
    with pytest.raises(ParameterError):
        leave_one_out_diagnostic(g, "normalized", sample_m=[200])


@pytest.mark.slow
@pytest.mark.parametrize("method", ["unnormalized", "normalized"])
def test_leave_one_out_bounded_n1000(method):
    params = SbmParams.critical(1000, 10, 2)
    worst = 0.0
    for seed in range(10):
        g = sample(params, 700 + seed)
        worst = max(worst, max(leave_one_out_diagnostic(g, method, count=10, seed=seed).values()))
    assert worst < 50
