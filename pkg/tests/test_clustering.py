import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import complete
from sbmspectral import (
    IsolatedVertexError,
    Labeling,
    Method,
    ParameterError,
    SbmParams,
    SymMatrix,
    agreement,
    cluster,
    cluster_normalized,
    cluster_unnormalized,
    exactly_recovered,
    expectation_matrices,
    sample,
    u2star,
)
from sbmspectral.clustering import ClusterResult

labelings = st.integers(1, 40).flatmap(
    lambda n: st.lists(st.sampled_from([1, -1]), min_size=2 * n, max_size=2 * n)
)


def test_disjoint_blocks_n4():
    A, _, _ = expectation_matrices(SbmParams.direct(4, 1.0, 0.0))
    truth = Labeling.ground_truth(4)
    for fn in (cluster_unnormalized, cluster_normalized):
        res = fn(A)
        assert agreement(res.labeling, truth) == 1.0


def test_two_disjoint_k2():
    a = np.zeros((4, 4))
    a[0, 1] = a[1, 0] = a[2, 3] = a[3, 2] = 1
    res = cluster_normalized(SymMatrix(a))
    assert abs(res.lambda2) < 1e-12
    assert agreement(res.labeling, Labeling.ground_truth(4)) == 1.0


def test_all_ones_gap_flag():
    res = cluster_unnormalized(complete(6, loops=True))
    assert res.gap_flag and res.degenerate_gap


def test_isolated_vertex():
    a = np.ones((4, 4))
    a[3, :] = a[:, 3] = 0
    with pytest.raises(IsolatedVertexError):
        cluster_normalized(SymMatrix(a))


@pytest.mark.parametrize("method", list(Method))
def test_deep_recovery(method):
    params = SbmParams.critical(600, 30, 1)
    ok = 0
    for seed in range(20):
        g = sample(params, seed)
        res = cluster(g.adjacency, method, reference=u2star(600), seed=seed)
        ok += exactly_recovered(res, g.ground_truth)
    assert ok >= 19


@pytest.mark.parametrize("n,p,q", [(8, 0.9, 0.2), (30, 0.5, 0.1), (64, 0.3, 0.05)])
def test_expectation_input(n, p, q):
    A, _, _ = expectation_matrices(SbmParams.direct(n, p, q))
    truth = Labeling.ground_truth(n)
    un = cluster_unnormalized(A, reference=u2star(n))
    no = cluster_normalized(A, reference=u2star(n))
    assert un.labeling == truth and no.labeling == truth
    assert un.lambda2 == pytest.approx(n * q, abs=1e-8)
    assert no.lambda2 == pytest.approx(2 * q / (p + q), abs=1e-8)


def test_agreement_examples():
    a = Labeling([1, -1, 1, -1])
    b = Labeling([1, 1, -1, -1])
    assert agreement(b, b) == 1.0
    assert agreement(-b, b) == 1.0
    assert agreement(a, b) == 0.5
    with pytest.raises(ParameterError):
        agreement(Labeling([1, 1]), b)


@given(labelings, st.randoms())
def test_agreement_properties(signs, rnd):
    x = Labeling(signs)
    y = Labeling(rnd.sample(signs, len(signs)))
    ag = agreement(x, y)
    assert 0.5 <= ag <= 1
    assert agreement(-x, y) == ag
    perm = list(range(len(signs)))
    rnd.shuffle(perm)
    assert agreement(Labeling(x.signs[perm]), Labeling(y.signs[perm])) == ag
    assert (ag == 1) == (x == y or -x == y)


def _result(signs, zeros):
    return ClusterResult(Labeling(signs), np.zeros(len(signs)), 0.0, False, zeros, Method.UNNORMALIZED)


def test_exactly_recovered_rules():
    truth = Labeling.ground_truth(600)
    assert exactly_recovered(_result(truth.signs, 0), truth)
    bad = truth.signs.copy()
    bad[5] = -bad[5]
    assert not exactly_recovered(_result(bad, 0), truth)
    assert not exactly_recovered(_result(truth.signs, 1), truth)


def test_zero_entries_rounding():
    lab, zeros = Labeling.from_vector(np.array([0.5, 0.0, 1e-13, -0.2, -1e-13]), 1e-12)
    assert lab.tolist() == [1, 1, 1, -1, 1] and zeros == 3


def test_json_shape():
    g = sample(SbmParams.critical(100, 20, 1), 0)
    res = cluster(g.adjacency, "normalized", reference=u2star(100))
    d = json.loads(res.to_json())
    assert set(d) == {"method", "lambda2", "gap_flag", "zero_entries", "labeling"}
    assert d["method"] == "normalized" and len(d["labeling"]) == 100
    assert set(d["labeling"]) <= {1, -1}


def test_fiedler_oriented_against_u2star():
    g = sample(SbmParams.critical(200, 10, 2), 1)
    res = cluster(g.adjacency, Method.UNNORMALIZED, reference=u2star(200))
    assert res.fiedler @ u2star(200) >= 0


def test_method_parse():
    assert Method.parse("Normalized") is Method.NORMALIZED
    assert Method.parse(Method.UNNORMALIZED) is Method.UNNORMALIZED
    with pytest.raises(ParameterError):
        Method.parse("kmeans")
