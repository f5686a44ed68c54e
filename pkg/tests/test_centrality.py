import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from enflow import (
    ConvergenceError,
    NetworkShape,
    NumericalError,
    ReducibleNetworkError,
    SupraAdjacency,
    TemporalMultilayerNetwork,
    ValidationError,
    eigenvector_centrality,
    hits,
    md_hits,
    md_hits_single_period,
    rank,
)

from oracles import dense_hits, naive_md_hits


def net_from_dense(stack, n, n_layers, labels=None):
    shape = NetworkShape(n, n_layers)
    labels = labels or list(range(len(stack)))
    return TemporalMultilayerNetwork(
        [(label, SupraAdjacency(shape, m)) for label, m in zip(labels, stack)]
    )


# ---------------------------------------------------------------------------
# eigenvector centrality
# ---------------------------------------------------------------------------


def test_eigenvector_symmetric_swap():
    scores = eigenvector_centrality(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(scores.centrality, [0.5, 0.5], atol=1e-12)
    assert scores.spectral_radius == pytest.approx(1.0, abs=1e-12)


def test_eigenvector_cycle_uniform():
    w = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=float)
    scores = eigenvector_centrality(w)
    assert np.allclose(scores.centrality, [1 / 3] * 3, atol=1e-12)
    assert scores.spectral_radius == pytest.approx(1.0, abs=1e-10)


def test_eigenvector_two_by_two_hand_solution():
    # characteristic polynomial x^2 - 2 = 0: rho = sqrt(2), x ~ (sqrt(2), 1)
    scores = eigenvector_centrality(np.array([[0.0, 2.0], [1.0, 0.0]]))
    root2 = math.sqrt(2.0)
    assert scores.spectral_radius == pytest.approx(root2, rel=1e-10)
    expected = np.array([root2, 1.0])
    expected /= expected.sum()
    assert np.allclose(scores.centrality, expected, atol=1e-10)


def test_eigenvector_reducible_raises_and_fallback():
    w = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ReducibleNetworkError, match="strongly connected"):
        eigenvector_centrality(w)
    # largest component of a 3-node graph with a 2-cycle plus a pendant node
    w = np.array([[0, 1, 1], [1, 0, 0], [0, 0, 0]], dtype=float)
    scores = eigenvector_centrality(w, largest_scc=True)
    assert scores.centrality[2] == 0.0
    assert np.allclose(scores.centrality[:2], [0.5, 0.5], atol=1e-10)
    assert scores.spectral_radius == pytest.approx(1.0, abs=1e-10)


def test_eigenvector_zero_matrix():
    with pytest.raises(NumericalError):
        eigenvector_centrality(np.zeros((2, 2)))


def test_eigenvector_matches_dense_eigensolver():
    rng = np.random.default_rng(0)
    for _ in range(10):
        w = rng.uniform(0.1, 1.0, (6, 6))  # strictly positive: irreducible
        scores = eigenvector_centrality(w, tol=1e-13)
        vals = np.linalg.eigvals(w)
        assert scores.spectral_radius == pytest.approx(np.abs(vals).max(), rel=1e-9)
        residual = np.abs(w @ scores.centrality - scores.spectral_radius * scores.centrality)
        assert residual.sum() <= 1e-10 * scores.spectral_radius


# ---------------------------------------------------------------------------
# hub/authority scores
# ---------------------------------------------------------------------------


def test_hits_single_arc():
    w = np.array([[0.0, 1.0], [0.0, 0.0]])
    scores = hits(w)
    assert np.allclose(scores.hub, [1.0, 0.0], atol=1e-12)
    assert np.allclose(scores.authority, [0.0, 1.0], atol=1e-12)


def test_hits_star():
    w = np.zeros((3, 3))
    w[0, 1] = w[0, 2] = 1.0
    scores = hits(w)
    assert np.allclose(scores.hub, [1.0, 0.0, 0.0], atol=1e-12)
    assert np.allclose(scores.authority, [0.0, 0.5, 0.5], atol=1e-12)


def test_hits_weighted_digraph_matches_eigen_oracle():
    w = np.zeros((3, 3))
    w[0, 1] = 2.0
    w[2, 1] = 1.0
    w[0, 2] = 1.0
    scores = hits(w, tol=1e-14)
    hub, authority = dense_hits(w)
    assert np.allclose(scores.hub, hub, atol=1e-9)
    assert np.allclose(scores.authority, authority, atol=1e-9)


def test_hits_spectral_equivalence_random():
    rng = np.random.default_rng(42)
    for _ in range(20):
        w = rng.uniform(0.05, 1.0, (5, 5))
        scores = hits(w, tol=1e-14)
        hub, authority = dense_hits(w)
        assert np.allclose(scores.hub, hub, atol=1e-8)
        assert np.allclose(scores.authority, authority, atol=1e-8)


def test_hits_zero_matrix():
    with pytest.raises(NumericalError):
        hits(np.zeros((3, 3)))


def test_hits_max_iter_error_carries_residual():
    rng = np.random.default_rng(1)
    w = rng.uniform(0.1, 1.0, (5, 5))
    with pytest.raises(ConvergenceError) as err:
        hits(w, tol=1e-16, max_iter=2)
    assert err.value.residuals


# ---------------------------------------------------------------------------
# five-vector temporal scores
# ---------------------------------------------------------------------------


def test_md_hits_singleton():
    net = net_from_dense([np.array([[1.0]])], 1, 1)
    scores = md_hits(net)
    for vec in scores.as_dict().values():
        assert np.allclose(vec, [1.0])


def test_md_hits_two_node_symmetric():
    w = np.array([[0.0, 1.0], [1.0, 0.0]])
    net = net_from_dense([w], 2, 1)
    scores = md_hits(net)
    assert np.allclose(scores.node_hub, [0.5, 0.5], atol=1e-12)
    assert np.allclose(scores.node_authority, [0.5, 0.5], atol=1e-12)
    assert np.allclose(scores.layer_broadcast, [1.0])
    assert np.allclose(scores.layer_receive, [1.0])
    assert np.allclose(scores.time, [1.0])


def test_md_hits_matches_naive_oracle():
    rng = np.random.default_rng(17)
    for _ in range(5):
        n, n_layers, n_periods = 2, 2, 2
        dim = n * n_layers
        stack = rng.uniform(0.05, 1.0, (n_periods, dim, dim)) * (
            rng.random((n_periods, dim, dim)) < 0.7
        )
        if not stack.any():
            continue
        net = net_from_dense(list(stack), n, n_layers)
        scores = md_hits(net, tol=1e-13)
        expected = naive_md_hits(n, n_layers, n_periods, stack, scores.gamma, tol=1e-12)
        for got, want in zip(
            (scores.node_hub, scores.node_authority, scores.layer_broadcast,
             scores.layer_receive, scores.time),
            expected,
        ):
            assert np.allclose(got, want, atol=1e-8)


def test_md_hits_single_period_wrapper():
    rng = np.random.default_rng(23)
    shape = NetworkShape(26, 3)
    dense = rng.uniform(0, 1, (78, 78)) * (rng.random((78, 78)) < 0.1)
    matrix = SupraAdjacency(shape, dense)
    single = md_hits_single_period(matrix)
    assert np.allclose(single.time, [1.0])
    wrapped = md_hits(TemporalMultilayerNetwork([(0, matrix)]))
    assert np.array_equal(single.node_hub, wrapped.node_hub)
    assert np.array_equal(single.node_authority, wrapped.node_authority)
    assert np.array_equal(single.layer_broadcast, wrapped.layer_broadcast)
    assert np.array_equal(single.layer_receive, wrapped.layer_receive)


def test_md_hits_scale_invariance():
    rng = np.random.default_rng(5)
    stack = rng.uniform(0.1, 1.0, (2, 6, 6)) * (rng.random((2, 6, 6)) < 0.8)
    base = md_hits(net_from_dense(list(stack), 3, 2), tol=1e-12)
    for lam in (1e-3, 1e3):
        scaled = md_hits(net_from_dense([lam * m for m in stack], 3, 2), tol=1e-12)
        for key, vec in base.as_dict().items():
            assert np.allclose(scaled.as_dict()[key], vec, atol=1e-8), key


def test_md_hits_gamma_one_reduces_to_hits():
    rng = np.random.default_rng(31)
    for _ in range(5):
        w = rng.uniform(0.05, 1.0, (6, 6))
        net = net_from_dense([w], 6, 1)
        scores = md_hits(net, gamma=(1.0,) * 5, tol=1e-12, max_iter=20_000)
        classic = hits(w, tol=1e-14)
        assert np.allclose(scores.node_hub, classic.hub, atol=1e-6)
        assert np.allclose(scores.node_authority, classic.authority, atol=1e-6)
        assert np.array_equal(
            np.argsort(-scores.node_hub), np.argsort(-classic.hub)
        )


def test_md_hits_permutation_equivariance():
    rng = np.random.default_rng(13)
    n, n_layers, n_periods = 3, 2, 2
    dim = n * n_layers
    stack = rng.uniform(0.1, 1.0, (n_periods, dim, dim)) * (
        rng.random((n_periods, dim, dim)) < 0.7
    )
    perm = np.array([2, 0, 1])  # sector permutation
    permuted = np.zeros_like(stack)
    for t in range(n_periods):
        for a in range(n_layers):
            for b in range(n_layers):
                block = stack[t, a * n : (a + 1) * n, b * n : (b + 1) * n]
                permuted[t, a * n : (a + 1) * n, b * n : (b + 1) * n] = block[
                    np.ix_(perm, perm)
                ]
    base = md_hits(net_from_dense(list(stack), n, n_layers), tol=1e-13)
    other = md_hits(net_from_dense(list(permuted), n, n_layers), tol=1e-13)
    assert np.allclose(other.node_hub, base.node_hub[perm], atol=1e-10)
    assert np.allclose(other.node_authority, base.node_authority[perm], atol=1e-10)
    assert np.allclose(other.layer_broadcast, base.layer_broadcast, atol=1e-10)
    assert np.allclose(other.layer_receive, base.layer_receive, atol=1e-10)
    assert np.allclose(other.time, base.time, atol=1e-10)


def test_md_hits_outputs_are_unit_shares():
    rng = np.random.default_rng(2)
    stack = rng.uniform(0, 1, (3, 6, 6)) * (rng.random((3, 6, 6)) < 0.5)
    scores = md_hits(net_from_dense(list(stack), 2, 3))
    for vec in scores.as_dict().values():
        assert np.isfinite(vec).all()
        assert vec.min() >= 0
        assert vec.sum() == pytest.approx(1.0, abs=1e-12)


def test_md_hits_structural_zero_entity():
    # sector 1 never appears as a source: its hub score is pinned to zero
    w = np.zeros((2, 2))
    w[0, 1] = 2.0
    scores = md_hits(net_from_dense([w], 2, 1))
    assert scores.node_hub[1] == 0.0
    assert scores.node_hub[0] == 1.0
    assert scores.node_authority[0] == 0.0


def test_md_hits_validation():
    net = net_from_dense([np.zeros((2, 2))], 2, 1)
    with pytest.raises(ValidationError):
        md_hits(net)
    good = net_from_dense([np.eye(2)], 2, 1)
    with pytest.raises(ValidationError):
        md_hits(good, gamma=(0.2, 0.2))
    with pytest.raises(ValidationError):
        md_hits(good, gamma=(0.0, 0.2, 0.2, 0.2, 0.2))
    with pytest.raises(ValidationError):
        md_hits(good, gamma=(1.1, 0.2, 0.2, 0.2, 0.2))


# ---------------------------------------------------------------------------
# rankings
# ---------------------------------------------------------------------------


def test_rank_basic():
    table = rank([0.2, 0.5, 0.3], ["A", "B", "C"])
    assert table.labels() == ("B", "C", "A")
    assert [r.rank for r in table] == [1, 2, 3]


def test_rank_ties_alphabetical():
    table = rank([0.5, 0.5, 0.5], ["C", "A", "B"])
    assert table.labels() == ("A", "B", "C")
    assert [r.rank for r in table] == [1, 1, 1]


def test_rank_matches_sort_oracle():
    rng = np.random.default_rng(3)
    scores = rng.uniform(0, 1, 10)
    labels = [f"N{i}" for i in range(10)]
    table = rank(scores, labels)
    expected = [labels[i] for i in sorted(range(10), key=lambda i: (-scores[i], labels[i]))]
    assert list(table.labels()) == expected


def test_rank_length_mismatch():
    with pytest.raises(ValidationError):
        rank([0.1], ["A", "B"])


@given(
    scores=st.lists(
        st.floats(min_value=0.0, max_value=1e6, allow_nan=False), min_size=1, max_size=12
    )
)
def test_rank_is_sorted_permutation(scores):
    labels = [f"L{i:02d}" for i in range(len(scores))]
    table = rank(scores, labels)
    assert sorted(table.labels()) == labels
    values = [r.score for r in table]
    assert values == sorted(values, reverse=True)
    assert all(r.rank >= 1 for r in table)
