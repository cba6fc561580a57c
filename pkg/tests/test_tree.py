import numpy as np
import pytest
from sklearn.tree import DecisionTreeRegressor

from netrank import ParameterError, fit_regression_tree
from netrank.ranking import _kernels


def best_root_split(X, y):
    """Exhaustive oracle: feature, midpoint threshold and SSE drop of the
    best single split."""
    sse = lambda v: float(((v - v.mean()) ** 2).sum()) if v.size else 0.0
    parent = sse(y)
    best = (-np.inf, None, None)
    for j in range(X.shape[1]):
        vals = np.unique(X[:, j])
        for a, b in zip(vals[:-1], vals[1:]):
            thr = 0.5 * (a + b)
            mask = X[:, j] <= thr
            drop = parent - sse(y[mask]) - sse(y[~mask])
            if drop > best[0] + 1e-12:
                best = (drop, j, thr)
    return best


def test_single_example_is_a_leaf():
    tree = fit_regression_tree([[0.3, 0.1]], [2.5])
    assert tree.n_nodes == 1 and tree.n_splits == 0
    assert tree.predict([[9.0, 9.0]])[0] == 2.5


def test_constant_target_is_a_leaf():
    rng = np.random.default_rng(0)
    tree = fit_regression_tree(rng.random((40, 3)), np.full(40, 1.75))
    assert tree.n_splits == 0
    assert tree.value[0] == 1.75
    np.testing.assert_array_equal(tree.importance, 0.0)


def test_four_point_step():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    tree = fit_regression_tree(X, y, mtry=1)
    assert tree.n_nodes == 3
    assert tree.feature[0] == 0 and tree.threshold[0] == 1.5
    assert tree.importance[0] == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_array_equal(tree.predict(X), y)


@pytest.mark.parametrize("seed", range(20))
def test_root_split_matches_exhaustive_oracle(seed):
    rng = np.random.default_rng(seed)
    n, p = rng.integers(5, 30), rng.integers(1, 5)
    X = np.round(rng.random((n, p)), 2)
    y = rng.normal(size=n)
    tree = fit_regression_tree(X, y, mtry=p, rng=seed)
    drop, j, thr = best_root_split(X, y)
    # rounded inputs can tie across features; the achieved drop must still be optimal
    f, t = tree.feature[0], tree.threshold[0]
    sse = lambda v: ((v - v.mean()) ** 2).sum()
    kids = X[:, f] <= t
    assert sse(y) - sse(y[kids]) - sse(y[~kids]) == pytest.approx(drop, rel=1e-12)
    assert tree.importance.sum() >= drop - 1e-12
    if (f, t) == (j, pytest.approx(thr)):
        assert tree.value[tree.left[0]] == pytest.approx(y[kids].mean())


def test_fully_grown_tree_interpolates_distinct_rows():
    rng = np.random.default_rng(1)
    X = rng.random((60, 4))
    y = rng.normal(size=60)
    tree = fit_regression_tree(X, y, mtry=2, rng=3)
    np.testing.assert_allclose(tree.predict(X), y, atol=1e-12)
    # total SSE drop over the tree equals the root SSE when leaves are pure
    assert tree.importance.sum() == pytest.approx(((y - y.mean()) ** 2).sum())


@pytest.mark.parametrize("seed", range(5))
def test_importances_match_sklearn_with_all_features(seed):
    # nodes of two rows tie across every feature, so stop before those
    rng = np.random.default_rng(seed)
    X = rng.random((200, 5))
    y = np.sin(4 * X[:, 0]) + X[:, 1] ** 2 + 0.1 * rng.normal(size=200)
    ours = fit_regression_tree(X, y, mtry=5, rng=seed, min_samples_split=20)
    ref = DecisionTreeRegressor(random_state=seed, min_samples_split=20).fit(X, y)
    assert ours.n_nodes == ref.tree_.node_count
    np.testing.assert_allclose(ours.importance / ours.importance.sum(),
                               ref.feature_importances_, atol=1e-9)


def test_min_samples_split_stops_growth():
    rng = np.random.default_rng(2)
    X, y = rng.random((30, 2)), rng.random(30)
    assert fit_regression_tree(X, y, min_samples_split=31).n_splits == 0
    shallow = fit_regression_tree(X, y, min_samples_split=10, rng=0)
    deep = fit_regression_tree(X, y, min_samples_split=2, rng=0)
    assert shallow.n_splits < deep.n_splits


def test_integer_weights_equal_row_duplication():
    # one feature, so neither feature draws nor cross-feature ties are involved
    rng = np.random.default_rng(4)
    X, y = rng.random((25, 1)), rng.random(25)
    w = rng.integers(0, 4, size=25).astype(float)
    w[0] = 1.0
    weighted = fit_regression_tree(X, y, sample_weight=w)
    rep = np.repeat(np.arange(25), w.astype(int))
    dup = fit_regression_tree(X[rep], y[rep])
    assert weighted.n_nodes == dup.n_nodes
    np.testing.assert_allclose(weighted.importance, dup.importance, rtol=1e-10)
    np.testing.assert_array_equal(weighted.threshold, dup.threshold)
    np.testing.assert_allclose(weighted.predict(X), dup.predict(X), rtol=1e-12)


def test_split_search_modes_grow_identical_trees():
    rng = np.random.default_rng(5)
    X, y = rng.random((300, 9)), rng.random(300)
    XT = np.ascontiguousarray(X.T)
    order = np.argsort(XT, axis=1, kind="stable").astype(np.int32)
    w = np.ones(300)
    out = []
    modes = ((1e9, 0.0, 9), (0.0, 0.0, 9), (2.0, 0.0, 9), (1e9, 0.0, 1),
             (0.0, 1e9, 9), (0.0, 2.0, 1), (2.0, 2.0, 9))
    for ratio, scan, rows in modes:
        bufs = [np.empty(601, dtype=np.int64), np.empty(601), np.empty(601, dtype=np.int64),
                np.empty(601, dtype=np.int64), np.empty(601), np.zeros(9)]
        state = np.array([12345], dtype=np.uint64)
        S = _kernels.presorted_rows(order, w, rows)
        k = _kernels.grow_tree(XT, y, w, S, order, 3, 2.0, ratio, scan, state, *bufs)
        out.append([b[:k] for b in bufs[:5]] + [bufs[5]])
    for other in out[1:]:
        for a, b in zip(out[0], other):
            np.testing.assert_array_equal(a, b)


def test_invalid_arguments():
    X, y = np.zeros((4, 2)), np.zeros(4)
    with pytest.raises(ParameterError):
        fit_regression_tree(X, y, mtry=3)
    with pytest.raises(ParameterError):
        fit_regression_tree(X, y, mtry=0)
    with pytest.raises(ParameterError):
        fit_regression_tree(X, np.zeros(3))
    with pytest.raises(ParameterError):
        fit_regression_tree(X, y, sample_weight=[-1, 1, 1, 1])
    with pytest.raises(ParameterError):
        fit_regression_tree(np.zeros((0, 2)), np.zeros(0))
