import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from netrank import (
    AdjacencyMatrix,
    Ikeda,
    Logistic,
    ParameterError,
    TrajectoryPanel,
    UndefinedCorrelationError,
    add_observation_noise,
    generate_er_network,
    map_step,
    mean_pairwise_correlation,
    simulate,
)
from netrank.dynamics import coupling_matrix, map_from_params


class TestAdjacency:
    def test_rejects_self_loops_and_bad_shapes(self):
        with pytest.raises(ParameterError):
            AdjacencyMatrix(np.eye(3, dtype=bool))
        with pytest.raises(ParameterError):
            AdjacencyMatrix(np.zeros((2, 3), dtype=bool))
        with pytest.raises(ParameterError):
            AdjacencyMatrix(np.zeros((1, 1), dtype=bool))

    def test_edges_round_trip(self):
        adj = generate_er_network(10, 0.3, seed=1)
        assert AdjacencyMatrix.from_edges(10, adj.edges()) == adj
        for src, dst in adj.edges():
            assert adj.a[dst, src]

    def test_permuted(self):
        a = AdjacencyMatrix.from_edges(3, [(0, 1), (1, 2)])
        b = a.permuted([2, 0, 1])
        # old node 2 is new node 0, old 0 -> new 1, old 1 -> new 2
        assert set(b.edges()) == {(1, 2), (2, 0)}

    def test_immutable(self):
        adj = generate_er_network(5, 0.5, seed=0)
        with pytest.raises(ValueError):
            adj.a[0, 1] = True


class TestErNetwork:
    def test_mean_link_count_over_seeds(self):
        counts = np.array([generate_er_network(25, 0.1, seed=s).n_links for s in range(1000)])
        pairs = 25 * 24
        mean, var = 0.1 * pairs, pairs * 0.1 * 0.9
        se = np.sqrt(var / counts.size)
        assert abs(counts.mean() - mean) < 3 * se
        # and the spread matches the binomial variance
        assert 0.8 * var < counts.var(ddof=1) < 1.2 * var

    def test_vanishing_rho_gives_no_links(self):
        assert generate_er_network(2, 1e-9, seed=0).n_links == 0

    def test_deterministic(self):
        assert generate_er_network(25, 0.1, seed=11) == generate_er_network(25, 0.1, seed=11)
        assert generate_er_network(25, 0.1, seed=11) != generate_er_network(25, 0.1, seed=12)

    def test_no_self_loops(self):
        for s in range(20):
            assert not generate_er_network(6, 0.9, seed=s).a.diagonal().any()

    @pytest.mark.parametrize("n,rho", [(1, 0.1), (5, 0.0), (5, 1.0), (5, -0.2), (2.5, 0.1)])
    def test_invalid_parameters(self, n, rho):
        with pytest.raises(ParameterError):
            generate_er_network(n, rho)


class TestMapStep:
    def test_logistic_cases(self):
        assert map_step(0.5, Logistic(4.0)) == 1.0
        assert map_step(0.75, Logistic(4.0)) == 0.75
        assert map_step(0.0, Logistic(4.0)) == 0.0

    def test_ikeda_zero_state(self):
        z = map_step(0j, Ikeda(0.9))
        assert z == 1 + 0j

    def test_ikeda_matches_component_form(self):
        rng = np.random.default_rng(0)
        x, y = rng.normal(size=2)
        u = 0.9
        t = 0.4 - 6.0 / (1 + x * x + y * y)
        expect = (1 + u * (x * np.cos(t) - y * np.sin(t)), u * (x * np.sin(t) + y * np.cos(t)))
        z = map_step(complex(x, y), Ikeda(u))
        assert z.real == pytest.approx(expect[0], abs=1e-14)
        assert z.imag == pytest.approx(expect[1], abs=1e-14)

    def test_invalid_map_parameters(self):
        with pytest.raises(ParameterError):
            Logistic(0.0)
        with pytest.raises(ParameterError):
            Ikeda(-1.0)
        with pytest.raises(ParameterError):
            map_from_params({"kind": "henon"})


class TestSimulate:
    def test_shape_and_meta(self):
        adj = generate_er_network(6, 0.2, seed=0)
        panel = simulate(adj, Logistic(), 0.3, 50, transient=5, seed=2)
        assert panel.x.shape == (6, 50)
        assert panel.meta["map"] == {"kind": "logistic", "r": 4.0}
        assert panel.meta["transient"] == 5

    def test_decoupled_equals_bare_iteration(self):
        adj = generate_er_network(5, 0.5, seed=4)
        panel = simulate(adj, Logistic(), 0.0, 40, seed=9)
        x = panel.x[:, 0].copy()
        for t in range(1, 40):
            x = 4.0 * x * (1.0 - x)
            np.testing.assert_array_equal(panel.x[:, t], x)

    def test_first_column_is_initial_condition(self):
        adj = generate_er_network(4, 0.5, seed=1)
        init = np.array([0.1, 0.2, 0.3, 0.4])
        panel = simulate(adj, Logistic(), 0.5, 3, initial=init)
        np.testing.assert_array_equal(panel.x[:, 0], init)

    def test_transient_shifts_the_recording(self):
        adj = generate_er_network(4, 0.5, seed=1)
        a = simulate(adj, Logistic(), 0.5, 30, transient=0, seed=3)
        b = simulate(adj, Logistic(), 0.5, 20, transient=10, seed=3)
        np.testing.assert_array_equal(a.x[:, 10:], b.x)

    def test_full_coupling_identical_start_stays_synchronised(self):
        a = ~np.eye(5, dtype=bool)
        panel = simulate(AdjacencyMatrix(a), Logistic(), 1.0, 100, initial=np.full(5, 0.3))
        assert np.all(panel.x == panel.x[0])

    def test_coupling_rule_one_step(self):
        adj = AdjacencyMatrix.from_edges(3, [(1, 0), (2, 0), (0, 1)])
        x0 = np.array([0.2, 0.6, 0.9])
        eps = 0.3
        f = 4 * x0 * (1 - x0)
        expect = np.array([
            (1 - eps) * f[0] + eps * (f[1] + f[2]) / 2,
            (1 - eps) * f[1] + eps * f[0],
            f[2],  # no inputs: bare map
        ])
        panel = simulate(adj, Logistic(), eps, 2, initial=x0)
        np.testing.assert_allclose(panel.x[:, 1], expect, rtol=0, atol=1e-15)

    def test_coupling_matrix_rows(self):
        adj = AdjacencyMatrix.from_edges(3, [(1, 0), (2, 0)])
        w = coupling_matrix(adj)
        np.testing.assert_array_equal(w.sum(axis=1), 1.0)
        assert w[1, 1] == 1.0 and w[2, 2] == 1.0

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 10**6), eps=st.floats(0.0, 1.0), n=st.integers(2, 12))
    def test_logistic_states_stay_in_unit_interval(self, seed, eps, n):
        adj = generate_er_network(n, 0.3, seed=seed)
        panel = simulate(adj, Logistic(), eps, 300, seed=seed)
        assert panel.x.min() >= 0.0 and panel.x.max() <= 1.0

    def test_deterministic(self):
        adj = generate_er_network(10, 0.1, seed=5)
        assert simulate(adj, Logistic(), 0.5, 200, seed=1) == simulate(adj, Logistic(), 0.5, 200, seed=1)
        assert simulate(adj, Logistic(), 0.5, 200, seed=1) != simulate(adj, Logistic(), 0.5, 200, seed=2)

    def test_ikeda_observes_real_part_of_complex_coupling(self):
        adj = AdjacencyMatrix.from_edges(2, [(0, 1)])
        z0 = np.array([0.3 + 0.1j, 0.5 + 0.7j])
        kind = Ikeda(0.9)
        panel = simulate(adj, kind, 0.4, 3, initial=z0)
        z = z0
        for t in range(3):
            np.testing.assert_allclose(panel.x[:, t], z.real, atol=1e-15)
            fz = kind.step(z)
            z = np.array([fz[0], 0.6 * fz[1] + 0.4 * fz[0]])

    def test_ikeda_stays_bounded(self):
        adj = generate_er_network(25, 0.1, seed=0)
        panel = simulate(adj, Ikeda(0.9), 0.6, 2000, seed=0)
        assert np.isfinite(panel.x).all()
        assert np.abs(panel.x).max() < 1 / (1 - 0.9) + 1

    @pytest.mark.parametrize("kw", [dict(eps=-0.1), dict(eps=1.5), dict(l=1), dict(transient=-1)])
    def test_invalid_arguments(self, kw):
        adj = generate_er_network(4, 0.5, seed=0)
        args = dict(eps=0.5, l=10, transient=0)
        args.update(kw)
        with pytest.raises(ParameterError):
            simulate(adj, Logistic(), args["eps"], args["l"], args["transient"])


class TestNoise:
    def test_zero_sigma_is_bitwise_equal(self, small_panel):
        _, panel = small_panel
        out = add_observation_noise(panel, 0.0, seed=1)
        assert np.array_equal(out.x, panel.x)
        assert out.x is not panel.x

    def test_gaussian_moments_and_ks(self):
        zeros = TrajectoryPanel(np.zeros((20, 10000)))
        noisy = add_observation_noise(zeros, 1.0, seed=4).x.ravel()
        n = noisy.size
        assert abs(noisy.mean()) < 3 / np.sqrt(n)
        # std of the sample std is about 1/sqrt(2n)
        assert abs(noisy.std(ddof=1) - 1.0) < 3 / np.sqrt(2 * n)
        assert stats.kstest(noisy, "norm").pvalue > 0.01

    def test_noise_layer_distribution(self, small_panel):
        _, panel = small_panel
        big = TrajectoryPanel(np.tile(panel.x, (1, 50)))
        diff = (add_observation_noise(big, 0.25, seed=8).x - big.x).ravel()
        assert diff.size >= 10**5
        assert stats.kstest(diff / 0.25, "norm").pvalue > 0.01

    def test_input_untouched_and_deterministic(self, small_panel):
        _, panel = small_panel
        before = panel.x.copy()
        a = add_observation_noise(panel, 0.1, seed=2)
        assert np.array_equal(panel.x, before)
        assert a == add_observation_noise(panel, 0.1, seed=2)

    def test_negative_sigma(self, small_panel):
        with pytest.raises(ParameterError):
            add_observation_noise(small_panel[1], -0.1)


class TestCorrelation:
    def test_identical_rows(self):
        row = np.sin(np.arange(50.0))
        assert mean_pairwise_correlation(TrajectoryPanel(np.vstack([row, row, row]))) == pytest.approx(1.0)

    def test_anti_correlated(self):
        row = np.sin(np.arange(50.0))
        assert mean_pairwise_correlation(TrajectoryPanel(np.vstack([row, -row]))) == pytest.approx(1.0)

    def test_independent_chaotic_nodes(self):
        adj = generate_er_network(10, 0.1, seed=0)
        for s in range(5):
            panel = simulate(adj, Logistic(), 0.0, 5000, seed=s)
            assert mean_pairwise_correlation(panel) < 0.1

    def test_constant_rows_are_skipped(self):
        row = np.sin(np.arange(50.0))
        x = np.vstack([row, row, np.full(50, 0.3)])
        assert mean_pairwise_correlation(TrajectoryPanel(x)) == pytest.approx(1.0)
        with pytest.raises(UndefinedCorrelationError):
            mean_pairwise_correlation(TrajectoryPanel(np.vstack([row, np.zeros(50)])))

    def test_relabel_and_affine_invariance(self, small_panel):
        _, panel = small_panel
        c = mean_pairwise_correlation(panel)
        perm = np.random.default_rng(1).permutation(panel.n)
        assert mean_pairwise_correlation(panel.permuted(perm)) == pytest.approx(c, abs=1e-12)
        x = panel.x.copy()
        x[2] = -3.0 * x[2] + 7.0
        assert mean_pairwise_correlation(TrajectoryPanel(x)) == pytest.approx(c, abs=1e-12)
