"""Plan distances, Ward clustering, and the regression helper."""

import numpy as np
import pytest
import scipy.stats

from metaplan import (Dendrogram, MetaPlanConfig, cut, maze_to_mdp, ols_fit,
                      optimize, parse_maze, plan_distance_matrix,
                      symmetric_planning_distance, ward_cluster)

SMALL_MAZE = "G...\n.#..\n....\n...S\n"


@pytest.fixture(scope="module")
def small_run():
    mdp = maze_to_mdp(parse_maze(SMALL_MAZE))
    config = MetaPlanConfig(cost_weight=0.02, outer_iterations=40,
                            horizon=25, seed=0)
    return mdp, optimize(mdp, config)


def naive_ward(d: np.ndarray):
    """Reference agglomeration: explicit cluster bookkeeping, no matrix
    surgery. Returns (heights, partitions) where partitions[k] is the
    set-of-frozensets partition after n-1-k merges... keyed by cluster
    count k."""
    n = d.shape[0]
    dist = {(i, j): float(d[i, j]) for i in range(n) for j in range(i + 1, n)}
    leaves = {i: frozenset([i]) for i in range(n)}
    sizes = {i: 1 for i in range(n)}
    heights = []
    partitions = {n: frozenset(leaves.values())}
    next_id = n
    while len(leaves) > 1:
        (a, b), h = min(dist.items(), key=lambda kv: kv[1])
        heights.append(h)
        na, nb = sizes[a], sizes[b]
        merged = leaves[a] | leaves[b]
        others = [c for c in leaves if c not in (a, b)]
        for c in others:
            dac = dist[tuple(sorted((a, c)))]
            dbc = dist[tuple(sorted((b, c)))]
            nc = sizes[c]
            new = ((na + nc) * dac + (nb + nc) * dbc - nc * h) / (na + nb + nc)
            dist[tuple(sorted((next_id, c)))] = new
        for key in list(dist):
            if a in key or b in key:
                del dist[key]
        del leaves[a], leaves[b], sizes[a], sizes[b]
        leaves[next_id] = merged
        sizes[next_id] = na + nb
        partitions[len(leaves)] = frozenset(leaves.values())
        next_id += 1
    return heights, partitions


def random_distance_matrix(seed: int, n: int = 10) -> np.ndarray:
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.5, 10.0, size=(n, n))
    d = x + x.T
    np.fill_diagonal(d, 0.0)
    return d


class TestSymmetricDistance:
    def test_matches_manual_double_kl(self, small_run):
        _, result = small_run
        a, b = 1, 6
        pi = result.plans.pi
        with np.errstate(divide="ignore"):
            logpi = np.log(pi)
        fwd = np.nansum(np.where(pi[a] > 0,
                                 pi[a] * (logpi[a] - logpi[b]), 0.0))
        bwd = np.nansum(np.where(pi[b] > 0,
                                 pi[b] * (logpi[b] - logpi[a]), 0.0))
        assert np.isclose(symmetric_planning_distance(result, a, b),
                          fwd + bwd, atol=1e-8)

    def test_symmetric_and_zero_on_self(self, small_run):
        _, result = small_run
        assert symmetric_planning_distance(result, 3, 3) == 0.0
        assert np.isclose(symmetric_planning_distance(result, 2, 5),
                          symmetric_planning_distance(result, 5, 2),
                          atol=1e-12)


class TestDistanceMatrix:
    def test_matches_pairwise_loop(self, small_run):
        _, result = small_run
        d = plan_distance_matrix(result)
        n = d.shape[0]
        for i in range(n):
            for j in range(n):
                assert np.isclose(
                    d[i, j], symmetric_planning_distance(result, i, j),
                    atol=1e-8)

    def test_shape_and_invariants(self, small_run):
        mdp, result = small_run
        d = plan_distance_matrix(result)
        assert d.shape == (mdp.n_states, mdp.n_states)
        assert np.allclose(d, d.T, atol=1e-10)
        assert np.all(np.diag(d) == 0.0)
        assert np.all(d >= 0.0)


class TestWardCluster:
    def test_hand_worked_four_points(self):
        d = np.array([[0.0, 1.0, 4.0, 9.0],
                      [1.0, 0.0, 5.0, 8.0],
                      [4.0, 5.0, 0.0, 2.0],
                      [9.0, 8.0, 2.0, 0.0]])
        dendro = ward_cluster(d)
        assert dendro.n_leaves == 4
        assert dendro.merges[0] == (0, 1, 1.0, 2)
        assert dendro.merges[1] == (2, 3, 2.0, 2)
        a, b, h, size = dendro.merges[2]
        assert {a, b} == {4, 5} and size == 4
        # ((1+2)*17/3 + (1+2)*11 - 2*2) / 4, with d(01,2)=17/3, d(01,3)=11
        assert np.isclose(h, 11.5)
        assert np.array_equal(cut(dendro, 2), [0, 0, 1, 1])

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_matches_naive_reference(self, seed):
        d = random_distance_matrix(seed, n=11)
        dendro = ward_cluster(d)
        ref_heights, ref_partitions = naive_ward(d)
        assert np.allclose(dendro.heights(), ref_heights, atol=1e-9)
        for k in range(1, 12):
            labels = cut(dendro, k)
            got = frozenset(frozenset(np.flatnonzero(labels == c).tolist())
                            for c in range(k))
            assert got == ref_partitions[k]

    @pytest.mark.parametrize("seed", range(8))
    def test_heights_nondecreasing(self, seed):
        dendro = ward_cluster(random_distance_matrix(seed, n=12))
        h = dendro.heights()
        assert np.all(np.diff(h) >= -1e-12)

    def test_merge_ids_follow_convention(self):
        d = random_distance_matrix(9, n=6)
        dendro = ward_cluster(d)
        for step, (a, b, _, _) in enumerate(dendro.merges):
            assert a < 6 + step and b < 6 + step and a != b

    def test_validation(self):
        with pytest.raises(ValueError, match="square"):
            ward_cluster(np.zeros((2, 3)))
        asym = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(ValueError, match="symmetric"):
            ward_cluster(asym)
        neg = np.array([[0.0, -1.0], [-1.0, 0.0]])
        with pytest.raises(ValueError, match="nonnegative"):
            ward_cluster(neg)
        diag = np.array([[1.0, 2.0], [2.0, 0.0]])
        with pytest.raises(ValueError, match="diagonal"):
            ward_cluster(diag)


class TestCut:
    def test_k_equals_n_is_singletons(self):
        d = random_distance_matrix(10, n=5)
        dendro = ward_cluster(d)
        assert np.array_equal(cut(dendro, 5), np.arange(5))

    def test_k_one_is_single_cluster(self):
        d = random_distance_matrix(11, n=5)
        assert np.array_equal(cut(ward_cluster(d), 1), np.zeros(5, dtype=int))

    def test_labels_ordered_by_first_leaf(self):
        d = random_distance_matrix(12, n=8)
        labels = cut(ward_cluster(d), 3)
        firsts = [np.flatnonzero(labels == c).min() for c in range(3)]
        assert firsts == sorted(firsts)

    def test_invalid_k(self):
        dendro = ward_cluster(random_distance_matrix(13, n=4))
        for k in (0, 5):
            with pytest.raises(ValueError):
                cut(dendro, k)

    def test_heights_accessor(self):
        dendro = Dendrogram(n_leaves=3,
                            merges=((0, 1, 0.5, 2), (2, 3, 1.5, 3)))
        assert np.array_equal(dendro.heights(), [0.5, 1.5])


class TestOlsFit:
    def test_matches_scipy_linregress(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=40)
        y = 2.5 * x - 1.0 + rng.normal(scale=0.3, size=40)
        slope, intercept, r2 = ols_fit(x, y)
        ref = scipy.stats.linregress(x, y)
        assert np.isclose(slope, ref.slope, atol=1e-12)
        assert np.isclose(intercept, ref.intercept, atol=1e-12)
        assert np.isclose(r2, ref.rvalue ** 2, atol=1e-12)

    def test_perfect_fit(self):
        x = np.arange(5.0)
        slope, intercept, r2 = ols_fit(x, 3.0 * x + 2.0)
        assert np.isclose(slope, 3.0) and np.isclose(intercept, 2.0)
        assert np.isclose(r2, 1.0)

    def test_constant_x_rejected(self):
        with pytest.raises(ValueError, match="constant"):
            ols_fit(np.ones(5), np.arange(5.0))

    def test_constant_y_gives_zero_r_squared(self):
        slope, intercept, r2 = ols_fit(np.arange(5.0), np.ones(5))
        assert slope == 0.0 and intercept == 1.0 and r2 == 0.0

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            ols_fit(np.arange(3.0), np.arange(4.0))
        with pytest.raises(ValueError):
            ols_fit(np.array([1.0]), np.array([2.0]))
