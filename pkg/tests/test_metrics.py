import numpy as np
import pytest

from drbench.geometry import (
    DistanceMatrix,
    RankMatrix,
    coranking_matrix,
    pairwise_distances,
    rank_matrix,
)
from drbench.metrics import (
    EmbeddingScorer,
    JointRankDistribution,
    ORIENTATIONS,
    entropy,
    joint_distribution,
    k_max_score,
    lcmc,
    local_error,
    mutual_information,
    one_nn_accuracy,
    procrustes_distance,
    q_nx,
    q_nx_curve,
    q_nx_mean,
    spearman_rho,
    spectral_overlap_simple,
    spectral_overlap_weighted,
)

from oracles import (
    local_error_oracle,
    one_nn_oracle,
    procrustes_grid_oracle,
    qnx_oracle,
    random_rank_matrix,
    spearman_oracle,
    spectral_simple_oracle,
    spectral_weighted_oracle,
)


def geometry_pair(n, seed, d_hi=3):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d_hi))
    y = rng.standard_normal((n, 2))
    hi = rank_matrix(pairwise_distances(x))
    lo = rank_matrix(pairwise_distances(y))
    return x, y, hi, lo


def identity_coranking(n, seed=0):
    rng = np.random.default_rng(seed)
    r = rank_matrix(pairwise_distances(rng.standard_normal((n, 2))))
    return coranking_matrix(r, r)


# ---------------------------------------------------------------- Q_NX / LCMC

def test_qnx_perfect_is_one_for_every_k():
    m = identity_coranking(12)
    for K in range(1, 12):
        assert q_nx(m, K).value == pytest.approx(1.0, abs=1e-15)
    assert q_nx_mean(m).value == pytest.approx(1.0, abs=1e-15)


def test_qnx_full_k_is_one_for_any_embedding():
    for seed in range(10):
        _, _, hi, lo = geometry_pair(50, seed)
        m = coranking_matrix(hi, lo)
        assert q_nx(m).value == 1.0  # default K = n-1
        assert abs(q_nx(m, 49).value - 1.0) < 1e-15


def test_qnx_reversed_line_matches_enumeration():
    x = np.array([[0.0], [1.0], [3.0], [7.0], [15.0]])
    y = x[::-1].copy()
    hi = rank_matrix(pairwise_distances(x))
    lo = rank_matrix(pairwise_distances(y))
    m = coranking_matrix(hi, lo)
    assert q_nx(m, 2).value == pytest.approx(qnx_oracle(hi.ranks, lo.ranks, 2))


def test_qnx_k_out_of_range():
    m = identity_coranking(6)
    for K in (0, 6):
        with pytest.raises(ValueError):
            q_nx(m, K)


def test_lcmc_values():
    m = identity_coranking(10)
    n = 10
    assert lcmc(m, 1).value == pytest.approx(1 - 1 / (n - 1), abs=1e-15)
    assert lcmc(m, n - 1).value == pytest.approx(0.0, abs=1e-15)
    _, _, hi, lo = geometry_pair(10, 3)
    mm = coranking_matrix(hi, lo)
    for K in range(1, 10):
        expected = qnx_oracle(hi.ranks, lo.ranks, K) - K / (n - 1)
        assert lcmc(mm, K).value == pytest.approx(expected, abs=1e-12)


def test_kmax_perfect_embedding():
    m = identity_coranking(10)
    score = k_max_score(m)
    assert score.aux["K"] == 1
    assert score.value == pytest.approx(1 - 1 / 9, abs=1e-15)


def test_kmax_prefers_midrange_when_close_ranks_shuffled():
    # keep the top-half neighbor sets but reverse the ranks inside them:
    # Q_NX(1) collapses while Q_NX(h) stays perfect, pushing the argmax past 1
    rng = np.random.default_rng(5)
    n, h = 12, 5
    hi = rank_matrix(pairwise_distances(rng.standard_normal((n, 3)))).ranks
    lo = hi.copy()
    inside = (hi >= 1) & (hi <= h)
    lo[inside] = h + 1 - hi[inside]
    m = coranking_matrix(RankMatrix(hi), RankMatrix(lo))
    score = k_max_score(m)
    assert score.aux["K"] > 1
    curve = [lcmc(m, K).value for K in range(1, n)]
    assert score.value == pytest.approx(max(curve), abs=1e-15)
    assert score.value >= max(curve[0], 0.0)


# ------------------------------------------------- joint distribution, H, MI

def test_joint_distribution_perfect_and_total_mass():
    n = 8
    m = identity_coranking(n)
    p = joint_distribution(m)
    assert np.allclose(np.diag(p.probabilities), 1 / (n - 1))
    assert p.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
    _, _, hi, lo = geometry_pair(9, 2)
    p2 = joint_distribution(coranking_matrix(hi, lo))
    p2.check()


def test_joint_distribution_hand_normalization():
    hi = np.array([[0, 1, 2], [1, 0, 2], [1, 2, 0]])
    lo = np.array([[0, 2, 1], [2, 0, 1], [2, 1, 0]])
    m = coranking_matrix(RankMatrix(np.array(hi)), RankMatrix(np.array(lo)))
    p = joint_distribution(m)
    assert np.array_equal(p.probabilities, np.array([[0.0, 0.5], [0.5, 0.0]]))


def test_entropy_cases():
    n = 10
    assert entropy(joint_distribution(identity_coranking(n))).value == pytest.approx(
        np.log(n - 1), abs=1e-12)
    single = np.zeros((4, 4))
    single[2, 1] = 1.0
    assert entropy(JointRankDistribution(single)).value == 0.0
    _, _, hi, lo = geometry_pair(6, 8)
    p = joint_distribution(coranking_matrix(hi, lo))
    direct = -sum(v * np.log(v) for v in p.probabilities.ravel() if v > 0)
    assert entropy(p).value == pytest.approx(direct, abs=1e-12)


def test_mutual_information_cases():
    n = 10
    assert mutual_information(joint_distribution(identity_coranking(n))).value == \
        pytest.approx(np.log(n - 1), abs=1e-12)
    rng = np.random.default_rng(1)
    u = rng.random(5) + 0.1
    u /= u.sum()
    v = rng.random(5) + 0.1
    v /= v.sum()
    product = JointRankDistribution(np.outer(u, v))
    assert abs(mutual_information(product).value) < 1e-12


def test_information_identity():
    for seed in range(5):
        _, _, hi, lo = geometry_pair(6, seed)
        p = joint_distribution(coranking_matrix(hi, lo))
        row = p.probabilities.sum(axis=1)
        col = p.probabilities.sum(axis=0)
        h_row = -sum(v * np.log(v) for v in row if v > 0)
        h_col = -sum(v * np.log(v) for v in col if v > 0)
        mi = mutual_information(p).value
        assert mi == pytest.approx(h_row + h_col - entropy(p).value, abs=1e-10)
        assert mi >= -1e-12


# ---------------------------------------------------------------- local error

def test_local_error_identity_zero():
    rng = np.random.default_rng(0)
    d = pairwise_distances(rng.standard_normal((8, 3)))
    r = rank_matrix(d)
    assert local_error(d, d, r).value == 0.0


def test_local_error_single_rank1_perturbation():
    d_hi = pairwise_distances(np.array([[0.0], [1.0], [10.0]]))
    delta = 0.25
    lo_vals = d_hi.values.copy()
    lo_vals[0, 1] = lo_vals[1, 0] = 1.0 + delta
    r_hi = rank_matrix(d_hi)
    got = local_error(d_hi, DistanceMatrix(lo_vals), r_hi).value
    assert got == pytest.approx(4 * delta**2, abs=1e-15)


@pytest.mark.parametrize("seed", range(4))
def test_local_error_matches_triple_sum(seed):
    rng = np.random.default_rng(seed)
    d_hi = pairwise_distances(rng.standard_normal((8, 3)))
    d_lo = pairwise_distances(rng.standard_normal((8, 2)))
    r_hi = rank_matrix(d_hi)
    expected = local_error_oracle(d_hi.values, d_lo.values, r_hi.ranks)
    assert local_error(d_hi, d_lo, r_hi).value == pytest.approx(expected, rel=1e-12)


# ----------------------------------------------------------- spectral overlap

def test_spectral_simple_self_and_floor():
    _, _, hi, _ = geometry_pair(7, 0)
    self_score = spectral_overlap_simple(hi, hi).value
    assert self_score == pytest.approx(1.0, abs=1e-12)
    assert self_score == pytest.approx(spectral_simple_oracle(hi.ranks, hi.ranks))
    for seed in range(5):
        _, _, a, b = geometry_pair(7, seed)
        assert 0.0 < spectral_overlap_simple(a, b).value <= 1.0


@pytest.mark.parametrize("seed", range(4))
def test_spectral_simple_matches_brute_force(seed):
    _, _, hi, lo = geometry_pair(5 + seed, seed + 10)
    got = spectral_overlap_simple(hi, lo).value
    assert got == pytest.approx(spectral_simple_oracle(hi.ranks, lo.ranks), abs=1e-12)


def test_spectral_weighted_identity_and_floor():
    n = 9
    _, _, hi, _ = geometry_pair(n, 1)
    assert spectral_overlap_weighted(hi, hi).value == pytest.approx(1.0, abs=1e-12)
    weights = 1.0 / np.arange(1, n)
    w_last = (weights / weights.sum())[-1]
    for seed in range(5):
        _, _, a, b = geometry_pair(n, seed + 20)
        assert spectral_overlap_weighted(a, b).value >= w_last - 1e-15


@pytest.mark.parametrize("seed", range(4))
def test_spectral_weighted_matches_edge_sets(seed):
    _, _, hi, lo = geometry_pair(6, seed + 30)
    got = spectral_overlap_weighted(hi, lo).value
    assert got == pytest.approx(spectral_weighted_oracle(hi.ranks, lo.ranks), abs=1e-12)


def test_spectral_mismatched_sizes():
    _, _, a, _ = geometry_pair(5, 0)
    _, _, b, _ = geometry_pair(6, 0)
    with pytest.raises(ValueError):
        spectral_overlap_weighted(a, b)
    with pytest.raises(ValueError):
        spectral_overlap_simple(a, b)


# -------------------------------------------------------------------- spearman

def test_spearman_identity_and_reversal():
    rng = np.random.default_rng(2)
    d = pairwise_distances(rng.standard_normal((8, 3)))
    assert spearman_rho(d, d).value == pytest.approx(1.0, abs=1e-12)
    flipped = d.values.max() + d.values.min() - d.values
    np.fill_diagonal(flipped, 0.0)
    assert spearman_rho(d, DistanceMatrix(flipped)).value == pytest.approx(-1.0, abs=1e-12)


def test_spearman_matches_rank_then_pearson():
    rng = np.random.default_rng(3)
    a = pairwise_distances(rng.standard_normal((7, 3)))
    b = pairwise_distances(rng.standard_normal((7, 2)))
    iu = np.triu_indices(7, k=1)
    expected = spearman_oracle(a.values[iu], b.values[iu])
    assert spearman_rho(a, b).value == pytest.approx(expected, abs=1e-12)


def test_spearman_degenerate_raises():
    flat = np.ones((5, 5)) - np.eye(5)
    d = DistanceMatrix(flat)
    other = pairwise_distances(np.random.default_rng(0).standard_normal((5, 2)))
    with pytest.raises(ValueError, match="undefined"):
        spearman_rho(d, other)


# ------------------------------------------------------------------ procrustes

def test_procrustes_similarity_transform_is_zero():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((20, 2))
    theta = np.pi / 6
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    y = 3.0 * x @ rot + np.array([7.0, -2.0])
    assert procrustes_distance(x, y).value == pytest.approx(0.0, abs=1e-9)
    assert procrustes_distance(x, x).value == pytest.approx(0.0, abs=1e-12)
    # reflections are allowed
    y_ref = x @ np.diag([1.0, -1.0])
    assert procrustes_distance(x, y_ref).value == pytest.approx(0.0, abs=1e-9)


def test_procrustes_matches_grid_search_and_bound():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((10, 2))
    y = rng.standard_normal((10, 2))
    val = procrustes_distance(x, y).value
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    assert val <= np.linalg.norm(xc - yc) + 1e-12
    assert val == pytest.approx(procrustes_grid_oracle(x, y), abs=1e-4)


def test_procrustes_invariance_under_similarity_of_y():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((15, 2))
    y = rng.standard_normal((15, 2))
    base = procrustes_distance(x, y).value
    theta = 1.1
    rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    moved = 0.37 * y @ rot + np.array([4.0, 4.0])
    assert procrustes_distance(x, moved).value == pytest.approx(base, abs=1e-9)


def test_procrustes_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        procrustes_distance(np.ones((4, 3)), np.ones((4, 2)))
    with pytest.raises(ValueError, match="row count"):
        procrustes_distance(np.ones((4, 2)), np.ones((5, 2)))


# ------------------------------------------------------------------------ 1-NN

def test_one_nn_separated_clusters():
    rng = np.random.default_rng(7)
    x = np.vstack([rng.standard_normal((10, 2)), rng.standard_normal((10, 2)) + 50.0])
    labels = np.repeat([1, 2], 10)
    assert one_nn_accuracy(x, labels).value == 1.0


def test_one_nn_permutation_null_rate():
    rng = np.random.default_rng(8)
    x = rng.standard_normal((64, 2)) * 100.0
    labels = np.repeat(np.arange(16), 4)
    accs = []
    for _ in range(300):
        accs.append(one_nn_accuracy(x, rng.permutation(labels)).value)
    null = np.mean(accs)
    # ~1/16 with a small finite-sample correction; loose 3-sigma window
    assert abs(null - 1 / 16) < 0.02


@pytest.mark.parametrize("seed", range(3))
def test_one_nn_matches_indicator_product(seed):
    rng = np.random.default_rng(seed + 40)
    y = rng.standard_normal((12, 2))
    labels = rng.integers(0, 3, size=12)
    ranks = rank_matrix(pairwise_distances(y))
    expected = one_nn_oracle(ranks.ranks, labels)
    assert one_nn_accuracy(y, labels).value == pytest.approx(expected, abs=1e-15)


# ----------------------------------------------------- cross-metric properties

def test_monotone_agreement_under_restoring_swap():
    # un-swapping an adjacent rank pair so the low ranks match the high ranks
    # must not decrease either neighbor-overlap family
    rng = np.random.default_rng(9)
    for n in (4, 5, 6):
        for _ in range(20):
            hi = random_rank_matrix(n, rng)
            row = int(rng.integers(n))
            a = int(rng.integers(1, n - 1))
            cols = [j for j in range(n) if j != row]
            j1 = next(j for j in cols if hi[row, j] == a)
            j2 = next(j for j in cols if hi[row, j] == a + 1)
            lo = hi.copy()
            lo[row, j1], lo[row, j2] = a + 1, a  # disagree on one adjacent pair
            before_q = q_nx_curve(coranking_matrix(RankMatrix(hi), RankMatrix(lo))).mean()
            before_s = spectral_overlap_weighted(RankMatrix(hi), RankMatrix(lo)).value
            after_q = q_nx_curve(coranking_matrix(RankMatrix(hi), RankMatrix(hi))).mean()
            after_s = spectral_overlap_weighted(RankMatrix(hi), RankMatrix(hi)).value
            assert after_q >= before_q - 1e-15
            assert after_s >= before_s - 1e-15


def test_common_permutation_invariance():
    rng = np.random.default_rng(10)
    x = rng.standard_normal((20, 2))
    y = rng.standard_normal((20, 2))
    labels = rng.integers(0, 4, size=20)
    perm = rng.permutation(20)
    a = EmbeddingScorer(x, y, labels=labels)
    b = EmbeddingScorer(x[perm], y[perm], labels=labels[perm])
    for metric in ["kmax", "qnx", "entropy", "mutual-info", "local-error",
                   "spectral-overlap", "spectral-overlap-simple", "spearman", "1nn"]:
        assert a.score(metric).value == pytest.approx(b.score(metric).value, abs=1e-12), metric
    assert a.score("procrustes").value == pytest.approx(
        b.score("procrustes").value, abs=1e-9)


def test_scorer_validation_and_registry():
    rng = np.random.default_rng(11)
    x = rng.standard_normal((10, 3))
    y = rng.standard_normal((10, 2))
    scorer = EmbeddingScorer(x, y)
    with pytest.raises(ValueError, match="labels"):
        scorer.score("1nn")
    with pytest.raises(ValueError, match="unknown metric"):
        scorer.score("trustworthiness")
    with pytest.raises(ValueError, match="row count"):
        EmbeddingScorer(x, y[:-1])
    assert ORIENTATIONS["entropy"] == "minimize"
    assert ORIENTATIONS["local-error"] == "minimize"
    assert ORIENTATIONS["procrustes"] == "minimize"
    for metric in ("qnx", "kmax", "mutual-info", "spectral-overlap",
                   "spectral-overlap-simple", "spearman", "1nn", "lcmc"):
        assert ORIENTATIONS[metric] == "maximize"
    assert scorer.applicable_metrics()[-1] != "1nn"  # no labels given
    rec = scorer.score("kmax").to_record()
    assert set(rec) == {"metric", "value", "orientation", "aux"}
