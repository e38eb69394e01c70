import json

import numpy as np
import pytest

from drbench import datasets
from drbench.geometry import pairwise_distances
from drbench.metrics import procrustes_distance
from drbench.reducers import (
    load_external_embedding,
    local_mds,
    pca,
    run_reducer,
    sammon,
    tsne_exact,
)
from drbench.reducers.base import line_search_descent
from drbench.reducers.lmds import lmds_objective, lmds_objective_grad, neighbor_mask
from drbench.reducers.sammon import sammon_stress, sammon_stress_grad
from drbench.reducers.tsne import (
    conditional_bandwidths,
    joint_probabilities,
    kl_divergence_grad,
)
from drbench.serialize import write_embedding_csv


def finite_difference(objective, y, eps=1e-6):
    num = np.zeros_like(y)
    for i in range(y.shape[0]):
        for j in range(y.shape[1]):
            up = y.copy()
            up[i, j] += eps
            down = y.copy()
            down[i, j] -= eps
            num[i, j] = (objective(up) - objective(down)) / (2 * eps)
    return num


def rel_error(analytic, numeric):
    scale = max(np.max(np.abs(numeric)), 1e-12)
    return np.max(np.abs(analytic - numeric)) / scale


# ------------------------------------------------------------------------ PCA

def test_pca_2d_identity_is_rigid():
    ps = datasets.generate("noisy-circles", 80, seed=1)
    emb = pca(ps.points, 2)
    assert procrustes_distance(ps.points, emb.points).value < 1e-9
    assert emb.provenance["objective"] == pytest.approx(0.0, abs=1e-18)


def test_pca_rank_one_reconstruction():
    rng = np.random.default_rng(0)
    direction = np.array([1.0, 2.0, -1.0])
    x = np.outer(rng.standard_normal(20), direction)
    emb = pca(x, 1)
    # residual spectrum is zero: the line is reproduced exactly
    assert emb.provenance["objective"] == pytest.approx(0.0, abs=1e-20)


def test_pca_captured_variance_matches_eigensolver():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((20, 4)) @ np.diag([3.0, 2.0, 1.0, 0.5])
    emb = pca(x, 2)
    captured = emb.points.var(axis=0, ddof=1).sum()
    eigvals = np.sort(np.linalg.eigvalsh(np.cov(x.T)))[::-1]
    assert captured == pytest.approx(eigvals[:2].sum(), abs=1e-9)


def test_pca_validation():
    x = np.random.default_rng(2).standard_normal((10, 3))
    for p in (0, 4):
        with pytest.raises(ValueError):
            pca(x, p)
    with pytest.raises(ValueError, match="no hyperparameters"):
        run_reducer("pca", x, {"anything": 1})


# ------------------------------------------------------------------- Sammon

def test_sammon_recovers_2d_configuration():
    ps = datasets.generate("trefoil", 60, seed=3)
    emb = sammon(ps.points, seed=1)
    assert emb.provenance["objective"] < 1e-6
    assert procrustes_distance(ps.points, emb.points).value < 1e-3
    assert np.allclose(emb.points.mean(axis=0), 0.0, atol=1e-9)


def test_sammon_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    d_hi = pairwise_distances(rng.standard_normal((20, 4))).values
    y = rng.standard_normal((20, 2))
    _, grad = sammon_stress_grad(y, d_hi)
    num = finite_difference(lambda z: sammon_stress(z, d_hi), y)
    assert rel_error(grad, num) < 1e-5


def test_sammon_accepted_steps_strictly_decrease():
    rng = np.random.default_rng(5)
    d_hi = pairwise_distances(rng.standard_normal((15, 3))).values
    y0 = rng.standard_normal((15, 2))
    seen = []

    def grad_fn(y):
        obj, grad = sammon_stress_grad(y, d_hi)
        seen.append(obj)
        return obj, grad

    _, final, iters, _ = line_search_descent(
        y0, lambda y: sammon_stress(y, d_hi), grad_fn, step0=0.5, max_iter=40)
    assert iters > 0
    assert all(b < a for a, b in zip(seen, seen[1:]))
    assert final == seen[-1]


def test_sammon_handles_duplicate_points():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((12, 3))
    x[5] = x[2]  # exact duplicate would divide by zero
    emb = sammon(x, seed=0)
    assert np.all(np.isfinite(emb.points))


def test_sammon_determinism_and_param_validation():
    ps = datasets.generate("two-lines", 40, seed=2)
    a = sammon(ps.points, {"max_iter": 30}, seed=7)
    b = sammon(ps.points, {"max_iter": 30}, seed=7)
    assert np.array_equal(a.points, b.points)
    c = sammon(ps.points, {"max_iter": 30}, seed=8)
    assert not np.array_equal(a.points, c.points)
    with pytest.raises(ValueError, match="unknown sammon parameter"):
        sammon(ps.points, {"rate": 1.0})
    with pytest.raises(ValueError, match="must be an integer"):
        sammon(ps.points, {"max_iter": 2.5})


# --------------------------------------------------------------------- t-SNE

def test_tsne_bandwidths_hit_target_entropy():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((40, 3))
    d2 = pairwise_distances(x).values ** 2
    for perplexity in (5.0, 15.0):
        cond, _ = conditional_bandwidths(d2, perplexity)
        assert np.allclose(cond.sum(axis=1), 1.0, atol=1e-9)
        assert np.all(np.diagonal(cond) == 0.0)
        ent = np.array([
            -(row[row > 0] * np.log(row[row > 0])).sum() for row in cond
        ])
        assert np.max(np.abs(ent - np.log(perplexity))) < 1e-5


def test_tsne_joint_probabilities_properties():
    rng = np.random.default_rng(8)
    d2 = pairwise_distances(rng.standard_normal((25, 4))).values ** 2
    p = joint_probabilities(d2, 8.0)
    assert np.allclose(p, p.T)
    assert np.all(p >= 0)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)


def test_tsne_gradient_matches_finite_differences():
    rng = np.random.default_rng(9)
    x = rng.standard_normal((15, 4))
    p = joint_probabilities(pairwise_distances(x).values ** 2, 6.0)
    y = rng.standard_normal((15, 2))
    _, grad = kl_divergence_grad(y, p)
    num = finite_difference(lambda z: kl_divergence_grad(z, p)[0], y)
    assert rel_error(grad, num) < 1e-4


def test_tsne_perplexity_range_errors():
    rng = np.random.default_rng(10)
    x = rng.standard_normal((12, 3))
    for bad in (1.0, 12.0, 50.0):
        with pytest.raises(ValueError, match="perplexity"):
            tsne_exact(x, {"perplexity": bad})
    with pytest.raises(ValueError, match="at least 4"):
        tsne_exact(x[:3], {"perplexity": 2.0})


def test_tsne_calibration_failure_on_equidistant_points():
    simplex = np.array([
        [1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]
    ])
    # every conditional is uniform over 3 neighbors: entropy is stuck at log 3
    with pytest.raises(ValueError, match="did not converge"):
        tsne_exact(simplex, {"perplexity": 2.0})


def test_tsne_run_and_determinism():
    ps = datasets.generate("three-gaussians", 60, seed=1)
    a = tsne_exact(ps.points, {"perplexity": 10, "n_iter": 60}, seed=3)
    b = tsne_exact(ps.points, {"perplexity": 10, "n_iter": 60}, seed=3)
    assert np.array_equal(a.points, b.points)
    assert a.provenance["iterations"] == 60
    assert a.provenance["objective"] > 0.0
    assert np.allclose(a.points.mean(axis=0), 0.0, atol=1e-9)
    c = tsne_exact(ps.points, {"perplexity": 10, "n_iter": 60}, seed=4)
    assert not np.array_equal(a.points, c.points)


# ----------------------------------------------------------------- local MDS

def test_lmds_reduces_to_mds_and_recovers_2d():
    ps = datasets.generate("two-lines", 40, seed=5)
    n = ps.n
    emb = local_mds(ps.points, {"k": n - 1, "tau": 0.0}, seed=1)
    assert procrustes_distance(ps.points, emb.points).value < 1e-2
    # with every pair a neighbor and no repulsion the objective is raw stress
    mask = neighbor_mask(pairwise_distances(ps.points).values, n - 1)
    assert mask.sum() == n * (n - 1)


def test_lmds_objective_matches_pairwise_definition():
    rng = np.random.default_rng(11)
    d_hi = pairwise_distances(rng.standard_normal((10, 3))).values
    mask = neighbor_mask(d_hi, 3)
    y = rng.standard_normal((10, 2))
    d_lo = pairwise_distances(y).values
    iu = np.triu_indices(10, k=1)
    near = mask[iu]
    expected = (((d_hi[iu] - d_lo[iu])[near]) ** 2).sum() - 0.3 * d_lo[iu][~near].sum()
    assert lmds_objective(y, d_hi, mask, 0.3) == pytest.approx(expected, rel=1e-12)


def test_lmds_gradient_matches_finite_differences():
    rng = np.random.default_rng(12)
    d_hi = pairwise_distances(rng.standard_normal((15, 4))).values
    mask = neighbor_mask(d_hi, 4)
    y = rng.standard_normal((15, 2))
    _, grad = lmds_objective_grad(y, d_hi, mask, 0.05)
    num = finite_difference(lambda z: lmds_objective(z, d_hi, mask, 0.05), y)
    assert rel_error(grad, num) < 1e-4


def test_lmds_k_validation_and_determinism():
    rng = np.random.default_rng(13)
    x = rng.standard_normal((12, 3))
    for k in (0, 12):
        with pytest.raises(ValueError, match="k must be"):
            local_mds(x, {"k": k})
    a = local_mds(x, {"k": 3, "n_iter": 25}, seed=2)
    b = local_mds(x, {"k": 3, "n_iter": 25}, seed=2)
    assert np.array_equal(a.points, b.points)


# ------------------------------------------------------------------ external

def test_external_round_trip(tmp_path):
    ps = datasets.generate("trefoil", 30, seed=1)
    emb = pca(ps.points, 2)
    path = tmp_path / "emb.csv"
    write_embedding_csv(path, emb)
    back = load_external_embedding(path, expected_n=30)
    assert np.array_equal(back.points, emb.points)
    assert back.provenance["algorithm"] == "pca"  # sidecar is honored


def test_external_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0\n3.0,4.0\n")
    with pytest.raises(ValueError, match="expected 5 rows, found 2"):
        load_external_embedding(path, expected_n=5)
    path.write_text("1.0,2.0\nnan,4.0\n")
    with pytest.raises(ValueError, match="row 1"):
        load_external_embedding(path)
    path.write_text("not,a\nnumber,file\n")
    with pytest.raises(ValueError, match="could not parse"):
        load_external_embedding(path)


def test_external_sidecar_params(tmp_path):
    path = tmp_path / "umap.csv"
    path.write_text("0.0,1.0\n2.0,3.0\n4.0,5.0\n")
    (tmp_path / "umap.json").write_text(json.dumps(
        {"algorithm": "umap", "params": {"n_neighbors": 15}, "seed": 3}))
    emb = load_external_embedding(path)
    assert emb.provenance["algorithm"] == "umap"
    assert emb.provenance["params"] == {"n_neighbors": 15}
    assert emb.provenance["seed"] == 3


def test_run_reducer_dispatch():
    with pytest.raises(ValueError, match="unknown algorithm"):
        run_reducer("umap", np.ones((5, 2)))
