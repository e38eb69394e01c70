"""Quality metrics for dimensionality-reduction output.

Each metric is a pure function of precomputed geometry and carries a fixed
orientation (maximize or minimize).  ``EmbeddingScorer`` evaluates any subset
of metrics for one (input, embedding) pair while computing distance matrices,
rank matrices and the co-ranking matrix exactly once.

Notes on conventions:

* natural log everywhere entropy / mutual information appear;
* the joint rank distribution is normalized by n(n-1) so it sums to 1;
* the parameter-free "qnx" summary reported by the scorer is the mean of
  Q_NX(K) over K = 1..n-1 (Q_NX at the largest K is identically 1, so the
  single-K variant carries no information there; the mean preserves the
  rank-preservation signal at every scale).  ``q_nx`` with an explicit K is
  still available, defaulting to K = n-1.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from .geometry import (
    CoRankingMatrix,
    DistanceMatrix,
    RankMatrix,
    coranking_matrix,
    pairwise_distances,
    rank_matrix,
)

MAXIMIZE = "maximize"
MINIMIZE = "minimize"


@dataclass(frozen=True)
class MetricScore:
    metric: str
    value: float
    orientation: str
    params: dict | None = None
    aux: dict | None = None

    def to_record(self) -> dict:
        rec = {"metric": self.metric, "value": self.value, "orientation": self.orientation}
        if self.params:
            rec["params"] = self.params
        if self.aux:
            rec["aux"] = self.aux
        return rec


@dataclass(frozen=True, eq=False)
class JointRankDistribution:
    """Co-ranking counts normalized to a probability distribution."""

    probabilities: np.ndarray

    def check(self) -> None:
        if np.any(self.probabilities < 0):
            raise ValueError("negative probability")
        if abs(self.probabilities.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to 1")


# ---------------------------------------------------------------------------
# co-ranking based metrics


def q_nx_curve(m: CoRankingMatrix) -> np.ndarray:
    """Q_NX(K) for every K = 1..n-1 (index K-1)."""
    n = m.n
    block = m.counts.cumsum(axis=0).cumsum(axis=1).diagonal()
    return block / (np.arange(1, n, dtype=float) * n)


def q_nx(m: CoRankingMatrix, K: int | None = None) -> MetricScore:
    """Fraction of the first K neighbors preserved (K defaults to n-1)."""
    n = m.n
    if K is None:
        K = n - 1
    if not 1 <= K <= n - 1:
        raise ValueError(f"K must be in [1, {n - 1}], got {K}")
    value = float(m.counts[:K, :K].sum()) / (K * n)
    return MetricScore("qnx", value, MAXIMIZE, params={"K": K})


def q_nx_mean(m: CoRankingMatrix) -> MetricScore:
    """Parameter-free Q_NX summary: mean of Q_NX(K) over all K."""
    value = float(q_nx_curve(m).mean())
    return MetricScore("qnx", value, MAXIMIZE, aux={"summary": "mean over K"})


def lcmc_curve(m: CoRankingMatrix) -> np.ndarray:
    n = m.n
    K = np.arange(1, n, dtype=float)
    return q_nx_curve(m) - K / (n - 1)


def lcmc(m: CoRankingMatrix, K: int) -> MetricScore:
    """Q_NX(K) minus the chance baseline K/(n-1)."""
    n = m.n
    if not 1 <= K <= n - 1:
        raise ValueError(f"K must be in [1, {n - 1}], got {K}")
    value = q_nx(m, K).value - K / (n - 1)
    return MetricScore("lcmc", value, MAXIMIZE, params={"K": K})


def k_max_score(m: CoRankingMatrix) -> MetricScore:
    """max_K LCMC(K); ties in the argmax break toward smaller K."""
    curve = lcmc_curve(m)
    best = int(np.argmax(curve))
    return MetricScore("kmax", float(curve[best]), MAXIMIZE, aux={"K": best + 1})


def joint_distribution(m: CoRankingMatrix) -> JointRankDistribution:
    n = m.n
    return JointRankDistribution(m.counts / float(n * (n - 1)))


def entropy(p: JointRankDistribution) -> MetricScore:
    """Joint rank entropy, 0 log 0 taken as 0."""
    q = p.probabilities[p.probabilities > 0]
    return MetricScore("entropy", float(-(q * np.log(q)).sum()), MINIMIZE)


def mutual_information(p: JointRankDistribution) -> MetricScore:
    """Mutual information between high and low rank marginals."""
    probs = p.probabilities
    row = probs.sum(axis=1)
    col = probs.sum(axis=0)
    mask = probs > 0
    outer = np.outer(row, col)
    value = float((probs[mask] * np.log(probs[mask] / outer[mask])).sum())
    return MetricScore("mutual-info", value, MAXIMIZE)


# ---------------------------------------------------------------------------
# distance / rank based metrics


def local_error(d_hi: DistanceMatrix, d_lo: DistanceMatrix, r_hi: RankMatrix) -> MetricScore:
    """Rank-weighted squared distance error.

    Each ordered pair with high-space rank r contributes (D - d)^2 once per
    neighborhood size i >= r, i.e. with weight n - r, so immediate neighbors
    weigh the most.
    """
    n = d_hi.n
    if d_lo.n != n or r_hi.n != n:
        raise ValueError("inputs must share n")
    off = ~np.eye(n, dtype=bool)
    w = (n - r_hi.ranks[off]).astype(float)
    err = (d_hi.values[off] - d_lo.values[off]) ** 2
    return MetricScore("local-error", float((w * err).sum()), MINIMIZE)


def spectral_overlap_simple(r_hi: RankMatrix, r_lo: RankMatrix) -> MetricScore:
    """KNN-graph edge agreement summed over every graph size, equal weight.

    The directed edge (j -> k) exists in the size-i graph of a space iff the
    rank of k w.r.t. j is <= i, so the two graphs agree on it for exactly
    n - max(rank_hi, rank_lo) of the sizes i = 1..n-1.  Summing over all
    ordered pairs keeps the value permutation invariant, and the n^2 (n-1) / 2
    normalizer is exactly the ordered-pair agreement ceiling, so identical
    rank matrices score 1.
    """
    n = r_hi.n
    if r_lo.n != n:
        raise ValueError("rank matrix sizes differ")
    off = ~np.eye(n, dtype=bool)
    agree = np.maximum(r_hi.ranks[off], r_lo.ranks[off])
    total = float((n - agree).sum())
    return MetricScore(
        "spectral-overlap-simple", 2.0 * total / (n * n * (n - 1)), MAXIMIZE
    )


def spectral_overlap_weighted(r_hi: RankMatrix, r_lo: RankMatrix) -> MetricScore:
    """Harmonically weighted KNN-graph agreement; 1 iff ranks agree everywhere.

    overlap_i is the fraction of directed edges the size-i graphs share
    (out of n*i), and the weights w_i proportional to 1/i put more mass on
    immediate neighborhoods.
    """
    n = r_hi.n
    if r_lo.n != n:
        raise ValueError("rank matrix sizes differ")
    off = ~np.eye(n, dtype=bool)
    worst = np.maximum(r_hi.ranks[off], r_lo.ranks[off])
    shared = np.cumsum(np.bincount(worst, minlength=n)[1:n])
    sizes = np.arange(1, n, dtype=float)
    overlap = shared / (n * sizes)
    weights = 1.0 / sizes
    weights /= weights.sum()
    return MetricScore("spectral-overlap", float((weights * overlap).sum()), MAXIMIZE)


def average_ranks(a: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values receiving the mean of their positions."""
    order = np.argsort(a, kind="stable")
    sorted_a = a[order]
    starts = np.r_[True, sorted_a[1:] != sorted_a[:-1]]
    group = np.cumsum(starts) - 1
    bounds = np.r_[np.flatnonzero(starts), a.size]
    group_mean = 0.5 * (bounds[:-1] + bounds[1:] - 1) + 1.0
    ranks = np.empty(a.size)
    ranks[order] = group_mean[group]
    return ranks


def spearman_rho(d_hi: DistanceMatrix, d_lo: DistanceMatrix) -> MetricScore:
    """Spearman rank correlation of the two upper-triangular distance vectors."""
    n = d_hi.n
    if d_lo.n != n:
        raise ValueError("distance matrix sizes differ")
    if n < 3:
        raise ValueError("spearman needs n >= 3")
    iu = np.triu_indices(n, k=1)
    a = d_hi.values[iu]
    b = d_lo.values[iu]
    if np.ptp(a) == 0 or np.ptp(b) == 0:
        raise ValueError("spearman undefined: all distances equal in one space")
    ra = average_ranks(a)
    rb = average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    rho = float((ra * rb).sum() / np.sqrt((ra * ra).sum() * (rb * rb).sum()))
    return MetricScore("spearman", rho, MAXIMIZE)


def procrustes_distance(x_points: np.ndarray, y_points: np.ndarray) -> MetricScore:
    """Residual Frobenius norm after optimal translation, orthogonal map and scale.

    Solves min_{R, beta} ||Xc - beta * Yc R||_F with R in the full orthogonal
    group (reflections allowed).  R comes from the SVD of Yc^T Xc and the
    optimal scale is the sum of its singular values over ||Yc||_F^2.
    """
    x = np.asarray(x_points, dtype=float)
    y = np.asarray(y_points, dtype=float)
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"row count mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[1] != y.shape[1]:
        raise ValueError(
            f"procrustes needs matching dimensions, got {x.shape[1]} and {y.shape[1]}"
        )
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    ynorm2 = float((yc**2).sum())
    if ynorm2 == 0.0:
        value = float(np.linalg.norm(xc))
    else:
        u, s, vt = np.linalg.svd(yc.T @ xc)
        beta = s.sum() / ynorm2
        value = float(np.linalg.norm(xc - beta * (yc @ (u @ vt))))
    return MetricScore("procrustes", value, MINIMIZE)


def one_nn_accuracy(
    y_points: np.ndarray, labels: np.ndarray, ranks: RankMatrix | None = None
) -> MetricScore:
    """Fraction of points whose nearest embedded neighbor shares their label."""
    labels = np.asarray(labels)
    if ranks is None:
        ranks = rank_matrix(pairwise_distances(y_points))
    n = ranks.n
    if labels.shape[0] != n:
        raise ValueError(f"labels length {labels.shape[0]} != n {n}")
    nn = np.argmax(ranks.ranks == 1, axis=1)
    return MetricScore("1nn", float(np.mean(labels[nn] == labels)), MAXIMIZE)


# ---------------------------------------------------------------------------
# metric registry and shared-geometry scorer

ORIENTATIONS = {
    "qnx": MAXIMIZE,
    "lcmc": MAXIMIZE,
    "kmax": MAXIMIZE,
    "entropy": MINIMIZE,
    "mutual-info": MAXIMIZE,
    "local-error": MINIMIZE,
    "spectral-overlap": MAXIMIZE,
    "spectral-overlap-simple": MAXIMIZE,
    "spearman": MAXIMIZE,
    "procrustes": MINIMIZE,
    "1nn": MAXIMIZE,
}

# metrics usable without labels or matching dimensions, in reporting order
RANK_METRICS = (
    "kmax",
    "qnx",
    "entropy",
    "mutual-info",
    "local-error",
    "spectral-overlap",
    "spectral-overlap-simple",
    "spearman",
)


class EmbeddingScorer:
    """Evaluates metrics for one (input, embedding) pair with shared geometry."""

    def __init__(self, x_points, y_points, labels=None):
        self.x = np.asarray(x_points, dtype=float)
        self.y = np.asarray(y_points, dtype=float)
        if self.x.shape[0] != self.y.shape[0]:
            raise ValueError(
                f"row count mismatch: input has {self.x.shape[0]} points, "
                f"embedding has {self.y.shape[0]}"
            )
        self.labels = None if labels is None else np.asarray(labels)

    @cached_property
    def d_hi(self) -> DistanceMatrix:
        return pairwise_distances(self.x)

    @cached_property
    def d_lo(self) -> DistanceMatrix:
        return pairwise_distances(self.y)

    @cached_property
    def r_hi(self) -> RankMatrix:
        return rank_matrix(self.d_hi)

    @cached_property
    def r_lo(self) -> RankMatrix:
        return rank_matrix(self.d_lo)

    @cached_property
    def coranking(self) -> CoRankingMatrix:
        return coranking_matrix(self.r_hi, self.r_lo)

    @cached_property
    def joint(self) -> JointRankDistribution:
        return joint_distribution(self.coranking)

    def applicable_metrics(self) -> list[str]:
        ids = list(RANK_METRICS)
        if self.x.shape[1] == self.y.shape[1]:
            ids.append("procrustes")
        if self.labels is not None:
            ids.append("1nn")
        return ids

    def score(self, metric: str, k: int | None = None) -> MetricScore:
        if metric == "qnx":
            return q_nx(self.coranking, k) if k is not None else q_nx_mean(self.coranking)
        if metric == "lcmc":
            return lcmc(self.coranking, k if k is not None else self.coranking.n - 1)
        if metric == "kmax":
            return k_max_score(self.coranking)
        if metric == "entropy":
            return entropy(self.joint)
        if metric == "mutual-info":
            return mutual_information(self.joint)
        if metric == "local-error":
            return local_error(self.d_hi, self.d_lo, self.r_hi)
        if metric == "spectral-overlap":
            return spectral_overlap_weighted(self.r_hi, self.r_lo)
        if metric == "spectral-overlap-simple":
            return spectral_overlap_simple(self.r_hi, self.r_lo)
        if metric == "spearman":
            return spearman_rho(self.d_hi, self.d_lo)
        if metric == "procrustes":
            return procrustes_distance(self.x, self.y)
        if metric == "1nn":
            if self.labels is None:
                raise ValueError("1nn requires class labels")
            return one_nn_accuracy(self.y, self.labels, ranks=self.r_lo)
        known = ", ".join(sorted(ORIENTATIONS))
        raise ValueError(f"unknown metric {metric!r}; available: {known}")

    def score_all(self, metrics=None, k: int | None = None) -> list[MetricScore]:
        if metrics is None:
            metrics = self.applicable_metrics()
        return [self.score(m, k=k) for m in metrics]


def evaluate_metrics(x_points, y_points, metrics=None, labels=None, k=None):
    """One-shot convenience wrapper around EmbeddingScorer."""
    return EmbeddingScorer(x_points, y_points, labels=labels).score_all(metrics, k=k)
