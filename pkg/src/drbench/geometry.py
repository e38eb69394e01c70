"""Shared geometric kernels: pairwise distances, neighbor ranks, co-ranking, KNN graphs.

Everything here is a pure function of immutable inputs.  Results are computed
once per (dataset, embedding) pair and shared by all quality metrics.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric n x n Euclidean distance matrix with zero diagonal."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def check(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("distance matrix must be square")
        if not np.all(np.isfinite(v)):
            raise ValueError("distance matrix contains non-finite values")
        if np.any(v < 0):
            raise ValueError("distance matrix contains negative values")
        if not np.allclose(v, v.T):
            raise ValueError("distance matrix is not symmetric")
        if np.any(np.diagonal(v) != 0):
            raise ValueError("distance matrix diagonal is not zero")


@dataclass(frozen=True, eq=False)
class RankMatrix:
    """Row-wise neighbor ranks.

    ranks[i][j] is the rank of j among i's neighbors (1 = nearest), ties broken
    by ascending column index.  The diagonal holds the sentinel 0.
    """

    ranks: np.ndarray

    @property
    def n(self) -> int:
        return self.ranks.shape[0]

    def check(self) -> None:
        n = self.n
        if np.any(np.diagonal(self.ranks) != 0):
            raise ValueError("rank matrix diagonal must be the 0 sentinel")
        expected = np.arange(1, n)
        for i in range(n):
            row = np.sort(np.delete(self.ranks[i], i))
            if not np.array_equal(row, expected):
                raise ValueError(f"row {i} is not a permutation of 1..n-1")


@dataclass(frozen=True, eq=False)
class CoRankingMatrix:
    """(n-1) x (n-1) joint histogram of high/low neighbor ranks."""

    counts: np.ndarray
    n: int

    def check(self) -> None:
        n = self.n
        if self.counts.shape != (n - 1, n - 1):
            raise ValueError("co-ranking matrix has wrong shape")
        if self.counts.sum() != n * (n - 1):
            raise ValueError("co-ranking total must be n(n-1)")
        if np.any(self.counts.sum(axis=1) != n) or np.any(self.counts.sum(axis=0) != n):
            raise ValueError("co-ranking marginals must all equal n")


@dataclass(frozen=True, eq=False)
class KnnGraph:
    """Directed k-nearest-neighbor adjacency (rank <= k), diagonal false."""

    k: int
    adjacency: np.ndarray

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


def pairwise_distances(points: np.ndarray) -> DistanceMatrix:
    """Euclidean distance matrix of an n x d point set (n >= 2)."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise ValueError("points must be a 2-d array")
    if points.shape[0] < 2:
        raise ValueError("need at least 2 points")
    bad = np.argwhere(~np.isfinite(points))
    if bad.size:
        i, j = bad[0]
        raise ValueError(f"non-finite coordinate at row {i}, column {j}")
    return DistanceMatrix(squareform(pdist(points)))


def rank_matrix(d: DistanceMatrix) -> RankMatrix:
    """Row-wise ranks of off-diagonal distances, stable ties by column index."""
    n = d.n
    work = d.values.copy()
    np.fill_diagonal(work, np.inf)
    # stable argsort keeps equal distances in ascending column order
    order = np.argsort(work, axis=1, kind="stable")
    ranks = np.zeros((n, n), dtype=np.int64)
    rows = np.arange(n)[:, None]
    ranks[rows, order[:, : n - 1]] = np.arange(1, n)
    return RankMatrix(ranks)


def coranking_matrix(hi: RankMatrix, lo: RankMatrix) -> CoRankingMatrix:
    """Joint histogram m[k, l] = #{ordered pairs (i, j) with high rank k+1, low rank l+1}."""
    n = hi.n
    if lo.n != n:
        raise ValueError(f"rank matrix sizes differ: {n} vs {lo.n}")
    off = ~np.eye(n, dtype=bool)
    h = hi.ranks[off] - 1
    l = lo.ranks[off] - 1
    counts = np.bincount(h * (n - 1) + l, minlength=(n - 1) ** 2)
    return CoRankingMatrix(counts.reshape(n - 1, n - 1), n)


def knn_graph(r: RankMatrix, k: int) -> KnnGraph:
    """Directed KNN graph: adjacency[i][j] iff j is within i's first k ranks."""
    n = r.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, {n - 1}], got {k}")
    adjacency = (r.ranks >= 1) & (r.ranks <= k)
    return KnnGraph(k, adjacency)
