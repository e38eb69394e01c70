"""Seeded generators for the six ground-truth synthetic datasets.

Reproducibility contract: every generator is a pure function of
(n, seed, variant).  Randomness comes from numpy's PCG64 seeded with the
sequence [GENERATOR_CODE, seed], so the six generators draw from disjoint,
stable streams even when given the same seed.  Normal deviates use the
generator's standard_normal (ziggurat); identical inputs give bit-identical
output on a given platform/numpy build.
"""

from dataclasses import dataclass, field

import numpy as np

TWO_LINES = "two-lines"
THREE_GAUSSIANS = "three-gaussians"
TREFOIL = "trefoil"
CURVED_XS = "curved-xs"
NOISY_CIRCLES = "noisy-circles"
HD_CLUSTERS = "hd-clusters"

_GENERATOR_CODES = {
    TWO_LINES: 1,
    THREE_GAUSSIANS: 2,
    TREFOIL: 3,
    CURVED_XS: 4,
    NOISY_CIRCLES: 5,
    HD_CLUSTERS: 6,
}


@dataclass(frozen=True, eq=False)
class PointSet:
    """n x d observations with optional integer class labels and provenance."""

    points: np.ndarray
    labels: np.ndarray | None
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def _rng(name: str, seed: int) -> np.random.Generator:
    return np.random.default_rng([_GENERATOR_CODES[name], int(seed)])


def _point_set(name, points, labels, n, seed, variant=None) -> PointSet:
    meta = {"generator": name, "n": int(points.shape[0]), "seed": int(seed)}
    if variant is not None:
        meta["variant"] = variant
    return PointSet(points, labels, meta)


def gen_two_lines(n: int, seed: int, variant: str = "formula") -> PointSet:
    """Two offset groups in 2D.

    The default "formula" variant scales an n x 2 standard-normal sample by 2
    and shifts the halves to +5 / -5 on both coordinates, which yields two
    elongated diagonal clouds.  The "lines" variant produces literal parallel
    horizontal segments at y = +5 / -5 with small vertical jitter.
    """
    if n < 4:
        raise ValueError(f"two-lines needs n >= 4, got {n}")
    if variant not in ("formula", "lines"):
        raise ValueError(f"unknown two-lines variant: {variant!r}")
    m = n // 2
    rng = _rng(TWO_LINES, seed)
    if variant == "formula":
        x = rng.standard_normal((2 * m, 2))
        pts = np.empty_like(x)
        pts[:m] = 2.0 * x[:m] + 5.0
        pts[m:] = 2.0 * x[m:] - 5.0
    else:
        jitter = 0.1 * rng.standard_normal(2 * m)
        xs = np.linspace(-5.0, 5.0, m)
        pts = np.empty((2 * m, 2))
        pts[:m, 0] = xs
        pts[:m, 1] = 5.0 + jitter[:m]
        pts[m:, 0] = xs
        pts[m:, 1] = -5.0 + jitter[m:]
    labels = np.repeat([1, 2], m)
    return _point_set(TWO_LINES, pts, labels, n, seed, variant)


def gen_three_gaussians(n: int, seed: int) -> PointSet:
    """Three 2D Gaussian clusters: two close together, one far with variance 10."""
    if n < 6:
        raise ValueError(f"three-gaussians needs n >= 6, got {n}")
    m = n // 3
    rng = _rng(THREE_GAUSSIANS, seed)
    z = rng.standard_normal((3 * m, 2))
    pts = np.empty_like(z)
    pts[:m] = z[:m] - 5.0
    pts[m : 2 * m] = z[m : 2 * m] - 10.0
    pts[2 * m :] = np.sqrt(10.0) * z[2 * m :] + 20.0
    labels = np.repeat([1, 2, 3], m)
    return _point_set(THREE_GAUSSIANS, pts, labels, n, seed)


def gen_trefoil(n: int, seed: int, noise_std: float = 0.1) -> PointSet:
    """Planar trefoil projection sampled over one full period with Gaussian noise."""
    if n < 8:
        raise ValueError(f"trefoil needs n >= 8, got {n}")
    phi = 2.0 * np.pi * np.arange(n) / n
    rng = _rng(TREFOIL, seed)
    noise = noise_std * rng.standard_normal((n, 2))
    pts = np.column_stack(
        [
            np.sin(phi) + 2.0 * np.sin(2.0 * phi),
            np.cos(phi) - 2.0 * np.cos(2.0 * phi),
        ]
    )
    pts += noise
    return _point_set(TREFOIL, pts, None, n, seed)


def gen_curved_xs(n: int, seed: int) -> PointSet:
    """Two mirrored oscillating curves, jointly rotated by pi/4.  Deterministic."""
    if n < 4:
        raise ValueError(f"curved-xs needs n >= 4, got {n}")
    m = n // 2
    x = np.linspace(-2.1147, 2.1147, m)
    y_upper = 50.0 + np.sin(10.0 * np.pi * x) * x**4
    y_lower = -50.0 - np.sin(10.0 * np.pi * x) * x**4
    raw = np.column_stack([np.concatenate([x, x]), np.concatenate([y_upper, y_lower])])
    c, s = np.cos(np.pi / 4.0), np.sin(np.pi / 4.0)
    rot = np.array([[c, s], [-s, c]])
    pts = raw @ rot
    labels = np.repeat([1, 2], m)
    return _point_set(CURVED_XS, pts, labels, n, seed)


def gen_noisy_circles(n: int, seed: int, noise_std: float = 0.02) -> PointSet:
    """Concentric circles (radii 0.5 and 1.0), even arc coverage, per-coordinate noise."""
    if n < 8:
        raise ValueError(f"noisy-circles needs n >= 8, got {n}")
    if n % 2:
        raise ValueError(f"noisy-circles needs even n, got {n}")
    m = n // 2
    phi = 2.0 * np.pi * np.arange(m) / m
    rng = _rng(NOISY_CIRCLES, seed)
    noise = noise_std * rng.standard_normal((n, 2))
    inner = 0.5 * np.column_stack([np.cos(phi), np.sin(phi)])
    outer = np.column_stack([np.cos(phi), np.sin(phi)])
    pts = np.vstack([inner, outer]) + noise
    labels = np.repeat([1, 2], m)
    return _point_set(NOISY_CIRCLES, pts, labels, n, seed)


def gen_hd_clusters(n: int, seed: int) -> PointSet:
    """16 unit-variance Gaussian clusters on the corners of the {0,5}^4 hypercube."""
    if n < 16 or n % 16:
        raise ValueError(f"hd-clusters needs n divisible by 16, got {n}")
    m = n // 16
    corners = np.array(
        [[5.0 * ((i >> b) & 1) for b in (3, 2, 1, 0)] for i in range(16)]
    )
    rng = _rng(HD_CLUSTERS, seed)
    pts = rng.standard_normal((n, 4)) + np.repeat(corners, m, axis=0)
    labels = np.repeat(np.arange(1, 17), m)
    return _point_set(HD_CLUSTERS, pts, labels, n, seed)


@dataclass(frozen=True)
class DatasetInfo:
    name: str
    dim: int
    has_labels: bool
    default_n: int
    constraint: str


REGISTRY = {
    TWO_LINES: DatasetInfo(TWO_LINES, 2, True, 250, "n >= 4"),
    THREE_GAUSSIANS: DatasetInfo(THREE_GAUSSIANS, 2, True, 250, "n >= 6"),
    TREFOIL: DatasetInfo(TREFOIL, 2, False, 250, "n >= 8"),
    CURVED_XS: DatasetInfo(CURVED_XS, 2, True, 250, "n >= 4"),
    NOISY_CIRCLES: DatasetInfo(NOISY_CIRCLES, 2, True, 250, "n >= 8 and even"),
    HD_CLUSTERS: DatasetInfo(HD_CLUSTERS, 4, True, 800, "n divisible by 16"),
}

_GENERATORS = {
    TWO_LINES: gen_two_lines,
    THREE_GAUSSIANS: gen_three_gaussians,
    TREFOIL: gen_trefoil,
    CURVED_XS: gen_curved_xs,
    NOISY_CIRCLES: gen_noisy_circles,
    HD_CLUSTERS: gen_hd_clusters,
}


def generate(name: str, n: int, seed: int, variant: str | None = None) -> PointSet:
    """Generate a named dataset.  `variant` is only meaningful for two-lines."""
    if name not in _GENERATORS:
        known = ", ".join(sorted(_GENERATORS))
        raise ValueError(f"unknown dataset {name!r}; available: {known}")
    if variant is not None:
        if name != TWO_LINES:
            raise ValueError(f"variant is only supported for {TWO_LINES}")
        return gen_two_lines(n, seed, variant)
    return _GENERATORS[name](n, seed)
