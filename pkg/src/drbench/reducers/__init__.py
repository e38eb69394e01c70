"""Embedding algorithms: PCA baseline, Sammon, exact t-SNE, local MDS, plus
external-embedding ingestion."""

from .base import Embedding, Param, resolve_params
from .external import load_external_embedding
from .lmds import SCHEMA as LMDS_SCHEMA
from .lmds import local_mds
from .pca import pca
from .sammon import SCHEMA as SAMMON_SCHEMA
from .sammon import sammon
from .tsne import SCHEMA as TSNE_SCHEMA
from .tsne import tsne_exact

SCHEMAS: dict[str, tuple[Param, ...]] = {
    "pca": (),
    "sammon": SAMMON_SCHEMA,
    "tsne": TSNE_SCHEMA,
    "lmds": LMDS_SCHEMA,
}

ALGORITHMS = tuple(SCHEMAS)


def run_reducer(algorithm: str, points, params: dict | None = None, seed: int = 0,
                dim: int = 2) -> Embedding:
    """Dispatch to a named algorithm with validated hyperparameters."""
    if algorithm == "pca":
        if params:
            raise ValueError("pca takes no hyperparameters")
        return pca(points, dim)
    if algorithm == "sammon":
        return sammon(points, params, seed=seed, dim=dim)
    if algorithm == "tsne":
        return tsne_exact(points, params, seed=seed, dim=dim)
    if algorithm == "lmds":
        return local_mds(points, params, seed=seed, dim=dim)
    raise ValueError(f"unknown algorithm {algorithm!r}; available: {', '.join(ALGORITHMS)}")


__all__ = [
    "ALGORITHMS",
    "Embedding",
    "Param",
    "SCHEMAS",
    "load_external_embedding",
    "local_mds",
    "pca",
    "resolve_params",
    "run_reducer",
    "sammon",
    "tsne_exact",
]
