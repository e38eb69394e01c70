"""Ingestion of embeddings produced outside this package (e.g. UMAP runs)."""

import json
from pathlib import Path

import numpy as np

from .base import Embedding


def load_external_embedding(path, expected_n: int | None = None) -> Embedding:
    """Load a headerless n x p CSV embedding plus its optional JSON sidecar.

    The sidecar (same stem, .json suffix) may carry algorithm/params/seed
    provenance; missing fields default to an anonymous external run.
    """
    path = Path(path)
    try:
        points = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: could not parse embedding CSV: {exc}") from exc
    bad = np.argwhere(~np.isfinite(points))
    if bad.size:
        raise ValueError(f"{path}: non-finite value at row {bad[0][0]}")
    if expected_n is not None and points.shape[0] != expected_n:
        raise ValueError(
            f"{path}: expected {expected_n} rows, found {points.shape[0]}"
        )

    provenance = {
        "algorithm": "external",
        "params": {},
        "seed": None,
        "iterations": 0,
        "objective": None,
        "converged": True,
        "source": str(path),
    }
    sidecar = path.with_suffix(".json")
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        for key in ("algorithm", "params", "seed"):
            if key in meta:
                provenance[key] = meta[key]
    return Embedding(points, provenance)
