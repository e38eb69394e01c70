"""File formats: dataset/embedding CSVs, JSON sidecars, JSON-lines logs.

Numeric CSV output uses 17-significant-digit decimal serialization so float64
values round-trip bit-exactly; JSON floats round-trip via Python's shortest
repr.  Sidecar rule: `foo.csv` pairs with `foo.json`.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .datasets import PointSet
from .reducers import Embedding


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def write_dataset_csv(path, ps: PointSet) -> None:
    """Write points (+ optional label column) with an x1..xd[,label] header,
    plus the provenance sidecar."""
    path = Path(path)
    d = ps.dim
    header = [f"x{i + 1}" for i in range(d)]
    if ps.labels is not None:
        header.append("label")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(ps.n):
            row = [fmt(v) for v in ps.points[i]]
            if ps.labels is not None:
                row.append(str(int(ps.labels[i])))
            w.writerow(row)
    write_json(sidecar_path(path), ps.meta)


def read_dataset_csv(path) -> PointSet:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty dataset file")
    header = rows[0]
    has_labels = bool(header) and header[-1] == "label"
    ncols = len(header) - (1 if has_labels else 0)
    points, labels = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ValueError(f"{path}:{lineno}: expected {len(header)} columns")
        try:
            points.append([float(v) for v in row[:ncols]])
            if has_labels:
                labels.append(int(row[-1]))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        raise ValueError(f"{path}: no data rows")
    if not np.all(np.isfinite(pts)):
        bad = np.argwhere(~np.isfinite(pts))[0]
        raise ValueError(f"{path}: non-finite value at data row {bad[0]}")
    meta = {}
    sp = sidecar_path(path)
    if sp.exists():
        meta = read_json(sp)
    return PointSet(pts, np.asarray(labels) if has_labels else None, meta)


def write_embedding_csv(path, emb: Embedding) -> None:
    """Headerless n x p CSV plus a JSON provenance sidecar."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        for row in emb.points:
            w.writerow([fmt(v) for v in row])
    write_json(sidecar_path(path), emb.provenance)


def append_jsonl(path, record: dict) -> None:
    with Path(path).open("a") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
        fh.flush()


def read_jsonl(path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        return []
    records = []
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def write_records_csv(path, records: list[dict], columns: list[str]) -> None:
    """Canonical CSV for a record table; dict-valued cells become sorted JSON."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for rec in records:
            row = []
            for col in columns:
                val = rec.get(col)
                if isinstance(val, dict):
                    row.append(json.dumps(val, sort_keys=True))
                elif isinstance(val, float):
                    row.append(fmt(val))
                elif val is None:
                    row.append("")
                else:
                    row.append(str(val))
            w.writerow(row)
