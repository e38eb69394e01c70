"""Rendering of result tables and winning-embedding figures.

Outputs are byte-stable: CSV floats use 17 significant digits and the SVG
writer emits nothing that depends on time, environment or library versions.
"""

import csv
import json
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from ..serialize import fmt, read_json
from .plan import DatasetSpec
from .ranking import average_procrustes, rank_metrics
from .sweep import _dedupe, _read_log

TABLE1_COLUMNS = ["Metric", "2D Avg Rank", "High Dim Avg Rank", "Overall Avg"]

# qualitative palette, one color per class (16 needed for the cluster dataset)
PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
    "#98df8a", "#ff9896", "#c5b0d5", "#c49c94",
]


def scatter_svg(points: np.ndarray, labels, title: str, subtitle: str = "") -> str:
    """Self-contained scatter plot with per-class colors and a title band."""
    width, height, band, margin = 480, 480, 48, 24
    pts = np.asarray(points, dtype=float)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    usable_w = width - 2 * margin
    usable_h = height - 2 * margin

    def sx(v):
        return margin + (v - lo[0]) / span[0] * usable_w

    def sy(v):
        return band + margin + (1.0 - (v - lo[1]) / span[1]) * usable_h

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height + band}" viewBox="0 0 {width} {height + band}">',
        f"<title>{escape(title)}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{escape(title)}</text>',
    ]
    if subtitle:
        lines.append(
            f'<text x="{width / 2:.1f}" y="38" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11" fill="#555">{escape(subtitle)}</text>'
        )
    if labels is None:
        colors = [PALETTE[0]] * pts.shape[0]
    else:
        uniq = sorted(set(int(v) for v in labels))
        lut = {lab: PALETTE[i % len(PALETTE)] for i, lab in enumerate(uniq)}
        colors = [lut[int(v)] for v in labels]
    for (x, y), color in zip(pts[:, :2], colors):
        lines.append(
            f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" '
            f'fill="{color}" fill-opacity="0.75"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _cell(value) -> str:
    return "" if value is None else fmt(value)


def emit_report(out_dir) -> list[str]:
    """Write tables/*.csv and figures/*.svg from a completed search directory."""
    out = Path(out_dir)
    plan_path = out / "plan.json"
    if not plan_path.exists():
        raise ValueError(f"{out}: no plan.json; run a search first")
    plan_doc = read_json(plan_path)
    selectors = list(plan_doc["metrics"])
    winners = _dedupe(_read_log(out / "winners.jsonl"),
                      ["dataset", "algorithm", "selector"])
    winners.sort(key=lambda r: (r["dataset"], r["algorithm"], r["selector"]))

    tables_dir = out / "tables"
    figures_dir = out / "figures"
    written = []

    # Table 1: average ranked performance per metric
    if winners:
        rows = [
            [r["metric"], _cell(r["rank_2d"]), _cell(r["rank_hd"]), _cell(r["overall"])]
            for r in rank_metrics(winners, metric_order=selectors)
        ]
    else:
        rows = []
    _write_csv(tables_dir / "table1.csv", TABLE1_COLUMNS, rows)
    written.append("tables/table1.csv")

    # Tables 2 and 4: Bayes score of every winner, one row per algorithm/dataset
    cells: dict[tuple, dict] = {}
    group_of: dict[str, str] = {}
    for rec in winners:
        cells.setdefault((rec["dataset"], rec["algorithm"]), {})[rec["selector"]] = rec["value"]
        group_of[rec["dataset"]] = rec["bayes_metric"]

    def matrix_rows(bayes_kind: str) -> list[list]:
        out_rows = []
        for (dataset, algorithm) in sorted(cells):
            if group_of[dataset] != bayes_kind:
                continue
            vals = cells[(dataset, algorithm)]
            out_rows.append([algorithm, dataset] + [_cell(vals.get(s)) for s in selectors])
        return out_rows

    matrix_header = ["Algorithm", "Data"] + selectors
    _write_csv(tables_dir / "table2.csv", matrix_header, matrix_rows("1nn"))
    written.append("tables/table2.csv")
    _write_csv(tables_dir / "table4.csv", matrix_header, matrix_rows("procrustes"))
    written.append("tables/table4.csv")

    # Table 3: average Procrustes distance per algorithm on the 2D datasets
    rows = [[r["algorithm"], fmt(r["avg_procrustes"])] for r in average_procrustes(winners)]
    _write_csv(tables_dir / "table3.csv", ["Method", "Avg Procrustes Dist"], rows)
    written.append("tables/table3.csv")

    # Figures: one scatter per winning embedding, titled by selector and Bayes value
    dataset_specs = {
        d["name"]: DatasetSpec(d["name"], d["n"], d.get("seed", 1), d.get("variant"))
        for d in plan_doc["datasets"]
    }
    label_cache: dict[str, object] = {}
    figures_dir.mkdir(parents=True, exist_ok=True)
    for rec in winners:
        emb_file = (rec.get("aux") or {}).get("embedding_file")
        if not emb_file:
            continue
        emb_path = out / emb_file
        if not emb_path.exists():
            continue
        points = np.loadtxt(emb_path, delimiter=",", ndmin=2)
        ds_name = rec["dataset"]
        if ds_name not in label_cache:
            spec = dataset_specs.get(ds_name)
            label_cache[ds_name] = spec.generate().labels if spec else None
        title = f"{rec['selector']}: {rec['bayes_metric']}={rec['value']:.6g}"
        subtitle = f"{ds_name} / {rec['algorithm']} (params {json.dumps(rec['params'], sort_keys=True)})"
        name = f"{ds_name}__{rec['algorithm']}__{rec['selector']}.svg"
        (figures_dir / name).write_text(
            scatter_svg(points, label_cache[ds_name], title, subtitle)
        )
        written.append(f"figures/{name}")
    return written
