"""Grid-search sweep and winner re-scoring.

Work items (dataset, algorithm, grid point, seed) are independent; each one
produces an embedding and evaluates every plan metric on it.  Results append
to a JSON-lines log as they complete, so an interrupted run can resume by
skipping finished items, and the final CSV is written in canonical order so
parallelism or resumption never changes the output bytes.
"""

import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from ..geometry import pairwise_distances, rank_matrix
from ..metrics import MAXIMIZE, MINIMIZE, ORIENTATIONS, EmbeddingScorer
from ..reducers import load_external_embedding, run_reducer
from ..serialize import append_jsonl, write_embedding_csv, write_records_csv
from .plan import BAYES, DatasetSpec, ExperimentPlan, bayes_metric_for, canonical_plan_json

WORKERS_ENV = "DRBENCH_WORKERS"

SCORE_COLUMNS = ["dataset", "algorithm", "grid_index", "seed", "metric",
                 "value", "orientation", "params", "aux"]
WINNER_COLUMNS = ["dataset", "algorithm", "selector", "grid_index", "seed",
                  "bayes_metric", "value", "orientation", "params", "aux"]

WORST = sys.float_info.max


class SweepInterrupted(RuntimeError):
    """Raised by the stop_after test hook to simulate a mid-run interrupt."""


@dataclass(frozen=True)
class WorkItem:
    dataset: DatasetSpec
    algorithm: str
    grid_index: int
    params: dict
    seed: int
    external_path: str | None = None

    def key(self) -> tuple:
        return (self.dataset.name, self.algorithm, self.grid_index, self.seed)


def worst_value(orientation: str) -> float:
    return WORST if orientation == MINIMIZE else -WORST


_DATASET_CACHE: dict = {}


def _dataset_geometry(ds: DatasetSpec):
    key = (ds.name, ds.n, ds.seed, ds.variant)
    if key not in _DATASET_CACHE:
        ps = ds.generate()
        d_hi = pairwise_distances(ps.points)
        _DATASET_CACHE[key] = (ps, d_hi, rank_matrix(d_hi))
    return _DATASET_CACHE[key]


def _metric_records(base, item, metric_ids, target_dim, embedding=None, error=None):
    records = []
    for mid in metric_ids:
        actual = bayes_metric_for(item.dataset.name, target_dim) if mid == BAYES else mid
        orientation = ORIENTATIONS[actual]
        rec = dict(base, metric=mid, orientation=orientation)
        aux = {"resolved": actual} if mid == BAYES else {}
        if error is not None:
            rec["value"] = worst_value(orientation)
            rec["aux"] = dict(aux, error=error)
        else:
            try:
                score = embedding.score(actual)
                rec["value"] = float(score.value)
                rec["aux"] = dict(aux, **(score.aux or {}))
            except Exception as exc:  # metric inapplicable; keep the table total
                rec["value"] = worst_value(orientation)
                rec["aux"] = dict(aux, error=str(exc))
        records.append(rec)
    return records


def compute_embedding(item: WorkItem, target_dim: int):
    ps, _, _ = _dataset_geometry(item.dataset)
    if item.external_path is not None:
        return load_external_embedding(item.external_path, expected_n=ps.n)
    return run_reducer(item.algorithm, ps.points, item.params, seed=item.seed,
                       dim=target_dim)


def run_work_item(item: WorkItem, metric_ids, target_dim: int) -> list[dict]:
    """Embed one work item and evaluate the requested metrics on it."""
    ps, d_hi, r_hi = _dataset_geometry(item.dataset)
    base = {
        "dataset": item.dataset.name,
        "algorithm": item.algorithm,
        "grid_index": item.grid_index,
        "seed": item.seed,
        "params": item.params,
    }
    try:
        emb = compute_embedding(item, target_dim)
        scorer = EmbeddingScorer(ps.points, emb.points, labels=ps.labels)
        scorer.__dict__["d_hi"] = d_hi  # reuse the dataset-level geometry
        scorer.__dict__["r_hi"] = r_hi
    except Exception as exc:
        return _metric_records(base, item, metric_ids, target_dim, error=str(exc))
    return _metric_records(base, item, metric_ids, target_dim, embedding=scorer)


def sweep_items(plan: ExperimentPlan) -> list[WorkItem]:
    items = []
    for ds in plan.datasets:
        for algo in plan.algorithms:
            if algo.is_external:
                for gi, entry in enumerate(algo.manifest.get(ds.name, [])):
                    if isinstance(entry, str):
                        entry = {"path": entry}
                    items.append(WorkItem(ds, algo.name, gi,
                                          dict(entry.get("params", {})),
                                          int(entry.get("seed", 0)),
                                          external_path=entry["path"]))
            else:
                for gi, params in enumerate(algo.grid):
                    for seed in plan.seeds:
                        items.append(WorkItem(ds, algo.name, gi, params, seed))
    return items


def _read_log(path) -> list[dict]:
    """Tolerates a torn final line (interrupted append)."""
    path = Path(path)
    if not path.exists():
        return []
    records = []
    lines = path.read_text().splitlines()
    for i, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError:
            if i == len(lines) - 1:
                break
            raise
    return records


def _dedupe(records, key_fields) -> list[dict]:
    seen, out = set(), []
    for rec in records:
        key = tuple(rec.get(f) for f in key_fields)
        if key not in seen:
            seen.add(key)
            out.append(rec)
    return out


def _sorted_records(records, key_fields):
    return sorted(records, key=lambda r: tuple(
        json.dumps(r.get(f), sort_keys=True) if isinstance(r.get(f), dict)
        else r.get(f) for f in key_fields))


def _prepare_out_dir(plan, out_dir, resume) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    snapshot = out / "plan.json"
    canon = canonical_plan_json(plan)
    if snapshot.exists():
        if snapshot.read_text() != canon:
            raise ValueError(f"{out}: existing results were produced by a different plan")
        if not resume and (out / "scores.jsonl").exists():
            raise ValueError(f"{out}: already contains results; pass resume or a fresh directory")
    else:
        snapshot.write_text(canon)
    return out


def resolve_workers(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    return max(1, workers)


def run_grid_search(plan: ExperimentPlan, out_dir, resume: bool = False,
                    workers: int | None = None, stop_after: int | None = None) -> list[dict]:
    """Run the sweep, appending to out_dir/scores.jsonl; returns the full table."""
    out = _prepare_out_dir(plan, out_dir, resume)
    log_path = out / "scores.jsonl"
    existing = _dedupe(_read_log(log_path), ["dataset", "algorithm", "grid_index", "seed", "metric"])
    done: dict[tuple, set] = {}
    for rec in existing:
        key = (rec["dataset"], rec["algorithm"], rec["grid_index"], rec["seed"])
        done.setdefault(key, set()).add(rec["metric"])

    pending = []
    for item in sweep_items(plan):
        missing = [m for m in plan.metrics if m not in done.get(item.key(), set())]
        if missing:
            pending.append((item, tuple(missing)))

    records = list(existing)
    appended = 0

    def _absorb(item, missing, new_records):
        nonlocal appended
        for rec in new_records:
            if rec["metric"] in missing:
                append_jsonl(log_path, rec)
                records.append(rec)
                appended += 1
                if stop_after is not None and appended >= stop_after:
                    raise SweepInterrupted(f"stopped after {appended} records")

    n_workers = resolve_workers(workers)
    if n_workers == 1 or len(pending) <= 1:
        for item, missing in pending:
            _absorb(item, missing, run_work_item(item, plan.metrics, plan.target_dim))
    else:
        ctx = get_context("spawn")
        with ProcessPoolExecutor(max_workers=n_workers, mp_context=ctx) as pool:
            futures = {
                pool.submit(run_work_item, item, plan.metrics, plan.target_dim): (item, missing)
                for item, missing in pending
            }
            try:
                for fut in as_completed(futures):
                    item, missing = futures[fut]
                    _absorb(item, missing, fut.result())
            except SweepInterrupted:
                for f in futures:
                    f.cancel()
                raise

    table = _sorted_records(
        _dedupe(records, ["dataset", "algorithm", "grid_index", "seed", "metric"]),
        ["dataset", "algorithm", "grid_index", "seed", "metric"],
    )
    write_records_csv(out / "scores.csv", table, SCORE_COLUMNS)
    return table


def aggregate_scores(values: list[float], how: str) -> float:
    return float(np.median(values)) if how == "median" else float(np.mean(values))


def select_best(records, dataset: str, algorithm: str, metric: str,
                aggregate: str = "mean"):
    """Best grid configuration for (dataset, algorithm, metric).

    Per-configuration score is the aggregate over seeds (seed-sorted for a
    stable summation order); ties break toward the earliest grid index.
    Returns (grid_index, params).
    """
    groups: dict[int, dict] = {}
    orientation = None
    for rec in records:
        if (rec["dataset"], rec["algorithm"], rec["metric"]) != (dataset, algorithm, metric):
            continue
        orientation = rec["orientation"]
        g = groups.setdefault(rec["grid_index"], {"params": rec["params"], "by_seed": {}})
        g["by_seed"].setdefault(rec["seed"], rec["value"])
    if not groups:
        raise ValueError(f"no records for ({dataset}, {algorithm}, {metric})")
    best_gi, best_score = None, None
    for gi in sorted(groups):
        vals = [v for _, v in sorted(groups[gi]["by_seed"].items())]
        score = aggregate_scores(vals, aggregate)
        better = best_score is None or (
            score > best_score if orientation == MAXIMIZE else score < best_score
        )
        if better:
            best_gi, best_score = gi, score
    return best_gi, groups[best_gi]["params"]


def _winner_embedding_name(dataset: str, algorithm: str, selector: str) -> str:
    return f"{dataset}__{algorithm}__{selector}.csv"


def score_winners(plan: ExperimentPlan, sweep_records, out_dir,
                  resume: bool = False) -> list[dict]:
    """Re-run each (dataset, algorithm, metric) winner and score it with the
    dataset's Bayes reference metric; persists embeddings for the report."""
    out = Path(out_dir)
    log_path = out / "winners.jsonl"
    emb_dir = out / "embeddings"
    emb_dir.mkdir(parents=True, exist_ok=True)
    existing = _dedupe(_read_log(log_path), ["dataset", "algorithm", "selector"])
    done = {(r["dataset"], r["algorithm"], r["selector"]) for r in existing}

    records = list(existing)
    rerun_seed = plan.seeds[0]
    emb_cache: dict[tuple, object] = {}

    for ds in plan.datasets:
        ps, d_hi, r_hi = _dataset_geometry(ds)
        bayes = bayes_metric_for(ds.name, plan.target_dim)
        for algo in plan.algorithms:
            for selector in plan.metrics:
                if (ds.name, algo.name, selector) in done:
                    continue
                gi, params = select_best(sweep_records, ds.name, algo.name,
                                         selector, plan.aggregate)
                rec = {
                    "dataset": ds.name,
                    "algorithm": algo.name,
                    "selector": selector,
                    "grid_index": gi,
                    "params": params,
                    "seed": rerun_seed,
                    "bayes_metric": bayes,
                    "orientation": ORIENTATIONS[bayes],
                }
                cache_key = (ds.name, algo.name, gi)
                try:
                    if cache_key not in emb_cache:
                        if algo.is_external:
                            entry = algo.manifest[ds.name][gi]
                            path = entry["path"] if isinstance(entry, dict) else entry
                            emb_cache[cache_key] = load_external_embedding(path, expected_n=ps.n)
                        else:
                            emb_cache[cache_key] = run_reducer(
                                algo.name, ps.points, params, seed=rerun_seed,
                                dim=plan.target_dim)
                    emb = emb_cache[cache_key]
                    scorer = EmbeddingScorer(ps.points, emb.points, labels=ps.labels)
                    scorer.__dict__["d_hi"] = d_hi
                    scorer.__dict__["r_hi"] = r_hi
                    score = scorer.score(bayes)
                    rec["value"] = float(score.value)
                    rec["aux"] = score.aux or {}
                    emb_path = emb_dir / _winner_embedding_name(ds.name, algo.name, selector)
                    write_embedding_csv(emb_path, emb)
                    rec["aux"]["embedding_file"] = f"embeddings/{emb_path.name}"
                except Exception as exc:
                    rec["value"] = worst_value(ORIENTATIONS[bayes])
                    rec["aux"] = {"error": str(exc)}
                append_jsonl(log_path, rec)
                records.append(rec)

    table = _sorted_records(
        _dedupe(records, ["dataset", "algorithm", "selector"]),
        ["dataset", "algorithm", "selector"],
    )
    write_records_csv(out / "winners.csv", table, WINNER_COLUMNS)
    return table


def run_search(plan: ExperimentPlan, out_dir, resume: bool = False,
               workers: int | None = None, stop_after: int | None = None) -> dict:
    """Full protocol: sweep, then winner re-runs with Bayes scoring."""
    sweep = run_grid_search(plan, out_dir, resume=resume, workers=workers,
                            stop_after=stop_after)
    winners = score_winners(plan, sweep, out_dir, resume=resume)
    failures = sorted({
        f"{r['dataset']}/{r['algorithm']}/grid{r['grid_index']}/seed{r.get('seed')}: "
        f"{r['aux']['error']}"
        for r in sweep + winners
        if isinstance(r.get("aux"), dict) and "error" in r["aux"]
    })
    return {
        "sweep_records": len(sweep),
        "winner_records": len(winners),
        "failures": failures,
        "out_dir": str(out_dir),
    }
