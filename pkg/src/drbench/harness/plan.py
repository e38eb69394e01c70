"""Experiment plans: datasets, algorithm grids, metrics, seeds.

A plan is a JSON document; algorithm grids may be inlined or referenced by
name (resolved against the packaged grid documents) or by filesystem path.
The "bayes" metric identifier resolves per dataset: Procrustes distance when
the embedding dimension equals the dataset's native dimension, 1-NN label
accuracy when the dataset instead provides separable class labels.
"""

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .. import datasets
from ..metrics import ORIENTATIONS

BAYES = "bayes"


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    n: int
    seed: int
    variant: str | None = None

    def generate(self) -> datasets.PointSet:
        return datasets.generate(self.name, self.n, self.seed, self.variant)

    def key(self) -> str:
        return self.name


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    grid: tuple[dict, ...]  # expanded configurations, in grid order
    manifest: dict | None = None  # external source: dataset -> [embedding paths]

    @property
    def is_external(self) -> bool:
        return self.manifest is not None


@dataclass(frozen=True)
class ExperimentPlan:
    name: str
    datasets: tuple[DatasetSpec, ...]
    algorithms: tuple[AlgorithmSpec, ...]
    metrics: tuple[str, ...]
    seeds: tuple[int, ...]
    target_dim: int = 2
    aggregate: str = "mean"
    source: dict = field(default_factory=dict, compare=False)


def expand_grid(grid: dict) -> tuple[dict, ...]:
    """Cartesian product of per-parameter value lists, in declaration order.
    An empty grid expands to the single default configuration."""
    if not grid:
        return ({},)
    names = list(grid)
    combos = itertools.product(*(grid[name] for name in names))
    return tuple(dict(zip(names, combo)) for combo in combos)


def _packaged(relative: str) -> dict:
    ref = resources.files("drbench").joinpath(relative)
    return json.loads(ref.read_text())


def _load_grid(ref, base_dir: Path | None) -> dict:
    """Resolve a grid reference to {param: [values]}."""
    if isinstance(ref, dict):
        return dict(ref)
    if isinstance(ref, str):
        candidates = []
        if base_dir is not None:
            candidates.append(base_dir / ref)
        candidates.append(Path(ref))
        for cand in candidates:
            if cand.exists():
                doc = json.loads(cand.read_text())
                doc.pop("algorithm", None)
                return doc
        try:
            doc = _packaged(f"plans/grids/{ref}.json")
        except FileNotFoundError:
            raise ValueError(f"grid reference {ref!r} not found") from None
        doc.pop("algorithm", None)
        return doc
    raise ValueError(f"grid must be a mapping or a reference string, got {type(ref)}")


def bayes_metric_for(dataset_name: str, target_dim: int) -> str:
    """Dataset-appropriate ground-truth reference metric."""
    info = datasets.REGISTRY.get(dataset_name)
    if info is None:
        raise ValueError(f"unknown dataset {dataset_name!r}")
    if info.dim == target_dim:
        return "procrustes"
    if info.has_labels:
        return "1nn"
    raise ValueError(
        f"no Bayes metric applies to {dataset_name}: dimension differs from the "
        f"embedding target and no class labels exist"
    )


def plan_from_dict(doc: dict, base_dir: Path | None = None) -> ExperimentPlan:
    dsets = tuple(
        DatasetSpec(d["name"], int(d["n"]), int(d.get("seed", 1)), d.get("variant"))
        for d in doc["datasets"]
    )
    algos = []
    for a in doc["algorithms"]:
        name = a["name"]
        if name == "external" or a.get("manifest") is not None:
            manifest = a.get("manifest")
            if isinstance(manifest, str):
                mpath = (base_dir / manifest) if base_dir else Path(manifest)
                manifest = json.loads(Path(mpath).read_text())
            if not isinstance(manifest, dict):
                raise ValueError("external algorithm entries need a manifest")
            label = a.get("label", name if name != "external" else "external")
            algos.append(AlgorithmSpec(label, ({},), manifest=manifest))
        elif "grid_configs" in a:  # pre-expanded (canonical snapshot round-trip)
            algos.append(AlgorithmSpec(name, tuple(dict(g) for g in a["grid_configs"])))
        else:
            grid = _load_grid(a.get("grid", {}), base_dir)
            algos.append(AlgorithmSpec(name, expand_grid(grid)))
    plan = ExperimentPlan(
        name=doc.get("name", "unnamed"),
        datasets=dsets,
        algorithms=tuple(algos),
        metrics=tuple(doc["metrics"]),
        seeds=tuple(int(s) for s in doc["seeds"]),
        target_dim=int(doc.get("target_dim", 2)),
        aggregate=doc.get("aggregate", "mean"),
        source=doc,
    )
    validate_plan(plan)
    return plan


def load_plan(path) -> ExperimentPlan:
    path = Path(path)
    return plan_from_dict(json.loads(path.read_text()), base_dir=path.parent)


def default_plan() -> ExperimentPlan:
    return plan_from_dict(_packaged("plans/default.json"))


def validate_plan(plan: ExperimentPlan) -> None:
    if not plan.datasets:
        raise ValueError("plan has no datasets")
    if not plan.seeds:
        raise ValueError("plan has no seeds")
    if not plan.metrics:
        raise ValueError("plan has no metrics")
    if plan.aggregate not in ("mean", "median"):
        raise ValueError(f"aggregate must be mean or median, got {plan.aggregate!r}")
    names = set()
    for d in plan.datasets:
        if d.name not in datasets.REGISTRY:
            raise ValueError(f"unknown dataset {d.name!r}")
        if d.name in names:
            raise ValueError(f"duplicate dataset {d.name!r}")
        names.add(d.name)
        bayes_metric_for(d.name, plan.target_dim)  # must resolve
    for a in plan.algorithms:
        if not a.grid:
            raise ValueError(f"algorithm {a.name} has an empty grid")
    for m in plan.metrics:
        if m != BAYES and m not in ORIENTATIONS:
            raise ValueError(f"unknown metric {m!r}")


def canonical_plan_json(plan: ExperimentPlan) -> str:
    """Stable serialization used for snapshots and resume compatibility checks."""
    doc = {
        "name": plan.name,
        "datasets": [
            {k: v for k, v in
             (("name", d.name), ("n", d.n), ("seed", d.seed), ("variant", d.variant))
             if v is not None}
            for d in plan.datasets
        ],
        "algorithms": [
            {"name": a.name, "grid_configs": list(a.grid),
             **({"manifest": a.manifest} if a.manifest is not None else {})}
            for a in plan.algorithms
        ],
        "metrics": list(plan.metrics),
        "seeds": list(plan.seeds),
        "target_dim": plan.target_dim,
        "aggregate": plan.aggregate,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
