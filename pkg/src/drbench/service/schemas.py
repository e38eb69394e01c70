"""Pydantic request/response models for the benchmark service."""

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class DatasetInfoModel(BaseModel):
    name: str
    dim: int
    has_labels: bool
    default_n: int
    constraint: str


class GenerateRequest(BaseModel):
    dataset: str
    n: int
    seed: int = 1
    variant: str | None = None


class DatasetResponse(BaseModel):
    points: list[list[float]]
    labels: list[int] | None = None
    meta: dict


class EmbedRequest(BaseModel):
    algorithm: str
    points: list[list[float]]
    params: dict[str, float | int | str] = Field(default_factory=dict)
    seed: int = 0
    dim: int = 2


class EmbedResponse(BaseModel):
    points: list[list[float]]
    provenance: dict


class ScoreRequest(BaseModel):
    x_points: list[list[float]]
    y_points: list[list[float]]
    labels: list[int] | None = None
    metrics: list[str] | None = None  # None -> every applicable metric
    k: int | None = None


class ScoreRecord(BaseModel):
    metric: str
    value: float
    orientation: str
    params: dict | None = None
    aux: dict | None = None


class ScoreResponse(BaseModel):
    records: list[ScoreRecord]


class AlgorithmSpecModel(BaseModel):
    name: str
    grid: str | dict[str, list[float | int | str]] | None = None
    grid_configs: list[dict[str, float | int | str]] | None = None
    label: str | None = None
    manifest: str | dict | None = None


class DatasetSpecModel(BaseModel):
    name: str
    n: int
    seed: int = 1
    variant: str | None = None


class PlanPayload(BaseModel):
    name: str = "unnamed"
    datasets: list[DatasetSpecModel]
    algorithms: list[AlgorithmSpecModel]
    metrics: list[str]
    seeds: list[int]
    target_dim: int = 2
    aggregate: str = "mean"

    def to_doc(self) -> dict:
        return self.model_dump(exclude_none=True)


class SearchRequest(BaseModel):
    plan: PlanPayload
    out_dir: str
    resume: bool = False
    workers: int | None = None
    stop_after: int | None = None  # testing hook: abort after N appended records


class SearchResponse(BaseModel):
    sweep_records: int
    winner_records: int
    failures: list[str]
    out_dir: str


class RankRequest(BaseModel):
    out_dir: str


class RankRow(BaseModel):
    metric: str
    rank_2d: float | None = None
    rank_hd: float | None = None
    overall: float | None = None


class RankResponse(BaseModel):
    rows: list[RankRow]


class ReportRequest(BaseModel):
    out_dir: str


class ReportResponse(BaseModel):
    files: list[str]
