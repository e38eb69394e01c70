"""FastAPI service wrapping the benchmark core.

Handlers are plain functions over the pydantic schemas so the CLI's local
backend can invoke them without a socket; the HTTP layer below adds nothing
but routing and error mapping.
"""

from pathlib import Path

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__, datasets
from ..metrics import EmbeddingScorer
from ..reducers import run_reducer
from ..harness import emit_report, plan_from_dict, rank_metrics, run_search
from ..harness.sweep import _dedupe, _read_log
from ..serialize import read_json
from . import schemas as s


def health() -> s.HealthResponse:
    return s.HealthResponse(status="ok", version=__version__)


def list_datasets() -> list[s.DatasetInfoModel]:
    return [
        s.DatasetInfoModel(**vars(info))
        for info in datasets.REGISTRY.values()
    ]


def generate_dataset(req: s.GenerateRequest) -> s.DatasetResponse:
    ps = datasets.generate(req.dataset, req.n, req.seed, req.variant)
    return s.DatasetResponse(
        points=ps.points.tolist(),
        labels=None if ps.labels is None else [int(v) for v in ps.labels],
        meta=ps.meta,
    )


def embed(req: s.EmbedRequest) -> s.EmbedResponse:
    emb = run_reducer(req.algorithm, req.points, dict(req.params),
                      seed=req.seed, dim=req.dim)
    return s.EmbedResponse(points=emb.points.tolist(), provenance=emb.provenance)


def score(req: s.ScoreRequest) -> s.ScoreResponse:
    scorer = EmbeddingScorer(req.x_points, req.y_points, labels=req.labels)
    results = scorer.score_all(req.metrics, k=req.k)
    return s.ScoreResponse(records=[s.ScoreRecord(**r.to_record()) for r in results])


def search(req: s.SearchRequest) -> s.SearchResponse:
    plan = plan_from_dict(req.plan.to_doc())
    summary = run_search(plan, req.out_dir, resume=req.resume,
                         workers=req.workers, stop_after=req.stop_after)
    return s.SearchResponse(**summary)


def rank(req: s.RankRequest) -> s.RankResponse:
    out = Path(req.out_dir)
    plan_path = out / "plan.json"
    winners = _dedupe(_read_log(out / "winners.jsonl"),
                      ["dataset", "algorithm", "selector"])
    if not winners:
        raise ValueError(f"{out}: no winner records; run a search first")
    order = read_json(plan_path)["metrics"] if plan_path.exists() else None
    rows = rank_metrics(winners, metric_order=order)
    return s.RankResponse(rows=[s.RankRow(**row) for row in rows])


def report(req: s.ReportRequest) -> s.ReportResponse:
    return s.ReportResponse(files=emit_report(req.out_dir))


def create_app() -> FastAPI:
    app = FastAPI(title="drbench", version=__version__,
                  description="dimensionality-reduction quality benchmark service")

    @app.exception_handler(ValueError)
    async def value_error_handler(_, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=s.HealthResponse)
    def _health():
        return health()

    @app.get("/datasets", response_model=list[s.DatasetInfoModel])
    def _datasets():
        return list_datasets()

    @app.post("/datasets/generate", response_model=s.DatasetResponse)
    def _generate(req: s.GenerateRequest):
        return generate_dataset(req)

    @app.post("/embeddings/compute", response_model=s.EmbedResponse)
    def _embed(req: s.EmbedRequest):
        return embed(req)

    @app.post("/metrics/score", response_model=s.ScoreResponse)
    def _score(req: s.ScoreRequest):
        return score(req)

    @app.post("/search/run", response_model=s.SearchResponse)
    def _search(req: s.SearchRequest):
        return search(req)

    @app.post("/rank/compute", response_model=s.RankResponse)
    def _rank(req: s.RankRequest):
        return rank(req)

    @app.post("/report/emit", response_model=s.ReportResponse)
    def _report(req: s.ReportRequest):
        return report(req)

    return app


app = create_app()
