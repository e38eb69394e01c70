"""Command-line interface.

A thin client over the benchmark service: commands build request models,
invoke the service (in-process by default, over HTTP with --server) and write
any files locally.  Heavy lifting lives in the core package.
"""

import csv
import json
import sys

import click
import numpy as np

from .client import ServiceClient
from .datasets import PointSet
from .harness import canonical_plan_json, default_plan, load_plan
from .reducers import Embedding, load_external_embedding
from .serialize import fmt, read_dataset_csv, write_dataset_csv, write_embedding_csv
from .service import schemas as s


def _parse_params(text: str) -> dict:
    params = {}
    for part in filter(None, (p.strip() for p in (text or "").split(","))):
        if "=" not in part:
            raise click.ClickException(f"bad parameter {part!r}; expected name=value")
        key, value = part.split("=", 1)
        params[key.strip()] = value.strip()
    return params


@click.group()
@click.option("--server", envvar="DRBENCH_SERVER", default=None,
              help="Remote service URL; defaults to in-process execution.")
@click.version_option()
@click.pass_context
def main(ctx, server):
    """Benchmark dimensionality-reduction quality metrics on ground-truth data."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--dataset", required=True, help="Generator name (see `drbench datasets`).")
@click.option("--n", required=True, type=int)
@click.option("--seed", default=1, type=int)
@click.option("--variant", default=None, help="two-lines only: formula | lines.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def generate(client: ServiceClient, dataset, n, seed, variant, out):
    """Generate a synthetic dataset CSV plus its JSON meta sidecar."""
    try:
        resp = client.generate(s.GenerateRequest(dataset=dataset, n=n, seed=seed,
                                                 variant=variant))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    ps = PointSet(
        np.asarray(resp.points, dtype=float),
        None if resp.labels is None else np.asarray(resp.labels),
        resp.meta,
    )
    write_dataset_csv(out, ps)
    click.echo(f"wrote {ps.n} x {ps.dim} points to {out}")


@main.command()
@click.pass_obj
def datasets(client: ServiceClient):
    """List the available dataset generators."""
    for info in client.list_datasets():
        labeled = "labeled" if info.has_labels else "unlabeled"
        click.echo(f"{info.name}: dim {info.dim}, {labeled}, {info.constraint}, "
                   f"default n {info.default_n}")


@main.command()
@click.option("--algo", required=True, help="pca | sammon | tsne | lmds")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--params", default="", help="Comma-separated name=value pairs.")
@click.option("--seed", default=0, type=int)
@click.option("--dim", default=2, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_obj
def embed(client: ServiceClient, algo, input_path, params, seed, dim, out):
    """Embed a dataset CSV; writes the embedding CSV and provenance sidecar."""
    try:
        ps = read_dataset_csv(input_path)
        resp = client.embed(s.EmbedRequest(algorithm=algo, points=ps.points.tolist(),
                                           params=_parse_params(params),
                                           seed=seed, dim=dim))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    emb = Embedding(np.asarray(resp.points, dtype=float), resp.provenance)
    write_embedding_csv(out, emb)
    click.echo(f"wrote {emb.n} x {emb.dim} embedding to {out}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="Dataset CSV (x1..xd[,label] header).")
@click.option("--embedding", "embedding_path", required=True,
              type=click.Path(exists=True), help="Headerless embedding CSV.")
@click.option("--metric", default="all",
              help='"all" or a comma-separated list of metric names.')
@click.option("--k", default=None, type=int, help="Neighborhood size for qnx/lcmc.")
@click.pass_obj
def score(client: ServiceClient, input_path, embedding_path, metric, k):
    """Score an embedding against its input; JSON lines on standard output."""
    try:
        ps = read_dataset_csv(input_path)
        emb = load_external_embedding(embedding_path, expected_n=ps.n)
        metrics = None if metric == "all" else [m.strip() for m in metric.split(",")]
        resp = client.score(s.ScoreRequest(
            x_points=ps.points.tolist(),
            y_points=emb.points.tolist(),
            labels=None if ps.labels is None else [int(v) for v in ps.labels],
            metrics=metrics,
            k=k,
        ))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    context = {}
    if ps.meta.get("generator"):
        context["dataset"] = ps.meta["generator"]
    prov = emb.provenance
    if prov.get("algorithm") and prov["algorithm"] != "external":
        context["algorithm"] = prov["algorithm"]
        context["params"] = prov.get("params", {})
        context["seed"] = prov.get("seed")
    for rec in resp.records:
        click.echo(json.dumps({**context, **rec.model_dump(exclude_none=True)},
                              sort_keys=True))


@main.command()
@click.option("--plan", "plan_path", default=None, type=click.Path(exists=True),
              help="Plan JSON; defaults to the packaged protocol plan.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--resume", is_flag=True, help="Continue a partially completed run.")
@click.option("--workers", default=None, type=int,
              help="Parallel workers (default: DRBENCH_WORKERS or 1).")
@click.pass_obj
def search(client: ServiceClient, plan_path, out_dir, resume, workers):
    """Run the full protocol: grid sweep, winner re-runs, Bayes scoring."""
    try:
        plan = load_plan(plan_path) if plan_path else default_plan()
        doc = json.loads(canonical_plan_json(plan))
        resp = client.search(s.SearchRequest(
            plan=s.PlanPayload.model_validate(doc),
            out_dir=out_dir, resume=resume, workers=workers,
        ))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"{resp.sweep_records} sweep records, {resp.winner_records} winner "
               f"records in {resp.out_dir}")
    if resp.failures:
        for failure in resp.failures:
            click.echo(f"FAILED {failure}", err=True)
        sys.exit(1)


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.pass_obj
def rank(client: ServiceClient, out_dir):
    """Aggregate Bayes records from a completed search into metric ranks."""
    try:
        resp = client.rank(s.RankRequest(out_dir=out_dir))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    writer = csv.writer(sys.stdout)
    writer.writerow(["Metric", "2D Avg Rank", "High Dim Avg Rank", "Overall Avg"])
    for row in resp.rows:
        writer.writerow([
            row.metric,
            "" if row.rank_2d is None else fmt(row.rank_2d),
            "" if row.rank_hd is None else fmt(row.rank_hd),
            "" if row.overall is None else fmt(row.overall),
        ])


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.pass_obj
def report(client: ServiceClient, out_dir):
    """Render tables and winning-embedding figures for a completed search."""
    try:
        resp = client.report(s.ReportRequest(out_dir=out_dir))
    except ValueError as exc:
        raise click.ClickException(str(exc))
    for name in resp.files:
        click.echo(name)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8765, type=int)
def serve(host, port):
    """Run the benchmark service over HTTP."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
