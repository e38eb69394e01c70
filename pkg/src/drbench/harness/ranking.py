"""Rank aggregation of Bayes-scored winners.

For every (algorithm, dataset) pair the selector metrics are ranked 1..m by
their Bayes score (average ranks on ties), ranks are averaged within the 2D
and high-dimensional dataset groups, and the overall score is the mean of the
two group averages.
"""

from scipy import stats

from ..metrics import MINIMIZE

GROUP_2D = "2d"
GROUP_HD = "hd"


def rank_metrics(winner_records, metric_order=None) -> list[dict]:
    """Per-metric average ranks; rows ordered by metric_order when given.

    Returns rows {metric, rank_2d, rank_hd, overall}; a group average is None
    when the plan had no datasets in that group.
    """
    cells: dict[tuple, dict] = {}
    groups: dict[str, str] = {}
    selectors_seen: list[str] = []
    for rec in winner_records:
        pair = (rec["dataset"], rec["algorithm"])
        cells.setdefault(pair, {})[rec["selector"]] = (rec["value"], rec["orientation"])
        groups[rec["dataset"]] = GROUP_2D if rec["bayes_metric"] == "procrustes" else GROUP_HD
        if rec["selector"] not in selectors_seen:
            selectors_seen.append(rec["selector"])

    selectors = list(metric_order) if metric_order else selectors_seen
    missing = [
        f"{d}/{a}/{s}"
        for (d, a), vals in sorted(cells.items())
        for s in selectors
        if s not in vals
    ]
    if missing:
        raise ValueError("missing Bayes cells: " + ", ".join(missing))

    sums = {s: {GROUP_2D: 0.0, GROUP_HD: 0.0} for s in selectors}
    counts = {GROUP_2D: 0, GROUP_HD: 0}
    for (dataset, algorithm) in sorted(cells):
        vals = cells[(dataset, algorithm)]
        values = [vals[s][0] for s in selectors]
        orientation = vals[selectors[0]][1]
        data = values if orientation == MINIMIZE else [-v for v in values]
        ranks = stats.rankdata(data)
        group = groups[dataset]
        counts[group] += 1
        for s, r in zip(selectors, ranks):
            sums[s][group] += float(r)

    rows = []
    for s in selectors:
        rank_2d = sums[s][GROUP_2D] / counts[GROUP_2D] if counts[GROUP_2D] else None
        rank_hd = sums[s][GROUP_HD] / counts[GROUP_HD] if counts[GROUP_HD] else None
        present = [r for r in (rank_2d, rank_hd) if r is not None]
        rows.append({
            "metric": s,
            "rank_2d": rank_2d,
            "rank_hd": rank_hd,
            "overall": sum(present) / len(present) if present else None,
        })
    return rows


def average_procrustes(winner_records) -> list[dict]:
    """Mean winner Procrustes distance per algorithm over the 2D datasets."""
    by_algo: dict[str, list] = {}
    for rec in sorted(winner_records,
                      key=lambda r: (r["dataset"], r["algorithm"], r["selector"])):
        if rec["bayes_metric"] == "procrustes":
            by_algo.setdefault(rec["algorithm"], []).append(rec["value"])
    return [
        {"algorithm": algo, "avg_procrustes": sum(vals) / len(vals)}
        for algo, vals in sorted(by_algo.items())
    ]
