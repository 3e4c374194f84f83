"""Batch experiment runner and the metric suite over execution records.

Runs many automated executions per ranking criterion from a pool of labeled
initial seeds, then reduces the records to per-cycle series: cumulative
rank-1 fake incidence, per-cycle density, and recall against the optimal
execution (which can discover at most x fake websites by cycle x). All
metrics are recomputable from the raw records alone.
"""

from __future__ import annotations

import csv
import json
import multiprocessing
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import CREDIBLE, FAKE, Corpus, Denylist, LabelSet, PopularityRanks
from .engine import ExecutionRecord, run_auto_execution

__all__ = [
    "BatchConfig",
    "BatchExecutionError",
    "BatchResult",
    "MetricSeries",
    "build_seed_pool",
    "derive_seed",
    "fake_top1_flags",
    "load_records",
    "popularity_cdf",
    "recompute_metrics_csv",
    "run_batch",
    "series_from_records",
    "write_batch_outputs",
    "write_cdf_csv",
]

SEED_SET_TYPES = ("fake0", "fake50", "fake100")

BATCH_MANIFEST = "batch.json"
METRICS_FILENAME = "metrics.csv"
METRIC_NAMES = ("cumulative_rank1_fake", "per_cycle_density", "recall_vs_optimal")

# Fixed substream tags so pool draws and engine seeds never collide.
_POOL_STREAM = 0
_EXEC_STREAM = 1


class BatchExecutionError(RuntimeError):
    """An execution failed; completed records are attached but flagged invalid."""

    def __init__(self, message: str, partial_records: dict):
        super().__init__(message)
        self.partial_records = partial_records


def derive_seed(*parts: int) -> int:
    """Stable 64-bit child seed from integer parts (master seed first)."""
    return int(np.random.SeedSequence(list(parts)).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class BatchConfig:
    master_rng_seed: int
    n_executions: int = 40
    max_cycles: int = 30
    criteria: tuple[str, ...] = ("hindex", "mostpop", "random")
    seed_set_type: str = "fake100"
    ranking_depth: int = 10

    def __post_init__(self) -> None:
        if self.n_executions < 1:
            raise ValueError("n_executions must be >= 1")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be >= 1")
        if not self.criteria:
            raise ValueError("criteria must not be empty")
        for kind in self.criteria:
            if kind not in ("hindex", "mostpop", "random"):
                raise ValueError(f"unknown criterion {kind!r}")
        if self.seed_set_type not in SEED_SET_TYPES:
            raise ValueError(f"seed_set_type must be one of {SEED_SET_TYPES}")


@dataclass
class MetricSeries:
    """Per-cycle series averaged over a batch's executions.

    recall_vs_optimal[x] is cumulative_rank1_fake[x] / (x+1 as 1-based
    cycle), held exactly by construction.
    """

    cumulative_rank1_fake: list[float]
    per_cycle_density: list[float]
    recall_vs_optimal: list[float]


@dataclass
class BatchResult:
    config: BatchConfig
    seed_urls: list[str]
    records: dict[str, list[ExecutionRecord]] = field(default_factory=dict)
    series: dict[str, MetricSeries] = field(default_factory=dict)


def build_seed_pool(
    corpus: Corpus,
    labels: LabelSet,
    seed_set_type: str,
    rng: np.random.Generator,
    n_seeds: int,
) -> list[str]:
    """Draw n_seeds initial-seed URLs whose website labels match the set type.

    fake100 draws only from fake-labeled websites, fake0 only from credible
    ones, fake50 flips a coin per draw. Draws are uniform with replacement
    over the distinct eligible canonical URLs.
    """
    if seed_set_type not in SEED_SET_TYPES:
        raise ValueError(f"seed_set_type must be one of {SEED_SET_TYPES}")
    by_label: dict[str, list[str]] = {FAKE: [], CREDIBLE: []}
    for canonical in sorted(corpus.url_website):
        label = labels.lookup(corpus.url_website[canonical])
        if label in by_label:
            by_label[label].append(canonical)

    needed = {"fake0": (CREDIBLE,), "fake100": (FAKE,), "fake50": (FAKE, CREDIBLE)}[seed_set_type]
    for label in needed:
        if not by_label[label]:
            raise ValueError(f"corpus has no URLs from {label}-labeled websites")

    pool: list[str] = []
    for _ in range(n_seeds):
        if seed_set_type == "fake50":
            label = FAKE if rng.random() < 0.5 else CREDIBLE
        else:
            label = FAKE if seed_set_type == "fake100" else CREDIBLE
        urls = by_label[label]
        pool.append(urls[int(rng.integers(len(urls)))])
    return pool


def fake_top1_flags(record: ExecutionRecord, max_cycles: int) -> list[int]:
    """Per-cycle 1/0: was the top-ranked website labeled fake that cycle?

    Cycles after an early termination are non-events (0); unknown labels
    count as non-fake.
    """
    flags = [0] * max_cycles
    for cycle in record.cycles:
        if cycle.cycle_no <= max_cycles:
            flags[cycle.cycle_no - 1] = 1 if cycle.top1_label == FAKE else 0
    return flags


def series_from_records(records: list[ExecutionRecord], max_cycles: int) -> MetricSeries:
    """Reduce execution records to the averaged per-cycle metric series."""
    n = len(records)
    cumulative_sum = [0] * max_cycles
    density_sum = [0] * max_cycles
    for record in records:
        flags = fake_top1_flags(record, max_cycles)
        running = 0
        for x in range(max_cycles):
            running += flags[x]
            cumulative_sum[x] += running
            density_sum[x] += flags[x]
    cumulative = [cumulative_sum[x] / n for x in range(max_cycles)]
    density = [density_sum[x] / n for x in range(max_cycles)]
    recall = [cumulative[x] / (x + 1) for x in range(max_cycles)]
    return MetricSeries(
        cumulative_rank1_fake=cumulative,
        per_cycle_density=density,
        recall_vs_optimal=recall,
    )


# Worker-process state, inherited via fork so the corpus is pickled never.
_WORKER_INPUTS: tuple[Corpus, LabelSet, Denylist | None] | None = None


def _init_worker(inputs: tuple[Corpus, LabelSet, Denylist | None]) -> None:
    global _WORKER_INPUTS
    _WORKER_INPUTS = inputs


def _run_one(task: tuple) -> ExecutionRecord:
    corpus, labels, denylist = _WORKER_INPUTS
    criterion, seed_url, max_cycles, rng_seed, ranking_depth, seed_set_type = task
    return run_auto_execution(
        corpus,
        labels,
        denylist,
        seed_url,
        criterion,
        max_cycles,
        rng_seed=rng_seed,
        ranking_depth=ranking_depth,
        seed_set_type=seed_set_type,
    )


def run_batch(
    config: BatchConfig,
    corpus: Corpus,
    labels: LabelSet,
    denylist: Denylist | None = None,
    parallel: int = 1,
) -> BatchResult:
    """Run n_executions automated executions per criterion and reduce metrics.

    Execution i draws the i-th pooled seed and the engine seed derived from
    (master, i), identically for every criterion, so criteria are compared
    on paired initial conditions. Output is independent of ``parallel``.
    """
    pool_rng = np.random.default_rng(
        np.random.SeedSequence([config.master_rng_seed, _POOL_STREAM])
    )
    seeds = build_seed_pool(corpus, labels, config.seed_set_type, pool_rng, config.n_executions)
    exec_seeds = [
        derive_seed(config.master_rng_seed, _EXEC_STREAM, i) for i in range(config.n_executions)
    ]

    tasks = [
        (criterion, seeds[i], config.max_cycles, exec_seeds[i], config.ranking_depth, config.seed_set_type)
        for criterion in config.criteria
        for i in range(config.n_executions)
    ]

    result = BatchResult(config=config, seed_urls=seeds)
    inputs = (corpus, labels, denylist)
    flat: list[ExecutionRecord] = []
    if parallel > 1:
        try:
            ctx = multiprocessing.get_context("fork")
        except ValueError:
            ctx = None
        if ctx is not None:
            with ProcessPoolExecutor(
                max_workers=parallel, mp_context=ctx, initializer=_init_worker, initargs=(inputs,)
            ) as pool:
                futures = [pool.submit(_run_one, task) for task in tasks]
                for pos, future in enumerate(futures):
                    try:
                        flat.append(future.result())
                    except Exception as exc:
                        raise _batch_error(config, pos, flat, exc) from exc
        else:
            parallel = 1
    if parallel <= 1 and not flat:
        _init_worker(inputs)
        for pos, task in enumerate(tasks):
            try:
                flat.append(_run_one(task))
            except Exception as exc:
                raise _batch_error(config, pos, flat, exc) from exc

    for c_idx, criterion in enumerate(config.criteria):
        records = flat[c_idx * config.n_executions:(c_idx + 1) * config.n_executions]
        result.records[criterion] = records
        result.series[criterion] = series_from_records(records, config.max_cycles)
    return result


def _batch_error(config: BatchConfig, pos: int, done: list, exc: Exception) -> BatchExecutionError:
    criterion = config.criteria[pos // config.n_executions]
    index = pos % config.n_executions
    partial: dict[str, list[ExecutionRecord]] = {}
    for c_idx, kind in enumerate(config.criteria):
        chunk = done[c_idx * config.n_executions:(c_idx + 1) * config.n_executions]
        if chunk:
            partial[kind] = chunk
    return BatchExecutionError(
        f"execution {index} under criterion {criterion!r} failed: {exc}; partial results invalid",
        partial_records=partial,
    )


def _metrics_rows(criteria: tuple[str, ...], series: dict[str, MetricSeries], max_cycles: int):
    for criterion in criteria:
        s = series[criterion]
        values = {
            "cumulative_rank1_fake": s.cumulative_rank1_fake,
            "per_cycle_density": s.per_cycle_density,
            "recall_vs_optimal": s.recall_vs_optimal,
        }
        for metric in METRIC_NAMES:
            for x in range(max_cycles):
                yield (x + 1, criterion, metric, values[metric][x])


def _write_metrics_csv(path: Path, criteria: tuple[str, ...], series: dict[str, MetricSeries], max_cycles: int) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["cycle", "criterion", "metric", "value"])
        for cycle, criterion, metric, value in _metrics_rows(criteria, series, max_cycles):
            writer.writerow([cycle, criterion, metric, repr(value)])
    os.replace(tmp, path)


def write_batch_outputs(result: BatchResult, out_dir: str | Path) -> None:
    """Persist the manifest, per-execution records, and metrics CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "batch_version": 1,
        "master_rng_seed": result.config.master_rng_seed,
        "n_executions": result.config.n_executions,
        "max_cycles": result.config.max_cycles,
        "criteria": list(result.config.criteria),
        "seed_set_type": result.config.seed_set_type,
        "ranking_depth": result.config.ranking_depth,
        "seed_urls": result.seed_urls,
    }
    tmp = out / (BATCH_MANIFEST + ".tmp")
    tmp.write_text(json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    os.replace(tmp, out / BATCH_MANIFEST)

    for criterion, records in result.records.items():
        rec_dir = out / "records" / criterion
        rec_dir.mkdir(parents=True, exist_ok=True)
        for i, record in enumerate(records):
            tmp = rec_dir / f"exec_{i:03d}.json.tmp"
            tmp.write_text(record.to_json(), encoding="utf-8")
            os.replace(tmp, rec_dir / f"exec_{i:03d}.json")

    _write_metrics_csv(out / METRICS_FILENAME, result.config.criteria, result.series, result.config.max_cycles)


def load_records(out_dir: str | Path) -> tuple[dict, dict[str, list[ExecutionRecord]]]:
    """Read a batch manifest plus every stored execution record."""
    out = Path(out_dir)
    manifest = json.loads((out / BATCH_MANIFEST).read_text(encoding="utf-8"))
    records: dict[str, list[ExecutionRecord]] = {}
    for criterion in manifest["criteria"]:
        rec_dir = out / "records" / criterion
        records[criterion] = [
            ExecutionRecord.from_json(path.read_text(encoding="utf-8"))
            for path in sorted(rec_dir.glob("exec_*.json"))
        ]
    return manifest, records


def recompute_metrics_csv(out_dir: str | Path, target: str | Path | None = None) -> Path:
    """Recompute metrics.csv from stored records; byte-identical to the batch's."""
    manifest, records = load_records(out_dir)
    criteria = tuple(manifest["criteria"])
    series = {
        criterion: series_from_records(records[criterion], manifest["max_cycles"])
        for criterion in criteria
    }
    target = Path(target) if target is not None else Path(out_dir) / METRICS_FILENAME
    _write_metrics_csv(target, criteria, series, manifest["max_cycles"])
    return target


def popularity_cdf(
    discovered: list[str],
    ranks: PopularityRanks,
    labels: LabelSet,
) -> list[tuple[float | None, float]]:
    """CDF of discovered fake-labeled websites over popularity percentile.

    Points are (rank/total_indexed, cumulative fraction); sites absent from
    the rank table are grouped in a terminal unranked bucket keyed None.
    The final cumulative value is always 1.0.
    """
    fakes: list[str] = []
    seen: set[str] = set()
    for website in discovered:
        if website in seen:
            continue
        seen.add(website)
        if labels.lookup(website) == FAKE:
            fakes.append(website)
    if not fakes:
        return []

    percentiles = []
    unranked = 0
    for website in fakes:
        pct = ranks.percentile(website)
        if pct is None:
            unranked += 1
        else:
            percentiles.append(pct)
    percentiles.sort()

    total = len(fakes)
    points: list[tuple[float | None, float]] = []
    covered = 0
    for pct in percentiles:
        covered += 1
        if points and points[-1][0] == pct:
            points[-1] = (pct, covered / total)
        else:
            points.append((pct, covered / total))
    if unranked:
        points.append((None, 1.0))
    return points


def write_cdf_csv(points: list[tuple[float | None, float]], path: str | Path) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["popularity_percentile", "cumulative_fraction"])
        for pct, frac in points:
            writer.writerow(["unranked" if pct is None else repr(pct), repr(frac)])
    os.replace(tmp, path)
