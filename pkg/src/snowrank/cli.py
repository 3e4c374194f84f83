"""Operator command line: generate ecosystems, run executions, batch-evaluate, serve.

Every command validates its flags before touching outputs, writes files
atomically (temp file + rename), and exits nonzero with a one-line
diagnostic on any validation failure. All randomness comes in through
explicit --rng-seed flags; batch mode refuses to run without one.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .corpus import (
    Corpus,
    CorpusFormatError,
    Denylist,
    LabelSet,
    load_denylist,
    load_labels,
    load_posts,
    load_ranks,
    write_labels,
    write_posts,
)
from .engine import SeedResolutionError, run_auto_execution
from .evaluation import (
    BatchConfig,
    BatchExecutionError,
    load_records,
    popularity_cdf,
    recompute_metrics_csv,
    run_batch,
    write_batch_outputs,
    write_cdf_csv,
)
from .synth import EcosystemConfig, generate

__all__ = ["main"]

CRITERIA = ("hindex", "mostpop", "random")
SEED_SETS = ("fake0", "fake50", "fake100")


class CliError(Exception):
    """Validation failure surfaced as a one-line diagnostic, exit code 2."""


def _atomic_write_text(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _load_inputs(args) -> tuple[Corpus, LabelSet, Denylist | None]:
    corpus = load_posts(args.posts, since=args.since, until=args.until)
    labels = load_labels(args.labels) if args.labels else LabelSet()
    denylist = load_denylist(args.denylist) if args.denylist else None
    return corpus, labels, denylist


def _add_input_flags(parser: argparse.ArgumentParser, labels_required: bool = True) -> None:
    parser.add_argument("--posts", required=True, help="line-delimited posts file")
    parser.add_argument("--labels", required=labels_required, help="domain,label CSV")
    parser.add_argument("--denylist", help="plain-text denylist, one domain per line")
    parser.add_argument("--since", type=int, help="drop posts before this epoch second")
    parser.add_argument("--until", type=int, help="drop posts after this epoch second")


def cmd_gen_synth(args) -> int:
    config_kwargs = {}
    if args.config:
        for lineno, line in enumerate(Path(args.config).read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CliError(f"{args.config}: line {lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "rng_seed":
                raise CliError("rng_seed comes from the --rng-seed flag, not the config file")
            config_kwargs[key] = value
    for name in (
        "n_websites",
        "fake_fraction",
        "urls_per_website",
        "zipf_exponent_urls",
        "n_users",
        "homophily",
        "fake_user_fraction",
        "posts_per_user",
    ):
        value = getattr(args, name)
        if value is not None:
            config_kwargs[name] = value
    try:
        fields = EcosystemConfig.__dataclass_fields__
        typed = {key: _coerce(fields, key, value) for key, value in config_kwargs.items()}
        config = EcosystemConfig(rng_seed=args.rng_seed, **typed)
    except (KeyError, ValueError) as exc:
        raise CliError(f"invalid ecosystem config: {exc}") from None

    corpus, truth = generate(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tmp = out / "posts.jsonl.tmp"
    write_posts(corpus, tmp)
    os.replace(tmp, out / "posts.jsonl")
    tmp = out / "labels.csv.tmp"
    write_labels(truth.labels, tmp)
    os.replace(tmp, out / "labels.csv")
    print(f"wrote {len(corpus.posts)} posts and {len(truth.labels.labels)} labels to {out}")
    return 0


def _coerce(fields, key: str, value):
    if key not in fields:
        raise KeyError(f"unknown field {key!r}")
    if not isinstance(value, str):
        return value
    kind = fields[key].type
    if "float" in str(kind):
        return float(value)
    return int(value)


def cmd_run_auto(args) -> int:
    if args.criterion == "random" and args.rng_seed is None:
        raise CliError("--criterion random requires --rng-seed")
    corpus, labels, denylist = _load_inputs(args)
    record = run_auto_execution(
        corpus,
        labels,
        denylist,
        args.initial_seed,
        args.criterion,
        args.cycles,
        rng_seed=args.rng_seed,
        ranking_depth=args.ranking_depth,
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write_text(out, record.to_json())
    print(f"{record.status} after {len(record.cycles)} cycles; record at {out}")
    return 0


def cmd_run_batch(args) -> int:
    if args.rng_seed is None:
        raise CliError("batch mode requires --rng-seed (no silent nondeterminism)")
    criteria = tuple(part.strip() for part in args.criteria.split(",") if part.strip())
    try:
        config = BatchConfig(
            master_rng_seed=args.rng_seed,
            n_executions=args.executions,
            max_cycles=args.cycles,
            criteria=criteria,
            seed_set_type=args.seed_set,
            ranking_depth=args.ranking_depth,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from None
    corpus, labels, denylist = _load_inputs(args)
    result = run_batch(config, corpus, labels, denylist, parallel=args.parallel)
    write_batch_outputs(result, args.out_dir)
    print(
        f"{config.n_executions} executions x {len(criteria)} criteria "
        f"({args.seed_set}) written to {args.out_dir}"
    )
    return 0


def cmd_eval(args) -> int:
    target = recompute_metrics_csv(args.records_dir, args.out)
    print(f"metrics recomputed to {target}")
    return 0


def cmd_plot_data(args) -> int:
    manifest, records = load_records(args.records_dir)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    from .evaluation import series_from_records

    series = {
        criterion: series_from_records(records[criterion], manifest["max_cycles"])
        for criterion in manifest["criteria"]
    }
    figures = {
        "fig_incidence.csv": "cumulative_rank1_fake",
        "fig_density.csv": "per_cycle_density",
        "fig_recall.csv": "recall_vs_optimal",
    }
    for filename, metric in figures.items():
        lines = ["cycle,criterion,value"]
        for criterion in manifest["criteria"]:
            values = getattr(series[criterion], metric)
            lines.extend(
                f"{x + 1},{criterion},{values[x]!r}" for x in range(manifest["max_cycles"])
            )
        _atomic_write_text(out / filename, "\n".join(lines) + "\n")

    if args.ranks:
        if args.total_indexed is None:
            raise CliError("--ranks requires --total-indexed")
        if not args.labels:
            raise CliError("--ranks requires --labels")
        ranks = load_ranks(args.ranks, args.total_indexed)
        labels = load_labels(args.labels)
        discovered = [
            seed.website
            for criterion in manifest["criteria"]
            for record in records[criterion]
            for seed in record.discovered_websites
        ]
        write_cdf_csv(popularity_cdf(discovered, ranks, labels), out / "fig_popularity_cdf.csv")
    print(f"plot data written to {out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import CorpusBundle, create_app

    corpus, labels, denylist = _load_inputs(args)
    bundle = CorpusBundle(corpus=corpus, labels=labels, denylist=denylist)
    app = create_app({"default": bundle}, record_dir=args.record_dir, default_top_k=args.top_k)
    host, _, port = args.listen.rpartition(":")
    if not host or not port.isdigit():
        raise CliError(f"--listen expects HOST:PORT, got {args.listen!r}")
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="snowrank", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-synth", help="generate a synthetic sharing ecosystem")
    p.add_argument("--rng-seed", type=int, required=True)
    p.add_argument("--config", help="flat key=value config file; flags override")
    p.add_argument("--websites", dest="n_websites", type=int)
    p.add_argument("--fake-fraction", dest="fake_fraction", type=float)
    p.add_argument("--urls-per-website", dest="urls_per_website", type=int)
    p.add_argument("--zipf", dest="zipf_exponent_urls", type=float)
    p.add_argument("--users", dest="n_users", type=int)
    p.add_argument("--homophily", dest="homophily", type=float)
    p.add_argument("--fake-user-fraction", dest="fake_user_fraction", type=float)
    p.add_argument("--posts-per-user", dest="posts_per_user", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen_synth)

    p = sub.add_parser("run-auto", help="run one automated execution")
    _add_input_flags(p)
    p.add_argument("--initial-seed", required=True, help="seed article URL")
    p.add_argument("--criterion", choices=CRITERIA, default="hindex")
    p.add_argument("--cycles", type=int, default=30)
    p.add_argument("--rng-seed", type=int)
    p.add_argument("--ranking-depth", type=int, default=10)
    p.add_argument("--out", required=True, help="execution record path")
    p.set_defaults(func=cmd_run_auto)

    p = sub.add_parser("run-batch", help="run a batch of automated executions")
    _add_input_flags(p)
    p.add_argument("--seed-set", choices=SEED_SETS, required=True)
    p.add_argument("--criteria", default="hindex,mostpop,random", help="comma-separated")
    p.add_argument("--executions", type=int, default=40)
    p.add_argument("--cycles", type=int, default=30)
    p.add_argument("--rng-seed", type=int)
    p.add_argument("--ranking-depth", type=int, default=10)
    p.add_argument("--parallel", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_run_batch)

    p = sub.add_parser("eval", help="recompute metrics from stored records")
    p.add_argument("--records-dir", required=True)
    p.add_argument("--out", help="default: <records-dir>/metrics.csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("plot-data", help="emit per-figure CSVs from stored records")
    p.add_argument("--records-dir", required=True)
    p.add_argument("--ranks", help="domain,rank CSV for the popularity CDF")
    p.add_argument("--total-indexed", type=int)
    p.add_argument("--labels", help="labels CSV for the popularity CDF")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_plot_data)

    p = sub.add_parser("serve", help="serve interactive sessions over HTTP")
    _add_input_flags(p, labels_required=False)
    p.add_argument("--listen", default="127.0.0.1:8321")
    p.add_argument("--top-k", type=int, default=10, help="default candidate websites per cycle")
    p.add_argument("--record-dir", help="write-through execution records here")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, CorpusFormatError, SeedResolutionError, BatchExecutionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
