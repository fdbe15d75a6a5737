"""Command line front end.

Subcommands cover the full pipeline: generate a synthetic stream,
inspect it, extract orbit count vectors, tabulate patterns, cluster
addresses, export an ML-ready dataset, and run the built-in
self-verification.  Exit codes are 0 for success, 1 for data problems
and 2 for usage problems.  Set CHAINLET_LOG=debug (or info, warning,
error) to adjust log verbosity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from datetime import date

from . import clustering, features, ingest, patterns, report, synth, verify
from .errors import DataError, UsageError
from .graph import DEFAULT_WINDOW_OFFSET_MIN, build_snapshot, partition_days
from .orbits import counts_to_vectors, extract_day, read_vectors_csv, write_vectors_csv

log = logging.getLogger("chainlet")


def _configure_logging() -> None:
    level_name = os.environ.get("CHAINLET_LOG", "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _add_input_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--input", required=True, help="transaction stream (JSON lines)")
    sub.add_argument(
        "--window-offset-min",
        type=int,
        default=DEFAULT_WINDOW_OFFSET_MIN,
        help="minutes added to timestamps before daily windowing (default %(default)s)",
    )
    sub.add_argument(
        "--min-amount",
        type=int,
        default=None,
        help="drop transactions whose summed output value is below this",
    )


def _load_records(args) -> list:
    records = ingest.read_records(args.input)
    if args.min_amount is not None:
        before = len(records)
        records = ingest.filter_min_total(records, args.min_amount)
        log.info("min-amount filter kept %d of %d transactions", len(records), before)
    return records


def _ensure_out(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _daily_snapshots(records, offset):
    for day, recs in partition_days(records, offset).items():
        yield day, build_snapshot(recs, day, offset)


def cmd_ingest(args) -> int:
    records = _load_records(args)
    print("day\ttransactions\taddresses\tsuccessor_pairs")
    total_tx = 0
    total_pairs = 0
    for day, snapshot in _daily_snapshots(records, args.window_offset_min):
        pairs = sum(len(v) for v in snapshot.successors)
        addresses = len(snapshot.addresses())
        total_tx += len(snapshot)
        total_pairs += pairs
        print(f"{day.isoformat()}\t{len(snapshot)}\t{addresses}\t{pairs}")
    print(f"total\t{total_tx}\t-\t{total_pairs}")
    return 0


def cmd_extract(args) -> int:
    records = _load_records(args)
    out_dir = _ensure_out(args.out)
    vectors = []
    timings = {}
    for day, snapshot in _daily_snapshots(records, args.window_offset_min):
        started = time.perf_counter()
        counts = extract_day(snapshot, workers=args.workers)
        elapsed = time.perf_counter() - started
        timings[day] = elapsed
        vectors.extend(counts_to_vectors(day, counts))
        print(
            f"day={day.isoformat()} transactions={len(snapshot)} "
            f"addresses={len(counts)} seconds={elapsed:.3f}"
        )
    out_path = os.path.join(out_dir, "orbits.csv")
    n = write_vectors_csv(out_path, vectors)
    print(f"wrote {n} vectors to {out_path}")
    if args.figures and timings:
        fig_path = report.timing_figure(timings, os.path.join(out_dir, "extract_timing.png"))
        print(f"wrote {fig_path}")
    return 0


def cmd_patterns(args) -> int:
    vectors = read_vectors_csv(args.orbits)
    labels = features.read_labels_csv(args.labels) if args.labels else {}

    if args.query:
        nz, z = patterns.parse_query(args.query)
        result = patterns.run_query(vectors, nz, z, labels, lifetime=args.lifetime)
        print(f"matched {len(result.matches)} of {result.checked} address-days")
        for cls in patterns.CLASSES:
            print(f"  {cls}: {result.class_counts[cls]}")
        if args.out:
            out_dir = _ensure_out(args.out)
            out_path = os.path.join(out_dir, "query_matches.csv")
            n = write_vectors_csv(out_path, result.matches)
            print(f"wrote {n} matches to {out_path}")
        return 0

    rows = patterns.pattern_table(
        vectors,
        labels,
        group_by=args.group_by,
        lifetime=args.lifetime,
        sort_by=args.sort_by,
    )
    stats = patterns.distinct_nonzero_stats(vectors, labels)
    print(patterns.format_table(rows, top=args.top), end="")
    for cls in patterns.CLASSES:
        if cls in stats:
            print(f"mean distinct orbits [{cls}]: {stats[cls]:.3f}")
    if args.out:
        out_dir = _ensure_out(args.out)
        table_path = os.path.join(out_dir, "patterns.tsv")
        with open(table_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(patterns.format_table(rows))
        print(f"wrote {len(rows)} patterns to {table_path}")
        if args.figures:
            freq = report.orbit_frequency_figure(
                vectors, labels, os.path.join(out_dir, "orbit_frequency.png")
            )
            grid = report.pattern_grid_figure(
                rows, os.path.join(out_dir, "pattern_grid.png"), top=args.top
            )
            print(f"wrote {freq}")
            print(f"wrote {grid}")
    elif args.figures:
        raise UsageError("--figures needs --out to know where to write")
    return 0


def cmd_cluster(args) -> int:
    records = _load_records(args)
    result = clustering.cluster(records)
    print(
        f"addresses={result.address_count} clusters={result.cluster_count} "
        f"merges={result.merge_count}"
    )
    out_dir = _ensure_out(args.out)
    out_path = os.path.join(out_dir, "clusters.csv")
    n = clustering.write_clusters_csv(out_path, result)
    print(f"wrote {n} assignments to {out_path}")
    if args.labels:
        labels = features.read_labels_csv(args.labels)
        expanded = clustering.expand_labels(result, labels)
        labels_path = os.path.join(out_dir, "expanded_labels.csv")
        features.write_labels_csv(labels_path, expanded.expanded)
        conflicts_path = os.path.join(out_dir, "conflicts.txt")
        with open(conflicts_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(clustering.format_conflicts(expanded.conflicts))
        print(
            f"expanded {len(labels)} labels to {len(expanded.expanded)} addresses, "
            f"{len(expanded.conflicts)} conflict(s)"
        )
    return 0


def cmd_gen(args) -> int:
    config = synth.GenConfig(
        seed=args.seed,
        days=args.days,
        background_per_day=args.background,
        rs_forwarders=args.rs,
        dm_holders=args.dm,
        start_day=args.start_day,
        window_offset_minutes=args.window_offset_min,
    )
    result = synth.generate(config)
    out_dir = _ensure_out(args.out)
    stream_path = os.path.join(out_dir, "stream.jsonl")
    n = ingest.write_records(stream_path, result.records)
    labels_path = os.path.join(out_dir, "labels.csv")
    features.write_labels_csv(labels_path, result.labels)
    manifest_path = os.path.join(out_dir, "gen_manifest.json")
    features.write_manifest(manifest_path, result.manifest())
    print(f"wrote {n} transactions to {stream_path}")
    print(f"wrote {len(result.labels)} labels to {labels_path}")
    print(f"wrote {manifest_path}")
    return 0


def cmd_verify(args) -> int:
    equiv = verify.run_oracle_equivalence(args.seeds)
    print(
        f"oracle equivalence: {equiv.checked} snapshots, "
        f"{len(equiv.failures)} failures, {equiv.elapsed:.2f}s"
    )
    theorem = verify.run_theorem_suite(args.theorem_seeds)
    lam = sorted(theorem.automorphism_sizes)
    print(
        f"counting identities: {theorem.checked} hosts, "
        f"{len(theorem.failures)} failures, automorphism sizes {lam}, "
        f"{theorem.elapsed:.2f}s"
    )
    if not (equiv.passed and theorem.passed):
        for failure in (equiv.failures + theorem.failures)[:10]:
            print(f"  failure: {failure}")
        return 1
    return 0


def cmd_export(args) -> int:
    records = _load_records(args)
    labels = features.read_labels_csv(args.labels) if args.labels else {}
    rates = features.parse_rate_spec(args.undersample or [])

    vectors = []
    incomes = {}
    for day, snapshot in _daily_snapshots(records, args.window_offset_min):
        counts = extract_day(snapshot, workers=args.workers)
        vectors.extend(counts_to_vectors(day, counts))
        for addr, value in features.compute_income(snapshot).items():
            incomes[(addr, day)] = value

    rows = features.make_feature_rows(vectors, incomes, labels)
    before = len(rows)
    if rates:
        rows = features.undersample(rows, rates, seed=args.seed)
    out_dir = _ensure_out(args.out)
    dataset_path = os.path.join(out_dir, "dataset.csv")
    n = features.write_dataset_csv(dataset_path, rows)
    manifest = features.dataset_manifest(
        rows, rates, args.seed, extra={"source": os.path.basename(args.input)}
    )
    manifest_path = os.path.join(out_dir, "manifest.json")
    features.write_manifest(manifest_path, manifest)
    print(f"wrote {n} of {before} rows to {dataset_path}")
    print(f"wrote {manifest_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainlet",
        description="daily orbit statistics for transaction streams",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a stream and print per-day statistics")
    _add_input_options(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("extract", help="extract per-day orbit count vectors")
    _add_input_options(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=1, help="parallel workers (default 1)")
    p.add_argument("--figures", action="store_true", help="also render timing figure")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("patterns", help="tabulate or query occupancy patterns")
    p.add_argument("--orbits", required=True, help="orbit vectors CSV from extract")
    p.add_argument("--labels", help="address,label CSV")
    p.add_argument("--group-by", choices=patterns.GROUP_MODES, default="mask")
    p.add_argument("--sort-by", choices=patterns.SORT_METRICS, default="total")
    p.add_argument("--top", type=int, default=30, help="rows to print (default 30)")
    p.add_argument("--lifetime", action="store_true", help="sum each address across days first")
    p.add_argument("--query", help='constraint query such as "+9 +12 -30"')
    p.add_argument("--out", help="output directory for table and matches")
    p.add_argument("--figures", action="store_true", help="also render pattern figures")
    p.set_defaults(func=cmd_patterns)

    p = sub.add_parser("cluster", help="cluster addresses by co-spending")
    _add_input_options(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--labels", help="address,label CSV to expand across clusters")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("gen", help="generate a synthetic labelled stream")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--days", type=int, default=3)
    p.add_argument("--background", type=int, default=500, help="background transactions per day")
    p.add_argument("--rs", type=int, default=0, help="forwarder cohort size")
    p.add_argument("--dm", type=int, default=0, help="holder cohort size")
    p.add_argument("--start-day", type=date.fromisoformat, default=date(2016, 6, 1))
    p.add_argument(
        "--window-offset-min", type=int, default=DEFAULT_WINDOW_OFFSET_MIN
    )
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run the built-in self-checks")
    p.add_argument("--seeds", type=int, default=100, help="random snapshots to check")
    p.add_argument("--theorem-seeds", type=int, default=100, help="counting hosts to check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="export an ML-ready address-day dataset")
    _add_input_options(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--labels", help="address,label CSV")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="undersampling seed")
    p.add_argument(
        "--undersample",
        action="append",
        metavar="CLASS=RATE",
        help="per-class keep rate, repeatable",
    )
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
