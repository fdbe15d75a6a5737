"""Command line runner for the evaluation harness."""

from __future__ import annotations

import argparse
import os
import sys

from chainlet import DataError

from .data import SUBSETS, HarnessError, load_dataset
from .model import evaluate
from .report import render_text, write_json


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlharness",
        description="random-forest evaluation over chainlet orbit datasets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="train and score on one dataset")
    p.add_argument("--dataset", required=True, help="exported address-day CSV")
    p.add_argument("--features", choices=SUBSETS, default="all")
    p.add_argument("--siblings-active", action="store_true",
                   help="count partial-spend sibling orbits as active")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--repeats", type=int, default=5)
    p.add_argument("--shuffle-control", action="store_true",
                   help="also run a shuffled-label control")
    p.add_argument("--out", help="directory for result JSON files")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("subsets", help="list the feature subsets")
    p.set_defaults(func=cmd_subsets)

    return parser


def cmd_run(args) -> int:
    dataset = load_dataset(
        args.dataset, subset=args.features, siblings_active=args.siblings_active
    )
    result = evaluate(dataset, seed=args.seed, repeats=args.repeats)
    print(f"dataset: {args.dataset}  subset: {args.features}  rows: {len(dataset)}")
    print(render_text(result), end="")
    control = None
    if args.shuffle_control:
        control = evaluate(
            dataset, seed=args.seed, repeats=args.repeats, shuffle_labels=True
        )
        print()
        print("shuffled-label control:")
        for cls, score in sorted(control.scores.items()):
            print(f"  {cls:<6} {score.auc_mean:.4f} +/- {score.auc_std:.4f}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        out_path = os.path.join(args.out, f"result_{args.features}.json")
        write_json(out_path, result)
        print(f"wrote {out_path}")
        if control is not None:
            control_path = os.path.join(args.out, f"control_{args.features}.json")
            write_json(control_path, control)
            print(f"wrote {control_path}")
    return 0


def cmd_subsets(args) -> int:
    for name in SUBSETS:
        print(name)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (HarnessError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
