"""Dataset assembly: orbit vectors joined with income and labels.

A dataset row is one address-day: the 48 orbit counts, the total value
credited to the address inside that window, and a class label.
Addresses missing from the label map are White.

Class imbalance is handled by per-day undersampling.  The kept count
for a class is fixed from its global rate first, then spread over days
by largest remainder so every day keeps its proportional share, and
the rows within a day are drawn with a seeded generator.  The same
inputs therefore always produce the same dataset, byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import os
from datetime import date
from random import Random
from typing import Iterable, NamedTuple

from .errors import DataError, UsageError
from .graph import AddressId, DailySnapshot
from .orbits import ORBIT_COUNT, OrbitVector
from .patterns import CLASSES, resolve_label

DATASET_HEADER = (
    ["address", "day"] + [f"o{i}" for i in range(ORBIT_COUNT)] + ["income", "label"]
)

LABELS_HEADER = ["address", "label"]


def compute_income(snapshot: DailySnapshot) -> dict[AddressId, int]:
    """Total value credited per address across the window's outputs."""
    income: dict[AddressId, int] = {}
    for rec in snapshot.transactions:
        for addr, value in rec.outputs:
            income[addr] = income.get(addr, 0) + value
    return income


class FeatureRow(NamedTuple):
    address: AddressId
    day: date
    counts: tuple[int, ...]
    income: int
    label: str


def make_feature_rows(
    vectors: Iterable[OrbitVector],
    incomes: dict[tuple[AddressId, date], int],
    labels: dict[AddressId, str],
) -> list[FeatureRow]:
    """Join vectors with per-day income and labels, sorted by (day, address)."""
    rows = []
    for vec in vectors:
        rows.append(
            FeatureRow(
                address=vec.address,
                day=vec.day,
                counts=vec.counts,
                income=incomes.get((vec.address, vec.day), 0),
                label=resolve_label(labels, vec.address),
            )
        )
    rows.sort(key=lambda r: (r.day, r.address))
    return rows


def parse_rate_spec(specs: Iterable[str]) -> dict[str, float]:
    """Parse CLASS=RATE strings, e.g. "White=0.1"."""
    rates: dict[str, float] = {}
    for spec in specs:
        name, sep, raw = spec.partition("=")
        if not sep:
            raise UsageError(f"bad undersample spec {spec!r}; expected CLASS=RATE")
        if name not in CLASSES:
            raise UsageError(f"unknown class {name!r} in undersample spec")
        try:
            rate = float(raw)
        except ValueError:
            raise UsageError(f"bad rate {raw!r} in undersample spec") from None
        if not 0.0 < rate <= 1.0:
            raise UsageError(f"rate for {name} must lie in (0, 1], got {rate}")
        if name in rates:
            raise UsageError(f"class {name} given twice in undersample spec")
        rates[name] = rate
    return rates


def _apportion(day_sizes: list[tuple[date, int]], rate: float, target: int) -> dict[date, int]:
    # Largest remainder keeps the day mix of the class intact while the
    # per-day integers still sum to the global target.
    caps = dict(day_sizes)
    quotas = [(day, rate * n) for day, n in day_sizes]
    base = {day: int(q) for day, q in quotas}
    leftover = target - sum(base.values())
    order = sorted(quotas, key=lambda dq: (-(dq[1] - int(dq[1])), dq[0]))
    for day, _ in order:
        if leftover <= 0:
            break
        if base[day] < caps[day]:
            base[day] += 1
            leftover -= 1
    return base


def undersample(
    rows: list[FeatureRow], rates: dict[str, float], seed: int
) -> list[FeatureRow]:
    """Keep a seeded per-day sample of each rated class.

    The global kept count per class is round(rate * class size), spread
    over days by largest remainder.  Classes without a rate keep all

    their rows.  Output order is (day, address) like the input.
    """
    for name, rate in rates.items():
        if name not in CLASSES:
            raise UsageError(f"unknown class {name!r} in undersample rates")
        if not 0.0 < rate <= 1.0:
            raise UsageError(f"rate for {name} must lie in (0, 1], got {rate}")

    by_class_day: dict[str, dict[date, list[FeatureRow]]] = {}
    for row in rows:
        by_class_day.setdefault(row.label, {}).setdefault(row.day, []).append(row)

    rng = Random(seed)
    kept: list[FeatureRow] = []
    for label in sorted(by_class_day):
        days = by_class_day[label]
        rate = rates.get(label)
        if rate is None:
            for day_rows in days.values():
                kept.extend(day_rows)
            continue
        day_sizes = sorted((day, len(day_rows)) for day, day_rows in days.items())
        n_class = sum(n for _, n in day_sizes)
        target = int(rate * n_class + 0.5)
        quota = _apportion(day_sizes, rate, target)
        for day, _ in day_sizes:
            day_rows = sorted(days[day], key=lambda r: r.address)
            k = quota[day]
            if k >= len(day_rows):
                kept.extend(day_rows)
            else:
                kept.extend(rng.sample(day_rows, k))
    kept.sort(key=lambda r: (r.day, r.address))
    return kept


def write_dataset_csv(
    target: str | os.PathLike[str] | io.TextIOBase, rows: list[FeatureRow]
) -> int:
    def emit(handle) -> int:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(DATASET_HEADER)
        for row in rows:
            writer.writerow(
                [row.address, row.day.isoformat(), *row.counts, row.income, row.label]
            )
        return len(rows)

    if isinstance(target, io.TextIOBase):
        return emit(target)
    with open(target, "w", encoding="utf-8", newline="") as handle:
        return emit(handle)


def read_dataset_csv(path: str | os.PathLike[str]) -> list[FeatureRow]:
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != DATASET_HEADER:
            raise DataError(f"{path}: unexpected dataset header")
        for lineno, cells in enumerate(reader, start=2):
            if len(cells) != len(DATASET_HEADER):
                raise DataError(f"{path}:{lineno}: expected {len(DATASET_HEADER)} columns")
            try:
                counts = tuple(int(c) for c in cells[2 : 2 + ORBIT_COUNT])
                income = int(cells[2 + ORBIT_COUNT])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-integer feature value") from None
            label = cells[-1]
            if label not in CLASSES:
                raise DataError(f"{path}:{lineno}: unknown label {label!r}")
            rows.append(
                FeatureRow(
                    address=cells[0],
                    day=date.fromisoformat(cells[1]),
                    counts=counts,
                    income=income,
                    label=label,
                )
            )
    return rows


def dataset_manifest(
    rows: list[FeatureRow], rates: dict[str, float], seed: int, extra: dict | None = None
) -> dict:
    by_class = {c: 0 for c in CLASSES}
    for row in rows:
        by_class[row.label] += 1
    manifest = {
        "rows": {"total": len(rows), **by_class},
        "undersample": {"seed": seed, "rates": dict(sorted(rates.items()))},
        "columns": list(DATASET_HEADER),
    }
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(path: str | os.PathLike[str], manifest: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        json.dump(manifest, handle, sort_keys=True, indent=2)
        handle.write("\n")


def write_labels_csv(
    target: str | os.PathLike[str] | io.TextIOBase, labels: dict[AddressId, str]
) -> int:
    def emit(handle) -> int:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(LABELS_HEADER)
        for addr in sorted(labels):
            writer.writerow([addr, labels[addr]])
        return len(labels)

    if isinstance(target, io.TextIOBase):
        return emit(target)
    with open(target, "w", encoding="utf-8", newline="") as handle:
        return emit(handle)


def read_labels_csv(path: str | os.PathLike[str]) -> dict[AddressId, str]:
    labels: dict[AddressId, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != LABELS_HEADER:
            raise DataError(f"{path}: expected header address,label")
        for lineno, cells in enumerate(reader, start=2):
            if len(cells) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 columns")
            addr, label = cells
            if label not in CLASSES:
                raise DataError(f"{path}:{lineno}: unknown label {label!r}")
            if addr in labels and labels[addr] != label:
                raise DataError(f"{path}:{lineno}: conflicting labels for {addr!r}")
            labels[addr] = label
    return labels
