"""Occupancy-pattern statistics over orbit count vectors.

The unit of analysis is the address-day vector of 48 orbit counts.
Its pattern is, at the coarse level, the set of orbits with a nonzero
count (a 48-bit mask), and at the fine level the exact count tuple.
Grouping address-days by pattern and splitting each group by class
label shows which behaviours are shared with ordinary traffic and
which concentrate in the labelled cohorts.

Percentages come in two denominators and both are reported: the share
of a class's address-days that land in the pattern (within-class), and
the class mix inside the pattern's row (row share).  Sorting is by a
chosen metric with the bit mask as final tie-break, so tables are
reproducible byte for byte.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DataError, UsageError
from .orbits import ORBIT_COUNT, OrbitVector

CLASSES = ("White", "DM", "RS")

WHITE = "White"

GROUP_MODES = ("mask", "exact")

SORT_METRICS = (
    "total",
    "white",
    "dm",
    "rs",
    "white_pct",
    "dm_pct",
    "rs_pct",
    "non_white_pct",
)


def mask_of(counts: Sequence[int]) -> int:
    """Pack nonzero positions of a 48-long count tuple into a bit mask."""
    mask = 0
    for i, c in enumerate(counts):
        if c:
            mask |= 1 << i
    return mask


def orbits_of_mask(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(ORBIT_COUNT) if mask >> i & 1)


def resolve_label(labels: dict[str, str], address: str) -> str:
    label = labels.get(address, WHITE)
    if label not in CLASSES:
        raise DataError(f"unknown class label {label!r} for address {address!r}")
    return label


def aggregate_lifetime(vectors: Iterable[OrbitVector]) -> list[OrbitVector]:
    """Collapse per-day vectors to one per address.

    Counts add across days; the day field keeps the earliest day the
    address was seen, standing in for its first appearance.
    """
    summed: dict[str, list[int]] = {}
    first_day: dict[str, object] = {}
    for vec in vectors:
        acc = summed.get(vec.address)
        if acc is None:
            summed[vec.address] = list(vec.counts)
            first_day[vec.address] = vec.day
        else:
            for i, c in enumerate(vec.counts):
                acc[i] += c
            if vec.day < first_day[vec.address]:
                first_day[vec.address] = vec.day
    return [
        OrbitVector(address=a, day=first_day[a], counts=tuple(summed[a]))
        for a in sorted(summed)
    ]


@dataclass(frozen=True)
class PatternStats:
    """One row of the pattern table."""

    mask: int
    exact_counts: tuple[int, ...] | None
    orbits: tuple[int, ...]
    total: int
    class_counts: dict[str, int]
    within_class_pct: dict[str, float]
    row_pct: dict[str, float]
    non_white_pct: float


def pattern_table(
    vectors: Iterable[OrbitVector],
    labels: dict[str, str],
    group_by: str = "mask",
    lifetime: bool = False,
    sort_by: str = "total",
) -> list[PatternStats]:
    """Group address-days by occupancy pattern and tabulate class mix.

    group_by picks the pattern granularity ("mask" or "exact");
    lifetime=True first sums each address across days.  Rows sort by
    sort_by descending, then ascending mask (and count tuple) so equal
    metrics still order deterministically.
    """
    if group_by not in GROUP_MODES:
        raise UsageError(f"group_by must be one of {GROUP_MODES}, got {group_by!r}")
    if sort_by not in SORT_METRICS:
        raise UsageError(f"sort_by must be one of {SORT_METRICS}, got {sort_by!r}")

    vecs = list(vectors)
    if lifetime:
        vecs = aggregate_lifetime(vecs)

    class_totals = {c: 0 for c in CLASSES}
    grouped: dict[tuple, dict[str, int]] = {}
    for vec in vecs:
        label = resolve_label(labels, vec.address)
        class_totals[label] += 1
        if group_by == "mask":
            key = (mask_of(vec.counts),)
        else:
            key = (mask_of(vec.counts), vec.counts)
        bucket = grouped.setdefault(key, {c: 0 for c in CLASSES})
        bucket[label] += 1

    rows: list[PatternStats] = []
    for key, bucket in grouped.items():
        mask = key[0]
        total = sum(bucket.values())
        within = {
            c: (100.0 * bucket[c] / class_totals[c]) if class_totals[c] else 0.0
            for c in CLASSES
        }
        row = {c: 100.0 * bucket[c] / total for c in CLASSES}
        rows.append(
            PatternStats(
                mask=mask,
                exact_counts=key[1] if group_by == "exact" else None,
                orbits=orbits_of_mask(mask),
                total=total,
                class_counts=dict(bucket),
                within_class_pct=within,
                row_pct=row,
                non_white_pct=100.0 * (bucket["DM"] + bucket["RS"]) / total,
            )
        )

    metric = {
        "total": lambda r: r.total,
        "white": lambda r: r.class_counts["White"],
        "dm": lambda r: r.class_counts["DM"],
        "rs": lambda r: r.class_counts["RS"],
        "white_pct": lambda r: r.within_class_pct["White"],
        "dm_pct": lambda r: r.within_class_pct["DM"],
        "rs_pct": lambda r: r.within_class_pct["RS"],
        "non_white_pct": lambda r: r.non_white_pct,
    }[sort_by]
    rows.sort(key=lambda r: (-metric(r), r.mask, r.exact_counts or ()))
    return rows


_QUERY_TOKEN = re.compile(r"([+-])(\d+)$")


def parse_query(text: str) -> tuple[frozenset[int], frozenset[int]]:
    """Parse a pattern query like "+9 +12 -30".

    +N requires orbit N nonzero, -N requires it zero.  Tokens are
    whitespace separated.  Overlapping or malformed constraints are
    usage errors, as is an empty query.
    """
    must_nonzero: set[int] = set()
    must_zero: set[int] = set()
    tokens = text.split()
    if not tokens:
        raise UsageError("empty pattern query")
    for token in tokens:
        m = _QUERY_TOKEN.match(token)
        if not m:
            raise UsageError(f"bad query token {token!r}; expected +N or -N")
        orbit = int(m.group(2))
        if orbit >= ORBIT_COUNT:
            raise UsageError(f"orbit {orbit} out of range 0..{ORBIT_COUNT - 1}")
        (must_nonzero if m.group(1) == "+" else must_zero).add(orbit)
    overlap = must_nonzero & must_zero
    if overlap:
        joined = ", ".join(str(o) for o in sorted(overlap))
        raise UsageError(f"orbits required both zero and nonzero: {joined}")
    return frozenset(must_nonzero), frozenset(must_zero)


@dataclass(frozen=True)
class QueryResult:
    matches: list[OrbitVector]
    class_counts: dict[str, int]
    checked: int


def run_query(
    vectors: Iterable[OrbitVector],
    must_nonzero: frozenset[int],
    must_zero: frozenset[int],
    labels: dict[str, str],
    lifetime: bool = False,
) -> QueryResult:
    """Select address-days satisfying the zero/nonzero constraints."""
    overlap = must_nonzero & must_zero
    if overlap:
        joined = ", ".join(str(o) for o in sorted(overlap))
        raise UsageError(f"orbits required both zero and nonzero: {joined}")
    vecs = list(vectors)
    if lifetime:
        vecs = aggregate_lifetime(vecs)
    matches = []
    counts = {c: 0 for c in CLASSES}
    for vec in vecs:
        if any(vec.counts[o] == 0 for o in must_nonzero):
            continue
        if any(vec.counts[o] != 0 for o in must_zero):
            continue
        matches.append(vec)
        counts[resolve_label(labels, vec.address)] += 1
    matches.sort(key=lambda v: (v.day, v.address))
    return QueryResult(matches=matches, class_counts=counts, checked=len(vecs))


def distinct_nonzero_stats(
    vectors: Iterable[OrbitVector], labels: dict[str, str]
) -> dict[str, float]:
    """Mean number of distinct occupied orbits per address-day, by class."""
    sums = {c: 0 for c in CLASSES}
    counts = {c: 0 for c in CLASSES}
    for vec in vectors:
        label = resolve_label(labels, vec.address)
        sums[label] += sum(1 for c in vec.counts if c)
        counts[label] += 1
    return {c: sums[c] / counts[c] for c in CLASSES if counts[c]}


def format_table(rows: list[PatternStats], top: int | None = None) -> str:
    """Render pattern rows as a tab separated table, header first."""
    shown = rows if top is None else rows[:top]
    lines = [
        "\t".join(
            [
                "orbits",
                "total",
                "white",
                "dm",
                "rs",
                "white_pct",
                "dm_pct",
                "rs_pct",
                "non_white_pct",
                "exact_counts",
            ]
        )
    ]
    for r in shown:
        orbit_list = ",".join(str(o) for o in r.orbits) or "-"
        exact = (
            ",".join(str(c) for c in r.exact_counts) if r.exact_counts is not None else "-"
        )
        lines.append(
            "\t".join(
                [
                    orbit_list,
                    str(r.total),
                    str(r.class_counts["White"]),
                    str(r.class_counts["DM"]),
                    str(r.class_counts["RS"]),
                    f"{r.within_class_pct['White']:.4f}",
                    f"{r.within_class_pct['DM']:.4f}",
                    f"{r.within_class_pct['RS']:.4f}",
                    f"{r.non_white_pct:.4f}",
                    exact,
                ]
            )
        )
    return "\n".join(lines) + "\n"
