"""The 48-role taxonomy of addresses in daily transaction windows.

Every address touched by a chainlet occurrence gets one or more of 48
numbered roles, called orbits.  Which orbit depends only on the shape of
the occurrence and the position the address holds in it:

* Dormant occurrences (no output spent in-window) put every output
  address of t1 into orbit M-1, where M is the clamped output count:
  orbit 0, 1 or 2 for one, two, or three-plus outputs.

* A 2-chainlet occurrence is shaped by three clamped cardinalities:
  M outputs of t1, S of them spent by t2, N outputs of t2.  Each shape
  owns up to three orbits: one for the spender addresses (outputs of t1
  consumed by t2), one for the sibling addresses (outputs of t1 left
  unspent by t2), and one for the output addresses of t2.  Shapes where
  t2 consumes every output of t1 have no sibling orbit.

Spender orbits mark addresses that initiate the second transaction;
they form the active half of the taxonomy.  Sibling, output and dormant
orbits are passive.  Orbits of shapes that fan out of a three-plus
split are additionally flagged as mixing-like.

Counts are raw occurrence tallies per address and day.  No
normalization is applied at any point.
"""

from __future__ import annotations

import csv
import multiprocessing
from datetime import date
from pathlib import Path
from typing import IO, Iterable, Iterator, NamedTuple

from .chainlets import (
    ChainletOccurrence,
    clamp3,
    enumerate_2chainlets,
    enumerate_dormant,
)
from .errors import DataError
from .graph import AddressId, DailySnapshot

ORBIT_COUNT = 48

#: (M, S, N) -> (spender orbit, sibling orbit or None, output orbit)
FAMILY_ORBITS: dict[tuple[int, int, int], tuple[int, int | None, int]] = {
    (1, 1, 1): (3, None, 4),
    (1, 1, 2): (5, None, 6),
    (1, 1, 3): (7, None, 8),
    (2, 1, 1): (9, 10, 11),
    (2, 1, 2): (12, 13, 14),
    (2, 1, 3): (15, 16, 17),
    (2, 2, 1): (18, None, 19),
    (2, 2, 2): (20, None, 21),
    (2, 2, 3): (22, None, 23),
    (3, 1, 1): (24, 25, 26),
    (3, 1, 2): (27, 28, 29),
    (3, 1, 3): (30, 31, 32),
    (3, 2, 1): (33, 34, 35),
    (3, 2, 2): (36, 37, 38),
    (3, 2, 3): (39, 40, 41),
    (3, 3, 1): (42, None, 43),
    (3, 3, 2): (44, None, 45),
    (3, 3, 3): (46, None, 47),
}

#: clamped t1 output count -> dormant orbit
DORMANT_ORBIT: dict[int, int] = {1: 0, 2: 1, 3: 2}

SPENDER_ORBITS = frozenset(spender for spender, _, _ in FAMILY_ORBITS.values())
SIBLING_ORBITS = frozenset(
    sibling for _, sibling, _ in FAMILY_ORBITS.values() if sibling is not None
)
OUTPUT_ORBITS = frozenset(output for _, _, output in FAMILY_ORBITS.values())
DORMANT_ORBITS = frozenset(DORMANT_ORBIT.values())

#: orbits of the (3, S, 3) and (3, 3, N) shapes typical of coin mixing
MIXING_ORBITS = frozenset({30, 31, 32, 39, 40, 41, 46, 47})


class RolePartition(NamedTuple):
    active: frozenset[int]
    passive: frozenset[int]


def role_partition(siblings_active: bool = False) -> RolePartition:
    """Split the 48 orbits into an active and a passive half.

    Active means the address initiated the second transaction of the
    occurrence, so by default only spender orbits qualify.  Flip
    ``siblings_active`` to also treat sibling orbits as active.
    """
    active = SPENDER_ORBITS | SIBLING_ORBITS if siblings_active else SPENDER_ORBITS
    passive = frozenset(range(ORBIT_COUNT)) - active
    return RolePartition(active=frozenset(active), passive=passive)


def occurrence_family(occ: ChainletOccurrence) -> tuple[int, int | None, int]:
    """Resolve the orbit triple governing a 2-chainlet occurrence.

    S is the clamped count of shared addresses.  A partial spend whose
    shared count clamps up to M (possible only past the clamp limit)
    is graded down to the largest shape that still owns a sibling
    orbit, so every participating address keeps a defined role.
    """
    siblings = occ.out1 - occ.shared
    if not siblings:
        s_eff = occ.m
    else:
        s_eff = min(clamp3(len(occ.shared)), occ.m - 1)
    return FAMILY_ORBITS[(occ.m, s_eff, occ.n)]


def assign_orbits(occ: ChainletOccurrence) -> list[tuple[AddressId, int]]:
    """All (address, orbit) assignments one occurrence emits.

    Every output address of t1 and of t2 receives exactly one
    assignment per side; an address appearing on both sides receives
    both.  Pair order within the list is unspecified.
    """
    if occ.dormant:
        orbit = DORMANT_ORBIT[occ.m]
        return [(addr, orbit) for addr in occ.out1]

    spender, sibling, output = occurrence_family(occ)
    pairs = [(addr, spender) for addr in occ.shared]
    siblings = occ.out1 - occ.shared
    if siblings:
        if sibling is None:
            raise RuntimeError(
                f"occurrence {occ.t1_pos}->{occ.t2_pos} has siblings but its "
                f"shape owns no sibling orbit; the family table is broken"
            )
        pairs.extend((addr, sibling) for addr in siblings)
    pairs.extend((addr, output) for addr in occ.out2)
    return pairs


OrbitCounts = dict[AddressId, dict[int, int]]


def accumulate(occurrences: Iterable[ChainletOccurrence]) -> OrbitCounts:
    """Sum orbit assignments over occurrences, per address."""
    acc: OrbitCounts = {}
    for occ in occurrences:
        for addr, orbit in assign_orbits(occ):
            inner = acc.get(addr)
            if inner is None:
                acc[addr] = {orbit: 1}
            else:
                inner[orbit] = inner.get(orbit, 0) + 1
    return acc


def _merge_counts(into: OrbitCounts, part: OrbitCounts) -> None:
    for addr, inner in part.items():
        target = into.get(addr)
        if target is None:
            into[addr] = inner
        else:
            for orbit, count in inner.items():
                target[orbit] = target.get(orbit, 0) + count


def _extract_span(snapshot: DailySnapshot, lo: int, hi: int) -> OrbitCounts:
    span = (lo, hi)
    acc = accumulate(enumerate_2chainlets(snapshot, span=span))
    _merge_counts(acc, accumulate(enumerate_dormant(snapshot, span=span)))
    return acc


# fork-inherited state for worker processes; None outside extract_day
_PARALLEL_SNAPSHOT: DailySnapshot | None = None


def _worker_init(snapshot: DailySnapshot) -> None:
    global _PARALLEL_SNAPSHOT
    _PARALLEL_SNAPSHOT = snapshot


def _worker_extract(span: tuple[int, int]) -> OrbitCounts:
    assert _PARALLEL_SNAPSHOT is not None
    return _extract_span(_PARALLEL_SNAPSHOT, span[0], span[1])


def _spans(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, n))
    step, extra = divmod(n, parts)
    spans = []
    lo = 0
    for i in range(parts):
        hi = lo + step + (1 if i < extra else 0)
        spans.append((lo, hi))
        lo = hi
    return spans


def extract_day(snapshot: DailySnapshot, workers: int = 1) -> OrbitCounts:
    """Orbit counts for every address of one window.

    The day is partitioned by t1 position across worker processes and
    the partial counts are merged by addition, so the result does not
    depend on the worker count.
    """
    n = len(snapshot)
    if workers <= 1 or n < 2:
        return _extract_span(snapshot, 0, n)

    global _PARALLEL_SNAPSHOT
    spans = _spans(n, workers * 4)
    methods = multiprocessing.get_all_start_methods()
    acc: OrbitCounts = {}
    if "fork" in methods:
        # children inherit the snapshot through fork instead of pickling
        ctx = multiprocessing.get_context("fork")
        _PARALLEL_SNAPSHOT = snapshot
        try:
            with ctx.Pool(processes=workers) as pool:
                for part in pool.imap(_worker_extract, spans):
                    _merge_counts(acc, part)
        finally:
            _PARALLEL_SNAPSHOT = None
    else:
        ctx = multiprocessing.get_context()
        with ctx.Pool(processes=workers, initializer=_worker_init, initargs=(snapshot,)) as pool:
            for part in pool.imap(_worker_extract, spans):
                _merge_counts(acc, part)
    return acc


class OrbitVector(NamedTuple):
    """Per-address, per-day row of 48 orbit counts."""

    address: AddressId
    day: date
    counts: tuple[int, ...]

    def nonzero_orbits(self) -> frozenset[int]:
        return frozenset(i for i, c in enumerate(self.counts) if c)


def counts_to_vectors(day: date, counts: OrbitCounts) -> list[OrbitVector]:
    """Expand sparse per-address counts into sorted dense vectors."""
    vectors = []
    for addr in sorted(counts):
        inner = counts[addr]
        dense = [0] * ORBIT_COUNT
        for orbit, count in inner.items():
            dense[orbit] = count
        vectors.append(OrbitVector(address=addr, day=day, counts=tuple(dense)))
    return vectors


VECTOR_HEADER = ["address", "day"] + [f"o{i}" for i in range(ORBIT_COUNT)]


def write_vectors_csv(target: str | Path | IO[str], vectors: Iterable[OrbitVector]) -> int:
    """Write vectors sorted by (day, address); returns the row count."""
    if isinstance(target, (str, Path)):
        with Path(target).open("w", encoding="utf-8", newline="") as handle:
            return write_vectors_csv(handle, vectors)
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(VECTOR_HEADER)
    count = 0
    for vec in sorted(vectors, key=lambda v: (v.day.isoformat(), v.address)):
        writer.writerow([vec.address, vec.day.isoformat(), *vec.counts])
        count += 1
    return count


def read_vectors_csv(source: str | Path | IO[str]) -> list[OrbitVector]:
    if isinstance(source, (str, Path)):
        with Path(source).open("r", encoding="utf-8", newline="") as handle:
            return read_vectors_csv(handle)
    reader = csv.reader(source)
    header = next(reader, None)
    if header != VECTOR_HEADER:
        raise DataError(f"unexpected orbit CSV header: {header!r}")
    vectors = []
    for row in reader:
        if len(row) != len(VECTOR_HEADER):
            raise DataError(f"orbit CSV row has {len(row)} columns, expected {len(VECTOR_HEADER)}")
        try:
            day = date.fromisoformat(row[1])
            counts = tuple(int(c) for c in row[2:])
        except ValueError as exc:
            raise DataError(f"orbit CSV row for address '{row[0]}' is malformed: {exc}") from exc
        if any(c < 0 for c in counts):
            raise DataError(f"orbit CSV row for address '{row[0]}' has a negative count")
        vectors.append(OrbitVector(address=row[0], day=day, counts=counts))
    return vectors
