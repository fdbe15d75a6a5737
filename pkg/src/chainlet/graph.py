"""Daily transaction graph model.

The underlying graph is heterogeneous and bipartite: address nodes and
transaction nodes, with directed edges running address -> transaction
(the transaction spends coins held by the address) and transaction ->
address (the transaction pays the address).  Edges between two addresses
or two transactions cannot be expressed; the record type only names
addresses on the two sides of a transaction.

Analysis happens one 24-hour window at a time.  Window membership is
decided by shifting the epoch timestamp with a signed minute offset
before flooring to a calendar day, so windows can be aligned to a
timezone other than UTC.  The default offset of -360 minutes aligns
windows to UTC-6.

A DailySnapshot is immutable once built.  It keeps transactions sorted
by (timestamp, tx_id) and precomputes the indexes the enumeration code
needs: which transactions credit an address, which spend from it, and
for each transaction the later same-window transactions that spend one
of its output addresses.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, NamedTuple

from .errors import DataError

AddressId = str
TxId = str

DEFAULT_WINDOW_OFFSET_MIN = -360

_EPOCH = date(1970, 1, 1)
_SECONDS_PER_DAY = 86400


class ValidationError(DataError):
    """A transaction record failed structural validation."""


class SnapshotError(DataError):
    """Records cannot form a consistent daily snapshot."""


def _require(cond: bool, field: str, message: str) -> None:
    if not cond:
        raise ValidationError(f"field '{field}': {message}")


def _is_int(value: object) -> bool:
    # bool is an int subclass and must not pass for numeric fields
    return isinstance(value, int) and not isinstance(value, bool)


@dataclass(frozen=True, slots=True)
class TransactionRecord:
    """One transaction: spending addresses in, valued payments out.

    ``inputs`` preserves wire order and may repeat an address (distinct
    coins held by the same address).  Set-valued views are derived where
    needed.  ``input_values`` is optional; when present it pairs with
    ``inputs`` positionally and its sum must cover the outputs, the
    difference being the fee.
    """

    tx_id: TxId
    timestamp: int
    inputs: tuple[AddressId, ...]
    outputs: tuple[tuple[AddressId, int], ...]
    input_values: tuple[int, ...] | None = None

    @classmethod
    def create(
        cls,
        tx_id: str,
        timestamp: int,
        inputs: Iterable[str],
        outputs: Iterable[tuple[str, int]],
        input_values: Iterable[int] | None = None,
    ) -> "TransactionRecord":
        """Validate and build a record, raising ValidationError on bad fields."""
        _require(isinstance(tx_id, str) and tx_id != "", "tx_id", "expected a non-empty string")
        _require(_is_int(timestamp), "timestamp", "expected an integer epoch second")

        in_list = tuple(inputs)
        for i, addr in enumerate(in_list):
            _require(isinstance(addr, str) and addr != "", f"inputs[{i}]", "expected a non-empty address string")

        out_list = tuple((a, v) for a, v in outputs)
        _require(len(out_list) > 0, "outputs", "a transaction must pay at least one address")
        for i, (addr, value) in enumerate(out_list):
            _require(isinstance(addr, str) and addr != "", f"outputs[{i}].addr", "expected a non-empty address string")
            _require(_is_int(value) and value >= 0, f"outputs[{i}].value", "expected a non-negative integer amount")

        vals: tuple[int, ...] | None = None
        if input_values is not None:
            vals = tuple(input_values)
            _require(
                len(vals) == len(in_list),
                "input_values",
                f"expected one value per input ({len(in_list)}), got {len(vals)}",
            )
            for i, value in enumerate(vals):
                _require(_is_int(value) and value >= 0, f"input_values[{i}]", "expected a non-negative integer amount")
            if in_list:
                total_in = sum(vals)
                total_out = sum(v for _, v in out_list)
                _require(
                    total_in >= total_out,
                    "input_values",
                    f"input total {total_in} is below output total {total_out}; fees cannot be negative",
                )
        return cls(tx_id, timestamp, in_list, out_list, vals)

    @property
    def input_set(self) -> frozenset[AddressId]:
        return frozenset(self.inputs)

    @property
    def output_addresses(self) -> frozenset[AddressId]:
        return frozenset(a for a, _ in self.outputs)

    @property
    def output_total(self) -> int:
        return sum(v for _, v in self.outputs)

    @property
    def input_total(self) -> int | None:
        return None if self.input_values is None else sum(self.input_values)


def day_of_timestamp(timestamp: int, window_offset_minutes: int = DEFAULT_WINDOW_OFFSET_MIN) -> date:
    """Calendar day a timestamp falls in after applying the window offset."""
    shifted = timestamp + window_offset_minutes * 60
    return _EPOCH + timedelta(days=shifted // _SECONDS_PER_DAY)


def window_bounds(window_date: date, window_offset_minutes: int = DEFAULT_WINDOW_OFFSET_MIN) -> tuple[int, int]:
    """Half-open [start, end) epoch-second range of one window."""
    start = (window_date - _EPOCH).days * _SECONDS_PER_DAY - window_offset_minutes * 60
    return start, start + _SECONDS_PER_DAY


def partition_days(
    records: Iterable[TransactionRecord],
    window_offset_minutes: int = DEFAULT_WINDOW_OFFSET_MIN,
) -> dict[date, list[TransactionRecord]]:
    """Bucket records into calendar days, preserving input order per day."""
    buckets: dict[date, list[TransactionRecord]] = {}
    for rec in records:
        day = day_of_timestamp(rec.timestamp, window_offset_minutes)
        buckets.setdefault(day, []).append(rec)
    return buckets


class DegreeProfile(NamedTuple):
    in_tx_count: int
    out_tx_count: int


@dataclass(frozen=True, slots=True)
class DailySnapshot:
    """One day of transactions with the indexes enumeration relies on.

    ``transactions`` is sorted by (timestamp, tx_id); every index refers
    to positions in that order.  ``successors[i]`` lists the positions of
    strictly later transactions that spend one of transaction i's output
    addresses.  Instances are treated as immutable after build_snapshot
    returns them.
    """

    window_date: date
    window_offset_minutes: int
    transactions: tuple[TransactionRecord, ...]
    tx_position: dict[TxId, int]
    in_sets: tuple[frozenset[AddressId], ...]
    out_sets: tuple[frozenset[AddressId], ...]
    credited_by: dict[AddressId, tuple[int, ...]]
    spent_by: dict[AddressId, tuple[int, ...]]
    successors: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.transactions)

    def addresses(self) -> set[AddressId]:
        seen: set[AddressId] = set()
        seen.update(self.credited_by)
        seen.update(self.spent_by)
        return seen


def build_snapshot(
    records: Iterable[TransactionRecord],
    window_date: date,
    window_offset_minutes: int = DEFAULT_WINDOW_OFFSET_MIN,
) -> DailySnapshot:
    """Build the immutable snapshot for one window.

    Records outside the window are dropped.  An empty window is a valid
    snapshot.  Duplicate tx_ids inside the window are rejected.
    """
    kept = [r for r in records if day_of_timestamp(r.timestamp, window_offset_minutes) == window_date]
    kept.sort(key=lambda r: (r.timestamp, r.tx_id))

    tx_position: dict[TxId, int] = {}
    for pos, rec in enumerate(kept):
        if rec.tx_id in tx_position:
            raise SnapshotError(f"duplicate tx_id '{rec.tx_id}' in window {window_date.isoformat()}")
        tx_position[rec.tx_id] = pos

    in_sets = tuple(r.input_set for r in kept)
    out_sets = tuple(r.output_addresses for r in kept)

    credited_lists: dict[AddressId, list[int]] = {}
    spent_lists: dict[AddressId, list[int]] = {}
    for pos in range(len(kept)):
        for addr in out_sets[pos]:
            credited_lists.setdefault(addr, []).append(pos)
        for addr in in_sets[pos]:
            spent_lists.setdefault(addr, []).append(pos)

    # position lists are ascending because they were filled in position order
    succ_sets: dict[int, set[int]] = {}
    for addr, spenders in spent_lists.items():
        payers = credited_lists.get(addr)
        if not payers:
            continue
        for payer_pos in payers:
            cut = bisect_right(spenders, payer_pos)
            if cut < len(spenders):
                succ_sets.setdefault(payer_pos, set()).update(spenders[cut:])

    empty: tuple[int, ...] = ()
    successors = tuple(
        tuple(sorted(succ_sets[pos])) if pos in succ_sets else empty for pos in range(len(kept))
    )

    return DailySnapshot(
        window_date=window_date,
        window_offset_minutes=window_offset_minutes,
        transactions=tuple(kept),
        tx_position=tx_position,
        in_sets=in_sets,
        out_sets=out_sets,
        credited_by={a: tuple(v) for a, v in credited_lists.items()},
        spent_by={a: tuple(v) for a, v in spent_lists.items()},
        successors=successors,
    )


def address_degree_profile(snapshot: DailySnapshot, address: AddressId) -> DegreeProfile:
    """Distinct transactions crediting and spending from an address.

    Duplicate occurrences of an address inside one transaction count
    once.  Unknown addresses yield (0, 0).
    """
    return DegreeProfile(
        in_tx_count=len(snapshot.credited_by.get(address, ())),
        out_tx_count=len(snapshot.spent_by.get(address, ())),
    )
