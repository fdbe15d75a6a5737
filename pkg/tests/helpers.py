"""Small builders shared by the test modules."""

from __future__ import annotations

from datetime import date

from chainlet.graph import DailySnapshot, TransactionRecord, build_snapshot, window_bounds

DAY = date(2015, 7, 14)
DAY_START, DAY_END = window_bounds(DAY)


def tx(
    tx_id: str,
    offset_sec: int,
    inputs: list[str],
    outputs: list,
    input_values: list[int] | None = None,
) -> TransactionRecord:
    """Record inside the test window; outputs may be bare address names."""
    outs = [(o, 100) if isinstance(o, str) else o for o in outputs]
    return TransactionRecord.create(tx_id, DAY_START + offset_sec, inputs, outs, input_values)


def snap(*records: TransactionRecord) -> DailySnapshot:
    return build_snapshot(list(records), DAY)
