"""JSON-lines wire format for transaction streams.

One UTF-8 encoded JSON object per line, LF terminated:

    {"tx_id": "...", "timestamp": 1402099200, "inputs": ["a1"],
     "outputs": [{"addr": "a2", "value": 5000}], "input_values": [5100]}

input_values is optional.  Unknown keys are ignored.  Parsing is strict
about the known fields and fails fast with the source name, line number
and offending field in the message.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import IO, Iterable, Iterator

from .errors import DataError, UsageError
from .graph import TransactionRecord, ValidationError


class IngestError(DataError):
    """A stream line could not be parsed into a transaction record."""


def _parse_object(obj: object, where: str) -> TransactionRecord:
    if not isinstance(obj, dict):
        raise IngestError(f"{where}: expected a JSON object, got {type(obj).__name__}")
    for key in ("tx_id", "timestamp", "inputs", "outputs"):
        if key not in obj:
            raise IngestError(f"{where}: missing required field '{key}'")
    if not isinstance(obj["inputs"], list):
        raise IngestError(f"{where}: field 'inputs': expected a list")
    if not isinstance(obj["outputs"], list):
        raise IngestError(f"{where}: field 'outputs': expected a list")

    outputs: list[tuple[str, int]] = []
    for i, entry in enumerate(obj["outputs"]):
        if not isinstance(entry, dict) or "addr" not in entry or "value" not in entry:
            raise IngestError(f"{where}: field 'outputs[{i}]': expected an object with 'addr' and 'value'")
        outputs.append((entry["addr"], entry["value"]))

    input_values = obj.get("input_values")
    if input_values is not None and not isinstance(input_values, list):
        raise IngestError(f"{where}: field 'input_values': expected a list")

    try:
        return TransactionRecord.create(
            tx_id=obj["tx_id"],
            timestamp=obj["timestamp"],
            inputs=obj["inputs"],
            outputs=outputs,
            input_values=input_values,
        )
    except ValidationError as exc:
        raise IngestError(f"{where}: {exc}") from exc


def parse_lines(lines: Iterable[str], source: str = "<stream>") -> Iterator[TransactionRecord]:
    """Yield records from text lines; blank lines are skipped."""
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        where = f"{source}:{lineno}"
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{where}: invalid JSON: {exc.msg}") from exc
        yield _parse_object(obj, where)


def read_records(path: str | Path) -> list[TransactionRecord]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        return list(parse_lines(handle, source=path.name))


def filter_min_total(
    records: Iterable[TransactionRecord], min_total: int
) -> list[TransactionRecord]:
    """Drop transactions whose summed output value is below min_total.

    Dust filtering happens before windowing, so a dropped transaction
    contributes neither spends nor successor links.
    """
    if min_total < 0:
        raise UsageError("min_total cannot be negative")
    return [rec for rec in records if rec.output_total >= min_total]


def record_to_json(rec: TransactionRecord) -> str:
    obj: dict[str, object] = {
        "tx_id": rec.tx_id,
        "timestamp": rec.timestamp,
        "inputs": list(rec.inputs),
        "outputs": [{"addr": a, "value": v} for a, v in rec.outputs],
    }
    if rec.input_values is not None:
        obj["input_values"] = list(rec.input_values)
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def write_records(target: str | Path | IO[str], records: Iterable[TransactionRecord]) -> int:
    """Write records as JSON lines; returns the number written."""
    if isinstance(target, (str, Path)):
        with Path(target).open("w", encoding="utf-8", newline="\n") as handle:
            return write_records(handle, records)
    count = 0
    for rec in records:
        target.write(record_to_json(rec))
        target.write("\n")
        count += 1
    return count
