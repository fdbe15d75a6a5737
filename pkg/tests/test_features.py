import io
import json
import random
from datetime import date

import pytest

from chainlet.errors import DataError, UsageError
from chainlet.features import (
    DATASET_HEADER,
    FeatureRow,
    compute_income,
    dataset_manifest,
    make_feature_rows,
    parse_rate_spec,
    read_dataset_csv,
    read_labels_csv,
    undersample,
    write_dataset_csv,
    write_labels_csv,
    write_manifest,
)
from chainlet.orbits import ORBIT_COUNT, OrbitVector

from helpers import DAY, snap, tx

DAY1 = date(2015, 7, 15)


def row(addr, day, label="White", income=0, **orbit_counts):
    counts = [0] * ORBIT_COUNT
    for key, value in orbit_counts.items():
        counts[int(key[1:])] = value
    return FeatureRow(addr, day, tuple(counts), income, label)


class TestIncome:
    def test_sums_credits_per_address(self):
        s = snap(
            tx("t1", 0, [], [("a", 100), ("b", 50)]),
            tx("t2", 60, [], [("a", 25)]),
        )
        assert compute_income(s) == {"a": 125, "b": 50}

    def test_duplicate_outputs_both_count(self):
        s = snap(tx("t1", 0, [], [("a", 10), ("a", 15)]))
        assert compute_income(s) == {"a": 25}

    def test_spending_does_not_reduce_income(self):
        s = snap(
            tx("t1", 0, [], [("a", 100)]),
            tx("t2", 60, ["a"], [("b", 90)], input_values=[100]),
        )
        assert compute_income(s)["a"] == 100


class TestJoin:
    def test_rows_joined_and_sorted(self):
        vecs = [
            OrbitVector("b", DAY, tuple([0] * ORBIT_COUNT)),
            OrbitVector("a", DAY1, tuple([0] * ORBIT_COUNT)),
            OrbitVector("a", DAY, tuple([1] + [0] * 47)),
        ]
        rows = make_feature_rows(
            vecs, {("a", DAY): 500, ("a", DAY1): 7}, {"a": "RS"}
        )
        assert [(r.address, r.day) for r in rows] == [
            ("a", DAY),
            ("b", DAY),
            ("a", DAY1),
        ]
        assert rows[0].income == 500
        assert rows[0].label == "RS"
        assert rows[1].income == 0
        assert rows[1].label == "White"

    def test_bad_label_value_rejected(self):
        vecs = [OrbitVector("a", DAY, tuple([0] * ORBIT_COUNT))]
        with pytest.raises(DataError):
            make_feature_rows(vecs, {}, {"a": "Blue"})


class TestRateSpec:
    def test_parse(self):
        assert parse_rate_spec(["White=0.1", "DM=1.0"]) == {"White": 0.1, "DM": 1.0}

    @pytest.mark.parametrize(
        "spec",
        ["White", "Blue=0.5", "White=x", "White=0", "White=1.5", "RS=-0.2"],
    )
    def test_bad_specs(self, spec):
        with pytest.raises(UsageError):
            parse_rate_spec([spec])

    def test_duplicate_class_rejected(self):
        with pytest.raises(UsageError, match="twice"):
            parse_rate_spec(["White=0.1", "White=0.2"])


class TestUndersample:
    def test_exact_count_at_half(self):
        rows = [row(f"a{i:03d}", DAY) for i in range(100)]
        kept = undersample(rows, {"White": 0.5}, seed=1)
        assert len(kept) == 50

    def test_rounding_half_up(self):
        rows = [row(f"a{i}", DAY) for i in range(5)]
        kept = undersample(rows, {"White": 0.5}, seed=1)
        # 2.5 rounds up to 3.
        assert len(kept) == 3

    def test_unrated_classes_keep_everything(self):
        rows = [row(f"a{i}", DAY) for i in range(10)] + [
            row(f"r{i}", DAY, label="RS") for i in range(4)
        ]
        kept = undersample(rows, {"White": 0.2}, seed=3)
        assert sum(1 for r in kept if r.label == "RS") == 4
        assert sum(1 for r in kept if r.label == "White") == 2

    def test_rate_one_keeps_all(self):
        rows = [row(f"a{i}", DAY) for i in range(9)]
        assert len(undersample(rows, {"White": 1.0}, seed=5)) == 9

    def test_days_keep_proportional_share(self):
        rows = [row(f"a{i:03d}", DAY) for i in range(80)] + [
            row(f"b{i:03d}", DAY1) for i in range(20)
        ]
        kept = undersample(rows, {"White": 0.5}, seed=2)
        assert len(kept) == 50
        assert sum(1 for r in kept if r.day == DAY) == 40
        assert sum(1 for r in kept if r.day == DAY1) == 10

    def test_deterministic_for_seed(self):
        rows = [row(f"a{i:03d}", DAY) for i in range(60)]
        a = undersample(rows, {"White": 0.3}, seed=9)
        b = undersample(rows, {"White": 0.3}, seed=9)
        assert a == b
        c = undersample(rows, {"White": 0.3}, seed=10)
        assert len(c) == len(a)

    def test_input_order_does_not_matter(self):
        rows = [row(f"a{i:03d}", DAY) for i in range(30)] + [
            row(f"b{i:03d}", DAY1) for i in range(30)
        ]
        shuffled = rows[:]
        random.Random(4).shuffle(shuffled)
        assert undersample(rows, {"White": 0.4}, seed=1) == undersample(
            shuffled, {"White": 0.4}, seed=1
        )

    def test_output_sorted(self):
        rows = [row(f"a{i:03d}", d) for d in (DAY1, DAY) for i in range(20)]
        kept = undersample(rows, {"White": 0.6}, seed=8)
        assert kept == sorted(kept, key=lambda r: (r.day, r.address))

    def test_bad_rates_rejected(self):
        rows = [row("a", DAY)]
        with pytest.raises(UsageError):
            undersample(rows, {"White": 0.0}, seed=1)
        with pytest.raises(UsageError):
            undersample(rows, {"Pink": 0.5}, seed=1)


class TestDatasetCsv:
    def test_roundtrip(self, tmp_path):
        rows = [
            row("a", DAY, label="RS", income=123, o9=2),
            row("b", DAY1, label="White", income=5),
        ]
        path = tmp_path / "dataset.csv"
        n = write_dataset_csv(path, rows)
        assert n == 2
        assert read_dataset_csv(path) == rows

    def test_header_pinned(self):
        buf = io.StringIO()
        write_dataset_csv(buf, [])
        header = buf.getvalue().splitlines()[0].split(",")
        assert header == DATASET_HEADER
        assert header[:2] == ["address", "day"]
        assert header[2] == "o0"
        assert header[49] == "o47"
        assert header[50:] == ["income", "label"]

    def test_byte_stable(self):
        rows = [row("a", DAY, income=1, o3=1)]
        a, b = io.StringIO(), io.StringIO()
        write_dataset_csv(a, rows)
        write_dataset_csv(b, rows)
        assert a.getvalue() == b.getvalue()

    def test_reader_rejects_bad_files(self, tmp_path):
        bad_header = tmp_path / "h.csv"
        bad_header.write_text("address,day\n")
        with pytest.raises(DataError):
            read_dataset_csv(bad_header)
        bad_label = tmp_path / "l.csv"
        write_dataset_csv(bad_label, [row("a", DAY)])
        text = bad_label.read_text().replace("White", "Mauve")
        bad_label.write_text(text)
        with pytest.raises(DataError):
            read_dataset_csv(bad_label)


class TestLabelsCsv:
    def test_roundtrip_sorted(self, tmp_path):
        path = tmp_path / "labels.csv"
        write_labels_csv(path, {"z": "RS", "a": "DM"})
        assert path.read_text() == "address,label\na,DM\nz,RS\n"
        assert read_labels_csv(path) == {"a": "DM", "z": "RS"}

    def test_conflicting_rows_rejected(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("address,label\na,DM\na,RS\n")
        with pytest.raises(DataError, match="conflicting"):
            read_labels_csv(path)

    def test_duplicate_agreeing_rows_fine(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("address,label\na,DM\na,DM\n")
        assert read_labels_csv(path) == {"a": "DM"}

    def test_unknown_label_rejected(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("address,label\na,Teal\n")
        with pytest.raises(DataError):
            read_labels_csv(path)


class TestManifest:
    def test_counts_and_stability(self, tmp_path):
        rows = [row("a", DAY, label="RS"), row("b", DAY), row("c", DAY)]
        manifest = dataset_manifest(rows, {"White": 0.5}, seed=3, extra={"source": "x"})
        assert manifest["rows"] == {"total": 3, "White": 2, "DM": 0, "RS": 1}
        assert manifest["undersample"] == {"seed": 3, "rates": {"White": 0.5}}
        assert manifest["source"] == "x"
        path = tmp_path / "manifest.json"
        write_manifest(path, manifest)
        first = path.read_bytes()
        write_manifest(path, manifest)
        assert path.read_bytes() == first
        assert json.loads(first)["rows"]["total"] == 3
