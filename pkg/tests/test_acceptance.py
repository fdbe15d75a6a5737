"""Acceptance gate for the whole pipeline.

Each test prints one PASS or FAIL line (run with -s to see them all)
and asserts the bound it reports.  Together they cover the two
independent verification routes, the hand-checkable unit cases, the
clustering closure, scale and determinism bounds, and the frozen
mixing-orbit set.
"""

import io
import time
from pathlib import Path

from chainlet.chainlets import enumerate_all
from chainlet.clustering import cluster
from chainlet.graph import build_snapshot
from chainlet.orbits import (
    MIXING_ORBITS,
    accumulate,
    counts_to_vectors,
    extract_day,
    write_vectors_csv,
)
from chainlet.synth import GenConfig, generate
from chainlet.verify import run_oracle_equivalence, run_theorem_suite
from chainlet.cli import main as cli_main

from helpers import snap, tx


def report(number: int, description: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    line = f"[{status}] criterion {number}: {description}{suffix}"
    print(line)
    assert ok, line


class TestCriterion1:
    def test_extractor_matches_embedding_oracle(self):
        run = run_oracle_equivalence(500)
        ok = run.passed and run.checked == 500 and run.elapsed < 120.0
        report(
            1,
            "extractor equals embedding oracle on 500 random snapshots",
            ok,
            f"{run.checked} snapshots, {len(run.failures)} mismatches, {run.elapsed:.1f}s",
        )


class TestCriterion2:
    def test_counting_identities_hold(self):
        run = run_theorem_suite(500)
        sizes = set(run.automorphism_sizes)
        ok = run.passed and run.checked == 500 and {1, 2, 6} <= sizes
        report(
            2,
            "orbit-stabilizer and embedding-count identities on 500 hosts",
            ok,
            f"{run.checked} hosts, {len(run.failures)} failures, "
            f"automorphism sizes {sorted(sizes)}",
        )


class TestCriterion3:
    def extract(self, *records):
        return accumulate(enumerate_all(snap(*records)))

    def test_hand_checkable_shapes(self):
        # One output spent into two: spender takes 5, outputs take 6.
        counts = self.extract(
            tx("t1", 0, [], ["a"]),
            tx("t2", 60, ["a"], ["x", "y"]),
        )
        case_112 = (
            counts["a"][5] == 1 and counts["x"][6] == 1 and counts["y"][6] == 1
        )

        # One output spent into three: spender takes 7, outputs take 8.
        counts = self.extract(
            tx("t1", 0, [], ["a"]),
            tx("t2", 60, ["a"], ["x", "y", "z"]),
        )
        case_113 = (
            counts["a"][7] == 1
            and all(counts[o][8] == 1 for o in ("x", "y", "z"))
        )

        # Unspent outputs rest on the dormant orbit for their own count.
        counts = self.extract(tx("t1", 0, [], ["a"]))
        dorm1 = counts["a"] == {0: 1}
        counts = self.extract(tx("t1", 0, [], ["a", "b"]))
        dorm2 = counts["a"] == {1: 1} and counts["b"] == {1: 1}
        counts = self.extract(tx("t1", 0, [], ["a", "b", "c"]))
        dorm3 = all(counts[o] == {2: 1} for o in ("a", "b", "c"))

        ok = case_112 and case_113 and dorm1 and dorm2 and dorm3
        report(
            3,
            "unit shapes give orbits 5/6, 7/8 and dormant 0/1/2",
            ok,
            f"1-1-2={case_112} 1-1-3={case_113} dormant={dorm1 and dorm2 and dorm3}",
        )


class TestCriterion4:
    def test_co_spend_closure(self):
        result = cluster(
            [
                tx("t1", 0, ["A", "B"], ["x"]),
                tx("t2", 60, ["B", "C"], ["y"]),
            ]
        )
        got = {a for a, rep in result.assignments.items() if rep == result.assignments["A"]}
        ok = got >= {"A", "B", "C"} and result.assignments["C"] == "A"
        report(
            4,
            "co-spending closes transitively: {A,B} and {B,C} become one wallet",
            ok,
            f"cluster of A = {sorted(got)}",
        )


class TestCriterion5:
    def test_400k_day_within_bounds(self):
        cfg = GenConfig(
            seed=42,
            days=1,
            background_per_day=400_000,
            rs_forwarders=100,
            dm_holders=100,
        )
        result = generate(cfg)
        assert len(result.records) >= 400_000
        snapshot = build_snapshot(
            result.records, cfg.start_day, cfg.window_offset_minutes
        )

        started = time.perf_counter()
        counts_1 = extract_day(snapshot, workers=1)
        single = time.perf_counter() - started

        started = time.perf_counter()
        counts_8 = extract_day(snapshot, workers=8)
        parallel = time.perf_counter() - started

        buf_1, buf_8 = io.StringIO(), io.StringIO()
        write_vectors_csv(buf_1, counts_to_vectors(cfg.start_day, counts_1))
        write_vectors_csv(buf_8, counts_to_vectors(cfg.start_day, counts_8))
        identical = buf_1.getvalue() == buf_8.getvalue()

        ok = single <= 900.0 and parallel <= 300.0 and identical
        report(
            5,
            "400K-transaction day extracts within 900s/1 worker and 300s/8 workers",
            ok,
            f"{len(result.records)} txs, single={single:.1f}s, "
            f"eight={parallel:.1f}s, identical_csv={identical}",
        )


class TestCriterion6:
    def run_pipeline(self, base: Path, workers: str) -> dict[str, bytes]:
        gen_dir = base / "gen"
        assert (
            cli_main(
                [
                    "gen",
                    "--out",
                    str(gen_dir),
                    "--seed",
                    "19",
                    "--days",
                    "2",
                    "--background",
                    "300",
                    "--rs",
                    "8",
                    "--dm",
                    "8",
                ]
            )
            == 0
        )
        orbit_dir = base / "orbits"
        assert (
            cli_main(
                [
                    "extract",
                    "--input",
                    str(gen_dir / "stream.jsonl"),
                    "--out",
                    str(orbit_dir),
                    "--workers",
                    workers,
                ]
            )
            == 0
        )
        pat_dir = base / "patterns"
        assert (
            cli_main(
                [
                    "patterns",
                    "--orbits",
                    str(orbit_dir / "orbits.csv"),
                    "--labels",
                    str(gen_dir / "labels.csv"),
                    "--out",
                    str(pat_dir),
                ]
            )
            == 0
        )
        cl_dir = base / "clusters"
        assert (
            cli_main(
                [
                    "cluster",
                    "--input",
                    str(gen_dir / "stream.jsonl"),
                    "--out",
                    str(cl_dir),
                    "--labels",
                    str(gen_dir / "labels.csv"),
                ]
            )
            == 0
        )
        ds_dir = base / "dataset"
        assert (
            cli_main(
                [
                    "export",
                    "--input",
                    str(gen_dir / "stream.jsonl"),
                    "--labels",
                    str(gen_dir / "labels.csv"),
                    "--out",
                    str(ds_dir),
                    "--undersample",
                    "White=0.4",
                    "--seed",
                    "3",
                    "--workers",
                    workers,
                ]
            )
            == 0
        )
        artifacts = {}
        for rel in (
            "gen/stream.jsonl",
            "gen/labels.csv",
            "gen/gen_manifest.json",
            "orbits/orbits.csv",
            "patterns/patterns.tsv",
            "clusters/clusters.csv",
            "clusters/expanded_labels.csv",
            "dataset/dataset.csv",
            "dataset/manifest.json",
        ):
            artifacts[rel] = (base / rel).read_bytes()
        return artifacts

    def test_pipeline_is_byte_deterministic(self, tmp_path):
        first = self.run_pipeline(tmp_path / "run1", workers="1")
        second = self.run_pipeline(tmp_path / "run2", workers="1")
        reworked = self.run_pipeline(tmp_path / "run3", workers="4")
        same_run = [rel for rel in first if first[rel] != second[rel]]
        same_workers = [rel for rel in first if first[rel] != reworked[rel]]
        ok = not same_run and not same_workers
        report(
            6,
            "full pipeline artifacts byte-identical across runs and worker counts",
            ok,
            f"{len(first)} artifacts compared"
            + (f"; run diff {same_run} worker diff {same_workers}" if not ok else ""),
        )


class TestCriterion7:
    def test_mixing_orbits_frozen(self):
        expected = frozenset({30, 31, 32, 39, 40, 41, 46, 47})
        ok = MIXING_ORBITS == expected
        report(
            7,
            "mixed-provenance orbit set is exactly {30,31,32,39,40,41,46,47}",
            ok,
            f"got {sorted(MIXING_ORBITS)}",
        )
