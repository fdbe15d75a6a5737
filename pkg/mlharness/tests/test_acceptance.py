"""Acceptance gate for the evaluation harness.

Each test prints one [PASS]/[FAIL] line for its criterion and then
asserts it.  The dataset is built through the chainlet command line,
the same route an operator would take, so the harness is exercised
strictly through the producer's public surface.
"""

import json
import subprocess
import sys

import pytest

from chainlet import role_partition

from mlharness.cli import main as cli_main
from mlharness.data import load_dataset, subset_columns
from mlharness.model import evaluate

RS_AUC_FLOOR = 0.95
DM_AUC_FLOOR = 0.95
CONTROL_BAND = (0.45, 0.55)


def report(ok: bool, text: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] {text}")


def run_chainlet(*args: str) -> None:
    subprocess.run(
        [sys.executable, "-m", "chainlet.cli", *args],
        check=True,
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="session")
def dataset_path(tmp_path_factory):
    base = tmp_path_factory.mktemp("harness_acceptance")
    gen = base / "gen"
    ds = base / "ds"
    run_chainlet(
        "gen",
        "--out",
        str(gen),
        "--seed",
        "13",
        "--days",
        "2",
        "--background",
        "5000",
        "--rs",
        "200",
        "--dm",
        "200",
    )
    run_chainlet(
        "export",
        "--input",
        str(gen / "stream.jsonl"),
        "--labels",
        str(gen / "labels.csv"),
        "--out",
        str(ds),
        "--seed",
        "13",
    )
    return ds / "dataset.csv"


def test_criterion_1_planted_motif_classification(dataset_path):
    dataset = load_dataset(dataset_path, subset="all")
    sizes = dataset.class_sizes()
    real = evaluate(dataset, seed=7, repeats=5)
    control = evaluate(dataset, seed=7, repeats=5, shuffle_labels=True)

    rs = real.scores["RS"].auc_mean
    dm = real.scores["DM"].auc_mean
    lo, hi = CONTROL_BAND
    in_band = {
        cls: lo <= score.auc_mean <= hi for cls, score in control.scores.items()
    }
    ok = rs >= RS_AUC_FLOOR and dm >= DM_AUC_FLOOR and all(in_band.values())
    control_text = " ".join(
        f"{cls}={control.scores[cls].auc_mean:.4f}" for cls in sorted(control.scores)
    )
    report(
        ok,
        "criterion 1: planted-motif classification "
        f"(10000 background / {sizes['RS']} RS / {sizes['DM']} DM, "
        f"300 trees, 80/20 split, 5 repeats) "
        f"RS auc={rs:.4f} DM auc={dm:.4f}; shuffled control {control_text}",
    )
    assert rs >= RS_AUC_FLOOR
    assert dm >= DM_AUC_FLOOR
    assert all(in_band.values()), in_band


def test_criterion_2_ablation_partition(dataset_path, tmp_path, capsys):
    active = subset_columns("active_only")
    passive = subset_columns("passive_only")
    orbits = subset_columns("orbits_only")
    roles = role_partition()
    partitions = (
        set(active) & set(passive) == set()
        and sorted(active + passive, key=lambda c: int(c[1:])) == orbits
        and active == [f"o{i}" for i in sorted(roles.active)]
        and passive == [f"o{i}" for i in sorted(roles.passive)]
    )

    runs_clean = True
    for subset in ("active_only", "passive_only"):
        rc = cli_main(
            [
                "run",
                "--dataset",
                str(dataset_path),
                "--features",
                subset,
                "--seed",
                "7",
                "--repeats",
                "5",
                "--out",
                str(tmp_path),
            ]
        )
        blob = json.loads((tmp_path / f"result_{subset}.json").read_text())
        runs_clean = runs_clean and rc == 0 and set(blob["scores"]) == {
            "White",
            "DM",
            "RS",
        }
    capsys.readouterr()

    ok = partitions and runs_clean
    report(
        ok,
        "criterion 2: active_only + passive_only partition the 48 orbit "
        f"columns ({len(active)} + {len(passive)}) and both ablations "
        "run and report without error",
    )
    assert partitions
    assert runs_clean
