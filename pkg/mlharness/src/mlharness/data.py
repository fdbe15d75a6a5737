"""Dataset loading and feature subset selection.

The input is the address-day CSV the chainlet exporter writes:
address, day, o0..o47, income, label.  Subsets carve that column space
for ablations.  The active/passive split comes from the chainlet role
partition rather than a copied list, so the two packages cannot drift
apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from chainlet import ORBIT_COUNT, read_dataset_csv, role_partition

CLASSES = ("White", "DM", "RS")

# "all" covers every exported feature column, which today means the 48
# orbit counts plus income, making it equal to "orbits+income"; both
# names stay because ablation reports read better against a stable set.
SUBSETS = ("all", "active_only", "passive_only", "orbits_only", "orbits+income")


class HarnessError(Exception):
    """Raised for unusable datasets or unknown subset names."""


def orbit_columns(names: tuple[int, ...] | frozenset[int]) -> list[str]:
    return [f"o{i}" for i in sorted(names)]


def subset_columns(subset: str, siblings_active: bool = False) -> list[str]:
    """Column names for a feature subset, in a fixed order."""
    if subset not in SUBSETS:
        raise HarnessError(f"unknown feature subset {subset!r}; pick from {SUBSETS}")
    roles = role_partition(siblings_active=siblings_active)
    if subset in ("all", "orbits+income"):
        return orbit_columns(frozenset(range(ORBIT_COUNT))) + ["income"]
    if subset == "orbits_only":
        return orbit_columns(frozenset(range(ORBIT_COUNT)))
    if subset == "active_only":
        return orbit_columns(roles.active)
    return orbit_columns(roles.passive)


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus aligned labels and provenance."""

    features: np.ndarray
    labels: np.ndarray
    columns: list[str]
    addresses: list[str]

    def __len__(self) -> int:
        return len(self.labels)

    def class_sizes(self) -> dict[str, int]:
        return {c: int((self.labels == c).sum()) for c in CLASSES}


def load_dataset(path, subset: str = "all", siblings_active: bool = False) -> Dataset:
    """Read an exported CSV and project it onto a feature subset."""
    rows = read_dataset_csv(path)
    if not rows:
        raise HarnessError(f"{path}: dataset is empty")
    columns = subset_columns(subset, siblings_active=siblings_active)
    index = {f"o{i}": i for i in range(ORBIT_COUNT)}
    matrix = np.zeros((len(rows), len(columns)), dtype=np.float64)
    for r, row in enumerate(rows):
        for c, name in enumerate(columns):
            if name == "income":
                matrix[r, c] = row.income
            else:
                matrix[r, c] = row.counts[index[name]]
    labels = np.array([row.label for row in rows], dtype=object)
    addresses = [row.address for row in rows]
    return Dataset(features=matrix, labels=labels, columns=columns, addresses=addresses)
