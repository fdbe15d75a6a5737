"""Figure rendering for extraction runs and pattern tables.

Everything draws through the Agg backend straight to PNG files, so
reports work on headless machines.  The PNG writer is told to skip its
software tag, which keeps repeated renders of the same data byte
identical and lets tests compare files directly.
"""

from __future__ import annotations

import os
from datetime import date
from typing import Iterable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .orbits import ORBIT_COUNT, OrbitVector
from .patterns import CLASSES, PatternStats, resolve_label

_SAVE_OPTS = {"dpi": 120, "metadata": {"Software": None}}

_CLASS_COLORS = {"White": "#7f7f7f", "DM": "#1f77b4", "RS": "#d62728"}


def _save(fig, path: str | os.PathLike[str]) -> str:
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return os.fspath(path)


def orbit_frequency_figure(
    vectors: Iterable[OrbitVector],
    labels: dict[str, str],
    path: str | os.PathLike[str],
) -> str:
    """Per class, the share of address-days occupying each orbit."""
    totals = {c: 0 for c in CLASSES}
    hits = {c: [0] * ORBIT_COUNT for c in CLASSES}
    for vec in vectors:
        label = resolve_label(labels, vec.address)
        totals[label] += 1
        for i, count in enumerate(vec.counts):
            if count:
                hits[label][i] += 1

    fig, ax = plt.subplots(figsize=(12, 4))
    width = 0.28
    xs = range(ORBIT_COUNT)
    for offset, cls in enumerate(CLASSES):
        total = totals[cls]
        shares = [h / total if total else 0.0 for h in hits[cls]]
        ax.bar(
            [x + (offset - 1) * width for x in xs],
            shares,
            width=width,
            label=f"{cls} (n={total})",
            color=_CLASS_COLORS[cls],
        )
    ax.set_xlabel("orbit")
    ax.set_ylabel("share of address-days with nonzero count")
    ax.set_title("orbit occupancy by class")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([str(x) for x in xs], fontsize=6)
    ax.legend()
    fig.tight_layout()
    return _save(fig, path)


def pattern_grid_figure(
    rows: list[PatternStats], path: str | os.PathLike[str], top: int = 20
) -> str:
    """Occupancy grid of the top pattern rows, one row per pattern."""
    shown = rows[:top]
    fig, ax = plt.subplots(figsize=(12, max(2.0, 0.35 * len(shown) + 1.2)))
    if shown:
        grid = [
            [1 if row.mask >> i & 1 else 0 for i in range(ORBIT_COUNT)]
            for row in shown
        ]
        ax.imshow(grid, aspect="auto", cmap="Greys", vmin=0, vmax=1)
        ax.set_yticks(range(len(shown)))
        ax.set_yticklabels(
            [
                "W={White} DM={DM} RS={RS}".format(**row.class_counts)
                for row in shown
            ],
            fontsize=7,
        )
    else:
        ax.text(0.5, 0.5, "no patterns", ha="center", va="center")
    ax.set_xlabel("orbit")
    ax.set_title("occupied orbits of the most frequent patterns")
    ax.set_xticks(range(0, ORBIT_COUNT, 4))
    fig.tight_layout()
    return _save(fig, path)


def timing_figure(
    timings: dict[date, float], path: str | os.PathLike[str]
) -> str:
    """Wall seconds spent extracting each day."""
    days = sorted(timings)
    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.bar(range(len(days)), [timings[d] for d in days], color="#1f77b4")
    ax.set_xticks(range(len(days)))
    ax.set_xticklabels([d.isoformat() for d in days], rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("seconds")
    ax.set_title("extraction wall time per day")
    fig.tight_layout()
    return _save(fig, path)
