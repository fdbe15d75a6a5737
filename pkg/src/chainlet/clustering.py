"""Address clustering by spending behaviour.

Two merging rules, applied together through a union-find structure:
addresses spent by the same transaction belong to one wallet
(co-spending), and the rule chains across transactions, so {A, B} in
one transaction and {B, C} in another put A and C together
(transition).  Change-based guessing is deliberately not implemented;
its output is not reliable enough to act on.

Cluster identifiers are the lexicographically smallest member address,
which makes the output independent of record processing order.

Label expansion treats disagreements as findings: a cluster whose
members carry different labels is reported as a conflict and left
unexpanded, never resolved by majority or priority.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterable

from .graph import AddressId, TransactionRecord


class UnionFind:
    """Union by size with path compression over arbitrary keys."""

    def __init__(self) -> None:
        self._parent: dict[str, str] = {}
        self._size: dict[str, int] = {}
        self.merges = 0

    def add(self, key: str) -> None:
        if key not in self._parent:
            self._parent[key] = key
            self._size[key] = 1

    def find(self, key: str) -> str:
        root = key
        parent = self._parent
        while parent[root] != root:
            root = parent[root]
        while parent[key] != root:
            parent[key], key = root, parent[key]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self._size[ra] < self._size[rb]:
            ra, rb = rb, ra
        self._parent[rb] = ra
        self._size[ra] += self._size[rb]
        self.merges += 1

    def __len__(self) -> int:
        return len(self._parent)

    def groups(self) -> list[list[str]]:
        by_root: dict[str, list[str]] = {}
        for key in self._parent:
            by_root.setdefault(self.find(key), []).append(key)
        return [sorted(members) for members in by_root.values()]


@dataclass(frozen=True)
class ClusterResult:
    """Partition of every observed address into wallets."""

    assignments: dict[AddressId, AddressId]
    address_count: int
    cluster_count: int
    merge_count: int

    def members_of(self, cluster_id: AddressId) -> list[AddressId]:
        return sorted(a for a, c in self.assignments.items() if c == cluster_id)


def cluster(records: Iterable[TransactionRecord]) -> ClusterResult:
    """Partition input and output addresses of a record stream.

    Only co-spending merges anything; addresses seen purely as outputs
    stay singletons.  Every merge is recorded, so the bookkeeping
    identity cluster_count + merge_count == address_count holds.
    """
    uf = UnionFind()
    for rec in records:
        spenders = sorted(rec.input_set)
        for addr in spenders:
            uf.add(addr)
        first = spenders[0] if spenders else None
        for addr in spenders[1:]:
            uf.union(first, addr)
        for addr, _ in rec.outputs:
            uf.add(addr)

    groups = uf.groups()
    assignments: dict[AddressId, AddressId] = {}
    for members in groups:
        rep = members[0]
        for addr in members:
            assignments[addr] = rep
    return ClusterResult(
        assignments=assignments,
        address_count=len(uf),
        cluster_count=len(groups),
        merge_count=uf.merges,
    )


@dataclass(frozen=True)
class LabelConflict:
    """One cluster whose labelled members disagree."""

    cluster_id: AddressId
    members_by_label: dict[str, tuple[AddressId, ...]]

    def labels(self) -> tuple[str, ...]:
        return tuple(sorted(self.members_by_label))


@dataclass
class ExpandResult:
    expanded: dict[AddressId, str] = field(default_factory=dict)
    conflicts: list[LabelConflict] = field(default_factory=list)


def expand_labels(clusters: ClusterResult, labels: dict[AddressId, str]) -> ExpandResult:
    """Propagate labels across clusters, reporting disagreements.

    A cluster with exactly one distinct label among its members gets
    that label on every member.  Clusters with several distinct labels
    are returned as conflicts and left out of the expansion.  Labelled
    addresses the clustering never saw pass through unchanged.
    """
    labelled_by_cluster: dict[AddressId, dict[str, list[AddressId]]] = {}
    stray: dict[AddressId, str] = {}
    for addr, label in labels.items():
        rep = clusters.assignments.get(addr)
        if rep is None:
            stray[addr] = label
            continue
        labelled_by_cluster.setdefault(rep, {}).setdefault(label, []).append(addr)

    result = ExpandResult(expanded=dict(stray))
    for rep in sorted(labelled_by_cluster):
        by_label = labelled_by_cluster[rep]
        if len(by_label) > 1:
            result.conflicts.append(
                LabelConflict(
                    cluster_id=rep,
                    members_by_label={
                        label: tuple(sorted(addrs)) for label, addrs in sorted(by_label.items())
                    },
                )
            )
            continue
        (label,) = by_label
        for member in clusters.members_of(rep):
            result.expanded[member] = label
    return result


def write_clusters_csv(target: str | os.PathLike[str] | io.TextIOBase, clusters: ClusterResult) -> int:
    """Write address,cluster_id rows sorted by address. Returns row count."""
    rows = sorted(clusters.assignments.items())

    def emit(handle) -> int:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["address", "cluster_id"])
        writer.writerows(rows)
        return len(rows)

    if isinstance(target, io.TextIOBase):
        return emit(target)
    with open(target, "w", encoding="utf-8", newline="") as handle:
        return emit(handle)


def format_conflicts(conflicts: list[LabelConflict]) -> str:
    """Render conflicts as readable text, one block per cluster."""
    if not conflicts:
        return "no label conflicts\n"
    lines = [f"{len(conflicts)} label conflict(s)\n"]
    for conflict in conflicts:
        lines.append(f"cluster {conflict.cluster_id}:")
        for label in conflict.labels():
            members = ", ".join(conflict.members_by_label[label])
            lines.append(f"  {label}: {members}")
    return "\n".join(lines) + "\n"
