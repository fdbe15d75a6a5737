"""Enumeration of chainlet occurrences inside one daily window.

A 2-chainlet occurrence is an ordered pair of transactions (t1, t2)
where t2 spends at least one output address of t1 and t1 precedes t2 in
the window's (timestamp, tx_id) order.  The occurrence carries the full
output address set of both transactions plus the shared addresses that
link them.  Input addresses of t1 play no role.

Transactions whose outputs nobody spends inside the window form dormant
occurrences (t2 absent).  A transaction with some outputs spent and some
not is never dormant; the unspent outputs are covered by the sibling
role of its 2-chainlet occurrences.

Cardinalities are clamped at three: the role taxonomy distinguishes
output multiplicities 1, 2 and "3 or more".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .graph import AddressId, DailySnapshot


def clamp3(n: int) -> int:
    """Clamp a cardinality to the taxonomy's maximum of 3."""
    return n if n < 3 else 3


@dataclass(frozen=True, slots=True)
class ChainletOccurrence:
    """One occurrence: either a (t1, t2) pair or a dormant t1.

    Positions refer to the snapshot's transaction order.  ``m`` and ``n``
    are the clamped output multiplicities of t1 and t2; ``n`` is 0 for
    dormant occurrences, which also have empty ``shared`` and ``out2``.
    """

    t1_pos: int
    t2_pos: int | None
    out1: frozenset[AddressId]
    shared: frozenset[AddressId]
    out2: frozenset[AddressId]
    m: int
    n: int

    @property
    def dormant(self) -> bool:
        return self.t2_pos is None


_EMPTY: frozenset[AddressId] = frozenset()


def _t1_range(snapshot: DailySnapshot, span: tuple[int, int] | None) -> range:
    if span is None:
        return range(len(snapshot))
    lo, hi = span
    return range(max(lo, 0), min(hi, len(snapshot)))


def enumerate_2chainlets(
    snapshot: DailySnapshot, span: tuple[int, int] | None = None
) -> Iterator[ChainletOccurrence]:
    """Yield every 2-chainlet occurrence, t1 position ascending then t2.

    Exactly one occurrence is emitted per qualifying transaction pair,
    however many addresses they share.  ``span`` restricts t1 positions
    to [lo, hi); parallel extraction partitions the day this way.
    """
    out_sets = snapshot.out_sets
    in_sets = snapshot.in_sets
    successors = snapshot.successors
    for t1_pos in _t1_range(snapshot, span):
        succ = successors[t1_pos]
        if not succ:
            continue
        out1 = out_sets[t1_pos]
        m = clamp3(len(out1))
        for t2_pos in succ:
            out2 = out_sets[t2_pos]
            yield ChainletOccurrence(
                t1_pos=t1_pos,
                t2_pos=t2_pos,
                out1=out1,
                shared=out1 & in_sets[t2_pos],
                out2=out2,
                m=m,
                n=clamp3(len(out2)),
            )


def enumerate_dormant(
    snapshot: DailySnapshot, span: tuple[int, int] | None = None
) -> Iterator[ChainletOccurrence]:
    """Yield one dormant occurrence per transaction with no successor."""
    out_sets = snapshot.out_sets
    successors = snapshot.successors
    for t1_pos in _t1_range(snapshot, span):
        succ = successors[t1_pos]
        if succ:
            continue
        out1 = out_sets[t1_pos]
        yield ChainletOccurrence(
            t1_pos=t1_pos,
            t2_pos=None,
            out1=out1,
            shared=_EMPTY,
            out2=_EMPTY,
            m=clamp3(len(out1)),
            n=0,
        )


def enumerate_all(snapshot: DailySnapshot) -> Iterator[ChainletOccurrence]:
    """All occurrences of the window: 2-chainlets first, then dormant."""
    yield from enumerate_2chainlets(snapshot)
    yield from enumerate_dormant(snapshot)
