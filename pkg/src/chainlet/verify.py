"""Randomized self-verification harness.

Two property suites, both exhaustive and exact:

* oracle equivalence: on seeded random daily snapshots, the production
  extractor and the embedding oracle must produce identical
  (address, orbit, count) sets.

* copy counting: on seeded random hosts built from disjoint planted
  copies of a chainlet shape, the isomorphism and node-orbit counting
  identities must hold exactly.

The generators are deliberately adversarial within small bounds: heavy
address reuse, equal timestamps, coinbase inputs, degenerate pay-back
edges, output fan-outs past the clamp limit.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from datetime import date

from .graph import DailySnapshot, TransactionRecord, build_snapshot, window_bounds
from .isooracle import (
    SmallGraph,
    canonical_pattern,
    oracle_orbit_counts,
    verify_theorem1,
)
from .orbits import FAMILY_ORBITS, extract_day

_WINDOW = date(2016, 3, 1)

_IN_DEGREES = (0, 1, 2, 3, 4, 5)
_IN_WEIGHTS = (8, 40, 25, 15, 8, 4)
_OUT_DEGREES = (1, 2, 3, 4, 5)
_OUT_WEIGHTS = (38, 27, 17, 10, 8)


def random_snapshot(seed: int) -> DailySnapshot:
    """Small random window: at most 50 transactions, 64 graph nodes."""
    rng = random.Random(seed)
    n_tx = rng.randint(1, 50)
    pool_size = rng.randint(2, 64 - n_tx)
    pool = [f"a{i:02d}" for i in range(pool_size)]

    start, _ = window_bounds(_WINDOW)
    tx_ids = [f"t{i:03d}" for i in range(n_tx)]
    rng.shuffle(tx_ids)

    records = []
    funded: set[str] = set()
    last_ts = start
    for i in range(n_tx):
        if i > 0 and rng.random() < 0.25:
            ts = last_ts
        else:
            ts = start + rng.randrange(86400)
        last_ts = ts

        k_in = rng.choices(_IN_DEGREES, weights=_IN_WEIGHTS)[0]
        funded_list = sorted(funded)
        if funded_list and rng.random() < 0.75:
            source = funded_list
        else:
            source = pool
        k_in = min(k_in, len(source))
        inputs = rng.sample(source, k_in) if k_in else []

        k_out = min(rng.choices(_OUT_DEGREES, weights=_OUT_WEIGHTS)[0], pool_size)
        outputs = [(addr, rng.randrange(1, 1_000_000)) for addr in rng.sample(pool, k_out)]
        funded.update(addr for addr, _ in outputs)

        records.append(TransactionRecord.create(tx_ids[i], ts, inputs, outputs))

    return build_snapshot(records, _WINDOW)


def extractor_counts(snapshot: DailySnapshot, workers: int = 1) -> dict[tuple[str, int], int]:
    """Extractor output flattened to a {(address, orbit): count} map."""
    flat: dict[tuple[str, int], int] = {}
    for addr, inner in extract_day(snapshot, workers=workers).items():
        for orbit, count in inner.items():
            flat[(addr, orbit)] = count
    return flat


def oracle_counts(snapshot: DailySnapshot) -> dict[tuple[str, int], int]:
    """Embedding-oracle output flattened the same way."""
    graph, addr_of_node = SmallGraph.from_snapshot(snapshot)
    flat: dict[tuple[str, int], int] = {}
    for node, inner in oracle_orbit_counts(graph).items():
        for orbit, count in inner.items():
            flat[(addr_of_node[node], orbit)] = count
    return flat


def diff_counts(
    got: dict[tuple[str, int], int], want: dict[tuple[str, int], int], limit: int = 5
) -> list[str]:
    diffs = []
    for key in sorted(set(got) | set(want)):
        g, w = got.get(key), want.get(key)
        if g != w:
            diffs.append(f"{key[0]}/orbit{key[1]}: extractor={g} oracle={w}")
            if len(diffs) >= limit:
                break
    return diffs


@dataclass
class EquivalenceRun:
    checked: int = 0
    failures: list[tuple[int, str]] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


def run_oracle_equivalence(seeds: int, base_seed: int = 0) -> EquivalenceRun:
    """Compare extractor and oracle on ``seeds`` random snapshots."""
    run = EquivalenceRun()
    t0 = time.monotonic()
    for seed in range(base_seed, base_seed + seeds):
        snapshot = random_snapshot(seed)
        got = extractor_counts(snapshot)
        want = oracle_counts(snapshot)
        run.checked += 1
        if got != want:
            run.failures.append((seed, "; ".join(diff_counts(got, want))))
    run.elapsed = time.monotonic() - t0
    return run


_SHAPES = sorted(FAMILY_ORBITS)


def expected_automorphisms(m: int, s: int, n: int) -> int:
    """Slot interchangeability gives s! * (m-s)! * n! automorphisms."""
    return math.factorial(s) * math.factorial(m - s) * math.factorial(n)


def random_theorem_case(seed: int) -> tuple[SmallGraph, SmallGraph, dict[str, int]]:
    """Pattern plus a host of disjoint planted copies and dormant decoys.

    The identities verified against this host assume copies do not share
    nodes, so the generator plants them disjointly with shuffled node
    creation order and interleaved transaction ranks.
    """
    rng = random.Random(seed)
    m, s, n = _SHAPES[seed % len(_SHAPES)]
    copies = rng.randint(1, 4)
    decoys = rng.randint(0, 3)

    # one token per transaction to create; a copy's t1 must precede its t2
    tokens: list[tuple[str, int]] = []
    for c in range(copies):
        tokens.append(("tx", c))
        tokens.append(("tx", c))
    for d in range(decoys):
        tokens.append(("decoy", d))
    rng.shuffle(tokens)

    host = SmallGraph()
    copy_txs: dict[int, list[int]] = {c: [] for c in range(copies)}
    decoy_txs: list[int] = []
    for kind, idx in tokens:
        node = host.add_transaction()
        if kind == "tx":
            copy_txs[idx].append(node)
        else:
            decoy_txs.append(node)

    for c in rng.sample(range(copies), copies):
        t1, t2 = copy_txs[c]
        for i in range(m):
            addr = host.add_address()
            host.add_edge(t1, addr)
            if i < s:
                host.add_edge(addr, t2)
        for _ in range(n):
            addr = host.add_address()
            host.add_edge(t2, addr)

    for tx in decoy_txs:
        for _ in range(rng.randint(1, 3)):
            addr = host.add_address()
            host.add_edge(tx, addr)

    pattern = canonical_pattern(m, s, n).graph
    meta = {"m": m, "s": s, "n": n, "copies": copies, "decoys": decoys}
    return pattern, host, meta


@dataclass
class TheoremRun:
    checked: int = 0
    failures: list[tuple[int, str]] = field(default_factory=list)
    automorphism_sizes: set[int] = field(default_factory=set)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


def run_theorem_suite(seeds: int, base_seed: int = 0) -> TheoremRun:
    """Verify the counting identities on ``seeds`` random hosts."""
    run = TheoremRun()
    t0 = time.monotonic()
    for seed in range(base_seed, base_seed + seeds):
        pattern, host, meta = random_theorem_case(seed)
        report = verify_theorem1(pattern, host)
        run.checked += 1
        run.automorphism_sizes.add(report.automorphism_count)
        expect_lam = expected_automorphisms(meta["m"], meta["s"], meta["n"])
        if report.class_size != meta["copies"]:
            run.failures.append(
                (seed, f"found {report.class_size} copies, planted {meta['copies']}")
            )
        elif report.automorphism_count != expect_lam:
            run.failures.append(
                (seed, f"found {report.automorphism_count} automorphisms, expected {expect_lam}")
            )
        elif not report.passed:
            run.failures.append(
                (
                    seed,
                    f"identities failed: |E|={report.class_size} |L|={report.automorphism_count} "
                    f"|I|={report.isomorphism_count}",
                )
            )
    run.elapsed = time.monotonic() - t0
    return run
