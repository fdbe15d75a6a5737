"""Exhaustive pattern matching on small typed graphs.

This module is the independent checking route for orbit extraction.  It
re-derives everything by brute force on an explicit graph object: which
transaction pairs form chainlet occurrences, which addresses hold which
role, and the combinatorics of isomorphic copies.  Nothing here reuses
the snapshot indexes the production extractor runs on.

Hosts are capped at 64 nodes.  Everything is exponential in principle
and meant for verification, not throughput.

Two matching notions live here and must not be confused:

* find_occurrences enumerates strict embeddings: injective on nodes,
  edge relations preserved in both directions, transaction output sets
  fully covered.  These are the honest isomorphic copies the group
  counting identities reason about.

* oracle_orbit_counts reads roles off relaxed per-pair embeddings that
  allow one host address to fill roles on both sides of the pair (a
  transaction can pay an address it also spends from), matching how the
  role rules treat positions rather than nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable, Iterator

from .chainlets import clamp3
from .errors import UsageError
from .graph import AddressId, DailySnapshot
from .orbits import DORMANT_ORBIT, FAMILY_ORBITS

MAX_NODES = 64

ADDRESS = "a"
TRANSACTION = "t"


class SizeLimitError(UsageError):
    """The graph exceeds the 64 node cap."""


class PatternShapeError(UsageError):
    """A pattern graph is not a well-formed reduced 2-chainlet."""


class SmallGraph:
    """Typed directed graph: address and transaction nodes only.

    Edges run address -> transaction (spend) or transaction -> address
    (payment); same-type edges are rejected.  Transactions carry a total
    order given by creation sequence, standing in for time.
    """

    __slots__ = ("_types", "_out", "_in", "_tx_nodes")

    def __init__(self) -> None:
        self._types: list[str] = []
        self._out: list[set[int]] = []
        self._in: list[set[int]] = []
        self._tx_nodes: list[int] = []

    def _add_node(self, kind: str) -> int:
        if len(self._types) >= MAX_NODES:
            raise SizeLimitError(f"small graphs are capped at {MAX_NODES} nodes")
        self._types.append(kind)
        self._out.append(set())
        self._in.append(set())
        return len(self._types) - 1

    def add_address(self) -> int:
        return self._add_node(ADDRESS)

    def add_transaction(self) -> int:
        node = self._add_node(TRANSACTION)
        self._tx_nodes.append(node)
        return node

    def add_edge(self, src: int, dst: int) -> None:
        if self._types[src] == self._types[dst]:
            raise UsageError("edges must connect an address with a transaction")
        self._out[src].add(dst)
        self._in[dst].add(src)

    def __len__(self) -> int:
        return len(self._types)

    def is_transaction(self, node: int) -> bool:
        return self._types[node] == TRANSACTION

    def out_nbrs(self, node: int) -> frozenset[int]:
        return frozenset(self._out[node])

    def in_nbrs(self, node: int) -> frozenset[int]:
        return frozenset(self._in[node])

    def has_edge(self, src: int, dst: int) -> bool:
        return dst in self._out[src]

    def tx_nodes(self) -> tuple[int, ...]:
        """Transaction nodes in their total order."""
        return tuple(self._tx_nodes)

    def address_nodes(self) -> tuple[int, ...]:
        return tuple(n for n, k in enumerate(self._types) if k == ADDRESS)

    def tx_rank(self, node: int) -> int:
        return self._tx_nodes.index(node)

    @classmethod
    def from_snapshot(cls, snapshot: DailySnapshot) -> tuple["SmallGraph", dict[int, AddressId]]:
        """Graph view of a snapshot plus the node-to-address mapping.

        Transaction nodes are created in snapshot position order, so the
        graph's transaction order equals the window's (timestamp, tx_id)
        order.  Raises SizeLimitError past 64 nodes.
        """
        graph = cls()
        tx_node_of_pos = [graph.add_transaction() for _ in range(len(snapshot))]
        node_of_addr: dict[AddressId, int] = {}
        addr_of_node: dict[int, AddressId] = {}
        for addr in sorted(snapshot.addresses()):
            node = graph.add_address()
            node_of_addr[addr] = node
            addr_of_node[node] = addr
        for pos, tx_node in enumerate(tx_node_of_pos):
            for addr in snapshot.in_sets[pos]:
                graph.add_edge(node_of_addr[addr], tx_node)
            for addr in snapshot.out_sets[pos]:
                graph.add_edge(tx_node, node_of_addr[addr])
        return graph, addr_of_node


@dataclass(frozen=True)
class PatternSpec:
    """A canonical chainlet shape with its role labelling."""

    graph: SmallGraph
    t1: int
    t2: int | None
    spender_slots: tuple[int, ...]
    sibling_slots: tuple[int, ...]
    output_slots: tuple[int, ...]
    orbits: dict[int, int] = field(default_factory=dict)


def canonical_pattern(m: int, s: int, n: int) -> PatternSpec:
    """Reduced 2-chainlet pattern for shape (M, S, N) with orbit labels."""
    if (m, s, n) not in FAMILY_ORBITS:
        raise UsageError(f"no orbit family for shape {(m, s, n)}")
    spender_orb, sibling_orb, output_orb = FAMILY_ORBITS[(m, s, n)]
    graph = SmallGraph()
    t1 = graph.add_transaction()
    t2 = graph.add_transaction()
    spenders = []
    siblings = []
    outputs = []
    orbits: dict[int, int] = {}
    for i in range(m):
        node = graph.add_address()
        graph.add_edge(t1, node)
        if i < s:
            graph.add_edge(node, t2)
            spenders.append(node)
            orbits[node] = spender_orb
        else:
            siblings.append(node)
            assert sibling_orb is not None
            orbits[node] = sibling_orb
    for _ in range(n):
        node = graph.add_address()
        graph.add_edge(t2, node)
        outputs.append(node)
        orbits[node] = output_orb
    return PatternSpec(
        graph=graph,
        t1=t1,
        t2=t2,
        spender_slots=tuple(spenders),
        sibling_slots=tuple(siblings),
        output_slots=tuple(outputs),
        orbits=orbits,
    )


def dormant_pattern(m: int) -> PatternSpec:
    """Single-transaction pattern whose outputs rest unspent."""
    if m not in DORMANT_ORBIT:
        raise UsageError(f"no dormant orbit for output count {m}")
    graph = SmallGraph()
    t1 = graph.add_transaction()
    slots = []
    orbits: dict[int, int] = {}
    for _ in range(m):
        node = graph.add_address()
        graph.add_edge(t1, node)
        slots.append(node)
        orbits[node] = DORMANT_ORBIT[m]
    return PatternSpec(
        graph=graph,
        t1=t1,
        t2=None,
        spender_slots=(),
        sibling_slots=(),
        output_slots=tuple(slots),
        orbits=orbits,
    )


def _pattern_roles(pattern: SmallGraph) -> tuple[int, int, tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Validate a reduced 2-chainlet pattern and split its address slots."""
    txs = pattern.tx_nodes()
    if len(txs) != 2:
        raise PatternShapeError("pattern must contain exactly two transactions")
    t1, t2 = txs
    if pattern.in_nbrs(t1):
        raise PatternShapeError("the first transaction of a pattern cannot have inputs")
    out1 = pattern.out_nbrs(t1)
    out2 = pattern.out_nbrs(t2)
    in2 = pattern.in_nbrs(t2)
    if not out1 or not out2:
        raise PatternShapeError("both transactions must pay at least one address")
    if not in2 or not in2 <= out1:
        raise PatternShapeError("the second transaction must spend outputs of the first")
    for node in pattern.address_nodes():
        touches = pattern.out_nbrs(node) | pattern.in_nbrs(node)
        if not touches or not touches <= {t1, t2}:
            raise PatternShapeError("pattern addresses may only touch its two transactions")
        if node not in out1 and node not in out2:
            raise PatternShapeError("pattern addresses must be outputs of one of its transactions")
        if node in out1 and node in out2:
            raise PatternShapeError("pattern output sets must be disjoint")
    spenders = tuple(sorted(in2))
    siblings = tuple(sorted(out1 - in2))
    outputs = tuple(sorted(out2))
    return t1, t2, spenders, siblings, outputs


def find_occurrences(pattern: SmallGraph, host: SmallGraph) -> list[dict[int, int]]:
    """Every strict embedding of a reduced 2-chainlet pattern in a host.

    An embedding maps pattern nodes to host nodes injectively, preserves
    node types, preserves presence and absence of edges between mapped
    nodes, keeps the transaction order, and covers the mapped
    transactions' output sets completely.  The list enumerates every
    slot permutation, so a single copy appears once per automorphism.
    """
    if len(host) > MAX_NODES:
        raise SizeLimitError(f"host exceeds the {MAX_NODES} node cap")
    t1, t2, p_spenders, p_siblings, p_outputs = _pattern_roles(pattern)
    m, s, n = len(p_spenders) + len(p_siblings), len(p_spenders), len(p_outputs)

    results: list[dict[int, int]] = []
    host_txs = host.tx_nodes()
    for rank1, h1 in enumerate(host_txs):
        hout1 = host.out_nbrs(h1)
        if len(hout1) != m:
            continue
        for h2 in host_txs[rank1 + 1 :]:
            hout2 = host.out_nbrs(h2)
            if len(hout2) != n:
                continue
            hin2 = host.in_nbrs(h2)
            # induced edge conditions against the two mapped transactions
            spender_cands = [
                x for x in sorted(hout1 & hin2) if x not in hout2 and x not in host.in_nbrs(h1)
            ]
            sibling_cands = [
                x for x in sorted(hout1 - hin2) if x not in hout2 and x not in host.in_nbrs(h1)
            ]
            output_cands = [
                x for x in sorted(hout2) if x not in hin2 and x not in hout1 and x not in host.in_nbrs(h1)
            ]
            if len(spender_cands) != s or len(sibling_cands) != m - s or len(output_cands) != n:
                # covering hout1 and hout2 injectively is impossible
                continue
            for sp in permutations(spender_cands, s):
                for sb in permutations(sibling_cands, m - s):
                    for op in permutations(output_cands, n):
                        mapping = {t1: h1, t2: h2}
                        mapping.update(zip(p_spenders, sp))
                        mapping.update(zip(p_siblings, sb))
                        mapping.update(zip(p_outputs, op))
                        results.append(mapping)
    return results


def automorphisms(pattern: SmallGraph) -> list[dict[int, int]]:
    """All automorphisms of a pattern; transactions are always fixed."""
    autos = find_occurrences(pattern, pattern)
    txs = pattern.tx_nodes()
    for auto in autos:
        for tx in txs:
            if auto[tx] != tx:
                raise AssertionError("automorphism moved a transaction node")
    return autos


def _induced_chainlet(host: SmallGraph, h1: int, h2: int) -> tuple[SmallGraph, dict[int, int]]:
    """Copy of the full chainlet on (h1, h2) plus local-to-host mapping."""
    sub = SmallGraph()
    l1 = sub.add_transaction()
    l2 = sub.add_transaction()
    to_host = {l1: h1, l2: h2}
    local: dict[int, int] = {}
    for x in sorted(host.out_nbrs(h1) | host.out_nbrs(h2)):
        node = sub.add_address()
        local[x] = node
        to_host[node] = x
    for x, node in local.items():
        if host.has_edge(h1, x):
            sub.add_edge(l1, node)
        if host.has_edge(h2, x):
            sub.add_edge(l2, node)
        if host.has_edge(x, h2):
            sub.add_edge(node, l2)
    return sub, to_host


@dataclass(frozen=True)
class TheoremReport:
    """Exhaustive check of the copy-counting identities for one class.

    With E the copies of the pattern in the host, Lambda its
    automorphisms, I all isomorphisms between ordered copy pairs, O_u
    the images a base-copy node takes across all isomorphisms and S(u)
    its stabilizer, the identities checked are:

        |I| = |E|^2 * |Lambda|
        |O_u| * |S(u)| = |E| * |Lambda|    for every base-copy node u

    All quantities are obtained by plain enumeration.
    """

    class_size: int
    automorphism_count: int
    isomorphism_count: int
    node_orbit_sizes: dict[int, int]
    node_stabilizer_sizes: dict[int, int]
    passed: bool


def verify_theorem1(pattern: SmallGraph, host: SmallGraph) -> TheoremReport:
    """Check both identities exactly; see TheoremReport."""
    embeddings = find_occurrences(pattern, host)
    lam = len(automorphisms(pattern))

    anchors: dict[tuple[int, int], int] = {}
    for emb in embeddings:
        txs = pattern.tx_nodes()
        key = (emb[txs[0]], emb[txs[1]])
        anchors[key] = anchors.get(key, 0) + 1
    class_size = len(anchors)
    ordered_anchors = sorted(anchors)

    copies = [_induced_chainlet(host, h1, h2) for h1, h2 in ordered_anchors]

    iso_total = 0
    for sub_i, _ in copies:
        for sub_j, _ in copies:
            iso_total += len(find_occurrences(sub_i, sub_j))

    node_orbit_sizes: dict[int, int] = {}
    node_stab_sizes: dict[int, int] = {}
    per_node_ok = True
    if copies:
        base, base_to_host = copies[0]
        base_autos = find_occurrences(base, base)
        images: dict[int, set[int]] = {node: set() for node in range(len(base))}
        for sub_j, j_to_host in copies:
            for iso in find_occurrences(base, sub_j):
                for node, local_img in iso.items():
                    images[node].add(j_to_host[local_img])
        for node in range(len(base)):
            stab = sum(1 for auto in base_autos if auto[node] == node)
            host_node = base_to_host[node]
            node_orbit_sizes[host_node] = len(images[node])
            node_stab_sizes[host_node] = stab
            if len(images[node]) * stab != class_size * lam:
                per_node_ok = False

    passed = iso_total == class_size * class_size * lam and per_node_ok
    return TheoremReport(
        class_size=class_size,
        automorphism_count=lam,
        isomorphism_count=iso_total,
        node_orbit_sizes=node_orbit_sizes,
        node_stabilizer_sizes=node_stab_sizes,
        passed=passed,
    )


def _role_support(
    host: SmallGraph, u1: int, u2: int, m: int, s: int, n: int
) -> frozenset[tuple[int, int]]:
    """(node, role) pairs realized by relaxed embeddings at one anchor.

    Role indexes: 0 spender, 1 sibling, 2 output.  Empty when the pair's
    clamped shape is not exactly (M, S, N).
    """
    out1 = host.out_nbrs(u1)
    out2 = host.out_nbrs(u2)
    in2 = host.in_nbrs(u2)
    if clamp3(len(out1)) != m or clamp3(len(out2)) != n:
        return frozenset()
    spender_cands = sorted(out1 & in2)
    sibling_cands = sorted(out1 - in2)
    if not spender_cands:
        return frozenset()
    if sibling_cands:
        if s != min(clamp3(len(spender_cands)), m - 1):
            return frozenset()
    else:
        if s != m:
            return frozenset()

    support: set[tuple[int, int]] = set()
    for sp in permutations(spender_cands, s):
        for sb in permutations(sibling_cands, m - s):
            for op in permutations(sorted(out2), n):
                support.update((node, 0) for node in sp)
                support.update((node, 1) for node in sb)
                support.update((node, 2) for node in op)
    return frozenset(support)


def _dormant_support(host: SmallGraph, txs: tuple[int, ...], rank1: int, m: int) -> frozenset[int]:
    u1 = txs[rank1]
    out1 = host.out_nbrs(u1)
    if clamp3(len(out1)) != m:
        return frozenset()
    for u2 in txs[rank1 + 1 :]:
        if out1 & host.in_nbrs(u2):
            return frozenset()
    support: set[int] = set()
    for combo in permutations(sorted(out1), m):
        support.update(combo)
    return frozenset(support)


def oracle_orbit_counts(host: SmallGraph) -> dict[int, dict[int, int]]:
    """Per-node orbit counts derived purely from pattern embeddings.

    For every transaction pair and every canonical shape, enumerate the
    role embeddings, collect which nodes support which role, and count
    one occurrence per anchor.  Dormant shapes are handled the same way
    over single transactions.  Matches the production extractor on any
    host within the size cap.
    """
    if len(host) > MAX_NODES:
        raise SizeLimitError(f"host exceeds the {MAX_NODES} node cap")
    txs = host.tx_nodes()
    counts: dict[int, dict[int, int]] = {}

    def bump(node: int, orbit: int) -> None:
        inner = counts.setdefault(node, {})
        inner[orbit] = inner.get(orbit, 0) + 1

    for (m, s, n), (spender_orb, sibling_orb, output_orb) in sorted(FAMILY_ORBITS.items()):
        role_orbits = (spender_orb, sibling_orb, output_orb)
        for rank1, u1 in enumerate(txs):
            for u2 in txs[rank1 + 1 :]:
                for node, role in sorted(_role_support(host, u1, u2, m, s, n)):
                    orbit = role_orbits[role]
                    assert orbit is not None
                    bump(node, orbit)

    for m in sorted(DORMANT_ORBIT):
        for rank1 in range(len(txs)):
            for node in sorted(_dormant_support(host, txs, rank1, m)):
                bump(node, DORMANT_ORBIT[m])

    return counts
