import io
import random

import pytest

from chainlet.clustering import (
    ClusterResult,
    UnionFind,
    cluster,
    expand_labels,
    format_conflicts,
    write_clusters_csv,
)

from helpers import tx


def assignments(*records):
    return cluster(list(records)).assignments


class TestUnionFind:
    def test_singletons_until_union(self):
        uf = UnionFind()
        uf.add("a")
        uf.add("b")
        assert uf.find("a") == "a"
        assert uf.find("b") == "b"
        assert uf.merges == 0

    def test_union_is_idempotent(self):
        uf = UnionFind()
        for k in "ab":
            uf.add(k)
        uf.union("a", "b")
        uf.union("b", "a")
        assert uf.merges == 1
        assert uf.find("a") == uf.find("b")

    def test_groups_are_sorted(self):
        uf = UnionFind()
        for k in "zyx":
            uf.add(k)
        uf.union("z", "x")
        groups = uf.groups()
        assert sorted(map(tuple, groups)) == [("x", "z"), ("y",)]


class TestCoSpending:
    def test_inputs_of_one_tx_merge(self):
        got = assignments(tx("t1", 0, ["A", "B"], ["C"]))
        assert got["A"] == got["B"] == "A"

    def test_outputs_stay_singletons(self):
        got = assignments(tx("t1", 0, ["A", "B"], ["C", "D"]))
        assert got["C"] == "C"
        assert got["D"] == "D"
        assert got["C"] != got["A"]

    def test_transition_closes_over_shared_address(self):
        # {A,B} spent together, then {B,C}: all three are one wallet.
        got = assignments(
            tx("t1", 0, ["A", "B"], ["x"]),
            tx("t2", 60, ["B", "C"], ["y"]),
        )
        assert got["A"] == got["B"] == got["C"] == "A"

    def test_cluster_id_is_smallest_member(self):
        got = assignments(tx("t1", 0, ["m", "d", "k"], ["x"]))
        assert got["m"] == got["d"] == got["k"] == "d"

    def test_single_input_merges_nothing(self):
        got = assignments(
            tx("t1", 0, ["A"], ["x"]),
            tx("t2", 60, ["B"], ["x"]),
        )
        assert got["A"] == "A"
        assert got["B"] == "B"

    def test_coinbase_contributes_only_outputs(self):
        res = cluster([tx("t1", 0, [], ["x", "y"])])
        assert res.assignments == {"x": "x", "y": "y"}


class TestResultInvariants:
    def test_counts_identity(self):
        res = cluster(
            [
                tx("t1", 0, ["A", "B"], ["C"]),
                tx("t2", 60, ["B", "D"], ["E"]),
                tx("t3", 120, ["F"], ["G"]),
            ]
        )
        assert res.address_count == 7
        assert res.cluster_count + res.merge_count == res.address_count

    def test_order_independent(self):
        records = [
            tx("t1", 0, ["A", "B"], ["p"]),
            tx("t2", 60, ["B", "C"], ["q"]),
            tx("t3", 120, ["D", "E", "F"], ["r"]),
            tx("t4", 180, ["C", "G"], ["s"]),
        ]
        base = cluster(records).assignments
        rng = random.Random(11)
        for _ in range(10):
            shuffled = records[:]
            rng.shuffle(shuffled)
            assert cluster(shuffled).assignments == base

    def test_random_streams_match_brute_closure(self):
        # Oracle: repeatedly merge any two groups sharing an address with
        # a common spending set until nothing changes.
        for seed in range(40):
            rng = random.Random(900 + seed)
            records = []
            for i in range(rng.randint(1, 25)):
                ins = rng.sample([f"a{j}" for j in range(12)], rng.randint(1, 4))
                outs = rng.sample([f"a{j}" for j in range(12, 20)], rng.randint(1, 3))
                records.append(tx(f"t{i}", i * 10, ins, outs))
            got = cluster(records).assignments

            groups = [set(r.input_set) for r in records]
            groups += [{a} for r in records for a, _ in r.outputs]
            changed = True
            while changed:
                changed = False
                for i in range(len(groups)):
                    for j in range(i + 1, len(groups)):
                        if groups[i] and groups[i] & groups[j]:
                            groups[i] |= groups[j]
                            groups[j] = set()
                            changed = True
            want = {}
            for g in groups:
                if not g:
                    continue
                rep = min(g)
                for a in g:
                    want[a] = rep
            assert got == want, f"seed {seed}"


class TestExpandLabels:
    def both(self, records, labels):
        res = cluster(records)
        return expand_labels(res, labels)

    def test_label_spreads_to_whole_cluster(self):
        out = self.both(
            [tx("t1", 0, ["A", "B"], ["x"]), tx("t2", 60, ["B", "C"], ["y"])],
            {"A": "RS"},
        )
        assert out.expanded == {"A": "RS", "B": "RS", "C": "RS"}
        assert out.conflicts == []

    def test_conflicting_cluster_reported_not_expanded(self):
        out = self.both(
            [tx("t1", 0, ["A", "B"], ["x"]), tx("t2", 60, ["B", "C"], ["y"])],
            {"A": "RS", "C": "DM"},
        )
        assert out.expanded == {}
        assert len(out.conflicts) == 1
        conflict = out.conflicts[0]
        assert conflict.cluster_id == "A"
        assert conflict.labels() == ("DM", "RS")
        assert conflict.members_by_label == {"RS": ("A",), "DM": ("C",)}

    def test_agreeing_labels_are_not_a_conflict(self):
        out = self.both(
            [tx("t1", 0, ["A", "B"], ["x"])],
            {"A": "RS", "B": "RS"},
        )
        assert out.expanded == {"A": "RS", "B": "RS"}
        assert out.conflicts == []

    def test_unseen_labelled_address_passes_through(self):
        out = self.both([tx("t1", 0, ["A"], ["x"])], {"zz": "DM"})
        assert out.expanded == {"zz": "DM"}

    def test_unlabelled_clusters_left_alone(self):
        out = self.both(
            [tx("t1", 0, ["A", "B"], ["x"]), tx("t2", 60, ["C"], ["y"])],
            {"A": "RS"},
        )
        assert "C" not in out.expanded
        assert "x" not in out.expanded


class TestOutput:
    def test_csv_is_sorted_and_stable(self):
        res = cluster([tx("t1", 0, ["b", "a"], ["c"])])
        buf = io.StringIO()
        n = write_clusters_csv(buf, res)
        assert n == 3
        assert buf.getvalue() == "address,cluster_id\na,a\nb,a\nc,c\n"

    def test_csv_to_path(self, tmp_path):
        res = cluster([tx("t1", 0, ["a"], ["b"])])
        path = tmp_path / "clusters.csv"
        write_clusters_csv(path, res)
        assert path.read_text().startswith("address,cluster_id\n")

    def test_conflict_text(self):
        res = cluster([tx("t1", 0, ["A", "B"], ["x"])])
        out = expand_labels(res, {"A": "RS", "B": "DM"})
        text = format_conflicts(out.conflicts)
        assert "1 label conflict(s)" in text
        assert "cluster A:" in text
        assert "DM: B" in text
        assert "RS: A" in text

    def test_no_conflict_text(self):
        assert format_conflicts([]) == "no label conflicts\n"
