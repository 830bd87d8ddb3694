import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from genlib import random_host
from gp2.graphs import (
    GraphError,
    HostGraph,
    HostLabel,
    IsoStore,
    Premorphism,
    is_label_preserving_morphism,
    isomorphic,
)
from gp2.parsing import parse_host_graph


def single(label=(0,)):
    g = HostGraph()
    g.add_node(HostLabel(label))
    return g


class TestLabels:
    def test_atoms_must_be_ints_or_strings(self):
        with pytest.raises(Exception):
            HostLabel((1.5,))

    def test_empty_list_distinct_from_empty_string(self):
        assert HostLabel(()) != HostLabel(("",))

    def test_mark_distinguishes(self):
        assert HostLabel((1,), True) != HostLabel((1,), False)


class TestDegree:
    def test_no_edges(self):
        g = HostGraph()
        n = g.add_node(HostLabel((0,)))
        assert g.degree(n, "in") == 0
        assert g.degree(n, "out") == 0

    def test_loop_counts_once_each_direction(self):
        g = HostGraph()
        n = g.add_node(HostLabel((0,)))
        g.add_edge(n, n, HostLabel(()))
        assert g.degree(n, "in") == 1
        assert g.degree(n, "out") == 1

    def test_parallel_edges(self):
        g = HostGraph()
        a = g.add_node(HostLabel((0,)))
        b = g.add_node(HostLabel((0,)))
        g.add_edge(a, b, HostLabel(()))
        g.add_edge(a, b, HostLabel(()))
        assert g.degree(b, "in") == 2
        assert g.degree(a, "out") == 2

    def test_unknown_node(self):
        with pytest.raises(GraphError):
            HostGraph().degree("nope", "in")

    @given(st.integers(0, 1000))
    @settings(max_examples=40, deadline=None)
    def test_degree_sums_equal_edge_count(self, seed):
        g = random_host(random.Random(seed))
        indeg = sum(g.degree(n, "in") for n in g.nodes)
        outdeg = sum(g.degree(n, "out") for n in g.nodes)
        assert indeg == outdeg == len(g.edges)


class TestStructure:
    def test_edge_endpoints_must_exist(self):
        g = HostGraph()
        n = g.add_node(HostLabel((0,)))
        with pytest.raises(GraphError):
            g.add_edge(n, "ghost", HostLabel(()))

    def test_remove_node_with_incident_edge_rejected(self):
        g = HostGraph()
        n = g.add_node(HostLabel((0,)))
        g.add_edge(n, n, HostLabel(()))
        with pytest.raises(GraphError):
            g.remove_node(n)

    def test_fresh_ids_skip_collisions(self):
        g = HostGraph()
        g.add_node(HostLabel((0,)), node_id="n1")
        other = g.add_node(HostLabel((1,)))
        assert other != "n1"
        assert other in g.nodes

    def test_copy_is_independent(self):
        g = HostGraph()
        n = g.add_node(HostLabel((0,)))
        h = g.copy()
        h.relabel_node(n, HostLabel((1,)))
        assert g.nodes[n] == HostLabel((0,))


class TestMorphisms:
    def test_identity_is_label_preserving(self):
        g = parse_host_graph('[ (n1, 0) (n2, 1) | (e1, n1, n2, "x") ]')
        ident = Premorphism({n: n for n in g.nodes}, {e: e for e in g.edges})
        assert is_label_preserving_morphism(ident, g, g)

    def test_label_mismatch(self):
        a = single((1,))
        b = single((2,))
        g = Premorphism({next(iter(a.nodes)): next(iter(b.nodes))}, {})
        assert not is_label_preserving_morphism(g, a, b)

    def test_permuted_triangle(self):
        a = parse_host_graph(
            "[ (n1, 1) (n2, 2) (n3, 3) |"
            " (e1, n1, n2, empty) (e2, n2, n3, empty) (e3, n3, n1, empty) ]"
        )
        b = parse_host_graph(
            "[ (m2, 2) (m3, 3) (m1, 1) |"
            " (f2, m2, m3, empty) (f3, m3, m1, empty) (f1, m1, m2, empty) ]"
        )
        g = Premorphism(
            {"n1": "m1", "n2": "m2", "n3": "m3"},
            {"e1": "f1", "e2": "f2", "e3": "f3"},
        )
        assert g.preserves_structure(a, b)
        assert is_label_preserving_morphism(g, a, b)


class TestIsomorphism:
    def test_reflexive(self):
        g = parse_host_graph('[ (n1, 0:1) (n2, "a" #) | (e1, n1, n2, 3) ]')
        assert isomorphic(g, g)

    def test_cardinality_mismatch(self):
        a = parse_host_graph("[ (n1, 0) (n2, 0) | ]")
        b = parse_host_graph("[ (n1, 0) (n2, 0) (n3, 0) | ]")
        assert not isomorphic(a, b)

    def test_four_cycles_with_permuted_ids(self):
        a = parse_host_graph(
            "[ (n1, 0) (n2, 0) (n3, 0) (n4, 0) |"
            " (e1, n1, n2, empty) (e2, n2, n3, empty)"
            " (e3, n3, n4, empty) (e4, n4, n1, empty) ]"
        )
        b = parse_host_graph(
            "[ (p3, 0) (p1, 0) (p4, 0) (p2, 0) |"
            " (q1, p2, p3, empty) (q2, p3, p4, empty)"
            " (q3, p4, p1, empty) (q4, p1, p2, empty) ]"
        )
        assert isomorphic(a, b)

    def test_direction_matters(self):
        a = parse_host_graph("[ (n1, 0) (n2, 1) | (e1, n1, n2, empty) ]")
        b = parse_host_graph("[ (n1, 0) (n2, 1) | (e1, n2, n1, empty) ]")
        assert not isomorphic(a, b)

    def test_parallel_edge_multiplicity(self):
        a = parse_host_graph(
            "[ (n1, 0) (n2, 0) | (e1, n1, n2, empty) (e2, n1, n2, empty) ]"
        )
        b = parse_host_graph(
            "[ (n1, 0) (n2, 0) | (e1, n1, n2, empty) (e2, n2, n1, empty) ]"
        )
        assert not isomorphic(a, b)

    @given(st.integers(0, 500))
    @settings(max_examples=30, deadline=None)
    def test_equivalence_relation(self, seed):
        rng = random.Random(seed)
        g = random_host(rng, max_nodes=5)
        h = random_host(rng, max_nodes=5)
        assert isomorphic(g, g)
        assert isomorphic(g, h) == isomorphic(h, g)

    def test_renamed_copy_is_isomorphic(self):
        rng = random.Random(9)
        g = random_host(rng, max_nodes=6)
        h = parse_host_graph(g.to_text())
        assert isomorphic(g, h)


class TestSerialization:
    @given(st.integers(0, 500))
    @settings(max_examples=40, deadline=None)
    def test_round_trip_preserves_ids_and_labels(self, seed):
        g = random_host(random.Random(seed))
        h = parse_host_graph(g.to_text())
        assert set(h.nodes) == set(g.nodes)
        assert h.nodes == g.nodes
        assert set(h.edges) == set(g.edges)
        for eid, e in g.edges.items():
            f = h.edges[eid]
            assert (f.source, f.target, f.label) == (e.source, e.target, e.label)

    def test_printer_is_fixpoint(self):
        text = '[ (n1, 0:1:2) (n2, "ok" #) | (e1, n1, n2, empty) ]'
        once = parse_host_graph(text).to_text()
        assert parse_host_graph(once).to_text() == once

    def test_string_escapes_round_trip(self):
        g = HostGraph()
        g.add_node(HostLabel(('say "hi" \\ there',)))
        h = parse_host_graph(g.to_text())
        assert h.nodes == g.nodes


class TestIsoStore:
    def test_put_deduplicates_up_to_iso(self):
        store = IsoStore()
        a = parse_host_graph("[ (n1, 0) (n2, 0) | (e1, n1, n2, empty) ]")
        b = parse_host_graph("[ (p1, 0) (p2, 0) | (q1, p2, p1, empty) ]")
        assert store.put(a)
        assert not store.put(b)
        assert len(store) == 1

    def test_get_set(self):
        store = IsoStore()
        a = parse_host_graph("[ (n1, 0) | ]")
        store.set(a, "payload")
        b = parse_host_graph("[ (other, 0) | ]")
        assert store.get(b) == "payload"
        assert store.get(parse_host_graph("[ (n1, 1) | ]")) is None
