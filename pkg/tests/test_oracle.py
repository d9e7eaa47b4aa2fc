import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import worked_example as example
from isoperturb import Permutation, aut_order, brute_force_iso, count_isos, verify_mapping
from isoperturb.graphs import complete, cycle, gnp, path, permuted_pair, torus
from isoperturb.oracle import OracleCapError, SearchStats


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(1, g.n + 1))
    h.add_edges_from(g.edges)
    return h


def test_example_substitutions(example_graphs):
    ga, gb = example_graphs
    assert count_isos(ga, gb) == 16
    assert str(brute_force_iso(ga, gb)) == example.SUBSTITUTIONS[0]
    found = {
        str(Permutation(tuple(m[v] for v in range(1, 7))))
        for m in nx.algorithms.isomorphism.GraphMatcher(to_nx(ga), to_nx(gb)).isomorphisms_iter()
    }
    assert found == set(example.SUBSTITUTIONS)


@pytest.mark.parametrize("g, order", [(path(3), 2), (cycle(5), 10), (complete(4), 24)])
def test_automorphism_orders(g, order):
    assert aut_order(g) == order


def test_cap_enforced():
    g = torus(3, 4)
    with pytest.raises(OracleCapError):
        count_isos(g, g)
    assert count_isos(g, g, cap=12) > 0
    # finding one mapping is not capped
    assert brute_force_iso(*permuted_pair(torus(4, 4), 3)[:2]) is not None


def test_stats_counted():
    stats = SearchStats()
    brute_force_iso(cycle(6), cycle(6), stats)
    assert stats.nodes_expanded >= 6 and stats.solutions_found == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 8), st.floats(0.1, 0.9), st.integers(0, 2**32), st.integers(0, 2**32))
def test_agrees_with_networkx(n, prob, s1, s2):
    g, h = gnp(n, prob, s1), gnp(n, prob, s2)
    phi = brute_force_iso(g, h)
    assert (phi is not None) == nx.is_isomorphic(to_nx(g), to_nx(h))
    if phi is not None:
        assert verify_mapping(g, h, phi)
