import itertools

import pytest

from lgopt.graphs import (
    CertGraph,
    GraphError,
    UndirectedGraph,
    are_isomorphic,
    canonical_form,
    contract,
    dump_graph,
    is_isomorphic_subgraph,
    is_subgraph_of,
    load_graph,
    undirected_contractions,
    undirected_version,
)

ASSOC5 = CertGraph(5, frozenset({(2, 1), (2, 3), (3, 4), (5, 4)}))
PATH5 = UndirectedGraph(5, frozenset({(1, 2), (2, 3), (3, 4), (4, 5)}))


def test_undirected_version_of_associativity_graph_is_path():
    assert undirected_version(ASSOC5) == PATH5


def test_undirected_version_drops_self_loop():
    h = CertGraph(1, frozenset({(1, 1)}))
    assert undirected_version(h) == UndirectedGraph(1, frozenset())


def test_undirected_version_merges_bidirectional_pair():
    h = CertGraph(2, frozenset({(1, 2), (2, 1)}))
    assert undirected_version(h) == UndirectedGraph(2, frozenset({(1, 2)}))


def test_contract_merges_vertices_2_and_5():
    got = contract(ASSOC5, (1, 2, 3, 4, 2))
    assert got.k == 4
    assert got.edges == frozenset({(2, 1), (2, 3), (3, 4), (2, 4)})


def test_contract_identity_is_noop():
    assert contract(ASSOC5, (1, 2, 3, 4, 5)) == ASSOC5


def test_contract_edge_to_self_loop():
    h = CertGraph(2, frozenset({(1, 2)}))
    assert contract(h, (1, 1)) == CertGraph(1, frozenset({(1, 1)}))


def test_contract_rejects_non_surjective():
    with pytest.raises(GraphError):
        contract(ASSOC5, (1, 2, 3, 4, 6))
    with pytest.raises(GraphError):
        contract(CertGraph(2, frozenset({(1, 2)})), (1, 3))


def test_is_subgraph_of_examples():
    k3 = UndirectedGraph(3, frozenset({(1, 2), (2, 3), (1, 3)}))
    k2_padded = UndirectedGraph(3, frozenset({(1, 2)}))
    assert is_subgraph_of(k2_padded, k3)
    assert not is_subgraph_of(k3, k2_padded)
    cycle5 = UndirectedGraph(5, frozenset({(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)}))
    assert is_subgraph_of(PATH5, cycle5)


def test_is_subgraph_of_rejects_mismatched_kinds():
    with pytest.raises(GraphError):
        is_subgraph_of(PATH5, ASSOC5)


def test_is_subgraph_reflexive_transitive():
    graphs = []
    all_edges = list(itertools.combinations(range(1, 4), 2))
    for mask in range(8):
        edges = frozenset(e for b, e in enumerate(all_edges) if mask >> b & 1)
        graphs.append(UndirectedGraph(3, edges))
    for g in graphs:
        assert is_subgraph_of(g, g)
    for g1, g2, g3 in itertools.product(graphs, repeat=3):
        if is_subgraph_of(g1, g2) and is_subgraph_of(g2, g3):
            assert is_subgraph_of(g1, g3)


def test_canonical_form_relabelled_paths_equal():
    p1 = UndirectedGraph(3, frozenset({(1, 2), (2, 3)}))
    p2 = UndirectedGraph(3, frozenset({(1, 2), (1, 3)}))  # path centred at 1
    assert canonical_form(p1) == canonical_form(p2)


def test_canonical_form_k3_vs_path_distinct():
    k3 = UndirectedGraph(3, frozenset({(1, 2), (2, 3), (1, 3)}))
    p3 = UndirectedGraph(3, frozenset({(1, 2), (2, 3)}))
    assert canonical_form(k3) != canonical_form(p3)


def test_canonical_form_counts_all_3_vertex_graphs():
    # enumeration oracle: the 8 labelled graphs on 3 vertices fall in 4 classes
    all_edges = list(itertools.combinations(range(1, 4), 2))
    keys = set()
    for mask in range(8):
        edges = frozenset(e for b, e in enumerate(all_edges) if mask >> b & 1)
        keys.add(canonical_form(UndirectedGraph(3, edges)))
    assert len(keys) == 4


def test_canonical_form_rejects_large_k():
    with pytest.raises(GraphError):
        canonical_form(UndirectedGraph(9, frozenset()))


def _permute_undirected(h, perm):
    return UndirectedGraph(
        h.k, frozenset((perm[i - 1], perm[j - 1]) for i, j in h.edges)
    )


def _permute_directed(h, perm):
    return CertGraph(h.k, frozenset((perm[i - 1], perm[j - 1]) for i, j in h.edges))


def test_canonical_form_invariant_under_all_permutations():
    # exhaustive over permutations: all graphs for k <= 4, samples for k = 5
    for k in (1, 2, 3, 4):
        all_edges = list(itertools.combinations(range(1, k + 1), 2))
        for mask in range(1 << len(all_edges)):
            edges = frozenset(e for b, e in enumerate(all_edges) if mask >> b & 1)
            h = UndirectedGraph(k, edges)
            key = canonical_form(h)
            for perm in itertools.permutations(range(1, k + 1)):
                assert canonical_form(_permute_undirected(h, perm)) == key
    import random

    rng = random.Random(7)
    all_edges5 = list(itertools.combinations(range(1, 6), 2))
    for _ in range(6):
        edges = frozenset(e for e in all_edges5 if rng.random() < 0.4)
        h = UndirectedGraph(5, edges)
        key = canonical_form(h)
        for perm in itertools.permutations(range(1, 6)):
            assert canonical_form(_permute_undirected(h, perm)) == key
    key = canonical_form(ASSOC5)
    for perm in itertools.permutations(range(1, 6)):
        assert canonical_form(_permute_directed(ASSOC5, perm)) == key


def test_are_isomorphic_and_subgraph_embedding():
    p3a = UndirectedGraph(3, frozenset({(1, 2), (2, 3)}))
    p3b = UndirectedGraph(3, frozenset({(1, 3), (2, 3)}))
    assert are_isomorphic(p3a, p3b)
    k3 = UndirectedGraph(3, frozenset({(1, 2), (2, 3), (1, 3)}))
    assert is_isomorphic_subgraph(p3a, k3)
    assert not is_isomorphic_subgraph(k3, p3a)
    # smaller graph embeds with padding
    k2 = UndirectedGraph(2, frozenset({(1, 2)}))
    assert is_isomorphic_subgraph(k2, PATH5)


def test_undirected_contractions_contains_identity_and_point():
    ks = {canonical_form(g) for g in undirected_contractions(PATH5)}
    assert canonical_form(PATH5) in ks
    assert canonical_form(UndirectedGraph(1, frozenset())) in ks


def test_graph_json_roundtrip():
    for g in (PATH5, ASSOC5, UndirectedGraph(2, frozenset())):
        assert load_graph(dump_graph(g)) == g


def test_load_graph_rejects_garbage():
    with pytest.raises(GraphError):
        load_graph("not json")
    with pytest.raises(GraphError):
        load_graph('{"edges": []}')
    with pytest.raises(GraphError):
        load_graph('{"k": 2, "edges": [[1, 3]], "directed": false}')
