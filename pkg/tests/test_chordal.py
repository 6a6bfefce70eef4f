import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skmod import (
    NotChordalError,
    TreeError,
    UndirectedGraph,
    aggregate,
    build_clique_tree,
    build_kig,
    clique_tree,
    cliques_rip,
    is_chordal,
    minimal_triangulation,
    mpd,
    perfect_elimination_order,
    undirected,
    verify_junction_tree,
)
from skmod.chordal import tree_to_dot, tree_to_json_dict

from .conftest import (
    chordal_by_simplicial_elimination,
    cluster_is_prime,
    random_connected_graph,
    undirected_graphs,
)


def gene_undirected(gene_net):
    return undirected(build_kig(gene_net))


# -- chordality -----------------------------------------------------------------


def test_four_cycle_not_chordal():
    g = UndirectedGraph("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    assert not is_chordal(g)
    assert perfect_elimination_order(g) is None


def test_triangle_chordal():
    g = UndirectedGraph(["g", "P2", "gP2"], [("g", "P2"), ("P2", "gP2"), ("g", "gP2")])
    assert is_chordal(g)


def test_gene_graph_not_chordal(gene_net):
    # Contains the chordless cycle g-R-P-P2.
    assert not is_chordal(gene_undirected(gene_net))


def test_empty_and_single_vertex_chordal():
    assert is_chordal(UndirectedGraph([], []))
    assert is_chordal(UndirectedGraph(["a"], []))


@given(undirected_graphs(max_n=8))
def test_chordality_matches_elimination_oracle(g):
    assert is_chordal(g) == chordal_by_simplicial_elimination(g)


# -- minimal triangulation ---------------------------------------------------------


def test_four_cycle_single_chord():
    g = UndirectedGraph("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    tri = minimal_triangulation(g)
    assert len(tri.fill_edges) == 1
    assert is_chordal(tri.result)


def test_chordal_graph_empty_fill():
    g = UndirectedGraph(["a", "b", "c"], [("a", "b"), ("b", "c")])
    tri = minimal_triangulation(g)
    assert tri.fill_edges == ()
    assert tri.result == g


def test_gene_fill_is_one_chord(gene_net):
    tri = minimal_triangulation(gene_undirected(gene_net))
    assert len(tri.fill_edges) == 1
    assert is_chordal(tri.result)


def test_triangulation_deterministic(gene_net):
    g = gene_undirected(gene_net)
    assert minimal_triangulation(g) == minimal_triangulation(g)


def _fill_is_minimal(tri) -> bool:
    for drop in tri.fill_edges:
        kept = [e for e in tri.fill_edges if e != drop]
        if is_chordal(tri.base.with_edges(kept)):
            return False
    return True


@given(undirected_graphs(max_n=8))
def test_triangulation_chordal_and_minimal(g):
    tri = minimal_triangulation(g)
    assert is_chordal(tri.result)
    assert set(tri.result.edges) == set(g.edges) | set(tri.fill_edges)
    assert _fill_is_minimal(tri)


# -- cliques in running intersection order ---------------------------------------------


def test_gene_cliques_with_chosen_chord(gene_net):
    # Triangulate the 4-cycle with the other admissible chord by hand.
    g = gene_undirected(gene_net).with_edges([("P", "g")])
    cliques = cliques_rip(g)
    assert {frozenset(c) for c in cliques} == {
        frozenset({"g", "R", "P"}),
        frozenset({"g", "P", "P2"}),
        frozenset({"g", "P2", "gP2"}),
    }


def test_complete_graph_single_clique():
    vs = "abcd"
    g = UndirectedGraph(vs, [(i, j) for i in vs for j in vs if i < j])
    assert cliques_rip(g) == (frozenset(vs),)


def test_disjoint_edges_ordered_with_empty_overlap():
    g = UndirectedGraph("abcd", [("a", "b"), ("c", "d")])
    cliques = cliques_rip(g)
    assert {frozenset(c) for c in cliques} == {frozenset("ab"), frozenset("cd")}
    tree = build_clique_tree(cliques)
    assert tree.separator(1, 2) == frozenset()


def test_cliques_reject_non_chordal():
    g = UndirectedGraph("abcd", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
    with pytest.raises(NotChordalError):
        cliques_rip(g)


def _rip_holds(cliques) -> bool:
    union = set()
    for e, c in enumerate(cliques):
        if e and not any(c & union <= cliques[d] for d in range(e)):
            return False
        union |= c
    return True


@given(undirected_graphs(max_n=8))
def test_cliques_are_maximal_and_rip_ordered(g):
    tri = minimal_triangulation(g)
    cliques = cliques_rip(tri.result)
    for c in cliques:
        assert tri.result.is_complete_on(c)
    for c in cliques:
        assert not any(c < other for other in cliques)
    assert _rip_holds(cliques)
    union = set()
    for c in cliques:
        union |= c
    assert union == set(g.vertices)


# -- clique tree -----------------------------------------------------------------------


def test_gene_clique_tree_separators(gene_net):
    g = gene_undirected(gene_net).with_edges([("P", "g")])
    tree = build_clique_tree(cliques_rip(g))
    seps = {frozenset(tree.separator(c, p)) for c, p in tree.edges()}
    assert seps == {frozenset({"g", "P"}), frozenset({"g", "P2"})}


def test_single_clique_tree():
    tree = build_clique_tree([frozenset("ab")])
    assert tree.edges() == ()
    assert tree.clusters == {1: frozenset("ab")}


def test_path_graph_tree():
    g = UndirectedGraph("abc", [("a", "b"), ("b", "c")])
    tree = build_clique_tree(cliques_rip(g))
    assert set(tree.clusters.values()) == {frozenset("ab"), frozenset("bc")}
    (child, parent), = tree.edges()
    assert tree.separator(child, parent) == frozenset("b")


def test_rip_violation_rejected():
    from skmod import RIPOrderError

    # {b,c} overlaps the union in {b,c}, which no single predecessor contains.
    with pytest.raises(RIPOrderError):
        build_clique_tree([frozenset("ab"), frozenset("cd"), frozenset("bc")])


# -- aggregation --------------------------------------------------------------------------


def test_gene_aggregate_to_mpd_clusters(gene_net):
    g = gene_undirected(gene_net)
    _, tree = clique_tree(g)
    merged = aggregate(tree, 1, 2)
    assert set(merged.clusters.values()) == {
        frozenset({"P", "R", "g", "P2"}),
        frozenset({"g", "P2", "gP2"}),
    }
    (child, parent), = merged.edges()
    assert merged.separator(child, parent) == frozenset({"g", "P2"})


def test_aggregate_two_cluster_tree():
    tree = build_clique_tree([frozenset("ab"), frozenset("bc")])
    merged = aggregate(tree, 1, 2)
    assert merged.clusters == {1: frozenset("abc")}
    assert merged.edges() == ()


def test_repeated_aggregation_reaches_full_set(gene_net):
    g = gene_undirected(gene_net)
    _, tree = clique_tree(g)
    while tree.edges():
        child, parent = tree.edges()[0]
        tree = aggregate(tree, parent, child)
    (cluster,) = tree.clusters.values()
    assert cluster == set(gene_net.species_ids)


def test_aggregate_requires_adjacency(gene_net):
    _, tree = clique_tree(gene_undirected(gene_net))
    with pytest.raises(TreeError):
        aggregate(tree, 1, 3)
    with pytest.raises(TreeError):
        aggregate(tree, 1, 1)
    with pytest.raises(TreeError):
        aggregate(tree, 1, 99)


def test_aggregate_is_order_insensitive(gene_net):
    _, tree = clique_tree(gene_undirected(gene_net))
    assert aggregate(tree, 1, 2) == aggregate(tree, 2, 1)


# -- maximal prime subgraph decomposition ----------------------------------------------------


def test_gene_mpd(gene_net):
    g = gene_undirected(gene_net)
    _, tree = clique_tree(g)
    t = mpd(tree, g)
    assert set(t.clusters.values()) == {
        frozenset({"P", "R", "g", "P2"}),
        frozenset({"g", "P2", "gP2"}),
    }


def test_mpd_of_chordal_graph_is_clique_tree():
    g = UndirectedGraph("abc", [("a", "b"), ("b", "c")])
    _, tree = clique_tree(g)
    assert mpd(tree, g) == tree


def test_mpd_rejects_wrong_cover():
    g = UndirectedGraph("abc", [("a", "b"), ("b", "c")])
    _, tree = clique_tree(g)
    other = UndirectedGraph("abcd", [("a", "b"), ("b", "c")])
    with pytest.raises(TreeError):
        mpd(tree, other)


@settings(max_examples=30)
@given(undirected_graphs(min_n=2, max_n=7, connected=True))
def test_mpd_clusters_are_prime(g):
    _, tree = clique_tree(g)
    t = mpd(tree, g)
    for cluster in t.clusters.values():
        assert cluster_is_prime(g, cluster)


# -- verification ------------------------------------------------------------------------------


def test_verify_gene_trees(gene_net):
    g = gene_undirected(gene_net)
    tri, tree = clique_tree(g)
    assert verify_junction_tree(tree, g, tri.result).passed
    assert verify_junction_tree(mpd(tree, g), g, tri.result).passed


def test_verify_flags_corrupted_cluster(gene_net):
    g = gene_undirected(gene_net)
    _, tree = clique_tree(g)
    # Shrink a cluster so an edge label no longer matches the side unions.
    broken = tree.with_cluster(2, tree.clusters[2] - {"P2"})
    report = verify_junction_tree(broken, g)
    assert not report.passed


def test_verify_flags_missing_coverage(gene_net):
    g = gene_undirected(gene_net)
    _, tree = clique_tree(g)
    broken = tree.with_cluster(3, frozenset({"g", "P2"}))
    report = verify_junction_tree(broken, g)
    assert not report.passed
    assert any(f.code == "tree-cover" for f in report.findings)


@settings(max_examples=30)
@given(undirected_graphs(min_n=2, max_n=7, connected=True), st.randoms(use_true_random=False))
def test_any_aggregation_sequence_stays_valid(g, rng):
    tri, tree = clique_tree(g)
    assert verify_junction_tree(tree, g, tri.result).passed
    while tree.edges():
        child, parent = rng.choice(tree.edges())
        tree = aggregate(tree, parent, child)
        assert verify_junction_tree(tree, g, tri.result).passed
        assert tree.vertex_union() == set(g.vertices)


def test_disconnected_graph_handled():
    g = UndirectedGraph("abcde", [("a", "b"), ("c", "d")])
    tri, tree = clique_tree(g)
    assert tree.vertex_union() == set("abcde")
    assert verify_junction_tree(tree, g, tri.result).passed
    t = mpd(tree, g)
    assert verify_junction_tree(t, g, tri.result).passed


# -- determinism and exports ----------------------------------------------------------------------


def test_pipeline_deterministic(gene_net):
    g = gene_undirected(gene_net)
    assert clique_tree(g)[1] == clique_tree(g)[1]
    rng = random.Random(5)
    for _ in range(20):
        h = random_connected_graph(rng, 6)
        assert clique_tree(h)[1] == clique_tree(h)[1]


def test_tree_json_shape(gene_net):
    g = gene_undirected(gene_net)
    _, tree = clique_tree(g)
    data = tree_to_json_dict(tree, gene_net.species_ids)
    assert data["root"] == 1
    assert {c["id"] for c in data["clusters"]} == set(tree.cluster_ids())
    for e in data["edges"]:
        assert set(e) == {"a", "b", "separator"}


def test_tree_dot_contains_separator_labels(gene_net):
    g = gene_undirected(gene_net)
    _, tree = clique_tree(g)
    t = mpd(tree, g)
    dot = tree_to_dot(t, gene_net.species_ids)
    assert 'label="g, P2"' in dot
    assert dot == tree_to_dot(t, gene_net.species_ids)
