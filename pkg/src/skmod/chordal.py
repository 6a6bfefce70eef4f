"""Chordal-graph machinery and junction trees.

The decomposition pipeline runs: minimal triangulation of the undirected
graph, clique extraction in running-intersection order, a rooted clique tree,
and then coarsening by pairwise aggregation of adjacent clusters.  Repeatedly
aggregating across every separator whose induced subgraph is incomplete
yields the maximal prime subgraph decomposition.

Triangulation uses MCS-M (Berry, Blair, Heggernes, Peyton 2004): a maximum
cardinality search that adds a fill edge y-z whenever y can reach the current
vertex z through unnumbered vertices of strictly smaller weight.  The fill is
inclusion-minimal: removing any single added edge breaks chordality.

All tie-breaks are by vertex order (species index), so identical inputs give
byte-identical trees.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import NotChordalError, RIPOrderError, TreeError
from .graphs import UndirectedGraph
from .network import Finding, ValidationReport


# -- chordality --------------------------------------------------------------


def maximum_cardinality_search(g: UndirectedGraph) -> tuple[str, ...]:
    """Visit order of MCS: repeatedly take the unvisited vertex with the most
    visited neighbors, ties broken by vertex order."""
    weight = {v: 0 for v in g.vertices}
    unvisited = list(g.vertices)
    order: list[str] = []
    while unvisited:
        z = max(unvisited, key=lambda v: (weight[v], -g.index(v)))
        unvisited.remove(z)
        order.append(z)
        for y in g.neighbors(z):
            if y in unvisited:
                weight[y] += 1
    return tuple(order)


def perfect_elimination_order(g: UndirectedGraph) -> Optional[tuple[str, ...]]:
    """A perfect elimination ordering when the graph is chordal, else None.

    The reverse of an MCS visit order is a perfect elimination ordering
    exactly when one exists; validity is checked directly (the later
    neighbors of each vertex must form a clique)."""
    order = tuple(reversed(maximum_cardinality_search(g)))
    position = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [w for w in g.neighbors(v) if position[w] > position[v]]
        for i in range(len(later)):
            for j in range(i + 1, len(later)):
                if not g.has_edge(later[i], later[j]):
                    return None
    return order


def is_chordal(g: UndirectedGraph) -> bool:
    return perfect_elimination_order(g) is not None


# -- minimal triangulation ----------------------------------------------------


@dataclass(frozen=True)
class Triangulation:
    base: UndirectedGraph
    fill_edges: tuple[tuple[str, str], ...]
    result: UndirectedGraph


def minimal_triangulation(g: UndirectedGraph) -> Triangulation:
    """MCS-M minimal triangulation.  Deterministic: the search starts at the
    first vertex and breaks weight ties by vertex order."""
    weight = {v: 0 for v in g.vertices}
    unnumbered = list(g.vertices)
    fill: list[tuple[str, str]] = []
    while unnumbered:
        z = max(unnumbered, key=lambda v: (weight[v], -g.index(v)))
        unnumbered.remove(z)
        updates: list[str] = []
        for y in unnumbered:
            if g.has_edge(y, z):
                updates.append(y)
                continue
            # Reachability from y to z through unnumbered vertices whose
            # weight is strictly below y's, in the original graph.
            allowed = {v for v in unnumbered if weight[v] < weight[y]}
            stack = [y]
            seen = {y}
            found = False
            while stack and not found:
                v = stack.pop()
                for w in g.neighbors(v):
                    if w == z:
                        found = True
                        break
                    if w in allowed and w not in seen:
                        seen.add(w)
                        stack.append(w)
            if found:
                updates.append(y)
                fill.append((min(y, z, key=g.index), max(y, z, key=g.index)))
        for y in updates:
            weight[y] += 1
    fill.sort(key=lambda e: (g.index(e[0]), g.index(e[1])))
    return Triangulation(g, tuple(fill), g.with_edges(fill))


# -- cliques and running intersection order ------------------------------------


def _maximal_cliques(g: UndirectedGraph, peo: Sequence[str]) -> list[frozenset[str]]:
    position = {v: i for i, v in enumerate(peo)}
    candidates = []
    for v in peo:
        later = {w for w in g.neighbors(v) if position[w] > position[v]}
        candidates.append(frozenset({v} | later))
    return [c for c in candidates if not any(c < other for other in candidates)]


def cliques_rip(g: UndirectedGraph) -> tuple[frozenset[str], ...]:
    """Maximal cliques of a chordal graph, ordered so each clique's overlap
    with its predecessors is contained in a single predecessor.

    Greedy: start from the clique containing the first vertex of the MCS
    visit order, then repeatedly take the clique with the largest overlap
    with the union so far (ties by sorted vertex tuple).  The order is
    verified before being returned."""
    peo = perfect_elimination_order(g)
    if peo is None:
        raise NotChordalError("clique extraction requires a chordal graph")
    cliques = _maximal_cliques(g, peo)

    def sort_key(c: frozenset[str]) -> tuple[int, ...]:
        return tuple(sorted(g.index(v) for v in c))

    first_vertex = peo[-1]  # first visited by MCS
    containing = [c for c in cliques if first_vertex in c]
    ordered = [min(containing, key=sort_key)]
    remaining = [c for c in cliques if c is not ordered[0]]
    union = set(ordered[0])
    while remaining:
        nxt = min(remaining, key=lambda c: (-len(c & union), sort_key(c)))
        remaining.remove(nxt)
        ordered.append(nxt)
        union |= nxt
    _verify_rip(ordered)
    return tuple(ordered)


def _verify_rip(cliques: Sequence[frozenset[str]]) -> list[int]:
    """Return, for each clique after the first, the smallest predecessor index
    containing its overlap with all previous cliques.  Raises when none exists."""
    anchors: list[int] = []
    union: set[str] = set()
    for e, c in enumerate(cliques):
        if e == 0:
            union |= c
            continue
        overlap = c & union
        anchor = next(
            (d for d in range(e) if overlap <= cliques[d]),
            None,
        )
        if anchor is None:
            raise RIPOrderError(
                f"clique {sorted(c)} violates the running intersection property"
            )
        anchors.append(anchor)
        union |= c
    return anchors


# -- junction trees ------------------------------------------------------------


class JunctionTree:
    """Rooted cluster tree with separator-labeled edges.

    Cluster ids are stable: aggregation keeps the lower id and retires the
    higher one, so handles held by callers stay valid across revisions.
    Instances are immutable; every operation returns a new tree.
    """

    def __init__(self, clusters: Mapping[int, frozenset[str]], parent: Mapping[int, Optional[int]], root: int):
        self.clusters: dict[int, frozenset[str]] = {i: frozenset(c) for i, c in sorted(clusters.items())}
        self.parent: dict[int, Optional[int]] = dict(parent)
        self.root = root
        if set(self.parent) != set(self.clusters):
            raise TreeError("parent map does not match cluster ids")
        if self.parent.get(root, "missing") is not None:
            raise TreeError("root must have no parent")
        self._children: dict[int, list[int]] = {i: [] for i in self.clusters}
        for i, p in self.parent.items():
            if p is None:
                continue
            if p not in self.clusters:
                raise TreeError(f"cluster {i} has unknown parent {p}")
            self._children[p].append(i)
        for ch in self._children.values():
            ch.sort()
        # Reject cycles/disconnection: every cluster must reach the root.
        for i in self.clusters:
            seen = set()
            node: Optional[int] = i
            while node is not None:
                if node in seen:
                    raise TreeError("parent map contains a cycle")
                seen.add(node)
                node = self.parent[node]
            if self.root not in seen:
                raise TreeError("tree is not connected")

    # -- structure -------------------------------------------------------

    def cluster_ids(self) -> tuple[int, ...]:
        return tuple(self.clusters)

    def children(self, i: int) -> tuple[int, ...]:
        return tuple(self._children[i])

    def edges(self) -> tuple[tuple[int, int], ...]:
        """(child, parent) pairs in child-id order."""
        return tuple((i, p) for i, p in sorted(self.parent.items()) if p is not None)

    def separator(self, i: int, j: int) -> frozenset[str]:
        if not self.adjacent(i, j):
            raise TreeError(f"clusters {i} and {j} are not adjacent")
        return self.clusters[i] & self.clusters[j]

    def adjacent(self, i: int, j: int) -> bool:
        if i not in self.clusters or j not in self.clusters:
            raise TreeError(f"unknown cluster id in pair ({i}, {j})")
        return self.parent[i] == j or self.parent[j] == i

    def neighbors(self, i: int) -> tuple[int, ...]:
        out = list(self._children[i])
        if self.parent[i] is not None:
            out.append(self.parent[i])
        return tuple(sorted(out))

    def vertex_union(self) -> frozenset[str]:
        out: set[str] = set()
        for c in self.clusters.values():
            out |= c
        return frozenset(out)

    def path(self, i: int, j: int) -> tuple[int, ...]:
        def to_root(x: int) -> list[int]:
            out = [x]
            while self.parent[out[-1]] is not None:
                out.append(self.parent[out[-1]])
            return out

        pi, pj = to_root(i), to_root(j)
        common = set(pi) & set(pj)
        meet = next(x for x in pi if x in common)
        up = pi[: pi.index(meet) + 1]
        down = pj[: pj.index(meet)]
        return tuple(up + list(reversed(down)))

    def subtree_ids(self, start: int, blocked_edge: tuple[int, int]) -> frozenset[int]:
        """Cluster ids reachable from ``start`` without crossing the edge."""
        blocked = {tuple(sorted(blocked_edge))}
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in self.neighbors(v):
                if tuple(sorted((v, w))) in blocked or w in seen:
                    continue
                seen.add(w)
                stack.append(w)
        return frozenset(seen)

    def side_union(self, start: int, blocked_edge: tuple[int, int]) -> frozenset[str]:
        out: set[str] = set()
        for i in self.subtree_ids(start, blocked_edge):
            out |= self.clusters[i]
        return frozenset(out)

    def with_cluster(self, i: int, members: Iterable[str]) -> "JunctionTree":
        if i not in self.clusters:
            raise TreeError(f"unknown cluster id {i}")
        clusters = dict(self.clusters)
        clusters[i] = frozenset(members)
        return JunctionTree(clusters, self.parent, self.root)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, JunctionTree)
            and self.clusters == other.clusters
            and self.parent == other.parent
            and self.root == other.root
        )


def build_clique_tree(cliques: Sequence[frozenset[str]]) -> JunctionTree:
    """Rooted tree over a running-intersection-ordered clique list: the parent
    of each clique is the smallest predecessor containing its overlap with
    everything before it.  Cluster ids are 1-based list positions."""
    if not cliques:
        raise TreeError("cannot build a tree from an empty clique list")
    anchors = _verify_rip(list(cliques))
    clusters = {e + 1: frozenset(c) for e, c in enumerate(cliques)}
    parent: dict[int, Optional[int]] = {1: None}
    for e, anchor in enumerate(anchors, start=2):
        parent[e] = anchor + 1
    return JunctionTree(clusters, parent, root=1)


def aggregate(tree: JunctionTree, i: int, j: int) -> JunctionTree:
    """Merge two adjacent clusters into one, keeping the lower id.  The merged
    cluster takes the union of members, inherits the retained cluster's
    parent and adopts both clusters' children."""
    if i == j:
        raise TreeError("cannot aggregate a cluster with itself")
    if not tree.adjacent(i, j):
        raise TreeError(f"clusters {i} and {j} are not adjacent")
    i, j = min(i, j), max(i, j)
    if tree.parent[j] != i:
        # Parent ids precede child ids by construction, so an adjacent pair
        # with i < j always has i as the parent.
        raise TreeError(f"cluster ordering violated for pair ({i}, {j})")
    clusters = dict(tree.clusters)
    clusters[i] = clusters[i] | clusters.pop(j)
    parent = {k: v for k, v in tree.parent.items() if k != j}
    for k, p in list(parent.items()):
        if p == j:
            parent[k] = i
    return JunctionTree(clusters, parent, tree.root)


def mpd(tree: JunctionTree, g: UndirectedGraph) -> JunctionTree:
    """Aggregate across every separator whose induced subgraph in ``g`` is
    incomplete, until none remains.  Starting from the clique tree of a
    minimal triangulation of ``g``, the resulting clusters are the vertex
    sets of the maximal prime subgraphs of ``g``."""
    if tree.vertex_union() != set(g.vertices):
        raise TreeError("tree clusters do not cover the graph's vertex set")
    current = tree
    while True:
        incomplete = [
            (child, parent)
            for child, parent in current.edges()
            if not g.is_complete_on(current.separator(child, parent))
        ]
        if not incomplete:
            return current
        child, parent = incomplete[0]
        current = aggregate(current, parent, child)


def verify_junction_tree(
    tree: JunctionTree,
    g: UndirectedGraph,
    g_triangulated: Optional[UndirectedGraph] = None,
) -> ValidationReport:
    """Check the junction property, the edge labels, and for every edge that
    cutting it splits the vertex set into two sides that (a) intersect
    exactly in the label and (b) are graphically separated by it, in the
    triangulated graph when given and in the base graph."""
    findings: list[Finding] = []
    ids = tree.cluster_ids()

    if tree.vertex_union() != set(g.vertices):
        findings.append(
            Finding("tree-cover", "error", "tree clusters do not cover the vertex set")
        )
        return ValidationReport(tuple(findings))

    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            i, j = ids[x], ids[y]
            overlap = tree.clusters[i] & tree.clusters[j]
            if not overlap:
                continue
            for k in tree.path(i, j):
                if not overlap <= tree.clusters[k]:
                    findings.append(
                        Finding(
                            "junction-property",
                            "error",
                            f"intersection of clusters {i} and {j} is not contained in "
                            f"cluster {k} on their connecting path",
                        )
                    )

    for child, parent in tree.edges():
        sep = tree.clusters[child] & tree.clusters[parent]
        v_child = tree.side_union(child, (child, parent))
        v_parent = tree.side_union(parent, (child, parent))
        if v_child & v_parent != sep:
            findings.append(
                Finding(
                    "separator-identity",
                    "error",
                    f"edge ({child}, {parent}): side unions intersect in "
                    f"{sorted(v_child & v_parent)}, expected {sorted(sep)}",
                )
            )
            continue
        left = v_child - sep
        right = v_parent - sep
        if not left or not right:
            continue
        graphs = [("base", g)]
        if g_triangulated is not None:
            graphs.append(("triangulated", g_triangulated))
        from .graphs import is_separated

        for label, graph in graphs:
            if not is_separated(graph, left, right, sep):
                findings.append(
                    Finding(
                        "separation",
                        "error",
                        f"edge ({child}, {parent}): sides are not separated by the "
                        f"label in the {label} graph",
                    )
                )
    return ValidationReport(tuple(findings))


def clique_tree(g: UndirectedGraph) -> tuple[Triangulation, JunctionTree]:
    """Convenience pipeline: minimal triangulation, cliques in RIP order,
    rooted clique tree."""
    tri = minimal_triangulation(g)
    return tri, build_clique_tree(cliques_rip(tri.result))


# -- exports -------------------------------------------------------------------


def _sorted_members(g_order: Sequence[str], members: frozenset[str]) -> list[str]:
    position = {v: i for i, v in enumerate(g_order)}
    return sorted(members, key=position.__getitem__)


def tree_to_json_dict(tree: JunctionTree, vertex_order: Sequence[str]) -> dict:
    clusters = [
        {"id": i, "species": _sorted_members(vertex_order, c)}
        for i, c in tree.clusters.items()
    ]
    edges = [
        {
            "a": child,
            "b": parent,
            "separator": _sorted_members(vertex_order, tree.clusters[child] & tree.clusters[parent]),
        }
        for child, parent in tree.edges()
    ]
    return {"clusters": clusters, "edges": edges, "root": tree.root}


def tree_to_dot(tree: JunctionTree, vertex_order: Sequence[str], name: str = "junction_tree") -> str:
    lines = [f"graph {name} {{", "  node [shape=box];"]
    for i, c in tree.clusters.items():
        label = ", ".join(_sorted_members(vertex_order, c))
        lines.append(f'  c{i} [label="{label}"];')
    for child, parent in tree.edges():
        sep = ", ".join(_sorted_members(vertex_order, tree.clusters[child] & tree.clusters[parent]))
        lines.append(f'  c{parent} -- c{child} [label="{sep}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
