"""Kinetic independence graphs and separation queries.

The directed graph has the species as vertices; the parents of a species are
the reactants of all reactions that change it, the species itself excluded.
Separation of two groups by a third in the undirected version is the
graphical face of the toolkit's independence checks and is equivalent to a
purely chemical statement: neither group feeds, as a reactant, any reaction
that changes the other.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import GraphError, UnknownSpeciesError
from .network import ReactionNetwork, changed_reactions


def _canonical_pair(i: str, k: str, index: dict[str, int]) -> tuple[str, str]:
    return (i, k) if index[i] < index[k] else (k, i)


class DirectedGraph:
    def __init__(self, vertices: Sequence[str], edges: Iterable[tuple[str, str]]):
        self.vertices: tuple[str, ...] = tuple(vertices)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise GraphError("duplicate vertices")
        seen = set()
        for tail, head in edges:
            if tail not in self._index or head not in self._index:
                raise UnknownSpeciesError(f"edge ({tail!r}, {head!r}) uses unknown vertex")
            if tail == head:
                raise GraphError(f"loop edge on {tail!r} not allowed")
            seen.add((tail, head))
        self.edges: tuple[tuple[str, str], ...] = tuple(
            sorted(seen, key=lambda e: (self._index[e[0]], self._index[e[1]]))
        )
        self._parents: dict[str, list[str]] = {v: [] for v in self.vertices}
        self._children: dict[str, list[str]] = {v: [] for v in self.vertices}
        for tail, head in self.edges:
            self._parents[head].append(tail)
            self._children[tail].append(head)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownSpeciesError(f"unknown vertex {v!r}") from None

    def parents(self, v: str) -> tuple[str, ...]:
        self.index(v)
        return tuple(self._parents[v])

    def children(self, v: str) -> tuple[str, ...]:
        self.index(v)
        return tuple(self._children[v])

    def has_edge(self, tail: str, head: str) -> bool:
        return (tail, head) in set(self.edges)

    def to_json_dict(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}

    def to_dot(self, name: str = "kig") -> str:
        lines = [f"digraph {name} {{"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for tail, head in self.edges:
            lines.append(f'  "{tail}" -> "{head}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, DirectedGraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )


class UndirectedGraph:
    def __init__(self, vertices: Sequence[str], edges: Iterable[tuple[str, str]]):
        self.vertices: tuple[str, ...] = tuple(vertices)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        if len(self._index) != len(self.vertices):
            raise GraphError("duplicate vertices")
        seen = set()
        for i, k in edges:
            if i not in self._index or k not in self._index:
                raise UnknownSpeciesError(f"edge ({i!r}, {k!r}) uses unknown vertex")
            if i == k:
                raise GraphError(f"self-edge on {i!r} not allowed")
            seen.add(_canonical_pair(i, k, self._index))
        self.edges: tuple[tuple[str, str], ...] = tuple(
            sorted(seen, key=lambda e: (self._index[e[0]], self._index[e[1]]))
        )
        self._adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for i, k in self.edges:
            self._adj[i].add(k)
            self._adj[k].add(i)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise UnknownSpeciesError(f"unknown vertex {v!r}") from None

    def neighbors(self, v: str) -> tuple[str, ...]:
        self.index(v)
        return tuple(sorted(self._adj[v], key=self._index.__getitem__))

    def has_edge(self, i: str, k: str) -> bool:
        self.index(i), self.index(k)
        return k in self._adj[i]

    def degree(self, v: str) -> int:
        self.index(v)
        return len(self._adj[v])

    def with_edges(self, extra: Iterable[tuple[str, str]]) -> "UndirectedGraph":
        return UndirectedGraph(self.vertices, list(self.edges) + list(extra))

    def induced(self, subset: Iterable[str]) -> "UndirectedGraph":
        keep = set(subset)
        for v in keep:
            self.index(v)
        vertices = [v for v in self.vertices if v in keep]
        edges = [e for e in self.edges if e[0] in keep and e[1] in keep]
        return UndirectedGraph(vertices, edges)

    def is_complete_on(self, subset: Iterable[str]) -> bool:
        """True when the induced subgraph is complete; the empty and the
        singleton set count as complete."""
        vs = sorted(set(subset), key=self.index)
        return all(self.has_edge(vs[i], vs[j]) for i in range(len(vs)) for j in range(i + 1, len(vs)))

    def to_json_dict(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}

    def to_dot(self, name: str = "kig") -> str:
        lines = [f"graph {name} {{"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for i, k in self.edges:
            lines.append(f'  "{i}" -- "{k}";')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, UndirectedGraph)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )


# -- construction ------------------------------------------------------------


def build_kig(net: ReactionNetwork) -> DirectedGraph:
    """Directed graph with an edge i -> k for every reactant i of a reaction
    that changes k (loops excluded)."""
    edges: list[tuple[str, str]] = []
    for k in net.species_ids:
        parents = net.reactants_of(changed_reactions(net, [k])) - {k}
        edges.extend((i, k) for i in parents)
    return DirectedGraph(net.species_ids, edges)


def undirected(g: DirectedGraph) -> UndirectedGraph:
    return UndirectedGraph(g.vertices, g.edges)


def moralize(g: DirectedGraph) -> UndirectedGraph:
    """Marry all co-parents of each vertex, then drop directions."""
    extra: list[tuple[str, str]] = []
    for v in g.vertices:
        ps = g.parents(v)
        for i in range(len(ps)):
            for j in range(i + 1, len(ps)):
                extra.append((ps[i], ps[j]))
    return UndirectedGraph(g.vertices, list(g.edges) + extra)


def fraternize(net: ReactionNetwork, g: DirectedGraph) -> UndirectedGraph:
    """Undirected version plus an edge between any two species net-produced
    by a common reaction."""
    extra: list[tuple[str, str]] = []
    for m in range(net.M):
        produced = [s for s in net.species_ids if net.S[net.index(s), m] > 0]
        for i in range(len(produced)):
            for j in range(i + 1, len(produced)):
                extra.append((produced[i], produced[j]))
    return UndirectedGraph(g.vertices, list(g.edges) + extra)


# -- queries -----------------------------------------------------------------


def is_separated(
    g: UndirectedGraph,
    a: Iterable[str],
    b: Iterable[str],
    d: Iterable[str] = (),
) -> bool:
    """True iff every path from a to b passes through d.  Implemented as
    reachability after deleting d."""
    a, b, d = set(a), set(b), set(d)
    if not a or not b:
        raise GraphError("separation query requires nonempty groups on both sides")
    if a & b or a & d or b & d:
        raise GraphError("separation query requires disjoint species sets")
    for v in a | b | d:
        g.index(v)
    blocked = d
    queue = deque(v for v in a)
    seen = set(a)
    while queue:
        v = queue.popleft()
        if v in b:
            return False
        for w in g.neighbors(v):
            if w in blocked or w in seen:
                continue
            seen.add(w)
            queue.append(w)
    return True


def chemical_separated(
    net: ReactionNetwork,
    a: Iterable[str],
    b: Iterable[str],
    d: Iterable[str] = (),
) -> bool:
    """Separation computed from the reaction lists alone: two species are
    coupled when one is a reactant of a reaction changing the other, and the
    groups are separated when no coupling chain joins them without passing
    through d.  For a covering partition this reduces to 'neither group
    reacts into the other'."""
    a, b, d = set(a), set(b), set(d)
    if not a or not b:
        raise GraphError("separation query requires nonempty groups on both sides")
    if a & b or a & d or b & d:
        raise GraphError("separation query requires disjoint species sets")
    reactants = [net.reactant_set(m) for m in range(net.M)]
    changed = [net.changed_set(m) for m in range(net.M)]

    def coupled(i: str, k: str) -> bool:
        return any(
            (i in reactants[m] and k in changed[m])
            or (k in reactants[m] and i in changed[m])
            for m in range(net.M)
        )

    frontier = deque(a)
    seen = set(a)
    while frontier:
        v = frontier.popleft()
        if v in b:
            return False
        for w in net.species_ids:
            if w == v or w in d or w in seen:
                continue
            if coupled(v, w):
                seen.add(w)
                frontier.append(w)
    return True


def closure(g: DirectedGraph, b: Iterable[str]) -> tuple[str, ...]:
    """The group together with all its parents, in vertex order."""
    b = set(b)
    if not b:
        raise GraphError("closure requires a nonempty species subset")
    out = set(b)
    for v in b:
        out.update(g.parents(v))
    return tuple(v for v in g.vertices if v in out)


@dataclass(frozen=True)
class LocalIndependenceReport:
    """Which species a group's instantaneous evolution cannot depend on, and
    (for a full partition) the separation verdict in both the graphical and
    the chemical formulation."""

    group: tuple[str, ...]
    locally_independent_of: tuple[str, ...]
    graphical: Optional[bool] = None
    chemical: Optional[bool] = None

    @property
    def agree(self) -> Optional[bool]:
        if self.graphical is None or self.chemical is None:
            return None
        return self.graphical == self.chemical

    def to_json_dict(self) -> dict:
        return {
            "group": list(self.group),
            "locally_independent_of": list(self.locally_independent_of),
            "graphical": self.graphical,
            "chemical": self.chemical,
            "agree": self.agree,
        }


def local_independence_report(
    net: ReactionNetwork,
    g: DirectedGraph,
    b: Iterable[str],
    partition: Optional[tuple[Iterable[str], Iterable[str], Iterable[str]]] = None,
) -> LocalIndependenceReport:
    """Report the species outside the group's closure (irrelevant for its
    instantaneous evolution) and, when a partition [A, B, D] is supplied,
    the separation verdict computed two ways: graphically in the undirected
    graph, and chemically as 'neither side reacts into the other'."""
    b_set = set(b)
    cl = set(closure(g, b_set))
    rest = tuple(v for v in g.vertices if v not in cl)
    graphical = chemical = None
    if partition is not None:
        pa, pb, pd = (set(x) for x in partition)
        graphical = is_separated(undirected(g), pa, pb, pd)
        chemical = chemical_separated(net, pa, pb, pd)
    return LocalIndependenceReport(
        group=tuple(v for v in g.vertices if v in b_set),
        locally_independent_of=rest,
        graphical=graphical,
        chemical=chemical,
    )
