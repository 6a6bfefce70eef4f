import itertools
import random
from importlib import resources

import pytest
from hypothesis import HealthCheck, assume, settings
from hypothesis import strategies as st

from skmod import (
    NetworkError,
    Reaction,
    ReactionNetwork,
    UndirectedGraph,
    parse_network,
    relay_network,
)

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
    deadline=None,
)
settings.load_profile("ci")


def fixture_text(name: str) -> str:
    return resources.files("skmod.data").joinpath(name).read_text()


@pytest.fixture(scope="session")
def gene_text() -> str:
    return fixture_text("gene_expression.rxn")


@pytest.fixture(scope="session")
def gene_net(gene_text) -> ReactionNetwork:
    return parse_network(gene_text)


@pytest.fixture(scope="session")
def relay_net() -> ReactionNetwork:
    return relay_network()


@pytest.fixture(scope="session")
def rbc_species() -> list[str]:
    lines = fixture_text("rbc_species.txt").splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]


# -- independent oracles -------------------------------------------------------


def separated_by_path_enumeration(g: UndirectedGraph, a, b, d) -> bool:
    """Exhaustive simple-path oracle: every path from a to b must contain a
    vertex of d.  Enumerates paths outright instead of deleting d."""
    a, b, d = set(a), set(b), set(d)
    verdict = True
    path: list[str] = []
    on_path: set[str] = set()

    def dfs(v: str) -> None:
        nonlocal verdict
        if not verdict:
            return
        path.append(v)
        on_path.add(v)
        if v in b:
            if not any(x in d for x in path):
                verdict = False
        else:
            for w in g.neighbors(v):
                if w not in on_path:
                    dfs(w)
        path.pop()
        on_path.discard(v)

    for s in sorted(a, key=g.index):
        dfs(s)
    return verdict


def chordal_by_simplicial_elimination(g: UndirectedGraph) -> bool:
    """Greedy simplicial-vertex elimination; succeeds exactly on chordal graphs."""
    adj = {v: set(g.neighbors(v)) for v in g.vertices}
    remaining = set(g.vertices)
    while remaining:
        simplicial = None
        for v in sorted(remaining):
            nb = adj[v] & remaining
            if all(u in adj[w] for u, w in itertools.combinations(nb, 2)):
                simplicial = v
                break
        if simplicial is None:
            return False
        remaining.discard(simplicial)
    return True


def cluster_is_prime(g: UndirectedGraph, cluster) -> bool:
    """Brute force over all three-way labelings of the cluster: prime means no
    labeling with both outer cells nonempty, a complete middle cell, and the
    outer cells separated by it in the induced subgraph."""
    vs = sorted(cluster, key=g.index)
    sub = g.induced(vs)
    if len(vs) <= 1:
        return True
    for labels in itertools.product("ABD", repeat=len(vs)):
        a = [v for v, l in zip(vs, labels) if l == "A"]
        b = [v for v, l in zip(vs, labels) if l == "B"]
        d = [v for v, l in zip(vs, labels) if l == "D"]
        if not a or not b:
            continue
        if not sub.is_complete_on(d):
            continue
        if separated_by_path_enumeration(sub, a, b, d):
            return False
    return True


def classes_by_pairwise_merge(net: ReactionNetwork, members, species):
    """Union-find grouping of reactions by equal net change on the species
    subset; an independent construction of the change-class partition."""
    members = sorted(members)
    species = sorted(set(species), key=net.index)
    parent = {m: m for m in members}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for m, m2 in itertools.combinations(members, 2):
        if net.sub_column(m, species) == net.sub_column(m2, species):
            parent[find(m2)] = find(m)
    groups: dict[int, set[int]] = {}
    for m in members:
        groups.setdefault(find(m), set()).add(m)
    return {frozenset(v) for v in groups.values()}


# -- random generators (seeded, for corpus-style tests) --------------------------


def random_connected_graph(rng: random.Random, n: int, extra_edges: int = 3) -> UndirectedGraph:
    vs = [f"v{i}" for i in range(n)]
    edges = set()
    for i in range(1, n):
        edges.add(tuple(sorted((vs[i], vs[rng.randrange(i)]))))
    pool = [
        (vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)
        if (vs[i], vs[j]) not in edges
    ]
    rng.shuffle(pool)
    edges.update(pool[: rng.randint(0, min(extra_edges, len(pool)))])
    return UndirectedGraph(vs, sorted(edges))


def random_network(rng: random.Random, n_species: int, n_reactions: int) -> ReactionNetwork:
    ids = [f"s{i}" for i in range(n_species)]
    while True:
        reactions = []
        for m in range(n_reactions):
            n_r = rng.choice([0, 1, 1, 2])
            n_p = rng.choice([1, 1, 2]) if n_r == 0 else rng.choice([0, 1, 1, 2])
            rs = rng.sample(ids, n_r)
            ps = rng.sample(ids, n_p)
            reactions.append(
                Reaction(
                    f"r{m}",
                    tuple((s, rng.choice([1, 1, 2])) for s in rs),
                    tuple((s, rng.choice([1, 1, 2])) for s in ps),
                )
            )
        try:
            return ReactionNetwork(ids, reactions)
        except NetworkError:
            continue


def synthetic_scale_network(species_ids, n_reactions: int = 38) -> ReactionNetwork:
    """Deterministic network at the red-blood-cell scale over the shipped
    species list.  A unary conversion chain covers every species; a handful of
    binary reactions add graph width.  Not the published reaction list, which
    is external data."""
    ids = list(species_ids)
    n = len(ids)
    reactions = []
    n_binary = 6
    for k in range(n_reactions - n_binary):
        reactions.append(
            Reaction(
                f"u{k}",
                ((ids[(2 * k) % n], 1),),
                ((ids[(2 * k + 1) % n], 1),),
            )
        )
    for k in range(n_binary):
        i = (5 * k + 1) % n
        reactions.append(
            Reaction(
                f"w{k}",
                ((ids[i], 1), (ids[(i + 7) % n], 1)),
                ((ids[(i + 3) % n], 1),),
            )
        )
    return ReactionNetwork(ids, reactions)


# -- hypothesis strategies ---------------------------------------------------------


@st.composite
def reaction_networks(draw, min_species=2, max_species=6, max_reactions=8):
    n = draw(st.integers(min_species, max_species))
    ids = [f"s{i}" for i in range(n)]
    m_count = draw(st.integers(1, max_reactions))
    reactions = []
    for m in range(m_count):
        reactants = draw(
            st.lists(
                st.tuples(st.sampled_from(ids), st.integers(1, 2)),
                min_size=0,
                max_size=2,
                unique_by=lambda t: t[0],
            )
        )
        products = draw(
            st.lists(
                st.tuples(st.sampled_from(ids), st.integers(1, 2)),
                min_size=0 if reactants else 1,
                max_size=2,
                unique_by=lambda t: t[0],
            )
        )
        reactions.append(Reaction(f"r{m}", tuple(reactants), tuple(products)))
    try:
        return ReactionNetwork(ids, reactions)
    except NetworkError:
        assume(False)


@st.composite
def networks_with_partition(draw, min_species=3, max_species=6, max_reactions=8):
    net = draw(reaction_networks(min_species, max_species, max_reactions))
    labels = draw(
        st.lists(st.sampled_from("ABD"), min_size=net.n, max_size=net.n)
    )
    assume(len(set(labels)) == 3)
    cells = {
        l: [s for s, lab in zip(net.species_ids, labels) if lab == l] for l in "ABD"
    }
    return net, cells["A"], cells["B"], cells["D"]


@st.composite
def undirected_graphs(draw, min_n=1, max_n=8, connected=False):
    n = draw(st.integers(min_n, max_n))
    vs = [f"v{i}" for i in range(n)]
    edges: set[tuple[str, str]] = set()
    if connected and n > 1:
        for i in range(1, n):
            j = draw(st.integers(0, i - 1))
            edges.add((vs[j], vs[i]))
    pool = [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)]
    if pool:
        extra = draw(st.lists(st.sampled_from(pool), max_size=2 * n, unique=True))
        edges.update(extra)
    return UndirectedGraph(vs, sorted(edges))
