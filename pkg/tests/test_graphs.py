import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from perturb3 import graphs
from perturb3.acceptance import brute_certificate, naive_diagram_count
from perturb3.graphs import GraphError, MultiGraph


def random_graph(seed, max_vertices=5, max_extra=3):
    return graphs.random_connected_multigraph(random.Random(seed), max_vertices, max_extra)


def relabel(g, seed):
    rng = random.Random(seed)
    vp = list(range(g.vertex_count))
    rng.shuffle(vp)
    edges = [(vp[t], vp[h]) for t, h in g.edges]
    edges = [(h, t) if rng.random() < 0.5 else (t, h) for t, h in edges]
    rng.shuffle(edges)
    return MultiGraph(g.vertex_count, tuple(edges), g.allow_self_loops)


def brute_aut_count(g):
    m = [[0] * g.vertex_count for _ in range(g.vertex_count)]
    for t, h in g.edges:
        m[t][h] += 1
        if t != h:
            m[h][t] += 1
    total = 0
    for p in itertools.permutations(range(g.vertex_count)):
        if all(m[p[a]][p[b]] == m[a][b] for a in range(g.vertex_count) for b in range(g.vertex_count)):
            total += 1
    extra = 1
    for a in range(g.vertex_count):
        extra *= math.factorial(m[a][a]) * 2 ** m[a][a]
        for b in range(a + 1, g.vertex_count):
            extra *= math.factorial(m[a][b])
    return total * extra


def brute_two_connected(g, subset):
    subset = set(subset)
    if not subset:
        return False
    if any(g.edges[i][0] == g.edges[i][1] for i in subset):
        return len(subset) == 1
    verts = {v for i in subset for v in g.edges[i]}

    def connected(vs, es):
        if not vs:
            return True
        start = next(iter(vs))
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for i in es:
                t, h = g.edges[i]
                for a, b in ((t, h), (h, t)):
                    if a == x and b not in seen:
                        seen.add(b)
                        stack.append(b)
        return seen == vs

    if not connected(verts, subset):
        return False
    if len(verts) <= 2:
        return True
    for v in verts:
        rest = {i for i in subset if v not in g.edges[i]}
        if not connected(verts - {v}, rest):
            return False
    return True


def test_named_automorphism_counts():
    assert len(graphs.automorphisms(graphs.theta())) == 12
    assert len(graphs.automorphisms(graphs.tetrahedron())) == 24
    assert len(graphs.automorphisms(MultiGraph(2, ((0, 1),)))) == 2
    assert len(graphs.automorphisms(graphs.double_theta())) == 16


@given(st.integers(0, 10**6))
def test_automorphism_count_matches_brute_force(seed):
    g = random_graph(seed)
    autos = graphs.automorphisms(g)
    assert len(autos) == brute_aut_count(g)
    assert all(a.is_valid(g, g) for a in autos)


@given(st.integers(0, 10**6))
def test_automorphisms_closed_under_composition(seed):
    g = random_graph(seed, 4, 2)
    autos = graphs.automorphisms(g)
    listed = set(autos)
    for a in autos[:6]:
        assert a.inverse() in listed
        for b in autos[:6]:
            assert a.compose(b) in listed


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_canonical_form_invariant_and_idempotent(seed, seed2):
    g = random_graph(seed)
    h = relabel(g, seed2)
    cg, iso = graphs.canonical_form(g)
    ch, _ = graphs.canonical_form(h)
    assert cg == ch
    assert graphs.canonical_form(cg)[0] == cg
    assert iso.is_valid(g, cg)
    assert graphs.is_isomorphic(g, h)


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_certificate_agrees_with_brute_force(seed, seed2):
    a, b = random_graph(seed, 4), random_graph(seed2, 4)
    same = brute_certificate(a) == brute_certificate(b) and a.edge_count == b.edge_count
    assert graphs.is_isomorphic(a, b) == same


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_isomorphisms_are_valid(seed, seed2):
    g = random_graph(seed, 4, 2)
    h = relabel(g, seed2)
    isos = list(graphs.isomorphisms(g, h))
    assert len(isos) == len(graphs.automorphisms(g))
    assert all(x.is_valid(g, h) for x in isos)


def test_theta_two_connected_subsets():
    subs = graphs.two_connected_subgraphs(graphs.theta())
    assert len(subs) == 7


@given(st.integers(0, 10**6))
def test_two_connected_subsets_exhaustive(seed):
    g = random_graph(seed, 5, 3)
    assert g.edge_count <= 8
    found = set(graphs.two_connected_subgraphs(g))
    for mask in range(1, 1 << g.edge_count):
        s = frozenset(i for i in range(g.edge_count) if mask >> i & 1)
        assert (s in found) == brute_two_connected(g, s), s


@given(st.integers(0, 10**6))
def test_cactus_lobes_form_a_tree(seed):
    g = random_graph(seed, 6, 4)
    c = graphs.cactus_decomposition(g, range(g.edge_count))
    assert frozenset().union(*c.lobes) == frozenset(range(g.edge_count))
    for a, b in itertools.combinations(c.lobes, 2):
        assert len(g.edge_vertices(a) & g.edge_vertices(b)) <= 1
        assert not a & b
    nodes = len(c.lobes) + len(c.cut_vertices)
    assert len(c.incidences) == nodes - 1
    parent = {("l", k): ("l", k) for k in range(len(c.lobes))}
    parent.update({("v", v): ("v", v) for v in c.cut_vertices})

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for k, v in c.incidences:
        parent[find(("l", k))] = find(("v", v))
    assert len({find(x) for x in parent}) == 1


def test_blocks_of_a_bowtie():
    g = MultiGraph(5, ((0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)))
    assert graphs.cut_vertices(g) == {2}
    assert sorted(map(sorted, graphs.blocks(g))) == [[0, 1, 2], [3, 4, 5]]


@pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 6), (4, 20)])
def test_enumeration_counts(n, count):
    ds = graphs.enumerate_diagrams(n)
    assert len(ds) == count
    for d in ds:
        g = d.graph
        assert g.vertex_count == 2 * n and g.edge_count == 3 * n
        assert g.betti_number() == n + 1 and g.is_connected()
        assert all(v == 3 for v in g.valences())
    certs = {graphs.certificate(d.graph) for d in ds}
    assert len(certs) == count


def test_enumeration_matches_naive_oracle():
    assert naive_diagram_count(3) == len(graphs.enumerate_diagrams(3))


def test_decorated_diagram_validation():
    with pytest.raises(GraphError):
        graphs.DecoratedDiagram(MultiGraph(2, ((0, 1), (0, 1))), 1)
    with pytest.raises(GraphError):
        graphs.DecoratedDiagram(MultiGraph(2, ((0, 0), (0, 1), (1, 1)), True), 1)
    d = graphs.DecoratedDiagram.from_graph(graphs.tetrahedron())
    assert d.loop_order == 2


def test_graph_text_round_trip():
    g = graphs.double_theta()
    assert graphs.parse_graph(graphs.format_graph(g)) == g
    assert graphs.parse_graph("# c\nvertices 1\nedge 0 0  # loop\n").has_self_loops()
    with pytest.raises(GraphError):
        graphs.parse_graph("edge 0 1\n")
    with pytest.raises(GraphError):
        graphs.parse_graph("vertices 2\nedge 0 x\n")


def test_corpus_is_deterministic_and_connected():
    a = graphs.parity_corpus()
    assert a == graphs.parity_corpus()
    assert len(a) >= 200
    assert all(g.is_connected() and g.vertex_count <= 6 for g in a)
