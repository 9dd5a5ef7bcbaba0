import itertools
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from perturb3 import faces, graphs, vassiliev
from perturb3.acceptance import brute_certificate, data_text
from perturb3.faces import FaceError
from perturb3.formats import parse_corner
from perturb3.graphs import MultiGraph

DIAGRAMS = [d for n in (1, 2, 3) for d in vassiliev.catalogue(n).diagrams]


def test_face_counts_of_named_diagrams():
    assert faces.face_counts(faces.codim1_faces(graphs.theta())) == {"principal": 0, "hidden": 0, "anomalous": 1, "infinite": 3}
    assert faces.face_counts(faces.codim1_faces(graphs.tetrahedron())) == {"principal": 6, "hidden": 4, "anomalous": 1, "infinite": 15}
    assert faces.face_counts(faces.codim1_faces(graphs.double_theta())) == {"principal": 2, "hidden": 2, "anomalous": 1, "infinite": 13}


@pytest.mark.parametrize("d", DIAGRAMS, ids=lambda d: str(d.graph.edges))
def test_faces_match_two_connected_subsets(d):
    g = d.graph
    whole = frozenset(range(g.vertex_count))
    expected = set()
    for s in graphs.two_connected_subgraphs(g):
        vs = g.edge_vertices(s)
        if g.induced_edges(vs) == s and vs != whole:
            expected.add(("principal" if len(s) == 1 else "hidden", vs))
    got = {(f.kind, f.vertices) for f in faces.codim1_faces(g, include_infinite=False) if f.kind != "anomalous"}
    assert got == expected
    for f in faces.codim1_faces(g):
        if f.kind == "hidden":
            assert len(f.edges) - len(f.vertices) + 1 >= 1


def test_infinite_faces_exclude_disconnected_sets():
    g = graphs.tetrahedron()
    inf = [f for f in faces.codim1_faces(g) if f.kind == "infinite"]
    assert len(inf) == 2 ** 4 - 1
    dt = graphs.double_theta()
    sets = {f.vertices for f in faces.codim1_faces(dt) if f.kind == "infinite"}
    # the two vertices of a chord end pair not joined by an edge are excluded
    assert all(len(s) == 1 or graphs.is_connected_subset(dt, dt.induced_edges(s)) for s in sets)


def test_principal_gluing_partitions():
    g = graphs.tetrahedron()
    glued = faces.principal_gluing(g, 0)
    assert len(glued) == 6
    for face in glued:
        assert face.graph.edges[0] == g.edges[0]
        assert all(v == 3 for v in face.graph.valences())
    with pytest.raises(faces.AnomalousExclusion):
        faces.principal_gluing(graphs.theta(), 0)
    with pytest.raises(FaceError):
        faces.principal_gluing(graphs.double_theta(), 0)


@pytest.mark.parametrize("n", [2, 3])
def test_six_face_sums_vanish(n):
    cat = vassiliev.catalogue(n)
    space = vassiliev.build_space(n)
    count = 0
    for d in cat.diagrams:
        for e in d.graph.simple_edges():
            rel = faces.six_face_relation(cat, d, e)
            assert space.normal_form(rel).is_zero()
            count += 1
    assert count > 0


def test_surjection_spans():
    r1 = faces.surjection_check(1)
    assert r1.passed and len(r1.excluded) == 3
    r2 = faces.surjection_check(2)
    assert r2.passed and r2.span_equal
    r3 = faces.surjection_check(3)
    assert r3.passed and r3.span_contained


def _hidden_cases():
    for d in DIAGRAMS:
        for f in faces.codim1_faces(d, include_infinite=False):
            if f.kind == "hidden":
                yield d, f.edges


HIDDEN = list(_hidden_cases())


@pytest.mark.parametrize("case", HIDDEN, ids=lambda c: f"{c[0].graph.edges}-{sorted(c[1])}")
def test_gluing_group(case):
    d, sub = case
    grp = faces.gluing_group(d, sub)
    assert grp.well_defined
    assert grp.order == grp.expected_order()
    assert grp.surjective
    assert 2 * sum(1 for s in grp.character if s < 0) == grp.order
    cat = vassiliev.catalogue(d.loop_order)
    assert faces.orbit_sum(cat, grp).is_zero()


@pytest.mark.parametrize("case", HIDDEN[:12], ids=lambda c: f"{c[0].graph.edges}-{sorted(c[1])}")
def test_hidden_involution_is_involution(case):
    d, sub = case
    g = d.graph
    for e1, e2 in faces.separating_pairs(g, sub):
        h, s1 = faces.hidden_involution(g, sub, e1, e2)
        assert h != g
        back, s2 = faces.hidden_involution(h, sub, e1, e2)
        assert back == g
        assert s1 * s2 == 1


def test_hidden_involution_errors():
    g = graphs.tetrahedron()
    tri = g.induced_edges({0, 1, 2})
    with pytest.raises(FaceError):
        faces.hidden_involution(g, tri, 0, 0)
    with pytest.raises(FaceError):
        faces.hidden_involution(g, tri, 0, 5)


def test_edge_classes_of_triangle():
    g = graphs.tetrahedron()
    tri = g.induced_edges({0, 1, 2})
    assert faces.edge_classes(g, tri) == [tri]
    assert faces.gluing_group(g, tri).order == math.factorial(3)


def test_corner_figures():
    c4 = parse_corner(data_text("codim4.corner"))
    c5 = parse_corner(data_text("codim5.corner"))
    assert faces.corner_codim(c4) == 4
    assert faces.corner_codim(c5) == 5
    partners = [f.graph for f in faces.principal_gluing(c4.graph, 6)]
    assert c5.graph in partners


def test_corner_validation():
    g = graphs.tetrahedron()
    with pytest.raises(FaceError):
        faces.corner_codim(faces.Corner(g, frozenset({0, 1, 3})))  # a triangle of principal edges
    with pytest.raises(FaceError):
        faces.corner_codim(faces.Corner(g, frozenset(), (faces.Lobe(frozenset({0, 5})),)))
    tri = g.induced_edges({0, 1, 2})
    nested = faces.Corner(g, frozenset(), (faces.Lobe(frozenset(range(6)), (faces.Lobe(tri),)),))
    assert faces.corner_codim(nested) == 2


def test_anomaly_parity_depends_only_on_n():
    for d in DIAGRAMS:
        n = d.loop_order
        assert faces.anomaly_parity(d) == (-1 if n % 2 == 0 else 1)
    assert faces.reversal_sign(2, 1) == 1  # single edge: antipodal map and flip cancel
    assert faces.reversal_sign(2, 2) == -1
    assert faces.reversal_sign(3, 3, moved_points=1) == 1


def brute_degenerate_count(k):
    # every vertex has valence >= 2, so at most k vertices
    found = set()
    for v in range(1, k + 1):
        pairs = [(a, b) for a in range(v) for b in range(a, v)]
        for combo in itertools.combinations_with_replacement(pairs, k):
            val = [0] * v
            for a, b in combo:
                val[a] += 1
                val[b] += 1
            if min(val) < 2 or sum(1 for x in val if x == 2) > 1:
                continue
            g = MultiGraph(v, combo, allow_self_loops=True)
            found.add((v, brute_certificate(g)))
    return len(found)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_degenerate_graphs_match_brute_force(k):
    assert len(faces.degenerate_graphs(k)) == brute_degenerate_count(k)


@pytest.mark.parametrize("k", range(1, 7))
def test_degenerate_bound(k):
    rep = faces.degenerate_bound(k)
    assert rep.passed
    assert all(3 * g.vertex_count - 4 <= 2 * k - 3 for g in faces.degenerate_graphs(k))


def test_degenerate_counts_frozen():
    assert [faces.degenerate_bound(k).graph_count for k in range(1, 7)] == [1, 1, 5, 13, 32, 102]


def test_config_dimension():
    assert faces.config_dimension(4) == 12
    assert faces.config_dimension(2, d=2) == 4
