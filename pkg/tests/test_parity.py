import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.combinatorics import Permutation

from perturb3 import graphs, parity, vassiliev
from perturb3.acceptance import data_text
from perturb3.graphs import GraphIso, MultiGraph
from perturb3.parity import P, ParityError, ParityFunctorId

CORPUS = graphs.parity_corpus()


def sample_graph(seed):
    return CORPUS[seed % len(CORPUS)]


def sample_autos(g, seed, k=8):
    autos = graphs.automorphisms(g)
    rng = random.Random(seed)
    return [rng.choice(autos) for _ in range(k)]


@given(st.permutations(list(range(7))))
def test_permutation_sign_matches_sympy(p):
    assert parity.permutation_sign(p) == (1 if Permutation(p).is_even else -1)


@given(st.integers(0, 10**6))
def test_homomorphism_property(seed):
    g = sample_graph(seed)
    autos = sample_autos(g, seed)
    for a, b in zip(autos, reversed(autos)):
        ab = a.compose(b)
        assert ab.is_valid(g, g)
        for f in ParityFunctorId:
            assert parity.functor_sign(f, g, ab) == parity.functor_sign(f, g, a) * parity.functor_sign(f, g, b)


@given(st.integers(0, 10**6))
def test_relations_and_table(seed):
    g = sample_graph(seed)
    for a in sample_autos(g, seed):
        s = parity.all_signs(g, a)
        assert s[P.D] == s[P.E]
        assert s[P.H] == s[P.A] * s[P.E]
        assert s[P.F] == s[P.B] * s[P.E]
        assert s[P.G] == s[P.B] * s[P.C]
        assert s[P.I] == s[P.G] * s[P.H]
        for f in ParityFunctorId:
            prod = 1
            for x in parity.table_expression(f):
                prod *= s[x]
            assert s[f] == prod


@given(st.integers(0, 10**6))
def test_chain_determinants_against_sympy(seed):
    g = sample_graph(seed)
    bd = sympy.Matrix(parity.boundary_matrix(g))
    if g.edge_count == 0:
        return
    cyc = bd.nullspace()
    for a in sample_autos(g, seed, 3):
        m = sympy.Matrix(parity.chain_matrix(g, a))
        assert parity.functor_sign(P.H, g, a) == (1 if m.det() > 0 else -1)
        if cyc:
            basis = sympy.Matrix.hstack(*cyc)
            images = m * basis
            coords = basis.solve_least_squares(images)
            assert basis * coords == images
            assert parity.functor_sign(P.I, g, a) == (1 if coords.det() > 0 else -1)


def test_c_trivial_on_odd_valence_graphs():
    checked = 0
    for g in CORPUS:
        if all(v % 2 for v in g.valences()):
            for a in graphs.automorphisms(g):
                assert parity.functor_sign(P.C, g, a) == 1
                checked += 1
    assert checked > 100


def test_theta_signs():
    g = graphs.theta()
    swap = GraphIso((0, 1), (1, 0, 2), (False, False, False))
    flip = GraphIso((1, 0), (0, 1, 2), (True, True, True))
    s = parity.all_signs(g, swap)
    assert (s[P.A], s[P.D], s[P.G], s[P.E]) == (-1, 1, 1, 1)
    t = parity.all_signs(g, flip)
    assert (t[P.A], t[P.B], t[P.D], t[P.G]) == (1, -1, -1, -1)
    assert parity.lie_sign(g, swap) == 1 and parity.lie_sign(g, flip) == 1


def test_lie_odd_automorphism_kills_class():
    for n in (1, 2, 3):
        cat = vassiliev.catalogue(n)
        space = vassiliev.build_space(n)
        for k, d in enumerate(cat.diagrams):
            if any(parity.lie_sign(d.graph, a) < 0 for a in graphs.automorphisms(d.graph)):
                assert space.normal_form(vassiliev.DiagramVector.basis_vector(n, k)).is_zero()


def test_independence_figure_and_theta():
    g = graphs.parse_graph(data_text("independence.graph"))
    res = parity.independence_witness(g)
    assert res.independent and res.rank == 4 and len(res.witnesses) == 4
    th = parity.independence_witness(graphs.theta())
    assert not th.independent and th.rank < 4


def test_full_corpus_report_clean():
    assert all(parity.verify_relations(g).passed for g in CORPUS)


def test_errors_and_parsing():
    g = graphs.theta()
    bad = GraphIso((0, 1), (0, 1, 2), (True, False, False))
    with pytest.raises(ParityError):
        parity.functor_sign(P.A, g, bad)
    with pytest.raises(ParityError):
        parity.verify_relations(MultiGraph(2, ()))
    assert ParityFunctorId.parse("1") is P.ONE
    assert ParityFunctorId.parse(" h ") is P.H
    assert parity.functor_sign("G", g, GraphIso.identity(g)) == 1
