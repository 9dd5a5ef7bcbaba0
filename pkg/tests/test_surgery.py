import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perturb3 import surgery, vassiliev
from perturb3.acceptance import brute_theta_as, brute_theta_torelli, data_text
from perturb3.formats import parse_matrix
from perturb3.surgery import ASLinkData, SurgeryError, TorelliData

EPS = {(0, 1, 2): 1}
IDENT = ((1, 0, 0), (0, 1, 0), (0, 0, 1))

fracs = st.fractions(min_value=-3, max_value=3, max_denominator=4)
nonzero = fracs.filter(lambda x: x != 0)


def rand_tau(rng, g=3):
    return surgery.antisymmetric_tensor({k: rng.randint(-2, 2) for k in itertools.combinations(range(g), 3)}, g)


def dense_tau(t, g=3):
    a = np.zeros((g, g, g), dtype=np.int64)
    for k, v in t.items():
        a[k] = int(v)
    return a


def einsum_torelli(data, n):
    """Oracle: numpy einsum over every bijection, integer inputs only."""
    cat = vassiliev.catalogue(n)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    out = []
    for d in cat.diagrams:
        g = d.graph
        orders = vassiliev.sorted_orders(g)
        total = 0
        for perm in itertools.permutations(range(2 * n)):
            ops, subs = [], []
            for v in range(g.vertex_count):
                ops.append(dense_tau(data.tau[perm[v]], data.ranks[perm[v]]))
                subs.append("".join(letters[2 * e + s] for e, s in orders[v]))
            for i, (u, w) in enumerate(g.edges):
                m = data.pairing(perm[u], perm[w])
                ops.append(np.array([[int(x) for x in r] for r in m], dtype=np.int64))
                subs.append(letters[2 * i] + letters[2 * i + 1])
            total += int(np.einsum(",".join(subs) + "->", *ops))
        out.append(total)
    return out


@given(st.integers(0, 10**6))
def test_torelli_n1_against_loops(seed):
    rng = random.Random(seed)
    t1, t2 = rand_tau(rng), rand_tau(rng)
    lam = [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(3)] for _ in range(3)]
    d = TorelliData((3, 3), (t1, t2), {(0, 1): lam})
    assert surgery.torelli_raw(d, 1).coeffs.get(0, 0) == brute_theta_torelli(t1, t2, lam)


@pytest.mark.parametrize("seed", range(3))
def test_torelli_n2_against_einsum(seed):
    rng = random.Random(seed)
    taus = [rand_tau(rng) for _ in range(4)]
    pairs = {(i, j): [[rng.randint(-1, 1) for _ in range(3)] for _ in range(3)] for i in range(4) for j in range(i + 1, 4)}
    d = TorelliData.build([3] * 4, taus, pairs)
    raw = surgery.torelli_raw(d, 2)
    assert [raw.coeffs.get(k, 0) for k in range(2)] == einsum_torelli(d, 2)


def test_theta_worked_values():
    levi = TorelliData.build([3, 3], [EPS, EPS], {(0, 1): IDENT})
    assert surgery.torelli_raw(levi, 1).coeffs == {0: 12}
    assert surgery.torelli_leading(levi, 1).coeffs == {0: Fraction(1, 4)}
    assert surgery.torelli_normalization(1) == 48
    a = ASLinkData.build(3, {(0, 1, 2): 5}, [1, 1, 1])
    assert surgery.as_leading(a, 1).coeffs == {0: 150}
    assert brute_theta_as(a.mu, [1, 1, 1]) == 150


@given(nonzero, st.lists(nonzero, min_size=3, max_size=3))
def test_as_theta_against_oracle(m, fr):
    a = ASLinkData.build(3, {(0, 1, 2): m}, fr)
    assert surgery.as_leading(a, 1).coeffs.get(0, 0) == brute_theta_as(a.mu, fr)


@given(st.integers(0, 10**6), fracs, st.integers(0, 1))
def test_torelli_linear_in_each_tau(seed, s, which):
    rng = random.Random(seed)
    t = [rand_tau(rng), rand_tau(rng)]
    lam = [[Fraction(rng.randint(-2, 2)) for _ in range(3)] for _ in range(3)]
    base = TorelliData((3, 3), tuple(t), {(0, 1): lam})
    other = rand_tau(rng)
    mixed = list(t)
    mixed[which] = {k: s * t[which].get(k, 0) + other.get(k, 0) for k in set(t[which]) | set(other)}
    mixed[which] = {k: v for k, v in mixed[which].items() if v != 0}
    alt = list(t)
    alt[which] = other
    lhs = surgery.torelli_leading(TorelliData((3, 3), tuple(mixed), {(0, 1): lam}), 1)
    rhs = surgery.torelli_leading(base, 1).scale(s) + surgery.torelli_leading(TorelliData((3, 3), tuple(alt), {(0, 1): lam}), 1)
    assert lhs == rhs


@settings(max_examples=8)
@given(st.integers(0, 10**6), fracs)
def test_torelli_homogeneous_in_lambda(seed, s):
    rng = random.Random(seed)
    taus = [rand_tau(rng) for _ in range(4)]
    pairs = {(i, j): [[rng.randint(-1, 1) for _ in range(3)] for _ in range(3)] for i in range(4) for j in range(i + 1, 4)}
    base = TorelliData.build([3] * 4, taus, pairs)
    # every degree-2 diagram has 6 edges, each carrying one pairing
    full = {k: [[s * x for x in r] for r in m] for k, m in pairs.items()}
    assert surgery.torelli_leading(TorelliData.build([3] * 4, taus, full), 2) == surgery.torelli_leading(base, 2).scale(s ** 6)


@settings(max_examples=8)
@given(st.integers(0, 10**6), st.integers(0, 5))
def test_as_framing_reciprocal(seed, i):
    rng = random.Random(seed)
    mu = {k: rng.randint(-2, 2) for k in itertools.combinations(range(6), 3)}
    fr = [Fraction(rng.choice([1, -1, 2, 3]), rng.choice([1, 2])) for _ in range(6)]
    a = ASLinkData.build(6, mu, fr)
    fr2 = list(fr)
    fr2[i] *= 2
    b = ASLinkData.build(6, mu, fr2)
    assert surgery.as_leading(b, 2) == surgery.as_leading(a, 2).scale(Fraction(1, 2))


@settings(max_examples=8)
@given(st.integers(0, 10**6))
def test_as_relabel_invariance(seed):
    rng = random.Random(seed)
    mu = surgery.antisymmetric_tensor({k: rng.randint(-2, 2) for k in itertools.combinations(range(6), 3)}, 6)
    fr = [Fraction(rng.choice([1, 2, 3])) for _ in range(6)]
    perm = list(range(6))
    rng.shuffle(perm)
    mu_p = {tuple(perm[x] for x in k): v for k, v in mu.items()}
    fr_p = [None] * 6
    for i, p in enumerate(perm):
        fr_p[p] = fr[i]
    a = ASLinkData(6, mu, tuple(fr))
    b = ASLinkData(6, mu_p, tuple(fr_p))
    assert surgery.as_leading(a, 2) == surgery.as_leading(b, 2)


def test_resource_exhaustion_gives_zero():
    three = TorelliData.build([3, 3, 3], [EPS] * 3, {(0, 1): IDENT, (1, 2): IDENT})
    assert surgery.torelli_leading(three, 1).is_zero()
    assert surgery.torelli_leading(TorelliData.empty(), 1).is_zero()
    four = ASLinkData.build(4, {(0, 1, 2): 1}, [1] * 4)
    assert surgery.as_leading(four, 1).is_zero()
    assert surgery.as_leading(ASLinkData.empty(), 2).is_zero()
    assert surgery.vanishing_threshold("torelli", 3) == 6
    assert surgery.vanishing_threshold("as", 3) == 9


def test_zero_inputs():
    assert surgery.torelli_leading(TorelliData.build([3, 3], [EPS, EPS], {}), 1).is_zero()
    assert surgery.torelli_leading(TorelliData.build([3, 3], [EPS, {}], {(0, 1): IDENT}), 1).is_zero()
    assert surgery.as_leading(ASLinkData.build(3, {}, [1, 1, 1]), 1).is_zero()


def test_data_validation():
    with pytest.raises(SurgeryError):
        surgery.antisymmetric_tensor({(0, 0, 1): 1}, 3)
    with pytest.raises(SurgeryError):
        surgery.antisymmetric_tensor({(0, 1, 2): 1, (1, 0, 2): 1}, 3)
    with pytest.raises(SurgeryError):
        surgery.antisymmetric_tensor({(0, 1, 5): 1}, 3)
    with pytest.raises(SurgeryError):
        TorelliData.build([3, 3], [EPS, EPS], {(0, 1): [[1, 0], [0, 1]]})
    with pytest.raises(SurgeryError):
        TorelliData.build([3], [EPS], {(0, 0): IDENT})
    with pytest.raises(SurgeryError):
        ASLinkData.build(3, EPS, [1, 0, 1])
    d = TorelliData.build([3, 3], [EPS, EPS], {(1, 0): ((0, 1, 0), (0, 0, 1), (1, 0, 0))})
    assert d.pairing(0, 1) == ((0, 0, 1), (1, 0, 0), (0, 1, 0))


def random_symmetric(rng, n):
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = rng.randint(-4, 4)
    return m


@given(st.integers(0, 10**6))
def test_plus_one_product_formula(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 5)
    m = random_symmetric(rng, n)
    k = rng.randrange(n)
    out = surgery.plus_one_update(m, k)
    keep = [i for i in range(n) if i != k]
    for a, x in enumerate(keep):
        for b, y in enumerate(keep):
            assert out[a][b] == m[x][y] + m[x][k] * m[y][k]
    assert surgery.surgery_linking_update(m, k, 1) == out
    assert out == [list(r) for r in zip(*out)]


@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4))
def test_disjoint_surgeries_commute(seed, p1, p2):
    rng = random.Random(seed)
    n = rng.randint(3, 5)
    m = random_symmetric(rng, n)
    m[0][1] = m[1][0] = 0
    m[0][0], m[1][1] = p1, p2
    first = surgery.surgery_linking_update(surgery.surgery_linking_update(m, 0), 0)
    second = surgery.surgery_linking_update(surgery.surgery_linking_update(m, 1), 0)
    assert first == second


def test_linking_update_example():
    lk = [[2, 1, 0], [1, 3, 2], [0, 2, 5]]
    assert surgery.surgery_linking_update(lk, 0) == [[Fraction(7, 2), 2], [2, 5]]
    assert surgery.surgery_linking_update(lk, 2, Fraction(1, 2)) == [[2, 1], [1, 11]]
    with pytest.raises(SurgeryError):
        surgery.surgery_linking_update([[0, 1], [1, 0]], 0)
    with pytest.raises(SurgeryError):
        surgery.surgery_linking_update([[1, 2], [0, 1]], 0)


def test_signature_and_correction():
    e8 = parse_matrix(data_text("e8.form"))
    assert e8 == [[Fraction(x) for x in r] for r in surgery.E8_CARTAN]
    assert surgery.signature(e8) == 8
    assert surgery.framing_correction_1(e8) == 1
    assert surgery.r1_consistency()
    assert surgery.R1 * surgery.P1_CP3_BUNDLE == Fraction(1, 6)
    assert surgery.signature([[0, 1], [1, 0]]) == 0
    assert surgery.signature([[-1]]) == -1


@given(st.integers(0, 10**6))
def test_signature_additive(seed):
    rng = random.Random(seed)
    a = random_symmetric(rng, rng.randint(1, 4))
    b = random_symmetric(rng, rng.randint(1, 4))
    assert surgery.signature(surgery.block_sum(a, b)) == surgery.signature(a) + surgery.signature(b)
    # second finite difference over independent block additions vanishes
    z = random_symmetric(rng, 2)
    s = surgery.signature
    bs = surgery.block_sum
    assert s(bs(bs(z, a), b)) - s(bs(z, a)) - s(bs(z, b)) + s(z) == 0


def test_connected_sum_is_block_disjoint():
    a = ASLinkData.build(3, EPS, [1, 1, 1])
    b = ASLinkData.build(3, {(0, 1, 2): 2}, [2, 1, 1])
    ab = surgery.connected_sum(a, b)
    assert ab.components == 6 and ab.mu[(3, 4, 5)] == 2
    t = TorelliData.build([3, 3], [EPS, EPS], {(0, 1): IDENT})
    tt = surgery.connected_sum(t, t)
    assert tt.bubble_count == 4 and (2, 3) in tt.pairings
    with pytest.raises(SurgeryError):
        surgery.connected_sum(a, t)
