"""The acceptance suite behind ``perturb3 selftest``.

Each check returns a :class:`CheckResult`; the rendered report has one line
per check and no timings, so repeated runs are byte-identical.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import faces, graphs, parity, surgery, vassiliev
from .formats import parse_corner, parse_matrix


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    module: str
    passed: bool
    detail: str

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d} {self.name}: {self.detail}"


def data_text(name: str) -> str:
    return resources.files("perturb3").joinpath("data").joinpath(name).read_text()


# ---------------------------------------------------------------------------
# independent oracles


def brute_certificate(g: graphs.MultiGraph) -> Tuple[int, ...]:
    """Smallest multiplicity table over all vertex orders (no refinement)."""
    n = g.vertex_count
    mult = [[0] * n for _ in range(n)]
    for t, h in g.edges:
        mult[t][h] += 1
        if t != h:
            mult[h][t] += 1
    best = None
    for order in itertools.permutations(range(n)):
        cert = tuple(mult[order[i]][order[j]] for i in range(n) for j in range(i, n))
        if best is None or cert < best:
            best = cert
    return best


def naive_diagram_count(n: int) -> int:
    """Connected cubic loopless multigraphs on 2n vertices, by brute force.

    Every multiplicity assignment on vertex pairs with all valences 3 is
    listed, then classes are merged by :func:`brute_certificate`.
    """
    nv = 2 * n
    pairs = list(itertools.combinations(range(nv), 2))
    found = set()

    def rec(idx: int, val: List[int], chosen: List[Tuple[int, int]]):
        if idx == len(pairs):
            if all(x == 3 for x in val):
                g = graphs.MultiGraph(nv, tuple(chosen))
                if g.is_connected():
                    found.add(brute_certificate(g))
            return
        a, b = pairs[idx]
        # a is never revisited after its last pair, so it must be full then
        for m in range(0, min(3 - val[a], 3 - val[b]) + 1):
            val[a] += m
            val[b] += m
            last_a = all(p[0] != a and p[1] != a for p in pairs[idx + 1:])
            if not (last_a and val[a] != 3):
                rec(idx + 1, val, chosen + [(a, b)] * m)
            val[a] -= m
            val[b] -= m

    rec(0, [0] * nv, [])
    return len(found)


def brute_theta_torelli(t1, t2, lam) -> Fraction:
    """Theta contraction by explicit index loops, both vertex placements."""
    total = Fraction(0)
    for first, second, pairing in ((t1, t2, lam), (t2, t1, [list(r) for r in zip(*lam)])):
        g1, g2 = len(pairing), len(pairing[0])
        for a, b, c in itertools.product(range(g1), repeat=3):
            x = first.get((a, b, c), 0)
            if not x:
                continue
            for a2, b2, c2 in itertools.product(range(g2), repeat=3):
                y = second.get((a2, b2, c2), 0)
                if y:
                    total += x * y * pairing[a][a2] * pairing[b][b2] * pairing[c][c2]
    return total


def brute_theta_as(mu: Dict, framings: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for perm in itertools.permutations(range(3)):
        total += Fraction(mu.get(tuple(perm), 0)) ** 2
    for f in framings:
        total /= f
    return total


# ---------------------------------------------------------------------------
# checks


def check_vassiliev(inject: bool) -> CheckResult:
    start = time.perf_counter()
    bad = [vassiliev.DiagramVector.basis_vector(2, 0)] if inject else []
    v1 = vassiliev.build_space(1)
    v2 = vassiliev.build_space(2, extra=bad)
    dt = vassiliev.picture_vector(2, vassiliev.blackboard_double_theta())
    tet = vassiliev.picture_vector(2, vassiliev.blackboard_tetrahedron())
    rd, rt = vassiliev.reduce(dt, v2), vassiliev.reduce(tet, v2)
    twice = rd == [2 * x for x in rt] and any(rt)
    elapsed = time.perf_counter() - start
    ok = v1.dimension == 1 and v2.dimension == 1 and twice and elapsed < 1.0
    detail = f"dim V1={v1.dimension} dim V2={v2.dimension} double theta = 2 tetrahedron: {'yes' if twice else 'no'}"
    return CheckResult(1, "vassiliev-dimensions", "vassiliev", ok, detail)


def check_counts(inject: bool) -> CheckResult:
    start = time.perf_counter()
    c1 = len(graphs.enumerate_diagrams(1))
    c2 = len(graphs.enumerate_diagrams(2))
    c3 = len(graphs.enumerate_diagrams(3))
    oracle = naive_diagram_count(3)
    ok = c1 == 1 and c2 == 2 and c3 == oracle and time.perf_counter() - start < 60
    return CheckResult(2, "diagram-counts", "diagram-core", ok, f"n=1: {c1}, n=2: {c2}, n=3: {c3} (oracle {oracle})")


def check_parity(inject: bool) -> CheckResult:
    corpus = graphs.parity_corpus(200)
    failures = 0
    autos = 0
    for g in corpus:
        rep = parity.verify_relations(g)
        autos += rep.automorphism_count
        failures += sum(not r.passed for r in rep.relations + rep.table)
    ok = len(corpus) >= 200 and failures == 0
    return CheckResult(3, "parity-relations", "parity", ok, f"{len(corpus)} graphs, {autos} automorphisms, {failures} failures")


def check_independence(inject: bool) -> CheckResult:
    g = graphs.parse_graph(data_text("independence.graph"))
    r = parity.independence_witness(g)
    t = parity.independence_witness(graphs.theta())
    ok = r.independent and not t.independent
    return CheckResult(4, "parity-independence", "parity", ok, f"figure graph rank {r.rank}, theta rank {t.rank}")


def check_gluing(inject: bool) -> CheckResult:
    bad = [vassiliev.DiagramVector.basis_vector(2, 0)] if inject else []
    r1 = faces.surjection_check(1)
    r2 = faces.surjection_check(2, extra_relations=bad)
    ok = r1.passed and r2.passed and r2.span_equal is True
    detail = (
        f"n=1: {r1.principal_checked} six-face sums, {len(r1.excluded)} excluded, {r1.hidden_checked} hidden; "
        f"n=2: {r2.principal_checked} six-face sums, {r2.hidden_checked} hidden, "
        f"span equal: {'yes' if r2.span_equal else 'no'}, failures {len(r2.principal_failures) + len(r2.hidden_failures)}"
    )
    return CheckResult(5, "gluing-soundness", "faces", ok, detail)


def check_corners(inject: bool) -> CheckResult:
    c4 = parse_corner(data_text("codim4.corner"))
    c5 = parse_corner(data_text("codim5.corner"))
    k4, k5 = faces.corner_codim(c4), faces.corner_codim(c5)
    glued = [f.graph.edges for f in faces.principal_gluing(c4.graph, 6)]
    linked = c5.graph.edges in glued
    ok = k4 == 4 and k5 == 5 and linked
    return CheckResult(6, "corner-codimensions", "faces", ok, f"codim {k4} and {k5}, related by gluing at edge 6: {'yes' if linked else 'no'}")


def check_degenerate(inject: bool) -> CheckResult:
    start = time.perf_counter()
    parts = []
    ok = True
    for k in range(1, 7):
        r = faces.degenerate_bound(k)
        ok = ok and r.passed
        parts.append(f"k={k}:{r.graph_count}/v<={r.max_vertices}")
    ok = ok and time.perf_counter() - start < 60
    return CheckResult(7, "degenerate-locus", "faces", ok, " ".join(parts))


def _rand_frac(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-5, 5), rng.randint(1, 4))


def _random_tau(rng: random.Random, g: int) -> Dict:
    return surgery.antisymmetric_tensor({k: _rand_frac(rng) for k in itertools.combinations(range(g), 3)}, g)


def check_surgery(inject: bool) -> CheckResult:
    rng = random.Random(8)
    problems = []
    eps = {(0, 1, 2): 1}
    ident = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    # zero inputs
    z1 = surgery.TorelliData.build([3, 3], [eps, eps], {})
    if not surgery.torelli_leading(z1, 1).is_zero():
        problems.append("zero pairing")
    z2 = surgery.ASLinkData.build(3, {}, [1, 1, 1])
    if not surgery.as_leading(z2, 1).is_zero():
        problems.append("zero mu")
    # size mismatch
    three = surgery.TorelliData.build([3, 3, 3], [eps] * 3, {(0, 1): ident, (1, 2): ident, (0, 2): ident})
    if not surgery.torelli_leading(three, 1).is_zero():
        problems.append("torelli size")
    four = surgery.ASLinkData.build(4, {(0, 1, 2): 1, (1, 2, 3): 2}, [1] * 4)
    if not surgery.as_leading(four, 1).is_zero():
        problems.append("as size")
    # worked n=1 examples against explicit loops
    for _ in range(3):
        t1, t2 = _random_tau(rng, 3), _random_tau(rng, 3)
        lam = [[_rand_frac(rng) for _ in range(3)] for _ in range(3)]
        d = surgery.TorelliData((3, 3), (t1, t2), {(0, 1): lam})
        raw = surgery.torelli_raw(d, 1).coeffs.get(0, Fraction(0))
        if raw != brute_theta_torelli(t1, t2, lam):
            problems.append("torelli oracle")
    levi = surgery.TorelliData.build([3, 3], [eps, eps], {(0, 1): ident})
    if surgery.torelli_raw(levi, 1).coeffs.get(0) != 12:
        problems.append("theta contraction 12")
    for _ in range(3):
        m = _rand_frac(rng) or Fraction(1)
        fr = [_rand_frac(rng) or Fraction(1) for _ in range(3)]
        a = surgery.ASLinkData.build(3, {(0, 1, 2): m}, fr)
        if surgery.as_leading(a, 1).coeffs.get(0, Fraction(0)) != brute_theta_as(a.mu, fr):
            problems.append("as oracle")
    # multilinearity by random scaling
    theta = vassiliev.catalogue(1).diagrams[0].graph
    for _ in range(3):
        t1, t2 = _random_tau(rng, 3), _random_tau(rng, 3)
        lam = [[_rand_frac(rng) for _ in range(3)] for _ in range(3)]
        s = _rand_frac(rng)
        base = surgery.TorelliData((3, 3), (t1, t2), {(0, 1): lam})
        scaled_tau = surgery.TorelliData((3, 3), ({k: s * v for k, v in t1.items()}, t2), {(0, 1): lam})
        if surgery.torelli_leading(scaled_tau, 1) != surgery.torelli_leading(base, 1).scale(s):
            problems.append("tau linearity")
        # one edge at a time: the contraction is linear in each edge's pairing
        other = [[_rand_frac(rng) for _ in range(3)] for _ in range(3)]
        for e in range(3):
            for perm in ((0, 1), (1, 0)):
                f = lambda m: surgery.torelli_contraction(theta, perm, base, {e: _oriented(m, perm)})
                mix = [[s * x + y for x, y in zip(r1, r2)] for r1, r2 in zip(lam, other)]
                if f(mix) != s * f(lam) + f(other):
                    problems.append("lambda linearity")
        scaled_all = surgery.TorelliData((3, 3), (t1, t2), {(0, 1): [[s * x for x in r] for r in lam]})
        if surgery.torelli_leading(scaled_all, 1) != surgery.torelli_leading(base, 1).scale(s ** 3):
            problems.append("lambda homogeneity")
        m = _rand_frac(rng) or Fraction(1)
        fr = [_rand_frac(rng) or Fraction(1) for _ in range(3)]
        a = surgery.ASLinkData.build(3, {(0, 1, 2): m}, fr)
        at = surgery.ASLinkData.build(3, {(0, 1, 2): s * m}, fr)
        if surgery.as_leading(at, 1) != surgery.as_leading(a, 1).scale(s * s):
            problems.append("mu homogeneity")
        doubled = surgery.ASLinkData.build(3, {(0, 1, 2): m}, [2 * fr[0]] + fr[1:])
        if surgery.as_leading(doubled, 1) != surgery.as_leading(a, 1).scale(Fraction(1, 2)):
            problems.append("framing reciprocal")
        mu_b = surgery.antisymmetric_tensor({(0, 1, 2): _rand_frac(rng)}, 3)
        mixed = {k: s * a.mu.get(k, 0) + mu_b.get(k, 0) for k in set(a.mu) | set(mu_b)}
        for v in range(2):
            # vary the triple linking table at one vertex only
            def w(tab, v=v):
                tables = [tab if u == v else a.mu for u in range(2)]
                return sum((surgery.as_weight(theta, p, a.mu, tables) for p in itertools.permutations(range(3))), Fraction(0))

            if w(mixed) != s * w(a.mu) + w(mu_b):
                problems.append("mu linearity")
    ok = not problems
    return CheckResult(8, "surgery-evaluators", "surgery", ok, "all exact" if ok else "failed: " + ", ".join(sorted(set(problems))))


def _oriented(m, perm):
    # theta edges run from vertex 0 to vertex 1; a pairing is written (bubble 0, bubble 1)
    return m if perm == (0, 1) else [list(r) for r in zip(*m)]


def _random_symmetric(rng: random.Random, n: int, lo: int = -4, hi: int = 4) -> List[List[int]]:
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            m[i][j] = m[j][i] = rng.randint(lo, hi)
    return m


def check_linking(inject: bool) -> CheckResult:
    rng = random.Random(9)
    problems = []
    for _ in range(20):
        n = rng.randint(2, 6)
        m = _random_symmetric(rng, n)
        k = rng.randrange(n)
        keep = [i for i in range(n) if i != k]
        expected = [[m[a][b] + m[a][k] * m[b][k] for b in keep] for a in keep]
        if surgery.plus_one_update(m, k) != expected:
            problems.append("plus-one formula")
        if surgery.surgery_linking_update(m, k, Fraction(1)) != expected:
            problems.append("framing 1 path")
    for _ in range(20):
        n = rng.randint(3, 6)
        m = _random_symmetric(rng, n)
        k1, k2 = rng.sample(range(n), 2)
        m[k1][k2] = m[k2][k1] = 0  # the two surgered components are algebraically split
        f1, f2 = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)), Fraction(rng.choice([-2, -1, 1, 2]), rng.randint(1, 3))
        a = surgery.surgery_linking_update(surgery.surgery_linking_update(m, k1, f1), k2 - (k2 > k1), f2)
        b = surgery.surgery_linking_update(surgery.surgery_linking_update(m, k2, f2), k1 - (k1 > k2), f1)
        if a != b:
            problems.append("commutation")
        if any(a[i][j] != a[j][i] for i in range(len(a)) for j in range(len(a))):
            problems.append("symmetry")
    ok = not problems
    return CheckResult(9, "linking-update", "surgery", ok, "20 random matrices, commuting pairs exact" if ok else "failed: " + ", ".join(sorted(set(problems))))


def check_framing(inject: bool) -> CheckResult:
    e8 = parse_matrix(data_text("e8.form"))
    sig = surgery.signature(e8)
    corr = surgery.framing_correction_1(e8)
    cp3 = Fraction(1, 24) * 4 == Fraction(1, 6) and surgery.r1_consistency()
    ok = sig == 8 and corr == 1 and cp3
    return CheckResult(10, "framing-correction", "surgery", ok, f"signature(E8)={sig}, delta_1 coefficient={corr}, r1*p1=1/6: {'yes' if cp3 else 'no'}")


def check_anomaly(inject: bool) -> CheckResult:
    values = {}
    ok = True
    for n in (1, 2, 3):
        signs = {faces.anomaly_parity(d) for d in graphs.enumerate_diagrams(n)}
        ok = ok and len(signs) == 1 and signs == {-1 if n % 2 == 0 else 1}
        values[n] = sorted(signs)
    return CheckResult(11, "anomaly-parity", "faces", ok, " ".join(f"n={n}:{'/'.join(map(str, v))}" for n, v in values.items()))


CHECKS: List[Callable[[bool], CheckResult]] = [
    check_vassiliev,
    check_counts,
    check_parity,
    check_independence,
    check_gluing,
    check_corners,
    check_degenerate,
    check_surgery,
    check_linking,
    check_framing,
    check_anomaly,
]

NAMES = {
    1: ("vassiliev-dimensions", "vassiliev"),
    2: ("diagram-counts", "diagram-core"),
    3: ("parity-relations", "parity"),
    4: ("parity-independence", "parity"),
    5: ("gluing-soundness", "faces"),
    6: ("corner-codimensions", "faces"),
    7: ("degenerate-locus", "faces"),
    8: ("surgery-evaluators", "surgery"),
    9: ("linking-update", "surgery"),
    10: ("framing-correction", "surgery"),
    11: ("anomaly-parity", "faces"),
    12: ("determinism", "cli"),
}


def _selected(number: int, flt: Optional[str]) -> bool:
    if not flt:
        return True
    name, module = NAMES[number]
    f = flt.lower()
    return f == str(number) or f in name or f in module


def _run_core(flt: Optional[str], inject: bool) -> List[CheckResult]:
    out = []
    for i, fn in enumerate(CHECKS, 1):
        if not _selected(i, flt):
            continue
        try:
            out.append(fn(inject))
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            name, module = NAMES[i]
            out.append(CheckResult(i, name, module, False, f"error: {type(exc).__name__}: {exc}"))
    return out


def run_checks(flt: Optional[str] = None, inject_bad_relation: bool = False) -> List[CheckResult]:
    results = _run_core(flt, inject_bad_relation)
    if _selected(12, flt):
        first = render(results)
        second = render(_run_core(flt, inject_bad_relation))
        same = first == second
        results.append(CheckResult(12, "determinism", "cli", same, "repeated report identical" if same else "reports differ"))
    return results


def render(results: Sequence[CheckResult]) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines) + "\n"
