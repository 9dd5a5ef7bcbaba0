"""Leading-order surgery formulas, linking updates and the framing correction.

Both evaluators read each vertex tensor in the reference local flag order of
the canonical diagram (flags sorted by edge, then slot), which is the basis
orientation used by :mod:`perturb3.vassiliev`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .graphs import MultiGraph
from .vassiliev import DiagramVector, catalogue, sorted_orders

Triple = Tuple[int, int, int]

# the leading Torelli difference counts each undecorated diagram
# 2^(3n) (3n)! times (edge orientations and orderings)
def torelli_normalization(n: int) -> int:
    return 2 ** (3 * n) * factorial(3 * n)


R1 = Fraction(1, 24)
P1_CP3_BUNDLE = 4  # Pontryagin number of the total space used to pin r_1
CP3_EULER_TERM = Fraction(1, 6)


class SurgeryError(ValueError):
    pass


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def antisymmetric_tensor(entries: Dict[Triple, object], size: int) -> Dict[Triple, Fraction]:
    """Complete a partial list of entries to a totally antisymmetric 3-tensor.

    Indices are 0-based.  Entries with a repeated index must be zero;
    entries related by a permutation must agree up to its sign.
    """
    out: Dict[Triple, Fraction] = {}
    for key, value in entries.items():
        value = linalg.as_fraction(value)
        if len(key) != 3 or any(not 0 <= x < size for x in key):
            raise SurgeryError(f"tensor index {key} out of range 0..{size - 1}")
        if len(set(key)) < 3:
            if value != 0:
                raise SurgeryError(f"antisymmetric tensor has nonzero entry at repeated index {key}")
            continue
        for perm in itertools.permutations(range(3)):
            k = tuple(key[i] for i in perm)
            v = _perm_sign(perm) * value
            if k in out and out[k] != v:
                raise SurgeryError(f"entries at {key} and {k} are not antisymmetric")
            out[k] = v
    return {k: v for k, v in out.items() if v != 0}


def _check_antisymmetric(t: Dict[Triple, Fraction]) -> None:
    for key, value in t.items():
        for perm in itertools.permutations(range(3)):
            k = tuple(key[i] for i in perm)
            if t.get(k, 0) != _perm_sign(perm) * value:
                raise SurgeryError(f"tensor is not totally antisymmetric at {key}")


Matrix = Tuple[Tuple[Fraction, ...], ...]


def _matrix(rows, shape: Tuple[int, int]) -> Matrix:
    m = tuple(tuple(linalg.as_fraction(x) for x in row) for row in rows)
    if len(m) != shape[0] or any(len(r) != shape[1] for r in m):
        raise SurgeryError(f"matrix has the wrong shape, expected {shape[0]}x{shape[1]}")
    return m


def _transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


@dataclass(frozen=True)
class TorelliData:
    ranks: Tuple[int, ...]
    tau: Tuple[Dict[Triple, Fraction], ...]
    pairings: Dict[Tuple[int, int], Matrix] = field(default_factory=dict)  # keys i < j

    kind = "torelli"

    def __post_init__(self):
        if len(self.tau) != len(self.ranks):
            raise SurgeryError("one trilinear form per bubble is required")
        if any(g < 0 for g in self.ranks):
            raise SurgeryError("ranks must be nonnegative")
        for i, t in enumerate(self.tau):
            if any(not 0 <= x < self.ranks[i] for k in t for x in k):
                raise SurgeryError(f"form of bubble {i} uses an index beyond its rank")
            _check_antisymmetric(t)
        clean = {}
        for (i, j), m in self.pairings.items():
            if i == j:
                raise SurgeryError("self-pairings are not used")
            if not (0 <= i < len(self.ranks) and 0 <= j < len(self.ranks)):
                raise SurgeryError(f"pairing ({i}, {j}) refers to a missing bubble")
            if i > j:
                i, j, m = j, i, _transpose(m)
            m = _matrix(m, (self.ranks[i], self.ranks[j]))
            if (i, j) in clean and clean[(i, j)] != m:
                raise SurgeryError(f"pairing ({i}, {j}) given twice inconsistently")
            clean[(i, j)] = m
        object.__setattr__(self, "pairings", clean)

    @property
    def bubble_count(self) -> int:
        return len(self.ranks)

    def pairing(self, i: int, j: int) -> Matrix:
        if i == j:
            raise SurgeryError("self-pairing requested")
        if i < j:
            return self.pairings.get((i, j)) or _zero(self.ranks[i], self.ranks[j])
        return _transpose(self.pairing(j, i))

    @classmethod
    def build(cls, ranks, tau_entries, pairings=None) -> "TorelliData":
        taus = tuple(antisymmetric_tensor(t, g) for t, g in zip(tau_entries, ranks))
        return cls(tuple(ranks), taus, dict(pairings or {}))

    @classmethod
    def empty(cls) -> "TorelliData":
        return cls((), (), {})


def _zero(r: int, c: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(c)) for _ in range(r))


@dataclass(frozen=True)
class ASLinkData:
    components: int
    mu: Dict[Triple, Fraction]
    framings: Tuple[Fraction, ...]

    kind = "as"

    def __post_init__(self):
        if len(self.framings) != self.components:
            raise SurgeryError("one framing per component is required")
        fr = tuple(linalg.as_fraction(x) for x in self.framings)
        if any(x == 0 for x in fr):
            raise SurgeryError("framings must be nonzero")
        object.__setattr__(self, "framings", fr)
        if any(not 0 <= x < self.components for k in self.mu for x in k):
            raise SurgeryError("triple linking index out of range")
        _check_antisymmetric(self.mu)

    @classmethod
    def build(cls, components: int, mu_entries, framings) -> "ASLinkData":
        return cls(components, antisymmetric_tensor(mu_entries, components), tuple(framings))

    @classmethod
    def empty(cls) -> "ASLinkData":
        return cls(0, {}, ())


# ---------------------------------------------------------------------------
# sparse tensor network contraction


Factor = Tuple[Tuple[int, ...], Dict[Tuple[int, ...], Fraction]]  # (variables, table)


def _multiply(a: Factor, b: Factor) -> Factor:
    va, ta = a
    vb, tb = b
    shared = [x for x in va if x in vb]
    out_vars = tuple(va) + tuple(x for x in vb if x not in va)
    pos_a = {x: i for i, x in enumerate(va)}
    pos_b = {x: i for i, x in enumerate(vb)}
    index: Dict[Tuple, List[Tuple[Tuple[int, ...], Fraction]]] = {}
    for kb, xb in tb.items():
        index.setdefault(tuple(kb[pos_b[s]] for s in shared), []).append((kb, xb))
    extra = [pos_b[x] for x in vb if x not in va]
    out: Dict[Tuple[int, ...], Fraction] = {}
    for ka, xa in ta.items():
        for kb, xb in index.get(tuple(ka[pos_a[s]] for s in shared), ()):
            key = ka + tuple(kb[i] for i in extra)
            out[key] = out.get(key, Fraction(0)) + xa * xb
    return out_vars, {k: v for k, v in out.items() if v != 0}


def _sum_out(f: Factor, var: int) -> Factor:
    vs, t = f
    i = vs.index(var)
    out: Dict[Tuple[int, ...], Fraction] = {}
    for k, x in t.items():
        key = k[:i] + k[i + 1:]
        out[key] = out.get(key, Fraction(0)) + x
    return vs[:i] + vs[i + 1:], {k: v for k, v in out.items() if v != 0}


def contract(factors: List[Factor]) -> Fraction:
    """Full contraction of factors sharing summed variables (variable elimination)."""
    factors = list(factors)
    variables = sorted({v for vs, _ in factors for v in vs})
    for var in variables:
        touching = [f for f in factors if var in f[0]]
        rest = [f for f in factors if var not in f[0]]
        if not touching:
            continue
        prod = touching[0]
        for f in touching[1:]:
            prod = _multiply(prod, f)
            if not prod[1]:
                return Fraction(0)
        factors = rest + [_sum_out(prod, var)]
    total = Fraction(1)
    for vs, t in factors:
        total *= t.get((), Fraction(0))
    return total


def torelli_contraction(g: MultiGraph, bubble_of: Sequence[int], data: TorelliData, edge_pairings=None) -> Fraction:
    """Contract the diagram with one vertex per bubble.

    Edge i from u to w carries two summation indices (one per endpoint slot)
    joined by the pairing matrix of the two bubbles; ``edge_pairings`` may
    override the matrix of individual edges.
    """
    orders = sorted_orders(g)
    factors: List[Factor] = []
    for v in range(g.vertex_count):
        tau = data.tau[bubble_of[v]]
        if not tau:
            return Fraction(0)
        factors.append((tuple(2 * e + s for e, s in orders[v]), dict(tau)))
    for i, (u, w) in enumerate(g.edges):
        if edge_pairings is not None and i in edge_pairings:
            m = edge_pairings[i]
        else:
            m = data.pairing(bubble_of[u], bubble_of[w])
        table = {(a, b): x for a, row in enumerate(m) for b, x in enumerate(row) if x != 0}
        if not table:
            return Fraction(0)
        factors.append(((2 * i, 2 * i + 1), table))
    return contract(factors)


def torelli_raw(data: TorelliData, n: int) -> DiagramVector:
    """Leading Torelli difference before dividing by the normalization."""
    cat = catalogue(n)
    if data.bubble_count != 2 * n:
        return DiagramVector(n)
    coeffs: Dict[int, Fraction] = {}
    for k, d in enumerate(cat.diagrams):
        total = Fraction(0)
        for perm in itertools.permutations(range(2 * n)):
            total += torelli_contraction(d.graph, perm, data)
        coeffs[k] = total
    return DiagramVector(n, coeffs)


def torelli_leading(data: TorelliData, n: int) -> DiagramVector:
    """Coefficients over undecorated canonical diagrams (zero unless 2n bubbles)."""
    return torelli_raw(data, n).scale(Fraction(1, torelli_normalization(n)))


def as_weight(g: MultiGraph, component_of: Sequence[int], mu: Dict[Triple, Fraction], vertex_mu=None) -> Fraction:
    """Product of triple linking numbers over vertices for one edge colouring."""
    w = Fraction(1)
    for v, order in enumerate(sorted_orders(g)):
        table = mu if vertex_mu is None else vertex_mu[v]
        key = tuple(component_of[e] for e, _ in order)
        x = table.get(key, 0)
        if x == 0:
            return Fraction(0)
        w *= x
    return w


def as_leading(data: ASLinkData, n: int) -> DiagramVector:
    """Sum over edge-to-component bijections of vertex weights, times prod q_i/p_i."""
    cat = catalogue(n)
    if data.components != 3 * n:
        return DiagramVector(n)
    recip = Fraction(1)
    for f in data.framings:
        recip /= f
    coeffs: Dict[int, Fraction] = {}
    for k, d in enumerate(cat.diagrams):
        total = Fraction(0)
        for perm in itertools.permutations(range(3 * n)):
            total += as_weight(d.graph, perm, data.mu)
        coeffs[k] = total * recip
    return DiagramVector(n, coeffs)


def vanishing_threshold(kind: str, n: int) -> int:
    if n < 1:
        raise SurgeryError("n must be positive")
    if kind == "torelli":
        return 2 * n
    if kind == "as":
        return 3 * n
    raise SurgeryError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# linking matrices


def _square_symmetric(m) -> List[List[Fraction]]:
    m = linalg.to_matrix(m)
    n = len(m)
    if any(len(r) != n for r in m):
        raise SurgeryError("matrix is not square")
    if any(m[i][j] != m[j][i] for i in range(n) for j in range(i)):
        raise SurgeryError("matrix is not symmetric")
    return m


def surgery_linking_update(lk, component: int, framing=None) -> List[List[Fraction]]:
    """Linking matrix of the other components after surgery on ``component``.

    lk'(a, b) = lk(a, b) + (q/p) lk(a, K) lk(b, K), diagonal included, where
    p/q is the framing (default: the diagonal entry of K).
    """
    m = _square_symmetric(lk)
    if not 0 <= component < len(m):
        raise SurgeryError(f"component {component} out of range")
    fr = m[component][component] if framing is None else linalg.as_fraction(framing)
    if fr == 0:
        raise SurgeryError("framing must be nonzero")
    c = 1 / fr
    keep = [i for i in range(len(m)) if i != component]
    return [[m[a][b] + c * m[a][component] * m[b][component] for b in keep] for a in keep]


def plus_one_update(lk, component: int) -> List[List[Fraction]]:
    """The integer +1 case: lk'(a, b) = lk(a, b) + lk(a, K) lk(b, K)."""
    m = _square_symmetric(lk)
    keep = [i for i in range(len(m)) if i != component]
    return [[m[a][b] + m[a][component] * m[b][component] for b in keep] for a in keep]


# ---------------------------------------------------------------------------
# signature and framing correction


def signature(form) -> int:
    m = _square_symmetric(form)
    if not m:
        return 0
    pos, neg, _ = linalg.inertia(m)
    return pos - neg


def framing_correction_1(form) -> Fraction:
    """Theta coefficient of the degree-1 correction: 3 r_1 sigma."""
    return 3 * R1 * signature(form)


def r1_consistency() -> bool:
    return R1 * P1_CP3_BUNDLE == CP3_EULER_TERM


E8_CARTAN = (
    (2, -1, 0, 0, 0, 0, 0, 0),
    (-1, 2, -1, 0, 0, 0, 0, 0),
    (0, -1, 2, -1, 0, 0, 0, -1),
    (0, 0, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, 0),
    (0, 0, -1, 0, 0, 0, 0, 2),
)


def block_sum(a, b) -> List[List[Fraction]]:
    a, b = linalg.to_matrix(a), linalg.to_matrix(b)
    n, m = len(a), len(b)
    out = [[Fraction(0)] * (n + m) for _ in range(n + m)]
    for i in range(n):
        out[i][:n] = a[i]
    for i in range(m):
        out[n + i][n:] = b[i]
    return out


# ---------------------------------------------------------------------------
# connected sums


def connected_sum(a, b):
    """Block-disjoint union of two data sets of the same kind."""
    if type(a) is not type(b):
        raise SurgeryError("connected sum needs data of the same kind")
    if isinstance(a, TorelliData):
        off = a.bubble_count
        pairings = dict(a.pairings)
        pairings.update({(i + off, j + off): m for (i, j), m in b.pairings.items()})
        return TorelliData(a.ranks + b.ranks, a.tau + b.tau, pairings)
    if isinstance(a, ASLinkData):
        off = a.components
        mu = dict(a.mu)
        mu.update({(i + off, j + off, k + off): v for (i, j, k), v in b.mu.items()})
        return ASLinkData(a.components + b.components, mu, a.framings + b.framings)
    raise SurgeryError(f"unsupported data type {type(a).__name__}")
