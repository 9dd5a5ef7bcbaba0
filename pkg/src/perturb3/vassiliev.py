"""The spaces V_n: diagram spans modulo IHX and orientation reversal.

Orientation bookkeeping
-----------------------
A decorated diagram carries a *stored* Lie orientation: its edge
orientations together with the vertex order given by vertex ids.  A choice
of local flag orders ``L`` (one ordering of the three flags at each vertex,
as in a blackboard picture) is converted to the stored orientation by the
sign of the permutation between the two total orders of all flags::

    E_D = (0 tail, 0 head, 1 tail, 1 head, ...)
    E_F = flags at vertex 0 in order L[0], then vertex 1, ...

Each canonical diagram is a basis vector of the ambient span, oriented by
its sorted local flag orders (the reference orientation).
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from . import linalg
from .graphs import (
    DecoratedDiagram,
    Flag,
    GraphError,
    MultiGraph,
    automorphisms,
    canonical_form,
    enumerate_diagrams,
)
from .parity import _relative_sign, lie_sign

LocalOrders = Tuple[Tuple[Flag, ...], ...]

MAX_N_ENV = "PERTURB3_MAX_N"
DEFAULT_MAX_N = 5


class ResourceBoundError(RuntimeError):
    """Requested degree exceeds the configured feasibility bound."""


class DegreeMismatch(ValueError):
    pass


def max_n() -> int:
    raw = os.environ.get(MAX_N_ENV)
    if raw is None:
        return DEFAULT_MAX_N
    try:
        return int(raw)
    except ValueError:
        raise ResourceBoundError(f"{MAX_N_ENV} must be an integer, got {raw!r}") from None


def check_bound(n: int) -> None:
    if n < 1:
        raise GraphError("degree must be at least 1")
    if n > max_n():
        raise ResourceBoundError(f"degree {n} exceeds the feasibility bound {max_n()} (set {MAX_N_ENV})")


def sorted_orders(g: MultiGraph) -> LocalOrders:
    return tuple(tuple(g.flags_at(v)) for v in range(g.vertex_count))


def flag_orientation_sign(g: MultiGraph, orders: LocalOrders) -> int:
    """Sign relating local flag orders to the stored Lie orientation."""
    e_d = g.flags()
    e_f = [f for v in range(g.vertex_count) for f in orders[v]]
    for v in range(g.vertex_count):
        if sorted(orders[v]) != g.flags_at(v):
            raise GraphError(f"local order at vertex {v} does not list its flags")
    return _relative_sign(e_d, e_f)


# ---------------------------------------------------------------------------
# diagram catalogue


@dataclass(frozen=True)
class Catalogue:
    n: int
    diagrams: Tuple[DecoratedDiagram, ...]
    index: Dict[Tuple, int]
    reference_sign: Tuple[int, ...]
    odd: Tuple[bool, ...]  # has an automorphism reversing the Lie orientation

    def __len__(self):
        return len(self.diagrams)

    def stored_class(self, g: MultiGraph) -> Tuple[int, int]:
        """(id, sign) with stored(g) = sign * reference(id)."""
        canon, iso = canonical_form(g)
        k = self.index.get(canon.edges)
        if k is None or canon.vertex_count != 2 * self.n:
            raise GraphError("graph is not a degree-%d diagram" % self.n)
        return k, lie_sign(g, iso, check=False) * self.reference_sign[k]

    def oriented_class(self, g: MultiGraph, orders: Optional[LocalOrders] = None) -> Optional[Tuple[int, int]]:
        """Class of ``g`` with local orders (default: stored); None if zero."""
        if g.has_self_loops():
            return None
        k, s = self.stored_class(g)
        if orders is not None:
            s *= flag_orientation_sign(g, orders)
        return k, s


@lru_cache(maxsize=None)
def catalogue(n: int) -> Catalogue:
    check_bound(n)
    diagrams = tuple(enumerate_diagrams(n))
    index = {d.graph.edges: k for k, d in enumerate(diagrams)}
    ref = tuple(flag_orientation_sign(d.graph, sorted_orders(d.graph)) for d in diagrams)
    odd = tuple(any(lie_sign(d.graph, a, check=False) < 0 for a in automorphisms(d.graph)) for d in diagrams)
    return Catalogue(n, diagrams, index, ref, odd)


# ---------------------------------------------------------------------------
# vectors


def _clean(coeffs: Dict[int, Fraction]) -> Dict[int, Fraction]:
    return {k: Fraction(v) for k, v in sorted(coeffs.items()) if v != 0}


@dataclass(frozen=True)
class DiagramVector:
    n: int
    coeffs: Dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _clean({k: linalg.as_fraction(v) for k, v in self.coeffs.items()}))

    def __add__(self, other: "DiagramVector") -> "DiagramVector":
        _same_degree(self.n, other.n)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return DiagramVector(self.n, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DiagramVector":
        c = linalg.as_fraction(c)
        return DiagramVector(self.n, {k: c * v for k, v in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    @classmethod
    def basis_vector(cls, n: int, k: int, c=1) -> "DiagramVector":
        return cls(n, {k: c})

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[Tuple[int, object]]) -> "DiagramVector":
        out: Dict[int, Fraction] = {}
        for k, c in terms:
            out[k] = out.get(k, Fraction(0)) + linalg.as_fraction(c)
        return cls(n, out)


def _same_degree(a: int, b: int):
    if a != b:
        raise DegreeMismatch(f"degree {a} vs degree {b}")


# ---------------------------------------------------------------------------
# IHX


def _rotate_to_end(order: Sequence[Flag], flag: Flag) -> Tuple[Flag, Flag]:
    i = list(order).index(flag)
    return order[(i + 1) % 3], order[(i + 2) % 3]


def ihx_terms(g: MultiGraph, orders: LocalOrders, e: int):
    """The I, H and X pictures at edge ``e`` as (graph, local orders).

    ``e`` runs from u (bottom of the I) to v (top).  Reading the pictures
    clockwise, v = (UL, UR, e) and u = (e, LR, LL); then
    H has v = (UL, e, LL), u = (e, UR, LR) and X has v = (UR, e, LL),
    u = (e, UL, LR).  The relation is I - H + X = 0.
    """
    u, v = g.edges[e]
    if u == v:
        raise GraphError("IHX needs a non-loop edge")
    fe_u, fe_v = (e, 0), (e, 1)
    ul, ur = _rotate_to_end(orders[v], fe_v)
    lr, ll = _rotate_to_end(orders[u], fe_u)

    def build(at_v: Tuple[Flag, Flag, Flag], at_u: Tuple[Flag, Flag, Flag]):
        edges = [list(x) for x in g.edges]
        for f in at_v:
            edges[f[0]][f[1]] = v
        for f in at_u:
            edges[f[0]][f[1]] = u
        new_orders = list(orders)
        new_orders[v] = at_v
        new_orders[u] = at_u
        return MultiGraph(g.vertex_count, tuple(map(tuple, edges)), allow_self_loops=True), tuple(new_orders)

    i_term = build((ul, ur, fe_v), (fe_u, lr, ll))
    h_term = build((ul, fe_v, ll), (fe_u, ur, lr))
    x_term = build((ur, fe_v, ll), (fe_u, ul, lr))
    return i_term, h_term, x_term


def ihx_vector(cat: Catalogue, g: MultiGraph, orders: LocalOrders, e: int) -> DiagramVector:
    terms = []
    for coeff, (gr, od) in zip((1, -1, 1), ihx_terms(g, orders, e)):
        cls = cat.oriented_class(gr, od)
        if cls is not None:
            terms.append((cls[0], coeff * cls[1]))
    return DiagramVector.from_terms(cat.n, terms)


def _normalized(v: DiagramVector) -> Optional[Tuple[Tuple[int, Fraction], ...]]:
    if v.is_zero():
        return None
    lead = v.coeffs[min(v.coeffs)]
    return tuple((k, c / lead) for k, c in sorted(v.coeffs.items()))


def _dedupe(vectors: Iterable[DiagramVector]) -> List[DiagramVector]:
    seen = set()
    out = []
    for v in vectors:
        key = _normalized(v)
        if key is None or key in seen:
            continue
        seen.add(key)
        out.append(v)
    return out


def ihx_relations(n: int, rng: Optional[random.Random] = None) -> List[DiagramVector]:
    """All IHX relations, one per (diagram, edge), deduplicated up to scale.

    With ``rng`` each diagram is first relabelled, re-oriented and given
    random local flag orders; the resulting relation set must span the same
    space.
    """
    cat = catalogue(n)
    rels = []
    for d in cat.diagrams:
        g, orders = d.graph, sorted_orders(d.graph)
        if rng is not None:
            g, orders = scramble(g, orders, rng)
        for e in range(g.edge_count):
            rels.append(ihx_vector(cat, g, orders, e))
    return _dedupe(rels)


def scramble(g: MultiGraph, orders: LocalOrders, rng: random.Random) -> Tuple[MultiGraph, LocalOrders]:
    """Random relabelling of vertices and edges, edge flips and local orders."""
    vp = list(range(g.vertex_count))
    rng.shuffle(vp)
    ep = list(range(g.edge_count))
    rng.shuffle(ep)
    flip = [rng.random() < 0.5 for _ in range(g.edge_count)]
    edges = [None] * g.edge_count
    for i, (t, h) in enumerate(g.edges):
        t, h = vp[t], vp[h]
        edges[ep[i]] = (h, t) if flip[i] else (t, h)
    new = MultiGraph(g.vertex_count, tuple(edges))

    def img(f: Flag) -> Flag:
        return ep[f[0]], f[1] ^ int(flip[f[0]])

    new_orders: List[Tuple[Flag, ...]] = [()] * g.vertex_count
    for v in range(g.vertex_count):
        o = [img(f) for f in orders[v]]
        rng.shuffle(o)
        new_orders[vp[v]] = tuple(o)
    return new, tuple(new_orders)


def orientation_relations(n: int) -> List[DiagramVector]:
    """Gamma = 0 for every class with a Lie-orientation-reversing automorphism."""
    cat = catalogue(n)
    return [DiagramVector.basis_vector(n, k) for k in range(len(cat)) if cat.odd[k]]


# ---------------------------------------------------------------------------
# quotient


@dataclass
class VassilievBasis:
    n: int
    ambient_dim: int
    relations: List[DiagramVector]
    echelon: linalg.SparseEchelon
    basis_ids: List[int]

    @property
    def dimension(self) -> int:
        return len(self.basis_ids)

    @property
    def relation_rank(self) -> int:
        return self.echelon.rank

    def normal_form(self, v: DiagramVector) -> DiagramVector:
        _same_degree(self.n, v.n)
        return DiagramVector(self.n, self.echelon.normal_form(v.coeffs))


def build_space(n: int, rng: Optional[random.Random] = None, extra: Iterable[DiagramVector] = ()) -> VassilievBasis:
    """Row-reduce IHX and orientation relations exactly."""
    cat = catalogue(n)
    rels = ihx_relations(n, rng) + orientation_relations(n) + list(extra)
    ech = linalg.SparseEchelon(len(cat))
    for r in rels:
        _same_degree(n, r.n)
        ech.add(r.coeffs)
    pivots = set(ech.pivots)
    free = [k for k in range(len(cat)) if k not in pivots]
    return VassilievBasis(n, len(cat), rels, ech, free)


def reduce(v: DiagramVector, basis: VassilievBasis) -> List[Fraction]:
    """Coordinates of ``v`` along ``basis.basis_ids``."""
    nf = basis.normal_form(v)
    return [nf.coeffs.get(k, Fraction(0)) for k in basis.basis_ids]


@dataclass(frozen=True)
class WeightSystem:
    n: int
    values: Tuple[Fraction, ...]  # one per basis vector

    @classmethod
    def dual_basis(cls, basis: VassilievBasis, position: int) -> "WeightSystem":
        vals = [Fraction(0)] * basis.dimension
        vals[position] = Fraction(1)
        return cls(basis.n, tuple(vals))

    @classmethod
    def dual_of(cls, basis: VassilievBasis, v: DiagramVector) -> "WeightSystem":
        """Functional taking ``v`` to 1 and vanishing on a complement.

        Only defined when V_n is 1-dimensional or ``v`` is a basis vector.
        """
        coords = reduce(v, basis)
        nonzero = [i for i, c in enumerate(coords) if c != 0]
        if not nonzero:
            raise ValueError("vector is zero in V_n")
        if basis.dimension != 1 and not (len(nonzero) == 1 and coords[nonzero[0]] == 1):
            raise ValueError("dual is ambiguous in dimension > 1 unless v is a basis vector")
        i = nonzero[0]
        vals = [Fraction(0)] * basis.dimension
        vals[i] = 1 / coords[i]
        return cls(basis.n, tuple(vals))


def pair(w: WeightSystem, v: DiagramVector, basis: VassilievBasis) -> Fraction:
    _same_degree(w.n, v.n)
    _same_degree(w.n, basis.n)
    return sum((a * b for a, b in zip(w.values, reduce(v, basis))), Fraction(0))


# ---------------------------------------------------------------------------
# the two degree-2 pictures with their blackboard orientations


def blackboard_double_theta() -> Tuple[MultiGraph, LocalOrders]:
    """Circle with two chords cutting off the top and bottom arcs.

    Vertices A, B (top chord, left/right), C, D (bottom chord, left/right).
    Edges: 0 outer arc A->B, 1 chord A->B, 2 B->D, 3 outer arc C->D,
    4 chord C->D, 5 A->C.  Local orders are clockwise in the picture.
    """
    g = MultiGraph(4, ((0, 1), (0, 1), (1, 3), (2, 3), (2, 3), (0, 2)))
    orders = (
        ((0, 0), (1, 0), (5, 0)),
        ((2, 0), (1, 1), (0, 1)),
        ((5, 1), (4, 0), (3, 0)),
        ((3, 1), (4, 1), (2, 1)),
    )
    return g, orders


def blackboard_tetrahedron() -> Tuple[MultiGraph, LocalOrders]:
    """Circle with centre O joined to T (top), L (lower left), R (lower right).

    Edges: 0 O->T, 1 O->L, 2 O->R, 3 T->L, 4 L->R, 5 R->T (the arcs).
    """
    g = MultiGraph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (2, 3), (3, 1)))
    orders = (
        ((0, 0), (2, 0), (1, 0)),
        ((5, 1), (0, 1), (3, 0)),
        ((4, 0), (3, 1), (1, 1)),
        ((4, 1), (2, 1), (5, 0)),
    )
    return g, orders


def picture_vector(n: int, picture: Tuple[MultiGraph, LocalOrders]) -> DiagramVector:
    cat = catalogue(n)
    cls = cat.oriented_class(*picture)
    if cls is None:
        return DiagramVector(n)
    return DiagramVector.basis_vector(n, cls[0], cls[1])


def theta_vector() -> DiagramVector:
    return DiagramVector.basis_vector(1, 0)
