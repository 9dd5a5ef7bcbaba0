"""Sign characters of the parity functors on graph automorphisms.

Every functor is evaluated straight from its definition on the automorphism
(edge, vertex and flag permutations, local flag orders, determinants on
chains and cycles).  The relations between them are then checked rather
than assumed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from . import linalg
from .graphs import GraphIso, MultiGraph, automorphisms


class ParityFunctorId(enum.Enum):
    ONE = "ONE"
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    E = "E"
    F = "F"
    G = "G"
    H = "H"
    I = "I"

    @classmethod
    def parse(cls, name: str) -> "ParityFunctorId":
        key = name.strip().upper()
        if key == "1":
            key = "ONE"
        return cls(key)


P = ParityFunctorId
GENERATORS = (P.A, P.B, P.C, P.D)

# generator subsets for each functor
TABLE: Dict[ParityFunctorId, FrozenSet[ParityFunctorId]] = {
    P.ONE: frozenset(),
    P.A: frozenset({P.A}),
    P.B: frozenset({P.B}),
    P.C: frozenset({P.C}),
    P.D: frozenset({P.D}),
    P.E: frozenset({P.D}),
    P.F: frozenset({P.B, P.D}),
    P.G: frozenset({P.B, P.C}),
    P.H: frozenset({P.A, P.D}),
    P.I: frozenset({P.A, P.B, P.C, P.D}),
}

# (left, right factors) for the five displayed isomorphisms
RELATIONS: Tuple[Tuple[str, ParityFunctorId, Tuple[ParityFunctorId, ...]], ...] = (
    ("E=D", P.E, (P.D,)),
    ("F=B*E", P.F, (P.B, P.E)),
    ("G=B*C", P.G, (P.B, P.C)),
    ("H=A*E", P.H, (P.A, P.E)),
    ("I=G*H", P.I, (P.G, P.H)),
)


class ParityError(ValueError):
    pass


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation of ``range(len(perm))`` via cycle counting."""
    n = len(perm)
    seen = [False] * n
    sign = 1
    for i in range(n):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _relative_sign(before: Sequence, after: Sequence) -> int:
    """Sign of the permutation carrying list ``before`` onto list ``after``."""
    index = {x: i for i, x in enumerate(after)}
    if len(index) != len(before) or any(x not in index for x in before):
        raise ParityError("sequences are not rearrangements of each other")
    return permutation_sign([index[x] for x in before])


def _restricted_sign(vertex_map: Sequence[int], keep: Sequence[int]) -> int:
    pos = {v: i for i, v in enumerate(keep)}
    return permutation_sign([pos[vertex_map[v]] for v in keep])


def _flag_sign(g: MultiGraph, a: GraphIso) -> int:
    flags = g.flags()
    index = {f: i for i, f in enumerate(flags)}
    return permutation_sign([index[a.flag_image(f)] for f in flags])


def _local_sign(g: MultiGraph, a: GraphIso) -> int:
    sign = 1
    for v in range(g.vertex_count):
        image = [a.flag_image(f) for f in g.flags_at(v)]
        sign *= _relative_sign(image, g.flags_at(a.vertex_map[v]))
    return sign


def chain_matrix(g: MultiGraph, a: GraphIso) -> List[List[int]]:
    """Matrix of the induced map on 1-chains; column i is the image of edge i."""
    m = [[0] * g.edge_count for _ in range(g.edge_count)]
    for i in range(g.edge_count):
        m[a.edge_map[i]][i] = -1 if a.reversal[i] else 1
    return m


def boundary_matrix(g: MultiGraph) -> List[List[int]]:
    d = [[0] * g.edge_count for _ in range(g.vertex_count)]
    for i, (t, h) in enumerate(g.edges):
        d[h][i] += 1
        d[t][i] -= 1
    return d


def cycle_space_determinant(g: MultiGraph, a: GraphIso):
    """Determinant of the induced map on the cycle space (exact)."""
    basis = linalg.nullspace(boundary_matrix(g), g.edge_count)
    if not basis:
        return linalg.Fraction(1)
    m = chain_matrix(g, a)
    images = [[sum(m[r][c] * b[c] for c in range(g.edge_count)) for r in range(g.edge_count)] for b in basis]
    coords = [linalg.solve_in_basis(basis, img) for img in images]
    # coords[j] is the column for basis vector j
    mat = [[coords[j][i] for j in range(len(basis))] for i in range(len(basis))]
    return linalg.det(mat)


def _sign_of(x) -> int:
    if x == 0:
        raise ParityError("induced map is singular")
    return 1 if x > 0 else -1


def functor_sign(f: ParityFunctorId, g: MultiGraph, a: GraphIso, check: bool = True) -> int:
    """Sign of the automorphism ``a`` of ``g`` under parity functor ``f``."""
    if isinstance(f, str):
        f = ParityFunctorId.parse(f)
    if check and not a.is_valid(g, g):
        raise ParityError("map is not an automorphism of the graph")
    if f is P.ONE:
        return 1
    if f is P.A:
        return permutation_sign(a.edge_map)
    if f in (P.B, P.C):
        val = g.valences()
        want = 1 if f is P.B else 0
        keep = [v for v in range(g.vertex_count) if val[v] % 2 == want]
        return _restricted_sign(a.vertex_map, keep)
    if f is P.D:
        return -1 if sum(a.reversal) % 2 else 1
    if f is P.E:
        return _flag_sign(g, a)
    if f is P.F:
        return _local_sign(g, a)
    if f is P.G:
        return permutation_sign(a.vertex_map)
    if f is P.H:
        return _sign_of(linalg.det(chain_matrix(g, a)))
    if f is P.I:
        return _sign_of(cycle_space_determinant(g, a))
    raise ParityError(f"unknown functor {f}")


def all_signs(g: MultiGraph, a: GraphIso) -> Dict[ParityFunctorId, int]:
    return {f: functor_sign(f, g, a, check=False) for f in ParityFunctorId}


def table_expression(f: ParityFunctorId) -> FrozenSet[ParityFunctorId]:
    if isinstance(f, str):
        f = ParityFunctorId.parse(f)
    return TABLE[f]


def lie_sign(g: MultiGraph, a: GraphIso, check: bool = True) -> int:
    """Sign of ``a`` on Lie orientations (edge orientations and vertex order)."""
    return functor_sign(P.D, g, a, check) * functor_sign(P.G, g, a, check=False)


@dataclass
class RelationResult:
    name: str
    passed: bool
    counterexample: Optional[GraphIso] = None


@dataclass
class RelationReport:
    graph: MultiGraph
    automorphism_count: int
    relations: List[RelationResult] = field(default_factory=list)
    table: List[RelationResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations + self.table)


def verify_relations(g: MultiGraph, autos: Optional[List[GraphIso]] = None) -> RelationReport:
    """Check the five relations and every table row on every automorphism."""
    if not g.is_connected():
        raise ParityError("relations are checked on connected graphs")
    autos = automorphisms(g) if autos is None else autos
    rels = {name: RelationResult(name, True) for name, _, _ in RELATIONS}
    tab = {f: RelationResult(f"table {f.value}", True) for f in ParityFunctorId}
    for a in autos:
        s = all_signs(g, a)
        for name, lhs, rhs in RELATIONS:
            prod = 1
            for x in rhs:
                prod *= s[x]
            if s[lhs] != prod and rels[name].passed:
                rels[name] = RelationResult(name, False, a)
        for f in ParityFunctorId:
            prod = 1
            for x in TABLE[f]:
                prod *= s[x]
            if s[f] != prod and tab[f].passed:
                tab[f] = RelationResult(tab[f].name, False, a)
    return RelationReport(g, len(autos), list(rels.values()), list(tab.values()))


def _gf2_rank(vectors: List[int]) -> Tuple[int, List[int]]:
    """Rank over F2 of bitmask vectors and the indices of a spanning subset."""
    basis: Dict[int, int] = {}
    chosen = []
    for idx, v in enumerate(vectors):
        x = v
        while x:
            top = x.bit_length() - 1
            if top not in basis:
                basis[top] = x
                chosen.append(idx)
                break
            x ^= basis[top]
    return len(basis), chosen


def sign_vector(g: MultiGraph, a: GraphIso) -> Tuple[int, int, int, int]:
    return tuple(functor_sign(f, g, a, check=False) for f in GENERATORS)


@dataclass
class IndependenceResult:
    independent: bool
    rank: int
    witnesses: List[GraphIso]
    vectors: List[Tuple[int, int, int, int]]


def independence_witness(g: MultiGraph) -> IndependenceResult:
    """Are the characters A, B, C, D independent on Aut(g)?"""
    if not g.is_connected():
        raise ParityError("independence is tested on connected graphs")
    autos = automorphisms(g)
    vecs = [sign_vector(g, a) for a in autos]
    masks = [sum(1 << k for k, s in enumerate(v) if s < 0) for v in vecs]
    r, chosen = _gf2_rank(masks)
    return IndependenceResult(r == 4, r, [autos[i] for i in chosen], [vecs[i] for i in chosen])
