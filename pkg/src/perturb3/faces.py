"""Face and corner combinatorics of the compactified configuration spaces.

Codimension-1 faces are indexed by the set S of colliding points: the
collision locus only depends on S, and the subgraph blown up is the one
induced on S.  Principal faces are pairs joined by a single edge, hidden
faces are larger 2-connected induced subgraphs, the anomalous face is the
whole graph, and infinite faces are connected vertex sets escaping to
infinity.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .graphs import (
    DecoratedDiagram,
    Edge,
    GraphError,
    GraphIso,
    MultiGraph,
    canonical_form,
    is_connected_subset,
    is_two_connected,
)
from .parity import lie_sign
from . import linalg


class FaceError(ValueError):
    pass


class AnomalousExclusion(FaceError):
    """The edge lies in the two-vertex diagram, whose only face is anomalous."""


PRINCIPAL, HIDDEN, ANOMALOUS, INFINITE = "principal", "hidden", "anomalous", "infinite"


@dataclass(frozen=True)
class FaceDescriptor:
    kind: str
    vertices: FrozenSet[int]
    edges: FrozenSet[int]

    @property
    def edge(self) -> Optional[int]:
        if self.kind == PRINCIPAL:
            return next(iter(self.edges))
        return None

    def sort_key(self):
        order = {PRINCIPAL: 0, HIDDEN: 1, ANOMALOUS: 2, INFINITE: 3}
        return order[self.kind], len(self.vertices), sorted(self.vertices)


def config_dimension(points: int, d: int = 3) -> int:
    return d * points


def _vertex_subsets(nv: int):
    for r in range(1, nv + 1):
        for combo in itertools.combinations(range(nv), r):
            yield frozenset(combo)


def codim1_faces(d, include_infinite: bool = True) -> List[FaceDescriptor]:
    g = d.graph if isinstance(d, DecoratedDiagram) else d
    nv = g.vertex_count
    whole = frozenset(range(nv))
    faces = []
    for s in _vertex_subsets(nv):
        induced = g.induced_edges(s)
        if len(s) >= 2 and induced and is_two_connected(g, induced) and g.edge_vertices(induced) == s:
            if s == whole:
                faces.append(FaceDescriptor(ANOMALOUS, s, induced))
            elif len(induced) == 1:
                faces.append(FaceDescriptor(PRINCIPAL, s, induced))
            else:
                faces.append(FaceDescriptor(HIDDEN, s, induced))
        if include_infinite and (len(s) == 1 or (induced and is_connected_subset(g, induced) and g.edge_vertices(induced) == s)):
            faces.append(FaceDescriptor(INFINITE, s, induced))
    return sorted(faces, key=FaceDescriptor.sort_key)


def face_counts(faces: Iterable[FaceDescriptor]) -> Dict[str, int]:
    out = {PRINCIPAL: 0, HIDDEN: 0, ANOMALOUS: 0, INFINITE: 0}
    for f in faces:
        out[f.kind] += 1
    return out


# ---------------------------------------------------------------------------
# corners


@dataclass(frozen=True)
class Lobe:
    edges: FrozenSet[int]
    children: Tuple["Lobe", ...] = ()

    def count(self) -> int:
        return 1 + sum(c.count() for c in self.children)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass(frozen=True)
class Corner:
    graph: MultiGraph
    principal: FrozenSet[int] = frozenset()
    lobes: Tuple[Lobe, ...] = ()

    def validate(self) -> None:
        g = self.graph
        for i in self.principal:
            if not 0 <= i < g.edge_count:
                raise FaceError(f"principal edge {i} out of range")
            t, h = g.edges[i]
            if t == h or g.multiplicity(t, h) != 1:
                raise FaceError(f"principal edge {i} is not a simple edge")
        if _has_cycle(g, self.principal):
            raise FaceError("principal edges contain a cycle")
        _validate_siblings(g, self.lobes, None)

    def lobe_count(self) -> int:
        return sum(l.count() for l in self.lobes)


def _has_cycle(g: MultiGraph, edge_ids: Iterable[int]) -> bool:
    parent: Dict[int, int] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            x = parent[x]
        return x

    for i in edge_ids:
        a, b = find(g.edges[i][0]), find(g.edges[i][1])
        if a == b:
            return True
        parent[a] = b
    return False


def _validate_siblings(g: MultiGraph, lobes: Sequence[Lobe], parent: Optional[Lobe]) -> None:
    for lobe in lobes:
        if any(not 0 <= i < g.edge_count for i in lobe.edges):
            raise FaceError("lobe edge out of range")
        if len(lobe.edges) < 2 or not is_two_connected(g, lobe.edges):
            raise FaceError(f"lobe {sorted(lobe.edges)} is not a 2-connected subgraph with more than one edge")
        if parent is not None and not lobe.edges < parent.edges:
            raise FaceError(f"lobe {sorted(lobe.edges)} is not strictly inside its parent")
        _validate_siblings(g, lobe.children, lobe)
    for a, b in itertools.combinations(lobes, 2):
        if a.edges & b.edges:
            raise FaceError("sibling lobes share an edge")
        if len(g.edge_vertices(a.edges) & g.edge_vertices(b.edges)) > 1:
            raise FaceError("sibling lobes share more than one vertex")


def corner_codim(c: Corner) -> int:
    """Number of principal edges plus the number of lobes at every depth."""
    c.validate()
    return len(c.principal) + c.lobe_count()


# ---------------------------------------------------------------------------
# six-face principal gluing


@dataclass(frozen=True)
class GluedFace:
    graph: MultiGraph
    tail_flags: Tuple[Tuple[int, int], ...]  # outer flags attached to the tail of e
    head_flags: Tuple[Tuple[int, int], ...]


def _graph_of(d) -> MultiGraph:
    return d.graph if isinstance(d, DecoratedDiagram) else d


def principal_gluing(d, e: int) -> List[GluedFace]:
    """The six decorated graphs sharing the principal face of edge ``e``.

    The four outer flags at the ends of ``e`` are split in every way into
    two at the tail and two at the head.  Edge indices and the direction of
    ``e`` are kept; only endpoints move.
    """
    g = _graph_of(d)
    if not 0 <= e < g.edge_count:
        raise FaceError(f"edge {e} out of range")
    u, v = g.edges[e]
    if g.vertex_count == 2 and g.edge_count == 3 and u != v and g.multiplicity(u, v) == 3:
        raise AnomalousExclusion("the two-vertex diagram has only its anomalous face")
    if u == v or g.multiplicity(u, v) != 1:
        raise FaceError(f"edge {e} is not simple; parallel edges form a hidden face")
    if g.valence(u) != 3 or g.valence(v) != 3:
        raise FaceError("principal gluing needs trivalent endpoints")
    outer = sorted(f for f in g.flags_at(u) + g.flags_at(v) if f[0] != e)
    faces = []
    for pair in itertools.combinations(outer, 2):
        rest = tuple(f for f in outer if f not in pair)
        edges = [list(x) for x in g.edges]
        for f in pair:
            edges[f[0]][f[1]] = u
        for f in rest:
            edges[f[0]][f[1]] = v
        faces.append(GluedFace(g.with_edges(map(tuple, edges)), tuple(pair), rest))
    return faces


def six_face_relation(cat, d, e: int):
    """Sum of the stored Lie classes of the six glued diagrams."""
    from .vassiliev import DiagramVector

    terms = []
    for face in principal_gluing(d, e):
        cls = cat.oriented_class(face.graph)
        if cls is not None:
            terms.append(cls)
    return DiagramVector.from_terms(cat.n, terms)


# ---------------------------------------------------------------------------
# hidden-face involutions


def _sides(g: MultiGraph, sub: FrozenSet[int], e1: int, e2: int) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    rest = [g.edges[i] for i in sub if i not in (e1, e2)]
    verts = g.edge_vertices(sub)
    parent = {x: x for x in verts}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for t, h in rest:
        parent[find(t)] = find(h)
    comps: Dict[int, set] = {}
    for x in verts:
        comps.setdefault(find(x), set()).add(x)
    if len(comps) != 2:
        raise FaceError(f"edges {e1} and {e2} do not separate the subgraph")
    a, b = sorted((frozenset(c) for c in comps.values()), key=min)
    for i in (e1, e2):
        t, h = g.edges[i]
        if (t in a) == (h in a):
            raise FaceError(f"edge {i} does not cross the cut")
    return a, b


def separating_pairs(g: MultiGraph, sub: Iterable[int]) -> List[Tuple[int, int]]:
    sub = frozenset(sub)
    out = []
    for e1, e2 in itertools.combinations(sorted(sub), 2):
        try:
            _sides(g, sub, e1, e2)
        except FaceError:
            continue
        out.append((e1, e2))
    return out


def _check_sub(g: MultiGraph, sub: FrozenSet[int]):
    if any(not 0 <= i < g.edge_count for i in sub):
        raise FaceError("subgraph edge out of range")
    if len(sub) < 2 or not is_two_connected(g, sub):
        raise FaceError("hidden faces need a 2-connected subgraph with more than one edge")


def hidden_involution(d, sub: Iterable[int], e1: int, e2: int) -> Tuple[MultiGraph, int]:
    """Swap ``e1`` and ``e2`` and reverse them relative to the cut.

    Vertices on one side q of the cut move to q - e1 - e2.  The label e1 now
    runs along the old position of e2 and vice versa, each crossing the cut
    in the direction opposite to before.  Returns the new decoration and the
    sign it contributes to the forgetful map: the point map has
    determinant -1 and the vertex-fixing identification has Lie sign +1.
    """
    g = _graph_of(d)
    sub = frozenset(sub)
    _check_sub(g, sub)
    if e1 == e2 or e1 not in sub or e2 not in sub:
        raise FaceError("need two distinct edges of the subgraph")
    psi2, psi1 = _sides(g, sub, e1, e2)

    def cut_form(i):
        t, h = g.edges[i]
        return ((t, h), 1) if t in psi2 else ((h, t), -1)  # (x in psi2, y in psi1), direction

    (p1, s1), (p2, s2) = cut_form(e1), cut_form(e2)
    edges = list(g.edges)
    # new cut direction is -s; stored (x, y) when that is +1, else (y, x)
    edges[e1] = p2 if -s1 > 0 else (p2[1], p2[0])
    edges[e2] = p1 if -s2 > 0 else (p1[1], p1[0])
    new = g.with_edges(edges)
    iso = _natural_iso(g, new, e1, e2)
    if not iso.is_valid(g, new):
        raise FaceError("internal: involution does not preserve the underlying graph")
    # one side reflected through a point in 3 dimensions, modulo translation
    return new, CONFIG_DET * lie_sign(g, iso, check=False)


CONFIG_DET = -1


def _natural_iso(g: MultiGraph, new: MultiGraph, e1: int, e2: int) -> GraphIso:
    """Identity on vertices; the edge at e2's old place is label e1 now."""
    em = list(range(g.edge_count))
    em[e1], em[e2] = e2, e1
    rev = []
    for i in range(g.edge_count):
        rev.append(g.edges[i] != new.edges[em[i]])
    return GraphIso(tuple(range(g.vertex_count)), tuple(em), tuple(rev))


@dataclass
class GluingGroup:
    graph: MultiGraph
    sub: FrozenSet[int]
    generators: List[Tuple[int, int]]
    elements: List[MultiGraph]  # decorations in the orbit, start first
    character: List[int]  # sign of the forgetful map on each element
    determinant: List[int]  # determinant of the configuration map
    well_defined: bool
    classes: List[FrozenSet[int]] = field(default_factory=list)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def surjective(self) -> bool:
        return self.well_defined and any(s < 0 for s in self.character)

    def expected_order(self) -> int:
        out = 1
        for c in self.classes:
            for k in range(2, len(c) + 1):
                out *= k
        return out


def edge_classes(g: MultiGraph, sub: Iterable[int]) -> List[FrozenSet[int]]:
    """Edges of ``sub`` grouped by the relation 'equal or jointly separating'."""
    sub = frozenset(sub)
    parent = {i: i for i in sub}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for a, b in separating_pairs(g, sub):
        parent[find(a)] = find(b)
    groups: Dict[int, set] = {}
    for i in sub:
        groups.setdefault(find(i), set()).add(i)
    return sorted((frozenset(x) for x in groups.values()), key=min)


def gluing_group(d, sub: Iterable[int], limit: int = 100000) -> GluingGroup:
    """Orbit of the decoration under all hidden involutions of ``sub``.

    Each orbit element records the product of involution signs along a path
    from the start; ``well_defined`` is false if two paths disagree.
    """
    g = _graph_of(d)
    sub = frozenset(sub)
    _check_sub(g, sub)
    gens = separating_pairs(g, sub)
    seen = {g.edges: (1, 1)}  # (character, determinant)
    order = [g]
    ok = True
    queue = deque([g])
    while queue:
        cur = queue.popleft()
        chi, det = seen[cur.edges]
        for e1, e2 in separating_pairs(cur, sub):
            nxt, s = hidden_involution(cur, sub, e1, e2)
            val = (chi * s, det * CONFIG_DET)
            if nxt.edges in seen:
                ok = ok and seen[nxt.edges] == val
                continue
            seen[nxt.edges] = val
            order.append(nxt)
            queue.append(nxt)
            if len(order) > limit:
                raise FaceError("gluing group larger than the enumeration limit")
    return GluingGroup(
        g, sub, gens, order, [seen[x.edges][0] for x in order], [seen[x.edges][1] for x in order], ok,
        edge_classes(g, sub),
    )


def orbit_sum(cat, group: GluingGroup):
    """Signed sum of the Lie classes over the orbit (zero when the face cancels)."""
    from .vassiliev import DiagramVector

    terms = []
    for graph, det in zip(group.elements, group.determinant):
        k, c = cat.stored_class(graph)
        terms.append((k, det * c))
    return DiagramVector.from_terms(cat.n, terms)


# ---------------------------------------------------------------------------
# reversal symmetries


def reversal_sign(vertex_count: int, edge_count: int, moved_points: Optional[int] = None) -> int:
    """Effect on f of reflecting points and reversing edges.

    Reflecting ``moved_points`` points through a centre in 3-space has
    determinant (-1)^(3 m); reversing the edges contributes (-1)^edges.
    With ``moved_points`` omitted the whole subgraph is reflected, which
    moves vertex_count - 1 points modulo translation.
    """
    m = vertex_count - 1 if moved_points is None else moved_points
    return (-1) ** (3 * m) * (-1) ** edge_count


def anomaly_parity(d) -> int:
    """-1 when reversing the whole diagram negates f (the anomaly cancels)."""
    g = _graph_of(d)
    return reversal_sign(g.vertex_count, g.edge_count)


# ---------------------------------------------------------------------------
# surjection onto V_n


@dataclass
class SurjectionReport:
    n: int
    principal_checked: int = 0
    principal_failures: List[Tuple[int, int]] = field(default_factory=list)
    excluded: List[Tuple[int, int]] = field(default_factory=list)
    hidden_checked: int = 0
    hidden_failures: List[Tuple[int, FrozenSet[int], str]] = field(default_factory=list)
    span_equal: Optional[bool] = None
    span_contained: Optional[bool] = None

    @property
    def passed(self) -> bool:
        if self.principal_failures or self.hidden_failures:
            return False
        if self.span_contained is False:
            return False
        return self.span_equal is not False


def surjection_check(n: int, extra_relations: Iterable = ()) -> SurjectionReport:
    from .vassiliev import build_space, catalogue, orientation_relations

    cat = catalogue(n)
    space = build_space(n, extra=extra_relations)
    rep = SurjectionReport(n)
    six = linalg.SparseEchelon(len(cat))
    for k, dg in enumerate(cat.diagrams):
        g = dg.graph
        for e in range(g.edge_count):
            try:
                rel = six_face_relation(cat, g, e)
            except AnomalousExclusion:
                rep.excluded.append((k, e))
                continue
            except FaceError:
                continue  # parallel edge: hidden, not principal
            rep.principal_checked += 1
            six.add(rel.coeffs)
            if not space.normal_form(rel).is_zero():
                rep.principal_failures.append((k, e))
        for face in codim1_faces(g, include_infinite=False):
            if face.kind != HIDDEN:
                continue
            rep.hidden_checked += 1
            grp = gluing_group(g, face.edges)
            if not grp.surjective:
                rep.hidden_failures.append((k, face.edges, "character not surjective"))
            elif grp.order != grp.expected_order():
                rep.hidden_failures.append((k, face.edges, f"order {grp.order} != {grp.expected_order()}"))
            elif not orbit_sum(cat, grp).is_zero():
                rep.hidden_failures.append((k, face.edges, "orbit sum does not vanish"))
    for r in orientation_relations(n):
        six.add(r.coeffs)
    rep.span_contained = all(space.echelon.contains(dict(r)) for r in six.rows.values())
    if n <= 2:
        rep.span_equal = six.same_span(space.echelon)
    return rep


# ---------------------------------------------------------------------------
# degenerate locus


@dataclass
class DegenerateReport:
    k: int
    graph_count: int
    max_vertices: int
    vertex_bound_ok: bool
    max_dimension: int
    dimension_bound_ok: bool
    witnesses: List[MultiGraph] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.vertex_bound_ok and self.dimension_bound_ok


def _allowed(val: Sequence[int]) -> bool:
    return all(x != 0 and x != 1 for x in val) and sum(1 for x in val if x == 2) <= 1


def degenerate_graphs(k: int) -> List[MultiGraph]:
    """Multigraphs with k edges, loops counted twice, no vertex of valence
    0 or 1, at most one of valence 2; one per isomorphism class."""
    if k < 1:
        raise FaceError("k must be positive")
    level = {()}
    for step in range(k):
        remaining = k - step - 1
        nxt = set()
        for edges in level:
            nv = 1 + max((v for e in edges for v in e), default=-1)
            # fresh vertices are nv and nv + 1
            choices = [(a, b) for a in range(nv) for b in range(a, nv + 1)]
            choices += [(nv, nv), (nv, nv + 1)]
            for new_edge in choices:
                new = edges + (new_edge,)
                used = 1 + max(v for e in new for v in e)
                val = [0] * used
                for t, h in new:
                    val[t] += 1
                    val[h] += 1
                # one vertex may stop at valence 2, every other needs 3
                if sum(max(0, 3 - x) for x in val) - 1 > 2 * remaining:
                    continue
                nxt.add(canonical_form(MultiGraph(used, new, allow_self_loops=True))[0].edges)
        level = nxt
    out = []
    for edges in level:
        nv = 1 + max(v for e in edges for v in e)
        g = MultiGraph(nv, edges, allow_self_loops=True)
        if _allowed(g.valences()):
            out.append(g)
    return sorted(out, key=lambda g: (g.vertex_count, g.edges))


def degenerate_bound(k: int) -> DegenerateReport:
    graphs = degenerate_graphs(k)
    vmax = max(g.vertex_count for g in graphs)
    vert_ok = all(Fraction(g.vertex_count) <= Fraction(2 * k + 1, 3) for g in graphs)
    dim = 3 * vmax - 4
    witnesses = [g for g in graphs if g.vertex_count == vmax]
    return DegenerateReport(k, len(graphs), vmax, vert_ok, dim, dim <= 2 * k - 3, witnesses)
