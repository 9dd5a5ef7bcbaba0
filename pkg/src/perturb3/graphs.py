"""Finite multigraphs with ordered, oriented edges.

A :class:`MultiGraph` is the carrier for every graph in the package: closed
Jacobi diagrams, the graphs of the parity category (which may carry
self-loops), configuration-space clusters and the degenerate-locus graphs.
Edge order and edge orientation are decorations; isomorphism and canonical
forms ignore them but report them through a :class:`GraphIso`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

Edge = Tuple[int, int]
Flag = Tuple[int, int]  # (edge index, slot) with slot 0 = tail, 1 = head

TAIL, HEAD = 0, 1


class GraphError(ValueError):
    """Malformed graph or violated precondition."""


@dataclass(frozen=True)
class MultiGraph:
    vertex_count: int
    edges: Tuple[Edge, ...]
    allow_self_loops: bool = False

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(t), int(h)) for t, h in self.edges))
        if self.vertex_count < 0:
            raise GraphError("negative vertex count")
        for i, (t, h) in enumerate(self.edges):
            if not (0 <= t < self.vertex_count and 0 <= h < self.vertex_count):
                raise GraphError(f"edge {i} = ({t}, {h}) references a missing vertex")
            if t == h and not self.allow_self_loops:
                raise GraphError(f"edge {i} is a self-loop but self-loops are not allowed")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def endpoint(self, flag: Flag) -> int:
        return self.edges[flag[0]][flag[1]]

    def flags(self) -> List[Flag]:
        return [(i, s) for i in range(len(self.edges)) for s in (TAIL, HEAD)]

    def flags_at(self, v: int) -> List[Flag]:
        """Flags at ``v`` in reference order (sorted by edge, then slot)."""
        return [(i, s) for i, e in enumerate(self.edges) for s in (TAIL, HEAD) if e[s] == v]

    def valence(self, v: int) -> int:
        return sum((t == v) + (h == v) for t, h in self.edges)

    def valences(self) -> List[int]:
        val = [0] * self.vertex_count
        for t, h in self.edges:
            val[t] += 1
            val[h] += 1
        return val

    def multiplicity(self, a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        return sum(1 for t, h in self.edges if (min(t, h), max(t, h)) == key)

    def has_self_loops(self) -> bool:
        return any(t == h for t, h in self.edges)

    def neighbors(self, v: int) -> Set[int]:
        out = set()
        for t, h in self.edges:
            if t == v:
                out.add(h)
            if h == v:
                out.add(t)
        return out

    def simple_edges(self) -> List[int]:
        """Edges that are not a self-loop and have no parallel partner."""
        return [i for i, (t, h) in enumerate(self.edges) if t != h and self.multiplicity(t, h) == 1]

    def is_connected(self) -> bool:
        return self.vertex_count <= 1 or len(_components(range(self.vertex_count), self.edges)[0]) == self.vertex_count

    def betti_number(self) -> int:
        ncomp = len(_components(range(self.vertex_count), self.edges))
        return self.edge_count - self.vertex_count + ncomp

    def with_edges(self, edges: Iterable[Edge]) -> "MultiGraph":
        return MultiGraph(self.vertex_count, tuple(edges), self.allow_self_loops)

    def reversed_edge(self, i: int) -> "MultiGraph":
        es = list(self.edges)
        es[i] = (es[i][1], es[i][0])
        return self.with_edges(es)

    def edge_vertices(self, edge_subset: Iterable[int]) -> FrozenSet[int]:
        return frozenset(v for i in edge_subset for v in self.edges[i])

    def induced_edges(self, vertex_subset: Iterable[int]) -> FrozenSet[int]:
        vs = set(vertex_subset)
        return frozenset(i for i, (t, h) in enumerate(self.edges) if t in vs and h in vs)

    def __str__(self) -> str:
        return format_graph(self)


@dataclass(frozen=True)
class DecoratedDiagram:
    """Connected trivalent loopless multigraph with ordered, oriented edges."""

    graph: MultiGraph
    loop_order: int

    def __post_init__(self):
        g, n = self.graph, self.loop_order
        if g.allow_self_loops or g.has_self_loops():
            raise GraphError("Jacobi diagrams carry no self-loops")
        if n < 1:
            raise GraphError("loop order must be positive")
        if g.vertex_count != 2 * n or g.edge_count != 3 * n:
            raise GraphError(f"degree {n} diagrams have {2 * n} vertices and {3 * n} edges")
        if any(d != 3 for d in g.valences()):
            raise GraphError("every vertex must be trivalent")
        if not g.is_connected():
            raise GraphError("diagram must be connected")
        if g.betti_number() != n + 1:
            raise GraphError("first Betti number must be n + 1")

    @classmethod
    def from_graph(cls, g: MultiGraph) -> "DecoratedDiagram":
        if g.vertex_count % 2:
            raise GraphError("a trivalent graph has an even number of vertices")
        return cls(g, g.vertex_count // 2)


@dataclass(frozen=True)
class GraphIso:
    """Isomorphism of decorated multigraphs ``source -> target``.

    Edge ``i`` of the source is sent to edge ``edge_map[i]`` of the target;
    ``reversal[i]`` says the orientation is flipped on the way.
    """

    vertex_map: Tuple[int, ...]
    edge_map: Tuple[int, ...]
    reversal: Tuple[bool, ...]

    def is_valid(self, source: MultiGraph, target: MultiGraph) -> bool:
        if len(self.vertex_map) != source.vertex_count or source.vertex_count != target.vertex_count:
            return False
        if len(self.edge_map) != source.edge_count or source.edge_count != target.edge_count:
            return False
        if sorted(self.vertex_map) != list(range(source.vertex_count)):
            return False
        if sorted(self.edge_map) != list(range(source.edge_count)):
            return False
        for i, (t, h) in enumerate(source.edges):
            img = (self.vertex_map[t], self.vertex_map[h])
            if self.reversal[i]:
                img = (img[1], img[0])
            if target.edges[self.edge_map[i]] != img:
                return False
        return True

    def flag_image(self, flag: Flag) -> Flag:
        i, s = flag
        return self.edge_map[i], s ^ int(self.reversal[i])

    def compose(self, first: "GraphIso") -> "GraphIso":
        """``self`` after ``first``."""
        vm = tuple(self.vertex_map[x] for x in first.vertex_map)
        em = tuple(self.edge_map[x] for x in first.edge_map)
        rev = tuple(first.reversal[i] ^ self.reversal[first.edge_map[i]] for i in range(len(first.edge_map)))
        return GraphIso(vm, em, rev)

    def inverse(self) -> "GraphIso":
        vm = [0] * len(self.vertex_map)
        for a, b in enumerate(self.vertex_map):
            vm[b] = a
        em = [0] * len(self.edge_map)
        rev = [False] * len(self.edge_map)
        for a, b in enumerate(self.edge_map):
            em[b] = a
            rev[b] = self.reversal[a]
        return GraphIso(tuple(vm), tuple(em), tuple(rev))

    @classmethod
    def identity(cls, g: MultiGraph) -> "GraphIso":
        return cls(tuple(range(g.vertex_count)), tuple(range(g.edge_count)), (False,) * g.edge_count)


# ---------------------------------------------------------------------------
# connectivity


def _components(vertices: Iterable[int], edges: Iterable[Edge]) -> List[Set[int]]:
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, h in edges:
        rt, rh = find(t), find(h)
        if rt != rh:
            parent[rt] = rh
    comps: Dict[int, Set[int]] = {}
    for v in parent:
        comps.setdefault(find(v), set()).add(v)
    return sorted(comps.values(), key=min)


def is_connected_subset(g: MultiGraph, edge_subset: Iterable[int]) -> bool:
    es = [g.edges[i] for i in edge_subset]
    vs = {v for e in es for v in e}
    return bool(vs) and len(_components(vs, es)) == 1


def cut_vertices(g: MultiGraph) -> Set[int]:
    """Vertices whose removal disconnects a connected graph."""
    if not g.is_connected():
        raise GraphError("cut vertices are defined for connected graphs")
    return _cut_vertices_of(set(range(g.vertex_count)), list(g.edges))


def _cut_vertices_of(vertices: Set[int], edges: List[Edge]) -> Set[int]:
    cuts = set()
    for v in vertices:
        rest = vertices - {v}
        if len(rest) <= 1:
            continue
        es = [(t, h) for t, h in edges if t != v and h != v]
        if len(_components(rest, es)) > 1:
            cuts.add(v)
    return cuts


def blocks(g: MultiGraph, edge_subset: Optional[Iterable[int]] = None) -> List[FrozenSet[int]]:
    """Maximal 2-connected edge sets (Hopcroft-Tarjan with edge identities).

    Parallel edges belong to a common block; each self-loop is its own block.
    """
    subset = sorted(range(g.edge_count) if edge_subset is None else set(edge_subset))
    adj: Dict[int, List[Tuple[int, int]]] = {}
    out: List[FrozenSet[int]] = []
    for i in subset:
        t, h = g.edges[i]
        if t == h:
            out.append(frozenset([i]))
            continue
        adj.setdefault(t, []).append((h, i))
        adj.setdefault(h, []).append((t, i))
    disc: Dict[int, int] = {}
    low: Dict[int, int] = {}
    stack: List[int] = []
    counter = [0]

    def dfs(v: int, via: Optional[int]):
        disc[v] = low[v] = counter[0]
        counter[0] += 1
        for w, i in adj.get(v, []):
            if i == via:
                continue
            if w not in disc:
                stack.append(i)
                dfs(w, i)
                low[v] = min(low[v], low[w])
                if low[w] >= disc[v]:
                    comp = set()
                    while True:
                        j = stack.pop()
                        comp.add(j)
                        if j == i:
                            break
                    out.append(frozenset(comp))
            elif disc[w] < disc[v]:
                stack.append(i)
                low[v] = min(low[v], disc[w])

    for v in sorted(adj):
        if v not in disc:
            dfs(v, None)
    return sorted(out, key=lambda b: sorted(b))


def is_two_connected(g: MultiGraph, edge_subset: Iterable[int]) -> bool:
    """Connected with no cut vertex; single edges count, loops only alone."""
    subset = frozenset(edge_subset)
    if not subset:
        return False
    if not is_connected_subset(g, subset):
        return False
    return len(blocks(g, subset)) == 1


def two_connected_subgraphs(g: MultiGraph, max_edges: int = 24) -> List[FrozenSet[int]]:
    """Every vertex-2-connected edge subset, ordered by size then content."""
    if g.edge_count > max_edges:
        raise GraphError(f"subset enumeration limited to {max_edges} edges")
    found = []
    for mask in range(1, 1 << g.edge_count):
        subset = frozenset(i for i in range(g.edge_count) if mask >> i & 1)
        if is_two_connected(g, subset):
            found.append(subset)
    return sorted(found, key=lambda s: (len(s), sorted(s)))


@dataclass(frozen=True)
class Cactus:
    lobes: Tuple[FrozenSet[int], ...]
    cut_vertices: FrozenSet[int]
    incidences: Tuple[Tuple[int, int], ...]  # (lobe index, shared cut vertex)


def cactus_decomposition(g: MultiGraph, component_edges: Iterable[int]) -> Cactus:
    """Lobes (maximal 2-connected pieces) of a connected subgraph."""
    comp = frozenset(component_edges)
    if not comp or not is_connected_subset(g, comp):
        raise GraphError("cactus decomposition needs a connected, nonempty edge set")
    lobes = tuple(blocks(g, comp))
    owners: Dict[int, List[int]] = {}
    for k, lobe in enumerate(lobes):
        for v in g.edge_vertices(lobe):
            owners.setdefault(v, []).append(k)
    cuts = frozenset(v for v, ks in owners.items() if len(ks) > 1)
    inc = tuple(sorted((k, v) for v in cuts for k in owners[v]))
    return Cactus(lobes, cuts, inc)


# ---------------------------------------------------------------------------
# canonical labelling


def _mult_table(g: MultiGraph) -> List[List[int]]:
    m = [[0] * g.vertex_count for _ in range(g.vertex_count)]
    for t, h in g.edges:
        if t == h:
            m[t][t] += 1
        else:
            m[t][h] += 1
            m[h][t] += 1
    return m


def _refine(mult: List[List[int]], colors: List[int]) -> List[int]:
    n = len(colors)
    while True:
        sigs = []
        for v in range(n):
            nb = sorted((colors[w], mult[v][w]) for w in range(n) if w != v and mult[v][w])
            sigs.append((colors[v], mult[v][v], tuple(nb)))
        ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _leaves(mult: List[List[int]], colors: List[int]) -> Iterator[List[int]]:
    colors = _refine(mult, colors)
    n = len(colors)
    if len(set(colors)) == n:
        order = sorted(range(n), key=lambda v: colors[v])
        yield order
        return
    cells: Dict[int, List[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    target = min((c for c in cells if len(cells[c]) > 1), key=lambda c: (len(cells[c]), c))
    for v in cells[target]:
        individual = [2 * c + (0 if w == v else 1) if c == target else 2 * c + 1 for w, c in enumerate(colors)]
        yield from _leaves(mult, individual)


def _certificate(mult: List[List[int]], order: Sequence[int]) -> Tuple[int, ...]:
    n = len(order)
    return tuple(mult[order[i]][order[j]] for i in range(n) for j in range(i, n))


def _initial_colors(g: MultiGraph, mult: List[List[int]]) -> List[int]:
    val = g.valences()
    return [val[v] * 64 + mult[v][v] for v in range(g.vertex_count)]


def canonical_order(g: MultiGraph) -> Tuple[List[int], Tuple[int, ...]]:
    """Best vertex order (position -> vertex) and its certificate."""
    if g.vertex_count == 0:
        return [], ()
    mult = _mult_table(g)
    best = None
    best_order: List[int] = []
    for order in _leaves(mult, _initial_colors(g, mult)):
        cert = _certificate(mult, order)
        if best is None or cert < best:
            best, best_order = cert, order
    return best_order, best


def _iso_to_sorted(g: MultiGraph, vertex_map: Sequence[int]) -> Tuple[MultiGraph, GraphIso]:
    """Relabel vertices by ``vertex_map`` and sort edges as unordered pairs."""
    images = []
    for i, (t, h) in enumerate(g.edges):
        a, b = vertex_map[t], vertex_map[h]
        images.append(((min(a, b), max(a, b)), a > b, i))
    images.sort()
    edges = tuple(pair for pair, _, _ in images)
    edge_map = [0] * g.edge_count
    reversal = [False] * g.edge_count
    for j, (_, rev, i) in enumerate(images):
        edge_map[i] = j
        reversal[i] = rev
    target = MultiGraph(g.vertex_count, edges, g.allow_self_loops)
    return target, GraphIso(tuple(vertex_map), tuple(edge_map), tuple(reversal))


def canonical_form(g: MultiGraph) -> Tuple[MultiGraph, GraphIso]:
    """Canonical representative of the isomorphism class and a witness.

    Vertices are relabelled by the lexicographically smallest multiplicity
    table reachable by refinement and individualisation; edges are sorted
    unordered pairs oriented from the smaller to the larger endpoint.
    """
    order, _ = canonical_order(g)
    vertex_map = [0] * g.vertex_count
    for pos, v in enumerate(order):
        vertex_map[v] = pos
    return _iso_to_sorted(g, vertex_map)


def certificate(g: MultiGraph) -> Tuple[int, Tuple[int, ...]]:
    return g.vertex_count, canonical_order(g)[1]


def is_isomorphic(a: MultiGraph, b: MultiGraph) -> bool:
    return a.edge_count == b.edge_count and certificate(a) == certificate(b)


def vertex_automorphisms(g: MultiGraph) -> List[Tuple[int, ...]]:
    """Permutations of vertices preserving all edge multiplicities."""
    if g.vertex_count == 0:
        return [()]
    mult = _mult_table(g)
    leaves = list(_leaves(mult, _initial_colors(g, mult)))
    certs = [_certificate(mult, o) for o in leaves]
    best = min(certs)
    good = [o for o, c in zip(leaves, certs) if c == best]
    ref = good[0]
    perms = set()
    for o in good:
        p = [0] * g.vertex_count
        for a, b in zip(ref, o):
            p[a] = b
        perms.add(tuple(p))
    return sorted(perms)


def isomorphisms(source: MultiGraph, target: MultiGraph) -> Iterator[GraphIso]:
    """All decorated isomorphisms, including permutations of parallel edges."""
    if source.edge_count != target.edge_count or certificate(source) != certificate(target):
        return
    cs, to_c = canonical_form(source)
    ct, tt = canonical_form(target)
    back = tt.inverse()
    for auto in automorphisms(cs):
        yield back.compose(auto.compose(to_c))


def automorphisms(g: MultiGraph) -> List[GraphIso]:
    """Full automorphism group: vertex maps x parallel-edge matchings x loop flips."""
    groups: Dict[Tuple[int, int], List[int]] = {}
    for i, (t, h) in enumerate(g.edges):
        groups.setdefault((min(t, h), max(t, h)), []).append(i)
    out = []
    for vm in vertex_automorphisms(g):
        per_group = []
        for (a, b), src in sorted(groups.items()):
            img = (min(vm[a], vm[b]), max(vm[a], vm[b]))
            dst = groups[img]
            choices = []
            for perm in itertools.permutations(dst):
                if a == b:
                    for flips in itertools.product((False, True), repeat=len(src)):
                        choices.append(tuple(zip(src, perm, flips)))
                else:
                    opts = []
                    for i, j in zip(src, perm):
                        t, _ = g.edges[i]
                        opts.append((i, j, vm[t] != g.edges[j][0]))
                    choices.append(tuple(opts))
            per_group.append(choices)
        for combo in itertools.product(*per_group):
            em = [0] * g.edge_count
            rev = [False] * g.edge_count
            for part in combo:
                for i, j, r in part:
                    em[i] = j
                    rev[i] = r
            out.append(GraphIso(tuple(vm), tuple(em), tuple(rev)))
    return out


# ---------------------------------------------------------------------------
# enumeration of closed Jacobi diagrams


def _partial_key(edges: Sequence[Edge]) -> Tuple[Edge, ...]:
    # isolated vertices are interchangeable, so only the touched part is labelled
    used = sorted({v for e in edges for v in e})
    index = {v: i for i, v in enumerate(used)}
    g = MultiGraph(len(used), tuple((index[t], index[h]) for t, h in edges))
    return canonical_form(g)[0].edges


def enumerate_diagrams(n: int) -> List[DecoratedDiagram]:
    """Connected trivalent loopless multigraphs on 2n vertices, one per class.

    Grows connected canonical partial graphs one edge at a time from the
    first touched vertex still short of valence 3; the new edge ends at a
    touched vertex with room or at a fresh vertex.  Output is sorted by the
    canonical edge list.
    """
    if n < 1:
        raise GraphError("enumerate_diagrams needs n >= 1")
    nv = 2 * n
    level = {((0, 1),)}
    for _ in range(3 * n - 1):
        nxt = set()
        for edges in level:
            used = 1 + max(v for e in edges for v in e)
            val = [0] * used
            for t, h in edges:
                val[t] += 1
                val[h] += 1
            v = next((i for i in range(used) if val[i] < 3), None)
            if v is None:
                continue  # closed up early; cannot stay connected
            partners = [w for w in range(used) if w != v and val[w] < 3]
            if used < nv:
                partners.append(used)
            for w in partners:
                nxt.add(_partial_key(edges + ((v, w),)))
        level = nxt
    out = [MultiGraph(nv, e) for e in level if len({x for p in e for x in p}) == nv]
    out = [g for g in out if all(d == 3 for d in g.valences())]
    out.sort(key=lambda g: g.edges)
    return [DecoratedDiagram(g, n) for g in out]


# ---------------------------------------------------------------------------
# text format


def format_graph(g: MultiGraph) -> str:
    lines = [f"vertices {g.vertex_count}"]
    lines += [f"edge {t} {h}" for t, h in g.edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str, allow_self_loops: Optional[bool] = None) -> MultiGraph:
    """Parse ``vertices <v>`` followed by ``edge <tail> <head>`` lines.

    Blank lines and ``#`` comments are ignored.  Self-loops are accepted when
    ``allow_self_loops`` is true or left as None (then the flag is inferred).
    """
    count = None
    edges: List[Edge] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "vertices" and len(parts) == 2 and count is None:
                count = int(parts[1])
            elif parts[0] == "edge" and len(parts) == 3 and count is not None:
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise GraphError(f"line {lineno}: unexpected {line!r}")
        except ValueError as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"line {lineno}: bad integer in {line!r}") from None
    if count is None:
        raise GraphError("missing 'vertices' header")
    loops = any(t == h for t, h in edges) if allow_self_loops is None else allow_self_loops
    return MultiGraph(count, tuple(edges), loops)


def theta() -> MultiGraph:
    return MultiGraph(2, ((0, 1), (0, 1), (0, 1)))


def tetrahedron() -> MultiGraph:
    return MultiGraph(4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))


def double_theta() -> MultiGraph:
    """4-cycle 0-1-3-2 with the opposite sides 0-1 and 2-3 doubled."""
    return MultiGraph(4, ((0, 1), (0, 1), (1, 3), (3, 2), (3, 2), (2, 0)))


# ---------------------------------------------------------------------------
# random corpus


def random_connected_multigraph(rng, max_vertices: int = 6, max_extra: int = 4, loops: bool = True) -> MultiGraph:
    """Random spanning tree plus a few extra edges (parallels and loops allowed)."""
    nv = rng.randint(1, max_vertices)
    edges: List[Edge] = []
    for v in range(1, nv):
        edges.append((rng.randrange(v), v))
    for _ in range(rng.randint(0 if nv > 1 else 1, max_extra)):
        t, h = rng.randrange(nv), rng.randrange(nv)
        if t == h and not loops:
            continue
        edges.append((t, h))
    rng.shuffle(edges)
    edges = [(h, t) if rng.random() < 0.5 else (t, h) for t, h in edges]
    perm = list(range(nv))
    rng.shuffle(perm)
    edges = [(perm[t], perm[h]) for t, h in edges]
    return MultiGraph(nv, tuple(edges), loops and any(t == h for t, h in edges))


def parity_corpus(size: int = 200, seed: int = 20240917, max_vertices: int = 6) -> List[MultiGraph]:
    """Deterministic corpus: small named graphs, all diagrams n <= 3, random fill."""
    import random

    rng = random.Random(seed)
    corpus = [MultiGraph(1, ()), MultiGraph(2, ((0, 1),)), theta(), tetrahedron(), double_theta()]
    corpus += [d.graph for n in (1, 2, 3) for d in enumerate_diagrams(n)]
    seen = {(g.edge_count, certificate(g)) for g in corpus}
    while len(corpus) < size:
        g = random_connected_multigraph(rng, max_vertices)
        key = (g.edge_count, certificate(g))
        if key in seen:
            continue
        seen.add(key)
        corpus.append(g)
    return corpus
