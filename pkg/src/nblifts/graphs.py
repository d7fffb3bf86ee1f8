"""Multigraphs with an edge involution, supporting half-loops and whole-loops.

A graph is stored as dense arrays over directed-edge ids: ``tail``, ``head``
and an involution ``inv`` satisfying ``tail[inv[e]] == head[e]``.  The orbits
of ``inv`` are the undirected edges.  A fixed point of ``inv`` is a half-loop
(it contributes 1 to the degree of its vertex and a single directed edge);
an orbit of size two with equal endpoints is a whole-loop (contributing 2).

Note on pruning: ``prune`` returns the maximal subgraph in which every vertex
has degree at least two.  This is stronger than merely removing leaves, since
a vertex carrying only a half-loop has degree one and is removed too.
"""

from dataclasses import dataclass
from fractions import Fraction
import json
import math


class GraphFormatError(ValueError):
    """Raised when graph JSON fails validation; message pinpoints the record."""


class Graph:
    """Immutable multigraph with half-loops, keyed by dense integer ids."""

    __slots__ = ("n", "tail", "head", "inv", "_out")

    def __init__(self, n: int, tail, head, inv):
        tail = tuple(tail)
        head = tuple(head)
        inv = tuple(inv)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        if not (len(tail) == len(head) == len(inv)):
            raise ValueError("tail/head/inv must have equal length")
        m = len(tail)
        for e in range(m):
            if not (0 <= tail[e] < n and 0 <= head[e] < n):
                raise ValueError(f"edge {e}: endpoint out of range")
            f = inv[e]
            if not (0 <= f < m):
                raise ValueError(f"edge {e}: involution partner {f} out of range")
            if inv[f] != e:
                raise ValueError(f"edge {e}: inv is not an involution")
            if tail[f] != head[e]:
                raise ValueError(f"edge {e}: tail(inv(e)) != head(e)")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "inv", inv)
        out = [[] for _ in range(n)]
        for e in range(m):
            out[tail[e]].append(e)
        object.__setattr__(self, "_out", tuple(tuple(es) for es in out))

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n, self.tail, self.head, self.inv) == (
            other.n, other.tail, other.head, other.inv)

    def __hash__(self):
        return hash((self.n, self.tail, self.head, self.inv))

    def __repr__(self):
        return f"Graph(n={self.n}, directed_edges={self.num_directed})"

    @property
    def num_directed(self) -> int:
        return len(self.tail)

    def is_half_loop(self, e: int) -> bool:
        return self.inv[e] == e

    def orientation(self):
        """One representative per involution orbit: the lowest directed id."""
        return tuple(e for e in range(self.num_directed) if self.inv[e] >= e)

    @property
    def num_edges(self) -> int:
        """Number of involution orbits (half- and whole-loops count once)."""
        return len(self.orientation())

    def out_edges(self, v: int):
        """Directed edges with tail v."""
        return self._out[v]

    def degree(self, v: int) -> int:
        """Indegree in the underlying digraph; whole-loops add 2, half-loops 1."""
        if not (0 <= v < self.n):
            raise ValueError(f"unknown vertex {v}")
        return len(self._out[v])

    def degrees(self):
        return tuple(len(es) for es in self._out)

    def order(self) -> int:
        """Edge-orbit count minus vertex count."""
        return self.num_edges - self.n

    def euler_char(self) -> Fraction:
        """Vertex count minus half the directed-edge count; half-integral."""
        return Fraction(self.n) - Fraction(self.num_directed, 2)

    def min_degree(self) -> int:
        return min(self.degrees(), default=0)

    def is_pruned(self) -> bool:
        """Every vertex has degree at least two (empty graphs qualify)."""
        return self.n == 0 or self.min_degree() >= 2

    def regular_degree(self):
        """The common degree if the graph is regular, else None."""
        degs = set(self.degrees())
        if len(degs) == 1:
            return degs.pop()
        return None

    def has_half_loops(self) -> bool:
        return any(self.inv[e] == e for e in range(self.num_directed))

    def components(self):
        """Connected components as sorted vertex lists."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp = [s]
            seen[s] = True
            stack = [s]
            while stack:
                v = stack.pop()
                for e in self._out[v]:
                    u = self.head[e]
                    if not seen[u]:
                        seen[u] = True
                        comp.append(u)
                        stack.append(u)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def is_bipartite(self) -> bool:
        color = [-1] * self.n
        for s in range(self.n):
            if color[s] >= 0:
                continue
            color[s] = 0
            stack = [s]
            while stack:
                v = stack.pop()
                for e in self._out[v]:
                    u = self.head[e]
                    if color[u] < 0:
                        color[u] = 1 - color[v]
                        stack.append(u)
                    elif color[u] == color[v]:
                        return False
        return True


def from_pairs(n: int, pairs=(), half_loops=()) -> Graph:
    """Build a graph from undirected pairs plus half-loop locations.

    Each (u, v) pair becomes an orbit of two directed edges (a whole-loop
    when u == v); each entry of half_loops becomes a single fixed edge.
    """
    tail, head, inv = [], [], []
    for u, v in pairs:
        e = len(tail)
        tail += [u, v]
        head += [v, u]
        inv += [e + 1, e]
    for v in half_loops:
        e = len(tail)
        tail.append(v)
        head.append(v)
        inv.append(e)
    return Graph(n, tail, head, inv)


def empty_graph() -> Graph:
    return Graph(0, (), (), ())


def bouquet(whole: int, half: int = 0) -> Graph:
    """One vertex with the given numbers of whole-loops and half-loops."""
    return from_pairs(1, [(0, 0)] * whole, [0] * half)


def cycle_graph(k: int) -> Graph:
    """The k-cycle; k must be at least 2 (use bouquet(1) for a 1-cycle)."""
    if k < 2:
        raise ValueError("cycle_graph needs k >= 2")
    return from_pairs(k, [(i, (i + 1) % k) for i in range(k)])


def path_graph(k: int) -> Graph:
    """Path with k edges on k+1 vertices."""
    return from_pairs(k + 1, [(i, i + 1) for i in range(k)])


def complete_graph(k: int) -> Graph:
    return from_pairs(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


def dipole(m: int) -> Graph:
    """Two vertices joined by m parallel edges."""
    return from_pairs(2, [(0, 1)] * m)


def nb_successors(g: Graph):
    """For each directed edge, the directed edges continuing it without backtracking."""
    succ = []
    for e in range(g.num_directed):
        v = g.head[e]
        succ.append(tuple(f for f in g.out_edges(v) if f != g.inv[e]))
    return tuple(succ)


def subgraph_from_orbits(g: Graph, orbit_reps):
    """Subgraph spanned by the given orbit representatives.

    Returns (subgraph, vertex_ids, directed_edge_ids) where the id tuples map
    the subgraph's dense ids back to g's.
    """
    edge_ids = []
    for r in orbit_reps:
        edge_ids.append(r)
        if g.inv[r] != r:
            edge_ids.append(g.inv[r])
    edge_ids = sorted(set(edge_ids))
    verts = sorted({g.tail[e] for e in edge_ids} | {g.head[e] for e in edge_ids})
    vidx = {v: i for i, v in enumerate(verts)}
    eidx = {e: i for i, e in enumerate(edge_ids)}
    sub = Graph(
        len(verts),
        [vidx[g.tail[e]] for e in edge_ids],
        [vidx[g.head[e]] for e in edge_ids],
        [eidx[g.inv[e]] for e in edge_ids],
    )
    return sub, tuple(verts), tuple(edge_ids)


def induced_subgraph(g: Graph, vertices):
    """Subgraph on the given vertices with every orbit joining them.

    Vertices without incident edges are kept, unlike subgraph_from_orbits.
    """
    verts = sorted(set(vertices))
    vidx = {v: i for i, v in enumerate(verts)}
    keep = set(verts)
    eids = [e for e in range(g.num_directed)
            if g.tail[e] in keep and g.head[e] in keep]
    eidx = {e: i for i, e in enumerate(eids)}
    sub = Graph(
        len(verts),
        [vidx[g.tail[e]] for e in eids],
        [vidx[g.head[e]] for e in eids],
        [eidx[g.inv[e]] for e in eids],
    )
    return sub, tuple(verts), tuple(eids)


def prune(g: Graph) -> Graph:
    """Maximal subgraph with all vertex degrees >= 2 (possibly empty)."""
    return prune_with_map(g)[0]


def prune_with_map(g: Graph):
    """Like prune, returning (subgraph, vertex_ids, directed_edge_ids)."""
    alive_v = [True] * g.n
    alive_e = [True] * g.num_directed
    deg = list(g.degrees())
    queue = [v for v in range(g.n) if deg[v] < 2]
    while queue:
        v = queue.pop()
        if not alive_v[v]:
            continue
        alive_v[v] = False
        for e in g.out_edges(v):
            if not alive_e[e]:
                continue
            f = g.inv[e]
            alive_e[e] = False
            deg[v] -= 1
            if f != e:
                alive_e[f] = False
                w = g.tail[f]
                deg[w] -= 1
                if alive_v[w] and deg[w] < 2:
                    queue.append(w)
    verts = [v for v in range(g.n) if alive_v[v]]
    edges = [e for e in range(g.num_directed) if alive_e[e]]
    vidx = {v: i for i, v in enumerate(verts)}
    eidx = {e: i for i, e in enumerate(edges)}
    sub = Graph(
        len(verts),
        [vidx[g.tail[e]] for e in edges],
        [vidx[g.head[e]] for e in edges],
        [eidx[g.inv[e]] for e in edges],
    )
    return sub, tuple(verts), tuple(edges)


def girth(g: Graph):
    """Length of the shortest strictly non-backtracking closed walk.

    A whole-loop yields girth 1 and a parallel pair girth 2; a lone half-loop
    admits no such walk (backtracking across the wrap step), so forests and
    half-loop-only trees give math.inf.  BFS runs over directed edges with
    non-backtracking transitions; a shortest walk never repeats a directed
    edge, so depth is capped at the number of directed edges.
    """
    m = g.num_directed
    if m == 0:
        return math.inf
    succ = nb_successors(g)
    best = math.inf
    for e0 in range(m):
        t0 = g.tail[e0]
        inv0 = g.inv[e0]
        dist = [0] * m
        dist[e0] = 1
        frontier = [e0]
        depth = 1
        while frontier and depth < best and depth <= m:
            for e in frontier:
                if g.head[e] == t0 and e != inv0:
                    best = min(best, depth)
                    break
            else:
                nxt = []
                for e in frontier:
                    for f in succ[e]:
                        if dist[f] == 0:
                            dist[f] = depth + 1
                            nxt.append(f)
                frontier = nxt
                depth += 1
                continue
            break
    return best


@dataclass(frozen=True)
class GraphMorphism:
    """Vertex and directed-edge maps intertwining head, tail and involution."""

    source: Graph
    target: Graph
    vertex_map: tuple
    edge_map: tuple

    def __post_init__(self):
        g, h = self.source, self.target
        vm, em = self.vertex_map, self.edge_map
        if len(vm) != g.n or len(em) != g.num_directed:
            raise ValueError("morphism maps have wrong length")
        for v in vm:
            if not (0 <= v < h.n):
                raise ValueError("vertex map out of range")
        for e in range(g.num_directed):
            f = em[e]
            if not (0 <= f < h.num_directed):
                raise ValueError("edge map out of range")
            if h.tail[f] != vm[g.tail[e]] or h.head[f] != vm[g.head[e]]:
                raise ValueError(f"edge {e}: head/tail not intertwined")
            if em[g.inv[e]] != h.inv[f]:
                raise ValueError(f"edge {e}: involution not intertwined")

    @classmethod
    def identity(cls, g: Graph):
        return cls(g, g, tuple(range(g.n)), tuple(range(g.num_directed)))


def _fibre_maps(m: GraphMorphism, use_head: bool):
    g, h = m.source, m.target
    gmap = g.head if use_head else g.tail
    hmap = h.head if use_head else h.tail
    g_fib = {}
    for e in range(g.num_directed):
        g_fib.setdefault(gmap[e], []).append(e)
    h_count = {}
    for f in range(h.num_directed):
        h_count[hmap[f]] = h_count.get(hmap[f], 0) + 1
    return g_fib, h_count


def is_etale(m: GraphMorphism) -> bool:
    """True when edge fibres map injectively at every vertex (head and tail)."""
    for use_head in (True, False):
        g_fib, _ = _fibre_maps(m, use_head)
        for v in range(m.source.n):
            imgs = [m.edge_map[e] for e in g_fib.get(v, [])]
            if len(set(imgs)) != len(imgs):
                return False
    return True


def is_covering(m: GraphMorphism) -> bool:
    """True when edge fibres map bijectively at every vertex (head and tail)."""
    for use_head in (True, False):
        g_fib, h_count = _fibre_maps(m, use_head)
        for v in range(m.source.n):
            imgs = [m.edge_map[e] for e in g_fib.get(v, [])]
            if len(set(imgs)) != len(imgs):
                return False
            if len(imgs) != h_count.get(m.vertex_map[v], 0):
                return False
    return True


@dataclass(frozen=True)
class OrderedGraph:
    """Graph with a vertex order, an edge-orbit order and an orientation.

    vertex_order lists the vertices, edge_order the orbit representatives
    (lowest directed id per orbit) and orientation one chosen directed edge
    per orbit, aligned with edge_order.  Every half-loop orients itself.
    """

    graph: Graph
    vertex_order: tuple
    edge_order: tuple
    orientation: tuple

    def __post_init__(self):
        g = self.graph
        if sorted(self.vertex_order) != list(range(g.n)):
            raise ValueError("vertex_order must enumerate all vertices")
        reps = g.orientation()
        if sorted(self.edge_order) != sorted(reps):
            raise ValueError("edge_order must enumerate all orbits")
        if len(self.orientation) != len(self.edge_order):
            raise ValueError("orientation misaligned with edge_order")
        for rep, o in zip(self.edge_order, self.orientation):
            if o not in (rep, g.inv[rep]):
                raise ValueError("orientation must pick a member of each orbit")

    @classmethod
    def default(cls, g: Graph):
        reps = g.orientation()
        return cls(g, tuple(range(g.n)), reps, reps)

    def canonical_key(self):
        """Hashable key; equal exactly for order-isomorphic ordered graphs."""
        g = self.graph
        vrank = {v: i for i, v in enumerate(self.vertex_order)}
        new_id = {}
        for rep, o in zip(self.edge_order, self.orientation):
            new_id[o] = len(new_id)
            if g.inv[o] != o:
                new_id[g.inv[o]] = len(new_id)
        rows = []
        for rep, o in zip(self.edge_order, self.orientation):
            rows.append((vrank[g.tail[o]], vrank[g.head[o]],
                         new_id[g.inv[o]] == new_id[o]))
        return (g.n, tuple(rows))

    def relabelled(self) -> "OrderedGraph":
        """Equivalent ordered graph with identity orders (canonical form)."""
        g = self.graph
        vrank = {v: i for i, v in enumerate(self.vertex_order)}
        new_id = {}
        for rep, o in zip(self.edge_order, self.orientation):
            new_id[o] = len(new_id)
            if g.inv[o] != o:
                new_id[g.inv[o]] = len(new_id)
        m = g.num_directed
        tail = [0] * m
        head = [0] * m
        inv = [0] * m
        for e in range(m):
            ne = new_id[e]
            tail[ne] = vrank[g.tail[e]]
            head[ne] = vrank[g.head[e]]
            inv[ne] = new_id[g.inv[e]]
        ng = Graph(g.n, tail, head, inv)
        reps = ng.orientation()
        return OrderedGraph(ng, tuple(range(ng.n)), reps, reps)


def graph_to_json(g: Graph) -> dict:
    """Serialize to the interchange format; half-loops have inv == id."""
    return {
        "vertices": g.n,
        "edges": [
            {"id": e, "tail": g.tail[e], "head": g.head[e], "inv": g.inv[e]}
            for e in range(g.num_directed)
        ],
    }


def graph_from_json(data) -> Graph:
    """Parse and fully validate the interchange format.

    Errors name the offending edge record so malformed files are easy to fix.
    """
    if not isinstance(data, dict):
        raise GraphFormatError("top level must be an object")
    if "vertices" not in data or "edges" not in data:
        raise GraphFormatError("missing required keys 'vertices' and 'edges'")
    n = data["vertices"]
    if not isinstance(n, int) or n < 0:
        raise GraphFormatError("'vertices' must be a non-negative integer")
    edges = data["edges"]
    if not isinstance(edges, list):
        raise GraphFormatError("'edges' must be a list")
    m = len(edges)
    tail = [0] * m
    head = [0] * m
    inv = [0] * m
    seen = set()
    for i, rec in enumerate(edges):
        where = f"edges[{i}]"
        if not isinstance(rec, dict):
            raise GraphFormatError(f"{where}: must be an object")
        for key in ("id", "tail", "head", "inv"):
            if key not in rec or not isinstance(rec[key], int):
                raise GraphFormatError(f"{where}: missing or non-integer '{key}'")
        e = rec["id"]
        if not (0 <= e < m):
            raise GraphFormatError(f"{where}: id {e} out of range [0,{m})")
        if e in seen:
            raise GraphFormatError(f"{where}: duplicate id {e}")
        seen.add(e)
        if not (0 <= rec["tail"] < n and 0 <= rec["head"] < n):
            raise GraphFormatError(f"{where}: endpoint out of range")
        tail[e], head[e], inv[e] = rec["tail"], rec["head"], rec["inv"]
    for i, rec in enumerate(edges):
        e = rec["id"]
        f = inv[e]
        if not (0 <= f < m):
            raise GraphFormatError(f"edges[{i}]: inv {f} out of range")
        if inv[f] != e:
            raise GraphFormatError(f"edges[{i}]: inv is not an involution")
        if tail[f] != head[e]:
            raise GraphFormatError(
                f"edges[{i}]: tail of partner {f} must equal head of {e}")
        if f == e and tail[e] != head[e]:
            raise GraphFormatError(f"edges[{i}]: half-loop endpoints differ")
    return Graph(n, tail, head, inv)


def load_graph(path) -> Graph:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}")
    return graph_from_json(data)


def save_graph(g: Graph, path):
    with open(path, "w") as fh:
        json.dump(graph_to_json(g), fh, indent=2, sort_keys=True)
        fh.write("\n")
