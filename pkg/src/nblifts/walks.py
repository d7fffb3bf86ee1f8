"""Strictly non-backtracking closed (SNBC) walks and their homotopy types.

A length-k walk is SNBC when it is closed, never steps onto the reverse of
the edge it just used, and does not backtrack across the wrap-around either.
The number of such walks equals the trace of the k-th power of the Hashimoto
matrix; enumeration here is by depth-first search over non-backtracking
transitions and serves as the independent check of that identity.

Homotopy types: the visited subgraph of a walk carries a first-encountered
ordering; suppressing its beads (degree-2 vertices not carrying a self-loop)
leaves a reduced ordered graph plus the path length of each reduced edge.
For closed walks we always suppress a maximal bead set; when the whole
visited subgraph is a cycle of beads, the walk's starting vertex is kept so
the suppression stays proper.
"""

from dataclasses import dataclass
import csv
import json

import numpy as np

from .graphs import Graph, OrderedGraph, nb_successors


class BudgetExceededError(RuntimeError):
    """The walk enumeration budget ran out."""


class TraceMismatchError(RuntimeError):
    """tr(H^k) failed to round to an integer within tolerance."""


@dataclass(frozen=True)
class Walk:
    """Alternating vertex/edge sequence; vertices has one more entry than edges."""

    vertices: tuple
    edges: tuple

    def __len__(self):
        return len(self.edges)

    @classmethod
    def from_edges(cls, g: Graph, edges):
        edges = tuple(edges)
        if not edges:
            raise ValueError("a walk needs at least one edge")
        verts = [g.tail[edges[0]]]
        for e in edges:
            if g.tail[e] != verts[-1]:
                raise ValueError("edges do not chain")
            verts.append(g.head[e])
        return cls(tuple(verts), edges)

    def validate(self, g: Graph):
        if len(self.vertices) != len(self.edges) + 1:
            raise ValueError("vertex/edge lengths inconsistent")
        for i, e in enumerate(self.edges):
            if not (0 <= e < g.num_directed):
                raise ValueError(f"edge {e} not in graph")
            if g.tail[e] != self.vertices[i] or g.head[e] != self.vertices[i + 1]:
                raise ValueError(f"step {i} does not match head/tail maps")

    def is_closed(self):
        return self.vertices[0] == self.vertices[-1]

    def is_nonbacktracking(self, g: Graph):
        return all(g.inv[self.edges[i]] != self.edges[i + 1]
                   for i in range(len(self.edges) - 1))

    def is_snbc(self, g: Graph):
        return (self.is_closed() and self.is_nonbacktracking(g)
                and g.inv[self.edges[-1]] != self.edges[0])


def _check_budget(g: Graph, k: int, budget: int):
    """Refuse enumerations whose worst case #E^dir * (max out-degree)^k is too big."""
    succ = nb_successors(g)
    max_out = max((len(s) for s in succ), default=0)
    if g.num_directed * (max_out ** k) > budget:
        raise BudgetExceededError(
            f"{g.num_directed} * {max_out}^{k} exceeds the budget {budget}")
    return succ


def enumerate_snbc(g: Graph, k: int, budget: int = 10_000_000):
    """All SNBC walks of length k, each starting edge counted separately."""
    if k < 1:
        raise ValueError("walk length must be at least 1")
    succ = _check_budget(g, k, budget)
    walks = []
    for start in range(g.num_directed):
        t0 = g.tail[start]
        bad_last = g.inv[start]
        stack = [(start, (start,))]
        while stack:
            e, path = stack.pop()
            depth = len(path)
            if depth == k:
                if g.head[e] == t0 and e != bad_last:
                    walks.append(Walk.from_edges(g, path))
                continue
            for f in succ[e]:
                stack.append((f, path + (f,)))
    return walks


def count_snbc_dfs(g: Graph, kmax: int, budget: int = 10_000_000_000):
    """SNBC walk counts for every length 1..kmax by explicit DFS.

    One pass per starting edge covers all lengths at once; this is the
    brute-force side of the trace identity, so no matrix algebra is used.
    """
    succ = _check_budget(g, kmax, budget)
    head = g.head
    counts = [0] * (kmax + 1)
    for start in range(g.num_directed):
        t0 = g.tail[start]
        bad_last = g.inv[start]
        stack = [(start, 1)]
        pop = stack.pop
        push = stack.append
        while stack:
            e, depth = pop()
            if head[e] == t0 and e != bad_last:
                counts[depth] += 1
            if depth < kmax:
                depth += 1
                for f in succ[e]:
                    push((f, depth))
    return counts[1:]


def snbc_count(g: Graph, k: int) -> int:
    """tr(H^k) rounded to the nearest integer.

    Falls back to exact integer arithmetic when float64 could lose the
    count; raises TraceMismatchError if rounding is not clean.
    """
    if k < 1:
        raise ValueError("walk length must be at least 1")
    m = g.num_directed
    if m == 0:
        return 0
    succ = nb_successors(g)
    max_out = max((len(s) for s in succ), default=0)
    if m * (max_out ** k) < 2 ** 52:
        h = np.zeros((m, m))
        for e, fs in enumerate(succ):
            h[e, list(fs)] = 1.0
        tr = float(np.trace(np.linalg.matrix_power(h, k)))
        nearest = round(tr)
        if abs(tr - nearest) > 1e-6:
            raise TraceMismatchError(
                f"tr(H^{k}) = {tr} does not round cleanly")
        return int(nearest)
    # exact path: plain integer matrix power by repeated squaring
    h = [[0] * m for _ in range(m)]
    for e, fs in enumerate(succ):
        for f in fs:
            h[e][f] = 1

    def matmul(a, b):
        bt = list(zip(*b))
        return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]

    result = None
    base = h
    kk = k
    while kk:
        if kk & 1:
            result = base if result is None else matmul(result, base)
        kk >>= 1
        if kk:
            base = matmul(base, base)
    return sum(result[i][i] for i in range(m))


def visited_subgraph(w: Walk, g: Graph) -> OrderedGraph:
    """Subgraph spanned by a walk, renumbered in first-encountered order.

    Vertices are renumbered by first occurrence; edge orbits by first
    traversal, oriented in the direction first traversed (the orientation
    representative receives the lower directed id).  The result is the
    canonical form under ordered-graph isomorphism.
    """
    w.validate(g)
    vnew = {}
    for v in w.vertices:
        if v not in vnew:
            vnew[v] = len(vnew)
    orbit_dir = {}  # orbit rep in g -> first-traversed directed edge
    order = []
    for e in w.edges:
        rep = min(e, g.inv[e])
        if rep not in orbit_dir:
            orbit_dir[rep] = e
            order.append(rep)
    tail, head, inv = [], [], []
    for rep in order:
        e = orbit_dir[rep]
        a, b = vnew[g.tail[e]], vnew[g.head[e]]
        i = len(tail)
        if g.inv[e] == e:
            tail.append(a)
            head.append(b)
            inv.append(i)
        else:
            tail += [a, b]
            head += [b, a]
            inv += [i + 1, i]
    sub = Graph(len(vnew), tail, head, inv)
    reps = sub.orientation()
    return OrderedGraph(sub, tuple(range(sub.n)), reps, reps)


def beads(g: Graph):
    """Vertices of degree two not incident to any self-loop."""
    loopy = set()
    for e in range(g.num_directed):
        if g.tail[e] == g.head[e]:
            loopy.add(g.tail[e])
    return [v for v in range(g.n) if g.degree(v) == 2 and v not in loopy]


@dataclass(frozen=True)
class HomotopyType:
    """Reduced ordered graph together with the length of each reduced edge.

    lengths is aligned with the reduction's edge order.  Hashable, so walk
    censuses can group by type directly.
    """

    reduction: OrderedGraph
    lengths: tuple

    def __post_init__(self):
        if len(self.lengths) != len(self.reduction.edge_order):
            raise ValueError("lengths misaligned with reduced edges")
        if any(k < 1 for k in self.lengths):
            raise ValueError("edge lengths must be positive")

    def key(self):
        return (self.reduction.canonical_key(), self.lengths)

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        if not isinstance(other, HomotopyType):
            return NotImplemented
        return self.key() == other.key()

    def total_length(self) -> int:
        return sum(self.lengths)

    def to_json(self):
        from .graphs import graph_to_json
        return {"reduction": graph_to_json(self.reduction.relabelled().graph),
                "lengths": list(self.lengths)}


def suppress_beads(s: OrderedGraph, bead_vertices) -> HomotopyType:
    """Contract maximal bead paths of an ordered graph into long edges.

    bead_vertices must consist of beads only, and no connected component may
    lie entirely inside it.  Each directed edge of the result is a beaded
    path; the involution maps a path to its reverse, and a path of length
    one around a half-loop is its own reverse.
    """
    g = s.graph
    vprime = set(bead_vertices)
    bead_set = set(beads(g))
    for v in vprime:
        if v not in bead_set:
            raise ValueError(f"vertex {v} is not a bead")
    for comp in g.components():
        if comp and all(v in vprime for v in comp):
            raise ValueError("a component lies entirely in the bead set")
    keep = [v for v in range(g.n) if v not in vprime]

    # walk each beaded path from its starting directed edge
    def follow(e0):
        path = [e0]
        while g.head[path[-1]] in vprime:
            v = g.head[path[-1]]
            nxt = [f for f in g.out_edges(v) if f != g.inv[path[-1]]]
            path.append(nxt[0])
        return tuple(path)

    paths = {}
    for e in range(g.num_directed):
        if g.tail[e] not in vprime:
            paths[e] = follow(e)

    vrank = {v: i for i, v in enumerate(s.vertex_order) if v not in vprime}
    new_v = {v: i for i, v in enumerate(sorted(keep, key=lambda v: vrank[v]))}
    orbit_rank = {rep: i for i, rep in enumerate(s.edge_order)}

    def path_rank(p):
        return min(orbit_rank[min(e, g.inv[e])] for e in p)

    def reverse_path(p):
        return tuple(g.inv[e] for e in reversed(p))

    first_traversed = set(s.orientation)
    entries = []  # (rank, oriented path, reversed path)
    seen = set()
    for e0, p in sorted(paths.items(), key=lambda kv: path_rank(kv[1])):
        if e0 in seen:
            continue
        rp = reverse_path(p)
        seen.add(e0)
        seen.add(rp[0])
        # orient along the first-traversed constituent of the lowest orbit
        lead = min(p, key=lambda e: orbit_rank[min(e, g.inv[e])])
        oriented = p if lead in first_traversed else rp
        entries.append((path_rank(p), oriented, reverse_path(oriented)))
    entries.sort(key=lambda t: t[0])

    tail, head, inv, lengths = [], [], [], []
    for _, p, rp in entries:
        a = new_v[g.tail[p[0]]]
        b = new_v[g.head[p[-1]]]
        i = len(tail)
        if p == rp:  # single half-loop
            tail.append(a)
            head.append(b)
            inv.append(i)
        else:
            tail += [a, b]
            head += [b, a]
            inv += [i + 1, i]
        lengths.append(len(p))
    red = Graph(len(keep), tail, head, inv)
    reps = red.orientation()
    ordered = OrderedGraph(red, tuple(range(red.n)), reps, reps)
    return HomotopyType(ordered, tuple(lengths))


def walk_reduction(w: Walk, g: Graph) -> HomotopyType:
    """Homotopy type of a closed walk: suppress a maximal proper bead set."""
    s = visited_subgraph(w, g)
    bs = set(beads(s.graph))
    for comp in s.graph.components():
        if comp and all(v in bs for v in comp):
            bs.discard(min(comp))  # keep the first-encountered vertex
    return suppress_beads(s, bs)


def vlg(t: Graph, lengths) -> Graph:
    """Variable-length graph: replace each orbit by a path of its length.

    lengths maps orbit representatives (lowest directed ids) to positive
    integers; a plain sequence aligned with t.orientation() also works.
    Half-loops must keep length one, since bead suppression can never
    produce a longer self-inverse path.
    """
    reps = t.orientation()
    if not isinstance(lengths, dict):
        lengths = dict(zip(reps, lengths))
    pairs = []
    halves = []
    next_v = t.n
    for rep in reps:
        k = lengths[rep]
        if k < 1:
            raise ValueError("edge lengths must be positive")
        a, b = t.tail[rep], t.head[rep]
        if t.inv[rep] == rep:
            if k != 1:
                raise ValueError("half-loops only admit length 1")
            halves.append(a)
            continue
        chain = [a] + list(range(next_v, next_v + k - 1)) + [b]
        next_v += k - 1
        pairs.extend(zip(chain, chain[1:]))
    g = Graph(next_v, (), (), ())
    tail, head, inv = [], [], []
    for u, v in pairs:
        e = len(tail)
        tail += [u, v]
        head += [v, u]
        inv += [e + 1, e]
    for v in halves:
        e = len(tail)
        tail.append(v)
        head.append(v)
        inv.append(e)
    return Graph(next_v, tail, head, inv)


def snbc_by_type(g: Graph, k: int, budget: int = 10_000_000):
    """Group the SNBC walks of length k by homotopy type."""
    census = {}
    for w in enumerate_snbc(g, k, budget):
        ht = walk_reduction(w, g)
        census[ht] = census.get(ht, 0) + 1
    return census


def write_walk_census(g: Graph, ks, csv_path, catalog_path,
                      budget: int = 10_000_000):
    """CSV rows (k, type_id, lengths, count) plus a JSON type catalog."""
    catalog = {}
    type_ids = {}
    rows = []
    for k in ks:
        for ht, count in sorted(snbc_by_type(g, k, budget).items(),
                                key=lambda kv: kv[0].key()):
            if ht not in type_ids:
                type_ids[ht] = f"T{len(type_ids)}"
                catalog[type_ids[ht]] = ht.to_json()
            rows.append((k, type_ids[ht],
                         "-".join(map(str, ht.lengths)), count))
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "type_id", "lengths", "count"])
        writer.writerows(rows)
    with open(catalog_path, "w") as fh:
        json.dump(catalog, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return rows
