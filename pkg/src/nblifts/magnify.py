"""Vertex-expansion predicates: magnifiers and pseudo-magnifiers.

A graph is a gamma-magnifier when every vertex set U of size at most half
the graph has at least gamma * |U| neighbours strictly outside U; the
pseudo variant only tests sizes in a window [R, half].  A sufficiently good
magnifier forces a spectral gap: for d-regular graphs every non-top
adjacency eigenvalue is at most d - gamma^2 / (4 + 2 gamma^2).

The related notion of a gamma-spreader (|Gamma(U)| >= (1 + gamma)|U|,
neighbourhood not required to leave U) is documented here for orientation
but deliberately given no operation: covers of connected bipartite graphs
are never spreaders, so magnification is the robust notion.

Exhaustive checks enumerate all 2^n subsets with bit tricks and are capped
at 20 vertices; beyond that, sampling draws uniform subsets plus adversarial
seeds (BFS balls and single-fibre blocks) since imbalanced local sets are
the likely violators.
"""

from dataclasses import dataclass
import math

import numpy as np

from .graphs import Graph
from .lifts import Lift
from .spectral import lambda2

EXHAUSTIVE_VERTEX_CAP = 20


@dataclass(frozen=True)
class VertexSubset:
    """Cover vertex set with its fibre decomposition over the base."""

    members: frozenset
    base_vertices: int
    degree: int

    @classmethod
    def from_cover_indices(cls, lift: Lift, indices):
        return cls(frozenset(int(i) for i in indices), lift.base.n,
                   lift.assignment.degree)

    def fibre(self, v: int):
        n = self.degree
        return {i for i in range(n) if v * n + i in self.members}

    def fibre_sizes(self):
        sizes = [0] * self.base_vertices
        for x in self.members:
            sizes[x // self.degree] += 1
        return sizes


@dataclass(frozen=True)
class MagnificationResult:
    holds: bool
    witness: frozenset | None
    mode: str  # "exhaustive" or "sampled"
    trials: int
    best_gamma: float | None = None


def neighborhood(g: Graph, subset) -> set:
    """Vertices joined by an edge to some vertex of the subset.

    Members of the subset with internal edges are included; a vertex with
    any self-loop is its own neighbour.
    """
    out = set()
    for v in subset:
        for e in g.out_edges(v):
            out.add(g.head[e])
    return out


def _neighbor_masks(g: Graph):
    masks = [0] * g.n
    for e in range(g.num_directed):
        masks[g.tail[e]] |= 1 << g.head[e]
    return masks


def _subset_tables(g: Graph):
    """For every subset mask: its neighbourhood mask, by doubling over bits."""
    masks = _neighbor_masks(g)
    dtype = np.uint32 if g.n <= 32 else np.uint64
    table = np.zeros(1, dtype=dtype)
    for v in range(g.n):
        table = np.concatenate([table, table | dtype(masks[v])])
    return table


def _popcount(arr):
    return np.bitwise_count(arr).astype(np.int64)


def _exhaustive_scan(g: Graph, gamma: float, lo: int, hi: int):
    """(holds, witness, best_gamma) over all subsets with lo <= |U| <= hi."""
    n = g.n
    if n > EXHAUSTIVE_VERTEX_CAP:
        raise ValueError(
            f"exhaustive magnification capped at {EXHAUSTIVE_VERTEX_CAP} vertices")
    table = _subset_tables(g)
    ids = np.arange(1 << n, dtype=np.uint32 if n <= 32 else np.uint64)
    sizes = _popcount(ids)
    window = (sizes >= max(lo, 1)) & (sizes <= hi)
    if not window.any():
        return True, None, None
    outside = _popcount(table[window] & ~ids[window])
    ratios = outside / sizes[window]
    best_idx = int(np.argmin(ratios))
    best_gamma = float(ratios[best_idx])
    if bool(np.all(outside >= gamma * sizes[window])):
        return True, None, best_gamma
    bad = int(ids[window][best_idx])
    witness = frozenset(v for v in range(n) if bad >> v & 1)
    return False, witness, best_gamma


def best_gamma_exhaustive(g: Graph):
    """Largest gamma for which g is a gamma-magnifier, plus an attaining set."""
    _, witness, best = _exhaustive_scan(g, math.inf, 1, g.n // 2)
    if best is None:
        raise ValueError("graph too small to contain a nonempty half-size set")
    return best, witness


def _bfs_ball(g: Graph, start: int, radius: int):
    ball = {start}
    frontier = {start}
    for _ in range(radius):
        frontier = neighborhood(g, frontier) - ball
        if not frontier:
            break
        ball |= frontier
    return ball


def _candidate_subsets(g: Graph, lo: int, hi: int, trials: int, rng,
                       fibre_blocks=()):
    seen = set()
    for blk in fibre_blocks:
        blk = frozenset(blk)
        if lo <= len(blk) <= hi and blk not in seen:
            seen.add(blk)
            yield blk
    for v in range(min(g.n, trials)):
        for radius in (1, 2, 3):
            ball = frozenset(_bfs_ball(g, v, radius))
            if lo <= len(ball) <= hi and ball not in seen:
                seen.add(ball)
                yield ball
    count = 0
    while count < trials:
        size = int(rng.integers(lo, hi + 1))
        u = frozenset(int(x) for x in rng.choice(g.n, size=size, replace=False))
        count += 1
        if u not in seen:
            seen.add(u)
            yield u


def _check_subsets(g: Graph, gamma: float, subsets):
    trials = 0
    best = None
    for u in subsets:
        trials += 1
        outside = len(neighborhood(g, u) - u)
        ratio = outside / len(u)
        if best is None or ratio < best:
            best = ratio
        if outside < gamma * len(u):
            return MagnificationResult(False, u, "sampled", trials, best)
    return MagnificationResult(True, None, "sampled", trials, best)


def is_magnifier(g: Graph, gamma: float, mode: str = "auto",
                 trials: int = 200, seed=0, fibre_blocks=()) -> MagnificationResult:
    """Test the expansion inequality over all U with |U| <= |V|/2."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return is_pseudo_magnifier(g, 1, gamma, mode, trials, seed, fibre_blocks)


def is_pseudo_magnifier(g: Graph, R: int, gamma: float, mode: str = "auto",
                        trials: int = 200, seed=0,
                        fibre_blocks=()) -> MagnificationResult:
    """Like is_magnifier, restricted to the window R <= |U| <= |V|/2."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if R < 1:
        raise ValueError("R must be at least 1")
    hi = g.n // 2
    if hi < R:
        return MagnificationResult(True, None, "exhaustive", 0, None)
    if mode == "auto":
        mode = "exhaustive" if g.n <= EXHAUSTIVE_VERTEX_CAP else "sampled"
    if mode == "exhaustive":
        holds, witness, best = _exhaustive_scan(g, gamma, R, hi)
        return MagnificationResult(holds, witness, "exhaustive",
                                   1 << g.n, best)
    rng = np.random.default_rng(seed)
    subsets = _candidate_subsets(g, R, hi, trials, rng, fibre_blocks)
    return _check_subsets(g, gamma, subsets)


def lift_fibre_blocks(lift: Lift):
    """Single-fibre seed sets: all of one base vertex's fibre, and halves."""
    n = lift.assignment.degree
    blocks = []
    for v in range(lift.base.n):
        full = [v * n + i for i in range(n)]
        blocks.append(full)
        blocks.append(full[: n // 2])
    return blocks


def alon_gap_bound(d: int, gamma: float) -> float:
    return d - gamma * gamma / (4 + 2 * gamma * gamma)


def alon_gap_check(g: Graph, gamma: float, tol: float = 1e-8) -> bool:
    """lambda_2 <= d - gamma^2/(4 + 2 gamma^2) + tol, premise verified first.

    The premise (g is d-regular and a gamma-magnifier) is established by an
    exhaustive scan, so g must fit under the exhaustive vertex cap.
    """
    d = g.regular_degree()
    if d is None:
        raise ValueError("the gap bound applies to regular graphs")
    result = is_magnifier(g, gamma, mode="exhaustive")
    if not result.holds:
        raise ValueError(
            f"premise unverified: not a {gamma}-magnifier "
            f"(witness {sorted(result.witness)})")
    return lambda2(g) <= alon_gap_bound(d, gamma) + tol


def imbalance_rate(eps: float, base_vertices: int) -> float:
    """Expansion rate nu_1 guaranteed for eps-imbalanced fibres.

    Solves (1 - eps')^(m-1) = 1 - eps for eps' and returns
    eps' * (1 - eps) / m, with m the number of base vertices.
    """
    if not (0 < eps < 1):
        raise ValueError("eps must lie strictly between 0 and 1")
    m = base_vertices
    if m < 2:
        return 0.0
    eps_prime = 1.0 - (1.0 - eps) ** (1.0 / (m - 1))
    return eps_prime * (1.0 - eps) / m


def fibre_imbalance_expansion(lift: Lift, subset: VertexSubset, eps: float):
    """(applies, nu_1, satisfied) for the almost-equal-fibre dichotomy.

    applies is true when the smallest fibre of the subset is below
    (1 - eps) times the largest; in that case the external neighbourhood
    is guaranteed to reach nu_1 * |U| once the cover degree is large, and
    satisfied reports whether it already does for this subset.
    """
    sizes = subset.fibre_sizes()
    if not subset.members:
        raise ValueError("subset must be nonempty")
    applies = min(sizes) < (1.0 - eps) * max(sizes)
    nu1 = imbalance_rate(eps, lift.base.n)
    outside = len(neighborhood(lift.cover, subset.members) - subset.members)
    satisfied = outside >= nu1 * len(subset.members)
    return applies, nu1, satisfied
