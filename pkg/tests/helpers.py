"""Generators shared by the test modules: the small-multigraph corpus and
random connected multigraphs."""

from itertools import combinations_with_replacement

from nblifts.graphs import Graph, from_pairs
from nblifts.tangles import canonical_form


def _orbit_types(nv):
    types = []
    for v in range(nv):
        types.append(("half", v))
        types.append(("whole", v))
    for u in range(nv):
        for v in range(u + 1, nv):
            types.append(("edge", u, v))
    return types


def _build(nv, multiset):
    pairs = []
    halves = []
    for t in multiset:
        if t[0] == "half":
            halves.append(t[1])
        elif t[0] == "whole":
            pairs.append((t[1], t[1]))
        else:
            pairs.append((t[1], t[2]))
    return from_pairs(nv, pairs, halves)


def connected_multigraph_corpus(max_vertices=3, max_orbits=5):
    """All connected multigraphs up to isomorphism within the size caps.

    Includes half-loops and whole-loops; single isolated vertices count as
    connected, so the one-vertex edgeless graph is in the corpus.
    """
    seen = set()
    out = []
    for nv in range(1, max_vertices + 1):
        types = _orbit_types(nv)
        for count in range(0, max_orbits + 1):
            for multiset in combinations_with_replacement(types, count):
                g = _build(nv, multiset)
                if not g.is_connected():
                    continue
                key = canonical_form(g)
                if key in seen:
                    continue
                seen.add(key)
                out.append(g)
    return out


def random_connected_multigraph(rng, max_vertices=6, max_extra=5,
                                half_loop_prob=0.15):
    """Random connected multigraph: a random tree plus extra random orbits."""
    n = int(rng.integers(1, max_vertices + 1))
    pairs = []
    for v in range(1, n):
        pairs.append((int(rng.integers(0, v)), v))
    for _ in range(int(rng.integers(0, max_extra + 1))):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        pairs.append((u, v))
    halves = [int(rng.integers(0, n))
              for _ in range(int(rng.integers(0, 3)))
              if rng.random() < half_loop_prob]
    return from_pairs(n, pairs, halves)
