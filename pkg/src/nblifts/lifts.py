"""Random permutation assignments on a base graph and the covers they define.

A degree-n cover of B has vertex set V_B x [n] and directed edges
E_B x [n], glued by one permutation per directed base edge subject to
sigma(inv(e)) = sigma(e)^-1.  Sampling models:

* permutation: every edge orbit gets a uniform permutation;
* cyclic: whole-loops get a uniform single n-cycle instead;
* half-loops always get a uniform perfect matching (n even) or a uniform
  involution with exactly one fixed point (n odd), per the model's parity.

Draws are edge-independent on the lowest-id orientation, with one RNG
stream per (seed, edge id), so sampling is reproducible and parallelizable.
"""

from dataclasses import dataclass

import numpy as np

from .graphs import Graph, GraphMorphism

MODEL_KINDS = ("permutation", "cyclic")
HALF_LOOP_RULES = (None, "matching", "near_matching")


class ModelError(ValueError):
    """Illegal (base graph, model, degree) combination."""


@dataclass(frozen=True)
class ModelSpec:
    """Which distribution each kind of base edge receives."""

    kind: str = "permutation"
    half_loop: str | None = None

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ModelError(f"unknown model kind {self.kind!r}")
        if self.half_loop not in HALF_LOOP_RULES:
            raise ModelError(f"unknown half-loop rule {self.half_loop!r}")

    @property
    def parity(self) -> str:
        if self.half_loop == "matching":
            return "even"
        if self.half_loop == "near_matching":
            return "odd"
        return "any"

    def to_json(self) -> dict:
        return {"model": self.kind, "half_loop": self.half_loop,
                "parity": self.parity}

    @classmethod
    def from_json(cls, data: dict) -> "ModelSpec":
        spec = cls(kind=data.get("model", "permutation"),
                   half_loop=data.get("half_loop"))
        declared = data.get("parity")
        if declared is not None and declared != spec.parity:
            raise ModelError(
                f"declared parity {declared!r} conflicts with half-loop rule "
                f"{spec.half_loop!r} (implies {spec.parity!r})")
        return spec


def validate_model(base: Graph, spec: ModelSpec, n: int) -> bool:
    """True iff (base, spec, n) is a legal combination."""
    if n < 1:
        return False
    if base.has_half_loops() and spec.half_loop is None:
        return False
    if spec.parity == "even" and n % 2 != 0:
        return False
    if spec.parity == "odd" and n % 2 != 1:
        return False
    return True


def _check_model(base: Graph, spec: ModelSpec, n: int):
    if n < 1:
        raise ModelError("cover degree must be at least 1")
    if base.has_half_loops() and spec.half_loop is None:
        raise ModelError("base has half-loops but no half-loop rule was given")
    if spec.parity == "even" and n % 2 != 0:
        raise ModelError(f"model requires even degree, got {n}")
    if spec.parity == "odd" and n % 2 != 1:
        raise ModelError(f"model requires odd degree, got {n}")


def _uniform_permutation(rng, n):
    return rng.permutation(n)


def _uniform_cycle(rng, n):
    """Uniform permutation whose cycle structure is a single n-cycle."""
    order = rng.permutation(n)
    sigma = np.empty(n, dtype=np.int64)
    sigma[order] = np.roll(order, -1)
    return sigma


def _uniform_matching(rng, n):
    """Uniform fixed-point-free involution (n even)."""
    order = rng.permutation(n)
    sigma = np.empty(n, dtype=np.int64)
    sigma[order[0::2]] = order[1::2]
    sigma[order[1::2]] = order[0::2]
    return sigma


def _uniform_near_matching(rng, n):
    """Uniform involution with exactly one fixed point (n odd)."""
    order = rng.permutation(n)
    sigma = np.empty(n, dtype=np.int64)
    sigma[order[-1]] = order[-1]
    rest = order[:-1]
    sigma[rest[0::2]] = rest[1::2]
    sigma[rest[1::2]] = rest[0::2]
    return sigma


def _invert(sigma):
    inv = np.empty_like(sigma)
    inv[sigma] = np.arange(len(sigma))
    return inv


@dataclass(frozen=True)
class PermutationAssignment:
    """One permutation of [n] per directed base edge, inverse on partners."""

    base: Graph
    degree: int
    sigma: np.ndarray  # shape (num_directed, degree)

    def __post_init__(self):
        sig = np.asarray(self.sigma, dtype=np.int64)
        if sig.shape != (self.base.num_directed, self.degree):
            raise ValueError("sigma has wrong shape")
        object.__setattr__(self, "sigma", sig)
        ident = np.arange(self.degree)
        for e in range(self.base.num_directed):
            row = sig[e]
            if sorted(row.tolist()) != list(range(self.degree)):
                raise ValueError(f"sigma[{e}] is not a permutation")
            if not np.array_equal(sig[self.base.inv[e]][row], ident):
                raise ValueError(
                    f"sigma on edge {e} and its partner are not inverse")
        sig.flags.writeable = False

    @classmethod
    def from_dict(cls, base: Graph, degree: int, by_rep: dict):
        """Build from permutations keyed by orbit representative ids."""
        sig = np.empty((base.num_directed, degree), dtype=np.int64)
        for rep in base.orientation():
            perm = np.asarray(by_rep[rep], dtype=np.int64)
            sig[rep] = perm
            if base.inv[rep] != rep:
                sig[base.inv[rep]] = _invert(perm)
        return cls(base, degree, sig)

    @classmethod
    def identity(cls, base: Graph, degree: int):
        sig = np.tile(np.arange(degree), (base.num_directed, 1))
        return cls(base, degree, sig)


def sample_assignment(base: Graph, n: int, spec: ModelSpec,
                      seed) -> PermutationAssignment:
    """Draw a permutation assignment for the given model, deterministically."""
    _check_model(base, spec, n)
    sig = np.empty((base.num_directed, n), dtype=np.int64)
    for rep in base.orientation():
        rng = np.random.default_rng([int(seed), rep])
        if base.inv[rep] == rep:
            if spec.half_loop == "matching":
                perm = _uniform_matching(rng, n)
            else:
                perm = _uniform_near_matching(rng, n)
        elif base.tail[rep] == base.head[rep] and spec.kind == "cyclic":
            perm = _uniform_cycle(rng, n)
        else:
            perm = _uniform_permutation(rng, n)
        sig[rep] = perm
        if base.inv[rep] != rep:
            sig[base.inv[rep]] = _invert(perm)
    return PermutationAssignment(base, n, sig)


@dataclass(frozen=True)
class Lift:
    """A coordinatized cover together with its projection to the base."""

    base: Graph
    cover: Graph
    projection: GraphMorphism
    assignment: PermutationAssignment


def build_lift(base: Graph, assignment: PermutationAssignment) -> Lift:
    """Glue the degree-n cover: vertex (v,i) -> v*n+i, edge (e,i) -> e*n+i."""
    if assignment.base != base:
        raise ValueError("assignment was built for a different base graph")
    n = assignment.degree
    sig = assignment.sigma
    nb = base.n
    mb = base.num_directed
    tail = np.empty(mb * n, dtype=np.int64)
    head = np.empty(mb * n, dtype=np.int64)
    inv = np.empty(mb * n, dtype=np.int64)
    idx = np.arange(n)
    for e in range(mb):
        lo = e * n
        tail[lo:lo + n] = base.tail[e] * n + idx
        head[lo:lo + n] = base.head[e] * n + sig[e]
        inv[lo:lo + n] = base.inv[e] * n + sig[e]
    cover = Graph(nb * n, tail.tolist(), head.tolist(), inv.tolist())
    vmap = tuple(v // n for v in range(nb * n))
    emap = tuple(e // n for e in range(mb * n))
    projection = GraphMorphism(cover, base, vmap, emap)
    return Lift(base, cover, projection, assignment)


def sample_lift(base: Graph, n: int, spec: ModelSpec, seed) -> Lift:
    return build_lift(base, sample_assignment(base, n, spec, seed))


def holonomy_generators(lift: Lift):
    """Permutations whose orbit count equals the cover's component count.

    Gauges the fibres along a spanning tree of the (connected) base so tree
    edges act trivially; the remaining orbit representatives then generate
    the holonomy action on [n].
    """
    base, sig, n = lift.base, lift.assignment.sigma, lift.assignment.degree
    if not base.is_connected():
        raise ValueError("holonomy generators need a connected base")
    gauge = [None] * base.n
    gauge[0] = np.arange(n)
    tree = set()
    stack = [0]
    while stack:
        v = stack.pop()
        for e in base.out_edges(v):
            w = base.head[e]
            if gauge[w] is None:
                gauge[w] = sig[e][gauge[v]]
                tree.add(min(e, base.inv[e]))
                stack.append(w)
    gens = []
    for rep in base.orientation():
        if min(rep, base.inv[rep]) in tree:
            continue
        gv = gauge[base.tail[rep]]
        gw_inv = _invert(gauge[base.head[rep]])
        gens.append(gw_inv[sig[rep][gv]])
    return gens


def orbit_count(generators, n: int) -> int:
    """Number of orbits of the group generated by the given permutations."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in generators:
        for i in range(n):
            a, b = find(i), find(int(g[i]))
            if a != b:
                parent[a] = b
    return len({find(i) for i in range(n)})
