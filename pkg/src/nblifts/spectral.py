"""Adjacency and non-backtracking (Hashimoto) spectra of multigraphs.

The Hashimoto matrix is indexed by directed edges; its (e1, e2) entry is 1
exactly when e2 continues e1 without backtracking.  Old-versus-new spectrum
separation matches each base eigenvalue to its nearest unmatched cover
eigenvalue; the covering guarantees exact matches mathematically, so a
failed match signals a numerical problem or an invalid lift.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .graphs import Graph, nb_successors, prune
from .lifts import Lift

DENSE_HASHIMOTO_CAP = 4000


class SpectralError(RuntimeError):
    """Numerical failure: unmatched eigenvalue or broken trace identity."""


def adjacency_matrix(g: Graph) -> np.ndarray:
    """Symmetric vertex matrix; entry (u, v) counts directed edges u -> v."""
    a = np.zeros((g.n, g.n))
    for e in range(g.num_directed):
        a[g.tail[e], g.head[e]] += 1.0
    return a


def hashimoto_matrix(g: Graph) -> np.ndarray:
    """0/1 directed-edge matrix of non-backtracking length-two walks."""
    m = g.num_directed
    h = np.zeros((m, m))
    for e, succs in enumerate(nb_successors(g)):
        for f in succs:
            h[e, f] = 1.0
    return h


def adjacency_spectrum(g: Graph) -> np.ndarray:
    return np.linalg.eigvalsh(adjacency_matrix(g)) if g.n else np.zeros(0)


def hashimoto_spectrum(g: Graph) -> np.ndarray:
    """All Hashimoto eigenvalues, sorted by (real, imag); dense solve."""
    m = g.num_directed
    if m == 0:
        return np.zeros(0, dtype=complex)
    if m > DENSE_HASHIMOTO_CAP:
        raise SpectralError(
            f"dense Hashimoto solve capped at {DENSE_HASHIMOTO_CAP} directed "
            f"edges; got {m}")
    vals = np.linalg.eigvals(hashimoto_matrix(g))
    return np.asarray(sorted(vals, key=lambda z: (z.real, z.imag)))


def _power_spectral_radius(g: Graph, tol: float = 1e-12,
                           max_iter: int = 100000) -> float:
    """Perron root of H via power iteration on H + I.

    The identity shift removes the periodicity that stalls plain power
    iteration on bipartite-like transition structures; the shift moves the
    Perron root by exactly one.
    """
    m = g.num_directed
    src = []
    dst = []
    for e, succs in enumerate(nb_successors(g)):
        src.extend([e] * len(succs))
        dst.extend(succs)
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    x = np.full(m, 1.0 / math.sqrt(m))
    lam = 0.0
    for _ in range(max_iter):
        y = x + np.bincount(dst, weights=x[src], minlength=m)
        norm = float(np.linalg.norm(y))
        if norm == 0:
            return 0.0
        y /= norm
        if abs(norm - lam) <= tol * max(1.0, norm):
            return norm - 1.0
        lam, x = norm, y
    return lam - 1.0


def mu1(g: Graph) -> float:
    """Spectral radius of the Hashimoto matrix.

    Computed on the pruned core: pendant trees only contribute nilpotent
    blocks, whose numerically ill-conditioned zero eigenvalues would
    otherwise pollute the result.  Forests give exactly 0.
    """
    if g.n == 0:
        raise ValueError("mu1 of the empty graph is undefined")
    core = prune(g)
    if core.n == 0:
        return 0.0
    m = core.num_directed
    if m <= DENSE_HASHIMOTO_CAP:
        vals = np.linalg.eigvals(hashimoto_matrix(core))
        return float(np.max(np.abs(vals)))
    return _power_spectral_radius(core)


@dataclass(frozen=True)
class SpectrumMultiset:
    """Eigenvalues with the tolerance used for multiset operations."""

    values: tuple
    tolerance: float = 1e-7

    def __len__(self):
        return len(self.values)

    def multiplicity_pairs(self):
        """Cluster values within tolerance into (value, multiplicity) pairs."""
        pairs = []
        for v in self.values:
            if pairs and abs(v - pairs[-1][0]) <= self.tolerance * (1 + abs(v)):
                pairs[-1][1] += 1
            else:
                pairs.append([v, 1])
        return [(v, k) for v, k in pairs]

    def to_json(self):
        def enc(v):
            if isinstance(v, complex):
                return [v.real, v.imag]
            return float(v)
        return {
            "values": [enc(v) for v in self.values],
            "multiplicity_pairs": [[enc(v), k] for v, k in self.multiplicity_pairs()],
            "tolerance": self.tolerance,
        }


def _sorted_tuple(vals):
    return tuple(sorted(vals, key=lambda z: (np.real(z), np.imag(z))))


def multiset_difference(cover_vals, base_vals, tol):
    """Remove each base value's nearest unmatched cover value.

    Returns (remaining values, worst matching error).  Raises SpectralError
    when some base value has no cover value within tol * (1 + |value|).
    """
    cover = list(cover_vals)
    used = [False] * len(cover)
    worst = 0.0
    for b in base_vals:
        best, best_err = -1, math.inf
        for i, c in enumerate(cover):
            if used[i]:
                continue
            err = abs(c - b)
            if err < best_err:
                best, best_err = i, err
        if best < 0 or best_err > tol * (1 + abs(b)):
            raise SpectralError(
                f"eigenvalue {b} has no match within {tol * (1 + abs(b))} "
                f"(best {best_err})")
        used[best] = True
        worst = max(worst, best_err)
    rest = [c for i, c in enumerate(cover) if not used[i]]
    return _sorted_tuple(rest), worst


def multiset_contains(big_vals, small_vals, tol) -> bool:
    try:
        multiset_difference(big_vals, small_vals, tol)
        return True
    except SpectralError:
        return False


def new_spectrum(lift: Lift, which: str = "adjacency",
                 tol: float = 1e-7) -> SpectrumMultiset:
    """Cover spectrum minus the pulled-back base spectrum, as a multiset."""
    if which == "adjacency":
        cover_vals = adjacency_spectrum(lift.cover)
        base_vals = adjacency_spectrum(lift.base)
    elif which == "hashimoto":
        cover_vals = hashimoto_spectrum(lift.cover)
        base_vals = hashimoto_spectrum(lift.base)
    else:
        raise ValueError("which must be 'adjacency' or 'hashimoto'")
    rest, _ = multiset_difference(cover_vals, base_vals, tol)
    return SpectrumMultiset(rest, tol)


def alon_threshold(d: int, eps: float = 0.0) -> float:
    """2 sqrt(d-1) + eps, the bound new eigenvalues are tested against."""
    return 2.0 * math.sqrt(d - 1) + eps


def non_alon_count(lift: Lift, eps: float, tol: float = 1e-7) -> int:
    """New adjacency eigenvalues exceeding the regular-base bound, with multiplicity."""
    d = lift.base.regular_degree()
    if d is None:
        raise ValueError("non-Alon counting requires a regular base graph")
    bound = alon_threshold(d, eps)
    new = new_spectrum(lift, "adjacency", tol)
    return sum(1 for v in new.values if abs(v) > bound)


def is_ramanujan(g: Graph, tol: float = 1e-9) -> bool:
    """d-regular with every adjacency eigenvalue in the extremal set or bulk."""
    d = g.regular_degree()
    if d is None:
        raise ValueError("Ramanujan test requires a regular graph")
    bulk = alon_threshold(d)
    for lam in adjacency_spectrum(g):
        if abs(lam - d) <= tol or abs(lam + d) <= tol or abs(lam) <= bulk + tol:
            continue
        return False
    return True


@dataclass(frozen=True)
class IharaResult:
    status: str  # "checked", "skipped-nonregular", "skipped-half-loop"
    passed: bool | None
    max_err: float | None = None


def ihara_check(g: Graph, tol: float = 1e-6) -> IharaResult:
    """Verify the determinantal link between adjacency and Hashimoto spectra.

    For d-regular g without half-loops, each adjacency eigenvalue lam yields
    the two roots of mu^2 - lam*mu + (d-1), and the remaining Hashimoto
    eigenvalues are +/-1, each with multiplicity #E - #V.
    """
    d = g.regular_degree()
    if d is None:
        return IharaResult("skipped-nonregular", None)
    if g.has_half_loops():
        return IharaResult("skipped-half-loop", None)
    lams = adjacency_spectrum(g)
    expected = []
    q = d - 1
    for lam in lams:
        disc = np.sqrt(complex(lam * lam - 4 * q))
        expected.append((lam + disc) / 2)
        expected.append((lam - disc) / 2)
    extra = g.num_edges - g.n
    expected.extend([1.0 + 0j] * extra)
    expected.extend([-1.0 + 0j] * extra)
    actual = hashimoto_spectrum(g)
    if len(actual) != len(expected):
        return IharaResult("checked", False, math.inf)
    worst = 0.0
    used = [False] * len(actual)
    for b in expected:
        best, best_err = -1, math.inf
        for i, c in enumerate(actual):
            if not used[i]:
                err = abs(c - b)
                if err < best_err:
                    best, best_err = i, err
        used[best] = True
        worst = max(worst, best_err)
    return IharaResult("checked", bool(worst <= tol), float(worst))


def lambda2(g: Graph) -> float:
    """Second-largest adjacency eigenvalue."""
    vals = adjacency_spectrum(g)
    if len(vals) < 2:
        raise ValueError("lambda2 needs at least two vertices")
    return float(vals[-2])


def hashimoto_radius_from_adjacency(lam_abs: float, d: int) -> float:
    """Largest-modulus root of mu^2 - lam*mu + (d-1) for |lam| = lam_abs.

    Exact for regular graphs without half-loops (by the determinantal
    formula); used as a fast proxy for the new Hashimoto radius.
    """
    q = d - 1
    if lam_abs * lam_abs <= 4 * q:
        return math.sqrt(q)
    return (lam_abs + math.sqrt(lam_abs * lam_abs - 4 * q)) / 2


@dataclass(frozen=True)
class SpectralReport:
    """Old/new spectra of a lift plus its non-Alon count."""

    adjacency_spectrum: SpectrumMultiset
    hashimoto_spectrum: SpectrumMultiset | None
    new_adjacency: SpectrumMultiset
    new_hashimoto: SpectrumMultiset | None
    non_alon_count: int | None
    epsilon: float
    base_regular_degree: int | None = None
    ramanujan_base: bool | None = None

    def to_json(self):
        return {
            "adjacency": self.adjacency_spectrum.to_json(),
            "hashimoto": (self.hashimoto_spectrum.to_json()
                          if self.hashimoto_spectrum else None),
            "new_adjacency": self.new_adjacency.to_json(),
            "new_hashimoto": (self.new_hashimoto.to_json()
                              if self.new_hashimoto else None),
            "non_alon_count": self.non_alon_count,
            "epsilon": self.epsilon,
            "base_regular_degree": self.base_regular_degree,
            "ramanujan_base": self.ramanujan_base,
        }


def spectral_report(lift: Lift, eps: float, tol: float = 1e-7,
                    with_hashimoto: bool = False) -> SpectralReport:
    d = lift.base.regular_degree()
    cover_adj = SpectrumMultiset(_sorted_tuple(adjacency_spectrum(lift.cover)), tol)
    new_adj = new_spectrum(lift, "adjacency", tol)
    hsp = new_h = None
    if with_hashimoto:
        hsp = SpectrumMultiset(_sorted_tuple(hashimoto_spectrum(lift.cover)), tol)
        new_h = new_spectrum(lift, "hashimoto", tol)
    count = non_alon_count(lift, eps, tol) if d is not None else None
    ram = is_ramanujan(lift.base) if d is not None else None
    return SpectralReport(cover_adj, hsp, new_adj, new_h, count, eps, d, ram)
