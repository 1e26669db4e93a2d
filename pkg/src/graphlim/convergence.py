"""Evidence for convergence of graph sequences, and parameter estimation by sampling.

Densities are normalised by ``n^2`` throughout (``t(K2, G) = e_G(V, V) / n^2``),
so for example the max-cut density of ``K_n`` tends to 1/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import WeightedGraph, complete_graph
from .cutdistance import delta_cut
from .cutnorm import restricted_cut_norm
from .errors import CapacityError, InputError
from .homdensity import MAX_CATALOG_NODES, enumerate_small_graphs, t_density
from .sampling import as_seed, induce_sample, make_rng, randomize

MAXCUT_EXACT_LIMIT = 20


@dataclass(frozen=True)
class DensityProfile:
    k: int
    values: dict

    def order(self, n: int) -> dict:
        """Entries for the classes on exactly ``n`` nodes."""
        return {key: v for key, v in self.values.items() if key[0] == n}

    def to_dict(self) -> dict:
        return {"k": self.k, "values": {key.hex(): v for key, v in self.values.items()}}


def density_profile(G: WeightedGraph, k: int) -> DensityProfile:
    """``t(F, G)`` for one representative ``F`` of every simple graph on ``1..k`` nodes."""
    if k < 1 or k > min(5, MAX_CATALOG_NODES):
        raise CapacityError("density profiles are computed for k <= 5")
    cat = enumerate_small_graphs(k)
    return DensityProfile(k, {key: t_density(F, G) for key, F in cat.entries})


@dataclass(frozen=True)
class ProfileDistance:
    dmax: float
    delta_bound: float | None
    premise_holds: bool
    vacuous: bool


def profile_distance(p1: DensityProfile, p2: DensityProfile, C: float = 1.0) -> ProfileDistance:
    """Largest density gap over ``k``-node graphs and the implied distance bound.

    When every gap is at most ``3^(-k^2)`` the distance is at most
    ``22 C / sqrt(log2 k)``; otherwise no bound is returned.  A bound
    larger than 1 (always the case at small ``k``) is flagged vacuous.
    """
    if p1.k != p2.k:
        raise InputError(f"profile orders differ: {p1.k} vs {p2.k}")
    k = p1.k
    a, b = p1.order(k), p2.order(k)
    dmax = max(abs(a[key] - b[key]) for key in a)
    premise = dmax <= 3.0 ** (-k * k)
    bound = None
    if premise and k >= 2:
        bound = 22 * C / math.sqrt(math.log2(k))
    vacuous = bound is None or bound > 1
    return ProfileDistance(float(dmax), bound, premise, vacuous)


@dataclass
class CauchyReport:
    k: int
    sizes: list
    profile_dmax: np.ndarray
    delta_upper: np.ndarray
    trend: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"k": self.k, "sizes": self.sizes,
                "profile_dmax": self.profile_dmax.tolist(),
                "delta_upper": self.delta_upper.tolist(), "trend": self.trend}


def cauchy_diagnostic(sequence: Sequence[WeightedGraph], k: int = 3, *,
                      distances: bool = True, seed: int = 0) -> CauchyReport:
    """Pairwise profile gaps and ``delta_cut`` upper bounds along a sequence.

    The trend summary lists the gap between consecutive members and whether
    it is non-increasing; no convergence verdict is drawn.
    """
    if len(sequence) < 2:
        raise InputError("a sequence needs at least two graphs")
    m = len(sequence)
    profiles = [density_profile(G, k) for G in sequence]
    D = np.zeros((m, m))
    U = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            D[i, j] = D[j, i] = profile_distance(profiles[i], profiles[j]).dmax
            if distances:
                U[i, j] = U[j, i] = delta_cut(sequence[i], sequence[j], seed=seed,
                                              refine_iters=10).value
    steps_p = [float(D[i, i + 1]) for i in range(m - 1)]
    trend = {"consecutive_profile_dmax": steps_p,
             "profile_nonincreasing": all(x >= y - 1e-12 for x, y in zip(steps_p, steps_p[1:]))}
    if distances:
        steps_d = [float(U[i, i + 1]) for i in range(m - 1)]
        trend["consecutive_delta_upper"] = steps_d
        trend["delta_nonincreasing"] = all(x >= y - 1e-12 for x, y in zip(steps_d, steps_d[1:]))
    if not distances:
        U[:] = np.nan
        np.fill_diagonal(U, 0.0)
    return CauchyReport(k, [G.n for G in sequence], D, U, trend)


# ---------------------------------------------------------------------------
# generators


def uniform_attachment_sequence(sizes: Sequence[int], seed=0) -> list[WeightedGraph]:
    """Snapshots of one uniform attachment run at the requested node counts.

    Going from ``n`` to ``n + 1`` nodes: add an isolated node, then join
    every nonadjacent pair (the new node included) with probability ``1/n``.
    """
    sizes = sorted(set(int(s) for s in sizes))
    if not sizes or sizes[0] < 1:
        raise InputError("sizes must be positive")
    N = sizes[-1]
    rng = make_rng(seed)
    A = np.zeros((N, N), dtype=bool)
    out = []
    want = set(sizes)
    if 1 in want:
        out.append(WeightedGraph(np.ones(1), np.zeros((1, 1))))
    for n in range(1, N):
        m = n + 1
        U = rng.random((m, m))
        new = np.triu(U < 1.0 / n, 1) & ~A[:m, :m]
        A[:m, :m] |= new | new.T
        if m in want:
            out.append(WeightedGraph(np.ones(m), A[:m, :m].astype(float)))
    return out


def uniform_attachment(n: int, seed=0) -> WeightedGraph:
    return uniform_attachment_sequence([n], seed)[0]


# ---------------------------------------------------------------------------
# testable parameters


@dataclass(frozen=True)
class TestableParameter:
    name: str
    evaluate: Callable[[WeightedGraph], float]
    exact_limit: int | None = None

    def __call__(self, G: WeightedGraph) -> float:
        return self.evaluate(G)

    def is_exact(self, n: int) -> bool:
        return self.exact_limit is None or n <= self.exact_limit


def edge_density(G: WeightedGraph) -> float:
    return t_density(complete_graph(2), G)


def triangle_density(G: WeightedGraph) -> float:
    return t_density(complete_graph(3), G)


def _maxcut_local(B: np.ndarray, rng: np.random.Generator, restarts: int = 16) -> float:
    n = B.shape[0]
    best = 0.0
    for _ in range(restarts):
        x = rng.random(n) < 0.5
        while True:
            s = np.where(x, 1.0, -1.0)
            # flipping i changes the cut by s_i * sum_j B_ij s_j (loops excluded)
            gain = s * (B @ s - np.diag(B) * s)
            i = int(gain.argmax())
            if gain[i] <= 1e-12:
                break
            x[i] = ~x[i]
        val = float(B[np.ix_(x, ~x)].sum())
        best = max(best, val)
    return best


def maxcut_density(G: WeightedGraph, seed: int = 0) -> float:
    """``max_S e_G(S, V - S) / n^2``; exact for ``n <= 20``, local search beyond."""
    n = G.n
    if n <= MAXCUT_EXACT_LIMIT:
        if np.all(G.beta >= 0):
            return restricted_cut_norm(G, "complement")
        # signed weights: the complement variant takes an absolute value, so
        # enumerate cut values directly
        from .cutnorm import _bit_table
        B = _bit_table(n)
        A = G.beta * np.outer(G.alpha, G.alpha) / G.alpha.sum() ** 2
        return float(((B @ A) * (1 - B)).sum(axis=1).max())
    A = G.beta * np.outer(G.alpha, G.alpha) / G.alpha.sum() ** 2
    return _maxcut_local(A, np.random.default_rng(seed))


EDGE_DENSITY = TestableParameter("edge_density", edge_density)
TRIANGLE_DENSITY = TestableParameter("triangle_density", triangle_density)
MAXCUT_DENSITY = TestableParameter("maxcut_density", maxcut_density, MAXCUT_EXACT_LIMIT)
BUILTIN_PARAMETERS = {p.name: p for p in (EDGE_DENSITY, TRIANGLE_DENSITY, MAXCUT_DENSITY)}


def get_parameter(name: str) -> TestableParameter:
    try:
        return BUILTIN_PARAMETERS[name]
    except KeyError:
        raise InputError(f"unknown parameter {name!r}; choose from "
                         f"{', '.join(sorted(BUILTIN_PARAMETERS))}") from None


def estimate_parameter(f: TestableParameter, G: WeightedGraph, k: int, reps: int = 1,
                       seed=0) -> tuple[float, dict]:
    """Mean of ``f`` over ``reps`` induced samples on ``k`` nodes, with its spread."""
    if k > G.n:
        raise InputError(f"k = {k} exceeds the number of nodes {G.n}")
    if reps < 1:
        raise InputError("reps must be positive")
    base = as_seed(seed)
    vals = np.array([f(induce_sample(G, k, base.child(r))) for r in range(reps)])
    spread = {"min": float(vals.min()), "max": float(vals.max()),
              "stdev": float(vals.std(ddof=1)) if reps > 1 else 0.0,
              "exact": f.is_exact(k)}
    return float(vals.mean()), spread


def hat_f(f: TestableParameter, H: WeightedGraph, reps: int = 100, seed=0) -> tuple[float, float]:
    """Monte Carlo estimate of ``E f(G(H))`` with its standard error."""
    off = H.beta[~np.eye(H.n, dtype=bool)]
    base = as_seed(seed)
    if np.all((off == 0) | (off == 1)):
        return float(f(randomize(H, base))), 0.0
    if reps < 2:
        raise InputError("reps must be at least 2")
    vals = np.array([f(randomize(H, base.child(r))) for r in range(reps)])
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(reps))
