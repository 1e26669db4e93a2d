"""Step graphons, the three built-in analytic graphons, and their densities.

A step graphon is stored as consecutive step lengths (``measures``) and a
symmetric matrix of values, i.e. exactly the weighted graph whose node
weights are the step lengths.  Averages over interval partitions are
computed on the common refinement of the two sets of breakpoints, so they
are exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import WeightedGraph
from .cutnorm import cut_norm
from .errors import InputError
from .homdensity import t_density

BREAK_TOL = 1e-12
BUILTINS = ("constant", "min", "halfgraph")


@dataclass(frozen=True, eq=False)
class StepGraphon:
    measures: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        m = np.atleast_1d(np.asarray(self.measures, dtype=float))
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        if m.ndim != 1 or m.size < 1:
            raise InputError("a step graphon needs at least one step")
        if np.any(m <= 0):
            raise InputError(f"step {int(np.argmax(m <= 0))} has non-positive length")
        if abs(m.sum() - 1.0) > 1e-12:
            raise InputError(f"step lengths sum to {m.sum()!r}, not 1")
        if v.shape != (m.size, m.size):
            raise InputError(f"values have shape {v.shape}, expected {(m.size, m.size)}")
        if not np.array_equal(v, v.T):
            raise InputError("step values are not symmetric")
        m.setflags(write=False)
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "measures", m)
        object.__setattr__(self, "values", v)

    @property
    def q(self) -> int:
        return self.measures.size

    def breakpoints(self) -> np.ndarray:
        """Interval endpoints ``0 = b_0 < ... < b_q = 1``."""
        b = np.concatenate([[0.0], np.cumsum(self.measures)])
        b[-1] = 1.0
        return b

    def to_weighted_graph(self) -> WeightedGraph:
        return WeightedGraph(self.measures, self.values)

    def __call__(self, x, y):
        b = self.breakpoints()
        i = np.clip(np.searchsorted(b, x, side="right") - 1, 0, self.q - 1)
        j = np.clip(np.searchsorted(b, y, side="right") - 1, 0, self.q - 1)
        return self.values[i, j]


@dataclass(frozen=True)
class AnalyticGraphon:
    """``constant`` (value ``p``), ``min`` (``min(x, y)``) or ``halfgraph``
    (1 where ``|x - y| >= 1/2``)."""

    name: str
    p: float | None = None

    def __post_init__(self):
        if self.name not in BUILTINS:
            raise InputError(f"unknown built-in graphon {self.name!r}")
        if self.name == "constant":
            if self.p is None or not np.isfinite(self.p):
                raise InputError("the constant graphon needs a finite value p")

    def __call__(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if self.name == "constant":
            return np.full(np.broadcast(x, y).shape, float(self.p))
        if self.name == "min":
            return np.minimum(x, y)
        return (np.abs(x - y) >= 0.5).astype(float)

    def _primitive(self, x, y):
        # integral of W over [0, x] x [0, y]
        if self.name == "constant":
            return float(self.p) * x * y
        if self.name == "min":
            lo, hi = np.minimum(x, y), np.maximum(x, y)
            return lo * lo * hi / 2 - lo ** 3 / 6
        return _upper_corner_area(x, y) + _upper_corner_area(y, x)

    def block_integral(self, x0, x1, y0, y1):
        P = self._primitive
        return P(x1, y1) - P(x0, y1) - P(x1, y0) + P(x0, y0)


def _upper_corner_area(x, y):
    """Area of ``{(s, t) in [0, x] x [0, y] : t - s >= 1/2}``."""
    c = np.maximum(np.asarray(y, dtype=float) - 0.5, 0.0)
    u = np.minimum(x, c)
    return c * u - u * u / 2


@dataclass(frozen=True, eq=False)
class IntervalPartition:
    """Partition of [0, 1] into consecutive intervals, given by inner breakpoints."""

    breakpoints: np.ndarray

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.breakpoints, dtype=float))
        if b.ndim != 1:
            raise InputError("breakpoints must be a vector")
        if b.size and (b[0] <= 0 or b[-1] >= 1 or np.any(np.diff(b) <= 0)):
            raise InputError("breakpoints must be strictly increasing inside (0, 1)")
        b.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)

    @classmethod
    def equal(cls, q: int) -> "IntervalPartition":
        if q < 1:
            raise InputError("an interval partition needs at least one class")
        return cls(np.arange(1, q) / q)

    @classmethod
    def of(cls, W: StepGraphon) -> "IntervalPartition":
        return cls(W.breakpoints()[1:-1])

    @property
    def q(self) -> int:
        return self.breakpoints.size + 1

    def edges(self) -> np.ndarray:
        return np.concatenate([[0.0], self.breakpoints, [1.0]])

    def lengths(self) -> np.ndarray:
        return np.diff(self.edges())


def step_from_graph(G: WeightedGraph) -> StepGraphon:
    """The step graphon ``W_G``: node weights become step lengths."""
    m = G.alpha / G.alpha.sum()
    m[-1] = 1.0 - m[:-1].sum()
    return StepGraphon(m, G.beta)


def _merge_points(*point_sets: np.ndarray) -> np.ndarray:
    pts = np.sort(np.concatenate(point_sets))
    keep = [0.0]
    for p in pts:
        if p - keep[-1] > BREAK_TOL:
            keep.append(float(p))
    if 1.0 - keep[-1] <= BREAK_TOL:
        keep[-1] = 1.0
    else:
        keep.append(1.0)
    return np.array(keep)


def _overlap(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """``O[s, c]`` = length of source interval ``s`` inside target interval ``c``."""
    lo = np.maximum(src[:-1, None], dst[None, :-1])
    hi = np.minimum(src[1:, None], dst[None, 1:])
    return np.maximum(hi - lo, 0.0)


def refine(W: StepGraphon, points: Sequence[float]) -> StepGraphon:
    """Same function on the common refinement of its steps and ``points``."""
    edges = _merge_points(W.breakpoints(), np.asarray(points, dtype=float))
    mids = (edges[:-1] + edges[1:]) / 2
    idx = np.clip(np.searchsorted(W.breakpoints(), mids, side="right") - 1, 0, W.q - 1)
    m = np.diff(edges)
    m[-1] = 1.0 - m[:-1].sum()
    return StepGraphon(m, W.values[np.ix_(idx, idx)])


def subtract(W: StepGraphon, U: StepGraphon) -> StepGraphon:
    """``W - U`` as a step function on the common refinement."""
    pts = U.breakpoints()[1:-1]
    Wr = refine(W, pts)
    Ur = refine(U, Wr.breakpoints()[1:-1])
    return StepGraphon(Wr.measures, Wr.values - Ur.values)


def quotient(W: StepGraphon, P: IntervalPartition) -> WeightedGraph:
    """Weighted graph of block averages of ``W`` over the classes of ``P``."""
    lam = P.lengths()
    if np.any(lam <= 0):
        raise InputError("the partition has a class of zero length")
    R = _overlap(W.breakpoints(), P.edges()) / lam[None, :]
    beta = R.T @ W.values @ R
    beta = (beta + beta.T) / 2
    return WeightedGraph(lam, beta)


def average(W: StepGraphon, P: IntervalPartition) -> StepGraphon:
    """``W_P``: constant on the blocks of ``P`` with the block averages of ``W``."""
    H = quotient(W, P)
    m = H.alpha.copy()
    m[-1] = 1.0 - m[:-1].sum()
    return StepGraphon(m, H.beta)


def discretize(W: AnalyticGraphon, n: int) -> StepGraphon:
    """Equal-step graphon whose values are the exact block averages of ``W``."""
    if n < 1:
        raise InputError("n must be at least 1")
    e = np.arange(n + 1) / n
    x0, x1 = e[:-1, None], e[1:, None]
    y0, y1 = e[None, :-1], e[None, 1:]
    vals = W.block_integral(x0, x1, y0, y1) * (n * n)
    vals = (vals + vals.T) / 2
    return StepGraphon(np.full(n, 1.0 / n), vals)


def graphon_norms(W: StepGraphon, method: str = "auto") -> tuple[float, float, float, float]:
    """``(l1, l2, cut_lower, cut_upper)`` of a step graphon."""
    m, v = W.measures, W.values
    l1 = float(m @ np.abs(v) @ m)
    l2 = float(np.sqrt(m @ (v * v) @ m))
    r = cut_norm(W.to_weighted_graph(), method)
    return l1, l2, r.lower, r.upper


def interval_permutation_apply(W: StepGraphon, pi: Sequence[int]) -> StepGraphon:
    """Rearrange equal steps: output block ``(i, j)`` is input block ``(pi[i], pi[j])``."""
    pi = np.asarray(pi, dtype=int)
    if not np.allclose(W.measures, W.measures[0], rtol=0, atol=1e-15):
        raise InputError("interval permutations need equal steps")
    if sorted(pi.tolist()) != list(range(W.q)):
        raise InputError("pi is not a permutation of the steps")
    return StepGraphon(W.measures, W.values[np.ix_(pi, pi)])


def t_graphon(F: WeightedGraph, W, mc_samples: int = 100_000, seed: int = 0,
              method: str = "auto", chunk: int = 100_000) -> tuple[float, float]:
    """Homomorphism density ``t(F, W)`` and its standard error.

    Step graphons are integrated exactly (stderr 0) unless ``method="mc"``;
    analytic graphons use Monte Carlo over i.i.d. uniform points, drawn in
    chunks from seeds spawned off ``seed``.
    """
    if method not in ("auto", "mc"):
        raise InputError(f"unknown method {method!r}")
    if isinstance(W, StepGraphon) and method == "auto":
        return t_density(F, W.to_weighted_graph()), 0.0
    if mc_samples < 1000:
        raise InputError("Monte Carlo integration needs at least 1000 samples")
    k = F.n
    edges = F.edges()
    total = 0.0
    total_sq = 0.0
    children = np.random.SeedSequence(seed).spawn((mc_samples + chunk - 1) // chunk)
    left = mc_samples
    for ss in children:
        size = min(chunk, left)
        left -= size
        x = np.random.default_rng(ss).random((size, k))
        prod = np.ones(size)
        for u, v in edges:
            prod *= W(x[:, u], x[:, v])
        total += prod.sum()
        total_sq += (prod * prod).sum()
    mean = total / mc_samples
    var = max(total_sq / mc_samples - mean * mean, 0.0) * mc_samples / (mc_samples - 1)
    return float(mean), float(np.sqrt(var / mc_samples))
