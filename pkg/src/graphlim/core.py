"""Weighted graphs and the algebra every other module builds on.

A weighted graph carries positive node weights ``alpha`` and a symmetric
edge-weight matrix ``beta`` whose diagonal holds loop weights.  Simple
graphs are the special case with unit node weights, 0/1 edge weights and
an empty diagonal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, InputError

DEFAULT_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = _frozen(np.atleast_1d(np.asarray(self.alpha, dtype=float)))
        beta = _frozen(np.asarray(self.beta, dtype=float))
        n = alpha.shape[0]
        if alpha.ndim != 1:
            raise InputError("alpha must be a vector")
        if beta.shape != (n, n):
            raise InputError(f"beta has shape {beta.shape}, expected {(n, n)}")
        if not np.all(np.isfinite(alpha)) or not np.all(np.isfinite(beta)):
            raise InputError("weights must be finite")
        if np.any(alpha <= 0):
            i = int(np.argmax(alpha <= 0))
            raise InputError(f"node weight alpha[{i}] = {alpha[i]} is not positive")
        asym = np.argwhere(beta != beta.T)
        if len(asym):
            i, j = (int(v) for v in asym[0])
            raise InputError(f"beta is not symmetric at ({i}, {j})")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def n(self) -> int:
        return self.alpha.shape[0]

    def total_weight(self) -> float:
        return float(self.alpha.sum())

    @property
    def is_simple(self) -> bool:
        return bool(
            np.all(self.alpha == 1.0)
            and np.all((self.beta == 0.0) | (self.beta == 1.0))
            and not np.any(np.diag(self.beta))
        )

    @property
    def has_unit_weights(self) -> bool:
        return bool(np.all(self.alpha == 1.0))

    def normalized(self) -> "WeightedGraph":
        """Same graph with node weights rescaled to total 1."""
        return WeightedGraph(self.alpha / self.alpha.sum(), self.beta)

    def edges(self) -> list[tuple[int, int]]:
        """Pairs ``i < j`` with nonzero edge weight (loops excluded)."""
        iu, ju = np.triu_indices(self.n, k=1)
        mask = self.beta[iu, ju] != 0
        return [(int(i), int(j)) for i, j in zip(iu[mask], ju[mask])]

    def num_edges(self) -> int:
        return len(self.edges())

    def relabel(self, order: Sequence[int]) -> "WeightedGraph":
        """Graph whose node ``k`` is node ``order[k]`` of this graph."""
        order = np.asarray(order, dtype=int)
        return WeightedGraph(self.alpha[order], self.beta[np.ix_(order, order)])

    def same_as(self, other: "WeightedGraph", tol: float = 0.0) -> bool:
        return (
            self.n == other.n
            and np.allclose(self.alpha, other.alpha, rtol=0, atol=tol)
            and np.allclose(self.beta, other.beta, rtol=0, atol=tol)
        )

    def __repr__(self) -> str:
        kind = "simple" if self.is_simple else "weighted"
        return f"WeightedGraph(n={self.n}, {kind})"


@dataclass(frozen=True, eq=False)
class NodePartition:
    assignment: np.ndarray
    q: int

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=int)
        if a.ndim != 1:
            raise InputError("assignment must be a vector")
        q = int(self.q)
        if q < 1:
            raise InputError("a partition needs at least one class")
        if a.size and (a.min() < 0 or a.max() >= q):
            raise InputError(f"class indices must lie in [0, {q})")
        missing = sorted(set(range(q)) - set(a.tolist()))
        if missing:
            raise InputError(f"class {missing[0]} is empty")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_labels(cls, labels: Iterable) -> "NodePartition":
        """Renumber arbitrary labels by order of first appearance."""
        seen: dict = {}
        out = []
        for lab in labels:
            out.append(seen.setdefault(lab, len(seen)))
        return cls(np.array(out, dtype=int), len(seen))

    @classmethod
    def from_classes(cls, classes: Sequence[Iterable[int]], n: int) -> "NodePartition":
        a = np.full(n, -1, dtype=int)
        for c, members in enumerate(classes):
            for v in members:
                if a[v] != -1:
                    raise InputError(f"node {v} appears in two classes")
                a[v] = c
        if np.any(a < 0):
            raise InputError(f"node {int(np.argmax(a < 0))} is in no class")
        return cls(a, len(classes))

    @classmethod
    def trivial(cls, n: int) -> "NodePartition":
        return cls(np.zeros(n, dtype=int), 1)

    @classmethod
    def discrete(cls, n: int) -> "NodePartition":
        return cls(np.arange(n), n)

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    def classes(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignment == c) for c in range(self.q)]

    def indicator(self) -> np.ndarray:
        """``n x q`` 0/1 membership matrix."""
        m = np.zeros((self.n, self.q))
        m[np.arange(self.n), self.assignment] = 1.0
        return m


# ---------------------------------------------------------------------------
# constructors


def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> WeightedGraph:
    beta = np.zeros((n, n))
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise InputError(f"simple graphs have no loops, got ({u}, {u})")
        beta[u, v] = beta[v, u] = 1.0
    return WeightedGraph(np.ones(n), beta)


def complete_graph(n: int) -> WeightedGraph:
    return WeightedGraph(np.ones(n), np.ones((n, n)) - np.eye(n))


def empty_graph(n: int) -> WeightedGraph:
    return WeightedGraph(np.ones(n), np.zeros((n, n)))


def cycle_graph(n: int) -> WeightedGraph:
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> WeightedGraph:
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> WeightedGraph:
    return from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_bipartite(a: int, b: int) -> WeightedGraph:
    return from_edges(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def half_graph(n: int) -> WeightedGraph:
    """Bipartite ``H_{n,n}``: node ``i`` joined to ``n + j`` iff ``i <= j``."""
    return from_edges(2 * n, [(i, n + j) for i in range(n) for j in range(i, n)])


def constant_graph(n: int, p: float, loops: bool = True) -> WeightedGraph:
    beta = np.full((n, n), float(p))
    if not loops:
        np.fill_diagonal(beta, 0.0)
    return WeightedGraph(np.ones(n), beta)


# ---------------------------------------------------------------------------
# operations


def _node_set(S: Iterable[int], n: int) -> np.ndarray:
    idx = np.fromiter((int(s) for s in S), dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise InputError(f"node index out of range for n={n}")
    return idx


def cut_value(G: WeightedGraph, S: Iterable[int], T: Iterable[int]) -> float:
    """``e_G(S, T)``: sum of ``alpha_i alpha_j beta_ij`` over ``i in S, j in T``."""
    s = _node_set(S, G.n)
    t = _node_set(T, G.n)
    if s.size == 0 or t.size == 0:
        return 0.0
    block = G.beta[np.ix_(s, t)]
    return float(G.alpha[s] @ block @ G.alpha[t])


def graph_norms(G: WeightedGraph) -> tuple[float, float]:
    """Return ``(linf, l2)``; the L2 norm uses node weights scaled to total 1."""
    if G.n == 0:
        return 0.0, 0.0
    w = G.alpha / G.alpha.sum()
    linf = float(np.abs(G.beta).max())
    l2 = float(np.sqrt(w @ (G.beta ** 2) @ w))
    return linf, l2


def blow_up(G: WeightedGraph, k: int) -> WeightedGraph:
    """``k``-fold blow-up; node ``(i, u)`` sits at index ``i*k + u``."""
    if k < 1:
        raise InputError("blow-up factor must be at least 1")
    alpha = np.repeat(G.alpha, k)
    beta = np.kron(G.beta, np.ones((k, k)))
    return WeightedGraph(alpha, beta)


def split_node(G: WeightedGraph, i: int, fractions: Sequence[float],
               tol: float = 1e-12) -> WeightedGraph:
    """Replace node ``i`` by ``len(fractions)`` twins carrying those weights.

    The twins occupy positions ``i, i+1, ...``; later nodes shift up.
    """
    if not 0 <= i < G.n:
        raise InputError(f"node {i} out of range")
    fr = np.asarray(fractions, dtype=float)
    if fr.size == 0 or np.any(fr <= 0):
        raise InputError("fractions must be a nonempty list of positive reals")
    if abs(fr.sum() - G.alpha[i]) > tol:
        raise InputError(f"fractions sum to {fr.sum()}, node weight is {G.alpha[i]}")
    order = np.concatenate([np.arange(i), np.full(fr.size, i), np.arange(i + 1, G.n)])
    alpha = np.concatenate([G.alpha[:i], fr, G.alpha[i + 1:]])
    return WeightedGraph(alpha, G.beta[np.ix_(order, order)])


def _check_partition(G: WeightedGraph, P: NodePartition) -> None:
    if P.n != G.n:
        raise InputError(f"partition covers {P.n} nodes, graph has {G.n}")


def _block_sums(G: WeightedGraph, P: NodePartition) -> tuple[np.ndarray, np.ndarray]:
    """Class weights and the matrix of ``e_G(V_i, V_j)``."""
    M = P.indicator() * G.alpha[:, None]
    return M.sum(axis=0), M.T @ G.beta @ M


def quotient(G: WeightedGraph, P: NodePartition, unit_weights: bool = False) -> WeightedGraph:
    """Quotient graph ``G/P`` (or ``G÷P`` with ``unit_weights``)."""
    _check_partition(G, P)
    aw, E = _block_sums(G, P)
    beta = E / np.outer(aw, aw)
    beta = (beta + beta.T) / 2
    alpha = np.ones(P.q) if unit_weights else aw / G.alpha.sum()
    return WeightedGraph(alpha, beta)


def averaged(G: WeightedGraph, P: NodePartition) -> WeightedGraph:
    """``G_P``: same nodes as ``G``, edge weights replaced by block averages."""
    H = quotient(G, P)
    a = P.assignment
    return WeightedGraph(G.alpha, H.beta[np.ix_(a, a)])


def edit_distance(H1: WeightedGraph, H2: WeightedGraph) -> float:
    """Normalized L1 distance ``(1/n^2) sum |beta1 - beta2|`` for unit node weights."""
    if H1.n != H2.n:
        raise InputError(f"node counts differ: {H1.n} vs {H2.n}")
    if not (H1.has_unit_weights and H2.has_unit_weights):
        raise InputError("edit distance needs node weights all equal to 1")
    return float(np.abs(H1.beta - H2.beta).sum() / H1.n ** 2)


def disjoint_union(G: WeightedGraph, H: WeightedGraph) -> WeightedGraph:
    if not (G.is_simple and H.is_simple):
        raise InputError("disjoint union is defined here for simple graphs")
    n, m = G.n, H.n
    beta = np.zeros((n + m, n + m))
    beta[:n, :n] = G.beta
    beta[n:, n:] = H.beta
    return WeightedGraph(np.ones(n + m), beta)


# ---------------------------------------------------------------------------
# canonical labelling

MAX_CANON_NODES = 8


@lru_cache(maxsize=None)
def _pair_index(n: int) -> np.ndarray:
    """``idx[i, j]`` = bit position of pair ``{i, j}`` in lexicographic order."""
    idx = np.full((n, n), -1, dtype=np.int64)
    for b, (i, j) in enumerate(itertools.combinations(range(n), 2)):
        idx[i, j] = idx[j, i] = b
    return idx


@lru_cache(maxsize=None)
def _perm_table(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def _bit_weights(n: int) -> np.ndarray:
    # most significant bit first, so lexicographic pair order = bitstring order
    m = n * (n - 1) // 2
    return np.array([1 << (m - 1 - b) for b in range(m)], dtype=np.int64)


def orbit_masks(n: int, edges: Sequence[tuple[int, int]]) -> np.ndarray:
    """Adjacency bitmasks of every relabelling of a graph (one per permutation)."""
    if n > MAX_CANON_NODES:
        raise CapacityError(f"canonical labelling supports n <= {MAX_CANON_NODES}")
    perms = _perm_table(n)
    idx = _pair_index(n)
    bw = _bit_weights(n)
    masks = np.zeros(perms.shape[0], dtype=np.int64)
    for u, v in edges:
        masks += bw[idx[perms[:, u], perms[:, v]]]
    return masks


def canonical_form(F: WeightedGraph) -> bytes:
    """Isomorphism-invariant key: node count plus the minimal adjacency bitstring."""
    if not F.is_simple:
        raise InputError("canonical_form expects a simple graph")
    if F.n > MAX_CANON_NODES:
        raise CapacityError(f"canonical labelling supports n <= {MAX_CANON_NODES}")
    best = int(orbit_masks(F.n, F.edges()).min()) if F.n > 1 else 0
    m = F.n * (F.n - 1) // 2
    return bytes([F.n]) + best.to_bytes(max(1, (m + 7) // 8), "big")


def graph_from_mask(n: int, mask: int) -> WeightedGraph:
    m = n * (n - 1) // 2
    pairs = list(itertools.combinations(range(n), 2))
    return from_edges(n, [pairs[b] for b in range(m) if mask >> (m - 1 - b) & 1])


def graph_from_key(key: bytes) -> WeightedGraph:
    n = key[0]
    return graph_from_mask(n, int.from_bytes(key[1:], "big"))
