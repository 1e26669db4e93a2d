"""Cut norm, infinity-to-one norm, C4 trace norm and the labelled cut distance.

All norms use node weights scaled to total 1: for a kernel ``K = (alpha, beta)``
the cut value of ``(S, T)`` is ``sum_{i in S, j in T} alpha_i alpha_j beta_ij``
divided by ``alpha_K^2``.

Exact computation enumerates the row set ``S``; for fixed ``S`` the best
column set is read off in closed form from the signs of the column sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .core import WeightedGraph, graph_norms
from .errors import CapacityError, InputError

EXACT_LIMIT = 26
AUTO_EXACT_LIMIT = 20
_LOW_BITS = 13


@dataclass(frozen=True)
class CutWitness:
    S: tuple[int, ...]
    T: tuple[int, ...]
    value: float


@dataclass(frozen=True)
class CutNormResult:
    lower: float
    upper: float
    witness: CutWitness
    method: str

    @property
    def exact(self) -> bool:
        return self.method == "exact"


def scaled_matrix(K: WeightedGraph) -> np.ndarray:
    """``alpha_i alpha_j beta_ij / alpha_K^2``: cut values become plain block sums."""
    w = K.alpha / K.alpha.sum()
    return np.outer(w, w) * K.beta


def difference_kernel(G: WeightedGraph, H: WeightedGraph, tol: float = 1e-12) -> WeightedGraph:
    if G.n != H.n:
        raise InputError(f"node counts differ: {G.n} vs {H.n}")
    if np.max(np.abs(G.alpha - H.alpha)) > tol:
        raise InputError("d_cut needs identical node weights on both graphs")
    return WeightedGraph(G.alpha, G.beta - H.beta)


@lru_cache(maxsize=8)
def _bit_table(bits: int) -> np.ndarray:
    t = (np.arange(1 << bits)[:, None] >> np.arange(bits)) & 1
    t = t.astype(float)
    t.setflags(write=False)
    return t


def _subset_blocks(A: np.ndarray) -> Iterator[tuple[int, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(offset, low_members, high_members, C)`` covering every subset S.

    Row ``r`` of a block stands for the subset with index ``offset + r``
    whose bit ``j`` marks node ``j``; ``C[r]`` holds the column sums
    ``sum_{i in S} A[i, :]``.
    """
    n = A.shape[0]
    L = min(n, _LOW_BITS)
    low = _bit_table(L)
    low_sums = low @ A[:L, :]
    H = n - L
    for h in range(1 << H):
        hb = ((h >> np.arange(H)) & 1).astype(float)
        C = low_sums + hb @ A[L:, :] if H else low_sums
        yield h << L, low, hb, C


def _members(index: int, n: int) -> tuple[int, ...]:
    return tuple(j for j in range(n) if index >> j & 1)


def _check_exact(n: int) -> None:
    if n > EXACT_LIMIT:
        raise CapacityError(f"exact enumeration supports n <= {EXACT_LIMIT}, got {n}")


def _cut_norm_matrix_exact(A: np.ndarray) -> tuple[float, CutWitness]:
    n = A.shape[0]
    _check_exact(n)
    best = -1.0
    best_idx, best_sign = 0, 1.0
    for off, _, _, C in _subset_blocks(A):
        pos = np.maximum(C, 0.0).sum(axis=1)
        neg = pos - C.sum(axis=1)
        ip, ineg = int(pos.argmax()), int(neg.argmax())
        if pos[ip] > best:
            best, best_idx, best_sign = float(pos[ip]), off + ip, 1.0
        if neg[ineg] > best:
            best, best_idx, best_sign = float(neg[ineg]), off + ineg, -1.0
    S = _members(best_idx, n)
    c = A[list(S), :].sum(axis=0) if S else np.zeros(n)
    T = tuple(int(j) for j in np.flatnonzero(best_sign * c > 0))
    return best, CutWitness(S, T, _witness_value(A, S, T))


def _witness_value(A: np.ndarray, S, T) -> float:
    if not S or not T:
        return 0.0
    return abs(float(A[np.ix_(list(S), list(T))].sum()))


def cut_norm_batch(As: np.ndarray) -> np.ndarray:
    """Exact cut norms of a stack of scaled ``n x n`` matrices, ``n <= 13``."""
    As = np.asarray(As, dtype=float)
    n = As.shape[-1]
    if n > _LOW_BITS:
        raise CapacityError(f"batched exact cut norm supports n <= {_LOW_BITS}")
    C = np.matmul(_bit_table(n)[None, :, :], As)
    pos = np.maximum(C, 0.0).sum(axis=2)
    neg = pos - C.sum(axis=2)
    return np.maximum(pos.max(axis=1), neg.max(axis=1))


def _top_eigvec(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if n <= 400:
        vals, vecs = np.linalg.eigh(A)
        return vecs[:, int(np.abs(vals).argmax())]
    v = np.random.default_rng(0).standard_normal(n)
    for _ in range(60):
        v = A @ v
        nv = np.linalg.norm(v)
        if nv == 0:
            break
        v /= nv
    return v


def _best_response(A: np.ndarray, S: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Alternate optimal T given S and optimal S given T until no strict gain."""
    value = -np.inf
    while True:
        T = (S @ A) > 0
        S_new = (A @ T) > 0
        v = float(S_new @ A @ T)
        if v <= value + 1e-15:
            return value, S, T
        value, S = v, S_new


def _cut_norm_matrix_heuristic(A: np.ndarray, restarts: int = 32,
                               seed: int = 0) -> tuple[float, CutWitness]:
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    starts = [rng.random(n) < 0.5 for _ in range(restarts)]
    v = _top_eigvec(A)
    starts += [v > 0, v < 0, np.ones(n, dtype=bool)]
    best = (-1.0, (), ())
    for sign in (1.0, -1.0):
        M = sign * A
        for S0 in starts:
            val, S, T = _best_response(M, S0.astype(float))
            if val > best[0]:
                best = (val, tuple(np.flatnonzero(S)), tuple(np.flatnonzero(T)))
    S = tuple(int(i) for i in best[1])
    T = tuple(int(i) for i in best[2])
    w = _witness_value(A, S, T)
    return w, CutWitness(S, T, w)


def _c4_matrix(M: np.ndarray) -> float:
    # trace(M^4) = ||M^2||_F^2 for symmetric M, which is never negative
    M2 = M @ M
    return float(np.sum(M2 * M2))


def trace_c4_norm(K: WeightedGraph) -> float:
    """``t(C4, K)^(1/4)`` computed as ``||M^2||_F^(1/2)`` for the weight-scaled ``M``."""
    w = K.alpha / K.alpha.sum()
    s = np.sqrt(w)
    M = s[:, None] * K.beta * s[None, :]
    t = _c4_matrix(M)
    return max(t, 0.0) ** 0.25


def certified_upper(K: WeightedGraph) -> float:
    """Upper bound on the cut norm: the smaller of the L1 norm and the C4 trace norm."""
    w = K.alpha / K.alpha.sum()
    l1 = float(w @ np.abs(K.beta) @ w)
    return min(l1, trace_c4_norm(K))


def cut_norm(K: WeightedGraph, method: str = "exact", *, restarts: int = 32,
             seed: int = 0, exact_limit: int = AUTO_EXACT_LIMIT) -> CutNormResult:
    """Cut norm of a symmetric kernel with lower/upper bounds and a witness.

    ``exact`` enumerates every row set (``n <= 26``); ``heuristic`` runs a
    multi-start local search for the lower bound and certifies the upper
    bound through the L1 and C4 trace norms; ``auto`` picks exact when
    ``n <= exact_limit``.
    """
    if method == "auto":
        method = "exact" if K.n <= exact_limit else "heuristic"
    A = scaled_matrix(K)
    if method == "exact":
        val, wit = _cut_norm_matrix_exact(A)
        return CutNormResult(val, val, wit, "exact")
    if method != "heuristic":
        raise InputError(f"unknown cut norm method {method!r}")
    val, wit = _cut_norm_matrix_heuristic(A, restarts=restarts, seed=seed)
    upper = max(certified_upper(K), val)
    return CutNormResult(val, upper, wit, "heuristic")


def inf_to_one_norm(K: WeightedGraph) -> float:
    """``max_{x, y in {-1,1}^n} x^T A y`` for the weight-scaled matrix ``A``."""
    _check_exact(K.n)
    A = scaled_matrix(K)
    r = A.sum(axis=0)
    best = 0.0
    for _, _, _, C in _subset_blocks(A):
        best = max(best, float(np.abs(2 * C - r).sum(axis=1).max()))
    return best


def restricted_cut_norm(K: WeightedGraph, variant: str) -> float:
    """Cut norm with the set pair restricted to ``S == T``, disjoint sets or complements."""
    if variant not in ("equal", "disjoint", "complement"):
        raise InputError(f"unknown variant {variant!r}")
    _check_exact(K.n)
    A = scaled_matrix(K)
    n = K.n
    L = min(n, _LOW_BITS)
    best = 0.0
    for _, low, hb, C in _subset_blocks(A):
        inside = np.concatenate([low, np.broadcast_to(hb, (low.shape[0], n - L))], axis=1)
        if variant == "equal":
            vals = np.abs((inside * C).sum(axis=1))
        elif variant == "complement":
            vals = np.abs(((1 - inside) * C).sum(axis=1))
        else:
            out = (1 - inside) * C
            vals = np.maximum(np.where(out > 0, out, 0).sum(axis=1),
                              -np.where(out < 0, out, 0).sum(axis=1))
        best = max(best, float(vals.max()))
    return best


def d_cut(G: WeightedGraph, H: WeightedGraph, method: str = "exact", **kw) -> CutNormResult:
    """Labelled cut distance: cut norm of ``beta(G) - beta(H)`` on shared node weights."""
    return cut_norm(difference_kernel(G, H), method, **kw)


def cut_norm_bruteforce(K: WeightedGraph) -> float:
    """Reference value by enumerating all ``4^n`` pairs ``(S, T)``."""
    A = scaled_matrix(K)
    n = K.n
    B = _bit_table(n) if n <= _LOW_BITS else None
    if B is None:
        raise CapacityError("brute force is for small kernels only")
    return float(np.abs(B @ A @ B.T).max())


__all__ = [
    "CutWitness", "CutNormResult", "cut_norm", "inf_to_one_norm", "trace_c4_norm",
    "restricted_cut_norm", "d_cut", "difference_kernel", "scaled_matrix",
    "cut_norm_batch", "certified_upper", "cut_norm_bruteforce", "graph_norms",
]
