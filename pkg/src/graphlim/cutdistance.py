"""Unlabelled cut distances.

``delta_hat`` minimises the labelled cut distance over node bijections.
``delta_cut`` minimises over fractional overlays (couplings of the two
normalised node-weight distributions); since that minimum is a nonconvex
min-max problem, it is reported as the best certified upper bound found
by a small portfolio of candidate couplings.

Overlay node ``(i, u)`` is stored at flat index ``i * n' + u``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import WeightedGraph, _perm_table, blow_up
from .cutnorm import (
    CutNormResult,
    CutWitness,
    _LOW_BITS,
    _cut_norm_matrix_heuristic,
    cut_norm,
    cut_norm_batch,
)
from .errors import CapacityError, InputError

HAT_EXACT_LIMIT = 8
BLOWUP_LIMIT = 12
BLOWUP_EXACT_LIMIT = 7
INNER_EXACT_LIMIT = 16
MAX_OVERLAY_NODES = 1200
COUPLING_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FractionalOverlay:
    """Coupling matrix ``X`` between two normalised node-weight vectors."""

    X: np.ndarray

    def check(self, a: np.ndarray, b: np.ndarray, tol: float = COUPLING_TOL) -> None:
        X = self.X
        if X.shape != (a.size, b.size):
            raise InputError(f"coupling has shape {X.shape}, expected {(a.size, b.size)}")
        if np.any(X < -tol):
            raise InputError("coupling has negative entries")
        if np.max(np.abs(X.sum(axis=1) - a)) > tol:
            raise InputError("coupling row sums differ from the node weights of G")
        if np.max(np.abs(X.sum(axis=0) - b)) > tol:
            raise InputError("coupling column sums differ from the node weights of G'")

    @property
    def T(self) -> "FractionalOverlay":
        return FractionalOverlay(self.X.T.copy())


@dataclass(frozen=True, eq=False)
class DistanceResult:
    value: float
    kind: str
    witness: object
    inner_cut: CutWitness
    lower: float = 0.0
    candidate: str = ""
    details: dict = field(default_factory=dict)


def _weights(G: WeightedGraph) -> np.ndarray:
    return G.alpha / G.alpha.sum()


def _is_uniform(G: WeightedGraph) -> bool:
    return bool(np.all(G.alpha == G.alpha[0]))


# ---------------------------------------------------------------------------
# overlays


def _support(X: np.ndarray) -> np.ndarray:
    return np.flatnonzero(X.ravel() > 0)


def overlay_graphs(G: WeightedGraph, Gp: WeightedGraph, X) -> tuple[WeightedGraph, WeightedGraph]:
    """Overlaid graphs ``G[X]`` and ``G'[X^T]`` on the support of ``X``.

    Nodes with zero coupling weight are dropped; they carry no weight in
    any cut.
    """
    X = np.asarray(getattr(X, "X", X), dtype=float)
    FractionalOverlay(X).check(_weights(G), _weights(Gp))
    idx = _support(X)
    I, U = np.divmod(idx, Gp.n)
    x = X.ravel()[idx]
    return (WeightedGraph(x, G.beta[np.ix_(I, I)]),
            WeightedGraph(x, Gp.beta[np.ix_(U, U)]))


def _merged_kernel(G: WeightedGraph, Gp: WeightedGraph, X: np.ndarray):
    """Difference kernel of the overlay with twin nodes merged.

    Two overlay nodes with identical rows in the difference kernel can be
    merged (weights added) without changing the cut norm, because the
    supremum of a bilinear form over a box is attained at a vertex.
    Returns ``(kernel, groups)`` where ``groups[k]`` lists flat indices.
    """
    idx = _support(X)
    I, U = np.divmod(idx, Gp.n)
    x = X.ravel()[idx]
    D = G.beta[np.ix_(I, I)] - Gp.beta[np.ix_(U, U)]
    _, first, inverse = np.unique(D, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    label = rank[inverse]
    m = order.size
    w = np.bincount(label, weights=x, minlength=m)
    reps = first[order]
    groups = [idx[label == k] for k in range(m)]
    return WeightedGraph(w, D[np.ix_(reps, reps)]), groups


def _expand(sets: Sequence[int], groups) -> tuple[int, ...]:
    if not sets:
        return ()
    return tuple(sorted(int(p) for k in sets for p in groups[k]))


def overlay_cost(G: WeightedGraph, Gp: WeightedGraph, X, *,
                 exact_limit: int = INNER_EXACT_LIMIT, seed: int = 0) -> CutNormResult:
    """Bounds on ``d_cut(G[X], G'[X^T])``; exact when the merged overlay is small."""
    X = np.asarray(getattr(X, "X", X), dtype=float)
    a, b = _weights(G), _weights(Gp)
    FractionalOverlay(X).check(a, b)
    K, groups = _merged_kernel(G, Gp, X)
    method = "exact" if K.n <= exact_limit else "heuristic"
    r = cut_norm(K, method, seed=seed)
    wit = CutWitness(_expand(r.witness.S, groups), _expand(r.witness.T, groups), r.witness.value)
    return CutNormResult(r.lower, r.upper, wit, r.method)


# ---------------------------------------------------------------------------
# delta_hat


def _check_hat(G: WeightedGraph, Gp: WeightedGraph) -> None:
    if G.n != Gp.n:
        raise InputError(f"delta_hat needs equal node counts ({G.n} vs {Gp.n})")
    if not (_is_uniform(G) and _is_uniform(Gp)):
        raise InputError("delta_hat is defined for graphs with equal node weights")


def _perm_costs(B: np.ndarray, Bp: np.ndarray, perms: np.ndarray, chunk: int = 2048,
                seed: int = 0) -> np.ndarray:
    """Cut distance between ``B[p][:, p]`` and ``Bp`` for each row ``p`` of ``perms``."""
    n = B.shape[0]
    out = np.empty(len(perms))
    if n <= _LOW_BITS:
        for s in range(0, len(perms), chunk):
            P = perms[s:s + chunk]
            A = (B[P[:, :, None], P[:, None, :]] - Bp) / (n * n)
            out[s:s + chunk] = cut_norm_batch(A)
        return out
    for k, p in enumerate(perms):
        out[k] = _cut_norm_matrix_heuristic((B[np.ix_(p, p)] - Bp) / (n * n),
                                            restarts=4, seed=seed)[0]
    return out


def _anneal(B: np.ndarray, Bp: np.ndarray, start: np.ndarray, rng: np.random.Generator, *,
            temperatures: int = 20, steps: int = 100, cooling: float = 0.85,
            deadline: float | None = None) -> tuple[np.ndarray, float]:
    """Simulated annealing over permutations with swap moves.

    Each step evaluates the whole swap neighbourhood in one batch (about
    ``n^2 / 2`` proposals), keeps the best neighbour seen, and moves by a
    Metropolis step: downhill to the best swap, otherwise to a random
    swap with probability ``exp(-delta / temperature)``.
    """
    n = B.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    perm = start.copy()
    cur = float(_perm_costs(B, Bp, perm[None, :])[0])
    best, best_cost = perm.copy(), cur
    temp = max(0.05 * cur, 1e-4)
    if n < 2:
        return best, best_cost
    for _ in range(temperatures):
        for _ in range(steps):
            cand = np.repeat(perm[None, :], iu.size, axis=0)
            r = np.arange(iu.size)
            cand[r, iu], cand[r, ju] = perm[ju], perm[iu]
            costs = _perm_costs(B, Bp, cand)
            j = int(costs.argmin())
            if costs[j] < best_cost - 1e-15:
                best, best_cost = cand[j].copy(), float(costs[j])
            if costs[j] < cur - 1e-15:
                perm, cur = cand[j], float(costs[j])
            else:
                k = int(rng.integers(iu.size))
                if rng.random() < math.exp(-(costs[k] - cur) / temp):
                    perm, cur = cand[k], float(costs[k])
            if best_cost <= 1e-15 or (deadline is not None and time.monotonic() > deadline):
                return best, best_cost
        temp *= cooling
    return best, best_cost


def delta_hat(G: WeightedGraph, Gp: WeightedGraph, method: str = "auto", *, seed: int = 0,
              start: Sequence[int] | None = None, temperatures: int = 20, steps: int = 100,
              budget_ms: float | None = None) -> DistanceResult:
    """``min`` over relabellings of ``G`` of the labelled cut distance to ``G'``.

    The witness ``p`` is a permutation: node ``u`` of the relabelled copy is
    node ``p[u]`` of ``G``.  ``exact`` enumerates all ``n!`` bijections
    (``n <= 8``); ``anneal`` returns an upper bound.
    """
    _check_hat(G, Gp)
    n = G.n
    if method == "auto":
        method = "exact" if n <= HAT_EXACT_LIMIT else "anneal"
    if method == "exact":
        if n > HAT_EXACT_LIMIT:
            raise CapacityError(f"exact delta_hat supports n <= {HAT_EXACT_LIMIT}")
        perms = _perm_table(n)
        costs = _perm_costs(G.beta, Gp.beta, perms)
        perm = perms[int(costs.argmin())]
        kind = "exact"
    elif method == "anneal":
        rng = np.random.default_rng(seed)
        s = np.arange(n) if start is None else np.asarray(start, dtype=np.int64)
        deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000
        perm, _ = _anneal(G.beta, Gp.beta, s, rng, temperatures=temperatures, steps=steps,
                          deadline=deadline)
        kind = "upper_bound"
    else:
        raise InputError(f"unknown delta_hat method {method!r}")
    r = cut_norm(WeightedGraph(G.alpha, G.beta[np.ix_(perm, perm)] - Gp.beta), "auto", seed=seed)
    if r.method != "exact":
        kind = "upper_bound"
    return DistanceResult(r.upper, kind, tuple(int(v) for v in perm), r.witness,
                          lower=0.0 if kind != "exact" else r.lower, candidate=method)


# ---------------------------------------------------------------------------
# transportation polytope helpers


def product_coupling(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.outer(a, b)


def diagonal_coupling(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``X_ii = min(a_i, b_i)``, completed proportionally off the diagonal."""
    X = np.diag(np.minimum(a, b))
    r, s = a - X.sum(axis=1), b - X.sum(axis=0)
    tot = r.sum()
    if tot > 0:
        X = X + np.outer(r, s) / tot
    return X


def interval_coupling(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Couple the step intervals of ``[0, 1]`` in node order: ``X_iu`` = overlap length."""
    ea = np.concatenate([[0.0], np.cumsum(a)])
    eb = np.concatenate([[0.0], np.cumsum(b)])
    ea[-1] = eb[-1] = 1.0
    lo = np.maximum(ea[:-1, None], eb[None, :-1])
    hi = np.minimum(ea[1:, None], eb[None, 1:])
    X = np.maximum(hi - lo, 0.0)
    X[X < 1e-15] = 0.0
    return repair_coupling(X, a, b)


def compose_couplings(X_ab: np.ndarray, X_bc: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coupling of ``A`` and ``C`` obtained by gluing two couplings along ``B``."""
    return X_ab @ (X_bc / b[:, None])


def permutation_coupling(perm: Sequence[int], k: int, kp: int) -> np.ndarray:
    """Coupling induced by a bijection between blow-ups ``G[k]`` and ``G'[k']``.

    ``perm[v] = p`` means node ``v`` of ``G'[k']`` is matched with node
    ``p`` of ``G[k]``; both blow-ups have ``L`` nodes.
    """
    L = len(perm)
    X = np.zeros((L // k, L // kp))
    for v, p in enumerate(perm):
        X[p // k, v // kp] += 1.0 / L
    return X


def _affine_project(Y: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = Y.shape
    R = a - Y.sum(axis=1)
    C = b - Y.sum(axis=0)
    return Y + R[:, None] / m + C[None, :] / n - R.sum() / (n * m)


def project_transport(Y: np.ndarray, a: np.ndarray, b: np.ndarray, iters: int = 60) -> np.ndarray:
    """Euclidean projection onto couplings of ``(a, b)`` (Dykstra), then exact repair."""
    X = Y.copy()
    P = np.zeros_like(Y)
    Q = np.zeros_like(Y)
    for _ in range(iters):
        Z = _affine_project(X + P, a, b)
        P = X + P - Z
        X = np.maximum(Z + Q, 0.0)
        Q = Z + Q - X
    return repair_coupling(X, a, b)


def repair_coupling(X: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Nearby exact coupling: clip, shrink under the marginals, add the residual product."""
    X = np.maximum(X, 0.0)
    rs, cs = X.sum(axis=1), X.sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = min(1.0, np.min(np.where(rs > 0, a / rs, np.inf)),
                  np.min(np.where(cs > 0, b / cs, np.inf)))
    X = lam * X
    r = a - X.sum(axis=1)
    s = b - X.sum(axis=0)
    # rounding residue must not turn a sparse coupling into a dense one
    r[r < 1e-14] = 0.0
    s[s < 1e-14] = 0.0
    if r.sum() > 0 and s.sum() > 0:
        X = X + np.outer(r, s) / r.sum()
    return X


# ---------------------------------------------------------------------------
# delta_cut


def density_lower_bound(G: WeightedGraph, Gp: WeightedGraph) -> float:
    """``|t(K2, G) - t(K2, G')|``: the cut ``S = T = all`` of every overlay."""
    a, b = _weights(G), _weights(Gp)
    return abs(float(a @ G.beta @ a - b @ Gp.beta @ b))


def _key(G: WeightedGraph) -> bytes:
    return np.int64(G.n).tobytes() + _weights(G).tobytes() + G.beta.tobytes()


class _Evaluator:
    def __init__(self, G, Gp, exact_limit, seed, lower):
        self.G, self.Gp = G, Gp
        self.exact_limit, self.seed = exact_limit, seed
        self.lower = lower
        self.best = None

    @property
    def settled(self) -> bool:
        return self.best is not None and self.best[0].upper <= self.lower + 1e-12

    def __call__(self, X: np.ndarray, name: str) -> CutNormResult | None:
        if _support(X).size > MAX_OVERLAY_NODES:
            return None
        r = overlay_cost(self.G, self.Gp, X, exact_limit=self.exact_limit, seed=self.seed)
        if self.best is None or r.upper < self.best[0].upper - 1e-15:
            self.best = (r, X.copy(), name)
        return r


def _witness_indicators(w: CutWitness, N: int) -> tuple[np.ndarray, np.ndarray]:
    s = np.zeros(N)
    t = np.zeros(N)
    s[list(w.S)] = 1.0
    t[list(w.T)] = 1.0
    return s, t


def _refine(ev: _Evaluator, X0: np.ndarray, Dflat: np.ndarray, a: np.ndarray, b: np.ndarray,
            iters: int, active_size: int = 8, deadline: float | None = None) -> None:
    """Minimax cutting-plane refinement of a coupling.

    Keeps the last ``active_size`` worst-cut witnesses, takes projected
    subgradient steps on the largest active cut value with backtracking,
    and certifies every accepted coupling with a fresh inner cut norm.
    """
    n, m = X0.shape
    N = n * m
    X = X0.copy()
    r = ev(X, "refine")
    active = [_witness_indicators(r.witness, N)]
    step = 0.5 / max(n, m)

    def worst(Xc):
        x = Xc.ravel()
        vals = [float((x * s) @ Dflat @ (x * t)) for s, t in active]
        k = int(np.argmax(np.abs(vals)))
        return abs(vals[k]), k, vals[k]

    for _ in range(iters):
        if ev.settled or (deadline is not None and time.monotonic() > deadline):
            return
        f, k, v = worst(X)
        if f <= 1e-15:
            return
        s, t = active[k]
        x = X.ravel()
        g = np.sign(v) * (s * (Dflat @ (x * t)) + t * (Dflat @ (x * s)))
        g = g.reshape(n, m)
        if not np.any(g):
            return
        moved = False
        for _ in range(12):
            Y = project_transport(X - step * g / np.abs(g).max(), a, b)
            if worst(Y)[0] < f - 1e-15:
                moved = True
                break
            step *= 0.5
        if not moved:
            return
        X = Y
        step *= 1.5
        r = ev(X, "refine")
        active.append(_witness_indicators(r.witness, N))
        active = active[-active_size:]


def _lift_perm(perm: Sequence[int], pk: int, k: int) -> np.ndarray:
    """Lift a bijection between ``pk``-fold blow-ups to ``k``-fold blow-ups."""
    r = k // pk
    L = len(perm) * r
    out = np.empty(L, dtype=np.int64)
    for v in range(L):
        u, c = divmod(v, k)
        p = perm[u * pk + c // r]
        i, q = divmod(p, pk)
        out[v] = i * k + q * r + c % r
    return out


def _blowup_candidates(G: WeightedGraph, Gp: WeightedGraph, ev: _Evaluator, seed: int,
                       limit: int, deadline: float | None) -> None:
    n, m = G.n, Gp.n
    base = n * m // math.gcd(n, m)
    sizes = [base * t for t in range(1, limit // base + 1)]
    # exact matchings on every small blow-up, annealing only on the largest one
    sizes = [L for L in sizes if L <= BLOWUP_EXACT_LIMIT] + [L for L in sizes[-1:]
                                                            if L > BLOWUP_EXACT_LIMIT]
    prev = None
    for L in sizes:
        if ev.settled:
            return
        k, kp = L // n, L // m
        Gk = WeightedGraph(np.ones(L), blow_up(G, k).beta)
        Gpk = WeightedGraph(np.ones(L), blow_up(Gp, kp).beta)
        if L <= BLOWUP_EXACT_LIMIT:
            res = delta_hat(Gk, Gpk, "exact", seed=seed)
        else:
            start = None
            if prev is not None and k % prev[0] == 0:
                start = _lift_perm(prev[1], prev[0], k)
            ms = None if deadline is None else max(0.0, (deadline - time.monotonic()) * 1000)
            res = delta_hat(Gk, Gpk, "anneal", seed=seed, start=start, temperatures=3,
                            steps=5, budget_ms=ms)
        ev(permutation_coupling(res.witness, k, kp), f"blowup{L}")
        if n == m and (prev is None or res.value <= prev[2]):
            prev = (k, res.witness, res.value)


def delta_cut(G: WeightedGraph, Gp: WeightedGraph, *, budget_ms: float | None = None,
              seed: int = 0, refine_iters: int = 40,
              extra_couplings: Sequence[np.ndarray] = (),
              exact_limit: int = INNER_EXACT_LIMIT,
              blowup_limit: int = BLOWUP_LIMIT) -> DistanceResult:
    """Certified upper bound on the overlay cut distance ``delta_cut(G, G')``.

    Candidates: the interval and product couplings, the diagonal coupling
    (equal node counts), any ``extra_couplings`` supplied, the grid oracle
    optimum (pairs with one free coupling parameter), couplings from
    bijections between blow-ups (equal node weights), and a minimax
    refinement of the best of them.  ``kind`` is ``exact`` only when a
    certified lower bound (density gap or oracle bracket) meets the
    value; ``lower`` carries that bound either way.  The pair is put in a
    canonical order first, so the result is symmetric in its arguments.
    """
    if _key(Gp) < _key(G):
        res = delta_cut(Gp, G, budget_ms=budget_ms, seed=seed, refine_iters=refine_iters,
                        extra_couplings=[np.asarray(X).T for X in extra_couplings],
                        exact_limit=exact_limit, blowup_limit=blowup_limit)
        return _transpose_result(res, Gp.n, G.n)
    deadline = None if budget_ms is None else time.monotonic() + budget_ms / 1000
    a, b = _weights(G), _weights(Gp)
    ev = _Evaluator(G, Gp, exact_limit, seed, density_lower_bound(G, Gp))
    ev(interval_coupling(a, b), "interval")
    ev(product_coupling(a, b), "product")
    if G.n == Gp.n:
        ev(diagonal_coupling(a, b), "diagonal")
    for X in extra_couplings:
        X = np.asarray(X, dtype=float)
        FractionalOverlay(X).check(a, b)
        ev(X, "extra")
    bracketed = False
    if G.n == Gp.n == 2 and not ev.settled:
        # one free coupling parameter: the grid oracle brackets the optimum
        # to within its half-width, so the expensive candidates are skipped
        orc = delta_cut_oracle(G, Gp, grid_steps=20000)
        ev(orc.witness, "oracle")
        ev.lower = max(ev.lower, orc.lower)
        bracketed = True
    if not (ev.settled or bracketed):
        if _is_uniform(G) and _is_uniform(Gp):
            _blowup_candidates(G, Gp, ev, seed, blowup_limit, deadline)
        if not ev.settled and refine_iters > 0 and G.n * Gp.n <= MAX_OVERLAY_NODES:
            Dflat = (G.beta[:, None, :, None] - Gp.beta[None, :, None, :]).reshape(
                G.n * Gp.n, G.n * Gp.n)
            _refine(ev, ev.best[1], Dflat, a, b, refine_iters, deadline=deadline)
    if ev.best is None:
        raise CapacityError(f"no candidate overlay has at most {MAX_OVERLAY_NODES} nodes")
    r, X, name = ev.best
    kind = "exact" if ev.settled else "upper_bound"
    return DistanceResult(r.upper, kind, FractionalOverlay(X), r.witness, lower=ev.lower,
                          candidate=name)


def _transpose_result(res: DistanceResult, n: int, m: int) -> DistanceResult:
    # flat index i * m + u of the swapped problem becomes u * n + i
    def flip(S):
        return tuple(sorted((p % m) * n + p // m for p in S))

    w = res.inner_cut
    return DistanceResult(res.value, res.kind, res.witness.T,
                          CutWitness(flip(w.S), flip(w.T), w.value), lower=res.lower,
                          candidate=res.candidate)


# ---------------------------------------------------------------------------
# oracle for tiny instances


@dataclass(frozen=True, eq=False)
class OracleResult:
    value: float
    half_width: float
    witness: np.ndarray

    @property
    def lower(self) -> float:
        return max(0.0, self.value - self.half_width)


def delta_cut_oracle(G: WeightedGraph, Gp: WeightedGraph, grid_steps: int = 100,
                     chunk: int = 4096) -> OracleResult:
    """Grid search over the transportation polytope with exact overlay costs.

    The free coordinates ``X[:-1, :-1]`` range over ``[0, min(a_i, b_u)]``
    in ``grid_steps`` equal steps; the last row and column are completed
    from the marginals.  The half-width is the Lipschitz constant of the
    overlay cost in ``||X||_1`` times the completion error of a half grid
    step.  With one free coordinate (2 x 2) the grid spans exactly the
    feasible interval, so every coupling has a grid point that close and
    the bracket is rigorous; with more coordinates it assumes a feasible
    grid point next to the optimum.
    """
    n, m = G.n, Gp.n
    if n > 3 or m > 3 or (n - 1) * (m - 1) > 4:
        raise CapacityError("the grid oracle is limited to n, n' <= 3")
    a, b = _weights(G), _weights(Gp)
    D = (G.beta[:, None, :, None] - Gp.beta[None, :, None, :]).reshape(n * m, n * m)
    maxD = float(np.abs(D).max())
    d = (n - 1) * (m - 1)
    hi = np.array([min(a[i], b[u]) for i in range(n - 1) for u in range(m - 1)])
    lo = np.zeros(d)
    if d == 1:
        lo[0] = max(0.0, b[0] - a[1])
    axes = [np.linspace(l, h, grid_steps + 1) for l, h in zip(lo, hi)]
    if d:
        free = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    else:
        free = np.zeros((1, 0))
    best_val, best_X = np.inf, None
    for s in range(0, len(free), chunk):
        block = free[s:s + chunk]
        F = block.reshape(len(block), n - 1, m - 1)
        X = np.zeros((len(F), n, m))
        X[:, :n - 1, :m - 1] = F
        X[:, :n - 1, m - 1] = a[:n - 1] - F.sum(axis=2)
        X[:, n - 1, :m - 1] = b[:m - 1] - F.sum(axis=1)
        X[:, n - 1, m - 1] = a[n - 1] - X[:, n - 1, :m - 1].sum(axis=1)
        ok = np.all(X >= -1e-15, axis=(1, 2))
        if not np.any(ok):
            continue
        X = np.maximum(X[ok], 0.0)
        x = X.reshape(len(X), -1)
        vals = cut_norm_batch(x[:, :, None] * x[:, None, :] * D)
        j = int(vals.argmin())
        if vals[j] < best_val:
            best_val, best_X = float(vals[j]), X[j]
    spacing = (hi - lo) / grid_steps if d else np.zeros(0)
    half_width = 2.0 * maxD * 4.0 * float(np.sum(spacing / 2))
    return OracleResult(best_val, half_width, best_X)


def vertex_weight_bound(G: WeightedGraph, Gp: WeightedGraph) -> float:
    """``|I| * sum_i |a_i - a'_i|`` for graphs sharing the edge weights."""
    span = float(max(G.beta.max(), Gp.beta.max()) - min(G.beta.min(), Gp.beta.min()))
    return span * float(np.abs(_weights(G) - _weights(Gp)).sum())


def delta_graphon(W, Wp, **kw) -> DistanceResult:
    """Overlay cut distance of two step graphons via their weighted graphs."""
    return delta_cut(W.to_weighted_graph(), Wp.to_weighted_graph(), **kw)
