"""Weak regularity partitions, equitable rebalancing, and regular-pair checks.

The weak partition is built by energy increments: while some pair of sets
``(S, T)`` has a large cut in ``G - G_P``, every class is split by ``S``
and ``T``.  The squared L2 norm of ``G_P`` grows by at least the squared
witness value each time, which bounds the number of rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import NodePartition, WeightedGraph, averaged, graph_norms, quotient
from .cutnorm import AUTO_EXACT_LIMIT, _bit_table, cut_norm
from .errors import CapacityError, InputError

PAIR_EXACT_LIMIT = 15
ENERGY_TOL = 1e-10


@dataclass
class RegularityCertificate:
    partition: NodePartition
    achieved: float
    iterations: int
    class_bound_ok: bool
    class_bound: int = 0
    loose_class_bound_ok: bool = True
    energies: list = field(default_factory=list)
    energy_ok: bool = True
    exact_witnesses: bool = True
    cap_hit: bool = False
    inner_achieved: float | None = None
    slack: float | None = None
    max_weight_deviation: float | None = None

    def to_dict(self) -> dict:
        d = {
            "assignment": [int(v) for v in self.partition.assignment],
            "classes": self.partition.q,
            "achieved": self.achieved,
            "iterations": self.iterations,
            "class_bound": self.class_bound,
            "class_bound_ok": self.class_bound_ok,
            "loose_class_bound_ok": self.loose_class_bound_ok,
            "energy_ok": self.energy_ok,
            "exact_witnesses": self.exact_witnesses,
            "cap_hit": self.cap_hit,
        }
        for key in ("inner_achieved", "slack", "max_weight_deviation"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        return d


def _energy(G: WeightedGraph, P: NodePartition) -> float:
    return graph_norms(averaged(G, P))[1] ** 2


def residual_cut(G: WeightedGraph, P: NodePartition, method: str = "auto", seed: int = 0,
                 exact_limit: int = AUTO_EXACT_LIMIT):
    """Cut norm bounds and witness for ``beta(G) - beta(G_P)``."""
    K = WeightedGraph(G.alpha, G.beta - averaged(G, P).beta)
    return cut_norm(K, method, seed=seed, exact_limit=exact_limit)


def class_bound(eps: float) -> int:
    return 4 ** (math.ceil(1 / eps ** 2) - 1)


def weak_regular_partition(G: WeightedGraph, eps: float, *, seed: int = 0,
                           exact_limit: int = AUTO_EXACT_LIMIT,
                           max_iterations: int | None = None) -> RegularityCertificate:
    """Partition ``P`` with certified ``d_cut(G, G_P) <= achieved * ||G||_2``.

    Exact cut witnesses are used for ``n <= exact_limit``; larger graphs
    use the local-search witness and stop once the certified upper bound
    is small enough.  The round cap is ``4 * ceil(1 / eps^2)``.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    n = G.n
    l2 = graph_norms(G)[1]
    bound = class_bound(eps)
    P = NodePartition.trivial(n)
    if l2 == 0:
        return RegularityCertificate(P, 0.0, 0, True, bound)
    cap = max_iterations if max_iterations is not None else 4 * math.ceil(1 / eps ** 2)
    target = eps * l2
    energies = [_energy(G, P)]
    energy_ok = True
    iterations = 0
    exact = n <= exact_limit
    cap_hit = False
    while True:
        r = residual_cut(G, P, seed=seed + iterations, exact_limit=exact_limit)
        if r.upper <= target:
            break
        w = r.witness
        if iterations >= cap or w.value <= 0:
            cap_hit = iterations >= cap
            break
        inS = np.zeros(n, dtype=int)
        inT = np.zeros(n, dtype=int)
        inS[list(w.S)] = 1
        inT[list(w.T)] = 1
        P = NodePartition.from_labels(P.assignment * 4 + 2 * inS + inT)
        iterations += 1
        energies.append(_energy(G, P))
        if energies[-1] - energies[-2] < w.value ** 2 - ENERGY_TOL:
            energy_ok = False
    achieved = r.upper / l2
    return RegularityCertificate(
        partition=P, achieved=achieved, iterations=iterations,
        class_bound_ok=P.q <= bound, class_bound=bound,
        loose_class_bound_ok=P.q <= 4 ** (1 / eps ** 2), energies=energies,
        energy_ok=energy_ok, exact_witnesses=exact, cap_hit=cap_hit,
    )


def _balanced_bins(alpha: np.ndarray, order: np.ndarray, q: int) -> np.ndarray:
    """Cut the weight line, in the given node order, into ``q`` consecutive bins.

    Node ``j`` goes to bin ``floor(m_j / w)`` where ``m_j`` is the midpoint
    of its weight interval and ``w = alpha_G / q``; a bin's weight then
    differs from ``w`` by less than ``alpha_max``.
    """
    a = alpha[order]
    w = a.sum() / q
    mid = np.cumsum(a) - a / 2
    bins = np.minimum((mid // w).astype(int), q - 1)
    label = np.empty(alpha.size, dtype=int)
    label[order] = bins
    # a bin can only be empty when some node outweighs w; borrow a node for it
    for b in range(q):
        if np.any(label == b):
            continue
        counts = np.bincount(label, minlength=q)
        donors = [c for c in range(q) if counts[c] >= 2]
        donor = min(donors, key=lambda c: abs(b - c))
        members = np.flatnonzero(label == donor)
        label[members[np.argmin(alpha[members])]] = b
    return label


def equitable_weak_partition(G: WeightedGraph, eps: float, q: int, *, seed: int = 0,
                             exact_limit: int = AUTO_EXACT_LIMIT) -> RegularityCertificate:
    """Weak partition rebalanced into exactly ``q`` classes of nearly equal weight.

    Nodes are laid out class by class (classes of the weak partition in
    order) and the weight line is cut into ``q`` equal pieces.  The
    certificate reports the certified bound after rebalancing, the inner
    partition's bound, and ``slack = achieved - 2 * inner``.
    """
    if q > G.n:
        raise InputError(f"q = {q} exceeds the number of nodes {G.n}")
    if q < 1:
        raise InputError("q must be positive")
    inner = weak_regular_partition(G, eps, seed=seed, exact_limit=exact_limit)
    if inner.partition.q > q:
        raise InputError(f"the weak partition already has {inner.partition.q} classes > q = {q}")
    order = np.lexsort((np.arange(G.n), inner.partition.assignment))
    label = _balanced_bins(G.alpha, order, q)
    P = NodePartition.from_labels(label)
    l2 = graph_norms(G)[1]
    achieved = 0.0 if l2 == 0 else residual_cut(G, P, seed=seed, exact_limit=exact_limit).upper / l2
    weights = np.bincount(P.assignment, weights=G.alpha, minlength=P.q)
    dev = float(np.abs(weights - G.alpha.sum() / q).max())
    return RegularityCertificate(
        partition=P, achieved=achieved, iterations=inner.iterations,
        class_bound_ok=inner.class_bound_ok, class_bound=inner.class_bound,
        loose_class_bound_ok=inner.loose_class_bound_ok, energies=inner.energies,
        energy_ok=inner.energy_ok, exact_witnesses=inner.exact_witnesses,
        cap_hit=inner.cap_hit, inner_achieved=inner.achieved,
        slack=achieved - 2 * inner.achieved, max_weight_deviation=dev,
    )


@dataclass
class Approximation:
    H: WeightedGraph
    delta_ub: float
    partition: NodePartition
    components: dict


def simple_approximation(G: WeightedGraph, q: int, seed=0, eps: float | None = None) -> Approximation:
    """Simple graph ``H`` on ``q`` nodes with a certified bound on ``delta_cut(G, H)``.

    Pipeline: equitable weak partition into ``q`` classes, unit-weight
    quotient, randomization.  The bound adds three certified pieces:
    ``d_cut(G, G_P)``, the node-weight change from ``G/P`` to the
    unit-weight quotient, and ``d_cut`` between that quotient and ``H``.
    """
    from .sampling import as_seed, randomize

    if np.any(G.beta < 0) or np.any(G.beta > 1):
        raise InputError("simple_approximation needs edge weights in [0, 1]")
    if q > 20000:
        raise CapacityError("q is limited to 20000")
    if eps is None:
        eps = 1.0 / math.sqrt(math.floor(math.log(q, 4) + 1e-12) + 1)
    while True:
        inner = weak_regular_partition(G, eps)
        if inner.partition.q <= q or eps >= 1.0:
            break
        eps = min(1.0, 2 * eps)
    cert = equitable_weak_partition(G, eps, q)
    P = cert.partition
    l2 = graph_norms(G)[1]
    d_partition = cert.achieved * l2
    Q = quotient(G, P)
    Q0 = quotient(G, P, unit_weights=True)
    span = float(Q.beta.max() - Q.beta.min())
    d_weights = span * float(np.abs(Q.alpha / Q.alpha.sum() - 1.0 / P.q).sum())
    H = randomize(Q0, as_seed(seed))
    r = cut_norm(WeightedGraph(Q0.alpha, Q0.beta - H.beta), "auto")
    components = {"partition": d_partition, "node_weights": d_weights,
                  "randomization": r.upper, "eps": eps}
    return Approximation(H, d_partition + d_weights + r.upper, P, components)


# ---------------------------------------------------------------------------
# epsilon-regular pairs


@dataclass
class PairVerdict:
    status: str
    X: tuple = ()
    Y: tuple = ()
    deviation: float = 0.0


def _pair_threshold(n: int, eps: float, k: int) -> int:
    return max(1, math.ceil(eps * n / k - 1e-12))


def _extreme_deviation(d: np.ndarray, xsize: np.ndarray, t: int, base: float):
    """Largest ``|e(X, Y) / (|X||Y|) - base|`` over ``|Y| >= t`` for each row of ``d``.

    ``d[r, y]`` is the number of neighbours of ``y`` in ``X_r``; for a fixed
    size the extreme ``Y`` takes the largest or the smallest ``d`` values.
    """
    s = np.sort(d, axis=1)
    m = d.shape[1]
    sizes = np.arange(1, m + 1)
    low = np.cumsum(s, axis=1) / sizes / xsize[:, None]
    high = np.cumsum(s[:, ::-1], axis=1) / sizes / xsize[:, None]
    dev = np.maximum(np.abs(high - base), np.abs(low - base))[:, t - 1:]
    which = dev.argmax(axis=1)
    return dev[np.arange(d.shape[0]), which], which + t, high[np.arange(d.shape[0]), which + t - 1]


def is_regular_pair(G: WeightedGraph, Vi, Vj, eps: float, k: int = 1, mode: str = "exact",
                    seed=0, samples: int = 10_000) -> PairVerdict:
    """Check the eps-regularity of the pair ``(Vi, Vj)``.

    Subsets must have at least ``eps * |V| / k`` nodes.  ``exact`` tries
    every ``X`` (``|Vi| <= 15``) with the extreme ``Y`` of each size;
    ``randomized`` samples ``X`` and returns ``unknown`` when no violation
    turns up.
    """
    Vi = np.asarray(sorted(Vi), dtype=int)
    Vj = np.asarray(sorted(Vj), dtype=int)
    t = _pair_threshold(G.n, eps, k)
    if len(Vi) < t or len(Vj) < t:
        return PairVerdict("regular")
    A = G.beta[np.ix_(Vi, Vj)]
    base = float(A.sum()) / (len(Vi) * len(Vj))
    if mode == "exact":
        if len(Vi) > PAIR_EXACT_LIMIT:
            raise CapacityError(f"exact pair checks support |Vi| <= {PAIR_EXACT_LIMIT}")
        B = _bit_table(len(Vi))
        B = B[B.sum(axis=1) >= t]
    elif mode == "randomized":
        from .sampling import make_rng

        rng = make_rng(seed)
        sizes = rng.integers(t, len(Vi) + 1, size=samples)
        keys = rng.random((samples, len(Vi)))
        ranks = keys.argsort(axis=1).argsort(axis=1)
        B = (ranks < sizes[:, None]).astype(float)
    else:
        raise InputError(f"unknown mode {mode!r}")
    xsize = B.sum(axis=1)
    d = B @ A
    dev, ysize, _ = _extreme_deviation(d, xsize, t, base)
    r = int(dev.argmax())
    if dev[r] > eps + 1e-12:
        X = tuple(int(v) for v in Vi[B[r] > 0])
        order = np.argsort(d[r])
        s = int(ysize[r])
        top, bottom = order[::-1][:s], order[:s]
        dt = d[r, top].sum() / (len(X) * s) - base
        db = d[r, bottom].sum() / (len(X) * s) - base
        ys = top if abs(dt) >= abs(db) else bottom
        Y = tuple(sorted(int(v) for v in Vj[ys]))
        return PairVerdict("counterexample", X, Y, float(dev[r]))
    return PairVerdict("regular" if mode == "exact" else "unknown")


def is_regular_partition(G: WeightedGraph, P: NodePartition, eps: float, mode: str = "exact",
                         seed=0, samples: int = 10_000) -> tuple[str, int]:
    """Count irregular pairs ``i < j``; regular iff the count is at most ``eps * k^2``."""
    k = P.q
    sizes = np.bincount(P.assignment, minlength=k)
    lo, hi = G.n // k, -(-G.n // k)
    if sizes.min() < lo or sizes.max() > hi:
        raise InputError("the partition is not equitable")
    from .sampling import as_seed

    classes = P.classes()
    base = as_seed(seed)
    bad = 0
    for i in range(k):
        for j in range(i + 1, k):
            v = is_regular_pair(G, classes[i], classes[j], eps, k, mode,
                                seed=base.child(i, j), samples=samples)
            bad += v.status == "counterexample"
    return ("regular" if bad <= eps * k * k else "irregular"), bad
