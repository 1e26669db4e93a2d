import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graphlim.core import (NodePartition, WeightedGraph, averaged, complete_graph, constant_graph,
                           disjoint_union, graph_norms, half_graph, quotient)
from graphlim.cutdistance import overlay_cost
from graphlim.cutnorm import cut_norm
from graphlim.errors import CapacityError, InputError
from graphlim.homdensity import enumerate_small_graphs, t_density
from graphlim.regularity import (class_bound, equitable_weak_partition, is_regular_pair,
                                 is_regular_partition, residual_cut, simple_approximation,
                                 weak_regular_partition)
from graphlim.sampling import randomize

from conftest import brute_cut_norm, random_kernel, random_simple


def brute_pair_deviation(G, Vi, Vj, t):
    """Largest density deviation over all X, Y with |X|, |Y| >= t (plain loops)."""
    A = G.beta
    base = sum(A[i, j] for i in Vi for j in Vj) / (len(Vi) * len(Vj))
    best = 0.0
    for r in range(t, len(Vi) + 1):
        for X in itertools.combinations(Vi, r):
            for s in range(t, len(Vj) + 1):
                for Y in itertools.combinations(Vj, s):
                    d = sum(A[i, j] for i in X for j in Y) / (r * s)
                    best = max(best, abs(d - base))
    return best


def residual_brute(G, P):
    return brute_cut_norm(WeightedGraph(G.alpha, G.beta - averaged(G, P).beta))


def check_certificate(G, eps, cert):
    l2 = graph_norms(G)[1]
    assert residual_cut(G, cert.partition).upper <= cert.achieved * l2 + 1e-9
    assert cert.partition.q <= 4 ** cert.iterations
    assert cert.energy_ok
    assert all(b >= a - 1e-12 for a, b in zip(cert.energies, cert.energies[1:]))


# ---------------------------------------------------------------------------
# weak partitions

def test_constant_graph_single_class():
    cert = weak_regular_partition(constant_graph(10, 0.3), 0.5)
    assert cert.partition.q == 1 and cert.achieved == 0 and cert.iterations == 0


def test_zero_graph_trivial():
    cert = weak_regular_partition(WeightedGraph(np.ones(4), np.zeros((4, 4))), 0.5)
    assert cert.partition.q == 1 and cert.achieved == 0
    with pytest.raises(InputError):
        weak_regular_partition(complete_graph(3), 0.0)


def test_class_bound_values():
    assert class_bound(0.5) == 64
    assert class_bound(1.0) == 1
    assert class_bound(0.3) == 4 ** 11


def test_step_graph_fixed_point(rng):
    G0 = random_kernel(rng, 8, 0, 1)
    P0 = NodePartition.from_labels(np.arange(8) % 3)
    G = averaged(G0, P0)
    cert = weak_regular_partition(G, 0.2)
    assert cert.achieved <= 0.2
    assert residual_brute(G, cert.partition) <= cert.achieved * graph_norms(G)[1] + 1e-9


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 10), st.sampled_from([0.3, 0.5, 0.8, 1.0]))
def test_certificate_soundness_exact(seed, n, eps):
    rng = np.random.default_rng(seed)
    G = random_kernel(rng, n, -1, 1)
    cert = weak_regular_partition(G, eps)
    check_certificate(G, eps, cert)
    assert residual_brute(G, cert.partition) <= cert.achieved * graph_norms(G)[1] + 1e-9
    assert cert.exact_witnesses and not cert.cap_hit
    assert cert.achieved <= eps + 1e-12
    assert cert.iterations <= math.ceil(1 / eps ** 2) - 1
    assert cert.class_bound_ok


def test_n60_heuristic_witnesses(rng):
    for _ in range(2):
        G = random_simple(rng, 60)
        cert = weak_regular_partition(G, 0.5)
        check_certificate(G, 0.5, cert)
        assert cert.achieved <= 0.5 and cert.partition.q <= 64 and not cert.exact_witnesses


def test_quotient_coupling_bound(rng):
    """delta(G, G/P) with the class-membership coupling is at most d_cut(G, G_P)."""
    for _ in range(10):
        G = random_kernel(rng, 8, -1, 1, unit=False)
        P = NodePartition.from_labels(rng.integers(0, 3, 8))
        Q = quotient(G, P)
        X = np.zeros((G.n, P.q))
        X[np.arange(G.n), P.assignment] = G.alpha / G.alpha.sum()
        cost = overlay_cost(G, Q, X)
        assert cost.upper <= residual_cut(G, P, "exact").upper + 1e-9


# ---------------------------------------------------------------------------
# equitable partitions

def test_equitable_constant():
    cert = equitable_weak_partition(constant_graph(12, 0.6), 0.5, 4)
    assert np.array_equal(np.bincount(cert.partition.assignment), [3, 3, 3, 3])
    assert cert.achieved == 0


def test_equitable_weight_condition(rng):
    for _ in range(5):
        G = random_kernel(rng, 50, 0, 1, unit=False)
        cert = equitable_weak_partition(G, 1.0, 7)
        P = cert.partition
        assert P.q == 7
        w = np.array([G.alpha[c].sum() for c in P.classes()])
        dev = np.abs(w - G.alpha.sum() / 7)
        assert np.all(dev < G.alpha.max())
        assert cert.max_weight_deviation == pytest.approx(dev.max())


def test_equitable_refinement_report(rng):
    G = random_kernel(rng, 8, -1, 1)
    cert = equitable_weak_partition(G, 0.5, 4)
    l2 = graph_norms(G)[1]
    assert residual_brute(G, cert.partition) <= cert.achieved * l2 + 1e-9
    assert cert.slack == pytest.approx(cert.achieved - 2 * cert.inner_achieved)


def test_equitable_errors():
    with pytest.raises(InputError):
        equitable_weak_partition(complete_graph(3), 0.5, 4)
    G = disjoint_union(complete_graph(6), complete_graph(6))
    assert weak_regular_partition(G, 0.1).partition.q > 1
    with pytest.raises(InputError):
        equitable_weak_partition(G, 0.1, 1)


# ---------------------------------------------------------------------------
# simple approximation

def test_simple_approximation_of_simple_graph(rng):
    G = random_simple(rng, 8)
    ap = simple_approximation(G, 8)
    assert ap.partition.q == 8
    for F in enumerate_small_graphs(4).graphs():
        assert t_density(F, ap.H) == pytest.approx(t_density(F, G), abs=1e-12)
    assert ap.delta_ub <= 1e-12


def test_simple_approximation_constant_half():
    ap = simple_approximation(constant_graph(40, 0.5), 8, seed=3)
    assert ap.H.n == 8 and ap.H.is_simple
    assert ap.delta_ub <= 0.5 + 4 / math.sqrt(8)
    assert ap.components["partition"] == pytest.approx(0, abs=1e-12)


def test_gh_close_event_q16():
    H0 = constant_graph(16, 0.5, loops=False)
    misses = 0
    for s in range(200):
        H = randomize(H0, s)
        K = WeightedGraph(H0.alpha, H0.beta - H.beta)
        misses += cut_norm(K, "auto").upper >= 4 / math.sqrt(16)
    assert misses / 200 <= 2.0 ** -16 + 3 * math.sqrt(2.0 ** -16 / 200)


def test_simple_approximation_range():
    with pytest.raises(InputError):
        simple_approximation(WeightedGraph(np.ones(2), [[0, 2], [2, 0]]), 2)


# ---------------------------------------------------------------------------
# regular pairs and partitions

def test_pair_examples():
    G = WeightedGraph(np.ones(8), np.block([[np.zeros((4, 4)), np.ones((4, 4))],
                                            [np.ones((4, 4)), np.zeros((4, 4))]]))
    assert is_regular_pair(G, range(4), range(4, 8), 0.01).status == "regular"
    E = WeightedGraph(np.ones(8), np.zeros((8, 8)))
    assert is_regular_pair(E, range(4), range(4, 8), 0.01).status == "regular"


def test_half_graph_pair_counterexample():
    H = half_graph(4)
    Vi, Vj = list(range(4)), list(range(4, 8))
    v = is_regular_pair(H, Vi, Vj, 0.25, k=1)
    assert v.status == "counterexample"
    oracle = brute_pair_deviation(H, Vi, Vj, 2)
    assert oracle > 0.25 and v.deviation == pytest.approx(oracle)
    X, Y = v.X, v.Y
    d = H.beta[np.ix_(X, Y)].mean() - H.beta[np.ix_(Vi, Vj)].mean()
    assert abs(d) == pytest.approx(v.deviation)


@settings(max_examples=30)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 6), st.integers(2, 6),
       st.sampled_from([0.1, 0.2, 0.3]))
def test_exact_pair_matches_brute(seed, a, b, eps):
    rng = np.random.default_rng(seed)
    G = random_simple(rng, a + b)
    Vi, Vj = list(range(a)), list(range(a, a + b))
    v = is_regular_pair(G, Vi, Vj, eps, k=2)
    t = max(1, math.ceil(eps * (a + b) / 2 - 1e-12))
    if t > min(a, b):
        assert v.status == "regular"
        return
    dev = brute_pair_deviation(G, Vi, Vj, t)
    assert (v.status == "counterexample") == (dev > eps + 1e-12)
    if v.status == "counterexample":
        assert v.deviation == pytest.approx(dev)
    r = is_regular_pair(G, Vi, Vj, eps, k=2, mode="randomized", samples=500)
    assert r.status in ("unknown", "counterexample")
    if r.status == "counterexample":
        assert dev > eps


def test_pair_capacity_and_mode():
    G = random_simple(np.random.default_rng(0), 40)
    with pytest.raises(CapacityError):
        is_regular_pair(G, range(20), range(20, 40), 0.1)
    with pytest.raises(InputError):
        is_regular_pair(G, range(5), range(5, 10), 0.1, mode="fast")


def test_partition_examples():
    G = random_simple(np.random.default_rng(2), 9)
    assert is_regular_partition(G, NodePartition.discrete(9), 0.3) == ("regular", 0)
    with pytest.raises(InputError):
        is_regular_partition(G, NodePartition.from_labels([0] * 7 + [1, 1]), 0.3)


def test_gnp_partition_randomized():
    regular = 0
    for s in range(50):
        G = randomize(constant_graph(30, 0.5, loops=False), s)
        P = NodePartition.from_labels(np.arange(30) % 3)
        verdict, _ = is_regular_partition(G, P, 0.4, mode="randomized", seed=s, samples=2000)
        regular += verdict == "regular"
    assert regular >= 45


def test_mixed_cliques_irregular():
    G = disjoint_union(complete_graph(8), complete_graph(8))
    labels = np.array([0] * 4 + [1] * 4 + [0] * 4 + [1] * 4)
    P = NodePartition.from_labels(labels)
    cls = P.classes()
    v = is_regular_pair(G, cls[0], cls[1], 0.1, k=2)
    assert v.status == "counterexample"
    assert brute_pair_deviation(G, list(cls[0]), list(cls[1]), 1) > 0.1
    assert is_regular_partition(G, P, 0.1)[1] >= 1


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.05, 0.1, 0.2]))
def test_regular_implies_weakly_regular(seed, eps):
    rng = np.random.default_rng(seed)
    G0 = random_simple(rng, 12)
    P = NodePartition.from_labels(np.arange(12) % 3)
    # mix in step graphs, which are exactly regular, to exercise the regular branch
    G = G0 if seed % 2 else WeightedGraph(G0.alpha, np.round(averaged(G0, P).beta))
    verdict, _ = is_regular_partition(G, P, eps)
    if verdict == "regular":
        assert residual_cut(G, P, "exact").upper <= 7 * eps + 1e-9
