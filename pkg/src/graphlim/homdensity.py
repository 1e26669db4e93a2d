"""Homomorphism counts and densities ``hom``, ``t``, ``t_inj``, ``t_ind``.

Sums over all maps ``V(F) -> V(G)`` are evaluated as tensor contractions
(one node-weight vector per node of F, one ``beta`` factor per edge), which
equals the brute-force sum term by term.  Sums over injective maps use
Moebius inversion on the lattice of set partitions of ``V(F)``: a sum over
injective maps is the signed combination of unrestricted sums over maps
that are constant on the blocks of each partition.
"""

from __future__ import annotations

import itertools
import json
import math
import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .core import (
    MAX_CANON_NODES,
    WeightedGraph,
    canonical_form,
    graph_from_mask,
    orbit_masks,
)
from .errors import CapacityError, InputError

MAX_MAPS = 10 ** 9
MAX_PATTERN_NODES = 8
MAX_CATALOG_NODES = 6

_LETTERS = string.ascii_letters


def _check_pattern(F: WeightedGraph) -> None:
    if not F.is_simple:
        raise InputError("the pattern graph F must be simple")
    if F.n > MAX_PATTERN_NODES:
        raise CapacityError(f"pattern graphs are limited to {MAX_PATTERN_NODES} nodes")


def _check_maps(F: WeightedGraph, G: WeightedGraph) -> None:
    if float(G.n) ** F.n > MAX_MAPS:
        raise CapacityError(f"{G.n}^{F.n} maps exceed the enumeration limit {MAX_MAPS:.0e}")


def hom_count(F: WeightedGraph, G: WeightedGraph) -> float:
    """Weighted homomorphism number ``hom(F, G)``."""
    _check_pattern(F)
    _check_maps(F, G)
    if F.n == 0:
        return 1.0
    subs = [_LETTERS[v] for v in range(F.n)]
    ops = [G.alpha] * F.n
    for u, v in F.edges():
        subs.append(_LETTERS[u] + _LETTERS[v])
        ops.append(G.beta)
    return float(np.einsum(",".join(subs) + "->", *ops, optimize="greedy"))


@lru_cache(maxsize=None)
def set_partitions(k: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """All set partitions of ``range(k)`` as tuples of blocks."""
    if k == 0:
        return ((),)
    out = []
    for p in set_partitions(k - 1):
        for b in range(len(p)):
            out.append(p[:b] + (p[b] + (k - 1,),) + p[b + 1:])
        out.append(p + ((k - 1,),))
    return tuple(out)


def _moebius(partition) -> int:
    mu = 1
    for block in partition:
        s = len(block)
        mu *= (-1) ** (s - 1) * math.factorial(s - 1)
    return mu


def injective_sum(k: int, n: int, factors: Sequence[tuple[int, int, np.ndarray]]) -> float:
    """Sum over injective ``phi: [k] -> [n]`` of ``prod M[phi(u), phi(v)]``.

    ``factors`` lists ``(u, v, M)`` with ``u != v``.
    """
    if n < k:
        return 0.0
    total = 0.0
    for part in set_partitions(k):
        block_of = {}
        for b, block in enumerate(part):
            for v in block:
                block_of[v] = b
        subs = [_LETTERS[b] for b in range(len(part))]
        ops = [np.ones(n)] * len(part)
        for u, v, M in factors:
            subs.append(_LETTERS[block_of[u]] + _LETTERS[block_of[v]])
            ops.append(M)
        val = np.einsum(",".join(subs) + "->", *ops, optimize="greedy")
        total += _moebius(part) * float(val)
    return total


def falling_factorial(n: int, k: int) -> int:
    return math.perm(n, k)


def inj_count(F: WeightedGraph, G: WeightedGraph) -> float:
    _check_pattern(F)
    return injective_sum(F.n, G.n, [(u, v, G.beta) for u, v in F.edges()])


def ind_count(F: WeightedGraph, G: WeightedGraph) -> float:
    _check_pattern(F)
    comp = 1.0 - G.beta
    edges = set(F.edges())
    factors = []
    for u, v in itertools.combinations(range(F.n), 2):
        factors.append((u, v, G.beta if (u, v) in edges else comp))
    return injective_sum(F.n, G.n, factors)


def t_density(F: WeightedGraph, G: WeightedGraph, mode: str = "hom") -> float:
    """Homomorphism density of ``F`` in ``G``.

    ``mode="hom"`` normalizes ``hom(F, G)`` by ``alpha_G^k``.  The injective
    and induced variants need unit node weights and normalize by the
    falling factorial ``(n)_k``; induced densities are meaningful when
    ``beta`` lies in ``[0, 1]``.
    """
    if mode == "hom":
        return hom_count(F, G) / G.total_weight() ** F.n
    if mode not in ("inj", "ind"):
        raise InputError(f"unknown density mode {mode!r}")
    if not G.has_unit_weights:
        raise InputError(f"t_{mode} needs node weights all equal to 1")
    if G.n < F.n:
        raise InputError(f"t_{mode} needs |V(G)| >= |V(F)| ({G.n} < {F.n})")
    _check_maps(F, G)
    count = inj_count(F, G) if mode == "inj" else ind_count(F, G)
    return count / falling_factorial(G.n, F.n)


# ---------------------------------------------------------------------------
# injective <-> induced conversion

def all_edge_sets(k: int) -> list[frozenset]:
    pairs = list(itertools.combinations(range(k), 2))
    return [frozenset(c) for r in range(len(pairs) + 1) for c in itertools.combinations(pairs, r)]


def inj_ind_convert(values: Mapping[frozenset, float], k: int, direction: str) -> dict:
    """Apply the inclusion-exclusion relations between ``t_inj`` and ``t_ind``.

    ``values`` maps edge sets (frozensets of pairs ``(u, v)`` with ``u < v``)
    on the node set ``range(k)`` to densities.  Every key must have all of its
    supergraphs present.  ``ind_to_inj`` sums over supergraphs,
    ``inj_to_ind`` takes the signed sum.
    """
    if direction not in ("ind_to_inj", "inj_to_ind"):
        raise InputError(f"unknown direction {direction!r}")
    pairs = list(itertools.combinations(range(k), 2))
    norm = {}
    for key, val in values.items():
        es = frozenset(tuple(sorted(e)) for e in key)
        if not all(e in pairs for e in es):
            raise InputError(f"edge set {sorted(es)} is not on {k} nodes")
        norm[es] = float(val)
    out = {}
    for F, _ in norm.items():
        rest = [p for p in pairs if p not in F]
        total = 0.0
        for r in range(len(rest) + 1):
            sign = -1.0 if (direction == "inj_to_ind" and r % 2) else 1.0
            for extra in itertools.combinations(rest, r):
                Fp = F | frozenset(extra)
                if Fp not in norm:
                    raise InputError(f"missing supergraph {sorted(Fp)} of {sorted(F)}")
                total += sign * norm[Fp]
        out[F] = total
    return out


# ---------------------------------------------------------------------------
# catalogue of small graphs


@dataclass(frozen=True)
class SmallGraphCatalog:
    k: int
    entries: tuple[tuple[bytes, WeightedGraph], ...]

    def __len__(self) -> int:
        return len(self.entries)

    def graphs(self, n: int | None = None) -> list[WeightedGraph]:
        return [g for _, g in self.entries if n is None or g.n == n]

    def keys(self, n: int | None = None) -> list[bytes]:
        return [key for key, g in self.entries if n is None or g.n == n]

    def to_json(self) -> str:
        return json.dumps([
            {"key": key.hex(), "n": g.n, "edges": [list(e) for e in g.edges()]}
            for key, g in self.entries
        ])


@lru_cache(maxsize=None)
def _classes_on(n: int) -> tuple[int, ...]:
    """Minimal bitmask of every isomorphism class on exactly ``n`` nodes."""
    if n <= 1:
        return (0,)
    m = n * (n - 1) // 2
    seen = np.zeros(1 << m, dtype=bool)
    pairs = list(itertools.combinations(range(n), 2))
    reps = []
    for mask in range(1 << m):
        if seen[mask]:
            continue
        edges = [pairs[b] for b in range(m) if mask >> (m - 1 - b) & 1]
        orbit = orbit_masks(n, edges)
        seen[orbit] = True
        reps.append(int(orbit.min()))
    return tuple(reps)


def enumerate_small_graphs(k: int) -> SmallGraphCatalog:
    """One representative per isomorphism class of simple graphs on 1..k nodes."""
    if k > MAX_CATALOG_NODES or k > MAX_CANON_NODES:
        raise CapacityError(f"catalogue is limited to {MAX_CATALOG_NODES} nodes")
    if k < 1:
        raise InputError("k must be at least 1")
    entries = []
    for n in range(1, k + 1):
        graphs = [graph_from_mask(n, mask) for mask in _classes_on(n)]
        graphs.sort(key=lambda g: (g.num_edges(), canonical_form(g)))
        entries.extend((canonical_form(g), g) for g in graphs)
    return SmallGraphCatalog(k, tuple(entries))
