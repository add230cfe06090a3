"""The interlacing graph on k-element subsets and a finite Property-Q tester.

Vertices are the k-subsets of {1..N} written in increasing order; two
distinct subsets are adjacent when their elements alternate (one chain
n_1 <= m_1 <= n_2 <= ... <= n_k <= m_k or the mirrored one). The graph
carries the shortest-path metric. The Property-Q surrogate replaces the
infinite monochromatic subset by a witness of configurable size s, found by
branch-and-bound over ground-set elements with a brute-force oracle for
cross-checking.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .metric_core import FiniteMetricSpace

__all__ = [
    "KSubset",
    "InterlacingGraph",
    "PropertyQInstance",
    "interlaces",
    "pk_distance",
    "property_q_test",
    "property_q_brute_force",
    "colex_rank",
    "colex_unrank",
]

KSubset = tuple  # strictly increasing ints in 1..N


def _validate_subset(a) -> tuple:
    t = tuple(int(v) for v in a)
    if any(x >= y for x, y in zip(t, t[1:])):
        raise ValueError(f"subset {t} is not strictly increasing")
    if t and t[0] < 1:
        raise ValueError("ground-set elements start at 1")
    return t


def interlaces(a, b) -> bool:
    """Adjacency test: the two increasing enumerations alternate."""
    a, b = _validate_subset(a), _validate_subset(b)
    if len(a) != len(b):
        raise ValueError(f"subsets of different sizes {len(a)} and {len(b)}")
    if a == b:
        raise ValueError("interlacing is defined for distinct subsets")

    def chain(first, second):
        # first_1 <= second_1 <= first_2 <= second_2 <= ...
        merged = [v for pair in zip(first, second) for v in pair]
        return all(x <= y for x, y in zip(merged, merged[1:]))

    return chain(a, b) or chain(b, a)


def colex_rank(subset) -> int:
    """Rank in colexicographic order: sum of C(s_i - 1, i) over positions."""
    t = _validate_subset(subset)
    return sum(math.comb(v - 1, i + 1) for i, v in enumerate(t))


def colex_unrank(rank: int, k: int) -> tuple:
    out = []
    r = rank
    for i in range(k, 0, -1):
        v = i
        while math.comb(v, i) <= r:
            v += 1
        out.append(v)
        r -= math.comb(v - 1, i)
    return tuple(reversed(out))


class InterlacingGraph:
    """All C(N, k) vertices with adjacency and on-demand BFS distances."""

    def __init__(self, k: int, N: int):
        if k < 1 or N < k:
            raise ValueError("need 1 <= k <= N")
        self.k = k
        self.N = N
        self.vertices = [tuple(c) for c in itertools.combinations(range(1, N + 1), k)]
        self.vertices.sort(key=colex_rank)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self._adj = None
        self._dist = None

    def __len__(self):
        return len(self.vertices)

    @property
    def adjacency(self) -> np.ndarray:
        if self._adj is None:
            V = np.array(self.vertices, dtype=np.int16)
            n = len(V)
            # chain test vectorized over all ordered pairs: a1<=b1<=a2<=...
            A = V[:, None, :]
            B = V[None, :, :]
            chain = np.ones((n, n), dtype=bool)
            for i in range(self.k):
                chain &= A[:, :, i] <= B[:, :, i]
                if i + 1 < self.k:
                    chain &= B[:, :, i] <= A[:, :, i + 1]
            adj = chain | chain.T
            np.fill_diagonal(adj, False)
            self._adj = adj
        return self._adj

    @property
    def dist(self) -> np.ndarray:
        if self._dist is None:
            graph = csr_matrix(self.adjacency.astype(np.int8))
            self._dist = shortest_path(graph, method="D", unweighted=True)
        return self._dist

    def eccentricities(self) -> np.ndarray:
        d = self.dist
        if np.isinf(d).any():
            raise ValueError("unreachable: graph is disconnected at this (k, N)")
        return d.max(axis=1).astype(int)


def pk_distance(a, b, graph: InterlacingGraph) -> int:
    """Shortest-path distance; disconnection is an error, never infinity."""
    ia = graph.index[_validate_subset(a)]
    ib = graph.index[_validate_subset(b)]
    d = graph.dist[ia, ib]
    if math.isinf(d):
        raise ValueError(f"unreachable: {a} and {b} lie in different components")
    return int(d)


# ---------------------------------------------------------------------------
# Property Q at finite scale
# ---------------------------------------------------------------------------

@dataclass
class PropertyQInstance:
    """f maps every k-subset of {1..N} (indexed by colex rank) into a finite
    metric space; the witness subset size s is the finite surrogate for the
    infinite subset of the original property.
    """

    k: int
    N: int
    s: int
    epsilon: float
    delta: float
    f_values: np.ndarray  # target point index per colex rank
    target: FiniteMetricSpace

    def __post_init__(self):
        self.f_values = np.asarray(self.f_values, dtype=int)
        count = math.comb(self.N, self.k)
        if len(self.f_values) != count:
            raise ValueError(f"f table has {len(self.f_values)} entries, needs {count}")
        if self.f_values.min(initial=0) < 0 or self.f_values.max(initial=0) >= len(self.target):
            raise ValueError("f value outside the target point set")
        if self.s < 2 * self.k:
            raise ValueError("witness size s must be at least 2k")
        if self.epsilon <= 0 or self.delta <= 0:
            raise ValueError("epsilon and delta must be positive")


def _ordered_pairs_ok(inst: PropertyQInstance, elements) -> bool:
    """All pairs n < m of k-subsets drawn from elements map epsilon-close."""
    elems = sorted(elements)
    D = inst.target.dist
    for nbar in itertools.combinations(elems, inst.k):
        top = nbar[-1]
        rest = [e for e in elems if e > top]
        if len(rest) < inst.k:
            continue
        fa = inst.f_values[colex_rank(nbar)]
        for mbar in itertools.combinations(rest, inst.k):
            fb = inst.f_values[colex_rank(mbar)]
            if D[fa, fb] > inst.epsilon:
                return False
    return True


def _lipschitz_ok(inst: PropertyQInstance, graph: InterlacingGraph) -> bool:
    adj = graph.adjacency
    iu, ju = np.nonzero(np.triu(adj))
    f = inst.f_values
    if len(iu) == 0:
        return True
    return bool((inst.target.dist[f[iu], f[ju]] <= inst.delta).all())


def property_q_test(inst: PropertyQInstance, graph: Optional[InterlacingGraph] = None) -> dict:
    """Branch-and-bound search for a size->=s subset whose ordered k-subset
    pairs all map epsilon-close.

    Explores ground-set elements in ascending order and prunes a partial
    subset on its first violating ordered pair, so any reported witness is
    exact; exhausted=True means the whole space was covered and a negative
    verdict is exact for this finite instance.
    """
    if graph is None:
        graph = InterlacingGraph(inst.k, inst.N)
    lipschitz_ok = _lipschitz_ok(inst, graph)

    D = inst.target.dist
    f = inst.f_values
    k = inst.k
    witness = None

    def pairs_with_last(chosen):
        """Ordered pairs whose second block ends at the newest element."""
        if len(chosen) < 2 * k:
            return True
        new = chosen[-1]
        pool = chosen[:-1]
        # new is the maximum, so every fresh ordered pair has it atop m
        for mrest in itertools.combinations(pool, k - 1):
            mbar = mrest + (new,)
            low = [e for e in pool if e < mbar[0]]
            fb = f[colex_rank(mbar)]
            for nbar in itertools.combinations(low, k):
                if D[f[colex_rank(nbar)], fb] > inst.epsilon:
                    return False
        return True

    def extend(chosen, next_start):
        nonlocal witness
        if witness is not None:
            return
        if len(chosen) >= inst.s:
            witness = list(chosen)
            return
        for e in range(next_start, inst.N + 1):
            # bound: not enough elements left to reach size s
            if len(chosen) + (inst.N - e + 1) < inst.s:
                break
            chosen.append(e)
            if pairs_with_last(chosen):
                extend(chosen, e + 1)
            chosen.pop()
            if witness is not None:
                return

    extend([], 1)
    return {
        "lipschitz_ok": lipschitz_ok,
        "witness_subset": witness,
        "exhausted": witness is None,
        "surrogate_note": f"witness size s={inst.s} stands in for an infinite subset",
    }


def property_q_brute_force(inst: PropertyQInstance) -> Optional[list]:
    """Oracle: enumerate all size-s subsets and return the first admissible
    one in lexicographic order (matches the branch-and-bound order)."""
    for cand in itertools.combinations(range(1, inst.N + 1), inst.s):
        if _ordered_pairs_ok(inst, cand):
            return list(cand)
    return None
