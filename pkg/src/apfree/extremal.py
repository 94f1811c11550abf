"""Largest k-AP-free subsets: exact search, brute-force oracle, heuristic.

The exact solver is a branch-and-bound for maximum independent sets in the
k-uniform progression hypergraph, with vertex sets held as Python int bitsets.
Witnesses are always re-certified by recounting progressions on the output,
which goes through :mod:`apfree.progressions`, not through the search code.
"""

from __future__ import annotations

import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted, TooLarge
from .progressions import ap_edges, count_3aps, count_4aps
from .rng import make_rng
from .sets import GroundSet

DEFAULT_BUDGET = 10**8
ORACLE_MAX = 25
_ORACLE_BLOCK = 1 << 20


@dataclass(frozen=True, eq=False)
class ExtremalResult:
    mode: str
    k: int
    size: int
    witness: GroundSet
    optimal: bool
    nodes_explored: int = 0

    def as_dict(self, with_witness: bool = True) -> dict:
        out = {
            "mode": self.mode,
            "k": self.k,
            "size": self.size,
            "optimal": self.optimal,
            "nodes_explored": self.nodes_explored,
        }
        if with_witness:
            out["witness"] = self.witness.members.tolist()
        return out


def certify_free(S: GroundSet, k: int) -> bool:
    counts = count_3aps(S) if k == 3 else count_4aps(S)
    return counts.ordered_nontrivial == 0


def _result(A: GroundSet, k: int, mode: str, positions, optimal: bool, nodes: int = 0) -> ExtremalResult:
    witness = A.subset(A.members[np.asarray(sorted(positions), dtype=np.int64)])
    if not certify_free(witness, k):
        raise AssertionError(f"{mode} witness is not {k}-AP free")
    return ExtremalResult(mode, k, len(witness), witness, optimal, nodes)


def _edge_masks(A: GroundSet, k: int) -> list[int]:
    return [sum(1 << int(v) for v in row) for row in ap_edges(A, k)]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---- oracle --------------------------------------------------------------


def fk_oracle(A: GroundSet, k: int) -> ExtremalResult:
    """Scan all subsets by decreasing size (then increasing bitmask) and
    return the first one that contains no nontrivial k-AP."""
    n = len(A)
    if n > ORACLE_MAX:
        raise TooLarge(f"oracle limited to |A| <= {ORACLE_MAX}, got {n}")
    edges = np.array(_edge_masks(A, k), dtype=np.int64)
    if not len(edges):
        return _result(A, k, "oracle", range(n), True)
    total = 1 << n
    for level in range(n, -1, -1):
        for start in range(0, total, _ORACLE_BLOCK):
            masks = np.arange(start, min(total, start + _ORACLE_BLOCK), dtype=np.int64)
            masks = masks[np.bitwise_count(masks) == level]
            if not len(masks):
                continue
            bad = np.zeros(len(masks), dtype=bool)
            for e in edges:
                bad |= (masks & e) == e
            good = masks[~bad]
            if len(good):
                return _result(A, k, "oracle", _bits(int(good[0])), True)
    raise AssertionError("the empty set is always progression free")


# ---- branch and bound ----------------------------------------------------


class _Search:
    def __init__(self, V: int, edges: list[int], budget: int, tie: str):
        self.V = V
        self.edges = edges
        self.budget = budget
        self.tie = tie
        self.nodes = 0
        self.best = 0
        self.best_mask = 0

    def run(self, seed_mask: int = 0) -> None:
        if seed_mask:
            self.best, self.best_mask = seed_mask.bit_count(), seed_mask
        self._node(0, (1 << self.V) - 1)

    def _node(self, inc: int, und: int) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExhausted("node budget exhausted")
        # unit propagation: an edge with one undecided vertex left forces it out
        while True:
            live = []
            forced = 0
            allowed = inc | und
            for e in self.edges:
                if e & allowed == e:
                    r = e & und
                    if r == 0:
                        return
                    if r & (r - 1) == 0:
                        forced |= r
                    else:
                        live.append(r)
            if not forced:
                break
            und &= ~forced
        size_inc = inc.bit_count()
        if not live:
            total = size_inc + und.bit_count()
            if total > self.best:
                self.best, self.best_mask = total, inc | und
            return
        # greedy packing of vertex-disjoint residual edges: each costs >= 1 vertex
        live.sort(key=int.bit_count)
        used = 0
        packed = 0
        for r in live:
            if not r & used:
                used |= r
                packed += 1
        if size_inc + und.bit_count() - packed <= self.best:
            return
        deg = [0] * self.V
        for r in live:
            for v in _bits(r):
                deg[v] += 1
        top = max(deg)
        cands = [v for v in range(self.V) if deg[v] == top]
        v = cands[0] if self.tie == "smallest" else cands[-1]
        bit = 1 << v
        self._node(inc | bit, und & ~bit)
        self._node(inc, und & ~bit)


def fk_exact(A: GroundSet, k: int, budget: int = DEFAULT_BUDGET, tie: str = "smallest") -> ExtremalResult:
    """Maximum k-AP-free subset by branch-and-bound.

    Branches on the highest residual-degree vertex (include first); the upper
    bound subtracts a greedy packing of disjoint residual edges. On budget
    exhaustion raises BudgetExhausted carrying the incumbent.
    """
    if tie not in ("smallest", "largest"):
        raise ValueError("tie must be 'smallest' or 'largest'")
    V = len(A)
    search = _Search(V, _edge_masks(A, k), budget, tie)
    limit = max(sys.getrecursionlimit(), 4 * V + 100)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(limit)
    try:
        search.run()
    except BudgetExhausted as exc:
        inc = _result(A, k, "exact", _bits(search.best_mask), False, search.nodes)
        raise BudgetExhausted(str(exc), incumbent=inc) from None
    finally:
        sys.setrecursionlimit(old)
    return _result(A, k, "exact", _bits(search.best_mask), True, search.nodes)


def min_deletion(A: GroundSet, k: int, budget: int = DEFAULT_BUDGET) -> int:
    """Fewest deletions that leave A k-AP free (``|A| - f_k(A)``)."""
    return len(A) - fk_exact(A, k, budget).size


# ---- heuristic -----------------------------------------------------------


def _blockers(V: int, edges: list[int]) -> list[list[int]]:
    out: list[list[int]] = [[] for _ in range(V)]
    for e in edges:
        for v in _bits(e):
            out[v].append(e & ~(1 << v))
    return out


def _addable(v: int, S: int, blockers) -> bool:
    return all(o & S != o for o in blockers[v])


def _greedy_local(V: int, blockers, rng: np.random.Generator, max_rounds: int) -> int:
    S = 0
    for v in rng.permutation(V).tolist():
        if _addable(v, S, blockers):
            S |= 1 << v
    for _ in range(max_rounds):
        improved = False
        for u in rng.permutation(list(_bits(S))).tolist():
            T = S & ~(1 << u)
            added = 0
            for v in rng.permutation(V).tolist():
                if v != u and not (T >> v) & 1 and _addable(v, T, blockers):
                    T |= 1 << v
                    added += 1
            if added >= 2:
                S = T
                improved = True
                break
        if not improved:
            break
    return S


def fk_heuristic(A: GroundSet, k: int, iters: int = 100, seed: int = 0, threads: int = 1,
                 max_rounds: int = 50) -> ExtremalResult:
    """Best of ``iters`` randomised greedy runs, each polished by (1,2)-swaps.

    Restart r draws from the stream ``(seed, r)``; the winner is the largest
    set, ties to the lowest restart index, so the output does not depend on
    ``threads``.
    """
    V = len(A)
    blockers = _blockers(V, _edge_masks(A, k))

    def one(r: int) -> int:
        return _greedy_local(V, blockers, make_rng(seed, r), max_rounds)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(iters)))
    else:
        results = [one(r) for r in range(iters)]
    best = max(range(iters), key=lambda r: (results[r].bit_count(), -r)) if iters else None
    mask = results[best] if best is not None else 0
    return _result(A, k, "heuristic", _bits(mask), False)
