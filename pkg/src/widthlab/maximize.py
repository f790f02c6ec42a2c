"""Batched greedy maximization and exact reference optima.

Both greedy routines pick, at every step, a batch of at most ``d + 1`` fresh
items with the largest marginal gain. ``d`` is supplied by the caller (an
upper bound on the supermodular width); nothing here computes widths.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument, ResourceLimit
from .setfn import EPS_CMP, SetFunction, elements, popcount, popcounts

MAX_M_BRUTE_CONSTRAINED = 20
# 3**m * n table lookups in the submask DP
MAX_WELFARE_WORK = 10 ** 8


@dataclass
class GreedyStep:
    batch: int
    gain: float
    agent: Optional[int] = None

    def to_dict(self) -> dict:
        out = {"batch": elements(self.batch), "gain": self.gain}
        if self.agent is not None:
            out["agent"] = self.agent
        return out


@dataclass
class GreedyTrace:
    steps: list[GreedyStep] = field(default_factory=list)
    value: float = 0.0
    queries: int = 0

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps], "value": self.value,
                "queries": self.queries}


@dataclass
class Allocation:
    """Disjoint bundles, one per agent."""

    parts: list[int]
    welfare: float

    def __post_init__(self):
        seen = 0
        for p in self.parts:
            if p & seen:
                raise InvalidArgument("allocation parts overlap")
            seen |= p

    def to_dict(self) -> dict:
        return {"parts": [elements(p) for p in self.parts], "welfare": self.welfare}


def _batches(free: Sequence[int], s: int):
    """Every nonempty subset of ``free`` with at most ``s`` items, as masks."""
    for size in range(1, s + 1):
        for combo in combinations(free, size):
            mask = 0
            for i in combo:
                mask |= 1 << i
            yield mask


def _pick(cands: list[int], gains: list[float], eps: float) -> tuple[int, float]:
    """Largest gain; gains within ``eps`` of the best tie and go to the smallest mask."""
    top = max(gains)
    best = min(c for c, g in zip(cands, gains) if g >= top - eps)
    return best, gains[cands.index(best)]


def batch_candidates(m: int, free_count: int, s: int) -> int:
    """Number of candidate batches in one step."""
    return sum(comb(free_count, j) for j in range(1, s + 1))


def batched_greedy_constrained(f: SetFunction, k: int, d: int,
                               eps: float = EPS_CMP) -> tuple[int, GreedyTrace]:
    """Grow ``S`` by the best batch of ``<= min(d+1, k-|S|)`` new items until ``|S| = k``.

    Costs one query for ``f(S)`` per step plus one per candidate batch.
    """
    m = f.m
    if not 1 <= k <= m:
        raise InvalidArgument(f"k must be in [1, {m}], got {k}")
    if d < 0:
        raise InvalidArgument("d must be nonnegative")
    start = f.query_count
    trace = GreedyTrace()
    S = 0
    while popcount(S) < k:
        s = min(d + 1, k - popcount(S))
        base = f.eval(S)
        free = [i for i in range(m) if not (S >> i) & 1]
        cands = list(_batches(free, s))
        gains = [f.eval(S | T) - base for T in cands]
        T, gain = _pick(cands, gains, eps)
        trace.steps.append(GreedyStep(T, gain))
        S |= T
    trace.value = f.eval(S)
    trace.queries = f.query_count - start
    return S, trace


def brute_force_constrained(f: SetFunction, k: int) -> tuple[int, float]:
    """Exact best set of size at most ``k``; ties go to the smallest mask."""
    m = f.m
    if not 0 <= k <= m:
        raise InvalidArgument(f"k must be in [0, {m}], got {k}")
    if m > MAX_M_BRUTE_CONSTRAINED:
        raise ResourceLimit(f"brute_force_constrained is limited to m <= {MAX_M_BRUTE_CONSTRAINED}")
    t = f.table()
    ok = np.flatnonzero(popcounts(m) <= k)
    vals = t[ok]
    i = int(np.argmax(vals))          # first maximum = smallest mask
    return int(ok[i]), float(vals[i])


def batched_greedy_welfare(fs: Sequence[SetFunction], d: int,
                           eps: float = EPS_CMP) -> tuple[Allocation, GreedyTrace]:
    """Hand out batches of ``<= min(d+1, remaining)`` items to the agent gaining most.

    Ties go to the smaller agent index, then the smaller batch mask. Runs until
    every item is assigned.
    """
    if not fs:
        raise InvalidArgument("need at least one agent")
    m = fs[0].m
    if any(f.m != m for f in fs):
        raise InvalidArgument("all valuations must share the ground set")
    if d < 0:
        raise InvalidArgument("d must be nonnegative")
    starts = [f.query_count for f in fs]
    parts = [0] * len(fs)
    assigned = 0
    trace = GreedyTrace()
    while assigned != (1 << m) - 1:
        free = [i for i in range(m) if not (assigned >> i) & 1]
        s = min(d + 1, len(free))
        cands = list(_batches(free, s))
        best = None
        for j, f in enumerate(fs):
            base = f.eval(parts[j])
            gains = [f.eval(parts[j] | T) - base for T in cands]
            T, gain = _pick(cands, gains, eps)
            if best is None or gain > best[2] + eps:
                best = (j, T, gain)
        j, T, gain = best
        trace.steps.append(GreedyStep(T, gain, agent=j))
        parts[j] |= T
        assigned |= T
    welfare = sum(f.eval(p) for f, p in zip(fs, parts))
    trace.value = welfare
    trace.queries = sum(f.query_count - s0 for f, s0 in zip(fs, starts))
    return Allocation(parts, welfare), trace


def _pairs(m: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``(U, A)`` with ``A`` a submask of ``U``."""
    U = np.zeros(1, dtype=np.int64)
    A = np.zeros(1, dtype=np.int64)
    for i in range(m):
        bit = 1 << i
        U = np.concatenate([U, U | bit, U | bit])
        A = np.concatenate([A, A, A | bit])
    return U, A


def brute_force_welfare(fs: Sequence[SetFunction]) -> tuple[Allocation, float]:
    """Exact welfare optimum by dynamic programming over submasks.

    ``W_j(U)`` is the best value of giving items of ``U`` to agents ``0..j``;
    unassigned items are allowed, so monotonicity is not needed.
    """
    if not fs:
        raise InvalidArgument("need at least one agent")
    m = fs[0].m
    if any(f.m != m for f in fs):
        raise InvalidArgument("all valuations must share the ground set")
    if len(fs) * 3 ** m > MAX_WELFARE_WORK:
        raise ResourceLimit(f"welfare brute force needs n * 3**m <= {MAX_WELFARE_WORK}")
    U, A = _pairs(m)
    size = 1 << m
    W = np.zeros(size)
    choice = []
    for f in fs:
        t = f.table()
        val = W[U ^ A] + t[A]
        order = np.lexsort((A, -val, U))
        first = order[np.r_[True, U[order][1:] != U[order][:-1]]]
        W = np.empty(size)
        W[U[first]] = val[first]
        pick = np.empty(size, dtype=np.int64)
        pick[U[first]] = A[first]
        choice.append(pick)
    rest = (1 << m) - 1
    parts = [0] * len(fs)
    for j in range(len(fs) - 1, -1, -1):
        parts[j] = int(choice[j][rest])
        rest ^= parts[j]
    welfare = float(W[-1])
    return Allocation(parts, welfare), welfare


__all__ = [
    "GreedyStep", "GreedyTrace", "Allocation", "batch_candidates",
    "batched_greedy_constrained", "brute_force_constrained",
    "batched_greedy_welfare", "brute_force_welfare",
]
