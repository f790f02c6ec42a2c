"""Pointwise approximation of complement-bounded functions by CH functions.

A CH function puts a uniform per-item value on disjoint small blocks and
pays for a block only when all of it is present. Given ``f`` and a target
set ``S``, we partition ``S`` greedily into heavy blocks, then look for a
union ``U`` of blocks and a base value such that the CH function on ``U``
stays below ``f`` everywhere while recovering a large share of ``f(S)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InternalError, InvalidArgument, ResourceLimit
from .setfn import (EPS_CMP, CHFunction, SetFunction, all_masks, elements,
                    popcount, popcounts)

MAX_M_PARTITION = 14
MAX_M_VERIFY = 16
MAX_M_SEARCH = 12

MODES = ("saw", "smw")


def harmonic(i: int) -> float:
    if not isinstance(i, (int, np.integer)) or i < 1:
        raise InvalidArgument(f"harmonic index must be a positive integer, got {i!r}")
    return math.fsum(1.0 / k for k in range(1, int(i) + 1))


def block_bound(d: int, mode: str) -> int:
    if mode == "saw":
        if d < 1:
            raise InvalidArgument("saw mode needs d >= 1 (use d = max(saw, 1))")
        return 2 * d
    if mode == "smw":
        if d < 0:
            raise InvalidArgument("d must be nonnegative")
        return d + 1
    raise InvalidArgument(f"unknown mode {mode!r}; expected one of {MODES}")


def guarantee(d: int, size: int, mode: str) -> float:
    """``2 H(ceil(size/2d))`` for saw, ``(d+1) H(ceil(size/(d+1)))`` for smw; 1 for empty targets."""
    b = block_bound(d, mode)
    if size == 0:
        return 1.0
    factor = 2 if mode == "saw" else d + 1
    return factor * harmonic(math.ceil(size / b))


@dataclass
class BlockPartition:
    """Greedy partition of ``ground`` into blocks of at most ``bound`` items."""

    blocks: list[int]
    bound: int
    values: list[float]
    ground: int

    def union(self, which: int) -> int:
        """Items covered by the blocks selected by the bits of ``which``."""
        out = 0
        for i, q in enumerate(self.blocks):
            if (which >> i) & 1:
                out |= q
        return out

    def is_aligned(self, mask: int) -> bool:
        return all(q & mask in (0, q) for q in self.blocks) and mask & ~self.ground == 0


def greedy_partition(f: SetFunction, bound: int, ground: Optional[int] = None,
                     eps: float = EPS_CMP) -> BlockPartition:
    """Repeatedly take the most valuable block of at most ``bound`` unused items.

    Ties prefer the larger block, then the smaller mask, so that a flat
    stretch of a monotone ``f`` still yields full-size blocks.
    """
    if f.m > MAX_M_PARTITION:
        raise ResourceLimit(f"greedy_partition is limited to m <= {MAX_M_PARTITION}")
    if bound < 1:
        raise InvalidArgument("block bound must be >= 1")
    ground = f.full if ground is None else f.ground.check(ground)
    t = f.table()
    pc = popcounts(f.m)
    masks = all_masks(f.m)
    blocks, values = [], []
    left = ground
    while left:
        cand = masks[((masks & ~left) == 0) & (pc <= bound) & (masks != 0)]
        vals = t[cand]
        near = cand[vals >= vals.max() - eps]
        sizes = pc[near]
        q = int(near[sizes == sizes.max()].min())
        blocks.append(q)
        values.append(float(t[q]))
        left &= ~q
    return BlockPartition(blocks, bound, values, ground)


def ch_candidate(f: SetFunction, partition: BlockPartition, union_mask: int,
                 beta: float) -> CHFunction:
    """CH function on the blocks inside ``union_mask`` with base ``f(ground)/(beta |union|)``."""
    if beta <= 0:
        raise InvalidArgument("beta must be positive")
    if union_mask == 0:
        raise InvalidArgument("block union is empty")
    if not partition.is_aligned(union_mask):
        raise InvalidArgument(f"{elements(union_mask)} is not a union of partition blocks")
    chosen = [q for q in partition.blocks if q & union_mask]
    base = f.eval(partition.ground) / (beta * popcount(union_mask))
    return CHFunction(f.m, base, chosen, partition.bound)


def verify_pointwise(f: SetFunction, g: SetFunction, S: int, beta: float,
                     eps: float = EPS_CMP) -> bool:
    """``beta g(S) >= f(S)`` and ``g <= f`` on every subset."""
    if f.m > MAX_M_VERIFY:
        raise ResourceLimit(f"verify_pointwise is limited to m <= {MAX_M_VERIFY}")
    if g.m != f.m:
        raise InvalidArgument("functions live on different ground sets")
    S = f.ground.check(S)
    tf, tg = f.table(), g.table()
    return bool(beta * tg[S] >= tf[S] - eps and np.all(tg <= tf + eps))


@dataclass
class PointwiseCertificate:
    target: int
    approximator: CHFunction
    beta: float
    guarantee: float
    verified: bool
    mode: str = "saw"
    partition: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        g = self.approximator
        return {
            "target": elements(self.target),
            "beta": self.beta,
            "guarantee": self.guarantee,
            "verified": self.verified,
            "mode": self.mode,
            "partition": [elements(q) for q in self.partition],
            "ch": {"base": g.base, "blocks": [elements(q) for q in g.blocks], "d": g.block_bound},
        }


def _best_union(f: SetFunction, part: BlockPartition, eps: float) -> tuple[int, float, float]:
    """Over every nonempty block union ``U``: the smallest ``beta`` reachable, with its base.

    For a fixed ``U`` the largest safe base is ``min_T f(T) / c_U(T)`` where
    ``c_U(T)`` counts the items of fully contained blocks of ``U``; the
    matching ``beta`` is ``f(S) / (base |U|)``. Returns ``(which, beta, base)``.
    """
    t = f.table()
    masks = all_masks(f.m)
    h = len(part.blocks)
    sizes = np.array([popcount(q) for q in part.blocks], dtype=float)
    contains = np.stack([(masks & q) == q for q in part.blocks], axis=1) * sizes  # [T, block]
    fS = float(t[part.ground])
    best = None
    which = np.arange(1, 1 << h, dtype=np.int64)
    step = max(1, (1 << 22) // masks.size)
    for i in range(0, which.size, step):
        w = which[i:i + step]
        sel = ((w[None, :] >> np.arange(h)[:, None]) & 1).astype(float)    # [block, U]
        count = contains @ sel                                              # [T, U]
        usize = sizes @ sel
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(count > 0, t[:, None] / count, np.inf)
        base = ratio.min(axis=0)
        with np.errstate(divide="ignore"):
            beta = np.where(base > 0, fS / (base * usize), np.inf)
        j = int(np.argmin(beta))       # smallest beta, first (smallest U) on ties
        if best is None or beta[j] < best[1] - eps:
            best = (int(w[j]), float(beta[j]), float(base[j]))
    return best


def find_pointwise_approximator(f: SetFunction, d: int, S: Optional[int] = None,
                                mode: str = "saw", certify: bool = True,
                                eps: float = EPS_CMP) -> PointwiseCertificate:
    """Search the block-union family for a CH approximator of ``f`` at ``S``.

    The partition is built on ``S`` alone (``f`` restricted to subsets of
    ``S``); blocks never leave ``S``, so the approximator vanishes outside.
    The returned ``beta`` is the best one found; ``verified`` says whether it
    is within the guarantee and re-passes :func:`verify_pointwise`.

    With ``certify`` on, a miss on a function whose width was checked to be at
    most ``d`` (and, in smw mode, that is superadditive) raises
    :class:`InternalError`: the family is supposed to contain an answer then.
    """
    if f.m > MAX_M_SEARCH:
        raise ResourceLimit(f"find_pointwise_approximator is limited to m <= {MAX_M_SEARCH}")
    S = f.full if S is None else f.ground.check(S)
    bound = block_bound(d, mode)
    promise = guarantee(d, popcount(S), mode)
    fS = f.eval(S)
    if S == 0 or fS <= eps:
        zero = CHFunction(f.m, 0.0, [], bound)
        return PointwiseCertificate(S, zero, 1.0, promise, verify_pointwise(f, zero, S, 1.0, eps),
                                    mode, [])
    part = greedy_partition(f, bound, ground=S, eps=eps)
    which, beta, base = _best_union(f, part, eps)
    blocks = [q for i, q in enumerate(part.blocks) if (which >> i) & 1]
    g = CHFunction(f.m, base, blocks, bound)
    ok = beta <= promise + eps and verify_pointwise(f, g, S, beta, eps)
    cert = PointwiseCertificate(S, g, beta, promise, ok, mode, part.blocks)
    if certify and not ok and _in_class(f, d, mode):
        raise InternalError(
            f"no CH approximator within {promise:.6f} at S={elements(S)} (best {beta:.6f})")
    return cert


def _in_class(f: SetFunction, d: int, mode: str) -> bool:
    from .widths import MAX_M_WIDTH, superadditive_width, supermodular_width
    if f.m > MAX_M_WIDTH:
        return False
    if mode == "saw":
        return superadditive_width(f) <= d
    return supermodular_width(f) <= d and is_superadditive(f)


def is_superadditive(f: SetFunction, eps: float = EPS_CMP) -> bool:
    """``f(S u T) >= f(S) + f(T)`` for all disjoint ``S, T``."""
    if f.m > MAX_M_SEARCH:
        raise ResourceLimit(f"is_superadditive is limited to m <= {MAX_M_SEARCH}")
    t = f.table()
    masks = all_masks(f.m)
    for S in masks[1:]:
        T = masks[(masks & S) == 0]
        if np.any(t[S | T] < t[S] + t[T] - eps):
            return False
    return True


__all__ = [
    "MODES", "harmonic", "block_bound", "guarantee", "BlockPartition", "greedy_partition",
    "ch_candidate", "verify_pointwise", "PointwiseCertificate",
    "find_pointwise_approximator", "is_superadditive",
]
