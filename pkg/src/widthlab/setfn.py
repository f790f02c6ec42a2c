"""Set functions over a small ground set, addressed by integer bitmasks.

A subset ``S`` of ``X = {0, ..., m-1}`` is the integer whose bit ``i`` is set
iff ``i in S``. Every representation implements the same value-oracle
contract: :meth:`SetFunction.eval` returns ``f(S)`` and bumps a query counter.
Bulk work (width computation, brute force, auctions) instead reads the whole
table through :meth:`SetFunction.table`, which is not counted.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidArgument, ResourceLimit

MAX_M = 24
EPS_CMP = 1e-9


# --------------------------------------------------------------------------
# bitmask helpers
# --------------------------------------------------------------------------

def mask_of(items: Iterable[int]) -> int:
    mask = 0
    for i in items:
        mask |= 1 << int(i)
    return mask


def elements(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return int(mask).bit_count()


@lru_cache(maxsize=None)
def popcounts(m: int) -> np.ndarray:
    """Cardinality of every mask in ``range(2**m)`` (read-only array)."""
    masks = np.arange(1 << m, dtype=np.int64)
    pc = np.zeros(1 << m, dtype=np.int64)
    for i in range(m):
        pc += (masks >> i) & 1
    pc.setflags(write=False)
    return pc


@lru_cache(maxsize=None)
def all_masks(m: int) -> np.ndarray:
    masks = np.arange(1 << m, dtype=np.int64)
    masks.setflags(write=False)
    return masks


def cube(values: np.ndarray, m: int) -> np.ndarray:
    """View a length-``2**m`` table as an m-dimensional 2x...x2 array.

    Bit ``i`` of the mask corresponds to axis ``m - 1 - i`` (C order).
    """
    return values.reshape((2,) * m) if m else values


def axis_of(bit: int, m: int) -> int:
    return m - 1 - bit


def _side(axis: int, side: int) -> tuple:
    return (slice(None),) * axis + (side,)


def zeta(weights: np.ndarray, m: int) -> np.ndarray:
    """Subset-sum transform: ``out[S] = sum(weights[T] for T subset of S)``."""
    out = np.array(weights, dtype=float, copy=True)
    c = cube(out, m)
    for ax in range(m):
        c[_side(ax, 1)] += c[_side(ax, 0)]
    return out


def mobius(values: np.ndarray, m: int) -> np.ndarray:
    """Inverse of :func:`zeta` (inclusion-exclusion over subsets)."""
    out = np.array(values, dtype=float, copy=True)
    c = cube(out, m)
    for ax in range(m):
        c[_side(ax, 1)] -= c[_side(ax, 0)]
    return out


# --------------------------------------------------------------------------
# ground set and oracle contract
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GroundSet:
    """Items ``0..m-1``. ``limit`` is raised only for formula-backed oracles."""

    m: int
    limit: int = MAX_M

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or not 1 <= self.m <= self.limit:
            raise InvalidArgument(f"ground set size must be in [1, {self.limit}], got {self.m!r}")

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    def check(self, mask: int) -> int:
        mask = int(mask)
        if mask < 0 or mask >> self.m:
            raise InvalidArgument(f"mask {mask:#x} is not a subset of a {self.m}-element ground set")
        return mask


class SetFunction:
    """Value oracle over ``2**m`` subsets.

    Subclasses implement ``_value``; callers use :meth:`eval`, which validates
    the mask and counts the query. The counter is lock-protected so one
    instance can be shared across threads.
    """

    kind = "abstract"

    def __init__(self, m: int, limit: int = MAX_M):
        self.ground = GroundSet(m, limit)
        self._queries = 0
        self._lock = threading.Lock()
        self._table: np.ndarray | None = None

    @property
    def m(self) -> int:
        return self.ground.m

    @property
    def full(self) -> int:
        return self.ground.full

    @property
    def query_count(self) -> int:
        return self._queries

    def reset_queries(self) -> None:
        with self._lock:
            self._queries = 0

    def eval(self, mask: int) -> float:
        mask = self.ground.check(mask)
        with self._lock:
            self._queries += 1
        return float(self._value(mask))

    __call__ = eval

    def _value(self, mask: int) -> float:
        raise NotImplementedError

    def _compute_table(self) -> np.ndarray:
        return np.array([self._value(s) for s in range(1 << self.m)], dtype=float)

    def table(self) -> np.ndarray:
        """All ``2**m`` values as a read-only float array (not counted as queries)."""
        if self._table is None:
            if self.m > MAX_M:
                raise ResourceLimit(f"cannot tabulate 2**{self.m} values (limit m <= {MAX_M})")
            t = np.asarray(self._compute_table(), dtype=float)
            t.setflags(write=False)
            self._table = t
        return self._table

    def __repr__(self) -> str:
        return f"{type(self).__name__}(m={self.m})"


class ExplicitFunction(SetFunction):
    """A full value table indexed by mask."""

    kind = "explicit"

    def __init__(self, table: Sequence[float] | np.ndarray, monotone: bool = False,
                 eps: float = EPS_CMP):
        values = np.asarray(table, dtype=float).ravel()
        n = values.size
        if n < 2 or n & (n - 1):
            raise InvalidArgument(f"table length {n} is not a power of two >= 2")
        super().__init__(n.bit_length() - 1)
        if not np.all(np.isfinite(values)):
            raise InvalidArgument("table contains non-finite values")
        if abs(values[0]) > eps:
            raise InvalidArgument(f"table[0] must be 0 (normalized), got {values[0]}")
        if values.min() < -eps:
            raise InvalidArgument("set function values must be nonnegative")
        values = values.copy()
        values[0] = 0.0
        values.setflags(write=False)
        self._table = values
        if monotone and not is_monotone(self, eps):
            raise InvalidArgument("table flagged monotone but violates monotonicity")

    def _value(self, mask: int) -> float:
        return self._table[mask]

    def _compute_table(self) -> np.ndarray:
        return self._table


class HypergraphFunction(SetFunction):
    """``f(S) = sum of h(T) over hyperedges T contained in S``."""

    kind = "hypergraph"

    def __init__(self, m: int, weights: Mapping[int, float]):
        super().__init__(m)
        clean: dict[int, float] = {}
        for edge, w in weights.items():
            edge = self.ground.check(edge)
            if edge == 0:
                raise InvalidArgument("hypergraph weights may not include the empty set")
            w = float(w)
            if not np.isfinite(w):
                raise InvalidArgument("hyperedge weight must be finite")
            if w != 0.0:
                clean[edge] = clean.get(edge, 0.0) + w
        self.weights = dict(sorted(clean.items()))

    def _value(self, mask: int) -> float:
        return sum(w for e, w in self.weights.items() if e & mask == e)

    def _compute_table(self) -> np.ndarray:
        dense = np.zeros(1 << self.m)
        for e, w in self.weights.items():
            dense[e] += w
        return zeta(dense, self.m)


class SymmetricFunction(SetFunction):
    """Value depends only on ``|S|``: ``f(S) = levels[|S|]``."""

    kind = "symmetric"

    def __init__(self, m: int, levels: Sequence[float], monotone: bool = False):
        super().__init__(m)
        levels = [float(x) for x in levels]
        if len(levels) != m + 1:
            raise InvalidArgument(f"need m+1 = {m + 1} levels, got {len(levels)}")
        if levels[0] != 0.0:
            raise InvalidArgument("levels[0] must be 0")
        if min(levels) < 0:
            raise InvalidArgument("levels must be nonnegative")
        if monotone and any(b < a for a, b in zip(levels, levels[1:])):
            raise InvalidArgument("levels flagged monotone but decrease somewhere")
        self.levels = tuple(levels)

    def _value(self, mask: int) -> float:
        return self.levels[popcount(mask)]

    def _compute_table(self) -> np.ndarray:
        return np.asarray(self.levels)[popcounts(self.m)]


class CHFunction(SetFunction):
    """Constraint-homogeneous function: ``base * sum(|Q| for blocks Q inside S)``."""

    kind = "ch"

    def __init__(self, m: int, base: float, blocks: Iterable[int], block_bound: int):
        super().__init__(m)
        base = float(base)
        if base < 0 or not np.isfinite(base):
            raise InvalidArgument("CH base value must be a finite nonnegative number")
        blocks = [self.ground.check(q) for q in blocks]
        seen = 0
        for q in blocks:
            if q == 0:
                raise InvalidArgument("CH blocks must be nonempty")
            if q & seen:
                raise InvalidArgument("CH blocks must be pairwise disjoint")
            if popcount(q) > block_bound:
                raise InvalidArgument(f"block {elements(q)} exceeds bound {block_bound}")
            seen |= q
        self.base = base
        self.blocks = tuple(blocks)
        self.block_bound = int(block_bound)

    def _value(self, mask: int) -> float:
        return self.base * sum(popcount(q) for q in self.blocks if q & mask == q)

    def _compute_table(self) -> np.ndarray:
        masks = all_masks(self.m)
        out = np.zeros(1 << self.m)
        for q in self.blocks:
            out += np.where(masks & q == q, self.base * popcount(q), 0.0)
        return out


class MaxFunction(SetFunction):
    """Pointwise maximum of component functions over a common ground set."""

    kind = "max"

    def __init__(self, components: Sequence[SetFunction]):
        components = list(components)
        if not components:
            raise InvalidArgument("MaxFunction needs at least one component")
        m = components[0].m
        if any(c.m != m for c in components):
            raise InvalidArgument("components must share one ground set")
        super().__init__(m)
        self.components = tuple(components)

    def _value(self, mask: int) -> float:
        return max(c._value(mask) for c in self.components)

    def _compute_table(self) -> np.ndarray:
        return np.max(np.stack([c.table() for c in self.components]), axis=0)


def zero_function(m: int) -> HypergraphFunction:
    return HypergraphFunction(m, {})


def additive(values: Sequence[float]) -> HypergraphFunction:
    return HypergraphFunction(len(values), {1 << i: v for i, v in enumerate(values)})


def single_minded(m: int, bundle: int, value: float = 1.0) -> HypergraphFunction:
    """``f(S) = value * [bundle is contained in S]``."""
    return HypergraphFunction(m, {bundle: value})


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def margin(f: SetFunction, s: int, t: int) -> float:
    """``f(S | T) = f(S u T) - f(T)`` using exactly two oracle queries."""
    return f.eval(int(s) | int(t)) - f.eval(t)


def mobius_transform(f: SetFunction) -> HypergraphFunction:
    """Hypergraph (Moebius) representation ``h`` with ``f(S) = sum_{T <= S} h(T)``."""
    h = mobius(f.table(), f.m)
    return HypergraphFunction(f.m, {e: h[e] for e in np.flatnonzero(h) if e})


def is_normalized(f: SetFunction, eps: float = EPS_CMP) -> bool:
    return abs(f.table()[0]) <= eps


def is_monotone(f: SetFunction, eps: float = EPS_CMP) -> bool:
    """Adjacent-element check ``f(S + v) >= f(S)`` for every S and v."""
    c = cube(f.table(), f.m)
    return all(np.all(c[_side(ax, 1)] >= c[_side(ax, 0)] - eps) for ax in range(f.m))


def is_submodular(f: SetFunction, eps: float = EPS_CMP) -> bool:
    """Local condition ``f(v | S + u) <= f(v | S)`` for all S and u != v."""
    m = f.m
    if m > 20:
        raise ResourceLimit("is_submodular is limited to m <= 20")
    c = cube(f.table(), m)
    for a in range(m):
        for b in range(a + 1, m):
            def at(x, y):
                idx = [slice(None)] * m
                idx[a], idx[b] = x, y
                return c[tuple(idx)]
            second = at(1, 1) - at(1, 0) - at(0, 1) + at(0, 0)
            if np.any(second > eps):
                return False
    return True


def is_subadditive(f: SetFunction, eps: float = EPS_CMP) -> bool:
    """``f(S u T) <= f(S) + f(T)`` for every disjoint pair."""
    m = f.m
    if m > 14:
        raise ResourceLimit("is_subadditive is limited to m <= 14")
    t = f.table()
    masks = all_masks(m)
    for s in range(1, 1 << m):
        others = masks[(masks & s) == 0]
        others = others[others > s]
        if others.size and np.any(t[others | s] > t[s] + t[others] + eps):
            return False
    return True
