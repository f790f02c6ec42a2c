"""Named set functions: separation examples, lower-bound families, auction
instances and seeded random corpora.

Item indices are 0-based throughout; an item called ``i`` in 1-based notation
is index ``i - 1`` here.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument
from .setfn import (ExplicitFunction, HypergraphFunction, SetFunction,
                    SymmetricFunction, all_masks, mask_of, popcount, popcounts,
                    zeta)

# --------------------------------------------------------------------------
# separation fixtures
# --------------------------------------------------------------------------


def threshold_any_two(m: int) -> SymmetricFunction:
    """Value 1 for any set of two or more items, 0 otherwise."""
    if m < 2:
        raise InvalidArgument("threshold_any_two needs m >= 2")
    return SymmetricFunction(m, [0.0, 0.0] + [1.0] * (m - 1), monotone=True)


def pair_matching(t: int) -> HypergraphFunction:
    """Over m = 2t items: one unit hyperedge ``{i, i + t}`` for each i < t."""
    if t < 1:
        raise InvalidArgument("pair_matching needs t >= 1")
    return HypergraphFunction(2 * t, {(1 << i) | (1 << (i + t)): 1.0 for i in range(t)})


def symmetric_two_level(m: int) -> SymmetricFunction:
    """0 on the empty set, 2 on the full set, 1 everywhere else."""
    if m < 2:
        raise InvalidArgument("symmetric_two_level needs m >= 2")
    return SymmetricFunction(m, [0.0] + [1.0] * (m - 1) + [2.0], monotone=True)


def all_pairs(m: int) -> HypergraphFunction:
    """Unit weight on every pair, so ``f(S) = C(|S|, 2)``."""
    if m < 2:
        raise InvalidArgument("all_pairs needs m >= 2")
    return HypergraphFunction(m, {(1 << u) | (1 << v): 1.0 for u, v in combinations(range(m), 2)})


# --------------------------------------------------------------------------
# lower-bound families
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class HardCMParams:
    d: int
    c1: int
    c2: int
    m: int
    R: int

    @property
    def D(self) -> int:
        return self.d + 1

    @property
    def r(self) -> int:
        return self.c1 * self.D + 1

    @property
    def k(self) -> int:
        """Cardinality budget at which the gap is exhibited."""
        return (self.c1 + self.c2) * self.D

    def validate(self) -> None:
        if self.d < 0 or self.c1 < 1 or self.c2 < 1:
            raise InvalidArgument("need d >= 0 and c1, c2 >= 1")
        if self.r > self.m:
            raise InvalidArgument(f"|R| = c1*D + 1 = {self.r} exceeds m = {self.m}")
        if self.R < 0 or self.R >> self.m or popcount(self.R) != self.r:
            raise InvalidArgument(f"R must be a subset of size {self.r}")

    @classmethod
    def make(cls, d: int, c1: int, c2: int, m: Optional[int] = None,
             R: Optional[Sequence[int]] = None) -> "HardCMParams":
        """Default ``m`` is the smallest size where every branch is reachable;
        default ``R`` is the top ``r`` indices, which smallest-mask tie-breaking
        never reaches first."""
        D = d + 1
        r = c1 * D + 1
        if m is None:
            m = max(r, (c1 + c2) * D + c2 * (D - 1) + 1)
        if m < r:
            raise InvalidArgument(f"|R| = c1*D + 1 = {r} exceeds m = {m}")
        R_mask = mask_of(R) if R is not None else mask_of(range(m - r, m))
        p = cls(d, c1, c2, m, R_mask)
        p.validate()
        return p


# formula-backed oracles are never tabulated, so masks may exceed MAX_M bits
MAX_M_ORACLE = 62


class _TwoClassFunction(SetFunction):
    """Value depends only on ``|S n R|`` and ``|S - R|``."""

    def __init__(self, m: int, R: int):
        super().__init__(m, limit=MAX_M_ORACLE)
        self.R = R
        self.r = popcount(R)

    def value_by_size(self, size: int, contains_r: bool) -> float:
        raise NotImplementedError

    def _value(self, mask: int) -> float:
        return self.value_by_size(popcount(mask), mask & self.R == self.R)

    def class_table(self) -> np.ndarray:
        """``out[a, b]`` = value of any set with ``a`` items in R and ``b`` outside."""
        out = np.zeros((self.r + 1, self.m - self.r + 1))
        for a in range(self.r + 1):
            for b in range(self.m - self.r + 1):
                out[a, b] = self.value_by_size(a + b, a == self.r)
        return out

    def _compute_table(self) -> np.ndarray:
        masks = all_masks(self.m)
        inside = (masks & self.R) == self.R
        sizes = popcounts(self.m)
        lut = np.array([[self.value_by_size(s, c) for c in (False, True)]
                        for s in range(self.m + 1)])
        return lut[sizes, inside.astype(int)]


class HardCMFunction(_TwoClassFunction):
    """Six-branch function of ``|S|`` and ``[R <= S]`` used for the constrained lower bound."""

    kind = "hard-cm"

    def __init__(self, params: HardCMParams):
        params.validate()
        super().__init__(params.m, params.R)
        self.params = params

    def value_by_size(self, s: int, contains_r: bool) -> float:
        p = self.params
        D, c1, c2 = p.D, p.c1, p.c2
        if s <= c1 * D:
            return float(s // D)
        if s <= (c1 + c2) * D:
            return float(s - c1 * (D - 1)) if contains_r else float((s - c1 * D) // D + c1)
        if s <= (c1 + c2) * D + c2 * (D - 1):
            return float(c1 + c2 * D) if contains_r else float(s - (c1 + c2) * (D - 1))
        return float(c1 + c2 * D)


def hard_cm_instance(params: HardCMParams) -> HardCMFunction:
    return HardCMFunction(params)


def hard_cm_best(params: HardCMParams, size: int, contains_r: bool) -> float:
    """Value of any set with ``size`` items and the given R-containment (-inf if none exists)."""
    feasible = size >= params.r if contains_r else size <= params.m - 1
    if not 0 <= size <= params.m or not feasible:
        return float("-inf")
    return HardCMFunction(params).value_by_size(size, contains_r)


@dataclass(frozen=True)
class HardWMParams:
    d: int
    c1: int
    c2: int
    n: int
    R: tuple[int, ...]

    @property
    def D(self) -> int:
        return self.d + 1

    @property
    def r(self) -> int:
        return self.c1 * self.D + 1

    @property
    def s(self) -> int:
        return (self.c1 + self.c2) * self.D

    @property
    def m(self) -> int:
        return self.n * self.s

    def validate(self) -> None:
        if self.d < 0 or self.c1 < 1 or self.c2 < 1 or self.n < 1:
            raise InvalidArgument("need d >= 0, c1, c2 >= 1 and n >= 1")
        if len(self.R) != self.n:
            raise InvalidArgument("need one special set per agent")
        seen = 0
        for Ri in self.R:
            if Ri < 0 or Ri >> self.m or popcount(Ri) != self.r:
                raise InvalidArgument(f"each R_i must be a subset of size {self.r}")
            if Ri & seen:
                raise InvalidArgument("special sets must be pairwise disjoint")
            seen |= Ri

    @classmethod
    def make(cls, d: int, c1: int, c2: int, n: int,
             R: Optional[Sequence[Sequence[int]]] = None) -> "HardWMParams":
        D = d + 1
        r = c1 * D + 1
        m = n * (c1 + c2) * D
        if R is None:
            masks = tuple(mask_of(range(m - (i + 1) * r, m - i * r)) for i in range(n))
        else:
            masks = tuple(mask_of(x) for x in R)
        p = cls(d, c1, c2, n, masks)
        p.validate()
        return p


class HardWMFunction(_TwoClassFunction):
    """Four-branch function used for the welfare lower bound (one per agent)."""

    kind = "hard-wm"

    def __init__(self, d: int, c1: int, c2: int, m: int, R: int):
        super().__init__(m, R)
        self.d, self.c1, self.c2 = d, c1, c2
        if popcount(R) != c1 * (d + 1) + 1:
            raise InvalidArgument("|R| must equal c1*D + 1")

    def value_by_size(self, s: int, contains_r: bool) -> float:
        D, c1, c2 = self.d + 1, self.c1, self.c2
        if not contains_r:
            return float(s // D) if s <= c1 * D + c2 * D * D - 1 else float(c1 + c2 * D)
        if s <= (c1 + c2) * D - 1:
            return float(s - c1 * (D - 1))
        return float(c1 + c2 * D)


def hard_wm_instance(params: HardWMParams) -> list[HardWMFunction]:
    params.validate()
    return [HardWMFunction(params.d, params.c1, params.c2, params.m, Ri) for Ri in params.R]


# --------------------------------------------------------------------------
# auction instances
# --------------------------------------------------------------------------


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


def _normalized_triples(q: int) -> list[tuple[int, int, int]]:
    pts = [(1, a, b) for a in range(q) for b in range(q)]
    pts += [(0, 1, a) for a in range(q)]
    pts.append((0, 0, 1))
    return pts


@dataclass(frozen=True)
class ProjectivePlane:
    q: int
    points: tuple[tuple[int, int, int], ...]
    lines: tuple[int, ...]          # each line as a mask over point indices

    @property
    def m(self) -> int:
        return len(self.points)

    def valuations(self) -> list[HypergraphFunction]:
        """Single-minded players: player i values 1 exactly the supersets of line i."""
        return [HypergraphFunction(self.m, {line: 1.0}) for line in self.lines]

    def max_disjoint_lines(self) -> int:
        """Largest family of pairwise-disjoint lines (exhaustive)."""
        best = 0
        lines = self.lines
        for k in range(1, len(lines) + 1):
            found = False
            for combo in combinations(lines, k):
                acc = 0
                for ln in combo:
                    if acc & ln:
                        break
                    acc |= ln
                else:
                    found = True
                    break
            if not found:
                break
            best = k
        return best


def projective_plane_instance(q: int) -> ProjectivePlane:
    """PG(2, q) over the prime field of order q."""
    if not is_prime(q):
        raise InvalidArgument(f"q = {q} is not prime (prime powers are not supported)")
    pts = _normalized_triples(q)
    lines = []
    for a in pts:
        mask = 0
        for i, p in enumerate(pts):
            if (a[0] * p[0] + a[1] * p[1] + a[2] * p[2]) % q == 0:
                mask |= 1 << i
        lines.append(mask)
    return ProjectivePlane(q, tuple(pts), tuple(lines))


def single_bid_pos_instance(d: int, eps: float) -> tuple[HypergraphFunction, HypergraphFunction]:
    """Two players over d+1 items.

    Player 1 gets 1 for each pair ``{0, i}`` (1 <= i <= d) it holds; player 2
    values item 0 alone at ``d/(d+1) + eps``.
    """
    if d < 1 or eps <= 0:
        raise InvalidArgument("need d >= 1 and eps > 0")
    m = d + 1
    f1 = HypergraphFunction(m, {1 | (1 << i): 1.0 for i in range(1, d + 1)})
    f2 = HypergraphFunction(m, {1: d / (d + 1) + eps})
    return f1, f2


# --------------------------------------------------------------------------
# random corpora
# --------------------------------------------------------------------------

STYLES = ("nonneg-hypergraph", "max-of-additive", "coverage", "mixed")


def _hypergraph_table(rng: np.random.Generator, m: int, max_edge: int) -> np.ndarray:
    dense = np.zeros(1 << m)
    n_edges = int(rng.integers(m, 2 * m + 1))
    for _ in range(n_edges):
        size = int(rng.integers(1, min(max_edge, m) + 1))
        items = rng.choice(m, size=size, replace=False)
        dense[mask_of(items)] += float(rng.integers(1, 4))
    return zeta(dense, m)


def _additive_table(rng: np.random.Generator, m: int) -> np.ndarray:
    w = rng.integers(0, 5, size=m).astype(float)
    masks = all_masks(m)
    return sum(np.where((masks >> i) & 1, w[i], 0.0) for i in range(m))


def random_monotone(m: int, seed: int, style: str = "nonneg-hypergraph",
                    max_edge: int = 3) -> ExplicitFunction:
    """Deterministic integer-valued normalized monotone function of ``(m, seed, style)``."""
    if not 1 <= m <= 10:
        raise InvalidArgument("random_monotone supports 1 <= m <= 10")
    if style not in STYLES:
        raise InvalidArgument(f"unknown style {style!r}; choose from {STYLES}")
    rng = np.random.default_rng([seed, m, STYLES.index(style)])
    if style == "nonneg-hypergraph":
        table = _hypergraph_table(rng, m, max_edge)
    elif style == "max-of-additive":
        k = int(rng.integers(2, 4))
        table = np.max(np.stack([_additive_table(rng, m) for _ in range(k)]), axis=0)
    elif style == "coverage":
        universe = m + 2
        weights = rng.integers(1, 4, size=universe).astype(float)
        covers = [rng.random(universe) < 0.35 for _ in range(m)]
        table = np.empty(1 << m)
        for s in range(1 << m):
            hit = np.zeros(universe, dtype=bool)
            for i in range(m):
                if s >> i & 1:
                    hit |= covers[i]
            table[s] = weights[hit].sum()
    else:
        table = np.maximum(_hypergraph_table(rng, m, max_edge), _additive_table(rng, m))
    return ExplicitFunction(table, monotone=True)


def corpus(ms: Sequence[int] = (4, 5, 6, 7), per_m: int = 50, seed: int = 0) -> list[ExplicitFunction]:
    """Seeded random corpus cycling through every style."""
    out = []
    for m in ms:
        for i in range(per_m):
            out.append(random_monotone(m, seed * 100003 + i, STYLES[i % len(STYLES)]))
    return out


def fixtures() -> dict[str, SetFunction]:
    """Named small separation examples used across checks."""
    out: dict[str, SetFunction] = {}
    for m in (4, 5, 6, 7):
        out[f"threshold_any_two(m={m})"] = threshold_any_two(m)
        out[f"symmetric_two_level(m={m})"] = symmetric_two_level(m)
    for m in (3, 4, 5):
        out[f"all_pairs(m={m})"] = all_pairs(m)
    for t in (2, 3):
        out[f"pair_matching(t={t})"] = pair_matching(t)
    return out
