"""Single-bid and simultaneous first-price (SIA) auctions on finite bid grids.

Games are tabulated once: every action profile is played out and the
utilities and welfare are stored in dense arrays. Pure-Nash enumeration and
no-regret dynamics then only read those arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument, ResourceLimit
from .maximize import Allocation, brute_force_welfare
from .setfn import EPS_CMP, SetFunction, all_masks, elements, popcounts

MECHANISMS = ("single-bid", "sia")
HIERARCHIES = ("saw", "smw-superadditive", "ch", "mph")
MAX_PROFILES = 10 ** 7
MAX_DEFAULT_LEVELS = 64


# --------------------------------------------------------------------------
# grids and outcomes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BidGrid:
    levels: tuple[float, ...]
    delta: float

    def __post_init__(self):
        lv = self.levels
        if not lv or lv[0] != 0.0:
            raise InvalidArgument("bid grid must start at 0")
        if any(b <= a for a, b in zip(lv, lv[1:])):
            raise InvalidArgument("bid grid levels must be strictly increasing")

    @classmethod
    def uniform(cls, delta: float, top: float) -> "BidGrid":
        """``0, delta, 2 delta, ...`` up to the first level reaching ``top``."""
        if delta <= 0:
            raise InvalidArgument("grid step must be positive")
        count = int(math.ceil(top / delta - 1e-9)) + 1
        levels = tuple(round(k * delta, 12) for k in range(max(count, 1)))
        return cls(levels, float(delta))

    @classmethod
    def explicit(cls, levels: Sequence[float]) -> "BidGrid":
        lv = tuple(float(x) for x in levels)
        gaps = [b - a for a, b in zip(lv, lv[1:])]
        return cls(lv, max(gaps) if gaps else 0.0)

    def to_dict(self) -> dict:
        return {"levels": list(self.levels), "delta": self.delta}


def max_item_price(valuations: Sequence[SetFunction]) -> float:
    """Largest average per-item value ``f_i(S)/|S|``; no bidder buys above it."""
    best = 0.0
    for f in valuations:
        t = f.table()
        pc = popcounts(f.m)
        best = max(best, float((t[1:] / pc[1:]).max()))
    return best


def default_grid(valuations: Sequence[SetFunction]) -> BidGrid:
    """Step 1% of the top per-item price, coarsened to at most 64 levels."""
    top = max_item_price(valuations)
    if top <= 0:
        return BidGrid((0.0,), 0.0)
    delta = max(0.01 * top, top / (MAX_DEFAULT_LEVELS - 1))
    return BidGrid.uniform(delta, top)


@dataclass
class AuctionOutcome:
    allocation: Allocation
    payments: list[float]
    utilities: list[float]

    @property
    def welfare(self) -> float:
        return self.allocation.welfare

    def to_dict(self) -> dict:
        return {"allocation": [elements(p) for p in self.allocation.parts],
                "payments": self.payments, "utilities": self.utilities,
                "welfare": self.welfare}


def _outcome(valuations, parts, payments) -> AuctionOutcome:
    values = [f.eval(p) for f, p in zip(valuations, parts)]
    alloc = Allocation(list(parts), float(sum(values)))
    return AuctionOutcome(alloc, [float(p) for p in payments],
                          [float(v - p) for v, p in zip(values, payments)])


def _check_profile(valuations: Sequence[SetFunction]) -> int:
    if not valuations:
        raise InvalidArgument("need at least one bidder")
    m = valuations[0].m
    if any(f.m != m for f in valuations):
        raise InvalidArgument("valuations must share the ground set")
    return m


def _purchase(t: np.ndarray, pc: np.ndarray, masks: np.ndarray, available: int,
              bid: float, eps: float) -> int:
    """Set bought at per-item price ``bid``: best surplus among valued sets.

    A set is bought only if it has positive value and nonnegative surplus;
    ties go to fewer items, then the smaller mask.
    """
    cand = masks[((masks & ~available) == 0) & (masks != 0)]
    vals = t[cand]
    surplus = vals - bid * pc[cand]
    ok = (vals > eps) & (surplus >= -eps)
    if not ok.any():
        return 0
    cand, surplus = cand[ok], surplus[ok]
    near = cand[surplus >= surplus.max() - eps]
    sizes = pc[near]
    return int(near[sizes == sizes.min()].min())


def single_bid_outcome(valuations: Sequence[SetFunction], bids: Sequence[float],
                       eps: float = EPS_CMP) -> AuctionOutcome:
    """Bidders go in descending bid order (lower index first on ties); each buys
    its surplus-maximizing available set at its own per-item price."""
    m = _check_profile(valuations)
    if len(bids) != len(valuations):
        raise InvalidArgument("one bid per bidder required")
    if any(b < 0 for b in bids):
        raise InvalidArgument("bids must be nonnegative")
    masks = all_masks(m)
    pc = popcounts(m)
    order = sorted(range(len(bids)), key=lambda i: (-bids[i], i))
    available = (1 << m) - 1
    parts = [0] * len(bids)
    for i in order:
        S = _purchase(valuations[i].table(), pc, masks, available, bids[i], eps)
        parts[i] = S
        available &= ~S
    payments = [bids[i] * bin(parts[i]).count("1") for i in range(len(bids))]
    return _outcome(valuations, parts, payments)


def sia_outcome(valuations: Sequence[SetFunction], bid_matrix) -> AuctionOutcome:
    """Each item goes to its highest bidder (lowest index on ties), who pays that bid."""
    m = _check_profile(valuations)
    B = np.asarray(bid_matrix, dtype=float)
    if B.shape != (len(valuations), m):
        raise InvalidArgument(f"bid matrix must have shape ({len(valuations)}, {m})")
    if np.any(B < 0):
        raise InvalidArgument("bids must be nonnegative")
    win = np.argmax(B, axis=0)
    parts = [0] * len(valuations)
    payments = [0.0] * len(valuations)
    for j, i in enumerate(win):
        parts[i] |= 1 << j
        payments[i] += B[i, j]
    return _outcome(valuations, parts, payments)


# --------------------------------------------------------------------------
# smoothness arithmetic
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothnessBound:
    lam: float
    mu: float

    @property
    def poa(self) -> float:
        return poa_from_smoothness(self)


def poa_from_smoothness(bound: SmoothnessBound) -> float:
    if bound.lam <= 0:
        raise InvalidArgument("lambda must be positive")
    return max(1.0, bound.mu) / bound.lam


def _h(x: float) -> float:
    from .approx import harmonic
    return harmonic(max(1, math.ceil(x)))


def poa_upper_bound(hierarchy: str, d: int, m: Optional[int], mechanism: str) -> float:
    """Closed-form coarse-correlated PoA bounds by valuation class and mechanism."""
    if mechanism not in MECHANISMS:
        raise InvalidArgument(f"unknown mechanism {mechanism!r}")
    if d < 1 and hierarchy != "smw-superadditive":
        raise InvalidArgument("d must be >= 1")
    if hierarchy in ("saw", "smw-superadditive") and (m is None or m < 1):
        raise InvalidArgument("m is required for this bound")
    if hierarchy == "saw":
        if mechanism == "single-bid":
            return 2 * d / (1 - math.exp(-2 * d)) * _h(m / (2 * d))
        return 8 * d * _h(m / (2 * d))
    if hierarchy in ("smw-superadditive", "smw"):
        if d < 0:
            raise InvalidArgument("d must be nonnegative")
        D = d + 1
        if mechanism == "single-bid":
            return D * D / (1 - math.exp(-D)) * _h(m / D)
        return 2 * D * D * _h(m / D)
    if hierarchy == "ch":
        if mechanism == "single-bid":
            return poa_from_smoothness(SmoothnessBound((1 - math.exp(-d)) / d, 1.0))
        return 2.0 * d
    if hierarchy == "mph" and mechanism == "sia":
        return 2.0 * d
    raise InvalidArgument(f"no bound for hierarchy {hierarchy!r} with {mechanism}")


# --------------------------------------------------------------------------
# tabulated games
# --------------------------------------------------------------------------

@dataclass
class Game:
    """Dense payoff arrays over the product of per-player action lists.

    ``actions[i][a]`` is player i's bid: a float for Single-bid, a length-m
    vector for SIA. ``utility`` has shape ``(A_1, ..., A_n, n)``.
    """

    mechanism: str
    valuations: list[SetFunction]
    actions: list[list]
    utility: np.ndarray
    welfare: np.ndarray

    @property
    def shape(self) -> tuple[int, ...]:
        return self.welfare.shape

    def outcome(self, profile: Sequence[int]) -> AuctionOutcome:
        bids = [self.actions[i][a] for i, a in enumerate(profile)]
        if self.mechanism == "single-bid":
            return single_bid_outcome(self.valuations, bids)
        return sia_outcome(self.valuations, np.array(bids))

    def action_repr(self, i: int, a: int):
        x = self.actions[i][a]
        return float(x) if np.ndim(x) == 0 else [float(v) for v in x]


def sia_actions(m: int, grid: BidGrid, supports: Sequence[int]) -> list[np.ndarray]:
    """Uniform bids at each grid level on each support (the all-zero bid once)."""
    out = [np.zeros(m)]
    for S in supports:
        ind = np.array([(S >> j) & 1 for j in range(m)], dtype=float)
        for lv in grid.levels[1:]:
            out.append(lv * ind)
    return out


def build_game(mechanism: str, valuations: Sequence[SetFunction], grid: BidGrid,
               supports: Optional[Sequence[Sequence[int]]] = None) -> Game:
    """Play every action profile once.

    Single-bid actions are the grid levels. SIA actions are uniform bids on
    per-player supports (default: the whole ground set).
    """
    m = _check_profile(valuations)
    n = len(valuations)
    if mechanism == "single-bid":
        actions = [list(grid.levels) for _ in range(n)]
    elif mechanism == "sia":
        if supports is None:
            supports = [[(1 << m) - 1] for _ in range(n)]
        if len(supports) != n:
            raise InvalidArgument("one support list per player required")
        actions = [sia_actions(m, grid, sup) for sup in supports]
    else:
        raise InvalidArgument(f"unknown mechanism {mechanism!r}")
    shape = tuple(len(a) for a in actions)
    if any(s == 0 for s in shape):
        raise InvalidArgument("empty action space")
    total = int(np.prod(shape, dtype=object))
    if total > MAX_PROFILES:
        raise ResourceLimit(f"{total} action profiles exceed the limit of {MAX_PROFILES}")
    tables = [f.table() for f in valuations]
    utility = np.zeros(shape + (n,))
    welfare = np.zeros(shape)
    if mechanism == "sia":
        _tabulate_sia(actions, tables, m, utility, welfare)
    else:
        masks = all_masks(m)
        pc = popcounts(m)
        full = (1 << m) - 1
        cache: dict = {}
        for prof in product(*(range(s) for s in shape)):
            bids = [actions[i][a] for i, a in enumerate(prof)]
            order = sorted(range(n), key=lambda i: (-bids[i], i))
            available = full
            u = np.zeros(n)
            w = 0.0
            for i in order:
                key = (i, available, bids[i])
                S = cache.get(key)
                if S is None:
                    S = cache[key] = _purchase(tables[i], pc, masks, available, bids[i], EPS_CMP)
                v = tables[i][S]
                u[i] = v - bids[i] * pc[S]
                w += v
                available &= ~S
            utility[prof] = u
            welfare[prof] = w
    return Game(mechanism, list(valuations), actions, utility, welfare)


def _tabulate_sia(actions, tables, m, utility, welfare) -> None:
    n = len(actions)
    shape = welfare.shape
    A = [np.stack(a) for a in actions]                         # [A_i, m]
    idx = np.indices(shape).reshape(n, -1)                      # [n, P]
    bids = np.stack([A[i][idx[i]] for i in range(n)], axis=1)    # [P, n, m]
    win = np.argmax(bids, axis=1)                               # [P, m]
    bit = 1 << np.arange(m, dtype=np.int64)
    flat_u = utility.reshape(-1, n)
    flat_w = welfare.reshape(-1)
    for i in range(n):
        mine = win == i
        bundle = (mine * bit).sum(axis=1)
        val = tables[i][bundle]
        pay = (bids[:, i, :] * mine).sum(axis=1)
        flat_u[:, i] = val - pay
        flat_w += val


# --------------------------------------------------------------------------
# equilibria
# --------------------------------------------------------------------------

def pure_nash_mask(game: Game, eps: float = EPS_CMP) -> np.ndarray:
    """Boolean array over profiles: no player has a strictly better deviation."""
    n = game.utility.shape[-1]
    ok = np.ones(game.shape, dtype=bool)
    for i in range(n):
        u = game.utility[..., i]
        best = u.max(axis=i, keepdims=True)
        ok &= u >= best - eps
    return ok


def enumerate_pure_nash(game: Game, eps: float = EPS_CMP) -> list[tuple[tuple[int, ...], AuctionOutcome]]:
    """Every pure Nash profile with its outcome, highest welfare first (ties by profile)."""
    ok = pure_nash_mask(game, eps)
    profs = [tuple(int(x) for x in p) for p in np.argwhere(ok)]
    profs.sort(key=lambda p: (-game.welfare[p], p))
    return [(p, game.outcome(p)) for p in profs]


# --------------------------------------------------------------------------
# no-regret dynamics
# --------------------------------------------------------------------------

@dataclass
class DynamicsReport:
    rounds: int
    algorithm: str
    regrets: list[float]
    avg_welfare: float
    opt: float
    empirical_poa: float
    top_actions: list[list[tuple[object, float]]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "algorithm": self.algorithm,
            "regrets": self.regrets,
            "avg_welfare": self.avg_welfare,
            "opt": self.opt,
            "empirical_poa": self.empirical_poa,
            "top_actions": [[{"action": a, "freq": p} for a, p in row] for row in self.top_actions],
        }


def no_regret_dynamics(game: Game, rounds: int, seed: int = 0,
                       algorithm: str = "regret-matching",
                       opt: Optional[float] = None) -> DynamicsReport:
    """Full-information learning by every player at once.

    Each round every player samples an action from its current mixed strategy,
    then observes the payoff every one of its actions would have earned against
    the others' sampled actions. ``regret-matching`` plays proportionally to
    positive cumulative regret; ``hedge`` plays multiplicative weights with
    step ``sqrt(ln k / T)`` scaled by the payoff range.
    """
    if rounds < 1:
        raise InvalidArgument("rounds must be positive")
    if algorithm not in ("regret-matching", "hedge"):
        raise InvalidArgument(f"unknown algorithm {algorithm!r}")
    n = game.utility.shape[-1]
    shape = game.shape
    rng = np.random.default_rng(seed)
    draws = rng.random((rounds, n))
    cum = [np.zeros(k) for k in shape]          # cumulative payoff of each own action
    got = np.zeros(n)                           # cumulative realized payoff
    counts = [np.zeros(k, dtype=np.int64) for k in shape]
    span = float(np.ptp(game.utility)) or 1.0
    etas = [math.sqrt(math.log(max(k, 2)) / rounds) / span for k in shape]
    welfare_sum = 0.0
    prof = [0] * n
    for t in range(rounds):
        for i in range(n):
            k = shape[i]
            if algorithm == "regret-matching":
                r = np.maximum(cum[i] - got[i], 0.0)
                tot = r.sum()
                p = r / tot if tot > 0 else None
            else:
                z = etas[i] * cum[i]
                w = np.exp(z - z.max())
                p = w / w.sum()
            if p is None:
                prof[i] = min(int(draws[t, i] * k), k - 1)
            else:
                prof[i] = min(int(np.searchsorted(np.cumsum(p), draws[t, i] * p.sum(), side="right")), k - 1)
        pt = tuple(prof)
        welfare_sum += game.welfare[pt]
        for i in range(n):
            sl = list(pt)
            sl[i] = slice(None)
            row = game.utility[tuple(sl) + (i,)]
            cum[i] += row
            got[i] += row[prof[i]]
            counts[i][prof[i]] += 1
    regrets = [float(max(0.0, (cum[i].max() - got[i]) / rounds)) for i in range(n)]
    avg_w = welfare_sum / rounds
    if opt is None:
        opt = brute_force_welfare(game.valuations)[1]
    top = []
    for i in range(n):
        order = np.argsort(-counts[i], kind="stable")[:3]
        top.append([(game.action_repr(i, int(a)), float(counts[i][a] / rounds)) for a in order
                    if counts[i][a] > 0])
    poa = opt / avg_w if avg_w > 0 else math.inf
    return DynamicsReport(rounds, algorithm, regrets, float(avg_w), float(opt), float(poa), top)


__all__ = [
    "MECHANISMS", "HIERARCHIES", "BidGrid", "AuctionOutcome", "SmoothnessBound",
    "DynamicsReport", "Game", "max_item_price", "default_grid", "single_bid_outcome",
    "sia_outcome", "poa_from_smoothness", "poa_upper_bound", "sia_actions", "build_game",
    "pure_nash_mask", "enumerate_pure_nash", "no_regret_dynamics",
]
