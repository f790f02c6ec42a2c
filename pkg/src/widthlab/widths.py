"""Exact complementarity measures: supermodular degree and widths, scopic
predicates, hypergraph (PH) level and small-scale MPH membership.

Everything here is exhaustive. Widths are found by scanning every context
(``v, S`` for supermodular sets, ``S`` for superadditive ones) and marking the
sets ``T`` whose margin strictly beats every proper subset of ``T``. The scopic
predicates are evaluated straight from their own inequalities through a
different recurrence, so the two routes can be cross-checked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .errors import InvalidArgument, ResourceLimit, SolverFailure
from .setfn import (EPS_CMP, SetFunction, all_masks, elements, mask_of, mobius,
                    popcount, popcounts)

MAX_M_DEGREE = 14
MAX_M_WIDTH = 12
MAX_M_SCOPIC = 10
MAX_M_PH = 20
MAX_M_MPH = 8

NOT_PH = "not-ph"

# rows * 2**m cells per vectorized block
_CHUNK_CELLS = 1 << 21


def _require(f: SetFunction, cap: int, what: str) -> None:
    if f.m > cap:
        raise ResourceLimit(f"{what} is limited to m <= {cap} (got m={f.m})")


# --------------------------------------------------------------------------
# witnesses
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SupermodularWitness:
    """``T`` complements item ``v`` given context ``S``."""

    T: int
    S: int
    v: int

    @property
    def size(self) -> int:
        return popcount(self.T)

    def to_dict(self) -> dict:
        return {"T": elements(self.T), "S": elements(self.S), "v": self.v}


@dataclass(frozen=True)
class SuperadditiveWitness:
    """``T`` complements the disjoint set ``S``."""

    T: int
    S: int

    @property
    def size(self) -> int:
        return popcount(self.T)

    def to_dict(self) -> dict:
        return {"T": elements(self.T), "S": elements(self.S)}


def _proper_subsets(t: int):
    sub = (t - 1) & t
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & t


def verify_supermodular_witness(f: SetFunction, w: SupermodularWitness,
                                eps: float = EPS_CMP) -> bool:
    """Re-check ``f(v | S u T) > f(v | S u T')`` against every ``T' < T``."""
    if w.T == 0 or (w.T >> w.v) & 1:
        return False
    t = f.table()
    bit = 1 << w.v
    top = t[w.S | w.T | bit] - t[w.S | w.T]
    return all(top > t[w.S | sub | bit] - t[w.S | sub] + eps for sub in _proper_subsets(w.T))


def verify_superadditive_witness(f: SetFunction, w: SuperadditiveWitness,
                                 eps: float = EPS_CMP) -> bool:
    if w.T == 0 or w.S & w.T:
        return False
    t = f.table()
    top = t[w.S | w.T] - t[w.T]
    return all(top > t[w.S | sub] - t[sub] + eps for sub in _proper_subsets(w.T))


# --------------------------------------------------------------------------
# supermodular degree
# --------------------------------------------------------------------------

def dep_plus(f: SetFunction, u: int, eps: float = EPS_CMP) -> int:
    """Mask of items ``v`` with ``f(u | S) > f(u | S - v)`` for some S."""
    _require(f, MAX_M_DEGREE, "dep_plus")
    m = f.m
    if not 0 <= u < m:
        raise InvalidArgument(f"item {u} outside ground set of size {m}")
    t = f.table()
    masks = all_masks(m)
    ubit = 1 << u
    gain = t[masks | ubit] - t[masks]
    out = 0
    for v in range(m):
        if v == u:
            continue
        vbit = 1 << v
        with_v = masks[(masks & (vbit | ubit)) == vbit]
        if np.any(gain[with_v] > gain[with_v ^ vbit] + eps):
            out |= vbit
    return out


def supermodular_degree(f: SetFunction, eps: float = EPS_CMP) -> int:
    return max(popcount(dep_plus(f, u, eps)) for u in range(f.m))


# --------------------------------------------------------------------------
# widths
# --------------------------------------------------------------------------

def _strict_records(vals: np.ndarray, m: int, eps: float) -> np.ndarray:
    """Row-wise flags ``vals[r, Y] > max(vals[r, Y'] for Y' proper subset of Y)``.

    ``vals`` has shape ``(rows, 2**m)``. The empty set is never a record.
    """
    rows = vals.shape[0]
    shape = (rows,) + (2,) * m
    best = vals.reshape(shape).copy()
    for ax in range(1, m + 1):
        np.maximum.accumulate(best, axis=ax, out=best)
    below = np.full(shape, -np.inf)
    for ax in range(1, m + 1):
        hi = (slice(None),) * ax + (1,)
        lo = (slice(None),) * ax + (0,)
        np.maximum(below[hi], best[lo], out=below[hi])
    rec = vals > below.reshape(rows, -1) + eps
    rec[:, 0] = False
    return rec


def _chunks(contexts: np.ndarray, m: int):
    step = max(1, _CHUNK_CELLS >> m)
    for i in range(0, contexts.size, step):
        yield contexts[i:i + step]


def _free_lattices(contexts: np.ndarray, blocked: np.ndarray, m: int):
    """Yield ``(rows, Y)`` where ``Y[r]`` lists every subset of the free items
    of context ``rows[r]`` (free = not in ``blocked[r]``) in compact order.

    Contexts are grouped by the number ``k`` of free items, so ``Y`` has shape
    ``(len(rows), 2**k)`` and position ``c`` uses bit ``j`` of ``c`` for the
    ``j``-th free item. Total work is proportional to the sum of ``2**k``.
    """
    full = (1 << m) - 1
    free = full & ~blocked
    nfree = popcounts(m)[free]
    for k in np.unique(nfree):
        k = int(k)
        sel = np.flatnonzero(nfree == k)
        compact = np.arange(1 << k, dtype=np.int64)
        step = max(1, _CHUNK_CELLS >> k)
        for i in range(0, sel.size, step):
            rows = sel[i:i + step]
            fr = free[rows]
            bits = ((fr[:, None] >> np.arange(m)[None, :]) & 1).astype(bool)
            pos = np.nonzero(bits)[1].reshape(rows.size, k)
            Y = np.zeros((rows.size, 1 << k), dtype=np.int64)
            for j in range(k):
                Y |= ((compact[None, :] >> j) & 1) << pos[:, j:j + 1]
            yield contexts[rows], Y, k


def widest_supermodular_set(f: SetFunction, eps: float = EPS_CMP) -> Optional[SupermodularWitness]:
    """Largest supermodular set, ties broken by smallest ``T``, then ``S``, then ``v``.

    Returns None when ``f`` has no supermodular set (i.e. it is submodular).
    Only contexts with ``S``, ``T`` and ``v`` pairwise disjoint are scanned:
    an overlap makes some proper subset of ``T`` produce the same margin.
    """
    _require(f, MAX_M_WIDTH, "supermodular width")
    m = f.m
    t = f.table()
    masks = all_masks(m)
    pc = popcounts(m)
    best_key = None
    for v in range(m):
        vbit = 1 << v
        contexts = masks[(masks & vbit) == 0]
        for ctx, Y, k in _free_lattices(contexts, contexts | vbit, m):
            if k == 0:
                continue
            base = ctx[:, None] | Y
            vals = t[base | vbit] - t[base]
            rec = _strict_records(vals, k, eps)
            r, c = np.nonzero(rec)
            if r.size == 0:
                continue
            T = Y[r, c]
            size = pc[T]
            keep = size == size.max()
            T, S = T[keep], ctx[r[keep]]
            i = np.lexsort((S, T))[0]
            key = (-int(size.max()), int(T[i]), int(S[i]), v)
            if best_key is None or key < best_key:
                best_key = key
    if best_key is None:
        return None
    _, T, S, v = best_key
    return SupermodularWitness(T, S, v)


def supermodular_width(f: SetFunction, eps: float = EPS_CMP) -> int:
    w = widest_supermodular_set(f, eps)
    return 0 if w is None else w.size


def widest_superadditive_set(f: SetFunction, eps: float = EPS_CMP) -> Optional[SuperadditiveWitness]:
    """Largest superadditive set, ties broken by smallest ``T`` then ``S``."""
    _require(f, MAX_M_WIDTH, "superadditive width")
    m = f.m
    t = f.table()
    masks = all_masks(m)
    pc = popcounts(m)
    best_key = None
    for ctx, Y, k in _free_lattices(masks[1:], masks[1:], m):
        if k == 0:
            continue
        vals = t[ctx[:, None] | Y] - t[Y]
        rec = _strict_records(vals, k, eps)
        r, c = np.nonzero(rec)
        if r.size == 0:
            continue
        T = Y[r, c]
        size = pc[T]
        keep = size == size.max()
        T, S = T[keep], ctx[r[keep]]
        i = np.lexsort((S, T))[0]
        key = (-int(size.max()), int(T[i]), int(S[i]))
        if best_key is None or key < best_key:
            best_key = key
    if best_key is None:
        return None
    _, T, S = best_key
    return SuperadditiveWitness(T, S)


def superadditive_width(f: SetFunction, eps: float = EPS_CMP) -> int:
    w = widest_superadditive_set(f, eps)
    return 0 if w is None else w.size


def _box_records(M: np.ndarray, eps: float) -> np.ndarray:
    """``M[ta, tb] > max(M[a, b] : a <= ta, b <= tb, (a, b) != (ta, tb))``."""
    C = np.maximum.accumulate(np.maximum.accumulate(M, axis=0), axis=1)
    below = np.full(M.shape, -np.inf)
    below[1:, :] = C[:-1, :]
    below[:, 1:] = np.maximum(below[:, 1:], C[:, :-1])
    return M > below + eps


def class_widths(V: np.ndarray, eps: float = EPS_CMP) -> tuple[int, int]:
    """Exact ``(smw, saw)`` of a function that only depends on ``(|S & R|, |S - R|)``.

    ``V[a, b]`` is the value of any set with ``a`` items of ``R`` and ``b``
    items outside it. Sets related by a permutation fixing ``R`` share every
    margin, so it is enough to scan count vectors: a context ``S`` with
    counts ``(sa, sb)`` and a candidate ``T`` with counts ``(ta, tb)`` (plus the
    class of ``v``). A proper subset of ``T`` can realise any smaller count
    vector, so the rivals of ``T`` are exactly the count box below it.
    This reaches ground sets far beyond the exhaustive routines.
    """
    V = np.asarray(V, dtype=float)
    r, n = V.shape[0] - 1, V.shape[1] - 1
    smw = 0
    for grow_a in (True, False):
        if grow_a:
            M = V[1:, :] - V[:-1, :]
        else:
            M = V[:, 1:] - V[:, :-1]
        for sa in range(M.shape[0]):
            for sb in range(M.shape[1]):
                rec = _box_records(M[sa:, sb:], eps)
                rec[0, 0] = False
                ta, tb = np.nonzero(rec)
                if ta.size:
                    smw = max(smw, int((ta + tb).max()))
    saw = 0
    for sa in range(r + 1):
        for sb in range(n + 1):
            if sa + sb == 0:
                continue
            G = V[sa:, sb:] - V[:r + 1 - sa, :n + 1 - sb]
            rec = _box_records(G, eps)
            rec[0, 0] = False
            ta, tb = np.nonzero(rec)
            if ta.size:
                saw = max(saw, int((ta + tb).max()))
    return smw, saw


def is_supermodular_set(f: SetFunction, T: int, eps: float = EPS_CMP) -> Optional[SupermodularWitness]:
    """Witness ``(S, v)`` for ``T`` straight from the definition, or None.

    Scans ``v`` ascending, then ``S`` ascending over all subsets of X.
    """
    _require(f, MAX_M_WIDTH, "is_supermodular_set")
    T = f.ground.check(T)
    if T == 0:
        return None
    m = f.m
    t = f.table()
    masks = all_masks(m)
    subs = list(_proper_subsets(T))
    for v in range(m):
        vbit = 1 << v
        if T & vbit:
            continue
        top = t[masks | T | vbit] - t[masks | T]
        rival = np.full(masks.size, -np.inf)
        for sub in subs:
            np.maximum(rival, t[masks | sub | vbit] - t[masks | sub], out=rival)
        hit = np.flatnonzero(top > rival + eps)
        if hit.size:
            return SupermodularWitness(T, int(hit[0]), v)
    return None


def is_superadditive_set(f: SetFunction, T: int, eps: float = EPS_CMP) -> Optional[SuperadditiveWitness]:
    _require(f, MAX_M_WIDTH, "is_superadditive_set")
    T = f.ground.check(T)
    if T == 0:
        return None
    t = f.table()
    masks = all_masks(f.m)
    S = masks[(masks & T) == 0]
    top = t[S | T] - t[T]
    rival = np.full(S.size, -np.inf)
    for sub in _proper_subsets(T):
        np.maximum(rival, t[S | sub] - t[sub], out=rival)
    hit = np.flatnonzero(top > rival + eps)
    return SuperadditiveWitness(T, int(S[hit[0]])) if hit.size else None


# --------------------------------------------------------------------------
# scopic predicates
# --------------------------------------------------------------------------

def is_d_scopic_submodular(f: SetFunction, d: int, eps: float = EPS_CMP) -> bool:
    """``f(v|T) <= max{f(v | S u T') : T' <= T, |T'| <= d}`` for all ``S <= T``, ``v`` not in T."""
    _require(f, MAX_M_SCOPIC, "is_d_scopic_submodular")
    if d < 0:
        raise InvalidArgument("d must be nonnegative")
    m = f.m
    t = f.table()
    masks = all_masks(m)
    for v in range(m):
        vbit = 1 << v
        gain = t[masks | vbit] - t[masks]
        outer = masks[(masks & vbit) == 0]
        for T in _chunks(outer, m):
            inside = (masks[None, :] & ~T[:, None]) == 0          # S <= T
            reach = np.where(inside, gain[None, :], -np.inf)     # B in [S, T], 0 extra items
            shape = (T.size,) + (2,) * m
            for _ in range(min(d, m)):
                prev = reach.reshape(shape)
                step = prev.copy()
                for ax in range(1, m + 1):
                    lo = (slice(None),) * ax + (0,)
                    hi = (slice(None),) * ax + (1,)
                    np.maximum(step[lo], prev[hi], out=step[lo])
                reach = step.reshape(T.size, -1)
            lhs = gain[T][:, None]
            if np.any(inside & (lhs > reach + eps)):
                return False
    return True


def is_d_scopic_subadditive(f: SetFunction, d: int, eps: float = EPS_CMP) -> bool:
    """``f(S|T) <= max{f(S | T') : T' <= T, |T'| <= d}`` for all disjoint ``S, T``."""
    _require(f, MAX_M_SCOPIC, "is_d_scopic_subadditive")
    if d < 0:
        raise InvalidArgument("d must be nonnegative")
    m = f.m
    t = f.table()
    masks = all_masks(m)
    small = popcounts(m) <= d
    for S in _chunks(masks[1:], m):
        disjoint = (masks[None, :] & S[:, None]) == 0
        gain = t[S[:, None] | masks[None, :]] - t[masks][None, :]
        capped = np.where(disjoint & small[None, :], gain, -np.inf)
        c = capped.reshape((S.size,) + (2,) * m)
        for ax in range(1, m + 1):
            np.maximum.accumulate(c, axis=ax, out=c)
        if np.any(disjoint & (gain > capped + eps)):
            return False
    return True


# --------------------------------------------------------------------------
# hypergraph levels
# --------------------------------------------------------------------------

def ph_level(f: SetFunction, eps: float = EPS_CMP):
    """Largest positive hyperedge size, or :data:`NOT_PH` if any weight is negative."""
    _require(f, MAX_M_PH, "ph_level")
    h = mobius(f.table(), f.m)
    if np.any(h < -eps):
        return NOT_PH
    pos = np.flatnonzero(h > eps)
    return int(popcounts(f.m)[pos].max()) if pos.size else 0


def _mph_lp(f: SetFunction, d: int, tol: float, collect: bool):
    _require(f, MAX_M_MPH, "mph_level_at_most")
    if d < 0:
        raise InvalidArgument("d must be nonnegative")
    m = f.m
    t = f.table()
    masks = all_masks(m)
    edges = masks[(popcounts(m) >= 1) & (popcounts(m) <= d)]
    witnesses = {}
    if edges.size == 0:
        ok = bool(np.all(np.abs(t) <= tol))
        return ok, ({} if collect and ok else None)
    contained = (edges[None, :] & ~masks[:, None]) == 0   # [U, e]: e <= U
    a_ub = contained[1:].astype(float)
    b_ub = t[1:]
    for s in range(1, 1 << m):
        c = -contained[s].astype(float)
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=(0, None), method="highs")
        if res.status != 0:
            raise SolverFailure(f"LP for S={elements(s)} ended with status {res.status}: {res.message}")
        if -res.fun < t[s] - tol:
            return False, None
        if collect:
            witnesses[s] = {int(e): float(w) for e, w in zip(edges, res.x) if w > tol}
    return True, witnesses if collect else None


def mph_level_at_most(f: SetFunction, d: int, tol: float = 1e-7) -> bool:
    """Whether ``f`` is a maximum of nonnegative hypergraph functions with edges of size <= d.

    For each S, an LP maximizes the value at S of a nonnegative rank-d
    hypergraph function that stays below ``f`` everywhere.
    """
    return _mph_lp(f, d, tol, collect=False)[0]


def mph_components(f: SetFunction, d: int, tol: float = 1e-7) -> Optional[dict[int, dict[int, float]]]:
    """Per-S hyperedge weights witnessing MPH-d membership (debug output), or None."""
    ok, comps = _mph_lp(f, d, tol, collect=True)
    return comps if ok else None


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

@dataclass
class WidthReport:
    sd: int
    dep_plus: list[int]
    smw: int
    smw_witness: Optional[SupermodularWitness]
    saw: int
    saw_witness: Optional[SuperadditiveWitness]
    ph_level: object
    mph_at_most: dict[int, bool] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "sd": self.sd,
            "dep_plus": [elements(x) for x in self.dep_plus],
            "smw": self.smw,
            "saw": self.saw,
            "smw_witness": self.smw_witness.to_dict() if self.smw_witness else None,
            "saw_witness": self.saw_witness.to_dict() if self.saw_witness else None,
            "ph_level": self.ph_level,
        }
        if self.mph_at_most:
            out["mph_at_most"] = {str(k): v for k, v in sorted(self.mph_at_most.items())}
        return out


def width_report(f: SetFunction, max_d: Optional[int] = None, eps: float = EPS_CMP) -> WidthReport:
    """All measures at once; ``max_d`` additionally runs MPH-d checks for d <= max_d."""
    deps = [dep_plus(f, u, eps) for u in range(f.m)]
    smw_w = widest_supermodular_set(f, eps)
    saw_w = widest_superadditive_set(f, eps)
    report = WidthReport(
        sd=max(popcount(x) for x in deps),
        dep_plus=deps,
        smw=0 if smw_w is None else smw_w.size,
        smw_witness=smw_w,
        saw=0 if saw_w is None else saw_w.size,
        saw_witness=saw_w,
        ph_level=ph_level(f, eps),
    )
    if max_d is not None:
        for d in range(1, max_d + 1):
            report.mph_at_most[d] = mph_level_at_most(f, d)
    return report


__all__ = [
    "NOT_PH", "SupermodularWitness", "SuperadditiveWitness", "WidthReport",
    "dep_plus", "supermodular_degree", "supermodular_width", "superadditive_width",
    "widest_supermodular_set", "widest_superadditive_set", "is_supermodular_set",
    "is_superadditive_set", "verify_supermodular_witness", "verify_superadditive_witness",
    "is_d_scopic_submodular", "is_d_scopic_subadditive", "ph_level",
    "mph_level_at_most", "mph_components", "width_report", "class_widths",
]
