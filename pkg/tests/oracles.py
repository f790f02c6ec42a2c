"""Slow reference implementations written straight from the definitions.

Everything here uses plain Python loops over masks so that it shares no code
path with the vectorized library routines it is compared against.
"""
from itertools import combinations

EPS = 1e-9


def subsets(mask):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def proper_subsets(mask):
    return [s for s in subsets(mask) if s != mask]


def bits(mask):
    return bin(mask).count("1")


def naive_dep_plus(t, m, u):
    out = set()
    ub = 1 << u
    for v in range(m):
        if v == u:
            continue
        vb = 1 << v
        for S in range(1 << m):
            if S & ub or not S & vb:
                continue
            if t[S | ub] - t[S] > t[(S ^ vb) | ub] - t[S ^ vb] + EPS:
                out.add(v)
                break
    return out


def naive_sd(t, m):
    return max(len(naive_dep_plus(t, m, u)) for u in range(m))


def naive_smw(t, m):
    """Largest T with some S and v not in T: f(v|S u T) > f(v|S u T') for all T' < T."""
    full = (1 << m) - 1
    best = 0
    for T in range(1, 1 << m):
        if bits(T) <= best:
            continue
        found = False
        for v in range(m):
            vb = 1 << v
            if T & vb:
                continue
            for S in range(1 << m):
                top = t[S | T | vb] - t[S | T]
                if all(top > t[S | P | vb] - t[S | P] + EPS for P in proper_subsets(T)):
                    found = True
                    break
            if found:
                break
        if found:
            best = bits(T)
    return best


def naive_saw(t, m):
    full = (1 << m) - 1
    best = 0
    for T in range(1, 1 << m):
        if bits(T) <= best:
            continue
        for S in subsets(full & ~T):
            top = t[S | T] - t[T]
            if all(top > t[S | P] - t[P] + EPS for P in proper_subsets(T)):
                best = bits(T)
                break
    return best


def naive_best_k(t, m, k):
    return max(t[S] for S in range(1 << m) if bits(S) <= k)


def naive_welfare(tables, m):
    """Exhaustive search over item -> agent-or-nobody assignments."""
    n = len(tables)
    best = 0.0
    for code in range((n + 1) ** m):
        parts = [0] * n
        c = code
        for j in range(m):
            who = c % (n + 1)
            c //= n + 1
            if who:
                parts[who - 1] |= 1 << j
        best = max(best, sum(t[p] for t, p in zip(tables, parts)))
    return best


def naive_mobius(t, m):
    h = [0.0] * (1 << m)
    for S in range(1 << m):
        h[S] = sum((-1) ** (bits(S) - bits(P)) * t[P] for P in subsets(S))
    return h


def pairwise_disjoint_count(sets):
    for r in range(len(sets), 0, -1):
        for combo in combinations(sets, r):
            acc = 0
            ok = True
            for s in combo:
                if acc & s:
                    ok = False
                    break
                acc |= s
            if ok:
                return r
    return 0
