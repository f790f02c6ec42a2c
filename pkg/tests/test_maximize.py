import math

import pytest
from hypothesis import given, strategies as st

from widthlab import instances, maximize, widths
from widthlab.errors import InvalidArgument
from widthlab.setfn import additive, elements, mask_of, single_minded

from oracles import naive_best_k, naive_welfare
from strategies import functions, hypergraphs


def test_batches_and_candidate_count():
    got = list(maximize._batches([0, 2, 3], 2))
    assert got == [1, 4, 8, 5, 9, 12]
    assert maximize.batch_candidates(5, 4, 2) == 4 + 6


def test_pick_breaks_ties_by_smallest_mask():
    assert maximize._pick([4, 2, 1], [1.0, 1.0, 0.5], 1e-9) == (2, 1.0)


def test_greedy_additive_is_exact():
    f = additive([3, 1, 2, 5])
    S, tr = maximize.batched_greedy_constrained(f, 2, 0)
    assert elements(S) == [0, 3]
    assert tr.value == 8
    assert [elements(s.batch) for s in tr.steps] == [[3], [0]]


def test_greedy_needs_batches_for_complements():
    f = single_minded(4, mask_of([1, 2]), 1.0)
    S0, tr0 = maximize.batched_greedy_constrained(f, 2, 0)
    assert tr0.value == 0                 # singletons have no gain; ties go to item 0
    S1, tr1 = maximize.batched_greedy_constrained(f, 2, 1)
    assert elements(S1) == [1, 2] and tr1.value == 1


def test_query_count_formula():
    f = instances.random_monotone(6, 3)
    f.reset_queries()
    S, tr = maximize.batched_greedy_constrained(f, 4, 1)
    # one base query per step, one per candidate batch, one final query
    expected = 1
    size = 0
    for step in tr.steps:
        s = min(2, 4 - size)
        expected += 1 + maximize.batch_candidates(6, 6 - size, s)
        size += len(elements(step.batch))
    assert tr.queries == f.query_count == expected


def test_argument_checks():
    f = additive([1, 1])
    with pytest.raises(InvalidArgument):
        maximize.batched_greedy_constrained(f, 0, 1)
    with pytest.raises(InvalidArgument):
        maximize.batched_greedy_constrained(f, 1, -1)
    with pytest.raises(InvalidArgument):
        maximize.batched_greedy_welfare([], 1)
    with pytest.raises(InvalidArgument):
        maximize.batched_greedy_welfare([additive([1]), additive([1, 1])], 0)


def test_allocation_rejects_overlap():
    with pytest.raises(InvalidArgument):
        maximize.Allocation([0b011, 0b110], 0.0)


def test_welfare_example():
    a = single_minded(3, 0b011, 5.0)
    b = additive([2.0, 2.0, 1.0])
    alloc, tr = maximize.batched_greedy_welfare([a, b], 1)
    assert [elements(p) for p in alloc.parts] == [[0, 1], [2]]
    assert alloc.welfare == 6.0
    best, opt = maximize.brute_force_welfare([a, b])
    assert opt == 6.0
    assert sum(f.eval(p) for f, p in zip([a, b], best.parts)) == opt
    assert all(s.agent is not None for s in tr.steps)


@given(functions, st.data())
def test_constrained_guarantee(f, data):
    k = data.draw(st.integers(1, f.m))
    d = widths.supermodular_width(f)
    S, tr = maximize.batched_greedy_constrained(f, k, d)
    assert bin(S).count("1") <= k
    best, opt = maximize.brute_force_constrained(f, k)
    assert opt == naive_best_k(list(f.table()), f.m, k)
    assert tr.value >= (1 - math.exp(-1 / (d + 1))) * opt - 1e-9
    bound = 2 * k * sum(math.comb(f.m, j) for j in range(1, d + 2))
    assert tr.queries <= bound


@given(st.lists(hypergraphs(min_m=3, max_m=3), min_size=2, max_size=3))
def test_welfare_guarantee_and_brute_force(fs):
    m = fs[0].m
    best, opt = maximize.brute_force_welfare(fs)
    assert opt == naive_welfare([list(f.table()) for f in fs], m)
    d = max(widths.supermodular_width(f) for f in fs)
    alloc, _ = maximize.batched_greedy_welfare(fs, d)
    assert alloc.welfare >= opt / (d + 2) - 1e-9
