import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from widthlab import approx, instances, widths
from widthlab.errors import InvalidArgument, ResourceLimit
from widthlab.setfn import CHFunction, additive, elements, mask_of, single_minded

from strategies import hypergraphs


def test_harmonic_and_guarantee():
    assert approx.harmonic(1) == 1.0
    assert approx.harmonic(3) == pytest.approx(1 + 1 / 2 + 1 / 3)
    with pytest.raises(InvalidArgument):
        approx.harmonic(0)
    assert approx.block_bound(2, "saw") == 4
    assert approx.block_bound(2, "smw") == 3
    with pytest.raises(InvalidArgument):
        approx.block_bound(0, "saw")
    # 2 H(ceil(8/4)) and 3 H(ceil(8/3))
    assert approx.guarantee(2, 8, "saw") == pytest.approx(2 * 1.5)
    assert approx.guarantee(2, 8, "smw") == pytest.approx(3 * (1 + 1 / 2 + 1 / 3))
    assert approx.guarantee(1, 0, "saw") == 1.0


def test_greedy_partition_prefers_heavy_then_large_blocks():
    f = instances.pair_matching(2)           # pairs {0,2} and {1,3}
    part = approx.greedy_partition(f, 2)
    assert [elements(q) for q in part.blocks] == [[0, 2], [1, 3]]
    assert part.values == [1.0, 1.0]
    assert part.is_aligned(mask_of([0, 2]))
    assert not part.is_aligned(mask_of([0, 1]))
    assert part.union(0b10) == mask_of([1, 3])


def test_pair_matching_certificate_is_exact():
    f = instances.pair_matching(3)
    cert = approx.find_pointwise_approximator(f, 1, mode="saw")
    assert cert.verified
    assert cert.beta == pytest.approx(1.0)
    g = cert.approximator
    assert np.all(g.table() <= f.table() + 1e-9)


def test_single_minded_needs_one_block():
    f = single_minded(5, mask_of([0, 3]), 2.0)
    cert = approx.find_pointwise_approximator(f, 1, mode="saw")
    assert cert.verified and cert.beta == pytest.approx(1.0)
    assert [elements(q) for q in cert.approximator.blocks] == [[0, 3]]


def test_additive_certificate_within_harmonic_bound():
    f = additive([4, 3, 2, 1, 1, 1])
    cert = approx.find_pointwise_approximator(f, 1, mode="smw")
    assert cert.verified
    assert cert.beta <= cert.guarantee + 1e-9


def test_zero_target():
    f = additive([1, 1, 1])
    cert = approx.find_pointwise_approximator(f, 1, S=0)
    assert cert.verified and cert.approximator.base == 0.0


def test_verify_pointwise():
    f = additive([1, 1])
    good = CHFunction(2, 1.0, [0b01], 2)
    assert approx.verify_pointwise(f, good, 0b11, 2.0)
    assert not approx.verify_pointwise(f, good, 0b11, 1.5)
    too_big = CHFunction(2, 1.5, [0b01], 2)
    assert not approx.verify_pointwise(f, too_big, 0b01, 1.0)


def test_candidate_must_align():
    f = instances.pair_matching(2)
    part = approx.greedy_partition(f, 2)
    with pytest.raises(InvalidArgument):
        approx.ch_candidate(f, part, mask_of([0, 1]), 1.0)
    g = approx.ch_candidate(f, part, mask_of([0, 2]), 2.0)
    assert g.base == pytest.approx(2.0 / (2.0 * 2))


def test_caps():
    with pytest.raises(ResourceLimit):
        approx.find_pointwise_approximator(additive([1.0] * 13), 1)


@given(hypergraphs(min_m=2, max_m=6), st.data())
def test_saw_certificates(f, data):
    d = max(widths.superadditive_width(f), 1)
    S = data.draw(st.integers(0, f.full))
    cert = approx.find_pointwise_approximator(f, d, S, mode="saw")
    assert cert.verified
    assert cert.beta <= approx.guarantee(d, bin(S).count("1"), "saw") + 1e-9
    assert approx.verify_pointwise(f, cert.approximator, S, cert.beta)


@given(hypergraphs(min_m=2, max_m=6))
def test_smw_certificates_on_superadditive(f):
    # nonnegative hypergraphs are superadditive
    assert approx.is_superadditive(f)
    d = widths.supermodular_width(f)
    cert = approx.find_pointwise_approximator(f, d, mode="smw")
    assert cert.verified
