import math

import numpy as np
import pytest

from widthlab import auctions, instances, maximize
from widthlab.errors import InvalidArgument, ResourceLimit
from widthlab.setfn import additive, elements, mask_of, single_minded


def test_bid_grid():
    g = auctions.BidGrid.uniform(0.25, 1.0)
    assert g.levels == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert auctions.BidGrid.explicit([0, 1 / 3, 1]).delta == pytest.approx(2 / 3)
    with pytest.raises(InvalidArgument):
        auctions.BidGrid((0.5, 1.0), 0.5)
    with pytest.raises(InvalidArgument):
        auctions.BidGrid.uniform(0.0, 1.0)


def test_default_grid_bounded():
    fs = [additive([5, 1, 1])]
    g = auctions.default_grid(fs)
    assert g.levels[-1] >= 5.0
    assert len(g.levels) <= 65


def test_single_bid_descending_order_and_purchase_rule():
    a = additive([3, 3, 0])
    b = single_minded(3, mask_of([1, 2]), 4.0)
    out = auctions.single_bid_outcome([a, b], [1.0, 1.5])
    # b goes first at 1.5 per item: {1, 2} costs 3 for value 4
    assert [elements(p) for p in out.allocation.parts] == [[0], [1, 2]]
    assert out.payments == [1.0, 3.0]
    assert out.utilities == [2.0, 1.0]
    # price above every average value: nothing is bought
    out = auctions.single_bid_outcome([a, b], [4.0, 2.5])
    assert out.allocation.parts == [0, 0]


def test_single_bid_ties_prefer_fewer_items():
    a = additive([1, 1])
    out = auctions.single_bid_outcome([a], [1.0])   # every set has surplus 0
    assert elements(out.allocation.parts[0]) == [0]


def test_sia_outcome():
    fs = [additive([1, 1]), additive([1, 1])]
    out = auctions.sia_outcome(fs, [[0.5, 0.2], [0.5, 0.3]])
    assert [elements(p) for p in out.allocation.parts] == [[0], [1]]
    assert out.payments == [0.5, 0.3]
    with pytest.raises(InvalidArgument):
        auctions.sia_outcome(fs, [[0.5], [0.5]])


def test_smoothness_arithmetic():
    assert auctions.poa_from_smoothness(auctions.SmoothnessBound(0.5, 1.0)) == 2.0
    assert auctions.poa_from_smoothness(auctions.SmoothnessBound(0.5, 0.5)) == 2.0
    assert auctions.poa_upper_bound("ch", 1, None, "sia") == 2.0
    assert auctions.poa_upper_bound("ch", 1, None, "single-bid") == pytest.approx(1 / (1 - math.exp(-1)))
    assert auctions.poa_upper_bound("saw", 1, 2, "sia") == 8.0
    assert auctions.poa_upper_bound("saw", 1, 4, "sia") == pytest.approx(8 * 1.5)
    assert auctions.poa_upper_bound("saw", 1, 6, "single-bid") == pytest.approx(
        2 / (1 - math.exp(-2)) * (1 + 1 / 2 + 1 / 3))
    assert auctions.poa_upper_bound("smw-superadditive", 1, 4, "sia") == pytest.approx(8 * 1.5)
    assert auctions.poa_upper_bound("mph", 3, None, "sia") == 6.0
    with pytest.raises(InvalidArgument):
        auctions.poa_upper_bound("mph", 3, None, "single-bid")


def test_game_tables_match_outcomes():
    fs = [additive([1, 2]), single_minded(2, 0b11, 2.5)]
    grid = auctions.BidGrid.uniform(0.5, 1.5)
    for mech in auctions.MECHANISMS:
        game = auctions.build_game(mech, fs, grid)
        for prof in np.ndindex(game.shape):
            out = game.outcome(prof)
            assert np.allclose(game.utility[prof], out.utilities)
            assert game.welfare[prof] == pytest.approx(out.welfare)


def test_pure_nash_brute_force():
    fs = [additive([1, 2]), single_minded(2, 0b11, 2.5)]
    game = auctions.build_game("single-bid", fs, auctions.BidGrid.uniform(0.5, 1.5))
    mask = auctions.pure_nash_mask(game)
    for prof in np.ndindex(game.shape):
        stable = True
        for i in range(2):
            for a in range(game.shape[i]):
                dev = list(prof)
                dev[i] = a
                if game.utility[tuple(dev)][i] > game.utility[prof][i] + 1e-9:
                    stable = False
        assert mask[prof] == stable
    eqs = auctions.enumerate_pure_nash(game)
    ws = [o.welfare for _, o in eqs]
    assert ws == sorted(ws, reverse=True)


@pytest.mark.parametrize("d,expected", [(2, 2 / (2 / 3 + 0.1)), (3, 3 / (3 / 4 + 0.1))])
def test_single_bid_pos_instance_equilibria(d, expected):
    # frozen: in every equilibrium on the 0.01 grid the second bidder wins item 0
    fs = list(instances.single_bid_pos_instance(d, 0.1))
    grid = auctions.BidGrid.uniform(0.01, auctions.max_item_price(fs))
    game = auctions.build_game("single-bid", fs, grid)
    eqs = auctions.enumerate_pure_nash(game)
    assert eqs
    _, opt = maximize.brute_force_welfare(fs)
    best = eqs[0][1]
    assert opt / best.welfare == pytest.approx(expected)
    assert all(o.allocation.parts[1] == 1 for _, o in eqs)


def test_fano_plane_equilibria():
    pp = instances.projective_plane_instance(2)
    grid = auctions.BidGrid.explicit([0, 1 / 3, 2 / 3, 1])
    game = auctions.build_game("sia", pp.valuations(), grid, [[ln] for ln in pp.lines])
    assert game.shape == (4,) * 7
    eqs = auctions.enumerate_pure_nash(game)
    # frozen: 7 equilibria, each awarding one full line; OPT is 1 (lines pairwise meet)
    assert len(eqs) == 7
    assert {o.welfare for _, o in eqs} == {1.0}


def test_dynamics_deterministic_and_low_regret():
    fs = [additive([1, 2]), single_minded(2, 0b11, 2.5)]
    game = auctions.build_game("single-bid", fs, auctions.BidGrid.uniform(0.5, 1.5))
    for alg in ("regret-matching", "hedge"):
        a = auctions.no_regret_dynamics(game, 3000, seed=5, algorithm=alg, opt=2.5)
        b = auctions.no_regret_dynamics(game, 3000, seed=5, algorithm=alg, opt=2.5)
        assert a.to_dict() == b.to_dict()
        assert max(a.regrets) < 0.2
        assert 0 < a.avg_welfare <= 2.5 + 1e-9
    with pytest.raises(InvalidArgument):
        auctions.no_regret_dynamics(game, 0)
    with pytest.raises(InvalidArgument):
        auctions.no_regret_dynamics(game, 10, algorithm="fictitious")


def test_profile_cap():
    fs = [additive([1.0] * 3)] * 4
    with pytest.raises(ResourceLimit):
        auctions.build_game("single-bid", fs, auctions.BidGrid.uniform(0.01, 1.0))
