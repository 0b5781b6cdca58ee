from fractions import Fraction

import pytest

from conftest import GF5, QQ
from repair_align.bridge import (
    MappingRecord,
    channel_to_code,
    code_to_channel,
    eavesdropper_index,
    lemma3_bounds,
    lemma5_bounds,
    transport_strategy,
    verify_theorem1,
    verify_theorem2,
)
from repair_align.constructions import inverse_alignment_repair
from repair_align.exact_linalg import Matrix, inverse
from repair_align.mds_code import generate_diagonal_code, generate_random_code, is_mds, node_permutation
from repair_align.repair import RepairStrategy, evaluate_repair
from repair_align.wiretap import BeamformingSet, ChannelInstance, generate_random_channel, sdof


def test_code_to_channel_421():
    code = generate_random_code(4, 2, 1, QQ, seed=7)
    chan, record = code_to_channel(code, 1)
    assert (chan.L, chan.N, chan.K) == (2, 1, 2)
    assert chan.legit == code.blocks[0] and chan.eaves[0] == code.blocks[1]
    assert record.eaves_index == ((2, 1),)


def test_code_to_channel_matches_permutation_product():
    code = generate_random_code(5, 3, 1, QQ, seed=1)
    for i in (1, 2, 3):
        chan, _ = code_to_channel(code, i)
        rows = [Matrix.hstack(list(chan.legit))] + [Matrix.hstack(list(r)) for r in chan.eaves]
        assert Matrix.vstack(rows) == node_permutation(code, i) @ code.matrix()


def test_eavesdropper_index():
    assert [eavesdropper_index(u, 2) for u in (1, 3, 4)] == [1, 2, 3]
    with pytest.raises(ValueError):
        eavesdropper_index(2, 2)


def test_diagonal_code_maps_to_diagonal_channel():
    chan, _ = code_to_channel(generate_diagonal_code(4, 2, 1, QQ, seed=0), 2)
    assert chan.structure == "diagonal"


def test_channel_to_code_round_trip():
    chan = generate_random_channel(3, 1, 2, QQ, seed=0)
    code, record = channel_to_code(chan)
    assert (code.n, code.k, code.beta) == (5, 2, 1) and record.mds and is_mds(code)
    back, _ = code_to_channel(code, 1)
    assert back == chan


def test_channel_to_code_flags_non_mds():
    chan = generate_random_channel(2, 1, 2, QQ, seed=0)
    planted = ChannelInstance(2, 1, 2, QQ, chan.legit, (chan.legit,))
    _, record = channel_to_code(planted)
    assert record.mds is False


def test_transport_aligned_strategy_and_back():
    code = generate_random_code(5, 2, 1, QQ, seed=4)
    s = inverse_alignment_repair(code, 1)
    chan, record = code_to_channel(code, 1)
    V = transport_strategy(s, record)
    assert sdof(chan, V).eta == Fraction(2, 3)
    back = transport_strategy(V, record)
    assert back.matrices == s.matrices and back.failed_node == 1


def test_transport_infeasible_stays_infeasible():
    code = generate_random_code(4, 2, 1, QQ, seed=7)
    e1 = Matrix.column(QQ, [1, 0])
    # both useful columns collapse onto e1
    s = RepairStrategy(1, [inverse(code.block(1, p)) @ e1 for p in (1, 2)])
    assert not evaluate_repair(code, s).feasible
    chan, record = code_to_channel(code, 1)
    assert sdof(chan, transport_strategy(s, record)).legit_rank < chan.side


def test_transport_shape_guard():
    code = generate_random_code(4, 2, 1, QQ, seed=7)
    _, record = code_to_channel(code, 1)
    with pytest.raises(ValueError):
        transport_strategy(BeamformingSet([Matrix.column(QQ, [1, 0, 0])] * 2), record)


@pytest.mark.parametrize("k", [2, 3, 5])
def test_sdof_bounds_endpoints(k):
    assert lemma3_bounds(k, Fraction(k)) == (0, 0)
    assert lemma3_bounds(k, Fraction(1)) == (1, 1)


def test_sdof_bounds_tight_for_two_pieces():
    n, k = 5, 2
    low, high = lemma3_bounds(k, Fraction(n - 1, n - k))
    assert low == max(Fraction(n - 2 * k + 1, n - k), 0) == high


def test_overhead_bounds_endpoints():
    assert lemma5_bounds(4, Fraction(0)) == (2, 4)
    L = 3
    assert lemma5_bounds(3, Fraction(L - 1, L))[0] == 1 + Fraction(1, L)
    for eta in (Fraction(0), Fraction(1, 3), Fraction(1)):
        lo, hi = lemma5_bounds(2, eta)
        assert lo == hi


def test_record_json_round_trip():
    code = generate_random_code(5, 3, 1, QQ, seed=1)
    _, record = code_to_channel(code, 2)
    assert MappingRecord.from_json(record.to_json()) == record


def test_verify_theorem1_gf5():
    code = generate_random_code(4, 2, 1, GF5, seed=7)
    rep = verify_theorem1(code, 1)
    assert rep.sum_rank == rep.max_rank == 1
    assert rep.sum_is_scaled_max and rep.optima_coincide
    assert rep.hypothesis_holds and rep.conclusion_holds and rep.lemma_consistent


def test_verify_theorem1_three_pieces():
    code = generate_random_code(5, 3, 1, GF5, seed=0)
    rep = verify_theorem1(code, 2)
    assert rep.lemma_consistent
    assert rep.overhead == 1 + Fraction(rep.sum_rank, 2)


def test_verify_theorem2_mirror():
    code = generate_random_code(4, 2, 1, GF5, seed=7)
    chan, _ = code_to_channel(code, 1)
    rep = verify_theorem2(chan)
    assert rep.optima_coincide and rep.hypothesis_holds and rep.sum_is_scaled_max


def test_verify_theorem2_unmet_hypothesis():
    chan = generate_random_channel(2, 1, 2, GF5, seed=0)
    planted = ChannelInstance(2, 1, 2, GF5, chan.legit, (chan.legit,))
    rep = verify_theorem2(planted)
    assert not rep.hypothesis_holds
    assert rep.max_rank == 2
