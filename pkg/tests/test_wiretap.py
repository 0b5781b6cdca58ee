import itertools
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import FL, GF5, QQ
from repair_align.bridge import code_to_channel
from repair_align.constructions import inverse_alignment_beamforming
from repair_align.errors import BudgetExceededError, DimensionError
from repair_align.exact_linalg import Matrix, ScalarDomain
from repair_align.mds_code import generate_random_code
from repair_align.wiretap import (
    BeamformingSet,
    ChannelInstance,
    eaves_matrix,
    empirical_dof,
    generate_random_channel,
    outer_bound,
    sdof,
    search_optimal_beamforming,
    secrecy_rate,
)


def brute_force_min_max(chan: ChannelInstance):
    """Raw enumeration of nonzero column beamformers (N = 1 only)."""
    dom = chan.domain
    vecs = [Matrix.column(dom, v) for v in itertools.product(range(dom.p), repeat=chan.side) if any(v)]
    best = None
    for mats in itertools.product(vecs, repeat=chan.L):
        rep = sdof(chan, BeamformingSet.raw(mats))
        if rep.legit_rank == chan.side:
            best = rep.max_eaves_rank if best is None else min(best, rep.max_eaves_rank)
    return best


def test_generate_shapes_and_reproducibility():
    chan = generate_random_channel(2, 1, 2, QQ, seed=3)
    assert len(chan.legit) == 2 and len(chan.eaves) == 1 and len(chan.eaves[0]) == 2
    assert all(b.shape == (2, 2) for b in chan.all_blocks())
    assert generate_random_channel(2, 1, 2, QQ, seed=3) == chan
    diag = generate_random_channel(2, 4, 2, QQ, seed=1, structure="diagonal")
    assert all(b.shape == (8, 8) and b.is_diagonal() for b in diag.all_blocks())


def test_bad_parameters():
    with pytest.raises(ValueError):
        generate_random_channel(2, 1, 1, QQ)
    with pytest.raises(ValueError):
        generate_random_channel(0, 1, 2, QQ)


def test_identity_selectors_give_zero_sdof():
    chan = generate_random_channel(3, 1, 2, QQ, seed=2)
    e1 = Matrix.identity(QQ, 3).submatrix(0, 3, 0, 1)
    rep = sdof(chan, BeamformingSet([e1] * 3))
    assert rep.eaves_ranks == (3,)
    assert rep.eta == 0


def test_inverse_alignment_meets_outer_bound():
    chan = generate_random_channel(3, 1, 2, QQ, seed=4)
    V = inverse_alignment_beamforming(chan, seed=0)
    rep = sdof(chan, V)
    assert rep.legit_rank == 3 and rep.eaves_ranks == (1,)
    assert rep.eta == Fraction(2, 3) and rep.meets_outer_bound
    chan = generate_random_channel(2, 3, 2, QQ, seed=5)
    rep = sdof(chan, inverse_alignment_beamforming(chan, seed=1))
    assert rep.eaves_ranks == (3,) and rep.legit_rank == 6 and rep.eta == Fraction(1, 2)


def test_sdof_invariant_clamp(rng):
    chan = generate_random_channel(2, 1, 3, QQ, seed=8)
    for _ in range(10):
        V = BeamformingSet([Matrix.column(QQ, [rng.integers(1, 9), rng.integers(-9, 9)]) for _ in range(2)])
        rep = sdof(chan, V)
        expect = Fraction(max(rep.legit_rank - max(rep.eaves_ranks), 0), chan.side)
        assert rep.eta == expect


@pytest.mark.parametrize("L,expected", [(1, Fraction(0)), (2, Fraction(1, 2)), (4, Fraction(3, 4))])
def test_outer_bound(L, expected):
    assert outer_bound(L) == expected


def test_search_matches_brute_force():
    for seed in range(3):
        chan = generate_random_channel(2, 1, 3, GF5, seed=seed)
        _, rep = search_optimal_beamforming(chan)
        assert rep.max_eaves_rank == brute_force_min_max(chan)


def test_search_on_mapped_code():
    code = generate_random_code(4, 2, 1, GF5, seed=7)
    chan, _ = code_to_channel(code, 1)
    V, rep = search_optimal_beamforming(chan)
    assert rep.max_eaves_rank == 1 and rep.eta == Fraction(1, 2)


def test_shared_legit_eaves_lower_bound():
    chan = generate_random_channel(2, 1, 2, GF5, seed=3)
    planted = ChannelInstance(2, 1, 2, GF5, chan.legit, ((chan.legit[0], chan.eaves[0][1]),))
    _, rep = search_optimal_beamforming(planted)
    assert rep.max_eaves_rank >= 1


def test_search_budget_guard():
    chan = generate_random_channel(4, 2, 2, ScalarDomain.prime_field(7), seed=0)
    with pytest.raises(BudgetExceededError):
        search_optimal_beamforming(chan)


def test_dimension_mismatch():
    chan = generate_random_channel(2, 1, 2, QQ, seed=0)
    with pytest.raises(DimensionError):
        sdof(chan, BeamformingSet([Matrix.identity(QQ, 3).submatrix(0, 3, 0, 1)] * 2))


# -- rates -------------------------------------------------------------------


def _float_example3(seed=4):
    chan = generate_random_channel(3, 1, 2, QQ, seed=seed)
    V = inverse_alignment_beamforming(chan, seed=0)
    return chan.to_domain(FL), V


def test_identical_observations_zero_rate():
    chan = generate_random_channel(2, 1, 2, FL, seed=1)
    same = ChannelInstance(2, 1, 2, FL, chan.legit, (chan.legit,))
    V = BeamformingSet([Matrix.column(FL, [1.0, 0.5]), Matrix.column(FL, [0.2, 1.0])])
    assert secrecy_rate(same, V, 1e6, 1.0) == 0.0


def test_unit_snr_rate_bound():
    chan, V = _float_example3()
    P, s2 = 1.0, 1.0
    rate = secrecy_rate(chan, V, P, s2)
    stack = np.hstack([b.to_numpy() for b in chan.legit])
    c = np.linalg.svd(stack, compute_uv=False)[0] ** 2
    assert 0 <= rate <= chan.side / 2 * math.log2(1 + P * c / s2)


def test_empirical_dof_convergence():
    chan, V = _float_example3()
    errs = [abs(empirical_dof(chan, V, 10.0**e, 1.0) - 2) for e in (6, 9, 12)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 0.1


def test_empirical_dof_monotone_across_seeds():
    for seed in range(30):
        chan, V = _float_example3(seed)
        errs = [abs(empirical_dof(chan, V, 10.0**e, 1.0) - 2) for e in (6, 9, 12)]
        assert errs[0] > errs[1] > errs[2]


def test_empirical_dof_scale_invariance():
    chan, V = _float_example3()
    a = empirical_dof(chan, V, 1e8, 1.0)
    b = empirical_dof(chan, V, 2e8, 2.0)
    assert a == pytest.approx(b, rel=1e-9)


def test_zero_sdof_rate_vanishes():
    chan = generate_random_channel(2, 1, 2, FL, seed=6)
    e1 = Matrix.identity(FL, 2).submatrix(0, 2, 0, 1)
    V = BeamformingSet([e1, e1])
    dofs = [empirical_dof(chan, V, 10.0**e, 1.0) for e in (6, 9, 12, 15)]
    assert all(a > b for a, b in zip(dofs, dofs[1:]))
    # the rate saturates, so the normalized value decays like 1 / log P
    rates = [secrecy_rate(chan, V, 10.0**e, 1.0) for e in (12, 15)]
    assert rates[1] - rates[0] < 1e-3


def test_rate_rejects_prime_field():
    chan = generate_random_channel(2, 1, 2, GF5, seed=1)
    V = BeamformingSet([Matrix.column(GF5, [1, 0])] * 2)
    with pytest.raises(ValueError):
        secrecy_rate(chan, V, 10.0, 1.0)
    fchan = generate_random_channel(2, 1, 2, FL, seed=1)
    with pytest.raises(ValueError):
        empirical_dof(fchan, BeamformingSet([Matrix.column(FL, [1.0, 0.0])] * 2), 0.5, 1.0)


def test_json_round_trips():
    chan = generate_random_channel(2, 1, 2, QQ, seed=2, structure="diagonal")
    assert ChannelInstance.from_json(json.loads(json.dumps(chan.to_json()))) == chan
    V = inverse_alignment_beamforming(chan, seed=0)
    assert BeamformingSet.from_json(json.loads(json.dumps(V.to_json()))) == V
    assert eaves_matrix(chan, V, 1).shape == (2, 2)
