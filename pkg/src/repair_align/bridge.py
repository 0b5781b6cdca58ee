"""Code <-> channel mappings, strategy transport, bound calculators and equivalence checks.

Parameter dictionary: L = n - k parity nodes / users, N = beta, K = k.
For the code-to-channel direction at failed node i, the legitimate blocks are
A_i^(l) and eavesdropper v sees the blocks of piece u with v = u for u < i and
v = u - 1 for u > i.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

from . import _search
from .errors import DimensionError
from .mds_code import MdsCode, is_mds, piece_order
from .repair import RepairStrategy, evaluate_repair, repair_optima
from .wiretap import BeamformingSet, ChannelInstance, beamforming_optima, sdof


def _frac(x: Fraction | None):
    return None if x is None else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class MappingRecord:
    direction: str  # "code_to_channel" | "channel_to_code"
    n: int
    k: int
    beta: int
    L: int
    N: int
    K: int
    node: int
    eaves_index: tuple  # (u, v) pairs
    mds: bool | None = None

    def to_json(self) -> dict:
        out = asdict(self)
        out["eaves_index"] = [{"u": u, "v": v} for u, v in self.eaves_index]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> MappingRecord:
        obj = dict(obj)
        obj["eaves_index"] = tuple((e["u"], e["v"]) for e in obj["eaves_index"])
        return cls(**obj)


def eavesdropper_index(u: int, i: int) -> int:
    if u == i:
        raise ValueError("the failed piece is the legitimate receiver, not an eavesdropper")
    return u if u < i else u - 1


def code_to_channel(code: MdsCode, i: int) -> tuple[ChannelInstance, MappingRecord]:
    """Read P_i A as an (n-k, beta)^{k-1} channel."""
    order = piece_order(code.k, i)
    if code.k < 2:
        raise ValueError("a k = 1 code has no interfering pieces and maps to no wiretap channel")
    legit = code.blocks[i - 1]
    eaves = tuple(code.blocks[u - 1] for u in order[1:])
    structure = "diagonal" if code.is_diagonal() else "generic"
    chan = ChannelInstance(code.parities, code.beta, code.k, code.domain, legit, eaves, structure)
    record = MappingRecord(
        "code_to_channel", code.n, code.k, code.beta, chan.L, chan.N, chan.K, i,
        tuple((u, eavesdropper_index(u, i)) for u in order[1:]),
    )
    return chan, record


def channel_to_code(chan: ChannelInstance) -> tuple[MdsCode, MappingRecord]:
    """Read H as an (L+K, K)_N code; the MDS property is checked and recorded, never assumed."""
    blocks = (chan.legit,) + chan.eaves
    code = MdsCode(chan.L + chan.K, chan.K, chan.N, chan.domain, blocks)
    record = MappingRecord(
        "channel_to_code", code.n, code.k, code.beta, chan.L, chan.N, chan.K, 1,
        tuple((u, u - 1) for u in range(2, chan.K + 1)),
        is_mds(code),
    )
    return code, record


def transport_strategy(obj: RepairStrategy | BeamformingSet, record: MappingRecord):
    """Identity transport of the matrix list between the two settings."""
    mats = obj.mats if isinstance(obj, BeamformingSet) else obj.matrices
    if len(mats) != record.L:
        raise DimensionError(f"{len(mats)} matrices, mapped instance has {record.L} slots")
    for m in mats:
        if m.shape != (record.L * record.N, record.N):
            raise DimensionError(f"matrix shape {m.shape} does not fit the mapped instance")
    if isinstance(obj, RepairStrategy):
        if obj.failed_node != record.node:
            raise ValueError(f"strategy repairs node {obj.failed_node}, mapping is for node {record.node}")
        return BeamformingSet.raw(mats)
    return RepairStrategy.raw(record.node, mats)


def lemma3_bounds(k: int, delta: Fraction) -> tuple[Fraction, Fraction]:
    """S-DoF bounds of the mapped channel given repair overhead delta: ([2 - delta]^+, (k - delta)/(k - 1))."""
    if k <= 1:
        raise ValueError("k = 1 maps to a channel without eavesdroppers")
    delta = Fraction(delta)
    return max(2 - delta, Fraction(0)), (k - delta) / (k - 1)


def lemma5_bounds(K: int, eta: Fraction) -> tuple[Fraction, Fraction]:
    """Repair-overhead bounds of the mapped code given S-DoF eta: (2 - eta, 1 + (K-1)(1 - eta))."""
    if K < 2:
        raise ValueError("K must be >= 2")
    eta = Fraction(eta)
    if not 0 <= eta <= 1:
        raise ValueError("eta must lie in [0, 1]")
    return 2 - eta, 1 + (K - 1) * (1 - eta)


@dataclass(frozen=True)
class EquivalenceReport:
    theorem: str
    sum_rank: int
    max_rank: int
    sum_is_scaled_max: bool
    optima_coincide: bool
    repair_optima: int
    beamforming_optima: int
    hypothesis_holds: bool
    conclusion_holds: bool
    overhead: Fraction
    eta: Fraction
    lemma_consistent: bool

    def to_json(self) -> dict:
        out = asdict(self)
        out["overhead"] = _frac(self.overhead)
        out["eta"] = _frac(self.eta)
        return out


def _compare(theorem, repair_out, bf_out, k, beta, alpha, consistent) -> EquivalenceReport:
    sum_rank, max_rank = repair_out.best, bf_out.best
    return EquivalenceReport(
        theorem=theorem,
        sum_rank=sum_rank,
        max_rank=max_rank,
        sum_is_scaled_max=sum_rank == (k - 1) * max_rank,
        optima_coincide=repair_out.reps == bf_out.reps and set(repair_out.optima) == set(bf_out.optima),
        repair_optima=len(repair_out.optima),
        beamforming_optima=len(bf_out.optima),
        hypothesis_holds=(sum_rank == (k - 1) * beta) if theorem == "theorem1" else (max_rank == beta),
        conclusion_holds=sum_rank == (k - 1) * beta and max_rank == beta,
        overhead=Fraction(alpha + sum_rank, alpha),
        eta=Fraction(max(alpha - max_rank, 0), alpha),
        lemma_consistent=consistent,
    )


def _lemma_consistent(code: MdsCode, chan: ChannelInstance, strategy: RepairStrategy, V: BeamformingSet) -> bool:
    """Check eta and delta against each other on one transported pair."""
    rep = evaluate_repair(code, strategy)
    s = sdof(chan, V)
    alpha = code.alpha
    if not rep.feasible or s.legit_rank != alpha:
        return False
    eta_ok = s.eta == Fraction(max(alpha - max(rep.interference_ranks), 0), alpha)
    delta_ok = rep.overhead == 1 + Fraction(sum(s.eaves_ranks), alpha)
    return eta_ok and delta_ok


def verify_theorem1(code: MdsCode, i: int, budget: int = _search.DEFAULT_BUDGET, jobs: int = 1) -> EquivalenceReport:
    """Solve problem R at node i and problem V on P_i A exhaustively; compare optima."""
    repair_out = repair_optima(code, i, budget, jobs)
    chan, record = code_to_channel(code, i)
    bf_out = beamforming_optima(chan, budget, jobs)
    strategy = RepairStrategy(i, tuple(repair_out.reps[j] for j in repair_out.optima[0]))
    V = transport_strategy(strategy, record)
    return _compare(
        "theorem1", repair_out, bf_out, code.k, code.beta, code.alpha,
        _lemma_consistent(code, chan, strategy, V),
    )


def verify_theorem2(chan: ChannelInstance, budget: int = _search.DEFAULT_BUDGET, jobs: int = 1) -> EquivalenceReport:
    """Solve problem V on H and problem R at node 1 of the code A = H; compare optima."""
    bf_out = beamforming_optima(chan, budget, jobs)
    code, record = channel_to_code(chan)
    repair_out = repair_optima(code, 1, budget, jobs)
    V = BeamformingSet(tuple(bf_out.reps[j] for j in bf_out.optima[0]))
    strategy = transport_strategy(V, record)
    return _compare(
        "theorem2", repair_out, bf_out, chan.K, chan.N, chan.side,
        _lemma_consistent(code, chan, strategy, V),
    )
