"""Multiple-access compound wiretap channels and their secure degrees of freedom.

An (L, N)^{K-1} instance has L users, N symbols per user, one legitimate
receiver and K-1 eavesdroppers; every channel block is LN x LN.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _search
from .errors import DimensionError, NumericalError
from .exact_linalg import DEFAULT_BOUND, Matrix, ScalarDomain, random_matrix, rank


@dataclass(frozen=True)
class ChannelInstance:
    L: int
    N: int
    K: int
    domain: ScalarDomain
    legit: tuple  # L blocks H^(l)
    eaves: tuple  # K-1 rows of L blocks H_ev^(l)
    structure: str = "generic"

    def __post_init__(self) -> None:
        _check_params(self.L, self.N, self.K)
        object.__setattr__(self, "legit", tuple(self.legit))
        object.__setattr__(self, "eaves", tuple(tuple(r) for r in self.eaves))
        side = self.side
        if len(self.legit) != self.L or len(self.eaves) != self.K - 1 or any(len(r) != self.L for r in self.eaves):
            raise DimensionError(f"need {self.L} legitimate blocks and a {self.K - 1}x{self.L} eavesdropper grid")
        for b in self.all_blocks():
            if b.shape != (side, side) or b.domain != self.domain:
                raise DimensionError(f"channel blocks must be {side}x{side} over {self.domain}")
        if self.structure not in ("generic", "diagonal"):
            raise ValueError(f"unknown structure {self.structure!r}")
        if self.structure == "diagonal" and not all(b.is_diagonal() for b in self.all_blocks()):
            raise ValueError("diagonal-tagged channel has a non-diagonal block")

    @property
    def side(self) -> int:
        return self.L * self.N

    def all_blocks(self):
        yield from self.legit
        for row in self.eaves:
            yield from row

    def to_domain(self, domain: ScalarDomain) -> ChannelInstance:
        return ChannelInstance(
            self.L, self.N, self.K, domain,
            tuple(b.to_domain(domain) for b in self.legit),
            tuple(tuple(b.to_domain(domain) for b in row) for row in self.eaves),
            self.structure,
        )

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "N": self.N,
            "K": self.K,
            "structure": self.structure,
            "domain": self.domain.to_json(),
            "legit": [b.to_json() for b in self.legit],
            "eaves": [[b.to_json() for b in row] for row in self.eaves],
        }

    @classmethod
    def from_json(cls, obj: dict) -> ChannelInstance:
        return cls(
            int(obj["L"]), int(obj["N"]), int(obj["K"]),
            ScalarDomain.from_json(obj["domain"]),
            tuple(Matrix.from_json(b) for b in obj["legit"]),
            tuple(tuple(Matrix.from_json(b) for b in row) for row in obj["eaves"]),
            obj.get("structure", "generic"),
        )


@dataclass(frozen=True)
class BeamformingSet:
    """Beamforming matrices V^(l), each LN x N with full column rank."""

    mats: tuple
    provenance: dict | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mats", tuple(self.mats))
        if not self.mats:
            raise DimensionError("empty beamforming set")
        shape = self.mats[0].shape
        for v in self.mats:
            if v.shape != shape:
                raise DimensionError("beamforming matrices must share one shape")
            if rank(v) != v.cols:
                raise ValueError("beamforming matrix is not full column rank")

    @classmethod
    def raw(cls, mats: Sequence[Matrix]) -> BeamformingSet:
        obj = object.__new__(cls)
        object.__setattr__(obj, "mats", tuple(mats))
        object.__setattr__(obj, "provenance", None)
        return obj

    def to_json(self) -> dict:
        out = {"mats": [m.to_json() for m in self.mats]}
        if self.provenance:
            out["provenance"] = self.provenance
        return out

    @classmethod
    def from_json(cls, obj: dict) -> BeamformingSet:
        return cls(tuple(Matrix.from_json(m) for m in obj["mats"]), obj.get("provenance"))


@dataclass(frozen=True)
class SdofReport:
    legit_rank: int
    eaves_ranks: tuple
    eta: Fraction
    outer_bound: Fraction
    side: int

    @property
    def meets_outer_bound(self) -> bool:
        return self.eta == self.outer_bound

    @property
    def max_eaves_rank(self) -> int:
        return max(self.eaves_ranks) if self.eaves_ranks else 0

    def to_json(self) -> dict:
        return {
            "legit_rank": self.legit_rank,
            "eaves_ranks": list(self.eaves_ranks),
            "eta": f"{self.eta.numerator}/{self.eta.denominator}",
            "outer_bound": f"{self.outer_bound.numerator}/{self.outer_bound.denominator}",
            "meets_outer_bound": self.meets_outer_bound,
        }


def _check_params(L: int, N: int, K: int) -> None:
    if L < 1 or N < 1 or K < 2:
        raise ValueError(f"need L >= 1, N >= 1, K >= 2; got L={L}, N={N}, K={K}")


def generate_random_channel(
    L: int,
    N: int,
    K: int,
    domain: ScalarDomain,
    seed: int = 0,
    structure: str = "generic",
    bound: int = DEFAULT_BOUND,
) -> ChannelInstance:
    """Channel with i.i.d. entries (generic) or i.i.d. nonzero diagonals (diagonal)."""
    _check_params(L, N, K)
    rng = np.random.default_rng(seed)
    side = L * N

    def draw() -> Matrix:
        if structure == "diagonal":
            return Matrix.diag(domain, [domain.random_element(rng, bound, nonzero=True) for _ in range(side)])
        if structure != "generic":
            raise ValueError(f"unknown structure {structure!r}")
        return random_matrix(domain, side, side, rng, bound)

    legit = tuple(draw() for _ in range(L))
    eaves = tuple(tuple(draw() for _ in range(L)) for _ in range(K - 1))
    return ChannelInstance(L, N, K, domain, legit, eaves, structure)


def _check(chan: ChannelInstance, V: BeamformingSet) -> None:
    if len(V.mats) != chan.L:
        raise DimensionError(f"{len(V.mats)} beamformers for {chan.L} users")
    for v in V.mats:
        if v.domain != chan.domain:
            raise DimensionError(f"beamformer over {v.domain}, channel over {chan.domain}")
        if v.shape != (chan.side, chan.N):
            raise DimensionError(f"beamformer must be {chan.side}x{chan.N}, got {v.shape}")


def legit_matrix(chan: ChannelInstance, V: BeamformingSet) -> Matrix:
    _check(chan, V)
    return Matrix.hstack([h @ v for h, v in zip(chan.legit, V.mats)])


def eaves_matrix(chan: ChannelInstance, V: BeamformingSet, v: int) -> Matrix:
    """Eavesdropper ``v`` (1-based) observation space."""
    _check(chan, V)
    return Matrix.hstack([h @ b for h, b in zip(chan.eaves[v - 1], V.mats)])


def outer_bound(L: int) -> Fraction:
    if L < 1:
        raise ValueError("L must be >= 1")
    return Fraction(L - 1, L)


def sdof(chan: ChannelInstance, V: BeamformingSet) -> SdofReport:
    """Total S-DoF: [rank(legit) - max_v rank(eaves_v)]^+ / LN."""
    legit = rank(legit_matrix(chan, V))
    eaves = tuple(rank(eaves_matrix(chan, V, v)) for v in range(1, chan.K))
    eta = Fraction(max(legit - max(eaves), 0), chan.side)
    return SdofReport(legit, eaves, eta, outer_bound(chan.L), chan.side)


def beamforming_optima(
    chan: ChannelInstance, budget: int = _search.DEFAULT_BUDGET, jobs: int = 1
) -> _search.SearchOutcome:
    return _search.search(chan.domain, list(chan.legit), [list(r) for r in chan.eaves], chan.N, "max", budget, jobs)


def search_optimal_beamforming(
    chan: ChannelInstance, budget: int = _search.DEFAULT_BUDGET, jobs: int = 1
) -> tuple[BeamformingSet, SdofReport]:
    """Exhaustively minimize the largest eavesdropper rank with a full-rank legitimate space."""
    out = beamforming_optima(chan, budget, jobs)
    V = BeamformingSet(
        tuple(out.reps[j] for j in out.optima[0]),
        {"construction": "exhaustive-search", "candidates": out.evaluated},
    )
    return V, sdof(chan, V)


# -- finite-SNR rates ------------------------------------------------------


def _float_blocks(chan: ChannelInstance):
    if chan.domain.kind == "prime_field":
        raise ValueError("secrecy rates need a real-valued channel (float or rational domain)")
    legit = [b.to_numpy() for b in chan.legit]
    eaves = [[b.to_numpy() for b in row] for row in chan.eaves]
    return legit, eaves


def _normalized(V: BeamformingSet, power: float) -> list[np.ndarray]:
    out = []
    for v in V.mats:
        q, _ = np.linalg.qr(v.to_numpy())
        out.append(q * math.sqrt(power / v.cols))
    return out


def _half_logdet(blocks, vs, sigma2: float) -> float:
    side = blocks[0].shape[0]
    gram = np.eye(side)
    for h, v in zip(blocks, vs):
        hv = h @ v
        gram = gram + (hv @ hv.T) / sigma2
    gram = (gram + gram.T) / 2
    sign, logdet = np.linalg.slogdet(gram)
    if sign <= 0 or not np.isfinite(logdet):
        raise NumericalError("covariance matrix is not positive definite")
    return 0.5 * logdet / math.log(2)


def secrecy_rate(chan: ChannelInstance, V: BeamformingSet, power: float, sigma2: float) -> float:
    """Clamped difference of legitimate and worst-eavesdropper log-det rates, in bits per channel use.

    Each V^(l) is orthonormalized and scaled by sqrt(P/N) first.
    """
    if power <= 0 or sigma2 <= 0:
        raise ValueError("power and noise variance must be positive")
    if len(V.mats) != chan.L or any(v.shape != (chan.side, chan.N) for v in V.mats):
        raise DimensionError(f"need {chan.L} beamformers of shape {chan.side}x{chan.N}")
    legit, eaves = _float_blocks(chan)
    vs = _normalized(V, power)
    r_legit = _half_logdet(legit, vs, sigma2)
    r_eaves = max(_half_logdet(row, vs, sigma2) for row in eaves)
    return max(r_legit - r_eaves, 0.0)


def empirical_dof(chan: ChannelInstance, V: BeamformingSet, power: float, sigma2: float) -> float:
    """Secrecy rate normalized by (1/2) log2(P / sigma^2)."""
    snr = power / sigma2
    if snr <= 1:
        raise ValueError("empirical DoF needs P / sigma^2 > 1")
    return secrecy_rate(chan, V, power, sigma2) / (0.5 * math.log2(snr))
