"""Explicit alignment constructions.

Inverse alignment: with one harmful space per slot, choosing
``X_s = G_s^{-1} W`` makes every harmful product equal to ``W``.

Symbol extension: for diagonal channels/codes, a shared matrix whose columns
are ``(prod_j D_j^{a_j}) w`` over all exponent tuples ``a`` in {1..Delta}^T.
Multiplying by any harmful D_j only shifts one exponent up by one, so harmful
spaces stay inside the span of the (Delta+1)^T shifted products.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import GenerationFailedError, InfeasibleStrategyError, SingularMatrixError
from .exact_linalg import Matrix, inverse, random_full_column_rank, rank
from .mds_code import MdsCode, piece_order
from .repair import RepairStrategy, repair_feasible
from .wiretap import BeamformingSet, ChannelInstance, legit_matrix

RETRY_BOUND = 64


def _inverses(blocks, label: str) -> list[Matrix]:
    out = []
    for idx, b in enumerate(blocks, start=1):
        try:
            out.append(inverse(b))
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"{label}^({idx}) is singular") from exc
    return out


def inverse_alignment_repair(code: MdsCode, i: int, seed: int = 0, retries: int = RETRY_BOUND) -> RepairStrategy:
    """R_i^(p) = (A_u^(p))^{-1} W for the single interfering piece u of a k = 2 code."""
    if code.k != 2:
        raise ValueError(f"inverse alignment needs k = 2, got k = {code.k}")
    if i not in (1, 2):
        raise IndexError(f"failed node {i} outside 1..2")
    u = 3 - i
    invs = _inverses(code.blocks[u - 1], f"A_{u}")
    rng = np.random.default_rng(seed)
    for attempt in range(retries):
        W = random_full_column_rank(code.domain, code.alpha, code.beta, rng)
        strategy = RepairStrategy(
            i, tuple(a_inv @ W for a_inv in invs),
            {"construction": "inverse-alignment", "seed": seed, "attempt": attempt},
        )
        if repair_feasible(code, strategy):
            return strategy
    raise InfeasibleStrategyError(f"no generator W gave a feasible repair after {retries} draws")


def inverse_alignment_beamforming(chan: ChannelInstance, seed: int = 0, retries: int = RETRY_BOUND) -> BeamformingSet:
    """V^(l) = (H_e1^(l))^{-1} W for a single-eavesdropper channel."""
    if chan.K != 2:
        raise ValueError(f"inverse alignment needs K = 2, got K = {chan.K}")
    invs = _inverses(chan.eaves[0], "H_e1")
    rng = np.random.default_rng(seed)
    for attempt in range(retries):
        W = random_full_column_rank(chan.domain, chan.side, chan.N, rng)
        V = BeamformingSet(
            tuple(h_inv @ W for h_inv in invs),
            {"construction": "inverse-alignment", "seed": seed, "attempt": attempt},
        )
        if rank(legit_matrix(chan, V)) == chan.side:
            return V
    raise InfeasibleStrategyError(f"legitimate space stayed rank deficient after {retries} draws")


@dataclass(frozen=True)
class SymbolExtensionPlan:
    """Exponent grid {1..delta}^(terms) with terms = (K-1) L."""

    L: int
    K: int
    delta: int

    def __post_init__(self) -> None:
        if self.L < 1 or self.K < 2 or self.delta < 1:
            raise ValueError("need L >= 1, K >= 2, delta >= 1")

    @property
    def terms(self) -> int:
        return (self.K - 1) * self.L

    @property
    def N(self) -> int:
        return self.delta**self.terms

    @property
    def side(self) -> int:
        return self.L * self.N

    @property
    def factor_order(self) -> list[tuple[int, int]]:
        """(user, eavesdropper) pairs: user outer, eavesdropper inner."""
        return [(l, v) for l in range(1, self.L + 1) for v in range(1, self.K)]

    def exponent_grid(self) -> list[tuple[int, ...]]:
        """Odometer order, last factor fastest."""
        return list(itertools.product(range(1, self.delta + 1), repeat=self.terms))


def _product_matrix(domain, factors, plan: SymbolExtensionPlan, seed: int, retries: int) -> Matrix:
    diags = [f.diagonal() for f in factors]
    side = plan.side
    grid = plan.exponent_grid()
    rng = np.random.default_rng(seed)
    # powers[j][a][t] = diags[j][t] ** a
    powers = []
    for d in diags:
        table = [[domain.one] * side]
        for _ in range(plan.delta):
            table.append([domain.mul(x, y) for x, y in zip(table[-1], d)])
        powers.append(table)
    for _ in range(retries):
        w = [domain.random_element(rng, nonzero=True) for _ in range(side)]
        columns = []
        for alpha in grid:
            col = list(w)
            for j, a in enumerate(alpha):
                col = [domain.mul(x, y) for x, y in zip(col, powers[j][a])]
            columns.append(col)
        V = Matrix(domain, plan.N, side, tuple(x for c in columns for x in c)).T
        if rank(V) == plan.N:
            return V
    raise GenerationFailedError(f"product beamformer stayed rank deficient after {retries} draws of w")


def symbol_extension_beamforming(
    chan: ChannelInstance, delta: int, seed: int = 0, retries: int = RETRY_BOUND
) -> BeamformingSet:
    """Shared beamformer built from products of powers of all eavesdropper channels."""
    plan = SymbolExtensionPlan(chan.L, chan.K, delta)
    if chan.N != plan.N:
        raise ValueError(f"channel has N={chan.N}, symbol extension with delta={delta} needs N={plan.N}")
    if not all(b.is_diagonal() for b in chan.all_blocks()):
        raise ValueError("symbol extension requires diagonal channel matrices")
    factors = [chan.eaves[v - 1][l - 1] for l, v in plan.factor_order]
    V = _product_matrix(chan.domain, factors, plan, seed, retries)
    return BeamformingSet(
        (V,) * chan.L, {"construction": "symbol-extension", "delta": delta, "seed": seed}
    )


def symbol_extension_repair(
    code: MdsCode, delta: int, i: int = 1, seed: int = 0, retries: int = RETRY_BOUND
) -> RepairStrategy:
    """The same product construction on a diagonal code, interfering blocks in the eavesdropper role."""
    if not code.is_diagonal():
        raise ValueError("symbol extension repair requires a diagonal code")
    plan = SymbolExtensionPlan(code.parities, code.k, delta)
    if code.beta != plan.N:
        raise ValueError(f"code has beta={code.beta}, delta={delta} needs beta={plan.N}")
    others = piece_order(code.k, i)[1:]
    factors = [code.block(others[v - 1], p) for p, v in plan.factor_order]
    V = _product_matrix(code.domain, factors, plan, seed, retries)
    return RepairStrategy(
        i, (V,) * code.parities, {"construction": "symbol-extension", "delta": delta, "seed": seed}
    )


def eq13_guarantee(L: int, K: int, delta: int) -> Fraction:
    """Guaranteed S-DoF of the symbol-extension scheme: [L D^T - (D+1)^T]^+ / (L D^T), T = (K-1) L."""
    if L < 1 or K < 2 or delta < 1:
        raise ValueError("need L >= 1, K >= 2, delta >= 1")
    t = (K - 1) * L
    side = L * delta**t
    return Fraction(max(side - (delta + 1) ** t, 0), side)
