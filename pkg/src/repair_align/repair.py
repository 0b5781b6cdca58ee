"""Exact repair of a single failed systematic node.

Parity node ``p`` sends ``R^(p).T @ content_p`` (beta symbols); the newcomer
cancels the interference of every other piece ``u`` by downloading a basis of
that piece's interference row space from systematic node ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import _search
from .errors import (
    DimensionError,
    InconsistentContentsError,
    InfeasibleStrategyError,
    NoFeasibleSolutionError,
)
from .exact_linalg import Matrix, inverse, random_full_column_rank, rank, rref
from .mds_code import MdsCode, NodeContent


@dataclass(frozen=True)
class RepairStrategy:
    """Repair matrices R_i^(p), one alpha x beta matrix per parity node."""

    failed_node: int
    matrices: tuple
    provenance: dict | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrices", tuple(self.matrices))
        if not self.matrices:
            raise DimensionError("strategy needs at least one repair matrix")
        shape = self.matrices[0].shape
        for r in self.matrices:
            if r.shape != shape:
                raise DimensionError("repair matrices must share one shape")
            if rank(r) != r.cols:
                raise ValueError("repair matrix is not full column rank (wasted downloads)")

    @classmethod
    def raw(cls, failed_node: int, matrices: Sequence[Matrix]) -> RepairStrategy:
        """Build without the full-column-rank check, for raw computations."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "failed_node", failed_node)
        object.__setattr__(obj, "matrices", tuple(matrices))
        object.__setattr__(obj, "provenance", None)
        return obj

    @property
    def beta(self) -> int:
        return self.matrices[0].cols

    def to_json(self) -> dict:
        out = {"failed_node": self.failed_node, "matrices": [m.to_json() for m in self.matrices]}
        if self.provenance:
            out["provenance"] = self.provenance
        return out

    @classmethod
    def from_json(cls, obj: dict) -> RepairStrategy:
        return cls(int(obj["failed_node"]), tuple(Matrix.from_json(m) for m in obj["matrices"]), obj.get("provenance"))


@dataclass(frozen=True)
class RepairReport:
    failed_node: int
    feasible: bool
    interference_nodes: tuple
    interference_ranks: tuple
    overhead: Fraction | None
    parity_download: int

    @property
    def systematic_downloads(self) -> tuple:
        return self.interference_ranks

    def to_json(self) -> dict:
        return {
            "failed_node": self.failed_node,
            "feasible": self.feasible,
            "interference_ranks": {str(u): r for u, r in zip(self.interference_nodes, self.interference_ranks)},
            "overhead": None if self.overhead is None else f"{self.overhead.numerator}/{self.overhead.denominator}",
            "parity_download": self.parity_download,
            "systematic_downloads": {str(u): r for u, r in zip(self.interference_nodes, self.interference_ranks)},
        }


def _check(code: MdsCode, s: RepairStrategy) -> None:
    if not 1 <= s.failed_node <= code.k:
        raise IndexError(f"failed node {s.failed_node} outside 1..{code.k}")
    if len(s.matrices) != code.parities:
        raise DimensionError(f"strategy has {len(s.matrices)} matrices, code has {code.parities} parities")
    for r in s.matrices:
        if r.domain != code.domain:
            raise DimensionError(f"strategy over {r.domain}, code over {code.domain}")
        if r.shape != (code.alpha, code.beta):
            raise DimensionError(f"repair matrix must be {code.alpha}x{code.beta}, got {r.shape}")


def parity_transmissions(code: MdsCode, s: RepairStrategy) -> list[Matrix]:
    """Per parity, the beta x k*alpha coefficients of its transmitted equations on f."""
    _check(code, s)
    return [
        Matrix.hstack([(code.blocks[u][p] @ r).T for u in range(code.k)])
        for p, r in enumerate(s.matrices)
    ]


def space_matrix(code: MdsCode, s: RepairStrategy, u: int) -> Matrix:
    """[A_u^(1) R^(1) ... A_u^(n-k) R^(n-k)] for 1-based piece ``u``."""
    return Matrix.hstack([code.blocks[u - 1][p] @ r for p, r in enumerate(s.matrices)])


def useful_matrix(code: MdsCode, s: RepairStrategy) -> Matrix:
    _check(code, s)
    return space_matrix(code, s, s.failed_node)


def repair_feasible(code: MdsCode, s: RepairStrategy) -> bool:
    return rank(useful_matrix(code, s)) == code.alpha


def interference_rank(code: MdsCode, s: RepairStrategy, u: int) -> int:
    _check(code, s)
    if u == s.failed_node:
        raise ValueError("the failed piece does not interfere with itself")
    if not 1 <= u <= code.k:
        raise IndexError(f"piece {u} outside 1..{code.k}")
    return rank(space_matrix(code, s, u))


def evaluate_repair(code: MdsCode, s: RepairStrategy) -> RepairReport:
    feasible = repair_feasible(code, s)
    nodes = tuple(u for u in range(1, code.k + 1) if u != s.failed_node)
    ranks = tuple(rank(space_matrix(code, s, u)) for u in nodes)
    delta = Fraction(code.alpha + sum(ranks), code.alpha) if feasible else None
    return RepairReport(s.failed_node, feasible, nodes, ranks, delta, code.alpha)


def repair_overhead(code: MdsCode, s: RepairStrategy) -> Fraction:
    """delta = 1 + sum_u rank(interference_u) / ((n-k) beta)."""
    report = evaluate_repair(code, s)
    if not report.feasible:
        raise InfeasibleStrategyError("useful-data matrix is rank deficient")
    return report.overhead


@dataclass(frozen=True)
class DownloadPlan:
    """What the newcomer fetches from each surviving systematic node.

    ``basis[u]`` rows are the combinations requested from node ``u``;
    ``expand[u]`` maps those downloaded symbols back to the interference
    term of ``y``.
    """

    failed_node: int
    basis: dict
    expand: dict
    parity_symbols: int

    @property
    def total_symbols(self) -> int:
        return self.parity_symbols + sum(b.rows for b in self.basis.values())


def plan_downloads(code: MdsCode, s: RepairStrategy) -> DownloadPlan:
    basis, expand = {}, {}
    for u in range(1, code.k + 1):
        if u == s.failed_node:
            continue
        coeff = space_matrix(code, s, u).T  # interference on y is coeff @ f_u
        reduced, piv = rref(coeff)
        basis[u] = reduced.submatrix(0, len(piv), 0, code.alpha)
        # rows of coeff lie in the row space; their coordinates sit at the pivot columns
        expand[u] = coeff.select_columns(piv) if piv else Matrix.zeros(code.domain, code.alpha, 0)
    return DownloadPlan(s.failed_node, basis, expand, code.alpha)


def reconstruct(code: MdsCode, s: RepairStrategy, surviving: Sequence[NodeContent]) -> Matrix:
    """Regenerate f_i from the n-1 surviving nodes' contents."""
    _check(code, s)
    i = s.failed_node
    by_key = {(c.kind, c.index): c.data for c in surviving}
    needed = [("systematic", u) for u in range(1, code.k + 1) if u != i]
    needed += [("parity", p) for p in range(1, code.parities + 1)]
    missing = [key for key in needed if key not in by_key]
    if missing:
        raise DimensionError(f"missing surviving contents for {missing}")

    useful = useful_matrix(code, s)
    if rank(useful) != code.alpha:
        raise InfeasibleStrategyError("useful-data matrix is rank deficient")

    y = Matrix.vstack([r.T @ by_key[("parity", p + 1)] for p, r in enumerate(s.matrices)])
    plan = plan_downloads(code, s)
    for u, b in plan.basis.items():
        if b.rows == 0:
            continue
        downloaded = b @ by_key[("systematic", u)]
        y = y - plan.expand[u] @ downloaded
    f_i = inverse(useful.T) @ y

    # parity contents are fully determined by the pieces; check them
    pieces = {u: by_key[("systematic", u)] for u in range(1, code.k + 1) if u != i}
    pieces[i] = f_i
    for p in range(code.parities):
        expected = Matrix.zeros(code.domain, code.alpha, 1)
        for u in range(1, code.k + 1):
            expected = expected + code.blocks[u - 1][p].T @ pieces[u]
        if expected != by_key[("parity", p + 1)]:
            raise InconsistentContentsError(f"parity node {p + 1} content is inconsistent with the code")
    return f_i


def repair_optima(code: MdsCode, i: int, budget: int = _search.DEFAULT_BUDGET, jobs: int = 1) -> _search.SearchOutcome:
    """Exhaustive search of problem R at node ``i`` over column-space classes."""
    if not 1 <= i <= code.k:
        raise IndexError(f"failed node {i} outside 1..{code.k}")
    useful = [code.blocks[i - 1][p] for p in range(code.parities)]
    harmful = [[code.blocks[u - 1][p] for p in range(code.parities)] for u in range(1, code.k + 1) if u != i]
    return _search.search(code.domain, useful, harmful, code.beta, "sum", budget, jobs)


def search_optimal_repair(
    code: MdsCode,
    i: int,
    mode: str = "exhaustive",
    trials: int = 200,
    budget: int = _search.DEFAULT_BUDGET,
    jobs: int = 1,
    seed: int = 0,
) -> tuple[RepairStrategy, RepairReport]:
    """Minimize the sum of interference ranks subject to full-rank useful data.

    ``exhaustive`` (prime fields only) is exact with a lexicographic tie-break;
    ``randomized`` keeps the best of ``trials`` random strategies.
    """
    if mode == "exhaustive":
        out = repair_optima(code, i, budget, jobs)
        mats = tuple(out.reps[j] for j in out.optima[0])
        strategy = RepairStrategy(i, mats, {"construction": "exhaustive-search", "candidates": out.evaluated})
        return strategy, evaluate_repair(code, strategy)
    if mode != "randomized":
        raise ValueError(f"unknown search mode {mode!r}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(trials):
        mats = tuple(random_full_column_rank(code.domain, code.alpha, code.beta, rng) for _ in range(code.parities))
        s = RepairStrategy(i, mats)
        rep = evaluate_repair(code, s)
        if rep.feasible and (best is None or rep.overhead < best[1].overhead):
            best = (s, rep)
    if best is None:
        raise NoFeasibleSolutionError(f"none of {trials} random strategies is feasible")
    s, rep = best
    return RepairStrategy(i, s.matrices, {"construction": "randomized-search", "seed": seed, "trials": trials}), rep
