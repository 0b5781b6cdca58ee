"""Exhaustive rank-constrained rank minimization over column-space classes.

Both the repair problem (sum of interference ranks) and the beamforming
problem (max eavesdropper rank) share one shape: pick, for every slot ``s``, a
d-dimensional column space ``X_s`` of F_q^m such that ``[U_s X_s]_s`` is full
rank while an aggregate of ``rank([G_hs X_s]_s)`` over harmful spaces ``h`` is
minimal.  Ranks depend on each ``X_s`` only through its column space, so one
RREF representative per subspace is enumerated.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .errors import BudgetExceededError, NoFeasibleSolutionError
from .exact_linalg import Matrix, ScalarDomain, rank

DEFAULT_BUDGET = 10**8


def gaussian_binomial(m: int, d: int, q: int) -> int:
    """Number of d-dimensional subspaces of F_q^m."""
    if not 0 <= d <= m:
        return 0
    num = den = 1
    for j in range(d):
        num *= q ** (m - j) - 1
        den *= q ** (j + 1) - 1
    return num // den


def subspace_representatives(domain: ScalarDomain, m: int, d: int) -> list[Matrix]:
    """One m x d basis (transposed RREF) per d-dim subspace, in lexicographic RREF order."""
    q = domain.p
    reps: list[tuple] = []
    for pivots in itertools.combinations(range(m), d):
        free = [
            (r, c)
            for r, pc in enumerate(pivots)
            for c in range(pc + 1, m)
            if c not in pivots
        ]
        for values in itertools.product(range(q), repeat=len(free)):
            grid = [[0] * m for _ in range(d)]
            for r, pc in enumerate(pivots):
                grid[r][pc] = 1
            for (r, c), v in zip(free, values):
                grid[r][c] = v
            reps.append(tuple(x for row in grid for x in row))
    reps.sort()
    return [Matrix(domain, d, m, ent).T for ent in reps]


@dataclass(frozen=True)
class SearchOutcome:
    best: int
    optima: tuple  # index tuples into ``reps``, lexicographically sorted
    reps: tuple
    evaluated: int
    feasible: int


def _scan(useful, harmful, m: int, aggregate: str, first_range: range, n_reps: int):
    slots = len(useful)
    best = None
    optima: list[tuple] = []
    evaluated = feasible = 0
    for j0 in first_range:
        for rest in itertools.product(range(n_reps), repeat=slots - 1):
            idx = (j0,) + rest
            evaluated += 1
            if rank(Matrix.hstack([useful[s][j] for s, j in enumerate(idx)])) != m:
                continue
            feasible += 1
            ranks = [rank(Matrix.hstack([h[s][j] for s, j in enumerate(idx)])) for h in harmful]
            value = (sum(ranks) if aggregate == "sum" else max(ranks)) if ranks else 0
            if best is None or value < best:
                best, optima = value, [idx]
            elif value == best:
                optima.append(idx)
    return best, optima, evaluated, feasible


def _scan_star(args):
    return _scan(*args)


def search(
    domain: ScalarDomain,
    useful: Sequence[Matrix],
    harmful: Sequence[Sequence[Matrix]],
    d: int,
    aggregate: str,
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
) -> SearchOutcome:
    """Enumerate every tuple of subspace representatives, one per slot.

    ``useful[s]`` and ``harmful[h][s]`` are the m x m matrices multiplying the
    slot-``s`` representative.
    """
    if domain.kind != "prime_field":
        raise ValueError("exhaustive search requires a prime_field domain")
    if aggregate not in ("sum", "max"):
        raise ValueError(f"unknown aggregate {aggregate!r}")
    m = useful[0].rows
    slots = len(useful)
    per_slot = gaussian_binomial(m, d, domain.p)
    total = per_slot**slots
    if total > budget:
        raise BudgetExceededError(
            f"{total} candidate tuples ({per_slot} subspaces per slot, {slots} slots) exceed budget {budget}"
        )
    reps = subspace_representatives(domain, m, d)
    u_prod = [[u @ r for r in reps] for u in useful]
    h_prod = [[[g @ r for r in reps] for g in h] for h in harmful]

    n = len(reps)
    if jobs <= 1 or n < 2:
        results = [_scan(u_prod, h_prod, m, aggregate, range(n), n)]
    else:
        step = -(-n // jobs)
        chunks = [range(a, min(a + step, n)) for a in range(0, n, step)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_scan_star, [(u_prod, h_prod, m, aggregate, c, n) for c in chunks]))

    best = None
    optima: list[tuple] = []
    evaluated = feasible = 0
    for b, opt, ev, fe in results:
        evaluated += ev
        feasible += fe
        if b is None:
            continue
        if best is None or b < best:
            best, optima = b, list(opt)
        elif b == best:
            optima.extend(opt)
    if best is None:
        raise NoFeasibleSolutionError("no candidate satisfies the full-rank constraint")
    return SearchOutcome(best, tuple(sorted(optima)), tuple(reps), evaluated, feasible)
