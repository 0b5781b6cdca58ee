import contextlib
import itertools
import time

import numpy as np
import pytest

from repair_align.exact_linalg import Matrix, ScalarDomain


def det_leibniz(dom: ScalarDomain, rows):
    """Determinant by permutation expansion; tiny matrices only."""
    n = len(rows)
    total = dom.zero
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term = dom.one
        for r, c in enumerate(perm):
            term = dom.mul(term, rows[r][c])
        total = dom.sub(total, term) if inversions % 2 else dom.add(total, term)
    return total


def minor_rank(m: Matrix) -> int:
    """Largest r with a nonzero r x r minor."""
    rows = m.to_rows()
    for r in range(min(m.rows, m.cols), 0, -1):
        for ri in itertools.combinations(range(m.rows), r):
            for ci in itertools.combinations(range(m.cols), r):
                sub = [[rows[a][b] for b in ci] for a in ri]
                if not m.domain.is_zero(det_leibniz(m.domain, sub)):
                    return r
    return 0


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


GF5 = ScalarDomain.prime_field(5)
GF7 = ScalarDomain.prime_field(7)
QQ = ScalarDomain.rational()
FL = ScalarDomain.floating()


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, title)`` as a context manager."""
    results = request.config.stash[ACCEPTANCE_KEY]

    @contextlib.contextmanager
    def record(number: int, title: str):
        start = time.perf_counter()
        results[number] = ("FAIL", title, 0.0)
        yield
        results[number] = ("PASS", title, time.perf_counter() - start)

    return record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        status, title, elapsed = results[number]
        timing = f" ({elapsed:.2f}s)" if status == "PASS" else ""
        terminalreporter.write_line(f"criterion {number}: {status}  {title}{timing}")
