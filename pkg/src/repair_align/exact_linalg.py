"""Dense matrices over exchangeable scalar domains.

Three domains are supported: prime fields GF(p) (entries are Python ints in
``[0, p)``), exact rationals (``fractions.Fraction``) and floating point with
a relative pivot tolerance.  Every operation is a pure function of immutable
``Matrix`` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainMismatchError, SingularMatrixError

__all__ = [
    "ScalarDomain",
    "Matrix",
    "rank",
    "inverse",
    "row_space_basis",
    "rref",
    "kron",
    "solve",
    "random_matrix",
    "DEFAULT_BOUND",
]

DEFAULT_BOUND = 97


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class ScalarDomain:
    """Scalar domain descriptor: ``prime_field`` (with ``p``), ``rational`` or ``float`` (with ``tau``)."""

    kind: str
    p: int | None = None
    tau: float | None = None

    def __post_init__(self) -> None:
        if self.kind == "prime_field":
            if not isinstance(self.p, int) or not _is_prime(self.p):
                raise ValueError(f"prime_field requires a prime modulus, got {self.p!r}")
        elif self.kind == "float":
            if self.tau is None or not 0.0 < self.tau < 1.0:
                raise ValueError(f"float tolerance must lie in (0, 1), got {self.tau!r}")
        elif self.kind != "rational":
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def prime_field(cls, p: int) -> ScalarDomain:
        return cls("prime_field", p=p)

    @classmethod
    def rational(cls) -> ScalarDomain:
        return cls("rational")

    @classmethod
    def floating(cls, tau: float = 1e-9) -> ScalarDomain:
        return cls("float", tau=tau)

    @classmethod
    def parse(cls, text: str) -> ScalarDomain:
        """Parse the CLI notation ``gf:<p>``, ``rational`` or ``float:<tau>``."""
        text = text.strip().lower()
        if text.startswith("gf:"):
            return cls.prime_field(int(text[3:]))
        if text == "rational":
            return cls.rational()
        if text == "float":
            return cls.floating()
        if text.startswith("float:"):
            return cls.floating(float(text[6:]))
        raise ValueError(f"cannot parse field {text!r}")

    @property
    def exact(self) -> bool:
        return self.kind != "float"

    def __str__(self) -> str:
        if self.kind == "prime_field":
            return f"GF({self.p})"
        if self.kind == "float":
            return f"float(tau={self.tau:g})"
        return "Q"

    # -- scalars ---------------------------------------------------------

    @property
    def zero(self):
        return {"prime_field": 0, "rational": Fraction(0), "float": 0.0}[self.kind]

    @property
    def one(self):
        return {"prime_field": 1, "rational": Fraction(1), "float": 1.0}[self.kind]

    def convert(self, x: Any):
        """Coerce ``x`` (int, Fraction, float or "num/den" string) into the domain."""
        if self.kind == "prime_field":
            if isinstance(x, str):
                x = Fraction(x)
            if isinstance(x, Fraction):
                if x.denominator % self.p == 0:
                    raise ZeroDivisionError(f"{x} has no image in GF({self.p})")
                return x.numerator * pow(x.denominator, -1, self.p) % self.p
            if isinstance(x, (float, np.floating)):
                if not float(x).is_integer():
                    raise ValueError(f"non-integer {x} cannot enter GF({self.p})")
                x = int(x)
            return int(x) % self.p
        if self.kind == "rational":
            if isinstance(x, (np.integer,)):
                x = int(x)
            return Fraction(x)
        return float(Fraction(x)) if isinstance(x, str) else float(x)

    def add(self, a, b):
        return (a + b) % self.p if self.kind == "prime_field" else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.kind == "prime_field" else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.kind == "prime_field" else a * b

    def neg(self, a):
        return (-a) % self.p if self.kind == "prime_field" else -a

    def inv(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        if self.kind == "prime_field":
            return pow(a, -1, self.p)
        return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def random_element(self, rng: np.random.Generator, bound: int = DEFAULT_BOUND, nonzero: bool = False):
        """Draw one scalar.

        Prime fields sample uniformly (over the nonzero elements when
        ``nonzero``).  Rationals take a numerator in ``[-bound, bound]`` and a
        denominator in ``[1, bound]``.  Floats are standard normal.
        """
        if self.kind == "prime_field":
            lo = 1 if nonzero else 0
            return int(rng.integers(lo, self.p))
        if self.kind == "rational":
            while True:
                num = int(rng.integers(-bound, bound + 1))
                den = int(rng.integers(1, bound + 1))
                if num or not nonzero:
                    return Fraction(num, den)
        while True:
            x = float(rng.standard_normal())
            if x or not nonzero:
                return x

    # -- serialization ---------------------------------------------------

    def encode(self, x) -> Any:
        if self.kind == "prime_field":
            return int(x)
        if self.kind == "rational":
            return f"{x.numerator}/{x.denominator}"
        return float(x)

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        if self.kind == "prime_field":
            out["p"] = self.p
        elif self.kind == "float":
            out["tau"] = self.tau
        return out

    @classmethod
    def from_json(cls, obj: dict) -> ScalarDomain:
        kind = obj["kind"]
        if kind == "prime_field":
            return cls.prime_field(int(obj["p"]))
        if kind == "float":
            return cls.floating(float(obj.get("tau", 1e-9)))
        return cls.rational()


@dataclass(frozen=True, eq=True)
class Matrix:
    """Immutable dense matrix with row-major ``entries``."""

    domain: ScalarDomain
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise DimensionError("negative matrix dimension")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    # -- constructors ----------------------------------------------------

    @classmethod
    def from_rows(cls, domain: ScalarDomain, rows: Sequence[Sequence[Any]], cols: int | None = None) -> Matrix:
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else (cols or 0)
        if any(len(r) != nc for r in rows):
            raise DimensionError("ragged rows")
        return cls(domain, nr, nc, tuple(domain.convert(x) for r in rows for x in r))

    @classmethod
    def column(cls, domain: ScalarDomain, values: Iterable[Any]) -> Matrix:
        vals = tuple(domain.convert(x) for x in values)
        return cls(domain, len(vals), 1, vals)

    @classmethod
    def zeros(cls, domain: ScalarDomain, rows: int, cols: int) -> Matrix:
        return cls(domain, rows, cols, (domain.zero,) * (rows * cols))

    @classmethod
    def identity(cls, domain: ScalarDomain, n: int) -> Matrix:
        z, o = domain.zero, domain.one
        return cls(domain, n, n, tuple(o if i == j else z for i in range(n) for j in range(n)))

    @classmethod
    def diag(cls, domain: ScalarDomain, values: Sequence[Any]) -> Matrix:
        vals = [domain.convert(x) for x in values]
        n = len(vals)
        z = domain.zero
        return cls(domain, n, n, tuple(vals[i] if i == j else z for i in range(n) for j in range(n)))

    @classmethod
    def hstack(cls, mats: Sequence[Matrix]) -> Matrix:
        mats = list(mats)
        if not mats:
            raise DimensionError("hstack of nothing")
        dom = _common_domain(mats)
        nr = mats[0].rows
        if any(m.rows != nr for m in mats):
            raise DimensionError("hstack row mismatch")
        out = []
        for i in range(nr):
            for m in mats:
                out.extend(m.entries[i * m.cols:(i + 1) * m.cols])
        return cls(dom, nr, sum(m.cols for m in mats), tuple(out))

    @classmethod
    def vstack(cls, mats: Sequence[Matrix]) -> Matrix:
        mats = list(mats)
        if not mats:
            raise DimensionError("vstack of nothing")
        dom = _common_domain(mats)
        nc = mats[0].cols
        if any(m.cols != nc for m in mats):
            raise DimensionError("vstack column mismatch")
        return cls(dom, sum(m.rows for m in mats), nc, tuple(x for m in mats for x in m.entries))

    # -- accessors -------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx: tuple[int, int]):
        i, j = idx
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    def col(self, j: int) -> Matrix:
        return Matrix(self.domain, self.rows, 1, self.entries[j::self.cols] if self.cols else ())

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> Matrix:
        ents = tuple(x for i in range(r0, r1) for x in self.entries[i * self.cols + c0:i * self.cols + c1])
        return Matrix(self.domain, r1 - r0, c1 - c0, ents)

    def select_columns(self, idx: Sequence[int]) -> Matrix:
        rows = self.to_rows()
        return Matrix(self.domain, self.rows, len(idx), tuple(r[j] for r in rows for j in idx))

    @property
    def T(self) -> Matrix:
        nr, nc = self.rows, self.cols
        e = self.entries
        return Matrix(self.domain, nc, nr, tuple(e[i * nc + j] for j in range(nc) for i in range(nr)))

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.entries)

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self) -> list:
        return [self[i, i] for i in range(min(self.rows, self.cols))]

    def to_domain(self, domain: ScalarDomain) -> Matrix:
        return Matrix(domain, self.rows, self.cols, tuple(domain.convert(x) for x in self.entries))

    def to_numpy(self) -> np.ndarray:
        if self.domain.kind == "prime_field":
            return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)
        return np.array([float(x) for x in self.entries], dtype=float).reshape(self.rows, self.cols)

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: Matrix) -> None:
        if self.domain != other.domain:
            raise DomainMismatchError(f"{self.domain} vs {other.domain}")

    def __add__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in addition")
        d = self.domain
        return Matrix(d, self.rows, self.cols, tuple(d.add(a, b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in subtraction")
        d = self.domain
        return Matrix(d, self.rows, self.cols, tuple(d.sub(a, b) for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> Matrix:
        d = self.domain
        return Matrix(d, self.rows, self.cols, tuple(d.neg(a) for a in self.entries))

    def scale(self, c) -> Matrix:
        d = self.domain
        c = d.convert(c)
        return Matrix(d, self.rows, self.cols, tuple(d.mul(c, a) for a in self.entries))

    def __matmul__(self, other: Matrix) -> Matrix:
        self._check(other)
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        n, m, q = self.rows, self.cols, other.cols
        a, b = self.entries, other.entries
        bcols = [b[j::q] for j in range(q)] if q else []
        out = []
        p = self.domain.p if self.domain.kind == "prime_field" else None
        zero = self.domain.zero
        for i in range(n):
            arow = a[i * m:(i + 1) * m]
            for j in range(q):
                s = sum((x * y for x, y in zip(arow, bcols[j]) if x and y), zero)
                out.append(s % p if p else s)
        return Matrix(self.domain, n, q, tuple(out))

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        return {
            "domain": self.domain.to_json(),
            "rows": self.rows,
            "cols": self.cols,
            "entries": [self.domain.encode(x) for x in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> Matrix:
        dom = ScalarDomain.from_json(obj["domain"])
        ents = obj["entries"]
        if dom.kind == "prime_field":
            if any(not isinstance(x, int) or not 0 <= x < dom.p for x in ents):
                raise ValueError(f"prime_field entries must be integers in [0, {dom.p})")
        return cls(dom, int(obj["rows"]), int(obj["cols"]), tuple(dom.convert(x) for x in ents))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))
        return f"Matrix<{self.domain}>({self.rows}x{self.cols}: [{body}])"


def _common_domain(mats: Sequence[Matrix]) -> ScalarDomain:
    dom = mats[0].domain
    for m in mats[1:]:
        if m.domain != dom:
            raise DomainMismatchError(f"{dom} vs {m.domain}")
    return dom


# -- elimination core ------------------------------------------------------


def _reduce(dom: ScalarDomain, a: list[list], pivot_cols: int, reduced: bool, scale: float = 0.0):
    """In-place row reduction of the row list ``a``.

    Pivots are searched in the first ``pivot_cols`` columns only; row
    operations act on the full width.  Exact domains take the first nonzero
    entry, floats the largest magnitude, counting a pivot only above
    ``tau * scale``.  Returns the pivot column list.
    """
    nr = len(a)
    pivots: list[int] = []
    r = 0
    kind = dom.kind
    p = dom.p
    thresh = dom.tau * scale if kind == "float" else 0.0
    for c in range(pivot_cols):
        if r == nr:
            break
        if kind == "float":
            piv = max(range(r, nr), key=lambda i: abs(a[i][c]))
            if abs(a[piv][c]) <= thresh or a[piv][c] == 0.0:
                continue
        else:
            piv = next((i for i in range(r, nr) if a[i][c] != 0), None)
            if piv is None:
                continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        prow = a[r]
        inv = dom.inv(prow[c])
        if reduced:
            if kind == "prime_field":
                prow = [(x * inv) % p for x in prow]
            else:
                prow = [x * inv for x in prow]
            prow[c] = dom.one
            a[r] = prow
            targets = (i for i in range(nr) if i != r)
        else:
            targets = range(r + 1, nr)
        for i in targets:
            row = a[i]
            f = row[c]
            if f == 0:
                continue
            if not reduced:
                f = (f * inv) % p if kind == "prime_field" else f * inv
            if kind == "prime_field":
                a[i] = [(x - f * y) % p for x, y in zip(row, prow)]
            else:
                new = [x - f * y for x, y in zip(row, prow)]
                new[c] = dom.zero
                a[i] = new
        pivots.append(c)
        r += 1
    return pivots


def _scale(m: Matrix) -> float:
    if m.domain.kind != "float":
        return 0.0
    return max((abs(x) for x in m.entries), default=0.0)


def rank(m: Matrix) -> int:
    """Number of pivots of a row reduction of ``m``."""
    if m.rows == 0 or m.cols == 0:
        return 0
    # eliminate along the shorter side
    src = m if m.rows <= m.cols or m.domain.kind == "float" else m.T
    a = src.to_rows()
    return len(_reduce(m.domain, a, src.cols, reduced=False, scale=_scale(m)))


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row-echelon form (all rows kept) and the pivot columns."""
    a = m.to_rows()
    piv = _reduce(m.domain, a, m.cols, reduced=True, scale=_scale(m))
    return Matrix(m.domain, m.rows, m.cols, tuple(x for r in a for x in r)), piv


def row_space_basis(m: Matrix) -> Matrix:
    """Canonical basis of the row space: the nonzero rows of the RREF."""
    r, piv = rref(m)
    return r.submatrix(0, len(piv), 0, m.cols)


def _solve_rows(a_mat: Matrix, rhs: Matrix) -> Matrix:
    if a_mat.rows != a_mat.cols:
        raise DimensionError(f"square matrix required, got {a_mat.shape}")
    if rhs.rows != a_mat.rows:
        raise DimensionError("right-hand side row count mismatch")
    a_mat._check(rhs)
    n = a_mat.rows
    aug = [list(a_mat.row(i)) + list(rhs.row(i)) for i in range(n)]
    piv = _reduce(a_mat.domain, aug, n, reduced=True, scale=_scale(a_mat))
    if len(piv) < n:
        raise SingularMatrixError(f"matrix is singular (rank {len(piv)} < {n})")
    return Matrix(a_mat.domain, n, rhs.cols, tuple(x for r in aug for x in r[n:]))


def inverse(m: Matrix) -> Matrix:
    return _solve_rows(m, Matrix.identity(m.domain, m.rows))


def solve(a: Matrix, y: Matrix) -> Matrix:
    """Return ``x`` with ``a @ x == y`` for square invertible ``a``."""
    return _solve_rows(a, y)


def kron(a: Matrix, b: Matrix) -> Matrix:
    a._check(b)
    d = a.domain
    out = []
    for i in range(a.rows):
        for k in range(b.rows):
            for j in range(a.cols):
                x = a[i, j]
                out.extend(d.mul(x, y) for y in b.row(k))
    return Matrix(d, a.rows * b.rows, a.cols * b.cols, tuple(out))


def random_matrix(
    domain: ScalarDomain,
    rows: int,
    cols: int,
    rng: np.random.Generator,
    bound: int = DEFAULT_BOUND,
    nonzero: bool = False,
) -> Matrix:
    return Matrix(
        domain, rows, cols, tuple(domain.random_element(rng, bound, nonzero) for _ in range(rows * cols))
    )


def random_full_column_rank(
    domain: ScalarDomain, rows: int, cols: int, rng: np.random.Generator, retries: int = 64
) -> Matrix:
    for _ in range(retries):
        m = random_matrix(domain, rows, cols, rng)
        if rank(m) == cols:
            return m
    raise SingularMatrixError(f"could not draw a full-column-rank {rows}x{cols} matrix over {domain}")
