"""Systematic (n, k)_beta MDS storage codes in block-matrix form.

A code is the k x (n-k) grid of square coding blocks ``blocks[i][p]``, each of
side ``alpha = (n-k)*beta``.  Systematic node ``i`` stores file piece ``f_i``;
parity node ``p`` stores ``sum_i blocks[i][p].T @ f_i``.

Public node and piece indices are 1-based throughout.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, GenerationFailedError, SingularMatrixError
from .exact_linalg import (
    DEFAULT_BOUND,
    Matrix,
    ScalarDomain,
    kron,
    random_matrix,
    rank,
    solve,
)

log = logging.getLogger(__name__)

RETRY_BOUND = 64


@dataclass(frozen=True)
class MdsCode:
    n: int
    k: int
    beta: int
    domain: ScalarDomain
    blocks: tuple  # tuple[tuple[Matrix, ...], ...], k rows of n-k blocks

    def __post_init__(self) -> None:
        _check_params(self.n, self.k, self.beta)
        side = self.alpha
        if len(self.blocks) != self.k or any(len(row) != self.n - self.k for row in self.blocks):
            raise DimensionError(f"block grid must be {self.k}x{self.n - self.k}")
        for row in self.blocks:
            for b in row:
                if b.shape != (side, side):
                    raise DimensionError(f"coding block must be {side}x{side}, got {b.shape}")
                if b.domain != self.domain:
                    raise DimensionError("coding block domain differs from code domain")

    @property
    def alpha(self) -> int:
        """Per-node storage (n-k)*beta."""
        return (self.n - self.k) * self.beta

    @property
    def filesize(self) -> int:
        return self.k * self.alpha

    @property
    def parities(self) -> int:
        return self.n - self.k

    def block(self, i: int, p: int) -> Matrix:
        """Coding block A_i^(p) with 1-based piece ``i`` and parity ``p``."""
        return self.blocks[i - 1][p - 1]

    def matrix(self) -> Matrix:
        """The assembled k*alpha x (n-k)*alpha coding matrix."""
        return Matrix.vstack([Matrix.hstack(row) for row in self.blocks])

    def is_diagonal(self) -> bool:
        return all(b.is_diagonal() for row in self.blocks for b in row)

    def to_json(self) -> dict:
        return {
            "index_base": 1,
            "n": self.n,
            "k": self.k,
            "beta": self.beta,
            "domain": self.domain.to_json(),
            "blocks": [[b.to_json() for b in row] for row in self.blocks],
        }

    @classmethod
    def from_json(cls, obj: dict) -> MdsCode:
        dom = ScalarDomain.from_json(obj["domain"])
        blocks = tuple(tuple(Matrix.from_json(b) for b in row) for row in obj["blocks"])
        return cls(int(obj["n"]), int(obj["k"]), int(obj["beta"]), dom, blocks)

    @classmethod
    def from_blocks(cls, n: int, k: int, beta: int, blocks: Sequence[Sequence[Matrix]]) -> MdsCode:
        return cls(n, k, beta, blocks[0][0].domain, tuple(tuple(r) for r in blocks))


@dataclass(frozen=True)
class FileVector:
    pieces: tuple  # k column vectors

    @property
    def domain(self) -> ScalarDomain:
        return self.pieces[0].domain

    def stacked(self) -> Matrix:
        return Matrix.vstack(self.pieces)

    @classmethod
    def random(cls, code: MdsCode, rng: np.random.Generator) -> FileVector:
        return cls(tuple(random_matrix(code.domain, code.alpha, 1, rng) for _ in range(code.k)))

    @classmethod
    def zeros(cls, code: MdsCode) -> FileVector:
        return cls(tuple(Matrix.zeros(code.domain, code.alpha, 1) for _ in range(code.k)))


@dataclass(frozen=True)
class NodeContent:
    kind: str  # "systematic" | "parity"
    index: int  # 1-based within its kind
    data: Matrix


def _check_params(n: int, k: int, beta: int) -> None:
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    if beta < 1:
        raise ValueError(f"subpacketization beta must be >= 1, got {beta}")


def _generate(n, k, beta, domain, seed, make_block, bound) -> MdsCode:
    _check_params(n, k, beta)
    if not domain.exact:
        raise ValueError("code generation requires an exact domain")
    if domain.kind == "prime_field" and domain.p < n:
        log.warning("GF(%d) is smaller than n=%d; an MDS code may not exist", domain.p, n)
    rng = np.random.default_rng(seed)
    side = (n - k) * beta
    for _ in range(RETRY_BOUND):
        blocks = [[make_block(domain, side, rng, bound) for _ in range(n - k)] for _ in range(k)]
        code = MdsCode.from_blocks(n, k, beta, blocks)
        if is_mds(code):
            return code
    raise GenerationFailedError(
        f"no MDS ({n},{k})_{beta} code over {domain} after {RETRY_BOUND} draws; field likely too small"
    )


def generate_random_code(
    n: int, k: int, beta: int, domain: ScalarDomain, seed: int = 0, bound: int = DEFAULT_BOUND
) -> MdsCode:
    """Code with i.i.d. dense coding blocks, resampled until it is MDS."""
    return _generate(n, k, beta, domain, seed, lambda d, s, rng, b: random_matrix(d, s, s, rng, b), bound)


def generate_diagonal_code(
    n: int, k: int, beta: int, domain: ScalarDomain, seed: int = 0, bound: int = DEFAULT_BOUND
) -> MdsCode:
    """Code whose blocks are diagonal with i.i.d. nonzero diagonal entries."""

    def make(d, s, rng, b):
        return Matrix.diag(d, [d.random_element(rng, b, nonzero=True) for _ in range(s)])

    return _generate(n, k, beta, domain, seed, make, bound)


def _file_of(code: MdsCode, file: FileVector) -> None:
    if len(file.pieces) != code.k:
        raise DimensionError(f"file has {len(file.pieces)} pieces, code needs {code.k}")
    for f in file.pieces:
        if f.shape != (code.alpha, 1) or f.domain != code.domain:
            raise DimensionError(f"each piece must be a length-{code.alpha} vector over {code.domain}")


def encode(code: MdsCode, file: FileVector) -> list[NodeContent]:
    """Contents of all n nodes: systematic 1..k first, then parity 1..n-k."""
    _file_of(code, file)
    out = [NodeContent("systematic", i + 1, f) for i, f in enumerate(file.pieces)]
    for p in range(code.parities):
        acc = Matrix.zeros(code.domain, code.alpha, 1)
        for i, f in enumerate(file.pieces):
            acc = acc + code.blocks[i][p].T @ f
        out.append(NodeContent("parity", p + 1, acc))
    return out


def node_rows(code: MdsCode, node: NodeContent | tuple[str, int]) -> Matrix:
    """alpha x k*alpha matrix mapping the stacked file to a node's content."""
    kind, idx = (node.kind, node.index) if isinstance(node, NodeContent) else node
    m = code.alpha
    if kind == "systematic":
        e = Matrix(code.domain, 1, code.k, tuple(code.domain.one if j == idx - 1 else code.domain.zero for j in range(code.k)))
        return kron(e, Matrix.identity(code.domain, m))
    return Matrix.hstack([code.blocks[i][idx - 1].T for i in range(code.k)])


def _all_nodes(code: MdsCode) -> list[tuple[str, int]]:
    return [("systematic", i) for i in range(1, code.k + 1)] + [("parity", p) for p in range(1, code.parities + 1)]


def is_mds(code: MdsCode) -> bool:
    """True iff every k-subset of nodes determines the file (checks all C(n, k) subsets)."""
    rows = {node: node_rows(code, node) for node in _all_nodes(code)}
    full = code.filesize
    for subset in itertools.combinations(rows, code.k):
        if rank(Matrix.vstack([rows[s] for s in subset])) < full:
            return False
    return True


def decode(code: MdsCode, contents: Sequence[NodeContent]) -> FileVector:
    """Recover the file from exactly k node contents."""
    if len(contents) != code.k:
        raise DimensionError(f"decoding needs exactly k={code.k} nodes, got {len(contents)}")
    system = Matrix.vstack([node_rows(code, c) for c in contents])
    rhs = Matrix.vstack([c.data for c in contents])
    try:
        f = solve(system, rhs)
    except SingularMatrixError as exc:
        raise SingularMatrixError("node subset does not determine the file; code is not MDS") from exc
    m = code.alpha
    return FileVector(tuple(f.submatrix(i * m, (i + 1) * m, 0, 1) for i in range(code.k)))


def piece_order(k: int, i: int) -> list[int]:
    """Row-block order (i, 1, ..., i-1, i+1, ..., k) produced by P_i."""
    if not 1 <= i <= k:
        raise IndexError(f"systematic index {i} outside 1..{k}")
    return [i] + [u for u in range(1, k + 1) if u != i]


def node_permutation(code: MdsCode, i: int) -> Matrix:
    """Block permutation P_i = [E_i^T E_1^T ... E_k^T]^T with E_j = e_j (x) I_alpha."""
    order = piece_order(code.k, i)
    d = code.domain
    eye = Matrix.identity(d, code.alpha)
    blocks = []
    for u in order:
        e_u = Matrix(d, code.k, 1, tuple(d.one if j == u - 1 else d.zero for j in range(code.k)))
        blocks.append(kron(e_u, eye).T)
    return Matrix.vstack(blocks)


def permuted_blocks(code: MdsCode, i: int) -> tuple:
    """Block grid of P_i A: row block 1 multiplies f_i, the rest follow in index order."""
    return tuple(code.blocks[u - 1] for u in piece_order(code.k, i))
