import json
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FL, GF5, GF7, QQ, minor_rank
from repair_align.errors import DimensionError, DomainMismatchError, SingularMatrixError
from repair_align.exact_linalg import (
    Matrix,
    ScalarDomain,
    inverse,
    kron,
    random_matrix,
    rank,
    row_space_basis,
    rref,
    solve,
)

GF3 = ScalarDomain.prime_field(3)


def M(dom, rows):
    return Matrix.from_rows(dom, rows)


# -- documented examples ---------------------------------------------------


def test_rank_identity_gf5():
    assert rank(Matrix.identity(GF5, 4)) == 4


def test_rank_stacked_copies_collapse(rng):
    W = random_matrix(QQ, 2, 2, rng)
    while rank(W) < 2:
        W = random_matrix(QQ, 2, 2, rng)
    assert rank(Matrix.vstack([W, W])) == 2


def test_rank_hand_example():
    assert rank(M(QQ, [[1, 2], [2, 4], [0, 1]])) == 2


def test_inverse_examples():
    assert inverse(Matrix.identity(QQ, 3)) == Matrix.identity(QQ, 3)
    assert inverse(M(GF7, [[2, 0], [0, 3]])) == M(GF7, [[4, 0], [0, 5]])
    with pytest.raises(SingularMatrixError):
        inverse(M(QQ, [[1, 2], [2, 4]]))


def test_row_space_basis_examples():
    z = row_space_basis(Matrix.zeros(QQ, 3, 3))
    assert z.shape == (0, 3)
    assert row_space_basis(M(QQ, [[2, 4], [2, 4]])) == M(QQ, [[1, 2]])
    assert row_space_basis(M(GF3, [[1, 1], [1, 2], [2, 3]])) == M(GF3, [[1, 0], [0, 1]])


def test_kron_examples():
    e2 = Matrix.column(QQ, [0, 1, 0])
    sel = kron(e2, Matrix.identity(QQ, 2))
    assert sel.shape == (6, 2)
    assert sel.submatrix(2, 4, 0, 2) == Matrix.identity(QQ, 2)
    assert sel.submatrix(0, 2, 0, 2).is_zero() and sel.submatrix(4, 6, 0, 2).is_zero()
    B = M(QQ, [[1, 2], [3, 4]])
    assert kron(Matrix.identity(QQ, 1), B) == B
    assert kron(M(QQ, [[1, 2]]), M(QQ, [[0, 1], [1, 0]])) == M(QQ, [[0, 1, 0, 2], [1, 0, 2, 0]])


def test_solve_examples():
    y = Matrix.column(QQ, [3, -1, 2])
    assert solve(Matrix.identity(QQ, 3), y) == y
    assert solve(M(GF7, [[2, 0], [0, 3]]), Matrix.column(GF7, [1, 1])) == Matrix.column(GF7, [4, 5])
    with pytest.raises(SingularMatrixError):
        solve(M(QQ, [[1, 1], [1, 1]]), Matrix.column(QQ, [1, 2]))


# -- errors ------------------------------------------------------------------


def test_domain_mismatch():
    with pytest.raises(DomainMismatchError):
        Matrix.identity(GF5, 2) @ Matrix.identity(GF7, 2)
    with pytest.raises(DomainMismatchError):
        Matrix.identity(QQ, 2) + Matrix.identity(GF5, 2)


def test_dimension_errors():
    with pytest.raises(DimensionError):
        Matrix.identity(QQ, 2) @ Matrix.identity(QQ, 3)
    with pytest.raises(DimensionError):
        inverse(Matrix.zeros(QQ, 2, 3))


def test_bad_field_rejected():
    with pytest.raises(ValueError):
        ScalarDomain.prime_field(6)
    with pytest.raises(ValueError):
        ScalarDomain.parse("complex")


def test_parse_round_trip():
    assert ScalarDomain.parse("gf:5") == GF5
    assert ScalarDomain.parse("rational") == QQ
    assert ScalarDomain.parse("float:1e-6").tau == 1e-6


# -- oracles -----------------------------------------------------------------


@pytest.mark.parametrize("dom", [GF5, GF7, QQ], ids=str)
def test_rank_matches_minor_oracle(dom, rng):
    for _ in range(40):
        r, c = rng.integers(1, 5, size=2)
        m = random_matrix(dom, int(r), int(c), rng, bound=3)
        assert rank(m) == minor_rank(m)


def test_rank_matches_sympy_over_rationals(rng):
    for _ in range(30):
        r, c = rng.integers(1, 8, size=2)
        m = random_matrix(QQ, int(r), int(c), rng, bound=4)
        # inject dependence half the time
        if r > 1 and rng.random() < 0.5:
            rows = m.to_rows()
            rows[-1] = [a + 2 * b for a, b in zip(rows[0], rows[1 % len(rows)])]
            m = M(QQ, rows)
        assert rank(m) == sympy.Matrix(m.to_rows()).rank()


def test_rank_transpose_and_rref_properties(rng):
    for dom in (GF5, QQ):
        for _ in range(30):
            m = random_matrix(dom, 4, 6, rng, bound=3)
            assert rank(m) == rank(m.T)
            red, piv = rref(m)
            assert len(piv) == rank(m)
            for row, col in enumerate(piv):
                assert red[row, col] == dom.one
                assert all(dom.is_zero(red[r, col]) for r in range(red.rows) if r != row)


def test_row_space_basis_spans(rng):
    for _ in range(25):
        m = random_matrix(GF7, 5, 4, rng, bound=3)
        b = row_space_basis(m)
        assert b.rows == rank(m)
        # same row space: stacking adds nothing
        assert rank(Matrix.vstack([b, m])) == b.rows


def test_inverse_and_solve_agree(rng):
    for dom in (GF7, QQ):
        for _ in range(20):
            a = random_matrix(dom, 4, 4, rng)
            if rank(a) < 4:
                continue
            assert a @ inverse(a) == Matrix.identity(dom, 4)
            y = random_matrix(dom, 4, 2, rng)
            assert a @ solve(a, y) == y


def test_float_rank_relative_threshold():
    big = M(FL, [[1e12, 0], [0, 1e-9]])
    assert rank(big) == 1
    tiny = M(FL, [[1e-12, 0], [0, 1e-12]])
    assert rank(tiny) == 2


def test_kron_mixed_product(rng):
    a, b = random_matrix(QQ, 2, 3, rng), random_matrix(QQ, 3, 2, rng)
    c, d = random_matrix(QQ, 3, 2, rng), random_matrix(QQ, 2, 2, rng)
    assert kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)


# -- field axioms ------------------------------------------------------------

_FIELDS = {"gf5": GF5, "gf7": GF7, "rational": QQ}


@pytest.mark.parametrize("name", sorted(_FIELDS))
@settings(max_examples=200, deadline=None)
@given(a=st.integers(-50, 50), b=st.integers(-50, 50), c=st.integers(1, 50), d=st.integers(1, 50))
def test_field_axioms_hypothesis(name, a, b, c, d):
    dom = _FIELDS[name]
    x = dom.convert(Fraction(a, c)) if dom.kind == "rational" else dom.convert(a)
    y = dom.convert(Fraction(b, d)) if dom.kind == "rational" else dom.convert(b)
    z = dom.convert(c)
    assert dom.add(x, y) == dom.add(y, x)
    assert dom.mul(x, y) == dom.mul(y, x)
    assert dom.mul(x, dom.add(y, z)) == dom.add(dom.mul(x, y), dom.mul(x, z))
    assert dom.add(x, dom.neg(x)) == dom.zero
    if not dom.is_zero(x):
        assert dom.mul(x, dom.inv(x)) == dom.one


# -- serialization -----------------------------------------------------------


@pytest.mark.parametrize("dom", [GF5, QQ, FL], ids=str)
def test_json_round_trip(dom, rng):
    m = random_matrix(dom, 3, 2, rng)
    text = json.dumps(m.to_json())
    assert Matrix.from_json(json.loads(text)) == m


def test_rational_entries_encoded_as_strings():
    m = M(QQ, [[Fraction(3, 2), -1]])
    assert m.to_json()["entries"] == ["3/2", "-1/1"]


def test_gf_json_rejects_out_of_range():
    obj = M(GF5, [[1, 2]]).to_json()
    obj["entries"][0] = 9
    with pytest.raises(ValueError):
        Matrix.from_json(obj)


def test_to_numpy_matches(rng):
    m = random_matrix(QQ, 3, 3, rng)
    arr = m.to_numpy()
    assert np.allclose(arr, [[float(x) for x in row] for row in m.to_rows()])
