import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from compound_codes.errors import DimensionMismatch, InconsistentSystem
from compound_codes.gf2 import (
    BinaryVector,
    SparseBinaryMatrix,
    enumerate_solutions,
    hamming_distance,
    mat_vec_mul,
    rank,
    solve_affine,
    syndrome,
    vstack,
)

from oracles import all_words, bits, dense, gf2_mul, gf2_rank


def vectors(length):
    return st.integers(0, (1 << length) - 1).map(lambda v: BinaryVector(v, length))


@st.composite
def matrices(draw, max_rows=8, max_cols=8):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    flat = draw(st.lists(st.integers(0, 1), min_size=r * c, max_size=r * c))
    return SparseBinaryMatrix.from_dense(np.array(flat, dtype=np.uint8).reshape(r, c))


def test_vector_basics():
    v = BinaryVector.from_str("10110")
    assert len(v) == 5
    assert list(v) == [1, 0, 1, 1, 0]
    assert v.weight() == 3
    assert v.support() == [0, 2, 3]
    assert str(v) == "10110"
    assert (~v) == BinaryVector.from_str("01001")
    assert BinaryVector.from_bits([1, 0, 1, 1, 0]) == v
    assert BinaryVector.from_array(np.array([1, 0, 1, 1, 0])) == v
    with pytest.raises(ValueError):
        BinaryVector(8, 3)


def test_hamming_examples():
    a = BinaryVector.from_str("10110")
    assert hamming_distance(a, a) == 0
    assert hamming_distance(a, ~a) == 5
    assert hamming_distance(a, BinaryVector.from_str("00011")) == 3
    with pytest.raises(DimensionMismatch):
        hamming_distance(a, BinaryVector.zeros(4))


@given(st.integers(1, 40).flatmap(lambda n: st.tuples(vectors(n), vectors(n), vectors(n))))
def test_hamming_metric(abc):
    a, b, c = abc
    assert hamming_distance(a, b) == hamming_distance(b, a)
    assert hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c)
    assert (hamming_distance(a, b) == 0) == (a == b)
    assert 0 <= a.weight() <= len(a)


def test_matrix_validation_and_cancellation():
    with pytest.raises(ValueError):
        SparseBinaryMatrix(3, 1, [[2, 1]])
    with pytest.raises(ValueError):
        SparseBinaryMatrix(3, 1, [[3]])
    M = SparseBinaryMatrix.from_placements(4, 2, [[1, 1, 2, 3], [0, 0, 0, 2]])
    assert M.column_supports == ((2, 3), (0, 2))


def test_mat_vec_examples():
    rng = np.random.default_rng(7)
    M = SparseBinaryMatrix.from_dense(rng.integers(0, 2, (8, 8)))
    assert mat_vec_mul(BinaryVector.zeros(8), M) == BinaryVector.zeros(8)
    z = BinaryVector.from_str("11010011")
    assert mat_vec_mul(z, SparseBinaryMatrix.identity(8)) == z
    for _ in range(50):
        z = BinaryVector.from_array(rng.integers(0, 2, 8))
        M = SparseBinaryMatrix.from_dense(rng.integers(0, 2, (8, 8)))
        assert np.array_equal(bits(mat_vec_mul(z, M)), gf2_mul(bits(z)[None, :], dense(M))[0])
    with pytest.raises(DimensionMismatch):
        mat_vec_mul(BinaryVector.zeros(7), M)


@given(matrices(), st.data())
def test_mat_vec_linearity_and_oracle(M, data):
    z1 = data.draw(vectors(M.rows))
    z2 = data.draw(vectors(M.rows))
    assert mat_vec_mul(z1 ^ z2, M) == mat_vec_mul(z1, M) ^ mat_vec_mul(z2, M)
    assert np.array_equal(bits(mat_vec_mul(z1, M)), gf2_mul(bits(z1)[None, :], dense(M))[0])
    t = data.draw(vectors(M.cols))
    assert np.array_equal(bits(syndrome(M, t)), gf2_mul(dense(M), bits(t))[:])


@given(matrices())
def test_transpose_involution_and_dense_roundtrip(M):
    assert M.transpose().transpose() == M
    assert np.array_equal(M.to_dense(), dense(M))
    assert np.array_equal(dense(M.transpose()), dense(M).T)
    assert sum(M.column_weights()) == sum(M.row_weights()) == M.nnz()


def test_rank_examples():
    assert rank(SparseBinaryMatrix.identity(5)) == 5
    assert rank(SparseBinaryMatrix.zeros(3, 4)) == 0
    assert rank(SparseBinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1]])) == 2


@given(matrices())
def test_rank_matches_dense_elimination(M):
    r = rank(M)
    assert r == gf2_rank(dense(M))
    assert 0 <= r <= min(M.rows, M.cols)


def test_enumerate_examples():
    m = 5
    t = BinaryVector.from_str("10011")
    assert list(enumerate_solutions(SparseBinaryMatrix.identity(m), t)) == [t]
    sols = list(enumerate_solutions(SparseBinaryMatrix.zeros(1, m), BinaryVector.zeros(1)))
    assert len(sols) == 32 and len(set(sols)) == 32

    H = SparseBinaryMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    t = BinaryVector.from_str("10")
    brute = {
        BinaryVector.from_bits(z)
        for z in itertools.product([0, 1], repeat=3)
        if syndrome(H, BinaryVector.from_bits(z)) == t
    }
    assert brute == {BinaryVector.from_str("100"), BinaryVector.from_str("011")}
    assert set(enumerate_solutions(H, t)) == brute


def test_inconsistent_raises_eagerly():
    H = SparseBinaryMatrix.from_dense([[1, 1], [1, 1]])
    with pytest.raises(InconsistentSystem):
        enumerate_solutions(H, BinaryVector.from_str("10"))


@settings(max_examples=60)
@given(matrices(max_rows=6, max_cols=9), st.data())
def test_solution_count_and_exactness(H, data):
    z0 = data.draw(vectors(H.cols))
    t = syndrome(H, z0)
    sols = list(enumerate_solutions(H, t))
    assert len(sols) == 2 ** (H.cols - rank(H))
    assert len(set(sols)) == len(sols)
    Z = all_words(H.cols)
    want = {BinaryVector.from_bits(z) for z in Z[(gf2_mul(Z, dense(H).T) == bits(t)).all(axis=1)]}
    assert set(sols) == want
    # deterministic order
    assert list(enumerate_solutions(H, t)) == sols


def test_enumeration_order_is_lexicographic_in_free_variables():
    H = SparseBinaryMatrix.from_dense([[1, 0, 1, 1]])
    space = solve_affine(H, BinaryVector.zeros(1))
    assert space.free_columns == (1, 2, 3)
    frees = [tuple(z[c] for c in space.free_columns) for z in space]
    assert frees == sorted(itertools.product([0, 1], repeat=3))


def test_vstack():
    a = SparseBinaryMatrix.from_dense([[1, 0, 1]])
    b = SparseBinaryMatrix.from_dense([[0, 1, 1], [1, 1, 0]])
    assert np.array_equal(vstack(a, b).to_dense(), np.array([[1, 0, 1], [0, 1, 1], [1, 1, 0]]))
