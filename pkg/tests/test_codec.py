import numpy as np
import pytest
from hypothesis import given, strategies as st

from compound_codes.analysis import decoding_threshold
from compound_codes.codec import (
    CosetConstraint,
    DecodeStatus,
    coset_size,
    enumerate_codebook,
    ml_decode,
    quantize,
    threshold_decode,
)
from compound_codes.ensembles import CompoundCode, DegreeParams, build_compound
from compound_codes.errors import DimensionMismatch, InconsistentSystem, SearchSpaceTooLarge
from compound_codes.gf2 import BinaryVector, SparseBinaryMatrix, mat_vec_mul, syndrome

from oracles import Book, bits, random_instance


def repetition(n):
    return CompoundCode.ldgm_only(SparseBinaryMatrix.from_dense(np.ones((1, n), dtype=np.uint8)))


def test_repetition_ml_example():
    code = repetition(5)
    out = ml_decode(code, BinaryVector.from_str("11000"))
    assert out.status is DecodeStatus.DECODED
    assert out.z_hat == BinaryVector.from_str("0")
    assert out.distance == 2


def test_threshold_examples():
    code = repetition(10)
    assert decoding_threshold(10, 0.1) == 5
    out = threshold_decode(code, BinaryVector.zeros(10), 0.1)
    assert out.status is DecodeStatus.DECODED and out.distance == 0

    code = repetition(16)
    r = decoding_threshold(16, 0.1)
    assert r == 7
    y = BinaryVector.from_str("1" * (r + 1) + "0" * (16 - r - 1))  # r + 1 from both codewords
    assert threshold_decode(code, y, 0.1).status is DecodeStatus.NO_CODEWORD
    # a radius that reaches both codewords is ambiguous
    assert threshold_decode(code, y, 0.45).status is DecodeStatus.AMBIGUOUS


def test_quantize_trivial_cases():
    code = CompoundCode.ldgm_only(SparseBinaryMatrix.identity(9))
    s = BinaryVector.from_str("101100111")
    assert quantize(code, s) == (s, 0)

    code = build_compound(16, 16, 8, 4, DegreeParams(4, 3, 4), seed=3)
    z0 = next(z for z, _ in enumerate_codebook(code, CosetConstraint.zero(code)) if z.weight() > 0)
    z, dist = quantize(code, mat_vec_mul(z0, code.G))
    assert dist == 0
    assert mat_vec_mul(z, code.G) == mat_vec_mul(z0, code.G)


def test_quantize_random_12_8_4():
    rng = np.random.default_rng(5)
    G = SparseBinaryMatrix.from_dense(rng.integers(0, 2, (8, 12)))
    H1 = SparseBinaryMatrix.from_dense(np.hstack([np.eye(4, dtype=int), rng.integers(0, 2, (4, 4))]))
    code = CompoundCode(G, H1, SparseBinaryMatrix.zeros(0, 8))
    book = Book(code)
    assert len(book.Z) == 16
    for _ in range(50):
        s = rng.integers(0, 2, 12).astype(np.uint8)
        z, dist = quantize(code, BinaryVector.from_array(s))
        assert dist == book.distances(s).min()
        assert np.array_equal(np.array(bits(syndrome(H1, z))), np.zeros(4))


def test_random_instances_against_brute_force():
    rng = np.random.default_rng(2025)
    for _ in range(300):
        code, cons, t1, t2 = random_instance(rng, max_n=12, max_m=10)
        book = Book(code, t1, t2)
        y = rng.integers(0, 2, code.n).astype(np.uint8)
        yv = BinaryVector.from_array(y)
        best, distinct, _ = book.nearest(y)

        z, dist = quantize(code, yv, cons)
        assert dist == best
        out = ml_decode(code, yv, cons)
        assert out.distance == best
        assert np.array_equal(bits(mat_vec_mul(out.z_hat, code.G)), book.C[book.distances(y) == best][0]) or distinct > 1
        assert (out.status is DecodeStatus.AMBIGUOUS) == (distinct > 1)

        flip = float(rng.uniform(0.01, 0.49))
        th = threshold_decode(code, yv, flip, cons)
        inside = book.within(y, decoding_threshold(code.n, flip))
        expected = {0: DecodeStatus.NO_CODEWORD, 1: DecodeStatus.DECODED}.get(inside, DecodeStatus.AMBIGUOUS)
        assert th.status is expected
        if th.decoded:
            assert th.z_hat == out.z_hat


def test_enumeration_first_minimizer_wins():
    code, cons, t1, t2 = random_instance(np.random.default_rng(8), max_n=6, max_m=8, constrain_h2=False)
    rng = np.random.default_rng(1)
    for _ in range(20):
        y = BinaryVector.from_array(rng.integers(0, 2, code.n))
        z, dist = quantize(code, y, cons)
        first = next(zz for zz, c in enumerate_codebook(code, cons) if (c.value ^ y.value).bit_count() == dist)
        assert z == first


def test_zero_noise_decoding():
    code = build_compound(16, 16, 8, 4, DegreeParams(4, 3, 4), seed=12)
    cons = CosetConstraint.zero(code, constrain_h2=True)
    for z, c in enumerate_codebook(code, cons):
        out = ml_decode(code, c, cons)
        assert out.decoded and out.distance == 0
        assert mat_vec_mul(out.z_hat, code.G) == c


def test_kernel_of_g_is_not_ambiguity():
    # even column weights put the all-ones z in the kernel of G
    G = SparseBinaryMatrix.from_dense([[1, 1, 0], [1, 0, 1], [0, 1, 1]])
    code = CompoundCode.ldgm_only(G)
    out = ml_decode(code, BinaryVector.from_str("110"))
    assert out.decoded and out.distance == 0


def test_codebook_counts():
    code = CompoundCode(SparseBinaryMatrix.identity(4), SparseBinaryMatrix.identity(4), SparseBinaryMatrix.zeros(0, 4))
    assert len(list(enumerate_codebook(code, CosetConstraint(BinaryVector.from_str("1010"))))) == 1

    code = CompoundCode.ldgm_only(SparseBinaryMatrix.from_dense(np.random.default_rng(0).integers(0, 2, (6, 9))))
    pairs = list(enumerate_codebook(code))
    assert len(pairs) == 64 and len({z for z, _ in pairs}) == 64

    rng = np.random.default_rng(4)
    H1 = SparseBinaryMatrix.from_dense(np.hstack([np.eye(4, dtype=int), rng.integers(0, 2, (4, 4))]))
    code = CompoundCode(SparseBinaryMatrix.from_dense(rng.integers(0, 2, (8, 10))), H1, SparseBinaryMatrix.zeros(0, 8))
    assert len(list(enumerate_codebook(code))) == 16 == coset_size(code)
    for z, c in enumerate_codebook(code):
        assert syndrome(H1, z).weight() == 0
        assert mat_vec_mul(z, code.G) == c


def test_large_coset_streams_in_blocks():
    rng = np.random.default_rng(9)
    code = CompoundCode.ldgm_only(SparseBinaryMatrix.from_dense(rng.integers(0, 2, (16, 70))))
    y = rng.integers(0, 2, 70).astype(np.uint8)
    z, dist = quantize(code, BinaryVector.from_array(y))
    assert dist == Book(code).distances(y).min()


def test_errors():
    code = build_compound(16, 16, 8, 4, DegreeParams(4, 3, 4), seed=3)
    with pytest.raises(SearchSpaceTooLarge):
        quantize(code, BinaryVector.zeros(16), cap=4)
    with pytest.raises(DimensionMismatch):
        quantize(code, BinaryVector.zeros(16), CosetConstraint(BinaryVector.zeros(7)))
    with pytest.raises(DimensionMismatch):
        ml_decode(code, BinaryVector.zeros(15))
    bad = CompoundCode(SparseBinaryMatrix.identity(2), SparseBinaryMatrix.from_dense([[1, 1], [1, 1]]), SparseBinaryMatrix.zeros(0, 2))
    with pytest.raises(InconsistentSystem):
        quantize(bad, BinaryVector.zeros(2), CosetConstraint(BinaryVector.from_str("10")))


@given(st.integers(1, 5000), st.integers(1, 5000), st.floats(0.001, 0.499), st.floats(0.001, 0.499))
def test_threshold_monotone(n1, n2, p1, p2):
    n1, n2 = sorted((n1, n2))
    p1, p2 = sorted((p1, p2))
    assert decoding_threshold(n1, p1) <= decoding_threshold(n2, p1)
    assert decoding_threshold(n1, p1) <= decoding_threshold(n1, p2)
