import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fmsr import gfmatrix as gm
from fmsr.gf256 import MUL

from oracles import combine_bytes, matmul_oracle, rank_oracle

u8 = st.integers(0, 255)


def random_full_rank(rng, n):
    while True:
        m = rng.integers(0, 256, (n, n), dtype=np.uint8)
        if rank_oracle(m) == n:
            return m


def test_rank_examples(rng):
    assert gm.rank(gm.identity(4)) == 4
    m = rng.integers(0, 256, (3, 5), dtype=np.uint8)
    m[2] = m[0]
    assert gm.rank(m) <= 2
    for _ in range(20):
        m = rng.integers(0, 256, (6, 4), dtype=np.uint8)
        assert gm.rank(m) == rank_oracle(m)


def test_rank_low_rank_products(rng):
    for r in range(0, 5):
        a = rng.integers(0, 256, (6, r), dtype=np.uint8)
        b = rng.integers(0, 256, (r, 5), dtype=np.uint8)
        m = gm.matmul(a, b) if r else np.zeros((6, 5), dtype=np.uint8)
        assert gm.rank(m) == rank_oracle(m) <= r


@settings(max_examples=60, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=u8))
def test_rank_matches_oracle(m):
    assert gm.rank(m) == rank_oracle(m)


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, (5, 5), elements=u8), st.permutations(range(5)), st.integers(0, 4), st.integers(1, 255))
def test_rank_invariant_under_row_ops(m, perm, row, scale):
    r = gm.rank(m)
    assert gm.rank(m[list(perm)]) == r
    scaled = m.copy()
    scaled[row] = MUL[scale][scaled[row]]
    assert gm.rank(scaled) == r


def test_batched_rank(rng):
    stack = rng.integers(0, 256, (50, 4, 4), dtype=np.uint8)
    stack[7, 3] = stack[7, 1]
    stack[31, :, 2] = 0
    ranks = gm.ranks(stack)
    assert ranks.tolist() == [rank_oracle(m) for m in stack]
    assert gm.first_deficient(stack) == 7
    assert gm.first_deficient(stack[8:]) == 31 - 8
    assert gm.first_deficient(np.stack([gm.identity(4)] * 3)) == -1


def test_matmul_matches_oracle(rng):
    a = rng.integers(0, 256, (3, 5), dtype=np.uint8)
    b = rng.integers(0, 256, (5, 2), dtype=np.uint8)
    assert gm.matmul(a, b).tolist() == matmul_oracle(a, b)
    with pytest.raises(gm.LengthMismatch):
        gm.matmul(a, a)


def test_invert_examples(rng):
    assert np.array_equal(gm.invert(gm.identity(4)), gm.identity(4))
    m = rng.integers(1, 256, (4, 4), dtype=np.uint8)
    m[2] = 0
    with pytest.raises(gm.Singular):
        gm.invert(m)
    for _ in range(10):
        m = random_full_rank(rng, 4)
        inv = gm.invert(m)
        assert matmul_oracle(m, inv) == gm.identity(4).tolist()
        assert matmul_oracle(inv, m) == gm.identity(4).tolist()


def test_solve_examples(rng):
    b = rng.integers(0, 256, 4, dtype=np.uint8)
    assert np.array_equal(gm.solve(gm.identity(4), b), b)
    with pytest.raises(gm.Singular):
        gm.solve(np.zeros((3, 3), dtype=np.uint8), b[:3])
    with pytest.raises(gm.LengthMismatch):
        gm.solve(gm.identity(4), b[:3])
    for _ in range(10):
        a = random_full_rank(rng, 6)
        b = rng.integers(0, 256, 6, dtype=np.uint8)
        x = gm.solve(a, b)
        residual = [r[0] for r in matmul_oracle(a, x[:, None])]
        assert residual == b.tolist()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_solve_roundtrip(seed, n):
    rng = np.random.default_rng(seed)
    m = random_full_rank(rng, n)
    x = rng.integers(0, 256, n, dtype=np.uint8)
    assert np.array_equal(gm.solve(m, gm.matvec(m, x)), x)


def test_apply_examples(rng):
    payloads = [rng.integers(0, 256, 32, dtype=np.uint8).tobytes() for _ in range(4)]
    assert [bytes(r) for r in gm.apply(gm.identity(4), payloads)] == payloads
    zero = gm.apply(np.zeros((1, 4), dtype=np.uint8), payloads)
    assert not zero.any()

    big = [rng.integers(0, 256, 1024, dtype=np.uint8).tobytes() for _ in range(4)]
    coeff = rng.integers(0, 256, (2, 4), dtype=np.uint8)
    out = gm.apply(coeff, big)
    for r in range(2):
        assert out[r].tobytes() == combine_bytes(coeff[r], big)


def test_apply_errors():
    with pytest.raises(gm.LengthMismatch):
        gm.apply(gm.identity(2), [b"ab", b"abc"])
    with pytest.raises(gm.LengthMismatch):
        gm.apply(gm.identity(3), [b"ab", b"cd"])


@settings(max_examples=40, deadline=None)
@given(arrays(np.uint8, (3, 4), elements=u8),
       arrays(np.uint8, (4, 16), elements=u8),
       arrays(np.uint8, (4, 16), elements=u8))
def test_apply_is_linear(c, p, q):
    assert np.array_equal(gm.apply(c, p ^ q), gm.apply(c, p) ^ gm.apply(c, q))
