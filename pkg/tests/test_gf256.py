import numpy as np
import pytest

from fmsr import gf256
from fmsr.gf256 import MUL, ZeroInverse, gf_add, gf_inv, gf_mul

from oracles import peasant_mul

ALL = np.arange(256, dtype=np.uint8)


@pytest.mark.parametrize("a,b,expected", [(0x00, 0x5A, 0x5A), (0x5A, 0x5A, 0x00), (0x0F, 0xF0, 0xFF)])
def test_add(a, b, expected):
    assert gf_add(a, b) == expected


def test_mul_examples():
    assert gf_mul(0x02, 0x03) == 0x06
    assert all(gf_mul(a, 1) == a for a in range(256))
    # x^7 * x wraps around to the low byte of the reduction polynomial
    assert peasant_mul(0x80, 0x02) == 0x1D
    assert gf_mul(0x80, 0x02) == 0x1D == gf256.POLY & 0xFF


def test_inv_examples():
    assert gf_inv(1) == 1
    with pytest.raises(ZeroInverse):
        gf_inv(0)
    with pytest.raises(ZeroDivisionError):
        gf256.inv([3, 0])


def test_inverse_exhaustive():
    for a in range(1, 256):
        assert peasant_mul(a, gf_inv(a)) == 1
    inv = gf256.inv(ALL[1:])
    assert np.all(MUL[ALL[1:], inv] == 1)
    assert len(set(inv.tolist())) == 255


def test_table_matches_peasant_all_pairs():
    expected = np.array([[peasant_mul(a, b) for b in range(256)] for a in range(256)], dtype=np.uint8)
    assert np.array_equal(MUL, expected)
    assert all(gf_mul(a, b) == expected[a, b] for a in range(0, 256, 7) for b in range(256))


def test_log_antilog_roundtrip():
    nz = ALL[1:]
    assert np.array_equal(gf256.EXP[gf256.LOG[nz]], nz)
    assert len(set(gf256.EXP[:255].tolist())) == 255


def test_polynomial_is_irreducible():
    # no factor of degree 1..4 divides x^8+x^4+x^3+x^2+1 over GF(2)
    def polymod(a, b):
        db = b.bit_length()
        while a.bit_length() >= db:
            a ^= b << (a.bit_length() - db)
        return a
    for d in range(2, 1 << 5):
        assert polymod(gf256.POLY, d) != 0


def test_field_axioms_exhaustive():
    a = ALL[:, None]
    b = ALL[None, :]
    assert np.array_equal(MUL, MUL.T)
    assert np.array_equal(a ^ b, b ^ a)
    assert np.all((a ^ 0) == a)
    assert np.all(MUL[a, 1] == a)
    assert np.all(MUL[a, 0] == 0)
    for c in range(256):
        # (a*b)*c == a*(b*c)
        assert np.array_equal(MUL[MUL, c], MUL[ALL[:, None], MUL[ALL, c][None, :]])
        # a*(b^c) == a*b ^ a*c
        assert np.array_equal(MUL[a, b ^ c], MUL ^ MUL[a, c])


def test_vectorised_mul_broadcasts():
    a = np.array([[1, 2], [3, 4]], dtype=np.uint8)
    out = gf256.mul(a, 2)
    assert out.shape == (2, 2)
    assert out.tolist() == [[2, 4], [6, 8]]


def test_tables_read_only():
    with pytest.raises(ValueError):
        MUL[1, 1] = 0
