"""
Arithmetic in GF(2^8) and linear algebra over it
================================================

Everything in the code is built from bytes: addition is xor, products come
from log/antilog tables.
"""

import numpy as np

from fmsr import gf256, gfmatrix

# addition is xor, so every element is its own negative
print(gf256.gf_add(0x53, 0x53))          # 0
print(hex(gf256.gf_mul(0x80, 0x02)))     # 0x1d: x^7 * x wraps through the polynomial
print(hex(gf256.gf_inv(0x53)))

# the MUL table multiplies whole arrays at once
a = np.array([1, 2, 3, 0x80], dtype=np.uint8)
print(gf256.mul(a, 2))

# rank, inverse and solve work on uint8 matrices
rng = np.random.default_rng(1)
m = rng.integers(0, 256, (4, 4), dtype=np.uint8)
print("rank", gfmatrix.rank(m))
x = np.array([7, 0, 42, 255], dtype=np.uint8)
b = gfmatrix.matvec(m, x)
print("solve recovers x:", gfmatrix.solve(m, b))

# duplicate a row and the rank drops
m[3] = m[0]
print("rank after duplicating a row", gfmatrix.rank(m))
