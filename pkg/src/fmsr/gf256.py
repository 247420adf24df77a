"""Arithmetic in GF(2^8) via log/antilog tables.

The field is built from the reduction polynomial x^8 + x^4 + x^3 + x^2 + 1
(0x11D) with 0x02 as the primitive element. All tables are module-level
numpy arrays and are never mutated after import.
"""

import numpy as np

POLY = 0x11D
GENERATOR = 0x02
ORDER = 256


class ZeroInverse(ZeroDivisionError):
    pass


def _xtime(x):
    x <<= 1
    if x & 0x100:
        x ^= POLY
    return x


def _build_tables():
    exp = np.zeros(512, dtype=np.uint8)
    log = np.zeros(256, dtype=np.int32)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x = _xtime(x)  # x * GENERATOR
    if x != 1:
        raise RuntimeError("generator does not have order 255")
    exp[255:510] = exp[:255]
    return exp, log


EXP, LOG = _build_tables()

# full product table: MUL[a, b] == a * b
_idx = LOG[1:, None] + LOG[None, 1:]
MUL = np.zeros((256, 256), dtype=np.uint8)
MUL[1:, 1:] = EXP[_idx]
del _idx

INV = np.zeros(256, dtype=np.uint8)
INV[1:] = EXP[(255 - LOG[1:]) % 255]

for _t in (EXP, LOG, MUL, INV):
    _t.setflags(write=False)


def gf_add(a, b):
    return a ^ b


gf_sub = gf_add


def gf_mul(a, b):
    if a == 0 or b == 0:
        return 0
    return int(EXP[LOG[a] + LOG[b]])


def gf_inv(a):
    if a == 0:
        raise ZeroInverse("0 has no multiplicative inverse in GF(2^8)")
    return int(INV[a])


def gf_div(a, b):
    return gf_mul(a, gf_inv(b))


def gf_pow(a, e):
    if a == 0:
        return 0 if e else 1
    return int(EXP[(LOG[a] * e) % 255])


def mul(a, b):
    """Elementwise product of two uint8 arrays (broadcasting)."""
    return MUL[np.asarray(a, dtype=np.uint8), np.asarray(b, dtype=np.uint8)]


def inv(a):
    a = np.asarray(a, dtype=np.uint8)
    if np.any(a == 0):
        raise ZeroInverse("0 has no multiplicative inverse in GF(2^8)")
    return INV[a]
