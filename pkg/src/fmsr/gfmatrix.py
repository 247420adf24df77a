"""Dense linear algebra over GF(2^8).

Matrices are plain 2-D ``numpy.uint8`` arrays. Elimination always picks the
first nonzero entry at or below the current row as pivot, so every routine
here is deterministic. The inner loops are compiled with numba; stacks of
small matrices (the repair checks rank-test hundreds of 2k x 2k matrices at
a time) go through the batched kernels.
"""

import numpy as np
from numba import njit

from .gf256 import INV, MUL


class Singular(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


@njit(cache=True)
def _eliminate(m, mul, inv, ncols):
    """Gauss-Jordan on ``m`` in place using the first ``ncols`` columns for
    pivots. Returns the rank; pivot rows end up normalised and on top."""
    rows, cols = m.shape
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        p = r
        while p < rows and m[p, c] == 0:
            p += 1
        if p == rows:
            continue
        if p != r:
            for j in range(cols):
                t = m[r, j]
                m[r, j] = m[p, j]
                m[p, j] = t
        f = inv[m[r, c]]
        for j in range(c, cols):
            m[r, j] = mul[f, m[r, j]]
        for i in range(rows):
            if i == r:
                continue
            g = m[i, c]
            if g != 0:
                for j in range(c, cols):
                    m[i, j] ^= mul[g, m[r, j]]
        r += 1
    return r


@njit(cache=True)
def _rank(m, mul, inv):
    # forward elimination only; cheaper than Gauss-Jordan when only the
    # rank is wanted
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = r
        while p < rows and m[p, c] == 0:
            p += 1
        if p == rows:
            continue
        if p != r:
            for j in range(c, cols):
                t = m[r, j]
                m[r, j] = m[p, j]
                m[p, j] = t
        f = inv[m[r, c]]
        for j in range(c, cols):
            m[r, j] = mul[f, m[r, j]]
        for i in range(r + 1, rows):
            g = m[i, c]
            if g != 0:
                for j in range(c, cols):
                    m[i, j] ^= mul[g, m[r, j]]
        r += 1
    return r


@njit(cache=True)
def _batch_rank(stack, mul, inv):
    out = np.empty(stack.shape[0], dtype=np.int64)
    for b in range(stack.shape[0]):
        out[b] = _rank(stack[b].copy(), mul, inv)
    return out


@njit(cache=True)
def _first_deficient(stack, target, mul, inv):
    for b in range(stack.shape[0]):
        if _rank(stack[b].copy(), mul, inv) < target:
            return b
    return -1


def warmup():
    """Compile (or load from cache) the kernels so later timings exclude it."""
    m = identity(2)[None]
    first_deficient(m)
    ranks(m)
    invert(identity(2))


def as_matrix(m):
    m = np.asarray(m)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    return m.astype(np.uint8, copy=False)


def identity(n):
    return np.eye(n, dtype=np.uint8)


def matmul(a, b):
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise LengthMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return np.bitwise_xor.reduce(MUL[a[:, :, None], b[None, :, :]], axis=1)


def matvec(a, x):
    x = np.asarray(x, dtype=np.uint8)
    return matmul(a, x[:, None])[:, 0]


def rank(m):
    m = as_matrix(m)
    if m.size == 0:
        return 0
    return int(_rank(m.copy(), MUL, INV))


def ranks(stack):
    """Rank of every matrix in a ``(batch, rows, cols)`` stack."""
    stack = np.ascontiguousarray(stack, dtype=np.uint8)
    return _batch_rank(stack, MUL, INV)


def first_deficient(stack, target=None):
    """Index of the first matrix in ``stack`` whose rank is below ``target``
    (default: the row count), or -1 if every matrix reaches it. Stops at the
    first failure."""
    stack = np.ascontiguousarray(stack, dtype=np.uint8)
    if target is None:
        target = stack.shape[1]
    return int(_first_deficient(stack, target, MUL, INV))


def invert(m):
    m = as_matrix(m)
    n, cols = m.shape
    if n != cols:
        raise ValueError(f"cannot invert a non-square {m.shape} matrix")
    aug = np.concatenate([m, identity(n)], axis=1)
    if _eliminate(aug, MUL, INV, n) < n:
        raise Singular("matrix is singular")
    return aug[:, n:].copy()


def solve(a, b):
    """Solve ``a @ x = b`` for a square, full-rank ``a``.

    ``b`` may be a vector or a matrix of right-hand sides (one per column).
    """
    a = as_matrix(a)
    n, cols = a.shape
    if n != cols:
        raise ValueError(f"coefficient matrix must be square, got {a.shape}")
    b = np.asarray(b, dtype=np.uint8)
    vector = b.ndim == 1
    rhs = b[:, None] if vector else b
    if rhs.shape[0] != n:
        raise LengthMismatch(f"right-hand side has {rhs.shape[0]} rows, expected {n}")
    aug = np.concatenate([a, rhs], axis=1)
    if _eliminate(aug, MUL, INV, n) < n:
        raise Singular("coefficient matrix is singular")
    x = aug[:, n:].copy()
    return x[:, 0] if vector else x


def apply(coeff_rows, payloads):
    """Linear combinations of payloads, byte-wise.

    Row ``r`` of the result is ``sum_m coeff_rows[r, m] * payloads[m]``.
    ``payloads`` is a sequence of equal-length byte strings or a 2-D uint8
    array; the result is a ``(rows, length)`` uint8 array.
    """
    coeff_rows = as_matrix(coeff_rows)
    if isinstance(payloads, np.ndarray):
        data = payloads.astype(np.uint8, copy=False)
        if data.ndim != 2:
            raise LengthMismatch("payload array must be 2-D")
    else:
        payloads = list(payloads)
        lengths = {len(p) for p in payloads}
        if len(lengths) > 1:
            raise LengthMismatch(f"payloads have differing lengths {sorted(lengths)}")
        width = lengths.pop() if lengths else 0
        data = np.empty((len(payloads), width), dtype=np.uint8)
        for i, p in enumerate(payloads):
            data[i] = np.frombuffer(bytes(p), dtype=np.uint8)
    if data.shape[0] != coeff_rows.shape[1]:
        raise LengthMismatch(
            f"{coeff_rows.shape[1]} coefficients per row but {data.shape[0]} payloads")
    out = np.zeros((coeff_rows.shape[0], data.shape[1]), dtype=np.uint8)
    for r in range(coeff_rows.shape[0]):
        for m in range(coeff_rows.shape[1]):
            c = coeff_rows[r, m]
            if c:
                out[r] ^= MUL[c][data[m]]
    return out
