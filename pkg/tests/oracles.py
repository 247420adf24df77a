"""Reference implementations used as test oracles.

Nothing here imports the package's tables or elimination kernels: field
products come from shift-and-add multiplication, ranks from an elimination
that scans columns right-to-left and pivots on the last nonzero row.
"""

from itertools import combinations

POLY = 0x11D


def peasant_mul(a, b):
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= POLY
    return r


def brute_inv(a):
    for b in range(1, 256):
        if peasant_mul(a, b) == 1:
            return b
    raise ZeroDivisionError(a)


_INV = [0] + [brute_inv(a) for a in range(1, 256)]


def rank_oracle(rows):
    """Row rank with reversed column order and last-nonzero pivoting."""
    m = [list(map(int, r)) for r in rows]
    if not m:
        return 0
    cols = len(m[0])
    rank = 0
    used = [False] * len(m)
    for c in reversed(range(cols)):
        pivot = None
        for i in reversed(range(len(m))):
            if not used[i] and m[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        used[pivot] = True
        rank += 1
        f = _INV[m[pivot][c]]
        prow = [peasant_mul(f, x) for x in m[pivot]]
        for i in range(len(m)):
            if i != pivot and m[i][c]:
                g = m[i][c]
                m[i] = [x ^ peasant_mul(g, y) for x, y in zip(m[i], prow)]
    return rank


def combine_bytes(coeffs, payloads):
    """sum_m coeffs[m] * payloads[m], one byte at a time."""
    out = bytearray(len(payloads[0]))
    for c, p in zip(coeffs, payloads):
        for t, byte in enumerate(p):
            out[t] ^= peasant_mul(int(c), byte)
    return bytes(out)


def matmul_oracle(a, b):
    a = [list(map(int, r)) for r in a]
    b = [list(map(int, r)) for r in b]
    out = []
    for row in a:
        acc = [0] * len(b[0])
        for x, brow in zip(row, b):
            for j, y in enumerate(brow):
                acc[j] ^= peasant_mul(x, y)
        out.append(acc)
    return out


def brute_force_rbcs(n):
    """Chunk sets of every RBC, found by filtering all 2k-subsets of the 2n
    chunks: n-1 nodes touched, k-1 of them with both chunks."""
    k = n - 2
    chunks = [(i, j) for i in range(1, n + 1) for j in (1, 2)]
    out = set()
    for subset in combinations(chunks, 2 * k):
        per_node = {}
        for i, _ in subset:
            per_node[i] = per_node.get(i, 0) + 1
        if len(per_node) == n - 1 and sum(1 for v in per_node.values() if v == 2) == k - 1:
            out.add(frozenset(subset))
    return out


def spans_fewer_chunks(rbc_ids, repaired, selection, gamma, n):
    """Span-based LDC test for the latest repair.

    Writes every chunk of the RBC over the chunks that existed before the
    repair (new chunks as their gamma combination of the selected sources)
    and reports whether those ``2k`` vectors have rank below ``2k``. Only
    RBCs holding both chunks of the repaired node qualify.
    """
    k = n - 2
    if not {(repaired, 1), (repaired, 2)} <= set(rbc_ids):
        return False
    coord = {(i, j): 2 * (i - 1) + (j - 1) for i in range(1, n + 1) for j in (1, 2)}
    rows = []
    for i, j in rbc_ids:
        v = [0] * (2 * n)
        if i == repaired:
            for s, idx in selection.items():
                v[coord[(s, idx)]] = int(gamma[s - 1][j - 1])
        else:
            v[coord[(i, j)]] = 1
        rows.append(v)
    return rank_oracle(rows) < 2 * k
