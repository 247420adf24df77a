"""Encoding and decoding of (n, n-2) FMSR codes.

A file is cut into ``2k`` native chunks which are never stored. Every node
keeps two parity chunks, each a GF(2^8) linear combination of all native
chunks; the combination coefficients of every stored chunk are tracked in
:class:`CodeState` and are the only thing the repair checks look at.
"""

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import gfmatrix
from .gf256 import gf_inv

MAX_NODES = 12


class InvalidParams(ValueError):
    pass


class ParamsTooLarge(InvalidParams):
    pass


class EmptyFile(ValueError):
    pass


class NotDecodable(ValueError):
    pass


@dataclass(frozen=True)
class CodeParams:
    n: int
    k: int = None

    def __post_init__(self):
        if self.k is None:
            object.__setattr__(self, "k", self.n - 2)
        if self.n < 4:
            raise InvalidParams(f"need n >= 4 (k = n - 2 >= 2), got n={self.n}")
        if self.n > MAX_NODES:
            raise InvalidParams(f"n is capped at {MAX_NODES}, got n={self.n}")
        if self.k != self.n - 2:
            raise InvalidParams(f"only k = n - 2 is supported, got n={self.n}, k={self.k}")

    @property
    def chunks_per_node(self):
        return self.n - self.k

    @property
    def native_count(self):
        return self.k * (self.n - self.k)

    @property
    def parity_count(self):
        return self.n * (self.n - self.k)

    @property
    def nodes(self):
        return range(1, self.n + 1)


class ChunkId(NamedTuple):
    node: int
    index: int

    def __str__(self):
        return f"P{self.node},{self.index}"


def flat_index(cid):
    """Row of ``cid`` in the ``(2n, 2k)`` view of the coefficient array."""
    return 2 * (cid[0] - 1) + (cid[1] - 1)


@dataclass(frozen=True)
class Chunk:
    id: ChunkId
    payload: bytes


@dataclass(frozen=True)
class RepairRecord:
    """Latest repair of one node: the round it happened in and the chunk
    read from each surviving node (node -> chunk index)."""
    round: int
    selection: dict


@dataclass(frozen=True)
class FileMeta:
    original_length: int
    padded_length: int
    chunk_size: int


@dataclass(frozen=True, eq=False)
class CodeState:
    params: CodeParams
    coeffs: np.ndarray  # (n, 2, 2k): coeffs[i-1, j-1] is the row of P_{i,j}
    round: int = 0
    last_selection: dict = None
    last_repaired_node: int = None
    ermds_selection: dict = field(default_factory=dict)
    history: dict = field(default_factory=dict)  # node -> RepairRecord

    def row(self, cid):
        return self.coeffs[cid[0] - 1, cid[1] - 1]

    def rows(self, ids):
        return np.stack([self.row(c) for c in ids])

    @property
    def flat(self):
        return self.coeffs.reshape(self.params.parity_count, self.params.native_count)

    def node_rows(self, nodes):
        return self.coeffs[[i - 1 for i in nodes]].reshape(-1, self.params.native_count)

    def chunk_ids(self):
        return [ChunkId(i, j) for i in self.params.nodes for j in (1, 2)]

    def replace(self, **changes):
        return replace(self, **changes)

    def __eq__(self, other):
        if not isinstance(other, CodeState):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.coeffs, other.coeffs)
            and self.round == other.round
            and self.last_selection == other.last_selection
            and self.last_repaired_node == other.last_repaired_node
            and self.ermds_selection == other.ermds_selection
            and self.history == other.history
        )

    __hash__ = None


def cauchy_matrix(rows, cols):
    """``rows x cols`` Cauchy matrix with entries ``1 / (x_l + y_m)``.

    Labels are ``y_m = m`` and ``x_l = cols + l``, all distinct, so every
    square submatrix is nonsingular.
    """
    if rows + cols > 256:
        raise ParamsTooLarge(
            f"a {rows}x{cols} Cauchy matrix needs {rows + cols} distinct labels in GF(2^8)")
    return np.array(
        [[gf_inv((cols + l) ^ m) for m in range(cols)] for l in range(rows)],
        dtype=np.uint8,
    )


def generate_initial_coefficients(params):
    """``(2n, 2k)`` store-time coefficients: any ``2k`` rows are independent."""
    return cauchy_matrix(params.parity_count, params.native_count)


def new_state(params):
    if isinstance(params, int):
        params = CodeParams(params)
    coeffs = generate_initial_coefficients(params).reshape(params.n, 2, params.native_count)
    coeffs.setflags(write=False)
    return CodeState(
        params=params,
        coeffs=coeffs,
        ermds_selection={i: 1 for i in params.nodes},
    )


def file_meta(params, length):
    if length <= 0:
        raise EmptyFile("cannot encode an empty file")
    m = params.native_count
    padded = -(-length // m) * m
    return FileMeta(original_length=length, padded_length=padded, chunk_size=padded // m)


def split_natives(params, data):
    """Zero-pad ``data`` and cut it into ``2k`` native chunks (rows)."""
    meta = file_meta(params, len(data))
    buf = np.zeros(meta.padded_length, dtype=np.uint8)
    buf[: len(data)] = np.frombuffer(bytes(data), dtype=np.uint8)
    return meta, buf.reshape(params.native_count, meta.chunk_size)


def encode(state, data):
    meta, natives = split_natives(state.params, data)
    parity = gfmatrix.apply(state.flat, natives)
    ids = state.chunk_ids()
    return meta, [Chunk(cid, parity[flat_index(cid)].tobytes()) for cid in ids]


def decode(state, meta, chunks):
    """Rebuild the file from exactly ``2k`` chunks.

    ``chunks`` is a sequence of ``(ChunkId, payload)`` pairs or :class:`Chunk`.
    """
    pairs = [(c.id, c.payload) if isinstance(c, Chunk) else (ChunkId(*c[0]), c[1]) for c in chunks]
    need = state.params.native_count
    if len(pairs) != need:
        raise NotDecodable(f"need exactly {need} chunks, got {len(pairs)}")
    if len({cid for cid, _ in pairs}) != need:
        raise NotDecodable("duplicate chunk ids")
    for cid, payload in pairs:
        if len(payload) != meta.chunk_size:
            raise gfmatrix.LengthMismatch(
                f"chunk {cid} has {len(payload)} bytes, expected {meta.chunk_size}")
    rows = state.rows([cid for cid, _ in pairs])
    try:
        inverse = gfmatrix.invert(rows)
    except gfmatrix.Singular:
        raise NotDecodable("coefficient rows of the given chunks are linearly dependent") from None
    natives = gfmatrix.apply(inverse, [p for _, p in pairs])
    return natives.tobytes()[: meta.original_length]


def natives_from(state, meta, chunks):
    """Native chunks (as a ``(2k, chunk_size)`` array) recovered from ``chunks``."""
    data = decode(state, meta, chunks)
    buf = np.zeros(meta.padded_length, dtype=np.uint8)
    buf[: len(data)] = np.frombuffer(data, dtype=np.uint8)
    return buf.reshape(state.params.native_count, meta.chunk_size)
