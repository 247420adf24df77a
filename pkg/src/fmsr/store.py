"""On-disk node storage and the metadata file.

Layout under a cluster root::

    fmsr.meta
    node_1/chunk_1_1.bin
    node_1/chunk_1_2.bin
    node_2/...

A failed node is a node directory with no chunk files. The metadata file is
line-oriented UTF-8 text::

    FMSR 1
    n=4
    k=2
    orig_len=4096
    chunk_size=1024
    round=0
    repaired=
    selection=
    ermds=1:1,2:1,3:1,4:1
    history=
    row 1 1 8e47...        (one line per stored chunk, 2k hex bytes)

``history`` holds the latest repair of every repaired node as
``node@round:src.idx/src.idx/...`` entries separated by ``;``.
"""

import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .codec import ChunkId, CodeParams, CodeState, FileMeta, InvalidParams, RepairRecord

META_NAME = "fmsr.meta"
HEADER = "FMSR 1"


class StoreError(Exception):
    pass


class NodeMismatch(StoreError):
    pass


class ChunkMissing(StoreError):
    pass


class AlreadyFailed(StoreError):
    pass


class FormatError(StoreError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class NodeStore:
    """Chunk files of one node. Counts reads and bytes read."""

    def __init__(self, root, node):
        self.root = Path(root)
        self.node = node
        self.dir = self.root / f"node_{node}"
        self.reads = 0
        self.bytes_read = 0
        self._lock = threading.Lock()

    def path(self, cid):
        return self.dir / f"chunk_{cid[0]}_{cid[1]}.bin"

    def chunks(self):
        if not self.dir.is_dir():
            return {}
        out = {}
        for p in sorted(self.dir.glob("chunk_*_*.bin")):
            _, node, index = p.stem.split("_")
            out[int(index)] = p
        return out

    @property
    def failed(self):
        return not self.chunks()

    def __repr__(self):
        return f"NodeStore({str(self.root)!r}, {self.node})"


def write_chunk(store, cid, payload):
    cid = ChunkId(*cid)
    if cid.node != store.node:
        raise NodeMismatch(f"chunk {cid} does not belong to node {store.node}")
    store.dir.mkdir(parents=True, exist_ok=True)
    tmp = store.path(cid).with_suffix(".tmp")
    tmp.write_bytes(bytes(payload))
    os.replace(tmp, store.path(cid))


def read_chunk(store, cid):
    cid = ChunkId(*cid)
    if cid.node != store.node:
        raise NodeMismatch(f"chunk {cid} does not belong to node {store.node}")
    try:
        data = store.path(cid).read_bytes()
    except FileNotFoundError:
        raise ChunkMissing(f"chunk {cid} is not present on node {store.node}") from None
    with store._lock:
        store.reads += 1
        store.bytes_read += len(data)
    return data


def open_cluster(root, n):
    return [NodeStore(root, i) for i in range(1, n + 1)]


def fail_node(cluster, node):
    store = cluster[node - 1]
    files = store.chunks()
    if not files:
        raise AlreadyFailed(f"node {node} has already failed")
    for p in files.values():
        p.unlink()


def total_reads(cluster):
    return sum(s.reads for s in cluster)


def reset_counters(cluster):
    for s in cluster:
        s.reads = 0
        s.bytes_read = 0


@dataclass(frozen=True)
class MetadataFile:
    state: CodeState
    file: FileMeta


def _pairs(d):
    return ",".join(f"{i}:{j}" for i, j in sorted(d.items()))


def _history(h):
    return ";".join(
        f"{node}@{rec.round}:" + "/".join(f"{i}.{j}" for i, j in sorted(rec.selection.items()))
        for node, rec in sorted(h.items())
    )


def dumps_metadata(meta):
    s, f = meta.state, meta.file
    lines = [
        HEADER,
        f"n={s.params.n}",
        f"k={s.params.k}",
        f"orig_len={f.original_length}",
        f"chunk_size={f.chunk_size}",
        f"round={s.round}",
        f"repaired={'' if s.last_repaired_node is None else s.last_repaired_node}",
        f"selection={'' if s.last_selection is None else _pairs(s.last_selection)}",
        f"ermds={_pairs(s.ermds_selection)}",
        f"history={_history(s.history)}",
    ]
    for cid in s.chunk_ids():
        lines.append(f"row {cid.node} {cid.index} {s.row(cid).tobytes().hex()}")
    return "\n".join(lines) + "\n"


def _check_chunk(i, j, n, lineno):
    if not 1 <= i <= n or j not in (1, 2):
        raise FormatError(f"chunk P{i},{j} out of range for n={n}", lineno)


def _parse_pairs(text, lineno, n):
    out = {}
    if not text:
        return out
    for item in text.split(","):
        try:
            i, j = map(int, item.split(":"))
        except ValueError:
            raise FormatError(f"bad node:index pair {item!r}", lineno) from None
        _check_chunk(i, j, n, lineno)
        out[i] = j
    return out


def _parse_history(text, lineno, n):
    out = {}
    if not text:
        return out
    for entry in text.split(";"):
        try:
            head, srcs = entry.split(":")
            node, rnd = map(int, head.split("@"))
            sel = dict(tuple(map(int, s.split("."))) for s in srcs.split("/"))
        except ValueError:
            raise FormatError(f"bad history entry {entry!r}", lineno) from None
        _check_chunk(node, 1, n, lineno)
        for i, j in sel.items():
            _check_chunk(i, j, n, lineno)
        out[node] = RepairRecord(rnd, sel)
    return out


_KEYS = ("n", "k", "orig_len", "chunk_size", "round", "repaired", "selection", "ermds", "history")


def loads_metadata(text):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != HEADER:
        raise FormatError(f"expected header {HEADER!r}", 1)
    fields = {}
    for key, lineno in zip(_KEYS, range(2, 2 + len(_KEYS))):
        if lineno > len(lines):
            raise FormatError(f"file ends before {key}=", lineno)
        line = lines[lineno - 1]
        name, sep, value = line.partition("=")
        if not sep or name != key:
            raise FormatError(f"expected {key}=..., got {line!r}", lineno)
        fields[key] = (value, lineno)

    def integer(key):
        value, lineno = fields[key]
        try:
            return int(value)
        except ValueError:
            raise FormatError(f"{key} is not an integer: {value!r}", lineno) from None

    try:
        params = CodeParams(integer("n"), integer("k"))
    except InvalidParams as e:
        raise FormatError(str(e), fields["n"][1]) from None
    repaired_text, _ = fields["repaired"]
    repaired = integer("repaired") if repaired_text else None
    selection_text, sel_line = fields["selection"]
    selection = _parse_pairs(selection_text, sel_line, params.n) if selection_text else None

    first_row = 2 + len(_KEYS)
    coeffs = np.zeros((params.n, 2, params.native_count), dtype=np.uint8)
    seen = set()
    for lineno in range(first_row, len(lines) + 1):
        parts = lines[lineno - 1].split()
        if len(parts) != 4 or parts[0] != "row":
            raise FormatError(f"expected 'row <node> <index> <hex>', got {lines[lineno - 1]!r}", lineno)
        try:
            cid = ChunkId(int(parts[1]), int(parts[2]))
            row = bytes.fromhex(parts[3])
        except ValueError:
            raise FormatError("malformed row", lineno) from None
        if cid.node not in params.nodes or cid.index not in (1, 2) or cid in seen:
            raise FormatError(f"unexpected or repeated chunk {cid}", lineno)
        if len(row) != params.native_count:
            raise FormatError(f"row has {len(row)} bytes, expected {params.native_count}", lineno)
        coeffs[cid.node - 1, cid.index - 1] = np.frombuffer(row, dtype=np.uint8)
        seen.add(cid)
    if len(seen) != params.parity_count:
        raise FormatError(
            f"expected {params.parity_count} rows, found {len(seen)}", len(lines) + 1)
    coeffs.setflags(write=False)

    orig_len = integer("orig_len")
    chunk_size = integer("chunk_size")
    state = CodeState(
        params=params,
        coeffs=coeffs,
        round=integer("round"),
        last_selection=selection,
        last_repaired_node=repaired,
        ermds_selection=_parse_pairs(*fields["ermds"], params.n),
        history=_parse_history(*fields["history"], params.n),
    )
    fmeta = FileMeta(orig_len, chunk_size * params.native_count, chunk_size)
    return MetadataFile(state, fmeta)


def save_metadata(path, meta):
    """Write atomically: temp file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps_metadata(meta))
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return meta


def load_metadata(path):
    return loads_metadata(Path(path).read_text(encoding="utf-8"))


class Cluster:
    """A cluster root directory: node stores plus the metadata file."""

    def __init__(self, root, n):
        self.root = Path(root)
        self.nodes = open_cluster(self.root, n)

    @classmethod
    def open(cls, root):
        meta = load_metadata(Path(root) / META_NAME)
        return cls(root, meta.state.params.n), meta

    @property
    def meta_path(self):
        return self.root / META_NAME

    def store(self, node):
        return self.nodes[node - 1]

    def read(self, cid):
        return read_chunk(self.store(cid[0]), cid)

    def write(self, cid, payload):
        write_chunk(self.store(cid[0]), cid, payload)

    def fail(self, node):
        fail_node(self.nodes, node)

    def live_nodes(self):
        return [s.node for s in self.nodes if not s.failed]

    @property
    def reads(self):
        return total_reads(self.nodes)

    @property
    def bytes_read(self):
        return sum(s.bytes_read for s in self.nodes)

    def reset_counters(self):
        reset_counters(self.nodes)
