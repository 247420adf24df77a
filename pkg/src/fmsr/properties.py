"""Decodability, MDS, repair-based collections and the two-phase check.

Everything here works on coefficient rows only, never on payloads, so the
cost of a check does not depend on the file size.

A repair-based collection (RBC) is what ``k`` nodes would hold after one
more repair: pick ``n-1`` nodes, keep every chunk of ``k-1`` of them and one
chunk of each of the other two. Right after a repair some RBCs are
dependent by construction (LDCs) and are exempt from the rMDS check.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from . import gfmatrix
from .codec import ChunkId, CodeParams, flat_index


class WrongCount(ValueError):
    pass


@dataclass(frozen=True)
class Rbc:
    chunk_ids: frozenset
    step1_nodes: tuple
    step2_nodes: tuple
    step3_chunks: frozenset

    @property
    def excluded_node(self):
        return (set(range(1, len(self.step1_nodes) + 2)) - set(self.step1_nodes)).pop()


@dataclass(frozen=True)
class RepairContext:
    """One repair seen from the checker: the node that was rebuilt and the
    ``n-1`` chunks it was rebuilt from. ``stale`` lists source chunks that
    have since been overwritten by later repairs of their own nodes."""
    repaired_node: int
    source_chunks: frozenset
    stale: frozenset = frozenset()

    @classmethod
    def from_selection(cls, repaired_node, selection, stale=()):
        return cls(
            repaired_node,
            frozenset(ChunkId(i, j) for i, j in selection.items()),
            frozenset(stale),
        )

    @property
    def live_sources(self):
        return self.source_chunks - self.stale


def repair_contexts(state):
    """Contexts for the latest repair of every node that has been repaired.

    A source chunk of node ``i`` recorded at round ``t`` is stale once node
    ``i`` itself has been repaired in a later round.
    """
    out = []
    for node, rec in sorted(state.history.items()):
        stale = [
            ChunkId(i, j) for i, j in rec.selection.items()
            if i in state.history and state.history[i].round > rec.round
        ]
        out.append(RepairContext.from_selection(node, rec.selection, stale))
    return out


def _as_params(p):
    return p if isinstance(p, CodeParams) else p.params


def is_decodable(state, ids):
    ids = list(ids)
    need = state.params.native_count
    if len(ids) != need or len(set(ids)) != need:
        raise WrongCount(f"a collection must hold exactly {need} distinct chunks, got {len(ids)}")
    return gfmatrix.rank(state.rows(ids)) == need


@lru_cache(maxsize=None)
def _node_subsets(n):
    k = n - 2
    subsets = list(combinations(range(1, n + 1), k))
    idx = np.array(
        [[2 * (i - 1) + j for i in s for j in (0, 1)] for s in subsets], dtype=np.intp)
    return subsets, idx


def check_mds(state):
    """Every ``k``-node subset decodes."""
    _, idx = _node_subsets(state.params.n)
    return gfmatrix.first_deficient(state.flat[idx]) < 0


@lru_cache(maxsize=None)
def _enumerate(n):
    k = n - 2
    nodes = range(1, n + 1)
    out = []
    for excluded in nodes:
        step1 = tuple(i for i in nodes if i != excluded)
        for step2 in combinations(step1, k - 1):
            rest = [i for i in step1 if i not in step2]
            for picks in product((1, 2), repeat=len(rest)):
                step3 = frozenset(ChunkId(i, j) for i, j in zip(rest, picks))
                full = {ChunkId(i, j) for i in step2 for j in (1, 2)}
                out.append(Rbc(frozenset(full | step3), step1, step2, step3))
    return tuple(out)


def enumerate_rbcs(params):
    """All ``n * C(n-1, k-1) * 2^2`` RBCs, in a fixed order."""
    return _enumerate(_as_params(params).n)


@lru_cache(maxsize=None)
def _rbc_tables(n):
    """Vectorised view of the RBC list: row indices, step-2 membership and
    chunk membership, all aligned with ``_enumerate(n)``."""
    rbcs = _enumerate(n)
    rows = np.array(
        [sorted(flat_index(c) for c in r.chunk_ids) for r in rbcs], dtype=np.intp)
    step2 = np.zeros((len(rbcs), n + 1), dtype=bool)
    member = np.zeros((len(rbcs), 2 * n), dtype=np.int64)
    for b, r in enumerate(rbcs):
        step2[b, list(r.step2_nodes)] = True
        member[b, [flat_index(c) for c in r.chunk_ids]] = 1
    return rows, step2, member


def is_ldc(rbc, ctx):
    """Whether ``rbc`` is dependent by construction of the repair in ``ctx``.

    Only RBCs that keep both new chunks of the repaired node (step 2)
    qualify. Those chunks span at most the source set F, so the RBC lives in
    the span of F, the other step-2 chunks P and the step-3 chunks Q, and
    ``|F u P u Q| = |F| + |P| + |Q| - |F n P| - |F n Q|``; the RBC is an LDC
    when that count drops below ``k(n-k)``. With every source chunk still in
    place this is exactly ``|F n Q| >= 2``. Stale sources count as extra
    symbols that cannot coincide with anything in the RBC.
    """
    if ctx.repaired_node not in rbc.step2_nodes:
        return False
    n = len(rbc.step1_nodes) + 1
    k = n - 2
    others = rbc.chunk_ids - {ChunkId(ctx.repaired_node, 1), ChunkId(ctx.repaired_node, 2)}
    support = len(ctx.source_chunks) + len(others) - len(ctx.live_sources & others)
    return support < 2 * k


def _ldc_mask(n, contexts):
    _, step2, member = _rbc_tables(n)
    k = n - 2
    mask = np.zeros(step2.shape[0], dtype=bool)
    for ctx in contexts:
        live = np.zeros(2 * n, dtype=np.int64)
        live[[flat_index(c) for c in ctx.live_sources]] = 1
        overlap = member @ live
        # support = (n-1) + (2k-2) - overlap < 2k  <=>  overlap >= n - 2
        mask |= step2[:, ctx.repaired_node] & (overlap >= n - 2)
    return mask


def ldc_mask(state, ctx=None):
    """Boolean mask over :func:`enumerate_rbcs` marking exempt RBCs."""
    contexts = repair_contexts(state)
    if ctx is not None and ctx not in contexts:
        contexts.append(ctx)
    return _ldc_mask(state.params.n, contexts)


def check_rmds(state, ctx=None):
    """Every RBC that is not an LDC decodes.

    The exempt set comes from the latest repair of every node recorded in
    ``state.history`` (plus ``ctx`` when given). Before any repair nothing
    is exempt.
    """
    n = state.params.n
    rows, _, _ = _rbc_tables(n)
    keep = ~ldc_mask(state, ctx)
    return gfmatrix.first_deficient(state.flat[rows[keep]]) < 0


def failing_phase(state, ctx=None):
    """1 if the MDS check fails, 2 if only the rMDS check fails, else None."""
    if not check_mds(state):
        return 1
    if not check_rmds(state, ctx):
        return 2
    return None


def two_phase_check(state, ctx=None):
    return failing_phase(state, ctx) is None


def verify_ermds_selection(state, selection, nodes):
    """Every RBC containing the selected chunk of each of ``nodes`` decodes.

    ``nodes`` must be ``k+1`` nodes; an RBC can only contain one chunk from
    each of them if its step 1 is exactly that node set.
    """
    nodes = tuple(sorted(nodes))
    k = state.params.k
    if len(nodes) != k + 1:
        raise WrongCount(f"need exactly k+1 = {k + 1} nodes, got {len(nodes)}")
    missing = [i for i in nodes if i not in selection]
    if missing:
        raise ValueError(f"selection does not cover nodes {missing}")
    chosen = frozenset(ChunkId(i, selection[i]) for i in nodes)
    for rbc in enumerate_rbcs(state.params):
        if rbc.step1_nodes == nodes and chosen <= rbc.chunk_ids:
            if not is_decodable(state, rbc.chunk_ids):
                return False
    return True
