"""Uncoded repair of one failed node.

Every surviving node hands over one stored chunk unchanged; the new node
combines those ``n-1`` chunks into its two new chunks with coefficients
gamma. Two ways of choosing the chunks and gamma are provided:

* :func:`random_repair` draws both at random and retries until the
  two-phase check passes.
* :func:`deterministic_repair` follows a fixed chunk-selection schedule and
  only samples gamma among values meeting the sufficient inequalities
  derived from the lambda re-expression coefficients.

Selections are ``{node: chunk index}`` maps over the surviving nodes.
Gamma is an ``(n, 2)`` array, ``gamma[i-1, j-1]`` being the weight of node
``i``'s chunk in new chunk ``j``; the failed node's row is zero.
"""

import logging
import time
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import gfmatrix
from .codec import ChunkId, RepairRecord
from .gf256 import MUL
from .properties import RepairContext, failing_phase

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 10_000
DEFAULT_MAX_SAMPLES = 1024
# chunk index taken from the previously repaired node when the failed
# node changes between rounds
REPAIRED_NODE_INDEX = 2


class IterationLimitExceeded(RuntimeError):
    pass


class SampleLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class LambdaTable:
    """Re-expression of every selected chunk over the other survivors.

    ``values[t]`` is an ``(n, 2)`` array: selected chunk of node ``t`` equals
    ``sum values[t][i-1, j-1] * P_{i,j}`` over survivors ``i != t``.
    """
    failed: int
    selection: dict
    values: dict

    def coefficient(self, target, node):
        """Weight of ``node``'s selected chunk in the expansion of ``target``'s."""
        return self.values[target][node - 1, self.selection[node] - 1]


@dataclass(frozen=True)
class RepairPlan:
    failed: int
    selection: dict
    gamma: np.ndarray
    new_rows: np.ndarray  # (2, 2k)

    @property
    def sources(self):
        return [ChunkId(i, j) for i, j in sorted(self.selection.items())]


@dataclass(frozen=True)
class RepairOutcome:
    plan: RepairPlan
    iterations: int
    elapsed: int  # ns spent inside two-phase checking
    new_state: object
    rejected: int = 0  # deterministic only: candidates that failed the check
    gamma_samples: int = 0


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def survivors(params, failed):
    if failed not in params.nodes:
        raise ValueError(f"node {failed} is not in 1..{params.n}")
    return [i for i in params.nodes if i != failed]


def selection_rows(state, selection):
    return state.rows([ChunkId(i, j) for i, j in sorted(selection.items())])


def new_chunk_rows(state, failed, selection, gamma):
    """Coefficient rows of the two regenerated chunks."""
    nodes = sorted(selection)
    src = selection_rows(state, selection)
    g = np.asarray(gamma, dtype=np.uint8)[[i - 1 for i in nodes]]  # (n-1, 2)
    return gfmatrix.matmul(g.T, src)


def regenerate(state, failed, selection, gamma):
    """State after rebuilding ``failed`` from ``selection`` with ``gamma``."""
    rows = new_chunk_rows(state, failed, selection, gamma)
    coeffs = state.coeffs.copy()
    coeffs[failed - 1] = rows
    coeffs.setflags(write=False)
    rnd = state.round + 1
    history = dict(state.history)
    history[failed] = RepairRecord(rnd, dict(selection))
    return state.replace(
        coeffs=coeffs,
        round=rnd,
        last_selection=dict(selection),
        last_repaired_node=failed,
        history=history,
    )


def regenerate_payloads(selection, gamma, read):
    """Payloads of the two new chunks. ``read(ChunkId) -> bytes`` is called
    exactly once per surviving node."""
    nodes = sorted(selection)
    src = [read(ChunkId(i, selection[i])) for i in nodes]
    g = np.asarray(gamma, dtype=np.uint8)[[i - 1 for i in nodes]]
    return gfmatrix.apply(g.T, src)


def _context(state, failed, selection):
    return RepairContext.from_selection(failed, selection)


def _timed_check(state, ctx):
    t0 = time.perf_counter_ns()
    phase = failing_phase(state, ctx)
    return phase, time.perf_counter_ns() - t0


def random_repair(state, failed, rng_seed=None, max_iters=DEFAULT_MAX_ITERS):
    """Random chunk selection and random nonzero gamma until the two-phase
    check passes."""
    rng = _rng(rng_seed)
    alive = survivors(state.params, failed)
    n = state.params.n
    elapsed = 0
    for it in range(1, max_iters + 1):
        selection = {i: int(c) for i, c in zip(alive, rng.integers(1, 3, size=len(alive)))}
        gamma = np.zeros((n, 2), dtype=np.uint8)
        gamma[[i - 1 for i in alive]] = rng.integers(1, 256, size=(len(alive), 2))
        candidate = regenerate(state, failed, selection, gamma)
        phase, dt = _timed_check(candidate, _context(state, failed, selection))
        elapsed += dt
        if phase is None:
            plan = RepairPlan(failed, selection, gamma, candidate.coeffs[failed - 1].copy())
            return RepairOutcome(plan, it, elapsed, candidate)
    raise IterationLimitExceeded(
        f"random repair of node {failed} found no valid regeneration in {max_iters} iterations")


def deterministic_select(state, failed):
    """Chunk selection of the deterministic scheme.

    First repair: the chunks recorded at store time. Same node failing again:
    repeat the previous selection. Otherwise every survivor contributes the
    chunk it did not contribute last time, and the previously repaired node
    contributes its chunk ``REPAIRED_NODE_INDEX``.
    """
    alive = survivors(state.params, failed)
    prev = state.last_selection
    if prev is None:
        return {i: state.ermds_selection.get(i, 1) for i in alive}
    if failed == state.last_repaired_node:
        return dict(prev)
    return {
        i: REPAIRED_NODE_INDEX if i == state.last_repaired_node else 3 - prev[i]
        for i in alive
    }


def solve_lambda(state, selection, failed=None):
    """For each selected chunk, its coefficients over the ``2k`` chunks of the
    other surviving nodes."""
    nodes = sorted(selection)
    if failed is None:
        missing = set(state.params.nodes) - set(nodes)
        failed = missing.pop() if len(missing) == 1 else None
    n = state.params.n
    values = {}
    for target in nodes:
        others = [i for i in nodes if i != target]
        basis = state.node_rows(others)  # (2k, 2k), rows P_{i,1}, P_{i,2}
        goal = state.row(ChunkId(target, selection[target]))
        # goal = lam @ basis  <=>  basis.T @ lam = goal
        lam = gfmatrix.solve(basis.T, goal)
        table = np.zeros((n, 2), dtype=np.uint8)
        table[[i - 1 for i in others]] = lam.reshape(len(others), 2)
        table.setflags(write=False)
        values[target] = table
    return LambdaTable(failed, dict(selection), values)


@dataclass(frozen=True)
class GammaConstraints:
    """Index tuples of every inequality instance over the survivors.

    * ``pairs``: ``(i, j)``, ``i < j`` -- new chunks stay independent on any
      two survivors.
    * ``ordered``: ``(i, t)``, ``i != t`` -- weight of ``i``'s selected chunk
      in new chunk 2 after substituting ``t``'s selected chunk is nonzero.
    * ``triples``: ``(i, i2, t)`` with ``i < i2`` and ``t`` distinct -- the
      2x2 determinant of that substitution on ``i`` and ``i2`` is nonzero.
    """
    pairs: tuple
    ordered: tuple
    triples: tuple

    @classmethod
    def for_nodes(cls, nodes):
        nodes = sorted(nodes)
        pairs = tuple(combinations(nodes, 2))
        ordered = tuple((i, t) for i in nodes for t in nodes if i != t)
        triples = tuple(
            (i, i2, t) for t in nodes for i, i2 in combinations([x for x in nodes if x != t], 2))
        return cls(pairs, ordered, triples)

    def counts(self):
        return len(self.pairs), len(self.ordered), len(self.triples)


def gamma_violations(gamma, lam, constraints=None):
    """All inequality instances that ``gamma`` violates, as
    ``(kind, indices)`` tuples with kind in {"pair", "ordered", "triple"}."""
    g = np.asarray(gamma, dtype=np.uint8)
    if constraints is None:
        constraints = GammaConstraints.for_nodes(lam.selection)
    bad = []

    def gm(i, j):
        return int(g[i - 1, j - 1])

    def mul(a, b):
        return int(MUL[a, b])

    for i, j in constraints.pairs:
        if mul(gm(i, 1), gm(j, 2)) == mul(gm(i, 2), gm(j, 1)):
            bad.append(("pair", (i, j)))
    for i, t in constraints.ordered:
        if gm(i, 2) ^ mul(gm(t, 2), int(lam.coefficient(t, i))) == 0:
            bad.append(("ordered", (i, t)))
    for i, i2, t in constraints.triples:
        a1 = gm(i, 1) ^ mul(gm(t, 1), int(lam.coefficient(t, i)))
        a2 = gm(i, 2) ^ mul(gm(t, 2), int(lam.coefficient(t, i)))
        b1 = gm(i2, 1) ^ mul(gm(t, 1), int(lam.coefficient(t, i2)))
        b2 = gm(i2, 2) ^ mul(gm(t, 2), int(lam.coefficient(t, i2)))
        if mul(a1, b2) == mul(b1, a2):
            bad.append(("triple", (i, i2, t)))
    return bad


class _GammaChecker:
    """Vectorised evaluation of all inequality instances for one lambda."""

    def __init__(self, lam, constraints):
        self.c = constraints
        p = np.array(constraints.pairs, dtype=np.intp).reshape(-1, 2) - 1
        self.pi, self.pj = p[:, 0], p[:, 1]
        o = np.array(constraints.ordered, dtype=np.intp).reshape(-1, 2)
        self.oi, self.ot = o[:, 0] - 1, o[:, 1] - 1
        self.olam = np.array(
            [lam.coefficient(t, i) for i, t in constraints.ordered], dtype=np.uint8)
        tr = np.array(constraints.triples, dtype=np.intp).reshape(-1, 3)
        self.ti, self.ti2, self.tt = tr[:, 0] - 1, tr[:, 1] - 1, tr[:, 2] - 1
        self.tl1 = np.array([lam.coefficient(t, i) for i, _, t in constraints.triples], dtype=np.uint8)
        self.tl2 = np.array([lam.coefficient(t, i2) for _, i2, t in constraints.triples], dtype=np.uint8)

    def ok(self, g):
        g1, g2 = g[:, 0], g[:, 1]
        if np.any(MUL[g1[self.pi], g2[self.pj]] == MUL[g2[self.pi], g1[self.pj]]):
            return False
        if np.any((g2[self.oi] ^ MUL[g2[self.ot], self.olam]) == 0):
            return False
        a1 = g1[self.ti] ^ MUL[g1[self.tt], self.tl1]
        a2 = g2[self.ti] ^ MUL[g2[self.tt], self.tl1]
        b1 = g1[self.ti2] ^ MUL[g1[self.tt], self.tl2]
        b2 = g2[self.ti2] ^ MUL[g2[self.tt], self.tl2]
        return not np.any(MUL[a1, b2] == MUL[b1, a2])


def construct_gamma(lam, params, rng_seed=None, max_samples=DEFAULT_MAX_SAMPLES, stats=None):
    """Sample nonzero gamma uniformly until every inequality instance holds.

    ``stats``, if given, is a dict that receives the number of samples drawn
    under ``"samples"``.
    """
    rng = _rng(rng_seed)
    nodes = sorted(lam.selection)
    checker = _GammaChecker(lam, GammaConstraints.for_nodes(nodes))
    rows = [i - 1 for i in nodes]
    for s in range(1, max_samples + 1):
        gamma = np.zeros((params.n, 2), dtype=np.uint8)
        gamma[rows] = rng.integers(1, 256, size=(len(nodes), 2))
        if checker.ok(gamma):
            if stats is not None:
                stats["samples"] = s
            return gamma
    raise SampleLimitExceeded(
        f"no gamma satisfying the repair inequalities in {max_samples} samples")


def deterministic_repair(state, failed, rng_seed=None, max_iters=DEFAULT_MAX_ITERS,
                         max_samples=DEFAULT_MAX_SAMPLES):
    """Deterministic selection, lambda solve, constrained gamma, regenerate.

    The regenerated state still goes through the two-phase check; a failing
    candidate is logged and gamma is resampled. ``iterations`` counts the
    two-phase checks performed.
    """
    rng = _rng(rng_seed)
    selection = deterministic_select(state, failed)
    lam = solve_lambda(state, selection, failed)
    ctx = _context(state, failed, selection)
    elapsed = 0
    samples = 0
    for it in range(1, max_iters + 1):
        stats = {}
        gamma = construct_gamma(lam, state.params, rng, max_samples, stats)
        samples += stats["samples"]
        candidate = regenerate(state, failed, selection, gamma)
        phase, dt = _timed_check(candidate, ctx)
        elapsed += dt
        if phase is None:
            plan = RepairPlan(failed, selection, gamma, candidate.coeffs[failed - 1].copy())
            return RepairOutcome(plan, it, elapsed, candidate, rejected=it - 1, gamma_samples=samples)
        log.info(
            "round %d: deterministic candidate for node %d failed phase %d "
            "(selection %s, gamma %s)",
            candidate.round, failed, phase, selection, gamma.tolist())
    raise IterationLimitExceeded(
        f"deterministic repair of node {failed} failed the two-phase check {max_iters} times")


SCHEMES = {"random": random_repair, "deterministic": deterministic_repair}


def repair(state, failed, scheme="deterministic", rng_seed=None, **kw):
    try:
        fn = SCHEMES[scheme]
    except KeyError:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {sorted(SCHEMES)}") from None
    return fn(state, failed, rng_seed, **kw)
