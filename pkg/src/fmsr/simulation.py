"""Multi-round repair simulation.

Each run stores a small random file, then repeatedly fails a random node
(never the node that failed in the previous round) and repairs it with the
chosen scheme. Only the two-phase checking is timed. Payloads are carried
along so that every run can finish with a real decode of every ``k``-node
subset.

Seeding: run ``r`` uses seed ``base + r``; its ``SeedSequence`` is split into
separate streams for failure picks, repair coefficients and file content, so
both schemes see the same failures and the same file for the same seed.
"""

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import codec, gfmatrix
from .properties import check_mds
from .repair import SCHEMES, regenerate_payloads

CSV_FIELDS = ("seed", "round", "failed_node", "scheme", "iterations", "check_time_ns")


@dataclass(frozen=True)
class SimulationConfig:
    n: int
    rounds: int = 50
    runs: int = 30
    scheme: str = "deterministic"
    seed: int = 0
    output: str = None
    file_size: int = 1024
    max_iters: int = 10_000

    def __post_init__(self):
        codec.CodeParams(self.n)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.rounds < 0 or self.runs < 0:
            raise ValueError("rounds and runs must be non-negative")


@dataclass(frozen=True)
class SimulationRecord:
    seed: int
    round: int
    failed_node: int
    scheme: str
    iterations: int
    check_time_ns: int
    selection: dict = field(default=None, compare=False)


@dataclass
class RunResult:
    seed: int
    scheme: str
    records: list
    mds_ok: bool
    decode_ok: bool
    verify_time_ns: int
    error: str = None
    state: object = None

    @property
    def ok(self):
        return self.error is None and self.mds_ok and self.decode_ok


def failure_sequence(n, rounds, rng):
    prev = None
    for _ in range(rounds):
        choices = [i for i in range(1, n + 1) if i != prev]
        prev = int(rng.choice(choices))
        yield prev


def decode_all_subsets(state, meta, payloads, data):
    """True iff every ``k``-node subset decodes back to ``data``."""
    for nodes in combinations(state.params.nodes, state.params.k):
        chunks = [(codec.ChunkId(i, j), payloads[(i, j)]) for i in nodes for j in (1, 2)]
        if codec.decode(state, meta, chunks) != data:
            return False
    return True


def simulate_run(n, rounds, scheme, seed, file_size=1024, max_iters=10_000,
                 check_each_round=False, keep_state=False):
    """One run. With ``check_each_round`` the MDS property and payload
    consistency are re-verified after every round (slower; used by tests)."""
    fail_seq, coeff_seq, data_seq = np.random.SeedSequence(seed).spawn(3)
    fail_rng = np.random.default_rng(fail_seq)
    coeff_rng = np.random.default_rng(coeff_seq)
    data = np.random.default_rng(data_seq).integers(0, 256, file_size, dtype=np.uint8).tobytes()

    gfmatrix.warmup()
    state = codec.new_state(n)
    meta, chunks = codec.encode(state, data)
    payloads = {tuple(c.id): c.payload for c in chunks}
    repair_fn = SCHEMES[scheme]
    records = []
    error = None
    for rnd, failed in enumerate(failure_sequence(n, rounds, fail_rng), start=1):
        try:
            out = repair_fn(state, failed, coeff_rng, max_iters=max_iters)
        except Exception as e:  # recorded, run aborted
            error = f"round {rnd}: {type(e).__name__}: {e}"
            break
        reads = []

        def read(cid):
            reads.append(cid)
            return payloads[tuple(cid)]

        new = regenerate_payloads(out.plan.selection, out.plan.gamma, read)
        assert len(reads) == n - 1
        for j in (1, 2):
            payloads[(failed, j)] = new[j - 1].tobytes()
        state = out.new_state
        records.append(SimulationRecord(
            seed, rnd, failed, scheme, out.iterations, out.elapsed, dict(out.plan.selection)))
        if check_each_round and not check_mds(state):
            error = f"round {rnd}: MDS property lost"
            break

    t0 = time.perf_counter_ns()
    mds_ok = check_mds(state)
    verify_ns = time.perf_counter_ns() - t0
    decode_ok = mds_ok and decode_all_subsets(state, meta, payloads, data)
    return RunResult(seed, scheme, records, mds_ok, decode_ok, verify_ns, error,
                     state if keep_state else None)


def _run_one(args):
    return simulate_run(*args)


def run_simulation(config, workers=1):
    """All runs of ``config``, in run order."""
    jobs = [
        (config.n, config.rounds, config.scheme, config.seed + r, config.file_size, config.max_iters)
        for r in range(config.runs)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    if config.output:
        write_csv(config.output, results)
    return results


def write_csv(path, results):
    """One row per (run, round), then one ``final`` row per run whose
    ``iterations`` column is 1 if the final MDS and decode checks passed and
    0 otherwise (``failed_node`` holds the error text, if any)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_FIELDS)
        for res in results:
            for rec in res.records:
                w.writerow([rec.seed, rec.round, rec.failed_node, rec.scheme,
                            rec.iterations, rec.check_time_ns])
            w.writerow([res.seed, "final", res.error or "", res.scheme,
                        int(res.ok), res.verify_time_ns])


def summarize(results):
    its = [r.iterations for res in results for r in res.records]
    per_run_ns = [sum(r.check_time_ns for r in res.records) for res in results]
    return {
        "runs": len(results),
        "rounds": len(its),
        "mean_iterations": float(np.mean(its)) if its else float("nan"),
        "max_iterations": max(its) if its else 0,
        "mean_aggregate_check_s": float(np.mean(per_run_ns)) / 1e9 if per_run_ns else float("nan"),
        "all_ok": all(res.ok for res in results),
    }
