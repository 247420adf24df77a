"""
Iterations per round, many rounds
=================================

A scaled-down version of the full benchmark: a few runs of 50 rounds at
n = 10 for both schemes. The CLI equivalent is

    fmsr simulate --n 10 --rounds 50 --runs 30 --scheme random --csv out.csv
"""

from fmsr.simulation import SimulationConfig, run_simulation, summarize

for scheme in ("random", "deterministic"):
    results = run_simulation(SimulationConfig(n=10, rounds=50, runs=3, scheme=scheme, seed=1))
    s = summarize(results)
    print(f"{scheme:>13}: {s['mean_iterations']:6.1f} iterations/round, "
          f"{s['mean_aggregate_check_s']:.3f} s checking per run, all ok: {s['all_ok']}")
