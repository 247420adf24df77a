"""
Random versus deterministic repair
==================================

Random repair keeps drawing chunks and coefficients until the two-phase
check passes. Deterministic repair picks the chunks by rule, solves for how
each chosen chunk is expressed by the others, and draws coefficients that
avoid the known bad cases, so it rarely needs a second check.
"""

import numpy as np

from fmsr import codec, repair

rng = np.random.default_rng(3)
n = 8
failures = [1, 5, 5, 2, 7, 1, 4, 8, 3, 6]

for scheme in ("random", "deterministic"):
    state = codec.new_state(n)
    its = []
    for failed in failures:
        out = repair.repair(state, failed, scheme, rng)
        state = out.new_state
        its.append(out.iterations)
    print(f"{scheme:>13}: iterations per round {its}")

# a closer look at one deterministic step
state = codec.new_state(n)
state = repair.deterministic_repair(state, 1, rng).new_state
sel = repair.deterministic_select(state, 5)
print("next selection when node 5 fails:", sel)   # survivors swap chunk, node 1 gives chunk 2
lam = repair.solve_lambda(state, sel, 5)
gamma = repair.construct_gamma(lam, state.params, rng)
print("inequality violations:", repair.gamma_violations(gamma, lam))
print(gamma)
