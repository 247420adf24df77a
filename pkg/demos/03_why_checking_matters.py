"""
Why a repair has to be checked
==============================

Rebuild node 1 from one chunk of each survivor. Some collections that a
later repair could produce now depend linearly on each other by construction.
If the next repair reuses the wrong chunks, two nodes end up spanning too
little and the code is no longer MDS.
"""

import numpy as np

from fmsr import codec, properties as pr
from fmsr.repair import regenerate

state = codec.new_state(4)

# node 1 fails and is rebuilt from P2,1, P3,1 and P4,1
gamma = np.array([[0, 0], [1, 2], [3, 4], [5, 7]], dtype=np.uint8)
s1 = regenerate(state, 1, {2: 1, 3: 1, 4: 1}, gamma)
print("MDS:", pr.check_mds(s1), " rMDS:", pr.check_rmds(s1))

# the collections exempt from the rMDS check
rbcs = pr.enumerate_rbcs(s1)
for b in np.flatnonzero(pr.ldc_mask(s1)):
    ids = sorted(map(str, rbcs[b].chunk_ids))
    print("dependent by construction:", ids)

# now node 2 fails and is rebuilt from P'1,1, P3,1, P4,1 ...
gamma2 = np.array([[1, 2], [0, 0], [3, 4], [5, 6]], dtype=np.uint8)
s2 = regenerate(s1, 2, {1: 1, 3: 1, 4: 1}, gamma2)
# ... and nodes 1 and 2 together only span three of the four dimensions
print("MDS after the careless repair:", pr.check_mds(s2))
print("phase that fails:", pr.failing_phase(s2))
