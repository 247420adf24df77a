"""
Encoding a file over four nodes
===============================

With n = 4 nodes and k = 2, the file is cut into four native chunks and each
node stores two parity chunks. Any two nodes are enough to decode.
"""

from itertools import combinations

import numpy as np

from fmsr import codec

state = codec.new_state(4)
print(state.flat)   # 8 x 4 coefficient rows, one per stored chunk

data = np.random.default_rng(0).integers(0, 256, 10_000, dtype=np.uint8).tobytes()
meta, chunks = codec.encode(state, data)
print(meta)
for c in chunks:
    print(c.id, len(c.payload), "bytes")

# every pair of nodes gives the file back
for nodes in combinations(range(1, 5), 2):
    picked = [c for c in chunks if c.id.node in nodes]
    assert codec.decode(state, meta, picked) == data
    print("nodes", nodes, "ok")

# the same holds with larger n, e.g. any 8 of 10 nodes
state10 = codec.new_state(10)
meta10, chunks10 = codec.encode(state10, data)
print(codec.decode(state10, meta10, chunks10[4:]) == data)
