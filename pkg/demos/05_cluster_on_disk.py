"""
A cluster in a directory
========================

Node directories hold chunk files, fmsr.meta holds the coefficients. A
repair reads exactly one chunk from each of the n - 1 survivors, which is
(n-1)/(2(n-2)) of the file: 0.75 for n = 4.
"""

import tempfile
from pathlib import Path

import numpy as np

from fmsr import cli

root = Path(tempfile.mkdtemp())
src = root / "input.bin"
src.write_bytes(np.random.default_rng(5).integers(0, 256, 4096, dtype=np.uint8).tobytes())

cluster, meta, _ = cli.encode_to_dir(src, 4, root / "cluster")
print(sorted(p.relative_to(root) for p in (root / "cluster").rglob("*.bin")))

for failed in (1, 2, 1, 3):
    out, cluster = cli.repair_dir(root / "cluster", failed, "deterministic", seed=failed)
    frac = cluster.bytes_read / meta.padded_length
    print(f"node {failed}: read {cluster.reads} chunks ({frac:.2f} of the file) "
          f"from {[str(c) for c in out.plan.sources]}")

print("MDS, rMDS:", cli.verify_dir(root / "cluster"))
print("decode from nodes 2,4:", cli.decode_from_dir(root / "cluster", [2, 4]) == src.read_bytes())
