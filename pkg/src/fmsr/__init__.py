"""Functional minimum-storage regenerating (FMSR) codes with uncoded repair
for double-fault-tolerant storage (k = n - 2)."""

from .codec import (
    Chunk, ChunkId, CodeParams, CodeState, FileMeta, decode, encode, new_state,
)
from .properties import check_mds, check_rmds, enumerate_rbcs, two_phase_check
from .repair import deterministic_repair, random_repair

__version__ = "0.1.0"
