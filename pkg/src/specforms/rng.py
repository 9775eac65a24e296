"""Counter-based random streams.

Every draw in the package goes through a Philox generator keyed by
(seed, replication_index, stream_role), so independent replications can be
computed in any order, on any number of workers, with identical output.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

ROLE_INNOVATIONS = 0
ROLE_AUX = 1


def substream(seed: int, rep_index: int = 0, role: int = ROLE_INNOVATIONS) -> np.random.Generator:
    """Return the generator for one (seed, replication, role) key."""
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64,
                                spawn_key=(int(rep_index), int(role)))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(master_seed: int, rep_index: int) -> int:
    """Collapse (master_seed, rep_index) into a single 64-bit leaf seed."""
    ss = np.random.SeedSequence(entropy=int(master_seed) & _MASK64,
                                spawn_key=(int(rep_index),))
    return int(ss.generate_state(1, np.uint64)[0])
