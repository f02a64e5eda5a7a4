"""Counter-based RNG streams derived from (base_seed, stream_id).

Philox is a counter-based generator, so keying it with the pair gives
independent, reproducible streams whose draws do not depend on the order
in which trials are executed.
"""

import numpy as np


def stream(base_seed, stream_id=0):
    """Independent Generator for one trial/chain of a seeded batch."""
    key = np.array([np.uint64(base_seed & (2**64 - 1)),
                    np.uint64(stream_id & (2**64 - 1))], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
