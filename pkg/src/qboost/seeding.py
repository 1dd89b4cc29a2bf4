"""Deterministic RNG substreams.

Every random draw in the package comes from a generator derived from
(root seed, context integers...), so results do not depend on execution
order or worker count.
"""

import numpy as np

# purpose codes for substream derivation
DATA = 1
INIT = 2
RETRY = 3
BAGGING = 4
TEST_DATA = 5
SYNTH = 6


def substream(*keys: int) -> np.random.Generator:
    """Generator for the substream identified by a tuple of integers."""
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in keys]))
