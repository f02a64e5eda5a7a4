"""Hot pair-interaction kernels with a compiled core and NumPy fallback.

The Cython extension is preferred when built; setting the environment
variable ``JELLIUM2D_PURE_PYTHON=1`` forces the NumPy implementation
(useful for benchmarking and debugging).  ``IMPLEMENTATION`` records
which one was selected at import time.
"""

import os

if os.environ.get("JELLIUM2D_PURE_PYTHON"):
    from .pairwise_numpy import energy_and_gradient, total_energy

    IMPLEMENTATION = "numpy"
else:
    try:
        from ._pairwise import energy_and_gradient, total_energy

        IMPLEMENTATION = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        from .pairwise_numpy import energy_and_gradient, total_energy

        IMPLEMENTATION = "numpy"

__all__ = ["total_energy", "energy_and_gradient", "IMPLEMENTATION"]
