"""drbench: quality-metric benchmark for dimensionality-reduction output.

Core layers: geometry kernels, synthetic dataset generators, quality metrics,
embedding algorithms, and the grid-search harness.  A FastAPI service
(`drbench.service`) wraps the core; the CLI (`drbench.cli`) is a thin client
of that service.
"""

__version__ = "0.1.0"
