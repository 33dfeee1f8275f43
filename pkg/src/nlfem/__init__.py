"""Nonlocal diffusion finite elements with reduced-dimension assembly."""
import numba as _numba

# prefer OpenMP, then the built-in queue; skipping TBB avoids a version
# warning on systems with an old TBB installed
_numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

__version__ = "0.1.0"
