"""Backend selection for the descriptor kernels.

Two implementations of the same math live side by side: a numba njit path
(the default whenever numba imports cleanly) and a pure-numpy fallback.
Set ``TEXPAT_BACKEND=numpy`` or ``TEXPAT_BACKEND=numba`` to force one;
``get_backend`` also accepts the name directly.
"""

import os
from typing import Callable, NamedTuple

import numpy as np

from . import np_backend

ENV_VAR = 'TEXPAT_BACKEND'
BACKEND_NAMES = ('numba', 'numpy')


class Backend(NamedTuple):
    name: str
    window_descriptors: Callable
    warmup: Callable


def _numpy_backend() -> Backend:
    def run(windows, levels, offsets, symmetric):
        return np_backend.window_descriptors(windows, levels, offsets, symmetric)

    return Backend('numpy', run, lambda: None)


def _numba_backend() -> Backend:
    from . import nb_backend

    def run(windows, levels, offsets, symmetric):
        offs = np.asarray(offsets, dtype=np.int64).reshape(-1, 2)
        return nb_backend.window_descriptors(np.ascontiguousarray(windows),
                                             levels, offs, bool(symmetric))

    return Backend('numba', run, nb_backend.warmup)


def get_backend(name: str | None = None) -> Backend:
    """Resolve a kernel backend by name, env var, or availability."""
    choice = (name or os.environ.get(ENV_VAR, '')).strip().lower()
    if choice == 'numpy':
        return _numpy_backend()
    if choice == 'numba':
        return _numba_backend()
    if choice:
        raise ValueError('unknown backend %r (expected one of %s)' % (choice, ', '.join(BACKEND_NAMES)))
    try:
        return _numba_backend()
    except ImportError:
        return _numpy_backend()
