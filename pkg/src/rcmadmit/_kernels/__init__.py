"""Hot repulsion-field kernels: compiled extension with a numpy fallback.

The compiled module is preferred when importable; set ``RCMADMIT_PURE_PYTHON``
to a non-empty value to force the numpy fallback. ``BACKEND`` names the active
implementation so benchmarks and tests can report it.
"""

import os

from . import _numpy

BACKEND = "numpy"
_impl = _numpy

if not os.environ.get("RCMADMIT_PURE_PYTHON"):
    try:
        from . import _fieldcore as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

PSI_CLAMP = _numpy.PSI_CLAMP
point_distances = _impl.point_distances
segment_distances = _impl.segment_distances
tip_field = _impl.tip_field
capsule_field = _impl.capsule_field
