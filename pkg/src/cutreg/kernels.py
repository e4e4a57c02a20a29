"""Backend selection for the statevector kernels.

The compiled extension is preferred when importable; set CUTREG_PURE_PYTHON=1
to force the numpy fallback (used by the benchmark and for debugging).
"""

import os

if os.environ.get("CUTREG_PURE_PYTHON"):
    from cutreg import _kernels_py as _impl
else:
    try:
        from cutreg import _kernels_cy as _impl
    except ImportError:
        from cutreg import _kernels_py as _impl

BACKEND = _impl.BACKEND
apply_1q = _impl.apply_1q
apply_1q_batch = _impl.apply_1q_batch
apply_diag2 = _impl.apply_diag2
project_z = _impl.project_z
expect_z = _impl.expect_z
norm_sq = _impl.norm_sq
