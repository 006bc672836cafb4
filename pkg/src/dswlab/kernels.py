"""Backend selection for the hot inner loops.

The compiled extension is used when it was built; set ``DSWLAB_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

import numpy as np

if os.environ.get("DSWLAB_PURE_PYTHON", "") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND


def _c(a):
    return np.ascontiguousarray(a, dtype=complex)


def etd_stage(e2, v, q, nv, out):
    return _impl.etd_stage(e2, v, q, nv, out)


def etd_stage_c(e2, a, q, nb, nv, out):
    return _impl.etd_stage_c(e2, a, q, nb, nv, out)


def etd_final(e, v, nv, na, nb, nc, f1, f2, f3, out):
    return _impl.etd_final(e, v, nv, na, nb, nc, f1, f2, f3, out)


def clenshaw(coeffs, x):
    """Chebyshev series ``sum c_k T_k(x)`` at the points ``x`` (1-D)."""
    c = np.ascontiguousarray(coeffs, dtype=float)
    xa = np.ascontiguousarray(np.atleast_1d(x), dtype=float).ravel()
    return np.asarray(_impl.clenshaw(c, xa))


def theta_sums(z, nome, nterms, hyperbolic=False):
    """Return ``(S, S', S'')`` for the theta-type series at points ``z``."""
    za = np.ascontiguousarray(np.atleast_1d(z), dtype=float).ravel()
    s0, s1, s2 = _impl.theta_sums(za, float(nome), int(nterms), bool(hyperbolic))
    return np.asarray(s0), np.asarray(s1), np.asarray(s2)
