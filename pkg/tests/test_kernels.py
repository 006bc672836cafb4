import os
import subprocess
import sys

import numpy as np
import pytest
from numpy.polynomial import chebyshev

from dswlab import _kernels_py as py
from dswlab import kernels

try:
    from dswlab import _kernels as cy
except ImportError:
    cy = None

BACKENDS = [py] + ([cy] if cy is not None else [])
needs_ext = pytest.mark.skipif(cy is None, reason="compiled extension not built")


def _vecs(n, k, seed=0):
    rng = np.random.default_rng(seed)
    return [np.ascontiguousarray(rng.standard_normal(n) + 1j * rng.standard_normal(n)) for _ in range(k)]


@pytest.mark.parametrize("m", BACKENDS, ids=lambda m: m.BACKEND)
def test_etd_kernels_formulas(m):
    e, v, q, nv, na, nb, nc, f1, f2, f3 = _vecs(257, 10)
    out = np.empty(257, dtype=complex)
    np.testing.assert_allclose(m.etd_stage(e, v, q, nv, out), e * v + q * nv, rtol=1e-14)
    np.testing.assert_allclose(m.etd_stage_c(e, v, q, nb, nv, out), e * v + q * (2 * nb - nv), rtol=1e-14)
    ref = e * v + nv * f1 + 2 * (na + nb) * f2 + nc * f3
    np.testing.assert_allclose(m.etd_final(e, v, nv, na, nb, nc, f1, f2, f3, out), ref, rtol=1e-13)


@pytest.mark.parametrize("m", BACKENDS, ids=lambda m: m.BACKEND)
def test_clenshaw_matches_chebval(m):
    rng = np.random.default_rng(1)
    c = rng.standard_normal(65)
    x = np.ascontiguousarray(np.linspace(-1, 1, 301))
    np.testing.assert_allclose(np.asarray(m.clenshaw(c, x)), chebyshev.chebval(x, c), atol=1e-12)


@pytest.mark.parametrize("m", BACKENDS, ids=lambda m: m.BACKEND)
@pytest.mark.parametrize("hyperbolic", [False, True])
def test_theta_sums_direct(m, hyperbolic):
    z = np.ascontiguousarray(np.linspace(-0.5, 0.5, 41))
    nome, nt = 0.3, 12
    s0, s1, s2 = (np.asarray(a) for a in m.theta_sums(z, nome, nt, hyperbolic))
    n = np.arange(1, nt + 1)
    w = 2 * np.pi * n
    qn = 2 * nome ** (n * n)
    for i, zi in enumerate(z):
        if hyperbolic:
            r = (1 + np.sum(qn * np.cosh(w * zi)), np.sum(qn * w * np.sinh(w * zi)),
                 np.sum(qn * w**2 * np.cosh(w * zi)))
        else:
            r = (1 + np.sum(qn * np.cos(w * zi)), -np.sum(qn * w * np.sin(w * zi)),
                 -np.sum(qn * w**2 * np.cos(w * zi)))
        np.testing.assert_allclose([s0[i], s1[i], s2[i]], r, rtol=1e-12, atol=1e-12)


@needs_ext
def test_backends_agree():
    e, v, q, nv, na, nb, nc, f1, f2, f3 = _vecs(1025, 10, seed=5)
    o1, o2 = np.empty(1025, complex), np.empty(1025, complex)
    np.testing.assert_allclose(cy.etd_final(e, v, nv, na, nb, nc, f1, f2, f3, o1),
                               py.etd_final(e, v, nv, na, nb, nc, f1, f2, f3, o2), rtol=1e-14)
    c = np.random.default_rng(2).standard_normal(129) * 0.7 ** np.arange(129)
    x = np.ascontiguousarray(np.linspace(-1, 1, 999))
    np.testing.assert_allclose(cy.clenshaw(c, x), py.clenshaw(c, x), atol=1e-14)
    z = np.ascontiguousarray(np.linspace(-2, 2, 77))
    for a, b in zip(cy.theta_sums(z, 0.6, 20, True), py.theta_sums(z, 0.6, 20, True)):
        np.testing.assert_allclose(a, b, rtol=1e-13)


def test_wrappers_accept_lists_and_scalars():
    assert kernels.clenshaw([1.0, 2.0, 3.0], 0.5).shape == (1,)
    np.testing.assert_allclose(kernels.clenshaw([1.0, 2.0, 3.0], [0.5]), chebyshev.chebval(0.5, [1, 2, 3]))
    s0, s1, s2 = kernels.theta_sums(0.0, 0.1, 6)
    assert s0[0] == pytest.approx(1 + 2 * sum(0.1 ** (n * n) for n in range(1, 7)))
    assert s1[0] == 0.0


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    env.pop("DSWLAB_PURE_PYTHON", None)
    if env_value is not None:
        env["DSWLAB_PURE_PYTHON"] = env_value
    out = subprocess.run([sys.executable, "-c", "from dswlab import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    return out.stdout.strip()


def test_pure_python_switch():
    assert _backend_in_subprocess("1") == "python"
    expected = cy.BACKEND if cy is not None else "python"
    assert _backend_in_subprocess(None) == expected
    assert _backend_in_subprocess("0") == expected
