"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

BACKEND = "python"


def etd_stage(e2, v, q, nv, out):
    np.multiply(e2, v, out=out)
    out += q * nv
    return out


def etd_stage_c(e2, a, q, nb, nv, out):
    np.multiply(e2, a, out=out)
    out += q * (2.0 * nb - nv)
    return out


def etd_final(e, v, nv, na, nb, nc, f1, f2, f3, out):
    np.multiply(e, v, out=out)
    out += nv * f1
    out += 2.0 * (na + nb) * f2
    out += nc * f3
    return out


def clenshaw(c, x):
    x = np.asarray(x, dtype=float)
    xx = 2.0 * x
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for ck in c[:0:-1]:
        b1, b2 = ck + xx * b1 - b2, b1
    return c[0] + 0.5 * xx * b1 - b2


def theta_sums(z, nome, nterms, hyperbolic):
    z = np.asarray(z, dtype=float)
    n = np.arange(1, nterms + 1, dtype=float)
    qn = 2.0 * nome ** (n * n)
    w = 2.0 * np.pi * n
    arg = np.multiply.outer(z, w)
    if hyperbolic:
        c, s = np.cosh(arg), np.sinh(arg)
        return 1.0 + c @ qn, s @ (qn * w), c @ (qn * w * w)
    c, s = np.cos(arg), np.sin(arg)
    return 1.0 + c @ qn, -(s @ (qn * w)), -(c @ (qn * w * w))
