"""Hastings-McLeod solution of Painleve II, ``A'' = z A + 2 A^3``.

The solution is computed on ``[z_l, z_r]`` by Chebyshev collocation with a
tau treatment of the boundary rows and a relaxed fixed-point iteration;
outside the interval the known asymptotic tails are used.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.fft import dct
from scipy.linalg import lu_factor, lu_solve

from . import kernels
from .specfun import DomainError, airy_ai

__all__ = [
    "ChebyshevSolution",
    "HastingsMcLeodSolution",
    "NonConvergenceError",
    "hm_boundary_left",
    "hm_boundary_right",
    "hm_left_tail",
    "hm_left_truncation",
    "hm_right_tail",
    "initial_iterate",
    "solve_hastings_mcleod",
    "default_solution",
    "hm_eval",
    "pii_residual",
    "cheb_points",
    "vals_to_coeffs",
    "coeffs_to_vals",
    "derivative_matrix",
]

_C1 = 1.0 / (8.0 * np.sqrt(2.0))
_C2 = 73.0 / (128.0 * np.sqrt(2.0))
_C3 = 10657.0 / (1024.0 * np.sqrt(2.0))


class NonConvergenceError(RuntimeError):
    """Fixed-point iteration stopped without meeting the tolerance."""

    def __init__(self, msg, iterations, residual):
        super().__init__(f"{msg} (iterations={iterations}, last update={residual:.3e})")
        self.iterations = iterations
        self.residual = residual


def hm_left_tail(z, deriv=0):
    """Three-term expansion ``sqrt(-z/2) - C1 (-z)^(-5/2) - C2 (-z)^(-11/2)``."""
    w = -np.asarray(z, dtype=float)
    if deriv == 0:
        return np.sqrt(w / 2) - _C1 * w**-2.5 - _C2 * w**-5.5
    if deriv == 1:
        return -(0.5 / np.sqrt(2 * w) + 2.5 * _C1 * w**-3.5 + 5.5 * _C2 * w**-6.5)
    if deriv == 2:
        return -0.25 / (np.sqrt(2.0) * w**1.5) - 8.75 * _C1 * w**-4.5 - 35.75 * _C2 * w**-7.5
    raise ValueError("deriv must be 0, 1 or 2")


def hm_left_truncation(z):
    """Size of the first neglected term of the left expansion at ``z < 0``."""
    return _C3 * (-float(z)) ** -8.5


def hm_boundary_left(z_l):
    """Left boundary value for the collocation problem (``z_l <= -8``)."""
    z_l = float(z_l)
    if z_l > -8.0:
        raise DomainError("left boundary needs z_l <= -8")
    return float(hm_left_tail(z_l))


def hm_right_tail(z, deriv=0, variant="asymptotic"):
    """Right tail: leading Airy asymptotic (default) or full ``Ai``."""
    z = np.asarray(z, dtype=float)
    if variant == "airy":
        if deriv == 0:
            return airy_ai(z)
        h = 1e-3
        if deriv == 1:
            return (airy_ai(z + h) - airy_ai(z - h)) / (2 * h)
        return z * airy_ai(z)
    if variant != "asymptotic":
        raise ValueError(f"unknown right-tail variant {variant!r}")
    f = np.exp(-2.0 / 3.0 * z**1.5) / (2.0 * np.sqrt(np.pi) * z**0.25)
    g = -np.sqrt(z) - 0.25 / z
    if deriv == 0:
        return f
    if deriv == 1:
        return f * g
    if deriv == 2:
        return f * (g * g - 0.5 / np.sqrt(z) + 0.25 / z**2)
    raise ValueError("deriv must be 0, 1 or 2")


def hm_boundary_right(z_r):
    """Right boundary value ``exp(-2/3 z^(3/2)) / (2 sqrt(pi) z^(1/4))``."""
    z_r = float(z_r)
    if z_r < 8.0:
        raise DomainError("right boundary needs z_r >= 8")
    return float(hm_right_tail(z_r))


def initial_iterate(z):
    """Starting guess ``(1+z^2)^(1/4) / ((1+e^z) sqrt 2)``."""
    z = np.asarray(z, dtype=float)
    return (1 + z * z) ** 0.25 / ((1 + np.exp(z)) * np.sqrt(2.0))


def cheb_points(N):
    """Chebyshev-Lobatto points ``cos(pi l / N)``, l = 0..N (descending)."""
    return np.cos(np.pi * np.arange(N + 1) / N)


def vals_to_coeffs(f):
    """Values at :func:`cheb_points` to Chebyshev coefficients (DCT-I)."""
    f = np.asarray(f, dtype=float)
    N = f.shape[0] - 1
    c = dct(f, type=1) / N
    c[0] /= 2
    c[-1] /= 2
    return c


def coeffs_to_vals(c):
    """Inverse of :func:`vals_to_coeffs`."""
    cc = np.array(c, dtype=float)
    cc[0] *= 2
    cc[-1] *= 2
    return dct(cc, type=1) / 2


def derivative_matrix(N, interval=(-1.0, 1.0)):
    """Coefficient-space first-derivative matrix on ``interval``."""
    D = np.zeros((N + 1, N + 1))
    for n in range(N + 1):
        k = np.arange(n + 1, N + 1, 2)
        D[n, k] = 2.0 * k
    D[0, :] /= 2
    return D * (2.0 / (interval[1] - interval[0]))


@dataclass(frozen=True)
class ChebyshevSolution:
    """Chebyshev expansion ``sum c_n T_n`` of a function on ``interval``."""

    coeffs: np.ndarray
    interval: tuple
    N: int

    def _x(self, z):
        zl, zr = self.interval
        return (2.0 * np.asarray(z, dtype=float) - (zl + zr)) / (zr - zl)

    def __call__(self, z, deriv=0):
        c = self.coeffs
        if deriv:
            D = derivative_matrix(self.N, self.interval)
            c = np.linalg.matrix_power(D, deriv) @ c
        x = self._x(z)
        return kernels.clenshaw(c, x.ravel()).reshape(x.shape)

    @property
    def tail_ratio(self):
        """``|c_N| / max |c_n|``, the spectral resolution indicator."""
        return float(abs(self.coeffs[-1]) / np.abs(self.coeffs).max())


@dataclass(frozen=True)
class HastingsMcLeodSolution:
    """Collocation core plus asymptotic tails.

    Attributes
    ----------
    core : ChebyshevSolution
    right_tail : str
        ``"asymptotic"`` (leading Airy asymptotic, the default) or ``"airy"``.
    iterations : int
        Fixed-point iterations used.
    last_update : float
        Max-norm size of the final update.
    """

    core: ChebyshevSolution
    right_tail: str = "asymptotic"
    iterations: int = 0
    last_update: float = 0.0
    mu: float = 0.009
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def z_l(self):
        return self.core.interval[0]

    @property
    def z_r(self):
        return self.core.interval[1]

    def __call__(self, z, deriv=0):
        return hm_eval(self, z, deriv)

    def with_right_tail(self, variant):
        """Same core with a different right-tail evaluator."""
        return HastingsMcLeodSolution(self.core, variant, self.iterations,
                                      self.last_update, self.mu, dict(self.meta))


def solve_hastings_mcleod(z_l=-10.0, z_r=10.0, N=128, mu=0.009, tol=1e-14,
                          max_iter=10**6, right_tail="asymptotic"):
    """Relaxed fixed-point collocation solve for the Hastings-McLeod solution.

    Iterates ``A <- mu L^{-1}(z A + 2 A^3) + (1 - mu) A`` where ``L`` is the
    second-derivative coefficient matrix whose last two rows carry the
    boundary values at ``z_r`` and ``z_l``.

    Parameters
    ----------
    z_l, z_r : float
        Interval ends, ``z_l <= -8`` and ``z_r >= 8``.
    N : int
        Polynomial degree.
    mu : float
        Relaxation parameter.
    tol : float
        Stop when successive iterates differ by less than ``tol`` (max norm).
    max_iter : int
        Iteration cap.
    right_tail : {"asymptotic", "airy"}
        Evaluator used for ``z > z_r``.

    Returns
    -------
    HastingsMcLeodSolution

    Raises
    ------
    NonConvergenceError
        If the cap is reached or the iterates diverge.
    """
    Al = hm_boundary_left(z_l)
    Ar = hm_boundary_right(z_r)
    z = 0.5 * (z_r - z_l) * cheb_points(N) + 0.5 * (z_r + z_l)
    D = derivative_matrix(N, (z_l, z_r))
    L = D @ D
    L[N - 1, :] = 1.0
    L[N, :] = (-1.0) ** np.arange(N + 1)
    lu = lu_factor(L)
    A = initial_iterate(z)
    diff = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        rhs = vals_to_coeffs(z * A + 2.0 * A**3)
        rhs[N - 1] = Ar
        rhs[N] = Al
        An = mu * coeffs_to_vals(lu_solve(lu, rhs)) + (1.0 - mu) * A
        diff = float(np.abs(An - A).max())
        A = An
        if not np.isfinite(diff) or np.abs(A).max() > 1e3:
            raise NonConvergenceError("iteration diverged", it, diff)
        if diff < tol:
            break
    else:
        raise NonConvergenceError("iteration cap reached", it, diff)
    core = ChebyshevSolution(vals_to_coeffs(A), (float(z_l), float(z_r)), int(N))
    return HastingsMcLeodSolution(core, right_tail, it, diff, float(mu),
                                  {"tol": tol, "tail_ratio": core.tail_ratio})


@lru_cache(maxsize=4)
def default_solution(right_tail="asymptotic"):
    """Cached solution with the default parameters."""
    return solve_hastings_mcleod(right_tail=right_tail)


def hm_eval(sol, z, deriv=0):
    """Global evaluator: core on ``[z_l, z_r]``, asymptotic tails outside."""
    za = np.asarray(z, dtype=float)
    flat = za.ravel()
    out = np.empty(flat.shape)
    left = flat < sol.z_l
    right = flat > sol.z_r
    mid = ~(left | right)
    if mid.any():
        out[mid] = sol.core(flat[mid], deriv)
    if left.any():
        out[left] = hm_left_tail(flat[left], deriv)
    if right.any():
        out[right] = hm_right_tail(flat[right], deriv, sol.right_tail)
    out = out.reshape(za.shape)
    return float(out) if out.ndim == 0 else out


def pii_residual(sol, z):
    """``A'' - z A - 2 A^3`` from the core expansion."""
    z = np.asarray(z, dtype=float)
    A = sol.core(z)
    return sol.core(z, 2) - z * A - 2 * A**3
