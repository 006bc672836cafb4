"""Pseudospectral solver for ``u_t + 6 u u_x + eps^2 u_xxx = 0`` on ``[-L, L)``.

Space is Fourier, time is ETDRK4 (Cox-Matthews with the contour-integral
coefficients of Kassam and Trefethen).  The dispersive term is integrated
exactly in transform space.
"""

import hashlib
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import fft as sfft

from . import kernels

__all__ = [
    "Grid1D",
    "GridFunction",
    "KdVTrajectory",
    "KdVError",
    "ResolutionError",
    "default_grid",
    "default_dt",
    "kdv_solve",
    "conserved",
    "spectral_tail",
    "save_checkpoint",
    "load_checkpoint",
    "cache_dir",
]

EPS_RANGE = (5e-3, 0.5)
BLOWUP = 10.0
TAIL_GATE = 1e-8


class KdVError(RuntimeError):
    """Step-size failure or blow-up in the time integration."""


class ResolutionError(KdVError):
    """The spectral-tail gate rejected the run."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid on ``[-L, L)`` with ``N`` points."""

    L: float
    N: int

    def __post_init__(self):
        N = int(self.N)
        if N < 8 or N & (N - 1):
            raise ValueError(f"N must be a power of two, got {self.N}")

    @property
    def dx(self):
        return 2.0 * self.L / self.N

    @property
    def x(self):
        return -self.L + self.dx * np.arange(self.N)

    @property
    def k(self):
        """Wavenumbers of the real FFT."""
        return np.pi / self.L * np.arange(self.N // 2 + 1)

    def resolves(self, epsilon):
        """``dx <= eps / 10``."""
        return self.dx <= epsilon / 10.0 * (1 + 1e-12)


@dataclass
class GridFunction:
    """Snapshot ``u(x, t)`` at one time."""

    grid: Grid1D
    values: np.ndarray
    time: float
    epsilon: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.N,):
            raise ValueError("values do not match the grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite values")

    @property
    def x(self):
        return self.grid.x

    def window(self, lo, hi):
        """``(x, u)`` restricted to ``lo <= x <= hi``."""
        x = self.grid.x
        m = (x >= lo) & (x <= hi)
        return x[m], self.values[m]


@dataclass
class KdVTrajectory:
    """Snapshots at the requested output times."""

    snapshots: list
    epsilon: float
    grid: Grid1D
    dt: float
    meta: dict = field(default_factory=dict)

    @property
    def times(self):
        return np.array([s.time for s in self.snapshots])

    @property
    def final(self):
        return self.snapshots[-1]

    def at(self, t):
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-12:
            raise KeyError(f"no snapshot at t={t}")
        return self.snapshots[i]

    def __len__(self):
        return len(self.snapshots)

    def __getitem__(self, i):
        return self.snapshots[i]


def default_grid(epsilon, L=15.0):
    """Smallest power-of-two grid with ``dx <= eps/10``."""
    n = int(np.ceil(20.0 * L / epsilon))
    return Grid1D(float(L), 1 << (n - 1).bit_length())


def default_dt(epsilon):
    """``5e-6`` at ``eps = 0.01``, proportional to ``eps``."""
    return 5e-6 * epsilon / 0.01


def _etd_coefficients(Lk, h, M=32):
    """ETDRK4 coefficients by contour means over ``M`` points on the unit circle.

    ``L`` is imaginary here, so the full circle is needed (no real-part
    symmetry to exploit).
    """
    hL = h * Lk
    r = np.exp(2j * np.pi * (np.arange(1, M + 1) - 0.5) / M)
    LR = hL[:, None] + r[None, :]
    eLR = np.exp(LR)
    Q = h * np.mean((np.exp(LR / 2) - 1) / LR, axis=1)
    f1 = h * np.mean((-4 - LR + eLR * (4 - 3 * LR + LR**2)) / LR**3, axis=1)
    f2 = h * np.mean((2 + LR + eLR * (LR - 2)) / LR**3, axis=1)
    f3 = h * np.mean((-4 - 3 * LR - LR**2 + eLR * (4 - LR)) / LR**3, axis=1)
    c = lambda a: np.ascontiguousarray(a, dtype=complex)
    return c(np.exp(hL)), c(np.exp(hL / 2)), c(Q), c(f1), c(f2), c(f3)


class _Stepper:
    def __init__(self, grid, epsilon, dealias=False):
        self.grid = grid
        k = grid.k
        self.L = 1j * epsilon**2 * k**3
        self.g = np.ascontiguousarray(-3j * k)
        if dealias:
            self.g[k > (2.0 / 3.0) * k[-1]] = 0.0
        self._coef = {}
        n = k.shape[0]
        self.buf = [np.empty(n, dtype=complex) for _ in range(5)]

    def coefficients(self, h):
        if h not in self._coef:
            self._coef[h] = _etd_coefficients(self.L, h)
        return self._coef[h]

    def N(self, v):
        u = sfft.irfft(v, n=self.grid.N)
        return np.ascontiguousarray(self.g * sfft.rfft(u * u))

    def step(self, v, h):
        E, E2, Q, f1, f2, f3 = self.coefficients(h)
        a, b, c, vn, _ = self.buf
        Nv = self.N(v)
        kernels.etd_stage(E2, v, Q, Nv, a)
        Na = self.N(a)
        kernels.etd_stage(E2, v, Q, Na, b)
        Nb = self.N(b)
        kernels.etd_stage_c(E2, a, Q, Nb, Nv, c)
        Nc = self.N(c)
        kernels.etd_final(E, v, Nv, Na, Nb, Nc, f1, f2, f3, vn)
        return vn.copy()


def spectral_tail(values):
    """``max |c_k|`` over the top 10% of wavenumbers divided by ``max |c_k|``."""
    c = np.abs(sfft.rfft(np.asarray(values, dtype=float)))
    n = c.shape[0]
    return float(c[int(0.9 * n):].max() / c.max())


def _source_hash():
    src = Path(__file__).read_bytes() + Path(kernels.__file__).read_bytes()
    return hashlib.sha256(src).hexdigest()[:16]


def cache_dir():
    """On-disk cache location (``DSWLAB_CACHE`` or ``~/.cache/dswlab``)."""
    d = os.environ.get("DSWLAB_CACHE")
    return Path(d) if d else Path.home() / ".cache" / "dswlab"


def _cache_key(model, epsilon, times, grid, dt, dealias):
    name = getattr(model, "cache_token", None)
    if name is None:
        return None
    parts = [name, repr(float(epsilon)), repr([float(t) for t in times]),
             repr(grid.L), str(grid.N), repr(float(dt)), str(bool(dealias)), _source_hash()]
    return hashlib.sha256("|".join(parts).encode()).hexdigest()[:24]


def kdv_solve(model, epsilon, t_end=None, grid=None, dt=None, times=None,
              dealias=False, check_tail=True, cache=True):
    """Integrate the small-dispersion KdV equation from ``u0``.

    Parameters
    ----------
    model : InitialDataModel
    epsilon : float
        Dispersion parameter in ``[5e-3, 0.5]``.
    t_end : float, optional
        Final time; ``times`` defaults to ``[t_end]``.
    grid : Grid1D, optional
        Defaults to :func:`default_grid`.
    dt : float, optional
        Step bound; defaults to :func:`default_dt`.  Each output interval
        is split into equal steps no longer than ``dt``.
    times : sequence of float, optional
        Output times (sorted, non-negative).
    dealias : bool
        Apply the 2/3 rule to the nonlinear term.
    check_tail : bool
        Reject runs whose final spectral tail exceeds ``1e-8``.
    cache : bool
        Reuse results stored under :func:`cache_dir`.

    Returns
    -------
    KdVTrajectory

    Raises
    ------
    KdVError
        On blow-up (``max |u| > 10``) or a bad step size.
    ResolutionError
        If the spectral-tail gate fails.
    """
    epsilon = float(epsilon)
    if not EPS_RANGE[0] <= epsilon <= EPS_RANGE[1]:
        raise ValueError(f"epsilon must lie in {EPS_RANGE}")
    if times is None:
        if t_end is None:
            raise ValueError("give t_end or times")
        times = [t_end]
    times = [float(t) for t in times]
    if any(t < 0 for t in times) or sorted(times) != times:
        raise ValueError("times must be sorted and non-negative")
    grid = grid or default_grid(epsilon)
    if grid.L < 15.0:
        raise ValueError("L must be at least 15")
    dt = float(dt or default_dt(epsilon))
    if not (0 < dt < 1):
        raise KdVError(f"bad step size {dt}")

    key = _cache_key(model, epsilon, times, grid, dt, dealias) if cache else None
    path = cache_dir() / f"kdv_{key}.npz" if key else None
    if path is not None and path.exists():
        data = np.load(path)
        snaps = [GridFunction(grid, u, t, epsilon) for t, u in zip(data["times"], data["u"])]
        return KdVTrajectory(snaps, epsilon, grid, dt, {"cached": True, "tail": float(data["tail"])})

    x = grid.x
    u0 = np.asarray(model.u0(x), dtype=float)
    if max(abs(u0[0]), abs(float(model.u0(grid.L)))) > 1e-12:
        raise ValueError("initial data not negligible at the boundary; increase L")
    st = _Stepper(grid, epsilon, dealias)
    v = np.ascontiguousarray(sfft.rfft(u0), dtype=complex)
    snaps = []
    t = 0.0
    nsteps = 0
    for tout in times:
        span = tout - t
        if span > 0:
            n = int(np.ceil(span / dt - 1e-9))
            h = span / n
            for i in range(n):
                v = st.step(v, h)
                if i % 200 == 199 or i == n - 1:
                    umax = np.abs(sfft.irfft(v, n=grid.N)).max()
                    if not np.isfinite(umax) or umax > BLOWUP:
                        raise KdVError(f"blow-up at t={t + (i + 1) * h:.6g} (max|u|={umax:.3g})")
            nsteps += n
            t = tout
            snaps.append(GridFunction(grid, sfft.irfft(v, n=grid.N), tout, epsilon))
        else:
            snaps.append(GridFunction(grid, u0.copy(), tout, epsilon))
    tail = spectral_tail(snaps[-1].values)
    if check_tail and times[-1] > 0 and tail > TAIL_GATE:
        raise ResolutionError(f"spectral tail {tail:.2e} exceeds {TAIL_GATE:g}")
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp.npz")
        np.savez(tmp, times=np.array(times), u=np.array([s.values for s in snaps]), tail=tail)
        os.replace(tmp, path)
    return KdVTrajectory(snaps, epsilon, grid, dt,
                         {"cached": False, "tail": tail, "steps": nsteps, "backend": kernels.BACKEND})


def conserved(traj):
    """``(mass, momentum)`` arrays, trapezoid sums over the periodic grid."""
    dx = traj.grid.dx
    mass = np.array([dx * s.values.sum() for s in traj])
    mom = np.array([dx * (s.values**2).sum() for s in traj])
    return mass, mom


def save_checkpoint(gf, path):
    """Write a snapshot as text: header ``L N t eps`` then one value per line."""
    g = gf.grid
    with open(path, "w") as fh:
        fh.write(f"# L N t epsilon\n# {g.L!r} {g.N} {gf.time!r} {gf.epsilon!r}\n")
        np.savetxt(fh, gf.values, fmt="%.17g")


def load_checkpoint(path):
    """Inverse of :func:`save_checkpoint` (bit-exact)."""
    with open(path) as fh:
        fh.readline()
        L, N, t, eps = fh.readline().lstrip("#").split()
        vals = np.loadtxt(fh, dtype=float, ndmin=1)
    return GridFunction(Grid1D(float(L), int(N)), vals, float(t), float(eps))
