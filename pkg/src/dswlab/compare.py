"""Error measurement against KdV, scaling fits and the multiscale zone.

Evaluators are callables ``f(x) -> u`` sampled on the KdV grid points;
the KdV data are never re-interpolated.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.ndimage import maximum_filter1d

from . import asymptotics as asym
from .kdv import kdv_solve
from .whitham import solve_leading_edge, solve_zone

__all__ = [
    "ScalingFit",
    "ZoneBounds",
    "ErrorProfile",
    "ZONE_RULE",
    "pointwise_error",
    "edge_halfwidth",
    "max_error_near_edge",
    "loglog_fit",
    "envelope",
    "better_zone",
    "interior_window",
    "evaluators",
    "sweep",
    "TARGETS",
]

ZONE_RULE = "envelope-first-crossing/v1"
TARGETS = ("multiscale", "elliptic-edge", "elliptic-interior", "zone-width", "composite-edge")


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares fit ``-log10 D = -a log10 eps + b``."""

    a: float
    b: float
    r: float
    sigma_a: float
    n: int = 0

    def predict(self, eps):
        return 10.0 ** (self.a * np.log10(eps) - self.b)


@dataclass(frozen=True)
class ZoneBounds:
    """Interval around ``x^-`` where the multiscale solution beats elliptic+Hopf.

    ``open_left`` / ``open_right`` flag sides on which no envelope crossing
    was found inside the scan range; the bound is then the scan limit.
    """

    left: float
    right: float
    t: float
    epsilon: float
    open_left: bool = False
    open_right: bool = False
    rule: str = ZONE_RULE

    @property
    def width(self):
        return self.right - self.left

    @property
    def is_open(self):
        return self.open_left or self.open_right


@dataclass
class ErrorProfile:
    """``u_num - u_asym`` on the grid points of a window."""

    x: np.ndarray
    values: np.ndarray
    time: float
    epsilon: float
    meta: dict = field(default_factory=dict)

    @property
    def max_abs(self):
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0


def pointwise_error(u_num, evaluator, window):
    """Difference ``u_num - evaluator(x)`` at grid points with ``lo <= x <= hi``."""
    lo, hi = window
    g = u_num.grid
    if lo < -g.L or hi > g.L or lo > hi:
        raise ValueError(f"window {window} outside the grid [-{g.L}, {g.L})")
    x, u = u_num.window(lo, hi)
    return ErrorProfile(x, u - np.asarray(evaluator(x), dtype=float), u_num.time, u_num.epsilon)


def edge_halfwidth(model, t, epsilon, zmax=2.0):
    """Half-width in ``x`` of ``|z| <= zmax`` around the leading edge."""
    e = solve_leading_edge(model, t)
    return zmax * epsilon ** (2.0 / 3.0) * (6.0 * (e.u - e.v) / abs(e.v_t)) ** (1.0 / 3.0)


def max_error_near_edge(u_num, evaluator, model, t, zmax=2.0):
    """``max |u_num - evaluator|`` over ``|z| <= zmax`` around ``x^-(t)``."""
    e = solve_leading_edge(model, t)
    w = edge_halfwidth(model, t, u_num.epsilon, zmax)
    return pointwise_error(u_num, evaluator, (e.x_minus - w, e.x_minus + w)).max_abs


def interior_window(model, t):
    """Middle third of the Whitham zone."""
    z = solve_zone(model, t)
    return z.x_minus + z.width / 3.0, z.x_plus - z.width / 3.0


def loglog_fit(epsilons, deltas):
    """Ordinary least squares of ``-log10 D`` on ``-log10 eps``.

    Returns
    -------
    ScalingFit
        Slope ``a``, intercept ``b``, correlation ``r`` and slope
        standard error ``sigma_a``.
    """
    e = np.asarray(epsilons, dtype=float)
    d = np.asarray(deltas, dtype=float)
    if e.size < 3 or e.size != d.size:
        raise ValueError("need at least three (eps, delta) pairs")
    if np.any(e <= 0) or np.any(d <= 0):
        raise ValueError("values must be positive")
    X, Y = -np.log10(e), -np.log10(d)
    if np.ptp(X) == 0:
        raise ValueError("degenerate abscissae")
    res = stats.linregress(X, Y)
    # slope error from the residuals; linregress goes through 1 - r^2,
    # which cancels badly for near-exact laws
    resid = Y - (res.slope * X + res.intercept)
    sxx = np.sum((X - X.mean()) ** 2)
    sigma = np.sqrt(np.sum(resid**2) / (e.size - 2) / sxx) if e.size > 2 else 0.0
    return ScalingFit(float(res.slope), float(res.intercept), float(np.clip(res.rvalue, -1, 1)),
                      float(sigma), int(e.size))


def envelope(values, dx, wavelength):
    """Moving-window maximum of ``|values|`` over one wavelength."""
    size = max(int(np.ceil(wavelength / dx)) | 1, 1)
    return maximum_filter1d(np.abs(values), size=size, mode="nearest")


def _first_crossing(d):
    """Index of the first ``d >= 0``; ``None`` if there is none."""
    idx = np.nonzero(d >= 0)[0]
    return int(idx[0]) if idx.size else None


def better_zone(u_num, ms_eval, eh_eval, model, t, reach=10.0):
    """Zone around ``x^-`` where the multiscale error envelope is the smaller one.

    Error envelopes (moving maxima over one local wavelength
    ``pi eps / sqrt(u - v)``) are compared while scanning outward from
    ``x^-`` on each side; a bound is the first point where the multiscale
    envelope reaches the elliptic+Hopf one.  Sides without a crossing
    within ``reach * eps^(2/3)`` are reported open.
    """
    eps = u_num.epsilon
    e = solve_leading_edge(model, t)
    R = reach * eps ** (2.0 / 3.0)
    x, u = u_num.window(e.x_minus - R, e.x_minus + R)
    dx = u_num.grid.dx
    lam = np.pi * eps / np.sqrt(e.u - e.v)
    E_ms = envelope(u - ms_eval(x), dx, lam)
    E_eh = envelope(u - eh_eval(x), dx, lam)
    D = E_ms - E_eh
    i0 = int(np.searchsorted(x, e.x_minus))
    if D[min(i0, len(D) - 1)] >= 0:
        return ZoneBounds(e.x_minus, e.x_minus, t, eps, True, True)
    right = _first_crossing(D[i0:])
    left = _first_crossing(D[:i0][::-1])
    xr = x[i0 + right] if right is not None else x[-1]
    xl = x[i0 - 1 - left] if left is not None else x[0]
    return ZoneBounds(float(xl), float(xr), float(t), float(eps), left is None, right is None)


def evaluators(model, t, epsilon):
    """``(multiscale, elliptic+Hopf)`` evaluators at ``(t, eps)``."""
    ms = lambda x: asym.multiscale_solution(model, x, t, epsilon)
    eh = lambda x: asym.elliptic_hopf_solution(model, x, t, epsilon)
    return ms, eh


def sweep(model, epsilons=(0.08, 0.04, 0.02, 0.01), t=0.4, kdv_kwargs=None):
    """Error measures for each ``eps`` and the corresponding scaling fits.

    Returns
    -------
    rows : list of dict
        Per-``eps`` measures keyed by the names in ``TARGETS``.
    fits : dict
        ``ScalingFit`` per target.
    """
    rows = []
    for eps in epsilons:
        sol = kdv_solve(model, eps, t, **(kdv_kwargs or {})).final
        ms, eh = evaluators(model, t, eps)
        zone = better_zone(sol, ms, eh, model, t)
        comp = lambda x: asym.composite_solution(model, x, t, eps, zone)
        rows.append({
            "epsilon": eps,
            "multiscale": max_error_near_edge(sol, ms, model, t),
            "elliptic-edge": max_error_near_edge(sol, eh, model, t),
            "elliptic-interior": pointwise_error(sol, eh, interior_window(model, t)).max_abs,
            "zone-width": zone.width,
            "composite-edge": max_error_near_edge(sol, comp, model, t),
            "zone": zone,
        })
    eps = [r["epsilon"] for r in rows]
    fits = {k: loglog_fit(eps, [r[k] for r in rows]) for k in TARGETS}
    return rows, fits
