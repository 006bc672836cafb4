"""Whitham modulation: q-function, speeds, hodograph solves and edge dynamics.

The Euler-Poisson-Darboux function ``q`` is evaluated in Lagrangian form:
with ``lambda = u0(eta)`` running over ``[beta2, beta1]`` and the inner
integral written along the initial profile from the foot ``X3`` of
``beta3`` (``u0(X3) = beta3``),

    q = 1/(2 pi) int_{beta2}^{beta1} J(lambda) dlambda / sqrt((beta1-lambda)(lambda-beta2)),
    J(lambda) = (lambda-beta3)^(-1/2) int_{X3}^{eta} xi u0'(xi) / sqrt(lambda - u0(xi)) dxi.

Both quadratures are weight-exact (Gauss-Chebyshev outside, Gauss-Jacobi
with ``(1-s)^(-1/2)`` inside).  The form is valid on either side of the
minimum of ``u0`` (``X3 < 0`` or ``X3 > 0``), so the same code covers the
regime after the third invariant passes over the hump.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from scipy.special import roots_jacobi

from .initial_data import breakup
from .specfun import agm_KE, elliptic_Kprime

__all__ = [
    "WhithamTriple",
    "EdgeState",
    "TrailingEdgeState",
    "HodographSolveResult",
    "WhithamZone",
    "QuadratureError",
    "WhithamSolveError",
    "q_epd",
    "q_epd_tensor",
    "q_epd_split",
    "q_partials",
    "q_and_partials",
    "phi",
    "phi_derivs",
    "phi_general",
    "whitham_speeds",
    "hodograph_residuals",
    "lead0_residuals",
    "solve_whitham",
    "solve_leading_edge",
    "leading_edge_residuals",
    "trailing_edge",
    "trailing_edge_state",
    "phase_phi0",
    "hump_time",
    "solve_zone",
    "small_amplitude_seed",
]

_H = 1e-30  # complex step


class QuadratureError(RuntimeError):
    """Quadrature did not reach the requested accuracy within the node cap."""


class WhithamSolveError(RuntimeError):
    """Newton iteration or continuation failed."""


# ---------------------------------------------------------------- rules

@lru_cache(maxsize=None)
def _jacobi_rule(n):
    """Nodes/weights for int_{-1}^{1} (1-s)^(-1/2) g(s) ds."""
    s, w = roots_jacobi(n, -0.5, 0.0)
    return s, w


@lru_cache(maxsize=None)
def _cheb_nodes(n):
    return np.cos(np.pi * (np.arange(n) + 0.5) / n)


def _nodes_for(a, b, sing=(-1.0, 0.0), lo=64, cap=512):
    """Node count for a Gauss rule on ``[a, b]`` from the nearest singularity."""
    a, b = float(np.real(a)), float(np.real(b))
    if b - a <= 0:
        return lo
    rho = np.inf
    for p in sing:
        ph = abs((2.0 * p - (a + b)) / (b - a))
        if ph <= 1.0:
            ph = 1.0 + 1e-12
        rho = min(rho, ph + np.sqrt(ph * ph - 1.0))
    n = int(np.ceil(1.5 * 18.5 / np.log(rho))) + 16
    n = max(lo, 1 << (n - 1).bit_length())
    return min(n, cap)


# ---------------------------------------------------------------- q

def _inner_J(model, eta, X3, n):
    """``J`` at ``lambda = u0(eta)`` for arrays ``eta`` (...,) and ``X3`` (...,)."""
    s, ws = _jacobi_rule(n)
    E = eta[..., None]
    X = X3[..., None]
    xi = E + (X - E) * 0.5 * (1.0 - s)
    num = model.u0_diff(E, xi)
    g = xi * model.u0_prime(xi) * np.sqrt((1.0 - s) / num)
    L = model.u0_diff(eta, X3)
    return 0.5 * (eta - X3) * (g @ ws) / np.sqrt(L)


def _q_lag(model, b1, b2, X3, n):
    """Batched Lagrangian q for arrays ``b1 > b2``, foot ``X3``."""
    b1 = np.atleast_1d(b1)
    b2 = np.atleast_1d(b2)
    X3 = np.atleast_1d(X3)
    tau = _cheb_nodes(n)
    X1 = model.f_minus(b1)
    X2 = model.f_minus(b2)
    eta = 0.5 * (X1 + X2)[:, None] + 0.5 * (X2 - X1)[:, None] * tau
    D1 = model.u0_diff(X1[:, None], eta)
    D2 = model.u0_diff(eta, X2[:, None])
    ratio = np.sqrt((eta - X1[:, None]) * (X2[:, None] - eta) / (D1 * D2))
    w = -(np.pi / n) * model.u0_prime(eta) * ratio
    J = _inner_J(model, eta, np.broadcast_to(X3[:, None], eta.shape), n)
    return np.sum(w * J, axis=-1) / (2.0 * np.pi)


def _sorted3(b1, b2, b3):
    return tuple(sorted((float(b1), float(b2), float(b3)), reverse=True))


def _foot(model, b3, foot3):
    return float(model.f_minus(b3)) if foot3 is None else float(foot3)


def q_epd(model, b1, b2, b3, foot3=None, nodes=64, check=False):
    """Euler-Poisson-Darboux function ``q(beta1, beta2, beta3)``.

    Parameters
    ----------
    model : InitialDataModel
    b1, b2, b3 : float
        Riemann invariants in ``[-1, 0)``; any order (``q`` is symmetric).
    foot3 : float, optional
        Foot ``X3`` of the smallest invariant.  Defaults to ``f_minus(b3)``;
        pass a positive value after the invariant has crossed the hump.
    nodes : int
        Nodes per axis.
    check : bool
        Double the nodes until two successive values agree to ``1e-13``
        (cap 512); raise :class:`QuadratureError` otherwise.
    """
    b1, b2, b3 = _sorted3(b1, b2, b3)
    X3 = _foot(model, b3, foot3)
    if b1 == b2:
        if b2 == b3:
            return float(model.f_minus(b1)) if foot3 is None else X3
        return 0.5 * float(np.real(_inner_J(model, np.array([float(model.f_minus(b1))]),
                                            np.array([X3]), nodes)[0]))
    val = float(np.real(_q_lag(model, b1, b2, X3, nodes)[0]))
    if check:
        n = nodes
        while True:
            n2 = 2 * n
            if n2 > 512:
                raise QuadratureError(f"q did not converge with {n} nodes")
            v2 = float(np.real(_q_lag(model, b1, b2, X3, n2)[0]))
            if abs(v2 - val) <= 1e-13 * max(1.0, abs(v2)):
                return v2
            val, n = v2, n2
    return val


def q_and_partials(model, b1, b2, b3, foot3=None, nodes=64):
    """``q`` and ``(dq/db1, dq/db2, dq/db3)`` at an ordered triple.

    Complex-step differentiation is used for complex-safe models, central
    differences otherwise.  The ``b3`` partial is taken through the foot,
    ``dq/db3 = (dq/dX3) / u0'(X3)``.
    """
    X3 = _foot(model, b3, foot3)
    if X3 <= 0.0 and max(b1, b2, b3) - min(b1, b2, b3) < 1e-6:
        # the Lagrangian form is singular when the invariants coalesce
        return _q_tensor_partials(model, b1, b2, b3, nodes)
    if X3 == 0.0:
        X3 = 1e-12
    if model.complex_safe:
        h = _H
        B1 = np.array([b1, b1 + 1j * h, b1, b1], dtype=complex)
        B2 = np.array([b2, b2, b2 + 1j * h, b2], dtype=complex)
        XX = np.array([X3, X3, X3, X3 + 1j * h], dtype=complex)
        r = _q_lag(model, B1, B2, XX, nodes)
        q = float(r[0].real)
        d1 = r[1].imag / h
        d2 = r[2].imag / h
        dX = r[3].imag / h
    else:
        h = 1e-6
        B1 = np.array([b1, b1 + h, b1 - h, b1, b1, b1, b1])
        B2 = np.array([b2, b2, b2, b2 + h, b2 - h, b2, b2])
        XX = np.array([X3, X3, X3, X3, X3, X3 + h, X3 - h])
        r = np.real(_q_lag(model, B1, B2, XX, nodes))
        q = float(r[0])
        d1 = (r[1] - r[2]) / (2 * h)
        d2 = (r[3] - r[4]) / (2 * h)
        dX = (r[5] - r[6]) / (2 * h)
    d3 = dX / float(model.u0_prime(X3))
    return q, np.array([d1, d2, d3], dtype=float)


def q_partials(model, triple, nodes=64):
    """Partial derivatives of ``q`` at a :class:`WhithamTriple` (or 3-tuple)."""
    if isinstance(triple, WhithamTriple):
        return tuple(q_and_partials(model, triple.beta1, triple.beta2, triple.beta3,
                                    triple.foot3, nodes)[1])
    b1, b2, b3 = triple
    return tuple(q_and_partials(model, b1, b2, b3, None, nodes)[1])


def q_epd_tensor(model, b1, b2, b3, nodes=None):
    """``q`` by the tensor-product double integral over ``(mu, nu)``.

    Does not reorder its arguments; symmetry of ``q`` is a property of the
    integral, not of the implementation.  Valid before the hump only.
    """
    lo, hi = min(b1, b2, b3), max(b1, b2, b3)
    n = nodes or _nodes_for(lo, hi, cap=512)
    s, ws = _jacobi_rule(n)
    nu = _cheb_nodes(n)
    inner = 0.5 * (1 + nu) * b1 + 0.5 * (1 - nu) * b2
    arg = 0.5 * (1 + s)[:, None] * inner[None, :] + 0.5 * (1 - s)[:, None] * b3
    f = model.f_minus(arg)
    return float(ws @ f.sum(axis=1) * (np.pi / n) / (2.0 * np.sqrt(2.0) * np.pi))


def _q_tensor_partials(model, b1, b2, b3, nodes=64):
    """``q`` and its partials from the tensor form, differentiated under the integral."""
    s, ws = _jacobi_rule(nodes)
    nu = _cheb_nodes(nodes)
    a = 0.5 * (1 + s)[:, None]
    c = 0.5 * (1 + nu)[None, :]
    arg = a * (c * b1 + (1 - c) * b2) + (1 - a) * b3
    norm = (np.pi / nodes) / (2.0 * np.sqrt(2.0) * np.pi)
    f = model.f_minus(arg)
    fp = model.f_minus_deriv(arg, 1)
    q = float(ws @ f.sum(axis=1)) * norm
    d = [float(ws @ (fp * w).sum(axis=1)) * norm for w in (a * c, a * (1 - c), 1 - a + 0 * c)]
    return q, np.array(d)


def q_epd_split(model, b1, b2, b3, tol=1e-12):
    """``q`` after the hump from the split single/double integral (adaptive).

    Used as an independent check of :func:`q_epd`; ``b3`` is on the
    increasing branch (foot ``f_plus(b3) > 0``).
    """
    b1, b2, b3 = _sorted3(b1, b2, b3)

    def inner(lam):
        a = 0.0
        if b3 > -1.0:
            a = -quad(lambda m: model.f_plus(m) / np.sqrt(lam - m), -1.0, b3,
                      epsabs=tol, epsrel=tol, limit=200)[0]
        b = quad(lambda m: model.f_minus(m), -1.0, lam, weight="alg", wvar=(0, -0.5),
                 epsabs=tol, epsrel=tol, limit=200)[0]
        return (a + b) / np.sqrt(lam - b3)

    g = lambda th: inner(b2 + (b1 - b2) * 0.5 * (1 + np.cos(th)))
    return quad(g, 0.0, np.pi, epsabs=tol, epsrel=tol, limit=200)[0] / (2.0 * np.pi)


# ---------------------------------------------------------------- Phi

def phi_general(model, v, u, dv=0, du=0, nodes=None):
    """Mixed partial ``d^(dv+du) Phi / dv^dv du^du`` by the differentiated kernel."""
    n = nodes or _nodes_for(min(v, u), max(v, u))
    s, ws = _jacobi_rule(n)
    arg = 0.5 * (1 + s) * v + 0.5 * (1 - s) * u
    fac = (0.5 * (1 + s)) ** dv * (0.5 * (1 - s)) ** du
    return float(ws @ (fac * model.f_minus_deriv(arg, 1 + dv + du))) / (2.0 * np.sqrt(2.0))


def phi(model, v, u, nodes=None):
    """``Phi(v, u) = 1/(2 sqrt 2) int (1-mu)^(-1/2) f_-'(((1+mu)v + (1-mu)u)/2) dmu``."""
    return phi_general(model, v, u, 0, 0, nodes)


def phi_derivs(model, v, u, nodes=None):
    """``(dPhi/dv, d^2Phi/dv^2)``."""
    return phi_general(model, v, u, 1, 0, nodes), phi_general(model, v, u, 2, 0, nodes)


# ---------------------------------------------------------------- triple

@dataclass(frozen=True)
class WhithamTriple:
    """Ordered Riemann invariants with derived elliptic quantities.

    ``foot3`` is the foot ``X3`` of ``beta3`` on the initial profile; it is
    negative before the hump and positive after it.
    """

    beta1: float
    beta2: float
    beta3: float
    foot3: float = None
    m: float = field(init=False)
    m1: float = field(init=False)
    K: float = field(init=False)
    E: float = field(init=False)
    ome: float = field(init=False)
    omem: float = field(init=False)
    alpha: float = field(init=False)

    def __post_init__(self):
        b1, b2, b3 = float(self.beta1), float(self.beta2), float(self.beta3)
        if not (b1 >= b2 >= b3):
            raise ValueError(f"invariants must be ordered: {b1}, {b2}, {b3}")
        span = b1 - b3
        if span <= 0:
            m, m1 = 0.0, 1.0
        else:
            m, m1 = (b2 - b3) / span, (b1 - b2) / span
        if m1 == 0.0:
            K, E, ome, omem = np.inf, 1.0, 1.0, 1.0
        else:
            K, E, ome, omem = (float(a) for a in agm_KE(np.sqrt(m), np.sqrt(m1)))
        put = lambda k, v: object.__setattr__(self, k, v)
        put("beta1", b1)
        put("beta2", b2)
        put("beta3", b3)
        put("m", m)
        put("m1", m1)
        put("K", K)
        put("E", E)
        put("ome", ome)
        put("omem", omem)
        put("alpha", -b1 + span * (1.0 - ome))

    @property
    def s(self):
        return float(np.sqrt(self.m))

    @property
    def nome(self):
        if self.m == 0:
            return 0.0
        if self.m1 == 0:
            return 1.0
        return float(np.exp(-np.pi * elliptic_Kprime(np.sqrt(self.m)) / self.K))

    @property
    def beta_sum(self):
        return self.beta1 + self.beta2 + self.beta3

    def as_array(self):
        return np.array([self.beta1, self.beta2, self.beta3])


def whitham_speeds(triple):
    """Characteristic speeds ``(v1, v2, v3)``.

    Written with ``m``, ``1 - m``, ``1 - E/K`` and ``(1 - E/K)/m`` so that
    both degenerate limits are exact (``m = 0``: ``v1 = 6 beta1``,
    ``v2 = v3 = 12 beta2 - 6 beta1``; ``m = 1``: ``v1 = v2``).
    """
    T = triple
    span = T.beta1 - T.beta3
    S2 = 2.0 * T.beta_sum
    v1 = S2 + (0.0 if T.m1 == 0 else 4.0 * T.m1 * span / (1.0 - T.ome))
    v2 = S2 - (0.0 if T.m1 == 0 else 4.0 * T.m1 * span / (1.0 - T.omem))
    v3 = S2 - 4.0 * span / T.omem
    return np.array([v1, v2, v3])


def _speed_parts(T):
    """``v_i - 2 sum beta`` and the two regular ratios used by the residuals."""
    span = T.beta1 - T.beta3
    c1 = 4.0 * T.m1 * span / (1.0 - T.ome)
    c2 = -4.0 * T.m1 * span / (1.0 - T.omem)
    c3 = -4.0 * span / T.omem
    return c1, c2, c3


def hodograph_residuals(model, triple, x, t, nodes=64):
    """``v_i t + w_i - x`` for ``i = 1, 2, 3``."""
    q, dq = q_and_partials(model, triple.beta1, triple.beta2, triple.beta3, triple.foot3, nodes)
    c = np.array(_speed_parts(triple))
    R = 2.0 * triple.beta_sum * t + q - x
    return c * (t + 0.5 * dq) + R


def lead0_residuals(model, triple, x, t, nodes=64, form=None):
    """Regularised hodograph residuals.

    ``form="lead"`` multiplies the first equation by ``beta1 + alpha`` and
    divides the difference of equations 2 and 3 by ``beta2 - beta3``
    (regular at ``beta2 = beta3``).  ``form="trail"`` divides the
    difference of equations 1 and 2 by ``beta1 - beta2`` and keeps
    equations 2 and 3 (regular at ``beta1 = beta2``).  By default the form
    is chosen from ``m``.
    """
    T = triple
    q, dq = q_and_partials(model, T.beta1, T.beta2, T.beta3, T.foot3, nodes)
    W = t + 0.5 * dq
    S = T.beta_sum
    R = 2.0 * S * t + q - x
    span = T.beta1 - T.beta3
    if form is None:
        form = "lead" if T.m <= 0.5 else "trail"
    if form == "lead":
        r1 = 4.0 * T.m1 * span * span * W[0] + span * (1.0 - T.ome) * R
        r2 = -4.0 * T.m1 * span / (1.0 - T.omem) * W[1] + R
        # (v2 - 2S)/(b2 - b3) = -4 m1 / (m - ome), (v3 - 2S)/(b2 - b3) = -4/ome
        r3 = -4.0 * T.m1 / (T.m * (1.0 - T.omem)) * W[1] + 4.0 / T.ome * W[2]
        return np.array([r1, r2, r3])
    c1, c2, c3 = _speed_parts(T)
    # (v1 - 2S)/(b1 - b2) = 4/(1 - ome), (v2 - 2S)/(b1 - b2) = -4/(1 - omem)
    r1 = 4.0 / (1.0 - T.ome) * W[0] + 4.0 / (1.0 - T.omem) * W[1]
    r2 = c2 * W[1] + R
    r3 = c3 * W[2] + R
    return np.array([r1, r2, r3])


@dataclass
class HodographSolveResult:
    """Converged triple with the final residual norm and iteration count."""

    triple: WhithamTriple
    residual_norm: float
    newton_iters: int
    x: float = np.nan
    t: float = np.nan


def _triple_from(model, P):
    b1, b2, X3 = P
    return WhithamTriple(b1, b2, float(model.u0(X3)), X3)


def _valid(model, P):
    b1, b2, X3 = P
    if not np.all(np.isfinite(P)):
        return False
    b3 = float(model.u0(X3))
    return 0.0 > b1 > b2 > b3 and b2 > -1.0


def _newton(F, P, valid, tol=1e-12, maxit=40, h=1e-7):
    r = F(P)
    it = 0
    step = np.inf
    while np.abs(r).max() > tol and it < maxit:
        J = np.empty((3, 3))
        for k in range(3):
            e = np.zeros(3)
            e[k] = h * max(1.0, abs(P[k]))
            J[:, k] = (F(P + e) - F(P - e)) / (2 * e[k])
        dP = np.linalg.solve(J, -r)
        lam = 1.0
        while lam >= 1e-8:
            Pn = P + lam * dP
            if valid(Pn):
                rn = F(Pn)
                if np.abs(rn).max() < np.abs(r).max():
                    break
            lam *= 0.5
        else:
            # no descent left: residual is at its noise floor
            break
        step = float(np.abs(Pn - P).max())
        P, r = Pn, rn
        it += 1
    res = float(np.abs(r).max())
    # near the leading edge the regularised residual cancels O(1/m) terms, so
    # its noise floor can exceed tol; a negligible last step certifies convergence
    if res > tol * 100 and step > 1e-11 * (1.0 + np.abs(P).max()):
        raise WhithamSolveError(f"Newton stalled at residual {res:.3e}")
    return P, res, it


def solve_whitham(model, x, t, seed, nodes=64, tol=1e-12, form=None):
    """Newton solve of the regularised hodograph equations at ``(x, t)``.

    Parameters
    ----------
    seed : WhithamTriple or sequence
        Starting triple (``(beta1, beta2, foot3)`` if a plain sequence).

    Returns
    -------
    HodographSolveResult
    """
    if isinstance(seed, WhithamTriple):
        X3 = seed.foot3 if seed.foot3 is not None else float(model.f_minus(seed.beta3))
        P0 = np.array([seed.beta1, seed.beta2, X3])
    else:
        P0 = np.asarray(seed, dtype=float)
    F = lambda P: lead0_residuals(model, _triple_from(model, P), x, t, nodes, form)
    P, res, it = _newton(F, P0, lambda P: _valid(model, P), tol=tol)
    return HodographSolveResult(_triple_from(model, P), res, it, x, t)


# ---------------------------------------------------------------- leading edge

@dataclass(frozen=True)
class EdgeState:
    """Leading-edge data at time ``t``.

    ``fp`` is ``6 t + f_-'(u)``; ``x_minus_t = 12 v - 6 u``.
    """

    t: float
    x_minus: float
    u: float
    v: float
    u_t: float
    v_t: float
    c: float
    phi0: float
    fp: float
    x_minus_t: float
    residual: float


def _vstar(model, d):
    f = lambda v: phi_general(model, v, v + d, 1, 0)
    return brentq(f, -1.0 + 1e-13, -d - 1e-13, xtol=1e-15, rtol=1e-15)


def _t_of_d(model, d):
    v = _vstar(model, d)
    return -phi(model, v, v + d) / 6.0, v


def leading_edge_residuals(model, t, x, u, v):
    """Residuals of ``6ut + f(u) - x``, ``Phi(v,u) + 6t``, ``dPhi/dv(v,u)``."""
    return np.array([6 * u * t + float(model.f_minus(u)) - x,
                     phi(model, v, u) + 6 * t,
                     phi_general(model, v, u, 1, 0)])


def _edge_uv(model, t):
    key = ("edge_uv", float(t))
    if key in model._cache:
        return model._cache[key]
    bp = breakup(model)
    if t <= bp.t_c:
        raise ValueError("the leading edge exists for t > t_c")
    g = lambda d: _t_of_d(model, d)[0] - t
    hi = 0.5
    while g(hi) < 0:
        hi = 0.5 * (hi + 1.0)
        if hi > 1 - 1e-6:
            raise WhithamSolveError("leading edge: time beyond admissible range")
    d = brentq(g, 1e-12, hi, xtol=1e-15, rtol=1e-15)
    v = _vstar(model, d)
    u = v + d
    # Newton polish on (u, v)
    for _ in range(3):
        r = np.array([phi(model, v, u) + 6 * t, phi_general(model, v, u, 1, 0)])
        J = np.array([[phi_general(model, v, u, 0, 1), phi_general(model, v, u, 1, 0)],
                      [phi_general(model, v, u, 1, 1), phi_general(model, v, u, 2, 0)]])
        du, dv = np.linalg.solve(J, -r)
        if not (-1 < v + dv < u + du < 0):
            break
        u, v = u + du, v + dv
    model._cache[key] = (u, v)
    return u, v


def _d_table_integrand(model, d, t_c):
    return _t_of_d(model, d)[0] - t_c


def phase_phi0(model, t):
    """``phi0(t) = -16 int_{t_c}^t (u - v)^(3/2) dtau`` on the leading edge.

    Parametrised by ``d = u - v`` (monotone in ``t``) and integrated by
    parts, ``phi0 = -16 [d^(3/2) (t - t_c) - 3/2 int_0^d sqrt(s) (t(s) - t_c) ds]``,
    with an adaptive rule for the ``sqrt(s)`` weight.
    """
    bp = breakup(model)
    if t <= bp.t_c:
        return 0.0
    key = ("phi0", float(t))
    if key in model._cache:
        return model._cache[key]
    u, v = _edge_uv(model, t)
    D = u - v
    val, err = quad(lambda s: _d_table_integrand(model, s, bp.t_c), 0.0, D,
                    weight="alg", wvar=(0.5, 0.0), epsabs=1e-14, epsrel=1e-12, limit=200)
    phi0 = -16.0 * (D**1.5 * (t - bp.t_c) - 1.5 * val)
    model._cache[key] = phi0
    return phi0


def solve_leading_edge(model, t, with_phase=True):
    """Leading-edge state at time ``t > t_c``.

    Solves ``Phi(v,u) + 6t = 0`` and ``dPhi/dv = 0`` by a nested
    one-dimensional reduction in ``d = u - v`` followed by Newton
    polishing, then ``x^- = 6ut + f_-(u)``.
    """
    u, v = _edge_uv(model, t)
    x = 6 * u * t + float(model.f_minus(u))
    fp = 6 * t + float(model.f_minus_prime(u))
    pvv = phi_general(model, v, u, 2, 0)
    res = float(np.abs(leading_edge_residuals(model, t, x, u, v)).max())
    return EdgeState(
        t=float(t), x_minus=x, u=u, v=v,
        u_t=12.0 * (v - u) / fp,
        v_t=6.0 / ((u - v) * pvv),
        c=-0.5 * (u - v) * pvv,
        phi0=phase_phi0(model, t) if with_phase else np.nan,
        fp=fp, x_minus_t=12.0 * v - 6.0 * u, residual=res,
    )


def small_amplitude_seed(model, edge, x):
    """Triple ``(u + Delta, v + delta, v - delta)`` from the small-amplitude laws."""
    dx = x - edge.x_minus
    delta = np.sqrt(dx / edge.c)
    Delta = dx / edge.fp
    b3 = edge.v - delta
    return np.array([edge.u + Delta, edge.v + delta, float(model.f_minus(b3))])


# ---------------------------------------------------------------- trailing edge

@dataclass(frozen=True)
class TrailingEdgeState:
    """Trailing edge: ``beta1 = beta2 = a``, ``beta3 = b = u0(X_b)``."""

    t: float
    x_plus: float
    a: float
    b: float
    foot: float


def _J_and_derivative(model, a, Xb, n=64):
    """``J(a)`` and ``dJ/da`` at fixed foot ``Xb``."""
    A = np.array([a, a + 1j * _H]) if model.complex_safe else np.array([a, a + 1e-6, a - 1e-6])
    eta = model.f_minus(A)
    J = _inner_J(model, eta, np.full(A.shape, Xb, dtype=eta.dtype), n)
    if model.complex_safe:
        return float(J[0].real), float(J[1].imag / _H)
    J = np.real(J)
    return float(J[0]), float((J[1] - J[2]) / 2e-6)


def _trail_G(model, Xb, d):
    """Residual of the trailing-edge system at separation ``d``; returns (G, t)."""
    b = float(model.u0(Xb))
    a = b + d
    if a >= 0:
        return np.nan, np.nan
    J, Jp = _J_and_derivative(model, a, Xb)
    t = -Jp / 8.0
    return 6 * b * t + Xb - 2 * (2 * a + b) * t - 0.5 * J, t


_D_SWITCH = 0.5


def _trail_root(model, X):
    """Separation ``d`` and time ``t`` on the trailing branch with foot ``X``.

    Used beyond ``d = 0.5``; small separations are excluded from the scan.
    """
    key = ("trail_X", float(X))
    if key in model._cache:
        return model._cache[key]
    b = float(model.u0(X))
    ds = np.linspace(0.02, -b - 1e-9, 80)
    G = np.array([_trail_G(model, X, d)[0] for d in ds])
    ok = np.isfinite(G)
    idx = np.where(ok[:-1] & ok[1:] & (np.sign(G[:-1]) * np.sign(G[1:]) <= 0))[0]
    if len(idx) == 0:
        raise WhithamSolveError(f"trailing edge: no root in d for foot {X}")
    i = idx[-1]
    d = brentq(lambda s: _trail_G(model, X, s)[0], ds[i], ds[i + 1], xtol=1e-15, rtol=1e-15)
    out = (d, _trail_G(model, X, d)[1])
    model._cache[key] = out
    return out


def _trail_foot(model, d):
    """Foot ``X`` and time ``t`` on the trailing branch at separation ``d``."""
    key = ("trail_d", float(d))
    if key in model._cache:
        return model._cache[key]
    bp = breakup(model)
    Xs = np.linspace(bp.xi_c - 1.5, 1.0, 251)
    G = np.array([_trail_G(model, X, d)[0] for X in Xs])
    ok = np.isfinite(G)
    idx = np.where(ok[:-1] & ok[1:] & (np.sign(G[:-1]) * np.sign(G[1:]) <= 0))[0]
    if len(idx) == 0:
        raise WhithamSolveError(f"trailing edge: no foot for separation {d}")
    i = idx[0]
    X = brentq(lambda Z: _trail_G(model, Z, d)[0], Xs[i], Xs[i + 1], xtol=1e-15, rtol=1e-15)
    out = (X, _trail_G(model, X, d)[1])
    model._cache[key] = out
    return out


def trailing_edge_state(model, t):
    """Trailing edge from the degenerate (``beta1 = beta2``) hodograph system.

    With ``a = beta1 = beta2`` and ``b = u0(X_b)`` it reads
    ``x = 6bt + X_b``, ``x = 2(2a + b)t + J(a)/2`` and ``8t + J'(a) = 0``.
    Near breakup the branch is followed in the separation ``d = a - b``;
    further on ``d`` turns back, so the foot ``X_b`` is used instead.
    """
    key = ("trail", float(t))
    if key in model._cache:
        return model._cache[key]
    bp = breakup(model)
    if t <= bp.t_c:
        raise ValueError("the trailing edge exists for t > t_c")
    Xsw, tsw = _trail_foot(model, _D_SWITCH)
    d_min = 1e-3
    X_min, t_min = _trail_foot(model, d_min)
    if t <= t_min:
        # below the resolvable separation, d^2 grows linearly in t - t_c
        d = d_min * np.sqrt(max(t - bp.t_c, 0.0) / (t_min - bp.t_c))
        X = bp.xi_c + (X_min - bp.xi_c) * d / d_min
    elif t <= tsw:
        d = brentq(lambda s: _trail_foot(model, s)[1] - t, d_min, _D_SWITCH,
                   xtol=1e-15, rtol=1e-15)
        X = _trail_foot(model, d)[0]
    else:
        lo, hi = Xsw, Xsw + 0.25
        while _trail_root(model, hi)[1] < t:
            lo, hi = hi, hi + 0.25
        X = brentq(lambda Z: _trail_root(model, Z)[1] - t, lo, hi, xtol=1e-15, rtol=1e-15)
        d = _trail_root(model, X)[0]
    b = float(model.u0(X))
    st = TrailingEdgeState(float(t), 6 * b * t + X, b + d, b, X)
    model._cache[key] = st
    return st


def trailing_edge(model, t):
    """Position ``x^+(t)`` of the trailing edge."""
    return trailing_edge_state(model, t).x_plus


def hump_time(model):
    """First time at which the third invariant reaches ``-1``.

    This happens at the trailing edge, when its foot crosses the minimum
    of ``u0`` at ``x = 0``.
    """
    return float(_trail_root(model, 0.0)[1])


# ---------------------------------------------------------------- zone

class WhithamZone:
    """Solution of the hodograph equations across ``[x^-(t), x^+(t)]``.

    Solved on the graded grid ``x = x^- + W (1 - cos theta)/2`` by Newton
    continuation in ``theta``; the invariants and ``q`` are smooth in
    ``theta`` and are interpolated with cubic splines.
    """

    def __init__(self, model, t, npts=401, nodes=64):
        self.model = model
        self.t = float(t)
        self.edge = solve_leading_edge(model, t)
        self.trail = trailing_edge_state(model, t)
        self.x_minus = self.edge.x_minus
        self.x_plus = self.trail.x_plus
        self.width = self.x_plus - self.x_minus
        theta = np.linspace(0.0, np.pi, npts)
        x = self.x_minus + self.width * 0.5 * (1 - np.cos(theta))
        P = np.full((npts, 3), np.nan)
        q = np.full(npts, np.nan)
        resid = np.full(npts, np.nan)
        iters = np.zeros(npts, int)
        e = self.edge
        P[0] = [e.u, e.v, float(model.f_minus(e.v))]
        q[0] = q_epd(model, e.u, e.v, e.v)
        tr = self.trail
        P[-1] = [tr.a, tr.a, tr.foot]
        q[-1] = q_epd(model, tr.a, tr.a, tr.b, foot3=tr.foot)
        for k in range(1, npts - 1):
            if k < 3:
                seed = small_amplitude_seed(model, e, x[k])
            else:
                seed = 3 * P[k - 1] - 3 * P[k - 2] + P[k - 3]
                if not _valid(model, seed):
                    seed = 2 * P[k - 1] - P[k - 2]
            try:
                res = solve_whitham(model, x[k], self.t, seed, nodes)
            except (WhithamSolveError, np.linalg.LinAlgError):
                fallback = P[k - 1] if k > 1 else small_amplitude_seed(model, e, x[k])
                res = solve_whitham(model, x[k], self.t, fallback, nodes)
            T = res.triple
            P[k] = [T.beta1, T.beta2, T.foot3]
            q[k] = q_and_partials(model, T.beta1, T.beta2, T.beta3, T.foot3, nodes)[0]
            resid[k] = res.residual_norm
            iters[k] = res.newton_iters
        self.theta = theta
        self.x = x
        self.beta1 = P[:, 0]
        self.beta2 = P[:, 1]
        self.foot3 = P[:, 2]
        self.beta3 = np.asarray(model.u0(P[:, 2]), dtype=float)
        self.q = q
        self.residuals = resid
        self.iterations = iters
        self._splines = {name: CubicSpline(theta, getattr(self, name))
                         for name in ("beta1", "beta2", "foot3", "q")}

    def theta_of(self, x):
        r = np.clip(1.0 - 2.0 * (np.asarray(x, dtype=float) - self.x_minus) / self.width, -1.0, 1.0)
        return np.arccos(r)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x >= self.x_minus) & (x <= self.x_plus)

    def interpolate(self, x):
        """``(beta1, beta2, beta3, q)`` at points inside the zone."""
        th = self.theta_of(x)
        b1 = self._splines["beta1"](th)
        b2 = np.minimum(self._splines["beta2"](th), b1)
        X3 = self._splines["foot3"](th)
        b3 = np.minimum(np.asarray(self.model.u0(X3), dtype=float), b2)
        return b1, b2, b3, self._splines["q"](th)

    def triple(self, x):
        b1, b2, b3, _ = self.interpolate(float(x))
        return WhithamTriple(float(b1), float(b2), float(b3), float(self._splines["foot3"](self.theta_of(x))))

    def solve_at(self, x):
        """Exact Newton solve at ``x`` seeded from the interpolant."""
        return solve_whitham(self.model, float(x), self.t, self.triple(x))


def solve_zone(model, t, npts=401, nodes=64):
    """Cached :class:`WhithamZone` for ``(model, t)``."""
    key = ("zone", float(t), int(npts), int(nodes))
    if key not in model._cache:
        model._cache[key] = WhithamZone(model, t, npts, nodes)
    return model._cache[key]
