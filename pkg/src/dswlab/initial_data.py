"""Initial data, inverse branches, Hopf solution and the breakup point."""

from dataclasses import dataclass, field
from math import factorial

import hashlib

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq, minimize_scalar

from .specfun import DomainError

__all__ = [
    "InitialDataModel",
    "Sech2Model",
    "FunctionModel",
    "SampledModel",
    "BreakupPoint",
    "ValidationReport",
    "HopfResult",
    "validate",
    "breakup",
    "hopf_solve",
    "hopf_values",
    "hopf_folds",
    "f_minus",
    "f_plus",
    "load_model",
]


class InitialDataModel:
    """Negative single-well initial profile ``u0`` with ``u0(0) = -1``.

    Subclasses provide ``u0`` and ``u0_prime``; the inverse of the
    decreasing branch (``x <= 0``) is ``f_minus`` and of the increasing
    branch ``f_plus``.  ``complex_safe`` marks models whose functions accept
    complex arguments analytically (enables complex-step derivatives).
    """

    name = "abstract"
    complex_safe = False
    # identifies the data for on-disk caches; None disables caching
    cache_token = None

    def __init__(self):
        self._cache = {}

    def u0(self, x):
        raise NotImplementedError

    def u0_prime(self, x):
        raise NotImplementedError

    def u0_diff(self, a, b):
        """``u0(a) - u0(b)``; subclasses may override with a cancellation-free form."""
        return self.u0(a) - self.u0(b)

    def f_minus(self, u):
        raise NotImplementedError

    def f_plus(self, u):
        raise NotImplementedError

    def f_minus_deriv(self, u, k=1):
        """``k``-th derivative of ``f_minus``."""
        raise NotImplementedError

    def f_minus_prime(self, u):
        return self.f_minus_deriv(u, 1)

    def f_minus_ppp(self, u):
        return self.f_minus_deriv(u, 3)

    def to_config(self):
        return self.name

    @property
    def hump_time_T(self):
        """Time at which the third Riemann invariant first reaches ``-1``."""
        if "hump_time" not in self._cache:
            from .whitham import hump_time

            self._cache["hump_time"] = hump_time(self)
        return self._cache["hump_time"]

    def __repr__(self):
        return f"{type(self).__name__}({self.name!r})"


def _check_u(u):
    ua = np.asarray(u)
    if not np.iscomplexobj(ua) and (np.any(ua < -1) or np.any(ua >= 0)):
        raise DomainError("inverse branches are defined for -1 <= u < 0")
    return ua


class Sech2Model(InitialDataModel):
    """``u0(x) = -sech^2 x`` with closed-form inverses and derivatives."""

    name = "sech2"
    complex_safe = True
    cache_token = "sech2"

    def u0(self, x):
        return -1.0 / np.cosh(x) ** 2

    def u0_prime(self, x):
        return 2.0 * np.tanh(x) / np.cosh(x) ** 2

    def u0_second(self, x):
        c2 = 1.0 / np.cosh(x) ** 2
        return 2.0 * c2 * (c2 - 2.0 * np.tanh(x) ** 2)

    def u0_diff(self, a, b):
        return np.sinh(a - b) * (np.tanh(a) + np.tanh(b)) / (np.cosh(a) * np.cosh(b))

    def f_minus(self, u):
        u = _check_u(u)
        return -np.arccosh(1.0 / np.sqrt(-u))

    def f_plus(self, u):
        u = _check_u(u)
        return np.arccosh(1.0 / np.sqrt(-u))

    def f_minus_deriv(self, u, k=1):
        # f' = (1/2) u^-1 (1+u)^-1/2; Leibniz for higher orders
        u = np.asarray(u)
        n = k - 1
        total = 0.0
        for j in range(n + 1):
            i = n - j
            a = (-1) ** j * factorial(j) * u ** (-1 - j)
            c = 1.0
            for r in range(i):
                c *= -0.5 - r
            b = c * (1 + u) ** (-0.5 - i)
            total = total + factorial(n) / (factorial(j) * factorial(i)) * a * b
        return 0.5 * total


class FunctionModel(InitialDataModel):
    """Model defined by a callable ``u0`` (and optionally ``u0_prime``).

    Inverse branches are computed by vectorised bisection with Newton
    polishing; ``f_minus`` derivatives use ``f' = 1/u0'(f)`` and central
    differences of step ``1e-3`` in ``u`` (smaller near ``u = -1`` and
    ``u = 0``) for higher orders.
    """

    def __init__(self, u0, u0_prime=None, name="function", x_range=(-40.0, 40.0)):
        super().__init__()
        self._u0 = u0
        self._u0p = u0_prime
        self.name = name
        self.x_range = x_range

    def u0(self, x):
        return self._u0(np.asarray(x, dtype=float))

    def u0_prime(self, x):
        x = np.asarray(x, dtype=float)
        if self._u0p is not None:
            return self._u0p(x)
        h = 1e-5 * np.maximum(1.0, np.abs(x))
        return (self.u0(x - 2 * h) - 8 * self.u0(x - h) + 8 * self.u0(x + h) - self.u0(x + 2 * h)) / (12 * h)

    def _invert(self, u, lo, hi):
        u = np.asarray(u, dtype=float)
        a = np.full(u.shape, float(lo))
        b = np.full(u.shape, float(hi))
        ga = self.u0(a) - u
        for _ in range(70):
            m = 0.5 * (a + b)
            gm = self.u0(m) - u
            same = np.sign(gm) == np.sign(ga)
            a = np.where(same, m, a)
            ga = np.where(same, gm, ga)
            b = np.where(same, b, m)
        x = 0.5 * (a + b)
        for _ in range(2):
            d = self.u0_prime(x)
            step = np.where(np.abs(d) > 1e-14, (self.u0(x) - u) / np.where(d == 0, 1, d), 0.0)
            xn = x - step
            x = np.where((xn >= a - 1e-12) & (xn <= b + 1e-12), xn, x)
        return x

    def f_minus(self, u):
        _check_u(u)
        return self._invert(u, self.x_range[0], 0.0)

    def f_plus(self, u):
        _check_u(u)
        return self._invert(u, self.x_range[1], 0.0)

    def f_minus_deriv(self, u, k=1):
        u = np.asarray(u, dtype=float)
        fp = lambda w: 1.0 / self.u0_prime(self.f_minus(w))
        if k == 1:
            return fp(u)
        # keep the stencil inside -1 <= u < 0
        h = np.clip(0.05 * np.minimum(u + 1.0, -u), 1e-300, 1e-3)
        if k == 2:
            return (fp(u - 2 * h) - 8 * fp(u - h) + 8 * fp(u + h) - fp(u + 2 * h)) / (12 * h)
        if k == 3:
            return (-fp(u - 2 * h) + 16 * fp(u - h) - 30 * fp(u) + 16 * fp(u + h) - fp(u + 2 * h)) / (12 * h * h)
        raise ValueError("numeric models provide derivatives up to order 3")


class SampledModel(FunctionModel):
    """Model built from sampled ``(x, u0)`` pairs by monotone cubic interpolation."""

    def __init__(self, x, u, name="sampled"):
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        order = np.argsort(x)
        x, u = x[order], u[order]
        self._interp = PchipInterpolator(x, u, extrapolate=False)
        self._dinterp = self._interp.derivative()
        self._ends = (x[0], x[-1], u[0], u[-1])
        self.cache_token = "sampled:" + hashlib.sha256(x.tobytes() + u.tobytes()).hexdigest()[:16]
        super().__init__(self._eval, self._deval, name=name, x_range=(x[0], x[-1]))

    def _eval(self, x):
        v = self._interp(x)
        return np.where(np.isnan(v), np.where(x < self._ends[0], self._ends[2], self._ends[3]), v)

    def _deval(self, x):
        v = self._dinterp(x)
        return np.where(np.isnan(v), 0.0, v)

    @classmethod
    def from_file(cls, path):
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] < 2:
            raise ValueError(f"{path}: expected two columns (x, u0)")
        return cls(data[:, 0], data[:, 1], name=f"file:{path}")


def load_model(spec="sech2"):
    """Model from a config value: ``sech2`` or ``file:<path>``."""
    spec = spec.strip()
    if spec == "sech2":
        return Sech2Model()
    if spec.startswith("file:"):
        return SampledModel.from_file(spec[5:])
    raise ValueError(f"unknown initial data {spec!r}")


def f_minus(model, u):
    return model.f_minus(u)


def f_plus(model, u):
    return model.f_plus(u)


@dataclass
class ValidationReport:
    """Outcome of the admissibility checks; ``checks[name] = (passed, detail)``."""

    checks: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(ok for ok, _ in self.checks.values())

    def failures(self):
        return [k for k, (ok, _) in self.checks.items() if not ok]

    def __str__(self):
        lines = [f"{'PASS' if ok else 'FAIL'} {k}: {d}" for k, (ok, d) in self.checks.items()]
        return "\n".join(lines)


def validate(model, x_half_width=20.0, samples=20001):
    """Numerically check the admissibility assumptions on ``model``.

    The checks are: strictly negative; single minimum; minimum ``-1`` at
    the origin (non-normalised data are rejected and the required
    rescaling is reported); ``f_minus''' < 0``; tail decay; and branch
    consistency ``f_minus(u0(x)) = x`` for ``x <= 0``.
    """
    rep = ValidationReport()
    x = np.linspace(-x_half_width, x_half_width, samples)
    u = np.asarray(model.u0(x), dtype=float)
    rep.checks["negative"] = (bool(np.all(u < 0)), f"max u0 = {u.max():.3e}")
    du = np.diff(u)
    minima = np.where((du[:-1] < 0) & (du[1:] >= 0))[0] + 1
    rep.checks["single_minimum"] = (len(minima) == 1, f"{len(minima)} local minima")
    i = int(np.argmin(u))
    xmin, umin = x[i], u[i]
    ok = abs(umin + 1) < 1e-10 and abs(xmin) <= (x[1] - x[0])
    detail = f"min u0 = {umin:.12g} at x = {xmin:.6g}"
    if not ok:
        detail += f"; rescale u0 -> u0/{abs(umin):.12g}, x -> x - ({xmin:.6g})"
    rep.checks["normalized"] = (ok, detail)
    if not rep.checks["normalized"][0] or not rep.checks["single_minimum"][0]:
        rep.checks["fppp_negative"] = (False, "skipped: data not normalised single-well")
        rep.checks["branch_consistency"] = (False, "skipped")
    else:
        us = np.linspace(-0.99, -0.01, 199)
        f3 = np.asarray(model.f_minus_ppp(us), dtype=float)
        rep.checks["fppp_negative"] = (bool(np.all(f3 < 0)), f"max f''' = {f3.max():.3e}")
        xs = np.linspace(-6.0, -1e-3, 400)
        err = np.abs(model.f_minus(model.u0(xs)) - xs).max()
        rep.checks["branch_consistency"] = (bool(err < 1e-10), f"max error {err:.2e}")
    xt = np.array([x_half_width, 2 * x_half_width])
    tail = np.abs(np.concatenate([model.u0(xt), model.u0(-xt)])) * (1 + np.concatenate([xt, xt]) ** 2)
    rep.checks["decay"] = (bool(np.all(tail * np.concatenate([xt, xt]) ** 1.5 < 1e-3)),
                           f"max |u0|(1+x^2) on tails = {tail.max():.3e}")
    return rep


@dataclass(frozen=True)
class BreakupPoint:
    """Point of gradient catastrophe of the Hopf solution."""

    t_c: float
    x_c: float
    xi_c: float
    u_c: float


def breakup(model, search=(-20.0, 0.0)):
    """Locate the gradient catastrophe: maximise ``-6 u0'(xi)``."""
    key = ("breakup", search)
    if key in model._cache:
        return model._cache[key]
    xs = np.linspace(search[0], search[1], 4001)
    g = -6.0 * np.asarray(model.u0_prime(xs), dtype=float)
    i = int(np.argmax(g))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    res = minimize_scalar(lambda s: 6.0 * float(model.u0_prime(s)), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-12})
    if not res.success:
        raise RuntimeError(f"breakup optimisation failed: {res.message}")
    xi = float(res.x)
    if hasattr(model, "u0_second"):
        for _ in range(3):
            xi -= float(model.u0_second(xi)) / _fd(model.u0_second, xi)
    t_c = 1.0 / (-6.0 * float(model.u0_prime(xi)))
    u_c = float(model.u0(xi))
    bp = BreakupPoint(t_c, 6.0 * t_c * u_c + xi, xi, u_c)
    model._cache[key] = bp
    return bp


def _fd(f, x, h=1e-6):
    return (float(f(x + h)) - float(f(x - h))) / (2 * h)


@dataclass
class HopfResult:
    """Solution of ``x = 6 t u0(xi) + xi`` at one point.

    ``value`` is the unique branch (``nan`` when multivalued); ``branches``
    lists every solution ordered by increasing ``xi``.
    """

    value: float
    branches: tuple
    feet: tuple
    multivalued: bool
    gradient_blowup: bool = False


def hopf_folds(model, t, span=(-40.0, 40.0), samples=8001):
    """Feet ``xi`` where ``1 + 6 t u0'(xi) = 0`` (fold points of the Hopf map)."""
    if t <= 0:
        return []
    xs = np.linspace(span[0], span[1], samples)
    gp = 1.0 + 6.0 * t * np.asarray(model.u0_prime(xs), dtype=float)
    idx = np.where(np.sign(gp[:-1]) * np.sign(gp[1:]) < 0)[0]
    h = lambda s: 1.0 + 6.0 * t * float(model.u0_prime(s))
    return [brentq(h, xs[i], xs[i + 1], xtol=1e-15) for i in idx]


def _bisect_roots(model, x, t, a, b, iters=80):
    """Vectorised root of ``xi + 6 t u0(xi) - x`` with sign change on ``[a, b]``."""
    g = lambda s: s + 6.0 * t * model.u0(s) - x
    ga = g(a)
    for _ in range(iters):
        m = 0.5 * (a + b)
        gm = g(m)
        same = np.sign(gm) == np.sign(ga)
        a = np.where(same, m, a)
        ga = np.where(same, gm, ga)
        b = np.where(same, b, m)
        if np.all(np.abs(b - a) < 1e-15 * np.maximum(1.0, np.abs(a))):
            break
    xi = 0.5 * (a + b)
    # Newton polish, kept inside the bracket
    for _ in range(2):
        d = 1.0 + 6.0 * t * model.u0_prime(xi)
        step = np.where(np.abs(d) > 1e-12, g(xi) / np.where(d == 0, 1.0, d), 0.0)
        xn = xi - step
        xi = np.where(np.abs(step) < 1e-9, xn, xi)
    return xi


def hopf_values(model, x, t, return_mask=False, branch="unique"):
    """Single-valued Hopf solution ``u(x, t)`` on an array of ``x``.

    With ``branch="unique"`` points inside the multivalued region get
    ``nan`` (with ``return_mask`` a boolean mask of those points is
    returned as well).  ``"first"`` and ``"last"`` pick the root with the
    smallest or largest foot ``xi`` there, i.e. the branch continued from
    the left or from the right.
    """
    if branch not in ("unique", "first", "last"):
        raise ValueError("branch must be 'unique', 'first' or 'last'")
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    if t == 0:
        u = np.asarray(model.u0(flat), dtype=float)
        mask = np.zeros(flat.shape, bool)
    else:
        folds = hopf_folds(model, t)
        edges = [-np.inf] + folds + [np.inf]
        nroots = np.zeros(flat.shape, int)
        u = np.full(flat.shape, np.nan)
        pieces = list(zip(edges[:-1], edges[1:]))
        if branch == "last":
            pieces = pieces[::-1]
        for lo, hi in pieces:
            a = np.maximum(flat, lo)
            b = np.minimum(flat + 6.0 * t, hi)
            ok = a < b
            ga = a + 6 * t * model.u0(a) - flat
            gb = b + 6 * t * model.u0(b) - flat
            ok &= (np.sign(ga) != np.sign(gb)) | (ga == 0) | (gb == 0)
            if branch != "unique":
                ok &= nroots == 0
            if ok.any():
                xi = _bisect_roots(model, flat[ok], t, a[ok], b[ok])
                u[ok] = model.u0(xi)
                nroots[ok] += 1
        mask = nroots > 1
        if branch == "unique":
            u[mask] = np.nan
    u = u.reshape(x.shape)
    if return_mask:
        return u, mask.reshape(x.shape)
    return u


def hopf_solve(model, x, t):
    """Solve the characteristic equation at a single point ``(x, t)``.

    Returns
    -------
    HopfResult
    """
    x = float(x)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        v = float(model.u0(x))
        return HopfResult(v, (v,), (x,), False)
    folds = hopf_folds(model, t)
    edges = [x] + [f for f in folds if x < f < x + 6 * t] + [x + 6 * t]
    g = lambda s: s + 6.0 * t * float(model.u0(s)) - x
    feet = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        glo, ghi = g(lo), g(hi)
        if glo == 0:
            feet.append(lo)
        elif glo * ghi < 0:
            feet.append(brentq(g, lo, hi, xtol=1e-15, rtol=1e-15))
    if not feet and g(edges[-1]) == 0:
        feet.append(edges[-1])
    if not feet:
        raise RuntimeError(f"no Hopf root bracketed in [{x}, {x + 6 * t}]")
    feet = sorted(set(feet))
    vals = tuple(float(model.u0(f)) for f in feet)
    blow = any(abs(1.0 + 6.0 * t * float(model.u0_prime(f))) < 1e-6 for f in feet)
    multi = len(feet) > 1
    return HopfResult(np.nan if multi else vals[0], vals, tuple(feet), multi, blow)
