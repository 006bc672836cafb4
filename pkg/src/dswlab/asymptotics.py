"""Asymptotic descriptions of the small-dispersion KdV solution.

* Hopf solution outside the Whitham zone.
* Modulated elliptic (theta-function) solution inside it.
* Small-amplitude limit of the elliptic solution near the leading edge.
* Painleve-II multiscale solution in an ``eps^(2/3)`` layer around the
  leading edge.
* A composite that patches the multiscale solution in between the Hopf and
  elliptic pieces.

All evaluators take arrays of ``x`` and return arrays of ``u``.
"""

from dataclasses import dataclass

import numpy as np

from .initial_data import hopf_values
from .painleve2 import default_solution, hm_eval
from .specfun import S_CUTOFF, agm_KE, log_theta3_d2, nome
from .whitham import WhithamTriple, solve_leading_edge, solve_zone

__all__ = [
    "EllipticSolutionParams",
    "MultiscaleParams",
    "elliptic_profile",
    "elliptic_params",
    "elliptic_solution",
    "elliptic_hopf_solution",
    "small_amplitude_solution",
    "multiscale_params",
    "multiscale_solution",
    "amplitude",
    "composite_solution",
    "hopf_solution",
]

ORDERS = ("one_third", "two_thirds")


@dataclass(frozen=True)
class EllipticSolutionParams:
    """Modulation data of the elliptic solution at one point."""

    triple: WhithamTriple
    q: float
    Omega: float
    nome: float


@dataclass(frozen=True)
class MultiscaleParams:
    """Stretched variables, amplitude and phase of the multiscale solution."""

    y: np.ndarray
    z: np.ndarray
    a: np.ndarray
    psi: np.ndarray
    order: str


def hopf_solution(model, x, t, epsilon=None):
    """Single-valued Hopf solution (``nan`` where it is multivalued)."""
    return hopf_values(model, np.asarray(x, dtype=float), t)


def _hopf_outer(model, x, t, zone):
    """Hopf values outside the zone, on the branch continued from that side."""
    u = np.asarray(hopf_values(model, x, t), dtype=float).copy()
    for side, branch in ((x < zone.x_minus, "first"), (x > zone.x_plus, "last")):
        fill = side & ~np.isfinite(u)
        if fill.any():
            u[fill] = hopf_values(model, x[fill], t, branch=branch)
    return u


def _elliptic_core(b1, b2, b3, q, x, t, epsilon):
    """Theta-function formula for arrays of invariants (frozen in ``x``)."""
    b1, b2, b3, q, x = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (b1, b2, b3, q, x)))
    span = b1 - b3
    s = np.minimum(np.sqrt((b2 - b3) / span), S_CUTOFF)
    K, E, ome, omem = agm_KE(s)
    alpha = -b1 + span * (1.0 - ome)
    Om = np.sqrt(span) / (2.0 * epsilon * K) * (x - 2.0 * t * (b1 + b2 + b3) - q)
    nq = np.atleast_1d(nome(s))
    d2 = np.array([log_theta3_d2(o, n) for o, n in zip(np.ravel(Om), np.ravel(nq))]).reshape(Om.shape)
    # 2 eps^2 d^2/dx^2 log theta(Omega) with dOmega/dx = sqrt(span)/(2 eps K)
    u = b1 + b2 + b3 + 2.0 * alpha + span / (2.0 * K * K) * d2
    return u, Om, nq


def elliptic_profile(triple, q, x, t, epsilon):
    """Elliptic formula at constant invariants (an exact travelling wave of KdV)."""
    u, _, _ = _elliptic_core(triple.beta1, triple.beta2, triple.beta3, q, x, t, epsilon)
    return u


def elliptic_params(model, x, t, epsilon, npts=401):
    """:class:`EllipticSolutionParams` at a single ``x`` inside the zone."""
    zone = solve_zone(model, t, npts)
    b1, b2, b3, q = (float(v) for v in zone.interpolate(float(x)))
    _, Om, nq = _elliptic_core(b1, b2, b3, q, x, t, epsilon)
    return EllipticSolutionParams(zone.triple(x), q, float(np.ravel(Om)[0]), float(nq[0]))


def elliptic_solution(model, x, t, epsilon, npts=401):
    """Modulated elliptic solution on ``[x^-(t), x^+(t)]`` (``nan`` outside).

    The invariants come from the hodograph solve; the second ``x``
    derivative of ``log theta`` is taken at frozen invariants.
    """
    x = np.asarray(x, dtype=float)
    zone = solve_zone(model, t, npts)
    out = np.full(x.shape, np.nan)
    inside = zone.contains(x)
    if inside.any():
        b1, b2, b3, q = zone.interpolate(x[inside])
        out[inside] = _elliptic_core(b1, b2, b3, q, x[inside], t, epsilon)[0]
    return out


def elliptic_hopf_solution(model, x, t, epsilon, npts=401):
    """Elliptic solution inside the zone and Hopf outside it."""
    x = np.asarray(x, dtype=float)
    u = elliptic_solution(model, x, t, epsilon, npts)
    out = ~np.isfinite(u)
    if out.any():
        u[out] = _hopf_outer(model, x[out], t, solve_zone(model, t, npts))
    return u


def small_amplitude_solution(model, x, t, epsilon):
    """Small-amplitude limit of the elliptic solution for ``x >= x^-(t)``.

    ``u + Delta + 2 delta cos(phase/eps) + delta^2 (cos(2 phase/eps) - 1)/(2(u-v))``
    with ``Delta = (x - x^-)/(6t + f_-'(u))``, ``|delta| = sqrt((x - x^-)/c)``
    and ``phase = phi0 + 2 sqrt(u-v) (x - x^-)``.  ``delta`` carries the
    sign of the multiscale amplitude (negative), which is what makes this
    limit agree with the theta-function formula.
    """
    e = solve_leading_edge(model, t)
    x = np.asarray(x, dtype=float)
    dx = x - e.x_minus
    if np.any(dx < 0):
        raise ValueError("small-amplitude solution needs x >= x^-(t)")
    uv = e.u - e.v
    delta = -np.sqrt(dx / e.c)
    phase = (e.phi0 + 2.0 * np.sqrt(uv) * dx) / epsilon
    return (e.u + dx / e.fp + 2.0 * delta * np.cos(phase)
            + delta**2 * (np.cos(2.0 * phase) - 1.0) / (2.0 * uv))


def amplitude(edge, y, hm=None):
    """Signed amplitude ``a(y)`` and ``z(y)`` at a leading-edge state.

    ``a = 4 6^(-1/3) v_t^(1/3) (u-v)^(1/6) A(z)``, ``z = (v_t/(6(u-v)))^(1/3) y``
    with real cube roots (``v_t < 0``, so ``a < 0`` and ``z`` has the
    opposite sign of ``y``).
    """
    hm = hm or default_solution()
    uv = edge.u - edge.v
    y = np.asarray(y, dtype=float)
    z = np.cbrt(edge.v_t / (6.0 * uv)) * y
    a = 4.0 * 6.0 ** (-1.0 / 3.0) * np.cbrt(edge.v_t) * uv ** (1.0 / 6.0) * hm_eval(hm, z)
    return a, z


def multiscale_params(model, x, t, epsilon, order="one_third", hm=None):
    """:class:`MultiscaleParams` on an array of ``x``."""
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}")
    e = solve_leading_edge(model, t)
    x = np.asarray(x, dtype=float)
    y = (x - e.x_minus) / epsilon ** (2.0 / 3.0)
    a, z = amplitude(e, y, hm)
    psi = e.phi0 + 2.0 * epsilon ** (2.0 / 3.0) * y * np.sqrt(e.u - e.v)
    return MultiscaleParams(y, np.asarray(z), np.asarray(a), psi, order)


def multiscale_solution(model, x, t, epsilon, order="one_third", hm=None):
    """Painleve-II multiscale solution near the leading edge.

    ``order="one_third"`` keeps ``u + eps^(1/3) a cos(psi/eps)``;
    ``"two_thirds"`` adds
    ``eps^(2/3) [a^2 (cos(2 psi/eps) - 1)/(8(u-v)) + y/(6t + f_-'(u))]``.
    """
    e = solve_leading_edge(model, t)
    p = multiscale_params(model, x, t, epsilon, order, hm)
    u = e.u + epsilon ** (1.0 / 3.0) * p.a * np.cos(p.psi / epsilon)
    if order == "two_thirds":
        uv = e.u - e.v
        u = u + epsilon ** (2.0 / 3.0) * (p.a**2 * (np.cos(2.0 * p.psi / epsilon) - 1.0) / (8.0 * uv)
                                          + p.y / e.fp)
    return u


def composite_solution(model, x, t, epsilon, zone, order="one_third", npts=401):
    """Hopf, multiscale, elliptic, Hopf from left to right.

    ``zone`` is a ZoneBounds-like object with ``left`` and ``right``: the
    multiscale solution is used on ``[left, right]``, the elliptic solution
    from ``right`` to ``x^+``, and the Hopf solution elsewhere.
    """
    x = np.asarray(x, dtype=float)
    wz = solve_zone(model, t, npts)
    u = _hopf_outer(model, x, t, wz)
    ell = (x > zone.right) & wz.contains(x)
    if ell.any():
        u[ell] = elliptic_solution(model, x[ell], t, epsilon, npts)
    mid = (x >= zone.left) & (x <= zone.right)
    if mid.any():
        u[mid] = multiscale_solution(model, x[mid], t, epsilon, order)
    return u
