"""Special functions: complete elliptic integrals, Jacobi theta, Airy Ai.

Elliptic integrals use the arithmetic-geometric mean.  The theta function
is summed in the nome variable; for nomes close to one the series is
rewritten with the imaginary transformation so that the logarithmic
derivatives stay well conditioned.
"""

from decimal import Decimal, localcontext

import numpy as np

from . import kernels

__all__ = [
    "DomainError",
    "EllipticModulus",
    "agm_KE",
    "elliptic_K",
    "elliptic_E",
    "elliptic_Kprime",
    "nome",
    "theta3",
    "theta3_derivs",
    "log_theta3_d2",
    "airy_ai",
    "airy_ai_asymptotic",
    "S_CUTOFF",
]

S_CUTOFF = 1.0 - 1e-12


class DomainError(ValueError):
    """Argument outside the domain where a function is evaluated."""


def agm_KE(s, sp=None):
    """K, E and ``1 - E/K`` for modulus ``s`` by the AGM.

    Parameters
    ----------
    s : float or ndarray
        Modulus, ``0 <= s < 1``.
    sp : float or ndarray, optional
        Complementary modulus ``sqrt(1 - s**2)``.  Pass it when it is known
        more accurately than ``1 - s**2`` would give (``s`` close to one).

    Returns
    -------
    K, E, ome, ome_over_m : ndarray
        ``ome = 1 - E/K`` and ``ome_over_m = (1 - E/K)/s**2``, both computed
        without cancellation.  ``ome_over_m`` tends to 1/2 as ``s -> 0``.
    """
    s = np.asarray(s, dtype=float)
    if sp is None:
        sp = np.sqrt((1.0 - s) * (1.0 + s))
    sp = np.asarray(sp, dtype=float)
    a = np.ones(np.broadcast(s, sp).shape)
    b = sp * np.ones_like(a)
    c = s * np.ones_like(a)
    chat = np.ones_like(a)  # c_n / s
    total = 0.5 * np.ones_like(a)  # sum 2^(n-1) chat_n^2
    power = 0.5
    for _ in range(64):
        an = 0.5 * (a + b)
        bn = np.sqrt(a * b)
        cn = c * c / (4.0 * an)
        chat = chat * c / (4.0 * an)
        a, b, c = an, bn, cn
        power *= 2.0
        total = total + power * chat * chat
        if np.all(c <= 1e-17 * a):
            break
    K = np.pi / (2.0 * a)
    ome = s * s * total
    E = K * (1.0 - ome)
    return K, E, ome, total


def _check_K(s):
    s = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(s)) or np.any(s < 0) or np.any(s >= S_CUTOFF):
        raise DomainError("elliptic_K needs 0 <= s < 1 - 1e-12")
    return s


def elliptic_K(s):
    """Complete elliptic integral of the first kind, modulus ``s``.

    >>> round(float(elliptic_K(0.0)), 12) == round(np.pi / 2, 12)
    True
    """
    s = _check_K(s)
    K = agm_KE(s)[0]
    return float(K) if K.ndim == 0 else K


def elliptic_E(s):
    """Complete elliptic integral of the second kind, ``0 <= s <= 1``."""
    s = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(s)) or np.any(s < 0) or np.any(s > 1):
        raise DomainError("elliptic_E needs 0 <= s <= 1")
    one = s == 1.0
    ss = np.where(one, 0.0, s)
    E = np.where(one, 1.0, agm_KE(ss)[1])
    return float(E) if E.ndim == 0 else E


def elliptic_Kprime(s):
    """``K'(s) = K(sqrt(1 - s^2))``, evaluated as ``pi / (2 AGM(1, s))``."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0) or np.any(s > 1):
        raise DomainError("elliptic_Kprime needs 0 < s <= 1")
    a = np.ones_like(s)
    b = s.copy()
    for _ in range(64):
        a, b = 0.5 * (a + b), np.sqrt(a * b)
        if np.all(np.abs(a - b) <= 1e-16 * a):
            break
    Kp = np.pi / (2.0 * a)
    return float(Kp) if Kp.ndim == 0 else Kp


class EllipticModulus:
    """Modulus ``s`` with cached ``K``, ``E``, ``K'`` and nome.

    Parameters
    ----------
    s : float
        Modulus in ``[0, 1)``.
    sp : float, optional
        Accurate complementary modulus.
    """

    def __init__(self, s, sp=None):
        s = float(s)
        if not (0.0 <= s < S_CUTOFF):
            raise DomainError("modulus outside [0, 1 - 1e-12)")
        self.s = s
        self.s2 = s * s
        self.sp = float(np.sqrt((1 - s) * (1 + s))) if sp is None else float(sp)
        K, E, ome, omem = agm_KE(s, self.sp)
        self.K, self.E = float(K), float(E)
        self.one_minus_EK = float(ome)
        self.one_minus_EK_over_m = float(omem)
        self.Kprime = float(elliptic_Kprime(s)) if s > 0 else np.inf
        self.nome = float(np.exp(-np.pi * self.Kprime / self.K)) if s > 0 else 0.0

    def __repr__(self):
        return f"EllipticModulus(s={self.s!r})"


def nome(s, sp=None):
    """Nome ``exp(-pi K'/K)`` for modulus ``s``."""
    s = np.asarray(s, dtype=float)
    K = agm_KE(s, sp)[0]
    with np.errstate(divide="ignore"):
        Kp = elliptic_Kprime(np.where(s > 0, s, 1.0))
    q = np.where(s > 0, np.exp(-np.pi * Kp / K), 0.0)
    return float(q) if q.ndim == 0 else q


# Direct series is used for nome <= exp(-pi); above it the dual nome is smaller.
_DUAL_SWITCH = np.exp(-np.pi)


def _nterms(q, tol=1e-17):
    if q <= 0.0:
        return 0
    return int(np.ceil(np.sqrt(np.log(tol) / np.log(q)))) + 1


def _check_nome(q):
    q = float(q)
    if not (0.0 <= q < 1.0):
        raise DomainError("nome must lie in [0, 1)")
    return q


def theta3(z, q, nterms=None):
    """Jacobi theta ``sum_n q^(n^2) cos(2 pi n z)``.

    Parameters
    ----------
    z : float or array_like
    q : float
        Nome in ``[0, 1)``.
    nterms : int, optional
        Number of terms ``n = 1..nterms`` of the direct series.  By default
        the series is cut when ``q^(n^2) < 1e-17``; for ``q > exp(-pi)`` the
        transformed series is used instead, unless ``nterms`` is given.
    """
    q = _check_nome(q)
    za = np.asarray(z, dtype=float)
    if nterms is None and q > _DUAL_SWITCH:
        val = np.exp(_log_theta3_dual(za, q)[0])
    else:
        n = _nterms(q) if nterms is None else int(nterms)
        val = kernels.theta_sums(za, q, n)[0].reshape(za.shape)
    return float(val) if val.ndim == 0 else val


def theta3_derivs(z, q, nterms=None):
    """Direct series ``(theta, theta', theta'')`` with z-derivatives."""
    q = _check_nome(q)
    za = np.asarray(z, dtype=float)
    n = _nterms(q) if nterms is None else int(nterms)
    out = kernels.theta_sums(za, q, n)
    return tuple(o.reshape(za.shape) for o in out)


def _log_theta3_dual(z, q):
    """``log theta`` and its first two derivatives via the imaginary transform.

    With ``q = exp(-pi tau)``, ``theta(z) = tau^(-1/2) sum_n exp(-pi (z-n)^2 / tau)``;
    the Gaussian sum is accumulated as a log-sum-exp.
    """
    tau = -np.log(q) / np.pi
    zr = z - np.round(z)  # period one, |zr| <= 1/2
    m = int(np.ceil(np.sqrt(14.0 * tau))) + 2
    n = np.arange(-m, m + 1, dtype=float)
    d = np.subtract.outer(zr, n)
    g = -np.pi * d * d / tau
    gmax = g.max(axis=-1, keepdims=True)
    p = np.exp(g - gmax)
    ssum = p.sum(axis=-1)
    p = p / ssum[..., None]
    g1 = -2.0 * np.pi * d / tau
    mean = (p * g1).sum(axis=-1)
    var = (p * (g1 - mean[..., None]) ** 2).sum(axis=-1)
    logth = -0.5 * np.log(tau) + gmax[..., 0] + np.log(ssum)
    return logth, mean, -2.0 * np.pi / tau + var


def log_theta3_d2(z, q):
    """Second derivative of ``log theta3(z)`` in ``z``.

    Well conditioned for every nome in ``[0, 1)``.
    """
    q = _check_nome(q)
    za = np.asarray(z, dtype=float)
    if q > _DUAL_SWITCH:
        d2 = _log_theta3_dual(za, q)[2]
    else:
        t0, t1, t2 = theta3_derivs(za, q)
        d2 = t2 / t0 - (t1 / t0) ** 2
    return float(d2) if np.ndim(d2) == 0 else d2


# Ai(0) and -Ai'(0) to 40 digits.
_AI0 = Decimal("0.3550280538878172392600631860041831763980")
_AIP0 = Decimal("0.2588194037928067984051835601892039634791")
_AIRY_SWITCH = 8.0


def _airy_series(z):
    with localcontext() as ctx:
        ctx.prec = 50
        zd = Decimal(repr(float(z)))
        z3 = zd * zd * zd
        f = term_f = Decimal(1)
        g = term_g = zd
        k = 1
        while True:
            term_f = term_f * z3 / ((3 * k - 1) * (3 * k))
            term_g = term_g * z3 / ((3 * k) * (3 * k + 1))
            f += term_f
            g += term_g
            if abs(term_f) + abs(term_g) < Decimal("1e-45") and k > 3:
                break
            k += 1
        return float(_AI0 * f - _AIP0 * g)


def _airy_u(kmax):
    u = [1.0]
    for k in range(1, kmax + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    return u


_U = _airy_u(60)


def _asym_sum(terms):
    # add terms until the smallest one, then stop (optimal truncation)
    total = 0.0
    prev = np.inf
    for t in terms:
        if abs(t) > prev:
            break
        total += t
        prev = abs(t)
        if prev < 1e-18 * abs(total):
            break
    return total


def _airy_asym(z):
    if z > 0:
        zeta = 2.0 / 3.0 * z**1.5
        s = _asym_sum((-1) ** k * _U[k] / zeta**k for k in range(len(_U)))
        return np.exp(-zeta) / (2.0 * np.sqrt(np.pi) * z**0.25) * s
    x = -z
    zeta = 2.0 / 3.0 * x**1.5
    p = _asym_sum((-1) ** k * _U[2 * k] / zeta ** (2 * k) for k in range(len(_U) // 2))
    qq = _asym_sum((-1) ** k * _U[2 * k + 1] / zeta ** (2 * k + 1) for k in range((len(_U) - 1) // 2))
    ph = zeta + np.pi / 4
    return (np.sin(ph) * p - np.cos(ph) * qq) / (np.sqrt(np.pi) * x**0.25)


def airy_ai(z):
    """Airy function Ai for real ``|z| <= 50``.

    The Maclaurin series is summed in 50-digit decimal arithmetic for
    ``|z| <= 8``; outside, the standard asymptotic expansions are used.
    """
    za = np.asarray(z, dtype=float)
    if np.any(np.abs(za) > 50) or np.any(~np.isfinite(za)):
        raise DomainError("airy_ai is evaluated for |z| <= 50")
    flat = za.ravel()
    out = np.empty(flat.shape)
    for i, zi in enumerate(flat):
        out[i] = _airy_series(zi) if abs(zi) <= _AIRY_SWITCH else _airy_asym(zi)
    out = out.reshape(za.shape)
    return float(out) if out.ndim == 0 else out


def airy_ai_asymptotic(z):
    """Leading term ``exp(-2/3 z^(3/2)) / (2 sqrt(pi) z^(1/4))`` for ``z > 0``."""
    z = np.asarray(z, dtype=float)
    return np.exp(-2.0 / 3.0 * z**1.5) / (2.0 * np.sqrt(np.pi) * z**0.25)
