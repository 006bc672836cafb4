from types import SimpleNamespace

import numpy as np
import pytest

from dswlab.asymptotics import (
    amplitude,
    composite_solution,
    elliptic_params,
    elliptic_profile,
    elliptic_solution,
    elliptic_hopf_solution,
    hopf_solution,
    multiscale_params,
    multiscale_solution,
    small_amplitude_solution,
)
from dswlab.initial_data import hopf_values
from dswlab.painleve2 import default_solution, hm_eval
from dswlab.specfun import agm_KE
from dswlab.whitham import WhithamTriple, solve_leading_edge

T = 0.4


@pytest.fixture(scope="module")
def edge(model):
    return solve_leading_edge(model, T)


def _spectral_derivs(u, period):
    n = u.size
    k = 2 * np.pi * np.fft.fftfreq(n, period / n)
    U = np.fft.fft(u)
    return np.fft.ifft(1j * k * U).real, np.fft.ifft(-1j * k**3 * U).real


def test_frozen_elliptic_is_travelling_kdv_wave(zone04):
    eps, x0 = 0.01, -2.6
    b1, b2, b3, q = (float(v) for v in zone04.interpolate(x0))
    tr = WhithamTriple(b1, b2, b3)
    K = agm_KE(np.sqrt((b2 - b3) / (b1 - b3)))[0]
    period = 2 * eps * K / np.sqrt(b1 - b3)
    x = x0 + period * np.arange(512) / 512
    u = elliptic_profile(tr, q, x, T, eps)
    ux, uxxx = _spectral_derivs(u, period)
    # frozen invariants: u depends on x - 2 t (b1+b2+b3) only
    res = -2 * (b1 + b2 + b3) * ux + 6 * u * ux + eps**2 * uxxx
    assert np.abs(res).max() < 1e-6 * np.abs(6 * u * ux).max()


def test_frozen_elliptic_period(zone04):
    eps, x0 = 0.02, -2.5
    b1, b2, b3, q = (float(v) for v in zone04.interpolate(x0))
    tr = WhithamTriple(b1, b2, b3)
    K = agm_KE(np.sqrt((b2 - b3) / (b1 - b3)))[0]
    period = 2 * eps * K / np.sqrt(b1 - b3)
    x = np.linspace(x0, x0 + period, 7)
    np.testing.assert_allclose(elliptic_profile(tr, q, x + period, T, eps),
                               elliptic_profile(tr, q, x, T, eps), atol=1e-12)


def test_elliptic_params_phase(model, zone04):
    eps, x = 0.01, -2.7
    p = elliptic_params(model, x, T, eps)
    tr = p.triple
    K = agm_KE(tr.s)[0]
    om = np.sqrt(tr.beta1 - tr.beta3) / (2 * eps * K) * (x - 2 * T * tr.beta_sum - p.q)
    assert abs(p.Omega - om) < 1e-9 * max(1.0, abs(om))
    assert 0 < p.nome < 1


def test_elliptic_nan_outside_and_hopf_fill(model, zone04):
    x = np.array([zone04.x_minus - 0.5, -2.6, zone04.x_plus + 0.5])
    u = elliptic_solution(model, x, T, 0.02)
    assert np.isnan(u[0]) and np.isnan(u[2]) and np.isfinite(u[1])
    uh = elliptic_hopf_solution(model, x, T, 0.02)
    np.testing.assert_allclose(uh[[0, 2]], hopf_values(model, x[[0, 2]], T), rtol=0, atol=0)
    assert uh[1] == u[1]


def test_elliptic_near_leading_edge_collapses_to_hopf(model, edge):
    # amplitude vanishes like sqrt(x - x^-)
    x = edge.x_minus + np.array([1e-6, 1e-5])
    u = elliptic_solution(model, x, T, 0.01)
    assert np.all(np.abs(u - edge.u) < 3 * np.sqrt((x - edge.x_minus) / edge.c) + 1e-6)


def test_small_amplitude_at_edge(model, edge):
    assert small_amplitude_solution(model, [edge.x_minus], T, 0.01)[0] == edge.u
    with pytest.raises(ValueError):
        small_amplitude_solution(model, [edge.x_minus - 0.1], T, 0.01)


def test_small_amplitude_matches_elliptic(model, edge):
    eps = 0.01
    ds = np.array([2.5e-3, 5e-3, 1e-2, 2e-2, 4e-2])
    diffs = []
    for d in ds:
        x = edge.x_minus + d * (1 + np.linspace(-0.1, 0.1, 201))
        diffs.append(np.abs(elliptic_solution(model, x, T, eps)
                            - small_amplitude_solution(model, x, T, eps)).max())
    diffs = np.array(diffs)
    assert np.all(diffs < ds**1.5)
    slope = np.polyfit(np.log(ds), np.log(diffs), 1)[0]
    assert slope > 1.4


def test_small_amplitude_phase_defect_quadratic(model, edge):
    # full phase minus (phi0 + phi2) is O((x - x^-)^2) (delta^2 ~ x - x^-)
    eps = 0.01
    uv = edge.u - edge.v
    defect = []
    ds = np.array([5e-3, 1e-2, 2e-2])
    for d in ds:
        p = elliptic_params(model, edge.x_minus + d, T, eps)
        defect.append(2 * np.pi * p.Omega * eps - (edge.phi0 + 2 * np.sqrt(uv) * d))
    defect = np.abs(defect)
    order = np.polyfit(np.log(ds), np.log(defect), 1)[0]
    assert 1.7 < order < 2.3
    assert np.all(defect < ds**2)


def test_multiscale_at_edge(model, edge):
    eps = 0.01
    A0 = hm_eval(default_solution(), 0.0)
    assert abs(A0 - 0.36706) < 1e-5
    ref = edge.u + eps ** (1 / 3) * 4 * 6 ** (-1 / 3) * np.cbrt(edge.v_t) \
        * (edge.u - edge.v) ** (1 / 6) * A0 * np.cos(edge.phi0 / eps)
    assert abs(multiscale_solution(model, [edge.x_minus], T, eps)[0] - ref) < 1e-14


def test_multiscale_params_signs(model, edge):
    x = edge.x_minus + np.array([-0.05, 0.05])
    p = multiscale_params(model, x, T, 0.01)
    assert p.z[0] > 0 > p.z[1]
    assert np.all(p.a < 0)
    np.testing.assert_allclose(p.y, (x - edge.x_minus) / 0.01 ** (2 / 3))
    with pytest.raises(ValueError):
        multiscale_params(model, x, T, 0.01, order="cubic")


def test_multiscale_decays_on_hopf_side(model, edge):
    eps = 0.01
    x = edge.x_minus - np.array([0.4, 0.8, 1.6])
    corr = np.abs(multiscale_solution(model, x, T, eps) - edge.u)
    assert corr[2] < 1e-12
    assert corr[0] > corr[1] > corr[2]


def test_multiscale_two_thirds_correction(model, edge):
    eps = 0.01
    x = edge.x_minus + np.linspace(-0.05, 0.05, 11)
    p = multiscale_params(model, x, T, eps)
    u1 = multiscale_solution(model, x, T, eps)
    u2 = multiscale_solution(model, x, T, eps, order="two_thirds")
    extra = eps ** (2 / 3) * (p.a**2 * (np.cos(2 * p.psi / eps) - 1) / (8 * (edge.u - edge.v))
                              + p.y / edge.fp)
    np.testing.assert_allclose(u2 - u1, extra, atol=1e-15)


def test_amplitude_matches_small_amplitude_delta(model, edge):
    d = 0.01
    target = np.sqrt(d / edge.c)
    errs = []
    for eps in (1e-3, 1e-4, 1e-5):
        p = multiscale_params(model, [edge.x_minus + d], T, eps)
        errs.append(abs(eps ** (1 / 3) * abs(p.a[0]) / 2 - target) / target)
    assert errs[-1] < 1e-3
    assert errs[-1] < errs[0]


def test_amplitude_ode_residual(edge):
    # 4(u-v) a'' - (2/3) v_t y a = a^3/2 with k = 0
    uv = edge.u - edge.v
    kappa = np.cbrt(edge.v_t / (6 * uv))
    y = np.linspace(-5, 5, 41) / abs(kappa)
    h = 1e-3
    a, _ = amplitude(edge, y)
    ap, _ = amplitude(edge, y + h)
    am, _ = amplitude(edge, y - h)
    ayy = (ap - 2 * a + am) / h**2
    res = 4 * uv * ayy - 2 / 3 * edge.v_t * y * a - a**3 / 2
    assert np.abs(res).max() < 1e-6


def test_painleve_reduction_exact(edge):
    # with analytic A'' the reduced equation holds to solver precision
    hm = default_solution()
    uv = edge.u - edge.v
    kappa = np.cbrt(edge.v_t / (6 * uv))
    C = 4 * 6 ** (-1 / 3) * np.cbrt(edge.v_t) * uv ** (1 / 6)
    y = np.linspace(-5, 5, 41) / abs(kappa)
    z = kappa * y
    a = C * hm_eval(hm, z)
    ayy = C * kappa**2 * hm_eval(hm, z, deriv=2)
    res = 4 * uv * ayy - 2 / 3 * edge.v_t * y * a - a**3 / 2
    assert np.abs(res).max() < 1e-8


def test_composite_pieces(model, zone04, edge):
    eps = 0.02
    zb = SimpleNamespace(left=edge.x_minus - 0.2, right=edge.x_minus + 0.1)
    x = np.array([-10.0, zb.left - 0.01, edge.x_minus, zb.right + 0.01, zone04.x_plus + 0.1])
    u = composite_solution(model, x, T, eps, zb)
    assert u[0] == hopf_solution(model, [-10.0], T)[0]
    assert u[1] == hopf_values(model, x[1:2], T)[0]
    assert u[2] == multiscale_solution(model, x[2:3], T, eps)[0]
    assert u[3] == elliptic_solution(model, x[3:4], T, eps)[0]
    # just past x^+ the Hopf map is still multivalued: right-hand branch
    assert np.isnan(hopf_values(model, x[4:5], T)[0])
    assert u[4] == hopf_values(model, x[4:5], T, branch="last")[0]


def test_composite_seam_jumps_bounded(model, edge):
    eps = 0.02
    zb = SimpleNamespace(left=edge.x_minus - 0.2, right=edge.x_minus + 0.1)
    for seam, other in ((zb.left, hopf_values), (zb.right, elliptic_solution)):
        xs = seam + np.array([-1e-9, 1e-9])
        u = composite_solution(model, xs, T, eps, zb)
        nb = seam + np.linspace(-0.05, 0.05, 101)
        gap = np.abs(multiscale_solution(model, nb, T, eps) - other(model, nb, T, *(() if other is hopf_values else (eps,))))
        assert abs(u[1] - u[0]) <= np.nanmax(gap) + 1e-8
