import dataclasses
from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nskresolvent.params import DEFAULT_PARAMS, PhysicalParams, validate_params
from nskresolvent.symbols import SpectralPoint
from nskresolvent.lopatinski import kinetic_symbol
from nskresolvent.mode_solver import (BoundaryData, solve_mode, solve_modes, eval_mode, residual_mode,
                                      default_stations, mass_crosscheck, synthesize_field, extend_height,
                                      extension_coefficients, EXTENSION_COEFFS, harmonic_data,
                                      gaussian_bump, ZeroFrequency)
from nskresolvent.sampling import random_draws

P = validate_params(DEFAULT_PARAMS)
PT = SpectralPoint(2.0, (1.0,))

# Independent brute-force interface solve (modal unknowns, dense linear algebra),
# dim 3, mu+ 1.3, nu+ 2.1, kappa+ 0.7, mu- 0.9, rho+ 1, rho- 2.3, sigma 0.8,
# lam = 1.7 + 0.9i, xi' = (0.8, -0.5), h = (1 + 0.5i, -0.3 + 0.2i), H = 0.7 - 0.2i
P3 = validate_params(PhysicalParams(mu_plus=1.3, nu_plus=2.1, kappa_plus=0.7, mu_minus=0.9,
                                    rho_plus=1.0, rho_minus=2.3, sigma=0.8, dim=3))
FROZEN = {
    "beta_plus": [-0.012314011642797707 + 0.007201798036262992j, 0.0076962572767485665 - 0.00450112377266437j,
                  -0.01667006913043224 - 0.052474050303774895j],
    "gamma_plus": [0.48508935011564924 - 0.20833561049708435j, -0.3031808438222808 + 0.1302097565606777j,
                   0.24080011353753542 + 0.7579906941031207j],
    "alpha_plus": [-0.5364977792898342 - 0.2908037667161222j, 0.17272785683756897 - 0.09001870390938937j,
                   0.09631535358951407 + 0.030965214826138454j],
    "beta_minus": [0.2569508646111452 + 0.08576647829166485j, -0.16059429038196574 - 0.05360404893229054j,
                   0.1011399172458136 - 0.3030087010758969j],
    "alpha_minus": [0.4635022207101663 + 0.20919623328387787j, -0.1272721431624307 + 0.10998129609061068j,
                    -0.0780099871979975 - 0.009657488729104047j],
    "gamma_minus": [1.0840440248318501 - 1.0339265882072892j],
}


@pytest.mark.parametrize("route", ["table", "elimination"])
def test_against_frozen_brute_force(route):
    sol = solve_mode(P3, SpectralPoint(1.7 + 0.9j, (0.8, -0.5)),
                     BoundaryData((1 + 0.5j, -0.3 + 0.2j), H_hat=0.7 - 0.2j), route=route)
    for k, want in FROZEN.items():
        got = np.atleast_1d(getattr(sol, k))
        want = np.asarray(want)
        assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want)), k


def test_zero_data_zero_solution():
    sol = solve_mode(P, PT, BoundaryData((0.0,), H_hat=0.0))
    for k in ("alpha_plus", "beta_plus", "gamma_plus", "alpha_minus", "beta_minus"):
        assert np.all(getattr(sol, k) == 0)
    assert sol.gamma_minus == 0 and sol.H0 == 0


def test_default_point_interface_residuals():
    sol = solve_mode(P, PT, BoundaryData((1.0,), H_hat=0.0))
    rep = residual_mode(sol)
    assert max(rep.interface().values()) <= 1e-10
    assert max(rep.bulk().values()) <= 1e-9


def test_given_d_kinetic_relation():
    sol = solve_mode(P, PT, BoundaryData((0.0,), d_hat=1.0))
    K = complex(kinetic_symbol(P, sol.S))
    assert abs(sol.H0 - 1 / (2.0 + K)) <= 1e-14
    # lam H - (rho- u_N-(0) - rho+ u_N+(0))/(rho- - rho+) = d
    sol = solve_mode(P, PT, BoundaryData((1.0,), d_hat=1.0))
    f = eval_mode(sol, 0.0)
    un_p, un_m = f["u_plus"][..., -1], f["u_minus"][..., -1]
    kin = 2.0 * sol.H0 - (2.0 * un_m - 1.0 * un_p) / (2.0 - 1.0) - 1.0
    assert abs(kin) <= 1e-10
    assert residual_mode(sol).relative["interface:kinetic"] <= 1e-10


def test_construction_invariants():
    for d in random_draws(30, seed=5):
        sol = solve_mode(d.params, d.point, BoundaryData(d.h, H_hat=d.H, d_hat=d.d), route="elimination")
        S = sol.S
        ix = 1j * np.asarray(S.xi)
        n1 = d.params.dim - 1
        t1, t2, Bp = complex(S.t1), complex(S.t2), complex(S.B_plus)
        # tangential beta, gamma are fixed multiples of the normal ones
        assert np.allclose(sol.beta_plus[:n1], -(ix / t1) * sol.beta_N_plus, rtol=1e-15, atol=0)
        assert np.allclose(sol.gamma_plus[:n1], -(ix / t2) * sol.gamma_N_plus, rtol=1e-15, atol=0)
        # divergence-free combination of amplitudes
        terms = [ix @ sol.alpha_plus[:n1], -ix @ sol.beta_plus[:n1], -ix @ sol.gamma_plus[:n1],
                 -Bp * sol.alpha_plus[-1], Bp * sol.beta_plus[-1], Bp * sol.gamma_plus[-1]]
        assert abs(sum(terms)) <= 1e-10 * sum(abs(t) for t in terms)
        # Neumann condition on the density amplitudes
        A2 = float(S.A)**2
        a, b = (t1**2 - A2) * sol.beta_N_plus, (t2**2 - A2) * sol.gamma_N_plus
        assert abs(a + b) <= 1e-10 * (abs(a) + abs(b))


def test_eval_mode_decay_and_interface_values():
    sol = solve_mode(P, SpectralPoint(1 + 1j, (0.7,)), BoundaryData((0.5 - 0.2j,), H_hat=0.3))
    S = sol.S
    rmin = min(float(np.real(r)) for r in (S.t1, S.t2, S.B_plus, S.B_minus, S.A))
    far = 1e3 / rmin
    fp, fm = eval_mode(sol, far), eval_mode(sol, -far)
    assert np.all(np.abs(fp["u_plus"]) < 1e-200) and np.all(np.abs(fm["u_minus"]) < 1e-200)
    f0 = eval_mode(sol, 0.0)
    assert abs(f0["u_minus"][0] - f0["u_plus"][0] - (0.5 - 0.2j)) <= 1e-10
    f1 = eval_mode(sol, 0.0, order=1)
    assert abs(f1["rho_plus"]) <= 1e-10 * np.max(np.abs(eval_mode(sol, default_stations(sol)[0])["rho_plus"]))


def test_incompressibility_at_stations():
    sol = solve_mode(P, SpectralPoint(3 - 1j, (0.4,)), BoundaryData((1.0,), H_hat=0.5))
    xm = default_stations(sol)[1]
    f0, f1 = eval_mode(sol, xm), eval_mode(sol, xm, 1)
    div = 1j * 0.4 * f0["u_minus"][..., 0] + f1["u_minus"][..., 1]
    assert np.max(np.abs(div)) <= 1e-10
    assert residual_mode(sol).relative["bulk:div-"] <= 1e-10


def test_perturbation_is_detected():
    sol = solve_mode(P, PT, BoundaryData((1.0,), H_hat=0.0))
    bad = dataclasses.replace(sol, beta_N_plus=sol.beta_N_plus * (1 + 1e-3),
                              beta_plus=np.r_[sol.beta_plus[:-1], sol.beta_plus[-1] * (1 + 1e-3)])
    rel = residual_mode(bad).relative
    assert max(rel["interface:normal_stress+"], rel["interface:neumann_rho"]) > 1e-5


def test_routes_agree_when_well_conditioned():
    for d in random_draws(30, seed=9, regimes=("compact",)):
        data = BoundaryData(d.h, H_hat=d.H, d_hat=d.d)
        a = solve_mode(d.params, d.point, data, route="table")
        b = solve_mode(d.params, d.point, data, route="elimination")
        if b.condition > 1e6:
            continue
        for k in ("alpha_plus", "beta_plus", "gamma_plus", "alpha_minus", "beta_minus"):
            x, y = getattr(a, k), getattr(b, k)
            assert np.max(np.abs(x - y)) <= 1e-9 * max(np.max(np.abs(x)), 1e-300)


def test_mass_crosscheck():
    sol = solve_mode(P, SpectralPoint(0.5 + 2j, (1.5,)), BoundaryData((1.0,), H_hat=1.0))
    assert mass_crosscheck(sol) <= 1e-10


def test_vectorized_matches_scalar():
    lam = np.array([1 + 1j, 2.0, 0.3 - 0.5j])
    xi = np.array([[0.5], [1.0], [2.0]])
    h = np.array([[1.0], [0.5j], [-1.0]])
    H = np.array([0.2, 0.0, 1.0])
    out = solve_modes(P, lam, xi, h, H=H)
    for k in range(3):
        s = solve_mode(P, SpectralPoint(lam[k], xi[k]), BoundaryData(tuple(h[k]), H_hat=H[k]))
        assert np.allclose(out["alpha_plus"][k], s.alpha_plus, rtol=1e-14, atol=1e-300)
        assert out["H0"][k] == pytest.approx(s.H0)


def test_zero_frequency_rejected():
    with pytest.raises(ZeroFrequency):
        solve_mode(P, SpectralPoint(1.0, (0.0,)), BoundaryData((1.0,), H_hat=0.0))


def test_conflicting_data_rejected():
    with pytest.raises(ValueError):
        solve_mode(P, PT, BoundaryData((1.0,), H_hat=1.0, d_hat=1.0))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_residuals_property(seed):
    d = random_draws(1, seed=seed)[0]
    sol = solve_mode(d.params, d.point, BoundaryData(d.h, H_hat=d.H, d_hat=d.d))
    assert residual_mode(sol).max_relative <= 1e-9


def test_linearity():
    a = solve_mode(P, PT, BoundaryData((1.0,), H_hat=0.5))
    b = solve_mode(P, PT, BoundaryData((2.0j,), H_hat=-1.0))
    c = solve_mode(P, PT, BoundaryData((1.0 + 2.0j,), H_hat=-0.5))
    for k in ("alpha_plus", "beta_plus", "gamma_plus", "alpha_minus", "beta_minus"):
        assert np.allclose(getattr(a, k) + getattr(b, k), getattr(c, k), rtol=1e-13, atol=1e-15)


# ---------------------------------------------------------------- fields

def _single_harmonic(lam, nx, box=2 * np.pi, k=1):
    h = harmonic_data(2, nx, k=k, box=box)
    g = harmonic_data(2, nx, k=k, box=box, which="scalar")
    xs = np.array([0.1, 1.0])
    fs = synthesize_field(P, lam, h, d=0.5 * g, box=box, x_stations=(xs, -xs))
    return fs, xs


def test_single_harmonic_equals_single_mode():
    lam, box = 1.5, 2 * np.pi
    fs, xs = _single_harmonic(lam, 16, box)
    x = fs.x_prime[0]
    q = 2 * np.pi / box
    ref = 0
    for sgn in (1, -1):
        sol = solve_mode(P, SpectralPoint(lam, (sgn * q,)), BoundaryData((0.5,), d_hat=0.25))
        ref = ref + eval_mode(sol, xs)["u_plus"][..., None] * np.exp(1j * sgn * q * x)
    got = fs.u_plus
    assert np.max(np.abs(got - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_grid_refinement_invariant():
    a, _ = _single_harmonic(0.7 + 0.4j, 16)
    b, _ = _single_harmonic(0.7 + 0.4j, 32)
    assert np.max(np.abs(a.u_plus - b.u_plus[..., ::2])) <= 1e-12 * np.max(np.abs(a.u_plus))
    assert np.max(np.abs(a.H - b.H[::2])) <= 1e-12 * np.max(np.abs(a.H))


def test_real_data_real_fields():
    rng = np.random.default_rng(0)
    h = rng.normal(size=(1, 32))
    d = rng.normal(size=32)
    fs = synthesize_field(P, 2.0, h - h.mean(), d=d - d.mean())
    assert fs.imag_leakage <= 1e-12
    p3 = validate_params(DEFAULT_PARAMS.replace(dim=3))
    g = gaussian_bump(3, 12)
    fs = synthesize_field(p3, 1.0, np.stack([g, -g]), H=g)
    assert fs.imag_leakage <= 1e-12


def test_field_manifest_echo():
    fs, _ = _single_harmonic(1.0, 8)
    assert fs.manifest["lambda"] is not None and fs.box == pytest.approx(2 * np.pi)


# ---------------------------------------------------------------- height extension

def test_extension_coefficients_exact():
    a = extension_coefficients(4)
    assert a == (Fraction(10), Fraction(-20), Fraction(15), Fraction(-4))
    assert sum(a) == 1
    assert sum(aj * -(j + 1) for j, aj in enumerate(a)) == 1
    assert EXTENSION_COEFFS == (10, -20, 15, -4)


def test_extension_rejects_bad_coefficients():
    with pytest.raises(ValueError):
        extend_height(np.ones(8), a_coeffs=(1, 0, 0, 0))


def test_extension_sampled_derivatives():
    # one-sided 10-point differences from sampled values; in double precision
    # the third derivative is resolved to about 1e-5 at best
    x = np.arange(32) * 2 * np.pi / 32
    ext = extend_height(np.cos(x) + 0.3 * np.sin(2 * x) + 0.5)
    h, npts = 5e-3, 10
    nodes = np.arange(npts)
    V = np.vander(nodes, increasing=True).T.astype(float)
    for k in range(4):
        rhs = np.zeros(npts)
        rhs[k] = math.factorial(k)
        w = np.linalg.solve(V, rhs)
        up = sum(wj * ext(j * h) for j, wj in zip(nodes, w)) / h**k
        dn = sum(wj * ext(-j * h) for j, wj in zip(nodes, w)) / (-h)**k
        exact = ext.derivative(0.0, k)
        scale = np.max(np.abs(exact))
        assert np.max(np.abs(up - exact)) <= 1e-5 * scale
        assert np.max(np.abs(dn - exact)) <= 1e-5 * scale


def test_extension_values_continuous():
    x = np.arange(16) * 2 * np.pi / 16
    ext = extend_height(np.sin(x))
    assert np.allclose(ext(0.0), np.sin(x), atol=1e-14)
    assert np.allclose(ext(-1e-300), np.sin(x), atol=1e-14)
