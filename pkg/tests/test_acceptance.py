"""Acceptance criteria, one test each; the summary hook prints PASS/FAIL lines."""

import dataclasses
from fractions import Fraction
import math
import time

import numpy as np
import pytest

import nskresolvent.lopatinski as lp
import nskresolvent.mode_solver as ms
import nskresolvent.multipliers as mp
from nskresolvent import DEFAULT_PARAMS, PhysicalParams, validate_params, characteristic_roots
from nskresolvent.lopatinski import (ScanGrid, scan_lower_bound, scan_kinetic_bound, omega3,
                                     det_route_expanded, det_route_factored, det_route_raw,
                                     m_symbols, n_symbol, lop_l, homogeneity_defect)
from nskresolvent.mode_solver import (BoundaryData, solve_mode, residual_mode, extend_height,
                                      extension_coefficients, EXTENSION_COEFFS)
from nskresolvent.multipliers import certify_classes, default_claims, ClassGrid, kernel_decay_probe
from nskresolvent.oracle import converge
from nskresolvent.sampling import random_draws, random_params, standard_test_set

TOL_RESIDUAL = 1e-9
COND_LIMIT = 1e6

BULK = {"bulk:mass+", "bulk:momentum+_N", "bulk:div-", "bulk:momentum-_N"}
INTERFACE = {"interface:normal_stress-", "interface:normal_stress+", "interface:neumann_rho"}


def _reldiff(a, b):
    return np.abs(a - b) / np.maximum(np.abs(a), np.abs(b))


def residual_sweep(draws):
    """Worst relative residual per route; elimination only where well conditioned."""
    worst_t = worst_e = 0.0
    skipped = 0
    for d in draws:
        data = BoundaryData(d.h, H_hat=d.H, d_hat=d.d)
        rt = residual_mode(solve_mode(d.params, d.point, data, route="table"))
        worst_t = max(worst_t, rt.max_relative)
        se = solve_mode(d.params, d.point, data, route="elimination")
        if se.condition <= COND_LIMIT:
            worst_e = max(worst_e, residual_mode(se).max_relative)
        else:
            skipped += 1
    return worst_t, worst_e, skipped


@pytest.mark.criterion(1, "closed-form exactness, 200 draws")
def test_c01_closed_form_exactness(criterion):
    t0 = time.perf_counter()
    draws = random_draws(200, seed=0)
    assert {d.regime for d in draws} == {"delta1", "compact", "delta2"}
    assert any(d.d is not None for d in draws) and any(d.H is not None for d in draws)
    # every equation is present in the report
    d = draws[1]
    rep = residual_mode(solve_mode(d.params, d.point, BoundaryData(d.h, d_hat=d.d)))
    assert BULK <= set(rep.relative) and INTERFACE <= set(rep.relative)
    assert "interface:kinetic" in rep.relative
    worst_t, worst_e, skipped = residual_sweep(draws)
    dt = time.perf_counter() - t0
    criterion(f"table {worst_t:.1e}, elimination {worst_e:.1e} ({skipped} above cond {COND_LIMIT:g})")
    assert worst_t <= TOL_RESIDUAL
    assert worst_e <= TOL_RESIDUAL
    assert dt < 10


@pytest.mark.criterion(2, "oracle equivalence, 20-point set")
def test_c02_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    pts = standard_test_set()
    assert len(pts) == 20
    worst, demonstrated, failures = 0.0, 0, []
    for i, d in enumerate(pts):
        rep = converge(d.params, d.point, BoundaryData(d.h, H_hat=d.H, d_hat=d.d),
                       ns=(48, 96, 192), tol=1e-6)
        worst = max(worst, rep.max_error)
        # a doubling counts as a demonstration when the coarser error sits above the floor
        errs = [e for _, e in rep.table]
        demonstrated += any(math.isfinite(errs[k]) and errs[k] > 1e-10 and errs[k] / errs[k + 1] > 10
                            for k in range(len(errs) - 1))
        if not rep.converged:
            failures.append((i, rep.worst, rep.max_error, rep.table))
    dt = time.perf_counter() - t0
    criterion(f"max error {worst:.1e}, {demonstrated} points with pre-floor ratio > 10")
    assert not failures, failures
    assert worst <= 1e-6
    assert demonstrated >= 1
    assert dt < 120


def _random_symbol_points(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    per = 200
    while sum(len(S.lam) for _, S in out) < n:
        p = random_params(rng)
        m = min(per, n - sum(len(S.lam) for _, S in out))
        mod = 10**rng.uniform(-2, 2, m)
        arg = rng.uniform(-2 * math.pi / 3, 2 * math.pi / 3, m)
        r = 10**rng.uniform(-3, 2, m)
        dirs = rng.normal(size=(m, p.dim - 1))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        xi = (r * np.sqrt(mod))[:, None] * dirs
        out.append((p, characteristic_roots(p, (mod * np.exp(1j * arg), xi), check_degenerate=False)))
    return out


@pytest.mark.criterion(3, "determinant consistency, 1e4 points")
def test_c03_determinant_consistency(criterion):
    t0 = time.perf_counter()
    blocks = _random_symbol_points(10_000, seed=3)
    assert sum(len(S.lam) for _, S in blocks) == 10_000
    worst = {"det": 0.0, "det_raw": 0.0, "m1_n": 0.0, "m2_n": 0.0}
    for p, S in blocks:
        n_def = n_symbol(S)
        m1, m2 = m_symbols(p, S)
        d444 = det_route_expanded(p, S)
        dfac = p.rho_plus * S.lam * (S.t1 - S.t2) * lop_l(p, S, n=n_def)
        worst["det"] = max(worst["det"], _reldiff(d444, dfac).max())
        worst["det_raw"] = max(worst["det_raw"], _reldiff(det_route_raw(p, S), det_route_factored(p, S)).max())
        worst["m1_n"] = max(worst["m1_n"], _reldiff(m1 / (S.t1 * (S.t1 + S.B_plus)), n_def).max())
        worst["m2_n"] = max(worst["m2_n"], _reldiff(m2 / (S.t2 * (S.t2 + S.B_plus)), n_def).max())
    dt = time.perf_counter() - t0
    criterion(", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert max(worst.values()) <= 1e-10
    assert dt < 5


@pytest.mark.criterion(4, "Lopatinski lower bound")
def test_c04_lopatinski_lower_bound(criterion):
    t0 = time.perf_counter()
    p = validate_params(DEFAULT_PARAMS)
    grid = ScanGrid(lam_min=1e-3, lam_max=1e3, n_mod=61, n_arg=31, A_min=1e-3, A_max=1e3, n_A=61,
                    epsilon=math.pi / 3)
    rep = scan_lower_bound(p, grid)
    s = rep.summary
    rng = np.random.default_rng(4)
    lam = 10**rng.uniform(-3, 3, 2000) * np.exp(1j * rng.uniform(-2 * math.pi / 3, 2 * math.pi / 3, 2000))
    xi = 10**rng.uniform(-3, 3, (2000, 1))
    hom = float(homogeneity_defect(p, lam, xi).max())
    dt = time.perf_counter() - t0
    criterion(f"{s['points']} points, inf {s['infimum']:.4g}, refined {s['refined_infimum']:.4g}, "
              f"change {s['refinement_change']:.1%}, homogeneity {hom:.1e}")
    assert s["points"] >= 100_000
    assert s["infimum"] > 0 and s["near_zero_points"] == 0
    assert s["refinement_change"] < 0.05
    assert hom <= 1e-10 and s["homogeneity_defect"] <= 1e-10
    assert rep.passed
    assert dt < 60


@pytest.mark.criterion(5, "kinetic symbol bound and omega3 limit")
def test_c05_kinetic_symbol(criterion):
    t0 = time.perf_counter()
    p = validate_params(PhysicalParams(mu_plus=1.0, nu_plus=2.0, kappa_plus=1.0, mu_minus=1.0,
                                       rho_plus=1.0, rho_minus=2.0, sigma=1.0))
    assert omega3(p) == pytest.approx(2.5, rel=1e-14)
    rep = scan_kinetic_bound(p, ScanGrid(n_mod=49, n_arg=17, n_A=49))
    s = rep.summary
    lim = s["omega3_limit"]
    dt = time.perf_counter() - t0
    criterion(f"lambda0 {s['lambda0']:g}, inf {s['infimum']:.4g}, omega3 limit error "
              f"{lim['max_rel_error']:.1e}")
    assert math.isfinite(s["lambda0"]) and s["infimum"] > 0
    assert all(r["delta1"] < 1e-3 for r in lim["rows"])
    assert lim["max_rel_error"] < 0.01
    assert rep.passed
    assert dt < 60


@pytest.mark.criterion(6, "multiplier class certification")
def test_c06_multiplier_classes(criterion):
    t0 = time.perf_counter()
    p = validate_params(DEFAULT_PARAMS)
    claims = default_claims()
    reps = certify_classes(p, claims, ClassGrid())
    failed = [r.name for r in reps if not r.passed]
    cover = {(a, s) for r in reps for a, s in zip(r.columns["alpha"], r.columns["s"])}
    dt = time.perf_counter() - t0
    criterion(f"{len(reps)} claims, {len(failed)} failed {failed}")
    assert len(reps) == len(claims) == len(mp.TABLE_CLAIMS) + len(mp.ELEMENTARY_CLAIMS)
    assert not failed
    # |alpha'| <= 2 in one tangential variable, s in {0, 1}
    assert len(cover) == 6 and {s for _, s in cover} == {0, 1}
    assert dt < 300


@pytest.mark.criterion(7, "Vieta and root properties")
def test_c07_vieta_and_roots(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst_vieta = worst_general = 0.0
    for _ in range(200):
        q = random_params(rng)
        dc = q.derived
        k, r = q.kappa_plus, q.rho_plus
        # reference-density normalized quadratic: rho+^2 kappa s^2 - (mu + nu) s + rho+ = 0
        worst_general = max(worst_general,
                            abs(dc.s1 + dc.s2 - (q.mu_plus + q.nu_plus) / (r**2 * k)) / abs(dc.s1 + dc.s2),
                            abs(dc.s1 * dc.s2 * r * k - 1))
        try:
            p1 = validate_params(q.replace(rho_plus=1.0, rho_minus=q.rho_minus + 1.0))
        except Exception:
            continue
        dc = p1.derived
        worst_vieta = max(worst_vieta,
                          abs(dc.s1 + dc.s2 - (p1.mu_plus + p1.nu_plus) / k) / abs(dc.s1 + dc.s2),
                          abs(dc.s1 * dc.s2 * k - 1))
    # roots over a scan grid: positive real parts and the lower bound constant
    c1, min_re = math.inf, math.inf
    for _ in range(10):
        p = random_params(rng)
        lam, xi = ScanGrid(n_mod=25, n_arg=13, n_A=25, dim=p.dim).points()
        S = characteristic_roots(p, (lam, xi), check_degenerate=False)
        scale = np.sqrt(np.abs(lam)) + S.A
        for r in (S.B_plus, S.B_minus, S.t1, S.t2):
            min_re = min(min_re, float(r.real.min()))
            c1 = min(c1, float((r.real / scale).min()))
    dt = time.perf_counter() - t0
    criterion(f"Vieta {worst_vieta:.1e} (general {worst_general:.1e}), min Re root {min_re:.2e}, c1 {c1:.3g}")
    assert worst_vieta <= 1e-12 and worst_general <= 1e-12
    assert min_re > 0 and c1 > 0
    assert dt < 5


@pytest.mark.criterion(8, "extension coefficients")
def test_c08_extension_coefficients(criterion):
    t0 = time.perf_counter()
    a = extension_coefficients(4)
    assert a == (Fraction(10), Fraction(-20), Fraction(15), Fraction(-4))
    for k in range(4):
        assert sum(aj * Fraction(-(j + 1))**k for j, aj in enumerate(a)) == 1
    assert tuple(EXTENSION_COEFFS) == (10, -20, 15, -4)
    x = np.arange(32) * 2 * np.pi / 32
    X, Y = np.meshgrid(x, x, indexing="ij")
    worst = 0.0
    for Hs in (np.cos(x) + 0.3 * np.sin(2 * x) + 0.5, np.exp(np.sin(X) * np.cos(Y))):
        ext = extend_height(Hs)
        for k in range(4):
            up, dn = ext.derivative(0.0, k), ext.derivative(-1e-300, k)
            worst = max(worst, np.max(np.abs(up - dn)) / np.max(np.abs(up)))
    dt = time.perf_counter() - t0
    criterion(f"exact rationals, C3 mismatch {worst:.1e}")
    assert worst <= 1e-8
    assert dt < 1


@pytest.mark.criterion(9, "kernel decay probe, N=2")
def test_c09_kernel_decay(criterion):
    t0 = time.perf_counter()
    p = validate_params(DEFAULT_PARAMS)
    grid = np.logspace(-1.5, 1.5, 13)
    sups = []
    for lam in (1 + 0.5j, 2.0, -0.5 + 2j):
        rep = kernel_decay_probe(p, lam, grid_x=grid)
        s = rep.summary
        prof = np.asarray(s["radial_profile"])
        outer = prof[grid >= grid[-1] / 10]
        assert np.all(np.isfinite(prof)) and math.isfinite(s["sup_scaled"])
        assert np.all(np.diff(outer) <= 1e-12 * prof.max())
        assert s["outer_decade_nonincreasing"] and rep.passed
        sups.append(s["sup_scaled"])
    dt = time.perf_counter() - t0
    criterion("sup |x|^2|k| " + ", ".join(f"{v:.3g}" for v in sups))
    assert dt < 120


@pytest.mark.criterion(10, "fault detection by mutation")
def test_c10_fault_detection(criterion, monkeypatch):
    t0 = time.perf_counter()
    draws = random_draws(200, seed=1)
    clean_t, clean_e, _ = residual_sweep(draws)
    assert clean_t <= TOL_RESIDUAL and clean_e <= TOL_RESIDUAL

    orig_cc = lp.coupling_coefficients
    orig_adj = lp.kernel_adjugate
    orig_tab = mp.coefficient_table

    def cc_mutant(field, fac):
        def f(p, S):
            cc = orig_cc(p, S)
            return dataclasses.replace(cc, **{field: fac * getattr(cc, field)})
        return [(ms, "coupling_coefficients", f), (mp, "coupling_coefficients", f)]

    def adj_mutant(p, S, cc=None):
        a = orig_adj(p, S, cc)
        return (-a[0],) + tuple(a[1:])

    def tab_mutant(*args, **kw):
        t = orig_tab(*args, **kw)
        if "R+_JN" in t:
            t["R+_JN"] = t["R+_JN"].copy()
            t["R+_JN"][..., -1] *= -1
        return t

    mutants = {f"{f} x{fac}": cc_mutant(f, fac) for f in "DEFG" for fac in (-1, 2)}
    mutants["L11 sign"] = [(ms, "kernel_adjugate", adj_mutant)]
    mutants["R+NN sign"] = [(ms, "coefficient_table", tab_mutant)]
    missed = []
    for name, patches in mutants.items():
        with monkeypatch.context() as m:
            for mod, attr, fn in patches:
                m.setattr(mod, attr, fn)
            wt, we, _ = residual_sweep(draws)
        if max(wt, we) <= TOL_RESIDUAL:
            missed.append(name)
    dt = time.perf_counter() - t0
    criterion(f"{len(mutants) - len(missed)}/{len(mutants)} mutants detected")
    assert not missed
    assert dt < 120
