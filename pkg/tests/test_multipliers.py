import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nskresolvent.params import DEFAULT_PARAMS, PhysicalParams, validate_params
from nskresolvent.symbols import SpectralPoint, characteristic_roots
from nskresolvent.multipliers import (coefficient_table, coefficient, TABLE_KEYS, ZeroFrequency,
                                      ClassClaim, ClassGrid, class_estimate, certify_classes,
                                      default_claims, TABLE_CLAIMS, ELEMENTARY_CLAIMS, empirical_order,
                                      product_order_check, kernel_decay_probe, symbol_values)
from nskresolvent.sampling import random_params

P = validate_params(DEFAULT_PARAMS)
GRID = ClassGrid()


def test_S_plus_half_when_balanced():
    # mu+ rho+ = mu- rho- and A = 0 give mu+ B+ = mu- B-
    p = validate_params(PhysicalParams(mu_plus=2.0, nu_plus=3.0, mu_minus=1.0, rho_plus=1.0,
                                       rho_minus=2.0))
    for lam in (1.0, 3 + 2j, 0.01 - 0.5j):
        S = characteristic_roots(p, (np.asarray(lam, complex), np.array([0.0])))
        sp = complex(coefficient("S+_j", p, S=S))
        sm = complex(coefficient("S-_j", p, S=S))
        assert sp == pytest.approx(-0.5, abs=1e-15)
        assert abs(sp + sm) <= 1e-15


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**31), logmod=st.floats(-2, 2), arg=st.floats(-2.0, 2.0),
       logA=st.floats(-2, 2))
def test_S_sum_and_R_equalities(seed, logmod, arg, logA):
    p = random_params(np.random.default_rng(seed))
    lam = 10**logmod * complex(math.cos(arg), math.sin(arg))
    xi = np.zeros(p.dim - 1)
    xi[-1] = 10**logA
    S = characteristic_roots(p, (np.asarray(lam), xi), check_degenerate=False)
    t = coefficient_table(p, S)
    a, b = p.mu_plus * S.B_plus, p.mu_minus * S.B_minus
    total = complex(t["S+_j"] + t["S-_j"])
    assert abs(total - complex((a - b) / (a + b))) <= 1e-14
    # tangential rows j = 1..N-1 coincide; the normal row differs
    n1 = p.dim - 1
    assert np.array_equal(t["R-_Jm"][:n1], t["R+_Jm"][:n1])
    assert np.array_equal(t["R-_JN"][:n1], t["R+_JN"][:n1])
    for k, v in t.items():
        assert np.all(np.isfinite(v)), k


def test_zero_frequency_rejected():
    S = characteristic_roots(P, (np.asarray(1.0 + 0j), np.array([0.0])))
    with pytest.raises(ZeroFrequency):
        coefficient_table(P, S)


def test_coefficient_indexing():
    p = validate_params(DEFAULT_PARAMS.replace(dim=3))
    pt = SpectralPoint(1 + 1j, (0.4, 0.7))
    full = coefficient("R+_JN", p, pt)
    assert full.shape == (3,)
    assert coefficient("R+_JN", p, pt, J=3) == full[2]
    assert coefficient("Q+_Jm1", p, pt, J=2, m=1) == coefficient("Q+_Jm1", p, pt)[1, 0]
    with pytest.raises(KeyError):
        coefficient("X", p, pt)


@pytest.mark.parametrize("name", TABLE_KEYS)
def test_table_entries_analytic_in_lambda(name):
    # Cauchy-Riemann: derivative along real and imaginary directions agree
    lam0, h = 1.3 + 0.7j, 1e-5
    xi = np.array([0.8])

    def f(lam):
        S = characteristic_roots(P, (np.asarray(lam), xi), check_degenerate=False)
        return np.asarray(coefficient_table(P, S, names=(name,))[name], complex)

    dx = (f(lam0 + h) - f(lam0 - h)) / (2 * h)
    dy = (f(lam0 + 1j * h) - f(lam0 - 1j * h)) / (2j * h)
    scale = np.max(np.abs(dx)) + np.max(np.abs(f(lam0)))
    assert np.max(np.abs(dx - dy)) <= 1e-7 * scale


def test_claim_inventory():
    names = {c.symbol for c in TABLE_CLAIMS}
    assert names == set(TABLE_KEYS)
    syms = {c.symbol for c in ELEMENTARY_CLAIMS}
    assert {"i xi_j", "B+", "B-", "t1", "t2", "1/(lam+K_H)"} <= syms
    assert len(default_claims()) == len(TABLE_CLAIMS) + len(ELEMENTARY_CLAIMS)


def test_ixi_claim():
    rep = class_estimate(ClassClaim("i xi_j", 1, 2), GRID, P)
    assert rep.passed
    # |alpha'| = 0, s = 0: |xi_j| / A <= 1
    i = [k for k, (a, s) in enumerate(zip(rep.columns["alpha"], rep.columns["s"]))
         if s == 0 and a == "id"]
    assert i and rep.columns["sup"][i[0]] <= 1 + 1e-12


def test_b_plus_claim():
    rep = class_estimate(ClassClaim("B+", 1, 1), GRID, P)
    assert rep.passed and rep.summary["order_matches_claim"]


def test_p_plus_m1_claim():
    rep = class_estimate(ClassClaim("P+_m1", -1, 2), GRID, P)
    assert rep.passed
    assert rep.summary["empirical_order"] == pytest.approx(-1, abs=0.1)


def test_unbounded_claim_fails():
    # B+ is order 1; claiming order 0 makes the weighted sup grow under refinement
    rep = class_estimate(ClassClaim("B+", 0, 1), ClassGrid(lam_min=1e-2, lam_max=1e4, n_mod=5, n_arg=5,
                                                          n_ratio=25, n_dir=1), P)
    assert not rep.passed


def test_empirical_orders():
    assert empirical_order(P, "B+") == pytest.approx(1, abs=0.02)
    assert empirical_order(P, "1/l") == pytest.approx(-6, abs=0.05)
    assert empirical_order(P, "n") == pytest.approx(4, abs=0.05)


def test_product_orders_add():
    rows = product_order_check(P, [("B+", "1/B+"), ("t1", "1/t1"), ("A", "1/l")])
    assert all(r["ok"] for r in rows)


def test_symbol_values_shape():
    lam = np.array([1.0 + 0j, 2.0])
    xi = np.array([[0.5], [1.5]])
    v = symbol_values(P, lam, xi, ("A", "R+_JN"))
    assert np.allclose(v["A"].ravel(), [0.5, 1.5])
    assert v["R+_JN"].shape[0] == 2


def test_kernel_zero_multiplier():
    rep = kernel_decay_probe(P, 1.0, m_name="zero", grid_x=np.logspace(-1, 1, 5))
    assert np.all(np.asarray(rep.summary["radial_profile"]) == 0)


def test_kernel_lambda_one_bounded():
    grid = np.logspace(-1.5, 1.5, 13)
    rep = kernel_decay_probe(P, 1.0, grid_x=grid)
    prof = np.asarray(rep.summary["radial_profile"])
    assert np.all(np.isfinite(prof)) and rep.summary["sup_scaled"] < 10
    assert rep.summary["outer_decade_nonincreasing"]


def test_certify_reports_each_claim():
    claims = (ClassClaim("A", 1, 2), ClassClaim("1/B-", -1, 1))
    reps = certify_classes(P, claims, GRID)
    assert [r.name for r in reps] == ["class:A", "class:1/B-"]
    assert all(r.passed for r in reps)
