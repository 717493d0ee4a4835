"""
Exact per-frequency solution of the transformed two-phase resolvent problem.

For a tangential frequency xi' and resolvent parameter lambda the ODE system
in x_N is solved in closed form:

    x_N > 0:  u+ = alpha+ e^{-B+ x} + beta+ (e^{-t1 x} - e^{-B+ x}) + gamma+ (e^{-t2 x} - e^{-B+ x}),
    x_N < 0:  u- = alpha- e^{B- x} + beta- (e^{B- x} - e^{A x}),    pi- = gamma- e^{A x},

with rho+ from the mass equation.  Two assembly routes are available:

``"elimination"``
    beta_N+, gamma_N+ from the 2x2 kernel system (coefficients D, E, F, G),
    then the tangential relations, alpha_N+, alpha_N-, beta_N-, gamma-,
    beta_j- and finally alpha_j+- from the tangential stress balance.
``"table"``
    the same coefficients read off the P/Q/R/S multiplier table.

Both are checked by :func:`residual_mode`, which evaluates every bulk and
interface equation directly from the fields.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from .params import ValidatedParams, validate_params
from .symbols import SpectralPoint, characteristic_roots, eval_M_derivatives, _exp_safe
from .lopatinski import coupling_coefficients, kernel_matrix, kernel_adjugate, kinetic_symbol
from .multipliers import coefficient_table, ZeroFrequency, LOAD

__all__ = [
    "SingularL", "KineticSingular", "ZeroFrequency",
    "BoundaryData", "ModeSolution", "ResidualReport", "FieldSolution", "HeightExtension",
    "solve_mode", "solve_modes", "eval_mode", "residual_mode", "default_stations",
    "mass_crosscheck", "synthesize_field", "extend_height", "extension_coefficients",
    "EXTENSION_COEFFS", "harmonic_data", "gaussian_bump",
]

SINGULAR_TOL = 1e-13
KINETIC_TOL = 1e-13


class SingularL(ArithmeticError):
    """det L vanishes (relative to (|lam|^{1/2} + A)^9)."""


class KineticSingular(ArithmeticError):
    """lam + K_H vanishes at the requested point."""


def _params(p):
    return p if isinstance(p, ValidatedParams) else validate_params(p)


@dataclass(frozen=True)
class BoundaryData:
    """Interface data of one Fourier mode.

    Exactly one of ``H_hat`` (given interface height) and ``d_hat`` (forcing of
    the kinetic equation) must be set.
    """

    h_hat: tuple
    H_hat: complex = None
    d_hat: complex = None

    def __post_init__(self):
        object.__setattr__(self, "h_hat", tuple(complex(v) for v in np.ravel(self.h_hat)))
        if (self.H_hat is None) == (self.d_hat is None):
            raise ValueError("exactly one of H_hat and d_hat must be given")

    @property
    def mode(self):
        return "given-H" if self.H_hat is not None else "given-d"

    def norm(self):
        v = list(self.h_hat) + [self.H_hat if self.H_hat is not None else self.d_hat]
        return float(np.linalg.norm(np.asarray(v, complex)))


@dataclass
class ModeSolution:
    """Amplitudes of the closed-form solution at one (lam, xi').

    ``rho_a`` and ``rho_b`` give rho+ = rho_a M0+(x) + rho_b e^{-t1 x}.
    """

    alpha_plus: np.ndarray
    beta_plus: np.ndarray
    gamma_plus: np.ndarray
    alpha_minus: np.ndarray
    beta_minus: np.ndarray
    gamma_minus: complex
    beta_N_plus: complex
    gamma_N_plus: complex
    H0: complex
    rho_a: complex
    rho_b: complex
    S: object = field(repr=False)
    data: BoundaryData = None
    route: str = "elimination"
    K_H: complex = None
    condition: float = 1.0
    params: ValidatedParams = field(repr=False, default=None)


def _rho_coeffs(p, S, tab, h, H):
    """rho+ amplitudes from the P coefficients."""
    A = S.A
    ra = A * (np.sum(tab["P+_m1"] * h, axis=-1) + A * tab["P+_N1"] * H)
    rb = A * (np.sum(tab["P+_m2"] * h, axis=-1) + A * tab["P+_N2"] * H)
    return ra, rb


def _eliminate(p, S, h, H, load=LOAD):
    """Elimination route, vectorized over the grid of ``S``.

    Returns a dict of amplitude arrays (trailing axis N for vectors) and the
    cancellation factor of the determinant.
    """
    rp, mu, mum, nu = p.rho_plus, p.mu_plus, p.mu_minus, p.nu_plus
    dc = p.derived
    sp, sm = dc.sigma_plus, dc.sigma_minus
    lam, A, Bp, Bm, t1, t2 = S.lam, S.A, S.B_plus, S.B_minus, S.t1, S.t2
    ix = 1j * np.asarray(S.xi, float)
    x = lambda a: np.asarray(a)[..., None]
    ixh = np.sum(ix * h, axis=-1)

    cc = coupling_coefficients(p, S)
    L = kernel_matrix(p, S, cc)
    L11, _, L21, _ = kernel_adjugate(p, S, cc)
    a0, a1 = L[..., 0, 0] * L[..., 1, 1], L[..., 0, 1] * L[..., 1, 0]
    detL = a0 - a1
    tiny = np.finfo(float).tiny
    # cancellation inside the first row, D t_i - E
    cond = np.maximum(
        (np.abs(cc.D * t1) + np.abs(cc.E)) / np.maximum(np.abs(cc.D * t1 - cc.E), tiny),
        (np.abs(cc.D * t2) + np.abs(cc.E)) / np.maximum(np.abs(cc.D * t2 - cc.E), tiny))
    cond = cond * (np.abs(a0) + np.abs(a1)) / np.maximum(np.abs(detL), tiny)
    if np.any(np.abs(detL) < SINGULAR_TOL * S.scale**9):
        raise SingularL("det L below 1e-13 (|lam|^1/2 + A)^9")
    rhs = 2 * t1 * t2 * (load * S.A2 * cc.F * H - cc.G * ixh)
    bN = L11 * rhs / detL
    gN = L21 * rhs / detL
    beta_p = np.concatenate([-ix / x(t1) * x(bN), x(bN)], axis=-1)
    gamma_p = np.concatenate([-ix / x(t2) * x(gN), x(gN)], axis=-1)

    # normal velocity of the B+ mode; 2 t_i B - B^2 - A^2 = s_i lam - (t_i - B)^2
    d1B, d2B = S.d_t1B, S.d_t2B
    aNp = -load * sp * S.A2 * H / (2 * mu * Bp) \
        + (S.s1 * lam - d1B**2) / (2 * t1 * Bp) * bN \
        + (S.s2 * lam - d2B**2) / (2 * t2 * Bp) * gN
    AmB2 = -S.cp * lam
    ixap = -load * sp * S.A2 * H / (2 * mu) + AmB2 / (2 * t1) * bN + AmB2 / (2 * t2) * gN
    ixam = ixap + ixh
    aNm = load * sm * A**3 * H / (mum * (A + Bm) * Bm) - S.d_BmA / ((A + Bm) * Bm) * ixam
    w = ixam + Bm * aNm
    bNm = -w / S.d_BmA
    gm = -mum * (A + Bm) / A * w
    # mu-(B-^2 - A^2) beta_j- = i xi_j gamma-
    bjm = ix * x(gm / (mum * S.cm * lam))
    beta_m = np.concatenate([bjm, x(bNm)], axis=-1)

    # tangential stress balance with alpha_j- = alpha_j+ + h_j
    den = mu * Bp + mum * Bm
    rhs_t = (-mum * x(Bm) * h - mum * x(S.d_BmA) * bjm - mum * ix * x(aNm)
             + mu * (-x(d1B) * beta_p[..., :-1] - x(d2B) * gamma_p[..., :-1] + ix * x(aNp)))
    ajp = rhs_t / x(den)
    tmag = (mum * np.abs(x(Bm) * h) + mum * np.abs(x(S.d_BmA) * bjm) + mum * np.abs(ix * x(aNm))
            + mu * (np.abs(x(d1B) * beta_p[..., :-1]) + np.abs(x(d2B) * gamma_p[..., :-1])
                    + np.abs(ix * x(aNp))))
    amp = np.max(tmag / np.maximum(np.abs(rhs_t), tiny), axis=-1)
    cond = cond * np.maximum(amp, 1.0)
    ajm = ajp + h
    alpha_p = np.concatenate([ajp, x(aNp)], axis=-1)
    alpha_m = np.concatenate([ajm, x(aNm)], axis=-1)
    return dict(alpha_plus=alpha_p, beta_plus=beta_p, gamma_plus=gamma_p,
                alpha_minus=alpha_m, beta_minus=beta_m, gamma_minus=gm,
                beta_N_plus=bN, gamma_N_plus=gN, condition=cond)


def _from_table(p, S, tab, h, H):
    """Table route: assemble amplitudes from the P/Q/R/S coefficients."""
    A = S.A
    x = lambda a: np.asarray(a)[..., None]
    mv = lambda M, v: np.einsum("...jm,...m->...j", M, v)
    hj = np.concatenate([h, np.zeros(h.shape[:-1] + (1,), complex)], axis=-1)
    beta_p = x(A / S.d_t1B) * (mv(tab["Q+_Jm1"], h) + x(A * H) * tab["Q+_JN1"])
    gamma_p = x(A / S.d_t2B) * (mv(tab["Q+_Jm2"], h) + x(A * H) * tab["Q+_JN2"])
    alpha_p = x(A) * (mv(tab["R+_Jm"], h) + x(A * H) * tab["R+_JN"]) + x(tab["S+_j"]) * hj
    beta_m = x(A / S.d_BmA) * (mv(tab["Q-_Jm"], h) + x(A * H) * tab["Q-_JN"])
    alpha_m = x(A) * (mv(tab["R-_Jm"], h) + x(A * H) * tab["R-_JN"]) + x(tab["S-_j"]) * hj
    gm = np.sum(tab["P-_m"] * h, axis=-1) + A * tab["P-_N"] * H
    return dict(alpha_plus=alpha_p, beta_plus=beta_p, gamma_plus=gamma_p,
                alpha_minus=alpha_m, beta_minus=beta_m, gamma_minus=gm,
                beta_N_plus=beta_p[..., -1], gamma_N_plus=gamma_p[..., -1],
                condition=np.ones(np.shape(A)))


def _interface_normal(p, S, tab, h, H, route):
    """Normal velocities u_N+(0), u_N-(0) for data (h, H) on the given route."""
    if route == "elimination":
        out = _eliminate(p, S, h, H)
    else:
        out = _from_table(p, S, tab, h, H)
    return out["alpha_plus"][..., -1], out["alpha_minus"][..., -1]


def solve_modes(p, lam, xi, h, H=None, d=None, route="table"):
    """Vectorized solve over arrays: ``lam`` (...), ``xi`` (..., N-1), ``h`` (..., N-1).

    Exactly one of ``H`` and ``d`` (arrays of shape ``...``) must be given.  In
    the given-d case the kinetic equation

        lam H - (rho- u_N-(0) - rho+ u_N+(0)) / (rho- - rho+) = d

    is solved for H; with h = 0 this is (lam + K_H) H = d.

    Returns
    -------
    dict of ndarray
        Amplitudes as in :class:`ModeSolution` plus ``H0``, ``K_H``,
        ``rho_a``, ``rho_b`` and the symbol set ``S``.
    """
    p = _params(p)
    if route not in ("elimination", "table"):
        raise ValueError(f"unknown route {route!r}")
    lam = np.asarray(lam, complex)
    xi = np.asarray(xi, float)
    h = np.asarray(h, complex)
    S = characteristic_roots(p, (lam, xi))
    if np.any(S.A == 0):
        raise ZeroFrequency("xi' = 0: the solution operators are singular there")
    tab = coefficient_table(p, S)
    K = None
    if d is not None:
        dr = p.rho_minus - p.rho_plus
        one = np.ones(np.shape(S.A), complex)
        if route == "elimination":
            uNp, uNm = _interface_normal(p, S, tab, np.zeros_like(h * one[..., None]), one, route)
            K = -(p.rho_minus * uNm - p.rho_plus * uNp) / dr
        else:
            K = kinetic_symbol(p, S, tab["R+_JN"][..., -1], tab["R-_JN"][..., -1])
        den = lam + K
        if np.any(np.abs(den) < KINETIC_TOL * (np.abs(lam) + np.abs(K))):
            raise KineticSingular("lam + K_H vanishes")
        hp, hm = _interface_normal(p, S, tab, h * one[..., None], 0 * one, route)
        H = (np.asarray(d, complex) + (p.rho_minus * hm - p.rho_plus * hp) / dr) / den
    H = np.asarray(H, complex) * np.ones(np.shape(S.A))
    out = _eliminate(p, S, h, H) if route == "elimination" else _from_table(p, S, tab, h, H)
    out["rho_a"], out["rho_b"] = _rho_coeffs(p, S, tab, h, H)
    out["H0"] = H
    out["K_H"] = K
    out["S"] = S
    return out


def solve_mode(p, pt, data, route="table"):
    """Closed-form solution at one admissible point.

    Parameters
    ----------
    p : PhysicalParams
    pt : SpectralPoint or (lam, xi')
    data : BoundaryData
    route : {"elimination", "table"}

    Returns
    -------
    ModeSolution

    Raises
    ------
    SingularL, KineticSingular, ZeroFrequency
    """
    p = _params(p)
    if isinstance(pt, SpectralPoint):
        pt.check()
        lam, xi = pt.lam, np.asarray(pt.xi_prime, float)
    else:
        lam, xi = complex(pt[0]), np.ravel(np.asarray(pt[1], float))
    if xi.size != p.dim - 1 or len(data.h_hat) != p.dim - 1:
        raise ValueError(f"xi' and h must have {p.dim - 1} components")
    if np.linalg.norm(xi) == 0:
        raise ZeroFrequency("xi' = 0")
    h = np.asarray(data.h_hat, complex)
    out = solve_modes(p, np.asarray(lam), xi, h,
                      H=None if data.H_hat is None else np.asarray(data.H_hat, complex),
                      d=None if data.d_hat is None else np.asarray(data.d_hat, complex),
                      route=route)
    sc = lambda k: complex(np.asarray(out[k]))
    return ModeSolution(
        alpha_plus=np.asarray(out["alpha_plus"]), beta_plus=np.asarray(out["beta_plus"]),
        gamma_plus=np.asarray(out["gamma_plus"]), alpha_minus=np.asarray(out["alpha_minus"]),
        beta_minus=np.asarray(out["beta_minus"]), gamma_minus=sc("gamma_minus"),
        beta_N_plus=sc("beta_N_plus"), gamma_N_plus=sc("gamma_N_plus"), H0=sc("H0"),
        rho_a=sc("rho_a"), rho_b=sc("rho_b"), S=out["S"], data=data, route=route,
        K_H=None if out["K_H"] is None else sc("K_H"),
        condition=float(np.asarray(out["condition"])), params=p)


# ---------------------------------------------------------------- evaluation

def eval_mode(sol, x_N, order=0):
    """Fields of a mode solution and their exact x_N-derivatives.

    Parameters
    ----------
    sol : ModeSolution
    x_N : array_like
        All >= 0 (plus side) or all <= 0 (minus side); 0 returns both sides.
    order : int, 0..3

    Returns
    -------
    dict
        ``u_plus`` (..., N) and ``rho_plus`` for x_N >= 0, ``u_minus`` (..., N)
        and ``pi_minus`` for x_N <= 0.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0..3")
    S = sol.S
    x = np.asarray(x_N, float)
    out = {}
    if np.all(x >= 0):
        eB = (-S.B_plus)**order * _exp_safe(S.B_plus, x)
        M1 = eval_M_derivatives("M1+", S, x, order)
        M2 = eval_M_derivatives("M2+", S, x, order)
        M0 = eval_M_derivatives("M0+", S, x, order)
        e1 = (-S.t1)**order * _exp_safe(S.t1, x)
        c = lambda v: np.asarray(v)[..., None]
        out["u_plus"] = (c(eB) * sol.alpha_plus + c(M1) * (sol.beta_plus * c(S.d_t1B))
                         + c(M2) * (sol.gamma_plus * c(S.d_t2B)))
        out["rho_plus"] = sol.rho_a * M0 + sol.rho_b * e1
    if np.all(x <= 0):
        y = -x
        eB = S.B_minus**order * _exp_safe(S.B_minus, y)
        Mm = eval_M_derivatives("M-", S, x, order)
        eA = S.A**order * _exp_safe(S.A, y)
        c = lambda v: np.asarray(v)[..., None]
        out["u_minus"] = c(eB) * sol.alpha_minus + c(Mm) * (sol.beta_minus * c(S.d_BmA))
        out["pi_minus"] = sol.gamma_minus * eA
    if not out:
        raise ValueError("x_N must lie on one half-line (or be 0)")
    return out


def default_stations(sol, n=32, lo=1e-3, hi=10.0):
    """Log-spaced stations per half-line in [lo, hi] / (min Re root)."""
    S = sol.S
    rp = min(float(np.real(S.t1)), float(np.real(S.t2)), float(np.real(S.B_plus)))
    rm = min(float(np.real(S.B_minus)), float(S.A))
    xp = np.logspace(np.log10(lo), np.log10(hi), n) / rp
    xm = -np.logspace(np.log10(lo), np.log10(hi), n) / rm
    return xp, xm


@dataclass
class ResidualReport:
    """Per-equation residuals.

    ``relative[name]`` is max |sum of terms| / sum |terms| over the stations
    (0 when every term vanishes); ``absolute[name]`` is max |sum of terms|.
    """

    relative: dict
    absolute: dict
    condition: float = 1.0

    @property
    def max_relative(self):
        return max(self.relative.values())

    def bulk(self):
        return {k: v for k, v in self.relative.items() if k.startswith("bulk")}

    def interface(self):
        return {k: v for k, v in self.relative.items() if not k.startswith("bulk")}


def _rel(terms):
    s = sum(terms)
    mag = sum(np.abs(t) for t in terms)
    r = np.where(mag > 0, np.abs(s) / np.where(mag > 0, mag, 1.0), 0.0)
    return float(np.max(r)), float(np.max(np.abs(s)))


def residual_mode(sol, p=None, pt=None, x_stations=None, load=LOAD):
    """Residuals of the transformed equations for a mode solution.

    Bulk equations on the stations: mass, the two momentum components and
    divergence/momentum of the incompressible side.  Interface equations at
    x_N = 0: tangential stress, both normal stresses, the velocity jump, the
    Neumann condition on rho+ and (given-d mode) the kinetic equation.  The
    surface tension enters the normal stresses as ``load * sigma_pm A^2 H``.
    """
    p = _params(sol.params if p is None else p)
    S = sol.S
    if x_stations is None:
        xp, xm = default_stations(sol)
    else:
        xs = np.asarray(x_stations, float)
        xp, xm = xs[xs >= 0], xs[xs <= 0]
    lam, A2 = complex(S.lam), float(S.A2)
    ix = 1j * np.asarray(S.xi, float)
    rp, rm, mu, mum, nu, ka = (p.rho_plus, p.rho_minus, p.mu_plus, p.mu_minus,
                               p.nu_plus, p.kappa_plus)
    dc = p.derived
    rel, ab = {}, {}

    def put(name, terms):
        rel[name], ab[name] = _rel(terms)

    n1 = p.dim - 1
    if xp.size:
        F = [eval_mode(sol, xp, k) for k in range(4)]
        u = [f["u_plus"] for f in F]
        r = [f["rho_plus"] for f in F]
        div = [np.sum(ix * u[k][..., :n1], axis=-1) + u[k + 1][..., -1] for k in range(3)]
        put("bulk:mass+", [lam * r[0], rp * np.sum(ix * u[0][..., :n1], axis=-1), rp * u[1][..., -1]])
        for j in range(n1):
            put(f"bulk:momentum+_{j + 1}", [
                rp * lam * u[0][..., j], -mu * u[2][..., j], mu * A2 * u[0][..., j],
                -nu * ix[j] * div[0], -ix[j] * rp * ka * r[2], ix[j] * rp * ka * A2 * r[0]])
        put("bulk:momentum+_N", [
            rp * lam * u[0][..., -1], -mu * u[2][..., -1], mu * A2 * u[0][..., -1],
            -nu * div[1], -rp * ka * r[3], rp * ka * A2 * r[1]])
    if xm.size:
        F = [eval_mode(sol, xm, k) for k in range(3)]
        u = [f["u_minus"] for f in F]
        q = [f["pi_minus"] for f in F]
        put("bulk:div-", [np.sum(ix * u[0][..., :n1], axis=-1), u[1][..., -1]])
        for j in range(n1):
            put(f"bulk:momentum-_{j + 1}", [
                rm * lam * u[0][..., j], -mum * u[2][..., j], mum * A2 * u[0][..., j], ix[j] * q[0]])
        put("bulk:momentum-_N", [
            rm * lam * u[0][..., -1], -mum * u[2][..., -1], mum * A2 * u[0][..., -1], q[1]])

    z = np.zeros(1)
    P = [eval_mode(sol, z, k) for k in range(3)]
    up = [f["u_plus"][0] for f in P]
    um = [f["u_minus"][0] for f in P]
    rho = [f["rho_plus"][0] for f in P]
    pim = P[0]["pi_minus"][0]
    H = sol.H0
    divp = np.sum(ix * up[0][:n1]) + up[1][-1]
    for m in range(n1):
        put(f"interface:tangential_stress_{m + 1}", [
            mum * um[1][m], mum * ix[m] * um[0][-1], -mu * up[1][m], -mu * ix[m] * up[0][-1]])
    put("interface:normal_stress-", [2 * mum * um[1][-1], -pim, -load * dc.sigma_minus * A2 * H])
    put("interface:normal_stress+", [
        2 * mu * up[1][-1], (nu - mu) * divp, rp * ka * rho[2], -rp * ka * A2 * rho[0],
        -load * dc.sigma_plus * A2 * H])
    h = np.asarray(sol.data.h_hat, complex) if sol.data is not None else np.zeros(n1)
    for m in range(n1):
        put(f"interface:jump_{m + 1}", [um[0][m], -up[0][m], -h[m]])
    # d/dx M0+ (0) = -1
    put("interface:neumann_rho", [-sol.rho_a, -complex(S.t1) * sol.rho_b])
    if sol.data is not None and sol.data.mode == "given-d":
        put("interface:kinetic", [lam * H, -rm * um[0][-1] / (rm - rp), rp * up[0][-1] / (rm - rp),
                                  -sol.data.d_hat])
    return ResidualReport(relative=rel, absolute=ab, condition=sol.condition)


def mass_crosscheck(sol, x_N=None):
    """Max relative gap between rho+ (P form) and -(rho+/lam) div u+."""
    p = sol.params
    S = sol.S
    xp = default_stations(sol)[0] if x_N is None else np.asarray(x_N, float)
    f0, f1 = eval_mode(sol, xp, 0), eval_mode(sol, xp, 1)
    n1 = p.dim - 1
    div = np.sum(1j * np.asarray(S.xi) * f0["u_plus"][..., :n1], axis=-1) + f1["u_plus"][..., -1]
    rec = -(p.rho_plus / complex(S.lam)) * div
    ref = f0["rho_plus"]
    scale = np.max(np.abs(ref))
    return float(np.max(np.abs(rec - ref)) / scale) if scale > 0 else float(np.max(np.abs(rec)))


# ---------------------------------------------------------------- fields

@dataclass
class FieldSolution:
    """Physical-space fields on a periodic x' grid.

    Arrays are indexed (station, component, *grid) for velocities and
    (station, *grid) for scalars; ``H`` is the interface height on the grid.
    """

    x_prime: list
    box: float
    x_plus: np.ndarray
    x_minus: np.ndarray
    u_plus: np.ndarray
    rho_plus: np.ndarray
    u_minus: np.ndarray
    pi_minus: np.ndarray
    H: np.ndarray
    manifest: dict
    imag_leakage: float = 0.0


def _freqs(nx, box, dim):
    k = 2 * np.pi * np.fft.fftfreq(nx, d=box / nx)
    grids = np.meshgrid(*([k] * (dim - 1)), indexing="ij")
    xi = np.stack(grids, axis=-1)
    bad = np.linalg.norm(xi, axis=-1) == 0
    if nx % 2 == 0:
        for a in range(dim - 1):
            idx = [slice(None)] * (dim - 1)
            idx[a] = nx // 2
            bad[tuple(idx)] = True
    return xi, bad


def synthesize_field(p, lam, h, d=None, box=2 * np.pi, nx=None, x_stations=None, H=None,
                     route="table"):
    """Physical-space solution for periodic interface data.

    Parameters
    ----------
    p : PhysicalParams
    lam : complex
    h : ndarray, shape (N-1, nx, ..., nx)
        Tangential velocity jump on the x' grid.
    d : ndarray, shape (nx, ..., nx), optional
        Kinetic forcing (given-d mode).  Alternatively pass ``H``.
    box : float
        Period length per axis.
    x_stations : (x_plus, x_minus), optional
        Defaults to 8 log-spaced stations per half-line in [1e-2, 10].

    Notes
    -----
    The zero mode (and, for even ``nx``, the Nyquist modes) are set to zero;
    the data should have zero mean.  For real ``lam`` and real data the output
    is real up to round-off; for complex ``lam`` the fields are complex.
    """
    p = _params(p)
    h = np.asarray(h, float)
    n1 = p.dim - 1
    if h.shape[0] != n1:
        raise ValueError(f"h must have leading dimension {n1}")
    nx = h.shape[1] if nx is None else nx
    if (d is None) == (H is None):
        raise ValueError("exactly one of d and H must be given")
    axes = tuple(range(1, n1 + 1))
    hh = np.fft.fftn(h, axes=axes)
    gv = np.fft.fftn(np.asarray(d if d is not None else H, float))
    xi, bad = _freqs(nx, box, p.dim)
    good = ~bad
    if x_stations is None:
        xs = np.logspace(-2, 1, 8)
        x_plus, x_minus = xs, -xs
    else:
        x_plus, x_minus = (np.asarray(v, float) for v in x_stations)
    lam_arr = np.full(good.sum(), complex(lam))
    hv = np.moveaxis(hh, 0, -1)[good]
    kw = {"d": gv[good]} if d is not None else {"H": gv[good]}
    try:
        out = solve_modes(p, lam_arr, xi[good], hv, route=route, **kw)
    except (SingularL, KineticSingular, ZeroFrequency) as exc:
        raise type(exc)(f"{exc} (at some xi' of the {nx}-point grid, box={box})") from exc
    S = out["S"]

    class _Sol:
        pass

    sol = _Sol()
    for k in ("alpha_plus", "beta_plus", "gamma_plus", "alpha_minus", "beta_minus",
              "gamma_minus", "rho_a", "rho_b"):
        setattr(sol, k, out[k])
    sol.S = S
    gshape = xi.shape[:-1]

    def scatter(vals):
        arr = np.zeros(vals.shape[:1] + gshape + vals.shape[2:], complex)
        arr[(slice(None),) + np.nonzero(good)] = vals
        return arr

    def inv(arr, comp):
        ax = tuple(range(arr.ndim - n1 - (1 if comp else 0), arr.ndim - (1 if comp else 0)))
        return np.fft.ifftn(arr, axes=ax)

    def fields(xs, side):
        us, ss = [], []
        for xv in xs:
            xa = np.full(good.sum(), xv)
            f = eval_mode(sol, xa, 0)
            if side > 0:
                us.append(f["u_plus"])
                ss.append(f["rho_plus"])
            else:
                us.append(f["u_minus"])
                ss.append(f["pi_minus"])
        U = scatter(np.stack(us)) if us else np.zeros((0,) + gshape + (p.dim,), complex)
        Sv = scatter(np.stack(ss)) if ss else np.zeros((0,) + gshape, complex)
        U = np.moveaxis(np.fft.ifftn(U, axes=tuple(range(1, n1 + 1))), -1, 1)
        Sv = np.fft.ifftn(Sv, axes=tuple(range(1, n1 + 1)))
        return U, Sv

    Up, Rp = fields(x_plus, +1)
    Um, Pm = fields(x_minus, -1)
    Hs = np.zeros(gshape, complex)
    Hs[good] = out["H0"]
    Hx = np.fft.ifftn(Hs)
    allv = [Up, Rp, Um, Pm, Hx]
    mx = max(float(np.max(np.abs(v))) if v.size else 0.0 for v in allv)
    leak = max(float(np.max(np.abs(v.imag))) if v.size else 0.0 for v in allv)
    leak = leak / mx if mx > 0 else 0.0
    real = complex(lam).imag == 0
    conv = (lambda v: v.real) if real else (lambda v: v)
    grid = [np.arange(nx) * box / nx for _ in range(n1)]
    manifest = {"lambda": [complex(lam).real, complex(lam).imag], "box": box, "nx": nx,
                "dim": p.dim, "route": route, "mode": "given-d" if d is not None else "given-H",
                "params": p.as_dict(), "zeroed_modes": int(bad.sum()), "imag_leakage": leak}
    return FieldSolution(x_prime=grid, box=box, x_plus=x_plus, x_minus=x_minus,
                         u_plus=conv(Up), rho_plus=conv(Rp), u_minus=conv(Um), pi_minus=conv(Pm),
                         H=conv(Hx), manifest=manifest, imag_leakage=leak)


def harmonic_data(dim, nx, k=1, amp=1.0, box=2 * np.pi, which="h"):
    """Single cosine harmonic along x_1 for ``h_1`` (which="h") or the scalar datum."""
    x = np.arange(nx) * box / nx
    grids = np.meshgrid(*([x] * (dim - 1)), indexing="ij")
    f = amp * np.cos(2 * np.pi * k * grids[0] / box)
    if which == "h":
        h = np.zeros((dim - 1,) + f.shape)
        h[0] = f
        return h
    return f


def gaussian_bump(dim, nx, width=0.5, box=2 * np.pi):
    """Zero-mean periodic Gaussian bump centred in the box."""
    x = np.arange(nx) * box / nx
    grids = np.meshgrid(*([x] * (dim - 1)), indexing="ij")
    r2 = sum((g - box / 2)**2 for g in grids)
    f = np.exp(-r2 / (2 * width**2))
    return f - f.mean()


# ---------------------------------------------------------------- height extension

def extension_coefficients(n=4):
    """Exact solution of sum_j a_j (-j)^k = 1, k = 0..n-1, as Fractions."""
    M = [[Fraction((-j)**k) for j in range(1, n + 1)] for k in range(n)]
    b = [Fraction(1)] * n
    # Gauss-Jordan in exact arithmetic
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        b[c], b[piv] = b[piv], b[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * e for a, e in zip(M[r], M[c])]
                b[r] -= f * b[c]
    return tuple(b[i] / M[i][i] for i in range(n))


EXTENSION_COEFFS = (10, -20, 15, -4)


@dataclass
class HeightExtension:
    """Height function on both half-spaces.

    For x_N >= 0, H(x', x_N) = F^{-1}[e^{-(1+A^2)^{1/2} x_N} H_hat(xi')]; for
    x_N < 0, H(x', x_N) = sum_j a_j H(x', -j x_N).
    """

    H_hat: np.ndarray
    c: np.ndarray
    a: tuple
    box: float

    def _upper(self, xN, k):
        mult = (-self.c)**k * np.exp(-self.c * xN)
        return np.fft.ifftn(self.H_hat * mult).real

    def derivative(self, x_N, k=0):
        """k-th x_N-derivative (k <= 3) on the x' grid, exact in Fourier."""
        xN = float(x_N)
        if xN >= 0:
            return self._upper(xN, k)
        return sum(float(a) * (-(j + 1))**k * self._upper(-(j + 1) * xN, k)
                   for j, a in enumerate(self.a))

    def __call__(self, x_N):
        return self.derivative(x_N, 0)


def extend_height(H_surface, a_coeffs=EXTENSION_COEFFS, box=2 * np.pi):
    """Extend interface values to a height function on the whole space.

    Raises
    ------
    ValueError
        If ``a_coeffs`` do not satisfy the moment conditions.
    """
    a = tuple(a_coeffs)
    for k in range(4):
        if abs(sum(float(aj) * (-(j + 1))**k for j, aj in enumerate(a)) - 1) > 1e-12:
            raise ValueError(f"a_coeffs violate sum a_j (-j)^{k} = 1")
    Hs = np.asarray(H_surface, float)
    n = Hs.shape[0]
    dim1 = Hs.ndim
    k = 2 * np.pi * np.fft.fftfreq(n, d=box / n)
    grids = np.meshgrid(*([k] * dim1), indexing="ij")
    A2 = sum(g**2 for g in grids)
    return HeightExtension(H_hat=np.fft.fftn(Hs), c=np.sqrt(1 + A2), a=a, box=box)
