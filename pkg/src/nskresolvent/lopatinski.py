"""
Boundary coupling algebra, the Lopatinski determinant and the kinetic symbol.

Eliminating the tangential and minus-side unknowns from the interface
conditions leaves a 2x2 system for (beta_N+, gamma_N+),

    L (beta_N+, gamma_N+)^T = (2 t1 t2 {A^2 F H_load - G i xi'.h'}, 0)^T,

    L = [[t2 (D t1 - E), t1 (D t2 - E)],
         [rho+ (t1^2 - A^2), rho+ (t2^2 - A^2)]],

with D, E, F, G below.  Its determinant factors as
det L = rho+ lam (t1 - t2) l(lam, xi'), where

    l = mu+ B- (A + B-) n - (rho+/mu+) mu- B+ c3 T,
    n = ((A^2 + B+^2)^2 T - 4 A^2 B+ t1 t2 (t1 + t2)) / lam,
    c3 = A^3 - 3 A^2 B- - A B-^2 - B-^3,
    T = t1^2 + t1 t2 + t2^2 - A^2.
"""

from dataclasses import dataclass, field, asdict
import math

import numpy as np

from .params import validate_params, ValidatedParams
from .symbols import characteristic_roots, SymbolSet, SpectralPoint, roots

__all__ = [
    "FactorizationMismatch", "NoAdmissibleLambda0",
    "CouplingCoefficients", "LopatinskiData", "RegimeConstants",
    "ScanGrid", "ScanReport",
    "coupling_coefficients", "kernel_matrix", "det_route_raw", "det_route_factored",
    "m_symbols", "n_symbol", "n_symbol_stable", "lop_l", "kernel_adjugate", "det_route_expanded",
    "lopatinski_data", "kinetic_symbol", "kinetic_zero_set", "kinetic_limit",
    "omega3", "omega4", "omega1_closed_form", "omega2_closed_form",
    "omega1_printed", "omega2_printed", "empirical_omega1", "empirical_omega2",
    "regime_constants", "classify_regime", "scan_lower_bound", "scan_kinetic_bound",
    "homogeneity_defect",
]

FACTOR_TOL = 1e-8
NEAR_ZERO_RATIO = 1e-8
# regime split |lam|^{1/2} vs A
R_REGIME = 10.0


class FactorizationMismatch(ArithmeticError):
    """The raw and factored determinant routes disagree."""


class NoAdmissibleLambda0(RuntimeError):
    """No candidate lambda0 gives a positive kinetic lower bound."""


def _params(p):
    return p if isinstance(p, ValidatedParams) else validate_params(p)


def _cub(S):
    A, Bm = S.A, S.B_minus
    return A**3 - 3 * A**2 * Bm - A * Bm**2 - Bm**3


@dataclass
class CouplingCoefficients:
    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray


def coupling_coefficients(p, S):
    """D, E, F, G of the first row of the kernel matrix.

    D = 4 mu+ A^2 B+ B- (A + B-)
    E = mu+ B- (A + B-)(A^2 + B+^2)^2 + mu- B+ (A^2 - B+^2) c3
    F = (sigma+/(2 mu+)) {mu+ B- (A + B-)(A^2 + B+^2) - mu- B+ c3} - sigma- A^2 B+ (B- - A)
    G = -mu- B+ c3

    F carries every occurrence of the surface tension; D, E, G do not.
    """
    p = _params(p)
    dc = p.derived
    A, Bp, Bm = S.A, S.B_plus, S.B_minus
    mu, mum = p.mu_plus, p.mu_minus
    c3 = _cub(S)
    ABp = S.A2 + S.Bp2
    D = 4 * mu * S.A2 * Bp * Bm * (A + Bm)
    # A^2 - B+^2 = -(rho+/mu+) lam
    E = mu * Bm * (A + Bm) * ABp**2 - mum * Bp * S.cp * S.lam * c3
    F = (dc.sigma_plus / (2 * mu)) * (mu * Bm * (A + Bm) * ABp - mum * Bp * c3) \
        - dc.sigma_minus * S.A2 * Bp * S.d_BmA
    G = -mum * Bp * c3
    return CouplingCoefficients(D=D, E=E, F=F, G=G)


def kernel_matrix(p, S, cc=None):
    """The 2x2 kernel matrix L, shape ``S.A.shape + (2, 2)``."""
    p = _params(p)
    cc = coupling_coefficients(p, S) if cc is None else cc
    t1, t2, D, E = S.t1, S.t2, cc.D, cc.E
    r = p.rho_plus
    L = np.empty(np.shape(t1) + (2, 2), dtype=complex)
    L[..., 0, 0] = t2 * (D * t1 - E)
    L[..., 0, 1] = t1 * (D * t2 - E)
    L[..., 1, 0] = r * (S.t12 - S.A2)
    L[..., 1, 1] = r * (S.t22 - S.A2)
    return L


def kernel_adjugate(p, S, cc=None):
    """Adjugate (L11, L12, L21, L22) so that L^{-1} = adj / det L."""
    p = _params(p)
    cc = coupling_coefficients(p, S) if cc is None else cc
    r = p.rho_plus
    L11 = r * S.s2 * S.lam
    L12 = -S.t1 * (cc.D * S.t2 - cc.E)
    L21 = -r * S.s1 * S.lam
    L22 = S.t2 * (cc.D * S.t1 - cc.E)
    return L11, L12, L21, L22


def det_route_raw(p, S, cc=None):
    """det L from the entries of L (2x2 cross product)."""
    L = kernel_matrix(p, S, cc)
    return L[..., 0, 0] * L[..., 1, 1] - L[..., 0, 1] * L[..., 1, 0]


def det_route_expanded(p, S, cc=None):
    """det L = rho+ (t1 - t2){E T - D t1 t2 (t1 + t2)}."""
    p = _params(p)
    cc = coupling_coefficients(p, S) if cc is None else cc
    t1, t2 = S.t1, S.t2
    T = S.t12 + t1 * t2 + S.t22 - S.A2
    return p.rho_plus * (t1 - t2) * (cc.E * T - cc.D * t1 * t2 * (t1 + t2))


def m_symbols(p, S):
    """m_1, m_2 with m_i / (t_i (t_i + B+)) = n."""
    p = _params(p)
    r, mu = p.rho_plus, p.mu_plus
    t1, t2, Bp, lam = S.t1, S.t2, S.B_plus, S.lam
    T = S.t12 + t1 * t2 + S.t22 - S.A2
    out = []
    for ti, si in ((t1, S.s1), (t2, S.s2)):
        out.append((r / mu)**2 * lam * ti * (ti + Bp) * T
                   + 4 * S.A2 * Bp * (si * ti * Bp * (ti + Bp) - (si - r / mu) * t1 * t2 * (t1 + t2)))
    return out[0], out[1]


def n_symbol(S):
    """n from its defining expression (divided by lam; cancels for A >> |lam|^{1/2})."""
    t1, t2, Bp = S.t1, S.t2, S.B_plus
    T = S.t12 + t1 * t2 + S.t22 - S.A2
    return ((S.A2 + S.Bp2)**2 * T - 4 * S.A2 * Bp * t1 * t2 * (t1 + t2)) / S.lam


def n_symbol_stable(p, S):
    """n = m_1 / (t_1 (t_1 + B+)), free of the 1/lam cancellation."""
    m1, _ = m_symbols(p, S)
    return m1 / (S.t1 * (S.t1 + S.B_plus))


def lop_l(p, S, n=None):
    """The reduced determinant l(lam, xi'); ``n`` defaults to the stable route."""
    p = _params(p)
    n = n_symbol_stable(p, S) if n is None else n
    t1, t2 = S.t1, S.t2
    T = S.t12 + t1 * t2 + S.t22 - S.A2
    return p.mu_plus * S.B_minus * (S.A + S.B_minus) * n \
        - (p.rho_plus / p.mu_plus) * p.mu_minus * S.B_plus * _cub(S) * T


def det_route_factored(p, S):
    """det L = rho+ lam (t1 - t2) l."""
    p = _params(p)
    return p.rho_plus * S.lam * S.d_t12 * lop_l(p, S)


def _reldiff(a, b):
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), np.finfo(float).tiny)


@dataclass
class LopatinskiData:
    """Kernel matrix and determinant data (arrays broadcast like the symbol set)."""

    L: np.ndarray
    detL: np.ndarray
    detL_factored: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    n: np.ndarray
    l: np.ndarray
    K_H: np.ndarray = None
    det_defect: float = 0.0
    mn_defect: float = 0.0


def lopatinski_data(p, pt=None, S=None, with_kinetic=True, check=True):
    """All determinant quantities at a point or grid, cross-checking both routes.

    Raises
    ------
    FactorizationMismatch
        If det L from the raw matrix and from the factorization differ by more
        than 1e-8 relative, or the m/n identity fails at that level.
    """
    p = _params(p)
    if S is None:
        S = characteristic_roots(p, pt)
    cc = coupling_coefficients(p, S)
    L = kernel_matrix(p, S, cc)
    d1 = L[..., 0, 0] * L[..., 1, 1] - L[..., 0, 1] * L[..., 1, 0]
    n = n_symbol(S)
    l = lop_l(p, S, n)
    d2 = p.rho_plus * S.lam * S.d_t12 * l
    m1, m2 = m_symbols(p, S)
    dd = float(np.max(_reldiff(d1, d2))) if np.size(d1) else 0.0
    mn = max(float(np.max(_reldiff(m1 / (S.t1 * (S.t1 + S.B_plus)), n))),
             float(np.max(_reldiff(m2 / (S.t2 * (S.t2 + S.B_plus)), n)))) if np.size(n) else 0.0
    if check and (dd > FACTOR_TOL or mn > FACTOR_TOL):
        where = np.unravel_index(int(np.argmax(_reldiff(d1, d2))), np.shape(d1)) if np.ndim(d1) else ()
        raise FactorizationMismatch(
            f"det-route defect {dd:.3e}, m/n defect {mn:.3e} (worst index {where})")
    K = kinetic_symbol(p, S) if with_kinetic else None
    return LopatinskiData(L=L, detL=d1, detL_factored=d2, m1=m1, m2=m2, n=n, l=lop_l(p, S),
                          K_H=K, det_defect=dd, mn_defect=mn)


def kinetic_symbol(p, S, R_plus_NN=None, R_minus_NN=None):
    """K_H with (lam + K_H) H(0) = d(0) when h = 0.

    The normal velocities at the interface are u_N+- (0) = A^2 R+-_NN H(0), so
    the kinetic condition gives

        K_H = -(rho- A^2 R-_NN - rho+ A^2 R+_NN) / (rho- - rho+).
    """
    p = _params(p)
    if R_plus_NN is None or R_minus_NN is None:
        from .multipliers import coefficient_table
        tab = coefficient_table(p, S, names=("R+_JN", "R-_JN"))
        R_plus_NN = tab["R+_JN"][..., -1]
        R_minus_NN = tab["R-_JN"][..., -1]
    dr = p.rho_minus - p.rho_plus
    return -(p.rho_minus * S.A2 * R_minus_NN - p.rho_plus * S.A2 * R_plus_NN) / dr


def omega3(p):
    """Limit of K_H / A as A / |lam|^{1/2} -> infinity."""
    p = _params(p)
    dr = p.rho_minus - p.rho_plus
    return (p.rho_plus / dr)**2 * p.sigma / (2 * p.mu_plus) \
        + (p.rho_minus / dr)**2 * p.sigma / (2 * p.mu_minus)


def omega4(p, epsilon):
    w3 = omega3(p)
    s = math.sin(epsilon / 2)
    return min(0.25, w3 / 4, s / 2, w3 * s / 2)


def omega1_closed_form(p):
    """Leading coefficient of l / A^6 for A >> |lam|^{1/2}: 8 rho+ (1 + mu-/mu+)."""
    p = _params(p)
    return 8 * p.rho_plus * (1 + p.mu_minus / p.mu_plus)


def omega1_printed(p):
    """The printed asymptotic constant 24 rho+ + 8 rho+ mu+ mu-, kept for comparison."""
    p = _params(p)
    return 24 * p.rho_plus + 8 * p.rho_plus * p.mu_plus * p.mu_minus


def omega2_closed_form(p, arg=0.0):
    """Leading coefficient of l / lam^3 for |lam|^{1/2} >> A, at arg lam = ``arg``.

    Equals l(lam, 0)/lam^3, which l attains exactly at A = 0.
    """
    p = _params(p)
    lam = np.exp(1j * arg)
    S = characteristic_roots(p, (np.asarray(lam), np.zeros(p.dim - 1)), check_degenerate=False)
    return complex(lop_l(p, S) / lam**3)


def omega2_printed(p, arg=0.0):
    """The printed constant (s1 + sqrt(s1 s2) + s2)/sqrt(s1) (rho+ mu+/mu- + rho+^5 mu-/mu+^3)."""
    p = _params(p)
    s1, s2 = p.derived.s1, p.derived.s2
    r, mu, mum = p.rho_plus, p.mu_plus, p.mu_minus
    return complex((s1 + np.sqrt(s1 * s2) + s2) / np.sqrt(s1) * (r * mu / mum + r**5 * mum / mu**3))


def _richardson(h, v):
    """Polynomial extrapolation of samples v(h) to h = 0 (Neville)."""
    h = list(map(float, h))
    P = [complex(x) for x in v]
    n = len(P)
    for k in range(1, n):
        for i in range(n - k):
            P[i] = (h[i] * P[i + 1] - h[i + k] * P[i]) / (h[i] - h[i + k])
    return P[0]


def empirical_omega1(p, arg=0.0, deltas=(4e-2, 2e-2, 1e-2, 5e-3)):
    """Extrapolate l / A^6 to delta1 = |lam|^{1/2}/A -> 0 (A = 1, |lam| = delta^2)."""
    p = _params(p)
    vals = []
    for d in deltas:
        lam = d**2 * np.exp(1j * arg)
        xi = np.zeros(p.dim - 1)
        xi[0] = 1.0
        S = characteristic_roots(p, (np.asarray(lam), xi), check_degenerate=False)
        vals.append(complex(lop_l(p, S)))
    return _richardson(deltas, vals), vals


def empirical_omega2(p, arg=0.0, deltas=(4e-2, 2e-2, 1e-2, 5e-3)):
    """Extrapolate l / lam^3 to delta2 = A / |lam|^{1/2} -> 0 (|lam| = 1, A = delta)."""
    p = _params(p)
    lam = np.exp(1j * arg)
    vals = []
    for d in deltas:
        xi = np.zeros(p.dim - 1)
        xi[0] = d
        S = characteristic_roots(p, (np.asarray(lam), xi), check_degenerate=False)
        vals.append(complex(lop_l(p, S) / lam**3))
    return _richardson(deltas, vals), vals


@dataclass
class RegimeConstants:
    omega1: complex
    omega2: complex
    omega3: float
    omega4: float
    omega1_closed: float
    omega1_printed: float
    omega2_closed: complex
    omega2_printed: complex

    def as_dict(self):
        d = {}
        for k, v in asdict(self).items():
            d[k] = [v.real, v.imag] if isinstance(v, complex) else v
        return d


def regime_constants(p, epsilon=math.pi / 3, arg=0.0):
    p = _params(p)
    w1, _ = empirical_omega1(p, arg)
    w2, _ = empirical_omega2(p, arg)
    return RegimeConstants(
        omega1=w1, omega2=w2, omega3=omega3(p), omega4=omega4(p, epsilon),
        omega1_closed=omega1_closed_form(p), omega1_printed=omega1_printed(p),
        omega2_closed=omega2_closed_form(p, arg), omega2_printed=omega2_printed(p, arg),
    )


def homogeneity_defect(p, lam, xi):
    """Relative defect of l(lam, xi) = s^6 l(lam/s^2, xi/s), s = |lam|^{1/2} + |xi|."""
    p = _params(p)
    lam = np.asarray(lam, complex)
    xi = np.asarray(xi, float)
    s = np.sqrt(np.abs(lam)) + np.linalg.norm(xi, axis=-1)
    S = characteristic_roots(p, (lam, xi), check_degenerate=False)
    St = characteristic_roots(p, (lam / s**2, xi / s[..., None]), check_degenerate=False)
    a = lop_l(p, S)
    b = s**6 * lop_l(p, St)
    return _reldiff(a, b)


# ---------------------------------------------------------------- scans

@dataclass
class ScanGrid:
    """Tensor grid: log-uniform |lam| and A, uniform arg lam.

    ``decades`` default 6 per axis starting at ``lam_min``/``A_min``.
    """

    lam_min: float = 1e-3
    lam_max: float = 1e3
    n_mod: int = 48
    n_arg: int = 16
    A_min: float = 1e-3
    A_max: float = 1e3
    n_A: int = 48
    epsilon: float = math.pi / 3
    dim: int = 2

    def axes(self):
        mod = np.logspace(np.log10(self.lam_min), np.log10(self.lam_max), self.n_mod)
        arg = np.linspace(-(math.pi - self.epsilon), math.pi - self.epsilon, self.n_arg)
        A = np.logspace(np.log10(self.A_min), np.log10(self.A_max), self.n_A)
        return mod, arg, A

    def points(self):
        """Flattened (lam, xi) arrays; xi' points along the first axis."""
        mod, arg, A = self.axes()
        M, T, AA = np.meshgrid(mod, arg, A, indexing="ij")
        lam = (M * np.exp(1j * T)).ravel()
        xi = np.zeros((lam.size, self.dim - 1))
        xi[:, 0] = AA.ravel()
        return lam, xi

    def refined(self, factor=2):
        g = ScanGrid(**asdict(self))
        g.n_mod = (self.n_mod - 1) * factor + 1
        g.n_arg = (self.n_arg - 1) * factor + 1
        g.n_A = (self.n_A - 1) * factor + 1
        return g

    @property
    def size(self):
        return self.n_mod * self.n_arg * self.n_A

    def as_dict(self):
        return asdict(self)


@dataclass
class ScanReport:
    """Per-point ratios plus a summary.

    ``columns`` maps column name to 1-d arrays of equal length (CSV rows);
    ``summary`` is JSON-serializable.
    """

    name: str
    columns: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    passed: bool = True


def classify_regime(lam, A, R=R_REGIME):
    """'delta1' (A >= R |lam|^{1/2}), 'delta2' (|lam|^{1/2} >= R A) or 'compact'."""
    sl = np.sqrt(np.abs(lam))
    A = np.asarray(A, float)
    out = np.full(np.broadcast(sl, A).shape, "compact", dtype=object)
    out[A >= R * sl] = "delta1"
    out[sl >= R * A] = "delta2"
    return out


def _lop_ratio(p, lam, xi):
    S = characteristic_roots(p, (lam, xi), check_degenerate=False)
    l = lop_l(p, S)
    return np.abs(l) / S.scale**6, S


def scan_lower_bound(p, grid=None, refine=True):
    """Scan |l| / (|lam|^{1/2} + A)^6 over a grid.

    The summary holds the infimum and its location, the infimum on the refined
    grid and its relative change, per-regime infima, the empirical and closed
    form regime constants, and the count of near-zero points (< 1e-8).
    """
    p = _params(p)
    grid = ScanGrid(dim=p.dim) if grid is None else grid
    lam, xi = grid.points()
    ratio, S = _lop_ratio(p, lam, xi)
    A = S.A
    reg = classify_regime(lam, A)
    i = int(np.argmin(ratio))
    inf = float(ratio[i])
    summary = {
        "points": int(lam.size),
        "infimum": inf,
        "argmin": {"abs_lambda": float(abs(lam[i])), "arg_lambda": float(np.angle(lam[i])), "A": float(A[i])},
        "near_zero_points": int(np.sum(ratio < NEAR_ZERO_RATIO)),
        "grid": grid.as_dict(),
    }
    for r in ("delta1", "delta2", "compact"):
        sel = reg == r
        summary[f"infimum_{r}"] = float(ratio[sel].min()) if np.any(sel) else None
    passed = inf > 0 and summary["near_zero_points"] == 0
    if refine:
        g2 = grid.refined()
        lam2, xi2 = g2.points()
        r2, _ = _lop_ratio(p, lam2, xi2)
        inf2 = float(r2.min())
        change = abs(inf2 - inf) / inf if inf > 0 else math.inf
        summary.update({"refined_points": int(lam2.size), "refined_infimum": inf2,
                        "refinement_change": change})
        passed = passed and change < 0.05
    # homogeneity probe on a subsample
    sub = slice(None, None, max(1, lam.size // 2000))
    hd = float(np.max(homogeneity_defect(p, lam[sub], xi[sub])))
    summary["homogeneity_defect"] = hd
    passed = passed and hd <= 1e-10
    rc = regime_constants(p, grid.epsilon)
    summary["regime_constants"] = rc.as_dict()
    summary["omega1_matches_printed"] = bool(abs(rc.omega1 - rc.omega1_printed) <= 1e-3 * abs(rc.omega1))
    summary["omega2_matches_printed"] = bool(abs(rc.omega2 - rc.omega2_printed) <= 1e-3 * abs(rc.omega2))
    cols = {"abs_lambda": np.abs(lam), "arg_lambda": np.angle(lam), "A": A,
            "ratio": ratio, "regime": reg}
    return ScanReport(name="lopatinski", columns=cols, summary=summary, passed=bool(passed))


def _kinetic_ratio(p, lam, xi):
    S = characteristic_roots(p, (lam, xi), check_degenerate=False)
    K = kinetic_symbol(p, S)
    return np.abs(lam + K) / S.scale, K, S


def kinetic_zero_set(p, epsilon=math.pi / 3, n_theta=241, ratios=None):
    """Zeros of lam + K_H(lam, xi') in the sector, located through homogeneity.

    K_H is homogeneous of degree one under (lam, A) -> (c^2 lam, c A), so with
    lam = z^2 e^{i theta}, A = r z the equation lam + K_H = 0 reads
    z = -K_H(e^{i theta}, r) e^{-i theta}; a zero exists where the right-hand
    side is real and positive.  Sign changes of its imaginary part in theta
    are refined by bisection (scipy brentq) for each r.

    Returns
    -------
    list of (lam, A)
        One entry per zero found.
    """
    from scipy.optimize import brentq
    p = _params(p)
    ratios = np.logspace(-4, 4, 321) if ratios is None else np.asarray(ratios, float)
    th = np.linspace(-(math.pi - epsilon), math.pi - epsilon, n_theta)

    def w(theta, r):
        xi = np.zeros(np.shape(theta) + (p.dim - 1,))
        xi[..., 0] = r
        lam = np.exp(1j * np.asarray(theta))
        S = characteristic_roots(p, (lam, xi), check_degenerate=False)
        return -kinetic_symbol(p, S) * np.exp(-1j * np.asarray(theta))

    zeros = []
    for r in ratios:
        vals = w(th, np.full(th.shape, r))
        im = vals.imag
        for k in np.nonzero(np.sign(im[:-1]) * np.sign(im[1:]) <= 0)[0]:
            if im[k] == im[k + 1]:
                continue
            t0 = brentq(lambda t: float(w(np.array([t]), r)[0].imag), th[k], th[k + 1], xtol=1e-14)
            z = complex(w(np.array([t0]), r)[0])
            if z.real > 0:
                zeros.append((z.real**2 * complex(math.cos(t0), math.sin(t0)), r * z.real))
    return zeros


def scan_kinetic_bound(p, grid=None, lambda0_candidates=(0.0, 1e-2, 1e-1, 1.0, 10.0, 100.0),
                       threshold=1e-6, omega3_grid=None, zero_margin=1.05):
    """Smallest lambda0 with inf_{|lam| > lambda0} |lam + K_H|/(|lam|^{1/2} + A) > threshold.

    A candidate is admissible only if it also exceeds ``zero_margin`` times the
    largest modulus of a zero of lam + K_H in the sector
    (:func:`kinetic_zero_set`), so grid sampling cannot miss a zero.  Also checks the regime limit K_H / A -> omega3 along A -> infinity at a few
    fixed lam, and compares the infimum with omega4.

    Raises
    ------
    NoAdmissibleLambda0
        If every candidate fails.
    """
    p = _params(p)
    grid = ScanGrid(dim=p.dim) if grid is None else grid
    lam, xi = grid.points()
    ratio, K, S = _kinetic_ratio(p, lam, xi)
    A = S.A
    reg = classify_regime(lam, A)
    zs = kinetic_zero_set(p, grid.epsilon)
    zmax = max((abs(z[0]) for z in zs), default=0.0)
    chosen = None
    per = {}
    for l0 in sorted(lambda0_candidates):
        sel = np.abs(lam) > l0
        if not np.any(sel):
            continue
        inf = float(ratio[sel].min())
        per[repr(float(l0))] = inf
        if chosen is None and inf > threshold and l0 >= zero_margin * zmax:
            chosen = float(l0)
    if chosen is None:
        bad = np.argsort(ratio)[:5]
        pts = [(complex(lam[j]), float(A[j])) for j in bad]
        raise NoAdmissibleLambda0(f"no lambda0 among {lambda0_candidates}; worst points {pts}")
    sel = np.abs(lam) > chosen
    w4 = omega4(p, grid.epsilon)
    inf_sel = float(ratio[sel].min())
    limit = kinetic_limit(p, omega3_grid)
    summary = {
        "points": int(lam.size),
        "lambda0": chosen,
        "zero_count": len(zs),
        "max_zero_modulus": zmax,
        "infimum_by_lambda0": per,
        "infimum": inf_sel,
        "omega3": omega3(p),
        "omega4": w4,
        "infimum_over_omega4": inf_sel / w4 if w4 > 0 else None,
        "regime_infima": {r: (float(ratio[sel & (reg == r)].min()) if np.any(sel & (reg == r)) else None)
                          for r in ("delta1", "delta2", "compact")},
        "omega3_limit": limit,
        "grid": grid.as_dict(),
    }
    passed = inf_sel > threshold and limit["max_rel_error"] < 0.01
    cols = {"abs_lambda": np.abs(lam), "arg_lambda": np.angle(lam), "A": A,
            "ratio": ratio, "regime": reg, "K_H_re": K.real, "K_H_im": K.imag}
    return ScanReport(name="kinetic", columns=cols, summary=summary, passed=bool(passed))


def kinetic_limit(p, lams=None, delta1=(5e-4, 1e-4)):
    """K_H / A at A = |lam|^{1/2}/delta1 for a few lam, against omega3."""
    p = _params(p)
    lams = (1 + 0.5j, 1.0, -0.3 + 2j) if lams is None else lams
    w3 = omega3(p)
    rows = []
    err = 0.0
    for lam in lams:
        for d in delta1:
            Aval = math.sqrt(abs(lam)) / d
            xi = np.zeros(p.dim - 1)
            xi[0] = Aval
            S = characteristic_roots(p, (np.asarray(lam, complex), xi), check_degenerate=False)
            K = complex(kinetic_symbol(p, S))
            ratio = K / Aval
            e = abs(ratio - w3) / w3 if w3 > 0 else abs(ratio)
            err = max(err, e)
            rows.append({"lambda": [lam.real, lam.imag] if isinstance(lam, complex) else [float(lam), 0.0],
                         "delta1": d, "K_over_A": [ratio.real, ratio.imag], "rel_error": e})
    return {"omega3": w3, "rows": rows, "max_rel_error": err}
