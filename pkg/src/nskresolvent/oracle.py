"""
Chebyshev collocation solver for the transformed ODE system.

The oracle discretizes the bulk equations and the interface conditions as
written, on [0, L+] and [-L-, 0], and shares no algebra with the closed-form
solver: it only needs the physical constants, lambda and xi'.  The plus side
is posed as a first-order system in (u+, u+', rho+, rho+', rho+''), the minus
side in (u-, u-', pi-).  The mass and divergence equations are algebraic and
are imposed at every node.  Each differential equation gives up one endpoint
row to a boundary condition: Dirichlet tails u = 0, rho+' = 0 at the far ends
and the interface conditions at x_N = 0.
"""

from dataclasses import dataclass, field, asdict
import json
import math

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq

from .params import ValidatedParams, validate_params
from .symbols import SpectralPoint
from .multipliers import LOAD

__all__ = [
    "IllConditioned", "TruncationTooShort", "CollocationConfig", "OracleSolution",
    "ComparisonReport", "collocation_solve", "compare", "converge", "manufactured_check",
    "cheb_nodes", "cheb_diff", "cheb_interp", "IntervalMap", "stretch_parameter",
]

COND_LIMIT = 1e14
TAIL_TOL = 1e-8
# near-interface resolution relative to the fast decay length
STRETCH_TARGET = 4.0


class IllConditioned(ArithmeticError):
    """The collocation matrix is numerically singular."""

    def __init__(self, message="", condition=math.inf):
        super().__init__(message)
        self.condition = condition


class TruncationTooShort(ArithmeticError):
    """The discrete solution has not decayed at the truncation point."""


@dataclass(frozen=True)
class CollocationConfig:
    """Discretization of the two half-lines.

    Parameters
    ----------
    n : int
        Polynomial degree per side (n + 1 nodes), at least 48.
    decay_lengths : float
        L times the smallest decay rate on each side, at least 30.
    L_plus, L_minus : float, optional
        Explicit truncation lengths; by default scaled from the decay rates.
    stretch : bool
        Exponentially stretched node map when the decay rates on a side
        differ by more than a factor STRETCH_TARGET.
    """

    n: int = 64
    decay_lengths: float = 30.0
    L_plus: float = None
    L_minus: float = None
    stretch: bool = True

    def __post_init__(self):
        if self.n < 48:
            raise ValueError("n must be at least 48")
        if self.decay_lengths < 30:
            raise ValueError("decay_lengths must be at least 30")

    def lengths(self, rates_plus, rates_minus):
        Lp = self.L_plus or self.decay_lengths / min(rates_plus)
        Lm = self.L_minus or self.decay_lengths / min(rates_minus)
        if self.L_plus and self.L_plus * min(rates_plus) < 30:
            raise TruncationTooShort(f"L+ = {self.L_plus} below 30 decay lengths")
        if self.L_minus and self.L_minus * min(rates_minus) < 30:
            raise TruncationTooShort(f"L- = {self.L_minus} below 30 decay lengths")
        return Lp, Lm


def cheb_nodes(n):
    """Chebyshev points cos(pi k / n), k = 0..n."""
    return np.cos(np.pi * np.arange(n + 1) / n)


def cheb_diff(n):
    """Chebyshev differentiation matrix on [-1, 1] (negative-sum diagonal)."""
    x = cheb_nodes(n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0)**np.arange(n + 1)
    X = x[:, None] - x[None, :]
    D = np.outer(c, 1 / c) / (X + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return D


def _decay_rates(p, lam, A):
    # the decay exponents only fix the domain geometry; they are not used in the system
    dc = p.derived
    r = lambda a: float(np.sqrt(A**2 + a * lam).real)
    plus = [r(p.rho_plus / p.mu_plus), r(dc.s1), r(dc.s2)]
    minus = [r(p.rho_minus / p.mu_minus), A]
    return plus, minus


def stretch_parameter(rates, target=STRETCH_TARGET):
    """beta with beta / expm1(beta) = target * (slow rate / fast rate), 0 if not needed."""
    q = target * min(rates) / max(rates)
    if q >= 1:
        return 0.0
    return float(brentq(lambda b: b / math.expm1(b) - q, 1e-12, 700.0))


@dataclass(frozen=True)
class IntervalMap:
    """x = sign L expm1(beta t) / expm1(beta), t = (1 - s)/2, s a Chebyshev node.

    beta = 0 is the affine map.  The stretching puts more nodes near the
    interface, where the fast modes live, while L still covers the slow ones.
    """

    L: float
    beta: float
    sign: float = 1.0

    def _t_to_x(self, t):
        if self.beta == 0:
            return self.L * t
        return self.L * np.expm1(self.beta * t) / math.expm1(self.beta)

    def x(self, s):
        return self.sign * self._t_to_x((1 - np.asarray(s, float)) / 2)

    def dxdt(self, s):
        t = (1 - np.asarray(s, float)) / 2
        if self.beta == 0:
            return self.L * np.ones_like(t) * self.sign
        return self.sign * self.L * self.beta * np.exp(self.beta * t) / math.expm1(self.beta)

    def s(self, x):
        y = np.abs(np.asarray(x, float)) / self.L
        t = y if self.beta == 0 else np.log1p(y * math.expm1(self.beta)) / self.beta
        return 1 - 2 * t

    def diff(self, n):
        """d/dx on the mapped nodes: d/dt = -2 d/ds."""
        s = cheb_nodes(n)
        return (-2 * cheb_diff(n)) / self.dxdt(s)[:, None]


def cheb_interp(values, s_nodes, s):
    """Barycentric interpolation on Chebyshev points of the second kind."""
    n = len(s_nodes) - 1
    w = (-1.0)**np.arange(n + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    s = np.atleast_1d(np.asarray(s, float))
    d = s[:, None] - s_nodes[None, :]
    hit = np.isclose(d, 0, atol=1e-15, rtol=0)
    d[hit] = 1.0
    c = w / d
    vals = np.asarray(values).reshape(n + 1, -1)
    out = (c @ vals) / c.sum(axis=1)[:, None]
    rows, cols = np.nonzero(hit)
    out[rows] = vals[cols]
    return out.reshape((len(s),) + np.asarray(values).shape[1:])


@dataclass
class OracleSolution:
    """Nodal values of the collocation solution.

    ``plus`` maps "u" (n+1, N), "rho" (n+1,) at nodes ``x_plus``; ``minus``
    maps "u" and "pi" at ``x_minus``.
    """

    x_plus: np.ndarray
    x_minus: np.ndarray
    plus: dict
    minus: dict
    H0: complex
    condition: float
    config: CollocationConfig
    maps: tuple = None
    tail: float = 0.0

    def at(self, x_N):
        """Interpolated fields at stations ``x_N`` (one half-line, or 0)."""
        x = np.asarray(x_N, float)
        sn = cheb_nodes(self.config.n)
        out = {}
        if np.all(x >= 0):
            v = cheb_interp(np.column_stack([self.plus["u"], self.plus["rho"]]), sn,
                            self.maps[0].s(x))
            out["u_plus"], out["rho_plus"] = v[..., :-1], v[..., -1]
        if np.all(x <= 0):
            v = cheb_interp(np.column_stack([self.minus["u"], self.minus["pi"]]), sn,
                            self.maps[1].s(x))
            out["u_minus"], out["pi_minus"] = v[..., :-1], v[..., -1]
        if not out:
            raise ValueError("stations must lie on one half-line")
        return out


def _point(pt):
    if isinstance(pt, SpectralPoint):
        pt.check()
        return pt.lam, np.asarray(pt.xi_prime, float)
    return complex(pt[0]), np.ravel(np.asarray(pt[1], float))


def collocation_solve(p, pt, data, cfg=None, given_d="append", forcing=None, interface_rhs=None):
    """Solve the transformed interface problem by Chebyshev collocation.

    Parameters
    ----------
    p : PhysicalParams
    pt : SpectralPoint or (lam, xi')
    data : BoundaryData
        Given-H or given-d mode.
    cfg : CollocationConfig
    given_d : {"append", "kinetic"}
        In given-d mode either append H(0) as an unknown with the kinetic
        equation as extra row, or take H(0) from the closed-form K_H and
        solve in given-H mode.
    forcing : dict, optional
        Right-hand sides of bulk equations as callables of x_N: keys
        "mass+", "momentum+" (returns (..., N)), "div-", "momentum-".
    interface_rhs : dict, optional
        Extra right-hand sides of interface rows: "tangential" (N-1,),
        "normal+", "normal-", "neumann".

    Returns
    -------
    OracleSolution

    Raises
    ------
    IllConditioned, TruncationTooShort
    """
    p = p if isinstance(p, ValidatedParams) else validate_params(p)
    cfg = cfg or CollocationConfig()
    lam, xi = _point(pt)
    N = p.dim
    n1 = N - 1
    if xi.size != n1:
        raise ValueError(f"xi' must have {n1} components")
    A = float(np.linalg.norm(xi))
    A2 = A * A
    ix = 1j * xi
    h = np.asarray(data.h_hat, complex)
    if data.mode == "given-d" and given_d == "kinetic":
        from .mode_solver import solve_mode, BoundaryData
        H0 = solve_mode(p, (lam, xi), data).H0
        data = BoundaryData(h_hat=tuple(h), H_hat=H0)
    unknown_H = data.mode == "given-d"

    rates = _decay_rates(p, lam, A)
    Lp, Lm = cfg.lengths(*rates)
    n = cfg.n
    m = n + 1
    s = cheb_nodes(n)
    mp = IntervalMap(Lp, stretch_parameter(rates[0]) if cfg.stretch else 0.0, 1.0)
    mm = IntervalMap(Lm, stretch_parameter(rates[1]) if cfg.stretch else 0.0, -1.0)
    xp, xm = mp.x(s), mm.x(s)
    Dp, Dm = mp.diff(n), mm.diff(n)
    I = np.eye(m)

    rp, rm, mu, mum, nu, ka = (p.rho_plus, p.rho_minus, p.mu_plus, p.mu_minus,
                               p.nu_plus, p.kappa_plus)
    sgp, sgm = p.derived.sigma_plus, p.derived.sigma_minus

    # variable indices
    nvp, nvm = 2 * N + 3, 2 * N + 1
    U, V, R, R1, R2 = 0, N, 2 * N, 2 * N + 1, 2 * N + 2
    MU, MV, PI = nvp, nvp + N, nvp + 2 * N
    nunk = (nvp + nvm) * m + (1 if unknown_H else 0)
    iH = nunk - 1
    Mat = np.zeros((nunk, nunk), complex)
    rhs = np.zeros(nunk, complex)

    def blk(eq, var, B):
        Mat[eq * m:(eq + 1) * m, var * m:(var + 1) * m] += B

    # plus side equations: u' = v, rho' = r1, r1' = r2, momentum, mass
    E_U, E_R, E_R1, E_MOM, E_MASS = 0, N, N + 1, N + 2, 2 * N + 2
    for J in range(N):
        blk(E_U + J, U + J, Dp)
        blk(E_U + J, V + J, -I)
    blk(E_R, R, Dp)
    blk(E_R, R1, -I)
    blk(E_R1, R1, Dp)
    blk(E_R1, R2, -I)
    for j in range(n1):
        e = E_MOM + j
        blk(e, U + j, (rp * lam + mu * A2) * I)
        blk(e, V + j, -mu * Dp)
        for k in range(n1):
            blk(e, U + k, -nu * ix[j] * ix[k] * I)
        blk(e, V + n1, -nu * ix[j] * I)
        blk(e, R2, -ix[j] * rp * ka * I)
        blk(e, R, ix[j] * rp * ka * A2 * I)
    e = E_MOM + n1
    blk(e, U + n1, (rp * lam + mu * A2) * I)
    blk(e, V + n1, -(mu + nu) * Dp)
    for k in range(n1):
        blk(e, V + k, -nu * ix[k] * I)
    blk(e, R2, -rp * ka * Dp)
    blk(e, R1, rp * ka * A2 * I)
    blk(E_MASS, R, lam * I)
    for k in range(n1):
        blk(E_MASS, U + k, rp * ix[k] * I)
    blk(E_MASS, V + n1, rp * I)

    # minus side: u' = v, momentum, divergence
    F_U, F_MOM, F_DIV = nvp, nvp + N, nvp + 2 * N
    for J in range(N):
        blk(F_U + J, MU + J, Dm)
        blk(F_U + J, MV + J, -I)
    for J in range(N):
        e = F_MOM + J
        blk(e, MU + J, (rm * lam + mum * A2) * I)
        blk(e, MV + J, -mum * Dm)
        blk(e, PI, (ix[J] * I) if J < n1 else Dm)
    for k in range(n1):
        blk(F_DIV, MU + k, ix[k] * I)
    blk(F_DIV, MV + n1, I)

    if forcing:
        fx = {k: v for k, v in forcing.items()}
        if "mass+" in fx:
            rhs[E_MASS * m:(E_MASS + 1) * m] = fx["mass+"](xp)
        if "momentum+" in fx:
            f = np.asarray(fx["momentum+"](xp))
            for J in range(N):
                rhs[(E_MOM + J) * m:(E_MOM + J + 1) * m] = f[:, J]
        if "div-" in fx:
            rhs[F_DIV * m:(F_DIV + 1) * m] = fx["div-"](xm)
        if "momentum-" in fx:
            f = np.asarray(fx["momentum-"](xm))
            for J in range(N):
                rhs[(F_MOM + J) * m:(F_MOM + J + 1) * m] = f[:, J]

    def row(eq, k):
        r = eq * m + k
        Mat[r] = 0
        rhs[r] = 0
        return r

    col = lambda var, k: var * m + k
    last = n
    # far-field Dirichlet tails
    for J in range(N):
        Mat[row(E_U + J, last), col(U + J, last)] = 1
        Mat[row(F_U + J, last), col(MU + J, last)] = 1
    Mat[row(E_R, last), col(R1, last)] = 1

    ir = interface_rhs or {}
    load_H = lambda r, sig: (r, -LOAD * sig * A2)
    # Neumann condition on rho+
    r = row(E_R1, 0)
    Mat[r, col(R1, 0)] = 1
    rhs[r] = ir.get("neumann", 0)
    # tangential stress balance
    tang = np.asarray(ir.get("tangential", np.zeros(n1)), complex)
    for j in range(n1):
        r = row(E_MOM + j, 0)
        Mat[r, col(MV + j, 0)] += mum
        Mat[r, col(MU + n1, 0)] += mum * ix[j]
        Mat[r, col(V + j, 0)] += -mu
        Mat[r, col(U + n1, 0)] += -mu * ix[j]
        rhs[r] = tang[j]
    # normal stress, plus side
    r = row(E_MOM + n1, 0)
    Mat[r, col(V + n1, 0)] += 2 * mu + (nu - mu)
    for k in range(n1):
        Mat[r, col(U + k, 0)] += (nu - mu) * ix[k]
    Mat[r, col(R2, 0)] += rp * ka
    Mat[r, col(R, 0)] += -rp * ka * A2
    rhs[r] = ir.get("normal+", 0)
    rows_H = [load_H(r, sgp)]
    # velocity jump
    for j in range(n1):
        r = row(F_MOM + j, 0)
        Mat[r, col(MU + j, 0)] = 1
        Mat[r, col(U + j, 0)] = -1
        rhs[r] = h[j]
    # normal stress, minus side
    r = row(F_MOM + n1, 0)
    Mat[r, col(MV + n1, 0)] += 2 * mum
    Mat[r, col(PI, 0)] += -1
    rhs[r] = ir.get("normal-", 0)
    rows_H.append(load_H(r, sgm))

    if unknown_H:
        for r, c in rows_H:
            Mat[r, iH] = c
        Mat[iH, iH] = lam
        Mat[iH, col(MU + n1, 0)] = -rm / (rm - rp)
        Mat[iH, col(U + n1, 0)] = rp / (rm - rp)
        rhs[iH] = data.d_hat
    else:
        H0 = complex(data.H_hat)
        for r, c in rows_H:
            rhs[r] -= c * H0

    # row equilibration, then dense LU with partial pivoting
    sc = np.abs(Mat).max(axis=1)
    sc[sc == 0] = 1
    Mat /= sc[:, None]
    rhs /= sc
    lu, piv = sla.lu_factor(Mat, check_finite=False)
    anorm = np.abs(Mat).sum(axis=0).max()
    rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
    cond = math.inf if rcond == 0 else 1 / float(rcond)
    if not cond < COND_LIMIT:
        raise IllConditioned(f"collocation matrix condition estimate {cond:.3e}", cond)
    y = sla.lu_solve((lu, piv), rhs, check_finite=False)

    g = lambda var: y[var * m:(var + 1) * m]
    up = np.column_stack([g(U + J) for J in range(N)])
    um = np.column_stack([g(MU + J) for J in range(N)])
    sol = OracleSolution(
        x_plus=xp, x_minus=xm, plus={"u": up, "rho": g(R)}, minus={"u": um, "pi": g(PI)},
        H0=complex(y[iH]) if unknown_H else complex(data.H_hat), condition=cond, config=cfg,
        maps=(mp, mm))
    sol.tail = _tail(sol)
    if sol.tail > TAIL_TOL:
        raise TruncationTooShort(f"relative tail amplitude {sol.tail:.3e} beyond 3/4 of the domain")
    return sol


def _tail(sol):
    # largest relative amplitude on the outer quarter of each half-line
    t = 0.0
    big = max(np.abs(v).max() for side in (sol.plus, sol.minus) for v in side.values())
    for xs, side in ((sol.x_plus, sol.plus), (sol.x_minus, sol.minus)):
        far = np.abs(xs) >= 0.75 * np.abs(xs).max()
        for v in side.values():
            a = np.abs(v.reshape(len(xs), -1))
            top = a.max()
            # fields at round-off level carry no decay information
            if top > 1e-12 * big:
                t = max(t, a[far].max() / top)
    return t


# ---------------------------------------------------------------- comparison

COMPONENTS = ("u_plus", "rho_plus", "u_minus", "pi_minus")


@dataclass
class ComparisonReport:
    """Relative sup errors of the oracle against the closed form.

    ``errors`` maps component names (u_plus_1, ..., rho_plus, pi_minus) to
    sup |closed - oracle| / sup |closed| over the stations; ``table`` lists
    (n, max error) for each resolution tried.
    """

    errors: dict
    worst: str
    max_error: float
    table: list = field(default_factory=list)
    ratios: list = field(default_factory=list)
    converged: bool = True

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, default=float)

    def to_csv_rows(self):
        return [(k, repr(float(v))) for k, v in sorted(self.errors.items())]


def _split(name, arr):
    arr = np.asarray(arr)
    if arr.ndim == 1:
        return {name: arr}
    return {f"{name}_{j + 1}": arr[:, j] for j in range(arr.shape[1])}


def _errors(sol_closed, sol_oracle, stations):
    from .mode_solver import eval_mode, default_stations
    if stations is None:
        stations = default_stations(sol_closed)
    xp, xm = (np.asarray(stations[0], float), np.asarray(stations[1], float))
    errs = {}
    for xs in (xp, xm):
        if not xs.size:
            continue
        ref = eval_mode(sol_closed, xs, 0)
        got = sol_oracle.at(xs)
        for comp in COMPONENTS:
            if comp not in ref:
                continue
            a, b = _split(comp, ref[comp]), _split(comp, got[comp])
            for k in a:
                scale = np.abs(a[k]).max()
                diff = np.abs(a[k] - b[k]).max()
                # components that vanish identically are measured against the field scale
                if scale < 1e-13 * max(1.0, np.abs(ref[comp]).max()):
                    scale = max(np.abs(ref[comp]).max(), 1e-300)
                errs[k] = float(diff / scale) if scale > 0 else float(diff)
    errs["H0"] = abs(sol_closed.H0 - sol_oracle.H0) / max(abs(sol_closed.H0), 1e-300) \
        if sol_closed.H0 != 0 else abs(sol_oracle.H0)
    return errs


def compare(sol_closed, sol_oracle, stations=None, table=None, floor=1e-10):
    """Compare a closed-form solution with an oracle solution.

    Parameters
    ----------
    sol_closed : ModeSolution
    sol_oracle : OracleSolution or list of OracleSolution
        A list is read as a refinement sequence in increasing n; the report
        is then built from the last entry and the convergence table from all.
    stations : (x_plus, x_minus), optional
        Defaults to the closed-form solver's stations.

    Returns
    -------
    ComparisonReport
    """
    seq = sol_oracle if isinstance(sol_oracle, (list, tuple)) else [sol_oracle]
    rows = []
    errs = None
    for so in seq:
        errs = _errors(sol_closed, so, stations)
        rows.append((so.config.n, max(errs.values())))
    ratios = [rows[k][1] / rows[k + 1][1] if rows[k + 1][1] > 0 else math.inf
              for k in range(len(rows) - 1)]
    # spectral convergence: each doubling gains a factor 10 until the floor
    ok = all(r > 10 or rows[k][1] < floor or rows[k + 1][1] < floor
             for k, r in enumerate(ratios))
    worst = max(errs, key=errs.get)
    return ComparisonReport(errors=errs, worst=worst, max_error=errs[worst], table=rows,
                            ratios=ratios, converged=ok)


def converge(p, pt, data, ns=(48, 96, 192), tol=1e-6, **kw):
    """Closed form against a refinement sequence of oracle solves.

    A coarse level whose discrete solution has not decayed at the far end is
    under-resolved; it enters the table with infinite error.  Only the finest
    level must pass the tail test.

    Returns
    -------
    ComparisonReport
    """
    from .mode_solver import solve_mode
    closed = solve_mode(p, pt, data)
    sols, failed = [], []
    for k, n in enumerate(ns):
        try:
            sols.append(collocation_solve(p, pt, data, CollocationConfig(n=n), **kw))
        except TruncationTooShort:
            if k == len(ns) - 1:
                raise
            failed.append(n)
    rep = compare(closed, sols)
    if failed:
        rep.table = [(n, math.inf) for n in failed] + rep.table
        rep.ratios = [math.inf] * len(failed) + rep.ratios
    rep.converged = rep.converged and rep.max_error <= tol
    return rep


def manufactured_check(p, pt, cfg=None, amplitude=None):
    """Method of manufactured solutions on the plus side.

    Takes u+ = a e^{-B+ x} (rho+ = 0, minus-side fields zero), computes the
    bulk residuals and interface values of these fields analytically, feeds
    them to the solver as forcing and data, and returns the relative sup error
    of the recovered u+ on the nodes.
    """
    p = p if isinstance(p, ValidatedParams) else validate_params(p)
    lam, xi = _point(pt)
    N = p.dim
    n1 = N - 1
    A2 = float(xi @ xi)
    ix = 1j * xi
    B = np.sqrt(A2 + p.rho_plus / p.mu_plus * lam)
    a = np.ones(N, complex) if amplitude is None else np.asarray(amplitude, complex)
    mu, nu, rp = p.mu_plus, p.nu_plus, p.rho_plus
    div0 = np.sum(ix * a[:n1]) - B * a[-1]
    e = lambda x: np.exp(-B * np.asarray(x))

    def mom(x):
        # rho lam u - mu (u'' - A^2 u) - nu grad div u, with grad_N = d/dx
        ex = e(x)[:, None]
        lap = (rp * lam - mu * (B * B - A2)) * a
        grad = np.append(ix, -B) * div0
        return ex * (lap - nu * grad)

    forcing = {"momentum+": mom, "mass+": lambda x: rp * div0 * e(x)}
    from .mode_solver import BoundaryData
    irhs = {
        "tangential": [-mu * (-B * a[j] + ix[j] * a[-1]) for j in range(n1)],
        "normal+": 2 * mu * (-B * a[-1]) + (nu - mu) * div0,
        "normal-": 0.0,
        "neumann": 0.0,
    }
    data = BoundaryData(h_hat=tuple(-a[:n1]), H_hat=0.0)
    sol = collocation_solve(p, (lam, xi), data, cfg, forcing=forcing, interface_rhs=irhs)
    exact = e(sol.x_plus)[:, None] * a
    err = np.abs(sol.plus["u"] - exact).max() / np.abs(exact).max()
    return float(err), sol
