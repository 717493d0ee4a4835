"""
Coefficient table of the per-frequency solution operator and multiplier-class checks.

With data h' (tangential velocity jump) and H (interface height), the
solution is written as

    u_J+  = A M1+ {Q+_Jm,1 h_m + A Q+_JN,1 H} + A M2+ {Q+_Jm,2 h_m + A Q+_JN,2 H}
            + A e^{-B+ x} {R+_Jm h_m + A R+_JN H} + [J<N] S+ e^{-B+ x} h_J,
    u_J-  = A M- {Q-_Jm h_m + A Q-_JN H} + A e^{B- x} {R-_Jm h_m + A R-_JN H}
            + [J<N] S- e^{B- x} h_J,
    rho+  = A M0+ {P+_m1 h_m + A P+_N1 H} + A e^{-t1 x} {P+_m2 h_m + A P+_N2 H},
    pi-   = e^{A x} {P-_m h_m + A P-_N H},

(summation over m = 1..N-1).  The surface tension enters the normal stress
balance as the Fourier symbol of sigma_pm Delta' H, i.e. -sigma_pm A^2 H; the
module constant ``LOAD = -1`` carries that sign through every H column.

Table keys and shapes (``...`` is the grid shape, n = N-1):

    "P+_m1", "P+_m2", "P-_m"          (..., n)
    "P+_N1", "P+_N2", "P-_N"          (...)
    "Q+_Jm1", "Q+_Jm2", "Q-_Jm"       (..., N, n)
    "Q+_JN1", "Q+_JN2", "Q-_JN"       (..., N)
    "R+_Jm", "R-_Jm"                  (..., N, n)    row N holds R_Nm
    "R+_JN", "R-_JN"                  (..., N)       entry N holds R_NN
    "S+_j", "S-_j"                    (...)
"""

from dataclasses import dataclass, asdict, replace
from functools import partial
import math

import numpy as np
from scipy import integrate

from .params import validate_params, ValidatedParams, DEFAULT_PARAMS
from .symbols import characteristic_roots, SymbolSet, eval_M, _exp_safe
from .lopatinski import (coupling_coefficients, lop_l, n_symbol_stable, ScanReport,
                         scan_kinetic_bound)

__all__ = [
    "LOAD", "TABLE_KEYS", "ZeroFrequency", "QuadratureFailure",
    "coefficient_table", "coefficient",
    "ClassClaim", "ClassGrid", "TABLE_CLAIMS", "ELEMENTARY_CLAIMS", "default_claims",
    "symbol_values", "class_estimate", "certify_classes", "empirical_order",
    "product_order_check", "kernel_decay_probe",
]

LOAD = -1.0

TABLE_KEYS = (
    "P+_m1", "P+_N1", "P+_m2", "P+_N2", "P-_m", "P-_N",
    "Q+_Jm1", "Q+_JN1", "Q+_Jm2", "Q+_JN2", "Q-_Jm", "Q-_JN",
    "R+_Jm", "R+_JN", "R-_Jm", "R-_JN", "S+_j", "S-_j",
)


class ZeroFrequency(ValueError):
    """A type-2 multiplier was requested at xi' = 0."""


class QuadratureFailure(RuntimeError):
    """The inverse Fourier integral did not reach the requested tolerance."""


def _params(p):
    return p if isinstance(p, ValidatedParams) else validate_params(p)


def coefficient_table(p, S, names=None, load=LOAD):
    """Evaluate the coefficient table on a symbol set.

    Parameters
    ----------
    p : PhysicalParams
    S : SymbolSet
        Must have ``A > 0`` everywhere.
    names : iterable of str, optional
        Subset of :data:`TABLE_KEYS` to return (all are computed).
    load : float
        Sign with which sigma_pm A^2 H enters the normal stress conditions.

    Returns
    -------
    dict of ndarray
    """
    p = _params(p)
    dc = p.derived
    if np.any(np.asarray(S.A) == 0):
        raise ZeroFrequency("coefficient table requested at xi' = 0")
    rp, mu, mum = p.rho_plus, p.mu_plus, p.mu_minus
    sp, sm = dc.sigma_plus, dc.sigma_minus
    s1, s2 = S.s1, S.s2
    lam, A, Bp, Bm, t1, t2 = S.lam, S.A, S.B_plus, S.B_minus, S.t1, S.t2
    cc = coupling_coefficients(p, S)
    F, G = cc.F, cc.G
    l = lop_l(p, S)
    d12 = S.d_t12
    d1B, d2B = S.d_t1B, S.d_t2B
    detL = rp * lam * d12 * l
    L11 = rp * s2 * lam
    L21 = -rp * s1 * lam
    ix = 1j * np.asarray(S.xi, float)
    x = lambda a: np.asarray(a)[..., None]

    # normal components of beta, gamma on the plus side
    QNm1 = -2 * ix * x(t1 * t2 * G * L11 * d1B / (A * detL))
    QNN1 = load * 2 * t1 * t2 * F * L11 * d1B / detL
    QNm2 = -2 * ix * x(t1 * t2 * G * L21 * d2B / (A * detL))
    QNN2 = load * 2 * t1 * t2 * F * L21 * d2B / detL
    one = np.ones(np.shape(A) + (1,), dtype=complex)
    v1 = np.concatenate([-ix / x(t1), one], axis=-1)
    v2 = np.concatenate([-ix / x(t2), one], axis=-1)
    Qp_Jm1 = v1[..., :, None] * QNm1[..., None, :]
    Qp_JN1 = v1 * x(QNN1)
    Qp_Jm2 = v2[..., :, None] * QNm2[..., None, :]
    Qp_JN2 = v2 * x(QNN2)

    # density
    ss = s1 * s2
    Pp_m1 = -2 * rp * ss * ix * x(t1 * G / (A * l))
    Pp_N1 = load * 2 * rp * ss * t1 * F / l
    Pp_m2 = 2 * rp * ss * ix * x(G / (A * l))
    Pp_N2 = -load * 2 * rp * ss * F / l

    # alpha_N+ ; Wq = {s2 t2 (2 t1 B - B^2 - A^2) - s1 t1 (2 t2 B - B^2 - A^2)} / (t1 - t2)
    Wq = -ss * lam + (s1 * t1 * d2B**2 - s2 * t2 * d1B**2) / d12
    Rp_Nm = -ix * x(G * Wq / (A * Bp * l))
    Rp_NN = load * (F * Wq / (Bp * l) - sp / (2 * mu * Bp))

    # i xi'.alpha'_- = sum Y_m h_m + A Y_N H
    c1 = -S.cp * lam / (2 * t1 * d1B)
    c2 = -S.cp * lam / (2 * t2 * d2B)
    Y_m = x(A) * (x(c1) * QNm1 + x(c2) * QNm2) + ix
    Y_N = A * (c1 * QNN1 + c2 * QNN2) - load * sp * A / (2 * mu)
    AmB = -S.d_BmA
    pre = AmB / ((A + Bm) * Bm)
    Rm_Nm = x(pre / A) * Y_m
    Rm_NN = pre * Y_N / A + load * sm * A / (mum * (A + Bm) * Bm)
    Qm_Nm = -2 * Y_m / x(A + Bm)
    Qm_NN = -2 * Y_N / (A + Bm) - load * sm * A / (mum * (A + Bm))
    Pm_m = x(mum * (A + Bm)) * Qm_Nm
    Pm_N = mum * (A + Bm) * Qm_NN
    w = np.concatenate([ix / x(A), one], axis=-1)
    Qm_Jm = w[..., :, None] * Qm_Nm[..., None, :]
    Qm_JN = w * x(Qm_NN)

    # tangential alpha from the tangential stress balance
    den = mu * Bp + mum * Bm
    Sp = -mum * Bm / den
    Sm = mu * Bp / den
    n1 = ix.shape[-1]
    xx = lambda a: np.asarray(a)[..., None, None]
    Rt_jm = -(mu * (Qp_Jm1[..., :n1, :] + Qp_Jm2[..., :n1, :] - ix[..., :, None] * Rp_Nm[..., None, :])
              + mum * (Qm_Jm[..., :n1, :] + ix[..., :, None] * Rm_Nm[..., None, :])) / xx(den)
    Rt_jN = -(mu * (Qp_JN1[..., :n1] + Qp_JN2[..., :n1] - ix * x(Rp_NN))
              + mum * (Qm_JN[..., :n1] + ix * x(Rm_NN))) / x(den)
    Rp_Jm = np.concatenate([Rt_jm, Rp_Nm[..., None, :]], axis=-2)
    Rm_Jm = np.concatenate([Rt_jm, Rm_Nm[..., None, :]], axis=-2)
    Rp_JN = np.concatenate([Rt_jN, x(Rp_NN)], axis=-1)
    Rm_JN = np.concatenate([Rt_jN, x(Rm_NN)], axis=-1)

    tab = {
        "P+_m1": Pp_m1, "P+_N1": Pp_N1, "P+_m2": Pp_m2, "P+_N2": Pp_N2,
        "P-_m": Pm_m, "P-_N": Pm_N,
        "Q+_Jm1": Qp_Jm1, "Q+_JN1": Qp_JN1, "Q+_Jm2": Qp_Jm2, "Q+_JN2": Qp_JN2,
        "Q-_Jm": Qm_Jm, "Q-_JN": Qm_JN,
        "R+_Jm": Rp_Jm, "R+_JN": Rp_JN, "R-_Jm": Rm_Jm, "R-_JN": Rm_JN,
        "S+_j": Sp, "S-_j": Sm,
    }
    if names is not None:
        tab = {k: tab[k] for k in names}
    return tab


def coefficient(name, p, pt=None, S=None, J=None, m=None):
    """One table entry, optionally indexed (1-based J, m).

    ``name`` is a key of :data:`TABLE_KEYS`; e.g. ``coefficient("R+_JN", p, pt, J=N)``
    is R+_NN.
    """
    p = _params(p)
    if S is None:
        S = characteristic_roots(p, pt)
    if name in ("S+_j", "S-_j"):
        mu, mum = p.mu_plus, p.mu_minus
        den = mu * S.B_plus + mum * S.B_minus
        return -mum * S.B_minus / den if name == "S+_j" else mu * S.B_plus / den
    if name not in TABLE_KEYS:
        raise KeyError(f"unknown coefficient {name!r}")
    v = coefficient_table(p, S, names=(name,))[name]
    if "_J" in name:
        if J is not None:
            v = v[..., J - 1, :] if v.ndim >= 2 and name.endswith(("m", "m1", "m2")) else v[..., J - 1]
        if m is not None and name.endswith(("m", "m1", "m2")):
            v = v[..., m - 1]
    elif m is not None and name.endswith(("_m", "_m1", "_m2")):
        v = v[..., m - 1]
    return v


# ---------------------------------------------------------------- class claims

@dataclass(frozen=True)
class ClassClaim:
    """Membership claim m in M_{s, type, eps, lambda0}."""

    symbol: str
    order: float
    type: int
    epsilon: float = math.pi / 3
    lambda0: object = 0.0
    source: str = ""


def _tab(key):
    return lambda p, S, tab: tab[key]


def _inv_l(p, S, tab):
    return 1.0 / lop_l(p, S)


def _kin_inv(p, S, tab):
    dr = p.rho_minus - p.rho_plus
    K = -(p.rho_minus * S.A2 * tab["R-_JN"][..., -1] - p.rho_plus * S.A2 * tab["R+_JN"][..., -1]) / dr
    return 1.0 / (S.lam + K)


# symbol name -> callable(p, S, table) -> array (grid shape + component axes)
SYMBOLS = {k: _tab(k) for k in TABLE_KEYS}
SYMBOLS.update({
    "i xi_j": lambda p, S, tab: 1j * np.asarray(S.xi),
    "A": lambda p, S, tab: S.A,
    "i xi_j / A": lambda p, S, tab: 1j * np.asarray(S.xi) / np.asarray(S.A)[..., None],
    "B+": lambda p, S, tab: S.B_plus,
    "B-": lambda p, S, tab: S.B_minus,
    "1/B+": lambda p, S, tab: 1 / S.B_plus,
    "1/B-": lambda p, S, tab: 1 / S.B_minus,
    "mu+B+ + mu-B-": lambda p, S, tab: p.mu_plus * S.B_plus + p.mu_minus * S.B_minus,
    "1/(mu+B+ + mu-B-)": lambda p, S, tab: 1 / (p.mu_plus * S.B_plus + p.mu_minus * S.B_minus),
    "t1": lambda p, S, tab: S.t1,
    "t2": lambda p, S, tab: S.t2,
    "1/t1": lambda p, S, tab: 1 / S.t1,
    "1/t2": lambda p, S, tab: 1 / S.t2,
    "t1+B+": lambda p, S, tab: S.t1 + S.B_plus,
    "t2+B+": lambda p, S, tab: S.t2 + S.B_plus,
    "n": lambda p, S, tab: n_symbol_stable(p, S),
    "1/l": _inv_l,
    "1/(lam+K_H)": _kin_inv,
})

TABLE_CLAIMS = (
    ClassClaim("P+_m1", -1, 2, source="coefficient table"), ClassClaim("P+_N1", -1, 2, source="coefficient table"),
    ClassClaim("P+_m2", -1, 2, source="coefficient table"), ClassClaim("P+_N2", -1, 2, source="coefficient table"),
    ClassClaim("P-_m", 1, 2, source="coefficient table"), ClassClaim("P-_N", 1, 2, source="coefficient table"),
    ClassClaim("Q+_Jm1", 0, 2, source="coefficient table"), ClassClaim("Q+_JN1", 0, 2, source="coefficient table"),
    ClassClaim("Q+_Jm2", 0, 2, source="coefficient table"), ClassClaim("Q+_JN2", 0, 2, source="coefficient table"),
    ClassClaim("R+_Jm", -1, 2, source="coefficient table"), ClassClaim("R+_JN", -1, 2, source="coefficient table"),
    ClassClaim("S+_j", 0, 1, source="coefficient table"),
    ClassClaim("Q-_Jm", 0, 2, source="coefficient table"), ClassClaim("Q-_JN", 0, 2, source="coefficient table"),
    ClassClaim("R-_Jm", -1, 2, source="coefficient table"), ClassClaim("R-_JN", -1, 2, source="coefficient table"),
    ClassClaim("S-_j", 0, 1, source="coefficient table"),
)

ELEMENTARY_CLAIMS = (
    ClassClaim("i xi_j", 1, 2, source="elementary"), ClassClaim("A", 1, 2, source="elementary"),
    ClassClaim("i xi_j / A", 0, 2, source="elementary"),
    ClassClaim("B+", 1, 1, source="viscous roots"), ClassClaim("B-", 1, 1, source="viscous roots"),
    ClassClaim("1/B+", -1, 1, source="viscous roots"), ClassClaim("1/B-", -1, 1, source="viscous roots"),
    ClassClaim("mu+B+ + mu-B-", 1, 1, source="viscous roots"),
    ClassClaim("1/(mu+B+ + mu-B-)", -1, 1, source="viscous roots"),
    ClassClaim("t1", 1, 1, source="capillary roots"), ClassClaim("t2", 1, 1, source="capillary roots"),
    ClassClaim("1/t1", -1, 1, source="capillary roots"), ClassClaim("1/t2", -1, 1, source="capillary roots"),
    ClassClaim("t1+B+", 1, 1, source="capillary roots"), ClassClaim("t2+B+", 1, 1, source="capillary roots"),
    ClassClaim("n", 4, 1, source="capillary roots"),
    ClassClaim("1/l", -6, 2, source="lopatinski determinant"),
    ClassClaim("1/(lam+K_H)", -1, 2, lambda0=None, source="kinetic inverse"),
)


def default_claims(epsilon=math.pi / 3, lambda0=None):
    """All claims; ``lambda0`` applies to the kinetic inverse.

    ``None`` defers to the lambda0 selected by the kinetic scan at
    certification time.
    """
    out = []
    for c in TABLE_CLAIMS + ELEMENTARY_CLAIMS:
        c = replace(c, epsilon=epsilon)
        if c.symbol == "1/(lam+K_H)":
            c = replace(c, lambda0=lambda0)
        out.append(c)
    return tuple(out)


@dataclass
class ClassGrid:
    """Sample set for class estimates.

    Points are (|lam|, arg lam, r) with xi' = r |lam|^{1/2} * direction, so the
    ratio A/|lam|^{1/2}, on which homogeneous symbols depend, is resolved
    densely while |lam| spans ``[lam_min, lam_max]``.
    """

    lam_min: float = 1e-2
    lam_max: float = 1e2
    n_mod: int = 5
    n_arg: int = 17
    ratio_min: float = 1e-3
    ratio_max: float = 1e3
    n_ratio: int = 145
    epsilon: float = math.pi / 3
    n_dir: int = 3

    def refined(self, factor=2):
        g = ClassGrid(**asdict(self))
        g.n_mod = (self.n_mod - 1) * factor + 1
        g.n_arg = (self.n_arg - 1) * factor + 1
        g.n_ratio = (self.n_ratio - 1) * factor + 1
        return g

    def points(self, dim, lambda0=0.0):
        mod = np.logspace(np.log10(max(self.lam_min, lambda0 * (1 + 1e-9))), np.log10(self.lam_max), self.n_mod)
        arg = np.linspace(-(math.pi - self.epsilon), math.pi - self.epsilon, self.n_arg)
        r = np.logspace(np.log10(self.ratio_min), np.log10(self.ratio_max), self.n_ratio)
        if dim == 2:
            dirs = np.array([[1.0]])
        else:
            th = np.linspace(0.1, math.pi / 2 - 0.1, self.n_dir)
            dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
        M, T, R, D = np.meshgrid(mod, arg, r, np.arange(len(dirs)), indexing="ij")
        lam = (M * np.exp(1j * T)).ravel()
        A = (R * np.sqrt(M)).ravel()
        xi = A[:, None] * dirs[D.ravel()]
        return lam, xi

    def size(self, dim=2):
        return self.n_mod * self.n_arg * self.n_ratio * (1 if dim == 2 else self.n_dir)

    def as_dict(self):
        return asdict(self)


_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFF = np.array([-2, -1, 0, 1, 2])


class _LazyTable:
    """Coefficient table computed on first access."""

    def __init__(self, p, S):
        self.p, self.S, self.tab = p, S, None

    def __getitem__(self, key):
        if self.tab is None:
            self.tab = coefficient_table(self.p, self.S)
        return self.tab[key]


def symbol_values(p, lam, xi, names):
    """Values of the named symbols at arrays (lam, xi) as a dict of (points, k) arrays."""
    p = _params(p)
    S = characteristic_roots(p, (lam, xi), check_degenerate=False)
    tab = _LazyTable(p, S)
    out = {}
    npt = np.shape(lam)[0]
    for n in names:
        v = np.asarray(SYMBOLS[n](p, S, tab), dtype=complex)
        out[n] = v.reshape(npt, -1)
    return out


def _multi_indices(dim):
    n1 = dim - 1
    idx = [()]
    for a in range(n1):
        idx.append((a,))
    for a in range(n1):
        for b in range(a, n1):
            idx.append((a, b))
    return idx


def _derivative_sups(p, claims, lam, xi):
    """|d^alpha (tau d_tau)^s m| for all claims, |alpha| <= 2, s in {0, 1}.

    Returns dict name -> dict (alpha, s) -> per-point array (max over components).
    """
    p = _params(p)
    names = sorted({c.symbol for c in claims})
    n1 = xi.shape[-1]
    A = np.linalg.norm(xi, axis=-1)
    sl = np.sqrt(np.abs(lam))
    h = np.minimum(1e-4 * np.maximum(A, sl), 1e-2 * A)
    htau = 1e-4 * np.maximum(A**2, np.abs(lam))
    tau = lam.imag
    # cache of evaluations keyed by (xi offsets tuple, tau offset)
    cache = {}

    def ev(off, k):
        key = (off, k)
        if key not in cache:
            dx = np.zeros_like(xi)
            for a, o in enumerate(off):
                dx[:, a] = o * h
            cache[key] = symbol_values(p, lam + 1j * k * htau, xi + dx, names)
        return cache[key]

    zero = (0,) * n1

    def deriv_xi(alpha, tau_k):
        """d^alpha in xi at tau offset tau_k, dict name -> (points, comps)."""
        if alpha == ():
            return ev(zero, tau_k)
        if len(alpha) == 1 or alpha[0] == alpha[1]:
            a = alpha[0]
            wts = _D1 if len(alpha) == 1 else _D2
            power = 1 if len(alpha) == 1 else 2
            acc = {n: 0 for n in names}
            for o, wgt in zip(_OFF, wts):
                if wgt == 0:
                    continue
                off = list(zero)
                off[a] = int(o)
                vals = ev(tuple(off), tau_k)
                for n in names:
                    acc[n] = acc[n] + wgt * vals[n]
            return {n: acc[n] / h[:, None]**power for n in names}
        a, b = alpha
        acc = {n: 0 for n in names}
        for oa, wa in zip(_OFF, _D1):
            if wa == 0:
                continue
            for ob, wb in zip(_OFF, _D1):
                if wb == 0:
                    continue
                off = list(zero)
                off[a] = int(oa)
                off[b] = int(ob)
                vals = ev(tuple(off), tau_k)
                for n in names:
                    acc[n] = acc[n] + wa * wb * vals[n]
        return {n: acc[n] / h[:, None]**2 for n in names}

    out = {n: {} for n in names}
    for alpha in _multi_indices(p.dim):
        d0 = deriv_xi(alpha, 0)
        dt = {n: 0 for n in names}
        for o, wgt in zip(_OFF, _D1):
            if wgt == 0:
                continue
            dk = deriv_xi(alpha, int(o))
            for n in names:
                dt[n] = dt[n] + wgt * dk[n]
        for n in names:
            out[n][(alpha, 0)] = np.max(np.abs(d0[n]), axis=-1)
            out[n][(alpha, 1)] = np.max(np.abs(tau[:, None] * dt[n] / htau[:, None]), axis=-1)
    return out, A, sl


def _weights(claim, A, sl, alpha):
    sc = sl + A
    k = len(alpha)
    if claim.type == 1:
        return sc**(claim.order - k)
    return sc**claim.order * A**(-k)


def _resolve_lambda0(p, claims):
    if any(c.lambda0 is None for c in claims):
        l0 = scan_kinetic_bound(p).summary["lambda0"]
        claims = tuple(replace(c, lambda0=l0) if c.lambda0 is None else c for c in claims)
    return claims


def _sup_table(p, claims, grid):
    results = {}
    by_l0 = {}
    for c in claims:
        by_l0.setdefault(c.lambda0, []).append(c)
    for l0, group in by_l0.items():
        lam, xi = grid.points(p.dim, l0)
        ders, A, sl = _derivative_sups(p, group, lam, xi)
        for c in group:
            per = {}
            for (alpha, s), v in ders[c.symbol].items():
                r = v / _weights(c, A, sl, alpha)
                i = int(np.argmax(r))
                per[(alpha, s)] = (float(r[i]), complex(lam[i]), float(A[i]))
            results[c] = per
    return results


def _fmt_alpha(alpha):
    return "d" + "".join(f"xi{a + 1}" for a in alpha) if alpha else "id"


def certify_classes(p, claims=None, grid=None, growth_tol=0.05):
    """Refinement-stability certification of multiplier-class claims.

    For each claim and each (alpha', s) with |alpha'| <= 2, s in {0, 1}, the
    weighted sup over the grid is computed on the grid and on its 2x
    refinement; the claim passes when no sup grows by more than
    ``growth_tol`` (values at round-off level, below 1e-6 of the claim's largest
    sup, are ignored).  The fitted homogeneity order is reported alongside.

    Returns
    -------
    list of ScanReport
    """
    p = _params(p)
    claims = _resolve_lambda0(p, default_claims() if claims is None else tuple(claims))
    grid = ClassGrid() if grid is None else grid
    coarse = _sup_table(p, claims, grid)
    fine = _sup_table(p, claims, grid.refined())
    reports = []
    for c in claims:
        rows = {"alpha": [], "s": [], "sup": [], "sup_refined": [], "growth": [],
                "argsup_abs_lambda": [], "argsup_arg_lambda": [], "argsup_A": []}
        top = max(v[0] for v in fine[c].values())
        floor = 1e-6 * max(top, 1e-300)
        ok = True
        worst = 0.0
        for key in coarse[c]:
            s0, lam0, A0 = coarse[c][key]
            s1 = fine[c][key][0]
            g = (s1 - s0) / s0 if s0 > floor else 0.0
            if not np.isfinite(s1) or (s1 > floor and g > growth_tol):
                ok = False
            worst = max(worst, g)
            rows["alpha"].append(_fmt_alpha(key[0]))
            rows["s"].append(key[1])
            rows["sup"].append(s0)
            rows["sup_refined"].append(s1)
            rows["growth"].append(g)
            rows["argsup_abs_lambda"].append(abs(lam0))
            rows["argsup_arg_lambda"].append(float(np.angle(lam0)))
            rows["argsup_A"].append(A0)
        order = empirical_order(p, c.symbol, lambda0=c.lambda0)
        summary = {"claim": {"symbol": c.symbol, "order": c.order, "type": c.type,
                             "epsilon": c.epsilon, "lambda0": c.lambda0, "source": c.source},
                   "max_growth": worst, "sup": top, "empirical_order": order,
                   "order_matches_claim": bool(abs(order - c.order) <= 0.1),
                   "order_within_claim": bool(order <= c.order + 0.1),
                   "grid": grid.as_dict(), "verdict": "bounded" if ok else "unbounded"}
        reports.append(ScanReport(name=f"class:{c.symbol}", columns=rows, summary=summary, passed=ok))
    return reports


def class_estimate(claim, grid=None, p=None):
    """Certify a single claim; see :func:`certify_classes`."""
    p = _params(DEFAULT_PARAMS if p is None else p)
    return certify_classes(p, (claim,), grid)[0]


def empirical_order(p, name, args=(0.0, 1.0, -2.0), ratios=(0.1, 1.0, 10.0), scales=None,
                    lambda0=0.0):
    """Log-log slope of |m| under (lam, xi') -> (c^2 lam, c xi').

    The median slope over several rays (arg lam, A/|lam|^{1/2}) is returned;
    for homogeneous symbols all rays agree.  Rays start beyond |lam| = lambda0.
    """
    p = _params(p)
    if scales is None:
        lo = max(1e-2, 2 * math.sqrt(lambda0))
        scales = lo * np.logspace(0, 4, 9)
    scales = np.asarray(scales)
    slopes = []
    for a in args:
        for r in ratios:
            lam = scales**2 * np.exp(1j * a)
            xi = np.zeros((scales.size, p.dim - 1))
            xi[:, 0] = r * scales / math.sqrt(2) if p.dim == 3 else r * scales
            if p.dim == 3:
                xi[:, 1] = r * scales / math.sqrt(2)
            v = symbol_values(p, lam, xi, (name,))[name]
            mag = np.max(np.abs(v), axis=-1)
            good = mag > 0
            if good.sum() < 3:
                continue
            slopes.append(np.polyfit(np.log(scales[good]), np.log(mag[good]), 1)[0])
    return float(np.median(slopes)) if slopes else float("nan")


def _product_symbol(a, b, p, S, tab):
    """Outer product of the component vectors of two symbols."""
    g = np.shape(S.A)
    va = np.asarray(SYMBOLS[a](p, S, tab)).reshape(g + (-1,))
    vb = np.asarray(SYMBOLS[b](p, S, tab)).reshape(g + (-1,))
    return va[..., :, None] * vb[..., None, :]


def product_order_check(p, pairs, tol=0.1):
    """Empirical order of m1*m2 against the sum of orders, for symbol pairs."""
    p = _params(p)
    out = []
    for a, b in pairs:
        oa, ob = empirical_order(p, a), empirical_order(p, b)
        key = f"({a})*({b})"
        SYMBOLS.setdefault(key, partial(_product_symbol, a, b))
        op = empirical_order(p, key)
        out.append({"pair": [a, b], "orders": [oa, ob], "product_order": op,
                    "ok": bool(abs(op - (oa + ob)) <= tol)})
    return out


# ---------------------------------------------------------------- kernel probe

def _kernel_integrand(p, lam, m_name, variant, xN):
    """Return f(xi) (complex) of the inverse Fourier integral, N = 2."""

    def f(xv):
        xv = np.atleast_1d(np.asarray(xv, float))
        xi = xv[:, None]
        good = np.abs(xv) > 0
        out = np.zeros(xv.shape, dtype=complex)
        if not np.any(good):
            return out
        S = characteristic_roots(p, (np.full(good.sum(), lam, dtype=complex), xi[good]),
                                 check_degenerate=False)
        if m_name in (None, "one"):
            m = np.ones(good.sum(), dtype=complex)
        elif m_name == "zero":
            m = np.zeros(good.sum(), dtype=complex)
        else:
            m = symbol_values(p, np.full(good.sum(), lam, dtype=complex), xi[good], (m_name,))[m_name][:, 0]
        if variant == "M0":
            k = S.A2 * eval_M("M0+", S, np.full(good.sum(), xN))
        else:
            k = S.A * _exp_safe(S.t1, np.full(good.sum(), xN))
        out[good] = m * k
        return out

    return f


def kernel_decay_probe(p, lam, m_name="one", grid_x=None, variant="M0", angles=None,
                       tol=1e-6, tail=1e-10, s=0):
    """Sup of |x|^N |k(x)| for k = F^{-1}_{xi'}[m A^2 M0+(x_N)] (variant "M0")
    or F^{-1}[m A e^{-t1 x_N}] (variant "t1"), N = 2.

    The integral over xi' in R is folded onto [0, Xi] with cosine/sine weights
    (adaptive QUADPACK), Xi chosen so the integrand tail is below ``tail``.
    ``s = 1`` returns tau d_tau k by a central difference in Im lam.

    Raises
    ------
    QuadratureFailure
        If the estimated quadrature error exceeds ``tol``.
    """
    p = _params(p)
    if p.dim != 2:
        raise ValueError("kernel probe implemented for N = 2")
    lam = complex(lam)
    grid_x = np.logspace(-1.5, 1.5, 13) if grid_x is None else np.asarray(grid_x, float)
    angles = (math.pi / 12, math.pi / 4, 5 * math.pi / 12, math.pi / 2) if angles is None else angles
    # radial symbols give even integrands in xi'
    even_only = m_name in (None, "one", "zero")

    def kernel(lam_, x1, xN):
        f = _kernel_integrand(p, lam_, m_name, variant, xN)
        # cutoff: |integrand| <= C xi^2 exp(-c xi xN) with c ~ 1
        Xi = max(50.0, (math.log(1 / tail) + 10) / max(xN, 1e-12))
        Xi = min(Xi, 1e6)
        fr = lambda z: float(np.real(f(z)[0] + (f(-z)[0] if not even_only else f(z)[0]))) / 2
        fi = lambda z: float(np.imag(f(z)[0] + (f(-z)[0] if not even_only else f(z)[0]))) / 2
        gr = lambda z: float(np.real(f(z)[0] - f(-z)[0])) / 2
        gi = lambda z: float(np.imag(f(z)[0] - f(-z)[0])) / 2
        tot = 0j
        err = 0.0
        # e^{i xi x1} f(xi) + e^{-i xi x1} f(-xi) = 2 cos(.) even(f) + 2 i sin(.) odd(f)
        for func, wt, fac in ((fr, "cos", 1), (fi, "cos", 1j)):
            v, e = _quad_weighted(func, Xi, wt, x1)
            tot += fac * v
            err += e
        if not even_only:
            for func, fac in ((gr, 1j), (gi, -1.0)):
                v, e = _quad_weighted(func, Xi, "sin", x1)
                tot += fac * v
                err += e
        return tot / math.pi, err / math.pi

    rows = {"r": [], "angle": [], "x1": [], "xN": [], "k_re": [], "k_im": [], "scaled": [], "qerr": []}
    for r in grid_x:
        for th in angles:
            x1, xN = r * math.cos(th), r * math.sin(th)
            if s == 0:
                k, e = kernel(lam, x1, xN)
            else:
                ht = 1e-4 * max(abs(lam), 1.0)
                kp, ep = kernel(lam + 1j * ht, x1, xN)
                km, em = kernel(lam - 1j * ht, x1, xN)
                k = lam.imag * (kp - km) / (2 * ht)
                e = abs(lam.imag) * (ep + em) / (2 * ht)
            if e > tol:
                raise QuadratureFailure(f"quadrature error {e:.2e} > {tol} at x=({x1:.3g},{xN:.3g})")
            rows["r"].append(r)
            rows["angle"].append(th)
            rows["x1"].append(x1)
            rows["xN"].append(xN)
            rows["k_re"].append(k.real)
            rows["k_im"].append(k.imag)
            rows["scaled"].append(r**2 * abs(k))
            rows["qerr"].append(e)
    sc = np.array(rows["scaled"]).reshape(len(grid_x), len(angles))
    g = sc.max(axis=1)
    rlog = np.log10(grid_x)
    outer = rlog >= rlog.max() - 1 - 1e-12
    go = g[outer]
    nonincreasing = bool(np.all(np.diff(go) <= 1e-9 + 1e-6 * go.max()))
    summary = {"lambda": [lam.real, lam.imag], "m": m_name, "variant": variant, "s": s,
               "sup_scaled": float(g.max()), "argsup_r": float(grid_x[int(np.argmax(g))]),
               "outer_decade_nonincreasing": nonincreasing,
               "radial_profile": [float(v) for v in g]}
    passed = bool(np.isfinite(g.max()) and nonincreasing)
    return ScanReport(name=f"kernel:{variant}", columns=rows, summary=summary, passed=passed)


def _quad_weighted(func, Xi, weight, x1):
    """int_0^Xi func(z) w(z x1) dz with w = cos or sin (QUADPACK QAWO)."""
    if x1 == 0.0:
        if weight == "sin":
            return 0.0, 0.0
        v, e = integrate.quad(func, 0.0, Xi, limit=400, epsabs=1e-9, epsrel=1e-9)
        return v, e
    v, e = integrate.quad(func, 0.0, Xi, weight=weight, wvar=x1, limit=400,
                          epsabs=1e-9, epsrel=1e-9)
    return v, e
