"""
Characteristic roots and exponential difference quotients.

All functions broadcast over array-valued ``lam`` and ``A`` so that scans can
evaluate whole grids at once.  Square roots use the principal branch; on the
sector |arg lambda| <= pi - eps the radicands never reach the cut for the real
root case, and for complex s_i the positivity of the real parts is checked at
run time.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .params import ValidatedParams, validate_params

__all__ = [
    "DegenerateRoots", "BranchCutError", "InadmissiblePoint",
    "SpectralPoint", "SymbolSet", "characteristic_roots", "roots",
    "phi1", "eval_M", "eval_M_derivatives", "M_KINDS",
]

# below this the series branch of phi1 is used
PHI1_SERIES = 1e-3
# exp(-LOG_TINY) ~ 1e-300
LOG_TINY = 690.0
DEGENERATE_TOL = 1e-12


class DegenerateRoots(ArithmeticError):
    """Two of t_1, t_2, B_+ (nearly) coincide."""


class BranchCutError(ArithmeticError):
    """A root has non-positive real part at the requested point."""


class InadmissiblePoint(ValueError):
    """lambda outside the sector, inside the excluded disc, or zero."""


@dataclass(frozen=True)
class SpectralPoint:
    """Resolvent parameter and tangential frequency.

    Parameters
    ----------
    lam : complex
    xi_prime : array_like, shape (N-1,)
    epsilon : float
        Sector half-opening defect, |arg lam| <= pi - epsilon.
    lambda0 : float
        Radius of the excluded disc, |lam| > lambda0.
    """

    lam: complex
    xi_prime: tuple
    epsilon: float = math.pi / 3
    lambda0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "xi_prime", tuple(float(v) for v in np.ravel(self.xi_prime)))

    @property
    def A(self):
        return float(np.linalg.norm(self.xi_prime))

    def check(self, require_xi=False):
        """Raise :class:`InadmissiblePoint` unless the point is admissible."""
        lam = self.lam
        if not 0 < self.epsilon < math.pi / 2:
            raise InadmissiblePoint(f"epsilon={self.epsilon!r} not in (0, pi/2)")
        if lam == 0:
            raise InadmissiblePoint("lambda = 0")
        if abs(np.angle(lam)) > math.pi - self.epsilon + 1e-14:
            raise InadmissiblePoint(f"|arg lambda| > pi - epsilon at lambda={lam!r}")
        if abs(lam) <= self.lambda0:
            raise InadmissiblePoint(f"|lambda| <= lambda0={self.lambda0!r}")
        if require_xi and self.A == 0:
            raise InadmissiblePoint("xi' = 0")
        return self


@dataclass(frozen=True)
class SymbolSet:
    """Roots A, B_+-, t_1, t_2 at one point or on a broadcast grid.

    ``xi`` has shape ``lam.shape + (N-1,)`` (or ``(N-1,)`` for a single point).
    """

    lam: np.ndarray
    xi: np.ndarray
    A: np.ndarray
    B_plus: np.ndarray
    B_minus: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    s1: complex
    s2: complex
    cp: float = 1.0
    cm: float = 1.0
    A2: np.ndarray = field(repr=False, default=None)
    Bp2: np.ndarray = field(repr=False, default=None)
    Bm2: np.ndarray = field(repr=False, default=None)
    t12: np.ndarray = field(repr=False, default=None)
    t22: np.ndarray = field(repr=False, default=None)
    t13: np.ndarray = field(repr=False, default=None)
    t23: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        cache = dict(A2=self.A**2, Bp2=self.B_plus**2, Bm2=self.B_minus**2,
                     t12=self.t1**2, t22=self.t2**2, t13=self.t1**3, t23=self.t2**3)
        for k, v in cache.items():
            if getattr(self, k) is None:
                object.__setattr__(self, k, v)

    # differences of roots without cancellation; cp = rho+/mu+, cm = rho-/mu-
    @property
    def d_t1B(self):
        """t1 - B+."""
        return (self.s1 - self.cp) * self.lam / (self.t1 + self.B_plus)

    @property
    def d_t2B(self):
        """t2 - B+."""
        return (self.s2 - self.cp) * self.lam / (self.t2 + self.B_plus)

    @property
    def d_t12(self):
        """t1 - t2."""
        return (self.s1 - self.s2) * self.lam / (self.t1 + self.t2)

    @property
    def d_BmA(self):
        """B- - A."""
        return self.cm * self.lam / (self.B_minus + self.A)

    @property
    def scale(self):
        """|lambda|^{1/2} + A."""
        return np.sqrt(np.abs(self.lam)) + self.A

    def __getitem__(self, idx):
        """Sub-grid of a broadcast symbol set."""
        g = lambda a: np.asarray(a)[idx]
        return SymbolSet(lam=g(self.lam), xi=np.asarray(self.xi)[idx], A=g(self.A),
                         B_plus=g(self.B_plus), B_minus=g(self.B_minus),
                         t1=g(self.t1), t2=g(self.t2), s1=self.s1, s2=self.s2,
                         cp=self.cp, cm=self.cm)


def _as_valid(p):
    return p if isinstance(p, ValidatedParams) else validate_params(p)


def roots(p, lam, A, check=True):
    """Vectorized B_+, B_-, t_1, t_2 for arrays ``lam`` and ``A``.

    Returns
    -------
    Bp, Bm, t1, t2 : ndarray
        Principal square roots of A^2 + rho_pm lam / mu_pm and A^2 + s_i lam.

    Raises
    ------
    BranchCutError
        If ``check`` and some real part is not positive.
    """
    p = _as_valid(p)
    dc = p.derived
    lam = np.asarray(lam, dtype=complex)
    A2 = np.asarray(A, dtype=float)**2
    Bp = np.sqrt(A2 + (p.rho_plus / p.mu_plus) * lam)
    Bm = np.sqrt(A2 + (p.rho_minus / p.mu_minus) * lam)
    t1 = np.sqrt(A2 + dc.s1 * lam)
    t2 = np.sqrt(A2 + dc.s2 * lam)
    if check:
        for name, r in (("B_plus", Bp), ("B_minus", Bm), ("t1", t1), ("t2", t2)):
            if np.any(~(r.real > 0)):
                raise BranchCutError(f"Re {name} <= 0 at some point (outside the root sector)")
    return Bp, Bm, t1, t2


def characteristic_roots(p, pt, check_degenerate=True):
    """Symbol set at a :class:`SpectralPoint` (or a broadcast grid).

    ``pt`` may also be a pair ``(lam, xi)`` of arrays with ``xi`` of shape
    ``lam.shape + (N-1,)``; admissibility is then the caller's business.

    Raises
    ------
    DegenerateRoots
        If |t1-t2|, |t1-B+| or |t2-B+| < 1e-12 (|lam|^{1/2} + A).
    """
    p = _as_valid(p)
    if isinstance(pt, SpectralPoint):
        pt.check()
        lam = np.asarray(pt.lam, dtype=complex)
        xi = np.asarray(pt.xi_prime, dtype=float)
    else:
        lam, xi = pt
        lam = np.asarray(lam, dtype=complex)
        xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != p.dim - 1:
        raise ValueError(f"xi' has {xi.shape[-1]} components, expected {p.dim - 1}")
    A = np.linalg.norm(xi, axis=-1)
    Bp, Bm, t1, t2 = roots(p, lam, A)
    S = SymbolSet(lam=lam, xi=xi, A=A, B_plus=Bp, B_minus=Bm, t1=t1, t2=t2,
                  s1=p.derived.s1, s2=p.derived.s2,
                  cp=p.rho_plus / p.mu_plus, cm=p.rho_minus / p.mu_minus)
    if check_degenerate:
        tol = DEGENERATE_TOL * S.scale
        for name, d in (("t1-t2", S.d_t12), ("t1-B+", S.d_t1B), ("t2-B+", S.d_t2B)):
            if np.any(np.abs(d) < tol):
                raise DegenerateRoots(f"|{name}| below {DEGENERATE_TOL}*(|lam|^1/2+A)")
    return S


def phi1(z):
    """(e^z - 1)/z, by series for |z| < 1e-3."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) < PHI1_SERIES
    zs = z[small]
    out[small] = 1 + zs / 2 * (1 + zs / 3 * (1 + zs / 4 * (1 + zs / 5)))
    zb = z[~small]
    out[~small] = (np.exp(zb) - 1) / zb
    return out


def _dq(p, q, y):
    """(e^{-p y} - e^{-q y})/(p - q) for y >= 0, cancellation safe.

    Uses e^{-a y} (-y) phi1((a - b) y) with a the exponent of smaller real
    part, so the phi1 argument has non-positive real part.
    """
    p, q, y = np.broadcast_arrays(np.asarray(p, complex), np.asarray(q, complex),
                                  np.asarray(y, float))
    swap = p.real > q.real
    a = np.where(swap, q, p)
    b = np.where(swap, p, q)
    decay = a.real * y
    out = np.zeros(y.shape, dtype=complex)
    live = decay < LOG_TINY
    al, bl, yl = a[live], b[live], y[live]
    out[live] = np.exp(-al * yl) * (-yl) * phi1((al - bl) * yl)
    return out


def _exp_safe(p, y):
    p, y = np.broadcast_arrays(np.asarray(p, complex), np.asarray(y, float))
    out = np.zeros(y.shape, dtype=complex)
    live = p.real * y < LOG_TINY
    out[live] = np.exp(-p[live] * y[live])
    return out


M_KINDS = ("M0+", "M1+", "M2+", "M-")


def _pair(kind, S):
    """Exponents (p, q) with M = (e^{-p y} - e^{-q y})/(p - q), and the sign of y."""
    if kind == "M0+":
        return S.t2, S.t1, 1.0
    if kind == "M1+":
        return S.t1, S.B_plus, 1.0
    if kind == "M2+":
        return S.t2, S.B_plus, 1.0
    if kind == "M-":
        return S.B_minus, S.A, -1.0
    raise ValueError(f"unknown M kind {kind!r}; expected one of {M_KINDS}")


def _check_side(sgn, x):
    if np.any(sgn * np.asarray(x, float) < 0):
        raise ValueError("x_N on the wrong half-line for this M kind")


def eval_M(kind, S, x):
    """Evaluate M0+, M1+, M2+ (x >= 0) or M- (x <= 0).

    M0+ = (e^{-t2 x} - e^{-t1 x})/(t2 - t1), Mi+ = (e^{-ti x} - e^{-B+ x})/(ti - B+),
    M-  = (e^{B- x} - e^{A x})/(B- - A).  Equal exponents give the confluent
    limit -|x| e^{-t|x|}.  ``S`` may also be any object with attributes
    t1, t2, B_plus, B_minus, A.
    """
    p, q, sgn = _pair(kind, S)
    _check_side(sgn, x)
    return _dq(p, q, sgn * np.asarray(x, float))


def eval_M_derivatives(kind, S, x, order):
    """Exact x_N-derivative of order 0..3 of an M function.

    Built from d/dy M = -p M - e^{-q y} (in the decay variable y = |x|),
    never from finite differences.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError("order must be 0, 1, 2 or 3")
    p, q, sgn = _pair(kind, S)
    _check_side(sgn, x)
    y = sgn * np.asarray(x, float)
    d = _dq(p, q, y)
    eq = _exp_safe(q, y)
    for k in range(1, order + 1):
        d = -p * d - (-q)**(k - 1) * eq
    return d * sgn**order
