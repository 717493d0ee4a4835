"""
Physical constants of the linearized two-phase resolvent problem and their derived quantities.

The compressible phase (x_N > 0) carries viscosities ``mu_plus``, ``nu_plus``,
capillarity ``kappa_plus`` and reference density ``rho_plus``; the
incompressible phase (x_N < 0) carries ``mu_minus`` and ``rho_minus``.

The decay exponents of the compressible modes are t_i = sqrt(A^2 + s_i lambda)
where s_1, s_2 solve the characteristic quadratic of the bulk system

    rho_+^2 kappa_+ s^2 - (mu_+ + nu_+) s + rho_+ = 0,

i.e. z^2 - b z + c = 0 with b = (mu_+ + nu_+)/(rho_+^2 kappa_+) and
c = 1/(rho_+ kappa_+).  For rho_+ = 1 this is z^2 - ((mu+nu)/kappa) z + 1/kappa.
"""

from dataclasses import dataclass, fields, asdict
from functools import cached_property
import math

__all__ = [
    "ParamError", "EtaStarZero", "KappaEqualsMuNu", "EqualDensities",
    "NonPositiveConstant", "ViscosityRatio", "InvalidDimension",
    "PhysicalParams", "ValidatedParams", "DerivedConstants",
    "validate_params", "derived_constants", "DEFAULT_PARAMS",
]

# relative tolerance of the "not equal" assumptions
NEAR_ZERO = 1e-10


class ParamError(ValueError):
    """Base class for rejected parameter sets; ``name`` identifies the assumption."""

    name = "ParamError"

    def __init__(self, message=""):
        super().__init__(f"{self.name}: {message}" if message else self.name)


class EtaStarZero(ParamError):
    name = "EtaStarZero"


class KappaEqualsMuNu(ParamError):
    name = "KappaEqualsMuNu"


class EqualDensities(ParamError):
    name = "EqualDensities"


class NonPositiveConstant(ParamError):
    name = "NonPositiveConstant"


class ViscosityRatio(ParamError):
    name = "ViscosityRatio"


class InvalidDimension(ParamError):
    name = "InvalidDimension"


@dataclass(frozen=True)
class PhysicalParams:
    """Reference constants of the linearized two-phase problem.

    Parameters
    ----------
    mu_plus, nu_plus : float
        First and second viscosity of the compressible phase.
    kappa_plus : float
        Capillarity coefficient of the compressible phase.
    mu_minus : float
        Viscosity of the incompressible phase.
    rho_plus, rho_minus : float
        Reference densities.
    sigma : float
        Surface tension, ``sigma >= 0``.
    dim : int
        Spatial dimension N, 2 or 3.
    """

    mu_plus: float = 1.0
    nu_plus: float = 2.0
    kappa_plus: float = 1.0
    mu_minus: float = 1.0
    rho_plus: float = 1.0
    rho_minus: float = 2.0
    sigma: float = 1.0
    dim: int = 2

    def as_dict(self):
        return asdict(self)

    def replace(self, **kw):
        d = asdict(self)
        d.update(kw)
        return type(self)(**d)

    @property
    def quad_b(self):
        """Coefficient b of z^2 - b z + c (sum of the roots)."""
        return (self.mu_plus + self.nu_plus) / (self.rho_plus**2 * self.kappa_plus)

    @property
    def quad_c(self):
        """Coefficient c of z^2 - b z + c (product of the roots)."""
        return 1.0 / (self.rho_plus * self.kappa_plus)

    @property
    def eta_star(self):
        return (0.5 * self.quad_b)**2 - self.quad_c


@dataclass(frozen=True)
class ValidatedParams(PhysicalParams):
    """Parameters that passed :func:`validate_params`."""

    @cached_property
    def derived(self):
        return derived_constants(self)


@dataclass(frozen=True)
class DerivedConstants:
    """Quantities derived from validated parameters.

    Attributes
    ----------
    eta_star : float
        Discriminant (b/2)^2 - c of the characteristic quadratic.
    s1, s2 : complex
        Its roots, ``s1`` taking the ``+`` sign.
    sigma_plus, sigma_minus : float
        Weighted surface tensions rho_pm sigma / (rho_- - rho_+).
    """

    eta_star: float
    s1: complex
    s2: complex
    sigma_plus: float
    sigma_minus: float


DEFAULT_PARAMS = PhysicalParams()


def validate_params(p):
    """Check the admissibility assumptions and tag ``p`` as valid.

    Raises
    ------
    NonPositiveConstant, ViscosityRatio, EqualDensities, EtaStarZero,
    KappaEqualsMuNu, InvalidDimension
        Naming the first violated assumption.
    """
    vals = {f.name: getattr(p, f.name) for f in fields(PhysicalParams)}
    if vals["dim"] not in (2, 3):
        raise InvalidDimension(f"dim={vals['dim']} not in {{2, 3}}")
    for key in ("mu_plus", "nu_plus", "kappa_plus", "mu_minus", "rho_plus", "rho_minus"):
        v = float(vals[key])
        if not (math.isfinite(v) and v > 0):
            raise NonPositiveConstant(f"{key}={v!r} must be > 0")
    if not (math.isfinite(float(vals["sigma"])) and vals["sigma"] >= 0):
        raise NonPositiveConstant(f"sigma={vals['sigma']!r} must be >= 0")
    N = vals["dim"]
    if not vals["nu_plus"] > (N - 1) / N * vals["mu_plus"]:
        raise ViscosityRatio(f"nu_plus={vals['nu_plus']!r} must exceed (N-1)/N*mu_plus")
    if vals["rho_plus"] == vals["rho_minus"]:
        raise EqualDensities(f"rho_plus = rho_minus = {vals['rho_plus']!r}")
    q = ValidatedParams(**vals)
    scale = max(1.0, q.quad_b**2)
    if abs(q.eta_star) < NEAR_ZERO * scale:
        raise EtaStarZero(f"eta_star={q.eta_star!r} (double root of the characteristic quadratic)")
    # t_i = B_+ exactly when s_i = rho/mu, i.e. rho^3 kappa = mu nu
    r3k = q.rho_plus**3 * q.kappa_plus
    if abs(r3k - q.mu_plus * q.nu_plus) < NEAR_ZERO * r3k:
        raise KappaEqualsMuNu(
            f"rho_plus^3*kappa_plus={r3k!r} equals mu_plus*nu_plus (root s_i = rho_plus/mu_plus)")
    return q


def derived_constants(p):
    """Roots s_1, s_2, discriminant and weighted surface tensions.

    The real branch (eta* > 0) returns b/2 +- sqrt(eta*), with the smaller root
    taken as c/s_1 to avoid cancellation; the complex branch returns
    b/2 +- i sqrt(|eta*|).
    """
    if not isinstance(p, ValidatedParams):
        p = validate_params(p)
    b, c, eta = p.quad_b, p.quad_c, p.eta_star
    if eta > 0:
        s1 = 0.5 * b + math.sqrt(eta)
        s2 = c / s1
        s1, s2 = complex(s1), complex(s2)
    else:
        w = math.sqrt(-eta)
        s1 = complex(0.5 * b, w)
        s2 = s1.conjugate()
    drho = p.rho_minus - p.rho_plus
    return DerivedConstants(
        eta_star=eta, s1=s1, s2=s2,
        sigma_plus=p.rho_plus * p.sigma / drho,
        sigma_minus=p.rho_minus * p.sigma / drho,
    )
