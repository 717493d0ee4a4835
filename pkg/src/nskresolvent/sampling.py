"""
Random admissible draws and the standard comparison set.

Regimes are labelled by r = A / |lam|^{1/2}: "delta1" for r >= 10 (high
tangential frequency), "delta2" for r <= 0.1 (large |lam|) and "compact"
in between.
"""

from dataclasses import dataclass
import math

import numpy as np

from .params import PhysicalParams, ParamError, validate_params, DEFAULT_PARAMS
from .symbols import SpectralPoint

__all__ = ["Draw", "REGIME_RATIOS", "random_params", "random_draws", "standard_test_set"]

# log10 ranges of r = A / |lam|^{1/2}
REGIME_RATIOS = {"delta1": (1.0, 2.5), "compact": (-1.0, 1.0), "delta2": (-3.0, -1.0)}


@dataclass(frozen=True)
class Draw:
    params: object
    point: SpectralPoint
    h: tuple
    H: complex = None
    d: complex = None
    regime: str = "compact"


def random_params(rng, dim=None, min_gap=0.05):
    """Admissible parameters away from the excluded degeneracies.

    ``min_gap`` bounds |s_i - rho+/mu+| and |s1 - s2| below, relative to
    their scale, so that the roots t_1, t_2, B_+ stay apart.
    """
    while True:
        N = int(rng.choice([2, 3])) if dim is None else dim
        mu = rng.uniform(0.5, 2.0)
        q = PhysicalParams(
            mu_plus=mu, nu_plus=mu * rng.uniform(1.0, 3.0), kappa_plus=rng.uniform(0.3, 3.0),
            mu_minus=rng.uniform(0.5, 2.0), rho_plus=rng.uniform(0.5, 2.0),
            rho_minus=rng.uniform(0.5, 3.0), sigma=rng.uniform(0.0, 2.0), dim=N)
        if abs(q.rho_minus - q.rho_plus) < 0.2:
            continue
        try:
            v = validate_params(q)
        except ParamError:
            continue
        s1, s2 = v.derived.s1, v.derived.s2
        c = v.rho_plus / v.mu_plus
        sc = abs(s1) + abs(s2) + c
        if min(abs(s1 - c), abs(s2 - c), abs(s1 - s2)) < min_gap * sc:
            continue
        return v


def random_draws(n, seed=0, regimes=("delta1", "compact", "delta2"), epsilon=math.pi / 3,
                 lam_range=(1e-2, 1e2), given_d_fraction=0.5, params=None):
    """``n`` draws cycling through ``regimes``."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        reg = regimes[k % len(regimes)]
        p = random_params(rng) if params is None else validate_params(params)
        mod = 10**rng.uniform(*np.log10(lam_range))
        arg = rng.uniform(-(math.pi - epsilon), math.pi - epsilon)
        lam = mod * complex(math.cos(arg), math.sin(arg))
        r = 10**rng.uniform(*REGIME_RATIOS[reg])
        A = r * math.sqrt(mod)
        direction = rng.normal(size=p.dim - 1)
        direction /= np.linalg.norm(direction)
        xi = A * direction
        h = rng.normal(size=p.dim - 1) + 1j * rng.normal(size=p.dim - 1)
        g = complex(rng.normal(), rng.normal())
        if rng.uniform() < given_d_fraction:
            out.append(Draw(p, SpectralPoint(lam, xi, epsilon), tuple(h), d=g, regime=reg))
        else:
            out.append(Draw(p, SpectralPoint(lam, xi, epsilon), tuple(h), H=g, regime=reg))
    return out


def standard_test_set():
    """The fixed 20-point comparison set (default parameters unless noted).

    Seven points per asymptotic regime except six in the compact one, with
    both data modes and both dimensions represented.
    """
    p2 = validate_params(DEFAULT_PARAMS)
    p3 = validate_params(DEFAULT_PARAMS.replace(dim=3))
    pa = validate_params(PhysicalParams(mu_plus=1.3, nu_plus=2.1, kappa_plus=0.7, mu_minus=0.9,
                                        rho_plus=1.6, rho_minus=2.3, sigma=0.8, dim=2))
    pts = [
        # compact
        (p2, 2.0, (1.0,), (1.0,), 0.0, None, "compact"),
        (p2, 1.0 + 1.0j, (0.7,), (0.5,), 0.3, None, "compact"),
        (p2, -0.5 + 1.5j, (1.3,), (0.0,), None, 1.0, "compact"),
        (pa, 3.0 - 2.0j, (0.9,), (1.0 - 0.5j,), 0.2j, None, "compact"),
        (p3, 1.5 + 0.5j, (0.6, -0.8), (1.0, 0.5), 0.4, None, "compact"),
        (p3, 0.8 - 1.0j, (0.3, 0.4), (0.2, -1.0), None, 0.5, "compact"),
        # delta1: A >> |lam|^{1/2}
        (p2, 0.5, (20.0,), (1.0,), 0.0, None, "delta1"),
        (p2, 0.1 + 0.2j, (8.0,), (1.0,), 0.5, None, "delta1"),
        (pa, -0.2 + 0.6j, (15.0,), (0.3,), None, 1.0, "delta1"),
        (p2, 1.0j, (40.0,), (0.0,), 1.0, None, "delta1"),
        (p3, 0.3 - 0.3j, (6.0, 9.0), (1.0, 1.0), 0.1, None, "delta1"),
        (p2, 2.0 - 1.0j, (25.0,), (1.0,), None, 0.3, "delta1"),
        (pa, 0.05, (4.0,), (1.0,), 1.0, None, "delta1"),
        # delta2: |lam|^{1/2} >> A
        (p2, 50.0, (0.3,), (1.0,), 0.0, None, "delta2"),
        (p2, 200.0 + 100.0j, (0.5,), (1.0,), 1.0, None, "delta2"),
        (pa, -20.0 + 60.0j, (0.4,), (0.5,), None, 1.0, "delta2"),
        (p3, 100.0 - 30.0j, (0.2, 0.3), (1.0, -1.0), 0.5, None, "delta2"),
        (p2, 4.0 + 4.0j, (0.1,), (1.0,), 0.0, None, "delta2"),
        (pa, 30.0, (0.25,), (0.0,), 1.0, None, "delta2"),
        (p2, 10.0 - 10.0j, (0.2,), (0.7,), None, 0.8, "delta2"),
    ]
    out = []
    for p, lam, xi, h, H, d, reg in pts:
        out.append(Draw(p, SpectralPoint(lam, xi), tuple(h), H=H, d=d, regime=reg))
    return out
