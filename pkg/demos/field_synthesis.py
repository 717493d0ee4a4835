"""Physical-space fields for a Gaussian interface bump."""

import numpy as np

from nskresolvent import DEFAULT_PARAMS, synthesize_field, validate_params
from nskresolvent.mode_solver import gaussian_bump

p = validate_params(DEFAULT_PARAMS)
nx = 64
H = gaussian_bump(2, nx)
h = np.zeros((1, nx))
f = synthesize_field(p, 1.0, h, H=H, nx=nx, x_stations=([0.0, 0.5, 2.0], [0.0, -0.5, -2.0]))

print(f"interface height range [{f.H.min():.3f}, {f.H.max():.3f}]")
print(f"imaginary leakage {f.imag_leakage:.1e}")
for i, x in enumerate(f.x_plus):
    print(f"x_N = +{x:.1f}  max |u+| {np.abs(f.u_plus[i]).max():.4f}  max |rho+| {np.abs(f.rho_plus[i]).max():.4f}")
for i, x in enumerate(f.x_minus):
    print(f"x_N = -{abs(x):.1f}  max |u-| {np.abs(f.u_minus[i]).max():.4f}  max |pi-| {np.abs(f.pi_minus[i]).max():.4f}")
