"""Solve one Fourier mode in closed form and check every equation."""

from nskresolvent import DEFAULT_PARAMS, SpectralPoint, BoundaryData, solve_mode, residual_mode, validate_params

p = validate_params(DEFAULT_PARAMS)
pt = SpectralPoint(1.5 + 0.8j, (0.7,))
data = BoundaryData((1.0 - 0.5j,), H_hat=0.3)

for route in ("table", "elimination"):
    sol = solve_mode(p, pt, data, route=route)
    res = residual_mode(sol)
    print(f"{route:12s} H0 = {sol.H0:.6g}  condition = {sol.condition:.3g}  "
          f"max relative residual = {res.max_relative:.2e}")

for name, r in sorted(residual_mode(solve_mode(p, pt, data)).relative.items()):
    print(f"  {name:28s} {r:.2e}")
