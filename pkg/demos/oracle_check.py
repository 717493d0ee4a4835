"""Compare the closed form with the Chebyshev collocation oracle."""

from nskresolvent import (DEFAULT_PARAMS, SpectralPoint, BoundaryData, solve_mode, validate_params,
                          converge)

p = validate_params(DEFAULT_PARAMS)
data = BoundaryData((1.0,), H_hat=0.5)

for lam, A in [(2.0, 1.0), (0.5 + 0.5j, 3.0), (200 + 100j, 0.5)]:
    pt = SpectralPoint(lam, (A,))
    rep = converge(p, pt, data, ns=(48, 96, 192))
    print(f"lam = {lam!s:>12}  A = {A:4.1f}  worst component {rep.worst:10s} "
          f"error {rep.max_error:.2e}  converged {rep.converged}")
    for n, e in rep.table:
        print(f"    n = {n:4d}  {e:.2e}")
