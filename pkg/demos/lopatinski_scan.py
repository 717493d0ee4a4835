"""Scan the normalized Lopatinski determinant and the kinetic symbol."""

from nskresolvent import DEFAULT_PARAMS, ScanGrid, scan_lower_bound, scan_kinetic_bound, validate_params

p = validate_params(DEFAULT_PARAMS)
grid = ScanGrid(n_mod=24, n_arg=9, n_A=24)

s = scan_lower_bound(p, grid).summary
print(f"points {s['points']}  infimum {s['infimum']:.4f}  refined {s['refined_infimum']:.4f}")
print(f"homogeneity defect {s['homogeneity_defect']:.1e}")

k = scan_kinetic_bound(p, grid).summary
print(f"kinetic zeros {k['zero_count']} up to |lam| = {k['max_zero_modulus']:.3f}, lambda0 = {k['lambda0']}")
print(f"omega3 {k['omega3']:.4f}  omega4 {k['omega4']:.4f}")
for reg, v in k["regime_infima"].items():
    print(f"  {reg:8s} infimum {v:.4f}")
