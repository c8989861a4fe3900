"""Residuals of the doubling-map identities on SU(2) as the grid is refined."""

from sigmapf.lie import simple_model
from sigmapf.paths import verify_path_diagrams

rep = verify_path_diagrams(simple_model("su", 2), grids=(32, 64, 128, 256))
keys = ["upsilon_equivariance", "transport_equivariance", "doubling_diagram", "quadrature"]
print(f"{'N':>5}  " + "  ".join(f"{k:>24}" for k in keys))
for row in rep["rows"]:
    print(f"{row['N']:>5}  " + "  ".join(f"{row[k]:>24.3e}" for k in keys))
print("\nmeasured orders:", {k: round(v, 3) for k, v in rep["slopes"].items()})
print("exp residual at the finest grid:", f"{rep['exp_residual']:.2e}")
