"""Forms, jets and Spencer complexes of the dual numbers and of k[x]/(x^3)."""
from dcalc.algpres import dual_numbers, truncated_poly
from dcalc.dfunctors import spencer_complex, splitting_check
from dcalc.exactcore import GF, QQ
from dcalc.jetsforms import berezinian, jet_duality_check, jet_spencer_complex, kahler_forms

for A in (dual_numbers(QQ), truncated_poly(QQ, 3), truncated_poly(GF(3), 3)):
    f = kahler_forms(A, 2)
    print(f"{A.name} over {A.F!r}")
    print("  forms dims", f.dims, "de Rham cohomology", f.cohomology_dims())
    print("  Diff_k vs Hom(J^k, A):",
          [(r["dim_diff"], r["dim_hom_jet"]) for r in (jet_duality_check(A, k=k) for k in range(4))])
    print("  splitting (frak D_m, D_m-1, D_m):",
          [(r["dim_frakD_m"], r["dim_D_m-1"], r["dim_D_m"]) for r in (splitting_check(A, None, m) for m in (1, 2, 3))])
    c = spencer_complex(A, None, 2)["complex"]
    print("  Spencer n=2 dims", c.dims, "homology", c.homology_dims())
    j = jet_spencer_complex(A, 1)["complex"]
    print("  jet-Spencer n=1 dims", j.dims, "homology", j.homology_dims())
    print("  Berezinian", berezinian(A).to_json()["graded_dims"])
