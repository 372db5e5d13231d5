"""Levi-Civita form, curvature and the Ricci decomposition for tau = g + omega."""
import random

from dcalc.riemann import (CovariantTensor2, christoffel_data, curvature, default_calibration, random_metric,
                           random_skew, ricci_tau_residual)

polar = CovariantTensor2.from_json({"n": 2, "coords": ["r", "t"], "tau": [["1", "0"], ["0", "r^2"]]})
form = christoffel_data(polar)
print("polar coordinates:", {k: repr(v) for k, v in form.nonzero().items()}, "flat:", curvature(form).is_flat())

hyp = CovariantTensor2.from_json({"n": 2, "coords": ["x", "y"], "tau": [["1/y^2", "0"], ["0", "1/y^2"]]})
c = curvature(christoffel_data(hyp))
print("hyperbolic plane: Ric / g =", c.ricci_ratio_to_metric(), "scalar", c.scalar())

print("calibration:", default_calibration().to_json())
rng = random.Random(7)
coords = ["x", "y", "z"]
T = CovariantTensor2.from_parts(coords, random_metric(coords, rng), random_skew(coords, rng))
r = ricci_tau_residual(T)
print("random tau, n=3: decomposition identity holds:", r["decomposition_identity"])
