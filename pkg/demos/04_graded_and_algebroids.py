"""Super line, dioles, algebroids and connections."""
from dcalc.algpres import dual_numbers
from dcalc.exactcore import QQ
from dcalc.graded import (algebroid_check, algebroid_to_diole_bracket, connection_check, diole_poisson_check,
                          graded_diff_space, graded_super_line, make_diole, right_connections,
                          tautological_algebroid, trivial_connection)

S = graded_super_line(QQ)
D = graded_diff_space(S, k=1, derivations=True)
print("derivations of k[theta]:", D.dim, "by degree", D.degree_dims())

A = dual_numbers(QQ)
data = tautological_algebroid(A)
print("tautological algebroid on D(k[eps]):", algebroid_check(data)["ok"])
diole = make_diole(A, data.P)
print("as a degree -1 Poisson bracket on the diole:",
      diole_poisson_check(diole, algebroid_to_diole_bracket(data), -1)["ok"])

print("trivial left connection:", connection_check(trivial_connection(A), False)["ok"])
print("right connections found:", len(right_connections(A)))
