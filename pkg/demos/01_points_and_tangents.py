"""Points, tangent vectors and flows on small algebras over prime fields."""
from dcalc.algpres import PolyAlgebra, boolean_algebra, dual_numbers
from dcalc.diffop import DiffSpace
from dcalc.exactcore import GF
from dcalc.spectrum import enumerate_spectrum, ghosts, induced_map, nilpotent_flow, tangent_space

# Boolean rings: every operator is multiplication by an element
for n in range(1, 5):
    B = boolean_algebra(n)
    R = B.regular_module()
    dims = [DiffSpace(R, R, k, "recursive").dim for k in range(4)]
    tangents = [len(tangent_space(B, h)) for h in enumerate_spectrum(B)]
    print(f"F2^{n}: dim Diff_k for k=0..3 -> {dims}, tangent dims {tangents}")

# F2[x]: two points, a one-dimensional tangent line at each
A = PolyAlgebra(GF(2), ["x"], 8)
for h in enumerate_spectrum(A):
    (xi,) = tangent_space(A, h)
    print(f"point x={h.values[0]}: tangent basis x -> {xi.values[0]}")

# the flow of d/dx: x -> x + t, and t = 1 swaps the two points
flow = nilpotent_flow(A, [A.const(1)], 1)
swap = induced_map(flow.endo)
print("A_1(x) =", flow.endo.images[0], "| method:", flow.method)
print("A_1 on points:", [(h.values, swap(h).values) for h in enumerate_spectrum(A)])
print("plain series 1 + tX multiplicative?", flow.naive_is_hom, "witness", flow.naive_witness)

# nilpotents are invisible to points
print("ghosts of F2[eps]:", ghosts(dual_numbers(GF(2))).to_json()["ghost_basis"])
