"""A walk through the potential generalized KdV equation u_t + u_x^(p+1)/(p+1) + u_xxx = 0.

Run with ``python3 demos/pgkdv_tour.py``.  Every number printed is exact.
"""

from adjsym import load_system
from adjsym.actions import on_solutions
from adjsym.coef import format_coef
from adjsym.detsolve import Ansatz, solve_symmetries
from adjsym.noether import D_x, Functional, evol_noether, hamiltonian_check, omega_table
from adjsym.structs import Bases, CommutatorBracket, NonCommutatorBracket


def show(coords, names):
    parts = [f"({format_coef(c)})*{n}" for c, n in zip(coords, names) if c != 0]
    return " + ".join(parts) or "0"


d = load_system("pgkdv")
sys = d.system
P, Q = list(d.symmetries.values()), list(d.adjoints.values())
Pn, Qn = list(d.symmetries), list(d.adjoints)

print("The equation:", sys.equations[0])
print("\nPoint symmetries found by the ansatz solver:")
for F in solve_symmetries(sys, Ansatz.point_symmetry(sys.space, 1)).basis:
    print("   ", F[0])

print("\nEach symmetry P satisfies G'(P) = R_P(G):")
for name, F in d.symmetries.items():
    print(f"    R_{name} = {sys.R_symmetry(F)}")

B = Bases(sys, P, Q, Pn, Qn)
print("\nCommutators of the symmetries:")
for (a, b), v in B.algebra.nonzero_brackets().items():
    print(f"    [{a},{b}] = {show(v, Pn)}")

print("\nThe first action of each symmetry on Q3:")
for j, name in enumerate(Pn):
    print(f"    S1({name}) Q3 = {show(B.tensor(1)[2][j], Qn)}")

br = CommutatorBracket(3, [0, 0, 1], B)
print(f"\nThe kernel of the third action at Q3 is an ideal ({br.certificate}), so it induces a bracket:")
T = br.table([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
for (i, j), v in T.values.items():
    if i < j:
        print(f"    [{Qn[i]},{Qn[j]}] = {show(v, Qn)}")
print("    antisymmetric:", T.antisymmetric, " Jacobi residuals:", T.jacobi_residuals)

nb = NonCommutatorBracket(1, [0, 0, 1], B)
print("\nNon-commutator bracket from the first action, symmetric and skew parts:")
for k in (0, 1):
    e = [int(i == k) for i in range(3)]
    print(f"    ({Qn[k]},Q3)+ = {show(nb(e, [0, 0, 1], '+'), Qn)}    ({Qn[k]},Q3)- = {show(nb(e, [0, 0, 1], '-'), Qn)}")

esys = sys.to_evolution()
Qe = [on_solutions(F, sys) for F in Q]
Pe = [on_solutions(F, sys) for F in P]
J = evol_noether(Qe[2], esys)
print(f"\nOn solutions Q3 = {Qe[2][0]}")
print(f"Its Noether operator Q3' - Q3'^* = {J.op}  (skew: {J.skew})")

print("\nThe symplectic 2-form of Q3 on the symmetries (upper triangle):")
W = omega_table(Qe[2], Pe, esys)
for i in range(4):
    for j in range(i + 1, 4):
        if not W[i][j].is_zero():
            print(f"    omega({Pn[i]},{Pn[j]}) = {W[i][j]}")

H = Functional(sys.parse("1/2*u_xx^2 - 1/((p+1)*(p+2))*u_x^(p+2)"), "x")
print(f"\nWith H = {H}, D_x(u_t) = -dH/du holds: {hamiltonian_check(esys, H, D_x())}")
