"""Point-symmetry shortcuts for the actions, checked on the wave equation u_tt = u_xx.

The adjoint-symmetries here are first order and linear in derivatives, so the
closed-form expressions for all three actions apply.  They are compared with the
general formulas on solutions.
"""

from adjsym import load_system
from adjsym.actions import (FirstOrderLinearAdjointSymmetry, PointSymmetry, action1, action2, action3,
                            equal_on_solutions, point_action1, point_action23)

d = load_system("wave")
sys = d.system
agree = 0
for pn, P in d.symmetries.items():
    ps = PointSymmetry.from_characteristic(P, sys.indep)
    for qn, Q in d.adjoints.items():
        fol = FirstOrderLinearAdjointSymmetry.from_adjoint_symmetry(Q, sys)
        a2, a3 = point_action23(ps, fol, sys)
        ok = (equal_on_solutions(point_action1(ps, Q, sys), action1(P, Q, sys), sys)
              and equal_on_solutions(a2, action2(P, Q, sys), sys)
              and equal_on_solutions(a3, action3(P, Q, sys), sys))
        agree += ok
        print(f"{pn} on {qn}: S1 = {action1(P, Q, sys)[0]},  shortcut agrees: {ok}")
print(f"\n{agree} of {len(d.symmetries) * len(d.adjoints)} pairs agree.")
