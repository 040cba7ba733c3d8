import pytest

from adjsym.detsolve import Ansatz, monomials, solve_adjoint_symmetries, solve_multipliers, solve_symmetries
from adjsym.expr import DiffExpr, JetSpace, JetVar
from adjsym.structs import _rank
from systems import PGKDV_SPACE, pgkdv, pgkdv_P, pgkdv_Q

ADJ_VARS = ["t", "x", "u_x", "u_tx", "u_xx"]


def flat(F):
    return {(k, m): c for k, comp in enumerate(F) for m, c in comp._t.items()}


def same_span(A, B):
    ra, rb = _rank([flat(F) for F in A]), _rank([flat(F) for F in B])
    return ra == rb == _rank([flat(F) for F in list(A) + list(B)])


def adjoint_ansatz(space):
    return Ansatz.polynomial([space.parse(v) for v in ADJ_VARS], 2)


def test_monomial_count():
    xs = [DiffExpr.var(JetVar.indep(v)) for v in "abc"]
    assert len(monomials(xs, 2)) == 10


def test_duplicate_pool_entries_rejected():
    m = PGKDV_SPACE.parse("u_x")
    with pytest.raises(ValueError):
        Ansatz(((0, m), (0, m)))


def test_point_symmetries_generic_p():
    sp = solve_symmetries(pgkdv(), Ansatz.point_symmetry(PGKDV_SPACE, 1))
    assert sp.dim == 4
    assert same_span(sp.basis, pgkdv_P())


def test_adjoint_symmetries_generic_p():
    sp = solve_adjoint_symmetries(pgkdv(), adjoint_ansatz(PGKDV_SPACE))
    assert sp.dim == 3
    assert same_span(sp.basis, pgkdv_Q())


def test_multipliers_generic_p():
    sp = solve_multipliers(pgkdv(), adjoint_ansatz(PGKDV_SPACE))
    assert sp.dim == 2
    assert same_span(sp.basis, pgkdv_Q()[:2])


def test_solutions_at_p_equal_3():
    s3 = pgkdv().eval_param("p", 3)
    S = s3.space
    assert solve_symmetries(s3, Ansatz.point_symmetry(S, 1)).dim == 4
    assert solve_adjoint_symmetries(s3, adjoint_ansatz(S)).dim == 3
    mult = solve_multipliers(s3, adjoint_ansatz(S))
    assert mult.dim == 2
    expect = [s3.eq_vector([S.parse("u_xx")]), s3.eq_vector([S.parse("u_tx")])]
    assert same_span(mult.basis, expect)


def test_every_solution_satisfies_its_determining_equation():
    s = pgkdv()
    for P in solve_symmetries(s, Ansatz.point_symmetry(PGKDV_SPACE, 1)).basis:
        assert s.is_symmetry(P)[0]
    for Q in solve_adjoint_symmetries(s, adjoint_ansatz(PGKDV_SPACE)).basis:
        assert s.is_adjoint_symmetry(Q)[0]


def test_empty_ansatz():
    assert solve_symmetries(pgkdv(), Ansatz(())).dim == 0


def test_point_ansatz_single_field_only():
    with pytest.raises(ValueError):
        Ansatz.point_symmetry(JetSpace(("t", "x"), ("u", "v")), 1)
