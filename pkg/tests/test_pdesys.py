import pytest

from adjsym.expr import JetSpace, JetVar
from adjsym.jetops import IndexSpaceError, LinDiffOp, VectorFunction, compose, mi
from adjsym.pdesys import (ConversionError, EvolutionSystem, NotInIdealError, PDESystem, PreconditionError,
                           helmholtz_split)
from systems import coef, parse, pgkdv, pgkdv_evolution, pgkdv_P, pgkdv_Q, wave, wave_P, wave_Q





def test_restrict_eliminates_time_derivatives():
    s = pgkdv()
    assert s.restrict(parse("u_t")) == parse("-1/(p+1)*u_x^(p+1) - u_xxx")
    assert s.restrict(parse("u_tx")) == parse("-u_x^p*u_xx - u_xxxx")
    assert s.vanishes_on_solutions(s.equations[0] * parse("u_x"))


def test_translation_symmetries_have_expected_R():
    s = pgkdv()
    P1, P2, P3, _ = pgkdv_P()
    assert s.R_symmetry(P1).is_zero()
    assert s.R_symmetry(P2) == -LinDiffOp.D("x")
    assert s.R_symmetry(P3) == -LinDiffOp.D("t")


def test_scaling_symmetry_R():
    s = pgkdv()
    R = s.R_symmetry(pgkdv_P()[3])
    expect = (LinDiffOp.scalar({mi("x"): parse("-p*x"), mi("t"): parse("-3*p*t"), (): parse("-2*(p+1)")}))
    assert R == expect


def test_adjoint_symmetry_R():
    s = pgkdv()
    Q1, Q2, Q3 = pgkdv_Q()
    assert s.R_adjoint(Q1) == -LinDiffOp.D("xx")
    assert s.R_adjoint(Q2) == -LinDiffOp.D("tx")
    expect = LinDiffOp.scalar({mi("xx"): parse("-p*x"), mi("tx"): parse("-3*p*t"), mi("x"): parse("-(3*p+2)")})
    assert s.R_adjoint(Q3) == expect


def test_non_symmetry_rejected():
    s = pgkdv()
    bad = s.dep_vector([parse("u^2")])
    assert s.is_symmetry(bad) == (False, None)
    with pytest.raises(PreconditionError):
        s.R_symmetry(bad)


def test_hadamard_factor_reproduces_function():
    s = pgkdv()
    G = s.equations[0]
    f = parse("u_x")*G + parse("t")*(G*G)
    R = s.hadamard_factor(f)
    assert R.apply(s.G())[0] == f


def test_hadamard_factor_rejects_nonvanishing():
    with pytest.raises(NotInIdealError):
        pgkdv().hadamard_factor(parse("u_x"))


def test_multipliers():
    s = pgkdv()
    Q1, Q2, Q3 = pgkdv_Q()
    assert s.is_multiplier(Q1) and s.is_multiplier(Q2)
    assert not s.is_multiplier(Q3)


CORRECTED_CURRENTS = {
    "u_xx": ("-1/2*u_x^2", "1/2*u_xx^2 + u_t*u_x + 1/((p+1)*(p+2))*u_x^(p+2)"),
    "u_tx": ("-1/2*u_xx^2 + 1/((p+1)*(p+2))*u_x^(p+2)", "u_tx*u_xx + 1/2*u_t^2"),
}


@pytest.mark.parametrize("lam", sorted(CORRECTED_CURRENTS))
def test_conservation_laws(lam):
    s = pgkdv()
    psi = [parse(c) for c in CORRECTED_CURRENTS[lam]]
    assert s.conservation_law_check(s.eq_vector([parse(lam)]), psi)


def test_conservation_law_rejects_wrong_current():
    s = pgkdv()
    assert not s.conservation_law_check(s.eq_vector([parse("u_xx")]), [parse("-1/2*u_x^2"), parse("u_t*u_x")])


def test_multiplier_operator_relation():
    s = pgkdv()
    assert s.multiplier_operator_relation_check(pgkdv_Q()[0])
    with pytest.raises(PreconditionError):
        # u_tx is a derivative of the leading derivative u_t
        s.multiplier_operator_relation_check(pgkdv_Q()[1])


def test_evolution_form():
    e = pgkdv_evolution()
    assert isinstance(e, EvolutionSystem)
    assert e.spatial == ("x",)
    assert e.g[0] == parse("-1/(p+1)*u_x^(p+1) - u_xxx")


def test_evolution_symmetry_equation():
    e = pgkdv_evolution()
    assert all(not r for r in e.symmetry_equation_residual(e.dep_vector([parse("u_x")]))) 
    assert all(not r for r in e.adjoint_equation_residual(e.eq_vector([parse("u_xx")])))


def test_evolution_fast_R_matches_hadamard():
    e = pgkdv_evolution()
    P = e.dep_vector([parse("u_x")])
    assert e.R_symmetry_fast(P) == e.R_symmetry(P)


def test_wave_is_not_evolution():
    with pytest.raises(ConversionError):
        wave().to_evolution()


def test_wave_symmetries():
    for P in wave_P():
        assert wave().is_symmetry(P)[0]
    for Q in wave_Q():
        assert wave().is_adjoint_symmetry(Q)[0]


def test_index_space_checked():
    with pytest.raises(IndexSpaceError):
        pgkdv().is_symmetry(pgkdv_Q()[0])


def test_eval_param_specializes_system():
    s3 = pgkdv().eval_param("p", 3)
    S = JetSpace(("t", "x"), ("u",))
    assert s3.equations[0] == S.parse("u_t + 1/4*u_x^4 + u_xxx")


def test_helmholtz():
    assert helmholtz_split(pgkdv_Q()[0].retag("dep", ["u"]), ["u"])
    assert not helmholtz_split(pgkdv().dep_vector([parse("u_x")]), ["u"])
