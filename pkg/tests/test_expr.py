import pytest

from adjsym.coef import Coef, PoleError
from adjsym.expr import (DiffExpr, JetSpace, JetVar, NonPolynomialError, ParseError, UnsupportedSubstitution,
                         eval_param, substitute)
from systems import PGKDV_SPACE as S, parse


def test_affine_exponent_addition():
    assert parse("u_x^(p+1)") * parse("u_x") == parse("u_x^(p+2)")


def test_scaling_generator_round_trips_through_format():
    e = parse("(p-2)*u - 3*p*t*u_t - p*x*u_x")
    assert parse(str(e)) == e


@pytest.mark.parametrize("text", ["u_x*u_xx - 3/4*u", "1/(p+1)*u_x^(p+1) + u_xxx", "t*x^2*u_tx^3"])
def test_difference_with_itself_is_zero(text):
    e = parse(text)
    assert (e - e).is_zero()
    assert not (e - e).terms


def test_derivative_indices_commute():
    assert parse("u_xt") == parse("u_tx")


def test_monomial_order_independent_of_input_order():
    assert parse("u + u_x*t + 3*u_tx") == parse("3*u_tx + t*u_x + u")


def test_distinct_parameter_exponents_are_distinct_terms():
    e = parse("u_x^p + u_x^2")
    assert len(e.terms) == 2


def test_substitute_leading_derivative():
    ut = JetVar.dep("u", ("t",))
    assert substitute(parse("u_t*u_x"), ut, parse("-u_xxx")) == parse("-u_x*u_xxx")


def test_substitute_solved_form_annihilates_equation():
    ut = JetVar.dep("u", ("t",))
    G = parse("u_t + 1/(p+1)*u_x^(p+1) + u_xxx")
    assert substitute(G, ut, parse("-1/(p+1)*u_x^(p+1) - u_xxx")).is_zero()


def test_substitute_absent_target_is_identity():
    e = parse("u_x^2 + t")
    assert substitute(e, JetVar.dep("u", ("t",)), parse("u")) == e


def test_substitute_affine_power_of_sum_is_rejected():
    with pytest.raises(UnsupportedSubstitution):
        substitute(parse("u_x^(p+1)"), JetVar.dep("u", ("x",)), parse("u + u_t"))


def test_substitute_affine_power_of_unit_monomial_composes():
    out = substitute(parse("u_x^(p+1)"), JetVar.dep("u", ("x",)), parse("u_t^2"))
    assert out == parse("u_t^(2*p+2)")


def test_substitute_affine_power_of_scaled_monomial_is_rejected():
    with pytest.raises(UnsupportedSubstitution):
        substitute(parse("u_x^(p+1)"), JetVar.dep("u", ("x",)), parse("2*u_t"))



def test_eval_param_to_zero_coefficient():
    assert eval_param(parse("(p-2)*u"), "p", 2).is_zero()


def test_eval_param_integer_exponent():
    assert eval_param(parse("u_x^(p+1)"), "p", 2) == JetSpace(("t", "x"), ("u",)).parse("u_x^3")


def test_eval_param_pole():
    with pytest.raises(PoleError):
        eval_param(parse("1/(p+1)*u_x^(p+1)"), "p", -1)


def test_eval_param_negative_exponent():
    with pytest.raises(NonPolynomialError):
        eval_param(parse("u_x^(p-3)"), "p", 1)


def test_division_by_jet_expression_is_rejected():
    with pytest.raises((NonPolynomialError, ParseError)):
        parse("1/u_x")


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        S.parse("u_x + * 2")
    assert "column" in str(err.value)


def test_unknown_identifier_is_rejected():
    with pytest.raises(ParseError):
        S.parse("v_x")


def test_coefficients_cancel():
    assert S.parse_coef("(p^2-4)/(p-2)") == S.parse_coef("p+2")
    assert S.parse_coef("(p-2)/(p-2)") == 1


def test_exact_rational_coefficients():
    c = S.parse_coef("1/3 + 1/6")
    assert c == Coef.param("p") * 0 + S.parse_coef("1/2")
    assert not isinstance(c, float)


def test_eval_param_commutes_with_products():
    a, b = parse("1/(p+1)*u_x^(p+1) + t"), parse("(p-3)*u*u_x^p")
    for v in (0, 3, 7):
        assert eval_param(a * b, "p", v) == eval_param(a, "p", v) * eval_param(b, "p", v)


def test_monomial_constructor_and_constant():
    v = JetVar.dep("u", ("x",))
    assert DiffExpr.var(v, 2) == parse("u_x^2")
    assert DiffExpr.const(3).constant_value() == 3
