import pytest

from adjsym.expr import ZERO, JetVar
from adjsym.jetops import (LinDiffOp, VectorFunction, adjoint_op, commutator, compose, derivative,
                           divergence, divergence_pair_witness, euler, frechet, frechet2, frechet_op,
                           gamma_witness, higher_euler, ibp_canonical, is_x_divergence, mi, partial,
                           prolong_apply, spatial_euler, total_derivative)
import oracles
from systems import parse

SAMPLES = [
    "u_x^3 + t*u*u_xx",
    "x*u_t*u_x - 2*u_tx^2",
    "1/(p+1)*u_x^(p+1) + u_xxx",
    "u^2*u_tt + 3*t*x",
    "u_x^p*u_xx",
]


def dep(text):
    return VectorFunction([parse(text)], "dep", ["u"])


@pytest.mark.parametrize("text", SAMPLES)
@pytest.mark.parametrize("var", ["t", "x"])
def test_total_derivative_matches_sympy(text, var):
    e = parse(text)
    assert oracles.equal(oracles.to_sympy(total_derivative(e, var)), oracles.D(oracles.to_sympy(e), var))


def test_total_derivative_of_affine_power():
    assert total_derivative(parse("u_x^(p+1)"), "x") == parse("(p+1)*u_x^p*u_xx")


def test_derivative_multi_index_order_irrelevant():
    e = parse("u_x^2*t")
    assert derivative(e, ("t", "x")) == derivative(e, ("x", "t"))


def test_partial_treats_jet_coordinates_independently():
    e = parse("u_x^2*u + x*u_x")
    assert partial(e, JetVar.dep("u", ("x",))) == parse("2*u_x*u + x")
    assert partial(e, JetVar.indep("x")) == parse("u_x")


@pytest.mark.parametrize("text", SAMPLES[:4])
def test_euler_matches_sympy(text):
    e = parse(text)
    assert oracles.equal(oracles.to_sympy(euler(e, "u")), oracles.euler(oracles.to_sympy(e)))


def test_euler_of_divergence_vanishes():
    psi = [parse("u*u_x^2"), parse("t*u_t*u_xx")]
    assert not euler(divergence(psi, ["t", "x"]), "u")


def test_higher_euler_top_order():
    assert higher_euler(parse("u_xx^2"), "u", ("x", "x")) == parse("2*u_xx")


@pytest.mark.parametrize("f, F", [("u_x^3 + t*u*u_xx", "u_x + x"), ("1/(p+1)*u_x^(p+1)", "u_xx*u"),
                                  ("u_t*u_tx", "t*u_xxx")])
def test_frechet_matches_sympy(f, F):
    fe, Fe = parse(f), parse(F)
    got = oracles.to_sympy(frechet(fe, dep(F)))
    assert oracles.equal(got, oracles.frechet(oracles.to_sympy(fe), oracles.to_sympy(Fe)))


def test_frechet_op_applies_like_frechet():
    f = parse("u*u_x + u_xxx")
    F = dep("x*u_t")
    assert frechet_op(f, ["u"]).apply(F)[0] == frechet(f, F)


def test_adjoint_of_D_x_is_minus_D_x():
    assert adjoint_op(LinDiffOp.D("x")) == -LinDiffOp.D("x")


def test_adjoint_of_multiplication_then_derivative():
    # (D_x o a)^* = -a D_x
    a = parse("u_x*t")
    L = compose(LinDiffOp.D("x"), LinDiffOp.mult(a))
    assert adjoint_op(L) == -compose(LinDiffOp.mult(a), LinDiffOp.D("x"))


def test_adjoint_pairing_identity_is_divergence():
    L = frechet_op(parse("u*u_xx + t*u_x^2"), ["u"])
    H, F = parse("u_x^2 + x"), parse("u*u_t")
    diff = H * L.apply([F])[0] - F * adjoint_op(L).apply([H])[0]
    assert not euler(diff, "u")


def test_divergence_pair_witness():
    f = parse("1/(p+1)*u_x^(p+1) + u_xxx + u_t")
    psi = divergence_pair_witness(parse("u_xx"), dep("-u_x"), f, ["t", "x"])
    assert len(psi) == 2


def test_gamma_witness_single_and_multi():
    f = parse("u_x*u_xx + u^2")
    gamma_witness(VectorFunction([parse("u_x")], "dep", ["u"]), f, ["x"])
    gamma_witness(dep("t*u_t"), parse("u_t*u_x + u_tx^2"), ["t", "x"])


def test_frechet2_is_symmetric():
    f = parse("u_x^3*u + u_xx^2*t")
    F1, F2 = dep("u_x"), dep("x*u")
    assert frechet2(f, F1, F2) == frechet2(f, F2, F1)


def test_prolong_apply_is_frechet():
    f = parse("u_x*u_t")
    assert prolong_apply(dep("u_x"), f) == frechet(f, dep("u_x"))


def test_commutator_of_translation_and_scaling():
    P1, P2 = dep("u_x"), dep("x*u_x")
    assert commutator(P1, P2) == dep("-u_x")
    assert commutator(P1, P2) == -commutator(P2, P1)


def test_commutator_is_derivative_difference():
    P1, P2 = dep("u_xx"), dep("u*u_x")
    expect = frechet(P2[0], P1) - frechet(P1[0], P2)
    assert commutator(P1, P2)[0] == expect


def test_spatial_euler_detects_x_divergence():
    assert is_x_divergence(total_derivative(parse("u*u_xx^2"), "x"), "x")
    assert not is_x_divergence(parse("u_x^2"), "x")
    assert spatial_euler(parse("u^2"), "x")


@pytest.mark.parametrize("text", ["u_x*u_xx", "u*u_xxx", "u_xx^2 + u*u_xxxx", "x*u_x"])
def test_ibp_canonical_decomposition(text):
    e = parse(text)
    can, W = ibp_canonical(e, "x")
    assert can + total_derivative(W, "x") == e


def test_ibp_canonical_zero_for_divergences():
    assert not ibp_canonical(parse("u*u_xxx + u_x*u_xx"), "x")[0]
    assert ibp_canonical(parse("u*u_xx"), "x")[0] == parse("-u_x^2")


def test_vector_kind_mismatch_rejected():
    with pytest.raises((TypeError, ValueError)):
        dep("u") + VectorFunction([parse("u")], "eq", ["G"])


def test_multi_index_canonical():
    assert mi("xt") == mi("tx")
