"""Noether operators, the integral pairing and symplectic 2-forms of evolution systems.

Functionals are densities in one spatial variable modulo total x-derivatives
(rapid decay, boundary terms dropped).  Statements involving inverse operators
are checked inverse-free: instead of forming ``J^{-1} y`` we construct an
explicit polynomial ``x`` and verify ``J(x) = y``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .coef import Coef
from .expr import ZERO, DiffExpr
from .jetops import (LinDiffOp, VectorFunction, adjoint_op, euler, frechet2, frechet_op,
                     ibp_canonical, mi, spatial_euler)
from .pdesys import ConversionError, EvolutionSystem, PDESystem, PreconditionError


class NotComputable(ValueError):
    """An inverse-operator statement needs a preimage that has no polynomial form."""


def _single_spatial(esys: EvolutionSystem) -> str:
    if len(esys.spatial) != 1:
        raise ConversionError("functionals are supported in one spatial variable only")
    return esys.spatial[0]


def _require_evolutionary(esys: EvolutionSystem, *objs):
    for F in objs:
        if esys.has_time_derivatives(F):
            raise ConversionError(f"{F} contains t-derivatives; pass its evolutionary representative")


def _dot(a: Sequence[DiffExpr], b: Sequence[DiffExpr]) -> DiffExpr:
    out = ZERO
    for x, y in zip(a, b):
        if x and y:
            out = out + x * y
    return out


def _inverse(c):
    return c.inverse() if isinstance(c, Coef) else Fraction(1) / c


# ---------------------------------------------------------------- functionals

class Functional:
    """``∫ density dx`` modulo total x-derivatives; ``canonical`` is the stored normal form."""

    __slots__ = ("density", "x", "canonical")

    def __init__(self, density: DiffExpr, x: str):
        self.density = density
        self.x = x
        self.canonical = ibp_canonical(density, x)[0]

    def is_zero(self) -> bool:
        return not spatial_euler(self.density, self.x)

    def __eq__(self, other):
        if not isinstance(other, Functional):
            return NotImplemented
        return self.x == other.x and not spatial_euler(self.density - other.density, self.x)

    __hash__ = None

    def __add__(self, other: "Functional") -> "Functional":
        return Functional(self.density + other.density, self.x)

    def __sub__(self, other: "Functional") -> "Functional":
        return Functional(self.density - other.density, self.x)

    def __neg__(self) -> "Functional":
        return Functional(-self.density, self.x)

    def scale(self, c) -> "Functional":
        return Functional(self.density.scale(c), self.x)

    def variational_derivative(self, deps: Sequence[str]) -> list:
        return [euler(self.density, a) for a in deps]

    def __str__(self):
        return "0" if not self.canonical else f"∫ ({self.canonical}) d{self.x}"

    def __repr__(self):
        return f"Functional({str(self.canonical)!r})"


# ---------------------------------------------------------------- Noether operators

@dataclass
class NoetherOperator:
    """``kind`` is ``J1``, ``J2``, ``J3`` or ``evolution``.

    J3 and evolution operators carry a LinDiffOp; J1 and J2 only exist as a
    matrix over fixed bases (``matrix`` holds the dual map).
    """

    kind: str
    Q: VectorFunction
    op: LinDiffOp | None = None
    matrix: object = None
    skew: bool | None = None

    def apply(self, P: VectorFunction) -> list:
        if self.op is None:
            raise TypeError(f"{self.kind} is only available in basis coordinates")
        return self.op.apply(P)

    def __str__(self):
        return str(self.op) if self.op is not None else f"{self.kind} (matrix form)"


def noether_J3(Q: VectorFunction, sys: PDESystem) -> NoetherOperator:
    """``Q' + R_Q^*`` for an adjoint-symmetry Q."""
    ok, R = sys.is_adjoint_symmetry(Q)
    if not ok:
        raise PreconditionError(f"{Q} is not an adjoint-symmetry")
    J = frechet_op(Q, sys.deps) + adjoint_op(R)
    return NoetherOperator("J3", Q, J)


def noether_matrix(tag: int, Q, bases) -> NoetherOperator:
    """J1 or J2 (or J3) as its dual-map matrix over ``bases``."""
    from .structs import dual_map
    Qv = Q if isinstance(Q, VectorFunction) else bases.adj_vector(Q)
    return NoetherOperator(f"J{int(tag)}", Qv, None, dual_map(tag, Q, bases))


def evol_noether(Q: VectorFunction, esys: EvolutionSystem) -> NoetherOperator:
    """``Q' - Q'^*`` for an evolutionary adjoint-symmetry; verified skew."""
    _require_evolutionary(esys, Q)
    if not esys.is_adjoint_symmetry(Q)[0]:
        raise PreconditionError(f"{Q} is not an adjoint-symmetry")
    Qp = frechet_op(Q, esys.deps)
    J = Qp - adjoint_op(Qp)
    skew = adjoint_op(J) == -J
    if not skew:
        raise RuntimeError("Q' - Q'^* failed the skewness check")
    return NoetherOperator("evolution", Q, J, skew=skew)


def structure_relation_check(Q: VectorFunction, P: VectorFunction, sys: PDESystem) -> bool:
    """``G'^*(J3(P)) = J3^*(G'(P))`` on solutions."""
    if not sys.is_symmetry(P)[0]:
        raise PreconditionError(f"{P} is not a symmetry")
    J = noether_J3(Q, sys).op
    lhs = sys.adjoint_frechet_G().apply(J.apply(P))
    rhs = adjoint_op(J).apply(sys.frechet_G().apply(P))
    return all(sys.restrict(a - b).is_zero() for a, b in zip(lhs, rhs))


# ---------------------------------------------------------------- pairing and 2-form

def pairing(Q: VectorFunction, P: VectorFunction, esys: EvolutionSystem) -> Functional:
    """``∫ Q_α P^α dx``."""
    x = _single_spatial(esys)
    _require_evolutionary(esys, Q, P)
    return Functional(_dot(Q, P), x)


def symplectic_form(Q: VectorFunction, P1: VectorFunction, P2: VectorFunction,
                    esys: EvolutionSystem) -> Functional:
    """``∫ (P1^α Q'(P2)_α - P2^α Q'(P1)_α) dx``."""
    x = _single_spatial(esys)
    _require_evolutionary(esys, Q, P1, P2)
    Qp = frechet_op(Q, esys.deps)
    return Functional(_dot(P1, Qp.apply(P2)) - _dot(P2, Qp.apply(P1)), x)


def omega_table(Q: VectorFunction, basis: Sequence[VectorFunction], esys: EvolutionSystem) -> list:
    n = len(basis)
    return [[symplectic_form(Q, basis[i], basis[j], esys) for j in range(n)] for i in range(n)]


def _second_variation(Q: VectorFunction, f1: VectorFunction, f2: VectorFunction) -> list:
    return [frechet2(q, f1, f2) for q in Q]


def closure_check(Q: VectorFunction, f1: VectorFunction, f2: VectorFunction, f3: VectorFunction,
                  esys: EvolutionSystem) -> bool:
    """Cyclic sum of ``pr X_{f3} ω_Q(f1, f2)`` vanishes as a functional.

    The f_i are the fixed fields the 2-form is evaluated on, so the prolonged
    vector field only acts through Q': ``pr X_{f3} Q'(f2) = Q''(f3, f2)``.
    """
    x = _single_spatial(esys)
    _require_evolutionary(esys, Q)

    def term(a, b, c):
        return _dot(a, _second_variation(Q, c, b)) - _dot(b, _second_variation(Q, c, a))

    total = term(f1, f2, f3) + term(f3, f1, f2) + term(f2, f3, f1)
    return Functional(total, x).is_zero()


def hamiltonian_check(esys: EvolutionSystem, H: Functional, D: LinDiffOp) -> bool:
    """``u_t = -D^{-1}(δH/δu)`` restated as ``D(g) = -δH/δu``."""
    if not D.has_constant_coefficients():
        raise ValueError("D must have constant coefficients")
    lhs = D.apply(list(esys.g))
    rhs = H.variational_derivative(esys.deps)
    return all((a + b).is_zero() for a, b in zip(lhs, rhs))


# ---------------------------------------------------------------- Poisson bracket

def _monomial_operator(J: LinDiffOp, x: str):
    if J.shape != (1, 1) or len(J.entries) != 1 or not J.has_constant_coefficients():
        raise NotComputable("preimages are constructed for c*D_x^n operators only")
    ((_, _, I), a), = J.entries.items()
    if any(d != x for d in I):
        raise NotComputable("operator differentiates in a variable other than x")
    return a.constant_value(), len(I)


def operator_preimage(J: LinDiffOp, w: DiffExpr, x: str) -> DiffExpr:
    """Polynomial y with ``J(y) = w`` for ``J = c D_x^n``; raises if none exists."""
    c, n = _monomial_operator(J, x)
    y = w
    for _ in range(n):
        rest, W = ibp_canonical(y, x)
        if rest:
            raise NotComputable(f"{w} has no polynomial preimage under {J}")
        y = W
    y = y.scale(_inverse(c))
    if J.apply([y])[0] != w:
        raise NotComputable(f"preimage construction failed for {w}")
    return y


@dataclass
class PoissonReport:
    skew: bool
    jacobi: bool
    brackets: dict = field(default_factory=dict)


def poisson_bracket(J: LinDiffOp, F1: Functional, F2: Functional, dep: str) -> Functional:
    """``∫ δF1/δu · J^{-1}(δF2/δu) dx`` with an explicit preimage."""
    y = operator_preimage(J, euler(F2.density, dep), F1.x)
    return Functional(euler(F1.density, dep) * y, F1.x)


def poisson_skew_jacobi_check(J: LinDiffOp, F1: Functional, F2: Functional, F3: Functional,
                              dep: str = "u") -> PoissonReport:
    Fs = (F1, F2, F3)
    br = {(i, j): poisson_bracket(J, Fs[i], Fs[j], dep) for i in range(3) for j in range(3)}
    skew = all((br[(i, j)] + br[(j, i)]).is_zero() for i in range(3) for j in range(3))
    jac = ZERO
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        jac = jac + poisson_bracket(J, br[(i, j)], Fs[k], dep).density
    return PoissonReport(skew, Functional(jac, F1.x).is_zero(), br)


def D_x(x: str = "x", coeff=1) -> LinDiffOp:
    return LinDiffOp.scalar({mi(x): coeff})


__all__ = [
    "Functional", "NoetherOperator", "NotComputable", "PoissonReport", "D_x", "closure_check",
    "evol_noether", "hamiltonian_check", "noether_J3", "noether_matrix", "omega_table",
    "operator_preimage", "pairing", "poisson_bracket", "poisson_skew_jacobi_check",
    "structure_relation_check", "symplectic_form",
]
