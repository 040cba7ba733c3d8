"""Actions of symmetries on adjoint-symmetries.

For a symmetry P with ``G'(P) = R_P(G)`` and an adjoint-symmetry Q with
``G'^*(Q) = R_Q(G)``, the three actions are

* ``action1(P, Q) = Q'(P) + R_P^*(Q)``
* ``action2(P, Q) = R_P^*(Q) - R_Q^*(P)``  (always a multiplier)
* ``action3(P, Q) = Q'(P) + R_Q^*(P)``  (= action1 - action2)

Adjoint-symmetries are only meaningful on solutions, so results are compared
after :func:`on_solutions`; :func:`coordinates` expresses a result in a basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .coef import coef_div
from .expr import ZERO, DiffExpr, JetVar
from .jetops import (
    IndexSpaceError,
    LinDiffOp,
    VectorFunction,
    adjoint_op,
    euler,
    frechet_op,
    total_derivative,
)
from .linalg import InconsistentSystem, solve
from .pdesys import ConversionError, EvolutionSystem, PDESystem, PreconditionError


class HypothesisError(ValueError):
    """A structural hypothesis of a specialized formula does not hold."""


class BasisTooSmall(ValueError):
    """A vector does not lie in the span of the given basis."""


# ---------------------------------------------------------------- general actions

def _memberships(P: VectorFunction, Q: VectorFunction, sys: PDESystem):
    okP, RP = sys.is_symmetry(P)
    if not okP:
        raise PreconditionError(f"{P} is not a symmetry")
    okQ, RQ = sys.is_adjoint_symmetry(Q)
    if not okQ:
        raise PreconditionError(f"{Q} is not an adjoint-symmetry")
    return RP, RQ


def _eq(vals, sys: PDESystem) -> VectorFunction:
    return VectorFunction(vals, "eq", sys.labels)


def _sum(*lists):
    return [sum(parts, ZERO) for parts in zip(*lists)]


def _neg(vals):
    return [-v for v in vals]


def action1(P: VectorFunction, Q: VectorFunction, sys: PDESystem) -> VectorFunction:
    RP, _ = _memberships(P, Q, sys)
    return _eq(_sum(frechet_op(Q, sys.deps).apply(P), adjoint_op(RP).apply(Q)), sys)


def action2(P: VectorFunction, Q: VectorFunction, sys: PDESystem) -> VectorFunction:
    RP, RQ = _memberships(P, Q, sys)
    return _eq(_sum(adjoint_op(RP).apply(Q), _neg(adjoint_op(RQ).apply(P))), sys)


def action3(P: VectorFunction, Q: VectorFunction, sys: PDESystem) -> VectorFunction:
    _, RQ = _memberships(P, Q, sys)
    return _eq(_sum(frechet_op(Q, sys.deps).apply(P), adjoint_op(RQ).apply(P)), sys)


ACTIONS = {1: action1, 2: action2, 3: action3}


def action(tag: int, P: VectorFunction, Q: VectorFunction, sys: PDESystem) -> VectorFunction:
    try:
        return ACTIONS[int(tag)](P, Q, sys)
    except KeyError:
        raise ValueError(f"unknown action {tag!r}; expected 1, 2 or 3") from None


def multiplier_action(P: VectorFunction, Lam: VectorFunction, sys: PDESystem) -> VectorFunction:
    """Lambda'(P) + R_P^*(Lambda); maps multipliers to multipliers."""
    if not sys.is_multiplier(Lam):
        raise PreconditionError(f"{Lam} is not a multiplier")
    return action1(P, Lam, sys)


def on_solutions(F: VectorFunction, sys: PDESystem) -> VectorFunction:
    return F.map(sys.restrict)


def equal_on_solutions(F1: VectorFunction, F2: VectorFunction, sys: PDESystem) -> bool:
    return on_solutions(F1 - F2, sys).is_zero()


def _split(F: VectorFunction) -> dict:
    return {(k, m): c for k, comp in enumerate(F) for m, c in comp._t.items()}


def coordinates(F: VectorFunction, basis: Sequence[VectorFunction], sys: PDESystem | None = None) -> list:
    """Coefficients c with F = sum c_k basis[k], on solutions when ``sys`` is given."""
    if sys is not None:
        F = on_solutions(F, sys)
        basis = [on_solutions(b, sys) for b in basis]
    try:
        return solve([_split(b) for b in basis], _split(F))
    except InconsistentSystem:
        raise BasisTooSmall(f"{F} is not in the span of the basis") from None


def combination(coeffs: Sequence, basis: Sequence[VectorFunction]) -> VectorFunction:
    out = basis[0] * 0
    for c, b in zip(coeffs, basis):
        if c != 0:
            out = out + b * c
    return out


# ---------------------------------------------------------------- point symmetries

def _is_point_function(e: DiffExpr) -> bool:
    return all(v.order == 0 for v in e.dependent_vars())


@dataclass(frozen=True)
class PointSymmetry:
    """Infinitesimal point transformation ``xi^i d/dx^i + eta^alpha d/du^alpha``."""

    indep: tuple
    deps: tuple
    xi: tuple
    eta: tuple

    def __post_init__(self):
        if len(self.xi) != len(self.indep) or len(self.eta) != len(self.deps):
            raise ValueError("xi needs one entry per independent variable, eta one per dependent variable")
        for e in self.xi + self.eta:
            if not _is_point_function(e):
                raise ValueError(f"{e} depends on derivatives; point symmetries need functions of (x, u)")

    @staticmethod
    def from_characteristic(P: VectorFunction, indep: Sequence[str]) -> "PointSymmetry":
        """Recover (xi, eta) from ``P^alpha = eta^alpha - xi^i u^alpha_i``."""
        if P.kind != "dep":
            raise IndexSpaceError("a characteristic is indexed by dependent variables")
        first = {JetVar.dep(a, (i,)): (a, i) for a in P.labels for i in indep}
        xi = None
        eta = []
        for a, comp in zip(P.labels, P):
            local = {i: ZERO for i in indep}
            e = ZERO
            for m, c in comp._t.items():
                hits = [(v, x) for v, x in m if v.kind == 1 and v.order > 0]
                if not hits:
                    e = e + DiffExpr({m: c})
                    continue
                v, x = hits[0]
                if len(hits) > 1 or x != 1 or first.get(v, (None,))[0] != a:
                    raise ValueError(f"{P} is not the characteristic of a point symmetry")
                rest = tuple(t for t in m if t[0] != v)
                local[first[v][1]] = local[first[v][1]] - DiffExpr({rest: c})
            if xi is None:
                xi = local
            elif xi != local:
                raise ValueError(f"{P}: components disagree on xi")
            eta.append(e)
        return PointSymmetry(tuple(indep), tuple(P.labels), tuple(xi[i] for i in indep), tuple(eta))

    @staticmethod
    def translation(indep: Sequence[str], deps: Sequence[str], direction: Mapping) -> "PointSymmetry":
        xi = tuple(DiffExpr.const(direction.get(i, 0)) for i in indep)
        return PointSymmetry(tuple(indep), tuple(deps), xi, tuple(ZERO for _ in deps))

    @staticmethod
    def scaling(indep: Sequence[str], deps: Sequence[str], weights: Mapping) -> "PointSymmetry":
        """``w_i x^i d/dx^i + w_alpha u^alpha d/du^alpha``; missing weights are 0."""
        xi = tuple(DiffExpr.var(JetVar.indep(i)).scale(weights.get(i, 0)) for i in indep)
        eta = tuple(DiffExpr.var(JetVar.dep(a)).scale(weights.get(a, 0)) for a in deps)
        return PointSymmetry(tuple(indep), tuple(deps), xi, eta)

    def characteristic(self) -> VectorFunction:
        comps = []
        for a, e in zip(self.deps, self.eta):
            for i, x in zip(self.indep, self.xi):
                e = e - x * DiffExpr.var(JetVar.dep(a, (i,)))
            comps.append(e)
        return VectorFunction(comps, "dep", self.deps)

    def divergence(self) -> DiffExpr:
        return sum((total_derivative(x, i) for i, x in zip(self.indep, self.xi)), ZERO)

    def apply(self, F) -> list:
        """pr Y(F) = xi^i D_i F + F'(P), componentwise."""
        comps = list(F) if isinstance(F, (VectorFunction, list, tuple)) else [F]
        P = self.characteristic()
        lin = frechet_op(comps, self.deps).apply(P)
        out = []
        for f, l in zip(comps, lin):
            for i, x in zip(self.indep, self.xi):
                if x:
                    l = l + x * total_derivative(f, i)
            out.append(l)
        return out

    def is_zero(self) -> bool:
        return all(not e for e in self.xi + self.eta)


def point_R(ps: PointSymmetry, sys: PDESystem) -> LinDiffOp:
    """R_p with pr Y(G) = R_p(G)."""
    return sys.hadamard_factor(_eq(ps.apply(sys.G()), sys))


def point_action1(ps: PointSymmetry, Q: VectorFunction, sys: PDESystem) -> VectorFunction:
    """Y(Q) + R_p^*(Q) + (D_i xi^i) Q."""
    ok, _ = sys.is_adjoint_symmetry(Q)
    if not ok:
        raise PreconditionError(f"{Q} is not an adjoint-symmetry")
    if ps.is_zero():
        return VectorFunction.zeros("eq", sys.labels)
    div = ps.divergence()
    vals = _sum(ps.apply(Q), adjoint_op(point_R(ps, sys)).apply(Q), [div * q for q in Q])
    return _eq(vals, sys)


@dataclass(frozen=True)
class FirstOrderLinearAdjointSymmetry:
    """``Q_A = kappa_A + rho^i_{A alpha} u^alpha_i`` with ``G'^*(Q) = rho D G + K G``.

    ``rho`` maps ``(A, alpha, i)`` and ``K`` maps ``(A, alpha)`` to expressions.
    """

    Q: VectorFunction
    kappa: tuple
    rho: dict
    K: dict

    @staticmethod
    def from_adjoint_symmetry(Q: VectorFunction, sys: PDESystem) -> "FirstOrderLinearAdjointSymmetry":
        ok, RQ = sys.is_adjoint_symmetry(Q)
        if not ok:
            raise PreconditionError(f"{Q} is not an adjoint-symmetry")
        kappa, rho = [], {}
        for A, comp in enumerate(Q):
            k = ZERO
            for m, c in comp._t.items():
                hits = [(v, x) for v, x in m if v.kind == 1 and v.order > 0]
                if not hits:
                    k = k + DiffExpr({m: c})
                    continue
                if len(hits) != 1 or hits[0][1] != 1 or hits[0][0].order != 1:
                    raise HypothesisError(f"{Q} is not first-order linear (term with {hits[0][0]})")
                v = hits[0][0]
                key = (A, sys.deps.index(v.name), v.deriv[0])
                rest = tuple(t for t in m if t[0] != v)
                rho[key] = rho.get(key, ZERO) + DiffExpr({rest: c})
            kappa.append(k)
        K = {}
        for (a, A, I), coeff in RQ.entries.items():
            if len(I) == 0:
                K[(A, a)] = coeff
            elif len(I) == 1:
                if rho.get((A, a, I[0]), ZERO) != coeff:
                    raise HypothesisError(f"R_Q coefficient of D_{I[0]} differs from rho")
            else:
                raise HypothesisError(f"R_Q has a term of order {len(I)}; expected rho^i D_i + K")
        for (A, a, i), r in rho.items():
            if r and RQ.coefficient(a, A, (i,)) != r:
                raise HypothesisError(f"R_Q lacks the D_{i} term required by rho")
        return FirstOrderLinearAdjointSymmetry(Q, tuple(kappa), {k: v for k, v in rho.items() if v}, K)

    def rho_of(self, A: int, a: int, i: str) -> DiffExpr:
        return self.rho.get((A, a, i), ZERO)

    def K_of(self, A: int, a: int) -> DiffExpr:
        return self.K.get((A, a), ZERO)


def _fol_terms(ps: PointSymmetry, fol: FirstOrderLinearAdjointSymmetry, sys: PDESystem) -> list:
    """u^alpha_j D_i(xi^i rho^j - xi^j rho^i) + D_i(xi^i kappa + rho^i eta) - K P, per component A."""
    P = ps.characteristic()
    X = dict(zip(ps.indep, ps.xi))
    out = []
    for A in range(sys.M):
        acc = ZERO
        for a, name in enumerate(sys.deps):
            for j in sys.indep:
                uj = DiffExpr.var(JetVar.dep(name, (j,)))
                inner = ZERO
                for i in sys.indep:
                    t = X[i] * fol.rho_of(A, a, j) - X[j] * fol.rho_of(A, a, i)
                    if t:
                        inner = inner + total_derivative(t, i)
                acc = acc + uj * inner
        for i in sys.indep:
            t = X[i] * fol.kappa[A]
            for a in range(sys.m):
                t = t + fol.rho_of(A, a, i) * ps.eta[a]
            if t:
                acc = acc + total_derivative(t, i)
        for a in range(sys.m):
            acc = acc - fol.K_of(A, a) * P[a]
        out.append(acc)
    return out


def point_action23(ps: PointSymmetry, fol: FirstOrderLinearAdjointSymmetry, sys: PDESystem):
    """(action2, action3) of a point symmetry on a first-order linear adjoint-symmetry."""
    if ps.is_zero():
        z = VectorFunction.zeros("eq", sys.labels)
        return z, z
    Q = fol.Q
    extra = _fol_terms(ps, fol, sys)
    a2 = _sum(adjoint_op(point_R(ps, sys)).apply(Q), extra)
    div = ps.divergence()
    a3 = _sum(ps.apply(Q), [div * q for q in Q], _neg(extra))
    return _eq(a2, sys), _eq(a3, sys)


# ---------------------------------------------------------------- translations and scalings

def _homogeneity(vals: Sequence[DiffExpr], base: Sequence[DiffExpr], what: str) -> list:
    """Constants s_A with vals[A] = s_A * base[A]."""
    out = []
    for A, (v, b) in enumerate(zip(vals, base)):
        if not b:
            if v:
                raise HypothesisError(f"{what}: component {A} maps 0 to {v}")
            out.append(0)
            continue
        m, c = b.terms[0]
        s = coef_div(v.coeff(m), c)
        if v != b.scale(s):
            raise HypothesisError(f"{what}: component {A} is not homogeneous; Y gives {v}")
        out.append(s)
    return out


@dataclass(frozen=True)
class SpecializedActions:
    actions: tuple
    general: tuple
    route: str
    G_weights: tuple
    Q_weights: tuple

    @property
    def agrees(self) -> tuple:
        return tuple(a == g for a, g in zip(self.actions, self.general))


def specialized_actions(kind: str, data: Mapping, Q: VectorFunction, sys: PDESystem) -> SpecializedActions:
    """Actions of a translation (``data`` = direction) or scaling (``data`` = weights).

    Action 1 uses the homogeneity weights directly.  Actions 2 and 3 use the
    first-order linear formulas when Q has that form and otherwise fall back
    to the general actions (``route`` records which).  ``general`` holds the
    general actions on solutions for comparison, and ``agrees`` flags each one.
    """
    if kind == "translation":
        ps = PointSymmetry.translation(sys.indep, sys.deps, data)
    elif kind == "scaling":
        ps = PointSymmetry.scaling(sys.indep, sys.deps, data)
    else:
        raise ValueError(f"unknown kind {kind!r}")
    G = list(sys.G())
    if kind == "translation":
        moved = "+".join(f"d/d{i}" for i in sys.indep if data.get(i, 0) != 0) or "0"
        for name, F in (("G", G), ("Q", list(Q))):
            for A, y in enumerate(ps.apply(F)):
                if y:
                    raise HypothesisError(f"{name} is not translation invariant: {moved} of component {A} gives {y}")
    omega = _homogeneity(ps.apply(G), G, "Y(G)")
    w = _homogeneity(ps.apply(Q), list(Q), "Y(Q)")
    wsum = sum((data.get(i, 0) for i in sys.indep), 0) if kind == "scaling" else 0
    a1 = _eq([q.scale(o + s + wsum) for q, o, s in zip(Q, omega, w)], sys)
    P = ps.characteristic()
    try:
        fol = FirstOrderLinearAdjointSymmetry.from_adjoint_symmetry(Q, sys)
    except HypothesisError:
        fol = None
    if fol is not None:
        extra = _fol_terms(ps, fol, sys)
        a2 = _eq(_sum([q.scale(o) for q, o in zip(Q, omega)], extra), sys)
        a3 = _eq(_sum([q.scale(s + wsum) for q, s in zip(Q, w)], _neg(extra)), sys)
        route = "first-order-linear"
    else:
        a2, a3 = action2(P, Q, sys), action3(P, Q, sys)
        route = "general"
    general = tuple(on_solutions(f(P, Q, sys), sys) for f in (action1, action2, action3))
    mine = tuple(on_solutions(a, sys) for a in (a1, a2, a3))
    return SpecializedActions(mine, general, route, tuple(omega), tuple(w))


# ---------------------------------------------------------------- evolution systems

def evol_actions(P: VectorFunction, Q: VectorFunction, esys: EvolutionSystem):
    """Q'(P) + P'^*(Q), E(P.Q), Q'(P) - Q'^*(P) for t-free P and Q."""
    if not isinstance(esys, EvolutionSystem):
        raise ConversionError("an EvolutionSystem is required")
    for F in (P, Q):
        if esys.has_time_derivatives(F):
            raise ConversionError(f"{F} contains {esys.time}-derivatives")
    _memberships(P, Q, esys)
    deps = esys.deps
    Qd = esys.as_dep(Q)
    Qp = frechet_op(Q, deps)
    QpP = Qp.apply(P)
    PstarQ = adjoint_op(frechet_op(P, deps)).apply(Qd)
    QstarP = adjoint_op(Qp).apply(P)
    dens = sum((p * q for p, q in zip(P, Q)), ZERO)
    second = [euler(dens, a) for a in deps]
    if second != _sum(QstarP, PstarQ):
        raise RuntimeError("Euler form of the second action disagrees with Q'^*(P) + P'^*(Q)")
    return (_eq(_sum(QpP, PstarQ), esys), _eq(second, esys), _eq(_sum(QpP, _neg(QstarP)), esys))
