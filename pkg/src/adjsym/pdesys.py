"""PDE systems in solved form, restriction to solutions, and Hadamard
factorization of functions that vanish on solutions.

Each equation is ``G^A = c_A (u_L - h^A)`` with a declared leading derivative
``u_L``, a nonzero constant ``c_A`` and ``h^A`` free of leading derivatives
and their consequences.  Restricting substitutes the solved forms (and their
total derivatives) until no leading-class variable is left.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .coef import Coef, is_constant
from .expr import (
    ONE,
    ZERO,
    AffineExponent,
    DiffExpr,
    JetSpace,
    JetVar,
    UnsupportedSubstitution,
    _acc,
    eval_param,
)
from .jetops import (
    IndexSpaceError,
    LinDiffOp,
    VectorFunction,
    adjoint_op,
    derivative,
    divergence,
    euler,
    frechet_op,
    higher_euler,
    mi_contains,
    mi_sub,
    partial,
    sub_indices,
)


class NotInIdealError(ValueError):
    """The function does not vanish on the solution space."""


class ConversionError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


class FactorizationDefect(RuntimeError):
    pass


def _inv(c):
    return c.inverse() if isinstance(c, Coef) else Fraction(1) / c


class PDESystem:
    """Equations ``G^A`` with declared leading derivatives.

    ``no_differential_identities`` is a user assertion, required by the
    multiplier/operator relation check.
    """

    def __init__(self, space: JetSpace, equations: Sequence, leading: Sequence, labels: Sequence[str] | None = None,
                 no_differential_identities: bool = False):
        self.space = space
        self.equations = tuple(equations)
        self.leading = tuple(leading)
        if len(self.leading) != len(self.equations):
            raise ValueError("one leading derivative per equation is required")
        self.labels = tuple(labels) if labels is not None else tuple(f"G{k + 1}" for k in range(len(self.equations)))
        self.deps = space.dependent
        self.indep = space.independent
        self.no_differential_identities = no_differential_identities
        self._scale = []
        self._h = []
        for G, L in zip(self.equations, self.leading):
            if L.kind != 1 or L.name not in self.deps:
                raise ValueError(f"leading derivative {L} is not a dependent-variable derivative")
            c = partial(G, L)
            if not c.is_constant() or c.is_zero():
                raise ValueError(f"{G} must be linear in {L} with a constant nonzero coefficient")
            c = c.constant_value()
            h = -(G - DiffExpr.var(L).scale(c)).scale(_inv(c))
            self._scale.append(c)
            self._h.append(h)
        for h in self._h:
            bad = [v for v in h.dependent_vars() if self.is_leading_class(v)]
            if bad:
                raise ValueError(f"solved form contains leading-class variable {bad[0]}")
        self._rvar: dict = {}
        self._rmono: dict = {}
        self._vop: dict = {}
        self._iop: dict = {}
        self._sym: dict = {}
        self._adj: dict = {}
        self._gop = None
        self._gstar = None

    # ------------------------------------------------------------------ basics
    @property
    def M(self) -> int:
        return len(self.equations)

    @property
    def m(self) -> int:
        return len(self.deps)

    def solved_form(self, A: int) -> DiffExpr:
        return self._h[A]

    def G(self) -> VectorFunction:
        return VectorFunction(self.equations, "eq", self.labels)

    def dep_vector(self, comps) -> VectorFunction:
        return VectorFunction(comps, "dep", self.deps)

    def eq_vector(self, comps) -> VectorFunction:
        return VectorFunction(comps, "eq", self.labels)

    def parse(self, text: str) -> DiffExpr:
        return self.space.parse(text)

    def is_leading_class(self, v: JetVar) -> bool:
        return self._equation_for(v) is not None

    def _equation_for(self, v: JetVar):
        if v.kind != 1:
            return None
        for A, L in enumerate(self.leading):
            if L.name == v.name and mi_contains(v.deriv, L.deriv):
                return A
        return None

    def frechet_G(self) -> LinDiffOp:
        if self._gop is None:
            self._gop = frechet_op(self.G(), self.deps)
        return self._gop

    def adjoint_frechet_G(self) -> LinDiffOp:
        if self._gstar is None:
            self._gstar = adjoint_op(self.frechet_G())
        return self._gstar

    def eval_param(self, name: str, value) -> "PDESystem":
        space = JetSpace(self.indep, self.deps, tuple(p for p in self.space.params if p != name))
        return type(self)._rebuild(self, space, [eval_param(G, name, value) for G in self.equations])

    @staticmethod
    def _rebuild(sys, space, eqs):
        return PDESystem(space, eqs, sys.leading, sys.labels, sys.no_differential_identities)

    # ------------------------------------------------------------------ restriction
    def restrict_var(self, v: JetVar) -> DiffExpr | None:
        """Restricted value of a leading-class variable, or None otherwise."""
        if v in self._rvar:
            return self._rvar[v]
        A = self._equation_for(v)
        if A is None:
            self._rvar[v] = None
            return None
        J = mi_sub(v.deriv, self.leading[A].deriv)
        r = self.restrict(derivative(self._h[A], J))
        self._rvar[v] = r
        return r

    def restrict(self, e):
        """Substitute leading derivatives and their consequences."""
        if isinstance(e, VectorFunction):
            return e.map(self.restrict)
        out: dict = {}
        for m, c in e._t.items():
            r = self._restrict_mono(m)
            if r is None:
                _acc(out, m, c)
            else:
                for rm, rc in r._t.items():
                    _acc(out, rm, c * rc)
        return DiffExpr(out)

    def _restrict_mono(self, m: tuple):
        if m in self._rmono:
            return self._rmono[m]
        hit = False
        acc = ONE
        rest = []
        for v, x in m:
            r = self.restrict_var(v)
            if r is None:
                rest.append((v, x))
                continue
            hit = True
            if isinstance(x, AffineExponent):
                raise UnsupportedSubstitution(f"leading-class variable {v} carries exponent {x}")
            acc = acc * r ** x
        res = acc * DiffExpr({tuple(rest): 1}) if hit else None
        self._rmono[m] = res
        return res

    def vanishes_on_solutions(self, e: DiffExpr) -> bool:
        return self.restrict(e).is_zero()

    # ------------------------------------------------------------------ Hadamard
    def _var_op(self, v: JetVar) -> LinDiffOp:
        """Operator R with v - restrict(v) = R(G)."""
        if v in self._vop:
            return self._vop[v]
        A = self._equation_for(v)
        J = mi_sub(v.deriv, self.leading[A].deriv)
        op = LinDiffOp((1, self.M), {(0, A, J): DiffExpr.const(_inv(self._scale[A]))})
        op = op + self._ideal_op(derivative(self._h[A], J))
        self._vop[v] = op
        return op

    def _ideal_op(self, f: DiffExpr) -> LinDiffOp:
        """Operator R with f - restrict(f) = R(G), by telescoping divided differences."""
        if f in self._iop:
            return self._iop[f]
        op = LinDiffOp((1, self.M))
        todo = sorted(v for v in f.dependent_vars() if self.is_leading_class(v))
        cur = f
        for v in todo:
            r = self.restrict_var(v)
            q, nxt = _divided_difference(cur, v, r)
            if q:
                op = op + self._var_op(v) * q
            cur = nxt
        self._iop[f] = op
        return op

    def hadamard_factor(self, f, verify: bool = True) -> LinDiffOp:
        """R_f with f = R_f(G) identically; one row per component of ``f``."""
        fs = list(f.components) if isinstance(f, VectorFunction) else [f]
        entries = {}
        for r, g in enumerate(fs):
            if not self.restrict(g).is_zero():
                raise NotInIdealError(f"{g} does not vanish on solutions")
            for (_, c, I), a in self._ideal_op(g).entries.items():
                entries[(r, c, I)] = a
        R = LinDiffOp((len(fs), self.M), entries)
        if verify:
            back = R.apply(self.G())
            if any(b != g for b, g in zip(back, fs)):
                raise FactorizationDefect("Hadamard factor does not reproduce the function")
        return R

    # ------------------------------------------------------------------ determining equations
    def symmetry_residual(self, P: VectorFunction) -> list:
        self._require(P, "dep")
        return [self.restrict(g) for g in self.frechet_G().apply(P)]

    def is_symmetry(self, P: VectorFunction):
        """(True, R_P) when G'(P) vanishes on solutions, else (False, None)."""
        self._require(P, "dep")
        if P in self._sym:
            return self._sym[P]
        vals = self.frechet_G().apply(P)
        if any(self.restrict(g) for g in vals):
            res = (False, None)
        else:
            res = (True, self.hadamard_factor(VectorFunction(vals, "eq", self.labels)))
        self._sym[P] = res
        return res

    def is_adjoint_symmetry(self, Q: VectorFunction):
        """(True, R_Q) when G'^*(Q) vanishes on solutions, else (False, None)."""
        self._require(Q, "eq")
        if Q in self._adj:
            return self._adj[Q]
        vals = self.adjoint_frechet_G().apply(Q)
        if any(self.restrict(g) for g in vals):
            res = (False, None)
        else:
            res = (True, self.hadamard_factor(VectorFunction(vals, "dep", self.deps)))
        self._adj[Q] = res
        return res

    def R_symmetry(self, P: VectorFunction) -> LinDiffOp:
        ok, R = self.is_symmetry(P)
        if not ok:
            raise PreconditionError(f"{P} is not a symmetry")
        return R

    def R_adjoint(self, Q: VectorFunction) -> LinDiffOp:
        ok, R = self.is_adjoint_symmetry(Q)
        if not ok:
            raise PreconditionError(f"{Q} is not an adjoint-symmetry")
        return R

    def pairing_density(self, Q: VectorFunction) -> DiffExpr:
        self._require(Q, "eq")
        out = ZERO
        for q, G in zip(Q, self.equations):
            out = out + q * G
        return out

    def is_multiplier(self, Q: VectorFunction) -> bool:
        self._require(Q, "eq")
        dens = self.pairing_density(Q)
        return all(euler(dens, a).is_zero() for a in self.deps)

    def conservation_law_check(self, Lam: VectorFunction, psi: Sequence) -> bool:
        if len(psi) != len(self.indep):
            raise ValueError("one current component per independent variable is required")
        return (divergence(psi, self.indep) - self.pairing_density(Lam)).is_zero()

    def multiplier_operator_relation_check(self, Lam: VectorFunction) -> bool:
        """Lambda' = -R_Lambda^* for a multiplier free of leading-class variables."""
        self._require(Lam, "eq")
        if not self.no_differential_identities:
            raise PreconditionError("the system is not declared free of differential identities")
        if not self.is_multiplier(Lam):
            raise PreconditionError(f"{Lam} is not a multiplier")
        bad = sorted(v for c in Lam for v in c.dependent_vars() if self.is_leading_class(v))
        if bad:
            raise PreconditionError(f"{Lam} contains leading-class variable {bad[0]}")
        R = self.R_adjoint(Lam)
        return frechet_op(Lam, self.deps) == -adjoint_op(R)

    def _require(self, F, kind):
        if not isinstance(F, VectorFunction):
            raise TypeError("expected a VectorFunction")
        labels = self.deps if kind == "dep" else self.labels
        if F.kind != kind or F.labels != labels:
            raise IndexSpaceError(f"expected {kind}-indexed vector over {labels}, got {F.kind}{F.labels}")

    def to_evolution(self) -> "EvolutionSystem":
        return EvolutionSystem.from_system(self)


def _divided_difference(f: DiffExpr, v: JetVar, r: DiffExpr):
    """(q, f|_{v=r}) with f - f|_{v=r} = (v - r) q."""
    q: dict = {}
    sub: dict = {}
    V = DiffExpr.var(v)
    powers = {0: ONE}

    def rpow(k):
        if k not in powers:
            powers[k] = rpow(k - 1) * r
        return powers[k]

    for m, c in f._t.items():
        n = 0
        rest = []
        for w, x in m:
            if w == v:
                n = x
            else:
                rest.append((w, x))
        if n == 0:
            _acc(sub, m, c)
            continue
        if isinstance(n, AffineExponent):
            raise UnsupportedSubstitution(f"leading-class variable {v} carries exponent {n}")
        base = DiffExpr({tuple(rest): c})
        for a in range(n):
            for tm, tc in (base * V ** a * rpow(n - 1 - a))._t.items():
                _acc(q, tm, tc)
        for tm, tc in (base * rpow(n))._t.items():
            _acc(sub, tm, tc)
    return DiffExpr(q), DiffExpr(sub)


class EvolutionSystem(PDESystem):
    """``u^alpha_t = g^alpha`` with g free of t-derivatives."""

    def __init__(self, space, equations, leading, labels=None, no_differential_identities=True, time: str = "t"):
        super().__init__(space, equations, leading, labels, True)
        self.time = time
        self.spatial = tuple(i for i in space.independent if i != time)
        self.g = tuple(self._h)

    @staticmethod
    def from_system(sys: PDESystem) -> "EvolutionSystem":
        if isinstance(sys, EvolutionSystem):
            return sys
        if sys.M != sys.m:
            raise ConversionError("an evolution system needs one equation per dependent variable")
        times = {L.deriv for L in sys.leading}
        if len(times) != 1 or len(next(iter(times))) != 1:
            raise ConversionError("leading derivatives must all be first derivatives in one variable")
        (t,), = times
        order = {}
        for A, L in enumerate(sys.leading):
            if L.name in order:
                raise ConversionError(f"two equations are solved for {L}")
            order[L.name] = A
            if sys._scale[A] != 1:
                raise ConversionError(f"equation {sys.labels[A]} must have unit coefficient on {L}")
            h = sys.solved_form(A)
            if any(t in v.deriv for v in h.dependent_vars()):
                raise ConversionError(f"right side of {sys.labels[A]} contains {t}-derivatives")
        perm = [order[a] for a in sys.deps]
        return EvolutionSystem(sys.space, [sys.equations[k] for k in perm], [sys.leading[k] for k in perm],
                               [sys.labels[k] for k in perm], time=t)

    @staticmethod
    def _rebuild(sys, space, eqs):
        return EvolutionSystem(space, eqs, sys.leading, sys.labels, time=sys.time)

    def has_time_derivatives(self, F) -> bool:
        comps = F.components if isinstance(F, VectorFunction) else [F]
        return any(self.time in v.deriv for c in comps for v in c.dependent_vars())

    def as_dep(self, Q: VectorFunction) -> VectorFunction:
        """Identify equation index A with dependent index alpha."""
        return Q.retag("dep", self.deps) if Q.kind == "eq" else Q

    def as_eq(self, P: VectorFunction) -> VectorFunction:
        return P.retag("eq", self.labels) if P.kind == "dep" else P

    def R_symmetry_fast(self, P: VectorFunction) -> LinDiffOp:
        if self.has_time_derivatives(P):
            raise ConversionError("eliminate t-derivatives first")
        return frechet_op(P, self.deps)

    def R_adjoint_fast(self, Q: VectorFunction) -> LinDiffOp:
        if self.has_time_derivatives(Q):
            raise ConversionError("eliminate t-derivatives first")
        return -frechet_op(Q, self.deps)

    def symmetry_equation_residual(self, P: VectorFunction) -> list:
        """partial_t P + [g, P] for a t-derivative-free characteristic P."""
        T = JetVar.indep(self.time)
        g = VectorFunction(self.g, "dep", self.deps)
        Pp = frechet_op(P, self.deps).apply(g)
        gp = frechet_op(g, self.deps).apply(P)
        return [partial(p, T) + a - b for p, a, b in zip(P, Pp, gp)]

    def adjoint_equation_residual(self, Q: VectorFunction) -> list:
        """partial_t Q + Q'(g) + g'^*(Q) for a t-derivative-free Q."""
        T = JetVar.indep(self.time)
        g = VectorFunction(self.g, "dep", self.deps)
        Qp = frechet_op(Q, self.deps).apply(g)
        gs = adjoint_op(frechet_op(g, self.deps)).apply(Q)
        return [partial(q, T) + a + b for q, a, b in zip(Q, Qp, gs)]

    def is_multiplier(self, Q: VectorFunction) -> bool:
        verdict = super().is_multiplier(Q)
        if not self.has_time_derivatives(Q):
            L = frechet_op(Q, self.deps)
            selfadj = L == adjoint_op(L)
            split = helmholtz_split(Q, self.deps)
            if selfadj != split:
                raise FactorizationDefect("Helmholtz checks disagree")
            if self.is_adjoint_symmetry(Q)[0] and selfadj != verdict:
                raise FactorizationDefect("multiplier verdicts disagree")
        return verdict


def helmholtz_split(Q: VectorFunction, deps: Sequence[str]) -> bool:
    """Componentwise condition dQ_alpha/du^beta_J = (-1)^|J| E^J_alpha(Q_beta)."""
    for a, Qa in zip(deps, Q):
        for b, Qb in zip(deps, Q):
            subs = {J for v in Qa.dependent_vars() if v.name == b for J, _ in sub_indices(v.deriv)}
            subs |= {J for v in Qb.dependent_vars() if v.name == a for J, _ in sub_indices(v.deriv)}
            for J in sorted(subs):
                lhs = partial(Qa, JetVar.dep(b, J))
                rhs = higher_euler(Qb, a, J)
                if lhs != (-rhs if len(J) % 2 else rhs):
                    return False
    return True
