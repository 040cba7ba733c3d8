"""Ansatz solver for the linear determining equations.

An :class:`Ansatz` is a finite pool of candidate terms, each a component index
paired with an expression.  The unknown object is ``sum_k c_k * pool[k]``; the
determining equations are linear in the ``c_k`` and split into one scalar
equation per distinct jet monomial.  Monomials whose exponents differ in their
parameter part are different keys, so the solution is valid for generic
parameter values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Sequence

from .expr import ONE, ZERO, DiffExpr, JetVar
from .jetops import VectorFunction, euler
from .linalg import rref
from .pdesys import PDESystem


@dataclass(frozen=True)
class Ansatz:
    """Pool of ``(component, term)`` pairs; unknowns are named c0, c1, ..."""

    pool: tuple

    def __post_init__(self):
        pool = tuple((int(k), t) for k, t in self.pool)
        if len(set(pool)) != len(pool):
            raise ValueError("ansatz pool entries must be distinct")
        object.__setattr__(self, "pool", pool)

    @property
    def unknowns(self) -> tuple:
        return tuple(f"c{k}" for k in range(len(self.pool)))

    def __len__(self):
        return len(self.pool)

    @staticmethod
    def polynomial(variables: Sequence, degree: int, components: int = 1) -> "Ansatz":
        """All monomials of total degree <= ``degree`` in ``variables``, for each component."""
        monos = monomials(variables, degree)
        return Ansatz(tuple((k, m) for k in range(components) for m in monos))

    @staticmethod
    def point_symmetry(space, degree: int) -> "Ansatz":
        """Characteristics ``eta(x,u) - xi^i(x,u) u_i`` with polynomial eta, xi of bounded degree.

        Only one dependent variable is supported: with several, the xi^i are
        shared between components and the pool would need coupled entries.
        """
        if len(space.dependent) > 1:
            raise ValueError("point_symmetry ansatz is implemented for one dependent variable")
        base = [DiffExpr.var(JetVar.indep(i)) for i in space.independent]
        base += [DiffExpr.var(JetVar.dep(a)) for a in space.dependent]
        monos = monomials(base, degree)
        pool = []
        for k, a in enumerate(space.dependent):
            pool += [(k, mo) for mo in monos]
            for i in space.independent:
                ui = DiffExpr.var(JetVar.dep(a, (i,)))
                pool += [(k, -mo * ui) for mo in monos]
        return Ansatz(tuple(pool))

    def instantiate(self, coeffs: Sequence, kind: str, labels: Sequence[str]) -> VectorFunction:
        comps = [ZERO] * len(labels)
        for c, (k, t) in zip(coeffs, self.pool):
            if c != 0:
                comps[k] = comps[k] + t.scale(c)
        return VectorFunction(comps, kind, labels)


def monomials(variables: Sequence, degree: int) -> list:
    out = [ONE]
    for d in range(1, degree + 1):
        for combo in combinations_with_replacement(variables, d):
            m = ONE
            for v in combo:
                m = m * v
            out.append(m)
    return out


@dataclass
class SolutionSpace:
    basis: list
    assumptions: list = field(default_factory=list)
    pool_size: int = 0

    @property
    def dim(self) -> int:
        return len(self.basis)


def _split(exprs: Iterable) -> dict:
    """``{(row, monomial): coefficient}`` for a list of expressions."""
    out = {}
    for r, e in enumerate(exprs):
        for m, c in e._t.items():
            out[(r, m)] = c
    return out


def _solve(ansatz: Ansatz, conditions: Callable, kind: str, labels) -> SolutionSpace:
    if not ansatz.pool:
        return SolutionSpace([], [], 0)
    rows: dict = {}
    for j, (k, t) in enumerate(ansatz.pool):
        comps = [ZERO] * len(labels)
        comps[k] = t
        F = VectorFunction(comps, kind, labels)
        for key, c in _split(conditions(F)).items():
            rows.setdefault(key, {})[j] = c
    ech = rref(rows.values(), len(ansatz.pool))
    basis = [ansatz.instantiate(v, kind, labels) for v in ech.nullspace()]
    return SolutionSpace(basis, sorted(set(ech.assumptions)), len(ansatz.pool))


def solve_symmetries(sys: PDESystem, ansatz: Ansatz) -> SolutionSpace:
    return _solve(ansatz, sys.symmetry_residual, "dep", sys.deps)


def _adjoint_conditions(sys: PDESystem):
    def cond(Q):
        return [sys.restrict(g) for g in sys.adjoint_frechet_G().apply(Q)]
    return cond


def solve_adjoint_symmetries(sys: PDESystem, ansatz: Ansatz) -> SolutionSpace:
    return _solve(ansatz, _adjoint_conditions(sys), "eq", sys.labels)


def solve_multipliers(sys: PDESystem, ansatz: Ansatz) -> SolutionSpace:
    """Adjoint-symmetry equations together with the Euler condition E(Q.G) = 0."""
    adj = _adjoint_conditions(sys)

    def cond(Q):
        dens = sys.pairing_density(Q)
        return adj(Q) + [euler(dens, a) for a in sys.deps]

    return _solve(ansatz, cond, "eq", sys.labels)
