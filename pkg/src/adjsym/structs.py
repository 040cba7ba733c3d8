"""Finite-dimensional structure: symmetry algebras, dual maps and brackets.

Everything here works in coordinates over fixed bases of symmetries and
adjoint-symmetries.  For a fixed adjoint-symmetry Q the dual map
``S_Q(P) = action(P, Q)`` is a matrix whose columns are the coordinates of
the images of the symmetry basis; its inverse is only ever applied to
coordinate vectors in its range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .actions import BasisTooSmall, action, combination, coordinates, on_solutions
from .coef import coef_div, format_coef
from .jetops import VectorFunction, commutator, prolong_op, adjoint_op, frechet_op
from .linalg import InconsistentSystem, rref, solve
from .pdesys import EvolutionSystem, PDESystem


class NotClosedError(ValueError):
    """A commutator leaves the span of the symmetry basis."""


class IllDefinedBracket(ValueError):
    """No well-definedness certificate is available for the requested bracket."""


class RangeError(ValueError):
    """The argument is not in the range of the dual map."""


class ConditionViolated(ValueError):
    """The kernel of the dual map meets the requested subalgebra."""


class NoCanonicalComplement(ValueError):
    """Kernel and complement share a scaling weight."""


class UnsupportedDecomposition(ValueError):
    """The adjoint action of the scaling element is not diagonal in the basis."""


# ---------------------------------------------------------------- vector helpers

def _zero(n: int) -> list:
    return [0] * n


def _vadd(a, b):
    return [x + y for x, y in zip(a, b)]


def _vscale(c, a):
    return [c * x if x != 0 else 0 for x in a]


def _vsub(a, b):
    return [x - y for x, y in zip(a, b)]


def _is_zero(a) -> bool:
    return all(x == 0 for x in a)


def _unit(n: int, k: int) -> list:
    v = _zero(n)
    v[k] = 1
    return v


def _cols(vectors) -> list:
    return [{k: x for k, x in enumerate(v) if x != 0} for v in vectors]


def _span_solve(vectors: Sequence[Sequence], target: Sequence):
    """Coefficients y with sum y_k vectors[k] = target, or None."""
    if _is_zero(target):
        return _zero(len(vectors))
    if not vectors:
        return None
    try:
        return solve(_cols(vectors), {k: x for k, x in enumerate(target) if x != 0})
    except InconsistentSystem:
        return None


def _rank(vectors) -> int:
    """Rank of a list of dense vectors or sparse dicts."""
    ds = [v if isinstance(v, dict) else {k: x for k, x in enumerate(v) if x != 0} for v in vectors]
    if not ds:
        return 0
    keys = sorted({k for d in ds for k in d}, key=repr)
    rows = [{j: d[k] for j, d in enumerate(ds) if k in d} for k in keys]
    return rref(rows, len(ds)).rank


def _matvec(M, x) -> list:
    return [sum((a * b for a, b in zip(row, x) if a != 0 and b != 0), 0) for row in M]


def _normalize(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


# ---------------------------------------------------------------- symmetry algebra

@dataclass
class SymmetryAlgebra:
    """Exact structure constants ``[P_i, P_j] = sum_k c[i][j][k] P_k``."""

    basis: list
    constants: list
    labels: list

    @property
    def dim(self) -> int:
        return len(self.basis)

    def bracket(self, x: Sequence, y: Sequence) -> list:
        """Commutator of two coordinate vectors."""
        out = _zero(self.dim)
        for i, xi in enumerate(x):
            if xi == 0:
                continue
            for j, yj in enumerate(y):
                if yj == 0 or i == j:
                    continue
                out = _vadd(out, _vscale(xi * yj, self.constants[i][j]))
        return [_normalize(c) for c in out]

    def ad(self, s: Sequence) -> list:
        """Matrix of X -> [s, X] in the basis (columns = images of basis vectors)."""
        cols = [self.bracket(s, _unit(self.dim, j)) for j in range(self.dim)]
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    def antisymmetric(self) -> bool:
        return all(_is_zero(_vadd(self.constants[i][j], self.constants[j][i]))
                   for i in range(self.dim) for j in range(self.dim))

    def jacobi_residuals(self) -> list:
        out = []
        n = self.dim
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    ei, ej, ek = _unit(n, i), _unit(n, j), _unit(n, k)
                    r = _vadd(_vadd(self.bracket(ei, self.bracket(ej, ek)),
                                    self.bracket(ej, self.bracket(ek, ei))),
                              self.bracket(ek, self.bracket(ei, ej)))
                    if not _is_zero(r):
                        out.append(((i, j, k), r))
        return out

    def nonzero_brackets(self) -> dict:
        return {(self.labels[i], self.labels[j]): c for i, row in enumerate(self.constants)
                for j, c in enumerate(row) if i < j and not _is_zero(c)}

    def in_span(self, vectors: Sequence, v: Sequence) -> bool:
        return _span_solve(list(vectors), v) is not None

    def is_subalgebra(self, vectors: Sequence) -> bool:
        vs = list(vectors)
        return all(self.in_span(vs, self.bracket(a, b)) for a in vs for b in vs)


def structure_constants(basis: Sequence[VectorFunction], sys: PDESystem,
                        labels: Sequence[str] | None = None) -> SymmetryAlgebra:
    basis = list(basis)
    labels = list(labels) if labels is not None else [f"P{k + 1}" for k in range(len(basis))]
    n = len(basis)
    consts = [[_zero(n) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            try:
                c = coordinates(commutator(basis[i], basis[j]), basis, sys)
            except BasisTooSmall:
                raise NotClosedError(f"[{labels[i]}, {labels[j]}] is not in the span of the basis") from None
            consts[i][j] = [_normalize(x) for x in c]
            consts[j][i] = [_normalize(-x) for x in c]
    alg = SymmetryAlgebra(basis, consts, labels)
    if alg.jacobi_residuals():
        raise NotClosedError("structure constants violate the Jacobi identity")
    return alg


# ---------------------------------------------------------------- bases and dual maps

class Bases:
    """Symmetry and adjoint-symmetry bases of one system, with cached action data."""

    def __init__(self, sys: PDESystem, symm: Sequence[VectorFunction], adj: Sequence[VectorFunction],
                 symm_labels: Sequence[str] | None = None, adj_labels: Sequence[str] | None = None):
        self.sys = sys
        self.symm = list(symm)
        self.adj = list(adj)
        self.symm_labels = list(symm_labels) if symm_labels else [f"P{k + 1}" for k in range(len(self.symm))]
        self.adj_labels = list(adj_labels) if adj_labels else [f"Q{k + 1}" for k in range(len(self.adj))]
        for P in self.symm:
            if not sys.is_symmetry(P)[0]:
                raise ValueError(f"{P} is not a symmetry")
        for Q in self.adj:
            if not sys.is_adjoint_symmetry(Q)[0]:
                raise ValueError(f"{Q} is not an adjoint-symmetry")
        self._adj_restricted = [on_solutions(Q, sys) for Q in self.adj]
        if _rank([_flat(Q) for Q in self._adj_restricted]) != len(self.adj):
            raise ValueError("adjoint-symmetry basis is linearly dependent on solutions")
        self._algebra = None
        self._tensor = {}

    @property
    def algebra(self) -> SymmetryAlgebra:
        if self._algebra is None:
            self._algebra = structure_constants(self.symm, self.sys, self.symm_labels)
        return self._algebra

    def adj_coordinates(self, F: VectorFunction) -> list:
        return [_normalize(c) for c in coordinates(F, self._adj_restricted, self.sys)]

    def tensor(self, tag: int) -> list:
        """``T[b][j]`` = coordinates of action(P_j, Q_b)."""
        tag = int(tag)
        if tag not in self._tensor:
            T = []
            for b, Q in enumerate(self.adj):
                row = []
                for j, P in enumerate(self.symm):
                    try:
                        row.append(self.adj_coordinates(action(tag, P, Q, self.sys)))
                    except BasisTooSmall:
                        raise BasisTooSmall(f"S{tag}({self.symm_labels[j]}) on {self.adj_labels[b]} "
                                            "leaves the adjoint-symmetry span") from None
                T.append(row)
            self._tensor[tag] = T
        return self._tensor[tag]

    def coords_of(self, Q) -> list:
        return list(Q) if not isinstance(Q, VectorFunction) else self.adj_coordinates(Q)

    def S(self, tag: int, q: Sequence, x: Sequence) -> list:
        """Coordinates of S_Q(P) for coordinate vectors q (of Q) and x (of P)."""
        T = self.tensor(tag)
        out = _zero(len(self.adj))
        for b, qb in enumerate(q):
            if qb == 0:
                continue
            for j, xj in enumerate(x):
                if xj != 0:
                    out = _vadd(out, _vscale(qb * xj, T[b][j]))
        return [_normalize(c) for c in out]

    def adj_vector(self, coords: Sequence) -> VectorFunction:
        return combination(coords, self.adj)

    def symm_vector(self, coords: Sequence) -> VectorFunction:
        return combination(coords, self.symm)


def _flat(F: VectorFunction) -> dict:
    return {(k, m): c for k, comp in enumerate(F) for m, c in comp._t.items()}


@dataclass
class DualMapMatrix:
    tag: int
    q: list
    matrix: list
    kernel: list
    range: list
    pivots: list
    assumptions: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def column(self, j: int) -> list:
        return [row[j] for row in self.matrix]

    def apply(self, x: Sequence) -> list:
        return [_normalize(c) for c in _matvec(self.matrix, x)]

    def in_range(self, y: Sequence) -> bool:
        return _span_solve([self.column(j) for j in range(len(self.matrix[0]))], y) is not None

    def preimage(self, y: Sequence, complement: Sequence[Sequence]) -> list:
        """x in span(complement) with S x = y."""
        images = [self.apply(c) for c in complement]
        coeffs = _span_solve(images, y)
        if coeffs is None:
            raise RangeError("vector is not in the range of the dual map")
        n = len(self.matrix[0])
        x = _zero(n)
        for a, c in zip(coeffs, complement):
            if a != 0:
                x = _vadd(x, _vscale(a, c))
        return [_normalize(c) for c in x]


def dual_map(tag: int, Q, bases: Bases) -> DualMapMatrix:
    """Matrix of P -> S_P(Q) from symmetry coordinates to adjoint-symmetry coordinates.

    ``Q`` is a VectorFunction in the adjoint-symmetry span or its coordinate vector.
    """
    q = bases.coords_of(Q)
    n, d = len(bases.symm), len(bases.adj)
    cols = [bases.S(tag, q, _unit(n, j)) for j in range(n)]
    matrix = [[cols[j][i] for j in range(n)] for i in range(d)]
    ech = rref([{j: row[j] for j in range(n) if row[j] != 0} for row in matrix], n)
    kernel = [[_normalize(c) for c in v] for v in ech.nullspace()]
    rng = [cols[j] for j in ech.pivots]
    return DualMapMatrix(int(tag), q, matrix, kernel, rng, list(ech.pivots), list(ech.assumptions))


def dimension_condition(Q, tag: int, bases: Bases) -> bool:
    """dim AdjSymm + dim ker S_Q == dim Symm."""
    S = dual_map(tag, Q, bases)
    return len(bases.adj) + len(S.kernel) == len(bases.symm)


# ---------------------------------------------------------------- kernel structure

def is_ideal(kernel: Sequence[Sequence], algebra: SymmetryAlgebra) -> bool:
    ks = list(kernel)
    return all(algebra.in_span(ks, algebra.bracket(_unit(algebra.dim, i), k))
               for k in ks for i in range(algebra.dim))


def subalgebra_residuals(tag: int, Q: VectorFunction, P1: VectorFunction, P2: VectorFunction,
                         sys: PDESystem) -> VectorFunction:
    """Obstruction to [P1, P2] lying in ker S_Q for kernel elements P1, P2.

    Action 1 has no obstruction.  Action 3: pr X_P2(R_Q^*)(P1) - pr X_P1(R_Q^*)(P2);
    action 2 adds R_P2^*(S1(P1)) - R_P1^*(S1(P2)).  Returned on solutions.
    """
    tag = int(tag)
    if tag == 1:
        return VectorFunction.zeros("eq", sys.labels)
    RQs = adjoint_op(sys.R_adjoint(Q))
    r = [a - b for a, b in zip(prolong_op(P2, RQs).apply(P1), prolong_op(P1, RQs).apply(P2))]
    if tag == 2:
        s1a, s1b = action(1, P1, Q, sys), action(1, P2, Q, sys)
        ra = adjoint_op(sys.R_symmetry(P2)).apply(s1a)
        rb = adjoint_op(sys.R_symmetry(P1)).apply(s1b)
        r = [x + a - b for x, a, b in zip(r, ra, rb)]
    res = on_solutions(VectorFunction(r, "eq", sys.labels), sys)
    if isinstance(sys, EvolutionSystem) and not any(sys.has_time_derivatives(F) for F in (Q, P1, P2)):
        ev = _evolution_residual(tag, Q, P1, P2, sys)
        if ev != res:
            raise RuntimeError("evolution form of the subalgebra condition disagrees with the general form")
    return res


def _evolution_residual(tag, Q, P1, P2, esys: EvolutionSystem) -> VectorFunction:
    deps = esys.deps
    Qs = adjoint_op(frechet_op(Q, deps))
    r = [a - b for a, b in zip(prolong_op(P1, Qs).apply(P2), prolong_op(P2, Qs).apply(P1))]
    if tag == 2:
        Qp = frechet_op(Q, deps)

        def s3(P):
            return esys.as_dep(VectorFunction([a - b for a, b in zip(Qp.apply(P), Qs.apply(P))], "eq", esys.labels))

        a = adjoint_op(frechet_op(P2, deps)).apply(s3(P1))
        b = adjoint_op(frechet_op(P1, deps)).apply(s3(P2))
        r = [x + y - z for x, y, z in zip(r, a, b)]
    return on_solutions(VectorFunction(r, "eq", esys.labels), esys)


def subalgebra_conditions(tag: int, Q: VectorFunction, kernel: Sequence[VectorFunction], sys: PDESystem) -> bool:
    """The obstruction vanishes for every kernel pair (trivially true when dim ker <= 1)."""
    ks = list(kernel)
    if len(ks) <= 1:
        return True
    return all(subalgebra_residuals(tag, Q, ks[i], ks[j], sys).is_zero()
               for i in range(len(ks)) for j in range(i + 1, len(ks)))


@dataclass
class ScalingDecomposition:
    weights: list
    kernel_weights: list
    complement_weights: list
    complement: list

    def weight_of(self, j: int):
        return self.weights[j]


def _distinct(ws) -> list:
    out = []
    for w in ws:
        if not any(w == v for v in out):
            out.append(w)
    return out


def scaling_decomposition(algebra: SymmetryAlgebra, scaling: Sequence, kernel: Sequence[Sequence] = ()) -> ScalingDecomposition:
    """Weights of the basis under ad(scaling) and the weight-graded complement of ``kernel``."""
    n = algebra.dim
    A = algebra.ad(list(scaling))
    for i in range(n):
        for j in range(n):
            if i != j and A[i][j] != 0:
                raise UnsupportedDecomposition("ad of the scaling element is not diagonal in this basis")
    weights = [A[j][j] for j in range(n)]
    distinct = _distinct(weights)
    ks = [list(k) for k in kernel]
    kernel_weights = []
    for w in distinct:
        idx = [j for j in range(n) if weights[j] == w]
        projs = [[k[j] if j in idx else 0 for j in range(n)] for k in ks]
        for pr in projs:
            if not _is_zero(pr) and not algebra.in_span(ks, pr):
                raise NoCanonicalComplement("kernel is not a sum of scaling-homogeneous subspaces")
        if any(not _is_zero(pr) for pr in projs):
            kernel_weights.append(w)
    complement_weights = [w for w in distinct if not any(w == v for v in kernel_weights)]
    complement = [_unit(n, j) for j in range(n) if any(weights[j] == w for w in complement_weights)]
    if len(complement) + len(ks) != n:
        raise NoCanonicalComplement("kernel and complement share a scaling weight")
    return ScalingDecomposition(weights, kernel_weights, complement_weights, complement)


# ---------------------------------------------------------------- commutator brackets

@dataclass
class BracketResult:
    value: list
    certificate: str
    shift_verified: bool = False


@dataclass
class BracketTable:
    """Brackets between the listed adjoint-symmetries (coordinate vectors)."""

    elements: list
    labels: list
    values: dict
    certificate: str
    antisymmetric: bool
    jacobi_residuals: list
    shift_verified: bool = False


class CommutatorBracket:
    """``Q[Qa, Qb] = S_Q([S_Q^{-1} Qa, S_Q^{-1} Qb])`` with a certified choice of preimages."""

    def __init__(self, tag: int, Q, bases: Bases, scaling: Sequence | None = None):
        self.tag = int(tag)
        self.bases = bases
        self.S = dual_map(tag, Q, bases)
        alg = bases.algebra
        n = alg.dim
        if is_ideal(self.S.kernel, alg):
            self.certificate = "ideal-kernel"
            self.complement = [_unit(n, j) for j in self.S.pivots]
            Qv = Q if isinstance(Q, VectorFunction) else bases.adj_vector(Q)
            ks = [bases.symm_vector(k) for k in self.S.kernel]
            self.subalgebra_ok = subalgebra_conditions(self.tag, Qv, ks, bases.sys)
            if not self.subalgebra_ok:
                raise RuntimeError("ideal kernel fails the subalgebra condition")
        elif scaling is not None:
            self.decomposition = scaling_decomposition(alg, scaling, self.S.kernel)
            self.certificate = "scaling-decomposition"
            self.complement = self.decomposition.complement
        else:
            raise IllDefinedBracket(f"kernel of S{self.tag} is not an ideal and no scaling element was given")

    def preimage(self, y: Sequence) -> list:
        return self.S.preimage(y, self.complement)

    def __call__(self, a, b) -> list:
        ya, yb = self.bases.coords_of(a), self.bases.coords_of(b)
        xa, xb = self.preimage(ya), self.preimage(yb)
        return self.S.apply(self.bases.algebra.bracket(xa, xb))

    def shift_independent(self, a, b) -> bool:
        """Recompute with every kernel shift of either preimage and compare."""
        ya, yb = self.bases.coords_of(a), self.bases.coords_of(b)
        xa, xb = self.preimage(ya), self.preimage(yb)
        ref = self.S.apply(self.bases.algebra.bracket(xa, xb))
        for k in self.S.kernel:
            for sa, sb in ((k, _zero(len(k))), (_zero(len(k)), k), (k, k)):
                v = self.S.apply(self.bases.algebra.bracket(_vadd(xa, sa), _vadd(xb, sb)))
                if v != ref:
                    return False
        return True

    def table(self, elements: Sequence | None = None, labels: Sequence[str] | None = None) -> BracketTable:
        elems = [self.bases.coords_of(e) for e in elements] if elements is not None else list(self.S.range)
        labels = list(labels) if labels is not None else [_label(e, self.bases.adj_labels) for e in elems]
        for e in elems:
            if not self.S.in_range(e):
                raise RangeError(f"{_label(e, self.bases.adj_labels)} is not in the range of S{self.tag}")
        values = {(i, j): self(elems[i], elems[j]) for i in range(len(elems)) for j in range(len(elems))}
        anti = all(_is_zero(_vadd(values[(i, j)], values[(j, i)])) for i, j in values)
        jac = []
        m = len(elems)
        for i in range(m):
            for j in range(i + 1, m):
                for k in range(j + 1, m):
                    r = _vadd(_vadd(self(elems[i], self(elems[j], elems[k])),
                                    self(elems[j], self(elems[k], elems[i]))),
                              self(elems[k], self(elems[i], elems[j])))
                    if not _is_zero(r):
                        jac.append(((i, j, k), r))
        shift = self.certificate == "ideal-kernel" and all(
            self.shift_independent(elems[i], elems[j]) for i in range(m) for j in range(m))
        return BracketTable(elems, labels, values, self.certificate, anti, jac, shift)


def _label(coords: Sequence, labels: Sequence[str]) -> str:
    parts = []
    for c, l in zip(coords, labels):
        if c == 0:
            continue
        parts.append(l if c == 1 else f"({format_coef(c)})*{l}")
    return " + ".join(parts) or "0"


def commutator_bracket(tag: int, Q, Qa, Qb, bases: Bases, scaling: Sequence | None = None) -> BracketResult:
    br = CommutatorBracket(tag, Q, bases, scaling)
    for v in (Qa, Qb):
        if not br.S.in_range(bases.coords_of(v)):
            raise RangeError(f"{_label(bases.coords_of(v), bases.adj_labels)} is not in the range of S{br.tag}")
    value = br(Qa, Qb)
    shift = br.certificate == "ideal-kernel" and br.shift_independent(Qa, Qb)
    if br.certificate == "ideal-kernel" and not shift:
        raise RuntimeError("bracket depends on the choice of preimage despite an ideal kernel")
    return BracketResult(value, br.certificate, shift)


def subalgebra_bracket(tag: int, Q, subalgebra: Sequence[Sequence], bases: Bases) -> BracketTable:
    """Pull-back of a symmetry subalgebra A through S_Q when ker S_Q meets A trivially."""
    alg = bases.algebra
    A = [list(a) for a in subalgebra]
    if _rank(A) != len(A):
        raise ValueError("subalgebra generators are linearly dependent")
    if not alg.is_subalgebra(A):
        raise ValueError("the given vectors do not span a subalgebra")
    S = dual_map(tag, Q, bases)
    images = [S.apply(a) for a in A]
    if _rank(images) != len(A):
        raise ConditionViolated(f"ker S{int(tag)} meets the subalgebra")
    values = {}
    for i in range(len(A)):
        for j in range(len(A)):
            values[(i, j)] = S.apply(alg.bracket(A[i], A[j]))
    anti = all(_is_zero(_vadd(values[(i, j)], values[(j, i)])) for i, j in values)

    def br(y1, y2):
        x1, x2 = S.preimage(y1, A), S.preimage(y2, A)
        return S.apply(alg.bracket(x1, x2))

    jac = []
    m = len(A)
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                r = _vadd(_vadd(br(images[i], br(images[j], images[k])),
                                br(images[j], br(images[k], images[i]))),
                          br(images[k], br(images[i], images[j])))
                if not _is_zero(r):
                    jac.append(((i, j, k), r))
    labels = [_label(y, bases.adj_labels) for y in images]
    return BracketTable(images, labels, values, "subalgebra-pullback", anti, jac, False)


# ---------------------------------------------------------------- non-commutator bracket

class NonCommutatorBracket:
    """``Q(Q1, Q2) = S_{Q1}(S_Q^{-1} Q2)``."""

    def __init__(self, tag: int, Q, bases: Bases, scaling: Sequence | None = None):
        self.tag = int(tag)
        self.bases = bases
        self.S = dual_map(tag, Q, bases)
        d = len(bases.adj)
        kernel_trivial = all(_is_zero(bases.S(self.tag, _unit(d, b), k)) for k in self.S.kernel for b in range(d))
        if kernel_trivial:
            self.certificate = "kernel-acts-trivially"
            self.complement = [_unit(len(bases.symm), j) for j in self.S.pivots]
        elif scaling is not None:
            self.decomposition = scaling_decomposition(bases.algebra, scaling, self.S.kernel)
            self.certificate = "scaling-decomposition"
            self.complement = self.decomposition.complement
        else:
            raise IllDefinedBracket(f"kernel of S{self.tag} acts nontrivially and no scaling element was given")

    def __call__(self, Q1, Q2, variant: str | None = None) -> list:
        y1, y2 = self.bases.coords_of(Q1), self.bases.coords_of(Q2)
        v12 = self.bases.S(self.tag, y1, self.S.preimage(y2, self.complement))
        if variant is None:
            return v12
        v21 = self.bases.S(self.tag, y2, self.S.preimage(y1, self.complement))
        if variant == "+":
            return [_normalize(coef_div(a + b, 2)) for a, b in zip(v12, v21)]
        if variant == "-":
            return [_normalize(coef_div(a - b, 2)) for a, b in zip(v12, v21)]
        raise ValueError(f"unknown variant {variant!r}")


def noncommutator_bracket(tag: int, Q, Q1, Q2, bases: Bases, variant: str | None = None,
                          scaling: Sequence | None = None) -> list:
    br = NonCommutatorBracket(tag, Q, bases, scaling)
    return br(Q1, Q2, variant)
