"""Calculus on jet space: total derivatives, linear total-derivative operators,
Frechet derivatives and adjoints, Euler operators, commutators and explicit
divergence witnesses.

Multi-indices are sorted tuples of independent-variable names, e.g.
``("t", "x", "x")`` for D_t D_x^2.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb
from typing import Iterable, Sequence

from .coef import Coef, format_coef, is_coef
from .expr import (
    ONE,
    ZERO,
    AffineExponent,
    DiffExpr,
    JetVar,
    _acc,
    _lift,
    _mono_mul,
    exp_as_coef,
)


class IndexSpaceError(ValueError):
    """Operands live in incompatible index spaces (dependent vs equation)."""


class WitnessDefect(RuntimeError):
    """A constructed divergence witness failed its own residual check."""


# ---------------------------------------------------------------- multi-indices

def mi(spec: str | Iterable[str]) -> tuple:
    return tuple(sorted(spec))


def mi_add(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b)) if b else a


def mi_sub(a: tuple, b: tuple) -> tuple:
    c = Counter(a)
    c.subtract(b)
    if any(v < 0 for v in c.values()):
        raise ValueError(f"{b} is not contained in {a}")
    return tuple(sorted(c.elements()))


def mi_contains(a: tuple, b: tuple) -> bool:
    ca, cb = Counter(a), Counter(b)
    return all(ca[k] >= v for k, v in cb.items())


def mi_binom(a: tuple, b: tuple) -> int:
    ca, cb = Counter(a), Counter(b)
    out = 1
    for k, v in cb.items():
        out *= comb(ca[k], v)
    return out


@lru_cache(maxsize=None)
def sub_indices(a: tuple) -> tuple:
    """All sub-multi-indices K of ``a`` (as count vectors), with C(a, K)."""
    c = sorted(Counter(a).items())
    out = []
    for ks in product(*(range(n + 1) for _, n in c)):
        K = tuple(name for (name, _), k in zip(c, ks) for _ in range(k))
        out.append((K, mi_binom(a, K)))
    return tuple(out)


def mi_str(I: tuple) -> str:
    return "".join(I)


# ---------------------------------------------------------------- derivatives

@lru_cache(maxsize=400_000)
def _mono_D(m: tuple, i: str) -> tuple:
    out: dict = {}
    for k, (v, e) in enumerate(m):
        if v.kind == 0:
            if v.name != i:
                continue
            dv = None
        else:
            dv = v.diff(i)
        lowered = e - 1
        rest = m[:k] + (((v, lowered),) if lowered != 0 else ()) + m[k + 1:]
        if dv is not None:
            rest = _mono_mul(rest, ((dv, 1),))
        _acc(out, rest, exp_as_coef(e))
    return tuple(out.items())


@lru_cache(maxsize=200_000)
def total_derivative(e: DiffExpr, i: str) -> DiffExpr:
    """D_i e, the total derivative with respect to independent variable ``i``."""
    out: dict = {}
    for m, c in e._t.items():
        for dm, dc in _mono_D(m, i):
            _acc(out, dm, c * dc)
    return DiffExpr(out)


def derivative(e: DiffExpr, I: Sequence[str]) -> DiffExpr:
    """D_I e for a multi-index ``I``."""
    I = tuple(sorted(I))
    return _derivative(e, I)


@lru_cache(maxsize=200_000)
def _derivative(e: DiffExpr, I: tuple) -> DiffExpr:
    if not I:
        return e
    return total_derivative(_derivative(e, I[:-1]), I[-1])


@lru_cache(maxsize=200_000)
def partial(e: DiffExpr, v: JetVar) -> DiffExpr:
    """Partial derivative with respect to a jet coordinate."""
    out: dict = {}
    for m, c in e._t.items():
        for k, (w, x) in enumerate(m):
            if w == v:
                lowered = x - 1
                rest = m[:k] + (((w, lowered),) if lowered != 0 else ()) + m[k + 1:]
                _acc(out, rest, c * exp_as_coef(x))
                break
    return DiffExpr(out)


def divergence(psi: Sequence[DiffExpr], indep: Sequence[str]) -> DiffExpr:
    if len(psi) != len(indep):
        raise ValueError("one component per independent variable is required")
    out = ZERO
    for f, i in zip(psi, indep):
        out = out + total_derivative(_lift(f), i)
    return out


# ---------------------------------------------------------------- vector functions

class VectorFunction:
    """Components indexed by dependent variables (``kind="dep"``) or by
    equations (``kind="eq"``); ``labels`` name the index values."""

    __slots__ = ("components", "kind", "labels", "_hash")

    def __init__(self, components: Iterable, kind: str, labels: Sequence[str]):
        self.components = tuple(_lift(c) if not isinstance(c, DiffExpr) else c for c in components)
        if any(c is None for c in self.components):
            raise TypeError("components must be expressions")
        if kind not in ("dep", "eq"):
            raise ValueError(f"unknown index space {kind!r}")
        self.kind = kind
        self.labels = tuple(labels)
        if len(self.labels) != len(self.components):
            raise IndexSpaceError(f"{len(self.components)} components for index space {self.labels}")
        self._hash = None

    @staticmethod
    def zeros(kind: str, labels: Sequence[str]) -> "VectorFunction":
        return VectorFunction([ZERO] * len(labels), kind, labels)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, k):
        return self.components[k]

    def __iter__(self):
        return iter(self.components)

    def _check(self, other: "VectorFunction"):
        if not isinstance(other, VectorFunction):
            raise TypeError(f"expected VectorFunction, got {type(other).__name__}")
        if other.kind != self.kind or other.labels != self.labels:
            raise IndexSpaceError(f"index spaces differ: {self.kind}{self.labels} vs {other.kind}{other.labels}")

    def __add__(self, other):
        self._check(other)
        return VectorFunction([a + b for a, b in zip(self, other)], self.kind, self.labels)

    def __sub__(self, other):
        self._check(other)
        return VectorFunction([a - b for a, b in zip(self, other)], self.kind, self.labels)

    def __neg__(self):
        return VectorFunction([-a for a in self], self.kind, self.labels)

    def __mul__(self, c):
        if is_coef(c) or isinstance(c, DiffExpr):
            return VectorFunction([a * c for a in self], self.kind, self.labels)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, c):
        return VectorFunction([a / c for a in self], self.kind, self.labels)

    def map(self, f) -> "VectorFunction":
        return VectorFunction([f(a) for a in self], self.kind, self.labels)

    def retag(self, kind: str, labels: Sequence[str]) -> "VectorFunction":
        return VectorFunction(self.components, kind, labels)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self)

    def __eq__(self, other):
        if not isinstance(other, VectorFunction):
            return NotImplemented
        return self.kind == other.kind and self.labels == other.labels and self.components == other.components

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.kind, self.labels, self.components))
        return self._hash

    def __str__(self):
        if len(self) == 1:
            return str(self.components[0])
        return "(" + ", ".join(str(c) for c in self) + ")"

    def __repr__(self):
        return f"VectorFunction[{self.kind}]({self})"


def dep_vector(components, deps: Sequence[str]) -> VectorFunction:
    return VectorFunction(components, "dep", deps)


# ---------------------------------------------------------------- operators

class LinDiffOp:
    """Matrix of linear total-derivative operators ``sum_I a_I D_I``.

    Entries are stored as ``{(row, col, I): coefficient}`` with no zero
    coefficients.  Applying to a VectorFunction ``F`` gives
    ``result[row] = sum a_{row,col,I} D_I F[col]``.
    """

    __slots__ = ("shape", "entries", "_hash")

    def __init__(self, shape: tuple, entries: dict | None = None):
        self.shape = (int(shape[0]), int(shape[1]))
        clean = {}
        for (r, c, I), a in (entries or {}).items():
            a = _lift(a)
            if a:
                clean[(r, c, tuple(sorted(I)))] = a
        self.entries = clean
        self._hash = None

    # constructors -------------------------------------------------------
    @staticmethod
    def zero(rows: int, cols: int) -> "LinDiffOp":
        return LinDiffOp((rows, cols))

    @staticmethod
    def identity(n: int) -> "LinDiffOp":
        return LinDiffOp((n, n), {(k, k, ()): ONE for k in range(n)})

    @staticmethod
    def D(I: str | Sequence[str], n: int = 1, coeff=1) -> "LinDiffOp":
        return LinDiffOp((n, n), {(k, k, mi(I)): coeff for k in range(n)})

    @staticmethod
    def mult(f, n: int = 1) -> "LinDiffOp":
        return LinDiffOp((n, n), {(k, k, ()): f for k in range(n)})

    @staticmethod
    def scalar(terms: dict) -> "LinDiffOp":
        """1x1 operator from ``{multi-index string or tuple: coefficient}``."""
        return LinDiffOp((1, 1), {(0, 0, mi(I)): a for I, a in terms.items()})

    # inspection ---------------------------------------------------------
    def coefficient(self, row: int, col: int, I) -> DiffExpr:
        return self.entries.get((row, col, mi(I)), ZERO)

    def order(self) -> int:
        return max((len(I) for (_, _, I) in self.entries), default=-1)

    def is_zero(self) -> bool:
        return not self.entries

    def has_constant_coefficients(self) -> bool:
        return all(a.is_constant() for a in self.entries.values())

    # algebra ------------------------------------------------------------
    def _same_shape(self, other):
        if not isinstance(other, LinDiffOp):
            raise TypeError("expected LinDiffOp")
        if other.shape != self.shape:
            raise IndexSpaceError(f"operator shapes differ: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._same_shape(other)
        out = dict(self.entries)
        for k, a in other.entries.items():
            out[k] = out.get(k, ZERO) + a
        return LinDiffOp(self.shape, out)

    def __neg__(self):
        return LinDiffOp(self.shape, {k: -a for k, a in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        """Left multiplication of every coefficient by a function or constant."""
        if is_coef(c) or isinstance(c, DiffExpr):
            return LinDiffOp(self.shape, {k: a * c for k, a in self.entries.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: "LinDiffOp") -> "LinDiffOp":
        return compose(self, other)

    def apply(self, F: VectorFunction | DiffExpr | Sequence) -> list:
        args = _components(F)
        if len(args) != self.shape[1]:
            raise IndexSpaceError(f"operator expects {self.shape[1]} components, got {len(args)}")
        out = [ZERO] * self.shape[0]
        for (r, c, I), a in self.entries.items():
            if args[c]:
                out[r] = out[r] + a * derivative(args[c], I)
        return out

    def __call__(self, F):
        res = self.apply(F)
        return res[0] if self.shape[0] == 1 and isinstance(F, DiffExpr) else res

    def map_coeffs(self, f) -> "LinDiffOp":
        return LinDiffOp(self.shape, {k: f(a) for k, a in self.entries.items()})

    def transpose_shape(self):
        return (self.shape[1], self.shape[0])

    def __eq__(self, other):
        if not isinstance(other, LinDiffOp):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, frozenset(self.entries.items())))
        return self._hash

    def __str__(self):
        return format_op(self)

    def __repr__(self):
        return f"LinDiffOp({format_op(self)!r})"


def _components(F) -> list:
    if isinstance(F, VectorFunction):
        return list(F.components)
    if isinstance(F, DiffExpr):
        return [F]
    return [_lift(f) for f in F]


def _format_scalar_op(terms: dict) -> str:
    if not terms:
        return "0"
    parts = []
    for I in sorted(terms, key=lambda I: (-len(I), I)):
        a = terms[I]
        s = str(a)
        if I:
            d = "D_" + mi_str(I)
            if a == ONE:
                body = d
            elif a == -ONE:
                body = "-" + d
            else:
                body = (f"({s})" if len(a) > 1 or " " in s else s) + "*" + d
        else:
            body = s if len(a) == 1 else f"({s})"
        parts.append(body)
    out = parts[0]
    for b in parts[1:]:
        out += " - " + b[1:] if b.startswith("-") else " + " + b
    return out


def format_op(L: LinDiffOp) -> str:
    cells = {}
    for (r, c, I), a in L.entries.items():
        cells.setdefault((r, c), {})[I] = a
    if L.shape == (1, 1):
        return _format_scalar_op(cells.get((0, 0), {}))
    rows = []
    for r in range(L.shape[0]):
        rows.append("[" + ", ".join(_format_scalar_op(cells.get((r, c), {})) for c in range(L.shape[1])) + "]")
    return "[" + ", ".join(rows) + "]"


def compose(L1: LinDiffOp, L2: LinDiffOp) -> LinDiffOp:
    """Operator product L1 o L2, expanded by the Leibniz rule."""
    if L1.shape[1] != L2.shape[0]:
        raise IndexSpaceError(f"cannot compose {L1.shape} with {L2.shape}")
    by_row: dict = {}
    for (k, c, J), b in L2.entries.items():
        by_row.setdefault(k, []).append((c, J, b))
    out: dict = {}
    for (r, k, I), a in L1.entries.items():
        for c, J, b in by_row.get(k, ()):
            for K, binom in sub_indices(I):
                db = derivative(b, mi_sub(I, K))
                if not db:
                    continue
                key = (r, c, mi_add(K, J))
                out[key] = out.get(key, ZERO) + (a * db).scale(binom)
    return LinDiffOp((L1.shape[0], L2.shape[1]), out)


def adjoint_op(L: LinDiffOp) -> LinDiffOp:
    """Formal adjoint: sum_I (-D)_I o a_I with rows and columns swapped."""
    out: dict = {}
    for (r, c, I), a in L.entries.items():
        sign = -1 if len(I) % 2 else 1
        for K, binom in sub_indices(I):
            da = derivative(a, mi_sub(I, K))
            if not da:
                continue
            key = (c, r, K)
            out[key] = out.get(key, ZERO) + da.scale(sign * binom)
    return LinDiffOp((L.shape[1], L.shape[0]), out)


# ---------------------------------------------------------------- Frechet / Euler

def _components_of(f) -> list:
    if isinstance(f, VectorFunction):
        return list(f.components)
    if isinstance(f, DiffExpr):
        return [f]
    return [_lift(g) for g in f]


def frechet_op(f, deps: Sequence[str]) -> LinDiffOp:
    """Linearization operator of ``f`` (scalar or vector) with coefficients
    df/du^alpha_I; columns follow ``deps``."""
    fs = _components_of(f)
    col = {d: k for k, d in enumerate(deps)}
    out = {}
    for r, g in enumerate(fs):
        for v in g.dependent_vars():
            if v.name not in col:
                raise IndexSpaceError(f"{v} is not a declared dependent variable")
            out[(r, col[v.name], v.deriv)] = partial(g, v)
    return LinDiffOp((len(fs), len(deps)), out)


def _dep_arg(F: VectorFunction) -> VectorFunction:
    if not isinstance(F, VectorFunction):
        raise TypeError("expected a VectorFunction")
    if F.kind != "dep":
        raise IndexSpaceError("argument must be indexed by dependent variables")
    return F


def frechet(f: DiffExpr, F: VectorFunction) -> DiffExpr:
    """f'(F) = sum df/du^alpha_I * D_I F^alpha."""
    F = _dep_arg(F)
    return frechet_op(f, F.labels).apply(F)[0]


def frechet_vec(f, F: VectorFunction) -> list:
    F = _dep_arg(F)
    return frechet_op(f, F.labels).apply(F)


def prolong_apply(F: VectorFunction, f: DiffExpr) -> DiffExpr:
    """pr X_F applied to f, summed directly over the jet coordinates of f."""
    F = _dep_arg(F)
    idx = {d: k for k, d in enumerate(F.labels)}
    out = ZERO
    for v in sorted(f.dependent_vars()):
        out = out + derivative(F[idx[v.name]], v.deriv) * partial(f, v)
    return out


def prolong_op(F: VectorFunction, L: LinDiffOp) -> LinDiffOp:
    """pr X_F acting on the coefficients of an operator."""
    return L.map_coeffs(lambda a: prolong_apply(F, a))


def adjoint_frechet(f: DiffExpr, Q, deps: Sequence[str]) -> list:
    """f'^*(Q) for scalar ``f`` and scalar ``Q``; one component per dependent variable."""
    return adjoint_op(frechet_op(f, deps)).apply([_lift(Q)] if not isinstance(Q, (list, tuple, VectorFunction)) else Q)


def frechet2(f: DiffExpr, F1: VectorFunction, F2: VectorFunction) -> DiffExpr:
    """Second Frechet derivative f''(F1, F2)."""
    F1, F2 = _dep_arg(F1), _dep_arg(F2)
    if F1.labels != F2.labels:
        raise IndexSpaceError("arguments index different dependent variables")
    idx = {d: k for k, d in enumerate(F1.labels)}
    vs = sorted(f.dependent_vars())
    out = ZERO
    for v in vs:
        fv = partial(f, v)
        if not fv:
            continue
        a = derivative(F1[idx[v.name]], v.deriv)
        if not a:
            continue
        for w in sorted(fv.dependent_vars()):
            fvw = partial(fv, w)
            if fvw:
                out = out + fvw * a * derivative(F2[idx[w.name]], w.deriv)
    return out


def euler(f: DiffExpr, alpha: str) -> DiffExpr:
    """Variational derivative E_alpha(f) = sum (-D)_I df/du^alpha_I."""
    return higher_euler(f, alpha, ())


def euler_vec(f: DiffExpr, deps: Sequence[str]) -> list:
    return [euler(f, a) for a in deps]


def higher_euler(f: DiffExpr, alpha: str, I: Sequence[str] = ()) -> DiffExpr:
    """E^I_alpha(f) = sum_{J >= I} C(J, I) (-D)_{J-I} df/du^alpha_J (count multi-indices)."""
    I = tuple(sorted(I))
    out = ZERO
    for v in sorted(f.dependent_vars()):
        if v.name != alpha or not mi_contains(v.deriv, I):
            continue
        K = mi_sub(v.deriv, I)
        term = derivative(partial(f, v), K).scale(mi_binom(v.deriv, I))
        out = out + (term if len(K) % 2 == 0 else -term)
    return out


def partial_euler(f: DiffExpr, alpha: str, I: Sequence[str]) -> DiffExpr:
    """Euler operator with respect to the coordinate u^alpha_I in one
    independent direction: sum_k (-D)^k df/du^alpha_{I+k}.

    Only meaningful when every derivative in ``f`` is along a single
    independent variable, which is the situation used by :func:`gamma_witness`.
    """
    I = tuple(sorted(I))
    out = ZERO
    for v in f.dependent_vars():
        if v.name == alpha and mi_contains(v.deriv, I):
            K = mi_sub(v.deriv, I)
            term = derivative(partial(f, v), K)
            out = out + (term if len(K) % 2 == 0 else -term)
    return out


def commutator(P1: VectorFunction, P2: VectorFunction) -> VectorFunction:
    """[P1, P2] = P2'(P1) - P1'(P2)."""
    P1, P2 = _dep_arg(P1), _dep_arg(P2)
    P1._check(P2)
    a = frechet_op(P2, P1.labels).apply(P1)
    b = frechet_op(P1, P1.labels).apply(P2)
    return VectorFunction([x - y for x, y in zip(a, b)], "dep", P1.labels)


# ---------------------------------------------------------------- witnesses

def divergence_pair_witness(H: DiffExpr, F: VectorFunction, f: DiffExpr,
                            indep: Sequence[str], check: bool = True) -> list:
    """Psi with H*f'(F) - F.f'^*(H) = sum_i D_i Psi^i.

    Built by peeling one total derivative at a time off every term
    ``a * D_K F^alpha`` of ``H f'(F)``: a D_i D_K' b = D_i(a D_K' b) - (D_i a) D_K' b.
    """
    F = _dep_arg(F)
    H = _lift(H)
    pos = {i: k for k, i in enumerate(indep)}
    psi = [ZERO] * len(indep)
    L = frechet_op(f, F.labels)
    for (_, c, K), coeff in L.entries.items():
        a = H * coeff
        b = F[c]
        rest = K
        while rest:
            i, rest = rest[0], rest[1:]
            psi[pos[i]] = psi[pos[i]] + a * derivative(b, rest)
            a = -total_derivative(a, i)
    if check:
        lhs = H * frechet(f, F)
        adj = adjoint_op(L).apply([H])
        for comp, g in zip(F, adj):
            lhs = lhs - comp * g
        if lhs - divergence(psi, indep):
            raise WitnessDefect("pairing witness residual is nonzero")
    return psi


def gamma_witness(F: VectorFunction, f: DiffExpr, indep: Sequence[str], check: bool = True) -> list:
    """Gamma with f'(F) - F.E(f) = sum_i D_i Gamma^i.

    With a single independent variable this is sum_J (D_J F) E_{u_{xJ}}(f),
    the Euler operators taken with respect to the individual coordinates.
    In several variables the ordered peeling construction of
    :func:`divergence_pair_witness` with H = 1 is used instead.
    """
    F = _dep_arg(F)
    if len(indep) == 1:
        (x,) = indep
        gamma = ZERO
        for a, Fa in zip(F.labels, F):
            top = max((v.order for v in f.dependent_vars() if v.name == a), default=0)
            for j in range(top):
                J = (x,) * j
                e = partial_euler(f, a, J + (x,))
                if e:
                    gamma = gamma + derivative(Fa, J) * e
        psi = [gamma]
    else:
        psi = divergence_pair_witness(ONE, F, f, indep, check=False)
    if check:
        lhs = frechet(f, F)
        for a, Fa in zip(F.labels, F):
            lhs = lhs - Fa * euler(f, a)
        if lhs - divergence(psi, indep):
            raise WitnessDefect("Gamma witness residual is nonzero")
    return psi


# ---------------------------------------------------------------- functionals in one spatial variable

def _xorder(v: JetVar, x: str) -> int:
    return sum(1 for d in v.deriv if d == x)


def _field(v: JetVar, x: str) -> tuple:
    return (v.name, tuple(d for d in v.deriv if d != x))


def spatial_euler(f: DiffExpr, x: str) -> dict:
    """Euler operators in ``x`` alone, one per field (dependent variable with
    a fixed passive multi-index).  A density is an x-divergence iff all vanish."""
    fields = {}
    for v in f.dependent_vars():
        fields.setdefault(_field(v, x), []).append(v)
    out = {}
    for fld, vs in sorted(fields.items()):
        acc = ZERO
        for v in vs:
            k = _xorder(v, x)
            term = derivative(partial(f, v), (x,) * k)
            acc = acc + (term if k % 2 == 0 else -term)
        if acc:
            out[fld] = acc
    return out


def is_x_divergence(f: DiffExpr, x: str) -> bool:
    return not spatial_euler(f, x)


def ibp_canonical(e: DiffExpr, x: str) -> tuple[DiffExpr, DiffExpr]:
    """Normal form of a density modulo total x-derivatives.

    Returns ``(canonical, W)`` with ``e = canonical + D_x W``.  A term linear in
    its top variable v = phi_n (x-order n >= 1, field phi) is integrated when
    its cofactor involves only phi_{n-1} and coordinates of x-order <= n-2;
    terms free of dependent variables are integrated in x.  Other independent
    variables are passive.  For a single field the result is zero exactly
    when the density is an x-divergence.
    """
    work = e
    W = ZERO
    X = JetVar.indep(x)
    while True:
        step = None
        for m, c in sorted(work._t.items(), key=lambda mc: _ibp_key(mc[0], x), reverse=True):
            step = _integrable(m, c, x, X)
            if step is not None:
                break
        if step is None:
            return work, W
        W = W + step
        work = work - total_derivative(step, x)


def _ibp_key(m: tuple, x: str):
    deps = [(_xorder(v, x), _field(v, x)) for v, _ in m if v.kind == 1]
    return (max(deps, default=(-1, ())), len(deps))


def _integrable(m: tuple, c, x: str, X: JetVar):
    deps = [(v, e) for v, e in m if v.kind == 1]
    if not deps:
        k = 0
        rest = []
        for v, e in m:
            if v == X:
                k = e
            else:
                rest.append((v, e))
        return DiffExpr({tuple(sorted(rest + [(X, k + 1)])): _div_exp(c, k + 1)})
    top, te = max(deps, key=lambda ve: (_xorder(ve[0], x), _field(ve[0], x)))
    n = _xorder(top, x)
    if n < 1 or te != 1:
        return None
    fld = _field(top, x)
    w, w_exp = None, 0
    rest = []
    for v, e in m:
        if v == top:
            continue
        if v.kind == 1:
            if _field(v, x) == fld and _xorder(v, x) == n - 1:
                w, w_exp = v, e
                continue
            if _xorder(v, x) > n - 2:
                return None
        rest.append((v, e))
    if w is None:
        d = list(top.deriv)
        d.remove(x)
        w = JetVar.dep(top.name, d)
    return DiffExpr({tuple(sorted(rest + [(w, w_exp + 1)])): _div_exp(c, w_exp + 1)})


def _div_exp(c, k):
    ck = exp_as_coef(k)
    return c / ck if isinstance(ck, Coef) else c * Fraction(1, ck)
