"""Polynomial differential functions on jet space in canonical form.

A :class:`DiffExpr` is a finite sum ``c * m`` where ``c`` is an exact
coefficient (see :mod:`adjsym.coef`) and ``m`` is a product of powers of jet
variables.  Exponents are integers or affine combinations of parameters, so
``u_x^(p+1)`` is a single monomial.

Text grammar (whitespace insensitive)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*      # "/" only by parameter polynomials
    unary    := ("-" | "+") unary | power
    power    := atom (("^" | "**") exponent)?
    exponent := INT | IDENT | "(" affine ")"    # affine in parameters, integer coefficients
    atom     := INT | IDENT | "(" expr ")"

An identifier is an independent variable (``t``), a parameter (``p``), a
dependent variable (``u``) or a derivative ``u_txx`` whose suffix letters name
independent variables.  Rational literals are written ``a/b``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple

from .coef import (
    Coef,
    PoleError,
    coef_eval,
    coef_params,
    coef_sign,
    coef_to_sympy,
    format_coef,
    is_coef,
    to_coef,
)

__all__ = [
    "AffineExponent",
    "DiffExpr",
    "JetSpace",
    "JetVar",
    "NonPolynomialError",
    "ParseError",
    "PoleError",
    "UnsupportedSubstitution",
    "eval_param",
    "format_expr",
    "normalize",
    "substitute",
]


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


class NonPolynomialError(ValueError):
    """The result would not be a polynomial in the jet variables."""


class UnsupportedSubstitution(ValueError):
    pass


# ---------------------------------------------------------------- exponents

class AffineExponent:
    """``const + sum(k * param)`` with integer ``const`` and ``k``.

    Values without parameter part are represented by plain ``int`` throughout
    the package; :meth:`make` performs that demotion.
    """

    __slots__ = ("const", "coeffs", "_hash")

    def __init__(self, const: int, coeffs: dict | Iterable):
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        self.const = int(const)
        self.coeffs = tuple(sorted((n, int(k)) for n, k in items if k))
        self._hash = hash((self.const, self.coeffs))

    @staticmethod
    def make(const: int, coeffs: dict | Iterable = ()):
        e = AffineExponent(const, coeffs)
        return e.const if not e.coeffs else e

    @staticmethod
    def param(name: str) -> "AffineExponent":
        return AffineExponent(0, {name: 1})

    def _parts(self, other):
        if isinstance(other, AffineExponent):
            return other.const, dict(other.coeffs)
        if isinstance(other, int) and not isinstance(other, bool):
            return other, {}
        return None

    def __add__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        c, d = parts
        out = dict(self.coeffs)
        for n, k in d.items():
            out[n] = out.get(n, 0) + k
        return AffineExponent.make(self.const + c, out)

    __radd__ = __add__

    def __neg__(self):
        return AffineExponent.make(-self.const, {n: -k for n, k in self.coeffs})

    def __sub__(self, other):
        parts = self._parts(other)
        if parts is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            return AffineExponent.make(self.const * other, {n: k * other for n, k in self.coeffs})
        if isinstance(other, AffineExponent):
            raise NonPolynomialError("product of two parameter-dependent exponents")
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, AffineExponent):
            return self.const == other.const and self.coeffs == other.coeffs
        return False

    def __hash__(self):
        return self._hash

    def as_coef(self):
        out = to_coef(self.const)
        for n, k in self.coeffs:
            out = out + k * Coef.param(n)
        return out

    def params(self) -> frozenset:
        return frozenset(n for n, _ in self.coeffs)

    def eval(self, name: str, value):
        value = Fraction(value)
        d = dict(self.coeffs)
        k = d.pop(name, 0)
        c = self.const + k * value
        if c.denominator != 1:
            raise NonPolynomialError(f"exponent {self} is not an integer at {name}={value}")
        return AffineExponent.make(int(c), d)

    def __str__(self):
        return format_coef(self.as_coef())

    def __repr__(self):
        return f"AffineExponent({self})"


def exp_key(e) -> tuple:
    if isinstance(e, AffineExponent):
        return (1, e.coeffs, e.const)
    return (0, (), e)


def exp_as_coef(e):
    return e.as_coef() if isinstance(e, AffineExponent) else e


def exp_params(e) -> frozenset:
    return e.params() if isinstance(e, AffineExponent) else frozenset()


# ---------------------------------------------------------------- jet variables

class JetVar(NamedTuple):
    """A jet coordinate.

    ``kind`` is 0 for an independent variable and 1 for a dependent variable
    or one of its derivatives; ``deriv`` is the sorted multi-index.  The field
    order makes tuple comparison the package's variable order: independent
    variables first, then by derivative order, dependent name, multi-index.
    """

    kind: int
    order: int
    name: str
    deriv: tuple

    @staticmethod
    def indep(name: str) -> "JetVar":
        return JetVar(0, 0, name, ())

    @staticmethod
    def dep(name: str, deriv: Iterable[str] = ()) -> "JetVar":
        d = tuple(sorted(deriv))
        return JetVar(1, len(d), name, d)

    @property
    def is_dependent(self) -> bool:
        return self.kind == 1

    def diff(self, i: str) -> "JetVar":
        return JetVar(1, self.order + 1, self.name, tuple(sorted(self.deriv + (i,))))

    def __str__(self):
        if self.kind == 0 or not self.deriv:
            return self.name
        return f"{self.name}_{''.join(self.deriv)}"

    def __repr__(self):
        return f"JetVar({self})"


# ---------------------------------------------------------------- monomials

def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    return _mono_mul_cached(a, b)


@lru_cache(maxsize=500_000)
def _mono_mul_cached(a: tuple, b: tuple) -> tuple:
    d = dict(a)
    for v, e in b:
        if v in d:
            s = d[v] + e
            if s == 0:
                del d[v]
            else:
                d[v] = s
        else:
            d[v] = e
    return tuple(sorted(d.items()))


@lru_cache(maxsize=200_000)
def mono_key(m: tuple) -> tuple:
    top = max((v.order for v, _ in m), default=-1)
    return (top, tuple((v, exp_key(e)) for v, e in reversed(m)))


def _mono_str(m: tuple) -> str:
    parts = []
    for v, e in m:
        if e == 1:
            parts.append(str(v))
        elif isinstance(e, AffineExponent):
            s = str(e)
            if not (len(e.coeffs) == 1 and e.const == 0 and e.coeffs[0][1] == 1):
                s = f"({s})"
            parts.append(f"{v}^{s}")
        else:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


# ---------------------------------------------------------------- DiffExpr

class DiffExpr:
    """Immutable canonical polynomial differential function."""

    __slots__ = ("_t", "_hash", "_sorted")

    def __init__(self, terms: dict | None = None):
        # ``terms`` maps monomial -> nonzero coefficient; callers guarantee canonicity.
        self._t = terms if terms is not None else {}
        self._hash = None
        self._sorted = None

    # constructors ---------------------------------------------------------
    @staticmethod
    def const(c) -> "DiffExpr":
        c = to_coef(c) if not isinstance(c, Coef) else c
        return DiffExpr({(): c}) if c != 0 else ZERO

    @staticmethod
    def var(v: JetVar, e=1) -> "DiffExpr":
        return DiffExpr({((v, e),): 1}) if e != 0 else ONE

    @staticmethod
    def monomial(m: tuple, c=1) -> "DiffExpr":
        return DiffExpr({m: c}) if c != 0 else ZERO

    @staticmethod
    def from_terms(pairs: Iterable) -> "DiffExpr":
        out: dict = {}
        for m, c in pairs:
            _acc(out, m, c)
        return DiffExpr(out)

    # inspection -----------------------------------------------------------
    @property
    def terms(self) -> list:
        """(monomial, coefficient) pairs in canonical order."""
        if self._sorted is None:
            self._sorted = sorted(self._t.items(), key=lambda mc: mono_key(mc[0]))
        return self._sorted

    def as_dict(self) -> dict:
        return dict(self._t)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and () in self._t)

    def constant_value(self):
        """The coefficient of the empty monomial (0 when absent)."""
        return self._t.get((), 0)

    def coeff(self, m: tuple):
        return self._t.get(m, 0)

    def variables(self) -> frozenset:
        return frozenset(v for m in self._t for v, _ in m)

    def dependent_vars(self) -> frozenset:
        return frozenset(v for m in self._t for v, _ in m if v.kind == 1)

    def params(self) -> frozenset:
        s = set()
        for m, c in self._t.items():
            s |= coef_params(c)
            for _, e in m:
                s |= exp_params(e)
        return frozenset(s)

    def max_order(self) -> int:
        return max((v.order for m in self._t for v, _ in m if v.kind == 1), default=-1)

    def degree_in(self, v: JetVar):
        """Largest integer exponent of ``v``; raises for affine exponents."""
        best = 0
        for m in self._t:
            for w, e in m:
                if w == v:
                    if isinstance(e, AffineExponent):
                        raise NonPolynomialError(f"{v} carries exponent {e}")
                    best = max(best, e)
        return best

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        if not other._t:
            return self
        if not self._t:
            return other
        out = dict(self._t)
        for m, c in other._t.items():
            _acc(out, m, c)
        return DiffExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return DiffExpr({m: -c for m, c in self._t.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        out = dict(self._t)
        for m, c in other._t.items():
            _acc(out, m, -c)
        return DiffExpr(out)

    def __rsub__(self, other):
        other = _lift(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if is_coef(other):
            return self.scale(other)
        if isinstance(other, JetVar):
            other = DiffExpr.var(other)
        if not isinstance(other, DiffExpr):
            return NotImplemented
        a, b = self._t, other._t
        if not a or not b:
            return ZERO
        if len(b) == 1 and () in b:
            return self.scale(b[()])
        if len(a) == 1 and () in a:
            return other.scale(a[()])
        out: dict = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
                _acc(out, _mono_mul(ma, mb), ca * cb)
        return DiffExpr(out)

    __rmul__ = __mul__

    def scale(self, c) -> "DiffExpr":
        if c == 0:
            return ZERO
        if c == 1:
            return self
        return DiffExpr({m: v * c for m, v in self._t.items()})

    def __truediv__(self, other):
        if isinstance(other, DiffExpr):
            if not other.is_constant():
                raise NonPolynomialError("division is only allowed by parameter polynomials")
            other = other.constant_value()
        if not is_coef(other):
            return NotImplemented
        if other == 0:
            raise PoleError("division by zero")
        return self.scale(1 / other if isinstance(other, Coef) else Fraction(1) / other)

    def __pow__(self, e):
        if isinstance(e, bool):
            raise TypeError("bool exponent")
        if isinstance(e, int):
            if e < 0:
                if self.is_constant() and self._t:
                    c = self.constant_value()
                    return DiffExpr.const((1 / c if isinstance(c, Coef) else Fraction(1) / c) ** (-e))
                raise NonPolynomialError("negative exponent on a jet-variable expression")
            out, base = ONE, self
            while e:
                if e & 1:
                    out = out * base
                e >>= 1
                if e:
                    base = base * base
            return out
        if isinstance(e, AffineExponent):
            if len(self._t) != 1:
                raise NonPolynomialError("parameter-dependent power of a sum")
            (m, c), = self._t.items()
            if c != 1:
                raise NonPolynomialError("parameter-dependent power of a non-unit coefficient")
            if not m:
                return ONE
            return DiffExpr({tuple((v, k * e) for v, k in m): 1})
        return NotImplemented

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, DiffExpr):
            return self._t == other._t
        o = _lift(other)
        if o is None:
            return NotImplemented
        return self._t == o._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # transformations -----------------------------------------------------
    def map_coeffs(self, f) -> "DiffExpr":
        out: dict = {}
        for m, c in self._t.items():
            _acc(out, m, f(c))
        return DiffExpr(out)

    def __str__(self):
        return format_expr(self)

    def __repr__(self):
        return f"DiffExpr({format_expr(self)!r})"

    def to_sympy(self, symbols: dict | None = None):
        """sympy expression with one Symbol per jet variable and parameter."""
        import sympy

        symbols = symbols if symbols is not None else {}
        out = sympy.Integer(0)
        for m, c in self.terms:
            t = coef_to_sympy(c, symbols)
            for v, e in m:
                s = symbols.setdefault(str(v), sympy.Symbol(str(v)))
                t *= s ** coef_to_sympy(exp_as_coef(e), symbols)
            out += t
        return out


def _acc(out: dict, m: tuple, c) -> None:
    if m in out:
        s = out[m] + c
        if s == 0:
            del out[m]
        else:
            out[m] = s
    elif c != 0:
        out[m] = c


def _lift(x):
    if isinstance(x, DiffExpr):
        return x
    if is_coef(x) and not isinstance(x, bool):
        return DiffExpr.const(x)
    if isinstance(x, JetVar):
        return DiffExpr.var(x)
    return None


ZERO = DiffExpr({})
ONE = DiffExpr({(): 1})
DiffExpr.ZERO = ZERO
DiffExpr.ONE = ONE


# ---------------------------------------------------------------- printing

def format_expr(e: DiffExpr) -> str:
    if not e._t:
        return "0"
    out = []
    for i, (m, c) in enumerate(e.terms):
        neg = coef_sign(c) < 0
        a = -c if neg else c
        if not m:
            body = format_coef(a)
            if (neg or i) and isinstance(a, Coef) and not (a.is_polynomial and len(a.num) == 1):
                body = f"({body})"
        else:
            ms = _mono_str(m)
            if a == 1:
                body = ms
            else:
                cs = format_coef(a)
                if isinstance(a, Coef) and (len(a.num) > 1 and a.is_polynomial):
                    cs = f"({cs})"
                body = f"{cs}*{ms}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------- substitution

def substitute(e: DiffExpr, target: JetVar, replacement: DiffExpr) -> DiffExpr:
    """Replace every occurrence of ``target`` in ``e`` by ``replacement``."""
    replacement = _lift(replacement)
    out: dict = {}
    powers: dict = {}
    for m, c in e._t.items():
        k = None
        rest = []
        for v, x in m:
            if v == target:
                k = x
            else:
                rest.append((v, x))
        if k is None:
            _acc(out, m, c)
            continue
        if isinstance(k, AffineExponent):
            if len(replacement._t) != 1 or next(iter(replacement._t.values())) != 1:
                raise UnsupportedSubstitution(
                    f"{target} occurs with exponent {k}; replacement must be a unit monomial"
                )
            r = replacement ** k
        else:
            r = powers.get(k)
            if r is None:
                r = powers[k] = replacement ** k
        for rm, rc in (DiffExpr({tuple(rest): c}) * r)._t.items():
            _acc(out, rm, rc)
    return DiffExpr(out)


def substitute_many(e: DiffExpr, mapping: dict) -> DiffExpr:
    """Simultaneous substitution ``{JetVar: DiffExpr}`` (integer exponents only)."""
    out: dict = {}
    for m, c in e._t.items():
        acc = DiffExpr({(): c})
        rest = []
        for v, x in m:
            if v in mapping:
                if isinstance(x, AffineExponent):
                    r = mapping[v]
                    if len(r._t) != 1 or next(iter(r._t.values())) != 1:
                        raise UnsupportedSubstitution(f"{v} occurs with exponent {x}")
                acc = acc * (mapping[v] ** x)
            else:
                rest.append((v, x))
        acc = acc * DiffExpr({tuple(rest): 1})
        for rm, rc in acc._t.items():
            _acc(out, rm, rc)
    return DiffExpr(out)


def eval_param(e: DiffExpr, name, value) -> DiffExpr:
    """Specialize parameter ``name`` to the rational ``value``."""
    name = getattr(name, "name", name)
    out: dict = {}
    for m, c in e._t.items():
        nc = coef_eval(c, name, value)
        nm = []
        for v, x in m:
            if isinstance(x, AffineExponent):
                x = x.eval(name, value)
            if isinstance(x, int) and x < 0:
                raise NonPolynomialError(f"{v} gets negative exponent {x} at {name}={value}")
            if x != 0:
                nm.append((v, x))
        if nc == 0:
            continue
        acc = DiffExpr({(): nc})
        for v, x in nm:
            acc = acc * DiffExpr.var(v, x)
        for rm, rc in acc._t.items():
            _acc(out, rm, rc)
    return DiffExpr(out)


# ---------------------------------------------------------------- raw trees

def normalize(tree) -> DiffExpr:
    """Canonical form of a raw tree.

    Leaves are DiffExpr, JetVar, numbers or coefficients; inner nodes are
    tuples ``(op, *args)`` with op one of ``+ - * / ^``.
    """
    if isinstance(tree, DiffExpr):
        return tree
    leaf = _lift(tree)
    if leaf is not None:
        return leaf
    if not isinstance(tree, tuple) or not tree:
        raise TypeError(f"malformed expression tree: {tree!r}")
    op, *args = tree
    if op == "+":
        out = ZERO
        for a in args:
            out = out + normalize(a)
        return out
    if op == "-":
        if len(args) == 1:
            return -normalize(args[0])
        return normalize(args[0]) - normalize(("+",) + tuple(args[1:]))
    if op == "*":
        out = ONE
        for a in args:
            out = out * normalize(a)
        return out
    if op == "/":
        return normalize(args[0]) / normalize(args[1])
    if op == "^":
        base, ex = args
        if isinstance(ex, (int, AffineExponent)):
            return normalize(base) ** ex
        raise TypeError(f"exponent must be integer or affine: {ex!r}")
    raise TypeError(f"unknown operator {op!r}")


# ---------------------------------------------------------------- jet space / parser

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9]*")


@dataclass(frozen=True)
class JetSpace:
    """Names of independent variables, dependent variables and parameters."""

    independent: tuple
    dependent: tuple
    params: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "independent", tuple(self.independent))
        object.__setattr__(self, "dependent", tuple(self.dependent))
        object.__setattr__(self, "params", tuple(self.params))
        names = self.independent + self.dependent + self.params
        if len(set(names)) != len(names):
            raise ValueError(f"names must be unique: {names}")
        for n in self.independent:
            if not re.fullmatch(r"[a-z]", n):
                raise ValueError(f"independent variable names must be single letters: {n!r}")
        for n in self.dependent + self.params:
            if not _IDENT.fullmatch(n):
                raise ValueError(f"bad identifier {n!r}")

    def with_params(self, *extra: str) -> "JetSpace":
        return JetSpace(self.independent, self.dependent, self.params + tuple(p for p in extra if p not in self.params))

    def x(self, name: str) -> DiffExpr:
        return DiffExpr.var(JetVar.indep(name))

    def u(self, name: str | None = None, deriv: str | Iterable[str] = ()) -> DiffExpr:
        name = name or self.dependent[0]
        return DiffExpr.var(JetVar.dep(name, tuple(deriv)))

    def p(self, name: str | None = None):
        return Coef.param(name or self.params[0])

    def parse(self, text: str, env: dict | None = None, line: int = 1, col0: int = 0) -> DiffExpr:
        return _Parser(self, text, env or {}, line, col0).parse()

    def parse_coef(self, text: str, line: int = 1, col0: int = 0):
        e = self.parse(text, line=line, col0=col0)
        if not e.is_constant():
            raise ParseError(f"expected a parameter expression, got {text!r}", line, col0 + 1)
        return e.constant_value()


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z]+)?)|(?P<op>\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, space: JetSpace, text: str, env: dict, line: int, col0: int):
        self.space, self.text, self.env, self.line, self.col0 = space, text, env, line, col0
        self.toks = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            mt = _TOKEN.match(text, pos)
            if not mt or mt.end() == pos:
                raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
            kind = mt.lastgroup
            val = mt.group(kind)
            self.toks.append((kind, "^" if val == "**" else val, mt.start(kind)))
            pos = mt.end()
        self.i = 0

    def err(self, msg, tok=None):
        pos = tok[2] if tok else len(self.text)
        raise ParseError(msg, self.line, self.col0 + pos + 1)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, val=None):
        t = self.peek()
        if t is None:
            self.err("unexpected end of input")
        if val is not None and t[1] != val:
            self.err(f"expected {val!r}", t)
        self.i += 1
        return t

    def parse(self) -> DiffExpr:
        if not self.toks:
            self.err("empty expression")
        e = self.expr()
        if self.peek() is not None:
            self.err(f"unexpected token {self.peek()[1]!r}", self.peek())
        return e

    def expr(self):
        e = self.term()
        while (t := self.peek()) and t[1] in "+-" and t[0] == "op":
            self.take()
            r = self.term()
            e = e + r if t[1] == "+" else e - r
        return e

    def term(self):
        e = self.unary()
        while (t := self.peek()) and t[0] == "op" and t[1] in ("*", "/"):
            self.take()
            r = self.unary()
            if t[1] == "*":
                e = e * r
            else:
                if not r.is_constant():
                    self.err("division is only allowed by parameter polynomials", t)
                if r.is_zero():
                    self.err("division by zero", t)
                e = e / r
        return e

    def unary(self):
        t = self.peek()
        if t and t[0] == "op" and t[1] in "+-":
            self.take()
            e = self.unary()
            return -e if t[1] == "-" else e
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t and t[1] == "^":
            self.take()
            ex = self.exponent()
            try:
                return base ** ex
            except NonPolynomialError as exc:
                self.err(str(exc), t)
        return base

    def exponent(self):
        t = self.peek()
        if t is None:
            self.err("missing exponent")
        if t[0] == "num":
            self.take()
            return int(t[1])
        if t[0] == "id":
            self.take()
            if t[1] not in self.space.params:
                self.err(f"exponent identifier {t[1]!r} is not a parameter", t)
            return AffineExponent.param(t[1])
        if t[1] == "(":
            self.take("(")
            e = self.expr()
            self.take(")")
            return self._affine(e, t)
        self.err("bad exponent", t)

    def _affine(self, e: DiffExpr, tok):
        if not e.is_constant():
            self.err("exponent must not contain jet variables", tok)
        c = e.constant_value()
        if not isinstance(c, Coef):
            c = Fraction(c)
            if c.denominator != 1:
                self.err("exponent must have integer coefficients", tok)
            return int(c)
        if not c.is_polynomial:
            self.err("exponent must be affine in parameters", tok)
        const, coeffs = 0, {}
        for m, v in c.num.items():
            if Fraction(v).denominator != 1:
                self.err("exponent must have integer coefficients", tok)
            if not m:
                const = int(v)
            elif len(m) == 1 and m[0][1] == 1:
                coeffs[m[0][0]] = int(v)
            else:
                self.err("exponent must be affine in parameters", tok)
        return AffineExponent.make(const, coeffs)

    def atom(self):
        t = self.take()
        kind, val, _ = t
        if kind == "num":
            return DiffExpr.const(int(val))
        if kind == "op":
            if val == "(":
                e = self.expr()
                self.take(")")
                return e
            self.err(f"unexpected {val!r}", t)
        if val in self.env:
            return _lift(self.env[val])
        sp = self.space
        if val in sp.params:
            return DiffExpr.const(Coef.param(val))
        if val in sp.independent:
            return DiffExpr.var(JetVar.indep(val))
        if val in sp.dependent:
            return DiffExpr.var(JetVar.dep(val))
        if "_" in val:
            name, suffix = val.split("_", 1)
            if name in sp.dependent:
                bad = [ch for ch in suffix if ch not in sp.independent]
                if bad:
                    self.err(f"{bad[0]!r} in {val!r} is not an independent variable", t)
                return DiffExpr.var(JetVar.dep(name, tuple(suffix)))
        self.err(f"unknown identifier {val!r}", t)
