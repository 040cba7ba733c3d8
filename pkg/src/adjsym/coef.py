"""Exact coefficients: rational functions of named parameters over Q.

A coefficient is either a plain rational number (``int`` or ``Fraction``) or a
:class:`Coef`, which stores a reduced numerator/denominator pair of
multivariate polynomials in the parameter names.  Parameter-free values are
always demoted to plain numbers, so the common case stays on the fast
``Fraction`` path; sympy is consulted only to cancel a gcd when a
denominator actually depends on a parameter.

Polynomials are dicts ``{monomial: Fraction}`` where a monomial is a tuple of
``(name, exponent)`` pairs sorted by name.  The denominator is made monic with
respect to graded-lex order, which makes the representation canonical.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring

Number = (int, Fraction)

ONE_MONO: tuple = ()


class PoleError(ZeroDivisionError):
    """A denominator vanished (division by zero or a forbidden parameter value)."""


# ---------------------------------------------------------------- polynomials

def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for n, e in b:
        d[n] = d.get(n, 0) + e
    return tuple(sorted(d.items()))


def _padd(a: dict, b: dict, sign: int = 1) -> dict:
    out = dict(a)
    for m, c in b.items():
        v = out.get(m, 0) + sign * c
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = _mono_mul(ma, mb)
            v = out.get(m, 0) + ca * cb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _pscale(a: dict, c) -> dict:
    if not c:
        return {}
    return {m: v * c for m, v in a.items()}


def _mono_key(m: tuple):
    return (sum(e for _, e in m), m)


def _lead(a: dict):
    return max(a, key=_mono_key)


def _names(*polys) -> tuple:
    s = set()
    for p in polys:
        for m in p:
            s.update(n for n, _ in m)
    return tuple(sorted(s))


@lru_cache(maxsize=None)
def _ring(names: tuple):
    return ring(",".join(names), QQ, grlex)[0]


def _to_ring(p: dict, R, names: tuple):
    idx = {n: i for i, n in enumerate(names)}
    terms = {}
    for m, c in p.items():
        ev = [0] * len(names)
        for n, e in m:
            ev[idx[n]] = e
        c = Fraction(c)
        terms[tuple(ev)] = QQ(c.numerator, c.denominator)
    return R.from_dict(terms)


def _from_ring(p, names: tuple) -> dict:
    out = {}
    for ev, c in p.terms():
        m = tuple((names[i], e) for i, e in enumerate(ev) if e)
        out[m] = Fraction(int(c.numerator), int(c.denominator))
    return out


def _freeze(p: dict) -> tuple:
    return tuple(sorted(p.items()))


@lru_cache(maxsize=200_000)
def _cancel_frozen(num: tuple, den: tuple) -> tuple[tuple, tuple]:
    n, d = dict(num), dict(den)
    names = _names(n, d)
    R = _ring(names)
    rn, rd = _to_ring(n, R, names).cancel(_to_ring(d, R, names))
    return _freeze(_from_ring(rn, names)), _freeze(_from_ring(rd, names))


def _normalize(num: dict, den: dict):
    """Return the canonical value of num/den: a number or a Coef."""
    if not den:
        raise PoleError("division by zero")
    if not num:
        return 0
    if len(den) == 1 and ONE_MONO in den:
        c = den[ONE_MONO]
        if c != 1:
            num = _pscale(num, Fraction(1) / c)
        if len(num) == 1 and ONE_MONO in num:
            return _demote(num[ONE_MONO])
        return Coef._raw(num, {ONE_MONO: Fraction(1)})
    fn, fd = _cancel_frozen(_freeze(num), _freeze(den))
    num, den = dict(fn), dict(fd)
    lc = den[_lead(den)]
    if lc != 1:
        inv = Fraction(1) / lc
        num = _pscale(num, inv)
        den = _pscale(den, inv)
    if len(den) == 1 and ONE_MONO in den and len(num) == 1 and ONE_MONO in num:
        return _demote(num[ONE_MONO])
    return Coef._raw(num, den)


def _demote(c):
    c = Fraction(c)
    return c.numerator if c.denominator == 1 else c


def as_poly_pair(c) -> tuple[dict, dict]:
    if isinstance(c, Coef):
        return c.num, c.den
    if isinstance(c, Number) or isinstance(c, Rational):
        return ({ONE_MONO: Fraction(c)} if c else {}), {ONE_MONO: Fraction(1)}
    raise TypeError(f"not a coefficient: {c!r}")


# ---------------------------------------------------------------- Coef

class Coef:
    """A non-constant rational function of parameters in lowest terms."""

    __slots__ = ("num", "den", "_hash")

    @classmethod
    def _raw(cls, num: dict, den: dict) -> "Coef":
        self = object.__new__(cls)
        self.num = num
        self.den = den
        self._hash = None
        return self

    @staticmethod
    def param(name: str) -> "Coef":
        return Coef._raw({((name, 1),): Fraction(1)}, {ONE_MONO: Fraction(1)})

    @property
    def is_polynomial(self) -> bool:
        return len(self.den) == 1 and ONE_MONO in self.den

    def params(self) -> frozenset:
        return frozenset(_names(self.num, self.den))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (Coef, int, Fraction)):
            return NotImplemented
        on, od = as_poly_pair(other)
        sn, sd = self.num, self.den
        if sd == od:
            return _normalize(_padd(sn, on), sd)
        return _normalize(_padd(_pmul(sn, od), _pmul(on, sd)), _pmul(sd, od))

    __radd__ = __add__

    def __neg__(self):
        return Coef._raw(_pscale(self.num, -1), self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, (Coef, int, Fraction)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        if not isinstance(other, (Coef, int, Fraction)):
            return NotImplemented
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return 0
            return Coef._raw(_pscale(self.num, other), self.den)
        if not isinstance(other, Coef):
            return NotImplemented
        return _normalize(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self):
        return _normalize(self.den, self.num)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise PoleError("division by zero")
            return Coef._raw(_pscale(self.num, Fraction(1) / Fraction(other)), self.den)
        if not isinstance(other, Coef):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self.inverse() * other

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = 1
        for _ in range(n):
            out = out * self
        return out

    # comparison -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Coef):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((_freeze(self.num), _freeze(self.den)))
        return self._hash

    def __bool__(self):
        return True

    def __repr__(self):
        return f"Coef({format_coef(self)!r})"

    def __str__(self):
        return format_coef(self)


# ---------------------------------------------------------------- helpers

def is_coef(x) -> bool:
    return isinstance(x, (int, Fraction, Coef))


def to_coef(x):
    """Coerce an int/Fraction/Coef (or a string like '3/4') into canonical form."""
    if isinstance(x, Coef):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(x, (int, Fraction)):
        return _demote(x)
    if isinstance(x, str):
        return _demote(Fraction(x))
    raise TypeError(f"not a coefficient: {x!r}")


def is_constant(c) -> bool:
    return not isinstance(c, Coef)


def coef_div(a, b):
    """Exact quotient of coefficients; never produces a float."""
    inv = b.inverse() if isinstance(b, Coef) else Fraction(1) / b
    q = a * inv
    return q if isinstance(q, Coef) else _demote(q)


def coef_params(c) -> frozenset:
    return c.params() if isinstance(c, Coef) else frozenset()


def coef_eval(c, name: str, value):
    """Specialize parameter ``name`` to a rational ``value``."""
    if not isinstance(c, Coef):
        return c
    value = Fraction(value)

    def ev(p: dict) -> dict:
        out: dict = {}
        for m, v in p.items():
            rest = []
            for n, e in m:
                if n == name:
                    v = v * value ** e
                else:
                    rest.append((n, e))
            if not v:
                continue
            key = tuple(rest)
            s = out.get(key, 0) + v
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return out

    den = ev(c.den)
    if not den:
        raise PoleError(f"denominator vanishes at {name}={value}")
    return _normalize(ev(c.num), den)


def coef_numden(c) -> tuple:
    """Numerator and denominator as coefficient values (polynomials)."""
    n, d = as_poly_pair(c)
    return _normalize(n, {ONE_MONO: Fraction(1)}), _normalize(d, {ONE_MONO: Fraction(1)})


# ---------------------------------------------------------------- printing

def _fmt_num(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _fmt_mono(m: tuple) -> str:
    return "*".join(n if e == 1 else f"{n}^{e}" for n, e in m)


def format_poly(p: dict) -> str:
    if not p:
        return "0"
    parts = []
    for i, m in enumerate(sorted(p, key=_mono_key, reverse=True)):
        c = p[m]
        neg = c < 0
        a = -c if neg else c
        if not m:
            body = _fmt_num(a)
        elif a == 1:
            body = _fmt_mono(m)
        else:
            body = f"{_fmt_num(a)}*{_fmt_mono(m)}"
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def _is_atomic_poly(p: dict) -> bool:
    """True when the printed polynomial needs no parentheses as a factor."""
    if len(p) != 1:
        return False
    (m, c), = p.items()
    return c > 0 and (not m or c == 1) and Fraction(c).denominator == 1


def format_coef(c) -> str:
    """Canonical text for a coefficient; parseable by the expression grammar."""
    if not isinstance(c, Coef):
        return _fmt_num(c)
    if c.is_polynomial:
        return format_poly(c.num)
    ns = format_poly(c.num)
    if not _is_atomic_poly(c.num):
        ns = f"({ns})"
    ds = format_poly(c.den)
    if not _is_atomic_poly(c.den):
        ds = f"({ds})"
    return f"{ns}/{ds}"


def coef_sign(c) -> int:
    """Sign of the leading numerator coefficient (used for pretty printing)."""
    if isinstance(c, Coef):
        return 1 if c.num[_lead(c.num)] > 0 else -1
    return (c > 0) - (c < 0)


def coef_to_sympy(c, symbols: dict | None = None):
    import sympy

    if not isinstance(c, Coef):
        return sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
    symbols = symbols if symbols is not None else {}

    def sp(p):
        out = sympy.Integer(0)
        for m, v in p.items():
            t = sympy.Rational(v.numerator, v.denominator)
            for n, e in m:
                t *= symbols.setdefault(n, sympy.Symbol(n)) ** e
            out += t
        return out

    return sp(c.num) / sp(c.den)
