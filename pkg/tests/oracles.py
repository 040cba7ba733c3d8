"""Independent sympy-based oracles: jet variables become derivatives of u(t, x)."""

import sympy

from adjsym.expr import DiffExpr

T, X, P = sympy.symbols("t x p")
U = sympy.Function("u")(T, X)
_IND = {"t": T, "x": X}


def to_sympy(e: DiffExpr):
    symbols = {"p": P, "t": T, "x": X}
    for v in e.variables():
        if v.kind == 1:
            symbols[str(v)] = sympy.diff(U, *[_IND[i] for i in v.deriv]) if v.deriv else U
    return e.to_sympy(symbols)


def jet_symbols(expr):
    """Replace derivatives of u by plain symbols so sympy can compare polynomials."""
    derivs = sorted(expr.atoms(sympy.Derivative), key=lambda d: -len(d.variables))
    rep = {d: sympy.Symbol("u_" + "".join(sorted(str(s) for s in d.variables))) for d in derivs}
    return expr.subs(rep).subs(U, sympy.Symbol("u"))


def equal(a, b) -> bool:
    d = sympy.expand(sympy.powsimp(sympy.expand(jet_symbols(sympy.expand(a - b)))))
    return d == 0 or sympy.simplify(d) == 0


def D(expr, var: str):
    return sympy.diff(expr, _IND[var])


def euler(expr):
    """Variational derivative via sympy's Euler-Lagrange equations (sign: E(L) = lhs)."""
    from sympy.calculus.euler import euler_equations
    (eq,) = euler_equations(expr, [U], [T, X])
    return eq.lhs


W = sympy.Function("w")(T, X)
EPS = sympy.Symbol("eps")


def frechet(f, F):
    """Directional derivative d/de f[u + e F] at e = 0, computed in sympy."""
    moved = f.subs(U, U + EPS * W).doit()
    lin = sympy.diff(moved, EPS).subs(EPS, 0)
    return lin.subs(W, F).doit()
