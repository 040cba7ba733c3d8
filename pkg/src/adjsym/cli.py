"""Command-line front end.

System definitions are line-oriented text files with three sections::

    [system]
    independent = t, x
    dependent = u
    params = p
    equation G = u_t + 1/(p+1)*u_x^(p+1) + u_xxx
    leading G = u_t

    [objects]
    symmetry P1 = 1
    adjoint Q1 = u_xx
    multiplier momentum = u_xx
    current momentum = -1/2*u_x^2, 1/2*u_xx^2 + u_t*u_x + ...
    functional H = ...
    hamiltonian H = D_x
    scaling = P4

    [ansatz]
    symm = point 1
    adjsymm = t, x, u_x, u_tx, u_xx ; 2

Vector-valued objects list their components separated by commas.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from .actions import combination, on_solutions
from .coef import Coef, coef_eval, format_coef
from .detsolve import Ansatz, solve_adjoint_symmetries, solve_multipliers, solve_symmetries
from .expr import DiffExpr, JetSpace, JetVar, ParseError, eval_param
from .jetops import LinDiffOp, VectorFunction, format_op, mi
from .noether import (Functional, closure_check, evol_noether, hamiltonian_check, noether_J3,
                      omega_table, poisson_skew_jacobi_check)
from .pdesys import ConversionError, PDESystem, PreconditionError
from .structs import (Bases, CommutatorBracket, IllDefinedBracket, NonCommutatorBracket, RangeError,
                      dual_map)

BUNDLED = ("pgkdv", "wave")


class UsageError(ValueError):
    """Bad command-line input or system definition (exit code 2)."""


# ---------------------------------------------------------------- system files

@dataclass
class SystemDefinition:
    space: JetSpace
    system: PDESystem
    symmetries: dict = field(default_factory=dict)
    adjoints: dict = field(default_factory=dict)
    multipliers: dict = field(default_factory=dict)
    currents: dict = field(default_factory=dict)
    functionals: dict = field(default_factory=dict)
    hamiltonians: list = field(default_factory=list)
    scaling: str | None = None
    ansatz: dict = field(default_factory=dict)

    def specialize(self, name: str, value) -> "SystemDefinition":
        if name not in self.space.params:
            raise UsageError(f"unknown parameter {name!r}")
        value = Fraction(value)
        space = JetSpace(self.space.independent, self.space.dependent,
                         tuple(p for p in self.space.params if p != name))

        def ev(e):
            return eval_param(e, name, value)

        def evv(F):
            return F.map(ev)

        return SystemDefinition(
            space, self.system.eval_param(name, value),
            {k: evv(v) for k, v in self.symmetries.items()},
            {k: evv(v) for k, v in self.adjoints.items()},
            {k: evv(v) for k, v in self.multipliers.items()},
            {k: [ev(e) for e in v] for k, v in self.currents.items()},
            {k: ev(v) for k, v in self.functionals.items()},
            list(self.hamiltonians), self.scaling, dict(self.ansatz))


def _split_components(text: str, col0: int) -> list:
    out, start = [], 0
    for k, ch in enumerate(text + ","):
        if ch == ",":
            out.append((text[start:k], col0 + start))
            start = k + 1
    return out


def parse_system(text: str) -> SystemDefinition:
    section = None
    decl: dict = {}
    eqs: dict = {}
    leading: dict = {}
    objects: list = []
    ansatz: dict = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            section = s[1:-1].strip()
            if section not in ("system", "objects", "ansatz"):
                raise ParseError(f"unknown section [{section}]", ln, 1)
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", ln, 1)
        lhs, rhs = line.split("=", 1)
        col = len(lhs) + 1
        key = lhs.split()
        if section is None:
            raise ParseError("entry outside of a section", ln, 1)
        if section == "system":
            if key[0] == "equation" and len(key) == 2:
                eqs[key[1]] = (rhs, ln, col)
            elif key[0] == "leading" and len(key) == 2:
                leading[key[1]] = (rhs.strip(), ln, col)
            elif len(key) == 1 and key[0] in ("independent", "dependent", "params", "no_differential_identities"):
                decl[key[0]] = rhs.strip()
            else:
                raise ParseError(f"unknown system entry {lhs.strip()!r}", ln, 1)
        elif section == "objects":
            objects.append((key, rhs, ln, col))
        else:
            ansatz[lhs.strip()] = (rhs.strip(), ln)

    def names(k):
        return tuple(n.strip() for n in decl.get(k, "").split(",") if n.strip())

    try:
        space = JetSpace(names("independent"), names("dependent"), names("params"))
    except ValueError as e:
        raise ParseError(str(e), 1, 1) from None
    if not eqs:
        raise ParseError("no equations declared", 1, 1)
    labels = list(eqs)
    G = [space.parse(t, line=ln, col0=col) for t, ln, col in eqs.values()]
    lead = []
    for lab in labels:
        if lab not in leading:
            raise ParseError(f"equation {lab} has no leading derivative", eqs[lab][1], 1)
        t, ln, col = leading[lab]
        e = space.parse(t, line=ln, col0=col)
        vs = e.dependent_vars()
        if len(e._t) != 1 or len(vs) != 1:
            raise ParseError(f"leading derivative must be a single jet variable, got {t!r}", ln, col)
        lead.append(next(iter(vs)))
    flag = decl.get("no_differential_identities", "false").lower() in ("true", "yes", "1")
    try:
        system = PDESystem(space, G, lead, labels, flag)
    except ValueError as e:
        raise ParseError(str(e), eqs[labels[0]][1], 1) from None
    d = SystemDefinition(space, system)
    d.ansatz = ansatz
    for key, rhs, ln, col in objects:
        kind = key[0]
        if kind == "scaling" and len(key) == 1:
            d.scaling = rhs.strip()
            continue
        if len(key) != 2:
            raise ParseError(f"expected '<kind> <name> = ...', got {' '.join(key)!r}", ln, 1)
        name = key[1]
        if kind == "hamiltonian":
            d.hamiltonians.append((name, rhs.strip()))
            continue
        comps = [space.parse(t, line=ln, col0=c) for t, c in _split_components(rhs, col)]
        if kind == "symmetry":
            d.symmetries[name] = system.dep_vector(_check_len(comps, system.m, ln))
        elif kind == "adjoint":
            d.adjoints[name] = system.eq_vector(_check_len(comps, system.M, ln))
        elif kind == "multiplier":
            d.multipliers[name] = system.eq_vector(_check_len(comps, system.M, ln))
        elif kind == "current":
            d.currents[name] = _check_len(comps, len(space.independent), ln)
        elif kind == "functional":
            d.functionals[name] = _check_len(comps, 1, ln)[0]
        else:
            raise ParseError(f"unknown object kind {kind!r}", ln, 1)
    return d


def _check_len(comps, n, ln):
    if len(comps) != n:
        raise ParseError(f"expected {n} component(s), got {len(comps)}", ln, 1)
    return comps


def read_system_text(spec: str) -> str:
    p = Path(spec)
    if p.is_file():
        return p.read_text()
    if spec in BUNDLED:
        return resources.files("adjsym").joinpath("data", f"{spec}.sys").read_text()
    raise UsageError(f"no such system file or bundled system: {spec!r}")


def load_system(spec: str, params: Sequence[str] = ()) -> SystemDefinition:
    d = parse_system(read_system_text(spec))
    for assignment in params:
        if "=" not in assignment:
            raise UsageError(f"--param expects name=value, got {assignment!r}")
        name, value = assignment.split("=", 1)
        try:
            d = d.specialize(name.strip(), Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"cannot specialize {assignment!r}: {e}") from None
    return d


def golden_text(name: str) -> str:
    p = Path(name)
    if p.is_file():
        return p.read_text()
    return resources.files("adjsym").joinpath("data", f"{name}.golden.json").read_text()


# ---------------------------------------------------------------- combinations

def combo_coordinates(text: str, names: Sequence[str], space: JetSpace, extra: Sequence[str] = ()) -> list:
    """Coordinates of a linear combination like ``c1*Q1 - (p+4)*Q2``."""
    sp = JetSpace(space.independent, space.dependent, space.params + tuple(extra) + tuple(names))
    try:
        c = sp.parse_coef(text)
    except ParseError as e:
        raise UsageError(f"cannot parse combination {text!r}: {e}") from None
    zero = {n: 0 for n in names}

    def at(values):
        v = c
        for n in names:
            v = coef_eval(v, n, values[n])
        return v

    base = at(zero)
    if base != 0:
        raise UsageError(f"{text!r} is not a linear combination of {', '.join(names)}")
    coords = [at({**zero, n: 1}) for n in names]
    rebuilt = sum((a * Coef.param(n) for a, n in zip(coords, names) if a != 0), 0)
    if rebuilt != c:
        raise UsageError(f"{text!r} is not linear in {', '.join(names)}")
    return [_norm(a) for a in coords]


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def format_combo(coords: Sequence, names: Sequence[str]) -> str:
    parts = []
    for a, n in zip(coords, names):
        if a == 0:
            continue
        s = format_coef(a)
        if s == "1":
            term = n
        elif s == "-1":
            term = f"-{n}"
        elif _atomic(s):
            term = f"{s}*{n}"
        else:
            term = f"({s})*{n}"
        parts.append(term)
    if not parts:
        return "0"
    out = parts[0]
    for t in parts[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


def _atomic(s: str) -> bool:
    body = s[1:] if s.startswith("-") else s
    return all(ch not in body for ch in "+- /")


# ---------------------------------------------------------------- reports

@dataclass
class Report:
    command: str
    inputs: dict
    results: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    assumptions: list = field(default_factory=list)
    ok: bool = True
    errors: list = field(default_factory=list)

    def to_records(self) -> str:
        return json.dumps({
            "command": self.command, "inputs": self.inputs, "results": self.results,
            "certificates": self.certificates, "assumptions": sorted(set(self.assumptions)),
            "ok": self.ok, "errors": self.errors,
        }, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @staticmethod
    def from_records(text: str) -> "Report":
        d = json.loads(text)
        return Report(d["command"], d["inputs"], d["results"], d["certificates"],
                      d["assumptions"], d["ok"], d["errors"])

    def to_text(self) -> str:
        lines = [f"== {self.command} =="]
        for k in sorted(self.inputs):
            lines.append(f"{k}: {self.inputs[k]}")
        lines += _render(self.results, 0)
        if self.certificates:
            lines.append("certificates:")
            lines += _render(self.certificates, 1)
        if self.assumptions:
            lines.append("generic parameter assumptions (nonzero): " + ", ".join(sorted(set(self.assumptions))))
        for e in self.errors:
            lines.append(f"error: {e}")
        lines.append("status: " + ("ok" if self.ok else "FAILED"))
        return "\n".join(lines) + "\n"


def _render(obj, depth: int) -> list:
    pad = "  " * depth
    out = []
    if isinstance(obj, dict):
        if obj.get("_table"):
            out += _render_table(obj, pad)
            return out
        for k in obj:
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                out.append(f"{pad}{k}:")
                out += _render(v, depth + 1)
            else:
                out.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            out.append(f"{pad}- {_scalar(v)}" if not isinstance(v, (dict, list)) or _flat_list(v) else f"{pad}-")
            if isinstance(v, (dict, list)) and not _flat_list(v):
                out += _render(v, depth + 1)
    return out


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    return str(v)


def _render_table(t: dict, pad: str) -> list:
    rows, cols, cells = t["rows"], t["cols"], t["cells"]
    head = [t.get("corner", "")] + cols
    body = [[r] + [cells[r][c] for c in cols] for r in rows]
    widths = [max(len(row[k]) for row in [head] + body) for k in range(len(head))]

    def fmt(row):
        return pad + " | ".join(s.ljust(w) for s, w in zip(row, widths)).rstrip()

    out = []
    if t.get("title"):
        out.append(pad + t["title"])
    out.append(fmt(head))
    out.append(pad + "-+-".join("-" * w for w in widths))
    out += [fmt(r) for r in body]
    return out


def table(rows: Sequence[str], cols: Sequence[str], cells: dict, title: str = "", corner: str = "") -> dict:
    return {"_table": True, "title": title, "corner": corner, "rows": list(rows), "cols": list(cols),
            "cells": {r: {c: cells[(r, c)] for c in cols} for r in rows}}


# ---------------------------------------------------------------- commands

def _assumptions(vals) -> list:
    return [str(a) for a in vals]


def cmd_check(d: SystemDefinition, names: Sequence[str] | None = None) -> Report:
    sys_ = d.system
    pool = {**{k: ("symmetry", v) for k, v in d.symmetries.items()},
            **{k: ("adjoint", v) for k, v in d.adjoints.items()}}
    mult = {f"{k} (multiplier)": ("multiplier", v) for k, v in d.multipliers.items()}
    everything = {**pool, **mult}
    chosen = list(everything) if names is None else list(names)
    rep = Report("check", {"objects": chosen})
    for n in chosen:
        key = n if n in everything else (f"{n} (multiplier)" if f"{n} (multiplier)" in everything else None)
        if key is None:
            raise UsageError(f"unknown object {n!r}")
        kind, F = everything[key]
        entry = {"kind": kind, "value": _vec_str(F)}
        if kind == "symmetry":
            ok, R = sys_.is_symmetry(F)
            entry["verdict"] = ok
            if ok:
                entry["R"] = format_op(R)
        elif kind == "adjoint":
            ok, R = sys_.is_adjoint_symmetry(F)
            entry["verdict"] = ok
            if ok:
                entry["R"] = format_op(R)
        else:
            ok = sys_.is_multiplier(F)
            entry["verdict"] = ok
            name = key.split(" ")[0]
            if name in d.currents:
                cl = sys_.conservation_law_check(F, d.currents[name])
                entry["current"] = [str(e) for e in d.currents[name]]
                entry["conservation_law"] = cl
                ok = ok and cl
        rep.results[key] = entry
        rep.ok = rep.ok and ok
    return rep


def _vec_str(F: VectorFunction) -> str:
    comps = [str(c) for c in F]
    return comps[0] if len(comps) == 1 else "(" + ", ".join(comps) + ")"


def _ansatz(d: SystemDefinition, which: str) -> Ansatz:
    if which not in d.ansatz:
        raise UsageError(f"no [ansatz] entry for {which!r}")
    spec, ln = d.ansatz[which]
    if spec.startswith("point"):
        try:
            deg = int(spec.split()[1])
        except (IndexError, ValueError):
            raise ParseError("expected 'point <degree>'", ln, 1) from None
        return Ansatz.point_symmetry(d.space, deg)
    if ";" not in spec:
        raise ParseError("expected '<variables> ; <degree>'", ln, 1)
    vs, deg = spec.rsplit(";", 1)
    variables = [d.space.parse(v.strip(), line=ln) for v in vs.split(",")]
    comps = d.system.m if which == "symm" else d.system.M
    return Ansatz.polynomial(variables, int(deg), comps)


def cmd_solve(d: SystemDefinition, which: str) -> Report:
    solver = {"symm": solve_symmetries, "adjsymm": solve_adjoint_symmetries,
              "multiplier": solve_multipliers}.get(which)
    if solver is None:
        raise UsageError(f"unknown solve target {which!r}")
    sp = solver(d.system, _ansatz(d, which))
    rep = Report("solve", {"which": which, "pool_size": sp.pool_size})
    rep.results = {"dimension": sp.dim, "basis": [_vec_str(F) for F in sp.basis]}
    rep.assumptions = _assumptions(sp.assumptions)
    return rep


def _bases(d: SystemDefinition) -> Bases:
    return Bases(d.system, list(d.symmetries.values()), list(d.adjoints.values()),
                 list(d.symmetries), list(d.adjoints))


def cmd_actions(d: SystemDefinition, golden: str | None = None) -> Report:
    B = _bases(d)
    P, Q = list(d.symmetries), list(d.adjoints)
    rep = Report("actions", {"symmetries": P, "adjoints": Q})
    coords = {}
    for tag in (1, 2, 3):
        cells = {}
        for b, qn in enumerate(Q):
            for j, pn in enumerate(P):
                c = B.tensor(tag)[b][j]
                coords[(str(tag), qn, pn)] = c
                cells[(qn, pn)] = format_combo(c, Q)
        rep.results[f"action{tag}"] = table(Q, P, cells, f"S{tag}: action of symmetries on adjoint-symmetries")
    cs = [f"c{k + 1}" for k in range(len(Q))]
    taken = set(d.space.params) | set(P) | set(Q)
    if taken & set(cs):
        raise UsageError("names c1, c2, ... are reserved for the dual table")
    q = [Coef.param(c) for c in cs]
    cells = {}
    for tag in (1, 2, 3):
        for j, pn in enumerate(P):
            v = B.S(tag, q, [int(k == j) for k in range(len(P))])
            coords[(f"dual{tag}", pn)] = v
            cells[(pn, f"S{tag}")] = format_combo(v, Q)
    rep.results["dual"] = table(P, [f"S{t}" for t in (1, 2, 3)], cells,
                                "dual actions for Q = " + " + ".join(f"{c}*{n}" for c, n in zip(cs, Q)))
    if golden is not None:
        mism = compare_golden(json.loads(golden_text(golden)), coords, d, cs)
        rep.results["golden"] = {"mismatches": mism, "matches": not mism}
        rep.ok = not mism
    return rep


def compare_golden(g: dict, coords: dict, d: SystemDefinition, cs: Sequence[str]) -> list:
    Q = list(d.adjoints)
    mism = []
    for tag, rows in sorted(g.get("actions", {}).items()):
        for qn, row in sorted(rows.items()):
            for pn, text in sorted(row.items()):
                want = combo_coordinates(text, Q, d.space)
                have = coords.get((tag, qn, pn))
                if have != want:
                    mism.append(f"action{tag} ({qn},{pn}): expected {text}, got {format_combo(have, Q) if have else '?'}")
    for tag, col in sorted(g.get("dual", {}).items()):
        for pn, text in sorted(col.items()):
            want = combo_coordinates(text, Q, d.space, cs)
            have = coords.get((f"dual{tag}", pn))
            if have != want:
                mism.append(f"S{tag} ({pn}): expected {text}, got {format_combo(have, Q) if have else '?'}")
    return mism


def _q_coords(d: SystemDefinition, spec: str) -> list:
    return combo_coordinates(spec, list(d.adjoints), d.space)


def _scaling_coords(d: SystemDefinition, spec: str | None):
    if spec is None:
        return None
    return combo_coordinates(spec, list(d.symmetries), d.space)


def cmd_brackets(d: SystemDefinition, tag: int, qspec: str, scaling: str | None = None) -> Report:
    B = _bases(d)
    Pn, Qn = list(d.symmetries), list(d.adjoints)
    q = _q_coords(d, qspec)
    rep = Report("brackets", {"action": tag, "Q": qspec, "scaling": scaling or ""})
    S = dual_map(tag, q, B)
    rep.results["dual_map"] = {
        "kernel": [format_combo(k, Pn) for k in S.kernel],
        "range": [format_combo(r, Qn) for r in S.range],
        "rank": S.rank,
    }
    rep.assumptions = _assumptions(S.assumptions)
    sc = _scaling_coords(d, scaling)
    try:
        br = CommutatorBracket(tag, q, B, sc)
    except (IllDefinedBracket, ValueError) as e:
        rep.errors.append(f"commutator bracket: {e}")
        rep.ok = False
        return rep
    rep.certificates["commutator"] = br.certificate
    if getattr(br, "decomposition", None) is not None:
        dec = br.decomposition
        rep.certificates["weights"] = {n: format_coef(w) for n, w in zip(Pn, dec.weights)}
        rep.certificates["kernel_weights"] = [format_coef(w) for w in dec.kernel_weights]
        rep.certificates["complement_weights"] = [format_coef(w) for w in dec.complement_weights]
    elems, labels = _range_elements(S, Qn)
    T = br.table(elems, labels)
    cells = {(labels[i], labels[j]): format_combo(v, Qn) for (i, j), v in T.values.items()}
    rep.results["commutator"] = table(labels, labels, cells, f"commutator bracket induced by S{tag}", "[ , ]")
    rep.certificates["antisymmetric"] = T.antisymmetric
    rep.certificates["jacobi_zero"] = not T.jacobi_residuals
    if br.certificate == "ideal-kernel":
        rep.certificates["preimage_shift_independent"] = T.shift_verified
    rep.ok = T.antisymmetric and not T.jacobi_residuals and (br.certificate != "ideal-kernel" or T.shift_verified)
    try:
        nb = NonCommutatorBracket(tag, q, B, sc)
    except (IllDefinedBracket, ValueError) as e:
        rep.errors.append(f"non-commutator bracket: {e}")
        return rep
    rep.certificates["noncommutator"] = nb.certificate
    for variant, name in ((None, "plain"), ("+", "symmetric"), ("-", "antisymmetric")):
        cells = {}
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                try:
                    cells[(labels[i], labels[j])] = format_combo(nb(a, b, variant), Qn)
                except RangeError:
                    cells[(labels[i], labels[j])] = "n/a"
        rep.results[f"noncommutator_{name}"] = table(labels, labels, cells,
                                                     f"non-commutator bracket ({name}) induced by S{tag}", "( , )")
    return rep


def _range_elements(S, Qn):
    """Adjoint basis elements in the range when they span it, otherwise the range columns."""
    units = [[int(k == b) for k in range(len(Qn))] for b in range(len(Qn))]
    inside = [(u, n) for u, n in zip(units, Qn) if S.in_range(u)]
    if len(inside) == S.rank:
        return [u for u, _ in inside], [n for _, n in inside]
    return list(S.range), [format_combo(r, Qn) for r in S.range]


def cmd_noether(d: SystemDefinition, qspec: str) -> Report:
    sys_ = d.system
    Pn, Qn = list(d.symmetries), list(d.adjoints)
    q = _q_coords(d, qspec)
    Q = combination(q, list(d.adjoints.values()))
    rep = Report("noether", {"Q": qspec})
    J3 = noether_J3(Q, sys_)
    rep.results["J3"] = format_op(J3.op)
    try:
        E = sys_.to_evolution()
    except ConversionError as e:
        rep.errors.append(f"evolution form unavailable: {e}")
        return rep
    Qe = on_solutions(Q, sys_)
    Pe = [on_solutions(P, sys_) for P in d.symmetries.values()]
    try:
        J = evol_noether(Qe, E)
    except (ValueError, RuntimeError) as e:
        rep.errors.append(f"evolution Noether operator: {e}")
        rep.ok = False
        return rep
    rep.results["evolution_J"] = format_op(J.op)
    rep.certificates["evolution_J_skew"] = bool(J.skew)
    W = omega_table(Qe, Pe, E)
    cells = {(Pn[i], Pn[j]): str(W[i][j]) for i in range(len(Pn)) for j in range(len(Pn))}
    rep.results["omega"] = table(Pn, Pn, cells, "symplectic 2-form on symmetries", "omega")
    anti = all((W[i][j] + W[j][i]).is_zero() for i in range(len(Pn)) for j in range(len(Pn)))
    closed = all(closure_check(Qe, Pe[i], Pe[j], Pe[k], E)
                 for i in range(len(Pe)) for j in range(i + 1, len(Pe)) for k in range(j + 1, len(Pe)))
    rep.certificates["omega_antisymmetric"] = anti
    rep.certificates["omega_closed_on_symmetries"] = closed
    x = E.spatial[0]
    funcs = {k: Functional(v, x) for k, v in d.functionals.items()}
    for hname, op in d.hamiltonians:
        if hname not in funcs:
            raise UsageError(f"hamiltonian refers to unknown functional {hname!r}")
        D = _parse_operator(op, d.space)
        rep.certificates[f"hamiltonian {hname} with {op}"] = hamiltonian_check(E, funcs[hname], D)
    if funcs and not J.op.is_zero():
        Fs = list(funcs.values())
        Fs = (Fs + Fs)[:3]
        try:
            pr = poisson_skew_jacobi_check(J.op, *Fs, dep=E.deps[0])
            rep.certificates["poisson_skew"] = pr.skew
            rep.certificates["poisson_jacobi"] = pr.jacobi
        except ValueError as e:
            rep.errors.append(f"poisson check: {e}")
    rep.ok = all(v for v in rep.certificates.values() if isinstance(v, bool))
    return rep


def _parse_operator(text: str, space: JetSpace) -> LinDiffOp:
    """``c*D_x^n`` style constant-coefficient scalar operators, e.g. ``D_x`` or ``2*D_xx``."""
    terms = {}
    parts, depth, start = [], 0, 0
    for k, ch in enumerate(text):
        depth += (ch == "(") - (ch == ")")
        if depth == 0 and ch in "+-" and k > 0 and text[k - 1] not in "*/(":
            parts.append(text[start:k])
            start = k + (ch == "+")
    parts.append(text[start:])
    for part in parts:
        part = part.strip()
        if not part:
            continue
        coeff, _, op = part.rpartition("D_")
        coeff = coeff.rstrip("*").strip()
        if not op or not all(ch in space.independent for ch in op):
            raise UsageError(f"cannot parse operator {text!r}")
        c = 1 if coeff in ("", "+") else (-1 if coeff == "-" else space.parse_coef(coeff))
        key = mi(op)
        terms[key] = terms.get(key, 0) + c
    return LinDiffOp.scalar(terms)


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", required=True, help="system file or bundled name (pgkdv, wave)")
    common.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                        help="specialize a parameter to a rational value")
    common.add_argument("--format", choices=("text", "records"), default="text")

    ap = argparse.ArgumentParser(prog="adjsym", description="Symmetries, adjoint-symmetries and their actions.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", parents=[common], help="verify declared objects")
    p.add_argument("names", nargs="*")
    p = sub.add_parser("solve", parents=[common], help="solve determining equations over an ansatz")
    p.add_argument("which", choices=("symm", "adjsymm", "multiplier"))
    p = sub.add_parser("actions", parents=[common], help="tables of the three symmetry actions")
    p.add_argument("--golden", help="golden table file or bundled name")
    p = sub.add_parser("brackets", parents=[common], help="adjoint-symmetry brackets")
    p.add_argument("--action", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--Q", required=True, help="adjoint-symmetry name or combination")
    p.add_argument("--scaling", nargs="?", const="", default=None,
                   help="allow the scaling route (optionally naming the scaling symmetry)")
    p = sub.add_parser("noether", parents=[common], help="Noether operators and the symplectic 2-form")
    p.add_argument("--Q", required=True)
    return ap


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return (0 if e.code == 0 else 2), ""
    try:
        d = load_system(args.system, args.param)
        if args.command == "check":
            rep = cmd_check(d, args.names or None)
        elif args.command == "solve":
            rep = cmd_solve(d, args.which)
        elif args.command == "actions":
            rep = cmd_actions(d, args.golden)
        elif args.command == "brackets":
            scaling = args.scaling
            if scaling == "":
                scaling = d.scaling
                if scaling is None:
                    raise UsageError("--scaling given without a name and the system declares none")
            rep = cmd_brackets(d, args.action, args.Q, scaling)
        else:
            rep = cmd_noether(d, args.Q)
    except (UsageError, ParseError, PreconditionError) as e:
        return 2, f"error: {e}\n"
    out = rep.to_records() if args.format == "records" else rep.to_text()
    return (0 if rep.ok else 1), out


def main(argv: Sequence[str] | None = None) -> int:
    code, out = run(argv)
    stream = sys.stdout if code != 2 else sys.stderr
    stream.write(out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
