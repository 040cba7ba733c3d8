"""Shared example systems and their generators."""

from functools import lru_cache

from adjsym.actions import on_solutions
from adjsym.expr import JetSpace, JetVar
from adjsym.pdesys import PDESystem
from adjsym.structs import Bases

PGKDV_SPACE = JetSpace(("t", "x"), ("u",), ("p",))
P_TEXT = ["1", "-u_x", "-u_t", "(p-2)*u - 3*p*t*u_t - p*x*u_x"]
Q_TEXT = ["u_xx", "u_tx", "2*u_x + 3*p*t*u_tx + p*x*u_xx"]


def parse(text, space=PGKDV_SPACE):
    return space.parse(text)


def coef(text, space=PGKDV_SPACE):
    return space.parse_coef(text)


@lru_cache(maxsize=None)
def pgkdv():
    S = PGKDV_SPACE
    return PDESystem(S, [S.parse("u_t + 1/(p+1)*u_x^(p+1) + u_xxx")], [JetVar.dep("u", ("t",))], ["G"], True)


@lru_cache(maxsize=None)
def pgkdv_P():
    sys = pgkdv()
    return tuple(sys.dep_vector([parse(s)]) for s in P_TEXT)


@lru_cache(maxsize=None)
def pgkdv_Q():
    sys = pgkdv()
    return tuple(sys.eq_vector([parse(s)]) for s in Q_TEXT)


@lru_cache(maxsize=None)
def pgkdv_bases():
    return Bases(pgkdv(), pgkdv_P(), pgkdv_Q(), ["P1", "P2", "P3", "P4"], ["Q1", "Q2", "Q3"])


@lru_cache(maxsize=None)
def pgkdv_evolution():
    return pgkdv().to_evolution()


@lru_cache(maxsize=None)
def pgkdv_evolutionary_P():
    return tuple(on_solutions(P, pgkdv()) for P in pgkdv_P())


@lru_cache(maxsize=None)
def pgkdv_evolutionary_Q():
    return tuple(on_solutions(Q, pgkdv()) for Q in pgkdv_Q())


WAVE_SPACE = JetSpace(("t", "x"), ("u",))
WAVE_P_TEXT = ["-u_t", "-u_x", "-x*u_t - t*u_x", "-t*u_t - x*u_x", "u"]
WAVE_Q_TEXT = ["u_t", "u_x", "x*u_t + t*u_x", "t*u_t + x*u_x", "u"]


@lru_cache(maxsize=None)
def wave():
    S = WAVE_SPACE
    return PDESystem(S, [S.parse("u_tt - u_xx")], [JetVar.dep("u", ("t", "t"))], ["G"], True)


@lru_cache(maxsize=None)
def wave_P():
    return tuple(wave().dep_vector([WAVE_SPACE.parse(s)]) for s in WAVE_P_TEXT)


@lru_cache(maxsize=None)
def wave_Q():
    return tuple(wave().eq_vector([WAVE_SPACE.parse(s)]) for s in WAVE_Q_TEXT)


def unit(n, k):
    return [int(i == k) for i in range(n)]
