"""Exact jet-space calculus for symmetries and adjoint-symmetries of PDE systems."""

from .coef import Coef
from .expr import DiffExpr, JetSpace, JetVar, ParseError
from .jetops import LinDiffOp, VectorFunction
from .pdesys import EvolutionSystem, PDESystem
from .actions import action, action1, action2, action3, coordinates, on_solutions
from .structs import Bases, dual_map, structure_constants
from .noether import Functional, evol_noether, noether_J3, symplectic_form
from .cli import load_system

__all__ = [
    "Bases", "Coef", "DiffExpr", "EvolutionSystem", "Functional", "JetSpace", "JetVar", "LinDiffOp",
    "ParseError", "PDESystem", "VectorFunction", "action", "action1", "action2", "action3",
    "coordinates", "dual_map", "evol_noether", "load_system", "noether_J3", "on_solutions",
    "structure_constants", "symplectic_form",
]
