"""Exact arithmetic in tree-lexicographic lattice-ordered groups and their parasemifield view."""
from treelex.exceptions import TreelexError
from treelex.forest import RootedForest, ahu_canonical, iso, validate
from treelex.parasemifield import GeneratorAssignment, Parasemifield
from treelex.pwl import AffineForm, PwlFunction
from treelex.tlex import TlexElement, element

__version__ = "0.1.0"

__all__ = [
    "TreelexError",
    "RootedForest",
    "validate",
    "ahu_canonical",
    "iso",
    "TlexElement",
    "element",
    "Parasemifield",
    "GeneratorAssignment",
    "AffineForm",
    "PwlFunction",
]
