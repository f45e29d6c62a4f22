"""Symbolic/numeric workbench for orthogonal Cayley-Klein groups, their
nilpotent-commutative coefficient algebra, and the N=3 quantum deformation
with its dual."""

from .pimenov import (
    ONE,
    NIL,
    IM,
    AnalyticKernel,
    KERNELS,
    ParameterSignature,
    PimenovElement,
    format_element,
    jfactor_square,
    parse_element,
    pim_apply,
    scaled_trig,
)
from .dmat import DMatrix
from . import ck_classical, dual, free_algebra, frt

__all__ = [
    "ONE",
    "NIL",
    "IM",
    "AnalyticKernel",
    "KERNELS",
    "ParameterSignature",
    "PimenovElement",
    "DMatrix",
    "format_element",
    "jfactor_square",
    "parse_element",
    "pim_apply",
    "scaled_trig",
    "ck_classical",
    "dual",
    "free_algebra",
    "frt",
]

__version__ = "0.1.0"
