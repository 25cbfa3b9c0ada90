"""Exact Buck-density computations for sumsets of eventually periodic sets."""

from .buck_density import StagedSet, buck, buck_lower, buck_upper
from .errors import ContractViolation, InternalConsistencyError, SetSyntaxError, UndecidableAtPrecision
from .exact_arithmetic import IntervalReal, crt_solve, parse_alpha
from .periodic_sets import EventuallyPeriodicSet, k_fold_sumset, make, sumset
from .setgrammar import parse_set, render

__all__ = [
    "ContractViolation",
    "EventuallyPeriodicSet",
    "InternalConsistencyError",
    "IntervalReal",
    "SetSyntaxError",
    "StagedSet",
    "UndecidableAtPrecision",
    "buck",
    "buck_lower",
    "buck_upper",
    "crt_solve",
    "k_fold_sumset",
    "make",
    "parse_alpha",
    "parse_set",
    "render",
    "sumset",
]

__version__ = "0.1.0"
