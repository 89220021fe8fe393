"""The semigroup F generated by the three-state Mealy machine I: action
tables, normal forms, growth, finite quotients and verification suites."""

from .mealy import LevelCapError, MealyMachine, TransformationTable, act, automaton_I, table
from .rewrite import NormalForm, normalize
from .words import GeneratorWord, fib

__version__ = "0.1.0"

__all__ = [
    "GeneratorWord",
    "LevelCapError",
    "MealyMachine",
    "NormalForm",
    "TransformationTable",
    "act",
    "automaton_I",
    "fib",
    "normalize",
    "table",
]
