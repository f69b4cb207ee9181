"""Pauli-support analysis and query-based inversion, conjugation and transposition of unknown unitaries."""
from .pauli import (
    PauliOperator,
    PauliError,
    PauliParseError,
    parse_pauli,
    multiply,
    commutes,
    y_parity,
    dense_matrix,
    to_symplectic,
    from_symplectic,
)
from .program import CircuitProgram, Task, parse_program, render_program
from .support import PauliSupport, parse_support, load_support

__version__ = "0.1.0"

__all__ = [
    "PauliOperator",
    "PauliError",
    "PauliParseError",
    "parse_pauli",
    "multiply",
    "commutes",
    "y_parity",
    "dense_matrix",
    "to_symplectic",
    "from_symplectic",
    "CircuitProgram",
    "Task",
    "parse_program",
    "render_program",
    "PauliSupport",
    "parse_support",
    "load_support",
]
