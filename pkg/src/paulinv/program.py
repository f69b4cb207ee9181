"""
Circuit programs: Pauli frame gates interleaved with black-box query slots.

Steps are stored in application (time) order, the first-applied step first,
matching left-to-right circuit diagrams.  Written operator products such as
``V1 U V0`` read right to left; :func:`operator_string` renders that form.

Text format::

    # comment
    task: invert
    qubits: 3
    GATE Z0 Z1
    QUERY
    GATE Z1 Z2
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

from .pauli import PauliOperator, PauliParseError, identity, multiply, parse_pauli

__all__ = [
    "Task",
    "FrameGate",
    "QuerySlot",
    "QUERY",
    "Step",
    "CircuitProgram",
    "ProgramFormatError",
    "merge_steps",
    "program_from_sandwiches",
    "sandwich_frames",
    "render_program",
    "parse_program",
    "load_program",
    "operator_string",
]


class Task(str, enum.Enum):
    INVERT = "invert"
    CONJUGATE = "conjugate"
    TRANSPOSE = "transpose"

    @classmethod
    def parse(cls, value: "str | Task") -> "Task":
        try:
            return cls(value.lower() if isinstance(value, str) else value)
        except ValueError:
            raise ValueError(f"unknown task {value!r}; expected invert, conjugate or transpose") from None


@dataclass(frozen=True, slots=True)
class FrameGate:
    pauli: PauliOperator

    def __str__(self) -> str:
        return str(self.pauli)


@dataclass(frozen=True, slots=True)
class QuerySlot:
    def __str__(self) -> str:
        return "U"


QUERY = QuerySlot()
Step = Union[FrameGate, QuerySlot]


class ProgramFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def merge_steps(steps: Iterable[Step | PauliOperator]) -> tuple[Step, ...]:
    """Fuse runs of adjacent frames into one (global phase dropped); drop identity frames."""
    out: list[Step] = []
    pending: PauliOperator | None = None
    for s in steps:
        if isinstance(s, PauliOperator):
            s = FrameGate(s)
        if isinstance(s, FrameGate):
            # later frames multiply from the left
            pending = s.pauli if pending is None else multiply(s.pauli, pending)
            continue
        if pending is not None and not pending.is_identity:
            out.append(FrameGate(pending.without_phase()))
        pending = None
        out.append(QUERY)
    if pending is not None and not pending.is_identity:
        out.append(FrameGate(pending.without_phase()))
    return tuple(out)


@dataclass(frozen=True)
class CircuitProgram:
    """Alternating Pauli frames and query slots implementing ``task``.

    Construction merges adjacent frames, so the stored steps never contain two
    frames in a row or an identity frame.
    """

    task: Task
    n_qubits: int
    steps: tuple[Step, ...]

    def __post_init__(self):
        object.__setattr__(self, "task", Task.parse(self.task))
        merged = merge_steps(self.steps)
        for s in merged:
            if isinstance(s, FrameGate) and s.pauli.n_qubits != self.n_qubits:
                raise ValueError(f"frame {s.pauli} does not act on {self.n_qubits} qubits")
        object.__setattr__(self, "steps", merged)

    @property
    def query_count(self) -> int:
        return sum(1 for s in self.steps if isinstance(s, QuerySlot))

    @property
    def frames(self) -> list[PauliOperator]:
        return [s.pauli for s in self.steps if isinstance(s, FrameGate)]

    def __str__(self) -> str:
        return operator_string(self)


def program_from_sandwiches(task: Task | str, n_qubits: int,
                            frames: Sequence[PauliOperator]) -> CircuitProgram:
    """Program for the operator ``(F_m U F_m) ... (F_1 U F_1)``; ``frames[0]`` acts first."""
    steps: list[Step | PauliOperator] = []
    for f in frames:
        steps += [f, QUERY, f]
    return CircuitProgram(Task.parse(task), n_qubits, tuple(steps))


def sandwich_frames(prog: CircuitProgram) -> list[PauliOperator]:
    """Cumulative frame before each query, first query first.

    The program equals the product of sandwiches ``C_k U C_k`` only when all of
    its frames multiply to a multiple of I; otherwise ``ValueError``.
    """
    cum = identity(prog.n_qubits)
    out = []
    for s in prog.steps:
        if isinstance(s, FrameGate):
            cum = multiply(s.pauli, cum)
        else:
            out.append(cum.without_phase())
    if not cum.is_identity:
        raise ValueError("program frames do not multiply to the identity")
    return out


def operator_string(prog: CircuitProgram) -> str:
    """Right-to-left operator product, e.g. ``'Z0 Y1 U Z0 Y1'`` for ``[V, Q, V]``.

    Multi-factor frames are written without spaces (``X0X1``) so the string can
    be compared with hand-written products.
    """
    parts = []
    for s in reversed(prog.steps):
        if isinstance(s, QuerySlot):
            parts.append("U")
        else:
            parts.append(str(s.pauli).replace(" ", ""))
    return " ".join(parts)


def render_program(prog: CircuitProgram, header: bool = True) -> str:
    """Text form of ``prog``; with ``header=False`` only the step lines."""
    lines = []
    if header:
        lines += [f"task: {prog.task.value}", f"qubits: {prog.n_qubits}"]
    for s in prog.steps:
        lines.append("QUERY" if isinstance(s, QuerySlot) else f"GATE {s.pauli}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_program(text: str, task: Task | str | None = None,
                  n_qubits: int | None = None) -> CircuitProgram:
    """Parse the circuit text format.

    Header lines override nothing passed explicitly; a missing task defaults to
    ``invert`` and a missing qubit count is inferred from the gates.
    """
    head_task = head_qubits = None
    raw_steps: list[tuple[int, str | None]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        if _ and key.strip().lower() in ("task", "qubits"):
            if raw_steps:
                raise ProgramFormatError("header lines must precede steps", lineno)
            value = rest.strip()
            if key.strip().lower() == "task":
                try:
                    head_task = Task.parse(value)
                except ValueError as exc:
                    raise ProgramFormatError(str(exc), lineno) from None
            else:
                if not value.isdigit() or int(value) < 1:
                    raise ProgramFormatError(f"invalid qubit count {value!r}", lineno)
                head_qubits = int(value)
            continue
        word, _, args = line.partition(" ")
        if word == "QUERY" and not args.strip():
            raw_steps.append((lineno, None))
        elif word == "GATE" and args.strip():
            raw_steps.append((lineno, args.strip()))
        else:
            raise ProgramFormatError(f"unknown directive {line!r}", lineno)
    if task is not None and head_task is not None and Task.parse(task) != head_task:
        raise ProgramFormatError(f"file task {head_task.value} does not match {Task.parse(task).value}")
    if n_qubits is not None and head_qubits is not None and n_qubits != head_qubits:
        raise ProgramFormatError(f"file declares {head_qubits} qubits, expected {n_qubits}")
    the_task = head_task or (Task.parse(task) if task is not None else Task.INVERT)
    nq = head_qubits or n_qubits
    if nq is None:
        nq = 1
        for _, arg in raw_steps:
            for tok in (arg or "").split():
                if tok != "I" and tok[1:].isdigit():
                    nq = max(nq, int(tok[1:]) + 1)
    steps: list[Step] = []
    for lineno, arg in raw_steps:
        if arg is None:
            steps.append(QUERY)
            continue
        try:
            steps.append(FrameGate(parse_pauli(arg, nq)))
        except PauliParseError as exc:
            raise ProgramFormatError(str(exc), lineno) from exc
    return CircuitProgram(the_task, nq, tuple(steps))


def load_program(path: str | Path, **kwargs) -> CircuitProgram:
    return parse_program(Path(path).read_text(encoding="utf-8"), **kwargs)
