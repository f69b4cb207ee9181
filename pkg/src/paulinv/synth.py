"""
Turn certificates into circuit programs.

The recursive inverse circuit for frames ``V_0 .. V_{L-1}`` is built in
application order as

    f_1 = [V_0, Q]
    f_l = f_{l-1} + [V_{l-1}, Q] + f_{l-1}
    program = f_L + [V_{L-1}]

which is the operator ``V_{L-1} f_{L-1}(U) U V_{L-1} f_{L-1}(U)`` read right to
left.  It uses ``2**L - 1`` queries.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .pauli import PauliOperator, commutes, identity, multiply, y_parity
from .program import (
    QUERY,
    CircuitProgram,
    FrameGate,
    QuerySlot,
    Task,
    program_from_sandwiches,
    sandwich_frames,
)
from .support import (
    AntiCommuteCover,
    PauliSupport,
    SplitCertificate,
    check_pairwise_commuting,
)

__all__ = [
    "CertificateError",
    "synth_single_query",
    "synth_recursive_inverse",
    "synth_commuting_inverse",
    "synth_split_inverse",
    "synth_commuting_twisted",
    "target_signs",
    "verify_commuting_plan",
]


class CertificateError(ValueError):
    """A certificate does not satisfy the invariants its circuit relies on."""


def synth_single_query(task: Task | str, v: PauliOperator) -> CircuitProgram:
    """``[V, Q, V]``; an identity ``V`` collapses to ``[Q]``."""
    return CircuitProgram(Task.parse(task), v.n_qubits, (FrameGate(v), QUERY, FrameGate(v)))


def _recursive_steps(frames: Sequence[PauliOperator]) -> list:
    f = [FrameGate(frames[0]), QUERY]
    for v in frames[1:]:
        f = f + [FrameGate(v), QUERY] + f
    return f + [FrameGate(frames[-1])]


def synth_recursive_inverse(frames: Sequence[PauliOperator], task: Task | str = Task.INVERT) -> CircuitProgram:
    """Recursive ``2**L - 1`` query circuit over ``frames`` (no certificate checks)."""
    if not frames:
        raise CertificateError("need at least one frame")
    return CircuitProgram(Task.parse(task), frames[0].n_qubits, tuple(_recursive_steps(frames)))


def synth_commuting_inverse(cover: AntiCommuteCover) -> CircuitProgram:
    """Inverse circuit for a pairwise-commuting support from its anti-commute cover."""
    if len(cover) == 0:
        raise CertificateError("empty anti-commute cover")
    return synth_recursive_inverse(cover.elements)


def synth_split_inverse(cert: SplitCertificate, support: PauliSupport | None = None) -> CircuitProgram:
    """Inverse circuit for a split certificate: base frame ``v0`` then ``cert.w``.

    When ``support`` is given the certificate invariants are checked first.
    """
    if support is not None:
        problems = cert.violations(support)
        if problems:
            raise CertificateError("invalid split certificate: " + "; ".join(problems))
    return synth_recursive_inverse((cert.v0,) + tuple(cert.w.elements))


def synth_commuting_twisted(cover: AntiCommuteCover, twist: PauliOperator,
                            task: Task | str) -> CircuitProgram:
    """Sandwiches over ``twist * T`` for every nonempty product ``T`` of the cover.

    For a pairwise-commuting support each covered term ends up with coefficient
    sign ``-s(twist, P)``, where ``s = -1`` iff ``twist`` anti-commutes with
    ``P``.  A twist with the transposition pattern therefore yields the complex
    conjugate (and the identity twist gives the plain inverse circuit).
    """
    base = synth_recursive_inverse(cover.elements)
    # commuting terms make the sandwich order free; last-to-first is used
    frames = [multiply(twist, c).without_phase() for c in reversed(sandwich_frames(base))]
    return program_from_sandwiches(task, twist.n_qubits, frames)


def target_signs(support: PauliSupport, task: Task | str) -> list[int]:
    """Required coefficient sign per term: ``U^dag`` negates all, ``U*`` negates
    even-Y terms, ``U^T`` negates odd-Y terms."""
    task = Task.parse(task)
    if task is Task.INVERT:
        return [-1] * len(support)
    if task is Task.CONJUGATE:
        return [1 if y_parity(t) else -1 for t in support.terms]
    return [-1 if y_parity(t) else 1 for t in support.terms]


def verify_commuting_plan(support: PauliSupport, prog: CircuitProgram,
                          signs: Sequence[int] | None = None) -> bool:
    """Exact sign bookkeeping for pairwise-commuting supports.

    For commuting terms the program equals ``T * exp(-i sum_j c_j a_j P_j)``
    where ``T`` is the product of all frames and ``c_j`` sums the conjugation
    signs of ``P_j`` under the cumulative frame in front of each query.  The
    plan is correct iff ``T`` is a multiple of I and ``c_j`` equals the target
    sign for every term.
    """
    if not check_pairwise_commuting(support):
        raise ValueError("exact sign bookkeeping needs a pairwise-commuting support")
    if signs is None:
        signs = target_signs(support, prog.task)
    if len(signs) != len(support):
        raise ValueError("one target sign per support term is required")
    cum = identity(prog.n_qubits)
    totals = [0] * len(support)
    for step in prog.steps:
        if isinstance(step, QuerySlot):
            for j, p in enumerate(support.terms):
                totals[j] += 1 if commutes(cum, p) else -1
        else:
            cum = multiply(step.pauli, cum)
    if not cum.is_identity:
        return False
    return all(t == s for t, s in zip(totals, signs))
