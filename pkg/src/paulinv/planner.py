"""
Decision chain from a support and a task to a certified circuit program.

``invert``     single query, then the commuting cover circuit, then the split search.
``conjugate``  single query, then the split / commuting conjugation routes.
``transpose``  single query only; multi-query transposition is reported as unsupported.

Statuses are machine-readable.  ``impossible`` is reserved for single-query
infeasibility, which is exact (an inconsistent affine system); every other
failure is ``not_found`` (search exhausted) or ``cap_exceeded`` (search
refused), neither of which rules out a protocol.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .conjugation import build_conjugation_certificate, synth_conjugate
from .pauli import DEFAULT_MAX_QUBITS, PauliOperator, y_parity
from .program import CircuitProgram, Task, render_program
from .simulate import certify_program
from .support import (
    DEFAULT_ORACLE_CAP,
    DEFAULT_SPLIT_CAP,
    CapExceededError,
    PauliSupport,
    check_pairwise_commuting,
    find_anticommute_cover,
    find_identity_subset_witness,
    find_single_query_conjugator,
    find_single_query_inverter,
    find_single_query_transposer,
    find_split_certificate,
)
from .synth import synth_commuting_inverse, synth_single_query, synth_split_inverse

__all__ = ["AnalysisSummary", "analyze", "oracle_witness", "ORACLE_WEIGHTS"]

VALIDATION_SAMPLES = 16
VALIDATION_TOL = 1e-9

FOUND = "found"
NOT_FOUND = "not_found"
CAP_EXCEEDED = "cap_exceeded"
UNSUPPORTED = "unsupported"


def _fmt(p: PauliOperator | None) -> str | None:
    return None if p is None else str(p)


ORACLE_WEIGHTS = {
    # which subset members count towards the odd-parity test
    Task.INVERT: lambda t: 1,
    Task.CONJUGATE: lambda t: 1 - y_parity(t),
    Task.TRANSPOSE: y_parity,
}


def oracle_witness(support: PauliSupport, task: Task | str, cap: int = DEFAULT_ORACLE_CAP) -> tuple[int, ...] | None:
    """Brute-force obstruction to a single-query protocol.

    A subset whose product is a multiple of I and which has an odd number of
    members (invert), of even-Y members (conjugate) or of odd-Y members
    (transpose).  ``None`` means the single-query protocol exists.
    """
    task = Task.parse(task)
    weights = [ORACLE_WEIGHTS[task](t) for t in support.terms]
    return find_identity_subset_witness(support, weights=weights, cap=cap)


@dataclass
class AnalysisSummary:
    task: Task
    support_hash: str
    n_qubits: int
    n_terms: int
    pairwise_commuting: bool
    single_query: dict[str, str | None]  # task -> V or None
    status: str
    route: str | None = None
    query_count: int | None = None
    certificate: dict = field(default_factory=dict)
    program: CircuitProgram | None = None
    validation_min_fidelity: float | None = None
    seed: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def single_query_status(self, task: Task | str) -> str:
        return "possible" if self.single_query[Task.parse(task).value] is not None else "impossible"

    def to_dict(self) -> dict:
        return {
            "task": self.task.value,
            "support_hash": self.support_hash,
            "n_qubits": self.n_qubits,
            "n_terms": self.n_terms,
            "pairwise_commuting": self.pairwise_commuting,
            "single_query": {
                t: {"status": self.single_query_status(t), "v": v} for t, v in self.single_query.items()
            },
            "protocol": {
                "status": self.status,
                "route": self.route,
                "query_count": self.query_count,
                "certificate": self.certificate,
                "program": render_program(self.program, header=False).splitlines() if self.program else None,
                "validation_min_fidelity": self.validation_min_fidelity,
            },
            "seed": self.seed,
            "notes": list(self.notes),
        }

    def to_text(self) -> str:
        lines = [
            f"support: {self.n_terms} terms on {self.n_qubits} qubits (hash {self.support_hash})",
            f"pairwise commuting: {'YES' if self.pairwise_commuting else 'NO'}",
        ]
        for t, v in self.single_query.items():
            lines.append(f"single-query {t}: " + (f"YES, V = {v}" if v is not None else "NO"))
        lines.append(f"task: {self.task.value}")
        lines.append(f"status: {self.status}")
        if self.route:
            lines.append(f"route: {self.route}")
        for k, v in self.certificate.items():
            lines.append(f"  {k}: {v}")
        if self.query_count is not None:
            lines.append(f"queries: {self.query_count}")
        if self.program is not None:
            lines.append(f"circuit: {self.program}")
        if self.validation_min_fidelity is not None:
            lines.append(f"validation min fidelity: {self.validation_min_fidelity:.12f}")
        lines.append(f"seed: {self.seed}")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines) + "\n"


def _invert(support: PauliSupport, summary: AnalysisSummary, cap: int, oracle_cap: int) -> None:
    v = find_single_query_inverter(support)
    if v is not None:
        summary.route = "single_query"
        summary.certificate = {"v": str(v)}
        summary.program = synth_single_query(Task.INVERT, v)
        return
    if len(support) <= oracle_cap:
        wit = oracle_witness(support, Task.INVERT, oracle_cap)
        if wit is not None:
            summary.certificate["odd_identity_subset"] = [str(support[j]) for j in wit]
    if summary.pairwise_commuting:
        cover = find_anticommute_cover(support)
        summary.route = "commuting_cover"
        summary.certificate["w"] = [str(w) for w in cover.elements]
        summary.program = synth_commuting_inverse(cover)
        return
    try:
        cert = find_split_certificate(support, cap=cap)
    except CapExceededError as exc:
        summary.status = CAP_EXCEEDED
        summary.notes.append(f"split search refused: {exc}; a protocol may still exist")
        return
    if cert is None:
        summary.status = NOT_FOUND
        summary.notes.append("no split certificate: the search was exhausted, which does not prove impossibility")
        return
    summary.route = "split"
    summary.certificate.update({
        "s0": [str(support[j]) for j in cert.s0_indices],
        "s1": [str(support[j]) for j in cert.s1_indices],
        "v0": str(cert.v0),
        "w": [str(w) for w in cert.w.elements],
    })
    summary.program = synth_split_inverse(cert, support)


def _conjugate(support: PauliSupport, summary: AnalysisSummary, cap: int, max_qubits: int, seed: int) -> None:
    try:
        cert = build_conjugation_certificate(support, cap=cap, max_qubits=max_qubits, seed=seed)
    except CapExceededError as exc:
        summary.status = CAP_EXCEEDED
        summary.notes.append(f"split search refused: {exc}; a protocol may still exist")
        return
    if cert is None:
        summary.status = NOT_FOUND
        summary.notes.append("no conjugation certificate: the search was exhausted, which does not prove impossibility")
        return
    summary.route = {"single": "single_query", "split": "split", "commuting": "commuting_twisted"}[cert.kind]
    if cert.kind == "single":
        summary.certificate = {"v": str(cert.single_query_v)}
    elif cert.kind == "split":
        summary.certificate = {
            "s0": [str(support[j]) for j in cert.s0_indices],
            "s1": [str(support[j]) for j in cert.s1_indices],
            "v0": str(cert.v0),
            "v0_prime": str(cert.v0_prime),
            "s0_subcircuit": str(cert.s0_subcircuit),
        }
    else:
        summary.certificate = {"subcircuit": str(cert.s0_subcircuit)}
    summary.program = synth_conjugate(cert, support)


def _transpose(support: PauliSupport, summary: AnalysisSummary) -> None:
    v = find_single_query_transposer(support)
    if v is None:
        summary.status = UNSUPPORTED
        summary.notes.append("single-query transposition is impossible; multi-query transposition is not offered")
        return
    summary.route = "single_query"
    summary.certificate = {"v": str(v)}
    summary.program = synth_single_query(Task.TRANSPOSE, v)


def analyze(support: PauliSupport, task: Task | str = Task.INVERT, cap: int = DEFAULT_SPLIT_CAP,
            max_qubits: int = DEFAULT_MAX_QUBITS, seed: int = 0,
            oracle_cap: int = DEFAULT_ORACLE_CAP) -> AnalysisSummary:
    """Run the decision chain for ``task`` and certify the resulting program.

    Every emitted program is checked on 16 random coefficient draws
    (fidelity at least ``1 - 1e-9``) when the support fits the simulator.
    """
    task = Task.parse(task)
    singles = {
        Task.INVERT.value: _fmt(find_single_query_inverter(support)),
        Task.CONJUGATE.value: _fmt(find_single_query_conjugator(support)),
        Task.TRANSPOSE.value: _fmt(find_single_query_transposer(support)),
    }
    summary = AnalysisSummary(
        task=task,
        support_hash=support.digest(),
        n_qubits=support.n_qubits,
        n_terms=len(support),
        pairwise_commuting=check_pairwise_commuting(support),
        single_query=singles,
        status=FOUND,
        seed=seed,
    )
    if task is Task.INVERT:
        _invert(support, summary, cap, oracle_cap)
    elif task is Task.CONJUGATE:
        _conjugate(support, summary, cap, max_qubits, seed)
    else:
        _transpose(support, summary)
    if summary.program is None:
        if summary.status == FOUND:
            summary.status = NOT_FOUND
        return summary
    summary.query_count = summary.program.query_count
    if support.n_qubits <= max_qubits:
        rep = certify_program(support, summary.program, task, samples=VALIDATION_SAMPLES, seed=seed,
                              tol=VALIDATION_TOL, max_qubits=max_qubits)
        summary.validation_min_fidelity = rep.min_fidelity
        if not rep.passed:
            raise AssertionError(f"synthesised {summary.route} program failed numeric validation "
                                 f"(min fidelity {rep.min_fidelity})")
    else:
        summary.notes.append(f"numeric validation skipped: {support.n_qubits} qubits exceeds the simulator cap")
    return summary
