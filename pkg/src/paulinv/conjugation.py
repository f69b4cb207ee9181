"""
Complex-conjugation certificates and circuits.

Three routes, tried in order:

``single``
    one Pauli ``V`` anti-commuting with the even-Y terms and commuting with the
    odd-Y terms; ``V U V = conj(U)``.
``split``
    a bipartition ``S0 | S1`` with ``S0`` inside the center of the support, a
    frame ``v0`` (commutes with ``S0``, anti-commutes with ``S1``), a frame
    ``v0_prime`` with the twisted Y-parity pattern, and a conjugation
    subcircuit for ``S0`` alone.  With subcircuit sandwich frames
    ``F_1 .. F_Q`` the program is the sandwich sequence
    ``v0 F_1, F_1, ..., v0 F_Q, F_Q, v0_prime`` (``2Q + 1`` queries).
``commuting``
    pairwise-commuting supports only: sandwiches over ``G T`` for every
    nonempty product ``T`` of an anti-commute cover, with ``G`` realising the
    transposition pattern.

Every certificate returned by :func:`build_conjugation_certificate` has been
checked numerically when the support fits the simulator.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .pauli import DEFAULT_MAX_QUBITS, PauliOperator, commutes, multiply, y_parity
from .program import CircuitProgram, Task, program_from_sandwiches, sandwich_frames
from .simulate import certify_program
from .support import (
    DEFAULT_SPLIT_CAP,
    CapExceededError,
    PauliSupport,
    central_indices,
    check_pairwise_commuting,
    enumerate_kernel_splits,
    find_anticommute_cover,
    find_single_query_conjugator,
    find_single_query_transposer,
    solve_commutation_pattern,
)
from .synth import CertificateError, synth_commuting_twisted, synth_single_query

__all__ = [
    "ConjugationCertificate",
    "build_conjugation_certificate",
    "commuting_conjugation_subcircuit",
    "synth_conjugate",
    "VALIDATION_SAMPLES",
    "VALIDATION_TOL",
]

VALIDATION_SAMPLES = 16
VALIDATION_TOL = 1e-9

SubcircuitProvider = Callable[[PauliSupport], "CircuitProgram | None"]


@dataclass(frozen=True)
class ConjugationCertificate:
    kind: str  # "single", "split" or "commuting"
    single_query_v: PauliOperator | None = None
    s0_indices: tuple[int, ...] = ()
    s1_indices: tuple[int, ...] = ()
    v0: PauliOperator | None = None
    v0_prime: PauliOperator | None = None
    s0_subcircuit: CircuitProgram | None = None
    min_fidelity: float | None = None  # from numeric validation, None if skipped

    @property
    def query_count(self) -> int:
        if self.kind == "single":
            return 1
        if self.kind == "commuting":
            return self.s0_subcircuit.query_count
        return 2 * self.s0_subcircuit.query_count + 1

    def violations(self, support: PauliSupport) -> list[str]:
        terms = support.terms
        out = []
        if self.kind == "single":
            v = self.single_query_v
            for t in terms:
                if commutes(v, t) != bool(y_parity(t)):
                    out.append(f"V {v} breaks the conjugation pattern on {t}")
            return out
        if self.s0_subcircuit is None:
            return ["missing S0 subcircuit"]
        if self.kind == "commuting":
            if not check_pairwise_commuting(support):
                out.append("commuting route needs a pairwise-commuting support")
            return out
        if self.kind != "split":
            return [f"unknown certificate kind {self.kind!r}"]
        s0, s1 = set(self.s0_indices), set(self.s1_indices)
        if s0 & s1 or s0 | s1 != set(range(len(support))) or not s1:
            out.append("S0 and S1 must partition the support with S1 nonempty")
        center = set(central_indices(support))
        for i in self.s0_indices:
            if i not in center:
                out.append(f"S0 term {terms[i]} does not commute with the whole support")
        for j, t in enumerate(terms):
            in_s0 = j in s0
            if commutes(self.v0, t) != in_s0:
                out.append(f"v0 {self.v0} has the wrong relation to {t}")
            # v0' anti-commutes with even-Y of S1 and odd-Y of S0
            want_anti = bool(y_parity(t)) == in_s0
            if commutes(self.v0_prime, t) == want_anti:
                out.append(f"v0' {self.v0_prime} has the wrong relation to {t}")
        return out


def commuting_conjugation_subcircuit(support: PauliSupport, cover_restarts: int = 8) -> CircuitProgram | None:
    """Conjugation circuit for a pairwise-commuting support, or ``None``.

    Needs a Pauli with the transposition pattern (anti-commuting with exactly
    the odd-Y terms) and an anti-commute cover.
    """
    if not check_pairwise_commuting(support):
        raise ValueError("support is not pairwise commuting")
    g = find_single_query_transposer(support)
    if g is None:
        return None
    cover = find_anticommute_cover(support, restarts=cover_restarts)
    return synth_commuting_twisted(cover, g, Task.CONJUGATE)


def _s0_subcircuit(sub: PauliSupport, provider: SubcircuitProvider | None) -> CircuitProgram | None:
    v = find_single_query_conjugator(sub)
    if v is not None:
        return synth_single_query(Task.CONJUGATE, v)
    prog = commuting_conjugation_subcircuit(sub)
    if prog is None and provider is not None:
        prog = provider(sub)
    return prog


def _relift(prog: CircuitProgram, n_qubits: int) -> CircuitProgram:
    if prog.n_qubits != n_qubits:
        raise CertificateError(f"subcircuit acts on {prog.n_qubits} qubits, support on {n_qubits}")
    return prog


def synth_conjugate(cert: ConjugationCertificate, support: PauliSupport | None = None) -> CircuitProgram:
    """Program realising ``conj(U)`` from a certificate."""
    if support is not None:
        problems = cert.violations(support)
        if problems:
            raise CertificateError("invalid conjugation certificate: " + "; ".join(problems))
    if cert.kind == "single":
        return synth_single_query(Task.CONJUGATE, cert.single_query_v)
    if cert.kind == "commuting":
        sub = cert.s0_subcircuit
        return CircuitProgram(Task.CONJUGATE, sub.n_qubits, sub.steps)
    if cert.kind != "split":
        raise CertificateError(f"unknown certificate kind {cert.kind!r}")
    n = cert.v0.n_qubits
    frames: list[PauliOperator] = []
    for f in sandwich_frames(_relift(cert.s0_subcircuit, n)):
        frames += [multiply(cert.v0, f).without_phase(), f]
    frames.append(cert.v0_prime)
    return program_from_sandwiches(Task.CONJUGATE, n, frames)


def _validate(cert: ConjugationCertificate, support: PauliSupport, max_qubits: int,
              seed: int) -> ConjugationCertificate:
    if support.n_qubits > max_qubits:
        return cert
    prog = synth_conjugate(cert)
    rep = certify_program(support, prog, Task.CONJUGATE, samples=VALIDATION_SAMPLES, seed=seed,
                          tol=VALIDATION_TOL, max_qubits=max_qubits)
    if not rep.passed:
        raise CertificateError(f"{cert.kind} conjugation certificate failed numeric validation "
                               f"(min fidelity {rep.min_fidelity:.12f})")
    return ConjugationCertificate(cert.kind, cert.single_query_v, cert.s0_indices, cert.s1_indices,
                                  cert.v0, cert.v0_prime, cert.s0_subcircuit, rep.min_fidelity)


def _split_candidates(support: PauliSupport, cap: int, provider: SubcircuitProvider | None):
    m = len(support)
    center = central_indices(support)
    if not center:
        return None
    best = None
    for s0 in enumerate_kernel_splits(support, allowed=center, cap=cap):
        if best is not None and len(s0) > len(best.s0_indices):
            break
        s0set = set(s0)
        s1 = tuple(j for j in range(m) if j not in s0set)
        v0 = solve_commutation_pattern(support, [0 if j in s0set else 1 for j in range(m)])
        pattern = [int(bool(y_parity(t)) == (j in s0set)) for j, t in enumerate(support.terms)]
        v0p = solve_commutation_pattern(support, pattern)
        if v0 is None or v0p is None:
            continue
        sub = _s0_subcircuit(support.subset(s0), provider)
        if sub is None:
            continue
        cert = ConjugationCertificate("split", None, s0, s1, v0, v0p, sub)
        if best is None or cert.query_count < best.query_count:
            best = cert
    return best


def build_conjugation_certificate(support: PauliSupport, cap: int = DEFAULT_SPLIT_CAP,
                                  subcircuit_provider: SubcircuitProvider | None = None,
                                  max_qubits: int = DEFAULT_MAX_QUBITS,
                                  seed: int = 0) -> ConjugationCertificate | None:
    """Find a conjugation certificate.

    A single query is used whenever possible; otherwise the cheaper of the
    split and commuting routes (the split route on ties).

    ``subcircuit_provider`` is consulted for an ``S0`` conjugation circuit when
    neither a single query nor the commuting construction applies to ``S0``;
    its circuit must act on the full qubit register.  Returns ``None`` when
    the search is exhausted.  Raises :class:`~paulinv.support.CapExceededError`
    when the split search is too large, and :class:`CertificateError` if a
    candidate fails numeric validation.
    """
    if len(support) == 0:
        raise ValueError("empty support")
    v = find_single_query_conjugator(support)
    if v is not None:
        return _validate(ConjugationCertificate("single", single_query_v=v), support, max_qubits, seed)
    commuting = check_pairwise_commuting(support)
    try:
        cert = _split_candidates(support, cap, subcircuit_provider)
    except CapExceededError:
        if not commuting:
            raise
        cert = None
    if cert is not None:
        problems = cert.violations(support)
        if problems:
            raise CertificateError("split search produced an invalid certificate: " + "; ".join(problems))
    if commuting:
        prog = commuting_conjugation_subcircuit(support)
        if prog is None and subcircuit_provider is not None:
            prog = subcircuit_provider(support)
        # the split construction wins ties
        if prog is not None and (cert is None or prog.query_count < cert.query_count):
            cert = ConjugationCertificate("commuting", s0_indices=tuple(range(len(support))),
                                          s0_subcircuit=prog)
    if cert is None:
        return None
    return _validate(cert, support, max_qubits, seed)
