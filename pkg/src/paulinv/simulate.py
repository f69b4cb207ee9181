"""
Dense-matrix ground truth for circuit programs.

Coefficients are drawn i.i.d. standard normal with evolution time fixed at 1.
Randomness uses numpy's PCG64 generator; sample ``k`` of a run with seed ``s``
draws from ``default_rng(s ^ k)``, so any subset of samples can be recomputed
independently and reports are bit-for-bit reproducible.
"""
from __future__ import annotations

import io
import csv
import logging
import math
import warnings
from dataclasses import dataclass, field, asdict
from typing import Iterable, Sequence

import numpy as np

from .pauli import DEFAULT_MAX_QUBITS, PauliOperator, signed_permutation
from .program import CircuitProgram, FrameGate, QuerySlot, Step, Task
from .support import PauliSupport

__all__ = [
    "SimulatorCapError",
    "HARD_MAX_QUBITS",
    "HamiltonianInstance",
    "NoisyInstance",
    "VerificationReport",
    "RobustnessRow",
    "RobustnessTable",
    "check_simulator_cap",
    "pauli_sum_matrix",
    "build_hamiltonian",
    "matrix_exponential",
    "evolution",
    "task_target",
    "apply_steps",
    "apply_program",
    "phase_invariant_fidelity",
    "sample_rng",
    "certify_program",
    "complement_support",
    "make_noisy_instance",
    "robustness_sweep",
    "infidelity_slope",
    "lcu_transpose_residual",
    "lcu_transpose_identity_check",
    "random_unitary",
]

log = logging.getLogger(__name__)

HARD_MAX_QUBITS = 10
COMPLEMENT_SAMPLE_FROM = 6
COMPLEMENT_SAMPLE_SIZE = 512


class SimulatorCapError(ValueError):
    pass


def check_simulator_cap(n_qubits: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> None:
    if max_qubits > HARD_MAX_QUBITS:
        raise SimulatorCapError(f"max_qubits={max_qubits} is above the hard limit {HARD_MAX_QUBITS}")
    if n_qubits > max_qubits:
        raise SimulatorCapError(
            f"{n_qubits} qubits exceeds the simulator cap of {max_qubits} (raise --max-qubits, at most {HARD_MAX_QUBITS})")
    if n_qubits > DEFAULT_MAX_QUBITS:
        warnings.warn(f"dense simulation of {n_qubits} qubits ({2 ** n_qubits}x{2 ** n_qubits} matrices) is slow",
                      RuntimeWarning, stacklevel=3)


# ---------------------------------------------------------------------------
# Hamiltonians


@dataclass(frozen=True)
class HamiltonianInstance:
    support: PauliSupport
    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if len(coeffs) != len(self.support):
            raise ValueError(f"{len(coeffs)} coefficients for {len(self.support)} terms")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)


class _PauliStack:
    """Signed-permutation form of a list of Pauli words, for fast weighted sums."""

    def __init__(self, terms: Sequence[PauliOperator], n_qubits: int):
        d = 1 << n_qubits
        self.d = d
        if terms:
            rows, vals = zip(*(signed_permutation(t) for t in terms))
            self.flat = (np.stack(rows) * d + np.arange(d)[None, :])  # (K, d)
            self.vals = np.stack(vals)
        else:
            self.flat = np.zeros((0, d), dtype=np.int64)
            self.vals = np.zeros((0, d), dtype=complex)

    def combine(self, coeffs: np.ndarray) -> np.ndarray:
        d = self.d
        if len(coeffs) == 0:
            return np.zeros((d, d), dtype=complex)
        w = np.asarray(coeffs, dtype=float)[:, None] * self.vals
        idx = self.flat.ravel()
        re = np.bincount(idx, weights=w.real.ravel(), minlength=d * d)
        im = np.bincount(idx, weights=w.imag.ravel(), minlength=d * d)
        return (re + 1j * im).reshape(d, d)


def pauli_sum_matrix(terms: Sequence[PauliOperator], coeffs: Sequence[float], n_qubits: int,
                     max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """Dense ``sum_j coeffs[j] * terms[j]``."""
    check_simulator_cap(n_qubits, max_qubits)
    if len(terms) != len(coeffs):
        raise ValueError("one coefficient per term is required")
    return _PauliStack(list(terms), n_qubits).combine(np.asarray(coeffs, dtype=float))


def build_hamiltonian(inst: HamiltonianInstance, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    h = pauli_sum_matrix(inst.support.terms, inst.coefficients, inst.support.n_qubits, max_qubits)
    # Pauli words are Hermitian; symmetrise away rounding
    return 0.5 * (h + h.conj().T)


def matrix_exponential(a: np.ndarray, degree: int = 18, theta: float = 0.5) -> np.ndarray:
    """``exp(a)`` by scaling and squaring with a truncated Taylor series.

    ``a`` is scaled by ``2**-s`` until its 1-norm is at most ``theta``; the
    degree-18 remainder is then below 1e-22 relative, and ``s`` squarings
    undo the scaling.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix_exponential needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    n = a.shape[0]
    eye = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a, 1) if n else 0.0
    s = max(0, math.ceil(math.log2(norm / theta))) if norm > theta else 0
    b = a / (2.0 ** s)
    out = eye.copy()
    for k in range(degree, 0, -1):
        out = eye + (b @ out) / k
    for _ in range(s):
        out = out @ out
    return out


def evolution(h: np.ndarray) -> np.ndarray:
    """``exp(-i H)``."""
    return matrix_exponential(-1j * h)


def task_target(u: np.ndarray, task: Task | str) -> np.ndarray:
    task = Task.parse(task)
    if task is Task.INVERT:
        return u.conj().T
    if task is Task.CONJUGATE:
        return u.conj()
    return u.T.copy()


# ---------------------------------------------------------------------------
# program application


def _apply_frame(p: PauliOperator, acc: np.ndarray) -> np.ndarray:
    rows, vals = signed_permutation(p)
    out = np.empty_like(acc)
    out[rows] = vals[:, None] * acc
    return out


def apply_steps(steps: Iterable[Step | PauliOperator], u: np.ndarray) -> np.ndarray:
    """Matrix of a raw step sequence (application order; merging not required)."""
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    acc = np.eye(d, dtype=complex)
    for s in steps:
        if isinstance(s, PauliOperator):
            s = FrameGate(s)
        if isinstance(s, QuerySlot):
            acc = u @ acc
        else:
            if (1 << s.pauli.n_qubits) != d:
                raise ValueError(f"frame on {s.pauli.n_qubits} qubits does not match dimension {d}")
            acc = _apply_frame(s.pauli, acc)
    return acc


def apply_program(prog: CircuitProgram, u: np.ndarray) -> np.ndarray:
    """Operator implemented by ``prog`` with ``u`` in every query slot."""
    u = np.asarray(u)
    if u.shape != (1 << prog.n_qubits,) * 2:
        raise ValueError(f"unitary of shape {u.shape} does not fit a {prog.n_qubits}-qubit program")
    return apply_steps(prog.steps, u)


def phase_invariant_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Choi-state overlap ``|Tr(A^dag B)|**2 / d**2`` of two unitary channels."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a.shape[0]
    overlap = np.vdot(a, b)  # sum conj(a) * b = Tr(A^dag B)
    return float(min(1.0, max(0.0, abs(overlap) ** 2 / d ** 2)))


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Per-sample generator: PCG64 seeded with ``seed XOR index``."""
    return np.random.default_rng((int(seed) ^ int(index)) & 0xFFFFFFFFFFFFFFFF)


# ---------------------------------------------------------------------------
# certification


@dataclass
class VerificationReport:
    task: str
    support_hash: str
    samples: int
    seed: int
    tol: float
    query_count: int
    min_fidelity: float
    mean_fidelity: float
    per_sample: list[float] = field(repr=False)
    verdict: str = "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self, include_samples: bool = False) -> dict:
        d = asdict(self)
        if not include_samples:
            d.pop("per_sample")
        return d

    def to_text(self) -> str:
        rows = [
            ("task", self.task),
            ("support_hash", self.support_hash),
            ("query_count", str(self.query_count)),
            ("samples", str(self.samples)),
            ("seed", str(self.seed)),
            ("tol", repr(self.tol)),
            ("min_fidelity", repr(self.min_fidelity)),
            ("mean_fidelity", repr(self.mean_fidelity)),
            ("verdict", self.verdict),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v}" for k, v in rows) + "\n"


def certify_program(support: PauliSupport, prog: CircuitProgram, task: Task | str | None = None,
                    samples: int = 100, seed: int = 0, tol: float = 1e-9,
                    max_qubits: int = DEFAULT_MAX_QUBITS) -> VerificationReport:
    """Check ``prog`` against the exact target on random coefficient draws.

    Passes iff the minimum Choi fidelity over all draws is at least ``1 - tol``.
    """
    task = Task.parse(task if task is not None else prog.task)
    if support.n_qubits != prog.n_qubits:
        raise ValueError(f"support has {support.n_qubits} qubits, program has {prog.n_qubits}")
    if samples < 1:
        raise ValueError("samples must be positive")
    check_simulator_cap(support.n_qubits, max_qubits)
    if prog.query_count == 0:
        raise ValueError("program has no query slots")
    stack = _PauliStack(list(support.terms), support.n_qubits)
    fids = []
    for k in range(samples):
        rng = sample_rng(seed, k)
        alpha = rng.standard_normal(len(support))
        h = stack.combine(alpha)
        u = evolution(0.5 * (h + h.conj().T))
        fids.append(phase_invariant_fidelity(task_target(u, task), apply_program(prog, u)))
    lo = min(fids)
    return VerificationReport(
        task=task.value,
        support_hash=support.digest(),
        samples=samples,
        seed=seed,
        tol=tol,
        query_count=prog.query_count,
        min_fidelity=lo,
        mean_fidelity=float(np.mean(fids)),
        per_sample=fids,
        verdict="pass" if lo >= 1.0 - tol else "fail",
    )


# ---------------------------------------------------------------------------
# robustness


def complement_support(support: PauliSupport) -> PauliSupport:
    """Every non-identity Pauli word not in ``support``."""
    n = support.n_qubits
    have = support.keys()
    mask = (1 << n) - 1
    terms = []
    for k in range(1, 4 ** n):
        key = (k & mask, k >> n)
        if key not in have:
            terms.append(PauliOperator(n, *key))
    return PauliSupport(n, tuple(terms))


@dataclass(frozen=True)
class NoisyInstance:
    """In-support Hamiltonian plus out-of-support noise of relative strength ``delta``.

    ``delta = sum |noise_coefficients| / sum |base coefficients|``.
    """

    base: HamiltonianInstance
    noise_support: PauliSupport
    noise_coefficients: tuple[float, ...]
    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if len(self.noise_coefficients) != len(self.noise_support):
            raise ValueError("one noise coefficient per noise term is required")
        overlap = self.noise_support.keys() & self.base.support.keys()
        if overlap:
            raise ValueError("noise terms must lie outside the support")
        base_mass = sum(abs(c) for c in self.base.coefficients)
        noise_mass = sum(abs(c) for c in self.noise_coefficients)
        ratio = noise_mass / base_mass if base_mass else 0.0
        if abs(ratio - self.delta) > 1e-12 * max(1.0, self.delta):
            raise ValueError(f"noise ratio {ratio} does not match delta {self.delta}")


def make_noisy_instance(base: HamiltonianInstance, noise_support: PauliSupport,
                        raw_noise: Sequence[float], delta: float) -> NoisyInstance:
    """Rescale ``raw_noise`` so its absolute mass is ``delta`` times the base mass."""
    raw = np.asarray(raw_noise, dtype=float)
    base_mass = float(np.abs(base.coefficients).sum())
    raw_mass = float(np.abs(raw).sum())
    scale = delta * base_mass / raw_mass if raw_mass > 0 else 0.0
    return NoisyInstance(base, noise_support, tuple(raw * scale), float(delta))


@dataclass(frozen=True)
class RobustnessRow:
    delta: float
    mean_fidelity: float
    min_fidelity: float
    std_fidelity: float


@dataclass
class RobustnessTable:
    task: str
    support_hash: str
    samples: int
    seed: int
    query_count: int
    rows: list[RobustnessRow]

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "support_hash": self.support_hash,
            "samples": self.samples,
            "seed": self.seed,
            "query_count": self.query_count,
            "table": [asdict(r) for r in self.rows],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delta", "mean_fidelity", "min_fidelity", "std_fidelity"])
        for r in self.rows:
            w.writerow([repr(r.delta), repr(r.mean_fidelity), repr(r.min_fidelity), repr(r.std_fidelity)])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"task={self.task} support_hash={self.support_hash} samples={self.samples} "
                 f"seed={self.seed} queries={self.query_count}",
                 f"{'delta':>10}  {'mean_fidelity':>16}  {'min_fidelity':>16}  {'std':>10}"]
        for r in self.rows:
            lines.append(f"{r.delta:>10.4g}  {r.mean_fidelity:>16.10f}  {r.min_fidelity:>16.10f}  {r.std_fidelity:>10.3g}")
        return "\n".join(lines) + "\n"

    def mean(self, delta: float) -> float:
        for r in self.rows:
            if r.delta == delta:
                return r.mean_fidelity
        raise KeyError(delta)


def robustness_sweep(support: PauliSupport, prog: CircuitProgram, deltas: Sequence[float],
                     samples: int = 1000, seed: int = 0,
                     max_qubits: int = DEFAULT_MAX_QUBITS) -> RobustnessTable:
    """Mean fidelity of ``prog`` when the true Hamiltonian leaks outside ``support``.

    Per draw, in-support coefficients ``alpha`` and out-of-support coefficients
    ``beta`` are standard normal; ``beta`` is rescaled so that
    ``sum|beta| = delta * sum|alpha|``.  The program runs on the noisy unitary
    and is compared with the task target of the noise-free ``exp(-i H_alpha)``.
    The same draws are reused for every ``delta``.  From 6 qubits on, each draw
    uses a uniformly random subset of 512 complement terms.
    """
    deltas = [float(d) for d in deltas]
    if not deltas:
        raise ValueError("at least one delta is required")
    if any(d < 0 or not math.isfinite(d) for d in deltas):
        raise ValueError("deltas must be finite and nonnegative")
    if support.n_qubits != prog.n_qubits:
        raise ValueError(f"support has {support.n_qubits} qubits, program has {prog.n_qubits}")
    check_simulator_cap(support.n_qubits, max_qubits)
    task = prog.task
    n = support.n_qubits
    comp = complement_support(support)
    sampled = n >= COMPLEMENT_SAMPLE_FROM and len(comp) > COMPLEMENT_SAMPLE_SIZE
    s_stack = _PauliStack(list(support.terms), n)
    c_stack = None if sampled else _PauliStack(list(comp.terms), n)
    fids = np.zeros((len(deltas), samples))
    for k in range(samples):
        rng = sample_rng(seed, k)
        alpha = rng.standard_normal(len(support))
        if sampled:
            pick = np.sort(rng.choice(len(comp), COMPLEMENT_SAMPLE_SIZE, replace=False))
            noise_terms = comp.subset(pick.tolist())
            stack = _PauliStack(list(noise_terms.terms), n)
        else:
            noise_terms, stack = comp, c_stack
        beta = rng.standard_normal(len(noise_terms))
        base = HamiltonianInstance(support, tuple(alpha))
        h_alpha = s_stack.combine(alpha)
        target = task_target(evolution(h_alpha), task)
        h_beta_unit = stack.combine(beta)
        for i, delta in enumerate(deltas):
            noisy = make_noisy_instance(base, noise_terms, beta, delta)
            scale = noisy.noise_coefficients[0] / beta[0] if beta[0] != 0 and delta else 0.0
            u = evolution(h_alpha + scale * h_beta_unit)
            fids[i, k] = phase_invariant_fidelity(target, apply_program(prog, u))
    rows = [RobustnessRow(d, float(fids[i].mean()), float(fids[i].min()), float(fids[i].std()))
            for i, d in enumerate(deltas)]
    return RobustnessTable(task.value, support.digest(), samples, seed, prog.query_count, rows)


def infidelity_slope(table: RobustnessTable, deltas: Sequence[float] | None = None) -> float:
    """Least-squares slope of ``log(1 - mean fidelity)`` against ``log(delta)``."""
    rows = [r for r in table.rows if r.delta > 0 and (deltas is None or r.delta in deltas)]
    if len(rows) < 2:
        raise ValueError("need at least two positive deltas")
    x = np.log([r.delta for r in rows])
    y = np.log([max(1.0 - r.mean_fidelity, 1e-300) for r in rows])
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------------------
# qubit transpose identity


_I2 = np.eye(2, dtype=complex)
_X2 = np.array([[0, 1], [1, 0]], dtype=complex)
_Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z2 = np.array([[1, 0], [0, -1]], dtype=complex)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph[None, :]


def lcu_transpose_residual(u: np.ndarray) -> float:
    """Max-norm of ``I U I + X U X - Y U Y + Z U Z - 2 U^T`` for a qubit unitary."""
    lhs = _I2 @ u @ _I2 + _X2 @ u @ _X2 - _Y2 @ u @ _Y2 + _Z2 @ u @ _Z2
    return float(np.max(np.abs(lhs - 2 * u.T)))


def lcu_transpose_identity_check(samples: int = 100, seed: int = 0, tol: float = 1e-10) -> bool:
    """True iff the qubit LCU transpose identity holds on ``samples`` random unitaries."""
    worst = 0.0
    for k in range(samples):
        worst = max(worst, lcu_transpose_residual(random_unitary(2, sample_rng(seed, k))))
    log.debug("lcu transpose identity: worst residual %.3g", worst)
    return worst < tol
