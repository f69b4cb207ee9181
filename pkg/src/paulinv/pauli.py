"""
Exact Pauli-word algebra on N qubits.

A Pauli word is stored as two integer bit masks plus a phase exponent::

    P = i**phase * sigma(x_0, z_0) (x) ... (x) sigma(x_{N-1}, z_{N-1})

with sigma(0, 0) = I, sigma(1, 0) = X, sigma(1, 1) = Y, sigma(0, 1) = Z.
Bit ``k`` of ``x`` (resp. ``z``) belongs to qubit ``k``.  Qubit 0 is the
leftmost tensor factor, so ``X0 Z2`` on three qubits is ``X (x) I (x) Z``.

The symplectic vector of a word is laid out as ``[x_0 .. x_{N-1} | z_0 .. z_{N-1}]``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

import numpy as np

__all__ = [
    "PauliError",
    "PauliParseError",
    "PauliOperator",
    "SymplecticVector",
    "parse_pauli",
    "to_symplectic",
    "from_symplectic",
    "multiply",
    "commutes",
    "y_parity",
    "dense_matrix",
    "all_paulis",
    "identity",
    "DEFAULT_MAX_QUBITS",
]

DEFAULT_MAX_QUBITS = 8

_TOKEN = re.compile(r"^([XYZ])(\d+)$")
_LETTER_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_LETTER = {(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}


class PauliError(ValueError):
    """Raised for invalid Pauli operations (qubit-count mismatch, size caps)."""


class PauliParseError(PauliError):
    """Raised when a Pauli token string cannot be parsed."""

    def __init__(self, message: str, token: str | None = None):
        super().__init__(message)
        self.token = token


@dataclass(frozen=True, slots=True)
class PauliOperator:
    """An N-qubit Pauli word ``i**phase_exp * word``.

    Attributes
    ----------
    n_qubits : int
        Number of qubits.
    x_bits, z_bits : int
        Bit masks; bit ``k`` set means the qubit-``k`` factor has an X (resp. Z)
        component.
    phase_exp : int
        Exponent of ``i`` modulo 4.
    """

    n_qubits: int
    x_bits: int
    z_bits: int
    phase_exp: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise PauliError(f"n_qubits must be positive, got {self.n_qubits}")
        mask = (1 << self.n_qubits) - 1
        if self.x_bits & ~mask or self.z_bits & ~mask or self.x_bits < 0 or self.z_bits < 0:
            raise PauliError("bit mask exceeds the qubit count")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @property
    def is_identity(self) -> bool:
        """True for the all-identity word (any phase)."""
        return self.x_bits == 0 and self.z_bits == 0

    @property
    def weight(self) -> int:
        return (self.x_bits | self.z_bits).bit_count()

    @property
    def key(self) -> tuple[int, int]:
        """Phase-free identity of the word, usable as a dict key."""
        return (self.x_bits, self.z_bits)

    def without_phase(self) -> PauliOperator:
        if self.phase_exp == 0:
            return self
        return PauliOperator(self.n_qubits, self.x_bits, self.z_bits, 0)

    def letter(self, qubit: int) -> str:
        bits = ((self.x_bits >> qubit) & 1, (self.z_bits >> qubit) & 1)
        return _BITS_LETTER.get(bits, "I")

    def to_label(self) -> str:
        """Dense label such as ``'XIZ'`` (qubit 0 first); the phase is dropped."""
        return "".join(self.letter(q) for q in range(self.n_qubits))

    def __str__(self) -> str:
        tokens = [f"{self.letter(q)}{q}" for q in range(self.n_qubits)
                  if self.letter(q) != "I"]
        text = " ".join(tokens) if tokens else "I"
        prefix = {0: "", 1: "i*", 2: "-", 3: "-i*"}[self.phase_exp]
        return prefix + text

    def __mul__(self, other: PauliOperator) -> PauliOperator:
        return multiply(self, other)


@dataclass(frozen=True, slots=True)
class SymplecticVector:
    """Bits ``[x_0 .. x_{N-1} | z_0 .. z_{N-1}]`` of a Pauli word."""

    n_qubits: int
    bits: tuple[int, ...]

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def as_int(self) -> int:
        """Pack as an integer with bit ``j`` equal to ``bits[j]``."""
        return sum(b << j for j, b in enumerate(self.bits))


def identity(n_qubits: int) -> PauliOperator:
    return PauliOperator(n_qubits, 0, 0)


def parse_pauli(text: str, n_qubits: int) -> PauliOperator:
    """Parse whitespace-separated ``<letter><index>`` tokens, e.g. ``"X0 Z2"``.

    The single token ``I`` denotes the identity.  Unmentioned qubits are identity
    and the returned operator has ``phase_exp = 0``.
    """
    tokens = text.split()
    if not tokens:
        raise PauliParseError("empty Pauli string", token="")
    if tokens == ["I"]:
        return identity(n_qubits)
    x = z = 0
    seen: set[int] = set()
    for tok in tokens:
        m = _TOKEN.match(tok)
        if m is None:
            raise PauliParseError(f"malformed Pauli token {tok!r}", token=tok)
        letter, idx = m.group(1), int(m.group(2))
        if idx >= n_qubits:
            raise PauliParseError(
                f"qubit index out of range in {tok!r} (n_qubits={n_qubits})", token=tok)
        if idx in seen:
            raise PauliParseError(f"duplicate qubit index in {tok!r}", token=tok)
        seen.add(idx)
        bx, bz = _LETTER_BITS[letter]
        x |= bx << idx
        z |= bz << idx
    return PauliOperator(n_qubits, x, z)


def to_symplectic(p: PauliOperator) -> SymplecticVector:
    n = p.n_qubits
    bits = tuple((p.x_bits >> k) & 1 for k in range(n)) + tuple((p.z_bits >> k) & 1 for k in range(n))
    return SymplecticVector(n, bits)


def from_symplectic(v: SymplecticVector | str, n_qubits: int | None = None) -> PauliOperator:
    """Inverse of :func:`to_symplectic`; also accepts a ``'1101'`` style string."""
    if isinstance(v, str):
        bits = tuple(int(c) for c in v)
        n = len(bits) // 2 if n_qubits is None else n_qubits
    else:
        bits, n = v.bits, v.n_qubits
    if len(bits) != 2 * n or any(b not in (0, 1) for b in bits):
        raise PauliError(f"expected {2 * n} bits, got {bits!r}")
    x = sum(bits[k] << k for k in range(n))
    z = sum(bits[n + k] << k for k in range(n))
    return PauliOperator(n, x, z)


def _check_same_size(p: PauliOperator, q: PauliOperator) -> None:
    if p.n_qubits != q.n_qubits:
        raise PauliError(f"qubit-count mismatch: {p.n_qubits} vs {q.n_qubits}")


def multiply(p: PauliOperator, q: PauliOperator) -> PauliOperator:
    """Exact product ``p @ q`` including the power of ``i``.

    Uses ``sigma(x, z) = i**(x z) X**x Z**z`` per qubit, and
    ``Z**z1 X**x2 = (-1)**(z1 x2) X**x2 Z**z1``.
    """
    _check_same_size(p, q)
    y_p = (p.x_bits & p.z_bits).bit_count()
    y_q = (q.x_bits & q.z_bits).bit_count()
    x = p.x_bits ^ q.x_bits
    z = p.z_bits ^ q.z_bits
    y_r = (x & z).bit_count()
    # X^a Z^b X^c Z^d = (-1)^{b.c} X^{a+c} Z^{b+d}; the (a+c),(b+d) here are
    # integer sums, and X^2 = Z^2 = I so only parity matters except for the sign.
    sign = (p.z_bits & q.x_bits).bit_count()
    phase = p.phase_exp + q.phase_exp + y_p + y_q - y_r + 2 * sign
    return PauliOperator(p.n_qubits, x, z, phase % 4)


def commutes(p: PauliOperator, q: PauliOperator) -> bool:
    """True iff the symplectic inner product of ``p`` and ``q`` vanishes."""
    _check_same_size(p, q)
    return ((p.x_bits & q.z_bits).bit_count() + (p.z_bits & q.x_bits).bit_count()) % 2 == 0


def y_parity(p: PauliOperator) -> int:
    """Parity (0 or 1) of the number of Y factors."""
    return (p.x_bits & p.z_bits).bit_count() & 1


def all_paulis(n_qubits: int, include_identity: bool = True) -> Iterator[PauliOperator]:
    """Every phase-free Pauli word, ordered by packed index ``x | z << n``."""
    start = 0 if include_identity else 1
    mask = (1 << n_qubits) - 1
    for k in range(start, 4 ** n_qubits):
        yield PauliOperator(n_qubits, k & mask, k >> n_qubits)


def _check_cap(n_qubits: int, max_qubits: int) -> None:
    if n_qubits > max_qubits:
        raise PauliError(
            f"{n_qubits} qubits exceeds the dense-matrix cap of {max_qubits}")


def _basis_bits(n_qubits: int, mask: int) -> np.ndarray:
    """Map a qubit mask to the matching mask over computational-basis indices.

    Qubit ``k`` is tensor factor ``k`` from the left, i.e. bit ``n-1-k`` of the
    basis index.
    """
    out = 0
    for k in range(n_qubits):
        if (mask >> k) & 1:
            out |= 1 << (n_qubits - 1 - k)
    return out


def signed_permutation(p: PauliOperator) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(rows, values)`` with ``P[rows[b], b] = values[b]``.

    Every Pauli matrix has exactly one nonzero entry per column.
    """
    n = p.n_qubits
    d = 1 << n
    cols = np.arange(d, dtype=np.int64)
    xm = _basis_bits(n, p.x_bits)
    zm = _basis_bits(n, p.z_bits)
    rows = cols ^ xm
    signs = np.bitwise_count(cols & zm).astype(np.int64) & 1
    n_y = (p.x_bits & p.z_bits).bit_count()
    phase = (1j) ** ((p.phase_exp + n_y) % 4)
    values = phase * (1 - 2 * signs)
    return rows, values.astype(complex)


def dense_matrix(p: PauliOperator, max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """Exact ``2**N x 2**N`` matrix of ``p`` including ``i**phase_exp``."""
    _check_cap(p.n_qubits, max_qubits)
    d = 1 << p.n_qubits
    rows, values = signed_permutation(p)
    m = np.zeros((d, d), dtype=complex)
    m[rows, np.arange(d)] = values
    return m
