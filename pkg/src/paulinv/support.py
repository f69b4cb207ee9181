"""
Pauli supports and the combinatorial certificates built on them.

Everything here works on the symplectic bits only; numeric checks live in
:mod:`paulinv.simulate`.
"""
from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .f2 import BitMatrix, solve_affine, solve_max_consistent
from .pauli import (
    PauliError,
    PauliOperator,
    PauliParseError,
    commutes,
    parse_pauli,
    y_parity,
)

__all__ = [
    "PauliSupport",
    "SupportFormatError",
    "CapExceededError",
    "AntiCommuteCover",
    "SplitCertificate",
    "parse_support",
    "load_support",
    "render_support",
    "build_constraint_rows",
    "solve_commutation_pattern",
    "find_single_query_inverter",
    "find_single_query_conjugator",
    "find_single_query_transposer",
    "odd_identity_subset_exists",
    "find_identity_subset_witness",
    "find_anticommute_cover",
    "check_pairwise_commuting",
    "central_indices",
    "enumerate_kernel_splits",
    "find_split_certificate",
    "DEFAULT_SPLIT_CAP",
    "DEFAULT_ORACLE_CAP",
]

DEFAULT_SPLIT_CAP = 20
DEFAULT_ORACLE_CAP = 24


class SupportFormatError(ValueError):
    """Support file could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


class CapExceededError(RuntimeError):
    """An exhaustive search was refused because its size exceeds the cap.

    Distinct from "nothing found": the answer is unknown, not negative.
    """


@dataclass(frozen=True)
class PauliSupport:
    """Ordered, deduplicated set of non-identity Pauli words on ``n_qubits``."""

    n_qubits: int
    terms: tuple[PauliOperator, ...]

    def __post_init__(self):
        seen = set()
        clean = []
        for t in self.terms:
            if t.n_qubits != self.n_qubits:
                raise PauliError(
                    f"term {t} has {t.n_qubits} qubits, support has {self.n_qubits}")
            if t.is_identity:
                raise PauliError("identity terms are not allowed in a support")
            if t.key in seen:
                continue
            seen.add(t.key)
            clean.append(t.without_phase())
        object.__setattr__(self, "terms", tuple(clean))

    @classmethod
    def from_terms(cls, terms: Iterable[PauliOperator | str], n_qubits: int | None = None,
                   drop_identity: bool = False) -> PauliSupport:
        """Build from operators or token strings; ``n_qubits`` inferred if omitted."""
        terms = list(terms)
        if n_qubits is None:
            n_qubits = _infer_qubits(terms)
        ops = [parse_pauli(t, n_qubits) if isinstance(t, str) else t for t in terms]
        if drop_identity:
            ops = [p for p in ops if not p.is_identity]
        return cls(n_qubits, tuple(ops))

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __getitem__(self, i):
        return self.terms[i]

    def subset(self, indices: Iterable[int]) -> PauliSupport:
        return PauliSupport(self.n_qubits, tuple(self.terms[i] for i in indices))

    def x_array(self) -> np.ndarray:
        return np.fromiter((t.x_bits for t in self.terms), dtype=np.uint64, count=len(self.terms))

    def z_array(self) -> np.ndarray:
        return np.fromiter((t.z_bits for t in self.terms), dtype=np.uint64, count=len(self.terms))

    def keys(self) -> set[tuple[int, int]]:
        return {t.key for t in self.terms}

    def digest(self) -> str:
        """Short stable hash of the canonical text form."""
        return hashlib.sha256(render_support(self).encode()).hexdigest()[:16]

    def __str__(self) -> str:
        return "{" + ", ".join(str(t) for t in self.terms) + "}"


def _infer_qubits(terms: Sequence[PauliOperator | str]) -> int:
    n = 1
    for t in terms:
        if isinstance(t, PauliOperator):
            n = max(n, t.n_qubits)
            continue
        for tok in t.split():
            if tok == "I":
                continue
            digits = tok[1:]
            if not digits.isdigit():
                raise PauliParseError(f"malformed Pauli token {tok!r}", token=tok)
            n = max(n, int(digits) + 1)
    return n


# ---------------------------------------------------------------------------
# file format


def parse_support(text: str) -> PauliSupport:
    """Parse the support file format.

    One Pauli term per line in token grammar; ``#`` starts a comment; blank
    lines are ignored; an optional ``qubits: <n>`` header fixes the qubit count
    (otherwise ``1 + max index``).  Identity lines are rejected.
    """
    n_qubits = None
    entries: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("qubits:"):
            if entries or n_qubits is not None:
                raise SupportFormatError("'qubits:' header must come first", lineno)
            value = line.split(":", 1)[1].strip()
            if not value.isdigit() or int(value) < 1:
                raise SupportFormatError(f"invalid qubit count {value!r}", lineno)
            n_qubits = int(value)
            continue
        entries.append((lineno, line))
    if not entries:
        raise SupportFormatError("support file contains no Pauli terms")
    if n_qubits is None:
        try:
            n_qubits = _infer_qubits([e[1] for e in entries])
        except PauliParseError as exc:
            line = next(ln for ln, t in entries if exc.token in t.split())
            raise SupportFormatError(str(exc), line) from exc
    ops = []
    for lineno, line in entries:
        try:
            op = parse_pauli(line, n_qubits)
        except PauliParseError as exc:
            raise SupportFormatError(str(exc), lineno) from exc
        if op.is_identity:
            raise SupportFormatError("identity term is not part of a Pauli support", lineno)
        ops.append(op)
    return PauliSupport(n_qubits, tuple(ops))


def load_support(path: str | Path) -> PauliSupport:
    return parse_support(Path(path).read_text(encoding="utf-8"))


def render_support(support: PauliSupport) -> str:
    lines = [f"qubits: {support.n_qubits}"]
    lines += [str(t) for t in support.terms]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# linear systems


def _swapped_rows(support: PauliSupport) -> np.ndarray:
    n = support.n_qubits
    return support.z_array() | (support.x_array() << np.uint64(n))


def build_constraint_rows(support: PauliSupport) -> BitMatrix:
    """Constraint matrix whose row ``j`` is term ``j`` as ``[z | x]``.

    The ordinary GF(2) dot product of row ``j`` with a candidate ``[x | z]``
    is the symplectic pairing, i.e. 1 iff the candidate anti-commutes with
    term ``j``.
    """
    n = support.n_qubits
    cols = 2 * n
    if cols <= 64:
        return BitMatrix.from_ints(_swapped_rows(support), cols)
    dense = np.zeros((len(support), cols), dtype=np.uint8)
    for j, t in enumerate(support.terms):
        for k in range(n):
            dense[j, k] = (t.z_bits >> k) & 1
            dense[j, n + k] = (t.x_bits >> k) & 1
    return BitMatrix.from_dense(dense, cols)


def _assignment_to_pauli(assignment: Sequence[int], n: int) -> PauliOperator:
    x = sum(assignment[k] << k for k in range(n))
    z = sum(assignment[n + k] << k for k in range(n))
    return PauliOperator(n, x, z)


def solve_commutation_pattern(support: PauliSupport, anti: Sequence[int]) -> PauliOperator | None:
    """Pauli word ``V`` with ``V`` anti-commuting with term ``j`` iff ``anti[j]``.

    Returns ``None`` when no Pauli word realises the pattern.
    """
    if len(anti) != len(support):
        raise ValueError("pattern length must match the support size")
    sol = solve_affine(build_constraint_rows(support), np.asarray(anti, dtype=np.uint8))
    if sol is None:
        return None
    return _assignment_to_pauli(sol.assignment, support.n_qubits)


def find_single_query_inverter(support: PauliSupport) -> PauliOperator | None:
    """A Pauli anti-commuting with every term, or ``None``."""
    return solve_commutation_pattern(support, [1] * len(support))


def conjugation_pattern(support: PauliSupport) -> list[int]:
    """Anti-commute with even-Y terms, commute with odd-Y terms."""
    return [1 - y_parity(t) for t in support.terms]


def transposition_pattern(support: PauliSupport) -> list[int]:
    """Anti-commute with odd-Y terms, commute with even-Y terms."""
    return [y_parity(t) for t in support.terms]


def find_single_query_conjugator(support: PauliSupport) -> PauliOperator | None:
    """Pauli ``V`` with ``V U V = conj(U)`` for every coefficient choice, or ``None``."""
    return solve_commutation_pattern(support, conjugation_pattern(support))


def find_single_query_transposer(support: PauliSupport) -> PauliOperator | None:
    """Pauli ``V`` with ``V U V = U.T`` for every coefficient choice, or ``None``."""
    return solve_commutation_pattern(support, transposition_pattern(support))


# ---------------------------------------------------------------------------
# brute-force oracles


def _subset_products(support: PauliSupport) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic XOR of every subset, indexed by subset bit mask, and sizes."""
    n = support.n_qubits
    packed = [t.x_bits | (t.z_bits << n) for t in support.terms]
    if 2 * n > 64:
        prods = np.zeros(1, dtype=object)
        for v in packed:
            prods = np.concatenate([prods, prods ^ v])
    else:
        prods = np.zeros(1, dtype=np.uint64)
        for v in packed:
            prods = np.concatenate([prods, prods ^ np.uint64(v)])
    sizes = np.bitwise_count(np.arange(1 << len(packed), dtype=np.uint64))
    return prods, sizes


def find_identity_subset_witness(support: PauliSupport, weights: Sequence[int] | None = None,
                                 cap: int = DEFAULT_ORACLE_CAP) -> tuple[int, ...] | None:
    """Smallest-mask subset whose product is proportional to I and whose total
    weight is odd.

    With ``weights`` all ones this is the odd-cardinality test; weights of
    ``1 - y_parity`` give the single-query conjugation test (an odd number of
    even-Y members), ``y_parity`` the transposition test.
    """
    m = len(support)
    if m > cap:
        raise CapExceededError(f"subset enumeration over {m} terms exceeds cap {cap}")
    if weights is None:
        weights = [1] * m
    prods, _ = _subset_products(support)
    wmask = sum(1 << j for j, w in enumerate(weights) if w & 1)
    wpar = np.bitwise_count(np.arange(1 << m, dtype=np.uint64) & np.uint64(wmask)) & 1
    hits = np.flatnonzero((prods == 0) & (wpar == 1))
    if hits.size == 0:
        return None
    mask = int(hits[0])
    return tuple(j for j in range(m) if (mask >> j) & 1)


def odd_identity_subset_exists(support: PauliSupport, cap: int = DEFAULT_ORACLE_CAP) -> bool:
    """Brute force: does an odd-size subset multiply to a multiple of I?"""
    return find_identity_subset_witness(support, cap=cap) is not None


# ---------------------------------------------------------------------------
# anti-commute covers


@dataclass(frozen=True)
class AntiCommuteCover:
    """Pauli words ``W`` such that every support term anti-commutes with one of them.

    ``covered_by[j]`` is the index into ``elements`` assigned to term ``j``.
    """

    elements: tuple[PauliOperator, ...]
    covered_by: dict[int, int] = field(hash=False)

    def __len__(self) -> int:
        return len(self.elements)

    def is_valid_for(self, support: PauliSupport) -> bool:
        if set(self.covered_by) != set(range(len(support))):
            return False
        return all(not commutes(support[j], self.elements[e])
                   for j, e in self.covered_by.items())


def _anti_matrix(rows: np.ndarray, cands: np.ndarray) -> np.ndarray:
    """``out[i, k]`` = 1 iff candidate ``k`` anti-commutes with row ``i``."""
    return (np.bitwise_count(rows[:, None] & cands[None, :]) & 1).astype(bool)


_EXHAUSTIVE_BUDGET = 4_000_000


def _best_cover_element(support: PauliSupport, remaining: list[int], restarts: int,
                        rng: np.random.Generator) -> PauliOperator:
    """Pauli covering as many of ``remaining`` as the strategy can find."""
    n = support.n_qubits
    sub = support.subset(remaining)
    rows = build_constraint_rows(sub)
    ones = np.ones(len(remaining), dtype=np.uint8)
    sol = solve_max_consistent(rows, ones)
    best = _assignment_to_pauli(sol.assignment, n)
    best_count = len(sol.satisfied_rows)
    if best_count == len(remaining):
        return best
    if 2 * n <= 63 and (4 ** n) * len(remaining) <= _EXHAUSTIVE_BUDGET:
        swapped = _swapped_rows(sub)
        cands = np.arange(1, 4 ** n, dtype=np.uint64)
        counts = _anti_matrix(swapped, cands).sum(axis=0)
        k = int(np.argmax(counts))
        if counts[k] > best_count:
            c = int(cands[k])
            # candidate bits are [x | z]
            best = PauliOperator(n, c & ((1 << n) - 1), c >> n)
        return best
    for _ in range(restarts):
        order = rng.permutation(len(remaining))
        sol = solve_max_consistent(BitMatrix(rows.rows, rows.cols, rows.storage[order]), ones)
        if len(sol.satisfied_rows) > best_count:
            best_count = len(sol.satisfied_rows)
            best = _assignment_to_pauli(sol.assignment, n)
    return best


def find_anticommute_cover(support: PauliSupport, restarts: int = 8, seed: int = 0) -> AntiCommuteCover:
    """Greedy anti-commute cover.

    Each pass picks a Pauli anti-commuting with as many uncovered terms as it
    can find, then repeats on the rest.  The candidate from the greedy
    max-consistent solve (rows in input order) is always considered; for small
    qubit counts every Pauli word is scored exactly, otherwise ``restarts``
    seeded row orders are tried.  Not guaranteed minimal.
    """
    if len(support) == 0:
        raise ValueError("cannot cover an empty support")
    rng = np.random.default_rng(seed)
    remaining = list(range(len(support)))
    elements: list[PauliOperator] = []
    covered_by: dict[int, int] = {}
    while remaining:
        v = _best_cover_element(support, remaining, restarts, rng)
        hit = [j for j in remaining if not commutes(support[j], v)]
        if not hit:  # cannot happen for a non-identity term, kept as a guard
            raise AssertionError("cover pass made no progress")
        for j in hit:
            covered_by[j] = len(elements)
        elements.append(v)
        remaining = [j for j in remaining if j not in covered_by]
    return AntiCommuteCover(tuple(elements), covered_by)


def check_pairwise_commuting(support: PauliSupport) -> bool:
    terms = support.terms
    return all(commutes(terms[i], terms[j])
               for i in range(len(terms)) for j in range(i + 1, len(terms)))


def central_indices(support: PauliSupport) -> list[int]:
    """Indices of terms commuting with every other term of the support."""
    terms = support.terms
    return [i for i, t in enumerate(terms)
            if all(commutes(t, u) for u in terms)]


# ---------------------------------------------------------------------------
# split certificates


@dataclass(frozen=True)
class SplitCertificate:
    """A bipartition ``S0 | S1`` with a base frame ``v0`` and a cover of ``S0``.

    Inversion uses ``2**(len(w) + 1) - 1`` queries.
    """

    s0_indices: tuple[int, ...]
    s1_indices: tuple[int, ...]
    v0: PauliOperator
    w: AntiCommuteCover

    @property
    def query_count(self) -> int:
        return 2 ** (len(self.w) + 1) - 1

    def violations(self, support: PauliSupport) -> list[str]:
        """Human-readable list of broken invariants (empty when valid)."""
        out = []
        s0, s1 = set(self.s0_indices), set(self.s1_indices)
        if s0 & s1 or s0 | s1 != set(range(len(support))):
            out.append("S0 and S1 must partition the support")
        terms = support.terms
        for i in self.s0_indices:
            for j in self.s0_indices:
                if i < j and not commutes(terms[i], terms[j]):
                    out.append(f"S0 terms {terms[i]} and {terms[j]} anti-commute")
            for j in self.s1_indices:
                if not commutes(terms[i], terms[j]):
                    out.append(f"S0 term {terms[i]} anti-commutes with S1 term {terms[j]}")
            if not commutes(terms[i], self.v0):
                out.append(f"v0 anti-commutes with S0 term {terms[i]}")
        for j in self.s1_indices:
            if commutes(terms[j], self.v0):
                out.append(f"v0 commutes with S1 term {terms[j]}")
        sub = support.subset(self.s0_indices)
        if self.s0_indices and not self.w.is_valid_for(sub):
            out.append("w is not a valid anti-commute cover of S0")
        return out

    def is_valid_for(self, support: PauliSupport) -> bool:
        return not self.violations(support)


def _basis_coordinates(support: PauliSupport) -> tuple[list[int], np.ndarray]:
    """Express every term over a basis drawn from the support itself.

    Returns ``(basis, coords)`` with ``coords[j]`` the bit mask over ``basis``
    whose XOR reproduces term ``j``.
    """
    n = support.n_qubits
    basis: list[int] = []
    reduced: list[tuple[int, int, int]] = []  # (pivot bit, vector, combination mask)
    coords = np.zeros(len(support), dtype=np.uint64)
    for j, t in enumerate(support.terms):
        v, comb = t.x_bits | (t.z_bits << n), 0
        for pbit, pv, pcomb in reduced:
            if (v >> pbit) & 1:
                v ^= pv
                comb ^= pcomb
        if v:
            k = len(basis)
            basis.append(j)
            comb ^= 1 << k
            reduced.append(((v & -v).bit_length() - 1, v, comb))
            coords[j] = np.uint64(1 << k)
        else:
            coords[j] = np.uint64(comb)
    return basis, coords


def enumerate_kernel_splits(support: PauliSupport, allowed: Sequence[int] | None = None,
                            cap: int = DEFAULT_SPLIT_CAP) -> list[tuple[int, ...]]:
    """All proper nonempty ``S0`` for which some Pauli commutes with ``S0`` and
    anti-commutes with the rest.

    Such an ``S0`` is exactly the zero set of a linear functional on the span
    of the support, so the search runs over the ``2**rank`` functionals rather
    than over ``2**M`` subsets.  ``allowed`` restricts ``S0`` to a subset of
    indices.  Results are sorted by size, then lexicographically.
    """
    basis, coords = _basis_coordinates(support)
    rank = len(basis)
    if rank > cap:
        raise CapExceededError(f"split search over rank {rank} exceeds cap {cap}")
    m = len(support)
    allowed_mask = np.zeros(m, dtype=bool)
    allowed_mask[list(range(m)) if allowed is None else list(allowed)] = True
    found: set[tuple[int, ...]] = set()
    chunk = 1 << 14
    for start in range(1, 1 << rank, chunk):
        g = np.arange(start, min(start + chunk, 1 << rank), dtype=np.uint64)
        zero = (np.bitwise_count(coords[:, None] & g[None, :]) & 1) == 0  # (m, k)
        nonempty = zero.any(axis=0)
        proper = ~zero.all(axis=0)
        inside = ~(zero & ~allowed_mask[:, None]).any(axis=0)
        for k in np.flatnonzero(nonempty & proper & inside):
            found.add(tuple(np.flatnonzero(zero[:, k]).tolist()))
    return sorted(found, key=lambda s: (len(s), s))


def find_split_certificate(support: PauliSupport, cap: int = DEFAULT_SPLIT_CAP,
                           cover_restarts: int = 8) -> SplitCertificate | None:
    """Search bipartitions ``S0 | S1`` admitting the split inversion circuit.

    ``S0`` must consist of terms commuting with the whole support, ``v0`` must
    commute with ``S0`` and anti-commute with ``S1``, and ``S0`` gets a greedy
    anti-commute cover.  Candidates are visited by increasing ``|S0|`` then
    lexicographically; at the first size with any certificate the one with the
    smallest cover wins (earliest on ties).

    Pairwise-commuting supports return ``None``: the plain cover circuit is
    never worse for them.  Raises :class:`CapExceededError` when the search
    dimension (the rank of the support) exceeds ``cap``.
    """
    if len(support) == 0 or check_pairwise_commuting(support):
        return None
    center = central_indices(support)
    if not center:
        return None
    best: SplitCertificate | None = None
    for s0 in enumerate_kernel_splits(support, allowed=center, cap=cap):
        if best is not None and len(s0) > len(best.s0_indices):
            break
        s0set = set(s0)
        s1 = tuple(j for j in range(len(support)) if j not in s0set)
        v0 = solve_commutation_pattern(support, [0 if j in s0set else 1 for j in range(len(support))])
        if v0 is None:  # excluded by construction
            continue
        w = find_anticommute_cover(support.subset(s0), restarts=cover_restarts)
        cert = SplitCertificate(s0, s1, v0, w)
        if best is None or len(cert.w) < len(best.w):
            best = cert
    if best is not None:
        problems = best.violations(support)
        if problems:
            raise AssertionError("split search produced an invalid certificate: " + "; ".join(problems))
    return best


def iter_subsets(m: int, max_size: int | None = None):
    """Index subsets by size then lexicographically (used by tests as a reference order)."""
    top = m if max_size is None else max_size
    for k in range(1, top + 1):
        yield from itertools.combinations(range(m), k)
