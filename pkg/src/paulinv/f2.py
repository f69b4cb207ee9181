"""
Packed GF(2) linear algebra.

Rows are stored as ``uint64`` words (row-major, ``ceil(cols / 64)`` words per
row, column ``j`` is bit ``j % 64`` of word ``j // 64``).  Elimination is
vectorised over rows: each new pivot is XORed into every row that has a 1 in
the pivot column, which keeps all rows reduced against all pivots found so far.
Processing pivots in row order makes this equivalent to sequential elimination
in input order, so "incorporated" and "skipped" rows are the same as a
row-by-row sweep would give.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = ["BitMatrix", "F2Solution", "solve_affine", "solve_max_consistent", "F2DimensionError"]

_WORD = 64


class F2DimensionError(ValueError):
    pass


def _n_words(cols: int) -> int:
    return max(1, -(-cols // _WORD))


@dataclass(frozen=True)
class BitMatrix:
    """Dense GF(2) matrix with packed rows."""

    rows: int
    cols: int
    storage: np.ndarray = field(repr=False)

    def __post_init__(self):
        st = self.storage
        if st.dtype != np.uint64 or st.shape != (self.rows, _n_words(self.cols)):
            raise F2DimensionError(
                f"storage must be uint64 of shape {(self.rows, _n_words(self.cols))}")
        tail = self.cols % _WORD
        if self.rows and tail:
            if np.any(st[:, -1] >> np.uint64(tail)):
                raise F2DimensionError("bits beyond cols must be zero")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, np.zeros((rows, _n_words(cols)), dtype=np.uint64))

    @classmethod
    def from_dense(cls, a: Sequence[Sequence[int]] | np.ndarray, cols: int | None = None) -> BitMatrix:
        arr = np.asarray(a, dtype=np.uint8)
        if arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, cols or 0)
            else:
                raise F2DimensionError("expected a 2-D 0/1 array")
        rows, c = arr.shape
        words = _n_words(c)
        padded = np.zeros((rows, words * _WORD), dtype=np.uint8)
        padded[:, :c] = arr & 1
        # little-endian bit order inside each byte, bytes little-endian in words
        packed = np.packbits(padded, axis=1, bitorder="little")
        storage = packed.view("<u8").astype(np.uint64).reshape(rows, words)
        return cls(rows, c, storage)

    @classmethod
    def from_ints(cls, values: Iterable[int] | np.ndarray, cols: int) -> BitMatrix:
        """Rows given as integers (bit ``j`` = column ``j``); ``cols`` <= 64 only."""
        if cols > _WORD:
            raise F2DimensionError("from_ints supports at most 64 columns")
        arr = np.asarray(values if isinstance(values, np.ndarray) else list(values), dtype=np.uint64)
        arr = arr.reshape(-1, 1)
        if cols < _WORD and arr.size and np.any(arr >> np.uint64(cols)):
            raise F2DimensionError("row value exceeds column count")
        return cls(arr.shape[0], cols, arr.copy())

    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        as_bytes = self.storage.astype("<u8").view(np.uint8).reshape(self.rows, -1)
        bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
        return bits[:, : self.cols]

    def row_dot(self, v: Sequence[int] | np.ndarray) -> np.ndarray:
        """GF(2) products ``A @ v`` for every row, as a uint8 array."""
        packed = _pack_vector(v, self.cols)
        acc = np.bitwise_count(self.storage & packed[None, :]).sum(axis=1)
        return (acc & 1).astype(np.uint8)

    def __getitem__(self, idx) -> int:
        r, c = idx
        return int((self.storage[r, c // _WORD] >> np.uint64(c % _WORD)) & np.uint64(1))


def _pack_vector(v: Sequence[int] | np.ndarray, cols: int) -> np.ndarray:
    arr = np.asarray(v, dtype=np.uint8)
    if arr.shape != (cols,):
        raise F2DimensionError(f"vector length {arr.shape} does not match {cols} columns")
    return BitMatrix.from_dense(arr.reshape(1, cols)).storage[0]


@dataclass(frozen=True)
class F2Solution:
    """Assignment plus the rows it satisfies."""

    assignment: tuple[int, ...]
    satisfied_rows: frozenset[int]
    free_columns: frozenset[int]
    incorporated_rows: tuple[int, ...] = ()

    def as_int(self) -> int:
        return sum(b << j for j, b in enumerate(self.assignment))


def _lowest_set_column(row: np.ndarray) -> int:
    for w, word in enumerate(row):
        if word:
            word = int(word)
            return w * _WORD + ((word & -word).bit_length() - 1)
    return -1


def _eliminate(a: BitMatrix, b: Sequence[int] | np.ndarray, stop_on_conflict: bool):
    """Shared elimination sweep.

    Returns ``(pivots, conflict_rows)`` where ``pivots`` is a list of
    ``(column, row_index, reduced_row_words, rhs_bit)`` in creation order, and
    ``conflict_rows`` the rows found inconsistent with earlier rows.
    Returns ``None`` when ``stop_on_conflict`` and a conflict occurs.
    """
    rhs = np.asarray(b, dtype=np.uint8).reshape(-1)
    if rhs.shape[0] != a.rows:
        raise F2DimensionError(f"rhs length {rhs.shape[0]} != rows {a.rows}")
    work = a.storage.copy()
    rhs = rhs.copy() & 1
    active = np.ones(a.rows, dtype=bool)  # rows not yet settled
    pivots = []
    conflicts: list[int] = []
    nonzero = np.any(work != 0, axis=1)
    while True:
        cand = np.flatnonzero(active & nonzero)
        # rows before the next pivot are reduced to zero; settle them
        nxt = int(cand[0]) if cand.size else a.rows
        settled = np.flatnonzero(active[:nxt])
        if settled.size:
            bad = settled[rhs[settled] == 1]
            if bad.size:
                if stop_on_conflict:
                    return None
                conflicts.extend(int(r) for r in bad)
            active[settled] = False
        if nxt == a.rows:
            break
        prow = work[nxt].copy()
        pcol = _lowest_set_column(prow)
        pb = int(rhs[nxt])
        pivots.append((pcol, nxt, prow, pb))
        active[nxt] = False
        word, bit = divmod(pcol, _WORD)
        hit = ((work[:, word] >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        hit &= active
        if hit.any():
            work[hit] ^= prow
            rhs[hit] ^= pb
            nonzero[hit] = np.any(work[hit] != 0, axis=1)
    return pivots, conflicts


def _back_substitute(cols: int, pivots) -> tuple[np.ndarray, frozenset[int]]:
    x = np.zeros(_n_words(cols), dtype=np.uint64)
    for pcol, _, prow, pb in reversed(pivots):
        # pivot rows carry no earlier pivot columns; later ones are already set
        parity = int(np.bitwise_count(prow & x).sum()) & 1
        if parity ^ pb:
            word, bit = divmod(pcol, _WORD)
            x[word] |= np.uint64(1) << np.uint64(bit)
    pivot_cols = {p[0] for p in pivots}
    free = frozenset(c for c in range(cols) if c not in pivot_cols)
    return x, free


def _unpack(x: np.ndarray, cols: int) -> tuple[int, ...]:
    bits = np.unpackbits(x.astype("<u8").view(np.uint8), bitorder="little")
    return tuple(int(v) for v in bits[:cols])


def _satisfied(a: BitMatrix, x: np.ndarray, b: np.ndarray) -> frozenset[int]:
    if a.rows == 0:
        return frozenset()
    vals = (np.bitwise_count(a.storage & x[None, :]).sum(axis=1) & 1).astype(np.uint8)
    return frozenset(np.flatnonzero(vals == (np.asarray(b, dtype=np.uint8) & 1)).tolist())


def solve_affine(a: BitMatrix, b: Sequence[int] | np.ndarray) -> F2Solution | None:
    """Solve ``A v = b`` over GF(2).

    Returns ``None`` when the system is inconsistent.  Pivots are the lowest
    unpivoted column of each independent row (in input order); free columns are
    set to 0, so the answer is deterministic.
    """
    res = _eliminate(a, b, stop_on_conflict=True)
    if res is None:
        return None
    pivots, _ = res
    x, free = _back_substitute(a.cols, pivots)
    return F2Solution(
        assignment=_unpack(x, a.cols),
        satisfied_rows=frozenset(range(a.rows)),
        free_columns=free,
        incorporated_rows=tuple(range(a.rows)),
    )


def solve_max_consistent(a: BitMatrix, b: Sequence[int] | np.ndarray) -> F2Solution:
    """Greedy maximal consistent subsystem, rows taken in input order.

    A row is incorporated iff it is consistent with the rows incorporated
    before it.  ``satisfied_rows`` is recomputed from the final assignment, so
    it may include skipped rows that happen to hold.
    """
    pivots, conflicts = _eliminate(a, b, stop_on_conflict=False)
    x, free = _back_substitute(a.cols, pivots)
    skipped = set(conflicts)
    return F2Solution(
        assignment=_unpack(x, a.cols),
        satisfied_rows=_satisfied(a, x, np.asarray(b)),
        free_columns=free,
        incorporated_rows=tuple(r for r in range(a.rows) if r not in skipped),
    )
