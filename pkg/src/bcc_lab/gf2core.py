"""Bit-packed linear algebra over GF(2).

Vectors and matrices are immutable after construction and use 1-based
public indexing (positions 1..len, entries (i, j) with i in [rows]).
Internally bits live in numpy uint8 arrays; rank runs on uint64-packed
words through the kernels in :mod:`bcc_lab._kernels`.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import DimensionError

__all__ = [
    "BitVector",
    "BitMatrix",
    "dot",
    "vec_mat_mul",
    "rank",
    "is_full_rank",
    "full_rank_probability",
    "rank_defect_probability_limit",
    "random_bitmatrix",
    "random_bitvector",
    "matrix_to_text",
    "matrix_from_text",
]


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class BitVector:
    """Immutable 0/1 vector; index 1..len."""

    __slots__ = ("_bits", "_int")

    def __init__(self, bits) -> None:
        arr = np.ascontiguousarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise DimensionError(f"expected 1-d bit sequence, got shape {arr.shape}")
        if arr.size and arr.max() > 1:
            raise ValueError("bit values must be 0 or 1")
        self._bits = _freeze(arr)
        self._int: int | None = None

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BitVector":
        v = cls.__new__(cls)
        v._bits = _freeze(np.ascontiguousarray(arr, dtype=np.uint8))
        v._int = None
        return v

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls._wrap(np.zeros(n, dtype=np.uint8))

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitVector":
        """Bit i (1-based) is bit i-1 of ``value``."""
        bits = np.array([(value >> j) & 1 for j in range(length)], dtype=np.uint8)
        return cls._wrap(bits)

    @classmethod
    def from01(cls, text: str) -> "BitVector":
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    def __len__(self) -> int:
        return self._bits.size

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= self._bits.size:
            raise IndexError(f"index {i} out of range 1..{self._bits.size}")
        return int(self._bits[i - 1])

    @property
    def as_int(self) -> int:
        if self._int is None:
            val = 0
            for j, b in enumerate(self._bits):
                if b:
                    val |= 1 << j
            self._int = val
        return self._int

    def asarray(self) -> np.ndarray:
        return self._bits

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self._bits)

    def key(self) -> bytes:
        """Canonical outcome key: ASCII '0'/'1' left to right."""
        return (self._bits + ord("0")).tobytes()

    def concat(self, other: "BitVector") -> "BitVector":
        return BitVector._wrap(np.concatenate([self._bits, other._bits]))

    def xor(self, other: "BitVector") -> "BitVector":
        if len(other) != len(self):
            raise DimensionError("xor requires equal lengths")
        return BitVector._wrap(self._bits ^ other._bits)

    def slice(self, start: int, stop: int) -> "BitVector":
        """Bits start..stop inclusive, 1-based."""
        if not (1 <= start and stop <= len(self) and start <= stop + 1):
            raise IndexError(f"slice {start}..{stop} out of range 1..{len(self)}")
        return BitVector._wrap(self._bits[start - 1 : stop])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVector)
            and self._bits.size == other._bits.size
            and bool(np.array_equal(self._bits, other._bits))
        )

    def __hash__(self) -> int:
        return hash((self._bits.size, self._bits.tobytes()))

    def __repr__(self) -> str:
        return f"BitVector({self.to01()!r})"


class BitMatrix:
    """Immutable 0/1 matrix; entry (i, j) with i in [rows], j in [cols]."""

    __slots__ = ("_data", "_words")

    def __init__(self, data) -> None:
        arr = np.ascontiguousarray(data, dtype=np.uint8)
        if arr.ndim != 2:
            raise DimensionError(f"expected 2-d bit array, got shape {arr.shape}")
        if arr.size and arr.max() > 1:
            raise ValueError("bit values must be 0 or 1")
        self._data = _freeze(arr)
        self._words: np.ndarray | None = None

    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BitMatrix":
        m = cls.__new__(cls)
        m._data = _freeze(np.ascontiguousarray(arr, dtype=np.uint8))
        m._words = None
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls._wrap(np.zeros((rows, cols), dtype=np.uint8))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls._wrap(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_rows(cls, rows: list[BitVector]) -> "BitMatrix":
        if not rows:
            return cls.zeros(0, 0)
        if len({len(r) for r in rows}) != 1:
            raise DimensionError("rows must share one length")
        return cls._wrap(np.stack([r.asarray() for r in rows]))

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    def entry(self, i: int, j: int) -> int:
        if not (1 <= i <= self.rows and 1 <= j <= self.cols):
            raise IndexError(f"entry ({i},{j}) out of range")
        return int(self._data[i - 1, j - 1])

    def row(self, i: int) -> BitVector:
        if not 1 <= i <= self.rows:
            raise IndexError(f"row {i} out of range 1..{self.rows}")
        return BitVector._wrap(self._data[i - 1])

    def column(self, j: int) -> BitVector:
        if not 1 <= j <= self.cols:
            raise IndexError(f"column {j} out of range 1..{self.cols}")
        return BitVector._wrap(self._data[:, j - 1])

    def asarray(self) -> np.ndarray:
        return self._data

    def packed(self) -> np.ndarray:
        if self._words is None:
            if self.rows == 0 or self.cols == 0:
                self._words = np.zeros((self.rows, 1), dtype=np.uint64)
            else:
                self._words = _kernels.pack_rows(self._data)
        return self._words

    def key(self) -> bytes:
        """Canonical outcome key: row-major ASCII '0'/'1'."""
        return (self._data.reshape(-1) + ord("0")).tobytes()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self._data.shape == other._data.shape
            and bool(np.array_equal(self._data, other._data))
        )

    def __hash__(self) -> int:
        return hash((self._data.shape, self._data.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def dot(a: BitVector, b: BitVector) -> int:
    """Mod-2 inner product."""
    if len(a) != len(b):
        raise DimensionError(f"dot: lengths {len(a)} and {len(b)} differ")
    return (a.as_int & b.as_int).bit_count() & 1


def vec_mat_mul(x: BitVector, m: BitMatrix) -> BitVector:
    """x^T M over GF(2); component j is dot(x, column j)."""
    if len(x) != m.rows:
        raise DimensionError(f"vec_mat_mul: vector length {len(x)} vs {m.rows} rows")
    if m.cols == 0:
        return BitVector.zeros(0)
    prod = (x.asarray().astype(np.int64) @ m.asarray().astype(np.int64)) & 1
    return BitVector._wrap(prod.astype(np.uint8))


def rank(m: BitMatrix) -> int:
    """Row-space dimension over GF(2) by Gaussian elimination."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return _kernels.rank_words(m.packed(), m.cols)


def is_full_rank(m: BitMatrix) -> bool:
    if m.rows != m.cols:
        raise DimensionError(f"is_full_rank requires a square matrix, got {m.rows}x{m.cols}")
    return rank(m) == m.rows


def full_rank_probability(n: int) -> float:
    """prod_{i=1}^{n} (1 - 2^-i): chance a uniform n x n GF(2) matrix is invertible.

    n = 0 returns 1.0 (empty product).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    prod = 1.0
    for i in range(1, n + 1):
        prod *= 1.0 - math.ldexp(1.0, -i)
    return prod


def rank_defect_probability_limit(s: int, truncation: int = 128) -> float:
    """Limiting probability that a uniform n x n GF(2) matrix has rank n - s.

    Computes 2^(-s^2) * prod_{i=s+1}^{truncation} (1 - 2^-i)
    * prod_{i=1}^{s} (1 - 2^-i)^-1; the tail beyond the default
    truncation of 128 terms is below 2^-128.
    """
    if s < 0:
        raise ValueError("s must be >= 0")
    if truncation < s:
        raise ValueError("truncation must be >= s")
    value = math.ldexp(1.0, -s * s)
    for i in range(s + 1, truncation + 1):
        value *= 1.0 - math.ldexp(1.0, -i)
    for i in range(1, s + 1):
        value /= 1.0 - math.ldexp(1.0, -i)
    return value


def random_bitvector(n: int, rng: np.random.Generator) -> BitVector:
    return BitVector._wrap(rng.integers(0, 2, size=n, dtype=np.uint8))


def random_bitmatrix(rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
    """Each entry an independent uniform bit; same seed, same matrix."""
    return BitMatrix._wrap(rng.integers(0, 2, size=(rows, cols), dtype=np.uint8))


def matrix_to_text(m: BitMatrix) -> str:
    """Text fixture format: 'rows cols' line, then one '0'/'1' line per row."""
    lines = [f"{m.rows} {m.cols}"]
    data = m.asarray()
    for i in range(m.rows):
        lines.append("".join("1" if b else "0" for b in data[i]))
    return "\n".join(lines) + "\n"


def matrix_from_text(text: str) -> BitMatrix:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    try:
        rows, cols = (int(tok) for tok in lines[0].split())
    except Exception as exc:
        raise ValueError(f"bad header line {lines[0]!r}") from exc
    if len(lines) - 1 != rows:
        raise ValueError(f"expected {rows} rows, got {len(lines) - 1}")
    data = np.zeros((rows, cols), dtype=np.uint8)
    for i, line in enumerate(lines[1:]):
        if len(line) != cols or set(line) - {"0", "1"}:
            raise ValueError(f"bad row line {line!r}")
        data[i] = np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0")
    return BitMatrix._wrap(data)
