"""Samplers and exact enumerators for the studied input families.

Families: uniform directed graphs with zero diagonal (``a_rand``),
planted-clique conditionals (``a_planted``) and their uniform mixture
(``a_k``), seed-plus-parity vectors (``u_b``), seed-times-matrix vectors
(``u_m``), and plain uniform bits.  Outcome keys everywhere are ASCII
'0'/'1' byte strings, row-major for matrices, so exact distances are
reproducible byte for byte.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DimensionError, DomainError
from .gf2core import BitMatrix, BitVector, dot, matrix_from_text, matrix_to_text, vec_mat_mul

ENUMERATION_BIT_CAP = 24

__all__ = [
    "Pmf",
    "InputAssignment",
    "CliqueSpec",
    "sample_a_rand",
    "sample_a_planted",
    "sample_a_k",
    "sample_u_b",
    "sample_u_m",
    "sample_forced_ones",
    "exact_pmf",
    "serialize_instance",
    "parse_instance",
]


class Pmf:
    """Finite probability mass function keyed by byte strings."""

    __slots__ = ("outcomes",)

    def __init__(self, outcomes: dict[bytes, float], check: bool = True) -> None:
        self.outcomes = dict(outcomes)
        if check:
            total = 0.0
            for key, p in self.outcomes.items():
                if p < -1e-15:
                    raise ValueError(f"negative probability {p} at {key!r}")
                total += p
            if abs(total - 1.0) > 1e-12:
                raise ValueError(f"total mass {total} is not 1")

    @classmethod
    def point(cls, key: bytes) -> "Pmf":
        return cls({key: 1.0}, check=False)

    @classmethod
    def uniform(cls, keys) -> "Pmf":
        keys = list(keys)
        p = 1.0 / len(keys)
        return cls({k: p for k in keys}, check=False)

    @classmethod
    def mixture(cls, parts: list["Pmf"], weights: list[float] | None = None) -> "Pmf":
        if weights is None:
            weights = [1.0 / len(parts)] * len(parts)
        acc: dict[bytes, float] = {}
        for part, w in zip(parts, weights):
            for key, p in part.outcomes.items():
                acc[key] = acc.get(key, 0.0) + w * p
        return cls(acc, check=False)

    def prob(self, key: bytes) -> float:
        return self.outcomes.get(key, 0.0)

    def support(self) -> set[bytes]:
        return set(self.outcomes)

    def total(self) -> float:
        return sum(self.outcomes.values())

    def map(self, fn) -> "Pmf":
        """Push-forward along fn: outcome key -> new key."""
        acc: dict[bytes, float] = {}
        for key, p in self.outcomes.items():
            new = fn(key)
            acc[new] = acc.get(new, 0.0) + p
        return Pmf(acc, check=False)

    def __len__(self) -> int:
        return len(self.outcomes)

    def __repr__(self) -> str:
        return f"Pmf({len(self.outcomes)} outcomes)"


@dataclass(frozen=True)
class CliqueSpec:
    """A designated vertex subset of [n]."""

    n: int
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(self.members))
        object.__setattr__(self, "members", members)
        if len(set(members)) != len(members):
            raise DomainError("clique members must be distinct")
        if members and not (1 <= members[0] and members[-1] <= self.n):
            raise DomainError(f"members must lie in 1..{self.n}")

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class InputAssignment:
    """All processors' inputs: row i of ``matrix`` is processor i's input."""

    n: int
    m: int
    matrix: BitMatrix

    def __post_init__(self):
        if self.matrix.rows != self.n or self.matrix.cols != self.m:
            raise DimensionError(
                f"matrix is {self.matrix.rows}x{self.matrix.cols}, expected {self.n}x{self.m}"
            )

    @classmethod
    def from_matrix(cls, matrix: BitMatrix) -> "InputAssignment":
        return cls(matrix.rows, matrix.cols, matrix)

    def row(self, i: int) -> BitVector:
        return self.matrix.row(i)

    def key(self) -> bytes:
        return self.matrix.key()


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def sample_a_rand(n: int, rng: np.random.Generator) -> InputAssignment:
    """Uniform directed graph: off-diagonal iid bits, diagonal forced 0."""
    if n < 1:
        raise DomainError("n must be >= 1")
    bits = rng.integers(0, 2, size=(n, n), dtype=np.uint8)
    np.fill_diagonal(bits, 0)
    return InputAssignment(n, n, BitMatrix(bits))


def sample_a_planted(n: int, clique: CliqueSpec, rng: np.random.Generator) -> InputAssignment:
    """Like a_rand but every ordered pair inside the clique is forced to 1."""
    if clique.n != n:
        raise DomainError(f"clique is over [{clique.n}], instance over [{n}]")
    sample = sample_a_rand(n, rng)
    bits = sample.matrix.asarray().copy()
    idx = np.array(clique.members, dtype=np.intp) - 1
    if idx.size:
        bits[np.ix_(idx, idx)] = 1
        bits[idx, idx] = 0
    return InputAssignment(n, n, BitMatrix(bits))


def sample_a_k(
    n: int, k: int, rng: np.random.Generator
) -> tuple[InputAssignment, CliqueSpec]:
    """Plant a uniform size-k clique; returns the instance and the hidden clique."""
    if not 0 <= k <= n:
        raise DomainError(f"k must be in 0..{n}, got {k}")
    members = tuple(sorted(int(v) + 1 for v in rng.choice(n, size=k, replace=False)))
    clique = CliqueSpec(n, members)
    return sample_a_planted(n, clique, rng), clique


def sample_u_b(k: int, b: BitVector, rng: np.random.Generator) -> BitVector:
    """Uniform x in {0,1}^k extended by the parity x.b; length k+1."""
    if len(b) != k:
        raise DimensionError(f"b has length {len(b)}, expected {k}")
    x = BitVector(rng.integers(0, 2, size=k, dtype=np.uint8))
    return x.concat(BitVector([dot(x, b)]))


def sample_u_m(k: int, m: int, matrix: BitMatrix, rng: np.random.Generator) -> BitVector:
    """Uniform x in {0,1}^k extended by x^T M; length m."""
    if matrix.rows != k or matrix.cols != m - k:
        raise DimensionError(
            f"matrix is {matrix.rows}x{matrix.cols}, expected {k}x{m - k}"
        )
    x = BitVector(rng.integers(0, 2, size=k, dtype=np.uint8))
    return x.concat(vec_mat_mul(x, matrix))


def sample_forced_ones(
    n: int, positions: tuple[int, ...], rng: np.random.Generator
) -> BitVector:
    """Uniform n-bit vector with the given 1-based positions forced to 1.

    This is the unconstrained-coordinate variant (no zero-diagonal
    convention); rows of a_planted instances are its graph-row cousin.
    """
    bits = rng.integers(0, 2, size=n, dtype=np.uint8)
    for pos in positions:
        if not 1 <= pos <= n:
            raise DomainError(f"position {pos} out of range 1..{n}")
        bits[pos - 1] = 1
    return BitVector(bits)


# ---------------------------------------------------------------------------
# Exact enumeration
# ---------------------------------------------------------------------------


def _check_bits(count: int, what: str) -> None:
    if count > ENUMERATION_BIT_CAP:
        raise CapacityError(
            f"{what} needs {count} free bits; cap is {ENUMERATION_BIT_CAP}"
        )


def _enumerate_keys(template: np.ndarray, free_flat: np.ndarray) -> list[bytes]:
    """All fillings of the free positions of a flat 0/1 template, as keys."""
    nfree = free_flat.size
    _check_bits(nfree, "enumeration")
    total = 1 << nfree
    mats = np.tile(template, (total, 1))
    if nfree:
        vals = np.arange(total, dtype=np.uint32)
        fill = ((vals[:, None] >> np.arange(nfree, dtype=np.uint32)) & 1).astype(np.uint8)
        mats[:, free_flat] = fill
    ascii_rows = mats + ord("0")
    return [row.tobytes() for row in ascii_rows]


def _planted_pmf(n: int, members: tuple[int, ...]) -> Pmf:
    template = np.zeros(n * n, dtype=np.uint8)
    forced = np.zeros((n, n), dtype=bool)
    np.fill_diagonal(forced, True)
    idx = np.array(members, dtype=np.intp) - 1
    if idx.size:
        block = np.zeros((n, n), dtype=bool)
        block[np.ix_(idx, idx)] = True
        template.reshape(n, n)[block & ~np.eye(n, dtype=bool)] = 1
        forced |= block
    free_flat = np.flatnonzero(~forced.reshape(-1))
    return Pmf.uniform(_enumerate_keys(template, free_flat))


def _vector_family_pmf(k: int, extend) -> Pmf:
    _check_bits(k, "seed enumeration")
    keys = []
    for val in range(1 << k):
        x = BitVector.from_int(val, k)
        keys.append(x.concat(extend(x)).key())
    return Pmf.uniform(keys)


def _u_m_rows_pmf(n: int, k: int, m: int, matrix: BitMatrix) -> Pmf:
    _check_bits(n * k, "row-product enumeration")
    row_pmf = _vector_family_pmf(k, lambda x: vec_mat_mul(x, matrix))
    rows = sorted(row_pmf.outcomes)
    acc: dict[bytes, float] = {}
    p = 1.0 / len(rows) ** n
    for combo in itertools.product(rows, repeat=n):
        acc[b"".join(combo)] = p
    return Pmf(acc, check=False)


def exact_pmf(family: str, **params) -> Pmf:
    """Exact distribution of a named family; capacity-guarded, never sampled.

    Families: ``uniform(length)``, ``u_b(k, b)``, ``u_m(k, m, matrix)``,
    ``u_m_rows(n, k, m, matrix)``, ``prg_world(n, k, m)``,
    ``a_rand(n)``, ``a_planted(n, members)``, ``a_k(n, k)``,
    ``forced_ones(n, positions)``.
    """
    if family == "uniform":
        length = params["length"]
        _check_bits(length, "uniform enumeration")
        template = np.zeros(length, dtype=np.uint8)
        return Pmf.uniform(_enumerate_keys(template, np.arange(length)))
    if family == "u_b":
        k, b = params["k"], params["b"]
        if len(b) != k:
            raise DimensionError(f"b has length {len(b)}, expected {k}")
        return _vector_family_pmf(k, lambda x: BitVector([dot(x, b)]))
    if family == "u_m":
        k, m, matrix = params["k"], params["m"], params["matrix"]
        if matrix.rows != k or matrix.cols != m - k:
            raise DimensionError("matrix shape must be k x (m-k)")
        return _vector_family_pmf(k, lambda x: vec_mat_mul(x, matrix))
    if family == "u_m_rows":
        return _u_m_rows_pmf(params["n"], params["k"], params["m"], params["matrix"])
    if family == "prg_world":
        n, k, m = params["n"], params["k"], params["m"]
        _check_bits(k * (m - k) + n * k, "matrix mixture enumeration")
        parts = []
        for mval in range(1 << (k * (m - k))):
            bits = np.array(
                [(mval >> j) & 1 for j in range(k * (m - k))], dtype=np.uint8
            ).reshape(k, m - k)
            parts.append(_u_m_rows_pmf(n, k, m, BitMatrix(bits)))
        return Pmf.mixture(parts)
    if family == "a_rand":
        n = params["n"]
        _check_bits(n * (n - 1), "a_rand enumeration")
        return _planted_pmf(n, ())
    if family == "a_planted":
        n, members = params["n"], tuple(params["members"])
        CliqueSpec(n, members)  # validates range and distinctness
        _check_bits(n * (n - 1) - len(members) * (len(members) - 1), "a_planted enumeration")
        return _planted_pmf(n, members)
    if family == "a_k":
        n, k = params["n"], params["k"]
        if not 0 <= k <= n:
            raise DomainError(f"k must be in 0..{n}")
        subsets = list(itertools.combinations(range(1, n + 1), k))
        free_bits = n * (n - 1) - k * (k - 1)
        _check_bits(free_bits + math.ceil(math.log2(len(subsets))), "a_k enumeration")
        return Pmf.mixture([_planted_pmf(n, c) for c in subsets])
    if family == "forced_ones":
        n, positions = params["n"], tuple(params["positions"])
        template = np.zeros(n, dtype=np.uint8)
        for pos in positions:
            if not 1 <= pos <= n:
                raise DomainError(f"position {pos} out of range 1..{n}")
            template[pos - 1] = 1
        free = np.array(
            [j for j in range(n) if (j + 1) not in positions], dtype=np.intp
        )
        return Pmf.uniform(_enumerate_keys(template, free))
    raise DomainError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# Instance serialization
# ---------------------------------------------------------------------------


def serialize_instance(
    assignment: InputAssignment, distribution: str, params: dict, seed: int
) -> str:
    """JSON provenance header line followed by the matrix text fixture."""
    header = {
        "n": assignment.n,
        "m": assignment.m,
        "distribution": distribution,
        "params": params,
        "seed": seed,
    }
    return json.dumps(header, sort_keys=True) + "\n" + matrix_to_text(assignment.matrix)


def parse_instance(text: str) -> tuple[InputAssignment, dict]:
    head, _, body = text.partition("\n")
    header = json.loads(head)
    matrix = matrix_from_text(body)
    return InputAssignment.from_matrix(matrix), header
