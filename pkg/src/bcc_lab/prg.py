"""The broadcast-clique pseudo-random generators.

Toy form: every processor extends its k seed bits by one parity with a
shared secret vector b.  Full form: processors pool spare seed bits
over ceil(k*(m-k)/n) simultaneous rounds to build a shared k x (m-k)
matrix M, then each outputs its seed x followed by x^T M.  Shared bits
are consumed in (round, processor) order and fill M row-major; surplus
padding bits from the last round are discarded.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .distributions import InputAssignment, sample_u_m
from .errors import DimensionError, ProtocolError
from .gf2core import BitMatrix, BitVector, dot, random_bitmatrix, vec_mat_mul
from .model import ProtocolSpec, SimultaneousRounds, Transcript

__all__ = [
    "PrgParams",
    "SeedBundle",
    "PrgRegimeWarning",
    "toy_prg_outputs",
    "build_prg_protocol",
    "assemble_matrix",
    "prg_input_distribution",
    "random_seed_bundle",
    "fixture_to_json",
]


class PrgRegimeWarning(UserWarning):
    """Parameters leave the regime where the indistinguishability bound applies."""


@dataclass(frozen=True)
class PrgParams:
    """n processors, k private seed bits each, m output bits each."""

    n: int
    k: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("need n >= 1 and k >= 1")
        if self.m < self.k:
            raise ValueError(f"m ({self.m}) must be >= k ({self.k})")
        if self.m > 2 ** (self.k / 20):
            warnings.warn(
                f"m={self.m} exceeds 2^(k/20)={2 ** (self.k / 20):.3g}; the "
                "indistinguishability guarantee does not cover this regime",
                PrgRegimeWarning,
                stacklevel=2,
            )

    @property
    def matrix_bits(self) -> int:
        return self.k * (self.m - self.k)

    @property
    def share_bits_per_processor(self) -> int:
        return math.ceil(self.matrix_bits / self.n)

    @property
    def sharing_rounds(self) -> int:
        return self.share_bits_per_processor

    @property
    def input_length(self) -> int:
        return self.k + self.share_bits_per_processor

    @property
    def total_seed_bits_per_processor(self) -> int:
        return self.input_length


@dataclass(frozen=True)
class SeedBundle:
    """Per-processor private seeds and share bits for one PRG run."""

    private_seeds: tuple[BitVector, ...]
    share_bits: tuple[BitVector, ...]

    def validate(self, params: PrgParams) -> None:
        if len(self.private_seeds) != params.n or len(self.share_bits) != params.n:
            raise DimensionError("bundle must hold one entry per processor")
        for seed in self.private_seeds:
            if len(seed) != params.k:
                raise DimensionError(f"private seed length {len(seed)} != k={params.k}")
        for share in self.share_bits:
            if len(share) != params.share_bits_per_processor:
                raise DimensionError(
                    f"share length {len(share)} != {params.share_bits_per_processor}"
                )

    def to_assignment(self, params: PrgParams) -> InputAssignment:
        self.validate(params)
        rows = [
            seed.concat(share)
            for seed, share in zip(self.private_seeds, self.share_bits)
        ]
        from .gf2core import BitMatrix as _BM

        return InputAssignment(params.n, params.input_length, _BM.from_rows(rows))


def random_seed_bundle(params: PrgParams, rng: np.random.Generator) -> SeedBundle:
    s = params.share_bits_per_processor
    privates = tuple(
        BitVector(rng.integers(0, 2, size=params.k, dtype=np.uint8))
        for _ in range(params.n)
    )
    shares = tuple(
        BitVector(rng.integers(0, 2, size=s, dtype=np.uint8)) for _ in range(params.n)
    )
    return SeedBundle(privates, shares)


def toy_prg_outputs(n: int, k: int, b: BitVector, seeds: list[BitVector]) -> list[BitVector]:
    """Each processor's k seed bits extended by the parity with shared b."""
    if len(b) != k:
        raise DimensionError(f"b has length {len(b)}, expected {k}")
    if len(seeds) != n:
        raise DimensionError(f"got {len(seeds)} seeds for {n} processors")
    outputs = []
    for seed in seeds:
        if len(seed) != k:
            raise DimensionError(f"seed length {len(seed)} != {k}")
        outputs.append(seed.concat(BitVector([dot(seed, b)])))
    return outputs


def assemble_matrix(transcript: Transcript, params: PrgParams) -> BitMatrix:
    """Rebuild M from the sharing phase: the first k*(m-k) broadcast bits,
    taken in turn order, fill M row-major; later padding bits are ignored."""
    need = params.matrix_bits
    if len(transcript) < need:
        raise ProtocolError(
            f"transcript has {len(transcript)} bits; matrix needs {need}"
        )
    if need == 0:
        return BitMatrix.zeros(params.k, 0)
    bits = np.fromiter(
        (transcript.entries[t][2] for t in range(need)), dtype=np.uint8, count=need
    )
    return BitMatrix(bits.reshape(params.k, params.m - params.k))


def build_prg_protocol(params: PrgParams) -> ProtocolSpec:
    """Protocol over (seed, share) inputs realizing the matrix generator.

    Runs ceil(k*(m-k)/n) simultaneous rounds in which processor i
    broadcasts its share bits in order; every processor then outputs
    (x, x^T M) where M is assembled from the transcript.
    """
    n, k = params.n, params.k

    def next_bit(i: int, z: BitVector, p: Transcript) -> int:
        r = len(p) // n + 1
        return z[k + r]

    def output_map(i: int, z: BitVector, p: Transcript) -> BitVector:
        matrix = p.memo.get("prg_matrix")
        if matrix is None:
            matrix = assemble_matrix(p, params)
            p.memo["prg_matrix"] = matrix
        x = z.slice(1, k)
        return x.concat(vec_mat_mul(x, matrix))

    return ProtocolSpec(
        n=n,
        m=params.input_length,
        next_bit=next_bit,
        output_map=output_map,
        schedule=SimultaneousRounds(params.sharing_rounds),
        name=f"matrix-prg(n={n},k={k},m={params.m})",
    )


def prg_input_distribution(params: PrgParams, rng: np.random.Generator) -> InputAssignment:
    """Pseudo-random world input: one shared uniform M, rows drawn from it."""
    matrix = random_bitmatrix(params.k, params.m - params.k, rng)
    rows = [sample_u_m(params.k, params.m, matrix, rng) for _ in range(params.n)]
    return InputAssignment(params.n, params.m, BitMatrix.from_rows(rows))


def fixture_to_json(
    params: PrgParams,
    bundle: SeedBundle,
    matrix: BitMatrix,
    outputs: list[BitVector],
) -> str:
    """Golden-test fixture: params, seeds, assembled matrix, and outputs."""
    obj = {
        "params": {"n": params.n, "k": params.k, "m": params.m},
        "private_seeds": [s.to01() for s in bundle.private_seeds],
        "share_bits": [s.to01() for s in bundle.share_bits],
        "matrix": [
            "".join(str(matrix.entry(i, j)) for j in range(1, matrix.cols + 1))
            for i in range(1, matrix.rows + 1)
        ],
        "outputs": [o.to01() for o in outputs],
    }
    return json.dumps(obj, sort_keys=True)
