"""Concrete broadcast-clique protocols: the planted-clique finder, the
full-rank decision protocol, and the seed-space transcript breaker.

The finder models its activation coins as extra private input bits
appended after the adjacency row, so the protocol itself stays
deterministic.  All shared quantities (active set, induced subgraph,
winning clique) are derived from the public transcript and cached in
the transcript's memo, since every processor would compute the same
values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distributions import InputAssignment
from .errors import CapacityError, DimensionError, DomainError, ParameterError
from .gf2core import BitMatrix, BitVector, is_full_rank
from .model import ProtocolSpec, SimultaneousRounds, Transcript, run

__all__ = [
    "CliqueFinderParams",
    "FinderResult",
    "RECOVERED",
    "ABORTED_TOO_MANY_ACTIVE",
    "ABORTED_SMALL_CLIQUE",
    "max_clique",
    "planted_clique_finder",
    "attach_activation_coins",
    "finder_result",
    "run_finder",
    "full_rank_protocol",
    "SeedBreaker",
    "seed_breaker",
    "matrix_prg_seed_oracle",
]

RECOVERED = "recovered"
ABORTED_TOO_MANY_ACTIVE = "aborted_too_many_active"
ABORTED_SMALL_CLIQUE = "aborted_small_clique"

MAX_CLIQUE_VERTEX_CAP = 160


# ---------------------------------------------------------------------------
# Exact maximum clique
# ---------------------------------------------------------------------------


def _max_clique_bool(adj: np.ndarray, cap: int = MAX_CLIQUE_VERTEX_CAP) -> list[int]:
    """Lexicographically smallest maximum clique of a boolean adjacency
    matrix (no self loops); vertices returned 1-based and sorted."""
    nv = adj.shape[0]
    if nv == 0:
        return []
    if nv > cap:
        raise CapacityError(f"{nv} vertices exceed the max-clique cap of {cap}")
    words = _kernels.pack_rows(adj.astype(np.uint8))
    nwords = words.shape[1]
    full = np.zeros(nwords, dtype=np.uint64)
    for v in range(nv):
        full[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
    omega, _ = _kernels.max_clique_mask(words, full, nv + 1)
    members: list[int] = []
    cand = full
    for need in range(omega, 0, -1):
        for v in range(nv):
            if not (cand[v >> 6] >> np.uint64(v & 63)) & np.uint64(1):
                continue
            sub = cand & words[v]
            if need == 1:
                members.append(v)
                cand = sub
                break
            size, _ = _kernels.max_clique_mask(words, sub, need - 1)
            if size >= need - 1:
                members.append(v)
                cand = sub
                break
        else:
            raise AssertionError("clique reconstruction failed")
    return sorted(v + 1 for v in members)


def max_clique(adjacency: BitMatrix) -> list[int]:
    """A maximum clique of an undirected graph; deterministic tie-break
    (the lexicographically smallest maximum vertex set), 1-based."""
    if adjacency.rows != adjacency.cols:
        raise DimensionError("adjacency matrix must be square")
    arr = adjacency.asarray()
    if arr.size:
        if np.any(np.diagonal(arr)):
            raise DomainError("adjacency diagonal must be zero")
        if not np.array_equal(arr, arr.T):
            raise DomainError("adjacency matrix must be symmetric")
    return _max_clique_bool(arr.astype(bool))


# ---------------------------------------------------------------------------
# Planted-clique finder
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CliqueFinderParams:
    """Finder thresholds for n vertices and target clique size k.

    Activation probability p = (log2 n)^2 / k; abort when more than
    2*n*p processors activate or when the best active clique is below
    (log2 n)^2 / 2; membership claims need out-edges to at least 9/10
    of the winning clique.
    """

    n: int
    k: int
    clique_cap: int = MAX_CLIQUE_VERTEX_CAP

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError("need n >= 2")
        if not 1 <= self.k <= self.n:
            raise ParameterError(f"k must be in 1..{self.n}, got {self.k}")
        if self.p > 1.0:
            raise ParameterError(
                f"activation probability p = (log2 n)^2 / k = {self.p:.4f} exceeds 1; "
                f"need k >= (log2 {self.n})^2 = {math.log2(self.n) ** 2:.2f}"
            )

    @property
    def p(self) -> float:
        return math.log2(self.n) ** 2 / self.k

    @property
    def active_cap(self) -> float:
        return 2.0 * self.n * self.p

    @property
    def clique_floor(self) -> float:
        return 0.5 * math.log2(self.n) ** 2

    @property
    def membership_fraction(self) -> float:
        return 9 / 10

    @property
    def coin_bits(self) -> int:
        # binary-fraction activation test; floor of 8 bits keeps the
        # quantization error at most 2^-8 even for p close to 1
        if self.p >= 1.0:
            return 8
        return max(8, math.ceil(8 * math.log2(1.0 / self.p)))

    @property
    def adjacency_round_cap(self) -> int:
        return int(math.floor(self.active_cap))

    @property
    def total_rounds(self) -> int:
        return 1 + self.adjacency_round_cap + 1

    @property
    def input_length(self) -> int:
        return self.n + self.coin_bits


@dataclass(frozen=True)
class FinderResult:
    status: str
    members: tuple[int, ...]
    rounds_used: int

    def to_json(self, n: int, k: int, seed: int) -> str:
        return json.dumps(
            {
                "status": self.status,
                "members": list(self.members),
                "rounds_used": self.rounds_used,
                "n": n,
                "k": k,
                "seed": seed,
            },
            sort_keys=True,
        )


def _activation_bit(params: CliqueFinderParams, z: BitVector) -> int:
    value = 0
    c = params.coin_bits
    for j in range(1, c + 1):
        value = (value << 1) | z[params.n + j]
    return 1 if value < params.p * (1 << c) else 0


def _finder_shared(params: CliqueFinderParams, p: Transcript) -> dict:
    state = p.memo.get("finder_shared")
    if state is None:
        n = params.n
        active = [e[1] for e in p.entries[:n] if e[2] == 1]
        n_active = len(active)
        state = {
            "active": active,
            "active_set": frozenset(active),
            "n_active": n_active,
            "abort_active": n_active > params.active_cap,
        }
        p.memo["finder_shared"] = state
    return state


def _finder_clique(params: CliqueFinderParams, p: Transcript) -> dict:
    state = p.memo.get("finder_clique")
    if state is None:
        shared = _finder_shared(params, p)
        active = shared["active"]
        n_active = shared["n_active"]
        if n_active > params.clique_cap:
            raise CapacityError(
                f"{n_active} active vertices exceed the max-clique cap "
                f"of {params.clique_cap}"
            )
        n = params.n
        # directed[v_local][u_local]: v's broadcast bit toward the u-th active
        directed = np.zeros((n_active, n_active), dtype=bool)
        for ridx in range(1, n_active + 1):
            base = ridx * n  # adjacency round ridx occupies turns after it
            for v_local, v in enumerate(active):
                directed[v_local, ridx - 1] = p.entries[base + v - 1][2] == 1
        und = directed & directed.T
        np.fill_diagonal(und, False)
        clique_local = _max_clique_bool(und, cap=params.clique_cap)
        clique = tuple(active[v - 1] for v in clique_local)
        state = {
            "clique": clique,
            "abort_clique": len(clique) < params.clique_floor,
        }
        p.memo["finder_clique"] = state
    return state


def _membership_claim(params: CliqueFinderParams, i: int, z: BitVector, clique) -> int:
    if i in clique:
        return 1
    hits = sum(1 for u in clique if z[u] == 1)
    # integer form of hits >= 9/10 * |clique|
    return 1 if 10 * hits >= 9 * len(clique) else 0


def planted_clique_finder(params: CliqueFinderParams) -> ProtocolSpec:
    """The clique-recovery protocol over adjacency-row-plus-coins inputs.

    Round 1: everyone broadcasts its activation coin outcome.  Rounds
    2..1+N_active: all active processors broadcast their edge bit toward
    the r-th active processor (inactive processors idle with 0; rounds
    past N_active idle).  Final round: membership claims against the
    maximum clique of the induced undirected active subgraph.  Abort
    states broadcast all zeros through the fixed horizon.
    """
    n = params.n
    total_rounds = params.total_rounds

    def next_bit(i: int, z: BitVector, p: Transcript) -> int:
        r = len(p) // n + 1
        if r == 1:
            return _activation_bit(params, z)
        shared = _finder_shared(params, p)
        if shared["abort_active"]:
            return 0
        if r == total_rounds:
            clique_state = _finder_clique(params, p)
            if clique_state["abort_clique"]:
                return 0
            return _membership_claim(params, i, z, clique_state["clique"])
        ridx = r - 1
        if ridx > shared["n_active"]:
            return 0
        if i not in shared["active_set"]:
            return 0
        target = shared["active"][ridx - 1]
        return z[target]

    def output_map(i: int, z: BitVector, p: Transcript) -> BitVector:
        result = finder_result(params, p)
        bits = np.zeros(n, dtype=np.uint8)
        if result.status == RECOVERED:
            for v in result.members:
                bits[v - 1] = 1
        return BitVector(bits)

    return ProtocolSpec(
        n=n,
        m=params.input_length,
        next_bit=next_bit,
        output_map=output_map,
        schedule=SimultaneousRounds(total_rounds),
        name=f"planted-clique-finder(n={n},k={params.k})",
    )


def attach_activation_coins(
    assignment: InputAssignment, params: CliqueFinderParams, rng: np.random.Generator
) -> InputAssignment:
    """Append private activation coin bits to each adjacency row."""
    if assignment.n != params.n or assignment.m != params.n:
        raise DimensionError("expected an n x n adjacency assignment")
    coins = rng.integers(0, 2, size=(params.n, params.coin_bits), dtype=np.uint8)
    joined = np.concatenate([assignment.matrix.asarray(), coins], axis=1)
    return InputAssignment(params.n, params.input_length, BitMatrix(joined))


def finder_result(params: CliqueFinderParams, transcript: Transcript) -> FinderResult:
    """Outcome of a completed finder run, derived from the public transcript."""
    expected = params.total_rounds * params.n
    if len(transcript) != expected:
        raise DomainError(f"transcript has {len(transcript)} turns, expected {expected}")
    shared = _finder_shared(params, transcript)
    if shared["abort_active"]:
        return FinderResult(ABORTED_TOO_MANY_ACTIVE, (), 1)
    clique_state = _finder_clique(params, transcript)
    if clique_state["abort_clique"]:
        return FinderResult(ABORTED_SMALL_CLIQUE, (), 1 + shared["n_active"])
    base = (params.total_rounds - 1) * params.n
    members = tuple(
        v for v in range(1, params.n + 1) if transcript.entries[base + v - 1][2] == 1
    )
    return FinderResult(RECOVERED, members, 2 + shared["n_active"])


def run_finder(
    params: CliqueFinderParams,
    graph: InputAssignment,
    rng: np.random.Generator,
) -> FinderResult:
    """Attach coins, run the finder protocol, and score its outcome."""
    full_input = attach_activation_coins(graph, params, rng)
    protocol = planted_clique_finder(params)
    transcript, _ = run(protocol, full_input)
    return finder_result(params, transcript)


# ---------------------------------------------------------------------------
# Full-rank decision protocol
# ---------------------------------------------------------------------------


def full_rank_protocol(n: int) -> ProtocolSpec:
    """n simultaneous rounds: processor i broadcasts its r-th input bit in
    round r; everyone reconstructs the matrix and outputs whether it has
    full rank."""

    def next_bit(i: int, z: BitVector, p: Transcript) -> int:
        r = len(p) // n + 1
        return z[r]

    def output_map(i: int, z: BitVector, p: Transcript) -> BitVector:
        verdict = p.memo.get("full_rank")
        if verdict is None:
            bits = np.empty((n, n), dtype=np.uint8)
            for r in range(n):
                for v in range(n):
                    bits[v, r] = p.entries[r * n + v][2]
            verdict = 1 if is_full_rank(BitMatrix(bits)) else 0
            p.memo["full_rank"] = verdict
        return BitVector([verdict])

    return ProtocolSpec(
        n=n,
        m=n,
        next_bit=next_bit,
        output_map=output_map,
        schedule=SimultaneousRounds(n),
        name=f"full-rank(n={n})",
    )


# ---------------------------------------------------------------------------
# Seed-space breaker
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeedBreaker:
    """Distinguisher that accepts exactly the transcripts reachable by
    some seed of the generator under attack."""

    n: int
    seed_bits: int
    m: int
    protocol: ProtocolSpec
    reachable: frozenset[bytes]
    prg_acceptance: float

    def accepts(self, transcript: Transcript, outputs=None) -> int:
        return 1 if transcript.key() in self.reachable else 0

    def uniform_acceptance(self) -> float:
        """Exact acceptance probability on truly uniform m-bit inputs."""
        return len(self.reachable) / 2 ** (self.n * (self.seed_bits + 1))


def seed_breaker(prg_enumerator, n: int, k: int, m: int) -> SeedBreaker:
    """Build the (k+1)-round transcript-membership distinguisher.

    ``k`` is the full per-processor seed length of the generator under
    attack, so the reachable set has at most 2^(n*k) members while
    uniform inputs spread over 2^(n*(k+1)) transcripts.  The enumerator
    maps an n x k seed matrix to the n processors' m-bit outputs.
    """
    if n * k > 24:
        raise CapacityError(f"seed space 2^{n * k} exceeds the 2^24 enumeration cap")
    if m < k + 1:
        raise DomainError(f"need m >= k+1 = {k + 1} output bits, got {m}")

    def next_bit(i: int, z: BitVector, p: Transcript) -> int:
        r = len(p) // n + 1
        return z[r]

    def output_map(i: int, z: BitVector, p: Transcript) -> BitVector:
        return BitVector.zeros(0)

    protocol = ProtocolSpec(
        n=n,
        m=m,
        next_bit=next_bit,
        output_map=output_map,
        schedule=SimultaneousRounds(k + 1),
        name=f"seed-breaker(n={n},k={k})",
    )

    # the reachable set is defined by what the breaker protocol itself
    # would see: run it on every seed's outputs and record the transcript
    reachable: set[bytes] = set()
    seed_keys: list[bytes] = []
    for val in range(1 << (n * k)):
        seed_rows = np.array(
            [[(val >> (i * k + j)) & 1 for j in range(k)] for i in range(n)],
            dtype=np.uint8,
        )
        outputs = prg_enumerator(BitMatrix(seed_rows))
        if len(outputs) != n or any(len(o) != m for o in outputs):
            raise DimensionError("enumerator must return n outputs of length m")
        assignment = InputAssignment.from_matrix(BitMatrix.from_rows(outputs))
        transcript, _ = run(protocol, assignment)
        key = transcript.key()
        reachable.add(key)
        seed_keys.append(key)

    prg_acceptance = sum(1 for key in seed_keys if key in reachable) / len(seed_keys)

    return SeedBreaker(
        n=n,
        seed_bits=k,
        m=m,
        protocol=protocol,
        reachable=frozenset(reachable),
        prg_acceptance=prg_acceptance,
    )


def matrix_prg_seed_oracle(params) -> "callable":
    """Seed-space oracle for the matrix generator: runs the sharing
    protocol on an n x (k + share) seed matrix and returns all outputs."""
    from .prg import build_prg_protocol

    protocol = build_prg_protocol(params)

    def oracle(seed_matrix: BitMatrix):
        assignment = InputAssignment.from_matrix(seed_matrix)
        _, outputs = run(protocol, assignment)
        return outputs

    return oracle
