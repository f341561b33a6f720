"""Deterministic broadcast-clique simulator.

A protocol is a family of next-bit functions plus an output map, driven
by one of two schedules: ``SimultaneousRounds(j)`` (j rounds, all n
processors broadcast per round against the transcript as of the round
start, appended in processor order) or ``SequentialTurns(T)`` (one
processor per turn, round-robin, speaker (t-1) mod n + 1).

Protocols must be deterministic; randomized behaviour is modelled by
appending private coin bits to the input.  Where a next-bit function is
asked about an (input, transcript) pair its own protocol could never
produce, the convention is to return 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Union

from .errors import CapacityError, DimensionError, DomainError
from .gf2core import BitVector

__all__ = [
    "SimultaneousRounds",
    "SequentialTurns",
    "Schedule",
    "Transcript",
    "ProtocolSpec",
    "run",
    "transcript_pmf",
    "consistency_set",
    "transcript_to_json",
    "transcript_from_json",
]


@dataclass(frozen=True)
class SimultaneousRounds:
    rounds: int

    def horizon(self, n: int) -> int:
        return self.rounds * n


@dataclass(frozen=True)
class SequentialTurns:
    turns: int

    def horizon(self, n: int) -> int:
        return self.turns


Schedule = Union[SimultaneousRounds, SequentialTurns]


def speaker_at(turn: int, n: int) -> int:
    """Broadcasting processor at a 1-based turn (both schedules)."""
    return (turn - 1) % n + 1


class Transcript:
    """Ordered public record of (turn, speaker, bit) broadcasts.

    ``memo`` is per-run scratch space: protocols that derive shared
    state from the public transcript (everyone sees the same bits) may
    cache it here instead of recomputing per processor.  Entries only
    ever get appended, so memoized values keyed by prefix length stay
    valid for the lifetime of the object.
    """

    __slots__ = ("entries", "memo")

    def __init__(self, entries: list[tuple[int, int, int]] | None = None) -> None:
        self.entries = list(entries) if entries else []
        self.memo: dict = {}

    def append(self, turn: int, speaker: int, bit: int) -> None:
        self.entries.append((turn, speaker, bit))

    def __len__(self) -> int:
        return len(self.entries)

    def bit(self, turn: int) -> int:
        entry = self.entries[turn - 1]
        if entry[0] != turn:
            raise ValueError(f"entry {entry} does not match turn {turn}")
        return entry[2]

    def bits01(self) -> str:
        return "".join("1" if e[2] else "0" for e in self.entries)

    def key(self) -> bytes:
        return self.bits01().encode("ascii")

    def prefix(self, upto: int) -> "Transcript":
        """Fresh transcript holding the first ``upto`` turns."""
        return Transcript(self.entries[:upto])

    def __repr__(self) -> str:
        return f"Transcript({self.bits01()!r})"


@dataclass(frozen=True)
class ProtocolSpec:
    """Deterministic protocol: per-processor next-bit and output functions.

    ``next_bit(i, z, p)`` is the bit processor i broadcasts on input z
    seeing transcript p; ``output_map(i, z, p)`` is its final output
    once the horizon is reached.
    """

    n: int
    m: int
    next_bit: Callable[[int, BitVector, Transcript], int]
    output_map: Callable[[int, BitVector, Transcript], BitVector]
    schedule: Schedule
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def horizon(self) -> int:
        return self.schedule.horizon(self.n)


def run(protocol: ProtocolSpec, assignment) -> tuple[Transcript, list[BitVector]]:
    """Execute the protocol; returns the transcript and all outputs."""
    if assignment.n != protocol.n or assignment.m != protocol.m:
        raise DomainError(
            f"assignment is {assignment.n}x{assignment.m}, protocol wants "
            f"{protocol.n}x{protocol.m}"
        )
    n = protocol.n
    rows = [assignment.row(i) for i in range(1, n + 1)]
    next_bit = protocol.next_bit
    transcript = Transcript()
    entries = transcript.entries
    schedule = protocol.schedule
    if isinstance(schedule, SimultaneousRounds):
        turn = 1
        for _ in range(schedule.rounds):
            bits = [next_bit(i, rows[i - 1], transcript) for i in range(1, n + 1)]
            for i, b in enumerate(bits, 1):
                if b != 0 and b != 1:
                    raise ValueError(f"next_bit returned {b!r}, expected 0 or 1")
                entries.append((turn, i, b))
                turn += 1
    elif isinstance(schedule, SequentialTurns):
        for turn in range(1, schedule.turns + 1):
            s = (turn - 1) % n + 1
            b = next_bit(s, rows[s - 1], transcript)
            if b != 0 and b != 1:
                raise ValueError(f"next_bit returned {b!r}, expected 0 or 1")
            entries.append((turn, s, b))
    else:
        raise DomainError(f"unknown schedule {schedule!r}")
    outputs = [protocol.output_map(i, rows[i - 1], transcript) for i in range(1, n + 1)]
    return transcript, outputs


def _assignment_from_key(key: bytes, n: int, m: int):
    from .distributions import InputAssignment
    from .gf2core import BitMatrix
    import numpy as np

    if len(key) != n * m:
        raise DimensionError(f"outcome key has {len(key)} bits, expected {n * m}")
    bits = (np.frombuffer(key, dtype=np.uint8) - ord("0")).reshape(n, m)
    return InputAssignment(n, m, BitMatrix(bits))


def transcript_pmf(protocol: ProtocolSpec, input_pmf) -> "Pmf":
    """Exact transcript distribution of the protocol over an input pmf."""
    from .distributions import Pmf

    acc: dict[bytes, float] = {}
    for key, p in input_pmf.outcomes.items():
        assignment = _assignment_from_key(key, protocol.n, protocol.m)
        transcript, _ = run(protocol, assignment)
        tkey = transcript.key()
        acc[tkey] = acc.get(tkey, 0.0) + p
    return Pmf(acc, check=False)


def _visible_prefix_len(schedule: Schedule, n: int, turn: int) -> int:
    """Turns visible to the speaker of ``turn`` when it computes its bit."""
    if isinstance(schedule, SimultaneousRounds):
        return ((turn - 1) // n) * n
    return turn - 1


def consistency_set(
    protocol: ProtocolSpec,
    processor: int,
    transcript: Transcript,
    up_to_turn: int | None = None,
) -> set[BitVector]:
    """Inputs of one processor consistent with its recorded broadcasts.

    An input z is consistent with the first ``up_to_turn`` turns if
    replaying the processor's next-bit function against the visible
    prefixes reproduces every bit it is recorded to have sent.
    """
    if protocol.m > 24:
        raise CapacityError(f"consistency_set enumerates 2^{protocol.m} inputs; cap is 2^24")
    if up_to_turn is None:
        up_to_turn = len(transcript)
    n = protocol.n
    checks = []
    prefix_cache: dict[int, Transcript] = {}
    for turn, spk, bit in transcript.entries[:up_to_turn]:
        if spk != processor:
            continue
        vis = _visible_prefix_len(protocol.schedule, n, turn)
        if vis not in prefix_cache:
            prefix_cache[vis] = transcript.prefix(vis)
        checks.append((prefix_cache[vis], bit))
    result = set()
    next_bit = protocol.next_bit
    for val in range(1 << protocol.m):
        z = BitVector.from_int(val, protocol.m)
        if all(next_bit(processor, z, pre) == bit for pre, bit in checks):
            result.add(z)
    return result


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _schedule_to_obj(schedule: Schedule) -> dict:
    if isinstance(schedule, SimultaneousRounds):
        return {"kind": "simultaneous_rounds", "rounds": schedule.rounds}
    return {"kind": "sequential_turns", "turns": schedule.turns}


def _schedule_from_obj(obj: dict) -> Schedule:
    if obj["kind"] == "simultaneous_rounds":
        return SimultaneousRounds(obj["rounds"])
    if obj["kind"] == "sequential_turns":
        return SequentialTurns(obj["turns"])
    raise DomainError(f"unknown schedule kind {obj['kind']!r}")


def transcript_to_json(transcript: Transcript, schedule: Schedule) -> str:
    return json.dumps(
        {
            "schedule": _schedule_to_obj(schedule),
            "entries": [[t, s, b] for (t, s, b) in transcript.entries],
        },
        sort_keys=True,
    )


def transcript_from_json(text: str) -> tuple[Transcript, Schedule]:
    obj = json.loads(text)
    transcript = Transcript([(t, s, b) for t, s, b in obj["entries"]])
    return transcript, _schedule_from_obj(obj["schedule"])
