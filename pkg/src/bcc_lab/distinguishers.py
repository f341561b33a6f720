"""Built-in acceptor protocols for generator-vs-uniform experiments.

Each named distinguisher is a j-round protocol plus an acceptance rule
on the final transcript:

* ``constant``   - everyone broadcasts 0; accept always (advantage 0).
* ``first-bits`` - processor i broadcasts input bit r in round r;
  accept when all round-1 bits agree.
* ``parity``     - processor i broadcasts its input's parity against a
  fixed public probe vector per round; accept when two rounds produce
  identical bit columns.  Under the matrix generator two probes whose
  difference is killed by [I | M] collide for about a 2^-k fraction of
  matrices, so the advantage decays with the seed length.
* ``rank-probe`` - same broadcasts; accept when the n x j transcript
  matrix is rank-deficient over GF(2).

Probe vectors are derived from a fixed probe seed so a named
distinguisher is one deterministic protocol.
"""

from __future__ import annotations

import numpy as np

from ._kernels import pack_rows, rank_words
from .errors import DomainError
from .gf2core import BitVector, dot
from .model import ProtocolSpec, SimultaneousRounds, Transcript
from .streams import stream_rng

DISTINGUISHER_NAMES = ("constant", "first-bits", "parity", "rank-probe")

PROBE_SEED = 0x9D2C

__all__ = ["DISTINGUISHER_NAMES", "PROBE_SEED", "build_distinguisher"]


def _round_columns(transcript: Transcript, n: int, rounds: int) -> np.ndarray:
    bits = np.fromiter(
        (e[2] for e in transcript.entries), dtype=np.uint8, count=rounds * n
    )
    return bits.reshape(rounds, n)


def build_distinguisher(name: str, n: int, m: int, rounds: int):
    """Returns (protocol, acceptor) for a named distinguisher."""
    if name == "constant":

        def next_bit(i: int, z: BitVector, p: Transcript) -> int:
            return 0

        def acceptor(transcript: Transcript, outputs) -> int:
            return 1

    elif name == "first-bits":
        if m < rounds:
            raise DomainError(f"first-bits needs m >= rounds, got m={m}, rounds={rounds}")

        def next_bit(i: int, z: BitVector, p: Transcript) -> int:
            r = len(p) // n + 1
            return z[r]

        def acceptor(transcript: Transcript, outputs) -> int:
            col = _round_columns(transcript, n, rounds)[0]
            return 1 if (col == col[0]).all() else 0

    elif name in ("parity", "rank-probe"):
        probe_rng = stream_rng(PROBE_SEED, name, n, m, rounds)
        probes = [
            BitVector(probe_rng.integers(0, 2, size=m, dtype=np.uint8))
            for _ in range(rounds)
        ]
        probe_ints = [v.as_int for v in probes]

        def next_bit(i: int, z: BitVector, p: Transcript) -> int:
            r = len(p) // n
            return (z.as_int & probe_ints[r]).bit_count() & 1

        if name == "parity":

            def acceptor(transcript: Transcript, outputs) -> int:
                cols = _round_columns(transcript, n, rounds)
                for a in range(rounds):
                    for b in range(a + 1, rounds):
                        if (cols[a] == cols[b]).all():
                            return 1
                return 0

        else:

            def acceptor(transcript: Transcript, outputs) -> int:
                cols = _round_columns(transcript, n, rounds)
                words = pack_rows(cols.T)
                return 1 if rank_words(words, rounds) < min(n, rounds) else 0

    else:
        raise DomainError(
            f"unknown distinguisher {name!r}; choose from {DISTINGUISHER_NAMES}"
        )

    def output_map(i: int, z: BitVector, p: Transcript) -> BitVector:
        return BitVector.zeros(0)

    protocol = ProtocolSpec(
        n=n,
        m=m,
        next_bit=next_bit,
        output_map=output_map,
        schedule=SimultaneousRounds(rounds),
        name=f"{name}(n={n},m={m},j={rounds})",
    )
    return protocol, acceptor
