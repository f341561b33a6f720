"""Broadcast congested clique laboratory.

A deterministic one-bit-broadcast protocol simulator, the GF(2) matrix
pseudo-random generator with its sharing schedule, planted-clique input
families and the recovery protocol, a seed-space PRG breaker, and exact
plus Monte Carlo statistics for transcript distributions.
"""

__version__ = "0.1.0"

from . import distributions, gf2core, model, prg, protocols, stats, streams

__all__ = [
    "__version__",
    "gf2core",
    "distributions",
    "model",
    "prg",
    "protocols",
    "stats",
    "streams",
]
