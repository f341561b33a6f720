"""Distributional statistics, boolean Fourier analysis, and validators
for the exactly checkable inequalities.

All logarithms are base 2.  Exact computations use doubles with 1e-10
tolerances; supports at desk scale (<= 2^24 outcomes) keep that safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import Pmf
from .errors import CapacityError, DimensionError, DomainError
from .gf2core import BitVector
from .model import ProtocolSpec, run

__all__ = [
    "BooleanFunctionTable",
    "DistanceReport",
    "AdvantageReport",
    "tv_distance",
    "empirical_tv",
    "entropy",
    "binary_entropy",
    "kl_divergence",
    "marginal_x",
    "conditional_y",
    "mutual_information",
    "fourier_coefficient",
    "validate_fourier_lemma",
    "validate_chain_rule",
    "validate_pinsker",
    "validate_entropy_fact",
    "validate_nb_concentration",
    "advantage",
]


# ---------------------------------------------------------------------------
# Distances
# ---------------------------------------------------------------------------


def tv_distance(p: Pmf, q: Pmf) -> float:
    """Statistical distance: half the l1 gap; missing outcomes count as 0."""
    keys = p.support() | q.support()
    return 0.5 * sum(abs(p.prob(k) - q.prob(k)) for k in keys)


@dataclass(frozen=True)
class DistanceReport:
    exact: float | None = None
    empirical: float | None = None
    stderr: float | None = None
    trials: int | None = None


def empirical_tv(
    sampler_a,
    sampler_b,
    trials: int,
    rng: np.random.Generator,
    bootstrap: int = 200,
) -> DistanceReport:
    """Plug-in TV between empirical histograms, with bootstrap stderr.

    Samplers are callables rng -> hashable outcome.  The plug-in
    estimator is biased upward for close distributions; the bias is
    bounded in tests by the identical-sampler case.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    counts_a: dict = {}
    counts_b: dict = {}
    for _ in range(trials):
        ka = sampler_a(rng)
        counts_a[ka] = counts_a.get(ka, 0) + 1
        kb = sampler_b(rng)
        counts_b[kb] = counts_b.get(kb, 0) + 1
    keys = sorted(set(counts_a) | set(counts_b))
    ca = np.array([counts_a.get(k, 0) for k in keys], dtype=np.float64)
    cb = np.array([counts_b.get(k, 0) for k in keys], dtype=np.float64)
    tv = 0.5 * np.abs(ca - cb).sum() / trials
    resampled = np.empty(bootstrap)
    pa, pb = ca / trials, cb / trials
    for i in range(bootstrap):
        ra = rng.multinomial(trials, pa)
        rb = rng.multinomial(trials, pb)
        resampled[i] = 0.5 * np.abs(ra - rb).sum() / trials
    stderr = float(resampled.std(ddof=1))
    return DistanceReport(empirical=float(tv), stderr=stderr, trials=trials)


# ---------------------------------------------------------------------------
# Information theory (base-2 throughout)
# ---------------------------------------------------------------------------


def entropy(p: Pmf) -> float:
    total = 0.0
    for prob in p.outcomes.values():
        if prob > 0.0:
            total -= prob * math.log2(prob)
    return total


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary_entropy needs x in [0,1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def kl_divergence(p: Pmf, q: Pmf) -> float:
    """D(p || q) in bits; +inf when p puts mass outside q's support."""
    total = 0.0
    for key, pp in p.outcomes.items():
        if pp <= 0.0:
            continue
        qq = q.prob(key)
        if qq <= 0.0:
            return math.inf
        total += pp * math.log2(pp / qq)
    return total


def marginal_x(joint: Pmf, split: int) -> Pmf:
    """Marginal on the first ``split`` bytes of each outcome key."""
    return joint.map(lambda key: key[:split])


def conditional_y(joint: Pmf, split: int, a: bytes, y_universe: list[bytes]) -> Pmf:
    """Conditional on X = a; uniform over the Y universe if a has no mass."""
    mass = 0.0
    acc: dict[bytes, float] = {}
    for key, p in joint.outcomes.items():
        if key[:split] == a:
            acc[key[split:]] = acc.get(key[split:], 0.0) + p
            mass += p
    if mass <= 0.0:
        return Pmf.uniform(y_universe)
    return Pmf({k: v / mass for k, v in acc.items()}, check=False)


def _mi_entropy_route(joint: Pmf, split: int) -> float:
    hx = entropy(marginal_x(joint, split))
    hy = entropy(joint.map(lambda key: key[split:]))
    return hx + hy - entropy(joint)


def _mi_kl_route(joint: Pmf, split: int) -> float:
    margx = marginal_x(joint, split)
    margy = joint.map(lambda key: key[split:])
    y_keys = sorted(margy.support())
    total = 0.0
    for a, pa in margx.outcomes.items():
        if pa <= 0.0:
            continue
        total += pa * kl_divergence(conditional_y(joint, split, a, y_keys), margy)
    return total


def mutual_information(joint: Pmf, split: int) -> float:
    """I(X;Y) for a joint pmf whose keys split into X = key[:split], Y = rest.

    Computed by entropy decomposition and cross-checked against the
    conditional-KL identity; the two must agree to 1e-10.
    """
    via_h = _mi_entropy_route(joint, split)
    via_kl = _mi_kl_route(joint, split)
    if abs(via_h - via_kl) > 1e-10:
        raise ArithmeticError(
            f"mutual information routes disagree: {via_h} vs {via_kl}"
        )
    return via_h


# ---------------------------------------------------------------------------
# Boolean Fourier analysis
# ---------------------------------------------------------------------------


class BooleanFunctionTable:
    """Truth table of f : {0,1}^arity -> {0,1}; index bit j-1 is coordinate j."""

    __slots__ = ("arity", "table")

    def __init__(self, arity: int, table) -> None:
        if arity > 20:
            raise CapacityError(f"arity {arity} exceeds cap 20")
        arr = np.ascontiguousarray(table, dtype=np.uint8)
        if arr.shape != (1 << arity,):
            raise DimensionError(
                f"table must have 2^{arity} entries, got shape {arr.shape}"
            )
        if arr.size and arr.max() > 1:
            raise ValueError("table entries must be 0 or 1")
        arr.flags.writeable = False
        self.arity = arity
        self.table = arr

    @classmethod
    def random(cls, arity: int, rng: np.random.Generator) -> "BooleanFunctionTable":
        return cls(arity, rng.integers(0, 2, size=1 << arity, dtype=np.uint8))

    @classmethod
    def from_callable(cls, arity: int, fn) -> "BooleanFunctionTable":
        table = [fn(BitVector.from_int(v, arity)) for v in range(1 << arity)]
        return cls(arity, table)

    def __call__(self, index: int) -> int:
        return int(self.table[index])


def fourier_coefficient(f: BooleanFunctionTable, subset) -> float:
    """E_x[f(x) * (-1)^(sum of x_i over i in subset)], subset 1-based."""
    mask = 0
    for i in subset:
        if not 1 <= i <= f.arity:
            raise DomainError(f"coordinate {i} outside 1..{f.arity}")
        mask |= 1 << (i - 1)
    idx = np.arange(1 << f.arity, dtype=np.uint32)
    signs = 1.0 - 2.0 * (np.bitwise_count(idx & np.uint32(mask)) & 1)
    return float((f.table * signs).mean())


def validate_fourier_lemma(f: BooleanFunctionTable) -> tuple[float, float]:
    """Both sides of the parity-extension bound for f on k+1 bits:
    sum over all secrets b of the squared gap between f's mean under
    uniform inputs and under parity-constrained inputs, versus E[f].

    Exact enumeration over all 2^k secrets; arity capped at 17.
    """
    if f.arity > 17:
        raise CapacityError(f"arity {f.arity} exceeds validator cap 17")
    k = f.arity - 1
    idx = np.arange(1 << f.arity, dtype=np.uint32)
    low = idx & np.uint32((1 << k) - 1)
    last = (idx >> np.uint32(k)) & np.uint32(1)
    table = f.table.astype(np.float64)
    mean_all = table.mean()
    lhs = 0.0
    chunk = 1 << 12
    for start in range(0, 1 << k, chunk):
        bs = np.arange(start, min(start + chunk, 1 << k), dtype=np.uint32)
        parities = np.bitwise_count(low[None, :] & bs[:, None]) & 1
        in_support = parities == last[None, :]
        means_b = (in_support * table[None, :]).sum(axis=1) / (1 << k)
        lhs += float(((means_b - mean_all) ** 2).sum())
    return lhs, float(mean_all)


# ---------------------------------------------------------------------------
# Inequality validators
# ---------------------------------------------------------------------------


def validate_chain_rule(d: Pmf, d_prime: Pmf, split: int) -> tuple[float, float]:
    """Both sides of the distance chain rule over X x Y outcome keys.

    Right side: marginal gap on X plus the expected conditional gap;
    when d_prime puts no mass on some a drawn from d's X-marginal, the
    conditional defaults to uniform on the observed Y universe.
    """
    lhs = tv_distance(d, d_prime)
    margd = marginal_x(d, split)
    margdp = marginal_x(d_prime, split)
    y_keys = sorted(
        {key[split:] for key in d.outcomes} | {key[split:] for key in d_prime.outcomes}
    )
    rhs = tv_distance(margd, margdp)
    for a, pa in margd.outcomes.items():
        if pa <= 0.0:
            continue
        cond_d = conditional_y(d, split, a, y_keys)
        cond_dp = conditional_y(d_prime, split, a, y_keys)
        rhs += pa * tv_distance(cond_d, cond_dp)
    return lhs, rhs


def validate_pinsker(p: Pmf, q: Pmf) -> tuple[float, float]:
    """(tv, sqrt(kl/2)); the bound is +inf on support violations."""
    tv = tv_distance(p, q)
    kl = kl_divergence(p, q)
    bound = math.inf if math.isinf(kl) else math.sqrt(0.5 * kl)
    return tv, bound


def validate_entropy_fact(p: float) -> bool:
    """Checks the high-entropy implications at one success probability:
    H(p) >= 0.9 forces p into [0.3, 0.7] and (1-H(p))/(p-1/2)^2 into [2, 3]."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must be in (0,1), got {p}")
    h = binary_entropy(p)
    if h < 0.9:
        return True
    if not 0.3 <= p <= 0.7:
        return False
    if p == 0.5:
        return True
    ratio = (1.0 - h) / (p - 0.5) ** 2
    return 2.0 <= ratio <= 3.0


def validate_nb_concentration(d_set: list[BitVector]) -> float:
    """Exact fraction of secrets b whose parity-slice of D deviates.

    D is a set of (k+1)-bit vectors; for each b the count N_b is the
    overlap of D with the support of the parity extension of b.  The
    returned value is the fraction of b with |N_b/|D| - 1/2| >= 2^(-k/8).
    """
    if not d_set:
        raise DomainError("D must be nonempty")
    lengths = {len(v) for v in d_set}
    if len(lengths) != 1:
        raise DimensionError("all vectors in D must share one length")
    k = lengths.pop() - 1
    if k > 16:
        raise CapacityError(f"k={k} exceeds cap 16")
    n_d = len(d_set)
    if len(set(v.key() for v in d_set)) != n_d:
        raise DomainError("D must contain distinct vectors")
    if n_d < 2 ** (k / 2):
        raise DomainError(f"|D| = {n_d} is below 2^(k/2) = {2 ** (k / 2):.1f}")
    ints = np.array([v.as_int for v in d_set], dtype=np.uint32)
    low = ints & np.uint32((1 << k) - 1)
    last = (ints >> np.uint32(k)) & np.uint32(1)
    threshold = 2.0 ** (-k / 8)
    bad = 0
    chunk = 1 << 12
    for start in range(0, 1 << k, chunk):
        bs = np.arange(start, min(start + chunk, 1 << k), dtype=np.uint32)
        parities = np.bitwise_count(low[None, :] & bs[:, None]) & 1
        n_b = (parities == last[None, :]).sum(axis=1)
        frac = n_b / n_d
        bad += int((np.abs(frac - 0.5) >= threshold).sum())
    return bad / (1 << k)


# ---------------------------------------------------------------------------
# Distinguisher experiments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdvantageReport:
    advantage: float
    stderr: float
    accept_a: float
    accept_b: float
    trials: int


def advantage(
    protocol: ProtocolSpec,
    world_a_sampler,
    world_b_sampler,
    trials: int,
    acceptor,
    rng: np.random.Generator,
) -> AdvantageReport:
    """|Pr_a[accept] - Pr_b[accept]| for a deterministic acceptor.

    Samplers map rng -> InputAssignment; the acceptor maps (transcript,
    outputs) -> 0/1.  The standard error combines both worlds' binomial
    errors.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    acc_a = 0
    acc_b = 0
    for _ in range(trials):
        ta, oa = run(protocol, world_a_sampler(rng))
        acc_a += 1 if acceptor(ta, oa) else 0
        tb, ob = run(protocol, world_b_sampler(rng))
        acc_b += 1 if acceptor(tb, ob) else 0
    pa = acc_a / trials
    pb = acc_b / trials
    stderr = math.sqrt(pa * (1 - pa) / trials + pb * (1 - pb) / trials)
    return AdvantageReport(abs(pa - pb), stderr, pa, pb, trials)
