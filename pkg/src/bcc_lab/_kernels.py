"""Hot numeric kernels: packed GF(2) rank and bitset max-clique search.

Two interchangeable backends live here.  The default compiles the
kernels with numba's ``@njit``; setting the environment variable
``BCC_LAB_NO_NUMBA=1`` before import selects the pure-Python bitset
fallback instead.  ``benchmarks/bench_kernels.py`` compares the two.

Bit packing convention (shared with gf2core): column ``j`` (0-based) of
a row lives in word ``j >> 6`` at bit ``j & 63``.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("BCC_LAB_NO_NUMBA", "") not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def backend_name() -> str:
    return "numba" if USE_NUMBA else "python"


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a (..., ncols) 0/1 array into (..., W) uint64 words."""
    bits = np.asarray(bits, dtype=np.uint64)
    ncols = bits.shape[-1]
    nwords = max(1, (ncols + 63) // 64)
    padded = np.zeros(bits.shape[:-1] + (nwords * 64,), dtype=np.uint64)
    padded[..., :ncols] = bits
    padded = padded.reshape(bits.shape[:-1] + (nwords, 64))
    shifts = np.uint64(1) << np.arange(64, dtype=np.uint64)
    return (padded * shifts).sum(axis=-1, dtype=np.uint64)


def _words_to_ints(words: np.ndarray) -> list[int]:
    out = []
    for row in words:
        val = 0
        for w, word in enumerate(row):
            val |= int(word) << (64 * w)
        out.append(val)
    return out


# ---------------------------------------------------------------------------
# Pure-Python backend (int bitsets)
# ---------------------------------------------------------------------------


def _rank_ints(rows: list[int], ncols: int) -> int:
    work = rows[:]
    nrows = len(work)
    rank = 0
    for col in range(ncols):
        mask = 1 << col
        pivot = -1
        for r in range(rank, nrows):
            if work[r] & mask:
                pivot = r
                break
        if pivot < 0:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(rank + 1, nrows):
            if work[r] & mask:
                work[r] ^= work[rank]
        rank += 1
        if rank == nrows:
            break
    return rank


def _color_sort_int(adj: list[int], P: int) -> tuple[list[int], list[int]]:
    order: list[int] = []
    colors: list[int] = []
    uncolored = P
    c = 0
    while uncolored:
        c += 1
        avail = uncolored
        while avail:
            bit = avail & -avail
            v = bit.bit_length() - 1
            order.append(v)
            colors.append(c)
            uncolored ^= bit
            avail = (avail ^ bit) & ~adj[v]
    return order, colors


def _max_clique_ints(adj: list[int], cand: int, target: int) -> tuple[int, int]:
    best = 0
    best_mask = 0

    def expand(rmask: int, rsize: int, P: int) -> None:
        nonlocal best, best_mask
        order, colors = _color_sort_int(adj, P)
        for i in range(len(order) - 1, -1, -1):
            if best >= target:
                return
            v = order[i]
            if rsize + colors[i] <= best:
                return
            vbit = 1 << v
            P &= ~vbit
            child = P & adj[v]
            if child == 0:
                if rsize + 1 > best:
                    best = rsize + 1
                    best_mask = rmask | vbit
            else:
                expand(rmask | vbit, rsize + 1, child)

    expand(0, 0, cand)
    return best, best_mask


# ---------------------------------------------------------------------------
# Numba backend
# ---------------------------------------------------------------------------

if USE_NUMBA:
    _U0 = np.uint64(0)
    _U1 = np.uint64(1)
    _U2 = np.uint64(2)
    _U4 = np.uint64(4)
    _U56 = np.uint64(56)
    _M1 = np.uint64(0x5555555555555555)
    _M2 = np.uint64(0x3333333333333333)
    _M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
    _H01 = np.uint64(0x0101010101010101)

    @njit(cache=True, inline="always")
    def _popcount64(x):
        x = x - ((x >> _U1) & _M1)
        x = (x & _M2) + ((x >> _U2) & _M2)
        x = (x + (x >> _U4)) & _M4
        return np.int64((x * _H01) >> _U56)

    @njit(cache=True, inline="always")
    def _trailing_zeros(x):
        return _popcount64((x & (_U0 - x)) - _U1)

    @njit(cache=True)
    def _rank_words_nb(words, ncols):
        nrows, nwords = words.shape
        work = words.copy()
        rank = 0
        for col in range(ncols):
            w = col >> 6
            mask = _U1 << np.uint64(col & 63)
            pivot = -1
            for r in range(rank, nrows):
                if work[r, w] & mask:
                    pivot = r
                    break
            if pivot < 0:
                continue
            if pivot != rank:
                for ww in range(nwords):
                    tmp = work[rank, ww]
                    work[rank, ww] = work[pivot, ww]
                    work[pivot, ww] = tmp
            for r in range(rank + 1, nrows):
                if work[r, w] & mask:
                    for ww in range(nwords):
                        work[r, ww] ^= work[rank, ww]
            rank += 1
            if rank == nrows:
                break
        return rank

    @njit(cache=True)
    def _batch_rank_nb(words, ncols):
        out = np.empty(words.shape[0], np.int64)
        for t in range(words.shape[0]):
            out[t] = _rank_words_nb(words[t], ncols)
        return out

    @njit(cache=True)
    def _color_sort_nb(adj, P, order_out, color_out):
        nwords = adj.shape[1]
        uncolored = P.copy()
        avail = np.empty(nwords, np.uint64)
        count = 0
        color = 0
        more = True
        while more:
            more = False
            for w in range(nwords):
                if uncolored[w] != _U0:
                    more = True
                    break
            if not more:
                break
            color += 1
            for w in range(nwords):
                avail[w] = uncolored[w]
            while True:
                v = -1
                for w in range(nwords):
                    if avail[w] != _U0:
                        v = 64 * w + int(_trailing_zeros(avail[w]))
                        break
                if v < 0:
                    break
                order_out[count] = v
                color_out[count] = color
                count += 1
                bit = _U1 << np.uint64(v & 63)
                uncolored[v >> 6] &= ~bit
                avail[v >> 6] &= ~bit
                for w in range(nwords):
                    avail[w] &= ~adj[v, w]
        return count

    @njit(cache=True)
    def _max_clique_nb(adj, cand, target):
        nv = adj.shape[0]
        nwords = adj.shape[1]
        maxd = nv + 1
        p_stack = np.zeros((maxd, nwords), np.uint64)
        order_stack = np.zeros((maxd, nv), np.int32)
        color_stack = np.zeros((maxd, nv), np.int32)
        idx_stack = np.zeros(maxd, np.int32)
        chosen = np.zeros(maxd, np.int32)
        witness = np.zeros(nwords, np.uint64)
        best = 0

        count = _color_sort_nb(adj, cand, order_stack[0], color_stack[0])
        if count == 0:
            return 0, witness
        for w in range(nwords):
            p_stack[0, w] = cand[w]
        idx_stack[0] = count - 1
        depth = 0
        while depth >= 0:
            idx = idx_stack[depth]
            if idx < 0:
                depth -= 1
                continue
            v = order_stack[depth, idx]
            if depth + color_stack[depth, idx] <= best:
                depth -= 1
                continue
            idx_stack[depth] = idx - 1
            p_stack[depth, v >> 6] &= ~(_U1 << np.uint64(v & 63))
            chosen[depth] = v
            child_empty = True
            for w in range(nwords):
                cw = p_stack[depth, w] & adj[v, w]
                p_stack[depth + 1, w] = cw
                if cw != _U0:
                    child_empty = False
            size = depth + 1
            if child_empty:
                if size > best:
                    best = size
                    for w in range(nwords):
                        witness[w] = _U0
                    for d in range(size):
                        u = chosen[d]
                        witness[u >> 6] |= _U1 << np.uint64(u & 63)
                    if best >= target:
                        return best, witness
            else:
                nchild = _color_sort_nb(
                    adj, p_stack[depth + 1], order_stack[depth + 1], color_stack[depth + 1]
                )
                if size + color_stack[depth + 1, nchild - 1] > best:
                    idx_stack[depth + 1] = nchild - 1
                    depth += 1
        return best, witness


# ---------------------------------------------------------------------------
# Public dispatch
# ---------------------------------------------------------------------------


def rank_words(words: np.ndarray, ncols: int) -> int:
    """Rank over GF(2) of packed rows; does not modify its argument."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    if words.shape[0] == 0 or ncols == 0:
        return 0
    if USE_NUMBA:
        return int(_rank_words_nb(words, ncols))
    return _rank_ints(_words_to_ints(words), ncols)


def batch_rank(words: np.ndarray, ncols: int) -> np.ndarray:
    """Ranks of a (T, nrows, W) stack of packed matrices."""
    words = np.ascontiguousarray(words, dtype=np.uint64)
    if words.shape[1] == 0 or ncols == 0:
        return np.zeros(words.shape[0], dtype=np.int64)
    if USE_NUMBA:
        return _batch_rank_nb(words, ncols)
    return np.array(
        [_rank_ints(_words_to_ints(m), ncols) for m in words], dtype=np.int64
    )


def max_clique_mask(adj_words: np.ndarray, cand_words: np.ndarray, target: int) -> tuple[int, np.ndarray]:
    """Largest clique within the candidate set, as (size, packed vertex mask).

    The search stops as soon as a clique of size ``target`` is found, so
    decision queries can pass a small target for extra pruning.
    """
    adj_words = np.ascontiguousarray(adj_words, dtype=np.uint64)
    cand_words = np.ascontiguousarray(cand_words, dtype=np.uint64)
    nwords = adj_words.shape[1] if adj_words.ndim == 2 else 1
    if adj_words.shape[0] == 0 or not cand_words.any():
        return 0, np.zeros(nwords, dtype=np.uint64)
    if USE_NUMBA:
        size, witness = _max_clique_nb(adj_words, cand_words, target)
        return int(size), witness
    adj_ints = _words_to_ints(adj_words)
    cand_int = _words_to_ints(cand_words.reshape(1, -1))[0]
    size, mask = _max_clique_ints(adj_ints, cand_int, target)
    out = np.zeros(nwords, dtype=np.uint64)
    for w in range(nwords):
        out[w] = np.uint64((mask >> (64 * w)) & 0xFFFFFFFFFFFFFFFF)
    return size, out


def warmup() -> None:
    """Trigger JIT compilation so timed sections exclude compile cost."""
    rng = np.random.default_rng(0)
    bits = rng.integers(0, 2, size=(4, 6, 6), dtype=np.uint8)
    batch_rank(pack_rows(bits), 6)
    rank_words(pack_rows(bits[0]), 6)
    adj = np.zeros((3, 1), dtype=np.uint64)
    adj[0, 0] = 0b010
    adj[1, 0] = 0b101
    adj[2, 0] = 0b010
    cand = np.array([0b111], dtype=np.uint64)
    max_clique_mask(adj, cand, 4)
