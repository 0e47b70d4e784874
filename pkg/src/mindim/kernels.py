"""Hot inner-loop kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import time from the MINDIM_KERNELS
environment variable: "numba" or "python".  Unset means numba when it is
importable, python otherwise.  Both backends compute bit-identical
results; benchmarks/bench_kernels.py compares their speed.
"""

from __future__ import annotations

import os

import numpy as np

_choice = os.environ.get("MINDIM_KERNELS", "").strip().lower()
if _choice not in ("", "numba", "python"):
    raise ValueError(f"MINDIM_KERNELS must be 'numba' or 'python', got {_choice!r}")

if _choice in ("", "numba"):
    try:
        import numba

        HAVE_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA and _choice in ("", "numba")

if USING_NUMBA:
    def _jit(f):
        return numba.njit(cache=True)(f)
else:
    def _jit(f):
        return f

BACKEND = "numba" if USING_NUMBA else "python"


# ---------------------------------------------------------------------------
# orbit of a point with Schreier vector


def _orbit_schreier_impl(gens, start):
    k, n = gens.shape
    sv_gen = np.full(n, -1, dtype=np.int32)
    sv_parent = np.full(n, -1, dtype=np.int32)
    orbit = np.empty(n, dtype=np.int32)
    orbit[0] = start
    sv_gen[start] = -2
    size = 1
    head = 0
    while head < size:
        p = orbit[head]
        head += 1
        for g in range(k):
            q = gens[g, p]
            if sv_gen[q] == -1:
                sv_gen[q] = g
                sv_parent[q] = p
                orbit[size] = q
                size += 1
    return orbit[:size].copy(), sv_gen, sv_parent


_orbit_schreier_fast = _jit(_orbit_schreier_impl)


def orbit_schreier(gens: np.ndarray, start: int):
    """BFS orbit of `start` under generator image rows.

    Returns (orbit in discovery order, sv_gen, sv_parent); sv_gen[p] is the
    generator index whose image of sv_parent[p] is p, -2 at the root and -1
    off the orbit.
    """
    gens = np.ascontiguousarray(gens, dtype=np.int32)
    if gens.ndim != 2:
        raise ValueError("gens must be a 2-d array of image rows")
    return _orbit_schreier_fast(gens, start)


# ---------------------------------------------------------------------------
# minimal block system seeded with {0, w} (transitive actions)


def _min_block_impl(gens, w):
    k, n = gens.shape
    rep = np.arange(n, dtype=np.int32)

    def find(rep, x):
        r = x
        while rep[r] != r:
            r = rep[r]
        while rep[x] != r:
            nxt = rep[x]
            rep[x] = r
            x = nxt
        return r

    # queue of merged pairs to propagate through the generators
    qa = np.empty(n * (k + 1), dtype=np.int32)
    qb = np.empty(n * (k + 1), dtype=np.int32)
    qa[0] = 0
    qb[0] = w
    head = 0
    tail = 1
    ra = find(rep, 0)
    rb = find(rep, w)
    if ra != rb:
        rep[max(ra, rb)] = min(ra, rb)
    while head < tail:
        a = qa[head]
        b = qb[head]
        head += 1
        for g in range(k):
            x = find(rep, gens[g, a])
            y = find(rep, gens[g, b])
            if x != y:
                if x > y:
                    x, y = y, x
                rep[y] = x
                if tail >= qa.shape[0]:
                    qa2 = np.empty(qa.shape[0] * 2, dtype=np.int32)
                    qb2 = np.empty(qb.shape[0] * 2, dtype=np.int32)
                    qa2[:tail] = qa
                    qb2[:tail] = qb
                    qa = qa2
                    qb = qb2
                qa[tail] = x
                qb[tail] = y
                tail += 1
    out = np.empty(n, dtype=np.int32)
    for x in range(n):
        out[x] = find(rep, x)
    return out


_min_block_fast = _jit(_min_block_impl)


def min_block_reps(gens: np.ndarray, w: int) -> np.ndarray:
    """Class representatives of the minimal G-congruence merging 0 and w."""
    gens = np.ascontiguousarray(gens, dtype=np.int32)
    return _min_block_fast(gens, int(w))


# ---------------------------------------------------------------------------
# Monte Carlo non-base counting
#
# fix-set data: for each sampled tuple of points we ask whether some
# prime-order element fixes all of them.  Elements are represented by their
# fixed-point sets, deduplicated; `indptr`/`ids` give, per point, the sorted
# list of set ids containing that point, and `bits` is the set-by-point
# bitmask matrix (row = set id, packed uint64 words).


def _mc_count_impl(samples, indptr, ids, bits):
    trials, c = samples.shape
    hits = 0
    for t in range(trials):
        # anchor on the sampled point with the shortest candidate list
        best = 0
        best_len = indptr[samples[t, 0] + 1] - indptr[samples[t, 0]]
        for j in range(1, c):
            p = samples[t, j]
            length = indptr[p + 1] - indptr[p]
            if length < best_len:
                best_len = length
                best = j
        anchor = samples[t, best]
        found = False
        for idx in range(indptr[anchor], indptr[anchor + 1]):
            s = ids[idx]
            ok = True
            for j in range(c):
                p = samples[t, j]
                if (bits[s, p >> 6] >> np.uint64(p & 63)) & np.uint64(1) == np.uint64(0):
                    ok = False
                    break
            if ok:
                found = True
                break
        if found:
            hits += 1
    return hits


_mc_count_fast = _jit(_mc_count_impl)


def mc_nonbase_count(samples, indptr, ids, bits) -> int:
    """Count sampled tuples covered by some recorded fixed-point set."""
    return int(
        _mc_count_fast(
            np.ascontiguousarray(samples, dtype=np.int32),
            np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(ids, dtype=np.int32),
            np.ascontiguousarray(bits, dtype=np.uint64),
        )
    )


# ---------------------------------------------------------------------------
# GF(q) batched matrix product through mul/add tables (codes, 0 = zero)


def _gf_matmul_impl(A, B, mul, add):
    m, r, s = A.shape
    s2, c = B.shape
    out = np.zeros((m, r, c), dtype=A.dtype)
    for i in range(m):
        for a in range(r):
            for b in range(c):
                acc = 0
                for k in range(s):
                    acc = add[acc, mul[A[i, a, k], B[k, b]]]
                out[i, a, b] = acc
    return out


_gf_matmul_fast = _jit(_gf_matmul_impl)


def gf_matmul_batch(A: np.ndarray, B: np.ndarray, mul: np.ndarray, add: np.ndarray):
    """Batched product of code matrices A (m,r,s) by a single B (s,c)."""
    A = np.ascontiguousarray(A, dtype=np.uint16)
    B = np.ascontiguousarray(B, dtype=np.uint16)
    return _gf_matmul_fast(A, B, mul, add)


def _gf_matmul_pair_impl(A, B, mul, add):
    m, r, s = A.shape
    _, s2, c = B.shape
    out = np.zeros((m, r, c), dtype=A.dtype)
    for i in range(m):
        for a in range(r):
            for b in range(c):
                acc = 0
                for k in range(s):
                    acc = add[acc, mul[A[i, a, k], B[i, k, b]]]
                out[i, a, b] = acc
    return out


_gf_matmul_pair_fast = _jit(_gf_matmul_pair_impl)


def gf_matmul_pair(A: np.ndarray, B: np.ndarray, mul: np.ndarray, add: np.ndarray):
    """Elementwise-batch product: out[i] = A[i] @ B[i] over GF tables."""
    A = np.ascontiguousarray(A, dtype=np.uint16)
    B = np.ascontiguousarray(B, dtype=np.uint16)
    return _gf_matmul_pair_fast(A, B, mul, add)
