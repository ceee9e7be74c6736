"""Hot numeric kernels: numba-compiled, with a pure-numpy fallback.

The backend is chosen once at import time.  numba is used when it imports
cleanly; setting the environment variable ``WEIRDSEARCH_NUMBA`` to
``0``/``off``/``false`` forces the numpy path, and ``1``/``on``/``true``
turns a missing numba into an import error instead of a silent fallback.
Both implementations of every kernel stay importable so they can be
checked against each other and timed side by side (``weirdsearch bench``).

Everything here operates on values that provably fit in int64; callers
that may exceed that range (the exact search engine does) must stay on
arbitrary-precision Python integers and never enter these kernels.
"""

from __future__ import annotations

import os
from math import isqrt

import numpy as np

__all__ = [
    "HAVE_NUMBA",
    "NUMBA_ENABLED",
    "backend_name",
    "primes_upto",
    "spf_upto",
    "sigma_upto",
    "subset_reachable",
    "branch_bound",
    "oracle_code",
]

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba installed
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("WEIRDSEARCH_NUMBA", "auto").strip().lower()
if _flag in ("0", "off", "false", "no"):
    NUMBA_ENABLED = False
elif _flag in ("1", "on", "true", "yes"):
    if not HAVE_NUMBA:
        raise ImportError(
            f"WEIRDSEARCH_NUMBA={_flag!r} requires numba, which failed to import"
        )
    NUMBA_ENABLED = True
else:
    NUMBA_ENABLED = HAVE_NUMBA


def backend_name() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if NUMBA_ENABLED else "numpy"


# Divisor scratch size: tau(n) < 1000 for every n <= 1e8, far below this.
_DIVBUF = 4096


# ---------------------------------------------------------------------------
# numpy implementations


def _primes_upto_numpy(limit: int) -> np.ndarray:
    if limit < 2:
        return np.empty(0, np.int64)
    composite = np.zeros(limit + 1, np.bool_)
    composite[:2] = True
    for p in range(2, isqrt(limit) + 1):
        if not composite[p]:
            composite[p * p :: p] = True
    return np.flatnonzero(~composite).astype(np.int64)


def _spf_upto_numpy(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, np.int64)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            view = spf[p * p :: p]
            view[view == 0] = p
    untouched = np.flatnonzero(spf[2:] == 0) + 2
    spf[untouched] = untouched
    return spf


def _sigma_upto_numpy(limit: int) -> np.ndarray:
    sig = np.zeros(limit + 1, np.int64)
    for d in range(1, limit + 1):
        sig[d::d] += d
    return sig


def _subset_reachable_numpy(items: np.ndarray, target: int) -> bool:
    if target == 0:
        return True
    reach = np.zeros(target + 1, np.bool_)
    reach[0] = True
    for d in items:
        d = int(d)
        if 0 < d <= target:
            reach[d:] |= reach[: target + 1 - d]
            if reach[target]:
                return True
    return bool(reach[target])


def _oracle_code_numpy(n: int) -> int:
    r = isqrt(n)
    cand = np.arange(1, r + 1, dtype=np.int64)
    lo = cand[n % cand == 0]
    divs = np.unique(np.concatenate((lo, n // lo)))
    a = int(divs.sum()) - 2 * n
    if a < 0:
        return 0
    if a == 0:
        return 1
    items = divs[(divs <= a) & (divs < n)][::-1]
    return 2 if _subset_reachable_numpy(items, a) else 3


# ---------------------------------------------------------------------------
# numba implementations (compiled on first use, cached on disk)

if HAVE_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _primes_upto_numba(limit):
        if limit < 2:
            return np.empty(0, np.int64)
        composite = np.zeros(limit + 1, np.bool_)
        composite[0] = True
        composite[1] = True
        p = 2
        while p * p <= limit:
            if not composite[p]:
                for q in range(p * p, limit + 1, p):
                    composite[q] = True
            p += 1
        count = 0
        for i in range(2, limit + 1):
            if not composite[i]:
                count += 1
        out = np.empty(count, np.int64)
        k = 0
        for i in range(2, limit + 1):
            if not composite[i]:
                out[k] = i
                k += 1
        return out

    @njit(cache=True)
    def _spf_upto_numba(limit):
        spf = np.zeros(limit + 1, np.int64)
        p = 2
        while p * p <= limit:
            if spf[p] == 0:
                for q in range(p * p, limit + 1, p):
                    if spf[q] == 0:
                        spf[q] = p
            p += 1
        for i in range(2, limit + 1):
            if spf[i] == 0:
                spf[i] = i
        return spf

    @njit(cache=True)
    def _sigma_upto_numba(limit):
        sig = np.zeros(limit + 1, np.int64)
        for d in range(1, limit + 1):
            for q in range(d, limit + 1, d):
                sig[q] += d
        return sig

    @njit(cache=True)
    def _subset_reachable_numba(items, target):
        # Reachable sums tracked as a packed bitset: bit s of words <=> some
        # subset of the items seen so far sums to s.  words |= words << d.
        if target == 0:
            return True
        nw = (target >> 6) + 1
        words = np.zeros(nw, np.uint64)
        words[0] = np.uint64(1)
        tw = target >> 6
        tb = np.uint64(target & 63)
        one = np.uint64(1)
        for idx in range(items.size):
            d = items[idx]
            if d <= 0 or d > target:
                continue
            ws = d >> 6
            bs = np.uint64(d & 63)
            if bs == np.uint64(0):
                for w in range(nw - 1, ws - 1, -1):
                    words[w] |= words[w - ws]
            else:
                inv = np.uint64(64) - bs
                for w in range(nw - 1, ws, -1):
                    words[w] |= (words[w - ws] << bs) | (words[w - ws - 1] >> inv)
                words[ws] |= words[0] << bs
            if (words[tw] >> tb) & one:
                return True
        return ((words[tw] >> tb) & one) != np.uint64(0)

    @njit(cache=True)
    def _branch_bound_numba(items, target, budget):
        # Depth-first take-or-skip over descending items; returns 1 found,
        # 0 not found, -1 node budget exhausted (budget < 0: unlimited).
        n = items.size
        suffix = np.zeros(n + 1, np.int64)
        for i in range(n - 1, -1, -1):
            suffix[i] = suffix[i + 1] + items[i]
        stack_i = np.empty(n + 2, np.int64)
        stack_t = np.empty(n + 2, np.int64)
        stack_i[0] = 0
        stack_t[0] = target
        top = 1
        nodes = 0
        while top > 0:
            top -= 1
            i = stack_i[top]
            t = stack_t[top]
            while True:
                if t == 0:
                    return 1
                while i < n and items[i] > t:
                    i += 1
                if i < n and items[i] == t:
                    return 1
                rem = suffix[i]
                if rem < t:
                    break
                if rem == t:
                    return 1
                if 2 * t > rem:
                    t = rem - t
                    continue
                nodes += 1
                if budget >= 0 and nodes > budget:
                    return -1
                stack_i[top] = i + 1
                stack_t[top] = t
                top += 1
                t -= items[i]
                i += 1
        return 0

    @njit(cache=True)
    def _oracle_code_numba(n):
        buf = np.empty(_DIVBUF, np.int64)
        k = 0
        i = 1
        while i * i <= n:
            if n % i == 0:
                buf[k] = i
                k += 1
                j = n // i
                if j != i:
                    buf[k] = j
                    k += 1
                if k > _DIVBUF - 2:
                    return -1
            i += 1
        sigma = 0
        for idx in range(k):
            sigma += buf[idx]
        a = sigma - 2 * n
        if a < 0:
            return 0
        if a == 0:
            return 1
        divs = buf[:k]
        items = np.sort(divs[(divs <= a) & (divs < n)])[::-1].copy()
        return 2 if _subset_reachable_numba(items, a) else 3


# ---------------------------------------------------------------------------
# dispatchers


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit as an ascending int64 array."""
    if NUMBA_ENABLED:
        return _primes_upto_numba(limit)
    return _primes_upto_numpy(limit)


def spf_upto(limit: int) -> np.ndarray:
    """Smallest-prime-factor table for [0, limit]; entries 0 and 1 are 0."""
    if NUMBA_ENABLED:
        return _spf_upto_numba(limit)
    return _spf_upto_numpy(limit)


def sigma_upto(limit: int) -> np.ndarray:
    """Divisor-sum table for [0, limit] built by direct sieving."""
    if NUMBA_ENABLED:
        return _sigma_upto_numba(limit)
    return _sigma_upto_numpy(limit)


def subset_reachable(items: np.ndarray, target: int) -> bool:
    """Dense subset-sum reachability (the oracle-side solver).

    Exhaustive dynamic programming over [0, target]; independent of the
    branch-and-bound solver so the two can cross-check each other.
    """
    items = np.ascontiguousarray(items, dtype=np.int64)
    if NUMBA_ENABLED:
        return bool(_subset_reachable_numba(items, int(target)))
    return _subset_reachable_numpy(items, int(target))


def branch_bound(items: np.ndarray, target: int, budget: int = -1) -> int:
    """Compiled branch-and-bound subset-sum; only available under numba.

    Returns 1 (subset exists), 0 (none), or -1 (node budget exhausted).
    Callers must guarantee int64-safe magnitudes.
    """
    if not NUMBA_ENABLED:
        raise RuntimeError("branch_bound kernel requires the numba backend")
    items = np.ascontiguousarray(items, dtype=np.int64)
    return int(_branch_bound_numba(items, int(target), int(budget)))


def oracle_code(n: int) -> int:
    """Classify n by trial division plus dense subset-sum DP.

    Returns 0 deficient, 1 perfect, 2 semiperfect, 3 weird, -1 internal
    buffer overflow (unreachable for n within the supported oracle range).
    """
    if NUMBA_ENABLED:
        return int(_oracle_code_numba(int(n)))
    return _oracle_code_numpy(int(n))
