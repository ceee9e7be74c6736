"""Prime supply: a sieved table of small primes plus deterministic 64-bit
primality testing for everything beyond it.

The search only ever asks "next prime after p", so the table stores the
primes themselves rather than a bit array.  Queries past the table fall
back to candidate stepping checked with a Miller-Rabin witness set that is
proven deterministic for all n < 2^64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import accel

__all__ = [
    "U64_MAX",
    "DEFAULT_SIEVE_PRIMES",
    "PrimeRangeError",
    "PrimeRangeExhaustedError",
    "PrimeSource",
    "build",
    "is_prime",
]

U64_MAX = 2**64 - 1
DEFAULT_SIEVE_PRIMES = 5_000_000


class PrimeRangeError(ValueError):
    """Primality was asked outside [0, 2^64), where the test is deterministic."""


class PrimeRangeExhaustedError(RuntimeError):
    """next_prime would have to exceed the configured hard cap."""


# Witness set deterministic for every n < 2^64 (7-base Miller-Rabin).
_MR_BASES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality for 0 <= n < 2^64.

    Raises PrimeRangeError outside that range rather than returning a
    probabilistic answer.
    """
    if n < 0 or n > U64_MAX:
        raise PrimeRangeError(f"{n} outside the deterministic range [0, 2^64)")
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < 41 * 41:
        return True
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in _MR_BASES:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _nth_prime_bound(n: int) -> int:
    # p_n < n (ln n + ln ln n) for n >= 6
    if n < 6:
        return 15
    ln = math.log(n)
    return int(n * (ln + math.log(ln))) + 1


@dataclass(frozen=True, eq=False)
class PrimeSource:
    """Immutable prime table; safe for unrestricted concurrent reads."""

    sieve_limit: int
    sieved: np.ndarray  # ascending int64, exactly sieve_limit primes
    hard_cap: int = U64_MAX

    def next_prime(self, p: int) -> int:
        """Smallest prime strictly greater than p.

        Served from the table when possible, otherwise by candidate
        stepping with the deterministic test.  Raises
        PrimeRangeExhaustedError if the answer would exceed hard_cap.
        """
        if p >= self.hard_cap:
            raise PrimeRangeExhaustedError(
                f"no prime above {p} within hard cap {self.hard_cap}"
            )
        if p < int(self.sieved[-1]):
            i = int(np.searchsorted(self.sieved, p, side="right"))
            q = int(self.sieved[i])
        else:
            # p >= sieved[-1] >= 2, so candidates are odd and > 2
            q = p + 1
            if q % 2 == 0:
                q += 1
            while True:
                if q > self.hard_cap:
                    raise PrimeRangeExhaustedError(
                        f"no prime above {p} within hard cap {self.hard_cap}"
                    )
                if is_prime(q):
                    break
                q += 2
        if q > self.hard_cap:
            raise PrimeRangeExhaustedError(
                f"next prime after {p} is {q}, beyond hard cap {self.hard_cap}"
            )
        return q


def build(sieve_limit: int = DEFAULT_SIEVE_PRIMES, hard_cap: int = U64_MAX) -> PrimeSource:
    """Sieve the first sieve_limit primes.

    Memory and time scale with the sieve size (the default of 5e6 primes
    sieves up to ~8.7e7 and takes on the order of a second); resource
    exhaustion surfaces as the allocator's error.
    """
    if sieve_limit < 1:
        raise ValueError("sieve_limit must be >= 1")
    if not 2 <= hard_cap <= U64_MAX:
        raise ValueError("hard_cap must lie in [2, 2^64 - 1]")
    bound = _nth_prime_bound(sieve_limit)
    primes = accel.primes_upto(bound)
    while primes.size < sieve_limit:  # unreachable for n >= 6; tiny-n safety
        bound *= 2
        primes = accel.primes_upto(bound)
    return PrimeSource(sieve_limit, primes[:sieve_limit].copy(), hard_cap)
