import random
from math import isqrt

import pytest
from hypothesis import settings

from weirdsearch import primes

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def src_small():
    # primes through 17389; stepping covers anything beyond
    return primes.build(2_000)


@pytest.fixture(scope="session")
def src_tiny():
    # primes through 97; forces the sieve->stepping transition early
    return primes.build(25)


def sigma_trial(n: int) -> int:
    """Trial-division divisor sum; the tests' independent sigma."""
    total = 0
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            total += d
            q = n // d
            if q != d:
                total += q
    return total


def divisors_trial(n: int) -> list[int]:
    divs = []
    for d in range(1, isqrt(n) + 1):
        if n % d == 0:
            divs.append(d)
            q = n // d
            if q != d:
                divs.append(q)
    return sorted(divs)


def make_instance(rng: random.Random, n_max: int = 10**6):
    """Random subset-sum instance: distinct divisors of a random n, random target."""
    n = rng.randint(1, n_max)
    divs = divisors_trial(n)
    k = rng.randint(0, len(divs))
    items = sorted(rng.sample(divs, k), reverse=True)
    total = sum(items)
    target = rng.randint(0, total) if total else 0
    return items, target, total


def subset_oracle_bigint(items, target: int) -> bool:
    """Test-local dense subset-sum oracle on a Python-int bitmask."""
    if target == 0:
        return True
    mask = 1
    keep = (1 << (target + 1)) - 1
    for d in items:
        if 0 < d <= target:
            mask |= (mask << d) & keep
    return bool((mask >> target) & 1)
