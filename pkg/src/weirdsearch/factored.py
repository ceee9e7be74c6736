"""Exact arithmetic on naturals carried together with their factorization.

Every value travels with its ordered prime factorization, its divisor sum,
and the divisor sum of the value stripped of its largest prime power.  That
last field is what lets a child value N*p derive sigma(N*p) from sigma(N)
in a constant number of multiplications, with no division and no
refactorization.  All arithmetic uses Python's arbitrary-precision
integers, so results are exact at any bound and overflow cannot occur.
"""

from __future__ import annotations

from dataclasses import dataclass

from .primes import PrimeRangeError, is_prime

__all__ = [
    "Factors",
    "FactoredNumber",
    "InvalidFactorsError",
    "NoPredecessorError",
    "ONE",
    "abundance",
    "append_prime",
    "canonical",
    "divisors_up_to",
    "format_factors",
    "from_factors",
    "parse",
    "pred",
]

Factors = tuple[tuple[int, int], ...]


class InvalidFactorsError(ValueError):
    """A factor list violated its contract (ordering, primality, bad text)."""


class NoPredecessorError(ValueError):
    """Asked for the predecessor of 1, which has none."""


def _geometric_sum(p: int, m: int) -> int:
    """1 + p + ... + p**m, exactly."""
    total = 1
    term = 1
    for _ in range(m):
        term *= p
        total += term
    return total


@dataclass(frozen=True, slots=True)
class FactoredNumber:
    """A natural number, its factorization, and maintained divisor sums.

    Invariants (enforced by the constructors in this module):
      * value == product of prime**multiplicity over factors
      * sigma == sigma(value)
      * sigma_top_excluded == sigma(value with its largest prime power
        removed); equals sigma when value == 1
      * factors strictly increasing in prime, multiplicities >= 1

    Instances are immutable and safe to share between workers.
    """

    value: int
    factors: Factors
    sigma: int
    sigma_top_excluded: int

    @property
    def top_prime(self) -> int | None:
        """Largest prime factor, or None for 1."""
        return self.factors[-1][0] if self.factors else None

    @property
    def top_multiplicity(self) -> int:
        return self.factors[-1][1] if self.factors else 0

    @property
    def depth(self) -> int:
        """Total prime multiplicity (the node's depth in the search tree)."""
        return sum(m for _, m in self.factors)

    def __str__(self) -> str:
        return format_factors(self.factors)


def from_factors(factors) -> FactoredNumber:
    """Build a FactoredNumber from (prime, multiplicity) pairs.

    Primes must be strictly increasing and are each verified; the empty
    list yields 1.  Rejects composite 'primes', non-increasing order and
    multiplicities below 1 with InvalidFactorsError.
    """
    facs: Factors = tuple((int(p), int(m)) for p, m in factors)
    value = 1
    sigma = 1
    sigma_top = 1
    last = 0
    for p, m in facs:
        if p <= last:
            raise InvalidFactorsError(
                f"primes must be strictly increasing; got {p} after {last}"
            )
        if m < 1:
            raise InvalidFactorsError(f"multiplicity must be >= 1, got {m} for {p}")
        try:
            ok = is_prime(p)
        except PrimeRangeError as exc:
            raise InvalidFactorsError(f"cannot verify primality of {p}: {exc}") from exc
        if not ok:
            raise InvalidFactorsError(f"{p} is not prime")
        sigma_top = sigma
        sigma *= _geometric_sum(p, m)
        value *= p**m
        last = p
    return FactoredNumber(value, facs, sigma, sigma_top)


ONE = FactoredNumber(1, (), 1, 1)


def append_prime(n: FactoredNumber, p: int) -> FactoredNumber:
    """The child n*p, for a prime p >= n's largest prime factor.

    sigma is updated in O(1) multiplications: appending a new largest
    prime multiplies sigma by (1+p); raising the existing top prime uses
    sigma*p + sigma_top_excluded, which extends the top geometric sum by
    one term without any division.  p is trusted to be prime (callers draw
    it from a PrimeSource); ordering is enforced.
    """
    top = n.top_prime
    if top is None:
        return FactoredNumber(p, ((p, 1),), 1 + p, 1)
    if p < top:
        raise InvalidFactorsError(f"cannot append {p} below largest prime factor {top}")
    if p == top:
        facs = n.factors[:-1] + ((p, n.top_multiplicity + 1),)
        return FactoredNumber(
            n.value * p, facs, n.sigma * p + n.sigma_top_excluded, n.sigma_top_excluded
        )
    return FactoredNumber(
        n.value * p, n.factors + ((p, 1),), n.sigma * (p + 1), n.sigma
    )


def pred(n: FactoredNumber) -> FactoredNumber:
    """n divided by its largest prime factor (the parent in the tree)."""
    if not n.factors:
        raise NoPredecessorError("1 has no predecessor")
    p, m = n.factors[-1]
    if m > 1:
        facs = n.factors[:-1] + ((p, m - 1),)
        sigma = n.sigma_top_excluded * _geometric_sum(p, m - 1)
        return FactoredNumber(n.value // p, facs, sigma, n.sigma_top_excluded)
    facs = n.factors[:-1]
    sigma_top = 1
    for q, k in facs[:-1]:
        sigma_top *= _geometric_sum(q, k)
    return FactoredNumber(n.value // p, facs, n.sigma_top_excluded, sigma_top)


def divisors_up_to(n: FactoredNumber, limit: int) -> list[int]:
    """All divisors of n.value that are <= limit, in decreasing order.

    Generated from the factorization (no trial division); callers bound
    limit, which in practice is the abundance or the abundance cap.
    """
    if limit < 0:
        raise ValueError("limit must be >= 0")
    if limit < 1:
        return []
    divs = [1]
    for p, m in n.factors:
        powers = []
        q = 1
        for _ in range(m):
            q *= p
            if q > limit:
                break
            powers.append(q)
        extra = []
        for q in powers:
            for d in divs:
                dq = d * q
                if dq <= limit:
                    extra.append(dq)
        divs.extend(extra)
    divs.sort(reverse=True)
    return divs


def abundance(n: FactoredNumber) -> int:
    """sigma(n) - 2n; negative deficient, zero perfect, positive abundant."""
    return n.sigma - 2 * n.value


def format_factors(factors: Factors) -> str:
    """Canonical text form, e.g. '3^3*5*7'; the empty product is '1'."""
    if not factors:
        return "1"
    return "*".join(f"{p}^{m}" if m > 1 else str(p) for p, m in factors)


def canonical(n: FactoredNumber) -> str:
    """Canonical text form of n (see format_factors)."""
    return format_factors(n.factors)


def parse(text: str) -> FactoredNumber:
    """Parse the canonical text form back into a FactoredNumber.

    Round-trips bit-exactly with canonical(); the parsed factor list goes
    through the same validation as from_factors.
    """
    s = text.strip()
    if s == "1":
        return ONE
    pairs = []
    try:
        for term in s.split("*"):
            if "^" in term:
                base, _, exp = term.partition("^")
                pairs.append((int(base), int(exp)))
            else:
                pairs.append((int(term), 1))
    except ValueError as exc:
        raise InvalidFactorsError(f"cannot parse {text!r}: {exc}") from exc
    return from_factors(pairs)
