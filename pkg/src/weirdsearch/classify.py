"""Classify abundant numbers as semiperfect or weird.

The production path builds the list of proper divisors not exceeding the
abundance A(N) and solves subset sum with A(N) as the target (a subset of
proper divisors sums to N exactly when its complement sums to A(N)).  The
solver walks items in decreasing order with three prunes: items above the
current target are skipped, a branch dies when the remaining sum is short
of the target, and a target above half the remaining sum is replaced by
its complement.

oracle_classify is the deliberately independent cross-check: trial
division for the divisors and exhaustive dense DP for the subset sum,
sharing no logic with the solver above.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import accel
from .factored import FactoredNumber, abundance, divisors_up_to, from_factors

__all__ = [
    "Classification",
    "NodeBudgetExceededError",
    "OracleRangeError",
    "SubsetSumInstance",
    "classify",
    "compare_with_oracle",
    "factor_int",
    "oracle_classify",
    "subset_sum_exists",
]

ORACLE_LIMIT = 10**7

# Above this, instances stay on the exact python solver instead of the
# int64 kernel.
_I64_SAFE = 2**62


class NodeBudgetExceededError(RuntimeError):
    """The optional subset-sum node budget fired; the instance is undecided."""


class OracleRangeError(ValueError):
    """oracle_classify only supports 1 <= n <= 1e7."""


class Classification(enum.Enum):
    DEFICIENT = "deficient"
    PERFECT = "perfect"
    SEMIPERFECT = "semiperfect"
    WEIRD = "weird"
    UNCHECKED_ABUNDANT = "unchecked-abundant"


@dataclass(frozen=True)
class SubsetSumInstance:
    """Descending distinct positive items, a target, and their total."""

    items: tuple[int, ...]
    target: int
    total: int

    @classmethod
    def from_items(cls, items, target: int) -> "SubsetSumInstance":
        items = tuple(int(d) for d in items)
        if any(a <= b for a, b in zip(items, items[1:])):
            raise ValueError("items must be strictly decreasing")
        if items and items[-1] <= 0:
            raise ValueError("items must be positive")
        if target < 0:
            raise ValueError("target must be >= 0")
        return cls(items, int(target), sum(items))


def _branch_bound_py(items: tuple[int, ...], target: int, budget: int) -> int:
    # Exact-int twin of the compiled kernel; identical node accounting.
    # Returns 1 found, 0 not found, -1 budget exhausted (budget < 0: none).
    n = len(items)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + items[i]
    stack = [(0, target)]
    nodes = 0
    while stack:
        i, t = stack.pop()
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
            stack.append((i + 1, t))
            t -= items[i]
            i += 1
    return 0


def subset_sum_exists(inst: SubsetSumInstance, node_budget: int | None = None) -> bool:
    """Does some subset of inst.items sum exactly to inst.target?

    node_budget caps the number of explored branch points (default
    unlimited); exceeding it raises NodeBudgetExceededError rather than
    ever returning a wrong answer.
    """
    budget = -1 if node_budget is None else int(node_budget)
    if accel.NUMBA_ENABLED and inst.total < _I64_SAFE and inst.target < _I64_SAFE:
        arr = np.asarray(inst.items, dtype=np.int64)
        code = accel.branch_bound(arr, inst.target, budget)
    else:
        code = _branch_bound_py(inst.items, inst.target, budget)
    if code < 0:
        raise NodeBudgetExceededError(
            f"subset-sum node budget {node_budget} exhausted "
            f"(|items|={len(inst.items)}, target={inst.target})"
        )
    return bool(code)


def classify(
    n: FactoredNumber,
    abundance_cap: int | None = None,
    node_budget: int | None = None,
) -> Classification:
    """Full classification of n.

    Deficient/perfect come straight from the abundance.  An abundant n
    whose abundance exceeds the configured cap is reported as
    unchecked-abundant without running the solver; otherwise the
    proper divisors <= A(n) are fed to the subset-sum solver.
    """
    a = abundance(n)
    if a < 0:
        return Classification.DEFICIENT
    if a == 0:
        return Classification.PERFECT
    if abundance_cap is not None and a > abundance_cap:
        return Classification.UNCHECKED_ABUNDANT
    items = divisors_up_to(n, a)
    # Proper divisors only: n itself can slip in when sigma >= 3n, and the
    # complement argument is over proper divisors.
    if items and items[0] == n.value:
        items = items[1:]
    inst = SubsetSumInstance.from_items(items, a)
    if subset_sum_exists(inst, node_budget=node_budget):
        return Classification.SEMIPERFECT
    return Classification.WEIRD


_ORACLE_CODES = (
    Classification.DEFICIENT,
    Classification.PERFECT,
    Classification.SEMIPERFECT,
    Classification.WEIRD,
)


def oracle_classify(n: int) -> Classification:
    """Independent brute-force classification for 1 <= n <= 1e7.

    Divisors by trial division, subset sum by exhaustive dense DP; no code
    shared with classify/subset_sum_exists.
    """
    n = int(n)
    if not 1 <= n <= ORACLE_LIMIT:
        raise OracleRangeError(f"oracle supports 1 <= n <= {ORACLE_LIMIT}, got {n}")
    code = accel.oracle_code(n)
    if code < 0:  # pragma: no cover - divisor buffer sized for the range
        raise RuntimeError(f"oracle divisor buffer overflow for {n}")
    return _ORACLE_CODES[code]


def factor_int(n: int) -> FactoredNumber:
    """Trial-division factorization of a plain integer.

    Verification plumbing (the search itself never factorizes): used by
    the verify command and tests to feed arbitrary integers to classify.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    pairs = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        pairs.append((m, 1))
    return from_factors(pairs)


def compare_with_oracle(lo: int, hi: int):
    """Run classify and oracle_classify over [lo, hi]; return mismatches.

    Factorizations come from a smallest-prime-factor table so the sweep
    stays fast; each mismatch is reported as (n, classify, oracle).
    """
    lo = max(1, int(lo))
    hi = int(hi)
    if hi > ORACLE_LIMIT:
        raise OracleRangeError(f"oracle sweep capped at {ORACLE_LIMIT}")
    mismatches: list[tuple[int, Classification, Classification]] = []
    if hi < lo:
        return mismatches
    spf = accel.spf_upto(hi)
    for n in range(lo, hi + 1):
        pairs = []
        m = n
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
        got = classify(from_factors(pairs))
        want = oracle_classify(n)
        if got is not want:
            mismatches.append((n, got, want))
    return mismatches
