"""Exhaustive search for odd weird numbers.

Enumerates primitive abundant candidates below a bound by depth-first
traversal of the factorization tree, prunes with an exact-integer
deficiency barrier, and classifies every abundant node as semiperfect or
weird with an optimized subset-sum solver.  Ships an independent
brute-force oracle, a work-unit partition layer for parallel or resumable
runs, and a CLI (``weirdsearch``).
"""

from .classify import (
    Classification,
    NodeBudgetExceededError,
    OracleRangeError,
    SubsetSumInstance,
    classify,
    compare_with_oracle,
    factor_int,
    oracle_classify,
    subset_sum_exists,
)
from .factored import (
    FactoredNumber,
    InvalidFactorsError,
    NoPredecessorError,
    ONE,
    abundance,
    append_prime,
    canonical,
    divisors_up_to,
    from_factors,
    parse,
    pred,
)
from .partition import (
    UnitReport,
    WorkUnit,
    merge,
    run_unit,
    split,
)
from .primes import (
    DEFAULT_SIEVE_PRIMES,
    PrimeRangeError,
    PrimeRangeExhaustedError,
    PrimeSource,
    build,
    is_prime,
)
from .search import (
    SearchConfig,
    SearchReport,
    UnsupportedBoundError,
    check_barrier,
    roots_for_bound,
    search,
)

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "DEFAULT_SIEVE_PRIMES",
    "FactoredNumber",
    "InvalidFactorsError",
    "NoPredecessorError",
    "NodeBudgetExceededError",
    "ONE",
    "OracleRangeError",
    "PrimeRangeError",
    "PrimeRangeExhaustedError",
    "PrimeSource",
    "SearchConfig",
    "SearchReport",
    "SubsetSumInstance",
    "UnitReport",
    "UnsupportedBoundError",
    "WorkUnit",
    "abundance",
    "append_prime",
    "build",
    "canonical",
    "check_barrier",
    "classify",
    "compare_with_oracle",
    "divisors_up_to",
    "factor_int",
    "from_factors",
    "is_prime",
    "merge",
    "oracle_classify",
    "parse",
    "pred",
    "roots_for_bound",
    "run_unit",
    "search",
    "split",
    "subset_sum_exists",
    "__version__",
]
