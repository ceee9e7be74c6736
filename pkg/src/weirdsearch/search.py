"""Depth-first enumeration of the factorization tree below a bound.

Nodes are numbers carried with their factorization; the children of N are
N*p for primes p running upward from N's largest prime factor.  A node
that turns abundant is classified and never expanded (the smallest odd
weird number must be primitive abundant, so nothing below an abundant
node matters).  A deficient node's child loop stops at the bound, or as
soon as the exact-integer barrier certifies that every descendant of the
child below the bound stays deficient:

    sigma(N) * p*^k  <  2 * N * (p* - 1)^k,
    k = max { j : N * p*^j < bound }

The barrier is monotone across appended primes strictly above N's largest
prime factor, so one hit there ends the whole child loop; on the
multiplicity-extension child (same prime again) it certifies only that
subtree and iteration continues.  The engine keeps its own explicit stack
(depth is bounded by the factor count) and works on plain Python integers
throughout: all comparisons are exact at any bound, and a prune can never
be wrong by overflow.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .classify import Classification, NodeBudgetExceededError, classify
from .factored import FactoredNumber, Factors, format_factors, from_factors
from .primes import (
    U64_MAX,
    PrimeRangeExhaustedError,
    PrimeSource,
    build as build_primes,
)

__all__ = [
    "AUTO_ROOT_LIMIT",
    "ROOT7_THRESHOLD",
    "SearchConfig",
    "SearchReport",
    "UnsupportedBoundError",
    "check_barrier",
    "resolve_roots",
    "roots_for_bound",
    "search",
]

# The smallest odd abundant number coprime to 15 lies below 2.01e25, and
# the smallest one coprime to 105 lies below 4.90e52.  Searches bounded by
# the first constant never need the subtree of 7; bounds at or past the
# second would need roots beyond {3, 5, 7} and are unsupported.
ROOT7_THRESHOLD = 201 * 10**23
AUTO_ROOT_LIMIT = 49 * 10**51

DEFAULT_PROGRESS_EVERY = 1_000_000


class UnsupportedBoundError(ValueError):
    """Automatic root derivation has no coverage proof for this bound."""


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one search invocation.

    roots=None derives the root set from the bound; barrier_stride k
    evaluates the barrier on child indices 1, k+1, 2k+1, ... (0 disables
    the barrier entirely, which only costs time, never results).
    """

    bound: int
    abundance_cap: int | None = None
    roots: tuple[FactoredNumber, ...] | None = None
    barrier_stride: int = 1
    prime_hard_cap: int = U64_MAX

    def validate(self) -> None:
        if self.bound <= 1:
            raise ValueError("bound must be > 1")
        if self.abundance_cap is not None and self.abundance_cap < 0:
            raise ValueError("abundance_cap must be >= 0")
        if self.barrier_stride < 0:
            raise ValueError("barrier_stride must be >= 0")
        if not 2 <= self.prime_hard_cap <= U64_MAX:
            raise ValueError("prime_hard_cap must lie in [2, 2^64 - 1]")
        if self.roots is None and self.bound >= AUTO_ROOT_LIMIT:
            raise UnsupportedBoundError(
                f"automatic roots support bounds below {AUTO_ROOT_LIMIT}"
            )


@dataclass
class SearchReport:
    """Counters and findings of one search run.

    Invariant: abundant_found == semiperfect_count + len(weird_found)
    + unchecked_abundant_count.  conclusive is False when the run was
    aborted (prime supply exhausted, classification budget fired) and its
    absence-of-weird claim must not be trusted.
    """

    nodes_visited: int = 0
    barrier_prunes: int = 0
    bound_prunes: int = 0
    abundant_found: int = 0
    semiperfect_count: int = 0
    weird_found: list[str] = field(default_factory=list)
    unchecked_abundant_count: int = 0
    config_echo: dict = field(default_factory=dict)
    wall_time: float = 0.0
    conclusive: bool = True
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "nodes_visited": self.nodes_visited,
            "barrier_prunes": self.barrier_prunes,
            "bound_prunes": self.bound_prunes,
            "abundant_found": self.abundant_found,
            "semiperfect_count": self.semiperfect_count,
            "weird_found": list(self.weird_found),
            "unchecked_abundant_count": self.unchecked_abundant_count,
            "config_echo": dict(self.config_echo),
            "wall_time": self.wall_time,
            "conclusive": self.conclusive,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SearchReport":
        return cls(
            nodes_visited=d["nodes_visited"],
            barrier_prunes=d["barrier_prunes"],
            bound_prunes=d["bound_prunes"],
            abundant_found=d["abundant_found"],
            semiperfect_count=d["semiperfect_count"],
            weird_found=list(d["weird_found"]),
            unchecked_abundant_count=d["unchecked_abundant_count"],
            config_echo=dict(d.get("config_echo", {})),
            wall_time=d.get("wall_time", 0.0),
            conclusive=d.get("conclusive", True),
            error=d.get("error"),
        )


def roots_for_bound(bound: int) -> tuple[FactoredNumber, ...]:
    """Root set covering every odd abundant number below the bound.

    Always {3, 5}; 7 joins once the bound passes 2.01e25.  Bounds at or
    beyond 4.90e52 raise UnsupportedBoundError.
    """
    if bound <= 1:
        raise ValueError("bound must be > 1")
    if bound >= AUTO_ROOT_LIMIT:
        raise UnsupportedBoundError(
            f"bound {bound} is at or beyond the supported limit {AUTO_ROOT_LIMIT}"
        )
    roots = [from_factors([(3, 1)]), from_factors([(5, 1)])]
    if bound > ROOT7_THRESHOLD:
        roots.append(from_factors([(7, 1)]))
    return tuple(roots)


def resolve_roots(config: SearchConfig) -> tuple[FactoredNumber, ...]:
    if config.roots is not None:
        return tuple(config.roots)
    return roots_for_bound(config.bound)


def _barrier_holds(value: int, sigma: int, p_top: int, bound: int) -> bool:
    # k = largest exponent with value * p_top**k < bound (assumes value < bound)
    k = 0
    pk = 1
    nv = value * p_top
    while nv < bound:
        k += 1
        pk *= p_top
        nv *= p_top
    return sigma * pk < 2 * value * (p_top - 1) ** k


def check_barrier(n: FactoredNumber, bound: int) -> bool:
    """True when every descendant of n below the bound must be deficient.

    Exact integer form of sigma(N)/N * (p*/(p*-1))^k < 2 with k the
    largest exponent keeping N*p*^k under the bound; requires
    1 < n.value < bound.
    """
    if n.value <= 1:
        raise ValueError("barrier needs n > 1")
    if n.value >= bound:
        raise ValueError("barrier needs n below the bound")
    return _barrier_holds(n.value, n.sigma, n.top_prime, bound)


def _echo(config: SearchConfig, roots: tuple[FactoredNumber, ...]) -> dict:
    return {
        "bound": config.bound,
        "abundance_cap": config.abundance_cap,
        "roots": [format_factors(r.factors) for r in roots],
        "barrier_stride": config.barrier_stride,
        "prime_hard_cap": config.prime_hard_cap,
    }


# Frame layout for the explicit DFS stack.
_VALUE, _SIGMA, _STOP, _FACTORS, _DEPTH, _P, _PIDX, _CHILD, _ADVANCE = range(9)


def _search_root(
    root: FactoredNumber,
    config: SearchConfig,
    source: PrimeSource,
    report: SearchReport,
    sink,
    progress_every: int,
    classify_budget: int | None,
    frontier_depth: int | None,
    on_unit,
) -> None:
    bound = config.bound
    stride = config.barrier_stride
    cap = config.abundance_cap
    hard_cap = min(config.prime_hard_cap, source.hard_cap)
    sieved = source.sieved
    n_sieved = int(sieved.shape[0])

    if root.value >= bound:
        report.bound_prunes += 1
        return

    def locate(p: int) -> int:
        # sieve index of p, or -1 when p lies beyond the table
        i = int(np.searchsorted(sieved, p))
        if i < n_sieved and int(sieved[i]) == p:
            return i
        return -1

    def advance(p: int, pidx: int) -> tuple[int, int]:
        if 0 <= pidx < n_sieved - 1:
            q = int(sieved[pidx + 1])
            if q > hard_cap:
                raise PrimeRangeExhaustedError(
                    f"next prime after {p} exceeds hard cap {hard_cap}"
                )
            return q, pidx + 1
        q = source.next_prime(p)
        if q > hard_cap:
            raise PrimeRangeExhaustedError(
                f"next prime after {p} exceeds hard cap {hard_cap}"
            )
        return q, locate(q)

    stack: list[list] = []

    def enter(value: int, sigma: int, stop: int, factors: Factors, depth: int,
              p: int, pidx: int) -> None:
        # Visit a node: emit it as a work unit at the frontier, classify it
        # if abundant, otherwise push an expansion frame.
        if (
            frontier_depth is not None
            and depth >= frontier_depth
            and sigma <= 2 * value
        ):
            on_unit(FactoredNumber(value, factors, sigma, stop))
            return
        report.nodes_visited += 1
        if (
            progress_every
            and sink is not None
            and report.nodes_visited % progress_every == 0
        ):
            sink(
                {
                    "kind": "progress",
                    "nodes_visited": report.nodes_visited,
                    "current_path": format_factors(factors),
                }
            )
        if sigma > 2 * value:
            report.abundant_found += 1
            node = FactoredNumber(value, factors, sigma, stop)
            tag = classify(node, abundance_cap=cap, node_budget=classify_budget)
            text = format_factors(factors)
            if sink is not None:
                sink(
                    {
                        "kind": "abundant",
                        "factorization": text,
                        "classification": tag.value,
                    }
                )
            if tag is Classification.WEIRD:
                report.weird_found.append(text)
                if sink is not None:
                    sink(
                        {
                            "kind": "weird",
                            "factorization": text,
                            "value": value,
                            "abundance": sigma - 2 * value,
                        }
                    )
            elif tag is Classification.SEMIPERFECT:
                report.semiperfect_count += 1
            else:
                report.unchecked_abundant_count += 1
            return
        if value == 1:
            start_p, start_idx = 2, locate(2)
        else:
            start_p, start_idx = p, pidx
        stack.append(
            [value, sigma, stop, factors, depth, start_p, start_idx, 0, False]
        )

    root_idx = locate(root.top_prime) if root.value > 1 else -1
    enter(
        root.value,
        root.sigma,
        root.sigma_top_excluded,
        root.factors,
        root.depth,
        root.top_prime or 2,
        root_idx,
    )

    while stack:
        frame = stack[-1]
        if frame[_ADVANCE]:
            frame[_P], frame[_PIDX] = advance(frame[_P], frame[_PIDX])
            frame[_ADVANCE] = False
        value = frame[_VALUE]
        p = frame[_P]
        child_value = value * p
        if child_value >= bound:
            report.bound_prunes += 1
            stack.pop()
            continue
        sigma = frame[_SIGMA]
        factors = frame[_FACTORS]
        # child's sigma in O(1) from the parent's maintained sums
        if value == 1:
            child_sigma = p + 1
            child_stop = 1
        elif p == factors[-1][0]:
            child_sigma = sigma * p + frame[_STOP]
            child_stop = frame[_STOP]
        else:
            child_sigma = sigma * (p + 1)
            child_stop = sigma
        child_idx = frame[_CHILD]
        frame[_CHILD] = child_idx + 1
        if stride and child_idx % stride == 0:
            if _barrier_holds(child_value, child_sigma, p, bound):
                report.barrier_prunes += 1
                if value == 1 or p != factors[-1][0]:
                    # New-prime child: the barrier is monotone across the
                    # remaining (larger) primes, so the whole loop is done.
                    stack.pop()
                else:
                    # Multiplicity-extension child (p == p*): the barrier
                    # certifies only this subtree; siblings with larger
                    # primes can still go abundant, so keep iterating.
                    frame[_ADVANCE] = True
                continue
        if value > 1 and p == factors[-1][0]:
            child_factors = factors[:-1] + ((p, factors[-1][1] + 1),)
        else:
            child_factors = factors + ((p, 1),)
        frame[_ADVANCE] = True
        enter(
            child_value,
            child_sigma,
            child_stop,
            child_factors,
            frame[_DEPTH] + 1,
            p,
            frame[_PIDX],
        )


def _run(
    config: SearchConfig,
    sink,
    prime_source: PrimeSource | None,
    progress_every: int,
    classify_node_budget: int | None,
    frontier_depth: int | None,
    on_unit,
) -> SearchReport:
    config.validate()
    roots = resolve_roots(config)
    source = prime_source if prime_source is not None else build_primes()
    report = SearchReport(config_echo=_echo(config, roots))
    start = time.perf_counter()
    try:
        for root in roots:
            _search_root(
                root,
                config,
                source,
                report,
                sink,
                progress_every,
                classify_node_budget,
                frontier_depth,
                on_unit,
            )
    except (PrimeRangeExhaustedError, NodeBudgetExceededError) as exc:
        report.conclusive = False
        report.error = f"{type(exc).__name__}: {exc}"
    report.wall_time = time.perf_counter() - start
    if sink is not None:
        sink({"kind": "summary", **report.as_dict()})
    return report


def search(
    config: SearchConfig,
    sink=None,
    prime_source: PrimeSource | None = None,
    progress_every: int = DEFAULT_PROGRESS_EVERY,
    classify_node_budget: int | None = None,
) -> SearchReport:
    """Run the full depth-first search described by config.

    sink, when given, receives one dict per event (kinds: weird, abundant,
    progress, summary) from a single producer.  The returned report is
    marked non-conclusive instead of raising when the prime supply or the
    classification node budget gives out mid-run.
    """
    return _run(
        config,
        sink,
        prime_source,
        progress_every,
        classify_node_budget,
        frontier_depth=None,
        on_unit=None,
    )
