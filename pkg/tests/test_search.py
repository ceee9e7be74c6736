import random

import numpy as np
import pytest

from weirdsearch import (
    Classification,
    SearchConfig,
    UnsupportedBoundError,
    abundance,
    append_prime,
    check_barrier,
    from_factors,
    oracle_classify,
    parse,
    roots_for_bound,
    search,
)
from weirdsearch.search import AUTO_ROOT_LIMIT, ROOT7_THRESHOLD

from conftest import sigma_trial

ROOT2 = (from_factors([(2, 1)]),)


def values(canonicals):
    return sorted(parse(s).value for s in canonicals)


# --- roots_for_bound -------------------------------------------------------


def test_roots_examples():
    assert [r.value for r in roots_for_bound(10**21)] == [3, 5]
    assert [r.value for r in roots_for_bound(10**28)] == [3, 5, 7]
    with pytest.raises(UnsupportedBoundError):
        roots_for_bound(10**53)


def test_roots_thresholds_exact():
    assert [r.value for r in roots_for_bound(ROOT7_THRESHOLD)] == [3, 5]
    assert [r.value for r in roots_for_bound(ROOT7_THRESHOLD + 1)] == [3, 5, 7]
    assert len(roots_for_bound(AUTO_ROOT_LIMIT - 1)) == 3
    with pytest.raises(UnsupportedBoundError):
        roots_for_bound(AUTO_ROOT_LIMIT)
    with pytest.raises(ValueError):
        roots_for_bound(1)


# --- check_barrier ---------------------------------------------------------


def test_barrier_frozen_examples():
    # 159 = 3*53: k=0, 216 < 318; no descendants below 1000 exist at all
    assert check_barrier(parse("3*53"), 1000)
    # 15 = 3*5: k=2, 600 < 480 fails
    assert not check_barrier(parse("3*5"), 1000)
    # 3: k=3, 108 < 48 fails
    assert not check_barrier(parse("3"), 100)


def test_barrier_preconditions():
    with pytest.raises(ValueError):
        check_barrier(from_factors([]), 10)
    with pytest.raises(ValueError):
        check_barrier(parse("3*5"), 15)
    with pytest.raises(ValueError):
        check_barrier(parse("3*5"), 14)


def _random_node(rng, bound):
    primes_pool = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 53, 61, 71, 101, 211]
    n = from_factors([])
    p_min = 0
    for _ in range(rng.randint(1, 5)):
        options = [p for p in primes_pool if p >= p_min and n.value * p < bound]
        if not options:
            break
        p = rng.choice(options)
        n = append_prime(n, p)
        p_min = p
    return n


def _descendants_all_deficient(node, bound, sigma_table, src, max_nodes=2_000_000):
    # exhaustive DFS over children N*p (p >= p*), values < bound
    stack = [(node.value, node.top_prime)]
    seen = 0
    while stack:
        value, p_min = stack.pop()
        p = p_min
        while True:
            child = value * p
            if child >= bound:
                break
            seen += 1
            if seen > max_nodes:
                raise AssertionError("descendant enumeration exploded")
            if sigma_table[child] >= 2 * child:
                return False
            stack.append((child, p))
            p = src.next_prime(p)
    return True


def test_barrier_soundness_randomized(src_small):
    rng = random.Random(2024)
    limit = 10**6
    sig = np.zeros(limit + 1, np.int64)
    for d in range(1, limit + 1):
        sig[d::d] += d
    checked = 0
    attempts = 0
    while checked < 300 and attempts < 20_000:
        attempts += 1
        bound = rng.randint(100, limit)
        node = _random_node(rng, bound)
        if node.value <= 1 or node.value >= bound:
            continue
        if not check_barrier(node, bound):
            continue
        assert _descendants_all_deficient(node, bound, sig, src_small), (
            str(node),
            bound,
        )
        checked += 1
    assert checked == 300


def test_barrier_monotone_over_new_primes(src_small):
    rng = random.Random(7)
    for _ in range(300):
        bound = rng.randint(100, 10**7)
        base = _random_node(rng, bound)
        if base.value <= 1:
            continue
        fired = False
        p = src_small.next_prime(base.top_prime)  # strictly above p*
        for _ in range(12):
            child = append_prime(base, p)
            if child.value >= bound:
                break
            holds = check_barrier(child, bound)
            if fired:
                assert holds, (str(base), p, bound)
            fired = fired or holds
            p = src_small.next_prime(p)


def test_barrier_not_monotone_from_multiplicity_child():
    # the known counterexample: barrier(10*5)=true but barrier(10*7)=false
    ten = parse("2*5")
    assert check_barrier(append_prime(ten, 5), 100)
    assert not check_barrier(append_prime(ten, 7), 100)


# --- search ----------------------------------------------------------------


def test_search_bound100_root2(src_small):
    rep = search(SearchConfig(bound=100, roots=ROOT2), prime_source=src_small)
    assert rep.weird_found == ["2*5*7"]
    assert rep.conclusive


def test_search_bound1e4_auto_roots(src_small):
    events = []
    rep = search(SearchConfig(bound=10**4), sink=events.append, prime_source=src_small)
    assert rep.weird_found == []
    assert rep.abundant_found > 0
    semis = {
        e["factorization"]
        for e in events
        if e["kind"] == "abundant" and e["classification"] == "semiperfect"
    }
    assert "3^3*5*7" in semis  # 945
    assert rep.abundant_found == rep.semiperfect_count


def test_search_bound1e4_root2_matches_oracle(src_small):
    rep = search(SearchConfig(bound=10**4, roots=ROOT2), prime_source=src_small)
    expected = [n for n in range(2, 10**4) if oracle_classify(n) is Classification.WEIRD]
    assert expected == [70, 836, 4030, 5830, 7192, 7912, 9272]
    assert values(rep.weird_found) == expected


def test_search_weird_order_is_dfs_discovery(src_small):
    events = []
    rep = search(
        SearchConfig(bound=10**4, roots=ROOT2), sink=events.append, prime_source=src_small
    )
    event_order = [e["factorization"] for e in events if e["kind"] == "weird"]
    assert rep.weird_found == event_order


def test_search_report_invariant(src_small):
    rep = search(SearchConfig(bound=10**5), prime_source=src_small)
    assert rep.abundant_found == (
        rep.semiperfect_count + len(rep.weird_found) + rep.unchecked_abundant_count
    )


def test_completeness_against_oracle_1e5(src_small):
    bound = 10**5
    events = []
    rep = search(SearchConfig(bound=bound), sink=events.append, prime_source=src_small)
    visited = {
        parse(e["factorization"]).value: e["classification"]
        for e in events
        if e["kind"] == "abundant"
    }
    sig = np.zeros(bound + 1, np.int64)
    for d in range(1, bound + 1):
        sig[d::d] += d
    odd_abundant = [n for n in range(3, bound, 2) if sig[n] > 2 * n]

    def proper_prime_quotients(n):
        m, p, out = n, 3, []
        while p * p <= m:
            if m % p == 0:
                out.append(n // p)
                while m % p == 0:
                    m //= p
            p += 2
        if m > 1:
            out.append(n // m)
        return out

    primitive = [
        n for n in odd_abundant if all(sig[q] < 2 * q for q in proper_prime_quotients(n))
    ]
    # every odd primitive abundant below the bound is visited,
    # and each visited node's classification agrees with the oracle
    assert set(primitive) <= set(visited)
    for n, tag in visited.items():
        assert oracle_classify(n).value == tag, n
    # every odd abundant is visited or a multiple of a visited number
    visited_set = set(visited)
    for n in odd_abundant:
        assert any(n % d == 0 for d in visited_set if d <= n), n
    assert rep.conclusive


def test_pruning_neutrality_smoke(src_small):
    # root-2 mode so real weird numbers flow through both runs
    ev_on, ev_off = [], []
    on = search(
        SearchConfig(bound=10**4, roots=ROOT2), sink=ev_on.append, prime_source=src_small
    )
    off = search(
        SearchConfig(bound=10**4, roots=ROOT2, barrier_stride=0),
        sink=ev_off.append,
        prime_source=src_small,
    )
    classes_on = {
        e["factorization"]: e["classification"] for e in ev_on if e["kind"] == "abundant"
    }
    classes_off = {
        e["factorization"]: e["classification"] for e in ev_off if e["kind"] == "abundant"
    }
    assert on.weird_found == off.weird_found
    assert classes_on == classes_off
    assert off.nodes_visited > on.nodes_visited
    assert off.barrier_prunes == 0


@pytest.mark.parametrize("stride", [2, 3, 7])
def test_barrier_stride_never_changes_results(src_small, stride):
    base = search(SearchConfig(bound=10**5), prime_source=src_small)
    strided = search(
        SearchConfig(bound=10**5, barrier_stride=stride), prime_source=src_small
    )
    assert strided.weird_found == base.weird_found
    assert strided.abundant_found >= base.abundant_found


def test_abundance_cap_semantics_root2(src_small):
    # A-values of the seven weirds below 1e4: 4,8,4,4,16,16,56 -> cap 50 drops 9272
    uncapped_events = []
    uncapped = search(
        SearchConfig(bound=10**4, roots=ROOT2),
        sink=uncapped_events.append,
        prime_source=src_small,
    )
    capped = search(
        SearchConfig(bound=10**4, roots=ROOT2, abundance_cap=50), prime_source=src_small
    )
    kept = [
        w for w in uncapped.weird_found if abundance(parse(w)) <= 50
    ]
    assert capped.weird_found == kept
    assert values(capped.weird_found) == [70, 836, 4030, 5830, 7192, 7912]
    over_cap = [
        e
        for e in uncapped_events
        if e["kind"] == "abundant" and abundance(parse(e["factorization"])) > 50
    ]
    assert capped.unchecked_abundant_count == len(over_cap)
    assert capped.nodes_visited == uncapped.nodes_visited


def test_event_stream_schema(src_small):
    events = []
    rep = search(
        SearchConfig(bound=10**4, roots=ROOT2),
        sink=events.append,
        prime_source=src_small,
        progress_every=1,
    )
    kinds = {e["kind"] for e in events}
    assert kinds == {"progress", "abundant", "weird", "summary"}
    progress = [e for e in events if e["kind"] == "progress"]
    assert len(progress) == rep.nodes_visited
    assert all({"nodes_visited", "current_path"} <= e.keys() for e in progress)
    for e in events:
        if e["kind"] == "weird":
            n = parse(e["factorization"])
            assert e["value"] == n.value
            assert e["abundance"] == abundance(n)
    summary = [e for e in events if e["kind"] == "summary"]
    assert len(summary) == 1
    assert summary[0]["weird_found"] == rep.weird_found
    assert summary[0]["nodes_visited"] == rep.nodes_visited


def test_prime_exhaustion_poisons_report(src_small):
    cfg = SearchConfig(bound=10**4, roots=ROOT2, prime_hard_cap=7)
    rep = search(cfg, prime_source=src_small)
    assert not rep.conclusive
    assert "PrimeRangeExhausted" in rep.error


def test_classify_budget_poisons_report(src_small):
    rep = search(
        SearchConfig(bound=10**4, roots=ROOT2),
        prime_source=src_small,
        classify_node_budget=0,
    )
    assert not rep.conclusive
    assert "NodeBudgetExceeded" in rep.error


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(bound=1).validate()
    with pytest.raises(ValueError):
        SearchConfig(bound=100, barrier_stride=-1).validate()
    with pytest.raises(ValueError):
        SearchConfig(bound=100, abundance_cap=-1).validate()
    with pytest.raises(UnsupportedBoundError):
        SearchConfig(bound=AUTO_ROOT_LIMIT).validate()
    # explicit roots lift the auto-derivation limit
    SearchConfig(bound=AUTO_ROOT_LIMIT, roots=ROOT2).validate()


def test_root_at_or_above_bound_is_skipped(src_small):
    rep = search(
        SearchConfig(bound=3, roots=(from_factors([(3, 1)]),)), prime_source=src_small
    )
    assert rep.nodes_visited == 0
    assert rep.bound_prunes == 1


def test_search_composite_root(src_small):
    # subtree of 15 below 1e4, as a unit runner would see it
    events = []
    rep = search(
        SearchConfig(bound=10**4, roots=(parse("3*5"),)),
        sink=events.append,
        prime_source=src_small,
        progress_every=1,
    )
    paths = [e["current_path"] for e in events if e["kind"] == "progress"]
    assert paths[0] == "3*5"
    for p in paths:
        n = parse(p)
        assert n.value % 15 == 0
        assert n.factors[0] == (3, 1) and n.factors[1][0] == 5
