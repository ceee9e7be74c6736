import os
import random
import subprocess
import sys

import numpy as np
import pytest

from weirdsearch import accel

from conftest import divisors_trial, make_instance, sigma_trial, subset_oracle_bigint

needs_numba = pytest.mark.skipif(not accel.HAVE_NUMBA, reason="numba unavailable")


@pytest.mark.parametrize("limit", [0, 1, 2, 3, 100, 10_000])
def test_primes_upto_numpy(limit):
    got = accel._primes_upto_numpy(limit).tolist()
    flags = [False, False] + [True] * max(0, limit - 1)
    for p in range(2, limit + 1):
        if flags[p]:
            for q in range(2 * p, limit + 1, p):
                flags[q] = False
    assert got == [i for i in range(2, limit + 1) if flags[i]]


@needs_numba
@pytest.mark.parametrize("limit", [0, 1, 2, 3, 100, 10_000])
def test_primes_upto_backends_agree(limit):
    a = accel._primes_upto_numpy(limit)
    b = accel._primes_upto_numba(limit)
    assert np.array_equal(a, b)


def test_spf_table():
    spf = accel.spf_upto(10_000)
    assert spf[0] == 0 and spf[1] == 0
    for n in (2, 3, 4, 9, 91, 9991, 9973):
        smallest = min(p for p, _ in _trial_factor(n))
        assert spf[n] == smallest
    if accel.HAVE_NUMBA:
        assert np.array_equal(accel._spf_upto_numpy(10_000), accel._spf_upto_numba(10_000))


def _trial_factor(n):
    pairs = []
    m, p = n, 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            pairs.append((p, e))
        p += 1
    if m > 1:
        pairs.append((m, 1))
    return pairs


def test_sigma_table():
    sig = accel.sigma_upto(5_000)
    rng = random.Random(11)
    for n in [1, 2, 6, 28, 945, 4999] + [rng.randint(1, 5000) for _ in range(50)]:
        assert sig[n] == sigma_trial(n)
    if accel.HAVE_NUMBA:
        assert np.array_equal(accel._sigma_upto_numpy(5_000), accel._sigma_upto_numba(5_000))


def test_subset_reachable_vs_bigint_oracle():
    rng = random.Random(23)
    for _ in range(600):
        items, target, _ = make_instance(rng, n_max=5_000)
        arr = np.array(items, dtype=np.int64)
        want = subset_oracle_bigint(items, target)
        assert accel._subset_reachable_numpy(arr, target) == want
        if accel.HAVE_NUMBA:
            assert bool(accel._subset_reachable_numba(arr, target)) == want


def test_subset_reachable_word_boundaries():
    # sums landing exactly on 64-bit word edges of the packed bitset
    for target in (63, 64, 65, 127, 128, 129, 191, 192):
        items = [target - 1, 1]
        arr = np.array(items, dtype=np.int64)
        assert accel.subset_reachable(arr, target)
        only = np.array([target + 1], dtype=np.int64)
        assert not accel.subset_reachable(only, target)


@needs_numba
def test_branch_bound_matches_python_twin():
    from weirdsearch.classify import _branch_bound_py

    rng = random.Random(5)
    for _ in range(400):
        items, target, _ = make_instance(rng, n_max=200_000)
        arr = np.array(items, dtype=np.int64)
        assert accel.branch_bound(arr, target, -1) == _branch_bound_py(
            tuple(items), target, -1
        )


@needs_numba
def test_branch_bound_budget_parity():
    from weirdsearch.classify import _branch_bound_py

    rng = random.Random(17)
    checked = 0
    for _ in range(200):
        items, target, _ = make_instance(rng, n_max=20_000)
        arr = np.array(items, dtype=np.int64)
        for budget in range(0, 12):
            a = accel.branch_bound(arr, target, budget)
            b = _branch_bound_py(tuple(items), target, budget)
            assert a == b, (items, target, budget)
            checked += 1
            if a >= 0:
                break
    assert checked > 200


def test_oracle_code_backends_and_values():
    # 0 deficient, 1 perfect, 2 semiperfect, 3 weird
    assert accel.oracle_code(1) == 0
    assert accel.oracle_code(6) == 1
    assert accel.oracle_code(12) == 2
    assert accel.oracle_code(70) == 3
    assert accel.oracle_code(836) == 3
    assert accel.oracle_code(945) == 2
    if accel.HAVE_NUMBA:
        for n in range(1, 3_000):
            assert accel._oracle_code_numba(n) == accel._oracle_code_numpy(n), n


def _backend_in_subprocess(flag: str | None) -> str:
    env = dict(os.environ)
    env.pop("WEIRDSEARCH_NUMBA", None)
    if flag is not None:
        env["WEIRDSEARCH_NUMBA"] = flag
    out = subprocess.run(
        [sys.executable, "-c", "from weirdsearch import accel; print(accel.backend_name())"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return out.stdout.strip()


def test_env_flag_selects_numpy():
    assert _backend_in_subprocess("0") == "numpy"
    assert _backend_in_subprocess("off") == "numpy"


@needs_numba
def test_env_flag_default_and_require():
    assert _backend_in_subprocess(None) == "numba"
    assert _backend_in_subprocess("1") == "numba"


def test_numpy_path_runs_search_end_to_end():
    env = dict(os.environ)
    env["WEIRDSEARCH_NUMBA"] = "0"
    code = (
        "from weirdsearch import SearchConfig, search, build, from_factors\n"
        "src = build(500)\n"
        "rep = search(SearchConfig(bound=10**4, roots=(from_factors([(2,1)]),)), prime_source=src)\n"
        "print(sorted(rep.weird_found))\n"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env, check=True
    )
    assert "2*5*7" in out.stdout
    assert "2^2*11*19" in out.stdout
