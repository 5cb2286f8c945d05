"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line (shown in the pytest terminal summary and
printed when run with ``-s``) and then asserts. Run standalone with
``python3 tests/test_acceptance.py``.
"""

import math
import random
import subprocess
import sys
import time
from itertools import combinations, product

import pytest

from acceptance_log import record
from oracles import all_polys, brute_in_S, brute_irreducible
from rtaukit import construct, rtau
from rtaukit.construct import check_S, lemma_largeprimes, lemma_manyk
from rtaukit.polyq import IntPoly, RTauElem, enumerate_I, irreducible_over_Z

PRIMES_100 = [p for p in range(2, 100) if all(p % q for q in range(2, p))]


def _eisenstein(g: IntPoly, p: int) -> bool:
    cs = g.coeffs
    return cs[-1] % p != 0 and all(c % p == 0 for c in cs[:-1]) and cs[0] % (p * p) != 0


def _check(number, ok, detail, elapsed, bound=None):
    timing = f"{elapsed:.1f}s" + (f" (< {bound}s)" if bound else "")
    in_time = bound is None or elapsed < bound
    record(number, ok and in_time, f"{detail}; {timing}")
    assert ok, detail
    assert in_time, f"took {elapsed:.1f}s, bound {bound}s"


def test_criterion_01_check_S_oracle():
    t = time.perf_counter()
    total = agree = 0
    for length in (1, 2, 3):
        for d in combinations(range(1, 25), length):
            total += 1
            agree += check_S(d) == brute_in_S(d)
    _check(1, agree == total, f"{agree}/{total} tuples agree", time.perf_counter() - t, 60)


def test_criterion_02_reference_families():
    t = time.perf_counter()
    got = {d: check_S(d) for d in [(2,), (6, 12), (1,), (2, 4)]}
    want = {(2,): True, (6, 12): True, (1,): False, (2, 4): False}
    _check(2, got == want, f"{got}", time.perf_counter() - t)


def test_criterion_03_largeprimes_harness():
    rng = random.Random(3)
    t = time.perf_counter()
    failures = []
    for trial in range(100):
        n = rng.randint(2, 5)
        length = rng.randint(1, 3)
        d = tuple(sorted(rng.sample(range(1, 30), length)))
        F = [enumerate_I(rng.randrange(60)) for _ in range(rng.randint(0, 5))]
        w = lemma_largeprimes(F, n, d)
        ds = (0, *d)
        p = math.prod(w.primes)
        ok = len(set(w.primes)) == len(ds)
        ok &= w.r**n > d[-1] and all(q > w.r**n + d[-1] for q in w.primes)
        ok &= all(math.gcd(f(w.r), p) == 1 for f in F)
        for k in range(11):
            for q, di in zip(w.primes, ds):
                ok &= _eisenstein(IntPoly.monomial(n) + IntPoly((w.a + di, k * p)), q)
            for dj in ds:
                ok &= math.gcd(w.r**n + k * p * w.r + w.a + dj, p) == 1
        if not ok:
            failures.append((trial, n, d, F))
    _check(3, not failures, f"100 instances, {len(failures)} failures", time.perf_counter() - t, 120)


def test_criterion_04_manyk_harness():
    rng = random.Random(4)
    admissible = [d for length in (1, 2, 3) for d in combinations(range(2, 31, 2), length) if check_S(d)]
    t = time.perf_counter()
    failures = 0
    for _ in range(100):
        d = rng.choice(admissible)
        n = rng.randint(2, 5)
        witness = rng.sample(PRIMES_100[5:], len(d) + 1)
        p = math.prod(witness)
        qs = rng.sample([q for q in PRIMES_100 if q not in witness], rng.randint(0, 6))
        constraints = {q: rng.randint(1, q - 1) for q in qs}
        a = rng.randrange(10**6)
        excluded = set(rng.sample(range(1, 200), 3))
        kp = lemma_manyk(constraints, p, d, a, n, excluded)
        for k in kp.first(10):
            ok = k > 0 and k not in excluded
            ok &= all(
                (c**n + k * p * c + a + di) % q != 0 for q, c in constraints.items() for di in (0, *d)
            )
            failures += not ok
    _check(4, failures == 0, f"100 instances x 10 members, {failures} failures", time.perf_counter() - t, 60)


def _progression_summary(state, length):
    certs = [c for c in construct.certificates(state) if len(c.members) == length]
    good = [c for c in certs if all(rtau.is_prime(RTauElem(m), state).certainty.holds for m in c.members)]
    return certs, good


def test_criterion_05_twin_primes():
    t = time.perf_counter()
    state = construct.build_main([(2,)], 40, seed=1)
    certs, good = _progression_summary(state, 2)
    degrees = {c.n for c in good}
    rtau.pid_report(state)
    ok = len(good) >= 5 and len(degrees) >= 3 and all(m[1] - m[0] == IntPoly((2,)) for m in (c.members for c in good))
    _check(
        5,
        ok,
        f"{len(good)}/{len(certs)} twin certificates hold, degrees {sorted(degrees)}, pid report clean",
        time.perf_counter() - t,
        300,
    )


def test_criterion_06_three_term_progressions():
    t = time.perf_counter()
    state = construct.build_main([(6, 12)], 30)
    certs, good = _progression_summary(state, 3)
    rtau.pid_report(state)
    _check(6, len(good) >= 3, f"{len(good)}/{len(certs)} progressions (f, f+6, f+12) hold", time.perf_counter() - t, 300)


def test_criterion_07_sparse_differences():
    t = time.perf_counter()
    state = construct.build_sparse(20)
    pairs = list(combinations(state.ledger, 2))
    bad = [(a.f, b.f) for a, b in pairs if (a.normalized - b.normalized).is_constant()]
    ok = len(state.ledger) == 20 and len(pairs) == 190 and not bad
    _check(7, ok, f"{len(pairs) - len(bad)}/{len(pairs)} differences non-constant", time.perf_counter() - t, 180)


def _r0_corpus(size=500, seed=8):
    rng = random.Random(seed)
    seen, corpus = set(), []
    while len(corpus) < size:
        den = rng.randint(1, 6)
        deg = rng.randint(0, 4)
        coeffs = [rng.randint(-9, 9) for _ in range(deg + 1)]
        if rng.random() < 0.5:
            # steer half of the samples toward constant term +-den, where primes live
            coeffs[0] = rng.choice((den, -den))
        if coeffs[-1] == 0:
            continue
        f = RTauElem(IntPoly(coeffs), den)
        if f.num.height > 9 or f.num(0) % f.den or f in seen:
            continue
        if f.is_constant() and abs(f.num.constant_term) <= 1:
            continue
        seen.add(f)
        corpus.append(f)
    return corpus


def test_criterion_08_r0_oracle():
    t = time.perf_counter()
    state = rtau.exact_state(0)
    corpus = _r0_corpus()
    agree = 0
    primes = 0
    for f in corpus:
        assert rtau.membership(f, state).certainty == rtau.TRUE
        expected = rtau.r0_prime_oracle(f)
        got = rtau.is_prime(f, state).certainty
        primes += expected
        agree += got == (rtau.TRUE if expected else rtau.FALSE)
    _check(8, agree == len(corpus), f"{agree}/{len(corpus)} agree ({primes} primes)", time.perf_counter() - t)


def test_criterion_09_twin_family_in_r0():
    t = time.perf_counter()
    state = rtau.exact_state(0)
    verdicts = {}
    for n, sign in product(range(2, 7), (-2, 2)):
        f = RTauElem(IntPoly.monomial(n) + sign, 2)
        verdicts[str(f)] = rtau.is_prime(f, state).certainty
    ok = all(v == rtau.TRUE for v in verdicts.values())
    _check(9, ok, f"{sum(v == rtau.TRUE for v in verdicts.values())}/10 certified", time.perf_counter() - t)


def test_criterion_10_justprimes():
    t = time.perf_counter()
    state = construct.build_justprimes(10, 2, 1000)
    T = [(IntPoly(item["coeffs"]), item["primes"]) for item in state.iota["T"]]
    sets = [set(ps) for _, ps in T]
    disjoint = all(a.isdisjoint(b) for a, b in combinations(sets, 2))
    checks = [rtau.membership(RTauElem(f, p), state).certainty == rtau.TRUE for f, ps in T for p in ps]
    ok = len(T) == 10 and disjoint and all(checks)
    _check(10, ok, f"disjoint={disjoint}, {sum(checks)}/{len(checks)} memberships certified", time.perf_counter() - t, 60)


def _cli_bytes(tmp_path, name, argv):
    out = tmp_path / name
    subprocess.run([sys.executable, "-m", "rtaukit", *argv, "--out", str(out)], check=True, capture_output=True)
    return out.read_bytes()


def test_criterion_11_determinism(tmp_path):
    t = time.perf_counter()
    builders = {
        "justprimes": lambda: construct.build_justprimes(6, 2, 500),
        "sparse": lambda: construct.build_sparse(10, seed=5),
        "main": lambda: construct.build_main([(2,), (6, 12)], 12, seed=9),
        "exact": lambda: rtau.exact_state(4),
    }
    same = {name: rtau.dumps(build()) == rtau.dumps(build()) for name, build in builders.items()}
    argv = ["build-main", "--diffs", "2;6,12", "--stages", "8", "--seed", "7"]
    same["cli"] = _cli_bytes(tmp_path, "a.tau", argv) == _cli_bytes(tmp_path, "b.tau", argv)
    _check(11, all(same.values()), f"byte-identical reruns: {same}", time.perf_counter() - t)


def test_criterion_12_irreducibility_sweep():
    polys = list(all_polys(4, 5))
    t = time.perf_counter()
    expected = [brute_irreducible(g) for g in polys]
    oracle_time = time.perf_counter() - t
    got = [irreducible_over_Z(g) for g in polys]
    elapsed = time.perf_counter() - t
    agree = sum(a == b for a, b in zip(expected, got))
    _check(
        12,
        agree == len(polys),
        f"{agree}/{len(polys)} agree (oracle {oracle_time:.1f}s, library {elapsed - oracle_time:.1f}s)",
        elapsed,
        120,
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
