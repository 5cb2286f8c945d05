import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_covers, brute_in_S, roots_brute
from rtaukit import construct, rtau
from rtaukit.construct import (
    assign_T,
    build_justprimes,
    build_main,
    build_sparse,
    certificates,
    check_S,
    collision_ratios,
    iota,
    lemma_largeprimes,
    lemma_manyk,
    roots_mod_p,
    sf_primes,
)
from rtaukit.errors import NoResidue, NotIncreasing, NotInS, PreconditionError, QuotaUnmet
from rtaukit.padic import Determined, valuation
from rtaukit.polyq import X, IntPoly, RTauElem, eisenstein_at, enumerate_I

increasing = st.lists(st.integers(1, 40), min_size=1, max_size=4, unique=True).map(lambda v: tuple(sorted(v)))


# S membership


@pytest.mark.parametrize("d, expected", [((2,), True), ((6, 12), True), ((2, 4), False), ((1,), False)])
def test_check_S_examples(d, expected):
    assert check_S(d) is expected


@given(increasing)
def test_check_S_matches_cover_search(d):
    assert check_S(d) == brute_in_S(d)


def test_check_S_rejects_bad_tuples():
    for d in [(), (3, 3), (4, 2), (0, 2)]:
        with pytest.raises(NotIncreasing):
            check_S(d)


def test_brute_cover_oracle_sanity():
    assert brute_covers((2, 4), 3)
    assert not brute_covers((2,), 3)


# S_f and T_f


def test_sf_primes_examples():
    assert sf_primes(X * X + 1, 20) == {2, 5, 13, 17}
    assert sf_primes(X, 10) == {2, 3, 5, 7}
    assert sf_primes(X * X - 2, 20) == {2, 7, 17}


@given(st.lists(st.integers(-9, 9), min_size=2, max_size=4).map(IntPoly).filter(lambda g: g.degree >= 1))
def test_roots_mod_p_brute(g):
    for p in (2, 3, 5, 7, 11, 13):
        assert roots_mod_p(g, p) == roots_brute(g, p)


def test_assign_T_examples():
    assert assign_T([X, X + 1], 2, 10) == {X: {2, 3}, X + 1: {5, 7}}
    assert assign_T([X], 1, 2) == {X: {2}}
    T = assign_T([X * X + 1, X * X - 2], 1, 20)
    assert T[X * X + 1] == {2} and T[X * X - 2] == {7}


def test_assign_T_quota_unmet():
    with pytest.raises(QuotaUnmet):
        assign_T([X * X + 1, X * X + 3], 3, 10)


def test_build_justprimes_examples():
    s = build_justprimes(1, 3, 50)
    assert enumerate_I(0) == X - 1
    assert s.components and all(c.value == 1 for c in s.components.values())
    for p in s.components:
        assert rtau.membership(RTauElem(X - 1, p), s).certainty == rtau.TRUE
    empty = build_justprimes(0, 2, 10)
    assert not empty.components and empty.default == 0


# lemma of the large primes


def test_largeprimes_example():
    w = lemma_largeprimes([X], 2, (2,))
    assert (w.r, w.primes, w.a) == (2, (7, 11), 4123)
    assert eisenstein_at(X * X + 77 * X + 4123, 7)
    assert eisenstein_at(X * X + 77 * X + 4125, 11)


def test_largeprimes_empty_family():
    assert lemma_largeprimes([], 2, (2,)).r == 2


def test_largeprimes_respects_availability():
    w = lemma_largeprimes([X], 2, (2,), available=lambda q: q != 7)
    assert 7 not in w.primes and all(q > 2**2 + 2 for q in w.primes)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 8), st.integers(2, 4), increasing.filter(lambda d: len(d) <= 3))
def test_largeprimes_postconditions(start, n, d):
    F = [enumerate_I(start + j) for j in range(3)]
    w = lemma_largeprimes(F, n, d)
    p = math.prod(w.primes)
    ds = (0, *d)
    for q in w.primes:
        assert q > w.r**n + d[-1]
    for f in F:
        assert math.gcd(f(w.r), p) == 1
    for k in range(11):
        for i, (q, di) in enumerate(zip(w.primes, ds)):
            g = IntPoly.monomial(n) + IntPoly((w.a + di, k * p))
            assert eisenstein_at(g, q)
            assert all((w.r**n + k * p * w.r + w.a + dj) % q for dj in ds)


# lemma of many k


def test_manyk_examples():
    assert lemma_manyk({}, 77, (2,), 4123, 2).k0 == 1
    assert lemma_manyk({}, 77, (2,), 4123, 2).modulus == 1
    kp = lemma_manyk({3: 1}, 77, (2,), 4123, 2)
    assert (kp.k0, kp.modulus) == (3, 3)


def test_manyk_excluded_values_are_skipped():
    kp = lemma_manyk({3: 1}, 77, (2,), 4123, 2, excluded={3, 6})
    assert kp.k0 == 9 and 6 not in kp and 12 in kp
    assert kp.first(3) == [9, 12, 15]


def test_manyk_preconditions():
    with pytest.raises(PreconditionError):
        lemma_manyk({7: 1}, 77, (2,), 4123, 2)
    with pytest.raises(PreconditionError):
        lemma_manyk({5: 0}, 77, (2,), 4123, 2)
    # (2, 4) covers Z/3, so there is no admissible class when p*c is a unit mod 3
    with pytest.raises(NoResidue):
        lemma_manyk({3: 1}, 1, (2, 4), 0, 2)


# pairing


def test_iota_examples():
    assert iota(0, [(2,)]) == (None, 2)
    assert iota(1, [(2,)]) == ((2,), 2)
    assert iota(2, [(2,)]) == (None, 3)
    assert [iota(m, []) for m in range(5)] == [(None, m + 2) for m in range(5)]


def test_iota_is_injective_and_covers():
    D = [(2,), (6, 12)]
    cells = [iota(m, D) for m in range(300)]
    assert len(set(cells)) == 300
    for row in [None, *D]:
        assert {n for r, n in cells if r == row} >= set(range(2, 40))


def test_iota_stream_matches_list():
    def stream():
        k = 1
        while True:
            yield (2 * k,)
            k += 1

    finite = [(2 * k,) for k in range(1, 30)]
    for m in range(100):
        assert iota(m, construct._LazyRows(stream())) == iota(m, finite)


# collisions


def test_collision_ratios():
    assert collision_ratios(X + 1, 1, X + 3, 2) == {Fraction(2)}
    assert collision_ratios(X * X + X, 1, X * X + 2 * X, 1) == set()
    assert collision_ratios(X * X, 1, X + 1, 1) == set()


# builders


def test_build_sparse_trace():
    s = build_sparse(3)
    assert [(e.f, e.n) for e in s.ledger[:2]] == [(X - 1, 1), (X, 2)]
    assert s.components[2].residue % 2 == 0
    assert valuation(X, s.components[2]) == Determined(1)
    assert s.s_m == 3


def test_build_sparse_stage_arithmetic():
    for M in (1, 4, 9):
        s = build_sparse(M)
        assert s.s_m == sum(e.f.degree for e in s.ledger)
        assert [e.f for e in s.ledger] == [enumerate_I(i) for i in range(M)]


def test_build_sparse_no_integer_differences():
    s = build_sparse(12)
    rtau.pid_report(s)
    for a, b in combinations(s.ledger, 2):
        assert not (a.normalized - b.normalized).is_constant()


def test_build_sparse_resolves_collision():
    # x + 1 at stage 3 would otherwise sit at an integer distance from x - 1 or x/2
    s = build_sparse(3)
    third = s.ledger[2]
    assert third.f == X + 1
    assert not (third.normalized - s.ledger[0].normalized).is_constant()
    assert not (third.normalized - s.ledger[1].normalized).is_constant()


def test_build_main_twin_trace():
    s = build_main([(2,)], 2)
    assert s.ledger[0].progression is None and s.ledger[0].stage == 0
    twins = [e for e in s.ledger if e.progression is not None]
    assert len(twins) == 2 and {e.f.degree for e in twins} == {2}
    assert twins[1].f - twins[0].f == IntPoly((2,))


def test_build_main_three_term_progression():
    s = build_main([(6, 12)], 2)
    (cert,) = certificates(s)
    assert [m - cert.base for m in cert.members] == [IntPoly(), IntPoly((6,)), IntPoly((12,))]
    for member in cert.members:
        assert rtau.is_prime(RTauElem(member), s).certainty.holds


def test_build_main_without_diffs_is_sparse_like():
    s = build_main([], 5)
    assert [e.f for e in s.ledger] == [enumerate_I(i) for i in range(5)]
    assert all(c.residue % c.p for c in s.components.values())


def test_build_main_stage_arithmetic():
    for M in range(1, 9):
        s = build_main([(2,), (6, 12)], M)
        assert s.s_m == 1 + sum(e.f.degree for e in s.ledger)
        assert s.stage == M
        assert set(s.components) >= {p for p in range(2, s.s_m + 1) if all(p % q for q in range(2, p))}


def test_build_main_ledger_invariants():
    s = build_main([(2,)], 12, seed=3)
    report = rtau.pid_report(s)
    assert len(report.entries) == len(s.ledger)
    for a, b in combinations(s.ledger, 2):
        same_prog = a.progression is not None and a.stage == b.stage
        if not same_prog:
            assert not (a.normalized - b.normalized).is_constant()


def test_build_main_rejects_bad_diffs():
    with pytest.raises(NotInS):
        build_main([(2, 4)], 3)
    with pytest.raises(PreconditionError):
        build_main([(2,)], 0)


def test_seed_changes_only_residues():
    a = build_main([(2,)], 6, seed=0)
    b = build_main([(2,)], 6, seed=11)
    assert [e.f.degree for e in a.ledger] == [e.f.degree for e in b.ledger]
    rtau.pid_report(b)
