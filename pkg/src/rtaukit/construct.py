"""Stage-wise builders for tau and the lemmas they rely on.

``build_justprimes`` realizes a tau with integer coordinates whose only
primes are the standard ones. ``build_sparse`` fixes normalized primes whose
pairwise differences are never integers. ``build_main`` interleaves those
sparse stages with stages that plant prime progressions
``(f, f + d_1, ..., f + d_l)`` with prescribed differences.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count, islice
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    ExhaustedPrimes,
    LedgerViolation,
    LefschetzSearchExhausted,
    NoResidue,
    NotIncreasing,
    NotInS,
    PreconditionError,
    QuotaUnmet,
)
from .ntheory import isprime, nextprime, primes_upto
from .padic import (
    Congruence,
    Determined,
    NeedMorePrecision,
    PadicComponent,
    crt_solve,
    refine,
    valuation,
)
from .polyq import X, IntPoly, eisenstein_at, eval_mod, iter_I, enumerate_I, in_I
from .rtau import LedgerEntry, Progression, TauState

log = logging.getLogger(__name__)

DiffTuple = tuple[int, ...]

LEFSCHETZ_CAP = 10**6
PRIME_SEARCH_CAP = 10**6


def diff_tuple(values: Iterable[int]) -> DiffTuple:
    d = tuple(int(v) for v in values)
    if not d:
        raise NotIncreasing("a difference tuple needs at least one entry")
    if d[0] <= 0 or any(b <= a for a, b in zip(d, d[1:])):
        raise NotIncreasing(f"differences must be positive and strictly increasing: {d}")
    return d


def check_S(d: Sequence[int]) -> bool:
    """Do {0, d_1, ..., d_l} miss a residue class modulo every prime?

    Only primes p <= l + 1 can be covered by l + 1 values.
    """
    d = diff_tuple(d)
    for p in primes_upto(len(d) + 1):
        if len({0, *(x % p for x in d)}) == p:
            return False
    return True


def roots_mod_p(f: IntPoly, p: int) -> list[int]:
    return [z for z in range(p) if eval_mod(f, z, p) == 0]


def sf_primes(f: IntPoly, N: int) -> set[int]:
    """Primes p <= N for which f has a root mod p."""
    if f.is_constant():
        raise PreconditionError("S_f needs a non-constant polynomial")
    return {p for p in primes_upto(N) if any(eval_mod(f, z, p) == 0 for z in range(p))}


def assign_T(fs: Sequence[IntPoly], count: int, N: int) -> dict[IntPoly, set[int]]:
    """Greedy pairwise-disjoint T_f within S_f, each of size ``count``."""
    if len(set(fs)) != len(fs):
        raise PreconditionError("polynomials must be pairwise distinct")
    claimed: set[int] = set()
    out: dict[IntPoly, set[int]] = {}
    primes = primes_upto(N)
    for f in fs:
        if f.is_constant():
            raise PreconditionError("T_f needs a non-constant polynomial")
        chosen: set[int] = set()
        for p in primes:
            if len(chosen) == count:
                break
            if p not in claimed and any(eval_mod(f, z, p) == 0 for z in range(p)):
                chosen.add(p)
        if len(chosen) < count:
            raise QuotaUnmet(f"only {len(chosen)} primes <= {N} available for {f}", f)
        claimed |= chosen
        out[f] = chosen
    return out


def build_justprimes(M: int, quota: int, N: int) -> TauState:
    """Integer coordinates: tau_p = least z with p | f(z) for p in T_f, else 0."""
    if M < 0:
        raise PreconditionError("M must be non-negative")
    fs = [enumerate_I(i) for i in range(M)]
    T = assign_T(fs, quota, N) if fs else {}
    comps = {}
    for f, primes in T.items():
        for p in primes:
            comps[p] = PadicComponent.exact(p, roots_mod_p(f, p)[0])
    iota = {
        "count": M,
        "quota": quota,
        "bound": N,
        "T": [{"coeffs": list(f.coeffs), "primes": sorted(T[f])} for f in fs],
    }
    return TauState(
        components=dict(sorted(comps.items())),
        builder_kind="justprimes",
        iota=iota,
        default=0,
        stage=M,
    )


# --- the two lemmas behind progression stages -------------------------------


@dataclass(frozen=True)
class LargePrimesWitness:
    r: int
    a: int
    primes: tuple[int, ...]
    n: int
    diffs: DiffTuple
    F: tuple[IntPoly, ...] = ()

    def __post_init__(self):
        self.verify()

    @property
    def p(self) -> int:
        return math.prod(self.primes)

    def member(self, k: int, i: int) -> IntPoly:
        """x^n + k*p*x + a + d_i  (d_0 = 0)."""
        shift = 0 if i == 0 else self.diffs[i - 1]
        return IntPoly.monomial(self.n) + IntPoly((self.a + shift, k * self.p))

    def verify(self, ks: Iterable[int] = range(11)) -> None:
        ds = (0, *self.diffs)
        p = self.p
        rn = self.r**self.n
        if len(set(self.primes)) != len(ds):
            raise LedgerViolation("witness needs l + 1 distinct primes")
        if rn <= ds[-1]:
            raise LedgerViolation("r^n must exceed d_l")
        if any(q <= rn + ds[-1] for q in self.primes):
            raise LedgerViolation("every witness prime must exceed r^n + d_l")
        for f in self.F:
            if math.gcd(f(self.r), p) != 1:
                raise LedgerViolation(f"{f}(r) shares a factor with p")
        for k in ks:
            for i, (q, d) in enumerate(zip(self.primes, ds)):
                if not eisenstein_at(self.member(k, i), q):
                    raise LedgerViolation(f"member {i} is not Eisenstein at {q} for k={k}")
            for d in ds:
                if math.gcd(rn + k * p * self.r + self.a + d, p) != 1:
                    raise LedgerViolation(f"value at r not coprime to p for k={k}, d={d}")


def lemma_largeprimes(
    F: Iterable[IntPoly],
    n: int,
    d: Sequence[int],
    available: Callable[[int], bool] = lambda q: True,
    search_cap: int = PRIME_SEARCH_CAP,
) -> LargePrimesWitness:
    """Least r, least admissible primes and least CRT solution a."""
    if n < 2:
        raise PreconditionError("degree n must be at least 2")
    d = diff_tuple(d)
    F = tuple(F)
    r = 1
    while r**n <= d[-1] or any(f(r) == 0 for f in F):
        r += 1
    values = [f(r) for f in F]
    bound = r**n + d[-1]
    primes: list[int] = []
    q = bound
    for _ in range(search_cap):
        q = nextprime(q)
        if available(q) and all(v % q for v in values):
            primes.append(q)
            if len(primes) == len(d) + 1:
                break
    else:
        raise ExhaustedPrimes(f"found {len(primes)} of {len(d) + 1} primes within the search cap")
    a, _ = crt_solve([Congruence(q - di, q * q) for q, di in zip(primes, (0, *d))])
    return LargePrimesWitness(r=r, a=a, primes=tuple(primes), n=n, diffs=d, F=F)


@dataclass(frozen=True)
class KProgression:
    k0: int
    modulus: int
    excluded: frozenset[int] = frozenset()

    def __contains__(self, k: int) -> bool:
        return k > 0 and (k - self.k0) % self.modulus == 0 and k not in self.excluded

    def members(self) -> Iterator[int]:
        for k in count(self.k0, self.modulus):
            if k not in self.excluded:
                yield k

    def first(self, n: int) -> list[int]:
        return list(islice(self.members(), n))


def lemma_manyk(
    constraints: Mapping[int, int],
    p: int,
    d: Sequence[int],
    a: int,
    n: int,
    excluded: Iterable[int] = (),
) -> KProgression:
    """Class of k with q not dividing c_q^n + k p c_q + a + d_i for all q, i."""
    d = diff_tuple(d)
    ds = (0, *d)
    system = []
    for q in sorted(constraints):
        c = constraints[q]
        if p % q == 0:
            raise PreconditionError(f"q={q} divides p")
        if not 1 <= c < q:
            raise PreconditionError(f"c_q={c} is not a unit residue mod {q}")
        base = pow(c, n, q) + a
        slope = p * c % q
        for residue in range(q):
            if all((base + residue * slope + di) % q for di in ds):
                system.append(Congruence(residue, q))
                break
        else:
            raise NoResidue(f"no admissible class of k modulo {q}", q)
    k0, modulus = crt_solve(system)
    excluded = frozenset(excluded)
    k = k0 if k0 > 0 else modulus
    while k in excluded:
        k += modulus
    return KProgression(k, modulus, excluded)


def iota(m: int, D: Sequence[DiffTuple]) -> tuple[DiffTuple | None, int]:
    """Anti-diagonal pairing of N onto (D + [empty]) x {2, 3, ...}.

    Rows are (empty, D[0], D[1], ...); along each anti-diagonal the column
    index increases. Returns (None, n) for the empty branch.
    """
    if m < 0:
        raise PreconditionError("iota index must be non-negative")
    rows = _rows(D)
    for t in count():
        for col in range(t + 1):
            row = t - col
            if not rows.has(row):
                continue
            if m == 0:
                return (None if row == 0 else rows[row - 1]), col + 2
            m -= 1


class _LazyRows:
    """Row view over a finite list or an (infinite) stream of tuples."""

    def __init__(self, source):
        self._seq = list(source) if isinstance(source, (list, tuple)) else []
        self._it = None if isinstance(source, (list, tuple)) else iter(source)

    def has(self, row: int) -> bool:
        if row == 0:
            return True
        while self._it is not None and len(self._seq) < row:
            try:
                self._seq.append(next(self._it))
            except StopIteration:
                self._it = None
        return row - 1 < len(self._seq)

    def __getitem__(self, i: int):
        return self._seq[i]


def _rows(D) -> _LazyRows:
    return D if isinstance(D, _LazyRows) else _LazyRows(D)


# --- builders ---------------------------------------------------------------


@dataclass(frozen=True)
class ProgressionCertificate:
    base: IntPoly
    diffs: DiffTuple
    r: int
    a: int
    k: int
    witness_primes: tuple[int, ...]
    n: int
    stage: int

    @property
    def members(self) -> list[IntPoly]:
        return [self.base + di for di in (0, *self.diffs)]


def certificates(state: TauState) -> list[ProgressionCertificate]:
    out = []
    for group in state.progressions():
        pr = group[0].progression
        n = group[0].f.degree
        out.append(
            ProgressionCertificate(
                base=pr.base(n),
                diffs=pr.diffs,
                r=pr.r,
                a=pr.a,
                k=pr.k,
                witness_primes=pr.witness_primes,
                n=n,
                stage=group[0].stage,
            )
        )
    return out


def collision_ratios(f: IntPoly, n_f: int, g: IntPoly, n_g: int) -> set[Fraction]:
    """All rationals t > 0 with g/n_g - f/(t n_f) constant."""
    if f.degree != g.degree:
        return set()
    t = None
    for a, b in zip(f.coeffs[1:], g.coeffs[1:]):
        if (a == 0) != (b == 0):
            return set()
        if a:
            ratio = Fraction(a * n_g, n_f * b)
            if t is None:
                t = ratio
            elif ratio != t:
                return set()
    return {t} if t is not None and t > 0 else set()


class _Builder:
    def __init__(self, kind: str, seed: int, iota_params: dict, s0: int):
        self.kind = kind
        self.seed = seed
        self.iota_params = iota_params
        self.components: dict[int, PadicComponent] = {}
        self.ledger: list[LedgerEntry] = []
        self.s = s0
        self.stage = 0
        self.unit = kind == "main"

    def snapshot(self) -> TauState:
        return TauState(
            components=dict(sorted(self.components.items())),
            ledger=tuple(self.ledger),
            stage=self.stage,
            s_m=self.s,
            seed=self.seed,
            builder_kind=self.kind,
            iota=self.iota_params,
        )

    def polys(self) -> list[IntPoly]:
        return [e.f for e in self.ledger]

    def _start(self, p: int) -> int:
        return random.Random(f"{self.seed}:{p}").randrange(p)

    def define_upto(self, s: int) -> None:
        """Coordinates for undefined primes <= s, avoiding roots of the ledger mod p."""
        polys = self.polys()
        for p in primes_upto(s):
            if p in self.components:
                continue
            start = self._start(p)
            for j in range(p):
                c = (start + j) % p
                if self.unit and c == 0:
                    continue
                if all(eval_mod(g, c, p) for g in polys):
                    break
            else:
                raise LedgerViolation(f"no admissible residue mod {p}; s bookkeeping is broken")
            self.components[p] = PadicComponent.approx(p, 1, c)

    def settle(self, f: IntPoly) -> int:
        """prod p^{v_p(f(tau_p))} over the defined primes, refining as needed."""
        k = 1
        avoid = self.polys() + [f]
        for p, c in sorted(self.components.items()):
            v = valuation(f, c)
            if isinstance(v, NeedMorePrecision):
                c = refine(c, avoid, c.precision)
                self.components[p] = c
                v = valuation(f, c)
            if not isinstance(v, Determined):
                raise LedgerViolation(f"tau_{p} is an exact root of {f}")
            k *= p**v.e
        return k

    def sparse_step(self, f: IntPoly) -> None:
        n_prime = self.settle(f)
        bad: set[Fraction] = set()
        for e in self.ledger:
            bad |= collision_ratios(f, n_prime, e.f, e.n)
        n = n_prime
        if Fraction(1) in bad:
            q, e_q = self.lefschetz(f, bad)
            n = q**e_q * n_prime
            log.debug("stage %d: %s collided, fresh prime %d^%d", self.stage, f, q, e_q)
        self.ledger.append(LedgerEntry(f, n, self.stage))

    def lefschetz(self, f: IntPoly, bad: set[Fraction]) -> tuple[int, int]:
        """Fresh prime q and root c of f mod q that is no root of the ledger (or of x)."""
        polys = self.polys()
        avoid = polys + [f]
        q = 1
        for _ in range(LEFSCHETZ_CAP):
            q = nextprime(q)
            if q in self.components or f.lead % q == 0:
                continue
            for c in roots_mod_p(f, q):
                if self.unit and c == 0:
                    continue
                if any(eval_mod(g, c, q) == 0 for g in polys):
                    continue
                comp = refine(PadicComponent.approx(q, 1, c), avoid, 1)
                e_q = valuation(f, comp).e
                if Fraction(q**e_q) in bad:
                    continue
                self.components[q] = comp
                return q, e_q
        raise LefschetzSearchExhausted(f"no fresh prime separates {f} within {LEFSCHETZ_CAP} primes")

    def progression_step(self, d: DiffTuple, n: int) -> None:
        witness = lemma_largeprimes(
            self.polys() + [X], n, d, available=lambda q: q not in self.components
        )
        for q in witness.primes:
            self.components[q] = PadicComponent.approx(q, 1, witness.r % q)
        P = witness.p
        constraints = {
            q: c.digit_residue() for q, c in self.components.items() if q not in witness.primes
        }
        excluded = set()
        for e in self.ledger:
            g = e.f
            if g.degree != n or g.lead != e.n:
                continue
            if any(g.coeffs[2:n]):
                continue
            if g.coeffs[1] % (e.n * P) == 0 and g.coeffs[1] > 0:
                excluded.add(g.coeffs[1] // (e.n * P))
        k = lemma_manyk(constraints, P, d, witness.a, n, excluded).k0
        prog = Progression(d, witness.r, witness.a, k, witness.primes)
        for i in range(len(d) + 1):
            member = witness.member(k, i)
            if not eisenstein_at(member, witness.primes[i]):
                raise LedgerViolation(f"progression member {member} lost its Eisenstein certificate")
            self.ledger.append(LedgerEntry(member, 1, self.stage, prog))


def build_sparse(M: int, seed: int = 0) -> TauState:
    """M stages: f_i = enumerate_I(i-1), s(i) = sum of degrees so far."""
    if M < 1:
        raise PreconditionError("M must be at least 1")
    b = _Builder("sparse", seed, {"order": "weight,degree,height,lex"}, s0=0)
    for i in range(1, M + 1):
        b.stage = i
        f = enumerate_I(i - 1)
        b.s += f.degree
        b.define_upto(b.s)
        b.sparse_step(f)
    return b.snapshot()


def build_main(D: Iterable[Sequence[int]], M: int, seed: int = 0) -> TauState:
    """M stages of the interleaved construction driven by iota(m, D)."""
    if M < 1:
        raise PreconditionError("M must be at least 1")
    if isinstance(D, (list, tuple)):
        D = [diff_tuple(d) for d in D]
        for d in D:
            if not check_S(d):
                raise NotInS(f"{d} covers every residue class modulo some prime")
        params = {"diffs": [list(d) for d in D], "pairing": "antidiagonal"}
        rows = _LazyRows(D)
    else:
        rows = _LazyRows(_checked_stream(D))
        params = {"diffs": "stream", "pairing": "antidiagonal"}
    b = _Builder("main", seed, params, s0=1)
    for m in range(M):
        d, n = iota(m, rows)
        b.stage = m
        if d is None:
            taken = set(b.polys())
            f = next(g for g in iter_I() if g not in taken)
            b.s += f.degree
            b.define_upto(b.s)
            b.sparse_step(f)
        else:
            b.s += (len(d) + 1) * n
            b.define_upto(b.s)
            b.progression_step(d, n)
    b.stage = M
    return b.snapshot()


def _checked_stream(D: Iterable[Sequence[int]]) -> Iterator[DiffTuple]:
    for d in D:
        d = diff_tuple(d)
        if not check_S(d):
            raise NotInS(f"{d} covers every residue class modulo some prime")
        yield d


__all__ = [
    "DiffTuple",
    "KProgression",
    "LargePrimesWitness",
    "ProgressionCertificate",
    "assign_T",
    "build_justprimes",
    "build_main",
    "build_sparse",
    "certificates",
    "check_S",
    "collision_ratios",
    "diff_tuple",
    "iota",
    "lemma_largeprimes",
    "lemma_manyk",
    "roots_mod_p",
    "sf_primes",
]
