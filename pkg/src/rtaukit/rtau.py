"""The finite approximation of tau and the ring queries on R_tau.

A ``TauState`` holds the coordinates defined so far, an optional exact
default for every other prime (used for integer tau and for the
"just primes" construction), and the ledger of normalized primes fixed by a
builder. Answers that quantify over all primes come back as a ``Certainty``:
certified, promised by the ledger, or unknown pending a coordinate.

Queries never mutate a state. When an approximate coordinate needs more
digits, the refined snapshot is returned next to the answer.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping

from .errors import (
    InfiniteValuation,
    LedgerViolation,
    PreconditionError,
    UnknownComponent,
)
from .ntheory import factorint, isprime, nextprime, vp
from .padic import (
    Determined,
    Infinite,
    NeedMorePrecision,
    PadicComponent,
    ValuationResult,
    refine,
    valuation,
)
from .polyq import IntPoly, RTauElem, irreducible_over_Z, primitive

FORMAT_VERSION = "1"
BUILDER_KINDS = ("exact", "justprimes", "sparse", "main")


@dataclass(frozen=True)
class Progression:
    diffs: tuple[int, ...]
    r: int
    a: int
    k: int
    witness_primes: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return math.prod(self.witness_primes)

    def base(self, n: int) -> IntPoly:
        """x^n + k*p*x + a."""
        return IntPoly.monomial(n) + IntPoly((self.a, self.k * self.modulus))


@dataclass(frozen=True)
class LedgerEntry:
    f: IntPoly
    n: int
    stage: int
    progression: Progression | None = None

    @property
    def normalized(self) -> RTauElem:
        return RTauElem(self.f, self.n)


@dataclass(frozen=True)
class TauState:
    components: Mapping[int, PadicComponent] = field(default_factory=dict)
    ledger: tuple[LedgerEntry, ...] = ()
    stage: int = 0
    s_m: int = 0
    seed: int = 0
    builder_kind: str = "exact"
    iota: Mapping[str, Any] = field(default_factory=dict)
    default: int | None = None

    def component(self, p: int) -> PadicComponent | None:
        c = self.components.get(p)
        if c is None and self.default is not None:
            return PadicComponent.exact(p, self.default)
        return c

    def is_defined(self, p: int) -> bool:
        return p in self.components or self.default is not None

    def least_undefined(self, start: int = 2) -> int | None:
        if self.default is not None:
            return None
        p = start if isprime(start) else nextprime(start)
        while p in self.components:
            p = nextprime(p)
        return p

    def ledger_polys(self) -> list[IntPoly]:
        return [e.f for e in self.ledger]

    def ledger_entry(self, g: IntPoly) -> LedgerEntry | None:
        for e in self.ledger:
            if e.f == g:
                return e
        return None

    def with_component(self, c: PadicComponent) -> TauState:
        comps = dict(self.components)
        comps[c.p] = c
        return replace(self, components=comps)

    def progressions(self) -> list[list[LedgerEntry]]:
        groups: dict[int, list[LedgerEntry]] = {}
        for e in self.ledger:
            if e.progression is not None:
                groups.setdefault(e.stage, []).append(e)
        return list(groups.values())


def exact_state(z: int = 0) -> TauState:
    """tau with every coordinate equal to the integer ``z``."""
    return TauState(builder_kind="exact", default=z, iota={"value": z})


class Kind(enum.Enum):
    CERTIFIED_TRUE = "CertifiedTrue"
    CERTIFIED_FALSE = "CertifiedFalse"
    PROMISED = "Promised"
    UNKNOWN = "Unknown"


_RANK = {Kind.CERTIFIED_TRUE: 0, Kind.PROMISED: 1, Kind.UNKNOWN: 2, Kind.CERTIFIED_FALSE: 3}


@dataclass(frozen=True)
class Certainty:
    kind: Kind
    prime: int | None = None

    def __str__(self) -> str:
        if self.kind is Kind.UNKNOWN:
            return f"Unknown({self.prime})"
        return self.kind.value

    @property
    def holds(self) -> bool:
        """True or promised."""
        return self.kind in (Kind.CERTIFIED_TRUE, Kind.PROMISED)


TRUE = Certainty(Kind.CERTIFIED_TRUE)
FALSE = Certainty(Kind.CERTIFIED_FALSE)
PROMISED = Certainty(Kind.PROMISED)


def unknown(p: int) -> Certainty:
    return Certainty(Kind.UNKNOWN, p)


def conjoin(*parts: Certainty) -> Certainty:
    """False dominates, then Unknown (least prime), then Promised, then True."""
    worst = TRUE
    for c in parts:
        if _RANK[c.kind] > _RANK[worst.kind]:
            worst = c
        elif c.kind is Kind.UNKNOWN and worst.kind is Kind.UNKNOWN and c.prime < worst.prime:
            worst = c
    return worst


@dataclass(frozen=True)
class Verdict:
    certainty: Certainty
    state: TauState
    valuations: Mapping[int, str] = field(default_factory=dict)
    promise: LedgerEntry | None = None
    note: str = ""

    @property
    def kind(self) -> Kind:
        return self.certainty.kind


def _fmt_val(v: ValuationResult) -> str:
    if isinstance(v, Determined):
        return str(v.e)
    if isinstance(v, Infinite):
        return "inf"
    return f">={v.precision - 1}"


def _settle(state: TauState, g: IntPoly, p: int, target: int = 1) -> tuple[ValuationResult, TauState]:
    """Valuation of g at tau_p, refining an approximate coordinate if needed."""
    c = state.component(p)
    v = valuation(g, c)
    if isinstance(v, NeedMorePrecision) and not c.is_exact:
        avoid = [e for e in state.ledger_polys() if e != g] + [g]
        c = refine(c, avoid, max(target, c.precision))
        state = state.with_component(c)
        v = valuation(g, c)
    return v, state


def membership(f: RTauElem, state: TauState) -> Verdict:
    """Is f(tau) a profinite integer?"""
    parts = []
    vals: dict[int, str] = {}
    for p, k in sorted(factorint(f.den).items()):
        c = state.component(p)
        if c is None:
            parts.append(unknown(p))
            continue
        if f.num.is_zero():
            continue
        v, state = _settle(state, f.num, p, target=k)
        vals[p] = _fmt_val(v)
        if isinstance(v, Infinite):
            parts.append(TRUE)
        elif isinstance(v, Determined):
            parts.append(TRUE if v.e >= k else FALSE)
        else:  # pragma: no cover - _settle always determines approximate coordinates
            parts.append(TRUE if v.precision - 1 >= k else unknown(p))
    return Verdict(conjoin(*parts), state, vals)


def _ledger_match(f: RTauElem, state: TauState) -> LedgerEntry | None:
    if f.num.is_zero() or f.num.content() != 1:
        return None
    g = f.num if f.num.lead > 0 else -f.num
    e = state.ledger_entry(g)
    if e is not None and e.n == f.den:
        return e
    return None


def is_unit_adeles(f: RTauElem, state: TauState) -> Verdict:
    """Is f(tau) a unit of the profinite integers?"""
    if f.num.is_zero():
        return Verdict(FALSE, state, note="zero")
    vals: dict[int, str] = {}
    for p in sorted(state.components):
        v, state = _settle(state, f.num, p)
        vals[p] = _fmt_val(v)
        if isinstance(v, Infinite):
            return Verdict(FALSE, state, vals, note=f"exact root at p={p}")
        if not isinstance(v, Determined):  # pragma: no cover
            raise LedgerViolation(f"valuation at {p} could not be settled")
        if v.e != vp(f.den, p):
            return Verdict(FALSE, state, vals, note=f"valuation {v.e} != v_{p}(den) at p={p}")
    if state.default is not None:
        value = f.num(state.default)
        if value == 0:
            return Verdict(FALSE, state, vals, note="value is zero at the default coordinate")
        value, den = abs(value), f.den
        for p in state.components:
            while value % p == 0:
                value //= p
            while den % p == 0:
                den //= p
        if value == den:
            return Verdict(TRUE, state, vals, note=f"f({state.default}) = ±den off the defined primes")
        return Verdict(FALSE, state, vals, note=f"|f({state.default})| = {value} != {den} off the defined primes")
    entry = _ledger_match(f, state)
    if entry is not None:
        return Verdict(PROMISED, state, vals, promise=entry, note="ledger promise covers undefined primes")
    needed = [p for p in factorint(f.den * f.num.content()) if p not in state.components]
    q = min(needed) if needed else state.least_undefined()
    return Verdict(unknown(q), state, vals, note="no ledger promise covers this polynomial")


def is_prime(f: RTauElem, state: TauState) -> Verdict:
    if f.is_constant():
        c = f.num.constant_term
        if f.den != 1 or abs(c) <= 1:
            if f.den == 1 and abs(c) <= 1:
                raise PreconditionError("0 and units are not candidates for primality")
            return Verdict(FALSE, state, note="non-integer constant")
        return Verdict(TRUE if isprime(abs(c)) else FALSE, state, note="standard prime test")
    if not irreducible_over_Z(primitive(f.num)):
        return Verdict(FALSE, state, note="reducible over Q")
    return is_unit_adeles(f, state)


def normalize_prime(g: IntPoly, state: TauState) -> tuple[RTauElem, TauState]:
    """The normalized prime g/k with k = prod p^{v_p(g(tau_p))}."""
    if g.is_constant() or g.lead <= 0:
        raise PreconditionError("need a non-constant polynomial with positive leading coefficient")
    if not irreducible_over_Z(g):
        raise PreconditionError(f"{g} is not irreducible over Z")
    k = 1
    for p in sorted(state.components):
        v, state = _settle(state, g, p)
        if isinstance(v, Infinite):
            raise InfiniteValuation(f"tau_{p} is a root of {g}")
        k *= p ** v.e
    if state.default is not None:
        value = g(state.default)
        if value == 0:
            raise InfiniteValuation(f"{state.default} is a root of {g}")
        for p, e in factorint(abs(value)).items():
            if p not in state.components:
                k *= p**e
        return RTauElem(g, k), state
    entry = state.ledger_entry(g)
    if entry is None:
        q = state.least_undefined()
        raise UnknownComponent(f"{g} is untracked and tau_{q} is undefined", q)
    if entry.n != k:
        raise LedgerViolation(f"ledger n={entry.n} for {g} but defined valuations give {k}")
    return RTauElem(g, k), state


def r0_prime_oracle(f: RTauElem) -> bool:
    """Closed-form primality in R_0 = xQ[x] + Z."""
    if f.is_constant():
        return f.den == 1 and isprime(abs(f.num.constant_term))
    if not irreducible_over_Z(primitive(f.num)):
        return False
    return abs(f.num.constant_term) == f.den


@dataclass(frozen=True)
class ReportEntry:
    entry: LedgerEntry
    support: Mapping[int, int]


@dataclass(frozen=True)
class PidReport:
    entries: tuple[ReportEntry, ...]
    defined_primes: tuple[int, ...]
    state: TauState

    def lines(self) -> list[str]:
        out = [f"defined primes: {len(self.defined_primes)} (max {max(self.defined_primes, default=0)})"]
        for r in self.entries:
            sup = ", ".join(f"{p}^{e}" for p, e in sorted(r.support.items())) or "none"
            out.append(
                f"{r.entry.normalized}  n={r.entry.n}  support: {sup}; unit at every other prime (promise)"
            )
        return out


def pid_report(state: TauState) -> PidReport:
    """Check the ledger invariants that make the limit ring a PID."""
    if state.builder_kind not in ("sparse", "main"):
        raise PreconditionError(f"pid_report needs a sparse or main state, got {state.builder_kind}")
    entries = []
    for e in state.ledger:
        if e.f.lead <= 0 or e.f.content() != 1:
            raise LedgerViolation(f"ledger polynomial {e.f} is not primitive with positive lead")
        support = {}
        for p, c in sorted(state.components.items()):
            v = valuation(e.f, c)
            if isinstance(v, Infinite):
                raise LedgerViolation(f"tau_{p} is an exact root of {e.f}")
            if isinstance(v, NeedMorePrecision):
                raise LedgerViolation(f"valuation of {e.f} at tau_{p} is undetermined")
            if v.e:
                support[p] = v.e
        if support != dict(factorint(e.n)):
            raise LedgerViolation(f"support {support} of {e.f} does not factor n={e.n}")
        entries.append(ReportEntry(e, support))
    if state.builder_kind == "main":
        for p, c in state.components.items():
            if c.digit_residue() == 0:
                raise LedgerViolation(f"tau_{p} is not a unit")
    return PidReport(tuple(entries), tuple(sorted(state.components)), state)


# --- serialization ----------------------------------------------------------


def state_to_dict(state: TauState) -> dict:
    comps = []
    for p in sorted(state.components):
        c = state.components[p]
        if c.is_exact:
            comps.append({"p": p, "mode": "exact", "value": c.value})
        else:
            comps.append({"p": p, "mode": "approx", "precision": c.precision, "residue": c.residue})
    ledger = []
    for e in state.ledger:
        item: dict[str, Any] = {"coeffs": list(e.f.coeffs), "n": e.n, "stage": e.stage}
        if e.progression is not None:
            pr = e.progression
            item["progression"] = {
                "diffs": list(pr.diffs),
                "r": pr.r,
                "a": pr.a,
                "k": pr.k,
                "witness_primes": list(pr.witness_primes),
            }
        ledger.append(item)
    return {
        "version": FORMAT_VERSION,
        "builder_kind": state.builder_kind,
        "seed": state.seed,
        "stage": state.stage,
        "s_m": state.s_m,
        "iota": _plain(state.iota),
        "default": state.default,
        "components": comps,
        "ledger": ledger,
    }


def _plain(value):
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def state_from_dict(doc: Mapping) -> TauState:
    if doc.get("version") != FORMAT_VERSION:
        raise PreconditionError(f"unsupported state version {doc.get('version')!r}")
    if doc["builder_kind"] not in BUILDER_KINDS:
        raise PreconditionError(f"unknown builder kind {doc['builder_kind']!r}")
    comps = {}
    for c in doc["components"]:
        if c["mode"] == "exact":
            comps[c["p"]] = PadicComponent.exact(c["p"], c["value"])
        else:
            comps[c["p"]] = PadicComponent(c["p"], precision=c["precision"], residue=c["residue"])
    ledger = []
    for item in doc["ledger"]:
        pr = item.get("progression")
        prog = None
        if pr is not None:
            prog = Progression(
                tuple(pr["diffs"]), pr["r"], pr["a"], pr["k"], tuple(pr["witness_primes"])
            )
        ledger.append(LedgerEntry(IntPoly(item["coeffs"]), item["n"], item["stage"], prog))
    return TauState(
        components=comps,
        ledger=tuple(ledger),
        stage=doc["stage"],
        s_m=doc["s_m"],
        seed=doc["seed"],
        builder_kind=doc["builder_kind"],
        iota=doc["iota"],
        default=doc["default"],
    )


def dumps(state: TauState) -> str:
    return json.dumps(state_to_dict(state), indent=1) + "\n"


def loads(text: str) -> TauState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        from .errors import ParseError

        raise ParseError(f"malformed state file: {exc.msg}", exc.pos) from exc
    return state_from_dict(doc)


def save(state: TauState, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(state))


def load(path) -> TauState:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def normalized_primes(state: TauState) -> Iterable[RTauElem]:
    return (e.normalized for e in state.ledger)
