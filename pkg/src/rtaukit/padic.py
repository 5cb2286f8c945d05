"""Finite-precision p-adic coordinates, valuations and CRT.

A coordinate is either an exact integer or a residue known modulo ``p**m``.
Approximate coordinates are refined lazily: digits are appended only when a
tracked polynomial's valuation is still undecided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import NonCoprimeModuli, PreconditionError, ValuationUnresolvable
from .ntheory import vp
from .polyq import IntPoly, eval_mod

DEPTH_CAP = 64


@dataclass(frozen=True)
class PadicComponent:
    p: int
    value: int | None = None
    precision: int = 0
    residue: int = 0

    def __post_init__(self):
        if self.value is None:
            if self.precision < 1:
                raise PreconditionError("approximate component needs precision >= 1")
            if not 0 <= self.residue < self.p**self.precision:
                raise PreconditionError(f"residue {self.residue} not reduced mod {self.p}^{self.precision}")

    @classmethod
    def exact(cls, p: int, value: int) -> PadicComponent:
        return cls(p, value=value)

    @classmethod
    def approx(cls, p: int, precision: int, residue: int) -> PadicComponent:
        return cls(p, precision=precision, residue=residue % p**precision)

    @property
    def is_exact(self) -> bool:
        return self.value is not None

    @property
    def modulus(self) -> int:
        return self.p**self.precision

    def digit_residue(self) -> int:
        """Residue class mod p."""
        return (self.value if self.is_exact else self.residue) % self.p

    def extends(self, other: PadicComponent) -> bool:
        if self.p != other.p:
            return False
        if other.is_exact or self.is_exact:
            return self == other
        return self.precision >= other.precision and self.residue % other.modulus == other.residue

    def __str__(self) -> str:
        if self.is_exact:
            return f"Exact({self.value})"
        return f"Approx({self.p}, {self.precision}, {self.residue})"


@dataclass(frozen=True)
class Determined:
    e: int


@dataclass(frozen=True)
class Infinite:
    pass


@dataclass(frozen=True)
class NeedMorePrecision:
    precision: int


ValuationResult = Union[Determined, Infinite, NeedMorePrecision]


def valuation(g: IntPoly, c: PadicComponent) -> ValuationResult:
    if c.is_exact:
        v = g(c.value)
        return Infinite() if v == 0 else Determined(vp(v, c.p))
    v = eval_mod(g, c.residue, c.modulus)
    if v == 0:
        return NeedMorePrecision(c.precision + 1)
    return Determined(vp(v, c.p))


def is_unit_value(g: IntPoly, c: PadicComponent) -> bool:
    if c.is_exact:
        return g(c.value) % c.p != 0
    return eval_mod(g, c.residue, c.p) != 0


def _all_determined(polys: Sequence[IntPoly], residue: int, modulus: int) -> bool:
    return all(eval_mod(g, residue, modulus) != 0 for g in polys)


def refine(
    c: PadicComponent,
    avoid: Iterable[IntPoly] = (),
    target: int = 1,
    depth_cap: int = DEPTH_CAP,
) -> PadicComponent:
    """Extend ``c`` until every polynomial in ``avoid`` has a determined valuation.

    Breadth-first over appended digits: the shortest extension reaching
    precision >= target with every valuation decided wins; among those the
    digit string that is lexicographically least (first new digit most
    significant). Multiple-root paths are escaped because every live branch
    is kept at each level.
    """
    if c.is_exact:
        raise PreconditionError("refine applies to approximate components only")
    polys = list(avoid)
    if any(g.is_zero() for g in polys):
        raise PreconditionError("the zero polynomial has infinite valuation everywhere")
    p = c.p
    m = c.precision
    if m >= target and _all_determined(polys, c.residue, c.modulus):
        return c
    frontier = [c.residue]
    modulus = c.modulus
    for depth in range(1, depth_cap + 1):
        new_modulus = modulus * p
        prec = m + depth
        next_frontier = []
        for r in frontier:
            if _all_determined(polys, r, modulus):
                # decided branches stay decided; digit 0 is their least continuation
                children = [r]
            else:
                children = [r + digit * modulus for digit in range(p)]
            for cand in children:
                if prec >= target and _all_determined(polys, cand, new_modulus):
                    return PadicComponent(p, precision=prec, residue=cand)
                next_frontier.append(cand)
        frontier = next_frontier
        modulus = new_modulus
    raise ValuationUnresolvable(
        f"no extension of {c} within {depth_cap} digits decides all valuations"
    )


@dataclass(frozen=True)
class Congruence:
    residue: int
    modulus: int


def crt_solve(system: Sequence[Congruence]) -> tuple[int, int]:
    """Solve pairwise-coprime congruences; returns (least solution, product of moduli)."""
    for i, a in enumerate(system):
        if a.modulus < 1:
            raise PreconditionError(f"modulus must be positive, got {a.modulus}")
        for b in system[i + 1 :]:
            if math.gcd(a.modulus, b.modulus) != 1:
                raise NonCoprimeModuli(f"moduli {a.modulus} and {b.modulus} share a factor")
    x, M = 0, 1
    for cong in system:
        # x + M*t = residue (mod modulus)
        t = (cong.residue - x) * pow(M, -1, cong.modulus) % cong.modulus
        x += M * t
        M *= cong.modulus
    x %= M
    assert all((x - cg.residue) % cg.modulus == 0 for cg in system)
    return x, M
