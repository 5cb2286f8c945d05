"""Exact polynomials over Z and Q.

``IntPoly`` is an immutable polynomial with integer coefficients stored
constant-term first. ``RTauElem`` is an element of Q[x] written canonically
as ``num/den`` with ``den > 0`` and ``gcd(content(num), den) == 1``.

The module also provides the discrete order on Q[x], irreducibility testing
over Z and a fixed enumeration of the set of non-constant irreducible integer
polynomials with positive leading coefficient.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from itertools import count, product
from typing import Iterable, Iterator, Sequence

from .errors import (
    ConstantInput,
    DegreeTooLarge,
    DenominatorZero,
    ParseError,
    ZeroDenominator,
    ZeroPolynomial,
)
from .ntheory import factorint, primes_upto

D_MAX = 12
ZERO_DEGREE = -1


@dataclass(frozen=True, init=False)
class IntPoly:
    coeffs: tuple[int, ...]

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def x(cls) -> IntPoly:
        return cls((0, 1))

    @classmethod
    def const(cls, c: int) -> IntPoly:
        return cls((c,))

    @classmethod
    def monomial(cls, n: int, c: int = 1) -> IntPoly:
        return cls((0,) * n + (c,))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def constant_term(self) -> int:
        return self.coeffs[0] if self.coeffs else 0

    @property
    def height(self) -> int:
        return max((abs(c) for c in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def content(self) -> int:
        return reduce(math.gcd, self.coeffs, 0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __add__(self, other: IntPoly | int) -> IntPoly:
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> IntPoly:
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other: IntPoly | int) -> IntPoly:
        return self + (-_as_poly(other))

    def __rsub__(self, other: int) -> IntPoly:
        return _as_poly(other) - self

    def __mul__(self, other: IntPoly | int) -> IntPoly:
        if isinstance(other, int):
            return IntPoly(c * other for c in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def exact_div(self, c: int) -> IntPoly:
        if any(a % c for a in self.coeffs):
            raise ValueError(f"{c} does not divide {self}")
        return IntPoly(a // c for a in self.coeffs)

    def __call__(self, value):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def eval_mod(self, r: int, modulus: int) -> int:
        return eval_mod(self, r, modulus)

    def __str__(self) -> str:
        return format_intpoly(self)

    def __repr__(self) -> str:
        return f"IntPoly({str(self)!r})"


def _as_poly(value: IntPoly | int) -> IntPoly:
    if isinstance(value, IntPoly):
        return value
    return IntPoly((value,))


X = IntPoly.x()


class OrderResult(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


@dataclass(frozen=True, init=False)
class RTauElem:
    """Canonical ``num/den`` representative of an element of Q[x]."""

    num: IntPoly
    den: int

    def __init__(self, num: IntPoly | int, den: int = 1):
        num = _as_poly(num)
        if den == 0:
            raise ZeroDenominator("denominator is zero")
        if den < 0:
            num, den = -num, -den
        g = math.gcd(num.content(), den)
        if g > 1:
            num, den = num.exact_div(g), den // g
        if num.is_zero():
            den = 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def degree(self) -> int:
        return self.num.degree

    def is_constant(self) -> bool:
        return self.num.is_constant()

    def coefficient(self, i: int) -> Fraction:
        cs = self.num.coeffs
        return Fraction(cs[i] if i < len(cs) else 0, self.den)

    def __add__(self, other: RTauElem | int) -> RTauElem:
        other = _as_elem(other)
        return RTauElem(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> RTauElem:
        return RTauElem(-self.num, self.den)

    def __sub__(self, other: RTauElem | int) -> RTauElem:
        return self + (-_as_elem(other))

    def __rsub__(self, other: int) -> RTauElem:
        return _as_elem(other) - self

    def __mul__(self, other: RTauElem | int) -> RTauElem:
        other = _as_elem(other)
        return RTauElem(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __lt__(self, other: RTauElem) -> bool:
        return compare(self, _as_elem(other)) is OrderResult.LESS

    def __le__(self, other: RTauElem) -> bool:
        return compare(self, _as_elem(other)) is not OrderResult.GREATER

    def __gt__(self, other: RTauElem) -> bool:
        return compare(self, _as_elem(other)) is OrderResult.GREATER

    def __ge__(self, other: RTauElem) -> bool:
        return compare(self, _as_elem(other)) is not OrderResult.LESS

    def __str__(self) -> str:
        return format_rpoly(self)

    def __repr__(self) -> str:
        return f"RTauElem({str(self)!r})"


def _as_elem(value: RTauElem | IntPoly | int) -> RTauElem:
    if isinstance(value, RTauElem):
        return value
    return RTauElem(_as_poly(value), 1)


def canonicalize(num: IntPoly, den: int) -> RTauElem:
    return RTauElem(num, den)


def compare(f: RTauElem, g: RTauElem) -> OrderResult:
    """Order of Q[x]: ``f < g`` iff ``g - f`` has positive leading coefficient."""
    diff = g.num * f.den - f.num * g.den
    if diff.is_zero():
        return OrderResult.EQUAL
    return OrderResult.LESS if diff.lead > 0 else OrderResult.GREATER


def content_primitive(g: IntPoly) -> tuple[int, IntPoly]:
    if g.is_zero():
        raise ZeroPolynomial("content of the zero polynomial")
    c = g.content()
    return c, g.exact_div(c)


def primitive(g: IntPoly) -> IntPoly:
    return content_primitive(g)[1]


def eval_mod(g: IntPoly, r: int, modulus: int) -> int:
    acc = 0
    for c in reversed(g.coeffs):
        acc = (acc * r + c) % modulus
    return acc


def eisenstein_at(g: IntPoly, p: int) -> bool:
    if g.is_constant():
        raise ConstantInput("Eisenstein criterion needs a non-constant polynomial")
    *rest, lead = g.coeffs
    return lead % p != 0 and all(c % p == 0 for c in rest) and rest[0] % (p * p) != 0


# --- arithmetic in GF(p)[x]; lists are constant-term first, trimmed ---------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _gf_sub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _gf_rem(a: list[int], m: list[int], p: int) -> list[int]:
    a = list(a)
    inv = pow(m[-1], -1, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        q = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - q * c) % p
        _trim(a)
    return a


def _mulmod_monic(a: list[int], b: list[int], f: list[int], p: int) -> list[int]:
    """a*b mod (f, p) for monic f; a, b are dense of length deg f."""
    n = len(f) - 1
    out = [0] * (2 * n - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    for i in range(2 * n - 2, n - 1, -1):
        c = out[i] % p
        if c:
            base = i - n
            for j in range(n):
                out[base + j] -= c * f[j]
    return [v % p for v in out[:n]]


def _frobenius_rows(f: list[int], p: int) -> list[list[int]]:
    """Rows x^{i p} mod f for i < deg f."""
    n = len(f) - 1
    one = [1] + [0] * (n - 1)
    # x^p by square-and-multiply
    xp, base, e = one, ([0, 1] + [0] * (n - 2)) if n > 1 else [(-f[0]) % p], p
    while e:
        if e & 1:
            xp = _mulmod_monic(xp, base, f, p)
        base = _mulmod_monic(base, base, f, p)
        e >>= 1
    rows = [one]
    for _ in range(1, n):
        rows.append(_mulmod_monic(rows[-1], xp, f, p))
    return rows


def _gf_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _gf_rem(a, b, p)
    return a


def irreducible_mod_p(g: IntPoly, p: int) -> bool:
    """Rabin's test: is ``g mod p`` irreducible of the same degree as ``g``?"""
    n = g.degree
    if n < 1 or g.lead % p == 0:
        return False
    if n == 1:
        return True
    inv = pow(g.lead, -1, p)
    f = [c * inv % p for c in g.coeffs]
    rows = _frobenius_rows(f, p)
    x = [0, 1] + [0] * (n - 2)
    powers = [x]
    h = x
    for _ in range(n):
        # h^p = sum h_i x^{ip} in characteristic p
        nxt = [0] * n
        for hi, row in zip(h, rows):
            if hi:
                for j, r in enumerate(row):
                    nxt[j] += hi * r
        h = [v % p for v in nxt]
        powers.append(h)
    if powers[n] != x:
        return False
    for q in factorint(n):
        d = n // q
        if len(_gf_gcd(f, _gf_sub(_trim(list(powers[d])), [0, 1], p), p)) > 1:
            return False
    return True


@lru_cache(maxsize=4096)
def _divisors(n: int) -> tuple[int, ...]:
    if n < 10**6:
        return tuple(d for d in range(1, math.isqrt(n) + 1) if n % d == 0 for d in {d, n // d})
    from sympy import divisors

    return tuple(divisors(n))


def _rational_root(g: IntPoly, limit: int = 10**12) -> bool | None:
    """True if g has a rational root, False if not, None when a0/ad are too big to factor."""
    a0, ad = g.constant_term, g.lead
    if a0 == 0:
        return True
    if abs(a0) > limit or abs(ad) > limit:
        return None
    cs = g.coeffs
    d = g.degree
    for v in _divisors(abs(ad)):
        vpow = [v**k for k in range(d + 1)]
        for u in _divisors(abs(a0)):
            if math.gcd(u, v) != 1:
                continue
            for s in (u, -u):
                # v^d * g(s/v) by homogeneous Horner
                acc = cs[d]
                for i in range(d - 1, -1, -1):
                    acc = acc * s + cs[i] * vpow[d - i]
                if acc == 0:
                    return True
    return False


_MODP_PRIMES = primes_upto(200)
MODP_ATTEMPTS = 12


def irreducible_over_Z(g: IntPoly, max_degree: int = D_MAX) -> bool:
    """Decide irreducibility of ``g`` in Z[x].

    Cheap certificates are tried first (Eisenstein, rational roots, which
    decide degree <= 3, then irreducibility modulo a small prime). Only if all of them are
    inconclusive does the degree cap apply and full factorization run.
    """
    if g.is_constant():
        raise ConstantInput("irreducibility of a constant")
    if g.content() != 1:
        return False
    if g.degree == 1:
        return True
    if g.constant_term == 0:
        return False
    lower = reduce(math.gcd, g.coeffs[:-1], 0)
    if lower > 1 and any(eisenstein_at(g, p) for p in _small_prime_factors(lower)):
        return True
    rev = IntPoly(reversed(g.coeffs))
    lower_rev = reduce(math.gcd, rev.coeffs[:-1], 0)
    if lower_rev > 1 and any(eisenstein_at(rev, p) for p in _small_prime_factors(lower_rev)):
        return True
    root = _rational_root(g)
    if root:
        return False
    if root is False and g.degree <= 3:
        return True
    tried = 0
    for p in _MODP_PRIMES:
        if g.lead % p:
            if irreducible_mod_p(g, p):
                return True
            tried += 1
            if tried == MODP_ATTEMPTS:
                break
    if g.degree > max_degree:
        raise DegreeTooLarge(f"degree {g.degree} exceeds the factorization cap {max_degree}")
    return _factor_irreducible(g)


def _small_prime_factors(n: int) -> list[int]:
    return sorted(factorint(n))


def _factor_irreducible(g: IntPoly) -> bool:
    from sympy import Poly, symbols

    x = symbols("x")
    poly = Poly(list(reversed(g.coeffs)), x, domain="ZZ")
    content, factors = poly.factor_list()
    return abs(content) == 1 and len(factors) == 1 and factors[0][1] == 1


# --- enumeration of I -------------------------------------------------------


def in_I(g: IntPoly) -> bool:
    return g.degree >= 1 and g.lead > 0 and irreducible_over_Z(g)


def _weight_block(degree: int, height: int) -> Iterator[IntPoly]:
    low = range(-height, height + 1)
    for tup in product(*([low] * degree), range(1, height + 1)):
        if max(abs(c) for c in tup) != height:
            continue
        g = IntPoly(tup)
        if in_I(g):
            yield g


def _iter_I() -> Iterator[IntPoly]:
    for weight in count(2):
        for degree in range(1, weight):
            yield from _weight_block(degree, weight - degree)


_I_CACHE: list[IntPoly] = []
_I_ITER = _iter_I()


def enumerate_I(i: int) -> IntPoly:
    """The ``i``-th member of I in the fixed well order.

    Order key: (degree + height, degree, height, coefficient tuple a_0..a_d
    lexicographically).
    """
    if i < 0:
        raise IndexError(i)
    while len(_I_CACHE) <= i:
        _I_CACHE.append(next(_I_ITER))
    return _I_CACHE[i]


def iter_I() -> Iterator[IntPoly]:
    for i in count():
        yield enumerate_I(i)


def order_key(g: IntPoly) -> tuple:
    return (g.degree + g.height, g.degree, g.height, g.coeffs)


# --- text form --------------------------------------------------------------


def format_intpoly(g: IntPoly) -> str:
    if g.is_zero():
        return "0"
    parts: list[str] = []
    for i in range(g.degree, -1, -1):
        c = g.coeffs[i]
        if c == 0:
            continue
        mag = abs(c)
        if i == 0:
            body = str(mag)
        else:
            mono = "x" if i == 1 else f"x^{i}"
            body = mono if mag == 1 else f"{mag}{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def format_rpoly(f: RTauElem) -> str:
    if f.den == 1:
        return format_intpoly(f.num)
    return f"({format_intpoly(f.num)})/{f.den}"


_TOKEN = re.compile(r"\s*(?:(\d+)|(x)|(\^)|(\*)|(\+)|(-)|(\()|(\))|(/))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    kinds = ("int", "x", "^", "*", "+", "-", "(", ")", "/")
    out = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
        idx = m.lastindex - 1
        out.append((kinds[idx], m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][2] if self.i < len(self.tokens) else len(self.text)

    def take(self, kind: str) -> str:
        if self.peek() != kind:
            found = self.peek() or "end of input"
            raise ParseError(f"expected {kind!r}, found {found!r}", self.pos())
        tok = self.tokens[self.i][1]
        self.i += 1
        return tok

    def rpoly(self) -> RTauElem:
        if self.peek() == "(":
            self.take("(")
            num = self.ipoly()
            self.take(")")
            if self.peek() == "/":
                self.take("/")
                pos = self.pos()
                den = int(self.take("int"))
                if den == 0:
                    raise DenominatorZero("denominator is zero", pos)
            else:
                den = 1
        else:
            num = self.ipoly()
            den = 1
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.tokens[self.i][1]!r}", self.pos())
        return RTauElem(num, den)

    def ipoly(self) -> IntPoly:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take(self.peek()) == "-" else 1
        total = self.term() * sign
        while self.peek() in ("+", "-"):
            sign = -1 if self.take(self.peek()) == "-" else 1
            total = total + self.term() * sign
        return total

    def term(self) -> IntPoly:
        coeff = None
        if self.peek() == "int":
            coeff = int(self.take("int"))
            if self.peek() == "*":
                self.take("*")
                if self.peek() != "x":
                    raise ParseError("expected 'x' after '*'", self.pos())
            if self.peek() != "x":
                return IntPoly.const(coeff)
        self.take("x")
        exp = 1
        if self.peek() == "^":
            self.take("^")
            exp = int(self.take("int"))
        return IntPoly.monomial(exp, 1 if coeff is None else coeff)


def parse_poly(text: str) -> RTauElem:
    """Parse ``(ipoly)/natural`` or ``ipoly`` into a canonical element."""
    if not text.strip():
        raise ParseError("empty polynomial", 0)
    return _Parser(text).rpoly()


def parse_intpoly(text: str) -> IntPoly:
    f = parse_poly(text)
    if f.den != 1:
        raise ParseError("expected an integer polynomial", 0)
    return f.num


def poly_from_coeffs(coeffs: Sequence[int]) -> IntPoly:
    return IntPoly(coeffs)
