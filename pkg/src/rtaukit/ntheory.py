"""Integer helpers shared by the polynomial, p-adic and builder modules."""

from __future__ import annotations

from itertools import count
from typing import Iterator

from sympy import factorint, isprime, nextprime

__all__ = ["factorint", "isprime", "nextprime", "primes_from", "primes_upto", "vp"]


def vp(n: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise ValueError("v_p(0) is infinite")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def primes_from(start: int) -> Iterator[int]:
    """Primes ``>= start`` in increasing order."""
    p = start if start >= 2 and isprime(start) else nextprime(max(start, 2) - 1)
    for _ in count():
        yield p
        p = nextprime(p)
