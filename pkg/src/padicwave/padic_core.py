"""Exact arithmetic in Z[1/p] viewed inside Q_p.

Every grid point the library touches is a finite sum of powers of p, so
elements are stored exactly as ``unit * p**val``.  Division by units is only
available as a modular inverse at a caller-chosen number of digits.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .errors import PrimeMismatchError

__all__ = [
    "PAdic",
    "CosetIndex",
    "absval",
    "add",
    "mul",
    "invert_mod",
    "fractional_part",
    "character",
    "enumerate_cosets",
    "is_prime",
    "valuation",
]


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PAdic:
    """The element ``unit * p**val`` of Z[1/p].

    ``unit`` carries the sign and is coprime to ``p``; zero is stored as
    ``unit == 0`` with ``val is None``.  Construction normalizes, so equal
    elements always have identical fields.
    """

    p: int
    val: Optional[int]
    unit: int

    def __post_init__(self):
        if self.p < 2:
            raise ValueError(f"p must be >= 2, got {self.p}")
        unit, val = self.unit, self.val
        if unit == 0:
            object.__setattr__(self, "val", None)
            return
        if val is None:
            raise ValueError("nonzero element needs an integer valuation")
        while unit % self.p == 0:
            unit //= self.p
            val += 1
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "val", val)

    # constructors

    @classmethod
    def zero(cls, p: int) -> "PAdic":
        return cls(p, None, 0)

    @classmethod
    def from_int(cls, p: int, n: int) -> "PAdic":
        return cls(p, 0, n)

    @classmethod
    def from_fraction(cls, p: int, q) -> "PAdic":
        q = Fraction(q)
        if q == 0:
            return cls.zero(p)
        den = q.denominator
        k = 0
        while den % p == 0:
            den //= p
            k += 1
        if den != 1:
            raise ValueError(f"{q} is not in Z[1/{p}]")
        return cls(p, -k, q.numerator)

    @classmethod
    def parse(cls, p: int, text: str) -> "PAdic":
        """Inverse of :meth:`serialize`; accepts ``"0"`` or ``"u*p^v"``."""
        text = text.strip()
        if text == "0":
            return cls.zero(p)
        match = re.fullmatch(r"(-?\d+)\*(\d+)\^(-?\d+)", text)
        if match is None:
            raise ValueError(f"malformed p-adic literal {text!r}")
        u, base, v = (int(g) for g in match.groups())
        if base != p:
            raise PrimeMismatchError(f"literal {text!r} is not over p={p}")
        return cls(p, v, u)

    # queries

    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    def to_fraction(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if self.val >= 0:
            return Fraction(self.unit * self.p ** self.val)
        return Fraction(self.unit, self.p ** -self.val)

    def scaled_int(self, e: int) -> int:
        """``x * p**e`` as an int; requires ``|x| <= p**e``."""
        if self.is_zero:
            return 0
        if self.val + e < 0:
            raise ValueError(f"{self} * {self.p}^{e} is not an integer")
        return self.unit * self.p ** (self.val + e)

    def serialize(self) -> str:
        if self.is_zero:
            return "0"
        return f"{self.unit}*{self.p}^{self.val}"

    def __str__(self) -> str:
        return self.serialize()

    # arithmetic

    def _check(self, other: "PAdic") -> None:
        if self.p != other.p:
            raise PrimeMismatchError(f"cannot combine elements of Q_{self.p} and Q_{other.p}")

    def __add__(self, other: "PAdic") -> "PAdic":
        return add(self, other)

    def __sub__(self, other: "PAdic") -> "PAdic":
        return add(self, -other)

    def __mul__(self, other: "PAdic") -> "PAdic":
        return mul(self, other)

    def __neg__(self) -> "PAdic":
        return PAdic(self.p, self.val, -self.unit)

    def __abs__(self) -> float:
        return absval(self)


def absval(x: PAdic) -> float:
    """The normalized absolute value ``|x| = p**(-val)``; ``|0| = 0``."""
    if x.is_zero:
        return 0.0
    return float(Fraction(1, x.p ** x.val) if x.val >= 0 else x.p ** -x.val)


def add(x: PAdic, y: PAdic) -> PAdic:
    x._check(y)
    if x.is_zero:
        return y
    if y.is_zero:
        return x
    v = min(x.val, y.val)
    total = x.unit * x.p ** (x.val - v) + y.unit * y.p ** (y.val - v)
    return PAdic(x.p, v, total)


def mul(x: PAdic, y: PAdic) -> PAdic:
    x._check(y)
    if x.is_zero or y.is_zero:
        return PAdic.zero(x.p)
    return PAdic(x.p, x.val + y.val, x.unit * y.unit)


def invert_mod(x: PAdic, L: int) -> PAdic:
    """Approximate ``1/x`` to ``L`` digits.

    The result ``y`` has ``val(y) = -val(x)`` and ``|x*y - 1| <= p**(-L)``.
    """
    if x.is_zero:
        raise ZeroDivisionError("0 has no inverse")
    if L < 1:
        raise ValueError(f"precision must be >= 1, got {L}")
    modulus = x.p ** L
    return PAdic(x.p, -x.val, pow(x.unit, -1, modulus))


def fractional_part(x: PAdic) -> Fraction:
    """The negative-power part ``{x}_p`` of the p-adic expansion, in [0, 1)."""
    if x.is_zero or x.val >= 0:
        return Fraction(0)
    den = x.p ** -x.val
    return Fraction(x.unit % den, den)


def _root_of_unity(num: int, den: int) -> complex:
    num %= den
    if num == 0:
        return 1.0 + 0.0j
    angle = 2.0 * math.pi * num / den
    return complex(math.cos(angle), math.sin(angle))


def character(x: PAdic) -> complex:
    """The additive character ``exp(2 pi i {x}_p)``, trivial on Z_p."""
    frac = fractional_part(x)
    return _root_of_unity(frac.numerator, frac.denominator)


@dataclass(frozen=True)
class CosetIndex:
    """Index ``k`` of the coset ``x_k + p**n Z_p`` inside ``p**(-m) Z_p``.

    The digits of ``k`` are the digits of ``x_k`` starting at ``p**(-m)``, so
    ``x_k = k * p**(-m)``.
    """

    p: int
    m: int
    n: int
    k: int

    @property
    def representative(self) -> PAdic:
        return PAdic(self.p, -self.m, self.k)

    @property
    def measure(self) -> Fraction:
        return Fraction(self.p) ** -self.n


def enumerate_cosets(p: int, m: int, n: int) -> list[CosetIndex]:
    if m + n < 0:
        raise ValueError(f"need m + n >= 0, got m={m}, n={n}")
    return list(_iter_cosets(p, m, n))


def _iter_cosets(p: int, m: int, n: int) -> Iterator[CosetIndex]:
    for k in range(p ** (m + n)):
        yield CosetIndex(p, m, n, k)
