"""Locally constant, compactly supported functions on Q_p.

A :class:`TestFunction` with parameters ``(m, n)`` is supported in the ball
``p**(-m) Z_p`` and constant on cosets of ``p**n Z_p``.  Its ``p**(m+n)``
values are indexed by coset index ``k``, whose representative is
``x_k = k * p**(-m)``.  Every integral over such functions is a finite sum.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import MalformedInputError, PrimeMismatchError
from .padic_core import PAdic, invert_mod

__all__ = [
    "TestFunction",
    "evaluate",
    "inner",
    "norm",
    "l1_norm",
    "refine",
    "join",
    "translate",
    "dilate",
    "mean",
    "parity",
    "indicator",
    "project_zero_mean",
    "sample",
]

# int64 products stay exact while both factors are below this bound
_INT64_SAFE = 1 << 31


@dataclass(frozen=True, eq=False)
class TestFunction:
    """Complex values on the cosets of ``p**n Z_p`` inside ``p**(-m) Z_p``."""

    __test__ = False  # keep pytest from collecting the class

    p: int
    m: int
    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.m + self.n < 0:
            raise ValueError(f"need m + n >= 0, got m={self.m}, n={self.n}")
        vals = np.array(self.values, dtype=complex).reshape(-1)
        if vals.size != self.p ** (self.m + self.n):
            raise ValueError(
                f"expected {self.p ** (self.m + self.n)} values for p={self.p}, "
                f"m={self.m}, n={self.n}; got {vals.size}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def cell_measure(self) -> float:
        return float(self.p) ** -self.n

    @classmethod
    def zeros(cls, p: int, m: int = 0, n: int = 0) -> "TestFunction":
        return cls(p, m, n, np.zeros(p ** (m + n), dtype=complex))

    def with_values(self, values) -> "TestFunction":
        return TestFunction(self.p, self.m, self.n, values)

    def __add__(self, other: "TestFunction") -> "TestFunction":
        f, g = join(self, other)
        return f.with_values(f.values + g.values)

    def __sub__(self, other: "TestFunction") -> "TestFunction":
        f, g = join(self, other)
        return f.with_values(f.values - g.values)

    def __neg__(self) -> "TestFunction":
        return self.with_values(-self.values)

    def __mul__(self, scalar) -> "TestFunction":
        return self.with_values(self.values * complex(scalar))

    __rmul__ = __mul__

    def conj(self) -> "TestFunction":
        return self.with_values(self.values.conj())

    def __call__(self, x: PAdic) -> complex:
        return evaluate(self, x)

    # serialization

    def to_dict(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "m": self.m,
            "n": self.n,
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TestFunction":
        try:
            p, m, n = int(data["p"]), int(data["m"]), int(data["n"])
            raw = data["values"]
            values = [complex(float(re), float(im)) for re, im in raw]
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"malformed test function: {exc}") from exc
        return cls(p, m, n, values)

    @classmethod
    def from_json(cls, text: str) -> "TestFunction":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def indicator(p: int, m: int = 0, n: int | None = None) -> TestFunction:
    """Indicator of the ball ``p**(-m) Z_p``, stored at resolution ``n`` (default ``-m``)."""
    if n is None:
        n = -m
    return TestFunction(p, m, n, np.ones(p ** (m + n), dtype=complex))


def _check_prime(f: TestFunction, g: TestFunction) -> None:
    if f.p != g.p:
        raise PrimeMismatchError(f"functions over Q_{f.p} and Q_{g.p}")


def _index_dtype(bound: int):
    return np.int64 if bound < _INT64_SAFE else object


def sample(f: TestFunction, numerators, e: int) -> np.ndarray:
    """Values of ``f`` at the points ``numerators * p**(-e)``.

    ``numerators`` is an integer array; points outside the support give 0.
    """
    p, m, size = f.p, f.m, f.size
    y = np.asarray(numerators)
    if e > m:
        d = p ** (e - m)
        inside = (y % d) == 0
        idx = (y // d) % size
    else:
        idx = (y * p ** (m - e)) % size
        inside = np.ones(y.shape, dtype=bool)
    idx = np.where(inside, idx, 0).astype(np.int64)
    return np.where(inside, f.values[idx], 0.0 + 0.0j)


def evaluate(f: TestFunction, x: PAdic) -> complex:
    """Value of ``f`` on the coset containing ``x``; 0 outside the support."""
    if x.p != f.p:
        raise PrimeMismatchError(f"point in Q_{x.p}, function on Q_{f.p}")
    if x.is_zero:
        return complex(f.values[0])
    if x.val + f.m < 0:
        return 0j
    k = (x.unit * pow(f.p, x.val + f.m, f.size)) % f.size
    return complex(f.values[k])


def refine(f: TestFunction, m2: int, n2: int) -> TestFunction:
    """The same function viewed on the finer space with parameters ``(m2, n2)``."""
    if m2 < f.m or n2 < f.n:
        raise ValueError(f"cannot coarsen ({f.m}, {f.n}) to ({m2}, {n2})")
    if (m2, n2) == (f.m, f.n):
        return f
    size2 = f.p ** (m2 + n2)
    k2 = np.arange(size2, dtype=_index_dtype(size2))
    return TestFunction(f.p, m2, n2, sample(f, k2, m2))


def join(f: TestFunction, g: TestFunction) -> tuple[TestFunction, TestFunction]:
    """Refine both operands to the common parameters ``(max m, max n)``."""
    _check_prime(f, g)
    m, n = max(f.m, g.m), max(f.n, g.n)
    return refine(f, m, n), refine(g, m, n)


def inner(f: TestFunction, g: TestFunction) -> complex:
    """Haar integral of ``f * conj(g)``."""
    f, g = join(f, g)
    return complex(np.sum(f.values * g.values.conj()) * f.cell_measure)


def norm(f: TestFunction) -> float:
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.cell_measure))


def l1_norm(f: TestFunction) -> float:
    return float(np.sum(np.abs(f.values)) * f.cell_measure)


def mean(f: TestFunction) -> complex:
    """Haar integral of ``f``."""
    return complex(np.sum(f.values) * f.cell_measure)


def project_zero_mean(f: TestFunction) -> TestFunction:
    """Subtract the constant that makes the integral over the support vanish."""
    return f.with_values(f.values - f.values.mean())


def translate(f: TestFunction, b: PAdic) -> TestFunction:
    """``x -> f(x - b)``; the support grows to cover ``supp f + b``."""
    if b.p != f.p:
        raise PrimeMismatchError(f"shift in Q_{b.p}, function on Q_{f.p}")
    if b.is_zero:
        return f
    p, n = f.p, f.n
    m2 = max(f.m, -b.val)
    size2 = p ** (m2 + n)
    shift = b.scaled_int(m2) % size2
    k2 = np.arange(size2, dtype=_index_dtype(size2))
    return TestFunction(p, m2, n, sample(f, (k2 - shift) % size2, m2))


def dilate(f: TestFunction, a: PAdic) -> TestFunction:
    """``x -> f(x / a)`` for nonzero ``a``.

    Parameters move to ``(m - val(a), n + val(a))``; values are permuted by
    the inverse of the unit part of ``a``.
    """
    if a.p != f.p:
        raise PrimeMismatchError(f"scale in Q_{a.p}, function on Q_{f.p}")
    if a.is_zero:
        raise ZeroDivisionError("dilation by 0")
    size = f.size
    m2, n2 = f.m - a.val, f.n + a.val
    if size == 1:
        return TestFunction(f.p, m2, n2, f.values)
    uinv = invert_mod(PAdic(f.p, 0, a.unit), f.m + f.n).unit % size
    k2 = np.arange(size, dtype=_index_dtype(size))
    idx = ((k2 * uinv) % size).astype(np.int64)
    return TestFunction(f.p, m2, n2, f.values[idx])


def parity(f: TestFunction) -> TestFunction:
    """``x -> f(-x)``."""
    k = np.arange(f.size)
    return f.with_values(f.values[(-k) % f.size])
