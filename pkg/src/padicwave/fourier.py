"""Fourier transform, inverse and convolution on test functions.

With ``x_k = k p**(-m)`` and ``xi_j = j p**(-n)`` the character values are
``chi(-xi_j x_k) = exp(-2 pi i jk / p**(m+n))``, so the transform is a DFT of
length ``p**(m+n)`` scaled by the coset measure.  The fast path factors it
into ``m + n`` radix-``p`` butterfly stages.
"""
from __future__ import annotations

import functools
import threading

import numpy as np

from .padic_core import PAdic, character
from .schwartz_bruhat import TestFunction, join

__all__ = [
    "fourier",
    "inverse_fourier",
    "fourier_oracle",
    "inverse_fourier_oracle",
    "convolve",
    "convolve_oracle",
    "radix_dft",
]

_cache_lock = threading.Lock()


@functools.lru_cache(maxsize=None)
def _twiddles(p: int, size: int, sign: int) -> tuple[np.ndarray, np.ndarray]:
    """Stage tables for a length-``size`` transform.

    Returns the ``p x p`` butterfly matrix and the ``p x size/p`` twiddle
    factors ``exp(sign 2 pi i k1 j1 / size)``.
    """
    sub = size // p
    k1 = np.arange(p)
    butterfly = np.exp(sign * 2j * np.pi * (np.outer(k1, k1) % p) / p)
    twiddle = np.exp(sign * 2j * np.pi * (np.outer(k1, np.arange(sub)) % size) / size)
    butterfly.setflags(write=False)
    twiddle.setflags(write=False)
    return butterfly, twiddle


def _tables(p: int, size: int, sign: int):
    # lru_cache may run the builder twice under a race; the lock makes
    # every caller see the first table built for a key
    with _cache_lock:
        return _twiddles(p, size, sign)


def radix_dft(x: np.ndarray, p: int, sign: int = -1) -> np.ndarray:
    """Unnormalized DFT over the last axis, whose length must be a power of ``p``.

    ``X_j = sum_k x_k exp(sign 2 pi i jk / N)``.
    """
    x = np.asarray(x, dtype=complex)
    size = x.shape[-1]
    if size == 1:
        return x.copy()
    if size % p:
        raise ValueError(f"length {size} is not a power of {p}")
    sub = size // p
    lead = x.shape[:-1]
    # x[..., p*k2 + k1] -> (..., k1, k2): decimate in time
    parts = x.reshape(*lead, sub, p).swapaxes(-1, -2)
    inner_ = radix_dft(parts, p, sign)
    butterfly, twiddle = _tables(p, size, sign)
    inner_ = inner_ * twiddle
    # X[..., j1 + sub*j2] = sum_k1 W_p[j2, k1] * Z[..., k1, j1]
    out = np.einsum("ab,...bc->...ac", butterfly, inner_)
    return out.reshape(*lead, size)


def fourier(f: TestFunction) -> TestFunction:
    """``xi -> integral f(x) chi(-xi x) dx``; parameters ``(m, n)`` become ``(n, m)``."""
    vals = radix_dft(f.values, f.p, -1) * f.cell_measure
    return TestFunction(f.p, f.n, f.m, vals)


def inverse_fourier(g: TestFunction) -> TestFunction:
    """``x -> integral g(xi) chi(xi x) dxi``; inverse of :func:`fourier`."""
    vals = radix_dft(g.values, g.p, +1) * g.cell_measure
    return TestFunction(g.p, g.n, g.m, vals)


def _direct_sum(f: TestFunction, sign: int) -> TestFunction:
    p, m, n = f.p, f.m, f.n
    size = f.size
    k = np.arange(size, dtype=np.int64)
    # {sign * xi_j * x_k}_p = (sign*j*k mod p^(m+n)) / p^(m+n)
    phase = (sign * np.outer(k, k)) % size
    kernel = np.exp(2j * np.pi * phase / size)
    out = (kernel * f.values[None, :]).sum(axis=1) * f.cell_measure
    return TestFunction(p, n, m, out)


def fourier_oracle(f: TestFunction) -> TestFunction:
    """Literal double sum for :func:`fourier`, kept as an independent check."""
    return _direct_sum(f, -1)


def inverse_fourier_oracle(g: TestFunction) -> TestFunction:
    return _direct_sum(g, +1)


def character_sum(f: TestFunction, xi: PAdic) -> complex:
    """``f_hat(xi)`` at a single point, summing exact characters coset by coset."""
    total = 0j
    for k, value in enumerate(f.values):
        if value == 0:
            continue
        x = PAdic(f.p, -f.m, k)
        total += value * character(-(xi * x))
    return total * f.cell_measure


def convolve(f: TestFunction, g: TestFunction) -> TestFunction:
    """``t -> integral f(x) g(t - x) dx`` on the joint grid."""
    f, g = join(f, g)
    prod = fourier(f).values * fourier(g).values
    return inverse_fourier(TestFunction(f.p, f.n, f.m, prod))


def convolve_oracle(f: TestFunction, g: TestFunction) -> TestFunction:
    """Direct coset sum for :func:`convolve` (the ball is a group, so indices wrap)."""
    f, g = join(f, g)
    size = f.size
    k = np.arange(size)
    diff = (k[:, None] - k[None, :]) % size
    vals = (g.values[diff] * f.values[None, :]).sum(axis=1) * f.cell_measure
    return f.with_values(vals)
