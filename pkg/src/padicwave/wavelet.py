"""Admissible wavelets, daughter wavelets and the Kozyrev family."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .errors import DegenerateWaveletError, NotAdmissibleError
from .fourier import convolve, fourier
from .padic_core import PAdic, is_prime, valuation
from .schwartz_bruhat import TestFunction, dilate, norm, translate

__all__ = [
    "ZERO_TOL",
    "Wavelet",
    "admissibility_constant",
    "make_wavelet",
    "kozyrev",
    "daughter",
    "conv_wavelet",
    "spectral_annulus",
    "spectral_exponents",
]

# operational threshold for "zero mean" and for spectral support
ZERO_TOL = 1e-12

# relative slack when checking a serialized c_psi against a recomputation
C_PSI_LOAD_TOL = 1e-9


def spectral_exponents(f: TestFunction) -> np.ndarray:
    """``log_p |xi_j|`` for each spectral coset index ``j`` (``j = 0`` gets a sentinel).

    The spectrum of ``f`` lives on parameters ``(n, m)`` with ``xi_j = j p**(-n)``,
    so ``|xi_j| = p**(n - v_p(j))``.
    """
    out = np.empty(f.size, dtype=np.int64)
    out[0] = np.iinfo(np.int64).min
    for j in range(1, f.size):
        out[j] = f.n - valuation(j, f.p)
    return out


def spectral_annulus(f: TestFunction, tol: float = ZERO_TOL) -> Optional[tuple[int, int]]:
    """Smallest ``(lo, hi)`` with every nonzero-coset coefficient of f_hat in ``p**lo <= |xi| <= p**hi``.

    Returns None when f_hat vanishes off the zero coset.
    """
    spectrum = np.abs(fourier(f).values)
    expo = spectral_exponents(f)
    live = np.nonzero(spectrum[1:] > tol)[0] + 1
    if live.size == 0:
        return None
    return int(expo[live].min()), int(expo[live].max())


def admissibility_constant(psi: TestFunction) -> float:
    """``c_psi = integral |psi_hat(xi)|**2 / |xi| dxi`` as an exact shell sum.

    The zero coset contributes nothing when ``|psi_hat(0)| <= ZERO_TOL``;
    otherwise the integral diverges.
    """
    if not np.any(psi.values):
        raise DegenerateWaveletError("zero function is not a wavelet")
    spectrum = fourier(psi)
    if abs(spectrum.values[0]) > ZERO_TOL:
        raise NotAdmissibleError()
    expo = spectral_exponents(psi)[1:].astype(float)
    power = np.abs(spectrum.values[1:]) ** 2
    return float(np.sum(power * float(psi.p) ** -expo) * spectrum.cell_measure)


@dataclass(frozen=True, eq=False)
class Wavelet:
    """A zero-mean test function with its admissibility constant and spectral annulus."""

    psi: TestFunction
    c_psi: float
    spectral_annulus: tuple[int, int]

    @property
    def p(self) -> int:
        return self.psi.p

    @property
    def fingerprint(self) -> str:
        return hashlib.sha256(self.psi.to_json().encode()).hexdigest()

    def to_dict(self) -> dict[str, Any]:
        data = self.psi.to_dict()
        data["c_psi"] = self.c_psi
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Wavelet":
        w = make_wavelet(TestFunction.from_dict(data))
        stored = data.get("c_psi")
        if stored is not None and abs(float(stored) - w.c_psi) > C_PSI_LOAD_TOL * max(1.0, w.c_psi):
            raise ValueError(f"stored c_psi={stored} disagrees with recomputed {w.c_psi}")
        return w

    @classmethod
    def from_json(cls, text: str) -> "Wavelet":
        return cls.from_dict(json.loads(text))


def make_wavelet(psi: TestFunction) -> Wavelet:
    c = admissibility_constant(psi)
    annulus = spectral_annulus(psi)
    if annulus is None:
        raise DegenerateWaveletError("wavelet has no spectral content")
    return Wavelet(psi, c, annulus)


def kozyrev(p: int, frequency: Optional[PAdic] = None) -> Wavelet:
    """``x -> chi(frequency * x)`` on Z_p, zero outside.

    The default frequency ``1/p`` gives the Kozyrev wavelet with ``c_psi = 1/p``.
    Any frequency with ``|frequency| > 1`` gives a zero-mean wavelet whose
    spectrum is the single coset ``frequency + Z_p``.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if frequency is None:
        frequency = PAdic(p, -1, 1)
    if frequency.p != p or frequency.is_zero or frequency.val >= 0:
        raise ValueError("frequency must satisfy |frequency| > 1")
    n = -frequency.val
    size = p ** n
    c = np.arange(size)
    vals = np.exp(2j * np.pi * ((frequency.unit * c) % size) / size)
    return make_wavelet(TestFunction(p, 0, n, vals))


def daughter(w, a: PAdic, b: PAdic) -> TestFunction:
    """``x -> |a|**(-1/2) psi((x - b) / a)``.

    ``w`` may be a :class:`Wavelet` or a bare test function (used when a
    signal plays the analyzing role).
    """
    psi = w.psi if isinstance(w, Wavelet) else w
    if a.is_zero:
        raise ZeroDivisionError("dilation parameter must be nonzero")
    out = translate(dilate(psi, a), b)
    # |a|**(-1/2) = p**(val(a)/2)
    return out * float(psi.p) ** (a.val / 2)


def conv_wavelet(w: Wavelet, phi: TestFunction) -> Wavelet:
    """The wavelet ``psi * phi``; its constant is at most ``max|phi_hat|**2 * c_psi``."""
    h = convolve(w.psi, phi)
    if norm(h) <= ZERO_TOL:
        raise DegenerateWaveletError("psi * phi vanishes")
    return make_wavelet(h)
