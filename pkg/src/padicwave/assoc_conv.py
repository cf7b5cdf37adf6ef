"""Associated convolution ``h # g`` built from three wavelets.

``h # g`` is the inverse ``phi``-transform of the cellwise product
``K_psi h * K_chi g``.  Its ``phi``-transform reproduces that product exactly
only when the product lies in the range of ``K_phi``; for single-coset
spectra ``A_psi, A_chi, A_phi`` this holds when ``A_phi = A_psi + A_chi``
and ``|centre(A_phi)| >= max(|centre(A_psi)|, |centre(A_chi)|)``.
:func:`compatible_triple` builds such a triple.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from .cwt import (
    GridSpec,
    Scalogram,
    _validate,
    check_grid,
    cwt,
    make_grid,
    reconstruction_params,
    signal_scale_range,
    synthesize,
)
from .errors import IncompleteGridError, UnboundedScaleError
from .padic_core import PAdic
from .schwartz_bruhat import TestFunction, sample
from .wavelet import Wavelet, kozyrev, make_wavelet

__all__ = [
    "hash_convolve",
    "kernel_D",
    "translate_tau",
    "assoc_grid",
    "compatible_triple",
    "product_scalogram",
]


def _as_wavelet(w) -> Wavelet:
    return w if isinstance(w, Wavelet) else make_wavelet(w)


def compatible_triple(p: int) -> tuple[Wavelet, Wavelet, Wavelet]:
    """Three distinct Kozyrev-type wavelets whose transforms multiply exactly.

    Spectra are ``1/p + Z_p``, ``1/p**2 + Z_p`` and their sum ``(p+1)/p**2 + Z_p``.
    """
    w_psi = kozyrev(p)
    w_chi = kozyrev(p, PAdic(p, -2, 1))
    w_phi = kozyrev(p, PAdic(p, -2, p + 1))
    return w_psi, w_chi, w_phi


def _intersect(r1, r2) -> Optional[tuple[int, int]]:
    if r1 is None or r2 is None:
        return None
    return max(r1[0], r2[0]), min(r1[1], r2[1])


def assoc_grid(h: TestFunction, g: TestFunction, w_psi, w_chi, w_phi) -> GridSpec:
    """Join of the grids required by ``(h, psi)`` and ``(g, chi)``, exact for ``phi`` too.

    Translation windows are uniform so ``h # g`` can be re-analysed on the same grid.
    """
    w_psi, w_chi, w_phi = map(_as_wavelet, (w_psi, w_chi, w_phi))
    ranges = [signal_scale_range(h, w_psi), signal_scale_range(g, w_chi)]
    if any(r is None for r in ranges):
        raise UnboundedScaleError("associated convolution needs zero-mean operands")
    live = [r for r in ranges if r[0] <= r[1]] or [(0, 0)]
    j_min = min(r[0] for r in live)
    j_max = max(r[1] for r in live)
    return make_grid(j_min, j_max, [w_psi, w_chi, w_phi], max(h.m, g.m), uniform=True)


def _check_grid(h, g, w_psi, w_chi, w_phi, grid: GridSpec) -> Optional[tuple[int, int]]:
    _validate(h, w_psi, grid)
    _validate(g, w_chi, grid)
    check_grid(w_phi, grid)
    support = _intersect(signal_scale_range(h, w_psi), signal_scale_range(g, w_chi))
    if not grid.covers(support):
        raise IncompleteGridError(f"grid [{grid.j_min}, {grid.j_max}] misses product scales {support}")
    return support


def product_scalogram(h, g, w_psi, w_chi, w_phi, grid: GridSpec) -> Scalogram:
    """``K_psi h * K_chi g`` cellwise, tagged with the ``phi`` fingerprint."""
    w_psi, w_chi, w_phi = map(_as_wavelet, (w_psi, w_chi, w_phi))
    support = _check_grid(h, g, w_psi, w_chi, w_phi, grid)
    kh = cwt(h, w_psi, grid)
    kg = cwt(g, w_chi, grid)
    prod = kh.combine(kg, np.multiply)
    return Scalogram(h.p, grid, prod.slices, w_phi.fingerprint, w_phi.c_psi, support)


def hash_convolve(h, g, w_psi, w_chi, w_phi, grid: GridSpec) -> TestFunction:
    """``h # g = K_phi^{-1}[K_psi h * K_chi g]``."""
    w_phi = _as_wavelet(w_phi)
    prod = product_scalogram(h, g, w_psi, w_chi, w_phi, grid)
    out = synthesize(lambda j, u: prod.slices[(j, u)], w_phi.psi, grid)
    return out * (1.0 / w_phi.c_psi)


def _daughter_at(psi: TestFunction, j: int, u: int, M: int, N: int, point: PAdic) -> np.ndarray:
    """``psi_{a,b}(point)`` for ``a = p**j u`` and every translation ``b`` of the window."""
    p = psi.p
    e = max(M, 0 if point.is_zero else -point.val)
    B = np.arange(p ** (M + N), dtype=object)
    W = point.scaled_int(e) - B * p ** (e - M)
    # (point - b) / a = W u^-1 p^-(e + j)
    uinv = pow(u, -1, psi.size) if psi.size > 1 else 0
    vals = sample(psi, W * uinv, e + j)
    return vals * float(p) ** (j / 2)


def kernel_D(x: PAdic, y: PAdic, z: PAdic, w_psi, w_chi, w_phi, grid: GridSpec) -> complex:
    """Grid realization of ``D(x, y, z) = C_phi^-1 sum conj(psi_ab(z)) conj(chi_ab(y)) phi_ab(x) w``."""
    w_psi, w_chi, w_phi = map(_as_wavelet, (w_psi, w_chi, w_phi))
    p = w_phi.p
    total = 0j
    for j in grid.scales():
        M, N = grid.window(j)
        acc = 0j
        for u in grid.units(p):
            acc += np.sum(
                _daughter_at(w_psi.psi, j, u, M, N, z).conj()
                * _daughter_at(w_chi.psi, j, u, M, N, y).conj()
                * _daughter_at(w_phi.psi, j, u, M, N, x)
            )
        total += acc * grid.weight(p, j)
    return complex(total / w_phi.c_psi)


def translate_tau(h: TestFunction, x: PAdic, w_psi, w_chi, w_phi, grid: GridSpec) -> TestFunction:
    """``y -> (tau_x h)(y) = integral D(x, y, z) h(z) dz`` on the grid window."""
    w_psi, w_chi, w_phi = map(_as_wavelet, (w_psi, w_chi, w_phi))
    _validate(h, w_psi, grid)
    kh = cwt(h, w_psi, grid)

    def coeffs(j: int, u: int) -> np.ndarray:
        M, N = grid.window(j)
        return kh.slices[(j, u)] * _daughter_at(w_phi.psi, j, u, M, N, x)

    chi_bar = w_chi.psi.conj()
    out = synthesize(coeffs, chi_bar, grid, reconstruction_params(grid, chi_bar))
    return out * (1.0 / w_phi.c_psi)
