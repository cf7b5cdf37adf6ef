"""Continuous wavelet transform on an exact scale/translation grid.

Scales are ``a = p**j * u`` with ``|a| = p**(-j)`` and ``u`` a unit taken
mod ``p**L``; at scale ``j`` translations run over the cosets of
``p**N_j Z_p`` inside ``p**(-M_j) Z_p``.  When the grid satisfies

    L >= m_psi + n_psi,   N_j >= n_psi + j,   M_j >= max(m_f, m_psi - j)

the coefficient ``<f, psi_{a,b}>`` is constant on every cell and vanishes
outside the translation window, so sums over cells weighted by
``p**(j-L) * p**(-N_j)`` are exact integrals against ``da db / |a|**2``.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .errors import (
    FingerprintMismatchError,
    GridError,
    IncompleteGridError,
    MalformedInputError,
    PrimeMismatchError,
    UnboundedScaleError,
)
from .fourier import convolve
from .padic_core import PAdic
from .schwartz_bruhat import TestFunction, dilate, inner, mean, parity, refine, sample
from .wavelet import ZERO_TOL, Wavelet, daughter, spectral_annulus

__all__ = [
    "GridSpec",
    "Scalogram",
    "make_grid",
    "required_grid",
    "signal_scale_range",
    "cwt",
    "cwt_via_convolution",
    "coefficient",
    "plancherel_pairing",
    "energy",
    "invert",
    "write_scalogram",
    "read_scalogram",
    "sidecar_path",
    "check_grid",
    "synthesize",
]

CSV_HEADER = ("j", "u", "k", "b", "re", "im")


@dataclass(frozen=True)
class GridSpec:
    """Scale range, unit resolution and per-scale translation windows.

    ``windows[i]`` is ``(M_j, N_j)`` for ``j = j_min + i``.
    """

    j_min: int
    j_max: int
    L: int
    windows: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.j_max < self.j_min:
            raise ValueError(f"empty scale range [{self.j_min}, {self.j_max}]")
        if self.L < 1:
            raise ValueError(f"unit resolution L must be >= 1, got {self.L}")
        if len(self.windows) != self.j_max - self.j_min + 1:
            raise ValueError("need one translation window per scale")
        for M, N in self.windows:
            if M + N < 0:
                raise ValueError(f"translation window ({M}, {N}) has M + N < 0")

    def scales(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def window(self, j: int) -> tuple[int, int]:
        if not self.j_min <= j <= self.j_max:
            raise KeyError(f"scale {j} outside [{self.j_min}, {self.j_max}]")
        return self.windows[j - self.j_min]

    def units(self, p: int) -> list[int]:
        return [u for u in range(1, p ** self.L) if u % p]

    def slice_length(self, p: int, j: int) -> int:
        M, N = self.window(j)
        return p ** (M + N)

    def scale_cell_measure(self, p: int, j: int) -> Fraction:
        """Haar measure of ``p**j (u + p**L Z_p)``."""
        return Fraction(p) ** (-j - self.L)

    def weight_exact(self, p: int, j: int) -> Fraction:
        """Quadrature weight of one ``(j, u, b)`` cell for ``da db / |a|**2``."""
        _, N = self.window(j)
        return Fraction(p) ** (j - self.L - N)

    def weight(self, p: int, j: int) -> float:
        return float(self.weight_exact(p, j))

    def n_cells(self, p: int) -> int:
        units = p ** (self.L - 1) * (p - 1)
        return units * sum(self.slice_length(p, j) for j in self.scales())

    def refine_units(self) -> "GridSpec":
        return replace(self, L=self.L + 1)

    def refine_translations(self) -> "GridSpec":
        return replace(self, windows=tuple((M, N + 1) for M, N in self.windows))

    def uniform_window(self) -> "GridSpec":
        """Same grid with every translation window widened to the largest one."""
        top = max(M for M, _ in self.windows)
        return replace(self, windows=tuple((top, N) for _, N in self.windows))

    def covers(self, support: Optional[tuple[int, int]]) -> bool:
        if support is None:
            return False
        lo, hi = support
        return lo > hi or (self.j_min <= lo and hi <= self.j_max)

    def to_dict(self) -> dict:
        return {
            "j_min": self.j_min,
            "j_max": self.j_max,
            "L": self.L,
            "windows": [
                {"j": j, "M": M, "N": N} for j, (M, N) in zip(self.scales(), self.windows)
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        windows = sorted(data["windows"], key=lambda w: int(w["j"]))
        return cls(
            int(data["j_min"]),
            int(data["j_max"]),
            int(data["L"]),
            tuple((int(w["M"]), int(w["N"])) for w in windows),
        )


def make_grid(
    j_min: int,
    j_max: int,
    wavelets: Sequence[Wavelet],
    m_signal: int,
    uniform: bool = False,
) -> GridSpec:
    """Coarsest grid on ``[j_min, j_max]`` that is exact for every wavelet given."""
    L = max(max(1, w.psi.m + w.psi.n) for w in wavelets)
    windows = []
    for j in range(j_min, j_max + 1):
        M = max([m_signal] + [w.psi.m - j for w in wavelets])
        N = max(w.psi.n + j for w in wavelets)
        windows.append((M, N))
    grid = GridSpec(j_min, j_max, L, tuple(windows))
    return grid.uniform_window() if uniform else grid


def signal_scale_range(f: TestFunction, w: Wavelet) -> Optional[tuple[int, int]]:
    """Scales ``j`` on which ``K_psi f`` can be nonzero, or None if unbounded.

    ``K(a, .) != 0`` needs ``xi`` in the annulus of f_hat with ``a xi`` in the
    annulus of psi_hat, i.e. ``lo_f - hi_psi <= j <= hi_f - lo_psi``.  An empty
    range is returned as ``(1, 0)``.
    """
    if abs(mean(f)) > ZERO_TOL:
        return None
    annulus = spectral_annulus(f)
    if annulus is None:
        return (1, 0)
    lo_f, hi_f = annulus
    lo_w, hi_w = w.spectral_annulus
    return (lo_f - hi_w, hi_f - lo_w)


def required_grid(
    f: TestFunction,
    w: Wavelet,
    j_min: Optional[int] = None,
    j_max: Optional[int] = None,
) -> GridSpec:
    """Smallest grid outside of which ``K_psi f`` vanishes identically.

    Explicit bounds override the derived ones; a nonzero-mean ``f`` needs both.
    """
    _check_prime(f, w)
    support = signal_scale_range(f, w)
    if support is None:
        if j_min is None or j_max is None:
            raise UnboundedScaleError(
                "signal has nonzero mean; its transform has no bounded scale range "
                "(give explicit j bounds)"
            )
    else:
        lo, hi = support
        if lo > hi:
            lo = hi = 0
        j_min = lo if j_min is None else j_min
        j_max = hi if j_max is None else j_max
    return make_grid(j_min, j_max, [w], f.m)


def _check_prime(f: TestFunction, w: Wavelet) -> None:
    if f.p != w.p:
        raise PrimeMismatchError(f"signal over Q_{f.p}, wavelet over Q_{w.p}")


def _validate(f: TestFunction, w: Wavelet, grid: GridSpec) -> None:
    _check_prime(f, w)
    check_grid(w, grid, f.m)


def check_grid(w: Wavelet, grid: GridSpec, m_signal: Optional[int] = None) -> None:
    """Raise :class:`GridError` unless coefficients are constant on every cell.

    ``m_signal`` is the signal's support exponent; None skips the window check
    against the signal (synthesis only needs the wavelet conditions).
    """
    psi = w.psi
    if grid.L < psi.m + psi.n:
        raise GridError(f"unit resolution L={grid.L} < m_psi + n_psi = {psi.m + psi.n}")
    for j in grid.scales():
        M, N = grid.window(j)
        if N < psi.n + j:
            raise GridError(f"scale {j}: translation resolution N={N} < n_psi + j = {psi.n + j}")
        need = psi.m - j if m_signal is None else max(m_signal, psi.m - j)
        if M < need:
            raise GridError(f"scale {j}: translation window M={M} < {need}")


@dataclass(frozen=True, eq=False)
class Scalogram:
    """CWT coefficients per ``(j, u)`` slice, in translation-index order.

    ``support_j`` is the scale range on which the transform can be nonzero
    (None when unbounded); weights are always recomputed from ``grid``.
    """

    p: int
    grid: GridSpec
    slices: dict[tuple[int, int], np.ndarray]
    fingerprint: str
    c_psi: float
    support_j: Optional[tuple[int, int]] = None

    def keys(self) -> Iterator[tuple[int, int]]:
        for j in self.grid.scales():
            for u in self.grid.units(self.p):
                yield j, u

    def __getitem__(self, key: tuple[int, int, int]) -> complex:
        j, u, k = key
        return complex(self.slices[(j, u)][k])

    def value_at(self, a: PAdic, b: PAdic) -> complex:
        """Coefficient of the cell containing ``(a, b)``; 0 off the grid."""
        j = a.val
        if not self.grid.j_min <= j <= self.grid.j_max:
            return 0j
        u = a.unit % self.p ** self.grid.L
        M, N = self.grid.window(j)
        if not b.is_zero and b.val < -M:
            return 0j
        k = b.scaled_int(M) % self.p ** (M + N) if not b.is_zero else 0
        return complex(self.slices[(j, u)][k])

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Scalogram":
        return replace(self, slices={key: fn(v) for key, v in self.slices.items()})

    def combine(self, other: "Scalogram", fn) -> "Scalogram":
        _check_compatible(self, other, same_wavelet=False)
        return replace(
            self, slices={key: fn(v, other.slices[key]) for key, v in self.slices.items()}
        )

    def __mul__(self, scalar) -> "Scalogram":
        s = complex(scalar)
        return self.map(lambda v: v * s)

    __rmul__ = __mul__

    def __add__(self, other: "Scalogram") -> "Scalogram":
        return self.combine(other, np.add)

    def max_abs(self) -> float:
        return max((float(np.abs(v).max()) for v in self.slices.values() if v.size), default=0.0)

    def max_abs_diff(self, other: "Scalogram") -> float:
        _check_compatible(self, other, same_wavelet=False)
        return max(
            (float(np.abs(v - other.slices[key]).max()) for key, v in self.slices.items()),
            default=0.0,
        )

    def cells(self) -> Iterator[tuple[int, int, int, complex]]:
        for j, u in self.keys():
            for k, v in enumerate(self.slices[(j, u)]):
                yield j, u, k, complex(v)

    def sidecar(self) -> dict:
        return {
            "p": self.p,
            "grid": self.grid.to_dict(),
            "wavelet_fingerprint": self.fingerprint,
            "c_psi": self.c_psi,
            "support_j": list(self.support_j) if self.support_j is not None else None,
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for j, u in self.keys():
            M, _ = self.grid.window(j)
            for k, v in enumerate(self.slices[(j, u)]):
                b = PAdic(self.p, -M, k).serialize()
                writer.writerow((j, u, k, b, repr(float(v.real)), repr(float(v.imag))))
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, meta: dict) -> "Scalogram":
        p = int(meta["p"])
        grid = GridSpec.from_dict(meta["grid"])
        support = meta.get("support_j")
        slices = {
            (j, u): np.full(grid.slice_length(p, j), np.nan + 0j)
            for j in grid.scales()
            for u in grid.units(p)
        }
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise MalformedInputError(f"bad scalogram header {header!r}")
        for row in reader:
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise MalformedInputError(f"bad scalogram row {row!r}")
            try:
                j, u, k = int(row[0]), int(row[1]), int(row[2])
                value = complex(float(row[4]), float(row[5]))
            except ValueError as exc:
                raise MalformedInputError(f"bad scalogram row {row!r}") from exc
            if (j, u) not in slices or not 0 <= k < slices[(j, u)].size:
                raise MalformedInputError(f"row ({j}, {u}, {k}) lies outside the recorded grid")
            slices[(j, u)][k] = value
        missing = sorted({j for (j, _), v in slices.items() if np.isnan(v.real).any()})
        if missing:
            raise IncompleteGridError(f"scalogram rows missing at scales {missing}")
        return cls(
            p,
            grid,
            slices,
            str(meta["wavelet_fingerprint"]),
            float(meta["c_psi"]),
            tuple(support) if support is not None else None,
        )


def _check_compatible(s: Scalogram, t: Scalogram, same_wavelet: bool = True) -> None:
    if s.p != t.p or s.grid != t.grid:
        raise GridError("scalograms live on different grids")
    if same_wavelet and s.fingerprint != t.fingerprint:
        raise FingerprintMismatchError("scalograms were computed with different wavelets")


def _index_array(n: int, big: bool) -> np.ndarray:
    return np.arange(n, dtype=object if big else np.int64)


def _affine(p: int, nb: int, cb: int, ny: int, cy: int, modulus: int) -> np.ndarray:
    """``(B * cb + Y * cy) mod modulus`` over the ``nb x ny`` index grid."""
    big = modulus >= 1 << 31
    B = _index_array(nb, big)
    Y = _index_array(ny, big)
    return ((B[:, None] * (cb % modulus)) % modulus + (Y[None, :] * (cy % modulus)) % modulus) % modulus


def _direct_slice(f: TestFunction, psi: TestFunction, j: int, u: int, M: int, N: int) -> np.ndarray:
    """``K(a, b_k) = |a|**(1/2) integral f(b + a y) conj(psi(y)) dy`` for all ``k``."""
    p = f.p
    n_y = max(psi.n, f.n - j)
    psi_y = refine(psi, psi.m, n_y).values
    e = max(M, psi.m - j)
    # x = b + a y with b = B p^-M, y = Y p^-m_psi, a = p^j u: x p^e is an integer
    Z = _affine(p, p ** (M + N), p ** (e - M), psi_y.size, u * p ** (e - psi.m + j), p ** (e + f.n))
    F = sample(f, Z, e)
    scale = float(p) ** (-j / 2) * float(p) ** -n_y
    return (F * psi_y.conj()[None, :]).sum(axis=1) * scale


def _support(f: TestFunction, w: Wavelet) -> Optional[tuple[int, int]]:
    return signal_scale_range(f, w)


def cwt(f: TestFunction, w: Wavelet, grid: GridSpec) -> Scalogram:
    """``K_psi f(a, b) = <f, psi_{a,b}>`` on every cell of ``grid``."""
    _validate(f, w, grid)
    slices = {}
    for j in grid.scales():
        M, N = grid.window(j)
        for u in grid.units(f.p):
            slices[(j, u)] = _direct_slice(f, w.psi, j, u, M, N)
    return Scalogram(f.p, grid, slices, w.fingerprint, w.c_psi, _support(f, w))


def _reflected_kernel(psi: TestFunction, a: PAdic) -> TestFunction:
    """``x -> |a|**(-1/2) conj(psi(-x / a))``."""
    return parity(dilate(psi, a)).conj() * float(psi.p) ** (a.val / 2)


def cwt_via_convolution(f: TestFunction, w: Wavelet, grid: GridSpec) -> Scalogram:
    """Each slice as one convolution ``b -> (f * g_a)(b)`` computed through the Fourier transform."""
    _validate(f, w, grid)
    p = f.p
    slices = {}
    for j in grid.scales():
        M, N = grid.window(j)
        B = np.arange(p ** (M + N), dtype=np.int64)
        for u in grid.units(p):
            h = convolve(f, _reflected_kernel(w.psi, PAdic(p, j, u)))
            slices[(j, u)] = sample(h, B, M)
    return Scalogram(p, grid, slices, w.fingerprint, w.c_psi, _support(f, w))


def coefficient(f: TestFunction, analyzer, a: PAdic, b: PAdic) -> complex:
    """A single coefficient ``<f, analyzer_{a,b}>``, straight from the definition."""
    return inner(f, daughter(analyzer, a, b))


def plancherel_pairing(sf: Scalogram, sg: Scalogram) -> complex:
    """``integral K_psi f * conj(K_psi g) da db / |a|**2`` as a cell sum."""
    _check_compatible(sf, sg)
    total = 0j
    for j in sf.grid.scales():
        acc = 0j
        for u in sf.grid.units(sf.p):
            acc += np.sum(sf.slices[(j, u)] * sg.slices[(j, u)].conj())
        total += acc * sf.grid.weight(sf.p, j)
    return complex(total)


def energy(sf: Scalogram) -> float:
    """``(1/c_psi) integral |K_psi f|**2 da db / |a|**2``, equal to ``||f||**2`` on complete grids."""
    return plancherel_pairing(sf, sf).real / sf.c_psi


def reconstruction_params(grid: GridSpec, psi: TestFunction) -> tuple[int, int]:
    """Parameters of the smallest space holding every ``psi_{a,b}`` on the grid."""
    M = max(max(grid.window(j)[0], psi.m - j) for j in grid.scales())
    N = max(grid.window(j)[1] for j in grid.scales())
    return M, N


def synthesize(
    coeffs: Callable[[int, int], np.ndarray],
    psi: TestFunction,
    grid: GridSpec,
    out_params: Optional[tuple[int, int]] = None,
) -> TestFunction:
    """``sum_{j,u,b} c[j,u,b] psi_{a,b}(x) weight(j)`` on an exact output grid."""
    p = psi.p
    Mo, No = out_params or reconstruction_params(grid, psi)
    size = p ** (Mo + No)
    re = np.zeros(size)
    im = np.zeros(size)
    for j in grid.scales():
        M, N = grid.window(j)
        n_y = No - j
        psi_y = refine(psi, psi.m, n_y).values
        scale = float(p) ** (j / 2) * grid.weight(p, j)
        for u in grid.units(p):
            c = coeffs(j, u)
            # output index of x = b + a y
            X = _affine(p, c.size, p ** (Mo - M), psi_y.size, u * p ** (Mo + j - psi.m), size)
            vals = (c[:, None] * psi_y[None, :]).ravel() * scale
            idx = X.ravel().astype(np.int64)
            re += np.bincount(idx, weights=vals.real, minlength=size)
            im += np.bincount(idx, weights=vals.imag, minlength=size)
    return TestFunction(p, Mo, No, re + 1j * im)


def invert(sf: Scalogram, w: Wavelet, truncated: bool = False) -> TestFunction:
    """``(1/c_psi) integral K_psi f(a,b) psi_{a,b} da db / |a|**2``.

    Refuses grids that miss part of the signal's scale range unless
    ``truncated`` is set, in which case the partial sum is returned.
    """
    if sf.fingerprint != w.fingerprint:
        raise FingerprintMismatchError("scalogram was computed with a different wavelet")
    missing = [key for key in sf.keys() if key not in sf.slices]
    if missing:
        raise IncompleteGridError(f"missing slices at scales {sorted({j for j, _ in missing})}")
    if not truncated and not sf.grid.covers(sf.support_j):
        if sf.support_j is None:
            raise IncompleteGridError("signal scale range is unbounded (nonzero mean)")
        lo, hi = sf.support_j
        raise IncompleteGridError(
            f"grid covers scales [{sf.grid.j_min}, {sf.grid.j_max}] but the transform "
            f"is nonzero on [{lo}, {hi}]"
        )
    out = synthesize(lambda j, u: sf.slices[(j, u)], w.psi, sf.grid)
    return out * (1.0 / w.c_psi)


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def write_scalogram(sf: Scalogram, csv_path) -> Path:
    """Write the CSV and its JSON sidecar; returns the sidecar path."""
    csv_path = Path(csv_path)
    meta = sidecar_path(csv_path)
    if meta == csv_path:
        raise ValueError("scalogram output must not use the .json suffix")
    csv_path.write_text(sf.to_csv())
    meta.write_text(json.dumps(sf.sidecar(), indent=2, sort_keys=True) + "\n")
    return meta


def read_scalogram(csv_path) -> Scalogram:
    csv_path = Path(csv_path)
    meta = json.loads(sidecar_path(csv_path).read_text())
    return Scalogram.from_csv(csv_path.read_text(), meta)
