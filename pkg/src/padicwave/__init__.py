"""Wavelet analysis on the p-adic numbers with exact finite-grid discretizations."""
from .errors import (
    DegenerateWaveletError,
    FingerprintMismatchError,
    GridError,
    IncompleteGridError,
    NotAdmissibleError,
    PrimeMismatchError,
    UnboundedScaleError,
)
from .padic_core import PAdic, absval, character, enumerate_cosets, fractional_part, invert_mod
from .schwartz_bruhat import TestFunction, dilate, indicator, inner, norm, parity, translate
from .fourier import convolve, fourier, inverse_fourier
from .wavelet import Wavelet, admissibility_constant, daughter, kozyrev, make_wavelet
from .cwt import GridSpec, Scalogram, cwt, energy, invert, plancherel_pairing, required_grid
from .assoc_conv import compatible_triple, hash_convolve, kernel_D, translate_tau

__version__ = "0.1.0"
