"""Command-line entry point: ``padicwave <command>``.

Exit codes
    0  success
    1  not admissible (nonzero-mean wavelet) or a failed verification check
    2  malformed input or unknown suite
    3  parameter violation or degenerate input
    4  unbounded scale range (nonzero-mean signal without --jmin/--jmax)
    5  wavelet fingerprint mismatch
    6  incomplete scalogram grid
"""
from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click

from .assoc_conv import assoc_grid, hash_convolve
from .cwt import (
    Scalogram,
    cwt,
    invert,
    required_grid,
    sidecar_path,
    write_scalogram,
)
from .errors import (
    DegenerateWaveletError,
    FingerprintMismatchError,
    GridError,
    IncompleteGridError,
    MalformedInputError,
    NotAdmissibleError,
    PrimeMismatchError,
    UnboundedScaleError,
)
from .fourier import convolve, fourier, fourier_oracle
from .padic_core import is_prime
from .schwartz_bruhat import TestFunction
from .verify import SUITES, run_suite
from .wavelet import Wavelet, admissibility_constant

EXIT_NOT_ADMISSIBLE = 1
EXIT_MALFORMED = 2
EXIT_PARAMETER = 3
EXIT_UNBOUNDED = 4
EXIT_FINGERPRINT = 5
EXIT_INCOMPLETE = 6


class CommandFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _fail(code: int, message: str) -> CommandFailure:
    return CommandFailure(code, message)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _fail(EXIT_MALFORMED, f"cannot read {path}: {exc.strerror}") from exc


def load_function(path: str) -> TestFunction:
    try:
        f = TestFunction.from_json(_read_text(path))
    except MalformedInputError as exc:
        raise _fail(EXIT_MALFORMED, f"{path}: {exc}") from exc
    except ValueError as exc:
        raise _fail(EXIT_PARAMETER, f"{path}: {exc}") from exc
    if not is_prime(f.p):
        raise _fail(EXIT_PARAMETER, f"{path}: p={f.p} is not prime")
    return f


def load_wavelet(path: str) -> Wavelet:
    load_function(path)  # shape and parameter checks with their own exit codes
    try:
        return Wavelet.from_json(_read_text(path))
    except NotAdmissibleError as exc:
        raise _fail(EXIT_NOT_ADMISSIBLE, f"{path}: {exc}") from exc
    except DegenerateWaveletError as exc:
        raise _fail(EXIT_PARAMETER, f"{path}: {exc}") from exc
    except ValueError as exc:
        # a stored c_psi that disagrees with the recomputed constant
        raise _fail(EXIT_MALFORMED, f"{path}: {exc}") from exc


def write_function(f: TestFunction, path: str) -> None:
    Path(path).write_text(f.to_json() + "\n")


def format_decimal(x: float, digits: int = 12) -> str:
    """``x`` with exactly ``digits`` significant digits, trailing zeros kept."""
    return f"{x:#.{digits}g}"


def _run(fn, *args) -> None:
    try:
        fn(*args)
    except CommandFailure as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.code)
    except PrimeMismatchError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_PARAMETER)


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Wavelet analysis on Q_p with exact finite grids."""


@main.command("fourier")
@click.argument("input_path", metavar="INPUT")
@click.argument("output_path", metavar="OUTPUT")
@click.option("--oracle", is_flag=True, help="Use the direct double-sum transform.")
def cmd_fourier(input_path: str, output_path: str, oracle: bool) -> None:
    """Fourier transform of a test function."""

    def body():
        f = load_function(input_path)
        write_function(fourier_oracle(f) if oracle else fourier(f), output_path)

    _run(body)


@main.command("admissibility")
@click.argument("input_path", metavar="INPUT")
def cmd_admissibility(input_path: str) -> None:
    """Print the admissibility constant c_psi."""

    def body():
        psi = load_function(input_path)
        try:
            c = admissibility_constant(psi)
        except NotAdmissibleError as exc:
            click.echo(str(exc))
            raise _fail(EXIT_NOT_ADMISSIBLE, str(exc)) from exc
        except DegenerateWaveletError as exc:
            raise _fail(EXIT_PARAMETER, str(exc)) from exc
        click.echo(format_decimal(c))

    _run(body)


@main.command("cwt")
@click.argument("signal_path", metavar="SIGNAL")
@click.argument("wavelet_path", metavar="WAVELET")
@click.argument("output_path", metavar="OUTPUT")
@click.option("--jmin", type=int, default=None, help="Smallest scale exponent (|a| = p^-j).")
@click.option("--jmax", type=int, default=None, help="Largest scale exponent.")
def cmd_cwt(signal_path: str, wavelet_path: str, output_path: str, jmin: Optional[int], jmax: Optional[int]) -> None:
    """Write the scalogram CSV and its JSON sidecar."""

    def body():
        f = load_function(signal_path)
        w = load_wavelet(wavelet_path)
        try:
            grid = required_grid(f, w, j_min=jmin, j_max=jmax)
        except UnboundedScaleError as exc:
            raise _fail(EXIT_UNBOUNDED, str(exc)) from exc
        except ValueError as exc:
            raise _fail(EXIT_PARAMETER, str(exc)) from exc
        try:
            write_scalogram(cwt(f, w, grid), output_path)
        except ValueError as exc:
            raise _fail(EXIT_PARAMETER, str(exc)) from exc

    _run(body)


@main.command("invert")
@click.argument("scalogram_path", metavar="SCALOGRAM")
@click.argument("wavelet_path", metavar="WAVELET")
@click.argument("output_path", metavar="OUTPUT")
@click.option("--truncated", is_flag=True, help="Accept a grid that misses part of the scale range.")
def cmd_invert(scalogram_path: str, wavelet_path: str, output_path: str, truncated: bool) -> None:
    """Reconstruct a test function from a scalogram."""

    def body():
        w = load_wavelet(wavelet_path)
        try:
            meta = json.loads(_read_text(str(sidecar_path(scalogram_path))))
        except json.JSONDecodeError as exc:
            raise _fail(EXIT_MALFORMED, f"sidecar: {exc}") from exc
        if not isinstance(meta, dict):
            raise _fail(EXIT_MALFORMED, "sidecar: expected a JSON object")
        if meta.get("wavelet_fingerprint") != w.fingerprint:
            raise _fail(EXIT_FINGERPRINT, "scalogram was computed with a different wavelet")
        try:
            sf = Scalogram.from_csv(_read_text(scalogram_path), meta)
        except IncompleteGridError as exc:
            raise _fail(EXIT_INCOMPLETE, str(exc)) from exc
        except (KeyError, TypeError, ValueError) as exc:
            raise _fail(EXIT_MALFORMED, f"{scalogram_path}: {exc}") from exc
        try:
            write_function(invert(sf, w, truncated=truncated), output_path)
        except FingerprintMismatchError as exc:
            raise _fail(EXIT_FINGERPRINT, str(exc)) from exc
        except IncompleteGridError as exc:
            raise _fail(EXIT_INCOMPLETE, str(exc)) from exc

    _run(body)


@main.command("verify")
@click.argument("suite_arg", metavar="[SUITE]", required=False)
@click.option("--suite", "suite_opt", default=None, help="Suite name (alternative to the argument).")
@click.option("--p", "p", type=int, default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trials", type=int, default=25, show_default=True)
@click.option("--corrupt-wavelet", is_flag=True, help="Analyse with a nonzero-mean wavelet (negative control).")
def cmd_verify(suite_arg, suite_opt, p: int, seed: int, trials: int, corrupt_wavelet: bool) -> None:
    """Replay the identities numerically; exit 0 iff every check passes."""

    def body():
        if suite_arg and suite_opt and suite_arg != suite_opt:
            raise _fail(EXIT_MALFORMED, f"conflicting suites {suite_arg!r} and {suite_opt!r}")
        suite = suite_arg or suite_opt or "all"
        if suite not in SUITES:
            raise _fail(EXIT_MALFORMED, f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
        if not is_prime(p):
            raise _fail(EXIT_PARAMETER, f"p={p} is not prime")
        if trials < 1:
            raise _fail(EXIT_PARAMETER, "--trials must be positive")
        checks = run_suite(suite, p, seed, trials, corrupt=corrupt_wavelet, emit=click.echo)
        failed = sum(not c.passed for c in checks)
        click.echo(f"{len(checks)} checks, {failed} failed")
        if failed:
            sys.exit(1)

    _run(body)


@main.command("convolve")
@click.argument("a_path", metavar="A")
@click.argument("b_path", metavar="B")
@click.argument("output_path", metavar="OUTPUT")
@click.option("--mode", type=click.Choice(["plain", "hash"]), default="plain", show_default=True)
@click.option("--psi", "psi_path", default=None, help="Wavelet analysing A (hash mode).")
@click.option("--chi", "chi_path", default=None, help="Wavelet analysing B (hash mode).")
@click.option("--phi", "phi_path", default=None, help="Synthesis wavelet (hash mode).")
def cmd_convolve(a_path, b_path, output_path, mode, psi_path, chi_path, phi_path) -> None:
    """Plain convolution A * B or the associated convolution A # B."""

    def body():
        h, g = load_function(a_path), load_function(b_path)
        if mode == "plain":
            write_function(convolve(h, g), output_path)
            return
        paths = {"--psi": psi_path, "--chi": chi_path, "--phi": phi_path}
        missing = [name for name, path in paths.items() if path is None]
        if missing:
            raise _fail(EXIT_MALFORMED, f"hash mode needs {', '.join(missing)}")
        ws = [load_wavelet(path) for path in paths.values()]
        try:
            grid = assoc_grid(h, g, *ws)
            out = hash_convolve(h, g, *ws, grid)
        except UnboundedScaleError as exc:
            raise _fail(EXIT_UNBOUNDED, str(exc)) from exc
        except GridError as exc:
            raise _fail(EXIT_PARAMETER, str(exc)) from exc
        write_function(out, output_path)

    _run(body)


if __name__ == "__main__":
    main()
