"""Seeded numerical checks of every identity the library implements.

Each suite returns a list of :class:`Check` records (worst error over all
trials against a fixed tolerance).  Randomness comes from
``numpy.random.default_rng(seed)`` (PCG64), so a transcript is a pure
function of ``(suite, p, seed, trials)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from . import padic_core as pc
from .assoc_conv import assoc_grid, compatible_triple, hash_convolve, kernel_D, product_scalogram, translate_tau
from .cwt import (
    GridSpec,
    coefficient,
    cwt,
    cwt_via_convolution,
    energy,
    invert,
    make_grid,
    plancherel_pairing,
    required_grid,
    signal_scale_range,
)
from .errors import DegenerateWaveletError, NotAdmissibleError
from .fourier import convolve, convolve_oracle, fourier, fourier_oracle, inverse_fourier
from .padic_core import PAdic
from .schwartz_bruhat import (
    TestFunction,
    dilate,
    indicator,
    inner,
    join,
    l1_norm,
    mean,
    norm,
    parity,
    project_zero_mean,
    refine,
    translate,
)
from .wavelet import Wavelet, admissibility_constant, conv_wavelet, kozyrev, make_wavelet

SUITES = ("parseval", "plancherel", "inversion", "properties", "assoc", "all")

# inversion with |a| approximated to this many digits is exact on every grid used here
INVERSE_DIGITS = 40


@dataclass(frozen=True)
class Check:
    name: str
    max_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return math.isfinite(self.max_err) and self.max_err <= self.tol

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name:<36} max_err={self.max_err:.3e} tol={self.tol:.0e} {status}"


# random instances


def random_function(rng: np.random.Generator, p: int, m: int, n: int) -> TestFunction:
    size = p ** (m + n)
    return TestFunction(p, m, n, rng.normal(size=size) + 1j * rng.normal(size=size))


def random_zero_mean(rng: np.random.Generator, p: int, m: int, n: int) -> TestFunction:
    if m + n < 1:
        raise ValueError("a zero-mean function needs at least two cosets")
    return project_zero_mean(random_function(rng, p, m, n))


def random_params(rng: np.random.Generator, lo_total: int = 0, hi: int = 2) -> tuple[int, int]:
    while True:
        m, n = (int(v) for v in rng.integers(0, hi + 1, size=2))
        if m + n >= lo_total:
            return m, n


def random_padic(rng: np.random.Generator, p: int, vlo: int = -2, vhi: int = 2) -> PAdic:
    unit = int(rng.integers(1, p ** 3))
    if rng.random() < 0.5:
        unit = -unit
    return PAdic(p, int(rng.integers(vlo, vhi + 1)), unit)


def random_wavelet(rng: np.random.Generator, p: int) -> Wavelet:
    """A small random zero-mean wavelet; small enough to keep grids at desk scale."""
    choices = [(0, 1)] if p >= 5 else [(0, 1), (1, 0), (0, 2), (1, 1)]
    m, n = choices[int(rng.integers(len(choices)))]
    return make_wavelet(random_zero_mean(rng, p, m, n))


def analysis_wavelet(rng: np.random.Generator, p: int, trial: int) -> Wavelet:
    return kozyrev(p) if trial % 2 == 0 else random_wavelet(rng, p)


def corrupted_wavelet(p: int) -> Wavelet:
    """Kozyrev plus a constant: nonzero mean, smuggled past admissibility."""
    base = kozyrev(p)
    psi = base.psi + indicator(p, 0, 1) * 0.25
    return Wavelet(psi, base.c_psi, base.spectral_annulus)


def shell_sum_constant(psi: TestFunction) -> float:
    """Admissibility constant from exact per-coset absolute values of the spectrum."""
    spectrum = fourier_oracle(psi)
    total = 0.0
    for idx in pc.enumerate_cosets(spectrum.p, spectrum.m, spectrum.n):
        xi = idx.representative
        value = spectrum.values[idx.k]
        if xi.is_zero:
            if abs(value) > 1e-12:
                return math.inf
            continue
        total += abs(value) ** 2 * float(idx.measure) / pc.absval(xi)
    return total


def _relmax(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def _worst(values: Iterable[float]) -> float:
    return max(values, default=0.0)


def _inverse(a: PAdic) -> PAdic:
    return pc.invert_mod(a, INVERSE_DIGITS)


# suites


def suite_parseval(p: int, rng: np.random.Generator, trials: int) -> list[Check]:
    parseval, oracle, roundtrip, twice, supb, convthm, convoracle = ([] for _ in range(7))
    for _ in range(trials):
        f = random_function(rng, p, *random_params(rng))
        g = random_function(rng, p, *random_params(rng))
        F = fourier(f)
        parseval.append(abs(norm(F) - norm(f)))
        oracle.append(_relmax(F.values, fourier_oracle(f).values))
        roundtrip.append(_relmax(inverse_fourier(F).values, f.values))
        twice.append(_relmax(fourier(F).values, parity(f).values))
        supb.append(max(0.0, float(np.abs(F.values).max()) - l1_norm(f)))
        fg = convolve(f, g)
        fj, gj = join(f, g)
        convthm.append(_relmax(fourier(fg).values, fourier(fj).values * fourier(gj).values))
        convoracle.append(_relmax(fg.values, convolve_oracle(f, g).values))
    return [
        Check("parseval", _worst(parseval), 1e-12),
        Check("fourier_oracle_equivalence", _worst(oracle), 1e-12),
        Check("inverse_fourier_roundtrip", _worst(roundtrip), 1e-12),
        Check("fourier_twice_is_parity", _worst(twice), 1e-12),
        Check("sup_bound_by_l1", _worst(supb), 1e-12),
        Check("convolution_theorem", _worst(convthm), 1e-12),
        Check("convolution_oracle", _worst(convoracle), 1e-12),
    ]


def suite_plancherel(p: int, rng: np.random.Generator, trials: int, corrupt: bool = False) -> list[Check]:
    checks = []
    w_koz = kozyrev(p)
    c_err = abs(w_koz.c_psi - 1 / p) * p
    c_err = max(c_err, abs(shell_sum_constant(w_koz.psi) - w_koz.c_psi) * p)
    checks.append(Check("kozyrev_constant", c_err, 1e-12))

    misclassified = 0
    for trial in range(trials):
        m, n = random_params(rng, lo_total=1)
        f = random_function(rng, p, m, n)
        candidate = project_zero_mean(f) if trial % 2 else f + indicator(p, 0) * 0.5
        expected = abs(mean(candidate)) <= 1e-12
        try:
            admissibility_constant(candidate)
            accepted = True
        except NotAdmissibleError:
            accepted = False
        misclassified += accepted != expected
    try:
        admissibility_constant(indicator(p, 0))
        misclassified += 1
    except NotAdmissibleError:
        pass
    checks.append(Check("admissible_iff_zero_mean", float(misclassified), 0.0))

    cbound, nbound = [], []
    for _ in range(trials):
        w = random_wavelet(rng, p)
        phi = random_function(rng, p, *random_params(rng))
        try:
            wc = conv_wavelet(w, phi)
        except DegenerateWaveletError:
            continue
        phi_sup = float(np.abs(fourier(phi).values).max())
        cbound.append(max(0.0, wc.c_psi - phi_sup ** 2 * w.c_psi))
        nbound.append(max(0.0, norm(wc.psi) - l1_norm(phi) * norm(w.psi)))
    checks.append(Check("conv_wavelet_constant_bound", _worst(cbound), 1e-10))
    checks.append(Check("conv_wavelet_norm_bound", _worst(nbound), 1e-10))

    zero_mean, planch, energies, exact = [], [], [], []
    for trial in range(trials):
        w = corrupted_wavelet(p) if corrupt else analysis_wavelet(rng, p, trial)
        zero_mean.append(abs(mean(w.psi)))
        f = random_zero_mean(rng, p, *random_params(rng, lo_total=1))
        g = random_zero_mean(rng, p, *random_params(rng, lo_total=1))
        grid = joint_grid([f, g], w)
        sf, sg = cwt(f, w, grid), cwt(g, w, grid)
        fg = inner(f, g)
        pairing = plancherel_pairing(sf, sg)
        planch.append(abs(pairing - w.c_psi * fg) / (1 + abs(fg)))
        energies.append(abs(energy(sf) - norm(f) ** 2) / max(1.0, norm(f) ** 2))
        if trial < max(1, trials // 5):
            for refined in (grid.refine_units(), grid.refine_translations()):
                again = plancherel_pairing(cwt(f, w, refined), cwt(g, w, refined))
                exact.append(abs(again - pairing))
    checks.append(Check("wavelet_zero_mean", _worst(zero_mean), 1e-12))
    checks.append(Check("plancherel", _worst(planch), 1e-10))
    checks.append(Check("energy_identity", _worst(energies), 1e-10))
    checks.append(Check("plancherel_grid_exactness", _worst(exact), 1e-12))
    return checks


def joint_grid(signals: list[TestFunction], w: Wavelet) -> GridSpec:
    """Smallest grid complete for every zero-mean signal in the list."""
    ranges = [signal_scale_range(f, w) for f in signals]
    live = [r for r in ranges if r is not None and r[0] <= r[1]] or [(0, 0)]
    return make_grid(
        min(r[0] for r in live), max(r[1] for r in live), [w], max(f.m for f in signals)
    )


def truncation_errors(p: int, rng: np.random.Generator, steps: int = 4) -> list[float]:
    """Reconstruction error of a nonzero-mean signal as the scale range grows toward large |a|."""
    w = kozyrev(p)
    f = random_zero_mean(rng, p, 1, 1) + indicator(p, 0)
    top = required_grid(project_zero_mean(f), w).j_max
    errors = []
    for step in range(steps):
        j_min = -1 - step
        grid = required_grid(f, w, j_min=j_min, j_max=top)
        rec = invert(cwt(f, w, grid), w, truncated=True)
        errors.append(norm(rec - f))
    return errors


def suite_inversion(p: int, rng: np.random.Generator, trials: int, corrupt: bool = False) -> list[Check]:
    rt, exact = [], []
    for trial in range(trials):
        w = corrupted_wavelet(p) if corrupt else analysis_wavelet(rng, p, trial)
        f = random_zero_mean(rng, p, *random_params(rng, lo_total=1))
        grid = joint_grid([f], w)
        rec = invert(cwt(f, w, grid), w)
        rt.append(norm(rec - f) / norm(f))
        if trial < max(1, trials // 5):
            for refined in (grid.refine_units(), grid.refine_translations()):
                again = invert(cwt(f, w, refined), w)
                exact.append(norm(again - rec))
    errors = truncation_errors(p, rng)
    increases = sum(1 for a, b in zip(errors, errors[1:]) if not b < a)
    return [
        Check("inversion_roundtrip", _worst(rt), 1e-10),
        Check("inversion_grid_exactness", _worst(exact), 1e-12),
        Check("truncated_inversion_monotone", float(increases), 0.0),
    ]


def _cell_points(p: int, grid: GridSpec, j: int, u: int, k: int) -> tuple[PAdic, PAdic]:
    M, _ = grid.window(j)
    return PAdic(p, j, u), PAdic(p, -M, k)


def _sample_cells(rng, S, count: int):
    cells = [(j, u, k) for j, u in S.keys() for k in range(S.slices[(j, u)].size)]
    picks = rng.choice(len(cells), size=min(count, len(cells)), replace=False)
    return [cells[int(i)] for i in sorted(picks)]


def annulus_power(p: int, degree: float, r_lo: int, r_hi: int) -> TestFunction:
    """``|x|**degree`` on ``p**r_lo <= |x| <= p**r_hi``, zero elsewhere."""
    m, n = r_hi, 1 - r_lo
    vals = np.zeros(p ** (m + n))
    for k in range(1, vals.size):
        s = m - pc.valuation(k, p)
        if r_lo <= s <= r_hi:
            vals[k] = float(p) ** (degree * s)
    return TestFunction(p, m, n, vals)


def homogeneity_guard(b: PAdic, radius_exp: int, shift: int, r_lo: int, r_hi: int) -> bool:
    """True when ``y in A`` iff ``p**shift * y in A`` across the ball ``B(b, p**radius_exp)``.

    ``A`` is the annulus ``p**r_lo <= |y| <= p**r_hi``; ``|p**shift y| = p**(-shift) |y|``.
    """
    b_exp = None if b.is_zero else -b.val
    if b_exp is not None and b_exp > radius_exp:
        exps = [b_exp]
    else:
        exps = list(range(r_lo - abs(shift) - 2, radius_exp + 1))
    inside = lambda s: r_lo <= s <= r_hi
    return all(inside(s) == inside(s - shift) for s in exps)


def suite_properties(p: int, rng: np.random.Generator, trials: int) -> list[Check]:
    ultra, multi, chars, invm = [], [], [], []
    for _ in range(trials * 4):
        x, y = random_padic(rng, p), random_padic(rng, p)
        s = x + y
        bound = max(abs(x), abs(y))
        bad = abs(s) > bound or (abs(x) != abs(y) and abs(s) != bound)
        ultra.append(float(bad))
        prod = x * y
        multi.append(float(prod.val != x.val + y.val))
        chars.append(abs(pc.character(s) - pc.character(x) * pc.character(y)))
        L = int(rng.integers(1, 8))
        resid = x * pc.invert_mod(x, L) - PAdic.from_int(p, 1)
        invm.append(float(not (resid.is_zero or resid.val >= L)))
    checks = [
        Check("ultrametric_inequality", _worst(ultra), 0.0),
        Check("absolute_value_multiplicative", _worst(multi), 0.0),
        Check("character_homomorphism", _worst(chars), 1e-12),
        Check("invert_mod_precision", _worst(invm), 0.0),
    ]

    paths, definition, lin, shift, scaling, symmetry, par = ([] for _ in range(7))
    for trial in range(trials):
        w = analysis_wavelet(rng, p, trial)
        f = random_zero_mean(rng, p, *random_params(rng, lo_total=1))
        g = random_zero_mean(rng, p, *random_params(rng, lo_total=1))
        grid = required_grid(f, w)
        S = cwt(f, w, grid)
        paths.append(S.max_abs_diff(cwt_via_convolution(f, w, grid)))

        cells = _sample_cells(rng, S, 6)
        for j, u, k in cells:
            a, b = _cell_points(p, grid, j, u, k)
            definition.append(abs(S[j, u, k] - coefficient(f, w, a, b)))

        eta, theta = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        both = joint_grid([f, g], w)
        combo = cwt(f * eta + g * theta, w, both)
        lin.append(combo.max_abs_diff(cwt(f, w, both) * eta + cwt(g, w, both) * theta))

        sigma_shift = random_padic(rng, p)
        f_shift = translate(f, sigma_shift)
        S_shift = cwt(f_shift, w, required_grid(f_shift, w))
        shift.append(max(
            abs(v - S.value_at(a, b - sigma_shift))
            for j, u, k, v in S_shift.cells()
            for a, b in [_cell_points(p, S_shift.grid, j, u, k)]
        ))

        sigma = PAdic(p, int(rng.integers(-1, 2)), int(rng.integers(1, p ** 2)) * (1 if rng.random() < 0.5 else -1))
        if sigma.unit % p == 0:
            sigma = PAdic(p, sigma.val, 1)
        f_sigma = dilate(f, sigma) * float(p) ** (sigma.val / 2)
        S_sigma = cwt(f_sigma, w, required_grid(f_sigma, w))
        inv_sigma = _inverse(sigma)
        scaling.append(max(
            abs(v - S.value_at(a * inv_sigma, b * inv_sigma))
            for j, u, k, v in S_sigma.cells()
            for a, b in [_cell_points(p, S_sigma.grid, j, u, k)]
        ))

        for j, u, k in cells:
            a, b = _cell_points(p, grid, j, u, k)
            a_inv = _inverse(a)
            mirrored = coefficient(w.psi, f, a_inv, -(b * a_inv))
            symmetry.append(abs(S[j, u, k] - mirrored.conjugate()))

        w_par = make_wavelet(parity(w.psi))
        S_par = cwt(parity(f), w_par, grid)
        par.append(max(
            abs(v - S.value_at(a, -b))
            for j, u, k, v in S_par.cells()
            for a, b in [_cell_points(p, grid, j, u, k)]
        ))

    checks += [
        Check("cwt_path_equivalence", _worst(paths), 1e-12),
        Check("cwt_matches_definition", _worst(definition), 1e-12),
        Check("cwt_linearity", _worst(lin), 1e-12),
        Check("cwt_shift", _worst(shift), 1e-12),
        Check("cwt_scaling", _worst(scaling), 1e-12),
        Check("cwt_symmetry", _worst(symmetry), 1e-12),
        Check("cwt_parity", _worst(par), 1e-12),
        Check("cwt_homogeneity", homogeneity_error(p, rng, trials), 1e-10),
    ]
    return checks


def homogeneity_error(p: int, rng: np.random.Generator, trials: int) -> float:
    """Worst violation of ``K(lambda a, lambda b) = |lambda|**(d + 1/2) K(a, b)`` on guarded cells."""
    r_lo, r_hi = -2, 2
    w = kozyrev(p)
    errs = []
    attempts = 0
    while len(errs) < trials and attempts < 50 * trials:
        attempts += 1
        degree = float(rng.choice([-1.0, 0.5, 2.0]))
        f = annulus_power(p, degree, r_lo, r_hi)
        shift = int(rng.choice([-1, 1]))
        j = int(rng.integers(-2, 3))
        u = int(rng.integers(1, p))
        b = PAdic(p, int(rng.integers(-2, 3)), int(rng.integers(0, p ** 2)))
        if not homogeneity_guard(b, w.psi.m - j, shift, r_lo, r_hi):
            continue
        lam = PAdic(p, shift, 1)
        a = PAdic(p, j, u)
        lhs = coefficient(f, w, lam * a, lam * b)
        rhs = float(p) ** (-shift * (degree + 0.5)) * coefficient(f, w, a, b)
        errs.append(abs(lhs - rhs))
    return _worst(errs) if len(errs) == trials else math.inf


def suite_assoc(p: int, rng: np.random.Generator, trials: int) -> list[Check]:
    q = p if p in (2, 3) else 3
    ws = compatible_triple(q)
    fact, bilin, exact = [], [], []
    done = 0
    while done < trials:
        h = random_zero_mean(rng, q, *random_params(rng, lo_total=1))
        g = random_zero_mean(rng, q, *random_params(rng, lo_total=1))
        grid = assoc_grid(h, g, *ws)
        prod = product_scalogram(h, g, *ws, grid)
        scale = prod.max_abs()
        if scale < 1e-6:
            continue
        hg = hash_convolve(h, g, *ws, grid)
        fact.append(cwt(hg, ws[2], grid).max_abs_diff(prod) / scale)
        alpha = complex(*rng.normal(size=2))
        bilin.append(norm(hash_convolve(h * alpha, g, *ws, grid) - hg * alpha) / max(1.0, norm(hg)))
        if done < max(1, trials // 5):
            for refined in (grid.refine_units(), grid.refine_translations()):
                again = hash_convolve(h, g, *ws, refined)
                exact.append(norm(again - hg))
        done += 1
    return [
        Check(f"assoc_factorization[p={q}]", _worst(fact), 1e-9),
        Check("assoc_linearity", _worst(bilin), 1e-12),
        Check("assoc_grid_exactness", _worst(exact), 1e-12),
        Check("assoc_triple_sum_oracle[p=2]", assoc_oracle_error(rng), 1e-10),
    ]


def assoc_oracle_error(rng: np.random.Generator, instances: int = 2) -> float:
    """``h # g`` against the quadruple sum over ``D(x, y, z) h(z) g(y)`` and the ``tau_x`` pairing."""
    p = 2
    ws = compatible_triple(p)
    errs = []
    for _ in range(instances):
        h = random_zero_mean(rng, p, *random_params(rng, lo_total=1, hi=1))
        g = random_zero_mean(rng, p, *random_params(rng, lo_total=1, hi=1))
        grid = assoc_grid(h, g, *ws)
        hg = hash_convolve(h, g, *ws, grid)
        hz, gy = join(h, g)
        # daughters are constant on cosets of p**(n_w + j) and of the translation step
        fine = max(
            max(grid.window(j)[1], max(w.psi.n for w in ws) + j) for j in grid.scales()
        )
        hz = refine(hz, hz.m, max(hz.n, fine))
        gy = refine(gy, gy.m, max(gy.n, fine))
        pts = [idx.representative for idx in pc.enumerate_cosets(p, hz.m, hz.n)]
        xs = [idx.representative for idx in pc.enumerate_cosets(p, hg.m, hg.n)]
        for x in xs[:: max(1, len(xs) // 2)]:
            total = 0j
            for iy, y in enumerate(pts):
                for iz, z in enumerate(pts):
                    total += kernel_D(x, y, z, *ws, grid) * hz.values[iz] * gy.values[iy]
            total *= hz.cell_measure ** 2
            errs.append(abs(total - hg(x)))
            tau = translate_tau(h, x, *ws, grid)
            errs.append(abs(inner(tau, g.conj()) - hg(x)))
    return _worst(errs)


def run_suite(
    name: str,
    p: int,
    seed: int,
    trials: int,
    corrupt: bool = False,
    emit: Optional[Callable[[str], None]] = None,
) -> list[Check]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    names = SUITES[:-1] if name == "all" else (name,)
    rng = np.random.default_rng(seed)
    results: list[Check] = []
    for suite in names:
        if suite == "parseval":
            checks = suite_parseval(p, rng, trials)
        elif suite == "plancherel":
            checks = suite_plancherel(p, rng, trials, corrupt)
        elif suite == "inversion":
            checks = suite_inversion(p, rng, trials, corrupt)
        elif suite == "properties":
            checks = suite_properties(p, rng, trials)
        else:
            checks = suite_assoc(p, rng, trials)
        for check in checks:
            if emit is not None:
                emit(f"[{suite}] {check.line()}")
        results.extend(checks)
    return results
