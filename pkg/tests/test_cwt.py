import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from padicwave.cwt import (
    GridSpec,
    Scalogram,
    check_grid,
    coefficient,
    cwt,
    cwt_via_convolution,
    energy,
    invert,
    make_grid,
    plancherel_pairing,
    read_scalogram,
    required_grid,
    signal_scale_range,
    write_scalogram,
)
from padicwave.errors import FingerprintMismatchError, GridError, IncompleteGridError, UnboundedScaleError
from padicwave.padic_core import PAdic
from padicwave.schwartz_bruhat import TestFunction, dilate, indicator, inner, norm
from padicwave.verify import random_function, random_zero_mean, random_wavelet, truncation_errors
from padicwave.wavelet import daughter, kozyrev, make_wavelet

cases = st.tuples(
    st.sampled_from([2, 3]),
    st.integers(0, 2),
    st.integers(0, 2),
    st.integers(0, 2**32 - 1),
).filter(lambda t: t[1] + t[2] >= 1)


def instance(t):
    p, m, n, seed = t
    rng = np.random.default_rng(seed)
    w = kozyrev(p) if seed % 2 else random_wavelet(rng, p)
    return random_zero_mean(rng, p, m, n), w


def cell_point(p, grid, j, u, k):
    M, _ = grid.window(j)
    return PAdic(p, j, u), PAdic(p, -M, k)


# grids


def test_kozyrev_self_grid_is_single_scale():
    w = kozyrev(2)
    grid = required_grid(w.psi, w)
    assert (grid.j_min, grid.j_max) == (0, 0)
    S = cwt(w.psi, w, grid)
    assert S.value_at(PAdic.from_int(2, 1), PAdic.zero(2)) == pytest.approx(1, abs=1e-15)


def test_nonzero_mean_needs_bounds():
    with pytest.raises(UnboundedScaleError):
        required_grid(indicator(3), kozyrev(3))
    grid = required_grid(indicator(3), kozyrev(3), j_min=-2, j_max=0)
    assert (grid.j_min, grid.j_max) == (-2, 0)


@pytest.mark.parametrize("p", [2, 3])
def test_scale_range_scan(p):
    """A wavelet dilated by p: brute-force scan confirms K vanishes off the computed range."""
    w = kozyrev(p)
    f = dilate(w.psi, PAdic.from_int(p, p)) * float(p) ** 0.5
    lo, hi = signal_scale_range(f, w)
    wide = make_grid(-4, 4, [w], f.m)
    S = cwt(f, w, wide)
    for j in range(-4, 5):
        peak = max(np.abs(S.slices[(j, u)]).max() for u in wide.units(p))
        if lo <= j <= hi:
            assert peak > 1e-6
        else:
            assert peak <= 1e-13


def test_check_grid_rejects_coarse_windows():
    w = kozyrev(2)
    grid = GridSpec(0, 0, 1, ((0, 0),))
    with pytest.raises(GridError):
        check_grid(w, grid)


def test_grid_serialization_roundtrip():
    grid = make_grid(-1, 2, [kozyrev(3)], 1)
    assert GridSpec.from_dict(grid.to_dict()) == grid


# coefficients


@given(cases)
@settings(max_examples=15, deadline=None)
def test_identity_cell_is_inner_product(t):
    f, w = instance(t)
    assert abs(coefficient(f, w, PAdic.from_int(f.p, 1), PAdic.zero(f.p)) - inner(f, w.psi)) <= 1e-12


def test_kozyrev_identity_cell():
    for p in (2, 3, 5):
        w = kozyrev(p)
        assert coefficient(w.psi, w, PAdic.from_int(p, 1), PAdic.zero(p)) == pytest.approx(1, abs=1e-14)


@given(cases)
@settings(max_examples=20, deadline=None)
def test_paths_agree_and_match_definition(t):
    f, w = instance(t)
    grid = required_grid(f, w)
    S = cwt(f, w, grid)
    assert S.max_abs_diff(cwt_via_convolution(f, w, grid)) <= 1e-12
    cells = list(S.cells())
    for j, u, k, v in cells[:: max(1, len(cells) // 10)]:
        a, b = cell_point(f.p, grid, j, u, k)
        assert abs(v - coefficient(f, w, a, b)) <= 1e-12


def test_bump_signal_samples_the_wavelet():
    """A mean-one bump on p**n Z_p returns conj(psi_ab(0)) whenever psi_ab is constant there."""
    p, n = 3, 2
    w = kozyrev(p)
    bump = TestFunction(p, -n, n, [float(p) ** n])
    grid = make_grid(-2, n - w.psi.n, [w], 0)
    S = cwt(bump, w, grid)
    for j, u, k, v in S.cells():
        a, b = cell_point(p, grid, j, u, k)
        d = daughter(w, a, b)
        assert abs(v - np.conj(d(PAdic.zero(p)))) <= 1e-12


def test_zero_signal():
    w = kozyrev(2)
    S = cwt(TestFunction.zeros(2, 1, 1), w, make_grid(-1, 1, [w], 1))
    assert S.max_abs() == 0


# Plancherel, energy, inversion


@pytest.mark.parametrize("p", [2, 3, 5])
def test_kozyrev_pairing(p):
    w = kozyrev(p)
    S = cwt(w.psi, w, required_grid(w.psi, w))
    assert abs(plancherel_pairing(S, S) - 1 / p) <= 1e-12
    assert abs(energy(S) - 1) <= 1e-12


def test_pairing_with_zero():
    w = kozyrev(3)
    f = random_zero_mean(np.random.default_rng(0), 3, 1, 1)
    grid = required_grid(f, w)
    assert plancherel_pairing(cwt(f, w, grid), cwt(TestFunction.zeros(3, 1, 1), w, grid)) == 0


def test_pairing_rejects_other_wavelet():
    f = random_zero_mean(np.random.default_rng(0), 3, 1, 1)
    w1, w2 = kozyrev(3), make_wavelet(random_zero_mean(np.random.default_rng(1), 3, 0, 1))
    grid = make_grid(-2, 2, [w1, w2], 1)
    with pytest.raises(FingerprintMismatchError):
        plancherel_pairing(cwt(f, w1, grid), cwt(f, w2, grid))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_plancherel_random_p3(seed):
    rng = np.random.default_rng(seed)
    p = 3
    w = kozyrev(p)
    f = random_zero_mean(rng, p, int(rng.integers(0, 3)), int(rng.integers(1, 3)))
    g = random_zero_mean(rng, p, int(rng.integers(0, 3)), int(rng.integers(1, 3)))
    grid = make_grid(-4, 3, [w], 2)
    lhs = plancherel_pairing(cwt(f, w, grid), cwt(g, w, grid))
    fg = inner(f, g)
    assert abs(lhs - w.c_psi * fg) <= 1e-10 * (1 + abs(fg))


def test_energy_quadratic_and_zero():
    w = kozyrev(2)
    f = random_zero_mean(np.random.default_rng(3), 2, 1, 2)
    grid = required_grid(f, w)
    assert energy(cwt(f * 2, w, grid)) == pytest.approx(4 * energy(cwt(f, w, grid)), rel=1e-12)
    assert energy(cwt(TestFunction.zeros(2, 1, 2), w, grid)) == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_invert_kozyrev(p):
    w = kozyrev(p)
    rec = invert(cwt(w.psi, w, required_grid(w.psi, w)), w)
    assert norm(rec - w.psi) <= 1e-10


@given(cases)
@settings(max_examples=20, deadline=None)
def test_invert_roundtrip(t):
    f, w = instance(t)
    grid = required_grid(f, w)
    S = cwt(f, w, grid)
    rec = invert(S, w)
    assert norm(rec - f) <= 1e-10 * norm(f)
    alpha = 0.3 - 1.7j
    assert norm(invert(S * alpha, w) - rec * alpha) <= 1e-12 * norm(f)


def test_invert_guards():
    w = kozyrev(3)
    f = random_zero_mean(np.random.default_rng(4), 3, 1, 1)
    S = cwt(f, w, required_grid(f, w))
    with pytest.raises(FingerprintMismatchError):
        invert(S, make_wavelet(random_zero_mean(np.random.default_rng(5), 3, 0, 1)))
    narrow = required_grid(f, w)
    if narrow.j_min < narrow.j_max:
        short = make_grid(narrow.j_min, narrow.j_min, [w], f.m)
        with pytest.raises(IncompleteGridError):
            invert(cwt(f, w, short), w)


def test_truncated_inversion_decreases():
    for p in (2, 3, 5):
        errors = truncation_errors(p, np.random.default_rng(p))
        assert all(b < a for a, b in zip(errors, errors[1:]))


@given(cases)
@settings(max_examples=8, deadline=None)
def test_grid_refinement_is_exact(t):
    f, w = instance(t)
    grid = required_grid(f, w)
    S = cwt(f, w, grid)
    base_pair = plancherel_pairing(S, S)
    base_rec = invert(S, w)
    for refined in (grid.refine_units(), grid.refine_translations()):
        R = cwt(f, w, refined)
        assert abs(plancherel_pairing(R, R) - base_pair) <= 1e-12
        assert norm(invert(R, w) - base_rec) <= 1e-12


# files


def test_csv_roundtrip_and_determinism(tmp_path):
    w = kozyrev(3)
    f = random_zero_mean(np.random.default_rng(6), 3, 1, 1)
    S = cwt(f, w, required_grid(f, w))
    meta = write_scalogram(S, tmp_path / "a.csv")
    write_scalogram(S, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert meta == tmp_path / "a.json"
    back = read_scalogram(tmp_path / "a.csv")
    assert back.max_abs_diff(S) == 0
    assert back.fingerprint == S.fingerprint and back.support_j == S.support_j


def test_csv_kozyrev_row():
    w = kozyrev(2)
    text = cwt(w.psi, w, required_grid(w.psi, w)).to_csv()
    assert text.splitlines()[0] == "j,u,k,b,re,im"
    assert "0,1,0,0,1.0,0.0" in text.splitlines()


def test_csv_missing_rows(tmp_path):
    w = kozyrev(3)
    f = random_zero_mean(np.random.default_rng(7), 3, 2, 1)
    S = cwt(f, w, required_grid(f, w))
    lines = S.to_csv().splitlines()
    j_drop = S.grid.j_min
    kept = [lines[0]] + [ln for ln in lines[1:] if int(ln.split(",")[0]) != j_drop]
    with pytest.raises(IncompleteGridError):
        Scalogram.from_csv("\n".join(kept) + "\n", S.sidecar())


def test_csv_bad_header():
    w = kozyrev(2)
    S = cwt(w.psi, w, required_grid(w.psi, w))
    with pytest.raises(ValueError):
        Scalogram.from_csv("a,b\n", S.sidecar())


def test_sidecar_contents():
    w = kozyrev(2)
    S = cwt(w.psi, w, required_grid(w.psi, w))
    meta = json.loads(json.dumps(S.sidecar()))
    assert meta["p"] == 2 and meta["wavelet_fingerprint"] == w.fingerprint
    assert meta["c_psi"] == 0.5
