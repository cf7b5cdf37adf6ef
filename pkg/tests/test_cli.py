import json

import numpy as np
import pytest
from click.testing import CliRunner

from padicwave.assoc_conv import compatible_triple
from padicwave.cli import format_decimal, main
from padicwave.cwt import cwt, read_scalogram
from padicwave.schwartz_bruhat import TestFunction, indicator
from padicwave.verify import random_zero_mean
from padicwave.wavelet import kozyrev


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)

    return invoke


def write(path, f):
    path.write_text(f.to_json())
    return path


def read(path):
    return TestFunction.from_json(path.read_text())


def test_format_decimal():
    assert format_decimal(0.2) == "0.200000000000"
    assert format_decimal(1 / 3) == "0.333333333333"
    assert format_decimal(2.5) == "2.50000000000"


# fourier


def test_fourier_indicator(run, tmp_path):
    src = write(tmp_path / "in.json", indicator(2))
    r = run("fourier", src, tmp_path / "out.json")
    assert r.exit_code == 0
    assert np.allclose(read(tmp_path / "out.json").values, [1])


@pytest.mark.parametrize("oracle", [False, True])
def test_fourier_kozyrev(run, tmp_path, oracle):
    src = write(tmp_path / "in.json", kozyrev(3).psi)
    args = ["fourier", src, tmp_path / "out.json"] + (["--oracle"] if oracle else [])
    assert run(*args).exit_code == 0
    out = read(tmp_path / "out.json")
    assert (out.m, out.n) == (1, 0)
    assert np.max(np.abs(out.values - [0, 1, 0])) <= 1e-12


def test_fourier_truncated_json(run, tmp_path):
    src = tmp_path / "in.json"
    src.write_text(indicator(2).to_json()[:-5])
    r = run("fourier", src, tmp_path / "out.json")
    assert r.exit_code == 2
    assert "error" in r.stderr and r.stdout == ""
    assert not (tmp_path / "out.json").exists()


def test_fourier_parameter_violation(run, tmp_path):
    src = tmp_path / "in.json"
    src.write_text(json.dumps({"p": 2, "m": -2, "n": 1, "values": []}))
    assert run("fourier", src, tmp_path / "out.json").exit_code == 3


def test_fourier_nonprime(run, tmp_path):
    src = tmp_path / "in.json"
    src.write_text(json.dumps({"p": 4, "m": 0, "n": 0, "values": [[1, 0]]}))
    assert run("fourier", src, tmp_path / "out.json").exit_code == 3


def test_missing_file(run, tmp_path):
    assert run("fourier", tmp_path / "nope.json", tmp_path / "out.json").exit_code == 2


# admissibility


def test_admissibility_kozyrev_five(run, tmp_path):
    r = run("admissibility", write(tmp_path / "k.json", kozyrev(5).psi))
    assert r.exit_code == 0
    assert r.stdout == "0.200000000000\n"


def test_admissibility_indicator(run, tmp_path):
    r = run("admissibility", write(tmp_path / "i.json", indicator(2)))
    assert r.exit_code == 1
    assert "not admissible: nonzero mean" in r.stdout


def test_admissibility_zero(run, tmp_path):
    assert run("admissibility", write(tmp_path / "z.json", TestFunction.zeros(2, 0, 1))).exit_code == 3


def test_admissibility_malformed(run, tmp_path):
    bad = tmp_path / "b.json"
    bad.write_text("{}")
    assert run("admissibility", bad).exit_code == 2


# cwt / invert


def test_cwt_kozyrev_row_and_determinism(run, tmp_path):
    k = write(tmp_path / "k.json", kozyrev(2).psi)
    assert run("cwt", k, k, tmp_path / "a.csv").exit_code == 0
    assert run("cwt", k, k, tmp_path / "b.csv").exit_code == 0
    rows = (tmp_path / "a.csv").read_text().splitlines()
    assert "0,1,0,0,1.0,0.0" in rows
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_cwt_nonzero_mean(run, tmp_path):
    f = write(tmp_path / "f.json", indicator(2))
    k = write(tmp_path / "k.json", kozyrev(2).psi)
    assert run("cwt", f, k, tmp_path / "s.csv").exit_code == 4
    assert run("cwt", f, k, tmp_path / "s.csv", "--jmin", -2, "--jmax", 0).exit_code == 0


def test_cwt_inadmissible_wavelet(run, tmp_path):
    f = write(tmp_path / "f.json", kozyrev(2).psi)
    bad = write(tmp_path / "bad.json", indicator(2))
    assert run("cwt", f, bad, tmp_path / "s.csv").exit_code == 1


def test_invert_roundtrip(run, tmp_path):
    f = random_zero_mean(np.random.default_rng(0), 3, 2, 1)
    src = write(tmp_path / "f.json", f)
    k = write(tmp_path / "k.json", kozyrev(3).psi)
    assert run("cwt", src, k, tmp_path / "s.csv").exit_code == 0
    assert run("invert", tmp_path / "s.csv", k, tmp_path / "r.json").exit_code == 0
    back = read(tmp_path / "r.json")
    assert (back.p, back.m, back.n) == (f.p, f.m, f.n)
    assert np.max(np.abs(back.values - f.values)) <= 1e-10


def test_invert_wrong_wavelet(run, tmp_path):
    k2 = write(tmp_path / "k2.json", kozyrev(3).psi)
    other = write(tmp_path / "o.json", compatible_triple(3)[1].psi)
    assert run("cwt", k2, k2, tmp_path / "s.csv").exit_code == 0
    assert run("invert", tmp_path / "s.csv", other, tmp_path / "r.json").exit_code == 5


def test_invert_deleted_rows(run, tmp_path):
    f = write(tmp_path / "f.json", random_zero_mean(np.random.default_rng(1), 2, 2, 2))
    k = write(tmp_path / "k.json", kozyrev(2).psi)
    assert run("cwt", f, k, tmp_path / "s.csv").exit_code == 0
    lines = (tmp_path / "s.csv").read_text().splitlines()
    j_drop = lines[1].split(",")[0]
    kept = [lines[0]] + [ln for ln in lines[1:] if ln.split(",")[0] != j_drop]
    (tmp_path / "s.csv").write_text("\n".join(kept) + "\n")
    assert run("invert", tmp_path / "s.csv", k, tmp_path / "r.json").exit_code == 6


def test_invert_nonzero_mean_needs_truncated(run, tmp_path):
    f = write(tmp_path / "f.json", indicator(2))
    k = write(tmp_path / "k.json", kozyrev(2).psi)
    run("cwt", f, k, tmp_path / "s.csv", "--jmin", -2, "--jmax", 0)
    assert run("invert", tmp_path / "s.csv", k, tmp_path / "r.json").exit_code == 6
    assert run("invert", tmp_path / "s.csv", k, tmp_path / "r.json", "--truncated").exit_code == 0


# verify


def test_verify_gate_and_determinism(run):
    a = run("verify", "all", "--p", 2, "--seed", 42, "--trials", 25)
    b = run("verify", "all", "--p", 2, "--seed", 42, "--trials", 25)
    assert a.exit_code == 0
    assert a.stdout == b.stdout
    assert "FAIL" not in a.stdout


def test_verify_suite_option(run):
    r = run("verify", "--suite", "parseval", "--p", 3, "--trials", 5)
    assert r.exit_code == 0
    assert all(line.startswith("[parseval]") for line in r.stdout.splitlines()[:-1])


def test_verify_unknown_suite(run):
    assert run("verify", "nonsense").exit_code == 2


def test_verify_corrupted_wavelet(run):
    r = run("verify", "inversion", "--trials", 5, "--corrupt-wavelet")
    assert r.exit_code == 1
    assert "FAIL" in r.stdout


# convolve


def test_convolve_plain(run, tmp_path):
    a = write(tmp_path / "a.json", indicator(2))
    assert run("convolve", a, a, tmp_path / "c.json").exit_code == 0
    assert np.allclose(read(tmp_path / "c.json").values, [1])


def _triple_files(tmp_path, p):
    return [write(tmp_path / f"w{i}.json", w.psi) for i, w in enumerate(compatible_triple(p))]


def test_convolve_hash_then_cwt_factorizes(run, tmp_path):
    p = 2
    rng = np.random.default_rng(2)
    h, g = random_zero_mean(rng, p, 1, 2), random_zero_mean(rng, p, 2, 1)
    a, b = write(tmp_path / "h.json", h), write(tmp_path / "g.json", g)
    psi, chi, phi = _triple_files(tmp_path, p)
    r = run("convolve", a, b, tmp_path / "hg.json", "--mode", "hash", "--psi", psi, "--chi", chi, "--phi", phi)
    assert r.exit_code == 0
    ws = compatible_triple(p)
    # analyse the output on the sidecar grid, then compare with the cellwise product
    assert run("cwt", tmp_path / "hg.json", phi, tmp_path / "s.csv").exit_code == 0
    S = read_scalogram(tmp_path / "s.csv")
    prod = cwt(h, ws[0], S.grid).combine(cwt(g, ws[1], S.grid), np.multiply)
    assert S.max_abs_diff(prod) <= 1e-9 * max(1.0, prod.max_abs())


def test_convolve_hash_inadmissible(run, tmp_path):
    p = 2
    h = write(tmp_path / "h.json", random_zero_mean(np.random.default_rng(3), p, 1, 1))
    bad = write(tmp_path / "bad.json", indicator(p))
    _, chi, phi = _triple_files(tmp_path, p)
    r = run("convolve", h, h, tmp_path / "o.json", "--mode", "hash", "--psi", bad, "--chi", chi, "--phi", phi)
    assert r.exit_code == 1


def test_convolve_hash_missing_wavelets(run, tmp_path):
    h = write(tmp_path / "h.json", random_zero_mean(np.random.default_rng(4), 2, 1, 1))
    assert run("convolve", h, h, tmp_path / "o.json", "--mode", "hash").exit_code == 2
