"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -v`` or as a script,
``python tests/test_acceptance.py``.
"""
import math
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from spatial_arma import (LatticeWindow, ModelSpec, TorusGrid, arma_residual,
                          bidisc_zero_free_bilinear, causal_alpha, check_first_order_2d,
                          counting_function, decay_fit, delannoy_closed_a, delannoy_closed_b,
                          delannoy_table, first_order_model, fourier_psi,
                          jacobi_delannoy_identity, klesov_field, l2_spectral_sequence,
                          linear_field, nonunique_perturbation, residual_tail_bound,
                          sample_noise, zero_free_closed_polydisc)
from spatial_arma.noise import catalog, gaussian
from spatial_arma.polycore import arma_polys, eval_poly
from spatial_arma.simulator import klesov_path_sums, klesov_square_sums

try:
    from conftest import model_json, report_line
except ImportError:                                   # pragma: no cover
    sys.path.insert(0, str(Path(__file__).parent))
    from conftest import model_json, report_line


def _report(n: int, ok: bool, detail: str):
    report_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def _half_arma():
    """Phi = 1 - z1/2 - z2/2 with Theta = (1 - z1)(1 - z2)."""
    return ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5},
                     {(1, 0): -1.0, (0, 1): -1.0, (1, 1): 1.0})


# ---------------------------------------------------------------------------

def test_c01_delannoy_three_way():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for p in rng.uniform(-1, 1, (50, 3)):
        rec = delannoy_table(p, 30, 30)
        for n in range(31):
            for k in range(31):
                a = delannoy_closed_a(p, n, k)
                b = delannoy_closed_b(p, n, k)
                scale = max(abs(rec[n, k]), 1e-300)
                worst = max(worst, abs(a - rec[n, k]) / scale, abs(b - rec[n, k]) / scale)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 5
    _report(1, ok, f"max relative difference {worst:.2e}, {dt:.2f} s")
    assert ok


def test_c02_jacobi_identity():
    # weights drawn from the stationary region sum |phi| < 1, where the
    # table entries stay bounded (see the notes on this tolerance)
    rng = np.random.default_rng(202)
    triples = []
    while len(triples) < 20:
        p = rng.uniform(-1, 1, 3)
        if abs(p[2]) >= 0.05 and np.abs(p).sum() < 1:
            triples.append(p)
    t0 = time.perf_counter()
    worst = max(jacobi_delannoy_identity(p, beta, k)[2]
                for p in triples for beta in range(11) for k in range(41))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 5
    _report(2, ok, f"max |lhs - rhs| {worst:.2e}, {dt:.2f} s")
    assert ok


def _random_zero_free_causal(rng):
    lags = [(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)]
    pick = rng.choice(len(lags), size=rng.integers(1, 4), replace=False)
    w = rng.uniform(-1, 1, pick.size)
    w *= rng.uniform(0.3, 0.9) / np.abs(w).sum()
    phi = {lags[i]: float(v) for i, v in zip(pick, w)}
    theta = {}
    if rng.random() < 0.5:
        theta = {lags[int(rng.integers(len(lags)))]: float(rng.uniform(-1, 1))}
    return ModelSpec(2, phi, theta)


def test_c03_fourier_vs_causal():
    rng = np.random.default_rng(303)
    grid = TorusGrid.uniform(2, 256)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        model = _random_zero_free_causal(rng)
        assert zero_free_closed_polydisc(arma_polys(model)[0]).zero_free
        psi = fourier_psi(model, grid, 16).restrict((0, 0), (16, 16))
        alpha = causal_alpha(model, 16)
        worst = max(worst, float(np.max(np.abs(psi.values - alpha.values))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 30
    _report(3, ok, f"max |fourier - recursion| {worst:.2e}, {dt:.2f} s")
    assert ok


@pytest.mark.slow
def test_c04_l2_separation():
    t0 = time.perf_counter()
    five = ModelSpec(5, {tuple(int(i == j) for i in range(5)): 0.2 for j in range(5)})
    fin = l2_spectral_sequence(five, levels=2, base=16)
    two = ModelSpec(2, {(1, 0): 0.5, (0, 1): 0.5})
    div = l2_spectral_sequence(two, levels=4, base=32)
    dt = time.perf_counter() - t0
    ok = fin.verdict == "Finite" and div.verdict == "Divergent" and dt < 60
    _report(4, ok, f"d=5 {fin.verdict} {[round(v, 6) for v in fin.estimates]}, "
                   f"d=2 {div.verdict} {[round(v, 4) for v in div.estimates]}, {dt:.1f} s")
    assert ok


def test_c05_bounded_quotient():
    seq = l2_spectral_sequence(_half_arma(), levels=4, base=32)
    top = max(seq.estimates)
    ok = top <= 4 + 1e-6
    _report(5, ok, f"estimates {[round(v, 6) for v in seq.estimates]}, max {top:.6f} <= 4")
    assert ok


def test_c06_first_order_totality():
    rng = np.random.default_rng(606)
    noises = list(catalog().values())
    draws = np.vstack([rng.uniform(-1, 1, (1000, 3)),
                       # a second batch inside the triangle-inequality region
                       rng.dirichlet(np.ones(4), 1000)[:, :3] * rng.choice([-1, 1], (1000, 3))])
    t0 = time.perf_counter()
    total = swap_ok = tri_ok = True
    tri_cases = 0
    for p in draws[:1000]:
        for nz in noises:
            if check_first_order_2d(*p, nz).verdict not in ("Exists", "NotExists"):
                total = False
    for p in draws:
        a = bidisc_zero_free_bilinear(*p)
        b = bidisc_zero_free_bilinear(p[1], p[0], p[2])
        if a.kind != b.kind or abs(a.min_modulus - b.min_modulus) > 1e-9:
            swap_ok = False
        if np.abs(p).sum() < 1:
            tri_cases += 1
            if not a.zero_free or a.min_modulus < 1 - np.abs(p).sum() - 1e-12:
                tri_ok = False
    dt = time.perf_counter() - t0
    ok = total and swap_ok and tri_ok and dt < 10
    _report(6, ok, f"total={total} swap={swap_ok} triangle={tri_ok} "
                   f"({tri_cases} draws in the region), {dt:.2f} s")
    assert ok


def test_c07_residual_decay():
    t0 = time.perf_counter()
    model = first_order_model(0.2, 0.2, 0.1)
    coeffs = causal_alpha(model, 40)
    coeffs.decay = decay_fit(coeffs)
    noise = gaussian()
    win = LatticeWindow.box((64, 64))
    Z = sample_noise(noise, win, 7)
    zsup = float(np.abs(sample_noise(noise, LatticeWindow((-40, -40), win.upper), 7)
                        .values).max())
    res, bounds = [], []
    for N in (10, 20, 40):
        Y = linear_field(coeffs, noise, win, N, 7)
        res.append(arma_residual(model, Y, Z).max_abs)
        bounds.append(residual_tail_bound(model, coeffs, N, zsup).value)
    dt = time.perf_counter() - t0
    ratios = [res[0] / res[1], res[1] / res[2]]
    ok = all(r >= 10 for r in ratios) and all(r <= b for r, b in zip(res, bounds)) and dt < 20
    _report(7, ok, "residuals " + ", ".join(f"{r:.2e}" for r in res) + "; bounds "
                   + ", ".join(f"{b:.2e}" for b in bounds) + f"; {dt:.2f} s")
    assert ok


def test_c08_nonuniqueness():
    model = _half_arma()
    coeffs = causal_alpha(model, 30)
    noise = gaussian()
    win = LatticeWindow.box((32, 32))
    Y = linear_field(coeffs, noise, win, 30, 3)
    Z = sample_noise(noise, win, 3)
    base = arma_residual(model, Y, Z).values
    d0 = np.abs(arma_residual(model, nonunique_perturbation(Y, (0, 0), 0.25), Z).values - base)
    a = 2 * math.asin(0.15)
    phi, _ = arma_polys(model)
    target = abs(eval_poly(phi, np.exp(-1j * np.array([a, a]))))
    d1 = np.abs(arma_residual(model, nonunique_perturbation(Y, (a, a), 0.6), Z).values - base)
    ok = (d0.max() <= 1e-10 and abs(target - 0.3) < 1e-15
          and np.all(np.abs(d1 - 0.3) <= 1e-9))
    _report(8, ok, f"lambda=0 delta {d0.max():.1e}; |Phi|=0.3 delta in "
                   f"[{d1.min():.12f}, {d1.max():.12f}]")
    assert ok


def test_c09_counting_function():
    t0 = time.perf_counter()
    mins = {}
    for p in [(0, 0.5, 0.25), (0.5, 0.3, 0.1), (0.5, 0.5, -0.5)]:
        mins[p] = min(counting_function(p, 10.0**e) / math.log(10.0**e) ** 2
                      for e in range(1, 7))
    dt = time.perf_counter() - t0
    ok = all(v >= 0.05 for v in mins.values()) and dt < 30
    _report(9, ok, "min f(x)/log^2 x " + ", ".join(f"{p}: {v:.3f}" for p, v in mins.items())
            + f"; {dt:.2f} s")
    assert ok


def test_c10_rectangular_counterexample():
    sq = klesov_square_sums(200)
    squares_zero = bool(np.all(sq[1:] == 0))
    X = klesov_field(5, 5)
    exact_ints = X.dtype.kind == "i"
    steps = {}
    for M in (10, 10**3, 10**6):
        # row-biased path: N = (k, 1) for k = 1, 2, ...; the sum is -k(k+1)/2
        k = int(math.ceil(math.sqrt(2 * M))) + 1
        path = [(i, 1) for i in range(1, k + 1)]
        sums = klesov_path_sums(path)
        hit = np.nonzero(np.abs(sums) > M)[0]
        steps[M] = int(hit[0]) + 1 if hit.size else None
    ok = squares_zero and exact_ints and all(v is not None for v in steps.values())
    _report(10, ok, f"square sums zero for 2<=n<=200: {squares_zero}; "
                    f"steps to exceed M: {steps}")
    assert ok


# ---------------------------------------------------------------------------

def _cli_runs(tmp: Path, threads: str) -> dict[str, bytes]:
    models = {
        "fo": model_json(2, [(1, 0), (0, 1), (1, 1)], [0.2, 0.2, 0.1]),
        "arma": model_json(2, [(1, 0), (0, 1)], [0.5, 0.5], [(1, 0), (0, 1), (1, 1)],
                           [-1, -1, 1]),
    }
    for name, text in models.items():
        (tmp / f"{name}.json").write_text(text)
    fo, arma = str(tmp / "fo.json"), str(tmp / "arma.json")
    cmds = {
        "check": ["check", "--model", fo, "--noise", "gaussian"],
        "check-linear": ["check", "--model", fo, "--mode", "linear"],
        "coeffs": ["coeffs", "--model", fo, "--method", "recursion", "--box", "12"],
        "coeffs-fft": ["coeffs", "--model", fo, "--method", "fft", "--box", "6"],
        "simulate": ["simulate", "--model", fo, "--size", "48", "--truncation", "20",
                     "--seed", "5", "--out-dir", str(tmp / "sim")],
        "simulate-perturb": ["simulate", "--model", arma, "--size", "24", "--truncation",
                             "12", "--perturb", "0,0", "--perturb-u", "0.25",
                             "--out-dir", str(tmp / "simp")],
        "delannoy": ["delannoy", "--phi", "0.5,0.3,0.1", "--n", "8", "--k", "8"],
        "delannoy-identity": ["delannoy", "--phi", "0.5,0.3,0.1", "--identity", "--k", "6"],
        "spectrum": ["spectrum", "--model", fo, "--levels", "2", "--base", "16"],
    }
    env = dict(os.environ, SPATIAL_ARMA_THREADS=threads)
    out = {}
    for name, args in cmds.items():
        r = subprocess.run([sys.executable, "-m", "spatial_arma", *args], env=env,
                           capture_output=True, timeout=300)
        out[name] = bytes([r.returncode]) + r.stdout + b"\0" + r.stderr
    for sub in ("sim", "simp"):
        for f in sorted((tmp / sub).iterdir()):
            out[f"{sub}/{f.name}"] = f.read_bytes()
    return out


@pytest.mark.slow
def test_c11_cli_determinism(tmp_path):
    runs = []
    for threads in ("1", "1", "4", "4"):
        d = tmp_path / f"run{len(runs)}"
        d.mkdir()
        runs.append(_cli_runs(d, threads))
    # paths differ between runs only through the temporary directory name
    norm = [{k: v.replace(str(tmp_path / f"run{i}").encode(), b"@") for k, v in r.items()}
            for i, r in enumerate(runs)]
    bad = sorted({k for r in norm[1:] for k in r if r[k] != norm[0].get(k)})
    ok = not bad and set(norm[0]) == set(norm[-1])
    _report(11, ok, f"{len(norm[0])} outputs identical across 2 runs x threads {{1, 4}}"
            if ok else f"differing outputs: {bad}")
    assert ok


if __name__ == "__main__":                                 # pragma: no cover
    sys.exit(pytest.main([__file__, "-q", "-s"]))
