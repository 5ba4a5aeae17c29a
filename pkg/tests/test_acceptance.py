"""End-to-end acceptance gate.

Each test checks one criterion at its stated tolerance, records a
``CRITERION n: PASS|FAIL`` line (echoed in the terminal summary) and then
asserts.  Run ``pytest tests/test_acceptance.py -v -s`` to see the lines
inline.
"""

import math
import warnings

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from zitterlab.cli import main
from zitterlab.core import (
    PhysicalParams,
    build_hamiltonian,
    build_parity,
    build_sigma_x,
    commutator,
    build_gate_hamiltonian,
    ladder_motional,
    max_norm,
)
from zitterlab.dynamics import CoeigenstateSpec, SimulationConfig, run_simulation, velocity_consistency
from zitterlab.oracle import ContinuumParams, WavepacketSpec, oracle_mean_position
from zitterlab.parity import zb_metrics
from zitterlab.spectral import TruncationWarning, default_p_grid, momentum_eigenstate, parity_coeigenstate

EPS = np.finfo(float).eps
LAMBDAS = (0.6, 5.4)
FIG_BETAS = (0.0, math.pi / 12, math.pi / 6, math.pi / 4)


def record(number: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def simulate(lambda_c, beta, n_cut=128, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return run_simulation(SimulationConfig(PhysicalParams.from_lambda_c(lambda_c), beta=beta, n_cut=n_cut, **kw))


def test_criterion_01_parity_conservation():
    worst = 0.0
    for lc in LAMBDAS:
        for beta in (0.0, math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 2):
            s = simulate(lc, beta)
            worst = max(worst, float(np.abs(s.parity_mean - s.parity_mean[0]).max()))
    record(1, worst <= 1e-10, f"max |<Pi>(t) - <Pi>(0)| = {worst:.2e} (<= 1e-10)")


def test_criterion_02_definite_parity_is_static():
    worst_x = worst_sx = 0.0
    runs = 0
    for lc in LAMBDAS:
        for beta in (0.0, math.pi / 2):
            s = simulate(lc, beta)
            worst_x = max(worst_x, float(np.abs(s.x_mean - s.x_mean[0]).max()))
            worst_sx = max(worst_sx, float(np.abs(s.sigma_x_mean).max()))
            runs += 1
    params = PhysicalParams.from_lambda_c(0.6)
    for p in (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0):
        for sign, parity in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            spec = CoeigenstateSpec(sign, parity, p)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                s = run_simulation(SimulationConfig(params, beta=0.0, n_cut=128, initial_state=spec))
            worst_x = max(worst_x, float(np.abs(s.x_mean - s.x_mean[0]).max()))
            worst_sx = max(worst_sx, float(np.abs(s.sigma_x_mean).max()))
            runs += 1
    ok = worst_x <= 1e-8 and worst_sx <= 1e-9
    record(2, ok, f"{runs} runs: max |dx| = {worst_x:.2e} (<= 1e-8), max |<sigma_x>| = {worst_sx:.2e} (<= 1e-9)")


def test_criterion_03_peak_to_peak_ordering():
    parts, ok = [], True
    for lc in LAMBDAS:
        ptp = [zb_metrics(simulate(lc, beta)).peak_to_peak for beta in FIG_BETAS]
        ok &= ptp[0] < 1e-8 and all(a < b for a, b in zip(ptp, ptp[1:]))
        parts.append(f"lambda_c={lc}: " + ", ".join(f"{v:.3g}" for v in ptp))
    record(3, ok, "peak-to-peak over beta 0, pi/12, pi/6, pi/4; " + "; ".join(parts))


def test_criterion_04_zb_frequency():
    m = zb_metrics(simulate(0.6, math.pi / 4))
    ok = 2.0 <= m.dominant_frequency <= 2.7 and m.frequency_power_fraction >= 0.5
    record(4, ok, f"dominant frequency {m.dominant_frequency:.4f} (in [2.0, 2.7]), "
                  f"power fraction {m.frequency_power_fraction:.3f} (>= 0.5)")


@pytest.mark.slow
def test_criterion_05_oracle_equivalence():
    devs, ok = [], True
    for lc, tol in ((0.6, 1e-4), (5.4, 1e-3)):
        params = PhysicalParams.from_lambda_c(lc)
        s = simulate(lc, math.pi / 4, n_cut=256)
        ref = oracle_mean_position(WavepacketSpec(math.pi / 4, params.delta), ContinuumParams.from_ion(params), s.times)
        dev = float(np.abs(ref - s.x_mean).max())
        ok &= dev <= tol
        devs.append(f"lambda_c={lc}: {dev:.2e} (<= {tol:.0e})")
    record(5, ok, "max |<x>_fock - <x>_oracle| over t in [0, 20]; " + "; ".join(devs))


def test_criterion_06_eigenstate_fidelity():
    params = PhysicalParams.from_lambda_c(0.6)
    n = 128
    h = build_hamiltonian(params, n).entries
    pi = build_parity(n).entries
    worst_e = worst_p = 0.0
    for p in default_p_grid():
        if p == 0.0:
            continue  # the odd combination vanishes identically at p = 0
        e = math.hypot(params.omega, params.eta_omega_tilde * p)
        for sign in (1, -1):
            for parity in (1, -1):
                psi = parity_coeigenstate(sign, parity, p, params, n).amplitudes
                worst_e = max(worst_e, float(np.linalg.norm(h @ psi - sign * e * psi)) / e)
                worst_p = max(worst_p, float(np.linalg.norm(pi @ psi - parity * psi)))
    ok = worst_e <= 1e-6 and worst_p <= 1e-8
    record(6, ok, f"|p| <= 3: max |H psi - E psi|/|E| = {worst_e:.2e} (<= 1e-6), "
                  f"max |Pi psi -/+ psi| = {worst_p:.2e} (<= 1e-8)")


def test_criterion_07_momentum_eigenstate_defect():
    residuals = []
    for n in (32, 64, 128, 256):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            psi = momentum_eigenstate(1.0, n).amplitudes
        psi = psi / np.linalg.norm(psi)
        a, ad = ladder_motional(n)
        op = ad - a
        residuals.append(float(np.linalg.norm(op @ psi + 1j * 1.0 * psi)))
    at_128 = residuals[2]
    monotone = all(b < a for a, b in zip(residuals, residuals[1:]))
    ok = at_128 <= 1e-8 and monotone
    record(7, ok, "p=1 defect over N_cut 32, 64, 128, 256: " + ", ".join(f"{r:.2e}" for r in residuals)
           + f" (N_cut=128 <= 1e-8, monotone: {monotone})")


def test_criterion_08_ehrenfest_consistency():
    params = PhysicalParams.from_lambda_c(0.6)
    coarse = velocity_consistency(simulate(0.6, math.pi / 4, n_samples=2001), params)
    fine = velocity_consistency(simulate(0.6, math.pi / 4, n_samples=4001), params)
    ratio = coarse / fine
    ok = coarse <= 1e-6 and 3.5 <= ratio <= 4.5
    record(8, ok, f"residual {coarse:.2e} at dt=0.01 (<= 1e-6), {fine:.2e} at dt=0.005, ratio {ratio:.2f} (~4)")


def test_criterion_09_structural_commutators():
    worst_h = worst_r = 0.0
    for n in (2, 64, 128):
        h = build_hamiltonian(PhysicalParams.from_lambda_c(0.6), n)
        worst_h = max(worst_h, max_norm(commutator(h, build_parity(n))) / max_norm(h))
        worst_r = max(worst_r, max_norm(commutator(build_gate_hamiltonian(n), build_parity(n))))
    control = max_norm(commutator(build_sigma_x(8), build_parity(8)))
    ok = worst_h <= EPS and worst_r <= EPS and control > 0.0
    record(9, ok, f"|[H, Pi]| = {worst_h:.1e}, |[H_r, Pi]| = {worst_r:.1e}, control |[sigma_x, Pi]| = {control:.1f}")


def test_criterion_10_determinism(tmp_path):
    cfg = tmp_path / "det.cfg"
    cfg.write_text("omega = 1\nlambda_c = 0.6\nbeta = pi/4\n")
    assert main(["simulate", str(cfg), "--out-dir", str(tmp_path / "a")]) == 0
    assert main(["simulate", str(cfg), "--out-dir", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "det_timeseries.csv").read_bytes()
    b = (tmp_path / "b" / "det_timeseries.csv").read_bytes()
    record(10, a == b, f"two simulate runs, {len(a)} bytes each, identical: {a == b}")
