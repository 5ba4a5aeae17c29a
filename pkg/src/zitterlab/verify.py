"""Invariant checks behind ``zitterlab verify``."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import core
from .dynamics import SimulationConfig, run_simulation, velocity_consistency
from .oracle import ContinuumParams, WavepacketSpec, oracle_mean_position
from .parity import (
    counterexample_commutation,
    cross_term_position,
    parity_project,
    verify_gate_commutation,
)
from .spectral import TruncationWarning, parity_coeigenstate, truncated_momentum_grid

__all__ = ["CheckResult", "run_checks", "QUICK_CHECKS", "FULL_CHECKS"]

EPS = np.finfo(float).eps
REGIMES = (0.6, 5.4)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _commutators():
    worst = 0.0
    for n in (2, 64, 128):
        h = core.build_hamiltonian(core.PhysicalParams.from_lambda_c(0.6), n)
        comm = core.max_norm(core.commutator(h, core.build_parity(n)))
        worst = max(worst, comm / core.max_norm(h))
    return worst <= 4 * EPS, f"max relative |[H, Pi]| = {worst:.2e}"


def _gate_commutator():
    worst = max(verify_gate_commutation(n) for n in (2, 64, 128))
    return worst <= 4 * EPS, f"max |[H_r, Pi]| = {worst:.2e}"


def _counterexample():
    value = counterexample_commutation(8)
    return value > 0.5, f"|[sigma_x, Pi]| = {value:.2e}"


def _hermiticity():
    params = core.PhysicalParams.from_lambda_c(5.4)
    ops = {
        "H": core.build_hamiltonian(params, 64),
        "x": core.build_position(params, 64),
        "p": core.build_momentum(params, 64),
        "Pi": core.build_parity(64),
    }
    bad = [name for name, op in ops.items() if not op.is_hermitian()]
    pi = ops["Pi"].entries
    involution = core.max_norm(pi @ pi - np.eye(pi.shape[0]))
    ok = not bad and involution == 0.0
    return ok, f"non-Hermitian: {bad or 'none'}; |Pi^2 - I| = {involution:.1e}"


def _trajectories():
    worst_norm = worst_parity = 0.0
    for lc in REGIMES:
        for beta in (0.0, math.pi / 12, math.pi / 4, math.pi / 2):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                s = run_simulation(
                    SimulationConfig(core.PhysicalParams.from_lambda_c(lc), beta=beta, n_cut=64, n_samples=400)
                )
            worst_norm = max(worst_norm, float(s.norm_error.max()))
            worst_parity = max(worst_parity, float(np.abs(s.parity_mean - s.parity_mean[0]).max()))
    return (worst_norm <= 1e-10 and worst_parity <= 1e-10,
            f"max norm error {worst_norm:.1e}, max parity drift {worst_parity:.1e}")


def _staticity():
    worst_x = worst_sx = 0.0
    for lc in REGIMES:
        for beta in (0.0, math.pi / 2):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                s = run_simulation(
                    SimulationConfig(core.PhysicalParams.from_lambda_c(lc), beta=beta, n_cut=64, n_samples=400)
                )
            worst_x = max(worst_x, float(np.abs(s.x_mean - s.x_mean[0]).max()))
            worst_sx = max(worst_sx, float(np.abs(s.sigma_x_mean).max()))
    return worst_x <= 1e-8 and worst_sx <= 1e-9, f"max |dx| {worst_x:.1e}, max |<sigma_x>| {worst_sx:.1e}"


def _cross_term():
    # evolve with a plain eigendecomposition so a faulty parity operator
    # cannot hide behind the parity-resolved solver
    params = core.PhysicalParams.from_lambda_c(0.6)
    n = 64
    h = core.build_hamiltonian(params, n).entries
    w, v = np.linalg.eigh(h)
    psi0 = core.spin_ground_state(math.pi / 4, n).amplitudes
    psi = core.QuantumState(v @ (np.exp(-1.5j * w) * (v.conj().T @ psi0)))
    x_op = core.build_position(params, n)
    decomp = parity_project(psi, core.build_parity(n))
    cross = cross_term_position(decomp, x_op)
    full = psi.expect(x_op).real
    return abs(cross - full) <= 1e-12, f"|2Re<e|x|o> - <x>| = {abs(cross - full):.1e}"


def _coeigenstate_parity():
    params = core.PhysicalParams.from_lambda_c(0.6)
    n = 128
    pi = core.build_parity(n).entries
    worst = 0.0
    for p in (0.5, 1.0, 2.0, 3.0):
        for sign in (1, -1):
            for par in (1, -1):
                psi = parity_coeigenstate(sign, par, p, params, n).amplitudes
                worst = max(worst, float(np.linalg.norm(pi @ psi - par * psi)))
    return worst <= 1e-8, f"max |Pi psi - s psi| = {worst:.1e}"


def _coeigenstate_energy_exact_grid():
    params = core.PhysicalParams.from_lambda_c(0.6)
    n = 128
    h = core.build_hamiltonian(params, n).entries
    nodes = truncated_momentum_grid(n)
    nodes = nodes[(nodes > 0) & (nodes <= 3.0)]
    worst = 0.0
    for p in nodes:
        e = math.hypot(params.omega, params.eta_omega_tilde * p)
        for sign in (1, -1):
            for par in (1, -1):
                psi = parity_coeigenstate(sign, par, p, params, n).amplitudes
                worst = max(worst, float(np.linalg.norm(h @ psi - sign * e * psi)) / e)
    return worst <= 1e-6, f"max |H psi - E psi|/|E| on He_n roots = {worst:.1e}"


def _velocity_order():
    params = core.PhysicalParams.from_lambda_c(0.6)
    res = []
    for n_samples in (2001, 4001):
        s = run_simulation(SimulationConfig(params, beta=math.pi / 4, n_cut=128, n_samples=n_samples))
        res.append(velocity_consistency(s, params))
    ratio = res[0] / res[1]
    return 3.5 <= ratio <= 4.5, f"residual {res[0]:.2e} -> {res[1]:.2e} under dt halving (ratio {ratio:.2f})"


def _oracle(lambda_c: float, tol: float):
    def check():
        params = core.PhysicalParams.from_lambda_c(lambda_c)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            s = run_simulation(SimulationConfig(params, beta=math.pi / 4, n_cut=256))
        ref = oracle_mean_position(WavepacketSpec(math.pi / 4, params.delta), ContinuumParams.from_ion(params), s.times)
        dev = float(np.abs(ref - s.x_mean).max())
        return dev <= tol, f"max |<x>_fock - <x>_oracle| = {dev:.2e} (tolerance {tol:.0e})"

    return check


QUICK_CHECKS: list[tuple[str, Callable]] = [
    ("hamiltonian_parity_commutator", _commutators),
    ("gate_parity_commutator", _gate_commutator),
    ("counterexample_control", _counterexample),
    ("hermiticity_and_involution", _hermiticity),
    ("unitarity_and_parity_conservation", _trajectories),
    ("definite_parity_staticity", _staticity),
    ("cross_term_identity", _cross_term),
    ("coeigenstate_parity", _coeigenstate_parity),
    ("coeigenstate_energy_on_exact_grid", _coeigenstate_energy_exact_grid),
    ("velocity_second_order", _velocity_order),
]
FULL_CHECKS = QUICK_CHECKS + [
    ("oracle_agreement_lambda_0.6", _oracle(0.6, 1e-4)),
    ("oracle_agreement_lambda_5.4", _oracle(5.4, 1e-3)),
]


def run_checks(level: str = "quick") -> list[CheckResult]:
    checks = FULL_CHECKS if level == "full" else QUICK_CHECKS
    results = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, never abort the table
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail))
    return results
