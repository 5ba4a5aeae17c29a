"""Parity-sector decomposition and Zitterbewegung metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    OperatorMatrix,
    QuantumState,
    build_gate_hamiltonian,
    build_parity,
    build_sigma_x,
    commutator,
    max_norm,
)
from .dynamics import TimeSeries

__all__ = [
    "SymmetryViolationError",
    "ParityDecomposition",
    "ZbMetrics",
    "parity_projectors",
    "parity_project",
    "cross_term_position",
    "zb_metrics",
    "verify_gate_commutation",
    "counterexample_commutation",
]

SYMMETRY_TOL = 1e-10
MIN_METRIC_SAMPLES = 64
# series flatter than this (relative) are roundoff, not motion
FLAT_TOL = 1e-12


class SymmetryViolationError(ArithmeticError):
    """Position has a nonzero diagonal parity block; the operators are inconsistent."""


@dataclass
class ParityDecomposition:
    even_component: QuantumState
    odd_component: QuantumState
    even_weight: float
    odd_weight: float

    def reconstruct(self) -> QuantumState:
        return QuantumState(self.even_component.amplitudes + self.odd_component.amplitudes)


@dataclass(frozen=True)
class ZbMetrics:
    peak_to_peak: float
    dominant_frequency: float
    frequency_power_fraction: float


def parity_projectors(Pi: OperatorMatrix) -> tuple[np.ndarray, np.ndarray]:
    eye = np.eye(Pi.dim)
    return (eye + Pi.entries) / 2.0, (eye - Pi.entries) / 2.0


def parity_project(state: QuantumState, Pi: OperatorMatrix) -> ParityDecomposition:
    """Split ``state`` with ``(I +/- Pi) / 2``; the components are not renormalized."""
    if state.dim != Pi.dim:
        raise ValueError(f"dimension mismatch: state {state.dim}, parity {Pi.dim}")
    p_even, p_odd = parity_projectors(Pi)
    even = p_even @ state.amplitudes
    odd = p_odd @ state.amplitudes
    return ParityDecomposition(
        QuantumState(even),
        QuantumState(odd),
        float(np.vdot(even, even).real),
        float(np.vdot(odd, odd).real),
    )


def cross_term_position(decomp: ParityDecomposition, x_op: OperatorMatrix) -> float:
    """``2 Re <even|x|odd>``, which is the whole of ``<x>`` when x is parity-odd.

    Raises
    ------
    SymmetryViolationError
        If ``<even|x|even>`` or ``<odd|x|odd>`` exceeds 1e-10.
    """
    e = decomp.even_component.amplitudes
    o = decomp.odd_component.amplitudes
    x = x_op.entries
    diag_even = abs(np.vdot(e, x @ e))
    diag_odd = abs(np.vdot(o, x @ o))
    residue = max(diag_even, diag_odd)
    if residue > SYMMETRY_TOL:
        raise SymmetryViolationError(
            f"diagonal parity blocks of x are nonzero (even {diag_even:.3e}, odd {diag_odd:.3e})"
        )
    return float(2.0 * np.vdot(e, x @ o).real)


def zb_metrics(series: TimeSeries, min_samples: int = MIN_METRIC_SAMPLES, detrend: str = "mean") -> ZbMetrics:
    """Peak-to-peak amplitude and dominant angular frequency of ``<x(t)>``.

    The spectrum is the rectangular-window DFT of the series with its mean
    removed (``detrend="mean"``) or its least-squares line removed
    (``detrend="linear"``).  A series flat to roundoff reports zero frequency
    and zero power fraction.
    """
    x = np.asarray(series.x_mean, dtype=float)
    t = np.asarray(series.times, dtype=float)
    if x.size < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {x.size}")
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("zb_metrics requires a uniform time grid")

    if detrend == "mean":
        resid = x - x.mean()
    elif detrend == "linear":
        resid = x - np.polyval(np.polyfit(t, x, 1), t)
    else:
        raise ValueError(f"detrend must be 'mean' or 'linear', got {detrend!r}")

    ptp = float(x.max() - x.min())
    power = np.abs(np.fft.rfft(resid)) ** 2
    ac = power[1:]
    total = float(ac.sum())
    if total == 0.0 or ptp <= FLAT_TOL * max(1.0, float(np.max(np.abs(x)))):
        return ZbMetrics(ptp, 0.0, 0.0)
    k = int(np.argmax(ac)) + 1
    omega = 2.0 * np.pi * np.fft.rfftfreq(x.size, d=steps[0])[k]
    return ZbMetrics(ptp, float(omega), float(ac[k - 1] / total))


def verify_gate_commutation(n_cut: int) -> float:
    """``max|[H_r, Pi]|`` for the gate Hamiltonian sigma_+ a + sigma_- a^dag."""
    if n_cut < 2:
        raise ValueError(f"n_cut must be >= 2, got {n_cut}")
    return max_norm(commutator(build_gate_hamiltonian(n_cut), build_parity(n_cut)))


def counterexample_commutation(n_cut: int) -> float:
    """``max|[sigma_x (x) I, Pi]|``; nonzero, confirming the commutator check discriminates."""
    return max_norm(commutator(build_sigma_x(n_cut), build_parity(n_cut)))
