"""Exact spectral time evolution and observable sampling."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .core import (
    PhysicalParams,
    QuantumState,
    build_hamiltonian,
    build_momentum,
    build_parity,
    build_position,
    build_sigma_x,
    max_norm,
    spin_ground_state,
)
from .spectral import SpectrumResult, TruncationWarning, diagonalize, parity_coeigenstate

__all__ = [
    "ConvergenceError",
    "ConvergenceSettings",
    "CoeigenstateSpec",
    "SimulationConfig",
    "TimeSeries",
    "evolve",
    "propagate",
    "sample_observables",
    "run_simulation",
    "velocity_consistency",
    "default_convergence_tolerance",
]

# columns propagated at once; bounds memory at large cutoffs
_CHUNK = 512


class ConvergenceError(RuntimeError):
    """Doubled-cutoff rerun moved <x(t)> by more than the tolerance."""

    def __init__(self, message: str, times: np.ndarray, deviation: np.ndarray):
        super().__init__(message)
        self.times = times
        self.deviation = deviation

    @property
    def max_deviation(self) -> float:
        return float(np.max(self.deviation))


def default_convergence_tolerance(params: PhysicalParams) -> float:
    # relativistic packets spread over many more Fock levels
    return 1e-8 if params.lambda_c <= 1.0 else 1e-6


@dataclass(frozen=True)
class ConvergenceSettings:
    enabled: bool = False
    n_cut_factor: int = 2
    tolerance: Optional[float] = None


@dataclass(frozen=True)
class CoeigenstateSpec:
    energy_sign: int
    parity: int
    p: float


InitialState = Union[None, np.ndarray, QuantumState, CoeigenstateSpec]


@dataclass
class SimulationConfig:
    """Everything needed to reproduce one trajectory.

    ``initial_state=None`` selects ``(cos beta |+> + sin beta |->)|0>``.  An
    explicit amplitude vector must match ``n_cut`` and is zero-padded per
    spin block when the convergence rerun raises the cutoff.
    """

    params: PhysicalParams = field(default_factory=PhysicalParams)
    beta: float = 0.0
    n_cut: int = 128
    t_max: float = 20.0
    n_samples: int = 2000
    initial_state: InitialState = None
    convergence: ConvergenceSettings = field(default_factory=ConvergenceSettings)
    tail_tol: float = 1e-10

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError(f"t_max must be positive, got {self.t_max}")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise ValueError(f"n_samples must be an integer >= 2, got {self.n_samples}")
        if int(self.n_cut) != self.n_cut or self.n_cut < 1:
            raise ValueError(f"n_cut must be an integer >= 1, got {self.n_cut}")
        if self.convergence.n_cut_factor < 2:
            raise ValueError("convergence n_cut_factor must be >= 2")

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, int(self.n_samples))

    def initial(self, n_cut: Optional[int] = None) -> QuantumState:
        n_cut = self.n_cut if n_cut is None else n_cut
        init = self.initial_state
        if init is None:
            return spin_ground_state(self.beta, n_cut)
        if isinstance(init, CoeigenstateSpec):
            return parity_coeigenstate(init.energy_sign, init.parity, init.p, self.params, n_cut)
        amps = init.amplitudes if isinstance(init, QuantumState) else np.asarray(init, dtype=complex)
        if amps.ndim != 1 or amps.size != 2 * self.n_cut:
            raise ValueError(f"explicit initial state must have length {2 * self.n_cut}, got {amps.shape}")
        if n_cut < self.n_cut:
            raise ValueError("cannot shrink an explicit initial state")
        out = np.zeros(2 * n_cut, dtype=complex)
        out[: self.n_cut] = amps[: self.n_cut]
        out[n_cut:n_cut + self.n_cut] = amps[self.n_cut:]
        return QuantumState(out)


@dataclass
class TimeSeries:
    times: np.ndarray
    x_mean: np.ndarray
    sigma_x_mean: np.ndarray
    p_mean: np.ndarray
    parity_mean: np.ndarray
    norm_error: np.ndarray
    metadata: dict = field(default_factory=dict)

    COLUMNS = ("t", "x_mean", "sigma_x_mean", "p_mean", "parity_mean", "norm_error")

    def columns(self) -> tuple[np.ndarray, ...]:
        return (self.times, self.x_mean, self.sigma_x_mean, self.p_mean, self.parity_mean, self.norm_error)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def _coefficients(state: QuantumState, spectrum: SpectrumResult) -> np.ndarray:
    if state.dim != spectrum.dim:
        raise ValueError(f"dimension mismatch: state {state.dim}, spectrum {spectrum.dim}")
    return spectrum.eigenvectors.conj().T @ state.amplitudes


def evolve(state: QuantumState, spectrum: SpectrumResult, t: float) -> QuantumState:
    """psi(t) = sum_k <v_k|psi> exp(-i lambda_k t) v_k."""
    if t == 0:
        if state.dim != spectrum.dim:
            raise ValueError(f"dimension mismatch: state {state.dim}, spectrum {spectrum.dim}")
        return QuantumState(state.amplitudes.copy())
    c = _coefficients(state, spectrum)
    return QuantumState(spectrum.eigenvectors @ (c * np.exp(-1j * spectrum.eigenvalues * t)))


def propagate(state: QuantumState, spectrum: SpectrumResult, times: np.ndarray):
    """Yield ``(slice, states)`` blocks with one evolved state per column."""
    c = _coefficients(state, spectrum)
    times = np.asarray(times, dtype=float)
    for start in range(0, times.size, _CHUNK):
        sl = slice(start, min(start + _CHUNK, times.size))
        phases = np.exp(-1j * np.outer(spectrum.eigenvalues, times[sl]))
        yield sl, spectrum.eigenvectors @ (c[:, None] * phases)


def _expect_columns(op: np.ndarray, states: np.ndarray, label: str) -> np.ndarray:
    vals = np.einsum("ij,ij->j", states.conj(), op @ states)
    tol = 1e-12 * max(1.0, max_norm(op))
    residue = np.max(np.abs(vals.imag)) if vals.size else 0.0
    if residue > tol:
        raise ArithmeticError(f"<{label}> has imaginary residue {residue:.3e} (> {tol:.1e})")
    return vals.real


def sample_observables(state: QuantumState, spectrum: SpectrumResult, params: PhysicalParams, times) -> TimeSeries:
    """Evolve ``state`` with a precomputed spectrum and record the observables."""
    n_cut = state.n_cut
    x_op = build_position(params, n_cut).entries
    p_op = build_momentum(params, n_cut).entries
    sx_op = build_sigma_x(n_cut).entries
    parity = build_parity(n_cut).entries.diagonal().real

    times = np.asarray(times, dtype=float)
    out = {name: np.empty(times.size) for name in ("x", "sx", "p", "pi", "norm")}
    tail = 0.0
    top = np.r_[max(n_cut - 4, 0):n_cut, n_cut + max(n_cut - 4, 0):2 * n_cut]
    for sl, states in propagate(state, spectrum, times):
        probs = np.abs(states) ** 2
        out["norm"][sl] = np.abs(np.sqrt(probs.sum(axis=0)) - 1.0)
        out["pi"][sl] = parity @ probs
        out["x"][sl] = _expect_columns(x_op, states, "x")
        out["p"][sl] = _expect_columns(p_op, states, "p")
        out["sx"][sl] = _expect_columns(sx_op, states, "sigma_x")
        tail = max(tail, float(probs[top].sum(axis=0).max()))
    return TimeSeries(
        times=times,
        x_mean=out["x"],
        sigma_x_mean=out["sx"],
        p_mean=out["p"],
        parity_mean=out["pi"],
        norm_error=out["norm"],
        metadata={"n_cut": n_cut, "max_tail_mass": tail},
    )


def _trajectory(cfg: SimulationConfig, n_cut: int) -> TimeSeries:
    state = cfg.initial(n_cut)
    if not state.is_normalized():
        raise ValueError(f"initial state is not normalized (norm^2 = {state.norm() ** 2:.15f})")
    spectrum = diagonalize(build_hamiltonian(cfg.params, n_cut), build_parity(n_cut))
    return sample_observables(state, spectrum, cfg.params, cfg.times())


def run_simulation(cfg: SimulationConfig) -> TimeSeries:
    """Sample all observables on the uniform grid ``[0, t_max]``.

    With convergence enabled the run is repeated at ``n_cut_factor * n_cut``
    and :class:`ConvergenceError` is raised if ``<x(t)>`` moves by more than
    the tolerance anywhere on the grid.
    """
    series = _trajectory(cfg, cfg.n_cut)
    series.metadata["convergence_deviation"] = None
    conv = cfg.convergence
    if conv.enabled:
        tol = conv.tolerance if conv.tolerance is not None else default_convergence_tolerance(cfg.params)
        fine = _trajectory(cfg, conv.n_cut_factor * cfg.n_cut)
        deviation = np.abs(series.x_mean - fine.x_mean)
        worst = float(deviation.max())
        series.metadata["convergence_deviation"] = worst
        series.metadata["convergence_tolerance"] = tol
        if worst > tol:
            raise ConvergenceError(
                f"<x> changed by {worst:.3e} (tolerance {tol:.1e}) when n_cut went "
                f"{cfg.n_cut} -> {conv.n_cut_factor * cfg.n_cut}",
                series.times,
                deviation,
            )
    if series.metadata["max_tail_mass"] > cfg.tail_tol:
        warnings.warn(
            f"tail mass {series.metadata['max_tail_mass']:.3e} exceeds {cfg.tail_tol:.1e} at n_cut={cfg.n_cut}",
            TruncationWarning,
            stacklevel=2,
        )
    return series


def velocity_consistency(series: TimeSeries, params: PhysicalParams) -> float:
    """Max deviation between centered d<x>/dt and 2 eta Delta Omega~ <sigma_x>.

    Endpoints are dropped; the residual shrinks as O(dt^2).
    """
    t = np.asarray(series.times, dtype=float)
    if t.size < 5:
        raise ValueError(f"need at least 5 samples, got {t.size}")
    steps = np.diff(t)
    dt = steps[0]
    if not np.allclose(steps, dt, rtol=1e-9, atol=0.0):
        raise ValueError("velocity check requires a uniform time grid")
    velocity = (series.x_mean[2:] - series.x_mean[:-2]) / (2.0 * dt)
    predicted = params.light_speed * series.sigma_x_mean[1:-1]
    return float(np.max(np.abs(velocity - predicted)))
