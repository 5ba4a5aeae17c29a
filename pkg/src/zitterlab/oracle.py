"""Continuum 1+1D Dirac reference used to cross-check the Fock-space simulator.

Everything here is analytic or plain quadrature over momentum; nothing is
shared with the truncated-basis code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PhysicalParams

__all__ = [
    "QuadratureError",
    "ContinuumParams",
    "WavepacketSpec",
    "continuum_energy",
    "continuum_spinor",
    "plane_wave",
    "continuum_parity_state",
    "apply_space_inversion",
    "momentum_grid",
    "oracle_mean_position",
    "momentum_moments",
]

QUADRATURE_TOL = 1e-8


class QuadratureError(RuntimeError):
    """Refining the momentum grid changed the oracle output beyond tolerance."""


@dataclass(frozen=True)
class ContinuumParams:
    mass_energy: float = 1.0
    light_speed: float = 0.6

    @classmethod
    def from_ion(cls, params: PhysicalParams) -> "ContinuumParams":
        """c = 2 eta Delta Omega~, m c^2 = hbar Omega."""
        return cls(mass_energy=params.omega, light_speed=params.light_speed)


@dataclass(frozen=True)
class WavepacketSpec:
    """Continuum image of ``(cos beta |+> + sin beta |->)|0>``.

    Momentum amplitude ``(2 pi)^(-1/4) exp(-p^2 / 4)`` in the dimensionless
    ``p`` (physical momentum ``p / (2 delta)``), sampled on a symmetric
    trapezoid grid.
    """

    beta: float = np.pi / 4
    delta: float = 1.0
    p_max: float = 8.0
    n_points: int = 401

    def __post_init__(self):
        if self.n_points < 201:
            raise ValueError(f"quadrature needs >= 201 points, got {self.n_points}")
        if self.n_points % 2 == 0:
            raise ValueError("use an odd point count so p = 0 is on the grid")


def continuum_energy(p_bar, params: ContinuumParams):
    return np.hypot(params.mass_energy, params.light_speed * np.asarray(p_bar, dtype=float))


def continuum_spinor(p_bar: float, sign: int, params: ContinuumParams) -> tuple[np.ndarray, float]:
    """Normalized spinor of the plane wave with energy ``sign * E(p_bar)``."""
    e = float(continuum_energy(p_bar, params))
    q = params.light_speed * p_bar / (e + params.mass_energy)
    norm = np.sqrt((e + params.mass_energy) / (2.0 * e))
    if sign > 0:
        return norm * np.array([1.0, q], dtype=complex), e
    return norm * np.array([-q, 1.0], dtype=complex), -e


def plane_wave(p_bar: float, sign: int, params: ContinuumParams, x, t: float = 0.0) -> np.ndarray:
    """Sampled eigenfunction, shape ``(len(x), 2)``."""
    spinor, e = continuum_spinor(p_bar, sign, params)
    phase = np.exp(1j * p_bar * np.asarray(x, dtype=float) - 1j * e * t)
    return phase[:, None] * spinor[None, :]


def continuum_parity_state(sign: int, parity: int, p_bar: float, params: ContinuumParams, x, t: float = 0.0):
    """Definite-parity combination of the +/- p_bar plane waves on branch ``sign``.

    The relative sign is -1 for (E+, odd) and (E-, even), +1 otherwise.
    """
    rel = -1.0 if (sign > 0) == (parity < 0) else 1.0
    return (plane_wave(p_bar, sign, params, x, t) + rel * plane_wave(-p_bar, sign, params, x, t)) / np.sqrt(2.0)


def apply_space_inversion(x, psi) -> np.ndarray:
    """sigma_z psi(-x) for a spinor field sampled on a grid symmetric about zero."""
    x = np.asarray(x, dtype=float)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (x.size, 2):
        raise ValueError(f"expected samples of shape ({x.size}, 2), got {psi.shape}")
    scale = max(float(np.max(np.abs(x))), 1.0)
    if not np.allclose(x, -x[::-1], rtol=0.0, atol=1e-12 * scale):
        raise ValueError("space inversion needs an x-grid symmetric about 0")
    out = psi[::-1].copy()
    out[:, 1] *= -1.0
    return out


def momentum_grid(spec: WavepacketSpec) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric grid and trapezoid weights in the dimensionless momentum."""
    p = np.linspace(-spec.p_max, spec.p_max, spec.n_points)
    w = np.full(p.size, p[1] - p[0])
    w[[0, -1]] *= 0.5
    return p, w


def _ground_amplitude(p):
    return (2.0 * np.pi) ** -0.25 * np.exp(-p * p / 4.0)


def momentum_moments(spec: WavepacketSpec) -> tuple[float, float, float]:
    """Total weight, <p_phys> and <p_phys^2> of the packet density."""
    p, w = momentum_grid(spec)
    rho = _ground_amplitude(p) ** 2
    p_phys = p / (2.0 * spec.delta)
    return float(w @ rho), float(w @ (rho * p_phys)), float(w @ (rho * p_phys**2))


def _mean_position(spec: WavepacketSpec, params: ContinuumParams, times: np.ndarray) -> np.ndarray:
    # Per momentum, the propagator is the 2x2 spectral sum
    #   U = sum_{+/-} exp(-/+ i E t) |S_+/-><S_+/-| = cos(Et) - i sin(Et) h / E,
    # h = [[m, b], [b, -m]], b = c p / (2 delta).  Position is 2 i delta d/dp;
    # its action on U(p, t) chi phi0(p) is differentiated in closed form.
    p, w = momentum_grid(spec)
    m = params.mass_energy
    b = params.light_speed * p / (2.0 * spec.delta)
    db = params.light_speed / (2.0 * spec.delta)
    e = np.hypot(m, b)
    de = b * db / e
    phi = _ground_amplitude(p)
    dphi = -0.5 * p * phi
    chi = np.array([np.cos(spec.beta), np.sin(spec.beta)], dtype=complex)
    # h chi and h' chi, per momentum; h' = db * sigma_x
    h_chi = np.stack([m * chi[0] + b * chi[1], b * chi[0] - m * chi[1]], axis=-1)
    dh_chi = db * np.array([chi[1], chi[0]])

    out = np.empty(times.size)
    for k, t in enumerate(times):
        c, s = np.cos(e * t), np.sin(e * t)
        u_chi = c[:, None] * chi[None, :] - 1j * (s / e)[:, None] * h_chi
        du_chi = (
            (-t * de * s)[:, None] * chi[None, :]
            - 1j * (t * c * de / e - s * de / e**2)[:, None] * h_chi
            - 1j * (s / e)[:, None] * dh_chi[None, :]
        )
        psi = u_chi * phi[:, None]
        dpsi = du_chi * phi[:, None] + u_chi * dphi[:, None]
        integrand = np.einsum("ij,ij->i", psi.conj(), dpsi)
        out[k] = float((2j * spec.delta * (w @ integrand)).real)
    return out


def oracle_mean_position(spec: WavepacketSpec, params: ContinuumParams, t_grid, check: bool = True) -> np.ndarray:
    """<x(t)> of the continuum packet by momentum quadrature.

    With ``check`` set the grid is refined (midpoints added) and
    :class:`QuadratureError` raised if any sample moves by more than 1e-8.
    """
    times = np.asarray(t_grid, dtype=float)
    coarse = _mean_position(spec, params, times)
    if check:
        finer = WavepacketSpec(spec.beta, spec.delta, spec.p_max, 2 * spec.n_points - 1)
        fine = _mean_position(finer, params, times)
        change = float(np.max(np.abs(fine - coarse)))
        if change > QUADRATURE_TOL:
            raise QuadratureError(f"grid refinement changed <x> by {change:.3e} (> {QUADRATURE_TOL:.0e})")
    return coarse
