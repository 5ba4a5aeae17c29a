"""Eigenstructure of the ion Hamiltonian.

Full diagonalization with parity-resolved eigenvectors, the truncated
momentum eigenstates built from probabilists' Hermite polynomials, the 2x2
energy spinors and the parity/energy co-eigenstates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    OperatorMatrix,
    PhysicalParams,
    QuantumState,
    _check_cutoff,
    max_norm,
)

__all__ = [
    "SpectralError",
    "ZeroStateError",
    "TruncationWarning",
    "SpectrumResult",
    "MomentumState",
    "diagonalize",
    "hermite_e_normalized",
    "momentum_eigenstate",
    "truncated_momentum_grid",
    "energy",
    "energy_spinors",
    "product_state",
    "parity_coeigenstate",
    "default_p_grid",
]

ZERO_STATE_THRESHOLD = 1e-12
MOMENTUM_RESIDUAL_THRESHOLD = 1e-8


class SpectralError(RuntimeError):
    """Eigen-solver failure or a Hamiltonian that breaks the parity symmetry."""


class ZeroStateError(ValueError):
    """A requested superposition cancels identically."""


class TruncationWarning(UserWarning):
    """The truncated Fock space does not represent the requested state well."""


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    parity_labels: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def vector(self, k: int) -> QuantumState:
        return QuantumState(self.eigenvectors[:, k].copy())

    def sector(self, parity: int) -> np.ndarray:
        """Indices of eigenvectors carrying the given parity label."""
        return np.flatnonzero(self.parity_labels == parity)


def diagonalize(H: OperatorMatrix, Pi: OperatorMatrix) -> SpectrumResult:
    """Diagonalize ``H`` in a basis of simultaneous parity eigenvectors.

    ``Pi`` must be diagonal with entries +/-1 and commute with ``H``; each
    parity sector is then an independent Hermitian block, so degenerate
    eigenspaces never mix the two sectors.

    Raises
    ------
    SpectralError
        If ``H`` couples the sectors or LAPACK fails to converge.
    """
    if H.dim != Pi.dim:
        raise ValueError(f"dimension mismatch: H {H.dim}, Pi {Pi.dim}")
    diag = Pi.entries.diagonal()
    if max_norm(Pi.entries - np.diag(diag)) != 0.0 or not np.all(np.isin(diag, (1.0, -1.0))):
        raise ValueError("parity operator must be diagonal with entries +/-1")
    labels_diag = diag.real.astype(int)

    h = H.entries
    scale = max(max_norm(h), 1.0)
    even = np.flatnonzero(labels_diag == 1)
    odd = np.flatnonzero(labels_diag == -1)
    leak = max_norm(h[np.ix_(even, odd)]) if even.size and odd.size else 0.0
    if leak > 1e-12 * scale:
        raise SpectralError(f"H couples the parity sectors (max coupling {leak:.3e}); [H, Pi] != 0")

    dim = H.dim
    values = np.empty(dim)
    vectors = np.zeros((dim, dim), dtype=complex)
    labels = np.empty(dim, dtype=int)
    col = 0
    for sign, idx in ((1, even), (-1, odd)):
        if not idx.size:
            continue
        block = h[np.ix_(idx, idx)]
        try:
            w, v = np.linalg.eigh(block)
        except np.linalg.LinAlgError as exc:
            cond = np.linalg.cond(block)
            raise SpectralError(
                f"eigh failed in parity sector {sign:+d} (size {idx.size}, condition {cond:.3e})"
            ) from exc
        span = slice(col, col + idx.size)
        values[span] = w
        vectors[idx, span] = v
        labels[span] = sign
        col += idx.size

    order = np.argsort(values, kind="stable")
    return SpectrumResult(values[order], vectors[:, order], labels[order])


def hermite_e_normalized(p: float, n_cut: int) -> np.ndarray:
    """``He_n(p) / sqrt(n!)`` for ``n < n_cut`` via the scaled three-term recurrence.

    He_{n+1} = x He_n - n He_{n-1}, divided through by sqrt((n+1)!) so the
    values stay O(1) up to large ``n``.
    """
    n_cut = _check_cutoff(n_cut)
    h = np.empty(n_cut)
    h[0] = 1.0
    if n_cut > 1:
        h[1] = p
    for k in range(1, n_cut - 1):
        h[k + 1] = (p * h[k] - np.sqrt(k) * h[k - 1]) / np.sqrt(k + 1)
    return h


_I_POWERS = np.array([1.0, 1.0j, -1.0, -1.0j])


@dataclass
class MomentumState:
    """Truncated, renormalized eigenvector of ``(a^dag - a)`` on the motional factor."""

    p_value: float
    amplitudes: np.ndarray
    residual: float

    @property
    def n_cut(self) -> int:
        return self.amplitudes.size


def _momentum_amplitudes(p: float, n_cut: int) -> np.ndarray:
    n = np.arange(n_cut)
    amps = (2.0 * np.pi) ** -0.25 * np.exp(-p * p / 4.0) * _I_POWERS[n % 4] * hermite_e_normalized(p, n_cut)
    return amps / np.linalg.norm(amps)


def _momentum_residual(amps: np.ndarray, p: float) -> float:
    # (a^dag - a) c: component n gets sqrt(n) c_{n-1} - sqrt(n+1) c_{n+1}
    n_cut = amps.size
    out = np.zeros(n_cut, dtype=complex)
    s = np.sqrt(np.arange(1, n_cut))
    out[1:] += s * amps[:-1]
    out[:-1] -= s * amps[1:]
    return float(np.linalg.norm(out + 1j * p * amps))


def momentum_eigenstate(p: float, n_cut: int, residual_threshold: float = MOMENTUM_RESIDUAL_THRESHOLD) -> MomentumState:
    """Truncated momentum eigenstate ``|p>`` with ``(a^dag - a)|p> = -i p |p>``.

    Amplitudes are ``exp(-p^2/4) i^n He_n(p) / sqrt(n!)``, renormalized over
    the kept levels.  The stored residual is measured with the truncated
    operator.  Above ``residual_threshold`` a :class:`TruncationWarning` is
    emitted; it is exactly zero only when ``p`` is a root of ``He_{n_cut}``.
    """
    if not np.isfinite(p):
        raise ValueError(f"momentum must be finite, got {p}")
    amps = _momentum_amplitudes(float(p), n_cut)
    residual = _momentum_residual(amps, float(p))
    if residual > residual_threshold:
        warnings.warn(
            f"|p={p}> at n_cut={n_cut}: eigen-residual {residual:.3e} exceeds {residual_threshold:.1e}",
            TruncationWarning,
            stacklevel=2,
        )
    return MomentumState(float(p), amps, residual)


def truncated_momentum_grid(n_cut: int) -> np.ndarray:
    """Momenta for which the truncated ``|p>`` is an exact eigenvector.

    These are the roots of ``He_{n_cut}``, i.e. the spectrum of
    ``i (a^dag - a)`` restricted to ``n_cut`` levels.
    """
    nodes, _ = np.polynomial.hermite_e.hermegauss(_check_cutoff(n_cut))
    return nodes


def energy(p, params: PhysicalParams):
    """Positive branch ``sqrt(Omega^2 + (eta Omega~ p)^2)`` (hbar = 1)."""
    p = np.asarray(p, dtype=float)
    return np.hypot(params.omega, params.eta_omega_tilde * p)


def energy_spinors(p: float, params: PhysicalParams) -> tuple[np.ndarray, np.ndarray]:
    """Unit spinors of the positive and negative energy branches at momentum ``p``."""
    e = float(energy(p, params))
    q = params.eta_omega_tilde * p / (e + params.omega)
    norm = np.sqrt((e + params.omega) / (2.0 * e))
    s_plus = norm * np.array([1.0, q], dtype=complex)
    s_minus = norm * np.array([-q, 1.0], dtype=complex)
    return s_plus, s_minus


def product_state(spinor: np.ndarray, motional: np.ndarray) -> QuantumState:
    """Spinor (x) motional amplitudes in spin-major layout."""
    return QuantumState(np.kron(np.asarray(spinor, dtype=complex), np.asarray(motional, dtype=complex)))


def _energy_state(sign: int, p: float, params: PhysicalParams, n_cut: int) -> np.ndarray:
    s_plus, s_minus = energy_spinors(p, params)
    spinor = s_plus if sign > 0 else s_minus
    return np.kron(spinor, _momentum_amplitudes(p, n_cut))


# relative sign of the |psi(-p)> term, keyed by (energy sign, parity)
_COMBINATION_SIGN = {
    (1, -1): -1.0,
    (1, 1): 1.0,
    (-1, -1): 1.0,
    (-1, 1): -1.0,
}


def _parse_energy_sign(energy_sign) -> int:
    if energy_sign in (1, "+", "plus", "E+"):
        return 1
    if energy_sign in (-1, "-", "minus", "E-"):
        return -1
    raise ValueError(f"energy sign must be +/-, got {energy_sign!r}")


def _parse_parity(parity) -> int:
    if parity in (1, "even", "e"):
        return 1
    if parity in (-1, "odd", "o"):
        return -1
    raise ValueError(f"parity must be 'odd' or 'even', got {parity!r}")


def parity_coeigenstate(energy_sign, parity, p: float, params: PhysicalParams, n_cut: int) -> QuantumState:
    """Simultaneous eigenstate of H (branch ``energy_sign``) and the parity operator.

    Returns ``(|psi_E(p)> + s |psi_E(-p)>) / sqrt(2)`` renormalized after
    truncation, with ``s = -1`` for (E+, odd) and (E-, even) and ``s = +1``
    otherwise.

    Raises
    ------
    ZeroStateError
        If the combination vanishes (antisymmetric choice at ``p = 0``).
    """
    sign = _parse_energy_sign(energy_sign)
    par = _parse_parity(parity)
    n_cut = _check_cutoff(n_cut)
    rel = _COMBINATION_SIGN[(sign, par)]
    amps = (_energy_state(sign, p, params, n_cut) + rel * _energy_state(sign, -p, params, n_cut)) / np.sqrt(2.0)
    nrm = np.linalg.norm(amps)
    if nrm < ZERO_STATE_THRESHOLD:
        raise ZeroStateError(
            f"co-eigenstate (E{'+' if sign > 0 else '-'}, {'even' if par > 0 else 'odd'}) vanishes at p={p}"
        )
    return QuantumState(amps / nrm)


def default_p_grid() -> np.ndarray:
    """Uniform momentum grid on [-3, 3] with 61 points."""
    return np.linspace(-3.0, 3.0, 61)
