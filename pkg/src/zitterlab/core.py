"""State/operator data model and operator construction in the spin x Fock basis.

Basis layout is spin-major: flat index ``spin_offset * n_cut + n`` with the
``+`` (sigma_z = +1) block first and the ``-`` block second.  All operators
are dense complex matrices of shape ``(2 * n_cut, 2 * n_cut)``; hbar = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "InvalidCutoffError",
    "Spin",
    "BasisIndex",
    "PhysicalParams",
    "QuantumState",
    "OperatorMatrix",
    "ladder_motional",
    "build_ladder",
    "build_sigma_x",
    "build_sigma_z",
    "build_hamiltonian",
    "build_gate_hamiltonian",
    "build_parity",
    "build_position",
    "build_momentum",
    "commutator",
    "max_norm",
    "spin_ground_state",
]

HERMITIAN_RTOL = 1e-12

_SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# sigma_+ = |+><-| in the (+, -) ordering
_SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


class InvalidCutoffError(ValueError):
    """Raised for a Fock cutoff that cannot hold a single level."""


def _check_cutoff(n_cut: int) -> int:
    if isinstance(n_cut, bool) or int(n_cut) != n_cut or n_cut < 1:
        raise InvalidCutoffError(f"Fock cutoff must be an integer >= 1, got {n_cut!r}")
    return int(n_cut)


class Spin(enum.IntEnum):
    """sigma_z eigenvalue labelling the internal level."""

    PLUS = 1
    MINUS = -1

    @property
    def offset(self) -> int:
        return 0 if self is Spin.PLUS else 1


@dataclass(frozen=True)
class BasisIndex:
    spin: Spin
    fock_n: int

    def flat(self, n_cut: int) -> int:
        if not 0 <= self.fock_n < n_cut:
            raise IndexError(f"Fock label {self.fock_n} outside [0, {n_cut})")
        return Spin(self.spin).offset * n_cut + self.fock_n

    @classmethod
    def from_flat(cls, index: int, n_cut: int) -> "BasisIndex":
        if not 0 <= index < 2 * n_cut:
            raise IndexError(f"flat index {index} outside [0, {2 * n_cut})")
        offset, n = divmod(index, n_cut)
        return cls(Spin.PLUS if offset == 0 else Spin.MINUS, n)


@dataclass(frozen=True)
class PhysicalParams:
    """Ion parameters.

    Only the product ``eta * Omega_tilde`` enters the dynamics, so the
    Lamb-Dicke parameter and the Rabi frequency are not stored separately.

    Parameters
    ----------
    omega : float
        Effective Larmor frequency (rad/time); sets the rest energy.
    eta_omega_tilde : float
        Product of Lamb-Dicke parameter and effective Rabi frequency.
    delta : float
        Size of the motional ground-state wave function (length unit).
    """

    omega: float = 1.0
    eta_omega_tilde: float = 0.3
    delta: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if not np.isfinite(self.eta_omega_tilde) or self.eta_omega_tilde < 0:
            raise ValueError(f"eta_omega_tilde must be >= 0, got {self.eta_omega_tilde}")

    @classmethod
    def from_lambda_c(cls, lambda_c: float, omega: float = 1.0, delta: float = 1.0) -> "PhysicalParams":
        """Build parameters from the Compton wavelength lambda_c = 2 eta Omega~ Delta / Omega."""
        return cls(omega=omega, eta_omega_tilde=lambda_c * omega / (2.0 * delta), delta=delta)

    @property
    def lambda_c(self) -> float:
        return 2.0 * self.eta_omega_tilde * self.delta / self.omega

    @property
    def light_speed(self) -> float:
        """Effective speed of light c = 2 eta Delta Omega~."""
        return 2.0 * self.eta_omega_tilde * self.delta

    @property
    def rest_energy(self) -> float:
        return self.omega


@dataclass
class QuantumState:
    """Amplitude vector over the flattened spin x Fock basis."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0 or amps.size % 2:
            raise ValueError(f"state needs an even-length 1-D amplitude vector, got shape {amps.shape}")
        self.amplitudes = amps

    @property
    def n_cut(self) -> int:
        return self.amplitudes.size // 2

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "QuantumState":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero state")
        return QuantumState(self.amplitudes / nrm)

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.norm() ** 2 - 1.0) <= tol

    def spin_block(self, spin: Spin) -> np.ndarray:
        off = Spin(spin).offset * self.n_cut
        return self.amplitudes[off:off + self.n_cut]

    def tail_mass(self, width: int = 4) -> float:
        """Probability carried by the top ``width`` Fock levels of both spin blocks."""
        n = self.n_cut
        lo = max(n - width, 0)
        probs = np.abs(self.amplitudes) ** 2
        return float(probs[lo:n].sum() + probs[n + lo:].sum())

    def truncation_adequate(self, tail_tol: float = 1e-10, width: int = 4) -> bool:
        return self.tail_mass(width) < tail_tol

    def inner(self, other: "QuantumState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expect(self, op: "OperatorMatrix") -> complex:
        return complex(np.vdot(self.amplitudes, op.entries @ self.amplitudes))


@dataclass
class OperatorMatrix:
    """Dense operator on the flattened basis.

    With ``hermitian`` set, construction verifies
    ``max|M - M^dagger| <= 1e-12 * max|M|``.
    """

    entries: np.ndarray
    hermitian: bool = False
    label: str = field(default="", compare=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"operator must be square, got shape {m.shape}")
        self.entries = m
        if self.hermitian and not self.is_hermitian():
            raise ValueError(f"operator {self.label or '<unnamed>'} flagged Hermitian but is not")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_cut(self) -> int:
        return self.dim // 2

    def is_hermitian(self, rtol: float = HERMITIAN_RTOL) -> bool:
        scale = max_norm(self.entries)
        return max_norm(self.entries - self.entries.conj().T) <= rtol * scale

    def dagger(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.hermitian, self.label + "^dag")

    def motional_block(self, spin: Spin = Spin.PLUS) -> np.ndarray:
        """Diagonal spin block, i.e. the motional factor of a spin-diagonal operator."""
        off = Spin(spin).offset * self.n_cut
        return self.entries[off:off + self.n_cut, off:off + self.n_cut]

    def apply(self, state: QuantumState) -> QuantumState:
        if state.dim != self.dim:
            raise ValueError(f"dimension mismatch: operator {self.dim}, state {state.dim}")
        return QuantumState(self.entries @ state.amplitudes)

    def __matmul__(self, other):
        if isinstance(other, QuantumState):
            return self.apply(other)
        if isinstance(other, OperatorMatrix):
            return OperatorMatrix(self.entries @ other.entries)
        return self.entries @ other

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries + other.entries, self.hermitian and other.hermitian)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries - other.entries, self.hermitian and other.hermitian)


def max_norm(m) -> float:
    """Largest absolute entry."""
    arr = m.entries if isinstance(m, OperatorMatrix) else np.asarray(m)
    return float(np.max(np.abs(arr))) if arr.size else 0.0


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(a.entries @ b.entries - b.entries @ a.entries)


def ladder_motional(n_cut: int) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation/creation matrices on the motional factor alone."""
    n_cut = _check_cutoff(n_cut)
    a = np.diag(np.sqrt(np.arange(1, n_cut, dtype=float)), k=1).astype(complex)
    return a, a.conj().T


def _on_motion(m: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(2), m)


def _on_spin(s: np.ndarray, n_cut: int) -> np.ndarray:
    return np.kron(s, np.eye(n_cut))


def build_ladder(n_cut: int) -> tuple[OperatorMatrix, OperatorMatrix]:
    """Return ``(a, a_dagger)`` acting as identity on spin.

    ``a[n-1, n] = sqrt(n)`` in each spin block; ``n_cut = 1`` yields zeros.
    """
    a, ad = ladder_motional(n_cut)
    return OperatorMatrix(_on_motion(a), label="a"), OperatorMatrix(_on_motion(ad), label="a^dag")


def build_sigma_x(n_cut: int) -> OperatorMatrix:
    return OperatorMatrix(_on_spin(_SIGMA_X, _check_cutoff(n_cut)), hermitian=True, label="sigma_x")


def build_sigma_z(n_cut: int) -> OperatorMatrix:
    return OperatorMatrix(_on_spin(_SIGMA_Z, _check_cutoff(n_cut)), hermitian=True, label="sigma_z")


def build_hamiltonian(params: PhysicalParams, n_cut: int) -> OperatorMatrix:
    """Ion Hamiltonian ``i eta Omega~ (a^dag - a) sigma_x + Omega sigma_z``.

    Parameters
    ----------
    params : PhysicalParams
        Coupling ``eta_omega_tilde`` and rest frequency ``omega``.
    n_cut : int
        Number of retained Fock levels.

    Returns
    -------
    OperatorMatrix
        Hermitian ``(2 n_cut, 2 n_cut)`` matrix; the hermiticity flag is
        verified on construction.
    """
    a, ad = ladder_motional(n_cut)
    coupling = np.kron(_SIGMA_X, 1j * params.eta_omega_tilde * (ad - a))
    mass = params.omega * _on_spin(_SIGMA_Z, n_cut)
    return OperatorMatrix(coupling + mass, hermitian=True, label="H")


def build_gate_hamiltonian(n_cut: int) -> OperatorMatrix:
    """Red-sideband gate Hamiltonian ``sigma_+ a + sigma_- a^dag``."""
    a, ad = ladder_motional(n_cut)
    h = np.kron(_SIGMA_PLUS, a) + np.kron(_SIGMA_PLUS.T, ad)
    return OperatorMatrix(h, hermitian=True, label="H_r")


def parity_diagonal(n_cut: int) -> np.ndarray:
    """Exact +/-1 diagonal of exp(i pi (n - 1/2 + sigma_z / 2)).

    The exponent is an integer multiple of pi: ``n`` for spin +, ``n - 1`` for spin -.
    """
    n = np.arange(_check_cutoff(n_cut))
    plus = np.where(n % 2 == 0, 1.0, -1.0)
    return np.concatenate([plus, -plus])


def build_parity(n_cut: int) -> OperatorMatrix:
    return OperatorMatrix(np.diag(parity_diagonal(n_cut)).astype(complex), hermitian=True, label="Pi")


def build_position(params: PhysicalParams, n_cut: int) -> OperatorMatrix:
    """x = Delta (a^dag + a), identity on spin."""
    a, ad = ladder_motional(n_cut)
    return OperatorMatrix(_on_motion(params.delta * (ad + a)), hermitian=True, label="x")


def build_momentum(params: PhysicalParams, n_cut: int) -> OperatorMatrix:
    """p = i (a^dag - a) / (2 Delta), identity on spin."""
    a, ad = ladder_motional(n_cut)
    return OperatorMatrix(_on_motion(1j * (ad - a) / (2.0 * params.delta)), hermitian=True, label="p")


def spin_ground_state(beta: float, n_cut: int) -> QuantumState:
    """(cos beta |+> + sin beta |->) (x) |0>."""
    n_cut = _check_cutoff(n_cut)
    amps = np.zeros(2 * n_cut, dtype=complex)
    amps[0] = np.cos(beta)
    amps[n_cut] = np.sin(beta)
    return QuantumState(amps)
