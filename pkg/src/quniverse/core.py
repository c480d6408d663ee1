"""Fixed-basis algebra for a closed universe of two coupled two-level systems.

All matrices act on the product basis ``(|00>, |01>, |10>, |11>)``, ordered
in binary with subsystem A first.  Pauli operators are built over the local
(ground, excited) bases with the excited-state-positive convention, so the
bare Hamiltonian of one subsystem is ``omega * |1><1|`` with ``omega > 0``.

A configuration pairs a pure global state with the total Hamiltonian.  Its
flat 19-coordinate representation (four moduli, four phases, two gaps, nine
couplings) is the working currency of the solvability experiment; see
:data:`COORD_NAMES` for the serialization order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AXES",
    "COORD_NAMES",
    "NORM_TOL",
    "ConfigRep",
    "Configuration",
    "HamiltonianSpec",
    "UniverseState",
    "assemble_hamiltonian",
    "config_equal",
    "config_to_rep",
    "hamiltonian_matrix",
    "mean_energy",
    "pauli",
    "rep_to_config",
]

TWO_PI = 2.0 * np.pi

#: hard validation gate on state / representation normalization
NORM_TOL = 1e-9

#: flat serialization order of a configuration representation
COORD_NAMES = (
    "R0", "R1", "R2", "R3",
    "theta0", "theta1", "theta2", "theta3",
    "omega_a", "omega_b",
    "h_xx", "h_xy", "h_xz", "h_yx", "h_yy", "h_yz", "h_zx", "h_zy", "h_zz",
)

AXES = ("x", "y", "z")

_SIGMA = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, 1j], [-1j, 0.0]], dtype=complex),
    "z": np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex),
}
for _m in _SIGMA.values():
    _m.setflags(write=False)

# sigma_j (x) sigma_k for the nine axis pairs, indexed [j, k, :, :]
_PAULI_PAIRS = np.array(
    [[np.kron(_SIGMA[j], _SIGMA[k]) for k in AXES] for j in AXES]
)
_PAULI_PAIRS.setflags(write=False)


def pauli(axis: str) -> np.ndarray:
    """Pauli operator on the local (ground, excited) basis.

    ``sigma_z = diag(-1, +1)`` assigns the positive eigenvalue to the
    excited state; ``sigma_x`` and ``sigma_y`` are fixed by the same
    ordering, with ``sigma_x @ sigma_y == 1j * sigma_z``.
    """
    try:
        return _SIGMA[axis].copy()
    except KeyError:
        raise ValueError(
            f"unknown Pauli axis {axis!r}, expected one of 'x', 'y', 'z'"
        ) from None


def hamiltonian_matrix(omega_a: float, omega_b: float, h) -> np.ndarray:
    """Raw 4x4 total Hamiltonian, without any validation of the inputs.

    Bare part ``diag(0, omega_b, omega_a, omega_a + omega_b)`` plus the
    nine-term coupling sum ``sum_jk h[j, k] sigma_j (x) sigma_k``.  Kept
    free of range checks so it can be evaluated at finite-difference
    displacements that leave the physical parameter region.
    """
    h = np.asarray(h, dtype=float).reshape(3, 3)
    bare = np.diag([0.0, omega_b, omega_a, omega_a + omega_b]).astype(complex)
    return bare + np.einsum("jk,jkab->ab", h, _PAULI_PAIRS)


def _frozen_array(values, dtype) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class UniverseState:
    """Pure global state: four complex amplitudes on the binary basis."""

    psi: np.ndarray

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=complex)
        if psi.shape != (4,):
            raise ValueError(f"state must hold 4 amplitudes, got shape {psi.shape}")
        if not (np.all(np.isfinite(psi.real)) and np.all(np.isfinite(psi.imag))):
            raise ValueError("state amplitudes must be finite")
        norm_sq = float(np.sum(np.abs(psi) ** 2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: sum |psi_k|^2 = {norm_sq!r}")
        object.__setattr__(self, "psi", _frozen_array(psi, complex))


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """Total Hamiltonian: two positive gaps plus the 3x3 coupling table.

    The assembled 4x4 matrix is cached at construction and is Hermitian
    exactly (entrywise equal to its conjugate transpose).
    """

    omega_a: float
    omega_b: float
    h: np.ndarray
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        omega_a = float(self.omega_a)
        omega_b = float(self.omega_b)
        if not (np.isfinite(omega_a) and omega_a > 0):
            raise ValueError(f"omega_a must be a positive real, got {self.omega_a!r}")
        if not (np.isfinite(omega_b) and omega_b > 0):
            raise ValueError(f"omega_b must be a positive real, got {self.omega_b!r}")
        h = np.asarray(self.h, dtype=float)
        if h.shape != (3, 3):
            raise ValueError(f"coupling table must be 3x3, got shape {h.shape}")
        if not np.all(np.isfinite(h)):
            raise ValueError("coupling table must be finite")
        object.__setattr__(self, "omega_a", omega_a)
        object.__setattr__(self, "omega_b", omega_b)
        object.__setattr__(self, "h", _frozen_array(h, float))
        object.__setattr__(
            self, "matrix", _frozen_array(hamiltonian_matrix(omega_a, omega_b, h), complex)
        )


def assemble_hamiltonian(omega_a: float, omega_b: float, h) -> HamiltonianSpec:
    """Validate the gaps and coupling table and assemble the 4x4 matrix."""
    return HamiltonianSpec(omega_a, omega_b, h)


@dataclass(frozen=True, eq=False)
class ConfigRep:
    """19 real coordinates of a configuration.

    Fields mirror the flat serialization order: moduli ``r`` (unit
    Euclidean norm), phases ``theta`` (stored modulo 2*pi), the two gaps
    and the coupling table.  Two representations related by a joint phase
    shift ``theta_k -> theta_k + phi`` describe the same configuration;
    no canonical gauge is ever picked.
    """

    r: np.ndarray
    theta: np.ndarray
    omega_a: float
    omega_b: float
    h: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        theta = np.asarray(self.theta, dtype=float)
        if r.shape != (4,) or theta.shape != (4,):
            raise ValueError("moduli and phases must each hold 4 values")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(theta))):
            raise ValueError("moduli and phases must be finite")
        if np.any(r < 0):
            raise ValueError("moduli must be non-negative")
        norm_sq = float(np.sum(r**2))
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValueError(f"moduli not normalized: sum R_k^2 = {norm_sq!r}")
        omega_a = float(self.omega_a)
        omega_b = float(self.omega_b)
        if not (np.isfinite(omega_a) and omega_a > 0):
            raise ValueError(f"omega_a must be a positive real, got {self.omega_a!r}")
        if not (np.isfinite(omega_b) and omega_b > 0):
            raise ValueError(f"omega_b must be a positive real, got {self.omega_b!r}")
        h = np.asarray(self.h, dtype=float)
        if h.shape != (3, 3) or not np.all(np.isfinite(h)):
            raise ValueError("coupling table must be a finite 3x3 array")
        object.__setattr__(self, "r", _frozen_array(r, float))
        object.__setattr__(self, "theta", _frozen_array(np.mod(theta, TWO_PI), float))
        object.__setattr__(self, "omega_a", omega_a)
        object.__setattr__(self, "omega_b", omega_b)
        object.__setattr__(self, "h", _frozen_array(h, float))

    def to_array(self) -> np.ndarray:
        """Flat 19-vector in the :data:`COORD_NAMES` order."""
        return np.concatenate(
            [self.r, self.theta, [self.omega_a, self.omega_b], self.h.ravel()]
        )

    @classmethod
    def from_array(cls, x) -> "ConfigRep":
        x = np.asarray(x, dtype=float)
        if x.shape != (19,):
            raise ValueError(f"expected 19 coordinates, got shape {x.shape}")
        return cls(
            r=x[0:4],
            theta=x[4:8],
            omega_a=x[8],
            omega_b=x[9],
            h=x[10:19].reshape(3, 3),
        )


@dataclass(frozen=True, eq=False)
class Configuration:
    """Everything knowable about the universe at one instant."""

    state: UniverseState
    hamiltonian: HamiltonianSpec


def rep_to_config(rep: ConfigRep) -> Configuration:
    """Realize a representation: ``psi_k = R_k exp(i theta_k)`` plus the Hamiltonian."""
    psi = rep.r * np.exp(1j * rep.theta)
    return Configuration(
        state=UniverseState(psi),
        hamiltonian=assemble_hamiltonian(rep.omega_a, rep.omega_b, rep.h),
    )


def config_to_rep(config: Configuration) -> ConfigRep:
    """Polar coordinates of the state plus the Hamiltonian parameters.

    One representative of the gauge family is returned; amplitudes that
    vanish get phase 0.
    """
    psi = config.state.psi
    ham = config.hamiltonian
    return ConfigRep(
        r=np.abs(psi),
        theta=np.mod(np.angle(psi), TWO_PI),
        omega_a=ham.omega_a,
        omega_b=ham.omega_b,
        h=ham.h,
    )


def config_equal(a: Configuration, b: Configuration, tol: float = 1e-9) -> bool:
    """Same Hamiltonian entrywise and same state up to one global phase."""
    if float(np.max(np.abs(a.hamiltonian.matrix - b.hamiltonian.matrix))) > tol:
        return False
    overlap = abs(complex(np.vdot(a.state.psi, b.state.psi)))
    return abs(overlap - 1.0) <= tol


def mean_energy(config: Configuration) -> float:
    """Expectation value of the total Hamiltonian in the global state."""
    value = complex(np.vdot(config.state.psi, config.hamiltonian.matrix @ config.state.psi))
    if abs(value.imag) > 1e-12:
        raise ValueError(f"mean energy came out non-real: {value!r}")
    return value.real
