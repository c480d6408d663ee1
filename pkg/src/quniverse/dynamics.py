"""Exact closed-universe evolution and the reduced single-qubit states.

The universe Hamiltonian is constant, so evolution is done by one 4x4
Hermitian eigendecomposition rather than time stepping; no integrator
tolerance enters anywhere.  Reduced states and their time derivatives are
obtained algebraically from ``rho_dot = -i [H, rho]`` followed by a partial
trace; a central-difference route through the propagator is kept as an
independent oracle for tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Configuration, HamiltonianSpec, UniverseState

__all__ = [
    "SUBSYSTEMS",
    "ExtendedStateRep",
    "extended_state",
    "finite_difference_rho_dot",
    "partial_trace",
    "propagate",
    "rho_dot_local",
    "schrodinger_rhs",
    "trajectory",
]

SUBSYSTEMS = ("A", "B")

# Test hook: flipped to -1.0 to fault-inject a sign error into rho_dot_local
# so oracle suites can demonstrate they would catch one.
_rho_dot_sign = 1.0


def _subsystem_index(subsystem: str) -> int:
    try:
        return SUBSYSTEMS.index(subsystem)
    except ValueError:
        raise ValueError(
            f"unknown subsystem {subsystem!r}, expected 'A' or 'B'"
        ) from None


def _as_psi(state) -> np.ndarray:
    if isinstance(state, UniverseState):
        return state.psi
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got shape {psi.shape}")
    return psi


def _as_matrix(hamiltonian) -> np.ndarray:
    if isinstance(hamiltonian, HamiltonianSpec):
        return hamiltonian.matrix
    mat = np.asarray(hamiltonian, dtype=complex)
    if mat.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {mat.shape}")
    return mat


def schrodinger_rhs(state, hamiltonian) -> np.ndarray:
    """Time derivative of the global state, ``-i H psi`` (hbar = 1)."""
    return -1j * (_as_matrix(hamiltonian) @ _as_psi(state))


def trajectory(state, hamiltonian, times) -> np.ndarray:
    """Evolve through ``exp(-i H t)`` at every requested time.

    Returns an ``(len(times), 4)`` complex array.  A single
    eigendecomposition serves the whole grid, so long trajectories carry
    no accumulated stepping error.
    """
    psi = _as_psi(state)
    w, v = np.linalg.eigh(_as_matrix(hamiltonian))
    coeff = v.conj().T @ psi
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), w))
    return (phases * coeff) @ v.T


def propagate(state, hamiltonian, t: float) -> UniverseState:
    """State at time ``t`` under the constant Hamiltonian."""
    return UniverseState(trajectory(state, hamiltonian, [float(t)])[0])


def partial_trace(state_or_rho, keep: str) -> np.ndarray:
    """Reduced 2x2 matrix of one subsystem.

    Accepts a pure state (``UniverseState`` or 4 amplitudes) or a 4x4
    matrix.  The operation is linear and performs no normalization, so it
    is equally valid on density matrices and on derivatives like
    ``rho_dot``.
    """
    _subsystem_index(keep)
    if isinstance(state_or_rho, UniverseState):
        rho = np.outer(state_or_rho.psi, state_or_rho.psi.conj())
    else:
        arr = np.asarray(state_or_rho, dtype=complex)
        if arr.shape == (4,):
            rho = np.outer(arr, arr.conj())
        elif arr.shape == (4, 4):
            rho = arr
        else:
            raise ValueError(
                f"expected 4 amplitudes or a 4x4 matrix, got shape {arr.shape}"
            )
    blocks = rho.reshape(2, 2, 2, 2)
    if keep == "A":
        return np.einsum("abcb->ac", blocks)
    return np.einsum("abad->bd", blocks)


def rho_dot_local(config: Configuration, subsystem: str) -> np.ndarray:
    """Time derivative of one reduced state, ``Tr_other(-i [H, rho])``.

    Traceless and Hermitian up to rounding.
    """
    psi = config.state.psi
    ham = config.hamiltonian.matrix
    rho = np.outer(psi, psi.conj())
    rho_dot = -1j * (ham @ rho - rho @ ham)
    return _rho_dot_sign * partial_trace(rho_dot, keep=subsystem)


def finite_difference_rho_dot(
    config: Configuration, subsystem: str, step: float = 1e-6
) -> np.ndarray:
    """Central-difference oracle for :func:`rho_dot_local`.

    Differentiates the reduced state of the exactly propagated trajectory;
    shares no algebra with the commutator route.
    """
    plus = partial_trace(propagate(config.state, config.hamiltonian, step), subsystem)
    minus = partial_trace(propagate(config.state, config.hamiltonian, -step), subsystem)
    return (plus - minus) / (2.0 * step)


@dataclass(frozen=True)
class ExtendedStateRep:
    """Six real coordinates of one subsystem's state and its derivative.

    ``(re_c, im_c, p1)`` are the coherence and excited population of the
    reduced matrix; ``(re_cdot, im_cdot, p1dot)`` the same entries of its
    time derivative.  Hermiticity and the trace conditions make these six
    numbers a complete record.
    """

    re_c: float
    im_c: float
    p1: float
    re_cdot: float
    im_cdot: float
    p1dot: float

    def __post_init__(self):
        if not (-1e-12 <= self.p1 <= 1.0 + 1e-12):
            raise ValueError(f"excited population out of range: {self.p1!r}")
        coh_sq = self.re_c**2 + self.im_c**2
        if coh_sq > self.p1 * (1.0 - self.p1) + 1e-12:
            raise ValueError(
                "coherence incompatible with a positive 2x2 state: "
                f"|c|^2 = {coh_sq!r}, p1 = {self.p1!r}"
            )

    def to_array(self) -> np.ndarray:
        return np.array(
            [self.re_c, self.im_c, self.p1, self.re_cdot, self.im_cdot, self.p1dot]
        )


def extended_state(config: Configuration, subsystem: str) -> ExtendedStateRep:
    """Pack the reduced state and its derivative into the six coordinates."""
    rho = partial_trace(config.state, subsystem)
    rho_dot = rho_dot_local(config, subsystem)
    return ExtendedStateRep(
        re_c=float(rho[0, 1].real),
        im_c=float(rho[0, 1].imag),
        p1=float(rho[1, 1].real),
        re_cdot=float(rho_dot[0, 1].real),
        im_cdot=float(rho_dot[0, 1].imag),
        p1dot=float(rho_dot[1, 1].real),
    )
