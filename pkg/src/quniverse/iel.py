"""Internal-energy laws: per-subsystem energy assignments and their audit.

A *law* maps a configuration to a pair of real energies ``(u_a, u_b)``.
The registry ships two entries:

``bare``
    The uncorrected assignment ``u_j = omega_j * p1_j``; it reads the gap
    straight off the configuration.

``rc``
    The rotating-coherence law.  The coherence of a reduced state is a
    phasor; its instantaneous rotation frequency ``Im(cdot / c)`` plays
    the role of an effective gap, and ``u_j = p1_j * Im(cdot_j / c_j)``.
    The law is a function of the extended state alone, and it reduces to
    ``bare`` whenever the two subsystems do not interact.

The audit quantifies how far a law is from splitting the conserved total:
``defect = u_a + u_b - <H>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Configuration, mean_energy
from .dynamics import SUBSYSTEMS, ExtendedStateRep, extended_state, partial_trace

__all__ = [
    "COHERENCE_CUTOFF",
    "LAWS",
    "ConsistencyAudit",
    "EnergyPair",
    "RCUndefinedError",
    "UndefinedObservableError",
    "consistency_audit",
    "effective_hamiltonian",
    "evaluate_law",
    "rc_frequency",
    "register_law",
]

#: below this coherence magnitude the rotating-coherence law is undefined
COHERENCE_CUTOFF = 1e-12


class RCUndefinedError(ValueError):
    """The rotating-coherence law has no value at this configuration."""

    def __init__(self, subsystem: str | None = None, detail: str = ""):
        self.subsystem = subsystem
        where = f" for subsystem {subsystem}" if subsystem else ""
        super().__init__(
            f"rotating-coherence law undefined{where}: "
            f"|coherence| < {COHERENCE_CUTOFF:g}" + (f" ({detail})" if detail else "")
        )


class UndefinedObservableError(ValueError):
    """No effective observable exists (vanishing excited population)."""


@dataclass(frozen=True)
class EnergyPair:
    """Energies assigned to the two subsystems by one law."""

    u_a: float
    u_b: float

    @property
    def total(self) -> float:
        return self.u_a + self.u_b

    def for_subsystem(self, subsystem: str) -> float:
        if subsystem == "A":
            return self.u_a
        if subsystem == "B":
            return self.u_b
        raise ValueError(f"unknown subsystem {subsystem!r}, expected 'A' or 'B'")


@dataclass(frozen=True)
class ConsistencyAudit:
    """One law evaluated against the conserved total at one configuration."""

    u_a: float
    u_b: float
    mean_h: float
    defect: float


def rc_frequency(ext: ExtendedStateRep) -> float:
    """Rotation frequency of the coherence phasor, ``Im(cdot / c)``."""
    denom = ext.re_c**2 + ext.im_c**2
    if math.sqrt(denom) < COHERENCE_CUTOFF:
        raise RCUndefinedError()
    return (ext.re_c * ext.im_cdot - ext.im_c * ext.re_cdot) / denom


def _bare_law(config: Configuration) -> EnergyPair:
    gaps = (config.hamiltonian.omega_a, config.hamiltonian.omega_b)
    values = []
    for subsystem, omega in zip(SUBSYSTEMS, gaps):
        rho = partial_trace(config.state, subsystem)
        values.append(omega * float(rho[1, 1].real))
    return EnergyPair(*values)


def _rc_law(config: Configuration) -> EnergyPair:
    values = []
    for subsystem in SUBSYSTEMS:
        ext = extended_state(config, subsystem)
        if math.hypot(ext.re_c, ext.im_c) < COHERENCE_CUTOFF:
            raise RCUndefinedError(subsystem)
        values.append(ext.p1 * rc_frequency(ext))
    return EnergyPair(*values)


#: open registry of named laws; keys are stable CLI-facing identifiers
LAWS: dict[str, Callable[[Configuration], EnergyPair]] = {
    "bare": _bare_law,
    "rc": _rc_law,
}


def register_law(name: str, evaluator: Callable[[Configuration], EnergyPair]) -> None:
    """Add a named law to the registry.  Existing names cannot be rebound."""
    if name in LAWS:
        raise ValueError(f"law {name!r} is already registered")
    LAWS[name] = evaluator


def evaluate_law(law: str, config: Configuration) -> EnergyPair:
    """Apply a registered law to a configuration."""
    try:
        evaluator = LAWS[law]
    except KeyError:
        raise ValueError(
            f"unknown law {law!r}, registered: {sorted(LAWS)}"
        ) from None
    return evaluator(config)


def effective_hamiltonian(law: str, config: Configuration, subsystem: str) -> np.ndarray:
    """2x2 observable whose average under the reduced state gives the energy.

    Rescales the bare ``omega * |1><1|`` so that ``tr(rho H_eff) = u_j``;
    undefined when the excited population vanishes.
    """
    energy = evaluate_law(law, config).for_subsystem(subsystem)
    p1 = float(partial_trace(config.state, subsystem)[1, 1].real)
    if p1 < 1e-12:
        raise UndefinedObservableError(
            f"no effective observable for subsystem {subsystem}: "
            f"excited population {p1!r} vanishes"
        )
    return np.array([[0.0, 0.0], [0.0, energy / p1]], dtype=complex)


def consistency_audit(law: str, config: Configuration) -> ConsistencyAudit:
    """Evaluate a law and report how far the pair misses the conserved total."""
    pair = evaluate_law(law, config)
    total = mean_energy(config)
    return ConsistencyAudit(
        u_a=pair.u_a,
        u_b=pair.u_b,
        mean_h=total,
        defect=pair.total - total,
    )
