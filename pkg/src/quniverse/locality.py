"""Solvability audit: can the mean energy move while both reduced records stay put?

For a sampled interior representation ``X0`` the audit stacks the
central-difference Jacobians of the two six-coordinate extended states, of
the moduli norm ``sum R_k^2`` and of the mean energy into a 14x19 linear
system whose right-hand side asks for a pure energy increment.  A solution
is a direction in coordinate space that changes the mean energy at first
order while leaving both extended states (and the norm constraint)
unchanged, which rules out reconstructing the energy from those records
alone.  ``run_experiment`` repeats the audit over seeded samples and
aggregates residual norms.

A hyperspherical chart of the moduli sphere gives an equivalent 13x18
system in intrinsic coordinates; ``transport_solution`` carries a solution
across and ``build_tangent_system`` rebuilds that system so the transport
can be checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import core
from .core import COORD_NAMES, ConfigRep
from .dynamics import partial_trace

__all__ = [
    "JacobianEvaluationError",
    "LinearSystem",
    "SAMPLER_ID",
    "SampleResult",
    "SolvabilityReport",
    "build_system",
    "build_tangent_system",
    "hyperspherical_backward",
    "hyperspherical_forward",
    "numerical_jacobian",
    "rep_mean_energy",
    "rep_norm_sq",
    "rep_observables",
    "rep_sigma1",
    "run_experiment",
    "sample_interior_rep",
    "solve_least_squares",
    "transport_solution",
]

#: singular-value cutoff passed to lstsq.  None means machine precision,
#: which is required here: two exact identities among the reduced-state
#: rows (a pure global state forces det rho_A = det rho_B, and likewise
#: for the time derivative) leave the true matrix with rank 12, so a
#: coarser cutoff truncates noise-scale directions that the right-hand
#: side still overlaps and inflates residuals above 1e-13.
LSTSQ_RCOND = None

#: identifies the sampling law recorded in every report
SAMPLER_ID = "moduli:u01-normalized(reject |R|<1e-3); theta:u(0,2pi); omega:u(0,1); h:u(-1,1)"

#: solutions must be tangent to the moduli sphere to transport
TANGENCY_TOL = 1e-9


class JacobianEvaluationError(RuntimeError):
    """A displaced evaluation produced a non-finite value."""


# ---------------------------------------------------------------------------
# raw coordinate functions
#
# Everything below is evaluated on plain 19-vectors, including displaced
# points that violate normalization or gap positivity; the formulas are
# polynomial/trigonometric in the coordinates, so no validation belongs here.
# ---------------------------------------------------------------------------

def _psi_and_matrix(x: np.ndarray):
    psi = x[:4] * np.exp(1j * x[4:8])
    matrix = core.hamiltonian_matrix(x[8], x[9], x[10:19].reshape(3, 3))
    return psi, matrix


def _sigma1_entries(rho: np.ndarray, rho_dot: np.ndarray, subsystem: str) -> np.ndarray:
    red = partial_trace(rho, subsystem)
    red_dot = partial_trace(rho_dot, subsystem)
    return np.array(
        [
            red[0, 1].real,
            red[0, 1].imag,
            red[1, 1].real,
            red_dot[0, 1].real,
            red_dot[0, 1].imag,
            red_dot[1, 1].real,
        ]
    )


def rep_sigma1(x, subsystem: str) -> np.ndarray:
    """Extended-state coordinates of one subsystem as a function of the raw 19-vector."""
    x = np.asarray(x, dtype=float)
    psi, matrix = _psi_and_matrix(x)
    rho = np.outer(psi, psi.conj())
    rho_dot = -1j * (matrix @ rho - rho @ matrix)
    return _sigma1_entries(rho, rho_dot, subsystem)


def rep_norm_sq(x) -> float:
    """Moduli norm ``sum R_k^2`` of a raw 19-vector."""
    x = np.asarray(x, dtype=float)
    return float(np.sum(x[:4] ** 2))


def rep_mean_energy(x) -> float:
    """Mean energy ``<psi|H|psi>`` of a raw 19-vector (no normalization)."""
    x = np.asarray(x, dtype=float)
    psi, matrix = _psi_and_matrix(x)
    return float(np.real(np.vdot(psi, matrix @ psi)))


def rep_observables(x) -> np.ndarray:
    """All 14 audited quantities in system row order.

    Rows 0-5 are the extended state of A, 6-11 that of B, row 12 the
    moduli norm and row 13 the mean energy; one shared evaluation of the
    state and Hamiltonian serves all of them.
    """
    x = np.asarray(x, dtype=float)
    psi, matrix = _psi_and_matrix(x)
    rho = np.outer(psi, psi.conj())
    rho_dot = -1j * (matrix @ rho - rho @ matrix)
    out = np.empty(14)
    out[0:6] = _sigma1_entries(rho, rho_dot, "A")
    out[6:12] = _sigma1_entries(rho, rho_dot, "B")
    out[12] = np.sum(x[:4] ** 2)
    out[13] = np.real(np.vdot(psi, matrix @ psi))
    return out


# ---------------------------------------------------------------------------
# finite differences and the linear system
# ---------------------------------------------------------------------------

def _as_coords(x0) -> np.ndarray:
    if isinstance(x0, ConfigRep):
        return x0.to_array()
    return np.array(x0, dtype=float)


def numerical_jacobian(f: Callable, x0, h_step: float = 1e-6) -> np.ndarray:
    """Two-point central-difference Jacobian of ``f`` at ``x0``.

    ``f`` maps a coordinate vector to ``m`` reals; entry ``(i, j)`` is
    ``(f_i(x0 + h e_j) - f_i(x0 - h e_j)) / (2 h)``.  The step 1e-6 is
    near optimal for double precision and smooth integrands.
    """
    x0 = _as_coords(x0)
    if h_step <= 0:
        raise ValueError(f"h_step must be positive, got {h_step!r}")
    columns = []
    for j in range(x0.size):
        plus = x0.copy()
        plus[j] += h_step
        minus = x0.copy()
        minus[j] -= h_step
        f_plus = np.atleast_1d(np.asarray(f(plus), dtype=float))
        f_minus = np.atleast_1d(np.asarray(f(minus), dtype=float))
        if not (np.all(np.isfinite(f_plus)) and np.all(np.isfinite(f_minus))):
            name = COORD_NAMES[j] if x0.size == len(COORD_NAMES) else f"coordinate {j}"
            raise JacobianEvaluationError(
                f"non-finite value while displacing {name} by {h_step:g}"
            )
        columns.append((f_plus - f_minus) / (2.0 * h_step))
    return np.column_stack(columns)


@dataclass(frozen=True, eq=False)
class LinearSystem:
    """The 14x19 audit system with its one-hot right-hand side."""

    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        rhs = np.asarray(self.rhs, dtype=float)
        if matrix.shape != (14, 19):
            raise ValueError(f"audit matrix must be 14x19, got {matrix.shape}")
        if rhs.shape != (14,) or np.any(rhs[:-1] != 0.0) or rhs[-1] == 0.0:
            raise ValueError("right-hand side must be zero except for a nonzero last entry")
        matrix.setflags(write=False)
        rhs.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)


def build_system(x0, h_step: float = 1e-6, delta_e: float = 1.0) -> LinearSystem:
    """Assemble the audit system at one representation.

    One Jacobian pass over :func:`rep_observables` yields the rows in
    order: extended state of A, extended state of B, moduli norm, mean
    energy.  The right-hand side requests the energy increment
    ``delta_e`` while pinning everything else to zero.
    """
    if delta_e == 0.0:
        raise ValueError("delta_e must be nonzero")
    matrix = numerical_jacobian(rep_observables, x0, h_step)
    rhs = np.zeros(14)
    rhs[-1] = float(delta_e)
    return LinearSystem(matrix=matrix, rhs=rhs)


def solve_least_squares(system, rhs=None):
    """Minimum-norm least-squares solution and its achieved residual norm.

    Accepts a :class:`LinearSystem` or an explicit ``(matrix, rhs)`` pair.
    The residual is re-evaluated from the returned solution, not taken
    from the factorization.
    """
    if rhs is None:
        matrix, rhs = system.matrix, system.rhs
    else:
        matrix = np.asarray(system, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
    solution, _, _, _ = np.linalg.lstsq(matrix, rhs, rcond=LSTSQ_RCOND)
    residual = float(np.linalg.norm(matrix @ solution - rhs))
    return solution, residual


# ---------------------------------------------------------------------------
# sampling and the experiment loop
# ---------------------------------------------------------------------------

def _open_uniform(rng: np.random.Generator, low: float, high: float, size):
    # uniform() is half-open [low, high); redraw exact boundary hits so the
    # sample stays in the open interval
    while True:
        values = rng.uniform(low, high, size)
        if np.all(values > low):
            return values


def sample_interior_rep(rng) -> ConfigRep:
    """Draw one representation from the interior of the configuration surface.

    Moduli come from the unit box, rejected when the norm falls below
    1e-3, then normalized onto the sphere; phases from the open interval
    (0, 2pi); gaps from (0, 1); couplings from (-1, 1).  Only energy
    ratios matter, so bounded gap and coupling ranges lose no generality.
    ``rng`` is a seed or a ``numpy.random.Generator``; a given seed
    reproduces the sample bitwise.
    """
    rng = np.random.default_rng(rng)
    while True:
        raw = rng.uniform(0.0, 1.0, 4)
        norm = float(np.linalg.norm(raw))
        if norm > 1e-3 and np.all(raw > 0.0):
            break
    moduli = raw / norm
    theta = _open_uniform(rng, 0.0, 2.0 * np.pi, 4)
    omega = _open_uniform(rng, 0.0, 1.0, 2)
    couplings = _open_uniform(rng, -1.0, 1.0, (3, 3))
    return ConfigRep(
        r=moduli, theta=theta, omega_a=omega[0], omega_b=omega[1], h=couplings
    )


@dataclass(frozen=True, eq=False)
class SampleResult:
    """One audited representation with its residual verdict."""

    rep: ConfigRep
    residual_norm: float
    solvable: bool
    solution_norm: float


@dataclass(frozen=True)
class SolvabilityReport:
    """Aggregate outcome of a seeded solvability experiment."""

    n_samples: int
    h_step: float
    threshold: float
    seed: int
    n_solvable: int
    max_residual: float
    median_residual: float
    sampler: str = SAMPLER_ID
    failed_indices: tuple = ()
    samples: tuple | None = None

    def to_json_dict(self, per_sample: bool = False) -> dict:
        """Flat dictionary ready for JSON serialization."""
        out = {
            "n_samples": self.n_samples,
            "h_step": self.h_step,
            "threshold": self.threshold,
            "seed": self.seed,
            "n_solvable": self.n_solvable,
            "max_residual": self.max_residual,
            "median_residual": self.median_residual,
            "sampler": self.sampler,
            "failed_indices": list(self.failed_indices),
        }
        if per_sample:
            if self.samples is None:
                raise ValueError("per-sample data was not kept for this run")
            out["samples"] = [
                [i, s.residual_norm] for i, s in enumerate(self.samples)
            ]
        return out


def run_experiment(
    n: int,
    seed: int,
    h_step: float = 1e-6,
    threshold: float = 1e-12,
    delta_e: float = 1.0,
    keep_samples: bool = False,
) -> SolvabilityReport:
    """Audit ``n`` freshly sampled interior representations.

    Each sample draws from its own substream ``(seed, index)``, so the
    report is identical however the loop is scheduled.  Samples whose
    evaluation turns non-finite are recorded in ``failed_indices`` and
    excluded from ``n_solvable`` rather than aborting the run.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n!r}")
    residuals = []
    failed = []
    samples = []
    n_solvable = 0
    for index in range(n):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
        rep = sample_interior_rep(rng)
        try:
            system = build_system(rep, h_step=h_step, delta_e=delta_e)
            solution, residual = solve_least_squares(system)
        except JacobianEvaluationError:
            failed.append(index)
            continue
        if not np.isfinite(residual):
            failed.append(index)
            continue
        solvable = bool(residual < threshold)
        n_solvable += int(solvable)
        residuals.append(residual)
        if keep_samples:
            samples.append(
                SampleResult(
                    rep=rep,
                    residual_norm=residual,
                    solvable=solvable,
                    solution_norm=float(np.linalg.norm(solution)),
                )
            )
    return SolvabilityReport(
        n_samples=n,
        h_step=float(h_step),
        threshold=float(threshold),
        seed=int(seed),
        n_solvable=n_solvable,
        max_residual=float(np.max(residuals)) if residuals else float("nan"),
        median_residual=float(np.median(residuals)) if residuals else float("nan"),
        failed_indices=tuple(failed),
        samples=tuple(samples) if keep_samples else None,
    )


# ---------------------------------------------------------------------------
# hyperspherical chart of the moduli sphere
# ---------------------------------------------------------------------------

def hyperspherical_forward(moduli):
    """Angles ``(r, alpha, beta, gamma)`` of a moduli 4-vector.

    Inverse of :func:`hyperspherical_backward`; undefined where a sine in
    the chain vanishes (any point with ``R0 = R2 = R3 = 0`` or
    ``R0 = R3 = 0``), which the interior sampler never produces.
    """
    moduli = np.asarray(moduli, dtype=float)
    if moduli.shape != (4,):
        raise ValueError(f"expected 4 moduli, got shape {moduli.shape}")
    radius = float(np.linalg.norm(moduli))
    if radius == 0.0:
        raise ValueError("zero moduli vector has no hyperspherical angles")
    s1 = float(np.sqrt(moduli[0] ** 2 + moduli[2] ** 2 + moduli[3] ** 2))
    s2 = float(np.hypot(moduli[0], moduli[3]))
    if s1 < 1e-12 * radius or s2 < 1e-12 * radius:
        raise ValueError("pathological point: a sine in the angle chain vanishes")
    alpha = float(np.arccos(np.clip(moduli[1] / radius, -1.0, 1.0)))
    beta = float(np.arccos(np.clip(moduli[2] / s1, -1.0, 1.0)))
    gamma = float(np.mod(np.arctan2(moduli[0], moduli[3]), 2.0 * np.pi))
    return radius, alpha, beta, gamma


def hyperspherical_backward(radius: float, alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Moduli 4-vector of hyperspherical angles, ordered ``(R0, R1, R2, R3)``."""
    sin_a, cos_a = np.sin(alpha), np.cos(alpha)
    sin_b, cos_b = np.sin(beta), np.cos(beta)
    sin_g, cos_g = np.sin(gamma), np.cos(gamma)
    return radius * np.array(
        [sin_a * sin_b * sin_g, cos_a, sin_a * cos_b, sin_a * sin_b * cos_g]
    )


def _forward_jacobian(radius, alpha, beta, gamma) -> np.ndarray:
    """d(R0..R3) / d(r, alpha, beta, gamma) of the backward map."""
    sin_a, cos_a = np.sin(alpha), np.cos(alpha)
    sin_b, cos_b = np.sin(beta), np.cos(beta)
    sin_g, cos_g = np.sin(gamma), np.cos(gamma)
    r = radius
    return np.array(
        [
            [sin_a * sin_b * sin_g, r * cos_a * sin_b * sin_g, r * sin_a * cos_b * sin_g, r * sin_a * sin_b * cos_g],
            [cos_a, -r * sin_a, 0.0, 0.0],
            [sin_a * cos_b, r * cos_a * cos_b, -r * sin_a * sin_b, 0.0],
            [sin_a * sin_b * cos_g, r * cos_a * sin_b * cos_g, r * sin_a * cos_b * cos_g, -r * sin_a * sin_b * sin_g],
        ]
    )


def transport_solution(dx, x0) -> np.ndarray:
    """Carry a 19-coordinate solution into the 18 intrinsic coordinates.

    The moduli increments must be tangent to the sphere
    (``|sum R_k dR_k| <= 1e-9``, enforced); they map to the three angle
    increments through the inverted chart Jacobian, in which case the
    radial increment vanishes identically.  The remaining 15 increments
    copy over unchanged.
    """
    x0 = _as_coords(x0)
    dx = np.asarray(dx, dtype=float)
    if dx.shape != (19,):
        raise ValueError(f"expected a 19-coordinate solution, got shape {dx.shape}")
    radial = float(np.dot(x0[:4], dx[:4]))
    if abs(radial) > TANGENCY_TOL:
        raise ValueError(
            f"solution is not tangent to the moduli sphere: |sum R_k dR_k| = {abs(radial):.3e}"
        )
    chart = _forward_jacobian(*hyperspherical_forward(x0[:4]))
    d_angles = np.linalg.inv(chart)[1:] @ dx[:4]
    return np.concatenate([d_angles, dx[4:]])


def _tangent_observables(y: np.ndarray) -> np.ndarray:
    x = np.empty(19)
    x[:4] = hyperspherical_backward(1.0, y[0], y[1], y[2])
    x[4:] = y[3:]
    observables = rep_observables(x)
    # the norm row is identically 1 on the sphere chart
    return np.concatenate([observables[:12], observables[13:]])


def build_tangent_system(x0, h_step: float = 1e-6, delta_e: float = 1.0):
    """13x18 audit system in the intrinsic chart at the same base point.

    Returns ``(matrix, rhs)``.  A transported solution of the
    19-coordinate system must satisfy this one up to finite-difference
    noise; that equivalence is what justifies auditing with the extra
    norm row instead of intrinsic coordinates.
    """
    if delta_e == 0.0:
        raise ValueError("delta_e must be nonzero")
    x0 = _as_coords(x0)
    _, alpha, beta, gamma = hyperspherical_forward(x0[:4])
    y0 = np.concatenate([[alpha, beta, gamma], x0[4:]])
    matrix = numerical_jacobian(_tangent_observables, y0, h_step)
    rhs = np.zeros(13)
    rhs[-1] = float(delta_e)
    return matrix, rhs
