"""Finite-N Bethe-ansatz solver for the delta-interacting 1D Bose gas.

Hamiltonian convention (hbar = m = 1, periodic box of length L):

    H = -(1/2) sum_i d^2/dx_i^2 + 2c sum_{i<j} delta(x_i - x_j),  c >= 0.

Multiplying by two recovers the standard hbar = 2m = 1 form, so the
quasimomentum roots solve the usual coupled equations with the effective
coupling c_eff = 2c while energies are half the tabulated ones:

    k_j L = 2 pi I_j - sum_l 2 atan((k_j - k_l) / c_eff),
    E = (1/2) sum_j k_j^2,     P = sum_j k_j = (2 pi / L) sum_j I_j.

(Sanity anchor: for N = 2 these equations reduce to k tan(kL/2) = c, the
delta-jump condition of the relative-coordinate problem, and the c -> inf
limit reproduces e = pi^2 rho^3 / 6.)

Ground-state quantum numbers are I_j = j - (N+1)/2: integers for odd N,
half-odd-integers for even N.  The root system is solved by a damped Newton
iteration; at small coupling the solve is warm-started down a geometric
coupling ladder from the free-fermion regime, where the iteration is safely
convergent.  All solves are pure functions of their arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import BranchKind, DispersionBranch

__all__ = [
    "LiebLinigerParams",
    "BetheState",
    "ConvergenceError",
    "ground_quantum_numbers",
    "excited_quantum_numbers",
    "solve_state",
    "solve_ground",
    "solve_excited",
    "dispersion_curve",
]

RESIDUAL_TARGET = 1e-12
RESIDUAL_ACCEPT = 1e-10
MAX_NEWTON_STEPS = 200


class ConvergenceError(RuntimeError):
    """Newton iteration failed; carries the residual history for diagnosis."""

    def __init__(self, message: str, residual_history):
        super().__init__(message)
        self.residual_history = list(residual_history)


@dataclass(frozen=True)
class LiebLinigerParams:
    """N particles on a ring of length L with repulsive coupling c >= 0."""

    n_particles: int
    box_length: float
    coupling_c: float

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be positive")
        if self.box_length <= 0:
            raise ValueError("box_length must be positive")
        if self.coupling_c < 0 or math.isnan(self.coupling_c):
            raise ValueError("coupling_c must be >= 0 (repulsive interaction)")

    @property
    def density(self) -> float:
        return self.n_particles / self.box_length

    @property
    def effective_coupling(self) -> float:
        return 2.0 * self.coupling_c


@dataclass(frozen=True)
class BetheState:
    """Converged root system for one set of quantum numbers."""

    params: LiebLinigerParams
    quantum_numbers: tuple[float, ...]
    roots: np.ndarray
    energy: float
    momentum: float
    residual: float

    @property
    def energy_density(self) -> float:
        return self.energy / self.params.box_length


def ground_quantum_numbers(n_particles: int) -> np.ndarray:
    """I_j = j - (N+1)/2 for j = 1..N, symmetric about zero."""
    n = int(n_particles)
    if n < 1:
        raise ValueError("n_particles must be positive")
    return np.arange(1, n + 1) - (n + 1) / 2.0


def excited_quantum_numbers(n_particles: int, branch: BranchKind, steps: int) -> np.ndarray:
    """Quantum numbers of an m-step elementary excitation.

    Particle branch: the top number moves up by m, adding momentum 2 pi m/L.
    Hole branch: the m-th number counted down from the top is removed and the
    first unoccupied exterior number appended; the momentum is again
    2 pi m / L, and m = N empties the bottom of the sea (the umklapp point).
    m = 0 returns the ground set for either branch.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    numbers = ground_quantum_numbers(n_particles)
    if steps == 0:
        return numbers
    if branch is BranchKind.PARTICLE_TYPE_I:
        numbers[-1] += steps
        return numbers
    if branch is BranchKind.HOLE_TYPE_II:
        if steps > n_particles:
            raise ValueError(f"hole branch needs 1 <= steps <= N, got {steps}")
        numbers = np.delete(numbers, n_particles - steps)
        return np.append(numbers, (n_particles + 1) / 2.0)
    raise ValueError(f"unknown branch {branch!r}")


def _bethe_defect(k: np.ndarray, numbers: np.ndarray, length: float, c_eff: float) -> np.ndarray:
    diffs = k[:, None] - k[None, :]
    theta = 2.0 * np.arctan(diffs / c_eff)
    return k * length - 2.0 * np.pi * numbers + theta.sum(axis=1)


def _bethe_jacobian(k: np.ndarray, length: float, c_eff: float) -> np.ndarray:
    diffs = k[:, None] - k[None, :]
    kernel = 2.0 * c_eff / (c_eff**2 + diffs**2)
    np.fill_diagonal(kernel, 0.0)
    jac = -kernel
    jac[np.diag_indices_from(jac)] = length + kernel.sum(axis=1)
    return jac


def _newton_solve(k0: np.ndarray, numbers: np.ndarray, length: float, c_eff: float):
    """Damped Newton on the root vector; residual measured in root space."""
    k = k0.copy()
    defect = _bethe_defect(k, numbers, length, c_eff)
    history = [np.max(np.abs(defect)) / length]
    for _ in range(MAX_NEWTON_STEPS):
        if history[-1] < RESIDUAL_TARGET:
            return k, history
        step = np.linalg.solve(_bethe_jacobian(k, length, c_eff), -defect)
        damping = 1.0
        while damping > 1e-6:
            trial = k + damping * step
            trial_defect = _bethe_defect(trial, numbers, length, c_eff)
            if np.max(np.abs(trial_defect)) / length <= (1 - 0.5 * damping) * history[-1]:
                break
            damping *= 0.5
        k = k + damping * step
        defect = _bethe_defect(k, numbers, length, c_eff)
        history.append(np.max(np.abs(defect)) / length)
    if history[-1] < RESIDUAL_ACCEPT:
        return k, history
    raise ConvergenceError(
        f"Bethe iteration stalled at residual {history[-1]:.3e} (c_eff={c_eff:g})",
        history,
    )


def solve_state(params: LiebLinigerParams, quantum_numbers) -> BetheState:
    """Solve the coupled root equations for an arbitrary distinct I_j set.

    Small couplings are reached by continuation: the free-fermion roots
    initialise a solve at a comfortably large coupling and the solution is
    walked down a geometric ladder to the requested value, bisecting any
    rung the damped Newton iteration rejects.
    """
    numbers = np.sort(np.asarray(quantum_numbers, dtype=float))
    if numbers.shape != (params.n_particles,):
        raise ValueError("need exactly one quantum number per particle")
    if np.any(np.diff(numbers) < 1 - 1e-12):
        raise ValueError("quantum numbers must be distinct (integer-spaced)")
    length = params.box_length
    c_eff = params.effective_coupling

    free_roots = 2.0 * np.pi * numbers / length
    if c_eff == 0.0:
        if not np.array_equal(numbers, ground_quantum_numbers(params.n_particles)):
            raise ValueError(
                "c = 0 supports only the ground state here (the root equations "
                "degenerate for excited configurations as c -> 0)"
            )
        roots = np.zeros(params.n_particles)
        return _finish_state(params, numbers, roots, residual=0.0)
    if math.isinf(c_eff):
        return _finish_state(params, numbers, free_roots, residual=0.0)

    spread = 2.0 * np.pi * (np.max(np.abs(numbers)) + 1.0) / length
    c_start = max(c_eff, 50.0 * spread)
    ladder = [c_eff]
    while ladder[-1] < c_start:
        ladder.append(min(ladder[-1] * 4.0, c_start))
    ladder.reverse()

    k = free_roots
    i = 0
    pending: list[float] = []
    c_prev = None
    while i < len(ladder) or pending:
        c_rung = pending.pop() if pending else ladder[i]
        try:
            k, history = _newton_solve(k, numbers, length, c_rung)
        except ConvergenceError:
            if c_prev is None or (c_prev / c_rung) < 1.0000001:
                raise
            # rung too steep: insert the geometric midpoint and retry
            pending.append(c_rung)
            pending.append(math.sqrt(c_prev * c_rung))
            continue
        c_prev = c_rung
        if not pending:
            i += 1
    return _finish_state(params, numbers, k, residual=history[-1])


def _finish_state(params, numbers, roots, residual) -> BetheState:
    order = np.argsort(roots)
    roots = roots[order]
    energy = 0.5 * float(np.sum(roots**2))
    momentum = float(np.sum(roots))
    return BetheState(
        params=params,
        quantum_numbers=tuple(numbers.tolist()),
        roots=roots,
        energy=energy,
        momentum=momentum,
        residual=float(residual),
    )


def solve_ground(params: LiebLinigerParams) -> BetheState:
    """Ground state: symmetric quantum numbers, zero total momentum."""
    return solve_state(params, ground_quantum_numbers(params.n_particles))


def solve_excited(params: LiebLinigerParams, branch: BranchKind, steps: int) -> BetheState:
    """m-step elementary excitation on the chosen branch (m = 0: ground)."""
    numbers = excited_quantum_numbers(params.n_particles, branch, steps)
    return solve_state(params, numbers)


def dispersion_curve(params: LiebLinigerParams, branch: BranchKind,
                     max_steps: int, step_stride: int = 1) -> DispersionBranch:
    """Sampled (P, E - E0) curve for m = 0 .. max_steps excitations.

    ``step_stride`` thins the sampling (every stride-th m plus the endpoint);
    momenta come out as exact multiples of 2 pi / L.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    if branch is BranchKind.HOLE_TYPE_II and max_steps > params.n_particles:
        raise ValueError("hole branch is only defined up to max_steps = N")
    ground = solve_ground(params)
    ks = [0.0]
    eps = [0.0]
    steps = list(range(step_stride, max_steps + 1, step_stride))
    if max_steps > 0 and (not steps or steps[-1] != max_steps):
        steps.append(max_steps)
    for m in steps:
        state = solve_excited(params, branch, m)
        ks.append(state.momentum - ground.momentum)
        eps.append(max(state.energy - ground.energy, 0.0))
    return DispersionBranch(branch, params.density, np.array(ks), np.array(eps))
