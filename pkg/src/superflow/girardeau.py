"""Closed forms for the hard-core (impenetrable) limit of the 1D Bose gas.

Units: hbar = mass = 1, kinetic energy -(1/2) d^2/dx^2.  In these units the
impenetrable gas maps onto free fermions, the Fermi wavenumber is pi*rho, and
the whole zero-temperature thermodynamics follows from the filled Fermi sea:

    e(rho)    = pi^2 rho^3 / 6        ground-state energy per length
    P(rho)    = pi^2 rho^3 / 3        pressure, rho*e' - e
    kappa0    = 1 / (pi^2 rho^3)      compressibility, [rho dP/drho]^-1
    v_s(rho)  = pi rho                sound velocity, (rho*kappa0)^-1/2

Literature tables in the hbar = 2m = 1 convention are twice these energies.
All functions are pure; evaluating them concurrently is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FermiSeaConfig",
    "fermi_momentum",
    "excitation_energy",
    "ground_energy_density",
    "pressure",
    "compressibility",
    "sound_velocity_closed",
    "ground_modes",
    "bose_wavefunction",
]


def _check_density(rho: float) -> float:
    rho = float(rho)
    if rho < 0:
        raise ValueError(f"density must be nonnegative, got {rho}")
    return rho


def fermi_momentum(rho: float) -> float:
    """Fermi wavenumber pi*rho of the mapped free-fermion sea."""
    return math.pi * _check_density(rho)


def excitation_energy(rho: float, p: float) -> float:
    """Particle-branch excitation energy p^2/2 + k_F*|p|, even in p."""
    return 0.5 * p * p + fermi_momentum(rho) * abs(p)


def ground_energy_density(rho: float) -> float:
    """Ground-state energy per unit length, pi^2 rho^3 / 6."""
    rho = _check_density(rho)
    return math.pi**2 * rho**3 / 6.0


def pressure(rho: float) -> float:
    """Zero-temperature pressure rho*e'(rho) - e(rho) = pi^2 rho^3 / 3."""
    rho = _check_density(rho)
    return math.pi**2 * rho**3 / 3.0


def compressibility(rho: float) -> float:
    """Compressibility [rho dP/drho]^-1 = 1/(pi^2 rho^3).

    rho = 0 returns math.inf: the infinite-compressibility signal that marks
    the finite-compressibility criterion as violated (ideal-gas behaviour).
    """
    rho = _check_density(rho)
    if rho == 0.0:
        return math.inf
    return 1.0 / (math.pi**2 * rho**3)


def sound_velocity_closed(rho: float) -> float:
    """Sound velocity pi*rho; equals both k_F and (rho*kappa0)^-1/2."""
    return fermi_momentum(rho)


def ground_modes(n_particles: int) -> tuple[int, ...]:
    """Symmetric ground filling of integer plane-wave modes.

    Odd N fills {-(N-1)/2, ..., (N-1)/2}.  Even N is doubly degenerate; we
    fix {-N/2+1, ..., N/2} so outputs are deterministic (k_F = pi(N-1)/L
    still holds asymptotically).
    """
    n = int(n_particles)
    if n < 1:
        raise ValueError("n_particles must be positive")
    if n % 2 == 1:
        half = (n - 1) // 2
        return tuple(range(-half, half + 1))
    return tuple(range(-n // 2 + 1, n // 2 + 1))


@dataclass(frozen=True)
class FermiSeaConfig:
    """Plane-wave occupation of the mapped free-fermion system.

    ``occupied_modes`` are integers m_j; the corresponding momenta are
    2 pi m_j / box_length.
    """

    n_particles: int
    box_length: float
    occupied_modes: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "occupied_modes", tuple(int(m) for m in self.occupied_modes))
        if self.n_particles < 1:
            raise ValueError("n_particles must be positive")
        if self.box_length <= 0:
            raise ValueError("box_length must be positive")
        if len(self.occupied_modes) != self.n_particles:
            raise ValueError("need exactly one occupied mode per particle")
        if len(set(self.occupied_modes)) != self.n_particles:
            raise ValueError("occupied modes must be pairwise distinct")

    @classmethod
    def ground_state(cls, n_particles: int, box_length: float) -> "FermiSeaConfig":
        return cls(n_particles, box_length, ground_modes(n_particles))

    @property
    def is_ground_filling(self) -> bool:
        return tuple(sorted(self.occupied_modes)) == ground_modes(self.n_particles)


def bose_wavefunction(config: FermiSeaConfig, positions) -> complex:
    """Bose-mapped amplitude A * psi^F at the given particle positions.

    psi^F is the Slater determinant of normalised plane waves
    exp(2 pi i m x / L)/sqrt(L) over the occupied modes (including the
    1/sqrt(N!) determinant normalisation), and A = prod_{j<l} sgn(x_j - x_l)
    restores Bose symmetry.  For the ground filling the product is |psi^F|,
    which is the nonnegative ground-state amplitude.

    Coincident positions hit the hard-core node and return exactly 0.
    """
    x = np.asarray(positions, dtype=float)
    if x.shape != (config.n_particles,):
        raise ValueError(f"expected {config.n_particles} positions, got shape {x.shape}")
    length = config.box_length
    if np.any(x < 0) or np.any(x >= length):
        raise ValueError("positions must lie in [0, box_length)")
    diffs = x[:, None] - x[None, :]
    if np.any((diffs == 0) & ~np.eye(config.n_particles, dtype=bool)):
        return 0j

    modes = np.asarray(config.occupied_modes, dtype=float)
    slater = np.exp(2j * np.pi * np.outer(x, modes) / length) / math.sqrt(length)
    psi_f = complex(np.linalg.det(slater)) / math.sqrt(math.factorial(config.n_particles))
    if config.is_ground_filling:
        return complex(abs(psi_f))
    upper = np.triu_indices(config.n_particles, k=1)
    sign = float(np.prod(np.sign(diffs[upper])))
    return sign * psi_f
