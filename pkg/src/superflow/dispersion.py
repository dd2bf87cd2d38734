"""Excitation-branch containers and closed-form dispersion curves.

A dispersion branch is a sampled curve epsilon(k) of elementary-excitation
energies above the ground state, tagged with the branch it was taken from.
Two branches exist for the delta-interacting Bose gas: the particle branch
(type I, a quasimomentum pushed above the Fermi-like sea) and the hole branch
(type II, an interior quasimomentum promoted past the edge).  Only k >= 0 is
stored; the boost direction is folded out by the consumers in ``landau``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BranchKind",
    "DispersionBranch",
    "girardeau_branch",
    "girardeau_hole_branch",
    "free_particle_branch",
]


class BranchKind(enum.Enum):
    """The two elementary-excitation branches; the choice is never implicit."""

    PARTICLE_TYPE_I = "particle"
    HOLE_TYPE_II = "hole"

    @classmethod
    def from_label(cls, label: str) -> "BranchKind":
        for kind in cls:
            if kind.value == label:
                return kind
        raise ValueError(f"unknown branch {label!r}; expected 'particle' or 'hole'")


@dataclass(frozen=True)
class DispersionBranch:
    """Sampled excitation curve epsilon(k) at fixed density.

    Invariants enforced on construction: the k = 0, epsilon = 0 point is
    present, k is strictly increasing and epsilon is nonnegative (the curve
    is measured from the ground state).
    """

    branch: BranchKind
    density: float
    k: np.ndarray = field(repr=False)
    epsilon: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        eps = np.asarray(self.epsilon, dtype=float)
        if k.ndim != 1 or k.shape != eps.shape:
            raise ValueError("k and epsilon must be 1-d arrays of equal length")
        if k.size == 0 or k[0] != 0.0 or eps[0] != 0.0:
            raise ValueError("dispersion curve must start at the (0, 0) sample")
        if np.any(np.diff(k) <= 0):
            raise ValueError("k samples must be strictly increasing")
        if np.any(eps < 0):
            raise ValueError("epsilon must be nonnegative on a ground-state branch")
        if self.density < 0:
            raise ValueError("density must be nonnegative")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "epsilon", eps)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.k.tolist(), self.epsilon.tolist()))

    def __len__(self) -> int:
        return self.k.size


def _k_grid(k_min: float, k_max: float, num: int, spacing: str) -> np.ndarray:
    if spacing == "log":
        interior = np.geomspace(k_min, k_max, num)
    elif spacing == "linear":
        interior = np.linspace(k_min, k_max, num)
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    return np.concatenate(([0.0], interior))


def girardeau_branch(rho: float, k_max: float | None = None, num: int = 200,
                     k_min: float | None = None, spacing: str = "log") -> DispersionBranch:
    """Hard-core particle branch epsilon(k) = k^2/2 + pi*rho*k in closed form.

    The default grid is log-spaced from 1e-6*rho so the k -> 0 slope is well
    resolved; all defaults scale linearly with rho, which keeps the curve an
    exact rescaling of the rho = 1 one.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if k_max is None:
        k_max = 4.0 * np.pi * rho
    if k_min is None:
        k_min = 1e-6 * rho
    k = _k_grid(k_min, k_max, num, spacing)
    eps = 0.5 * k**2 + np.pi * rho * k
    return DispersionBranch(BranchKind.PARTICLE_TYPE_I, rho, k, eps)


def girardeau_hole_branch(rho: float, num: int = 200) -> DispersionBranch:
    """Hard-core hole branch epsilon(k) = pi*rho*k - k^2/2 on [0, 2*pi*rho]."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    kf = np.pi * rho
    k = np.linspace(0.0, 2.0 * kf, num)
    eps = kf * k - 0.5 * k**2
    eps[-1] = 0.0  # exact umklapp endpoint, no roundoff residue
    return DispersionBranch(BranchKind.HOLE_TYPE_II, rho, k, eps)


def free_particle_branch(k_max: float = 10.0, num: int = 200,
                         k_min: float = 1e-6, density: float = 1.0) -> DispersionBranch:
    """Ideal-gas curve epsilon(k) = k^2/2 (no interaction, zero sound speed)."""
    k = _k_grid(k_min, k_max, num, "log")
    return DispersionBranch(BranchKind.PARTICLE_TYPE_I, density, k, 0.5 * k**2)
