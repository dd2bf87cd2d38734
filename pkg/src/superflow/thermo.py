"""Thermodynamic-limit equation of state for the delta-interacting Bose gas.

The ground-state energy per length obeys the scaling form

    e(rho, c) = rho^3 * e_hat(gamma),      gamma = 2 c / rho,

where e_hat is half the standard dimensionless Lieb function (our kinetic
term is -(1/2) d^2/dx^2, see ``bethe``).  e_hat is computed from the linear
integral equation for the quasimomentum distribution g on [-1, 1],

    g(x) = 1/(2 pi) + (1/pi) int_{-1}^{1} lam / (lam^2 + (x-y)^2) g(y) dy,

discretised with Gauss-Legendre nodes (Nystrom) and closed by locating the
scaled coupling lam for which lam / int g equals the requested gamma.  Then

    e_hat(gamma) = (1/2) * int x^2 g / (int g)^3.

Pressure and compressibility follow by numerical differentiation,

    P = rho e'(rho) - e(rho),      kappa0 = [rho dP/drho]^-1 = [rho^2 e'']^-1,

with 5-point central stencils on a relative step.  A vanishing dP/drho (the
ideal-gas case e = 0) yields kappa0 = inf, the infinite-compressibility
signal; a clearly negative value signals a numerics bug and raises.

Everything here is pure and deterministic for a fixed ``NystromConfig``;
sweep points may be evaluated concurrently.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq

from . import girardeau
from .bethe import LiebLinigerParams, solve_ground

__all__ = [
    "NystromConfig",
    "EosPoint",
    "EquationOfState",
    "FiniteNExtrapolation",
    "CutoffSearchError",
    "NegativeCompressibilityError",
    "dimensionless_ground_energy",
    "eos_integral_equation",
    "eos_finite_n",
    "scaling_collapse",
    "eos_table",
    "ideal_bose_eos",
    "kappa_from_dimensionless",
]

EOS_CSV_HEADER = ("rho", "c", "gamma", "e", "P", "kappa0", "method")


class CutoffSearchError(RuntimeError):
    """The cutoff search could not bracket the requested coupling ratio."""


class NegativeCompressibilityError(RuntimeError):
    """kappa0 came out negative: the differentiation stencil is unreliable."""


@dataclass(frozen=True)
class NystromConfig:
    """Discretisation knobs for the integral-equation solve.

    ``node_count`` Gauss-Legendre nodes are placed on each half of [-1, 1]
    (the kernel is smooth, so the rule is spectrally accurate once its
    width lam is resolved).  ``outer_tolerance`` is the relative tolerance
    of the bracketed search for the scaled coupling.
    """

    node_count: int = 128
    outer_tolerance: float = 1e-12

    def __post_init__(self):
        if self.node_count < 8:
            raise ValueError("node_count must be at least 8")
        if self.outer_tolerance <= 0:
            raise ValueError("outer_tolerance must be positive")


@dataclass(frozen=True)
class EosPoint:
    """Equation-of-state sample at one (rho, c)."""

    rho: float
    coupling_c: float
    e: float
    pressure: float
    kappa0: float
    method: str

    @property
    def gamma(self) -> float:
        return 2.0 * self.coupling_c / self.rho


@dataclass
class EquationOfState:
    """Tabulated e(rho), P(rho), kappa0(rho) at fixed coupling."""

    densities: np.ndarray
    energy_density: np.ndarray
    pressure: np.ndarray
    kappa0: np.ndarray
    coupling_c: float
    method: str

    def __post_init__(self):
        n = len(self.densities)
        if not (len(self.energy_density) == len(self.pressure) == len(self.kappa0) == n):
            raise ValueError("all columns must have the same length")

    def points(self) -> list[EosPoint]:
        return [
            EosPoint(r, self.coupling_c, e, p, k, self.method)
            for r, e, p, k in zip(self.densities, self.energy_density,
                                  self.pressure, self.kappa0)
        ]

    def to_csv(self, float_format: str = "%.12g") -> str:
        buf = io.StringIO()
        buf.write(",".join(EOS_CSV_HEADER) + "\n")
        for pt in self.points():
            row = [float_format % v for v in
                   (pt.rho, pt.coupling_c, pt.gamma, pt.e, pt.pressure, pt.kappa0)]
            buf.write(",".join(row + [pt.method]) + "\n")
        return buf.getvalue()


def _half_interval_rule(node_count: int):
    x, w = leggauss(node_count)
    nodes = np.concatenate((0.5 * (x - 1.0), 0.5 * (x + 1.0)))
    weights = np.concatenate((0.5 * w, 0.5 * w))
    order = np.argsort(nodes)
    return nodes[order], weights[order]


def _solve_distribution(lam: float, nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    kernel = (lam / np.pi) / (lam**2 + (nodes[:, None] - nodes[None, :])**2)
    system = np.eye(nodes.size) - kernel * weights[None, :]
    return np.linalg.solve(system, np.full(nodes.size, 1.0 / (2.0 * np.pi)))


def _gamma_of_lambda(lam, nodes, weights) -> float:
    g = _solve_distribution(lam, nodes, weights)
    norm = float(weights @ g)
    if norm <= 0.0:
        # lam below the resolvable scale of the rule; the exact map has
        # gamma -> 0+ there, so clamp and let the monotone search recover.
        return 0.0
    return lam / norm


def dimensionless_ground_energy(gamma: float, config: NystromConfig | None = None) -> float:
    """e_hat(gamma): ground-state energy density over rho^3.

    Monotone in gamma, with e_hat(0) = 0 and e_hat(inf) = pi^2/6.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    if gamma == 0.0:
        return 0.0
    if math.isinf(gamma):
        return math.pi**2 / 6.0
    config = config or NystromConfig()
    nodes, weights = _half_interval_rule(config.node_count)

    # lam ~ sqrt(gamma)/2 in the weak-coupling regime, lam ~ gamma/pi in the
    # strong one; bracket around the larger estimate and expand if needed.
    lam_est = max(math.sqrt(gamma) / 2.0, gamma / math.pi)
    lo, hi = lam_est / 50.0, lam_est * 50.0
    for _ in range(60):
        if _gamma_of_lambda(lo, nodes, weights) <= gamma:
            break
        lo /= 10.0
    else:
        raise CutoffSearchError(f"no lower bracket for gamma={gamma:g}")
    for _ in range(60):
        if _gamma_of_lambda(hi, nodes, weights) >= gamma:
            break
        hi *= 10.0
    else:
        raise CutoffSearchError(f"no upper bracket for gamma={gamma:g}")

    def mismatch(log_lam: float) -> float:
        return _gamma_of_lambda(math.exp(log_lam), nodes, weights) - gamma

    log_lam = brentq(mismatch, math.log(lo), math.log(hi),
                     xtol=config.outer_tolerance, rtol=8.9e-16)
    g = _solve_distribution(math.exp(log_lam), nodes, weights)
    norm = float(weights @ g)
    second = float(weights @ (nodes**2 * g))
    return 0.5 * second / norm**3


def _energy_stencil(rho: float, coupling_c: float, config: NystromConfig,
                    rel_step: float = 1e-3):
    """e and its first two rho-derivatives from a 5-point central stencil."""
    h = rel_step * rho
    e = [dimensionless_ground_energy(2.0 * coupling_c / (rho + j * h), config)
         * (rho + j * h) ** 3 for j in (-2, -1, 0, 1, 2)]
    de = (e[0] - 8 * e[1] + 8 * e[3] - e[4]) / (12 * h)
    d2e = (-e[0] + 16 * e[1] - 30 * e[2] + 16 * e[3] - e[4]) / (12 * h * h)
    return e[2], de, d2e


def kappa_from_dimensionless(rho: float, dp_drho: float, scale: float) -> float:
    """kappa0 = [rho dP/drho]^-1 with the flat-pressure case mapped to inf.

    ``scale`` sets the noise floor: |dP/drho| below 1e-9*scale is treated as
    flat (infinite compressibility); values below -1e-6*scale raise, since a
    genuinely negative compressibility can only be a numerics failure here.
    """
    floor = max(scale, 1e-300)
    if dp_drho < -1e-6 * floor:
        raise NegativeCompressibilityError(
            f"rho dP/drho = {rho * dp_drho:.3e} < 0 at rho={rho:g}")
    if abs(dp_drho) <= 1e-9 * floor:
        return math.inf
    return 1.0 / (rho * dp_drho)


def eos_integral_equation(rho: float, coupling_c: float,
                          config: NystromConfig | None = None) -> EosPoint:
    """EoS point from the integral-equation solve plus stencil derivatives.

    Infinite coupling routes to the impenetrable-gas closed forms.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    if coupling_c <= 0:
        raise ValueError("coupling_c must be positive (c = 0 has e identically 0)")
    if math.isinf(coupling_c):
        return EosPoint(rho, coupling_c, girardeau.ground_energy_density(rho),
                        girardeau.pressure(rho), girardeau.compressibility(rho),
                        "closed_form")
    config = config or NystromConfig()
    e, de, d2e = _energy_stencil(rho, coupling_c, config)
    pressure = rho * de - e
    kappa0 = kappa_from_dimensionless(rho, rho * d2e, scale=max(abs(e) / rho, 1e-300))
    return EosPoint(rho, coupling_c, e, pressure, kappa0, "integral_equation")


@dataclass(frozen=True)
class FiniteNExtrapolation:
    """Size-extrapolated energy density with a residual-based error bar."""

    e: float
    error: float
    sizes: tuple[int, ...]
    energy_densities: tuple[float, ...]


def eos_finite_n(params_family: Sequence[LiebLinigerParams]) -> FiniteNExtrapolation:
    """Extrapolate E/L to infinite size at fixed density and coupling.

    The leading finite-size correction of the periodic ground state is
    O(1/N^2), so a Neville tableau in x = 1/N^2 is used; the reported error
    is the difference between the two highest extrapolation orders.
    """
    if len(params_family) < 3:
        raise ValueError("need at least 3 system sizes to extrapolate")
    sizes = [p.n_particles for p in params_family]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("system sizes must be strictly increasing")
    rho = params_family[0].density
    c = params_family[0].coupling_c
    for p in params_family[1:]:
        if abs(p.density - rho) > 1e-9 * rho:
            raise ValueError("all sizes must share the same density")
        if p.coupling_c != c:
            raise ValueError("all sizes must share the same coupling")

    values = [solve_ground(p).energy_density for p in params_family]
    x = np.array([1.0 / n**2 for n in sizes])
    tableau = list(values)
    previous_top = tableau[0]
    for order in range(1, len(tableau)):
        previous_top = tableau[0]
        for i in range(len(tableau) - order):
            tableau[i] = tableau[i + 1] + (tableau[i] - tableau[i + 1]) * x[i + order] / (
                x[i + order] - x[i])
    return FiniteNExtrapolation(
        e=float(tableau[0]),
        error=abs(float(tableau[0]) - float(previous_top)),
        sizes=tuple(sizes),
        energy_densities=tuple(float(v) for v in values),
    )


def scaling_collapse(coupling_c: float, rho_grid: Sequence[float],
                     config: NystromConfig | None = None) -> list[tuple[float, float]]:
    """Collapse e(rho, c)/rho^3 onto the single curve e_hat(gamma).

    Returns (gamma, e_hat) pairs sorted by gamma; any (rho, c) with the same
    ratio 2c/rho lands on the same point.
    """
    rho_grid = np.asarray(rho_grid, dtype=float)
    if np.any(rho_grid <= 0):
        raise ValueError("rho_grid must be positive")
    pairs = [(2.0 * coupling_c / rho, dimensionless_ground_energy(2.0 * coupling_c / rho, config))
             for rho in rho_grid]
    return sorted(pairs)


def eos_table(rho_grid: Sequence[float], coupling_c: float,
              config: NystromConfig | None = None,
              point_fn: Callable[[float, float], EosPoint] | None = None) -> EquationOfState:
    """Evaluate the EoS on a density grid (integral equation by default)."""
    point_fn = point_fn or (lambda r, c: eos_integral_equation(r, c, config))
    pts = [point_fn(float(r), coupling_c) for r in rho_grid]
    return EquationOfState(
        densities=np.array([p.rho for p in pts]),
        energy_density=np.array([p.e for p in pts]),
        pressure=np.array([p.pressure for p in pts]),
        kappa0=np.array([p.kappa0 for p in pts]),
        coupling_c=coupling_c,
        method=pts[0].method if pts else "integral_equation",
    )


def ideal_bose_eos(rho_grid: Sequence[float]) -> EquationOfState:
    """Ideal-gas table: e = P = 0 and kappa0 = inf at every density.

    This is the reference violator of the finite-compressibility criterion.
    """
    rho = np.asarray(rho_grid, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("rho_grid must be positive")
    zeros = np.zeros_like(rho)
    kappa = np.array([kappa_from_dimensionless(r, 0.0, scale=1.0) for r in rho])
    return EquationOfState(rho, zeros.copy(), zeros.copy(), kappa,
                           coupling_c=0.0, method="closed_form")
