"""Energy increment of a locally modified current-carrying state.

A uniform state with density n_bar, kinetic-energy density t_bar and drift
speed v is modified inside nested shells of radii R, R+a, R+b, R+c: the
occupation is scaled by a radial envelope g (1 inside R and outside R+c,
0 on the evacuated shell between R+a and R+b) and the drift is cancelled by
a local counter-boost inside R+a.  The resulting energy change splits into
three terms,

    T1 = -(1/2) n_bar v^2  int_{|x| < R+a} g^2
    T2 = int_{shell} [ t_bar (g^2 - 1) + (1/2) n_bar |grad g|^2 ]
    T3 = int int [ g(x)^2 g(y)^2 - 1 ] n2(x-y) V(x-y)

with T1 <= 0 and T3 <= 0 by construction (g <= 1, V >= 0, pair density
n2 >= 0).  T1 grows like the enclosed volume R^d while T2 and T3 grow like
the shell area R^(d-1), so the total is negative for every sufficiently
large R: uniform flow is always unstable against some local modification.
This module makes that statement quantitative for d = 1 and d = 3.

T3 is evaluated through the occupation deficit s = 1 - g^2 (supported on the
shell only), using

    T3 = -2 W int s  +  int int s(x) s(y) w(|x-y|) dx dy,
    w = n2 * V,  W = int_{R^d} w,

which is algebraically identical to expanding g^2 g^2 - 1 and keeps the
nonpositivity manifest.  For d = 3 the double integral reduces by bipolar
coordinates to a 2-d radial quadrature.  All quadratures are composite
Gauss-Legendre with panels split at the shell radii, so the envelope's
derivative kinks never straddle a panel.  Everything is pure; points of an
R- or v-sweep can be evaluated concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "ShellConfig",
    "ProfilePair",
    "UniformCurrentState",
    "PairInteraction",
    "ProfileError",
    "EnergyBreakdown",
    "InstabilitySearch",
    "ExponentFit",
    "cosine_ramp_profiles",
    "identity_profiles",
    "validate_profiles",
    "energy_increment",
    "find_instability_radius",
    "scaling_exponents",
    "fit_power_law",
    "breakdown_table_csv",
]

SUPPORTED_DIMENSIONS = (1, 3)
DE_CSV_HEADER = ("R", "T1", "T2", "T3", "dE")


class ProfileError(ValueError):
    """Envelope violates the admissibility conditions for the shells."""


@dataclass(frozen=True)
class ShellConfig:
    """Nested shells of radii R < R+a < R+b < R+c_shell.

    The offsets a, b, c_shell stay fixed while R sweeps; in d = 1 the
    "spheres" are the symmetric intervals [-r, r].
    """

    dimension: int
    inner_radius: float
    a: float = 1.0
    b: float = 2.0
    c_shell: float = 3.0

    def __post_init__(self):
        if self.dimension not in SUPPORTED_DIMENSIONS:
            raise ValueError(f"dimension must be one of {SUPPORTED_DIMENSIONS}")
        if self.inner_radius <= 0:
            raise ValueError("inner_radius must be positive")
        if not (0 < self.a < self.b < self.c_shell):
            raise ValueError("offsets must satisfy 0 < a < b < c_shell")

    @property
    def r1(self) -> float:
        return self.inner_radius + self.a

    @property
    def r2(self) -> float:
        return self.inner_radius + self.b

    @property
    def r3(self) -> float:
        return self.inner_radius + self.c_shell

    def with_inner_radius(self, radius: float) -> "ShellConfig":
        return replace(self, inner_radius=radius)


@dataclass(frozen=True)
class ProfilePair:
    """Radial envelope g (with derivative) and local boost phase h.

    ``h`` only matters inside R+b: the energy expression already reflects
    that its values on the evacuated shell are irrelevant, so ``h`` enters
    validation and reporting but not the quadrature.
    """

    g: Callable[[np.ndarray], np.ndarray]
    h: Callable[[np.ndarray], np.ndarray]
    grad_g_bound: float
    dg: Callable[[np.ndarray], np.ndarray] | None = None

    def gradient(self, r: np.ndarray) -> np.ndarray:
        if self.dg is not None:
            return np.asarray(self.dg(r), dtype=float)
        step = 1e-6 * max(1.0, float(np.max(np.abs(r))))
        return (np.asarray(self.g(r + step)) - np.asarray(self.g(r - step))) / (2 * step)


@dataclass(frozen=True)
class UniformCurrentState:
    """Translation-invariant state: constant density, kinetic density, drift.

    ``pair_correlation`` is the radial pair density n2(r) >= 0; None means
    the uncorrelated value n_bar^2.
    """

    n_bar: float
    t_bar: float
    drift_v: float
    pair_correlation: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.n_bar) and math.isfinite(self.t_bar)
                and math.isfinite(self.drift_v)):
            raise ValueError("n_bar, t_bar and drift_v must be finite")
        if self.n_bar < 0 or self.t_bar < 0:
            raise ValueError("n_bar and t_bar must be nonnegative")

    def pair_density(self, r: np.ndarray) -> np.ndarray:
        if self.pair_correlation is None:
            return np.full_like(np.asarray(r, dtype=float), self.n_bar**2)
        values = np.asarray(self.pair_correlation(np.asarray(r, dtype=float)), dtype=float)
        if np.any(values < 0):
            raise ValueError("pair density must be nonnegative")
        return values


@dataclass(frozen=True)
class PairInteraction:
    """Nonnegative radial two-body potential with compact support.

    Compact support is a deliberate narrowing: it localises the interaction
    term to a neighbourhood of the shell, which is what makes deterministic
    quadrature (rather than sampling) viable.
    """

    v: Callable[[np.ndarray], np.ndarray] | None
    support_radius: float

    def __post_init__(self):
        if self.support_radius < 0 or not math.isfinite(self.support_radius):
            raise ValueError("support_radius must be finite and nonnegative")

    @classmethod
    def zero(cls) -> "PairInteraction":
        return cls(v=None, support_radius=0.0)

    @classmethod
    def smooth_bump(cls, amplitude: float = 1.0, support_radius: float = 0.5) -> "PairInteraction":
        """C-infinity mollifier bump: amplitude * exp(1 - 1/(1 - (r/r0)^2))."""
        if amplitude < 0:
            raise ValueError("amplitude must be nonnegative")

        def bump(r):
            r = np.asarray(r, dtype=float)
            inside = np.abs(r) < support_radius
            out = np.zeros_like(r)
            u2 = np.square(np.where(inside, r / support_radius, 0.0))
            out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - u2[inside]))
            return out

        return cls(v=bump, support_radius=support_radius)

    @classmethod
    def hard_bump(cls, amplitude: float = 1.0, support_radius: float = 0.5) -> "PairInteraction":
        """Top-hat potential: amplitude inside the support radius, 0 outside."""
        if amplitude < 0:
            raise ValueError("amplitude must be nonnegative")

        def top_hat(r):
            r = np.asarray(r, dtype=float)
            return np.where(np.abs(r) < support_radius, amplitude, 0.0)

        return cls(v=top_hat, support_radius=support_radius)

    @property
    def is_zero(self) -> bool:
        return self.v is None or self.support_radius == 0.0

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        if self.is_zero:
            return np.zeros_like(r)
        values = np.where(np.abs(r) <= self.support_radius,
                          np.asarray(self.v(r), dtype=float), 0.0)
        if np.any(values < 0):
            raise ValueError("interaction must be nonnegative")
        return values


def _smoothstep(u: np.ndarray) -> np.ndarray:
    """Quintic smoothstep on [0, 1]: zero slope at both ends."""
    u = np.clip(u, 0.0, 1.0)
    return u**3 * (10.0 - 15.0 * u + 6.0 * u**2)


def cosine_ramp_profiles(shells: ShellConfig, speed: float) -> ProfilePair:
    """Default admissible envelope: half-cosine ramps into and out of the hole.

    g falls 1 -> 0 over [R, R+a], stays 0 on the evacuated shell, and rises
    0 -> 1 over [R+b, R+c]; |g'| is bounded by pi/(2*width) independently of
    R.  h interpolates the counter-boost phase -v*x to 0 across the
    evacuated shell with a quintic smoothstep (any bounded choice would do
    there).
    """
    r0, r1, r2, r3 = shells.inner_radius, shells.r1, shells.r2, shells.r3
    w_down = r1 - r0
    w_up = r3 - r2

    def g(r):
        r = np.abs(np.asarray(r, dtype=float))
        down = 0.5 * (1.0 + np.cos(np.pi * (r - r0) / w_down))
        up = 0.5 * (1.0 - np.cos(np.pi * (r - r2) / w_up))
        return np.select(
            [r <= r0, r < r1, r <= r2, r < r3],
            [1.0, down, 0.0, up],
            default=1.0,
        )

    def dg(r):
        r = np.abs(np.asarray(r, dtype=float))
        down = -0.5 * np.pi / w_down * np.sin(np.pi * (r - r0) / w_down)
        up = 0.5 * np.pi / w_up * np.sin(np.pi * (r - r2) / w_up)
        return np.select([r <= r0, r < r1, r <= r2, r < r3],
                         [0.0, down, 0.0, up], default=0.0)

    def h(r):
        r = np.asarray(r, dtype=float)
        ramp = 1.0 - _smoothstep((np.abs(r) - r1) / (r2 - r1))
        return np.where(np.abs(r) <= r1, -speed * r,
                        np.where(np.abs(r) >= r2, 0.0, -speed * r * ramp))

    bound = 0.5 * np.pi * max(1.0 / w_down, 1.0 / w_up)
    return ProfilePair(g=g, h=h, grad_g_bound=bound, dg=dg)


def identity_profiles() -> ProfilePair:
    """g identically 1 and h identically 0: the do-nothing modification.

    Not admissible for the instability construction (it does not evacuate
    the shell), but useful as the exact-zero reference with validation off.
    """
    return ProfilePair(
        g=lambda r: np.ones_like(np.asarray(r, dtype=float)),
        h=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        grad_g_bound=0.0,
        dg=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
    )


def validate_profiles(shells: ShellConfig, profiles: ProfilePair,
                      samples_per_region: int = 64) -> None:
    """Reject envelopes that break the admissibility conditions.

    Checks, on dense samples: g in [0, 1] everywhere, g = 1 inside R and
    beyond R+c, g = 0 on the evacuated shell, and |g'| within the declared
    R-independent bound.
    """
    r0, r1, r2, r3 = shells.inner_radius, shells.r1, shells.r2, shells.r3
    eps = 1e-9

    def sample(lo, hi):
        return np.linspace(lo, hi, samples_per_region)

    everywhere = np.concatenate([sample(0.0, r3 + 2.0), sample(r0, r3)])
    g_all = np.asarray(profiles.g(everywhere), dtype=float)
    if np.any(g_all < -eps) or np.any(g_all > 1 + eps):
        raise ProfileError("g must map into [0, 1]")
    inner = np.asarray(profiles.g(sample(0.0, r0)), dtype=float)
    outer = np.asarray(profiles.g(sample(r3, r3 + 2.0)), dtype=float)
    if np.any(np.abs(inner - 1.0) > eps) or np.any(np.abs(outer - 1.0) > eps):
        raise ProfileError("g must equal 1 inside the core and beyond the outer shell")
    hole = np.asarray(profiles.g(sample(r1, r2)), dtype=float)
    if np.any(np.abs(hole) > eps):
        raise ProfileError("g must vanish on the evacuated shell")
    grad = np.abs(profiles.gradient(sample(r0, r3)))
    if np.any(grad > profiles.grad_g_bound * (1 + 1e-6) + eps):
        raise ProfileError(
            f"|grad g| reaches {grad.max():.6g}, above the declared bound "
            f"{profiles.grad_g_bound:.6g}")


def _panel_rule(breakpoints: Sequence[float], nodes_per_panel: int):
    """Composite Gauss-Legendre nodes/weights over consecutive panels."""
    x, w = leggauss(nodes_per_panel)
    nodes, weights = [], []
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        if hi <= lo:
            continue
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        nodes.append(mid + half * x)
        weights.append(half * w)
    if not nodes:
        return np.array([]), np.array([])
    return np.concatenate(nodes), np.concatenate(weights)


def _surface_factor(dimension: int, r: np.ndarray) -> np.ndarray:
    if dimension == 1:
        return np.full_like(r, 2.0)  # both mirror points of the 1-d "sphere"
    return 4.0 * np.pi * r**2


def _interaction_total(state: UniformCurrentState, interaction: PairInteraction,
                       dimension: int, nodes_per_panel: int) -> float:
    """W = int_{R^d} n2(|z|) V(|z|) dz over the compact support."""
    r, w = _panel_rule([0.0, interaction.support_radius], 2 * nodes_per_panel)
    if r.size == 0:
        return 0.0
    wvals = state.pair_density(r) * interaction.evaluate(r)
    if dimension == 1:
        return 2.0 * float(w @ wvals)
    return 4.0 * np.pi * float(w @ (r**2 * wvals))


def _deficit_double_integral(state, shells, profiles, interaction,
                             nodes_per_panel) -> float:
    """int int s(x) s(y) w(|x-y|) dx dy over the shell, s = 1 - g^2."""
    r0, r1, r2, r3 = shells.inner_radius, shells.r1, shells.r2, shells.r3
    r, w = _panel_rule([r0, r1, r2, r3], nodes_per_panel)
    s = 1.0 - np.asarray(profiles.g(r), dtype=float) ** 2

    if shells.dimension == 1:
        def kernel_block(sign: float) -> float:
            sep = np.abs(r[:, None] - sign * r[None, :])
            kern = state.pair_density(sep) * interaction.evaluate(sep)
            return float((w * s) @ kern @ (w * s))

        same_side = kernel_block(+1.0)
        # opposite mirror components only interact when the support spans 2R
        cross = kernel_block(-1.0) if interaction.support_radius > 2 * r0 else 0.0
        return 2.0 * (same_side + cross)

    # d = 3: bipolar reduction of the radial double integral
    lower = np.abs(r[:, None] - r[None, :])
    upper = r[:, None] + r[None, :]
    moment = _interaction_moment_pair(state, interaction, lower, upper)
    outer = (w * r * s)
    return 8.0 * np.pi**2 * float(outer @ moment @ outer)


def _interaction_moment_pair(state, interaction, lower, upper, nodes: int = 32):
    """int t w(t) dt between the bipolar limits, with w = n2 * V."""
    lo = np.minimum(np.maximum(lower, 0.0), interaction.support_radius)
    hi = np.minimum(upper, interaction.support_radius)
    hi = np.maximum(hi, lo)
    x, gl_w = leggauss(nodes)
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    t = mid[..., None] + half[..., None] * x
    integrand = t * state.pair_density(t) * interaction.evaluate(t)
    return half * np.sum(gl_w * integrand, axis=-1)


@dataclass(frozen=True)
class EnergyBreakdown:
    """Per-term decomposition of the energy increment at one radius."""

    inner_radius: float
    t1: float
    t2: float
    t3: float
    t2_kinetic: float
    t2_gradient: float

    @property
    def total(self) -> float:
        return self.t1 + self.t2 + self.t3

    def row(self) -> tuple[float, float, float, float, float]:
        return (self.inner_radius, self.t1, self.t2, self.t3, self.total)


def energy_increment(state: UniformCurrentState, shells: ShellConfig,
                     profiles: ProfilePair | None = None,
                     interaction: PairInteraction | None = None,
                     nodes_per_panel: int = 32,
                     validate: bool = True) -> EnergyBreakdown:
    """Evaluate the three-term energy increment and its breakdown.

    ``validate=False`` skips the admissibility check, which permits exact
    reference cases such as the identity envelope.
    """
    if profiles is None:
        profiles = cosine_ramp_profiles(shells, state.drift_v)
    if interaction is None:
        interaction = PairInteraction.zero()
    if validate:
        validate_profiles(shells, profiles)

    r0, r1, r2, r3 = shells.inner_radius, shells.r1, shells.r2, shells.r3
    d = shells.dimension

    # T1 over the ball of radius R+a (g = 1 on the core panel, exact for GL)
    r, w = _panel_rule([0.0, r0, r1], nodes_per_panel)
    g2 = np.asarray(profiles.g(r), dtype=float) ** 2
    t1 = -0.5 * state.n_bar * state.drift_v**2 * float(w @ (_surface_factor(d, r) * g2))

    # T2 over the full shell
    r, w = _panel_rule([r0, r1, r2, r3], nodes_per_panel)
    g2 = np.asarray(profiles.g(r), dtype=float) ** 2
    grad2 = profiles.gradient(r) ** 2
    surface = _surface_factor(d, r)
    t2_kin = state.t_bar * float(w @ (surface * (g2 - 1.0)))
    t2_grad = 0.5 * state.n_bar * float(w @ (surface * grad2))

    # T3 via the occupation deficit
    if interaction.is_zero:
        t3 = 0.0
    else:
        s = 1.0 - g2
        deficit = float(w @ (surface * s))
        total_w = _interaction_total(state, interaction, d, nodes_per_panel)
        t3 = -2.0 * total_w * deficit + _deficit_double_integral(
            state, shells, profiles, interaction, nodes_per_panel)

    return EnergyBreakdown(inner_radius=r0, t1=t1, t2=t2_kin + t2_grad, t3=t3,
                           t2_kinetic=t2_kin, t2_gradient=t2_grad)


@dataclass(frozen=True)
class InstabilitySearch:
    """Outcome of the search for the onset radius of negative increment."""

    found: bool
    r_star: float | None
    table: tuple[tuple[float, float], ...]
    reason: str = ""
    tail_ok: bool | None = None


def find_instability_radius(state: UniformCurrentState, shells_template: ShellConfig,
                            interaction: PairInteraction | None = None,
                            profile_builder: Callable[[ShellConfig], ProfilePair] | None = None,
                            r_start: float = 1.0, r_max: float = 1e6,
                            rel_tol: float = 0.01,
                            nodes_per_panel: int = 32) -> InstabilitySearch:
    """Smallest R with a negative energy increment, to 1% by bisection.

    The bracket is found by doubling from ``r_start`` (or halving, when the
    increment is already negative there).  A zero drift never destabilises:
    that case is reported, not raised.  If no sign change appears up to
    ``r_max`` the table of evaluated increments is returned as a diagnostic
    (the drift is too small for the gradient barrier).
    """
    if profile_builder is None:
        profile_builder = lambda shells: cosine_ramp_profiles(shells, state.drift_v)

    def increment(radius: float) -> float:
        shells = shells_template.with_inner_radius(radius)
        return energy_increment(state, shells, profile_builder(shells),
                                interaction, nodes_per_panel).total

    table: list[tuple[float, float]] = []

    def de(radius: float) -> float:
        value = increment(radius)
        table.append((radius, value))
        return value

    if state.drift_v == 0.0:
        de(r_start)
        return InstabilitySearch(found=False, r_star=None, table=tuple(table),
                                 reason="zero drift velocity: the bulk gain term vanishes")

    r_floor = 1e-3 * shells_template.a
    hi = r_start
    val_hi = de(hi)
    if val_hi < 0.0:
        lo = hi
        while lo > r_floor:
            candidate = lo / 2.0
            if de(candidate) >= 0.0:
                lo = candidate
                break
            lo = candidate
        else:
            lo = r_floor
        if increment(lo) < 0.0:
            return InstabilitySearch(found=True, r_star=lo, table=tuple(sorted(table)),
                                     reason="increment negative down to the minimal radius",
                                     tail_ok=increment(2 * lo) < increment(lo))
    else:
        lo = hi
        while val_hi >= 0.0:
            hi *= 2.0
            if hi > r_max:
                return InstabilitySearch(
                    found=False, r_star=None, table=tuple(sorted(table)),
                    reason=f"no sign change up to r_max={r_max:g} "
                           "(drift too small relative to the gradient barrier)")
            lo = hi / 2.0
            val_hi = de(hi)

    while (hi - lo) > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if de(mid) < 0.0:
            hi = mid
        else:
            lo = mid
    r_star = hi
    tail_ok = increment(2 * r_star) < increment(r_star)
    return InstabilitySearch(found=True, r_star=r_star, table=tuple(sorted(table)),
                             tail_ok=tail_ok)


def fit_power_law(radii: Sequence[float], magnitudes: Sequence[float]) -> float:
    """Least-squares exponent of |y| ~ R^p on a log-log scale.

    Identically-zero magnitudes fit exponent 0 (the flat curve).
    """
    y = np.abs(np.asarray(magnitudes, dtype=float))
    if np.all(y == 0):
        return 0.0
    if np.any(y == 0):
        raise ValueError("cannot fit a power law through zeros")
    logs = np.log(np.asarray(radii, dtype=float))
    design = np.column_stack((logs, np.ones_like(logs)))
    coeffs, *_ = np.linalg.lstsq(design, np.log(y), rcond=None)
    return float(coeffs[0])


@dataclass(frozen=True)
class ExponentFit:
    """Fitted growth exponents of |T1| and |T2| over an R ladder."""

    p1: float
    p2: float
    breakdowns: tuple[EnergyBreakdown, ...]

    def to_dict(self) -> dict:
        return {
            "p1": self.p1,
            "p2": self.p2,
            "radii": [b.inner_radius for b in self.breakdowns],
            "t1": [b.t1 for b in self.breakdowns],
            "t2": [b.t2 for b in self.breakdowns],
            "t3": [b.t3 for b in self.breakdowns],
            "dE": [b.total for b in self.breakdowns],
        }


def scaling_exponents(state: UniformCurrentState, shells_template: ShellConfig,
                      interaction: PairInteraction | None = None,
                      radii: Sequence[float] = (),
                      profile_builder: Callable[[ShellConfig], ProfilePair] | None = None,
                      nodes_per_panel: int = 32) -> ExponentFit:
    """Fit the volume/area growth exponents on a geometric radius ladder.

    Requires at least four geometrically spaced radii; returns the fitted
    exponents of |T1| (expected: the dimension d) and |T2| (expected d-1)
    together with the evaluated breakdowns.
    """
    radii = [float(r) for r in radii]
    if len(radii) < 4:
        raise ValueError("need at least 4 radii for a trustworthy exponent fit")
    ratios = np.diff(np.log(radii))
    if np.any(ratios <= 0) or np.ptp(ratios) > 1e-2 * ratios.mean():
        raise ValueError("radii must form an increasing geometric ladder")
    if profile_builder is None:
        profile_builder = lambda shells: cosine_ramp_profiles(shells, state.drift_v)
    breakdowns = []
    for r in radii:
        shells = shells_template.with_inner_radius(r)
        breakdowns.append(energy_increment(state, shells, profile_builder(shells),
                                           interaction, nodes_per_panel))
    p1 = fit_power_law(radii, [b.t1 for b in breakdowns])
    p2 = fit_power_law(radii, [b.t2 for b in breakdowns])
    return ExponentFit(p1=p1, p2=p2, breakdowns=tuple(breakdowns))


def breakdown_table_csv(breakdowns: Sequence[EnergyBreakdown],
                        float_format: str = "%.12g") -> str:
    lines = [",".join(DE_CSV_HEADER)]
    for b in breakdowns:
        lines.append(",".join(float_format % v for v in b.row()))
    return "\n".join(lines) + "\n"
