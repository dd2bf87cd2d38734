"""Landau stability criterion for boosted ground states.

A drifting ground state is stable against creating elementary excitations
when epsilon(k) + v.k >= 0 for every k; folding out the worst direction
(k antiparallel to v) turns this into min_k [epsilon(k) - |v| k] >= 0 on a
sampled branch.  The largest stable speed is the critical velocity

    v_c = inf_k epsilon(k)/k,

and the small-k slope of the branch is the sound velocity v_s, which a
macroscopic argument also expresses through the compressibility as
(rho*kappa0)^(-1/2).  ``consistency_report`` bundles the checks that tie
these together: v_c <= v_s, kappa0 >= 0, kappa0 < inf (the
finite-compressibility necessity criterion) and the numerical agreement of
the two sound velocities.  Whether v_c and the slope coincide exactly away
from the hard-core limit is an open problem, so agreement is asserted only
within a tolerance, never as an identity.

All functions are pure; curves and reports are safe to share across sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dispersion import BranchKind, DispersionBranch
from .thermo import EosPoint

__all__ = [
    "BoostSpec",
    "CriticalVelocity",
    "StabilityResult",
    "CheckResult",
    "ConsistencyReport",
    "critical_velocity",
    "sound_velocity",
    "is_stable",
    "stability_transition_speed",
    "consistency_report",
]

STABILITY_TOL_FACTOR = 1e-9


@dataclass(frozen=True)
class BoostSpec:
    """Drift speed |v| >= 0; the unfavourable direction is already folded in."""

    speed: float

    def __post_init__(self):
        if not math.isfinite(self.speed) or self.speed < 0:
            raise ValueError("boost speed must be finite and nonnegative")


@dataclass(frozen=True)
class CriticalVelocity:
    """inf_k epsilon(k)/k with the wavenumber where the infimum is attained.

    ``degenerate`` marks an identically-zero curve, for which the infimum
    collapses to 0 without a meaningful minimiser.
    """

    value: float
    k_at_min: float
    degenerate: bool = False


@dataclass(frozen=True)
class StabilityResult:
    stable: bool
    margin: float
    worst_k: float
    tolerance: float

    def __bool__(self) -> bool:
        return self.stable


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class ConsistencyReport:
    rho: float
    coupling_c: float
    branch: str
    v_c: float
    v_s_slope: float
    v_s_kappa: float
    kappa0: float
    checks: tuple[CheckResult, ...] = field(default=())

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "c": self.coupling_c,
            "branch": self.branch,
            "v_c": self.v_c,
            "v_s_slope": self.v_s_slope,
            "v_s_kappa": self.v_s_kappa,
            "kappa0": self.kappa0,
            "checks": [c.to_dict() for c in self.checks],
        }


def sound_velocity(curve: DispersionBranch, k_window: float | None = None,
                   min_samples: int = 3) -> float:
    """|slope| of the branch at k -> 0 from a fit through the origin.

    The smallest-k window (by default the six smallest positive samples) is
    fitted with epsilon ~ v k + a k^2, weighted by 1/k^2 so every sample
    contributes at the same relative level; the quadratic column absorbs the
    band curvature that would otherwise bias a bare linear fit at finite
    sampling.  Halving the window should move the result by well under 1%
    on any adequately resolved curve.
    """
    k = curve.k[curve.k > 0]
    eps = curve.epsilon[curve.k > 0]
    if k_window is None:
        if k.size < min_samples:
            raise ValueError(f"need at least {min_samples} positive-k samples, have {k.size}")
        k_window = k[min(5, k.size - 1)]
    mask = k <= k_window * (1 + 1e-12)
    if np.count_nonzero(mask) < min_samples:
        raise ValueError(
            f"only {np.count_nonzero(mask)} samples below k_window={k_window:g}; "
            f"need {min_samples} (refine the small-k sampling)")
    kw, ew = k[mask], eps[mask]
    design = np.column_stack((kw, kw * kw)) / kw[:, None]  # 1/k weighting
    coeffs, *_ = np.linalg.lstsq(design, ew / kw, rcond=None)
    return abs(float(coeffs[0]))


def critical_velocity(curve: DispersionBranch) -> CriticalVelocity:
    """inf over the sampled branch of epsilon(k)/k, with local refinement.

    The grid minimiser is polished with a parabola through its neighbours.
    When the infimum sits at the k -> 0 boundary the fitted slope is used,
    so discretisation noise can never push v_c above v_s.
    """
    k = curve.k[curve.k > 0]
    eps = curve.epsilon[curve.k > 0]
    if k.size == 0:
        raise ValueError("curve has no samples beyond k = 0")
    if np.all(eps == 0):
        return CriticalVelocity(0.0, float(k[np.argmin(eps / k)]), degenerate=True)
    ratios = eps / k
    i = int(np.argmin(ratios))
    best = float(ratios[i])
    k_best = float(k[i])
    if i == 0:
        # infimum approached at the small-k boundary: the limit is the slope
        try:
            slope = sound_velocity(curve)
        except ValueError:
            slope = best
        if slope <= best:
            return CriticalVelocity(slope, 0.0)
        return CriticalVelocity(best, k_best)
    if 0 < i < k.size - 1:
        x = k[i - 1:i + 2]
        y = ratios[i - 1:i + 2]
        denom = (x[0] - x[1]) * (x[0] - x[2]) * (x[1] - x[2])
        a = (x[2] * (y[1] - y[0]) + x[1] * (y[0] - y[2]) + x[0] * (y[2] - y[1])) / denom
        if a > 0:
            b = (x[2]**2 * (y[0] - y[1]) + x[1]**2 * (y[2] - y[0]) + x[0]**2 * (y[1] - y[2])) / denom
            k_vertex = -b / (2 * a)
            if x[0] <= k_vertex <= x[2]:
                c0 = y[0] - a * x[0]**2 - b * x[0]
                refined = a * k_vertex**2 + b * k_vertex + c0
                if refined < best:
                    best, k_best = float(refined), float(k_vertex)
    return CriticalVelocity(max(best, 0.0), k_best)


def is_stable(curve: DispersionBranch, boost: BoostSpec | float) -> StabilityResult:
    """Landau stability of the boosted state: min_k [epsilon(k) - |v| k] >= -tol.

    The margin is literally that minimum over the stored samples; the
    tolerance is 1e-9 of the curve's energy scale.
    """
    speed = boost.speed if isinstance(boost, BoostSpec) else float(boost)
    if speed < 0:
        raise ValueError("boost speed must be nonnegative")
    margin_curve = curve.epsilon - speed * curve.k
    i = int(np.argmin(margin_curve))
    tol = STABILITY_TOL_FACTOR * float(np.max(curve.epsilon))
    margin = float(margin_curve[i])
    return StabilityResult(stable=margin >= -tol, margin=margin,
                           worst_k=float(curve.k[i]), tolerance=tol)


def stability_transition_speed(curve: DispersionBranch, rel_tol: float = 1e-4,
                               v_hi: float | None = None) -> float:
    """Locate the stable/unstable transition speed by bisection of is_stable."""
    if v_hi is None:
        positive = curve.k > 0
        v_hi = float(np.max(curve.epsilon[positive] / curve.k[positive])) + 1.0
    lo, hi = 0.0, v_hi
    if is_stable(curve, hi).stable:
        return hi  # no instability below the probe speed
    while hi - lo > rel_tol * max(hi, 1e-30):
        mid = 0.5 * (lo + hi)
        if is_stable(curve, mid).stable:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _relative_gap(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


def consistency_report(curve: DispersionBranch, eos_point: EosPoint,
                       velocity_match_rtol: float = 0.03) -> ConsistencyReport:
    """Cross-check the spectral and thermodynamic superfluidity data.

    Four individually flagged checks: v_c <= v_s, kappa0 >= 0, kappa0 finite
    (the necessity criterion for superfluidity), and agreement of the
    slope-based sound velocity with (rho*kappa0)^(-1/2) within
    ``velocity_match_rtol``.  Failures are report entries, never exceptions.
    """
    if _relative_gap(curve.density, eos_point.rho) > 1e-9:
        raise ValueError(
            f"curve density {curve.density:g} does not match EoS rho {eos_point.rho:g}")
    vc = critical_velocity(curve)
    vs_slope = sound_velocity(curve)
    kappa0 = eos_point.kappa0
    vs_kappa = 0.0 if math.isinf(kappa0) else (eos_point.rho * kappa0) ** -0.5
    slack = 1e-9 * (1.0 + vs_slope)
    checks = (
        CheckResult("v_c <= v_s", vc.value <= vs_slope + slack,
                    f"v_c={vc.value:.6g}, v_s={vs_slope:.6g}"),
        CheckResult("kappa0 >= 0", kappa0 >= 0.0, f"kappa0={kappa0:.6g}"),
        CheckResult("kappa0 finite", math.isfinite(kappa0),
                    f"kappa0={kappa0:.6g}" + ("" if math.isfinite(kappa0)
                                              else " (infinite-compressibility signal)")),
        CheckResult("sound velocities agree",
                    _relative_gap(vs_slope, vs_kappa) <= velocity_match_rtol,
                    f"slope={vs_slope:.6g}, kappa-based={vs_kappa:.6g}, "
                    f"rel gap={_relative_gap(vs_slope, vs_kappa):.3g}"),
    )
    return ConsistencyReport(
        rho=eos_point.rho,
        coupling_c=eos_point.coupling_c,
        branch=curve.branch.value,
        v_c=vc.value,
        v_s_slope=vs_slope,
        v_s_kappa=vs_kappa,
        kappa0=kappa0,
        checks=checks,
    )
