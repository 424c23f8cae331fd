# -*- coding: utf-8 -*-
"""
Two-Phase Material Module
Core-coating ball profile, equivalent conductivity and first-corrector radial profile
"""

import math
import logging
from dataclasses import dataclass, asdict
from typing import Dict, Union

import numpy as np
from scipy.special import gamma

from src.errors import DegenerateProfileError

THETA_MIN = 1e-9
THETA_MAX = 1.0 - 1e-9

logger = logging.getLogger(__name__)

RadiusLike = Union[float, np.ndarray]


def unit_ball_volume(dim: int) -> float:
    """Volume ω_N of the unit ball in R^N"""
    return math.pi ** (dim / 2.0) / float(gamma(dim / 2.0 + 1.0))


def unit_sphere_area(dim: int) -> float:
    """Surface measure |S^{N-1}| = N ω_N"""
    return dim * unit_ball_volume(dim)


@dataclass(frozen=True)
class TwoPhaseProfile:
    """Core conductivity alpha on |y| < R, coating beta on R < |y| < 1, theta = R^N"""

    alpha: float
    beta: float
    theta: float
    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise DegenerateProfileError(f"dim must be an integer >= 1, got {self.dim}")
        if not (self.alpha > 0 and self.beta > 0):
            raise DegenerateProfileError(
                f"conductivities must be positive (alpha={self.alpha}, beta={self.beta})")
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise DegenerateProfileError("conductivities must be finite")
        if self.alpha > self.beta:
            raise DegenerateProfileError(
                f"core conductivity must not exceed coating conductivity "
                f"(alpha={self.alpha} > beta={self.beta})")
        if not (THETA_MIN <= self.theta <= THETA_MAX):
            raise DegenerateProfileError(
                f"theta={self.theta} outside [{THETA_MIN}, 1-{THETA_MIN}]; "
                f"single-phase media must be modelled with alpha == beta")

    @property
    def core_radius(self) -> float:
        return self.theta ** (1.0 / self.dim)

    @property
    def is_homogeneous(self) -> bool:
        return self.alpha == self.beta

    def conductivity(self, r: RadiusLike) -> RadiusLike:
        """a(r): alpha in the core, beta elsewhere"""
        return np.where(np.asarray(r) < self.core_radius, self.alpha, self.beta)

    def scaled(self, factor: float) -> "TwoPhaseProfile":
        return TwoPhaseProfile(self.alpha * factor, self.beta * factor, self.theta, self.dim)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict) -> "TwoPhaseProfile":
        try:
            return cls(alpha=float(data['alpha']), beta=float(data['beta']),
                       theta=float(data['theta']), dim=int(data['dim']))
        except KeyError as e:
            raise DegenerateProfileError(f"profile record is missing {e}")


@dataclass(frozen=True)
class FirstCorrector:
    """Coefficients of f(r) in w_{e_k} = y_k f(r) and the equivalent conductivity m"""

    m: float
    b1t: float
    b2t: float
    ct: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ConductivityBounds:
    harmonic: float
    arithmetic: float
    hs_lower: float
    assemblage: float
    reversed_assemblage: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def solve_equivalent_conductivity(profile: TwoPhaseProfile) -> float:
    """Closed-form root of (m-b)/(m+(N-1)b) = theta (a-b)/(a+(N-1)b)"""
    a, b, theta, n = profile.alpha, profile.beta, profile.theta, profile.dim
    if profile.is_homogeneous:
        return b
    k = theta * (a - b) / (a + (n - 1) * b)
    return b * (1.0 + (n - 1) * k) / (1.0 - k)


def first_corrector(profile: TwoPhaseProfile) -> FirstCorrector:
    """Radial profile coefficients from continuity, flux continuity and f(1) = 1"""
    a, b, theta, n = profile.alpha, profile.beta, profile.theta, profile.dim
    m = solve_equivalent_conductivity(profile)
    if profile.is_homogeneous:
        return FirstCorrector(m=m, b1t=1.0, b2t=1.0, ct=0.0)

    b1t = n * b / ((1.0 - theta) * a + (n + theta - 1.0) * b)
    b2t = (1.0 - b1t * theta) / (1.0 - theta)
    ct = (b1t - 1.0) * theta / (1.0 - theta)
    fc = FirstCorrector(m=m, b1t=b1t, b2t=b2t, ct=ct)

    if not (a * (1 - 1e-12) <= m <= b * (1 + 1e-12)):
        logger.warning(f"equivalent conductivity m={m} outside [alpha, beta] for {profile}")
    return fc


def eval_f(fc: FirstCorrector, profile: TwoPhaseProfile, r: RadiusLike) -> RadiusLike:
    """f(r): b1t in the core, b2t + ct/r^N on the shell, 1 outside the ball"""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("radius must be non-negative")
    big_r = profile.core_radius
    n = profile.dim
    with np.errstate(divide='ignore'):
        shell = fc.b2t + fc.ct / np.where(r_arr > 0, r_arr, 1.0) ** n
    values = np.where(r_arr < big_r, fc.b1t, np.where(r_arr <= 1.0, shell, 1.0))
    # r == 1 lands on the shell branch which equals 1 up to rounding
    values = np.where(r_arr == 1.0, 1.0, values)
    return float(values) if values.ndim == 0 else values


def eval_f_prime(fc: FirstCorrector, profile: TwoPhaseProfile, r: RadiusLike) -> RadiusLike:
    """f'(r); zero in the core and outside the ball"""
    r_arr = np.asarray(r, dtype=float)
    n = profile.dim
    safe = np.where(r_arr > 0, r_arr, 1.0)
    shell = -n * fc.ct / safe ** (n + 1)
    values = np.where((r_arr > profile.core_radius) & (r_arr < 1.0), shell, 0.0)
    return float(values) if values.ndim == 0 else values


def flux_jump_residuals(fc: FirstCorrector, profile: TwoPhaseProfile) -> Dict[str, float]:
    """Flux continuity at R and outer flux equal to m"""
    a, b, n = profile.alpha, profile.beta, profile.dim
    interface = abs(a * fc.b1t - b * (fc.b2t + (1 - n) * fc.ct / profile.theta))
    outer = abs(b * (fc.b2t + (1 - n) * fc.ct) - fc.m)
    return {'interface': interface, 'outer': outer}


def conductivity_bounds(profile: TwoPhaseProfile) -> ConductivityBounds:
    """Harmonic/arithmetic means, the assemblage value and the assemblage with the phases swapped"""
    a, b, theta, n = profile.alpha, profile.beta, profile.theta, profile.dim
    harmonic = 1.0 / (theta / a + (1.0 - theta) / b)
    arithmetic = theta * a + (1.0 - theta) * b
    assemblage = solve_equivalent_conductivity(profile)
    # alpha coating around beta inclusions of fraction 1 - theta
    reversed_assemblage = a + (1.0 - theta) * (b - a) * n * a / (n * a + theta * (b - a))
    return ConductivityBounds(
        harmonic=harmonic,
        arithmetic=arithmetic,
        hs_lower=assemblage,
        assemblage=assemblage,
        reversed_assemblage=reversed_assemblage,
    )


def main():
    """Small demonstration"""
    logging.basicConfig(level=logging.INFO)

    profile = TwoPhaseProfile(alpha=1.0, beta=2.0, theta=0.5, dim=2)
    fc = first_corrector(profile)
    print(f"🧮 m = {fc.m:.10f} (10/7 = {10 / 7:.10f})")
    print(f"   b1t={fc.b1t:.6f} b2t={fc.b2t:.6f} ct={fc.ct:.6f}")
    print(f"   bounds: {conductivity_bounds(profile).to_dict()}")


if __name__ == "__main__":
    main()
