# -*- coding: utf-8 -*-
"""
Dispersion Module
Per-ball dispersion density by radial reduction and the periodic Hashin-Shtrikman
dispersion coefficient of a radii multiset
"""

import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from src.corrector import SecondCorrector, corrector_ball_integral
from src.errors import ConfigError, EmptyFamilyError, InfeasibleRadiiError, QuadratureConvergenceError
from src.material import (FirstCorrector, TwoPhaseProfile, eval_f, eval_f_prime,
                          unit_ball_volume, unit_sphere_area)

CELL_VOLUME = 1.0


@dataclass(frozen=True)
class QuadSpec:
    """Composite Gauss-Legendre rule on [0,R] and [R,1]"""

    nodes: int = 64
    panels: int = 1
    refine: bool = True
    rel_tol: float = 1e-9

    def __post_init__(self):
        if self.nodes < 2 or self.panels < 1:
            raise ConfigError("quadrature needs at least 2 nodes and 1 panel")


@dataclass(frozen=True)
class DispersionDensity:
    j_value: float
    quad_error: float
    energy_mass_bracket: float = 0.0
    reference: float = 0.0
    cross_checks: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return asdict(self)


@dataclass(frozen=True)
class DispersionResult:
    d_phs: float
    sum_radii_N2: float
    cell_volume: float
    density: DispersionDensity

    def to_record(self, profile: Optional[TwoPhaseProfile] = None) -> Dict:
        record = {
            'd_phs': self.d_phs,
            'sum_radii_N2': self.sum_radii_N2,
            'j_value': self.density.j_value,
            'quad_error': self.density.quad_error,
            'cell_volume': self.cell_volume,
        }
        if profile is not None:
            record['profile'] = profile.to_dict()
        return record


@dataclass(frozen=True)
class ScaleFactorReport:
    factors: List[float]
    bounds: List[float]
    limsup_estimate: float
    window: int
    bound_violations: List[int]


def _composite_gauss_legendre(func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                              nodes: int, panels: int) -> float:
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    total = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        total.append(half * np.sum(w * func(0.5 * (hi + lo) + half * x)))
    return math.fsum(total)


def _radial_integrands(fc: FirstCorrector, profile: TwoPhaseProfile) -> Dict[str, Callable]:
    """Sphere-averaged integrands times |S^{N-1}| r^{N-1}, for v = y_k f(r)"""
    n = profile.dim
    area = unit_sphere_area(n)

    def parts(r):
        f = eval_f(fc, profile, r)
        g = r * eval_f_prime(fc, profile, r)
        a = profile.conductivity(r)
        weight = area * r ** (n - 1) * r ** 2 / n
        return f, g, a, weight

    def gradient_energy(r):
        # <y_k^2> = r^2/N, <y_k^4> = 3 r^4 / (N(N+2))
        f, g, a, weight = parts(r)
        return weight * a * f ** 2 * (f ** 2 + 3.0 * (2.0 * f * g + g ** 2) / (n + 2))

    def mass_defect(r):
        f, _, _, weight = parts(r)
        return weight * fc.m * (f - 1.0) ** 2 / 2.0

    def v_squared(r):
        f, _, _, weight = parts(r)
        return weight * f ** 2

    return {'gradient_energy': gradient_energy, 'mass_defect': mass_defect, 'v_squared': v_squared}


def _integrate_split(func: Callable, profile: TwoPhaseProfile, spec: QuadSpec, panels: int) -> float:
    big_r = profile.core_radius
    return (_composite_gauss_legendre(func, 0.0, big_r, spec.nodes, panels)
            + _composite_gauss_legendre(func, big_r, 1.0, spec.nodes, panels))


def ball_dispersion_density(fc: FirstCorrector, profile: TwoPhaseProfile,
                            quad_spec: Optional[QuadSpec] = None,
                            sc: Optional[SecondCorrector] = None) -> DispersionDensity:
    """Bracket of the dispersion formula for eta = e_k on the unit core-coating ball"""
    spec = quad_spec or QuadSpec()
    log = logging.getLogger(__name__)
    integrands = _radial_integrands(fc, profile)

    values = {}
    errors = {}
    for name, func in integrands.items():
        coarse = _integrate_split(func, profile, spec, spec.panels)
        if spec.refine:
            fine = _integrate_split(func, profile, spec, 2 * spec.panels)
            errors[name] = abs(fine - coarse)
            scale = max(abs(fine), 1e-300)
            if errors[name] > spec.rel_tol * scale and errors[name] > 1e-15:
                raise QuadratureConvergenceError(
                    f"{name}: refinement changed the integral by {errors[name]:.3e} "
                    f"(relative tolerance {spec.rel_tol})")
            values[name] = fine
        else:
            errors[name] = 0.0
            values[name] = coarse

    m = fc.m
    n = profile.dim
    omega = unit_ball_volume(n)
    # first integral equals m * integral of y_k^2 for every profile
    reference = m * omega / (n + 2)
    energy_defect = values['gradient_energy'] - reference
    energy_mass_bracket = values['gradient_energy'] + values['mass_defect']
    j_value = max(energy_defect + values['mass_defect'], 0.0)

    variance_bracket = m * values['v_squared'] - values['gradient_energy']
    cross_checks = {
        'energy_identity_residual': abs(energy_defect),
        'variance_half': variance_bracket / 2.0,
        'variance_half_mismatch': variance_bracket / 2.0 - j_value,
        'variance_vs_energy_mass_mismatch': variance_bracket - 2.0 * energy_mass_bracket,
    }
    if sc is not None:
        w_mean = corrector_ball_integral(sc, fc, profile)
        cross_checks['corrector_ball_integral'] = w_mean
        cross_checks['boundary_retained_bracket'] = (
            values['mass_defect'] + m * (values['v_squared'] / 2.0 - omega / (2.0 * (n + 2))) - m * w_mean)

    log.debug(f"density for {profile}: j={j_value:.6e}, bracket={energy_mass_bracket:.6e}, "
              f"identity residual={abs(energy_defect):.2e}")
    return DispersionDensity(
        j_value=j_value,
        quad_error=sum(errors.values()),
        energy_mass_bracket=energy_mass_bracket,
        reference=reference,
        cross_checks=cross_checks,
    )


def density_integrands(fc: FirstCorrector, profile: TwoPhaseProfile, points: np.ndarray,
                    axis: int = 0) -> Dict[str, np.ndarray]:
    """Pointwise integrands on B(0,1) for Monte-Carlo checks; points has shape (M, N)"""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.linalg.norm(pts, axis=1)
    yk = pts[:, axis]
    f = eval_f(fc, profile, r)
    fp = eval_f_prime(fc, profile, r)
    a = profile.conductivity(r)
    safe_r = np.where(r > 0, r, 1.0)

    # grad(v^2/2) = v grad v, grad v = f e_k + y_k f' y/r
    grad_v = (yk * fp / safe_r)[:, None] * pts
    grad_v[:, axis] += f
    v = yk * f
    gradient_energy = a * (v ** 2) * np.sum(grad_v ** 2, axis=1)
    mass_defect = fc.m * (yk * (f - 1.0)) ** 2 / 2.0
    return {
        'gradient_energy': gradient_energy,
        'mass_defect': mass_defect,
        'reference': fc.m * yk ** 2,
    }


def dispersion_phs(density: DispersionDensity, radii: Sequence[float], dim: int) -> DispersionResult:
    """d_phs = -(1/|Y|) sum eps^(N+2) * J; the radii enter only as a multiset"""
    eps = sorted((float(r) for r in radii), reverse=True)
    if any(r <= 0 for r in eps):
        raise InfeasibleRadiiError("radii must be positive")
    if eps and eps[0] > 0.5 + 1e-12:
        raise InfeasibleRadiiError(f"radius {eps[0]} exceeds 1/2 and is not realizable on the unit torus")
    volume = unit_ball_volume(dim) * math.fsum(r ** dim for r in eps)
    if volume > 1.0 + 1e-6:
        raise InfeasibleRadiiError(f"balls cover {volume:.9f} > 1 of the torus and cannot be disjoint")

    sum_n2 = math.fsum(r ** (dim + 2) for r in eps)
    d_phs = -(sum_n2 * density.j_value) / CELL_VOLUME
    if d_phs == 0.0:
        d_phs = 0.0
    return DispersionResult(d_phs=d_phs, sum_radii_N2=sum_n2, cell_volume=CELL_VOLUME, density=density)


def hs_scale_factor(radii_families: Sequence[Sequence[float]], dim: int, window: int = 3) -> ScaleFactorReport:
    """kappa_n^-2 sum eps^(N+2) per family and the trailing-window supremum"""
    if window < 1:
        raise ValueError("window must be >= 1")
    factors, bounds, violations = [], [], []
    for idx, family in enumerate(radii_families):
        eps = [float(r) for r in family]
        if not eps:
            raise EmptyFamilyError(f"radii family {idx} is empty")
        kappa = max(eps)
        factor = math.fsum(r ** (dim + 2) for r in eps) / kappa ** 2
        bound = math.fsum(r ** dim for r in eps)
        if factor > bound * (1.0 + 1e-12):
            violations.append(idx)
        factors.append(factor)
        bounds.append(bound)
    if violations:
        logging.getLogger(__name__).warning(f"scale-factor bound violated for families {violations}")
    limsup = max(factors[-window:]) if factors else 0.0
    return ScaleFactorReport(factors=factors, bounds=bounds, limsup_estimate=limsup,
                             window=window, bound_violations=violations)


class DispersionCalculator:
    """Evaluates densities and coefficients with a fixed quadrature rule"""

    def __init__(self, quad_spec: Optional[QuadSpec] = None):
        self.quad_spec = quad_spec or QuadSpec()
        self.logger = logging.getLogger(__name__)

    def coefficient(self, profile: TwoPhaseProfile, fc: FirstCorrector, radii: Sequence[float],
                    sc: Optional[SecondCorrector] = None) -> DispersionResult:
        density = ball_dispersion_density(fc, profile, self.quad_spec, sc=sc)
        result = dispersion_phs(density, radii, profile.dim)
        self.logger.info(f"d_phs={result.d_phs:.6e} from {len(radii)} balls "
                         f"(sum eps^(N+2)={result.sum_radii_N2:.6e}, J={density.j_value:.6e})")
        return result
