# -*- coding: utf-8 -*-
"""
Second Corrector Module
Radial ansatz w_kl = y_k y_l g(r) + h(r) delta_kl: closed-form coefficients,
the twelve-equation transmission system and its consistency checks
"""

import logging
from dataclasses import dataclass, asdict
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.errors import SingularEvaluationError
from src.material import FirstCorrector, TwoPhaseProfile, unit_sphere_area

UNKNOWNS = ['b1', 'd1', 'p1', 'q1', 't1', 'b2', 'd2', 'p2', 'q2', 't2']
ROW_LABELS = ['core_quadratic', 'core_constant', 'shell_quadratic', 'shell_constant',
              'g_continuity', 'h_continuity', 'g_dirichlet', 'h_dirichlet',
              'g_flux', 'h_flux', 'g_neumann', 'h_neumann']
RANK_THRESHOLD = 1e-9
R_FLOOR = 1e-3

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SecondCorrector:
    """g = b + c/r^N + d/r^(N+2), h = p/r^N + q r^2 + t per region (1 = core, 2 = shell)"""

    b1: float
    d1: float
    p1: float
    q1: float
    t1: float
    b2: float
    c2: float
    d2: float
    p2: float
    q2: float
    t2: float
    c1: float = 0.0

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in UNKNOWNS])

    @classmethod
    def from_vector(cls, vec: np.ndarray, c2: float) -> "SecondCorrector":
        values = {name: float(v) for name, v in zip(UNKNOWNS, vec)}
        return cls(c2=c2, **values)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class CorrectorSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    row_labels: Tuple[str, ...]

    def residuals(self, sc: SecondCorrector) -> Dict[str, float]:
        res = self.matrix @ sc.as_vector() - self.rhs
        return {label: float(abs(v)) for label, v in zip(self.row_labels, res)}

    def ranks(self, threshold: float = RANK_THRESHOLD) -> Tuple[int, int]:
        """Numerical rank of the matrix and of the augmented matrix"""
        augmented = np.column_stack([self.matrix, self.rhs])
        return _numerical_rank(self.matrix, threshold), _numerical_rank(augmented, threshold)

    def solve_least_squares(self, c2: float) -> SecondCorrector:
        solution, _, _, _ = np.linalg.lstsq(self.matrix, self.rhs, rcond=None)
        return SecondCorrector.from_vector(solution, c2=c2)


def _numerical_rank(mat: np.ndarray, threshold: float) -> int:
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > threshold * sv[0]))


def rhs_reduction(fc: FirstCorrector, profile: TwoPhaseProfile, r: float) -> Tuple[float, float]:
    """Source terms that div(a grad w_kl) must equal: (y_k y_l coefficient, delta_kl coefficient)"""
    big_r = profile.core_radius
    if r <= 0 or r >= 1 or r == big_r:
        raise ValueError(f"rhs_reduction is defined on (0,R) and (R,1); got r={r}")
    n, m = profile.dim, fc.m
    if r < big_r:
        a, f_minus_1, quadratic = profile.alpha, fc.b1t - 1.0, 0.0
    else:
        a = profile.beta
        f_minus_1 = fc.b2t + fc.ct / r ** n - 1.0
        # -[a f'/r + (a (f-1))'/r] with a constant on the shell
        quadratic = 2.0 * n * a * fc.ct / r ** (n + 2)
    constant = -(a - m + 2.0 * a * f_minus_1)
    return quadratic, constant


def _flux_terms(fc: FirstCorrector, profile: TwoPhaseProfile) -> Dict[str, float]:
    """Shell quantities at R shared by the (b1, d1) displays"""
    n, c = profile.dim, fc.ct
    big_r = profile.core_radius
    rn = big_r ** n
    rn2 = big_r ** (n + 2)
    a_term = (2.0 / (n + 2) - 1.0 / rn + n / ((n + 2) * rn2)) * c
    b_term = (4.0 / (n + 2) + (n - 2) / rn - n * n / ((n + 2) * rn2)) * c
    k_term = profile.beta * (fc.b2t + c / rn - 1.0) - profile.alpha * (fc.b1t - 1.0)
    return {'A': a_term, 'B': b_term, 'K': k_term, 'RN': rn, 'RN2': rn2}


def solve_closed_form(fc: FirstCorrector, profile: TwoPhaseProfile) -> SecondCorrector:
    """Shell coefficients from Dirichlet/Neumann data, core from the transmission conditions"""
    n, c = profile.dim, fc.ct
    alpha, m = profile.alpha, fc.m
    big_r = profile.core_radius

    d2 = n * c / (n + 2)
    p2 = -c / (n + 2)
    q2 = -n * c / (2.0 * (n + 2))
    b2 = 2.0 * c / (n + 2)
    t2 = c / 2.0

    terms = _flux_terms(fc, profile)
    k_term, a_term, b_term = terms['K'], terms['A'], terms['B']
    # core pair from continuity and flux continuity of g at R
    b1 = (k_term + n * alpha * a_term + profile.beta * b_term) / (alpha * (n + 2))
    d1 = terms['RN2'] * (-k_term + 2.0 * alpha * a_term - profile.beta * b_term) / (alpha * (n + 2))

    p1 = -d1 / n
    q1 = (-(alpha - m) - 2.0 * alpha * (fc.b1t - 1.0) - 2.0 * alpha * b1) / (2.0 * n * alpha)
    rn = terms['RN']
    t1 = p2 / rn + q2 * big_r ** 2 + t2 - p1 / rn - q1 * big_r ** 2

    return SecondCorrector(b1=b1, d1=d1, p1=p1, q1=q1, t1=t1,
                           b2=b2, c2=-c, d2=d2, p2=p2, q2=q2, t2=t2)


def assemble_system(fc: FirstCorrector, profile: TwoPhaseProfile) -> CorrectorSystem:
    """Twelve equations in the unknowns (b1,d1,p1,q1,t1,b2,d2,p2,q2,t2), delta_kl = 1"""
    n, c, m = profile.dim, fc.ct, fc.m
    alpha, beta = profile.alpha, profile.beta
    big_r = profile.core_radius
    rn = big_r ** n
    inv_rn = 1.0 / rn
    inv_rn2 = 1.0 / big_r ** (n + 2)
    col = {name: i for i, name in enumerate(UNKNOWNS)}

    rows: List[Dict[str, float]] = []
    rhs: List[float] = []

    def add(coeffs: Dict[str, float], value: float):
        rows.append(coeffs)
        rhs.append(value)

    add({'d1': 1.0, 'p1': n}, 0.0)
    add({'b1': 2.0 * alpha, 'q1': 2.0 * n * alpha},
        -(alpha - m) - 2.0 * alpha * (fc.b1t - 1.0))
    add({'d2': 1.0, 'p2': n}, 0.0)
    add({'b2': 2.0 * beta, 'q2': 2.0 * n * beta},
        -(beta - m) - 2.0 * beta * (fc.b2t - 1.0))
    add({'b1': 1.0, 'd1': inv_rn2, 'b2': -1.0, 'd2': -inv_rn2}, -c * inv_rn)
    add({'p1': inv_rn, 'q1': big_r ** 2, 't1': 1.0,
         'p2': -inv_rn, 'q2': -big_r ** 2, 't2': -1.0}, 0.0)
    add({'b2': 1.0, 'd2': 1.0}, c)
    add({'p2': 1.0, 'q2': 1.0, 't2': 1.0}, 0.0)
    # a (g' + 2g/r + (f-1)/r) continuous at R, derivatives expanded in powers of R
    add({'b1': 2.0 * alpha / big_r, 'd1': -n * alpha * inv_rn2 / big_r,
         'b2': -2.0 * beta / big_r, 'd2': n * beta * inv_rn2 / big_r},
        (beta * (n - 2) * c * inv_rn + beta * (fc.b2t + c * inv_rn - 1.0)
         - alpha * (fc.b1t - 1.0)) / big_r)
    add({'p1': -n * alpha * inv_rn / big_r, 'q1': 2.0 * alpha * big_r,
         'p2': n * beta * inv_rn / big_r, 'q2': -2.0 * beta * big_r}, 0.0)
    # g'(1) + 2 g(1) = 0 with g = b2 - c/r^N + d2/r^(N+2)
    add({'b2': 2.0, 'd2': -float(n)}, (2.0 - n) * c)
    add({'p2': -float(n), 'q2': 2.0}, 0.0)

    matrix = np.zeros((len(rows), len(UNKNOWNS)))
    for i, coeffs in enumerate(rows):
        for name, value in coeffs.items():
            matrix[i, col[name]] = value
    return CorrectorSystem(matrix=matrix, rhs=np.array(rhs), row_labels=tuple(ROW_LABELS))


def verify_consistency(sc: SecondCorrector, fc: FirstCorrector,
                       profile: TwoPhaseProfile) -> Dict[str, float]:
    """Residuals of the two equations the closed-form route does not impose"""
    n, c, m = profile.dim, fc.ct, fc.m
    alpha, beta = profile.alpha, profile.beta
    big_r = profile.core_radius

    residual_shell_constant = abs(beta * (2 * sc.b2 + 2 * n * sc.q2) + (beta - m) + 2 * beta * (fc.b2t - 1.0))
    lhs = alpha * (-n * sc.p1 / big_r ** (n + 1) + 2 * sc.q1 * big_r)
    rhs = beta * (-n * sc.p2 / big_r ** (n + 1) + 2 * sc.q2 * big_r)
    identity = big_r * beta * (n / (n + 2.0)) * (1.0 / big_r ** (n + 2) - 1.0) * c
    return {
        'residual_shell_constant': residual_shell_constant,
        'residual_h_flux': abs(lhs - rhs),
        'h_flux_core': lhs,
        'h_flux_shell': rhs,
        'h_flux_identity': identity,
        'shell_constant_lhs': beta * (2 * sc.b2 + 2 * n * sc.q2),
    }


def eval_g_h(sc: SecondCorrector, fc: FirstCorrector, profile: TwoPhaseProfile, r: float,
             region: Optional[str] = None) -> Tuple[float, float]:
    """g(r), h(r); region forces 'core' or 'shell' (needed exactly at r = R)"""
    n = profile.dim
    big_r = profile.core_radius
    if region is None:
        if r == big_r:
            raise ValueError("r = R is shared by both regions; pass region='core' or 'shell'")
        region = 'core' if r < big_r else 'shell'
    if region not in ('core', 'shell'):
        raise ValueError(f"unknown region {region!r}")
    if r < 0 or r > 1:
        raise ValueError(f"r={r} outside [0, 1]")

    if region == 'core':
        if r == 0:
            if sc.c1 != 0.0 or sc.d1 != 0.0 or sc.p1 != 0.0:
                raise SingularEvaluationError(
                    "core ansatz has non-zero singular coefficients; w_kl is unbounded at r = 0")
            return sc.b1, sc.t1
        if r < R_FLOOR:
            logger.debug(f"evaluating core ansatz below r_floor={R_FLOOR} (r={r})")
        g = sc.b1 + sc.c1 / r ** n + sc.d1 / r ** (n + 2)
        h = sc.p1 / r ** n + sc.q1 * r ** 2 + sc.t1
    else:
        g = sc.b2 + sc.c2 / r ** n + sc.d2 / r ** (n + 2)
        h = sc.p2 / r ** n + sc.q2 * r ** 2 + sc.t2
    return g, h


def neumann_residual(sc: SecondCorrector, profile: TwoPhaseProfile) -> Tuple[float, float]:
    """Zero co-normal derivative of w_kl on the unit sphere (c2 = -ct)"""
    n = profile.dim
    return abs((n + 2) * sc.d2 + n * sc.c2), abs(-n * sc.p2 + 2 * sc.q2)


def corrector_ball_integral(sc: SecondCorrector, fc: FirstCorrector, profile: TwoPhaseProfile) -> float:
    """Integral of w_kk over the unit ball; the quadrupole terms vanish on every sphere"""
    n, c = profile.dim, fc.ct
    big_r = profile.core_radius
    rn, rn2 = big_r ** n, big_r ** (n + 2)
    core = (sc.b1 / n + sc.q1) * rn2 / (n + 2) + sc.t1 * rn / n
    shell = ((sc.b2 / n + sc.q2) * (1.0 - rn2) / (n + 2)
             - (c / n) * (1.0 - big_r ** 2) / 2.0
             + sc.t2 * (1.0 - rn) / n)
    return unit_sphere_area(n) * (core + shell)
