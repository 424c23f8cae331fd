# -*- coding: utf-8 -*-
"""
Oracle Module
Independent brute-force checks: radial finite-difference transmission solves in s = ln r,
Monte-Carlo ball integrals, a trapezoid dispersion density, complex-step source terms,
a 1-D Bloch eigensolver and an exhaustive grid greedy packer
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as sla
from scipy.integrate import trapezoid
from scipy.linalg import eigh

from src.errors import (ConfigError, SearchBudgetExceededError,
                        SolverConvergenceError)
from src.material import FirstCorrector, TwoPhaseProfile, unit_ball_volume
from src.packing import (BallPacking, ClearanceField, COVERAGE_TOL, StopCriterion, TorusBall,
                         SUPPORTED_DIMS)

MIN_INTERVALS = 1000
MAX_SPACING_RATIO = 2.0
RESIDUAL_TOL = 1e-10
BLOCH_MIN_CELLS = 2 ** 10
BLOCH_MAX_ETA = 0.2
FIT_RESIDUAL_TOL = 1e-8
CLOSURES = ('cauchy', 'regular', 'inner')

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RadialGrid:
    """Piecewise-uniform grid in s = ln r on [ln r_lo, ln R] and [ln R, 0]; R is node n_core"""

    r_lo: float
    core_radius: float
    n_core: int
    n_shell: int

    def __post_init__(self):
        if not (0.0 < self.r_lo < self.core_radius < 1.0):
            raise ConfigError(f"need 0 < r_lo={self.r_lo} < R={self.core_radius} < 1")
        if self.n_core < 2 or self.n_shell < 2:
            raise ConfigError("each region needs at least two intervals")
        if self.n_core + self.n_shell < MIN_INTERVALS:
            raise ConfigError(f"radial grid needs at least {MIN_INTERVALS} intervals")
        ratio = max(self.h_core, self.h_shell) / min(self.h_core, self.h_shell)
        if ratio > MAX_SPACING_RATIO:
            raise ConfigError(f"spacing ratio {ratio:.3f} across R exceeds {MAX_SPACING_RATIO}")

    @classmethod
    def build(cls, profile: TwoPhaseProfile, n_intervals: int = 10000, r_lo: float = 1e-4) -> "RadialGrid":
        big_r = profile.core_radius
        core_len = math.log(big_r / r_lo)
        shell_len = -math.log(big_r)
        n_core = max(2, int(round(n_intervals * core_len / (core_len + shell_len))))
        return cls(r_lo=r_lo, core_radius=big_r, n_core=n_core, n_shell=max(2, n_intervals - n_core))

    def refined(self) -> "RadialGrid":
        """Halve both spacings; the coarse nodes are every other fine node"""
        return RadialGrid(self.r_lo, self.core_radius, 2 * self.n_core, 2 * self.n_shell)

    @property
    def h_core(self) -> float:
        return math.log(self.core_radius / self.r_lo) / self.n_core

    @property
    def h_shell(self) -> float:
        return -math.log(self.core_radius) / self.n_shell

    @property
    def interface(self) -> int:
        return self.n_core

    @property
    def n_intervals(self) -> int:
        return self.n_core + self.n_shell

    @property
    def s(self) -> np.ndarray:
        core = np.log(self.r_lo) + self.h_core * np.arange(self.n_core)
        shell = np.log(self.core_radius) + self.h_shell * np.arange(self.n_shell)
        return np.concatenate([core, shell, [0.0]])

    @property
    def r(self) -> np.ndarray:
        r = np.exp(self.s)
        r[self.interface] = self.core_radius
        r[-1] = 1.0
        return r

    @property
    def in_core(self) -> np.ndarray:
        """Region map per node; the interface node counts as core"""
        mask = np.zeros(self.n_intervals + 1, dtype=bool)
        mask[:self.interface + 1] = True
        return mask


def _region_gradient(grid: RadialGrid, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """du/ds on each closed region, one-sided at R from either side"""
    i = grid.interface
    core = np.gradient(u[:i + 1], grid.h_core, edge_order=2)
    shell = np.gradient(u[i:], grid.h_shell, edge_order=2)
    return core, shell


def _solve_transmission(profile: TwoPhaseProfile, grid: RadialGrid, drift: float,
                        source: np.ndarray, kappa: float, jump_source: float,
                        outer_value: float, closure: str, inner_value: Optional[float] = None) -> np.ndarray:
    """u_ss + drift u_s = source per region, with flux a(u_s + kappa u) continuous at R
    up to (beta - alpha) jump_source"""
    if closure not in CLOSURES:
        raise ConfigError(f"unknown closure {closure!r}; expected one of {CLOSURES}")
    if closure == 'inner' and inner_value is None:
        raise ConfigError("closure 'inner' needs the value at r_lo")
    n = grid.n_intervals
    i_face = grid.interface
    h1, h2 = grid.h_core, grid.h_shell
    alpha, beta = profile.alpha, profile.beta

    nodes = np.array([i for i in range(1, n) if i != i_face])
    h = np.where(nodes < i_face, h1, h2)
    interior = np.arange(len(nodes))
    rows = [interior, interior, interior]
    cols = [nodes - 1, nodes, nodes + 1]
    vals = [1.0 - drift * h / 2.0, np.full(len(nodes), -2.0), 1.0 + drift * h / 2.0]
    rhs = np.zeros(n + 1)
    rhs[:len(nodes)] = h * h * source[nodes]
    row = len(nodes)

    def add_row(entries, value):
        nonlocal row
        for col, val in entries:
            rows.append(np.array([row]))
            cols.append(np.array([col]))
            vals.append(np.array([val]))
        rhs[row] = value
        row += 1

    # alpha (u_s^- + kappa u) - beta (u_s^+ + kappa u) = (beta - alpha) jump_source
    i = i_face
    add_row([(i - 2, alpha / (2 * h1)),
             (i - 1, -4 * alpha / (2 * h1)),
             (i, 3 * alpha / (2 * h1) + 3 * beta / (2 * h2) + kappa * (alpha - beta)),
             (i + 1, -4 * beta / (2 * h2)),
             (i + 2, beta / (2 * h2))], (beta - alpha) * jump_source)
    add_row([(n, 1.0)], outer_value)
    if closure == 'regular':
        add_row([(0, -3.0), (1, 4.0), (2, -1.0)], 0.0)
    elif closure == 'inner':
        # Dirichlet at both ends; the outer flux is left to the equations
        add_row([(0, 1.0)], inner_value)
    else:
        # marched inward from r = 1: u_s(1) = 0, nothing imposed at r_lo
        add_row([(n, 3.0), (n - 1, -4.0), (n - 2, 1.0)], 0.0)

    csr = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                        shape=(n + 1, n + 1))
    u = sla.spsolve(csr, rhs)
    residual = np.max(np.abs(csr @ u - rhs))
    scale = max(1.0, np.max(np.abs(u)))
    if not np.all(np.isfinite(u)) or residual > RESIDUAL_TOL * scale:
        raise SolverConvergenceError(f"radial solve residual {residual:.3e} exceeds {RESIDUAL_TOL} "
                                     f"(scale {scale:.3e})")
    return u


def solve_radial_f(profile: TwoPhaseProfile, grid: RadialGrid) -> np.ndarray:
    """f_ss + N f_s = 0, [a(f + f_s)] = 0 at R, f(1) = 1, zero flux at r_lo"""
    n = profile.dim
    return _solve_transmission(profile, grid, drift=float(n), source=np.zeros(grid.n_intervals + 1),
                               kappa=1.0, jump_source=0.0, outer_value=1.0, closure='regular')


def _first_corrector_on_grid(fc: FirstCorrector, profile: TwoPhaseProfile,
                             grid: RadialGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Exact f and f_s = r f' per node, core branch at the interface node"""
    r = grid.r
    n = profile.dim
    shell = ~grid.in_core
    f = np.where(shell, fc.b2t + fc.ct / r ** n, fc.b1t)
    f_s = np.where(shell, -n * fc.ct / r ** n, 0.0)
    return f, f_s


def solve_radial_gh(profile: TwoPhaseProfile, fc: FirstCorrector, grid: RadialGrid,
                    closure: str = 'cauchy',
                    inner: Optional[Tuple[float, float]] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Second-corrector radial ODEs with g(1) = h(1) = 0

    g_ss + (N+2) g_s = -2 f_s with [a(g_s + 2g + f - 1)] = 0,
    h_ss + (N-2) h_s = r^2 (-2g - (a - m + 2a(f-1))/a) with [a h_s] = 0.

    closure 'inner' pins (g, h) at r_lo to `inner` and leaves the outer flux free.
    """
    n = profile.dim
    r = grid.r
    f, f_s = _first_corrector_on_grid(fc, profile, grid)
    f_at_r = fc.b1t

    g_lo, h_lo = inner if inner is not None else (None, None)
    g = _solve_transmission(profile, grid, drift=n + 2.0, source=-2.0 * f_s, kappa=2.0,
                            jump_source=f_at_r - 1.0, outer_value=0.0, closure=closure, inner_value=g_lo)

    a = profile.conductivity(r).astype(float)
    a[grid.in_core] = profile.alpha
    source = r ** 2 * (-2.0 * g - (a - fc.m + 2.0 * a * (f - 1.0)) / a)
    h = _solve_transmission(profile, grid, drift=n - 2.0, source=source, kappa=0.0,
                            jump_source=0.0, outer_value=0.0, closure=closure, inner_value=h_lo)
    return g, h


def outer_neumann_defect(grid: RadialGrid, g: np.ndarray, h: np.ndarray) -> Dict[str, float]:
    """g'(1) + 2g(1) and h'(1) by one-sided differences"""
    h2 = grid.h_shell
    g_s = (3 * g[-1] - 4 * g[-2] + g[-3]) / (2 * h2)
    h_s = (3 * h[-1] - 4 * h[-2] + h[-3]) / (2 * h2)
    return {'g': float(g_s + 2 * g[-1]), 'h': float(h_s)}


def richardson(coarse, fine, order: int = 2):
    """Extrapolate a coarse/fine pair; grid functions are compared on the coarse nodes"""
    fine_arr = np.asarray(fine, dtype=float)
    coarse_arr = np.asarray(coarse, dtype=float)
    if fine_arr.ndim == 1 and coarse_arr.ndim == 1 and len(fine_arr) != len(coarse_arr):
        fine_arr = fine_arr[::2]
    factor = 2.0 ** order
    result = (factor * fine_arr - coarse_arr) / (factor - 1.0)
    return float(result) if result.ndim == 0 else result


def mixed_sup_error(approx: np.ndarray, exact: np.ndarray) -> float:
    """max |approx - exact| / max(1, |exact|) pointwise"""
    approx = np.asarray(approx, dtype=float)
    exact = np.asarray(exact, dtype=float)
    return float(np.max(np.abs(approx - exact) / np.maximum(1.0, np.abs(exact))))


def observed_order(u_n: np.ndarray, u_2n: np.ndarray, u_4n: np.ndarray) -> float:
    """log2 of successive sup differences on the coarsest nodes"""
    d1 = np.max(np.abs(np.asarray(u_n) - np.asarray(u_2n)[::2]))
    d2 = np.max(np.abs(np.asarray(u_2n)[::2] - np.asarray(u_4n)[::4]))
    if d2 == 0.0:
        return float('inf')
    return math.log2(d1 / d2)


def energy_integral_m(profile: TwoPhaseProfile, grid: RadialGrid, f: Optional[np.ndarray] = None) -> float:
    """(1/|B|) integral of a |grad(y_k f)|^2 = N int a r^N [f^2 + 2 f f_s/N + f_s^2/N] ds

    Product rule: exact exponential weight times piecewise-linear bracket, so a constant
    bracket is integrated exactly. The core below r_lo contributes alpha f(r_lo)^2 r_lo^N.
    """
    if f is None:
        f = solve_radial_f(profile, grid)
    n = profile.dim
    i = grid.interface
    s = grid.s
    core_fs, shell_fs = _region_gradient(grid, f)

    def bracket(u, u_s):
        return u ** 2 + 2.0 * u * u_s / n + u_s ** 2 / n

    def weighted(s_nodes, q, h):
        delta = n * h
        lead = np.exp(n * s_nodes[:-1])
        ratio = np.expm1(delta) / delta
        left = lead / n * (ratio - 1.0)
        right = lead / n * (np.expm1(delta) - (ratio - 1.0))
        return math.fsum(left * q[:-1]) + math.fsum(right * q[1:])

    core = profile.alpha * weighted(s[:i + 1], bracket(f[:i + 1], core_fs), grid.h_core)
    shell = profile.beta * weighted(s[i:], bracket(f[i:], shell_fs), grid.h_shell)
    inner = profile.alpha * f[0] ** 2 * grid.r_lo ** n
    return n * (core + shell) + inner


def _uniform_ball_points(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    directions = rng.standard_normal((count, dim))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    radii = rng.random(count) ** (1.0 / dim)
    return directions * radii[:, None]


def _sphere_points(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    directions = rng.standard_normal((count, dim))
    return directions / np.linalg.norm(directions, axis=1)[:, None]


class _RunningMoments:
    """Chan's pairwise combination of chunk means and squared deviations"""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0

    def add(self, values: np.ndarray):
        k = len(values)
        if k == 0:
            return
        chunk_mean = float(np.mean(values))
        chunk_m2 = float(np.sum((values - chunk_mean) ** 2))
        total = self.count + k
        delta = chunk_mean - self.mean
        self.mean += delta * k / total
        self.m2 += chunk_m2 + delta ** 2 * self.count * k / total
        self.count = total

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return float('inf')
        return math.sqrt(self.m2 / (self.count - 1) / self.count)


def mc_volume_integral(integrand: Callable[[np.ndarray], np.ndarray], samples: int, seed: int,
                       dim: int, chunk: int = 10 ** 6) -> Tuple[float, float]:
    """Integral over B(0,1) by direct uniform ball sampling; returns (estimate, stderr)"""
    if samples < 2:
        raise ConfigError("Monte-Carlo integration needs at least 2 samples")
    rng = np.random.default_rng(seed)
    moments = _RunningMoments()
    remaining = samples
    while remaining > 0:
        count = min(chunk, remaining)
        points = _uniform_ball_points(rng, count, dim)
        moments.add(np.asarray(integrand(points), dtype=float))
        remaining -= count
    omega = unit_ball_volume(dim)
    return omega * moments.mean, omega * moments.stderr


def sphere_moments_mc(dim: int, samples: int, seed: int, axis: int = 0) -> Dict[str, Dict[str, float]]:
    """Sphere averages of y_k^2 and y_k^4 against 1/N and 3/(N(N+2))"""
    rng = np.random.default_rng(seed)
    points = _sphere_points(rng, samples, dim)
    yk = points[:, axis]
    report = {}
    for name, values, target in (('second', yk ** 2, 1.0 / dim),
                                 ('fourth', yk ** 4, 3.0 / (dim * (dim + 2)))):
        report[name] = {
            'estimate': float(np.mean(values)),
            'stderr': float(np.std(values, ddof=1) / math.sqrt(samples)),
            'target': target,
        }
    return report


def radial_trapezoid_density(fc: FirstCorrector, profile: TwoPhaseProfile, points: int = 20001) -> float:
    """Dispersion density by trapezoid rule on uniform r grids per region"""
    n = profile.dim
    area = n * unit_ball_volume(n)
    big_r = profile.core_radius

    def region(lo, hi, a, shell):
        r = np.linspace(lo, hi, points)
        if shell:
            f = fc.b2t + fc.ct / r ** n
            g = -n * fc.ct / r ** n
        else:
            f = np.full_like(r, fc.b1t)
            g = np.zeros_like(r)
        weight = area * r ** (n + 1) / n
        energy = weight * a * f ** 2 * (f ** 2 + 3.0 * (2.0 * f * g + g ** 2) / (n + 2))
        defect = weight * fc.m * (f - 1.0) ** 2 / 2.0
        return trapezoid(energy + defect, r)

    total = region(0.0, big_r, profile.alpha, False) + region(big_r, 1.0, profile.beta, True)
    return total - fc.m * unit_ball_volume(n) / (n + 2)


def _f_complex(fc: FirstCorrector, profile: TwoPhaseProfile, z: complex) -> complex:
    if z.real < profile.core_radius:
        return complex(fc.b1t)
    return fc.b2t + fc.ct / z ** profile.dim


def fd_rhs_reduction(fc: FirstCorrector, profile: TwoPhaseProfile, r: float,
                     step: float = 1e-20) -> Tuple[float, float]:
    """Source coefficients of y_k y_l and delta_kl with f' by complex-step differentiation"""
    if r <= 0.0 or r >= 1.0 or r == profile.core_radius:
        raise ValueError(f"source is defined on (0,R) and (R,1); got r={r}")
    a = profile.alpha if r < profile.core_radius else profile.beta
    f = _f_complex(fc, profile, complex(r)).real
    f_prime = _f_complex(fc, profile, complex(r, step)).imag / step
    quadratic = -2.0 * a * f_prime / r
    constant = -(a - fc.m + 2.0 * a * (f - 1.0))
    return quadratic, constant


@dataclass(frozen=True)
class Bloch1DResult:
    eta_samples: List[float]
    lambda1_samples: List[float]
    q: float
    burnett: float
    nuisance: float
    fit_residual: float
    parity_defect: float
    lambda_at_zero: Optional[float] = None
    needs_refinement: bool = False

    def to_dict(self) -> Dict:
        return {
            'eta_samples': self.eta_samples,
            'lambda1_samples': self.lambda1_samples,
            'q': self.q,
            'burnett': self.burnett,
            'nuisance': self.nuisance,
            'fit_residual': self.fit_residual,
            'parity_defect': self.parity_defect,
            'lambda_at_zero': self.lambda_at_zero,
            'needs_refinement': self.needs_refinement,
        }


def _face_operator(face_a: np.ndarray, eta: float, h: float) -> Tuple[sp.csr_matrix, sp.csr_matrix]:
    """Shifted face difference D p = (p_{j+1} - p_j)/h + i eta (p_j + p_{j+1})/2 and h a_f D^* D"""
    cells = len(face_a)
    idx = np.arange(cells)
    rows = np.concatenate([idx, idx])
    cols = np.concatenate([idx, (idx + 1) % cells])
    vals = np.concatenate([np.full(cells, -1.0 / h + 0.5j * eta), np.full(cells, 1.0 / h + 0.5j * eta)])
    diff = sp.csr_matrix((vals, (rows, cols)), shape=(cells, cells))
    weights = sp.diags(h * face_a)
    return diff, (diff.conj().T @ weights @ diff).tocsr()


def _ground_state(face_a: np.ndarray, eta: float, h: float) -> float:
    """Smallest eigenvalue of the shifted operator as a difference-form Rayleigh quotient"""
    diff, stiffness = _face_operator(face_a, eta, h)
    # mass matrix is h I
    _, vectors = eigh(stiffness.toarray() / h, subset_by_index=[0, 0])
    p = vectors[:, 0]
    dp = diff @ p
    energy = math.fsum(h * face_a * (dp.real ** 2 + dp.imag ** 2))
    mass = math.fsum(h * (p.real ** 2 + p.imag ** 2))
    return energy / mass


def bloch_1d(conductivity: Callable[[np.ndarray], np.ndarray], eta_grid: Optional[Sequence[float]] = None,
             cells: int = BLOCH_MIN_CELLS) -> Bloch1DResult:
    """First Bloch eigenvalue of -(d/dy + i eta) a (d/dy + i eta) on the periodic unit cell,
    fitted as q eta^2 + d eta^4 + e eta^6"""
    if cells < BLOCH_MIN_CELLS or cells % 2:
        raise ConfigError(f"mesh needs an even number of cells >= {BLOCH_MIN_CELLS}, got {cells}")
    etas = np.asarray(eta_grid if eta_grid is not None else np.linspace(-0.1, 0.1, 11), dtype=float)
    if np.any(np.abs(etas) > BLOCH_MAX_ETA):
        raise ConfigError(f"|eta| must not exceed {BLOCH_MAX_ETA}")
    if len(etas) < 3:
        raise ConfigError("at least three eta samples are needed for the fit")

    h = 1.0 / cells
    face_a = np.asarray(conductivity((np.arange(cells) + 0.5) * h), dtype=float)
    lambdas = np.array([_ground_state(face_a, float(eta), h) for eta in etas])

    design = np.stack([etas ** 2, etas ** 4, etas ** 6], axis=1)
    coeffs, *_ = np.linalg.lstsq(design, lambdas, rcond=None)
    fit_residual = float(np.sqrt(np.mean((design @ coeffs - lambdas) ** 2)))

    parity = 0.0
    for eta, lam in zip(etas, lambdas):
        mirror = np.flatnonzero(np.isclose(etas, -eta, rtol=0.0, atol=1e-12))
        if len(mirror):
            parity = max(parity, abs(lam - lambdas[mirror[0]]))
    zero = np.flatnonzero(etas == 0.0)
    lambda_at_zero = float(lambdas[zero[0]]) if len(zero) else None

    needs_refinement = fit_residual > FIT_RESIDUAL_TOL
    if needs_refinement:
        logger.warning(f"Bloch fit residual {fit_residual:.3e} above {FIT_RESIDUAL_TOL}; refine the mesh")
    return Bloch1DResult(
        eta_samples=[float(e) for e in etas],
        lambda1_samples=[float(v) for v in lambdas],
        q=float(coeffs[0]),
        burnett=float(coeffs[1]),
        nuisance=float(coeffs[2]),
        fit_residual=fit_residual,
        parity_defect=float(parity),
        lambda_at_zero=lambda_at_zero,
        needs_refinement=needs_refinement,
    )


def laminate_cell(alpha: float, beta: float, theta: float, interfaces: int = 1) -> Callable[[np.ndarray], np.ndarray]:
    """Unit cell made of `interfaces` repeated layers, alpha on the first theta of each"""
    if interfaces < 1:
        raise ConfigError("interfaces must be >= 1")
    if not (0.0 < theta < 1.0) or alpha <= 0 or beta <= 0:
        raise ConfigError("laminate needs positive conductivities and 0 < theta < 1")

    def conductivity(y):
        phase = np.mod(np.asarray(y, dtype=float) * interfaces, 1.0)
        return np.where(phase < theta, alpha, beta)

    return conductivity


def interface_sweep(alpha: float, beta: float, theta: float, counts: Sequence[int],
                    cells: int = BLOCH_MIN_CELLS) -> List[Dict[str, float]]:
    """Fitted q and Burnett coefficient per number of repeated layers"""
    rows = []
    for k in sorted(counts):
        result = bloch_1d(laminate_cell(alpha, beta, theta, k), cells=cells)
        rows.append({'interfaces': k, 'q': result.q, 'burnett': result.burnett,
                     'fit_residual': result.fit_residual})
        logger.debug(f"{k} interfaces: q={result.q:.10f}, burnett={result.burnett:.6e}")
    return rows


def grid_greedy_packing(dim: int, stop: StopCriterion, grid: int = 1024,
                        min_radius_floor: float = 1e-4) -> BallPacking:
    """Exhaustive grid greedy: each ball sits at the best grid point, no local ascent"""
    if dim not in SUPPORTED_DIMS:
        raise ConfigError(f"packing construction supports N in {SUPPORTED_DIMS}, got {dim}")
    clearance_field = ClearanceField(dim, grid)
    packing = BallPacking(dim=dim, generator='grid-greedy')
    previous = 0.5
    while True:
        if stop.max_balls is not None and len(packing) >= stop.max_balls:
            break
        if stop.target_coverage is not None and packing.coverage >= stop.target_coverage:
            break
        if packing.coverage >= 1.0 - COVERAGE_TOL:
            break
        center, radius = clearance_field.best()
        if radius <= min_radius_floor or (stop.min_radius is not None and radius < stop.min_radius):
            break
        ball = TorusBall(center=tuple(float(c) for c in center), radius=min(radius, previous))
        clearance_field.add_ball(ball)
        packing = packing.with_balls([ball])
        previous = ball.radius

    if stop.target_coverage is not None and packing.coverage < stop.target_coverage:
        raise SearchBudgetExceededError(
            f"grid greedy stalled at coverage {packing.coverage:.6f} < {stop.target_coverage}",
            partial=packing)
    logger.info(f"Grid greedy ({grid}^{dim}): {len(packing)} balls, coverage {packing.coverage:.9f}")
    return packing.validate()
