# -*- coding: utf-8 -*-
"""
Torus Packing Module
Disjoint ball packings of the flat torus [0,1)^N: clearance field, largest empty ball,
greedy Apollonian generation, coverage accounting and the packing file format
"""

import json
import math
import logging
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from src.errors import (ConfigError, CoverageCompleteError, PackingFormatError,
                        PackingInvariantError, SearchBudgetExceededError)
from src.material import unit_ball_volume
from src.results_storage import atomic_write_text, to_csv, to_json

MAX_RADIUS = 0.5
DISJOINT_TOL = 1e-12
COVERAGE_TOL = 1e-9
CENTER_DEDUP_TOL = 1e-7
SUPPORTED_DIMS = (1, 2, 3)
DEFAULT_GRID = {1: 4096, 2: 512, 3: 96}
GENERATORS = ('apollonian', 'random-greedy', 'grid-greedy', 'file')

logger = logging.getLogger(__name__)

Point = Tuple[float, ...]


def canonical(x) -> np.ndarray:
    """Representative in [0,1)^N"""
    y = np.mod(np.asarray(x, dtype=float), 1.0)
    # mod of a tiny negative rounds up to 1.0
    return np.where(y >= 1.0, 0.0, y)


def minimal_image(delta: np.ndarray) -> np.ndarray:
    return delta - np.round(delta)


def torus_distance(a, b, dim: Optional[int] = None) -> float:
    """Euclidean length of the minimal-image difference"""
    a_arr = np.atleast_1d(np.asarray(a, dtype=float))
    b_arr = np.atleast_1d(np.asarray(b, dtype=float))
    if dim is not None and (a_arr.shape[-1] != dim or b_arr.shape[-1] != dim):
        raise ValueError(f"points must have {dim} coordinates")
    return float(np.linalg.norm(minimal_image(a_arr - b_arr)))


@dataclass(frozen=True)
class TorusBall:
    center: Point
    radius: float

    def to_dict(self) -> Dict:
        return {'center': list(self.center), 'radius': self.radius}


@dataclass(frozen=True)
class BallPacking:
    """Immutable snapshot; insertion returns a new packing"""

    dim: int
    balls: Tuple[TorusBall, ...] = ()
    generator: str = 'apollonian'

    @property
    def radii(self) -> List[float]:
        return [b.radius for b in self.balls]

    @property
    def centers(self) -> np.ndarray:
        if not self.balls:
            return np.zeros((0, self.dim))
        return np.array([b.center for b in self.balls], dtype=float)

    @property
    def coverage(self) -> float:
        return coverage(self)['fraction']

    def __len__(self) -> int:
        return len(self.balls)

    def with_balls(self, new_balls: Sequence[TorusBall]) -> "BallPacking":
        return replace(self, balls=self.balls + tuple(new_balls))

    def overlapping_pairs(self, tol: float = DISJOINT_TOL) -> List[Tuple[int, int]]:
        n = len(self.balls)
        if n < 2:
            return []
        centers = self.centers
        radii = np.array(self.radii)
        pairs = []
        for i in range(n - 1):
            gaps = np.linalg.norm(minimal_image(centers[i + 1:] - centers[i]), axis=1)
            bad = np.nonzero(gaps < radii[i] + radii[i + 1:] - tol)[0]
            pairs.extend((i, i + 1 + int(j)) for j in bad)
        return pairs

    def validate(self) -> "BallPacking":
        """Check radius bounds, canonical centers, ordering, disjointness and coverage"""
        for idx, ball in enumerate(self.balls):
            if len(ball.center) != self.dim:
                raise PackingInvariantError(f"ball {idx} has a center of dimension {len(ball.center)}, "
                                            f"expected {self.dim}")
            if not (0.0 < ball.radius <= MAX_RADIUS):
                raise PackingInvariantError(f"ball {idx} radius {ball.radius} outside (0, 1/2]")
            if any(not (0.0 <= c < 1.0) for c in ball.center):
                raise PackingInvariantError(f"ball {idx} center {ball.center} is not canonical")
        radii = self.radii
        if any(later > earlier for earlier, later in zip(radii, radii[1:])):
            raise PackingInvariantError("radii are not sorted non-increasing")
        pairs = self.overlapping_pairs()
        if pairs:
            raise PackingInvariantError("balls are not pairwise disjoint", pairs=pairs)
        if self.coverage > 1.0 + COVERAGE_TOL:
            raise PackingInvariantError(f"coverage {self.coverage} exceeds 1")
        return self


def make_packing(dim: int, balls: Sequence[Tuple[Sequence[float], float]],
                 generator: str = 'file') -> BallPacking:
    """Canonicalize centers, sort by radius and validate"""
    items = [TorusBall(center=tuple(float(c) for c in canonical(center)), radius=float(radius))
             for center, radius in balls]
    items.sort(key=lambda b: (-b.radius, b.center))
    return BallPacking(dim=dim, balls=tuple(items), generator=generator).validate()


def translate(p: BallPacking, shift: Sequence[float]) -> BallPacking:
    """Common torus translation of every center"""
    shift_arr = np.asarray(shift, dtype=float)
    balls = tuple(TorusBall(center=tuple(float(c) for c in canonical(np.asarray(b.center) + shift_arr)),
                            radius=b.radius) for b in p.balls)
    return replace(p, balls=balls)


def coverage(p: BallPacking) -> Dict[str, float]:
    """Covered fraction sum omega_N eps^N, the raw sum eps^N and its ratio to c_N = 1/omega_N"""
    omega = unit_ball_volume(p.dim)
    sum_eps_n = math.fsum(r ** p.dim for r in p.radii)
    fraction = omega * sum_eps_n
    return {'fraction': fraction, 'sum_eps_N': sum_eps_n, 'ratio_to_cN': sum_eps_n * omega}


def _point_clearance(x: np.ndarray, centers: np.ndarray, radii: np.ndarray) -> float:
    if len(radii) == 0:
        return MAX_RADIUS
    dist = np.sqrt(np.sum(minimal_image(x - centers) ** 2, axis=1))
    return float(min(np.min(dist - radii), MAX_RADIUS))


def clearance(p: BallPacking, x) -> float:
    """Radius of the largest ball at x disjoint from the packing, clamped at 1/2"""
    return _point_clearance(np.asarray(x, dtype=float), p.centers, np.array(p.radii, dtype=float))


@dataclass(frozen=True)
class StopCriterion:
    min_radius: Optional[float] = None
    max_balls: Optional[int] = None
    target_coverage: Optional[float] = None

    def __post_init__(self):
        if self.min_radius is None and self.max_balls is None and self.target_coverage is None:
            raise ConfigError("stop criterion needs min_radius, max_balls or target_coverage")
        if self.min_radius is not None and not (0.0 < self.min_radius <= MAX_RADIUS):
            raise ConfigError(f"min_radius={self.min_radius} outside (0, 1/2]")
        if self.max_balls is not None and self.max_balls < 1:
            raise ConfigError(f"max_balls={self.max_balls} must be >= 1")
        if self.target_coverage is not None and not (0.0 < self.target_coverage <= 1.0):
            raise ConfigError(f"target_coverage={self.target_coverage} outside (0, 1]")


@dataclass(frozen=True)
class SearchSpec:
    """Resolution and tolerances of the largest-empty-ball search"""

    grid: Optional[int] = None
    top_k: int = 32
    refine: bool = True
    radius_tol: float = 1e-12
    batch_tol: float = 1e-9
    min_radius_floor: float = 1e-4
    threads: int = 1
    max_steps: int = 100000

    def __post_init__(self):
        if self.grid is not None and self.grid < 4:
            raise ConfigError(f"grid={self.grid} must be at least 4 points per axis")
        if self.top_k < 1 or self.threads < 1 or self.max_steps < 1:
            raise ConfigError("top_k, threads and max_steps must be positive")
        if not (0.0 < self.min_radius_floor < MAX_RADIUS):
            raise ConfigError(f"min_radius_floor={self.min_radius_floor} outside (0, 1/2)")

    def grid_for(self, dim: int) -> int:
        return self.grid if self.grid is not None else DEFAULT_GRID[dim]


class ClearanceField:
    """Clearance sampled on a regular periodic grid, updated incrementally per inserted ball"""

    def __init__(self, dim: int, grid: int, packing: Optional[BallPacking] = None):
        self.dim = dim
        self.grid = grid
        self.spacing = 1.0 / grid
        self.axis = np.arange(grid) / grid
        self.values = np.full((grid,) * dim, MAX_RADIUS)
        if packing is not None:
            for ball in packing.balls:
                self.add_ball(ball)

    def point(self, flat_index: int) -> np.ndarray:
        return self.axis[np.array(np.unravel_index(flat_index, self.values.shape))]

    def add_ball(self, ball: TorusBall):
        sq = np.zeros(self.values.shape)
        for k, c in enumerate(ball.center):
            shape = [1] * self.dim
            shape[k] = self.grid
            sq = sq + (minimal_image(self.axis - c) ** 2).reshape(shape)
        np.minimum(self.values, np.sqrt(sq) - ball.radius, out=self.values)

    def best(self) -> Tuple[np.ndarray, float]:
        """Grid maximizer, first in lexicographic order among equal values"""
        idx = int(np.argmax(self.values))
        return self.point(idx), float(self.values.flat[idx])

    def local_maxima(self, floor: float, top_k: int) -> List[Tuple[np.ndarray, float]]:
        """Periodic grid local maxima above floor, pruned by the 1-Lipschitz bound"""
        shaped = self.values
        is_max = shaped > floor
        for axis in range(self.dim):
            is_max &= shaped >= np.roll(shaped, 1, axis=axis)
            is_max &= shaped >= np.roll(shaped, -1, axis=axis)
        idx = np.flatnonzero(is_max)
        if len(idx) == 0:
            return []
        vals = shaped.ravel()[idx]
        order = np.lexsort((idx, -vals))
        idx, vals = idx[order], vals[order]
        keep = vals >= vals[0] - self.spacing * math.sqrt(self.dim)
        idx, vals = idx[keep][:top_k], vals[keep][:top_k]
        return [(self.point(int(i)), float(v)) for i, v in zip(idx, vals)]


class ApollonianPacker:
    """Greedy largest-empty-ball packer on the flat torus"""

    def __init__(self, dim: int, search_spec: Optional[SearchSpec] = None):
        if dim not in SUPPORTED_DIMS:
            raise ConfigError(f"packing construction supports N in {SUPPORTED_DIMS}, got {dim}")
        self.dim = dim
        self.spec = search_spec or SearchSpec()
        self.logger = logging.getLogger(__name__)
        self._shifts = np.array(list(itertools.product((-1.0, 0.0, 1.0), repeat=dim)))

    def _ascend(self, start: np.ndarray, centers: np.ndarray, radii: np.ndarray,
                spacing: float) -> Tuple[np.ndarray, float]:
        """Nelder-Mead on the clearance, optionally polished by SLSQP"""
        dim = self.dim
        simplex = np.vstack([start] + [start + 0.5 * spacing * np.eye(dim)[i] for i in range(dim)])
        result = minimize(lambda x: -_point_clearance(x, centers, radii), start, method='Nelder-Mead',
                          options={'initial_simplex': simplex, 'xatol': self.spec.radius_tol,
                                   'fatol': self.spec.radius_tol * 1e-2, 'maxiter': 800 * dim})
        best_x = canonical(result.x)
        best_rho = _point_clearance(best_x, centers, radii)
        start_rho = _point_clearance(start, centers, radii)
        if start_rho > best_rho:
            best_x, best_rho = canonical(start), start_rho

        if self.spec.refine and len(radii) > 0:
            polished_x = self._polish(best_x, best_rho, centers, radii)
            if polished_x is not None:
                polished_rho = _point_clearance(polished_x, centers, radii)
                if polished_rho > best_rho:
                    best_x, best_rho = polished_x, polished_rho
        return best_x, best_rho

    def _polish(self, x0: np.ndarray, rho0: float, centers: np.ndarray,
                radii: np.ndarray) -> Optional[np.ndarray]:
        """max rho s.t. |x - c_j - s| - r_j >= rho over the nearest periodic images"""
        dim = self.dim
        images = (centers[:, None, :] + self._shifts[None, :, :]).reshape(-1, dim)
        image_radii = np.repeat(radii, len(self._shifts))
        gaps = np.linalg.norm(x0 - images, axis=1) - image_radii
        # canonical x0 and c_j: the minimal image is among the shifts in {-1,0,1}^N
        order = np.argsort(gaps, kind='stable')[:4 * (dim + 1)]
        active_centers = images[order]
        active_radii = image_radii[order]

        def constraint(z):
            return np.linalg.norm(z[:dim] - active_centers, axis=1) - active_radii - z[dim]

        def constraint_jac(z):
            diff = z[:dim] - active_centers
            norms = np.maximum(np.linalg.norm(diff, axis=1), 1e-300)
            return np.hstack([diff / norms[:, None], -np.ones((len(active_radii), 1))])

        z0 = np.append(x0, rho0)
        result = minimize(lambda z: -z[dim], z0, jac=lambda z: np.append(np.zeros(dim), -1.0),
                          method='SLSQP', bounds=[(None, None)] * dim + [(0.0, MAX_RADIUS)],
                          constraints=[{'type': 'ineq', 'fun': constraint, 'jac': constraint_jac}],
                          options={'ftol': 1e-16, 'maxiter': 200})
        if not np.all(np.isfinite(result.x)):
            return None
        return canonical(result.x[:dim])

    def search(self, packing: BallPacking,
               field_cache: Optional[ClearanceField] = None) -> List[Tuple[np.ndarray, float]]:
        """Distinct local optima sorted by (radius desc, center lex asc)"""
        if not packing.balls:
            return [(np.zeros(self.dim), MAX_RADIUS)]
        if packing.coverage >= 1.0 - COVERAGE_TOL:
            raise CoverageCompleteError(f"coverage {packing.coverage:.12f} leaves no room for another ball")

        grid_field = field_cache or ClearanceField(self.dim, self.spec.grid_for(self.dim), packing)
        candidates = grid_field.local_maxima(self.spec.min_radius_floor, self.spec.top_k)
        centers = packing.centers
        radii = np.array(packing.radii, dtype=float)

        def run(candidate):
            return self._ascend(candidate[0], centers, radii, grid_field.spacing)

        if self.spec.threads > 1 and len(candidates) > 1:
            with ThreadPoolExecutor(max_workers=self.spec.threads) as pool:
                optima = list(pool.map(run, candidates))
        else:
            optima = [run(c) for c in candidates]

        optima = [(x, rho) for x, rho in optima if rho > self.spec.min_radius_floor]
        if not optima:
            raise CoverageCompleteError(
                f"no point has clearance above min_radius_floor={self.spec.min_radius_floor}")
        optima.sort(key=lambda item: (-item[1], tuple(item[0])))

        distinct: List[Tuple[np.ndarray, float]] = []
        for x, rho in optima:
            if all(torus_distance(x, y) > CENTER_DEDUP_TOL for y, _ in distinct):
                distinct.append((x, rho))
        return distinct

    def largest_empty_ball(self, packing: BallPacking) -> Tuple[Point, float]:
        batch = self._best_batch(self.search(packing))
        center, radius = batch[0]
        return tuple(float(c) for c in center), radius

    def _best_batch(self, optima: List[Tuple[np.ndarray, float]]) -> List[Tuple[np.ndarray, float]]:
        best = optima[0][1]
        batch = [(x, rho) for x, rho in optima if rho >= best - self.spec.batch_tol]
        batch.sort(key=lambda item: tuple(item[0]))
        return batch

    def build(self, stop: StopCriterion) -> BallPacking:
        """Insert largest empty balls (whole equal-radius batches) until the stop criterion"""
        packing = BallPacking(dim=self.dim, generator='apollonian')
        grid_field = ClearanceField(self.dim, self.spec.grid_for(self.dim))

        for step in range(self.spec.max_steps):
            if stop.max_balls is not None and len(packing) >= stop.max_balls:
                break
            if stop.target_coverage is not None and packing.coverage >= stop.target_coverage:
                break
            try:
                optima = self.search(packing, grid_field)
            except CoverageCompleteError as e:
                if stop.target_coverage is not None and packing.coverage < stop.target_coverage:
                    raise SearchBudgetExceededError(
                        f"coverage {packing.coverage:.6f} stalled below target {stop.target_coverage}: {e}",
                        partial=packing)
                self.logger.info(f"Stopping after {len(packing)} balls: {e}")
                break

            batch = self._best_batch(optima)
            if stop.min_radius is not None and batch[0][1] < stop.min_radius:
                break

            inserted = self._insert_batch(packing, batch, stop)
            for ball in inserted:
                grid_field.add_ball(ball)
            packing = packing.with_balls(inserted)
            self.logger.debug(f"step {step}: inserted {len(inserted)} ball(s) of radius "
                              f"{inserted[0].radius:.12f}, coverage {packing.coverage:.9f}")
        else:
            raise SearchBudgetExceededError(f"greedy search exceeded {self.spec.max_steps} steps",
                                            partial=packing)

        if stop.target_coverage is not None and packing.coverage < stop.target_coverage:
            raise SearchBudgetExceededError(
                f"ball budget {stop.max_balls} reached at coverage {packing.coverage:.6f} "
                f"< target {stop.target_coverage}", partial=packing)

        self.logger.info(f"Apollonian packing: {len(packing)} balls, coverage {packing.coverage:.9f}")
        return packing

    def _insert_batch(self, packing: BallPacking, batch: List[Tuple[np.ndarray, float]],
                      stop: StopCriterion) -> List[TorusBall]:
        """Mutually disjoint members of the batch in lexicographic order, truncated at max_balls"""
        previous = packing.radii[-1] if packing.balls else MAX_RADIUS
        room = None if stop.max_balls is None else stop.max_balls - len(packing)
        inserted: List[TorusBall] = []
        for x, rho in batch:
            if room is not None and len(inserted) >= room:
                break
            radius = min(float(rho), previous)
            if any(torus_distance(x, b.center) < radius + b.radius - DISJOINT_TOL for b in inserted):
                continue
            ball = TorusBall(center=tuple(float(c) for c in x), radius=radius)
            inserted.append(ball)
            previous = radius
        return inserted


def largest_empty_ball(p: BallPacking, search_spec: Optional[SearchSpec] = None) -> Tuple[Point, float]:
    """Global clearance maximizer; ties broken by the lexicographically smallest center"""
    return ApollonianPacker(p.dim, search_spec).largest_empty_ball(p)


def greedy_apollonian(dim: int, stop: StopCriterion,
                      search_spec: Optional[SearchSpec] = None) -> BallPacking:
    return ApollonianPacker(dim, search_spec).build(stop).validate()


def random_greedy(dim: int, n_balls: int, seed: int, batch: int = 256,
                  max_attempts: int = 1000) -> BallPacking:
    """Random sequential insertion: each ball fills the whole clearance at a uniform random point"""
    if dim not in SUPPORTED_DIMS:
        raise ConfigError(f"packing construction supports N in {SUPPORTED_DIMS}, got {dim}")
    if n_balls < 1:
        raise ConfigError("n_balls must be >= 1")
    rng = np.random.default_rng(seed)
    centers: List[np.ndarray] = []
    radii: List[float] = []
    attempts = 0
    while len(radii) < n_balls and attempts < max_attempts:
        attempts += 1
        samples = rng.random((batch, dim))
        if radii:
            c_arr, r_arr = np.array(centers), np.array(radii)
            gaps = np.array([_point_clearance(s, c_arr, r_arr) for s in samples])
        else:
            gaps = np.full(batch, MAX_RADIUS)
        usable = np.flatnonzero(gaps > 0.0)
        if len(usable) == 0:
            continue
        pick = usable[0]
        centers.append(canonical(samples[pick]))
        radii.append(float(gaps[pick]))
    if len(radii) < n_balls:
        logger.warning(f"random greedy placed {len(radii)} of {n_balls} balls in {attempts} attempts")
    return make_packing(dim, list(zip(centers, radii)), generator='random-greedy')


def packing_record(p: BallPacking) -> Dict:
    return {'dim': p.dim, 'generator': p.generator, 'balls': [b.to_dict() for b in p.balls]}


def save_packing(p: BallPacking, path: str) -> None:
    atomic_write_text(path, to_json(packing_record(p)))
    logger.info(f"Saved {len(p)} balls to {path}")


def save_radii_csv(p: BallPacking, path: str) -> None:
    """Radii and centers as CSV rows for plotting"""
    fields = ['index', 'radius'] + [f'center_{k}' for k in range(p.dim)]
    rows = []
    for idx, ball in enumerate(p.balls):
        row = {'index': idx, 'radius': repr(ball.radius)}
        row.update({f'center_{k}': repr(c) for k, c in enumerate(ball.center)})
        rows.append(row)
    atomic_write_text(path, to_csv(rows, fields))


def parse_packing(text: str) -> BallPacking:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise PackingFormatError(f"invalid JSON: {e.msg}", line=e.lineno)

    if not isinstance(data, dict):
        raise PackingFormatError("packing file must hold a JSON object")
    dim = data.get('dim')
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise PackingFormatError("dim must be a positive integer", field='dim')
    balls = data.get('balls')
    if not isinstance(balls, list):
        raise PackingFormatError("balls must be a list", field='balls')
    generator = data.get('generator', 'file')
    if generator not in GENERATORS:
        raise PackingFormatError(f"unknown generator {generator!r}", field='generator')

    parsed = []
    for idx, entry in enumerate(balls):
        if not isinstance(entry, dict):
            raise PackingFormatError("ball entry must be an object", field=f'balls[{idx}]')
        center = entry.get('center')
        radius = entry.get('radius')
        if (not isinstance(center, list) or len(center) != dim
                or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in center)):
            raise PackingFormatError(f"center must be a list of {dim} numbers", field=f'balls[{idx}].center')
        if not isinstance(radius, (int, float)) or isinstance(radius, bool):
            raise PackingFormatError("radius must be a number", field=f'balls[{idx}].radius')
        parsed.append(TorusBall(center=tuple(float(c) for c in center), radius=float(radius)))

    packing = BallPacking(dim=dim, balls=tuple(parsed), generator=generator)
    return packing.validate()


def load_packing(path: str) -> BallPacking:
    """Read and re-validate a packing file"""
    with open(path, 'r') as handle:
        text = handle.read()
    packing = parse_packing(text)
    logger.info(f"Loaded {len(packing)} balls (N={packing.dim}) from {path}")
    return packing
