# -*- coding: utf-8 -*-
"""
Scale Sequence Functional Module
I = -c_N^((N+2)/N) sum d_p^((N+2)/N) over normalized scale sequences d_p = eps_p^N / c_N,
its bounds, and the truncated Apollonian estimate of the minimum
"""

import math
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.errors import ConstraintViolationError, MixedDimensionError
from src.material import unit_ball_volume
from src.packing import BallPacking, SearchSpec, StopCriterion, greedy_apollonian

SUM_TOL = 1e-6
PARTIAL_TOL = 1e-9

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScaleSequence:
    """Non-increasing d_p on the l1 simplex (or below it when partial)"""

    d: Tuple[float, ...]
    dim: int
    partial: bool = False
    certified: bool = False

    def __post_init__(self):
        if self.dim < 1:
            raise ConstraintViolationError(f"dim must be >= 1, got {self.dim}")
        if any(x < 0 or not math.isfinite(x) for x in self.d):
            raise ConstraintViolationError("scale sequence entries must be finite and non-negative")
        if any(later > earlier for earlier, later in zip(self.d, self.d[1:])):
            raise ConstraintViolationError("scale sequence must be non-increasing")
        if self.partial and self.total > 1.0 + PARTIAL_TOL:
            raise ConstraintViolationError(f"partial sequence sums to {self.total} > 1")

    @property
    def c_n(self) -> float:
        return 1.0 / unit_ball_volume(self.dim)

    @property
    def total(self) -> float:
        return math.fsum(self.d)

    @property
    def deficit(self) -> float:
        return max(1.0 - self.total, 0.0)

    @property
    def realizable(self) -> bool:
        """Every radius fits on the torus: d_p <= omega_N / 2^N"""
        limit = unit_ball_volume(self.dim) / 2.0 ** self.dim
        return all(x <= limit * (1.0 + 1e-12) for x in self.d)

    def radii(self) -> List[float]:
        return [(x * self.c_n) ** (1.0 / self.dim) for x in self.d]


@dataclass(frozen=True)
class FunctionalValue:
    i_value: float
    upper_env: float
    bound_from_d1: float


@dataclass(frozen=True)
class BoundCheck:
    abs_i: float
    bound: float
    satisfied: bool


@dataclass(frozen=True)
class ApollonianEstimate:
    sequence: ScaleSequence
    packing: BallPacking
    i_lower: float
    i_upper: float
    coverage: float
    deficit: float

    def to_record(self, radii_file: Optional[str] = None) -> dict:
        return {
            'i_lower': self.i_lower,
            'i_upper': self.i_upper,
            'radii_file': radii_file,
            'coverage': self.coverage,
            'deficit': self.deficit,
            'balls': len(self.packing),
        }


def from_radii(radii: Sequence[float], dim: int, partial: bool = True,
               certified: bool = False) -> ScaleSequence:
    omega = unit_ball_volume(dim)
    d = sorted((omega * float(r) ** dim for r in radii), reverse=True)
    return ScaleSequence(d=tuple(d), dim=dim, partial=partial, certified=certified)


def functional_I(s: ScaleSequence) -> FunctionalValue:
    """Exact evaluation with compensated summation"""
    if not s.partial and abs(s.total - 1.0) > SUM_TOL:
        raise ConstraintViolationError(
            f"sum of d_p is {s.total:.12f}; expected 1 within {SUM_TOL} (mark the sequence partial)")
    n = s.dim
    power = (n + 2.0) / n
    scale = s.c_n ** power
    i_value = -scale * math.fsum(x ** power for x in s.d)
    upper_env = -math.fsum(r ** (n + 2) for r in s.radii())
    d1 = s.d[0] if s.d else 0.0
    return FunctionalValue(i_value=i_value, upper_env=upper_env, bound_from_d1=scale * d1 ** (2.0 / n))


def bound_check(s: ScaleSequence) -> BoundCheck:
    """|I| <= c_N^((N+2)/N) d_1^(2/N), from d_p^((N+2)/N) <= d_1^(2/N) d_p"""
    value = functional_I(s)
    abs_i = abs(value.i_value)
    satisfied = abs_i <= value.bound_from_d1 * (1.0 + 1e-12)
    if not satisfied:
        logger.warning(f"bound violated: |I|={abs_i!r} > {value.bound_from_d1!r}")
    return BoundCheck(abs_i=abs_i, bound=value.bound_from_d1, satisfied=satisfied)


def minimize_via_apollonian(dim: int, budget: StopCriterion,
                            search_spec: Optional[SearchSpec] = None) -> ApollonianEstimate:
    """Bracket I_min from a truncated greedy packing

    The computed sum is a lower bound for |I_min|; the uncovered measure, split into balls no
    larger than the smallest found radius, adds at most eps_min^2 (1 - coverage) / omega_N.
    """
    packing = greedy_apollonian(dim, budget, search_spec)
    sequence = from_radii(packing.radii, dim, partial=True, certified=True)
    value = functional_I(sequence)
    omega = unit_ball_volume(dim)
    cover = packing.coverage
    deficit = max(1.0 - cover, 0.0)
    eps_min = min(packing.radii) if packing.radii else 0.5
    computed = abs(value.upper_env)
    worst_case = computed + eps_min ** 2 * deficit / omega
    logger.info(f"I_min bracket for N={dim}: [{-worst_case!r}, {-computed!r}] "
                f"from {len(packing)} balls, deficit {deficit:.3e}")
    return ApollonianEstimate(sequence=sequence, packing=packing, i_lower=-worst_case,
                              i_upper=-computed, coverage=cover, deficit=deficit)


def compare_structures(sequences: Sequence[ScaleSequence]) -> List[Tuple[int, FunctionalValue]]:
    """Stable ranking by I ascending; equal values keep input order"""
    dims = {s.dim for s in sequences}
    if len(dims) > 1:
        raise MixedDimensionError(f"sequences mix dimensions {sorted(dims)}")
    scored = [(idx, functional_I(s)) for idx, s in enumerate(sequences)]
    return sorted(scored, key=lambda item: item[1].i_value)


def equal_split(k: int, dim: int) -> ScaleSequence:
    """k equal parts; |I| = c_N^((N+2)/N) k^(-2/N)"""
    if k < 1:
        raise ConstraintViolationError("k must be >= 1")
    return ScaleSequence(d=(1.0 / k,) * k, dim=dim)


def stratified_sequence(levels: int, dim: int, multiplicity: Optional[int] = None) -> ScaleSequence:
    """Level j holds multiplicity^j equal entries sharing mass 2^-(j+1); the last level takes the rest"""
    if levels < 1:
        raise ConstraintViolationError("levels must be >= 1")
    mult = multiplicity if multiplicity is not None else 2 ** dim
    if mult < 2:
        raise ConstraintViolationError("multiplicity must be >= 2")
    d: List[float] = []
    for j in range(levels):
        mass = 0.5 ** (j + 1) if j < levels - 1 else 0.5 ** j
        count = mult ** j
        d.extend([mass / count] * count)
    return ScaleSequence(d=tuple(d), dim=dim)


def robin_hood_transfer(s: ScaleSequence, rich: int, poor: int, amount: float) -> ScaleSequence:
    """Move mass from a larger entry to a smaller one without reversing their order"""
    if not (0 <= rich < len(s.d) and 0 <= poor < len(s.d)) or rich == poor:
        raise ConstraintViolationError("transfer indices must be distinct and in range")
    gap = s.d[rich] - s.d[poor]
    if gap < 0 or not (0.0 <= amount <= gap / 2.0):
        raise ConstraintViolationError(f"amount {amount} must lie in [0, {gap / 2.0}]")
    d = list(s.d)
    d[rich] -= amount
    d[poor] += amount
    return ScaleSequence(d=tuple(sorted(d, reverse=True)), dim=s.dim, partial=s.partial)


def random_normalized(rng: np.random.Generator, size: int, dim: int) -> ScaleSequence:
    """Uniform draw from the simplex, sorted non-increasing"""
    d = np.sort(rng.dirichlet(np.ones(size)))[::-1]
    return ScaleSequence(d=tuple(float(x) for x in d), dim=dim)
