# -*- coding: utf-8 -*-
"""
Validation Suite Module
Runs every oracle-vs-closed-form comparison and collects a deterministic JSON report
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from src.corrector import (assemble_system, eval_g_h, neumann_residual, rhs_reduction,
                           solve_closed_form, verify_consistency)
from src.dispersion import (QuadSpec, ball_dispersion_density, density_integrands, dispersion_phs,
                            hs_scale_factor)
from src.errors import SearchBudgetExceededError, SingularEvaluationError
from src.material import (TwoPhaseProfile, conductivity_bounds, first_corrector, flux_jump_residuals,
                          unit_ball_volume)
from src.minimizer import (bound_check, compare_structures, equal_split, from_radii, functional_I,
                           minimize_via_apollonian, random_normalized, robin_hood_transfer)
from src.oracle import (RadialGrid, bloch_1d, energy_integral_m, fd_rhs_reduction, grid_greedy_packing,
                        interface_sweep, laminate_cell, mc_volume_integral, mixed_sup_error,
                        observed_order, outer_neumann_defect, radial_trapezoid_density, richardson,
                        solve_radial_f, solve_radial_gh, sphere_moments_mc)
from src.packing import (SearchSpec, StopCriterion, greedy_apollonian, make_packing, parse_packing,
                         random_greedy, translate, packing_record)
from src.results_storage import to_json

SUITE_ORDER = ('material', 'corrector', 'dispersion', 'packing', 'minimizer', 'bloch')

SQRT2 = math.sqrt(2.0)
SECOND_RADIUS = (SQRT2 - 1.0) / 2.0
THIRD_RADIUS = (SQRT2 - 1.0) * (2.0 * SQRT2 - 1.0) / 14.0
# third-level centers touch the balls at the origin images (0, 0) and (1, 0)
THIRD_OFFSET = math.sqrt((0.5 + THIRD_RADIUS) ** 2 - 0.25)
REFERENCE_CENTERS = [((0.0, 0.0), 0.5), ((0.5, 0.5), SECOND_RADIUS),
                     ((0.5, THIRD_OFFSET), THIRD_RADIUS), ((0.5, 1.0 - THIRD_OFFSET), THIRD_RADIUS),
                     ((THIRD_OFFSET, 0.5), THIRD_RADIUS), ((1.0 - THIRD_OFFSET, 0.5), THIRD_RADIUS)]

EXAMPLE_PROFILE = TwoPhaseProfile(alpha=1.0, beta=2.0, theta=0.5, dim=2)
EXAMPLE_CORRECTOR = {'b1': -1 / 7, 'd1': 3 / 56, 'p1': -3 / 112, 'q1': 3 / 28, 't1': -1 / 56,
                     'b2': 1 / 14, 'c2': -1 / 7, 'd2': 1 / 14, 'p2': -1 / 28, 'q2': -1 / 28, 't2': 1 / 14}


def random_profile(rng: np.random.Generator, dim: int) -> TwoPhaseProfile:
    """Admissible profile with alpha < beta and a core fraction away from the degenerate ends"""
    alpha = float(rng.uniform(0.5, 5.0))
    beta = alpha * float(rng.uniform(1.05, 10.0))
    theta = float(rng.uniform(0.1, 0.9))
    return TwoPhaseProfile(alpha=alpha, beta=beta, theta=theta, dim=dim)


def _finite(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


@dataclass
class ValidationReport:
    suite: str
    seed: int
    comparisons: List[Dict[str, Any]] = field(default_factory=list)
    observations: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def failed(self) -> List[str]:
        return [c['name'] for c in self.comparisons if not c['passed']]

    @property
    def passed(self) -> bool:
        return not self.failed

    def to_dict(self) -> Dict[str, Any]:
        return {
            'suite': self.suite,
            'seed': self.seed,
            'comparisons': self.comparisons,
            'observations': self.observations,
            'summary': {'total': len(self.comparisons),
                        'passed': len(self.comparisons) - len(self.failed),
                        'failed': len(self.failed),
                        'failed_names': self.failed},
            'passed': self.passed,
        }

    def to_json(self) -> str:
        return to_json(self.to_dict())


class ValidationSuite:
    """Acceptance checks grouped by module; every random draw comes from one seeded generator"""

    def __init__(self, settings: Dict[str, Dict[str, Any]], seed: int,
                 quad_spec: Optional[QuadSpec] = None, search_spec: Optional[SearchSpec] = None):
        self.settings = settings
        self.oracle_cfg = settings['oracle']
        self.cfg = settings['validation']
        self.seed = seed
        self.quad_spec = quad_spec or QuadSpec()
        self.search_spec = search_spec or SearchSpec()
        self.logger = logging.getLogger(__name__)
        self.report: Optional[ValidationReport] = None

    def _rng(self, suite: str) -> np.random.Generator:
        # one stream per suite so a single suite reproduces its slice of `all`
        return np.random.default_rng([self.seed, SUITE_ORDER.index(suite)])

    def compare(self, name: str, value: float, reference: float, tolerance: float,
                kind: str = 'abs') -> bool:
        """kind: abs |v-r| <= tol, rel |v-r| <= tol |r|, le v <= r + tol, ge v >= r - tol"""
        value, reference = float(value), float(reference)
        if kind == 'abs':
            passed = abs(value - reference) <= tolerance
        elif kind == 'rel':
            passed = abs(value - reference) <= tolerance * abs(reference)
        elif kind == 'le':
            passed = value <= reference + tolerance
        elif kind == 'ge':
            passed = value >= reference - tolerance
        else:
            raise ValueError(f"unknown comparison kind {kind!r}")
        passed = bool(passed) and math.isfinite(value)
        self.report.comparisons.append({'name': name, 'kind': kind, 'value': _finite(value),
                                        'reference': _finite(reference), 'tolerance': tolerance,
                                        'passed': passed})
        level = logging.INFO if passed else logging.WARNING
        self.logger.log(level, f"{'PASS' if passed else 'FAIL'} {name}: {value!r} vs {reference!r} "
                               f"({kind}, tol {tolerance})")
        return passed

    def observe(self, name: str, value: Any):
        self.report.observations.append({'name': name, 'value': _finite(value)})

    def run(self, suite: str = 'all') -> ValidationReport:
        suites = SUITE_ORDER if suite == 'all' else (suite,)
        self.report = ValidationReport(suite=suite, seed=self.seed)
        runners: Dict[str, Callable[[np.random.Generator], None]] = {
            'material': self.run_material,
            'corrector': self.run_corrector,
            'dispersion': self.run_dispersion,
            'packing': self.run_packing,
            'minimizer': self.run_minimizer,
            'bloch': self.run_bloch,
        }
        for name in suites:
            self.logger.info(f"Running {name} checks")
            runners[name](self._rng(name))
        self.logger.info(f"Validation '{suite}': {len(self.report.comparisons) - len(self.report.failed)}"
                         f"/{len(self.report.comparisons)} comparisons passed")
        return self.report

    # material

    def run_material(self, rng: np.random.Generator):
        self.compare('material.example_m_2d', first_corrector(EXAMPLE_PROFILE).m, 10.0 / 7.0, 1e-12)
        self.compare('material.example_m_3d',
                     first_corrector(TwoPhaseProfile(1.0, 2.0, 0.5, 3)).m, 16.0 / 11.0, 1e-12)
        self.compare('material.homogeneous_m', first_corrector(TwoPhaseProfile(2.0, 2.0, 0.3, 3)).m,
                     2.0, 0.0)

        intervals = int(self.oracle_cfg['intervals'])
        r_lo = float(self.oracle_cfg['r_lo'])
        worst_m, worst_flux, order_violations = 0.0, 0.0, 0
        for idx in range(int(self.cfg['profiles'])):
            profile = random_profile(rng, int(rng.integers(2, 5)))
            fc = first_corrector(profile)
            estimate = self._extrapolated_m(profile, intervals, r_lo)
            worst_m = max(worst_m, abs(estimate - fc.m) / fc.m)
            worst_flux = max(worst_flux, max(flux_jump_residuals(fc, profile).values()))
            b = conductivity_bounds(profile)
            if not (b.harmonic <= b.reversed_assemblage * (1 + 1e-12)
                    and b.reversed_assemblage <= b.hs_lower * (1 + 1e-12)
                    and b.hs_lower <= b.arithmetic * (1 + 1e-12)):
                order_violations += 1
        self.compare('material.energy_integral_vs_closed_form', worst_m, 0.0, 1e-6)
        self.compare('material.flux_jump_residuals', worst_flux, 0.0, 1e-10)
        self.compare('material.bounds_ordering_violations', order_violations, 0, 0)

        grid = RadialGrid.build(EXAMPLE_PROFILE, intervals, r_lo)
        f = solve_radial_f(EXAMPLE_PROFILE, grid)
        fc = first_corrector(EXAMPLE_PROFILE)
        self.compare('material.radial_f_core_value', f[grid.interface // 2], fc.b1t, 1e-5)
        self.compare('material.r_lo_sensitivity', self._extrapolated_m(EXAMPLE_PROFILE, intervals, r_lo / 2.0),
                     self._extrapolated_m(EXAMPLE_PROFILE, intervals, r_lo), 1e-7)

    @staticmethod
    def _extrapolated_m(profile: TwoPhaseProfile, intervals: int, r_lo: float) -> float:
        grid = RadialGrid.build(profile, intervals, r_lo)
        return richardson(energy_integral_m(profile, grid), energy_integral_m(profile, grid.refined()))

    # corrector

    def run_corrector(self, rng: np.random.Generator):
        example_fc = first_corrector(EXAMPLE_PROFILE)
        example_sc = solve_closed_form(example_fc, EXAMPLE_PROFILE)
        worst_example = max(abs(getattr(example_sc, k) - v) for k, v in EXAMPLE_CORRECTOR.items())
        self.compare('corrector.example_coefficients', worst_example, 0.0, 1e-12)

        worst_residual, worst_neumann, worst_consistency, rank_failures = 0.0, 0.0, 0.0, 0
        for idx in range(int(self.cfg['corrector_profiles'])):
            profile = random_profile(rng, int(rng.integers(2, 5)))
            fc = first_corrector(profile)
            sc = solve_closed_form(fc, profile)
            system = assemble_system(fc, profile)
            worst_residual = max(worst_residual, max(system.residuals(sc).values()))
            if system.ranks() != (10, 10):
                rank_failures += 1
            worst_neumann = max(worst_neumann, *neumann_residual(sc, profile))
            checks = verify_consistency(sc, fc, profile)
            worst_consistency = max(worst_consistency, checks['residual_shell_constant'],
                                    checks['residual_h_flux'])
        self.compare('corrector.system_residuals', worst_residual, 0.0, 1e-10)
        self.compare('corrector.rank_failures', rank_failures, 0, 0)
        self.compare('corrector.neumann_residuals', worst_neumann, 0.0, 1e-12)
        self.compare('corrector.consistency_residuals', worst_consistency, 0.0, 1e-10)

        try:
            eval_g_h(example_sc, example_fc, EXAMPLE_PROFILE, 0.0)
            raised = 0
        except SingularEvaluationError:
            raised = 1
        self.compare('corrector.singular_origin_rejected', raised, 1, 0)

        worst_rhs = 0.0
        for idx in range(50):
            profile = random_profile(rng, int(rng.integers(2, 5)))
            fc = first_corrector(profile)
            r = float(rng.uniform(0.01, 0.99))
            if r == profile.core_radius:
                continue
            closed = rhs_reduction(fc, profile, r)
            stepped = fd_rhs_reduction(fc, profile, r)
            worst_rhs = max(worst_rhs, *(abs(x - y) / max(1.0, abs(x)) for x, y in zip(closed, stepped)))
        self.compare('corrector.rhs_vs_complex_step', worst_rhs, 0.0, 1e-10)

        self._corrector_vs_oracle(rng)

    def _closed_form_on_grid(self, sc, fc, profile: TwoPhaseProfile, grid: RadialGrid):
        regions = np.where(grid.in_core, 'core', 'shell')
        values = [eval_g_h(sc, fc, profile, float(r), region=str(reg)) for r, reg in zip(grid.r, regions)]
        return np.array([v[0] for v in values]), np.array([v[1] for v in values])

    def _corrector_vs_oracle(self, rng: np.random.Generator):
        intervals = int(self.oracle_cfg['intervals'])
        r_lo = float(self.oracle_cfg['gh_r_lo'])
        worst_g, worst_h = 0.0, 0.0
        for idx in range(int(self.cfg['gh_profiles'])):
            profile = random_profile(rng, int(rng.integers(2, 4)))
            fc = first_corrector(profile)
            sc = solve_closed_form(fc, profile)
            grid = RadialGrid.build(profile, intervals, r_lo)
            g_n, h_n = solve_radial_gh(profile, fc, grid)
            g_2n, h_2n = solve_radial_gh(profile, fc, grid.refined())
            g_ref, h_ref = self._closed_form_on_grid(sc, fc, profile, grid)
            worst_g = max(worst_g, mixed_sup_error(richardson(g_n, g_2n), g_ref))
            worst_h = max(worst_h, mixed_sup_error(richardson(h_n, h_2n), h_ref))
        self.compare('corrector.g_vs_radial_oracle', worst_g, 0.0, 1e-5)
        self.compare('corrector.h_vs_radial_oracle', worst_h, 0.0, 1e-5)

        fc = first_corrector(EXAMPLE_PROFILE)
        coarse = RadialGrid.build(EXAMPLE_PROFILE, int(self.oracle_cfg['slope_intervals']), r_lo)
        solutions = [solve_radial_gh(EXAMPLE_PROFILE, fc, g) for g in
                     (coarse, coarse.refined(), coarse.refined().refined())]
        slope = observed_order(*(s[0] for s in solutions))
        self.compare('corrector.g_convergence_order_low', slope, 1.8, 0.0, kind='ge')
        self.compare('corrector.g_convergence_order_high', slope, 2.2, 0.0, kind='le')

        # pinned at r_lo, free at r = 1: the outer defect is an output of the solve
        grid = RadialGrid.build(EXAMPLE_PROFILE, intervals, r_lo)
        sc = solve_closed_form(fc, EXAMPLE_PROFILE)
        inner = eval_g_h(sc, fc, EXAMPLE_PROFILE, float(grid.r[0]), region='core')
        g_in, h_in = solve_radial_gh(EXAMPLE_PROFILE, fc, grid, closure='inner', inner=inner)
        defect = outer_neumann_defect(grid, g_in, h_in)
        self.compare('corrector.oracle_outer_neumann_g', defect['g'], 0.0, 1e-4)
        self.observe('corrector.inner_closure_outer_neumann', defect)
        g_reg, h_reg = solve_radial_gh(EXAMPLE_PROFILE, fc, grid, closure='regular')
        self.observe('corrector.regular_closure_outer_neumann', outer_neumann_defect(grid, g_reg, h_reg))

    # dispersion

    def run_dispersion(self, rng: np.random.Generator):
        radii = [r for _, r in REFERENCE_CENTERS]
        fc = first_corrector(EXAMPLE_PROFILE)
        sc = solve_closed_form(fc, EXAMPLE_PROFILE)
        density = ball_dispersion_density(fc, EXAMPLE_PROFILE, self.quad_spec, sc=sc)
        result = dispersion_phs(density, radii, 2)
        self.compare('dispersion.example_j_positive', int(density.j_value > 0.0), 1, 0)
        self.compare('dispersion.example_d_phs_nonpositive', result.d_phs, 0.0, 0.0, kind='le')
        self.observe('dispersion.example_density', density.to_dict())

        homogeneous = TwoPhaseProfile(1.5, 1.5, 0.4, 2)
        hom_density = ball_dispersion_density(first_corrector(homogeneous), homogeneous, self.quad_spec)
        self.compare('dispersion.homogeneous_zero', dispersion_phs(hom_density, radii, 2).d_phs, 0.0, 1e-12)

        sign_violations, worst_identity, worst_trapezoid, worst_scaling = 0, 0.0, 0.0, 0.0
        for idx in range(int(self.cfg['profiles']) // 10):
            dim = int(rng.integers(2, 4))
            profile = random_profile(rng, dim)
            fc = first_corrector(profile)
            sampled = ball_dispersion_density(fc, profile, self.quad_spec)
            family = [0.5] + sorted(rng.uniform(0.01, 0.1, size=5), reverse=True)
            if dispersion_phs(sampled, family, dim).d_phs > 0.0:
                sign_violations += 1
            worst_identity = max(worst_identity, sampled.cross_checks['energy_identity_residual'])
            trapezoid_j = radial_trapezoid_density(fc, profile)
            worst_trapezoid = max(worst_trapezoid, abs(trapezoid_j - sampled.j_value) / max(1.0, fc.m))
            scaled = profile.scaled(3.0)
            scaled_j = ball_dispersion_density(first_corrector(scaled), scaled, self.quad_spec).j_value
            worst_scaling = max(worst_scaling, abs(scaled_j - 3.0 * sampled.j_value) / max(sampled.j_value, 1e-300))
        self.compare('dispersion.sign_violations', sign_violations, 0, 0)
        self.compare('dispersion.energy_identity', worst_identity, 0.0, 1e-10)
        self.compare('dispersion.trapezoid_oracle', worst_trapezoid, 0.0, 1e-6)
        self.compare('dispersion.linear_scaling', worst_scaling, 0.0, 1e-9)

        self._monte_carlo(rng)
        self._invariance(rng, density)

        families = [[r for _, r in REFERENCE_CENTERS[:k]] for k in (1, 2, 6)]
        scale = hs_scale_factor(families, 2)
        self.compare('dispersion.scale_factor_bound_violations', len(scale.bound_violations), 0, 0)
        self.observe('dispersion.scale_factors', scale.factors)

    def _monte_carlo(self, rng: np.random.Generator):
        samples = int(self.oracle_cfg['mc_samples'])
        for dim in (2, 3):
            volume, _ = mc_volume_integral(lambda p: np.ones(len(p)), 1000, self.seed, dim)
            self.compare(f'dispersion.mc_ball_volume_{dim}d', volume, unit_ball_volume(dim), 1e-12)
            second, err = mc_volume_integral(lambda p: p[:, 0] ** 2, samples // 10, self.seed, dim)
            self.compare(f'dispersion.mc_second_moment_{dim}d', second,
                         unit_ball_volume(dim) / (dim + 2), 4.0 * err)
            moments = sphere_moments_mc(dim, samples // 10, self.seed)
            for key, item in sorted(moments.items()):
                self.compare(f'dispersion.sphere_{key}_moment_{dim}d', item['estimate'], item['target'],
                             4.0 * item['stderr'])

        profiles = [EXAMPLE_PROFILE] + [random_profile(rng, int(rng.integers(2, 4)))
                                        for _ in range(int(self.cfg['mc_profiles']) - 1)]
        for idx, profile in enumerate(profiles):
            fc = first_corrector(profile)
            density = ball_dispersion_density(fc, profile, self.quad_spec)
            estimate, err = mc_volume_integral(lambda p: self._j_integrand(fc, profile, p), samples,
                                               self.seed + idx, profile.dim)
            self.compare(f'dispersion.mc_j_profile_{idx}', estimate, density.j_value, 4.0 * err)

        fc = first_corrector(EXAMPLE_PROFILE)
        target = ball_dispersion_density(fc, EXAMPLE_PROFILE, self.quad_spec).j_value
        repeats = int(self.oracle_cfg['mc_seeds'])
        inside = 0
        for k in range(repeats):
            estimate, err = mc_volume_integral(lambda p: self._j_integrand(fc, EXAMPLE_PROFILE, p),
                                               int(self.oracle_cfg['mc_repeat_samples']), self.seed + 1000 + k, 2)
            inside += abs(estimate - target) <= 4.0 * err
        self.compare('dispersion.mc_containment_fraction', inside / repeats, 0.99, 0.0, kind='ge')

    @staticmethod
    def _j_integrand(fc, profile, points):
        parts = density_integrands(fc, profile, points)
        return parts['gradient_energy'] + parts['mass_defect'] - parts['reference']

    def _invariance(self, rng: np.random.Generator, density):
        packing = make_packing(2, REFERENCE_CENTERS, generator='apollonian')
        base = dispersion_phs(density, packing.radii, 2).d_phs
        shifted = translate(packing, rng.random(2))
        moved = dispersion_phs(density, shifted.radii, 2).d_phs
        permuted = dispersion_phs(density, list(rng.permutation(packing.radii)), 2).d_phs
        scale = max(abs(base), 1e-300)
        self.compare('dispersion.translation_invariance', abs(moved - base) / scale, 0.0, 1e-15)
        self.compare('dispersion.permutation_invariance', abs(permuted - base) / scale, 0.0, 1e-15)

    # packing

    def run_packing(self, rng: np.random.Generator):
        # two balls past the third level so a fifth equal-radius ball would show
        packing = greedy_apollonian(2, StopCriterion(max_balls=8), self.search_spec)
        radii = packing.radii
        self.compare('packing.ball_count', len(radii), 8, 0)
        self.compare('packing.first_radius', radii[0], 0.5, 0.0)
        self.compare('packing.second_radius', radii[1], SECOND_RADIUS, 1e-6)
        tolerance = 1e-6 if self.search_spec.refine else 1e-3
        worst_third = max(abs(r - THIRD_RADIUS) for r in radii[2:6])
        self.compare('packing.third_level_batch_radius', worst_third, 0.0, tolerance)
        third_level = sum(1 for r in radii if abs(r - THIRD_RADIUS) <= tolerance)
        self.compare('packing.third_level_batch_size', third_level, 4, 0)
        self.observe('packing.apollonian_8', packing_record(packing))

        rerun = greedy_apollonian(2, StopCriterion(max_balls=8), self.search_spec)
        text = to_json(packing_record(packing))
        self.compare('packing.rerun_identical', int(text == to_json(packing_record(rerun))), 1, 0)
        loaded = parse_packing(text)
        self.compare('packing.round_trip_identical', int(loaded.balls == packing.balls), 1, 0)

        circle = greedy_apollonian(1, StopCriterion(max_balls=1), self.search_spec)
        self.compare('packing.circle_coverage', circle.coverage, 1.0, 1e-12)

        target = float(self.cfg['oracle_target_coverage'])
        stop = StopCriterion(target_coverage=target)
        ascended = greedy_apollonian(2, stop, self.search_spec)
        exhaustive = grid_greedy_packing(2, stop, grid=int(self.oracle_cfg['oracle_grid']),
                                         min_radius_floor=self.search_spec.min_radius_floor)
        self.compare('packing.target_coverage_reached', ascended.coverage, target, 0.0, kind='ge')
        self.compare('packing.ball_count_vs_grid_oracle', len(ascended), len(exhaustive), 0, kind='le')
        self.observe('packing.grid_oracle_balls', {'apollonian': len(ascended), 'grid_greedy': len(exhaustive)})

        budget = int(self.cfg['coverage_budget'])
        gate = float(self.cfg['coverage_gate'])
        spec = SearchSpec(grid=int(self.cfg['coverage_grid']), top_k=self.search_spec.top_k,
                          refine=self.search_spec.refine, min_radius_floor=self.search_spec.min_radius_floor,
                          threads=self.search_spec.threads)
        covering = self._cover_until(gate, budget, spec)
        self.compare('packing.coverage_gate', covering.coverage, gate, 0.0, kind='ge')
        self.observe('packing.coverage_gate_budget', {'budget': budget, 'balls': len(covering)})

        shuffled = random_greedy(2, 8, self.seed)
        self.compare('packing.random_greedy_disjoint', len(shuffled.overlapping_pairs()), 0, 0)

    def _cover_until(self, gate: float, budget: int, spec: SearchSpec):
        try:
            return greedy_apollonian(2, StopCriterion(max_balls=budget, target_coverage=gate), spec)
        except SearchBudgetExceededError as e:
            self.logger.warning(f"coverage gate run stopped early: {e}")
            return e.partial

    # minimizer

    def run_minimizer(self, rng: np.random.Generator):
        bound_failures, range_failures, schur_failures = 0, 0, 0
        count = int(self.cfg['sequences'])
        for idx in range(count):
            dim = int(rng.integers(1, 4))
            seq = random_normalized(rng, int(rng.integers(1, 60)), dim)
            value = functional_I(seq)
            floor = -seq.c_n ** ((dim + 2.0) / dim)
            if not (floor * (1 + 1e-12) <= value.i_value < 0.0):
                range_failures += 1
            if not bound_check(seq).satisfied:
                bound_failures += 1
            if len(seq.d) >= 2 and seq.d[0] > seq.d[-1]:
                amount = float(rng.uniform(0.0, (seq.d[0] - seq.d[-1]) / 2.0))
                moved = functional_I(robin_hood_transfer(seq, 0, len(seq.d) - 1, amount)).i_value
                if moved < value.i_value - 1e-14 * abs(value.i_value):
                    schur_failures += 1
        self.compare('minimizer.range_failures', range_failures, 0, 0)
        self.compare('minimizer.bound_failures', bound_failures, 0, 0)
        self.compare('minimizer.schur_failures', schur_failures, 0, 0)

        worst_split = 0.0
        for dim in (1, 2, 3):
            for k in (1, 2, 5, 10, 100, 1000):
                seq = equal_split(k, dim)
                exact = seq.c_n ** ((dim + 2.0) / dim) * k ** (-2.0 / dim)
                worst_split = max(worst_split, abs(abs(functional_I(seq).i_value) - exact) / exact)
        self.compare('minimizer.equal_split_closed_form', worst_split, 0.0, 1e-12)

        circle = minimize_via_apollonian(1, StopCriterion(max_balls=1), self.search_spec)
        self.compare('minimizer.circle_i_lower', circle.i_lower, -0.125, 1e-15)
        self.compare('minimizer.circle_i_upper', circle.i_upper, -0.125, 1e-15)

        plane = minimize_via_apollonian(2, StopCriterion(max_balls=6), self.search_spec)
        exact = math.fsum(r ** 4 for _, r in REFERENCE_CENTERS)
        self.compare('minimizer.apollonian_6_partial_sum', -plane.i_upper, exact, 1e-5, kind='rel')
        self.compare('minimizer.bracket_ordered', plane.i_lower, plane.i_upper, 0.0, kind='le')

        alternatives = [plane.sequence,
                        from_radii(random_greedy(2, len(plane.packing), self.seed).radii, 2)]
        ranking = compare_structures(alternatives)
        self.observe('minimizer.structure_ranking',
                     [{'index': idx, 'i_value': value.i_value} for idx, value in ranking])

    # bloch

    def run_bloch(self, rng: np.random.Generator):
        cells = int(self.oracle_cfg['bloch_cells'])
        homogeneous = bloch_1d(lambda y: np.full_like(y, 1.5), cells=cells)
        self.compare('bloch.homogeneous_q', homogeneous.q, 1.5, 1e-8)
        self.compare('bloch.homogeneous_burnett', homogeneous.burnett, 0.0, 1e-10)
        self.compare('bloch.homogeneous_parity', homogeneous.parity_defect, 0.0, 1e-10)

        two_phase = bloch_1d(laminate_cell(1.0, 2.0, 0.5), cells=cells)
        self.compare('bloch.two_phase_q_harmonic_mean', two_phase.q, 4.0 / 3.0, 1e-6)
        self.compare('bloch.two_phase_burnett_negative', int(two_phase.burnett < 0.0), 1, 0)
        self.compare('bloch.two_phase_parity', two_phase.parity_defect, 0.0, 1e-10)
        self.compare('bloch.two_phase_ground_state', two_phase.lambda_at_zero, 0.0, 1e-10)
        self.observe('bloch.two_phase', two_phase.to_dict())

        sweep = interface_sweep(1.0, 2.0, 0.5, (1, 2, 4, 8), cells=cells)
        monotone = all(a['burnett'] <= b['burnett'] for a, b in zip(sweep, sweep[1:]))
        self.compare('bloch.burnett_increases_with_interfaces', int(monotone), 1, 0)
        self.observe('bloch.interface_sweep', sweep)


def run_suite(settings: Dict[str, Dict[str, Any]], suite: str, seed: int,
              quad_spec: Optional[QuadSpec] = None, search_spec: Optional[SearchSpec] = None) -> ValidationReport:
    return ValidationSuite(settings, seed, quad_spec, search_spec).run(suite)
