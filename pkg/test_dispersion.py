#!/usr/bin/env python3
"""
Test Dispersion - ball density, coefficient of a radii multiset and scale factors
"""

import sys
import copy
import math
from pathlib import Path

import numpy as np

# Add src directory to path
sys.path.append(str(Path(__file__).parent / "src"))

from src.corrector import solve_closed_form
from src.dispersion import (DispersionCalculator, QuadSpec, ball_dispersion_density, density_integrands,
                            dispersion_phs, hs_scale_factor)
from src.errors import ConfigError, EmptyFamilyError, InfeasibleRadiiError
from src.material import TwoPhaseProfile, first_corrector
from src.oracle import mc_volume_integral, radial_trapezoid_density
from src.packing import make_packing, translate
from src.run_config import DEFAULT_CONFIG
from src.validation import REFERENCE_CENTERS, SECOND_RADIUS, THIRD_RADIUS, run_suite

EXAMPLE = TwoPhaseProfile(alpha=1.0, beta=2.0, theta=0.5, dim=2)
RADII = [r for _, r in REFERENCE_CENTERS]


def test_example_density():
    print("🧮 Testing the example dispersion density...")
    fc = first_corrector(EXAMPLE)
    sc = solve_closed_form(fc, EXAMPLE)
    density = ball_dispersion_density(fc, EXAMPLE, sc=sc)
    assert density.j_value > 0.0
    assert density.cross_checks['energy_identity_residual'] < 1e-10
    assert 'corrector_ball_integral' in density.cross_checks
    assert abs(density.reference - fc.m * math.pi / 4.0) < 1e-14
    result = dispersion_phs(density, RADII, 2)
    assert result.d_phs < 0.0
    assert result.d_phs == -(math.fsum(r ** 4 for r in RADII) * density.j_value)
    record = result.to_record(EXAMPLE)
    assert set(record) == {'d_phs', 'sum_radii_N2', 'j_value', 'quad_error', 'cell_volume', 'profile'}
    print(f"   ✅ J = {density.j_value:.9e}, d_phs = {result.d_phs:.9e}")


def test_homogeneous_density_vanishes():
    profile = TwoPhaseProfile(1.5, 1.5, 0.4, 2)
    density = ball_dispersion_density(first_corrector(profile), profile)
    assert abs(density.j_value) < 1e-12
    assert abs(dispersion_phs(density, RADII, 2).d_phs) < 1e-12


def test_trapezoid_and_scaling():
    print("📐 Testing trapezoid oracle and linear scaling...")
    for profile in (EXAMPLE, TwoPhaseProfile(0.7, 5.0, 0.3, 3), TwoPhaseProfile(2.0, 3.0, 0.8, 2)):
        fc = first_corrector(profile)
        density = ball_dispersion_density(fc, profile)
        trapezoid_j = radial_trapezoid_density(fc, profile)
        assert abs(trapezoid_j - density.j_value) / max(1.0, fc.m) < 1e-6
        scaled = profile.scaled(3.0)
        scaled_j = ball_dispersion_density(first_corrector(scaled), scaled).j_value
        assert abs(scaled_j - 3.0 * density.j_value) <= 1e-9 * density.j_value
    print("   ✅ Gauss-Legendre agrees with the trapezoid rule; J scales linearly")


def test_monte_carlo_agreement():
    fc = first_corrector(EXAMPLE)
    density = ball_dispersion_density(fc, EXAMPLE)

    def integrand(points):
        parts = density_integrands(fc, EXAMPLE, points)
        return parts['gradient_energy'] + parts['mass_defect'] - parts['reference']

    estimate, err = mc_volume_integral(integrand, 200000, 3, 2)
    assert abs(estimate - density.j_value) <= 4.0 * err
    print(f"   ✅ Monte-Carlo {estimate:.6e} +/- {err:.1e} contains {density.j_value:.6e}")


def test_radii_multiset_invariance():
    fc = first_corrector(EXAMPLE)
    density = ball_dispersion_density(fc, EXAMPLE)
    base = dispersion_phs(density, RADII, 2).d_phs
    assert dispersion_phs(density, list(reversed(RADII)), 2).d_phs == base
    calc = DispersionCalculator()
    assert calc.coefficient(EXAMPLE, fc, RADII).d_phs == base


def test_infeasible_radii():
    print("🚫 Testing infeasible radii...")
    density = ball_dispersion_density(first_corrector(EXAMPLE), EXAMPLE)
    for radii in ([0.6], [0.0, 0.1], [0.5, 0.5], [-0.1]):
        try:
            dispersion_phs(density, radii, 2)
        except InfeasibleRadiiError:
            continue
        raise AssertionError(f"accepted radii {radii}")
    assert dispersion_phs(density, [], 2).d_phs == 0.0
    print("   ✅ oversize, non-positive and over-covering radii rejected")


def test_adding_a_ball_lowers_d_phs():
    print("📉 Testing monotonicity in the number of balls...")
    density = ball_dispersion_density(first_corrector(EXAMPLE), EXAMPLE)
    assert density.j_value > 0.0
    values = [dispersion_phs(density, RADII[:k], 2).d_phs for k in range(len(RADII) + 1)]
    assert values[0] == 0.0
    assert all(b < a for a, b in zip(values, values[1:]))
    expected = -density.j_value * (0.5 ** 4 + SECOND_RADIUS ** 4 + 4 * THIRD_RADIUS ** 4)
    assert math.isclose(values[-1], expected, rel_tol=1e-13)
    print(f"   ✅ d_phs falls strictly over {len(RADII)} insertions to {values[-1]:.6e}")


def test_translation_invariance():
    print("↔️ Testing translation invariance...")
    density = ball_dispersion_density(first_corrector(EXAMPLE), EXAMPLE)
    packing = make_packing(2, REFERENCE_CENTERS, generator='apollonian')
    assert packing.overlapping_pairs() == []
    base = dispersion_phs(density, packing.radii, 2).d_phs
    rng = np.random.default_rng(5)
    for shift in [(0.25, 0.6), (0.9, 0.1)] + [tuple(rng.random(2)) for _ in range(5)]:
        moved = translate(packing, shift)
        assert sorted(moved.radii) == sorted(packing.radii)
        assert moved.overlapping_pairs() == []
        assert abs(dispersion_phs(density, moved.radii, 2).d_phs - base) <= 1e-15 * abs(base)
    print("   ✅ shifted packings keep their radii and d_phs")


def test_infeasible_packing_radii():
    density = ball_dispersion_density(first_corrector(EXAMPLE), EXAMPLE)
    for radii in (RADII + [0.5], [1.5 * r for r in RADII], RADII + [0.0]):
        try:
            dispersion_phs(density, radii, 2)
        except InfeasibleRadiiError:
            continue
        raise AssertionError(f"accepted radii {radii}")


def test_dispersion_validation_suite():
    print("✅ Testing the dispersion validation suite...")
    settings = copy.deepcopy(DEFAULT_CONFIG)
    settings['validation'].update({'profiles': 20, 'mc_profiles': 1})
    settings['oracle'].update({'mc_samples': 200000, 'mc_repeat_samples': 20000})
    report = run_suite(settings, 'dispersion', 7)
    names = {c['name']: c for c in report.comparisons}
    assert names['dispersion.translation_invariance']['passed']
    assert names['dispersion.permutation_invariance']['passed']
    assert report.failed == []
    print(f"   ✅ {len(report.comparisons)} comparisons passed")


def test_scale_factor():
    report = hs_scale_factor([[0.5], [0.5, 0.2]], dim=2)
    assert abs(report.factors[0] - 0.25) < 1e-15
    assert abs(report.factors[1] - (0.0625 + 0.0016) / 0.25) < 1e-15
    assert report.bound_violations == []
    assert report.limsup_estimate == max(report.factors)
    try:
        hs_scale_factor([[0.5], []], dim=2)
    except EmptyFamilyError:
        pass
    else:
        raise AssertionError("empty family accepted")


def test_quadrature_spec_validation():
    try:
        QuadSpec(nodes=1)
    except ConfigError:
        pass
    else:
        raise AssertionError("single-node rule accepted")
    coarse = ball_dispersion_density(first_corrector(EXAMPLE), EXAMPLE, QuadSpec(nodes=32, refine=False))
    assert coarse.quad_error == 0.0
    points = np.array([[0.1, 0.2], [0.9, 0.0]])
    parts = density_integrands(first_corrector(EXAMPLE), EXAMPLE, points)
    assert all(values.shape == (2,) for values in parts.values())


def main():
    """Run all dispersion tests"""
    print("🧪 DISPERSION MODULE TESTS")
    print("=" * 50)

    tests = [
        ("Example density", test_example_density),
        ("Homogeneous density", test_homogeneous_density_vanishes),
        ("Trapezoid and scaling", test_trapezoid_and_scaling),
        ("Monte-Carlo agreement", test_monte_carlo_agreement),
        ("Multiset invariance", test_radii_multiset_invariance),
        ("Infeasible radii", test_infeasible_radii),
        ("Adding a ball", test_adding_a_ball_lowers_d_phs),
        ("Translation invariance", test_translation_invariance),
        ("Infeasible packing radii", test_infeasible_packing_radii),
        ("Dispersion validation suite", test_dispersion_validation_suite),
        ("Scale factor", test_scale_factor),
        ("Quadrature spec", test_quadrature_spec_validation),
    ]

    results = []
    for test_name, test_func in tests:
        try:
            test_func()
            results.append((test_name, True))
        except Exception as e:
            print(f"   ❌ {test_name}: {e}")
            results.append((test_name, False))

    print(f"\n{'=' * 50}")
    passed = sum(1 for _, success in results if success)
    for test_name, success in results:
        print(f"{'✅ PASS' if success else '❌ FAIL'} {test_name}")
    print(f"\nResult: {passed}/{len(results)} tests passed")
    return passed == len(results)


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
