#!/usr/bin/env python3
"""
Test Material - equivalent conductivity, first corrector and bounds
"""

import sys
import math
from pathlib import Path

import numpy as np

# Add src directory to path
sys.path.append(str(Path(__file__).parent / "src"))

from src.errors import DegenerateProfileError
from src.material import (TwoPhaseProfile, conductivity_bounds, eval_f, eval_f_prime, first_corrector,
                          flux_jump_residuals, solve_equivalent_conductivity, unit_ball_volume,
                          unit_sphere_area)

EXAMPLE = TwoPhaseProfile(alpha=1.0, beta=2.0, theta=0.5, dim=2)


def test_example_conductivity():
    """Two-dimensional example gives m = 10/7"""
    print("🧮 Testing equivalent conductivity...")
    fc = first_corrector(EXAMPLE)
    assert abs(fc.m - 10.0 / 7.0) < 1e-12
    assert abs(fc.b1t - 8.0 / 7.0) < 1e-12
    assert abs(fc.b2t - 6.0 / 7.0) < 1e-12
    assert abs(fc.ct - 1.0 / 7.0) < 1e-12
    assert abs(solve_equivalent_conductivity(TwoPhaseProfile(1.0, 2.0, 0.5, 3)) - 16.0 / 11.0) < 1e-12
    print("   ✅ m = 10/7 (N=2) and 16/11 (N=3)")


def test_homogeneous_profile():
    fc = first_corrector(TwoPhaseProfile(2.0, 2.0, 0.3, 3))
    assert fc.m == 2.0
    assert (fc.b1t, fc.b2t, fc.ct) == (1.0, 1.0, 0.0)
    print("   ✅ Homogeneous medium is its own equivalent")


def test_degenerate_profiles_rejected():
    print("🚫 Testing degenerate inputs...")
    for kwargs in ({'alpha': 1.0, 'beta': 2.0, 'theta': 1.0, 'dim': 2},
                   {'alpha': 1.0, 'beta': 2.0, 'theta': 0.0, 'dim': 2},
                   {'alpha': 3.0, 'beta': 2.0, 'theta': 0.5, 'dim': 2},
                   {'alpha': -1.0, 'beta': 2.0, 'theta': 0.5, 'dim': 2},
                   {'alpha': 1.0, 'beta': 2.0, 'theta': 0.5, 'dim': 0}):
        try:
            TwoPhaseProfile(**kwargs)
        except DegenerateProfileError:
            continue
        raise AssertionError(f"accepted degenerate profile {kwargs}")
    print("   ✅ theta outside (0,1), alpha > beta and bad dims rejected")


def test_radial_profile_values():
    fc = first_corrector(EXAMPLE)
    big_r = EXAMPLE.core_radius
    assert eval_f(fc, EXAMPLE, 0.0) == fc.b1t
    assert eval_f(fc, EXAMPLE, 1.0) == 1.0
    assert eval_f(fc, EXAMPLE, 2.5) == 1.0
    # continuity at R from the shell side
    assert abs(fc.b2t + fc.ct / big_r ** 2 - fc.b1t) < 1e-14
    assert eval_f_prime(fc, EXAMPLE, 0.3) == 0.0
    assert abs(eval_f_prime(fc, EXAMPLE, 0.9) - (-2.0 * fc.ct / 0.9 ** 3)) < 1e-14
    try:
        eval_f(fc, EXAMPLE, -0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("negative radius accepted")
    print("   ✅ f is continuous at R and equals 1 on the unit sphere")


def test_flux_residuals():
    fc = first_corrector(EXAMPLE)
    residuals = flux_jump_residuals(fc, EXAMPLE)
    assert residuals['interface'] < 1e-12
    assert residuals['outer'] < 1e-12


def test_bounds_ordering():
    print("📏 Testing conductivity bounds...")
    b = conductivity_bounds(EXAMPLE)
    assert abs(b.harmonic - 4.0 / 3.0) < 1e-12
    assert abs(b.arithmetic - 1.5) < 1e-12
    assert abs(b.hs_lower - 10.0 / 7.0) < 1e-12
    assert b.hs_lower == b.assemblage == first_corrector(EXAMPLE).m
    assert abs(b.reversed_assemblage - 1.4) < 1e-12
    assert b.harmonic <= b.reversed_assemblage <= b.hs_lower <= b.arithmetic
    print(f"   ✅ {b.harmonic:.4f} <= {b.reversed_assemblage:.4f} <= {b.hs_lower:.4f} <= {b.arithmetic:.4f}")


def test_linear_scaling_and_serialization():
    scaled = EXAMPLE.scaled(3.0)
    assert abs(first_corrector(scaled).m - 3.0 * first_corrector(EXAMPLE).m) < 1e-12
    assert TwoPhaseProfile.from_dict(EXAMPLE.to_dict()) == EXAMPLE
    try:
        TwoPhaseProfile.from_dict({'alpha': 1.0, 'beta': 2.0, 'dim': 2})
    except DegenerateProfileError:
        pass
    else:
        raise AssertionError("incomplete record accepted")


def test_conductivity_along_theta():
    """m falls from beta to alpha as the core fraction grows"""
    print("📉 Testing m along theta...")
    for dim in (1, 2, 3):
        values = [solve_equivalent_conductivity(TwoPhaseProfile(1.0, 2.0, theta, dim))
                  for theta in np.linspace(1e-6, 1.0 - 1e-6, 200)]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))
        assert abs(values[0] - 2.0) < 1e-4
        assert abs(values[-1] - 1.0) < 1e-4
        assert all(1.0 - 1e-12 <= v <= 2.0 + 1e-12 for v in values)
    print("   ✅ non-increasing over 200 values, m -> beta and m -> alpha at the ends")


def test_ball_measures():
    assert abs(unit_ball_volume(1) - 2.0) < 1e-15
    assert abs(unit_ball_volume(2) - math.pi) < 1e-15
    assert abs(unit_ball_volume(3) - 4.0 * math.pi / 3.0) < 1e-14
    assert abs(unit_sphere_area(3) - 4.0 * math.pi) < 1e-14


def main():
    """Run all material tests"""
    print("🧪 MATERIAL MODULE TESTS")
    print("=" * 50)

    tests = [
        ("Example conductivity", test_example_conductivity),
        ("Homogeneous profile", test_homogeneous_profile),
        ("Degenerate profiles", test_degenerate_profiles_rejected),
        ("Radial profile values", test_radial_profile_values),
        ("Flux residuals", test_flux_residuals),
        ("Bounds ordering", test_bounds_ordering),
        ("Scaling and serialization", test_linear_scaling_and_serialization),
        ("Conductivity along theta", test_conductivity_along_theta),
        ("Ball measures", test_ball_measures),
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
