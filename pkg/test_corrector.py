#!/usr/bin/env python3
"""
Test Corrector - closed-form second corrector against the transmission system
"""

import sys
from pathlib import Path

import numpy as np

# Add src directory to path
sys.path.append(str(Path(__file__).parent / "src"))

from src.corrector import (ROW_LABELS, assemble_system, corrector_ball_integral, eval_g_h,
                           neumann_residual, rhs_reduction, solve_closed_form, verify_consistency)
from src.errors import SingularEvaluationError
from src.material import TwoPhaseProfile, first_corrector

EXAMPLE = TwoPhaseProfile(alpha=1.0, beta=2.0, theta=0.5, dim=2)
EXPECTED = {'b1': -1 / 7, 'd1': 3 / 56, 'p1': -3 / 112, 'q1': 3 / 28, 't1': -1 / 56,
            'b2': 1 / 14, 'c2': -1 / 7, 'd2': 1 / 14, 'p2': -1 / 28, 'q2': -1 / 28, 't2': 1 / 14}


def _random_profiles(count, seed):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        alpha = float(rng.uniform(0.5, 5.0))
        yield TwoPhaseProfile(alpha, alpha * float(rng.uniform(1.05, 10.0)),
                              float(rng.uniform(0.1, 0.9)), int(rng.integers(2, 5)))


def test_example_coefficients():
    print("🧮 Testing closed-form coefficients...")
    fc = first_corrector(EXAMPLE)
    sc = solve_closed_form(fc, EXAMPLE)
    for name, value in EXPECTED.items():
        assert abs(getattr(sc, name) - value) < 1e-12, name
    assert sc.c1 == 0.0
    print("   ✅ (1, 2, 1/2, N=2) reproduces the exact fractions")


def test_system_consistency():
    print("🔗 Testing the twelve-equation system...")
    for profile in _random_profiles(200, seed=11):
        fc = first_corrector(profile)
        sc = solve_closed_form(fc, profile)
        system = assemble_system(fc, profile)
        assert system.row_labels == tuple(ROW_LABELS)
        assert system.matrix.shape == (12, 10)
        residuals = system.residuals(sc)
        assert max(residuals.values()) < 1e-10, (profile, residuals)
        assert system.ranks() == (10, 10)
        assert max(neumann_residual(sc, profile)) < 1e-12
        checks = verify_consistency(sc, fc, profile)
        assert checks['residual_shell_constant'] < 1e-10
        assert checks['residual_h_flux'] < 1e-10
    print("   ✅ residuals, ranks and Neumann conditions hold on 200 profiles")


def test_least_squares_matches_closed_form():
    fc = first_corrector(EXAMPLE)
    system = assemble_system(fc, EXAMPLE)
    solved = system.solve_least_squares(c2=-fc.ct)
    closed = solve_closed_form(fc, EXAMPLE)
    assert np.max(np.abs(solved.as_vector() - closed.as_vector())) < 1e-10


def test_rhs_reduction():
    fc = first_corrector(EXAMPLE)
    quadratic, constant = rhs_reduction(fc, EXAMPLE, 0.3)
    assert quadratic == 0.0
    assert abs(constant - 1.0 / 7.0) < 1e-14
    quadratic, constant = rhs_reduction(fc, EXAMPLE, 0.9)
    assert abs(quadratic - 8.0 / 7.0 / 0.9 ** 4) < 1e-12
    f_minus_1 = 6.0 / 7.0 + (1.0 / 7.0) / 0.81 - 1.0
    assert abs(constant - (-(2.0 - 10.0 / 7.0 + 4.0 * f_minus_1))) < 1e-12
    for bad in (0.0, EXAMPLE.core_radius, 1.0):
        try:
            rhs_reduction(fc, EXAMPLE, bad)
        except ValueError:
            continue
        raise AssertionError(f"rhs_reduction accepted r={bad}")


def test_eval_g_h_regions():
    print("📍 Testing evaluation at the interface and the origin...")
    fc = first_corrector(EXAMPLE)
    sc = solve_closed_form(fc, EXAMPLE)
    big_r = EXAMPLE.core_radius
    g_core, h_core = eval_g_h(sc, fc, EXAMPLE, big_r, region='core')
    g_shell, h_shell = eval_g_h(sc, fc, EXAMPLE, big_r, region='shell')
    assert abs(g_core - 1.0 / 14.0) < 1e-12
    assert abs(g_core - g_shell) < 1e-12
    assert abs(h_core - h_shell) < 1e-12
    g_one, h_one = eval_g_h(sc, fc, EXAMPLE, 1.0)
    assert abs(g_one) < 1e-14 and abs(h_one) < 1e-14
    try:
        eval_g_h(sc, fc, EXAMPLE, big_r)
    except ValueError:
        pass
    else:
        raise AssertionError("ambiguous r = R accepted without a region")
    try:
        eval_g_h(sc, fc, EXAMPLE, 0.0)
    except SingularEvaluationError:
        pass
    else:
        raise AssertionError("singular core evaluated at the origin")
    print("   ✅ g and h continuous at R, zero on the unit sphere")


def test_homogeneous_corrector_vanishes():
    profile = TwoPhaseProfile(1.7, 1.7, 0.4, 3)
    fc = first_corrector(profile)
    sc = solve_closed_form(fc, profile)
    assert np.max(np.abs(sc.as_vector())) < 1e-15
    g, h = eval_g_h(sc, fc, profile, 0.0)
    assert g == 0.0 and h == 0.0
    assert abs(corrector_ball_integral(sc, fc, profile)) < 1e-15


def main():
    """Run all corrector tests"""
    print("🧪 CORRECTOR MODULE TESTS")
    print("=" * 50)

    tests = [
        ("Example coefficients", test_example_coefficients),
        ("System consistency", test_system_consistency),
        ("Least squares", test_least_squares_matches_closed_form),
        ("Source reduction", test_rhs_reduction),
        ("Interface evaluation", test_eval_g_h_regions),
        ("Homogeneous corrector", test_homogeneous_corrector_vanishes),
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
