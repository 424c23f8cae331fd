#!/usr/bin/env python3
"""
Test Minimizer - scale-sequence functional, its bounds and the Apollonian bracket
"""

import sys
import math
from pathlib import Path

import numpy as np

# Add src directory to path
sys.path.append(str(Path(__file__).parent / "src"))

from src.errors import ConstraintViolationError, MixedDimensionError
from src.minimizer import (ScaleSequence, bound_check, compare_structures, equal_split, from_radii,
                           functional_I, minimize_via_apollonian, random_normalized,
                           robin_hood_transfer, stratified_sequence)
from src.packing import SearchSpec, StopCriterion
from src.validation import SECOND_RADIUS


def test_single_ball_on_circle():
    print("⚪ Testing the one-dimensional minimum...")
    seq = ScaleSequence(d=(1.0,), dim=1)
    assert seq.c_n == 0.5
    value = functional_I(seq)
    assert abs(value.i_value + 0.125) < 1e-15
    assert abs(value.upper_env + 0.125) < 1e-15
    estimate = minimize_via_apollonian(1, StopCriterion(max_balls=1), SearchSpec(grid=256))
    assert abs(estimate.i_lower + 0.125) < 1e-15
    assert abs(estimate.i_upper + 0.125) < 1e-15
    assert estimate.deficit == 0.0
    print("   ✅ I_min = -1/8 for N = 1")


def test_equal_split_closed_form():
    for dim in (1, 2, 3):
        for k in (1, 2, 5, 100):
            seq = equal_split(k, dim)
            exact = seq.c_n ** ((dim + 2.0) / dim) * k ** (-2.0 / dim)
            assert abs(abs(functional_I(seq).i_value) - exact) <= 1e-12 * exact


def test_constraints_rejected():
    print("🚫 Testing sequence constraints...")
    for build in (lambda: ScaleSequence(d=(0.2, 0.8), dim=2),
                  lambda: ScaleSequence(d=(0.5, -0.1), dim=2),
                  lambda: ScaleSequence(d=(0.9, 0.9), dim=2, partial=True),
                  lambda: functional_I(ScaleSequence(d=(0.5,), dim=2)),
                  lambda: equal_split(0, 2)):
        try:
            build()
        except ConstraintViolationError:
            continue
        raise AssertionError("constraint violation accepted")
    partial = functional_I(ScaleSequence(d=(0.5,), dim=2, partial=True))
    assert partial.i_value < 0.0
    print("   ✅ ordering, sign and normalization enforced")


def test_range_and_bound_on_random_sequences():
    rng = np.random.default_rng(5)
    for _ in range(200):
        dim = int(rng.integers(1, 4))
        seq = random_normalized(rng, int(rng.integers(1, 40)), dim)
        value = functional_I(seq)
        floor = -seq.c_n ** ((dim + 2.0) / dim)
        assert floor * (1 + 1e-12) <= value.i_value < 0.0
        assert bound_check(seq).satisfied


def test_robin_hood_raises_functional():
    seq = ScaleSequence(d=(0.6, 0.3, 0.1), dim=2)
    moved = robin_hood_transfer(seq, 0, 2, 0.2)
    assert moved.d == (0.4, 0.3, 0.3) or np.allclose(moved.d, (0.4, 0.3, 0.3), atol=1e-15)
    assert functional_I(moved).i_value > functional_I(seq).i_value
    try:
        robin_hood_transfer(seq, 0, 2, 0.3)
    except ConstraintViolationError:
        pass
    else:
        raise AssertionError("transfer larger than half the gap accepted")


def test_structures_and_radii():
    print("🏗️ Testing structure comparison...")
    ranking = compare_structures([equal_split(4, 2), equal_split(1, 2), equal_split(4, 2)])
    assert [idx for idx, _ in ranking] == [1, 0, 2]
    try:
        compare_structures([equal_split(2, 2), equal_split(2, 3)])
    except MixedDimensionError:
        pass
    else:
        raise AssertionError("mixed dimensions accepted")

    stratified = stratified_sequence(3, 2)
    assert len(stratified.d) == 1 + 4 + 16
    assert abs(stratified.total - 1.0) < 1e-15

    seq = from_radii([0.5, SECOND_RADIUS], 2)
    assert seq.partial and seq.realizable
    assert np.allclose(seq.radii(), [0.5, SECOND_RADIUS], rtol=1e-12, atol=0.0)
    assert not ScaleSequence(d=(0.9, 0.1), dim=2).realizable
    print("   ✅ stable ranking, stratified masses and radii conversion")


def test_apollonian_bracket():
    estimate = minimize_via_apollonian(2, StopCriterion(max_balls=2), SearchSpec(grid=128))
    exact = 0.5 ** 4 + SECOND_RADIUS ** 4
    assert abs(-estimate.i_upper - exact) <= 1e-9 * exact
    assert estimate.i_lower <= estimate.i_upper
    record = estimate.to_record('radii.csv')
    assert record['balls'] == 2 and record['radii_file'] == 'radii.csv'
    assert math.isclose(record['deficit'], 1.0 - estimate.coverage, abs_tol=1e-15)


def main():
    """Run all minimizer tests"""
    print("🧪 MINIMIZER MODULE TESTS")
    print("=" * 50)

    tests = [
        ("Single ball on circle", test_single_ball_on_circle),
        ("Equal split", test_equal_split_closed_form),
        ("Constraints", test_constraints_rejected),
        ("Range and bound", test_range_and_bound_on_random_sequences),
        ("Robin Hood transfer", test_robin_hood_raises_functional),
        ("Structures and radii", test_structures_and_radii),
        ("Apollonian bracket", test_apollonian_bracket),
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
