#!/usr/bin/env python3
"""
Test Packing - torus geometry, greedy Apollonian construction and the packing file format
"""

import sys
import math
import tempfile
from pathlib import Path

import numpy as np

# Add src directory to path
sys.path.append(str(Path(__file__).parent / "src"))

from src.errors import ConfigError, CoverageCompleteError, PackingFormatError, PackingInvariantError
from src.packing import (ApollonianPacker, ClearanceField, SearchSpec, StopCriterion, canonical, clearance,
                         coverage, greedy_apollonian, largest_empty_ball, load_packing, make_packing,
                         parse_packing, random_greedy, save_packing, save_radii_csv, torus_distance,
                         translate)
from src.validation import REFERENCE_CENTERS, SECOND_RADIUS, THIRD_RADIUS

SPEC = SearchSpec(grid=256)


def test_torus_geometry():
    print("🌐 Testing torus geometry...")
    assert abs(torus_distance((0.1, 0.1), (0.9, 0.9)) - math.sqrt(0.08)) < 1e-15
    assert torus_distance((0.25,), (0.75,)) == 0.5
    assert np.all(canonical([-1e-18, 1.25, 0.5]) == np.array([0.0, 0.25, 0.5]))
    try:
        torus_distance((0.1, 0.2), (0.3,), dim=2)
    except ValueError:
        pass
    else:
        raise AssertionError("dimension mismatch accepted")
    print("   ✅ minimal-image distances and canonical representatives")


def test_make_packing_validation():
    print("🔍 Testing packing invariants...")
    packing = make_packing(2, [((0.5, 0.5), SECOND_RADIUS), ((1.0, 0.0), 0.5)])
    assert packing.radii == [0.5, SECOND_RADIUS]
    assert packing.balls[0].center == (0.0, 0.0)
    try:
        make_packing(2, [((0.0, 0.0), 0.5), ((0.6, 0.0), 0.2)])
    except PackingInvariantError as e:
        assert e.pairs == [(0, 1)]
    else:
        raise AssertionError("overlapping balls accepted")
    try:
        make_packing(2, [((0.0, 0.0), 0.7)])
    except PackingInvariantError:
        pass
    else:
        raise AssertionError("radius above 1/2 accepted")
    print("   ✅ canonical centers, sorting and disjointness enforced")


def test_clearance_and_coverage():
    packing = make_packing(2, [((0.0, 0.0), 0.5)])
    assert abs(clearance(packing, (0.5, 0.5)) - SECOND_RADIUS) < 1e-15
    assert clearance(make_packing(2, []), (0.3, 0.3)) == 0.5
    report = coverage(packing)
    assert abs(report['fraction'] - math.pi / 4.0) < 1e-15
    assert report['sum_eps_N'] == 0.25

    field = ClearanceField(2, 64, packing)
    for flat in (0, 100, 2080, 4095):
        point = field.point(flat)
        assert abs(field.values.flat[flat] - clearance(packing, point)) < 1e-12


def test_largest_empty_ball():
    packing = make_packing(2, [((0.0, 0.0), 0.5)])
    center, radius = largest_empty_ball(packing, SPEC)
    assert abs(radius - SECOND_RADIUS) < 1e-9
    assert torus_distance(center, (0.5, 0.5)) < 1e-6
    full = greedy_apollonian(1, StopCriterion(max_balls=1), SPEC)
    try:
        ApollonianPacker(1, SPEC).search(full)
    except CoverageCompleteError:
        pass
    else:
        raise AssertionError("search ran on a fully covered circle")


def test_greedy_apollonian_six_balls():
    print("⚪ Testing the six-ball Apollonian packing...")
    packing = greedy_apollonian(2, StopCriterion(max_balls=6), SPEC)
    radii = packing.radii
    assert len(radii) == 6
    assert radii[0] == 0.5
    assert abs(radii[1] - SECOND_RADIUS) < 1e-6
    assert max(abs(r - THIRD_RADIUS) for r in radii[2:]) < 1e-6
    assert packing.overlapping_pairs() == []
    rerun = greedy_apollonian(2, StopCriterion(max_balls=6), SPEC)
    assert rerun.balls == packing.balls
    print(f"   ✅ radii {[round(r, 7) for r in radii]}")


def test_third_level_is_one_batch_of_four():
    print("⚪ Testing the third-level batch...")
    two = make_packing(2, REFERENCE_CENTERS[:2])
    packer = ApollonianPacker(2, SPEC)
    batch = packer._best_batch(packer.search(two))
    assert len(batch) == 4
    assert max(abs(rho - THIRD_RADIUS) for _, rho in batch) < 1e-6
    for expected, _ in REFERENCE_CENTERS[2:]:
        assert min(torus_distance(center, expected) for center, _ in batch) < 1e-5

    packing = greedy_apollonian(2, StopCriterion(max_balls=8), SPEC)
    radii = packing.radii
    assert len(radii) == 8
    assert sum(1 for r in radii if abs(r - THIRD_RADIUS) < 1e-6) == 4
    assert radii[6] < THIRD_RADIUS - 1e-3
    assert abs(radii[6] - 0.02491148) < 1e-5
    assert packing.overlapping_pairs() == []
    print(f"   ✅ four balls of radius {THIRD_RADIUS:.9f}, next radius {radii[6]:.8f}")


def test_circle_is_one_ball():
    packing = greedy_apollonian(1, StopCriterion(max_balls=3), SPEC)
    assert len(packing) == 1
    assert abs(packing.coverage - 1.0) < 1e-12


def test_file_round_trip():
    print("💾 Testing packing files...")
    packing = greedy_apollonian(2, StopCriterion(max_balls=2), SPEC)
    with tempfile.TemporaryDirectory() as tmp:
        path = str(Path(tmp) / "packing.json")
        save_packing(packing, path)
        loaded = load_packing(path)
        assert loaded.balls == packing.balls
        assert loaded.generator == 'apollonian'
        csv_path = Path(tmp) / "radii.csv"
        save_radii_csv(packing, str(csv_path))
        lines = csv_path.read_text().strip().splitlines()
        assert lines[0] == 'index,radius,center_0,center_1'
        assert len(lines) == 3
    print("   ✅ JSON round trip is exact")


def test_format_errors():
    try:
        parse_packing('{"dim": 2,\n "balls": [}')
    except PackingFormatError as e:
        assert e.line == 2
    else:
        raise AssertionError("invalid JSON accepted")
    for text, field in (('{"balls": []}', 'dim'),
                        ('{"dim": 2}', 'balls'),
                        ('{"dim": 2, "balls": [{"center": [0.1], "radius": 0.1}]}', 'balls[0].center'),
                        ('{"dim": 2, "balls": [{"center": [0.1, 0.2], "radius": "x"}]}', 'balls[0].radius')):
        try:
            parse_packing(text)
        except PackingFormatError as e:
            assert e.field == field, (e.field, field)
        else:
            raise AssertionError(f"accepted {text}")


def test_translation_and_random_greedy():
    packing = make_packing(2, [((0.0, 0.0), 0.5), ((0.5, 0.5), SECOND_RADIUS)])
    moved = translate(packing, (0.3, 0.9))
    assert moved.radii == packing.radii
    assert moved.overlapping_pairs() == []

    first = random_greedy(2, 5, seed=1)
    second = random_greedy(2, 5, seed=1)
    assert first.balls == second.balls
    assert len(first) == 5
    assert first.overlapping_pairs() == []
    assert first.radii == sorted(first.radii, reverse=True)


def test_configuration_errors():
    for build in (lambda: StopCriterion(),
                  lambda: StopCriterion(target_coverage=1.5),
                  lambda: SearchSpec(grid=2),
                  lambda: ApollonianPacker(4)):
        try:
            build()
        except ConfigError:
            continue
        raise AssertionError("invalid configuration accepted")


def main():
    """Run all packing tests"""
    print("🧪 PACKING MODULE TESTS")
    print("=" * 50)

    tests = [
        ("Torus geometry", test_torus_geometry),
        ("Packing invariants", test_make_packing_validation),
        ("Clearance and coverage", test_clearance_and_coverage),
        ("Largest empty ball", test_largest_empty_ball),
        ("Six-ball packing", test_greedy_apollonian_six_balls),
        ("Third-level batch", test_third_level_is_one_batch_of_four),
        ("Circle packing", test_circle_is_one_ball),
        ("File round trip", test_file_round_trip),
        ("Format errors", test_format_errors),
        ("Translation and random greedy", test_translation_and_random_greedy),
        ("Configuration errors", test_configuration_errors),
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
