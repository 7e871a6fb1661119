import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SQRT2, lattice, union_fixture
from oracles import enumerate_lattice
from qckit.errors import IncompleteDataError, ValidationError
from qckit.multiset import (
    PointMultiset,
    Window,
    build_multiset,
    count_in_window,
    discrepancy_stats,
)

W = Window.closed(-100, 100)


def test_multiplicity_expansion():
    A = build_multiset([(1.5, 2)], W)
    assert A.a(0) == 1.5 and A.a(1) == 1.5
    assert len(A) == 2


def test_sorting_and_origin_rule():
    A = build_multiset([(2.0, 1), (-1.0, 1)], W)
    np.testing.assert_array_equal(A.points, [-1.0, 2.0])
    assert A.a(0) == 2.0
    assert A.a(-1) == -1.0


def test_zero_rejected_when_nonzero_required():
    with pytest.raises(ValidationError):
        build_multiset([(0.0, 1)], W, nonzero_required=True)
    build_multiset([(0.0, 1)], W)


@pytest.mark.parametrize("pairs", [[(1.0, 0)], [(1.0, -2)], [(1.0, 1.5)], [(200.0, 1)], [(math.nan, 1)]])
def test_bad_input_rejected(pairs):
    with pytest.raises(ValidationError):
        build_multiset(pairs, W)


def test_exact_coordinates_merge():
    A = build_multiset([(1.0, 1), (1.0, 2), (3.0, 1)], W)
    np.testing.assert_array_equal(A.multiplicities, [3, 1])


def test_merge_tolerance():
    A = build_multiset([(1.0, 1), (1.0 + 1e-12, 1)], W, merge_tol=1e-9)
    assert A.points.size == 1 and A.multiplicities[0] == 2
    B = build_multiset([(1.0, 1), (1.0 + 1e-12, 1)], W)
    assert B.points.size == 2


def test_count_shifted_integers():
    A = lattice(1.0, 0.25, -100, 100)
    assert count_in_window(A, Window.half_open(0, 1)) == 1
    assert count_in_window(A, Window.half_open(0, 10)) == 10


def test_count_union_against_enumeration():
    A = union_fixture(100.0)
    expected = len(enumerate_lattice(1.0, 0.25, 0, 10)) + len(enumerate_lattice(SQRT2, 0.25, 0, 10))
    assert expected == 17
    assert count_in_window(A, Window.half_open(0, 10)) == expected


def test_count_respects_endpoints():
    A = lattice(1.0, 0.0, -10, 10)
    assert count_in_window(A, Window(0, 3, True, False)) == 3
    assert count_in_window(A, Window(0, 3, True, True)) == 4
    assert count_in_window(A, Window(0, 3, False, False)) == 2


def test_count_outside_completeness_window_is_error():
    A = lattice(1.0, 0.25, -10, 10)
    with pytest.raises(IncompleteDataError):
        count_in_window(A, Window.half_open(5, 10))


def test_index_outside_range_is_error():
    A = lattice(1.0, 0.25, -3, 3)
    with pytest.raises(IncompleteDataError):
        A.a(10)


def test_discrepancy_periodic_is_zero():
    A = lattice(1.0, 0.25, -50, 50)
    s = discrepancy_stats(A, 1.0, 10, np.linspace(-30, 30, 61))
    assert s.mean_defect == 0 and s.spread == 0


def test_discrepancy_sqrt2_lattice_against_enumeration():
    A = lattice(SQRT2, 0.0, -50, 50)
    xs = [0.0, 0.3, 0.7]
    s = discrepancy_stats(A, 1.0, 4, xs)
    short = [len(enumerate_lattice(SQRT2, 0.0, x, x + 1)) for x in xs]
    long = [len(enumerate_lattice(SQRT2, 0.0, x, x + 4)) for x in xs]
    assert s.mean_defect == pytest.approx(max(abs(a - b / 4) for a, b in zip(short, long)))
    assert s.spread == max(short) - min(short)
    assert s.mean_defect <= 2 and s.spread <= 2


def test_discrepancy_union_stable_in_range():
    A = union_fixture(1000.0)
    rng = np.random.default_rng(7)
    first = discrepancy_stats(A, 5.0, 8, rng.uniform(-100, 100, 50))
    assert math.isfinite(first.mean_defect)
    # dense grids: value at range R equals value at range 2R
    small = discrepancy_stats(A, 5.0, 8, np.arange(0, 200, 0.005))
    big = discrepancy_stats(A, 5.0, 8, np.arange(0, 400, 0.005))
    assert small.spread == big.spread
    assert big.mean_defect <= small.mean_defect + 0.25


def test_discrepancy_empty_samples():
    with pytest.raises(ValidationError):
        discrepancy_stats(lattice(1, 0, -5, 5), 1.0, 2, [])


@pytest.mark.parametrize("alpha", [1.0, SQRT2, 0.3, 2.5])
def test_counting_bound_lattices(alpha):
    A = lattice(alpha, 0.1, -200, 200)
    xs = np.arange(-100, 100, 0.01)
    k1 = max(count_in_window(A, Window.half_open(x, 1)) for x in xs[::37])
    assert k1 <= math.ceil(1 / alpha) + 1
    for h in (0.5, 3.0, 17.3):
        counts = [count_in_window(A, Window.half_open(x, h)) for x in xs[::101]]
        assert max(counts) <= k1 * (h + 1)


def test_counting_bound_union():
    A = union_fixture(500.0)
    xs = np.arange(-200, 200, 0.013)
    k1 = max(count_in_window(A, Window.half_open(x, 1)) for x in xs)
    assert k1 == 2  # both spacings are >= 1: at most one point of each lattice per unit window
    for h in (2.0, 9.5, 40.0):
        assert max(count_in_window(A, Window.half_open(x, h)) for x in xs[::7]) <= k1 * (h + 1)


def test_json_round_trip_bit_exact():
    A = union_fixture(20.0)
    doc = json.loads(json.dumps(A.to_json()))
    B = PointMultiset.from_json(doc)
    assert B.points.tobytes() == A.points.tobytes()
    np.testing.assert_array_equal(B.multiplicities, A.multiplicities)
    assert B.window == A.window


points = st.lists(
    st.tuples(st.floats(-50, 50, allow_nan=False), st.integers(1, 4)), min_size=0, max_size=40
)


@settings(max_examples=150, deadline=None)
@given(points)
def test_build_invariants(pairs):
    A = build_multiset(pairs, Window.closed(-50, 50))
    assert np.all(np.diff(A.points) > 0)
    assert np.all(A.multiplicities >= 1)
    assert A.multiplicities.sum() == sum(m for _, m in pairs)
    if len(A):
        v = A.a(A.indices)
        assert np.all(np.diff(v) >= 0)
        if A.n_max >= 0:
            assert A.a(0) >= 0
        if A.n_min < 0:
            assert A.a(-1) < 0
    doc = json.loads(json.dumps(A.to_json()))
    assert PointMultiset.from_json(doc).points.tobytes() == A.points.tobytes()


@given(st.floats(-10, 10), st.floats(0, 5), st.floats(-10, 10), st.floats(0, 5))
def test_window_within_matches_containment(lo1, h1, lo2, h2):
    a, b = Window.half_open(lo1, h1), Window.half_open(lo2, h2)
    if a.within(b) and a.hi > a.lo:
        xs = np.linspace(a.lo, a.hi, 11)[:-1]
        # linspace can round up to hi for subnormal spans
        xs = xs[a.contains(xs)]
        assert np.all(b.contains(xs))
