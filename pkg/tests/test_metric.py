from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ultrafree.metric import (
    FiniteMetricSpace,
    StructuralError,
    bilipschitz_distortion,
    identity_distortion,
    random_ultrametric,
    round_to_dyadic,
    strict_max_check,
    validate,
    with_base,
)


def test_validate_ultrametric_triangle(triangle):
    report = validate(triangle)
    assert report.is_metric and report.is_ultrametric
    assert report.failing_triple is None
    assert report.is_dyadic


def test_validate_collinear_not_ultrametric(collinear):
    report = validate(collinear)
    assert report.is_metric
    assert not report.is_ultrametric
    i, j, k = report.failing_triple
    d = collinear.dist
    assert d[i][k] > max(d[i][j], d[j][k])
    assert (i, j, k) == (0, 1, 2)


def test_validate_dyadic_flag():
    yes = FiniteMetricSpace(("0", "x", "y"), ((0, 1, 1), (1, 0, "1/2"), (1, "1/2", 0)))
    no = FiniteMetricSpace(("0", "x", "y"), ((0, 1, 1), (1, 0, "3/4"), (1, "3/4", 0)))
    assert validate(yes).is_dyadic
    assert not validate(no).is_dyadic


def test_validate_non_metric_reports_triple():
    space = FiniteMetricSpace(("0", "x", "y"), ((0, 1, 5), (1, 0, 1), (5, 1, 0)))
    report = validate(space)
    assert not report.is_metric and not report.is_ultrametric
    i, j, k = report.failing_triple
    assert space.dist[i][k] > space.dist[i][j] + space.dist[j][k]


@pytest.mark.parametrize(
    "dist",
    [
        ((0, 1), (2, 0)),                       # asymmetric
        ((0, -1), (-1, 0)),                     # negative
        ((1, 1), (1, 0)),                       # nonzero diagonal
        ((0, 0), (0, 0)),                       # duplicate points
    ],
)
def test_structural_errors(dist):
    space = FiniteMetricSpace(("a", "b"), dist)
    with pytest.raises(StructuralError):
        validate(space)


def test_constructor_rejects_bad_shapes():
    with pytest.raises(ValueError):
        FiniteMetricSpace(("a", "a"), ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        FiniteMetricSpace(("a", "b"), ((0, 1),))
    with pytest.raises(TypeError):
        FiniteMetricSpace(("a", "b"), ((0, 0.5), (0.5, 0)))


def test_strict_max_property(triangle):
    assert strict_max_check(triangle) == []
    # d(x,y) = 1/2 != d(y,0) = 1 forces d(x,0) = 1
    assert triangle.dist[1][0] == max(triangle.dist[1][2], triangle.dist[2][0])


def test_strict_max_rejects_non_ultrametric(collinear):
    with pytest.raises(ValueError):
        strict_max_check(collinear)


def test_strict_max_random_campaign():
    for seed in range(25):
        assert strict_max_check(random_ultrametric(10, seed)) == []


def test_round_to_dyadic_two_point_examples():
    for d, expected in ((Fraction(3), Fraction(2)), (Fraction(1), Fraction(1)), (Fraction(3, 4), Fraction(1, 2))):
        space = FiniteMetricSpace(("0", "p"), ((0, d), (d, 0)))
        rounded = round_to_dyadic(space)
        assert rounded.dist[0][1] == expected


def test_round_to_dyadic_properties():
    for seed in range(20):
        space = random_ultrametric(8, seed)
        rounded = round_to_dyadic(space)
        report = validate(rounded)
        assert report.is_ultrametric and report.is_dyadic
        for i in range(8):
            for j in range(i + 1, 8):
                r, d = rounded.dist[i][j], space.dist[i][j]
                assert r <= d < 2 * r
        assert round_to_dyadic(rounded) == rounded
        low, high = bilipschitz_distortion(space, rounded)
        assert high / low < 2
        assert identity_distortion(space, rounded) < 2


def test_round_to_dyadic_rejects_non_ultrametric(collinear):
    with pytest.raises(ValueError):
        round_to_dyadic(collinear)


def test_bilipschitz_identity(triangle):
    assert bilipschitz_distortion(triangle, triangle) == (1, 1)


def test_bilipschitz_single_pair_distortion():
    a = FiniteMetricSpace(("0", "p"), ((0, 3), (3, 0)))
    assert identity_distortion(a, round_to_dyadic(a)) == Fraction(3, 2)


def test_bilipschitz_size_mismatch(triangle):
    other = FiniteMetricSpace(("0", "p"), ((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        bilipschitz_distortion(triangle, other)


def test_random_ultrametric_two_points():
    space = random_ultrametric(2, 0)
    assert len(space) == 2 and space.dist[0][1] > 0


def test_random_ultrametric_reproducible():
    assert random_ultrametric(5, 42) == random_ultrametric(5, 42)
    assert random_ultrametric(5, 42) != random_ultrametric(5, 43)


def test_random_ultrametric_rejects_small():
    with pytest.raises(ValueError):
        random_ultrametric(1, 0)


def test_random_ultrametric_hundred_seeds_at_twelve_points():
    for seed in range(100):
        assert validate(random_ultrametric(12, seed)).is_ultrametric


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 12), seed=st.integers(0, 10**6))
def test_random_ultrametric_always_valid(n, seed):
    space = random_ultrametric(n, seed)
    report = validate(space)
    assert report.is_metric and report.is_ultrametric
    values = {space.dist[i][j] for i in range(n) for j in range(i + 1, n)}
    assert len(values) <= n - 1


def test_with_base_relabels(triangle):
    moved = with_base(triangle, 2)
    assert moved.labels == ("y", "0", "x")
    assert moved.dist[0][2] == triangle.dist[2][1]
    assert validate(moved).is_ultrametric
