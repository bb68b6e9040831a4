import math

import numpy as np
import pytest

from fusionkit.errors import DimensionError, DomainError, InputFormatError
from fusionkit.multivariate import (
    MetricKind, MetricSpec, PointCloud, centroid, convex_hull_2d, cw_median, in_convex_hull, liu_depth,
    medoid, oja_depth, orthomedian_2d, polygon_centroid, rortho, seb_1center, tukey_depth,
    tukey_median_2d, weiszfeld_1median,
)

SQUARE = np.array([[0.0, 1.0, 1.0, 0.0], [0.0, 0.0, 1.0, 1.0]])


def test_point_cloud_validation():
    with pytest.raises(DomainError):
        PointCloud(np.array([[0.0, np.inf]]))
    with pytest.raises(DimensionError):
        PointCloud(np.zeros((2, 0)))
    cloud = PointCloud.from_rows([[1, 2], [3, 4], [5, 6]])
    assert (cloud.d, cloud.n) == (2, 3)
    assert cloud.points()[1].tolist() == [3.0, 4.0]


def test_point_cloud_from_csv(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text("x,y\n0,0\n1,2\n\n3,4\n")
    cloud = PointCloud.from_csv(str(path), header=True)
    assert cloud.data.tolist() == [[0, 1, 3], [0, 2, 4]]
    path.write_text("0,0\n1,b\n")
    with pytest.raises(InputFormatError) as err:
        PointCloud.from_csv(str(path))
    assert (err.value.line, err.value.column) == (2, 2)
    path.write_text("0,0\n1\n")
    with pytest.raises(InputFormatError):
        PointCloud.from_csv(str(path))


def test_metrics():
    a, b = np.array([0.0, 0.0]), np.array([3.0, 4.0])
    assert MetricSpec().distance(a, b) == pytest.approx(5.0)
    assert MetricSpec(MetricKind.MANHATTAN).distance(a, b) == 7.0
    assert MetricSpec(MetricKind.CHEBYSHEV).distance(a, b) == 4.0
    assert MetricSpec(MetricKind.MINKOWSKI, p=3).distance(a, b) == pytest.approx(91 ** (1 / 3))
    assert MetricSpec(MetricKind.CALLBACK, callback=lambda u, v: 42).distance(a, b) == 42.0
    with pytest.raises(DomainError):
        MetricSpec(MetricKind.MINKOWSKI, p=0.5)


def test_centroid_and_componentwise_median():
    X = np.array([[0.0, 1.0, 10.0], [2.0, 4.0, 6.0]])
    assert centroid(X).tolist() == pytest.approx([11 / 3, 4.0])
    assert centroid(X, [0.5, 0.5, 0.0]).tolist() == pytest.approx([0.5, 3.0])
    assert cw_median(X).tolist() == [1.0, 4.0]


def test_weiszfeld_square_center():
    res = weiszfeld_1median(SQUARE)
    assert res.converged
    assert res.point.tolist() == pytest.approx([0.5, 0.5], abs=1e-8)


def test_weiszfeld_optimum_at_a_data_point():
    # a heavy point attracts the median onto itself
    X = np.array([[0.0, 1.0, 0.0, -1.0], [0.0, 0.0, 1.0, 0.0]])
    res = weiszfeld_1median(X, w=[0.7, 0.1, 0.1, 0.1])
    assert res.converged
    assert res.point.tolist() == pytest.approx([0.0, 0.0], abs=1e-9)


def test_weiszfeld_coincident_points():
    res = weiszfeld_1median(np.ones((3, 4)))
    assert res.converged and res.iterations == 0


def test_weiszfeld_beats_the_centroid(rng):
    X = rng.normal(size=(3, 40))
    X[:, :5] += 50.0
    total = lambda y: float(np.sum(np.linalg.norm(X - y[:, None], axis=0)))  # noqa: E731
    res = weiszfeld_1median(X)
    assert total(res.point) <= total(centroid(X))


def test_medoid_ties_go_to_the_smallest_index():
    X = np.array([[0.0, 1.0, 2.0, 10.0]])
    assert medoid(X) == 1
    assert medoid(X, MetricSpec(MetricKind.MANHATTAN)) == 1


def test_seb_1center():
    center, radius = seb_1center(SQUARE)
    assert center.tolist() == pytest.approx([0.5, 0.5], abs=1e-7)
    assert radius == pytest.approx(math.sqrt(0.5), abs=1e-7)
    # an interior point does not move the ball
    X = np.hstack([SQUARE, [[0.4], [0.6]]])
    assert seb_1center(X)[1] == pytest.approx(radius, abs=1e-7)
    center, radius = seb_1center(np.array([[2.0], [3.0]]))
    assert radius == 0.0


def test_seb_covers_all_points(rng):
    X = rng.uniform(-1, 1, size=(3, 30))
    center, radius = seb_1center(X)
    assert np.all(np.linalg.norm(X - center[:, None], axis=0) <= radius + 1e-9)


def test_in_convex_hull():
    assert in_convex_hull([0.5, 0.5], SQUARE)
    assert in_convex_hull([1.0, 0.0], SQUARE)
    assert not in_convex_hull([1.5, 0.5], SQUARE)


def test_tukey_depth_exact():
    assert tukey_depth([0.5, 0.5], SQUARE) == 2
    assert tukey_depth([0.0, 0.0], SQUARE) == 1
    assert tukey_depth([5.0, 5.0], SQUARE) == 0
    with pytest.raises(DimensionError):
        tukey_depth([0.5], SQUARE)
    with pytest.raises(DomainError):
        tukey_depth([0.5, 0.5], SQUARE, mode="approx")


def test_tukey_depth_monte_carlo_is_an_upper_bound(rng):
    X = rng.normal(size=(2, 25))
    y = np.array([0.1, -0.2])
    exact = tukey_depth(y, X)
    approx = tukey_depth(y, X, mode="mc", m=3000, seed=3)
    assert approx >= exact
    assert tukey_depth(y, X, mode="mc", m=3000, seed=3) == approx


def test_tukey_depth_univariate():
    X = np.array([[1.0, 2.0, 3.0, 4.0, 5.0]])
    assert tukey_depth([3.0], X, mode="mc", m=10, seed=0) == 3


def test_liu_depth():
    assert liu_depth([0.5, 0.5], SQUARE) == pytest.approx(1.0)
    # each corner lies in the 3 triangles using it
    assert liu_depth([0.0, 0.0], SQUARE) == pytest.approx(0.75)
    assert liu_depth([3.0, 3.0], SQUARE) == 0.0
    with pytest.raises(DomainError):
        liu_depth([0.0, 0.0], SQUARE[:, :2])


def test_oja_depth_prefers_the_center():
    assert oja_depth([0.5, 0.5], SQUARE) > oja_depth([2.0, 2.0], SQUARE)
    assert 0.0 < oja_depth([0.5, 0.5], SQUARE) <= 1.0


def test_hull_and_polygon_centroid():
    pts = np.array([[0, 0], [2, 0], [2, 2], [0, 2], [1, 1]], dtype=float)
    hull = convex_hull_2d(pts)
    assert len(hull) == 4
    assert polygon_centroid(hull).tolist() == pytest.approx([1.0, 1.0])


def test_tukey_median_of_square():
    res = tukey_median_2d(SQUARE)
    assert not res.flagged
    assert res.depth == 2
    assert res.point.tolist() == pytest.approx([0.5, 0.5])


def test_tukey_median_collapses_duplicates_and_flags_collinear():
    res = tukey_median_2d(np.ones((2, 3)))
    assert res.point.tolist() == [1.0, 1.0]
    res = tukey_median_2d(np.array([[0.0, 1.0, 2.0], [0.0, 1.0, 2.0]]))
    assert res.flagged
    assert res.point.tolist() == [1.0, 1.0]


def test_tukey_median_is_deep(rng):
    X = rng.normal(size=(2, 15))
    res = tukey_median_2d(X)
    assert tukey_depth(res.point, X) >= res.depth - 1
    assert res.depth >= math.ceil(15 / 3)


def test_rortho_is_orthogonal():
    for d in (2, 3, 6):
        A = rortho(d, seed=d)
        assert np.allclose(A @ A.T, np.eye(d), atol=1e-10)
    with pytest.raises(DomainError):
        rortho(1)


def test_orthomedian_of_symmetric_cloud():
    X = np.array([[1.0, -1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, -1.0, 0.0]]) + np.array([[2.0], [3.0]])
    assert orthomedian_2d(X).tolist() == pytest.approx([2.0, 3.0], abs=1e-9)
    with pytest.raises(DomainError):
        orthomedian_2d(X, directions=2)
