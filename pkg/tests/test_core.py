import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from cellifps import (
    Aabb,
    NormalizationTransform,
    Point3,
    PointCloud,
    apply_inverse,
    bounding_box,
    centroid,
    normalize,
)

coords = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
clouds = st.integers(1, 60).flatmap(lambda n: arrays(np.float64, (n, 3), elements=coords))


def test_cloud_copies_and_freezes_input():
    raw = np.array([[0.0, 1.0, 2.0]])
    cloud = PointCloud(raw)
    raw[0, 0] = 9.0
    assert cloud[0] == Point3(0.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        cloud.xyz[0, 0] = 5.0


@pytest.mark.parametrize("bad", [np.nan, np.inf, -np.inf])
def test_cloud_rejects_non_finite(bad):
    with pytest.raises(ValueError, match="non-finite"):
        PointCloud([(0.0, 0.0, 0.0), (1.0, bad, 0.0)])


def test_cloud_rejects_wrong_shape():
    with pytest.raises(ValueError):
        PointCloud([(0.0, 0.0)])


def test_take_keeps_order_and_columns_match():
    cloud = PointCloud([(0, 0, 0), (1, 2, 3), (4, 5, 6)])
    sub = cloud.take([2, 0])
    assert list(sub) == [Point3(4, 5, 6), Point3(0, 0, 0)]
    np.testing.assert_array_equal(sub.columns, sub.xyz.T)
    assert sub.columns.flags.c_contiguous


@pytest.mark.parametrize(
    "points, expected",
    [
        ([(0, 0, 0)], (0, 0, 0)),
        ([(0, 0, 0), (2, 0, 0)], (1, 0, 0)),
        ([(1, 2, 3), (3, 2, 1), (2, 2, 2)], (2, 2, 2)),
    ],
)
def test_centroid_examples(points, expected):
    assert centroid(PointCloud(points)) == pytest.approx(expected, abs=1e-15)


def test_empty_input_errors():
    empty = PointCloud(np.empty((0, 3)))
    for fn in (centroid, bounding_box, normalize):
        with pytest.raises(ValueError, match="empty input"):
            fn(empty)


@pytest.mark.parametrize(
    "points, lo, hi",
    [
        ([(0, 0, 0)], (0, 0, 0), (0, 0, 0)),
        ([(-1, 0, 2), (3, -2, 0)], (-1, -2, 0), (3, 0, 2)),
        ([(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)], (0, 0, 0), (1, 1, 1)),
    ],
)
def test_bounding_box_examples(points, lo, hi):
    assert bounding_box(PointCloud(points)) == Aabb(Point3(*lo), Point3(*hi))


@given(clouds)
def test_bounding_box_contains_every_point(xyz):
    box = bounding_box(PointCloud(xyz))
    assert all(box.contains(p) for p in xyz)
    assert all(lo <= hi for lo, hi in zip(box.min_corner, box.max_corner))


def test_normalize_examples():
    out, t = normalize(PointCloud([(0, 0, 0), (2, 0, 0)]))
    np.testing.assert_allclose(out.xyz, [[-1, 0, 0], [1, 0, 0]], atol=1e-15)
    assert t == NormalizationTransform(Point3(1.0, 0.0, 0.0), 1.0)

    out, t = normalize(PointCloud([(0, 0, 0), (0, 4, 0)]))
    np.testing.assert_allclose(out.xyz, [[0, -1, 0], [0, 1, 0]], atol=1e-15)
    assert t.scale == 2.0


def test_normalize_is_idempotent_on_normalized_input():
    cloud = PointCloud([(-1, 0, 0), (1, 0, 0), (0, 0.5, 0)])
    first, _ = normalize(cloud)
    second, t = normalize(first)
    np.testing.assert_allclose(second.xyz, first.xyz, atol=1e-9)
    assert t.scale == pytest.approx(1.0, abs=1e-9)
    assert max(abs(v) for v in t.translation) < 1e-9


@pytest.mark.parametrize("points", [[(3, 3, 3)], [(1, 2, 3)] * 4])
def test_normalize_degenerate(points):
    with pytest.raises(ValueError, match="degenerate cloud"):
        normalize(PointCloud(points))


def test_apply_inverse_examples():
    cloud = PointCloud([(-1, 0, 0), (1, 0, 0)])
    back = apply_inverse(NormalizationTransform(Point3(1, 0, 0), 1.0), cloud)
    np.testing.assert_array_equal(back.xyz, [[0, 0, 0], [2, 0, 0]])
    same = apply_inverse(NormalizationTransform.identity(), cloud)
    np.testing.assert_array_equal(same.xyz, cloud.xyz)


@given(clouds)
def test_normalize_properties(xyz):
    cloud = PointCloud(xyz)
    if np.all(xyz == xyz[0]):
        with pytest.raises(ValueError, match="degenerate cloud"):
            normalize(cloud)
        return
    if np.ptp(xyz, axis=0).max() < 1e-150:
        # Squared radius is subnormal here, so the unit-radius check loses precision.
        return
    out, t = normalize(cloud)
    radii = np.sqrt((out.xyz ** 2).sum(axis=1))
    assert radii.max() == pytest.approx(1.0, abs=1e-9)
    assert np.abs(out.xyz.mean(axis=0)).max() < 1e-9
    back = apply_inverse(t, out)
    scale = max(1.0, float(np.abs(xyz).max()))
    assert np.abs(back.xyz - xyz).max() <= 1e-9 * scale
    np.testing.assert_allclose(t.apply(cloud).xyz, out.xyz, rtol=0, atol=1e-12)


@pytest.mark.parametrize("scale", [0.0, -1.0, math.inf, math.nan])
def test_transform_requires_positive_scale(scale):
    with pytest.raises(ValueError):
        NormalizationTransform(Point3(0, 0, 0), scale)
