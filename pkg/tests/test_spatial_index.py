import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from cellifps import PointCloud
from cellifps import spatial_index
from cellifps.spatial_index import GridBinner, NnIndex, build_grid, nearest


@pytest.mark.parametrize(
    "points, edge, expected",
    [
        ([(0.1, 0, 0), (0.9, 0, 0)], 1.0, {(0, 0, 0): [0, 1]}),
        ([(0.1, 0, 0), (1.1, 0, 0)], 1.0, {(0, 0, 0): [0], (1, 0, 0): [1]}),
        ([(7.0, -2.0, 3.5)], 0.01, {(0, 0, 0): [0]}),
    ],
)
def test_build_grid_examples(points, edge, expected):
    # Origin (0,0,0) matches the hand arithmetic; the bbox-min default gives the same cells here.
    for origin in ((0.0, 0.0, 0.0), None):
        if origin is not None and len(points) == 1:
            continue
        grid = build_grid(PointCloud(points), edge, origin=origin)
        assert grid.cells == expected


@pytest.mark.parametrize("edge", [0.0, -1.0])
def test_build_grid_rejects_nonpositive_edge(edge):
    with pytest.raises(ValueError):
        build_grid(PointCloud([(0, 0, 0)]), edge)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 300), st.floats(0.01, 2.0), st.integers(0, 2**32 - 1))
def test_build_grid_partitions_indices(size, edge, seed):
    xyz = np.random.default_rng(seed).uniform(-1, 1, (size, 3))
    grid = build_grid(PointCloud(xyz), edge)
    members = [i for ids in grid.cells.values() for i in ids]
    assert sorted(members) == list(range(size))
    assert list(grid.cells) == sorted(grid.cells)
    for cell, ids in grid.cells.items():
        assert all(grid.cell_of(xyz[i]) == cell for i in ids)


def test_nearest_examples():
    index = NnIndex(PointCloud([(0, 0, 0), (3, 0, 0)]))
    assert nearest(index, (1, 0, 0)) == (0, 1.0)
    assert nearest(index, (3, 0, 0)) == (1, 0.0)
    # (1.5, 0, 0) is equidistant; lowest index wins.
    assert nearest(index, (1.5, 0, 0)) == (0, 2.25)


def test_nearest_rejects_empty():
    with pytest.raises(ValueError, match="empty input"):
        NnIndex(PointCloud(np.empty((0, 3))))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 512), st.integers(0, 2**32 - 1), st.booleans())
def test_nearest_matches_linear_scan(size, seed, snap):
    rng = np.random.default_rng(seed)
    xyz = rng.uniform(-1, 1, (size, 3))
    queries = rng.uniform(-1.2, 1.2, (100, 3))
    if snap:
        # Integer lattices produce exact distance ties and duplicate points.
        xyz = np.round(xyz * 2)
        queries = np.round(queries * 4) / 2
    pts = [tuple(p) for p in xyz]
    index = NnIndex(PointCloud(xyz))
    idx, d2 = index.nearest_many(queries)
    for q, i, d in zip(queries, idx, d2):
        expected = oracles.nearest(pts, tuple(q))
        assert index.nearest(q) == expected
        assert (int(i), float(d)) == expected


def _dense_and_ranked(binner, edge, monkeypatch):
    dense = binner.representatives(edge), binner.count(edge)
    monkeypatch.setattr(spatial_index, "_DENSE_CELL_LIMIT", 0.0)
    ranked = binner.representatives(edge), binner.count(edge)
    monkeypatch.undo()
    return dense, ranked


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("edge", [0.05, 0.3, 1.7])
def test_binner_matches_oracle_on_both_layouts(seed, edge, monkeypatch):
    rng = np.random.default_rng(seed)
    xyz = rng.uniform(-1, 1, (400, 3))
    xyz[7::7] = xyz[6:-1:7]  # duplicates
    if seed % 2:
        xyz[:, 2] = 0.25  # flat
    pts = [tuple(p) for p in xyz]
    binner = GridBinner(np.ascontiguousarray(xyz.T))
    expected = oracles.cell_representatives(pts, edge)
    (dense, m1), (ranked, m2) = _dense_and_ranked(binner, edge, monkeypatch)
    assert dense.tolist() == expected
    assert ranked.tolist() == expected
    assert m1 == m2 == len(expected)


def test_binner_custom_origin():
    xyz = np.array([(0.1, 0.5, 0.5), (0.9, 0.5, 0.5), (1.2, 0.5, 0.5)])
    pts = [tuple(p) for p in xyz]
    origin = (0.0, 0.0, 0.0)
    binner = GridBinner(np.ascontiguousarray(xyz.T), origin=origin)
    assert binner.representatives(1.0).tolist() == oracles.cell_representatives(pts, 1.0, origin) == [0, 2]
    assert binner.count(1.0) == 2


def test_binner_rejects_bad_edges():
    binner = GridBinner(np.ascontiguousarray(np.eye(3)))
    with pytest.raises(ValueError):
        binner.count(0.0)
    with pytest.raises(ValueError):
        binner.count(1e-300)
