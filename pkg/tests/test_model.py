import numpy as np
import pytest

from ndsculpt.config import EngineConfig
from ndsculpt.errors import ParseError, ValidationError
from ndsculpt.model import (Dataset, DimensionSpec, create_default_dataset,
                            export_dataset, import_dataset, reorder_dimension,
                            replace_cluster_points, set_dimension_range)
from ndsculpt.rng import RngHandle


def small_dataset():
    dims = (DimensionSpec("x1", 0.0, 10.0, 0),
            DimensionSpec("x2", 0.0, 10.0, 1),
            DimensionSpec("x3", 0.0, 10.0, 2))
    pts = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    return Dataset(dims, pts, np.array([0, 1]))


class TestDefaultDataset:
    def test_shape_and_range(self):
        ds = create_default_dataset(RngHandle(7))
        assert ds.points.shape == (500, 7)
        assert ds.points.min() >= -10.0 and ds.points.max() <= 10.0
        assert ds.n_clusters == 1
        assert [d.name for d in ds.dims] == [f"x{i}" for i in range(1, 8)]

    def test_uniform_moments(self):
        # mean of U(-10, 10) is 0 with sigma = 20/sqrt(12)
        ds = create_default_dataset(RngHandle(7))
        tol = 3.0 * (20.0 / np.sqrt(12.0)) / np.sqrt(500.0)
        assert np.abs(ds.points.mean(axis=0)).max() < tol

    def test_deterministic(self):
        a = create_default_dataset(RngHandle(123))
        b = create_default_dataset(RngHandle(123))
        assert np.array_equal(a.points, b.points)

    def test_seed_changes_data(self):
        a = create_default_dataset(RngHandle(1))
        b = create_default_dataset(RngHandle(2))
        assert not np.array_equal(a.points, b.points)


class TestImportExport:
    def test_minimal_import(self):
        ds = import_dataset("a b\n1 2\n")
        assert ds.n_points == 1 and ds.n_dims == 2
        assert [d.name for d in ds.dims] == ["a", "b"]
        assert ds.cluster_of.tolist() == [0]

    def test_minimal_export(self):
        dims = (DimensionSpec("x1", 0.0, 2.0, 0), DimensionSpec("x2", 0.0, 3.0, 1))
        ds = Dataset(dims, np.array([[1.0, 2.0]]), np.array([0]))
        assert export_dataset(ds) == "x1 x2 cluster\n1 2 0\n"

    def test_import_export_identity_on_canonical(self):
        text = export_dataset(small_dataset())
        assert export_dataset(import_dataset(text)) == text

    def test_export_import_coordinate_exact(self):
        ds = create_default_dataset(RngHandle(3))
        again = import_dataset(export_dataset(ds))
        assert np.array_equal(again.points, ds.points)
        assert np.array_equal(again.cluster_of, ds.cluster_of)

    def test_default_dataset_minmax_roundtrip(self):
        ds = create_default_dataset(RngHandle(4))
        again = import_dataset(export_dataset(ds))
        assert np.array_equal(again.points.min(axis=0), ds.points.min(axis=0))
        assert np.array_equal(again.points.max(axis=0), ds.points.max(axis=0))

    def test_import_bounds_from_extremes(self):
        ds = import_dataset("a b\n1 10\n5 -2\n")
        assert (ds.dims[0].min, ds.dims[0].max) == (1.0, 5.0)
        assert (ds.dims[1].min, ds.dims[1].max) == (-2.0, 10.0)

    def test_constant_column_padded(self):
        ds = import_dataset("a b\n3 1\n3 2\n")
        assert ds.dims[0].min < 3.0 < ds.dims[0].max

    def test_cluster_column(self):
        ds = import_dataset("a b cluster\n1 2 0\n3 4 1\n")
        assert ds.cluster_of.tolist() == [0, 1]
        assert ds.n_dims == 2

    def test_ragged_row_reports_line(self):
        with pytest.raises(ParseError, match="line 3"):
            import_dataset("a b\n1 2\n1 2 3\n")

    def test_non_numeric_reports_line(self):
        with pytest.raises(ParseError, match="line 2"):
            import_dataset("a b\n1 oops\n")

    def test_empty_file(self):
        with pytest.raises(ParseError):
            import_dataset("")

    def test_header_only(self):
        with pytest.raises(ParseError):
            import_dataset("a b\n")

    def test_housing_shaped_file(self):
        # same shape as the classic housing table: 506 rows x 14 columns
        rng = np.random.default_rng(0)
        rows = rng.uniform(0, 100, size=(506, 14))
        names = "crim zn indus chas nox rm age dis rad tax ptratio b lstat medv"
        text = names + "\n" + "\n".join(
            " ".join(f"{v:.4f}" for v in row) for row in rows) + "\n"
        ds = import_dataset(text)
        assert ds.n_points == 506 and ds.n_dims == 14

    def test_cluster_cap_enforced(self):
        rows = "\n".join(f"{i} {i} {i}" for i in range(11))
        text = "a b cluster\n" + rows + "\n"
        with pytest.raises(ValidationError, match="cap"):
            import_dataset(text)
        bigger = import_dataset(text, EngineConfig(cluster_cap=11))
        assert bigger.n_clusters == 11


class TestReorder:
    def test_identity_move(self):
        ds = small_dataset()
        out, perm = reorder_dimension(ds, 0, 0)
        assert np.array_equal(out.points, ds.points)
        assert perm.tolist() == [0, 1, 2]

    def test_swap_first_two(self):
        out, perm = reorder_dimension(small_dataset(), 0, 1)
        assert out.points[0].tolist() == [2.0, 1.0, 3.0]
        assert [d.name for d in out.dims] == ["x2", "x1", "x3"]
        assert perm.tolist() == [1, 0, 2]

    def test_move_far(self):
        out, perm = reorder_dimension(small_dataset(), 0, 2)
        assert out.points[0].tolist() == [2.0, 3.0, 1.0]
        assert perm.tolist() == [2, 0, 1]

    def test_point_multiset_invariant(self):
        ds = create_default_dataset(RngHandle(5))
        out, _ = reorder_dimension(ds, 2, 5)
        assert np.allclose(np.sort(out.points, axis=1), np.sort(ds.points, axis=1))

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            reorder_dimension(small_dataset(), 0, 9)

    def test_indices_stay_consistent(self):
        out, _ = reorder_dimension(small_dataset(), 2, 0)
        assert [d.index for d in out.dims] == [0, 1, 2]


class TestSetRange:
    def test_reverse_axis_keeps_values(self):
        ds = small_dataset()
        out = set_dimension_range(ds, 0, 10.0, 0.0)
        assert np.array_equal(out.points, ds.points)
        assert (out.dims[0].min, out.dims[0].max) == (10.0, 0.0)

    def test_noop(self):
        ds = small_dataset()
        out = set_dimension_range(ds, 1, 0.0, 10.0)
        assert out.dims == ds.dims

    def test_equal_bounds_rejected(self):
        with pytest.raises(ValidationError):
            set_dimension_range(small_dataset(), 0, 5.0, 5.0)


class TestInvariants:
    def test_unique_names_required(self):
        dims = (DimensionSpec("a", 0, 1, 0), DimensionSpec("a", 0, 1, 1))
        with pytest.raises(ValidationError):
            Dataset(dims, np.zeros((1, 2)), np.zeros(1, dtype=int))

    def test_points_are_read_only(self):
        ds = small_dataset()
        with pytest.raises(ValueError):
            ds.points[0, 0] = 99.0

    def test_replace_cluster_points_preserves_others(self):
        ds = small_dataset()
        out = replace_cluster_points(ds, 1, np.array([[7.0, 8.0, 9.0]] * 3))
        assert np.array_equal(out.points[out.cluster_of == 0],
                              ds.points[ds.cluster_of == 0])
        assert (out.cluster_of == 1).sum() == 3
