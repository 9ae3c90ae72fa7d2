"""Binary field container round trips and CSV export."""

from __future__ import annotations

import csv

import numpy as np
import pytest

from oseenlab.fields import GridSpec, ScalarField, VectorField
from oseenlab.io import field_to_csv, load_field, save_field

from conftest import trig_scalar, trig_vector


def test_scalar_round_trip_is_bit_exact(tmp_path, grid2):
    field = trig_scalar(grid2, 1)
    path = tmp_path / "scalar.field"
    save_field(path, field)
    back = load_field(path)
    assert isinstance(back, ScalarField)
    assert back.grid == grid2
    assert np.array_equal(back.values, field.values)


def test_vector_round_trip_is_bit_exact(tmp_path, grid3):
    field = trig_vector(grid3, 2)
    path = tmp_path / "vector.field"
    save_field(path, field)
    back = load_field(path)
    assert isinstance(back, VectorField)
    assert back.grid == grid3
    assert np.array_equal(back.components, field.components)


def test_header_preserves_grid_metadata(tmp_path):
    grid = GridSpec(2, 2.75, 12)
    field = trig_scalar(grid, 3)
    path = tmp_path / "meta.field"
    save_field(path, field)
    back = load_field(path)
    assert back.grid.dim == 2
    assert back.grid.points_per_axis == 12
    assert back.grid.half_period == 2.75


def test_load_respects_requested_dealias_fraction(tmp_path, grid2):
    path = tmp_path / "frac.field"
    save_field(path, trig_scalar(grid2, 4))
    back = load_field(path, dealias_fraction=0.5)
    assert back.grid.dealias_fraction == 0.5


def test_truncated_header_raises(tmp_path):
    path = tmp_path / "short.field"
    path.write_bytes(b"\x02\x00\x00")
    with pytest.raises(ValueError, match="truncated header"):
        load_field(path)


def test_truncated_payload_raises(tmp_path, grid2):
    path = tmp_path / "chopped.field"
    save_field(path, trig_scalar(grid2, 5))
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 16])
    with pytest.raises(ValueError, match="truncated payload"):
        load_field(path)


def test_bad_component_count_raises(tmp_path, grid2):
    import struct

    path = tmp_path / "badcomp.field"
    header = struct.pack("<qqdq", 2, grid2.points_per_axis, grid2.half_period, 5)
    path.write_bytes(header + b"\x00" * 64)
    with pytest.raises(ValueError, match="component count"):
        load_field(path)


def test_field_to_csv_is_parseable(tmp_path):
    grid = GridSpec(2, 1.0, 4)
    field = trig_vector(grid, 6)
    path = tmp_path / "field.csv"
    field_to_csv(path, field)
    with open(path, newline="") as handle:
        rows = list(csv.DictReader(handle))
    assert len(rows) == 16
    assert set(rows[0]) == {"i1", "i2", "x1", "x2", "c1", "c2"}
    probe = rows[5]
    i1, i2 = int(probe["i1"]), int(probe["i2"])
    assert float(probe["x1"]) == pytest.approx(i1 * grid.spacing)
    assert float(probe["c1"]) == field.components[0, i1, i2]
    assert float(probe["c2"]) == field.components[1, i1, i2]


def test_field_to_csv_rejects_large_grids(tmp_path):
    grid = GridSpec(3, 1.0, 64)
    field = VectorField.zeros(grid)
    with pytest.raises(ValueError, match="cap"):
        field_to_csv(tmp_path / "big.csv", field)
