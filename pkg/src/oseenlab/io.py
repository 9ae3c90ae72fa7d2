"""Flat binary field container and CSV export.

Binary layout (all little-endian, in file order):

=========  ========  =======================================
offset     type      meaning
=========  ========  =======================================
0          int64     dim (2 or 3)
8          int64     N, points per axis
16         float64   L, the half_period length scale
24         int64     component count (1 scalar, dim vector)
32         float64   payload: ncomp * N**dim samples,
                     row-major (C order), component-major
=========  ========  =======================================

The dealias fraction is not serialized; loading accepts an optional value and
otherwise restores the default.
"""

from __future__ import annotations

import struct

import numpy as np

from .fields import GridSpec, ScalarField, VectorField

_HEADER = struct.Struct("<qqdq")


def save_field(path, field: ScalarField | VectorField) -> None:
    """Write a field to ``path`` in the flat binary container format."""
    grid = field.grid
    if isinstance(field, ScalarField):
        payload = field.values[None]
    elif isinstance(field, VectorField):
        payload = field.components
    else:
        raise TypeError(f"cannot serialize {type(field).__name__}")
    header = _HEADER.pack(
        grid.dim, grid.points_per_axis, grid.half_period, payload.shape[0]
    )
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(np.ascontiguousarray(payload, dtype="<f8").tobytes())


def load_field(
    path, dealias_fraction: float = 2.0 / 3.0
) -> ScalarField | VectorField:
    """Read a field written by :func:`save_field`."""
    with open(path, "rb") as handle:
        raw = handle.read(_HEADER.size)
        if len(raw) != _HEADER.size:
            raise ValueError(f"{path}: truncated header")
        dim, n, half_period, ncomp = _HEADER.unpack(raw)
        grid = GridSpec(
            dim=int(dim),
            half_period=float(half_period),
            points_per_axis=int(n),
            dealias_fraction=dealias_fraction,
        )
        if ncomp not in (1, grid.dim):
            raise ValueError(f"{path}: invalid component count {ncomp}")
        count = int(ncomp) * grid.points_per_axis ** grid.dim
        payload = np.frombuffer(handle.read(count * 8), dtype="<f8")
        if payload.size != count:
            raise ValueError(f"{path}: truncated payload")
    data = payload.reshape((int(ncomp),) + grid.shape).astype(np.float64)
    if ncomp == 1:
        return ScalarField(grid, data[0])
    return VectorField(grid, data)


def field_to_csv(path, field: ScalarField | VectorField, max_points: int = 65536) -> None:
    """Write grid indices, coordinates, and samples as CSV (small grids only)."""
    grid = field.grid
    total = grid.points_per_axis ** grid.dim
    if total > max_points:
        raise ValueError(
            f"grid has {total} points, above the CSV export cap {max_points}"
        )
    if isinstance(field, ScalarField):
        payload = field.values[None]
    else:
        payload = field.components
    ncomp = payload.shape[0]
    index_cols = [f"i{axis + 1}" for axis in range(grid.dim)]
    coord_cols = [f"x{axis + 1}" for axis in range(grid.dim)]
    value_cols = [f"c{comp + 1}" for comp in range(ncomp)]
    axis_range = np.arange(grid.points_per_axis)
    mesh = np.meshgrid(*([axis_range] * grid.dim), indexing="ij")
    with open(path, "w", newline="") as handle:
        handle.write(",".join(index_cols + coord_cols + value_cols) + "\n")
        flat_idx = [m.ravel() for m in mesh]
        flat_val = payload.reshape(ncomp, -1)
        for row in range(total):
            idx = [str(int(m[row])) for m in flat_idx]
            coords = [f"{int(m[row]) * grid.spacing:.17g}" for m in flat_idx]
            vals = [f"{flat_val[comp, row]:.17g}" for comp in range(ncomp)]
            handle.write(",".join(idx + coords + vals) + "\n")
