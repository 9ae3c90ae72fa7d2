"""Linear flow solvers: steady drift solve, per-frequency and time-periodic
solves, steady/oscillatory projections, and a penalized-obstacle solve.

Every solve works coefficientwise on the shared zeroed-Nyquist wavenumbers,
so applying the differential operator to a solution reproduces the forcing
exactly on the modes the solver touched.  Modes with vanishing derivative
multipliers (the box mean and pure Nyquist combinations) carry no velocity
or pressure in steady solves; this stands in for decay at infinity.  At a
nonzero time frequency those modes are pure time integration and keep the
forcing divided by the frequency factor.  Pressure is normalized to zero
box mean.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .fields import (
    GridSpec,
    ScalarField,
    TimePeriodicField,
    VectorField,
    _fftn,
    _ifftn,
    _lock,
)


@dataclass(frozen=True)
class OseenParams:
    """Drift parameters shared by the linear solves.

    ``lam`` is the coefficient of the unidirectional transport term along
    axis 1 (the translation speed of the frame); ``lam_max`` is the
    admissible ceiling.  ``lam = 0`` is accepted and gives the driftless
    (Stokes) limit.
    """

    lam: float
    lam_max: float = 16.0
    dim: int | None = None

    def __post_init__(self) -> None:
        if not self.lam_max > 0:
            raise ValueError(f"lam_max must be positive, got {self.lam_max}")
        if not 0.0 <= self.lam <= self.lam_max:
            raise ValueError(
                f"lam must lie in [0, {self.lam_max}], got {self.lam}"
            )
        if self.dim is not None and self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")


def _check_params(grid: GridSpec, params: OseenParams) -> None:
    if params.dim is not None and params.dim != grid.dim:
        raise ValueError(
            f"params declare dim {params.dim} but the grid has dim {grid.dim}"
        )


@dataclass(frozen=True)
class StokesPair:
    """A velocity/pressure solution pair on one grid."""

    velocity: VectorField
    pressure: ScalarField

    def __post_init__(self) -> None:
        if self.velocity.grid != self.pressure.grid:
            raise ValueError("velocity and pressure live on different grids")

    @property
    def grid(self) -> GridSpec:
        return self.velocity.grid


def _apply_leray(grid: GridSpec, coeff: np.ndarray) -> np.ndarray:
    """Divergence-free projection of (dim, ...) coefficients.

    Modes with vanishing wavenumber (mean, pure Nyquist) pass through
    unchanged.
    """
    safe = np.where(grid.ksq > 0, grid.ksq, 1.0)
    dotted = np.zeros(grid.shape, dtype=np.complex128)
    for axis in range(grid.dim):
        dotted = dotted + grid.wavenumber(axis) * coeff[axis]
    dotted = np.where(grid.ksq > 0, dotted / safe, 0.0)
    out = np.empty_like(coeff)
    for axis in range(grid.dim):
        out[axis] = coeff[axis] - grid.wavenumber(axis) * dotted
    return out


def leray_project(field: VectorField) -> VectorField:
    """Project a vector field onto its divergence-free part."""
    coeff = _fftn(field.components, field.grid.dim)
    return VectorField(
        field.grid, _ifftn(_apply_leray(field.grid, coeff), field.grid.dim).real
    )


def _mode_solution_coeff(
    grid: GridSpec, coeff: np.ndarray, lam: float, omega: float
) -> tuple[np.ndarray, np.ndarray]:
    """Velocity and pressure coefficients for one time frequency.

    The velocity symbol is |xi|^2 + i(lam*xi_1 + omega) on the projected
    forcing; pressure comes from the forcing divergence.  Zero-symbol modes
    get zero velocity when omega = 0 and forcing/(i*omega) otherwise.
    """
    ksq = grid.ksq
    active = ksq > 0
    safe = np.where(active, ksq, 1.0)
    denom = np.where(active, ksq + 1j * (lam * grid.wavenumber(0) + omega), 1.0)
    u_coeff = np.where(active, _apply_leray(grid, coeff) / denom, 0.0)
    if omega != 0.0:
        u_coeff = np.where(active, u_coeff, coeff / (1j * omega))
    dotted = np.zeros(grid.shape, dtype=np.complex128)
    for axis in range(grid.dim):
        dotted = dotted + grid.wavenumber(axis) * coeff[axis]
    p_coeff = np.where(active, -1j * dotted / safe, 0.0)
    return u_coeff, p_coeff


def solve_steady(f: VectorField, params: OseenParams) -> StokesPair:
    """Solve the steady drift system for velocity and pressure.

    Gradient parts of the forcing go entirely into the pressure, so the
    velocity depends only on the divergence-free part of ``f``.
    """
    grid = f.grid
    _check_params(grid, params)
    coeff = _fftn(f.components, grid.dim)
    u_coeff, p_coeff = _mode_solution_coeff(grid, coeff, params.lam, 0.0)
    velocity = VectorField(grid, _ifftn(u_coeff, grid.dim).real)
    pressure = ScalarField(grid, _ifftn(p_coeff[None], grid.dim).real[0])
    return StokesPair(velocity, pressure)


def solve_mode(
    grid: GridSpec,
    f_mode: np.ndarray,
    k: int,
    period: float,
    params: OseenParams,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve one time-frequency block; returns complex physical-space modes.

    ``f_mode`` is the complex spatial sample array of the k-th time mode,
    shape (dim,) + grid.shape.  The returned pressure mode has the stack
    layout (1,) + grid.shape.  k = 0 reproduces :func:`solve_steady`.
    """
    _check_params(grid, params)
    if not period > 0:
        raise ValueError(f"period must be positive, got {period}")
    f_mode = np.ascontiguousarray(f_mode, dtype=np.complex128)
    expected = (grid.dim,) + grid.shape
    if f_mode.shape != expected:
        raise ValueError(f"f_mode has shape {f_mode.shape}, expected {expected}")
    omega = 2.0 * np.pi * k / period
    coeff = _fftn(f_mode, grid.dim)
    u_coeff, p_coeff = _mode_solution_coeff(grid, coeff, params.lam, omega)
    return _ifftn(u_coeff, grid.dim), _ifftn(p_coeff[None], grid.dim)


def solve_timeperiodic(
    forcing: TimePeriodicField, params: OseenParams
) -> tuple[TimePeriodicField, TimePeriodicField]:
    """Solve mode-by-mode; returns time-periodic velocity and pressure.

    Negative frequencies are filled with the exact conjugates of the
    nonnegative ones, so the output stacks are real signals by construction.
    """
    grid = forcing.grid
    if forcing.ncomp != grid.dim:
        raise ValueError("forcing must be a vector-valued time-periodic field")
    u_modes = []
    p_modes = []
    for k in range(forcing.max_mode + 1):
        u_k, p_k = solve_mode(grid, forcing.mode(k), k, forcing.period, params)
        if k == 0:
            # The zero-frequency problem with real data has a real solution;
            # drop the imaginary roundoff so the stack is exactly real there.
            u_k = u_k.real.astype(np.complex128)
            p_k = p_k.real.astype(np.complex128)
        u_modes.append(u_k)
        p_modes.append(p_k)
    velocity = TimePeriodicField.from_modes(grid, forcing.period, u_modes)
    pressure = TimePeriodicField.from_modes(grid, forcing.period, p_modes)
    return velocity, pressure


def project_steady(field: TimePeriodicField) -> ScalarField | VectorField:
    """Time average over one period: the k = 0 mode as a real field."""
    return field.steady_part()


def project_oscillatory(field: TimePeriodicField) -> TimePeriodicField:
    """The zero-time-average complement; its k = 0 mode is exactly zero."""
    modes = field.modes.copy()
    modes[field.max_mode] = 0.0
    return TimePeriodicField(field.grid, field.period, modes)


@dataclass(frozen=True)
class ObstacleMask:
    """0/1 indicator of a compact obstacle plus its penalization strength.

    The indicator must leave a clearance of at least two cells at every box
    face so the obstacle is compactly contained in the periodic cell.
    """

    grid: GridSpec
    indicator: np.ndarray
    penalization: float

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.indicator, dtype=np.float64)
        if arr.shape != self.grid.shape:
            raise ValueError(
                f"indicator has shape {arr.shape}, expected {self.grid.shape}"
            )
        if not np.all((arr == 0.0) | (arr == 1.0)):
            raise ValueError("indicator must be a 0/1 array")
        if not self.penalization > 0:
            raise ValueError(
                f"penalization must be positive, got {self.penalization}"
            )
        n = self.grid.points_per_axis
        for axis in range(self.grid.dim):
            edge = np.take(arr, [0, 1, n - 2, n - 1], axis=axis)
            if np.any(edge != 0.0):
                raise ValueError(
                    "obstacle touches the two-cell boundary layer of the box"
                )
        object.__setattr__(self, "indicator", _lock(arr))

    @property
    def is_empty(self) -> bool:
        return not bool(np.any(self.indicator))

    @property
    def cell_count(self) -> int:
        return int(np.sum(self.indicator))


def ball_mask(
    grid: GridSpec, radius: float, penalization: float, center=None
) -> ObstacleMask:
    """Indicator of the ball of given radius, centered in the box by default."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if center is None:
        center = grid.center
    dist_sq = np.zeros(grid.shape)
    for axis, x in enumerate(grid.coordinates()):
        dist_sq = dist_sq + (x - center[axis]) ** 2
    indicator = (dist_sq <= radius * radius).astype(np.float64)
    return ObstacleMask(grid, indicator, penalization)


@dataclass(frozen=True)
class SolveReport:
    """Iteration record shared by the penalized and fixed-point drivers.

    ``iterates`` holds the update norms per iteration; ``contraction_rate``
    is the maximum consecutive-update ratio after the second update,
    NaN when fewer than three updates exist.
    """

    lam: float
    grid_points: int
    iterates: tuple[float, ...]
    contraction_rate: float
    final_residual: float
    converged: bool
    residual_momentum: float
    residual_div: float
    wall_time_seconds: float
    obstacle_max_speed: float | None = None

    @property
    def iterations(self) -> int:
        return len(self.iterates)

    def to_csv(self, path) -> None:
        columns = (
            ("lambda", self.lam),
            ("grid_n", self.grid_points),
            ("residual_momentum", self.residual_momentum),
            ("residual_div", self.residual_div),
            ("iterations", self.iterations),
            ("wall_time_seconds", self.wall_time_seconds),
        )
        header = ",".join(name for name, _ in columns)
        row = ",".join(_format_csv_value(value) for _, value in columns)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(header + "\n" + row + "\n")


def _format_csv_value(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def contraction_rate_from_updates(updates) -> float:
    """Max ratio of consecutive update norms.

    Every consecutive ratio is a genuine contraction quotient of the
    fixed-point map (the first update alone is not, being tied to the choice
    of initial iterate, so no ratio uses it as anything but a denominator).
    The first ratio exists once the second iteration has produced its
    update; with fewer than two updates the rate is NaN.
    """
    if len(updates) < 2:
        return float("nan")
    ratios = [
        updates[m + 1] / updates[m]
        for m in range(len(updates) - 1)
        if updates[m] > 0
    ]
    return max(ratios) if ratios else float("nan")


class PenalizedConvergenceError(RuntimeError):
    """Penalized iteration failed to converge; carries the partial report."""

    def __init__(self, message: str, report: SolveReport) -> None:
        super().__init__(message)
        self.report = report


def _l2_of_components(grid: GridSpec, components: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.sum(components * components, axis=0)) * grid.volume))


def solve_exterior_penalized(
    f: VectorField,
    params: OseenParams,
    mask: ObstacleMask,
    tol: float = 1e-10,
    max_iter: int = 200,
    initial: VectorField | None = None,
) -> tuple[StokesPair, SolveReport]:
    """Drift solve with an obstacle enforced by volume penalization.

    Richardson iteration preconditioned by the unobstructed solve:
    u ← solve(f - indicator * u / penalization).  The obstacle drains
    momentum, so the converged velocity is small inside it; the maximum
    speed on the obstacle is reported, not asserted.  Raises
    :class:`PenalizedConvergenceError` when updates grow three times in a
    row or ``max_iter`` is exhausted.
    """
    grid = f.grid
    _check_params(grid, params)
    if mask.grid != grid:
        raise ValueError("mask and forcing live on different grids")
    if initial is not None and initial.grid != grid:
        raise ValueError("initial iterate lives on a different grid")
    start = time.perf_counter()
    inv_eta = 1.0 / mask.penalization
    u = initial if initial is not None else solve_steady(f, params).velocity
    updates: list[float] = []
    grow_streak = 0
    converged = False
    pair = StokesPair(u, ScalarField.zeros(grid))
    # The update test is relative to the larger of the velocity scale and
    # the forcing scale: a forcing whose solution is (numerically) zero must
    # still converge instead of chasing round-off noise.
    f_scale = _l2_of_components(grid, f.components)
    for _ in range(max_iter):
        forcing = VectorField(
            grid, f.components - inv_eta * mask.indicator * u.components
        )
        pair = solve_steady(forcing, params)
        delta = _l2_of_components(grid, pair.velocity.components - u.components)
        scale = _l2_of_components(grid, pair.velocity.components)
        updates.append(delta)
        if len(updates) >= 2 and updates[-2] > 0 and delta >= updates[-2]:
            grow_streak += 1
        else:
            grow_streak = 0
        u = pair.velocity
        if delta <= tol * max(scale, f_scale, 1e-300):
            converged = True
            break
        if grow_streak >= 3:
            break
    effective = VectorField(
        grid, f.components - inv_eta * mask.indicator * u.components
    )
    res_mom, res_div = residual(pair, effective, params)
    speed = pair.velocity.magnitude()
    on_obstacle = speed[mask.indicator > 0.5]
    report = SolveReport(
        lam=params.lam,
        grid_points=grid.points_per_axis,
        iterates=tuple(updates),
        contraction_rate=contraction_rate_from_updates(updates),
        final_residual=updates[-1] if updates else 0.0,
        converged=converged,
        residual_momentum=res_mom,
        residual_div=res_div,
        wall_time_seconds=time.perf_counter() - start,
        obstacle_max_speed=float(np.max(on_obstacle)) if on_obstacle.size else 0.0,
    )
    if not converged:
        reason = "updates grew three times in a row" if grow_streak >= 3 else (
            f"no convergence within {max_iter} iterations"
        )
        raise PenalizedConvergenceError(
            f"penalized iteration failed: {reason}; "
            f"final update {report.final_residual:.3e}",
            report,
        )
    return pair, report


def residual(
    pair: StokesPair, f: VectorField, params: OseenParams
) -> tuple[float, float]:
    """L^2 norms of the momentum defect and of div(velocity).

    The defect is measured against the mean-free part of ``f``: the solvers
    pin the box mean of velocity and pressure to zero, so a forcing mean is
    unreachable by construction.
    """
    grid = pair.velocity.grid
    _check_params(grid, params)
    if f.grid != grid:
        raise ValueError("forcing lives on a different grid")
    u_coeff = _fftn(pair.velocity.components, grid.dim)
    p_coeff = _fftn(pair.pressure.values[None], grid.dim)[0]
    f_coeff = _fftn(f.components, grid.dim)
    zero = (slice(None),) + (0,) * grid.dim
    f_coeff[zero] = 0.0
    symbol = grid.ksq + 1j * params.lam * grid.wavenumber(0)
    momentum = symbol * u_coeff - f_coeff
    div = np.zeros(grid.shape, dtype=np.complex128)
    for axis in range(grid.dim):
        xi = grid.wavenumber(axis)
        momentum[axis] = momentum[axis] + 1j * xi * p_coeff
        div = div + 1j * xi * u_coeff[axis]
    mom_norm = float(np.sqrt(np.sum(np.abs(momentum) ** 2) * grid.volume))
    div_norm = float(np.sqrt(np.sum(np.abs(div) ** 2) * grid.volume))
    return mom_norm, div_norm


def residual_timeperiodic(
    velocity: TimePeriodicField,
    pressure: TimePeriodicField,
    forcing: TimePeriodicField,
    params: OseenParams,
) -> tuple[float, float]:
    """Space-time L^2 residual norms of the time-periodic system.

    Parseval in time reduces the period-averaged space-time L^2 norm to a
    sum over frequency blocks, evaluated coefficientwise per block.
    """
    grid = velocity.grid
    _check_params(grid, params)
    if pressure.ncomp != 1:
        raise ValueError("pressure stack must be scalar-valued")
    mom_total = 0.0
    div_total = 0.0
    for k in range(-velocity.max_mode, velocity.max_mode + 1):
        u_coeff = _fftn(velocity.mode(k), grid.dim)
        p_coeff = _fftn(pressure.mode(k), grid.dim)[0]
        f_coeff = _fftn(forcing.mode(k), grid.dim)
        if k == 0:
            zero = (slice(None),) + (0,) * grid.dim
            f_coeff[zero] = 0.0
        omega = velocity.omega(k)
        symbol = grid.ksq + 1j * (params.lam * grid.wavenumber(0) + omega)
        momentum = symbol * u_coeff - f_coeff
        div = np.zeros(grid.shape, dtype=np.complex128)
        for axis in range(grid.dim):
            xi = grid.wavenumber(axis)
            momentum[axis] = momentum[axis] + 1j * xi * p_coeff
            div = div + 1j * xi * u_coeff[axis]
        mom_total += float(np.sum(np.abs(momentum) ** 2))
        div_total += float(np.sum(np.abs(div) ** 2))
    vol = grid.volume
    return float(np.sqrt(mom_total * vol)), float(np.sqrt(div_total * vol))


def wake_asymmetry(velocity: VectorField, axis: int = 1) -> float:
    """Mirror-asymmetry of the speed field about the box center along ``axis``.

    Sums |u| over the downstream and upstream half-slabs (excluding the two
    mirror-fixed planes) and returns (down - up) / (down + up); exactly
    mirror-symmetric fields give zero up to round-off.  ``axis`` is 1-based.
    """
    grid = velocity.grid
    if not 1 <= axis <= grid.dim:
        raise ValueError(f"axis must lie in 1..{grid.dim}, got {axis}")
    speed = velocity.magnitude()
    n = grid.points_per_axis
    half = n // 2
    down = float(np.sum(np.take(speed, range(half + 1, n), axis=axis - 1)))
    up = float(np.sum(np.take(speed, range(1, half), axis=axis - 1)))
    total = down + up
    return (down - up) / total if total > 0 else 0.0
