"""Steady and time-periodic drift solver behavior, penalized obstacles."""

from __future__ import annotations

import numpy as np
import pytest

from oseenlab.fields import (
    GridSpec,
    ScalarField,
    TimePeriodicField,
    VectorField,
    divergence,
    gradient,
)
from oseenlab.lifting import build_lifting, default_cutoff
from oseenlab.norms import lq_norm
from oseenlab.oseen import (
    ObstacleMask,
    OseenParams,
    PenalizedConvergenceError,
    StokesPair,
    ball_mask,
    contraction_rate_from_updates,
    leray_project,
    project_oscillatory,
    project_steady,
    residual,
    residual_timeperiodic,
    solve_exterior_penalized,
    solve_mode,
    solve_steady,
    solve_timeperiodic,
    wake_asymmetry,
)

from conftest import trig_scalar, trig_values, trig_vector


def _channel_forcing(grid: GridSpec) -> VectorField:
    """Divergence-free rightward stream modulated across the channel."""
    x = grid.coordinates()
    components = np.zeros((grid.dim,) + grid.shape)
    components[0] = np.sin(x[1] / grid.half_period) * np.ones(grid.shape)
    return VectorField(grid, components)


def _sine_e2_forcing(grid: GridSpec) -> VectorField:
    x = grid.coordinates()[0]
    components = np.zeros((grid.dim,) + grid.shape)
    components[1] = np.sin(x / grid.half_period) * np.ones(grid.shape)
    return VectorField(grid, components)


# ---------------------------------------------------------------------------
# projection


def test_leray_output_is_divergence_free(grid2, grid3):
    for grid, seed in ((grid2, 1), (grid3, 2)):
        field = trig_vector(grid, seed)
        projected = leray_project(field)
        scale = np.max(np.abs(projected.components)) + 1.0
        assert np.max(np.abs(divergence(projected).values)) <= 1e-12 * scale


def test_leray_is_idempotent_and_kills_gradients(grid2):
    field = trig_vector(grid2, 3)
    once = leray_project(field)
    twice = leray_project(once)
    assert np.max(np.abs(twice.components - once.components)) <= 1e-13
    grad = gradient(trig_scalar(grid2, 4))
    assert np.max(np.abs(leray_project(grad).components)) <= 1e-13


# ---------------------------------------------------------------------------
# steady solves


def test_parameter_validation(grid2):
    with pytest.raises(ValueError, match="lam"):
        OseenParams(-1.0)
    with pytest.raises(ValueError, match="lam"):
        OseenParams(20.0, lam_max=16.0)
    with pytest.raises(ValueError, match="dim"):
        solve_steady(trig_vector(grid2, 5), OseenParams(1.0, dim=3))


def test_gradient_forcing_goes_into_pressure(grid2):
    g = trig_scalar(grid2, 6)
    pair = solve_steady(gradient(g), OseenParams(0.7))
    assert np.max(np.abs(pair.velocity.components)) <= 1e-13
    centered = g.values - np.mean(g.values)
    assert np.max(np.abs(pair.pressure.values - centered)) <= 1e-12


def test_steady_single_harmonic_closed_form():
    # f = sin(x1) e2 on the 2-pi box: the solution is
    # u = (sin(x1) - lam cos(x1)) / (1 + lam^2) e2 with zero pressure.
    grid = GridSpec(2, 1.0, 32)
    f = _sine_e2_forcing(grid)
    lam = 0.8
    pair = solve_steady(f, OseenParams(lam))
    x = grid.coordinates()[0]
    expected = (np.sin(x) - lam * np.cos(x)) / (1.0 + lam**2) * np.ones(grid.shape)
    assert np.max(np.abs(pair.velocity.components[1] - expected)) <= 1e-12
    assert np.max(np.abs(pair.velocity.components[0])) <= 1e-14
    assert np.max(np.abs(pair.pressure.values)) <= 1e-14


def test_driftless_limit_matches_independent_spectral_solve(grid2):
    f = leray_project(trig_vector(grid2, 7))
    pair = solve_steady(f, OseenParams(0.0))
    # independent evaluation with numpy's FFT stack
    n = grid2.points_per_axis
    coeff = np.fft.fftn(f.components, axes=(1, 2)) / n**2
    m = np.fft.fftfreq(n) * n
    m[np.abs(m) == n // 2] = 0.0
    xi = [
        (m / grid2.half_period)[:, None],
        (m / grid2.half_period)[None, :],
    ]
    ksq = xi[0] ** 2 + xi[1] ** 2
    dotted = xi[0] * coeff[0] + xi[1] * coeff[1]
    mask = ksq > 0
    u_hat = np.zeros_like(coeff)
    for a in range(2):
        leray = coeff[a] - np.where(mask, xi[a] * dotted / np.where(mask, ksq, 1.0), 0.0)
        u_hat[a] = np.where(mask, leray / np.where(mask, ksq, 1.0), 0.0)
    expected = np.fft.ifftn(u_hat, axes=(1, 2)).real * n**2
    scale = np.max(np.abs(expected))
    assert np.max(np.abs(pair.velocity.components - expected)) <= 1e-10 * scale


def test_velocity_is_divergence_free_and_mean_free(grid3):
    pair = solve_steady(trig_vector(grid3, 8), OseenParams(1.3))
    scale = np.max(np.abs(pair.velocity.components)) + 1.0
    assert np.max(np.abs(divergence(pair.velocity).values)) <= 1e-12 * scale
    for comp in range(3):
        assert abs(np.mean(pair.velocity.components[comp])) <= 1e-13
    assert abs(np.mean(pair.pressure.values)) <= 1e-13


def test_solver_linearity(grid2):
    fa, fb = trig_vector(grid2, 9), trig_vector(grid2, 10)
    params = OseenParams(1.1)
    combo = solve_steady(fa * 2.0 + fb * (-0.5), params)
    pa, pb = solve_steady(fa, params), solve_steady(fb, params)
    expected = 2.0 * pa.velocity.components - 0.5 * pb.velocity.components
    scale = np.max(np.abs(expected)) + 1.0
    assert np.max(np.abs(combo.velocity.components - expected)) <= 1e-12 * scale


# ---------------------------------------------------------------------------
# time-frequency blocks


def test_zero_frequency_block_matches_steady_solver(grid2):
    f = trig_vector(grid2, 11)
    params = OseenParams(0.9)
    u_mode, p_mode = solve_mode(
        grid2, f.components.astype(np.complex128), 0, 2.0 * np.pi, params
    )
    pair = solve_steady(f, params)
    assert np.max(np.abs(u_mode - pair.velocity.components)) <= 1e-14
    assert np.max(np.abs(p_mode[0] - pair.pressure.values)) <= 1e-14
    assert np.max(np.abs(u_mode.imag)) <= 1e-15


def test_oscillating_spatial_mean_is_integrated_in_time(grid2):
    # A spatially constant forcing mode at frequency k has the exact
    # solution f / (i omega_k): pure time integration, no spatial coupling.
    period = 2.0
    k = 2
    omega = 2.0 * np.pi * k / period
    f_mode = np.zeros((2,) + grid2.shape, dtype=np.complex128)
    f_mode[0] = 1.5 + 0.25j
    u_mode, p_mode = solve_mode(grid2, f_mode, k, period, OseenParams(1.0))
    assert np.max(np.abs(u_mode[0] - (1.5 + 0.25j) / (1j * omega))) <= 1e-13
    assert np.max(np.abs(u_mode[1])) <= 1e-15
    assert np.max(np.abs(p_mode)) <= 1e-15


def test_timeperiodic_single_harmonic_closed_form():
    # f(t, x) = cos(omega t) sin(x1) e2 on the 2-pi box.  The k = 1 block
    # carries (1/2) sin(x1) e2, whose +-1 spatial coefficients divide by
    # 1 + i(lam xi1 + omega):
    #   u_hat(+1) = (-i/4) / (1 + i(lam + omega))
    #   u_hat(-1) = (+i/4) / (1 + i(omega - lam))
    grid = GridSpec(2, 1.0, 32)
    lam = 0.6
    period = 5.0
    omega = 2.0 * np.pi / period
    phi = _sine_e2_forcing(grid)
    forcing = TimePeriodicField.from_modes(
        grid,
        period,
        [
            np.zeros((2,) + grid.shape, dtype=np.complex128),
            0.5 * phi.components.astype(np.complex128),
        ],
    )
    velocity, pressure = solve_timeperiodic(forcing, OseenParams(lam))
    x = grid.coordinates()[0] * np.ones(grid.shape)
    up = (-0.25j) / (1.0 + 1j * (lam + omega))
    um = (0.25j) / (1.0 + 1j * (omega - lam))
    expected = up * np.exp(1j * x) + um * np.exp(-1j * x)
    produced = velocity.mode(1)[1]
    assert np.max(np.abs(produced - expected)) <= 1e-12
    assert np.max(np.abs(velocity.mode(1)[0])) <= 1e-14
    assert np.max(np.abs(pressure.mode(1))) <= 1e-14
    assert np.max(np.abs(velocity.mode(0))) <= 1e-14


def test_timeperiodic_single_harmonic_real_system_cross_check():
    # The same block solved as a hand-built 4x4 real system in the basis
    # (sin x1, cos x1) x (cos omega t, sin omega t) for the e2 component:
    # (Delta - lam d1 - d_t) u = -f couples the four coefficients linearly.
    grid = GridSpec(2, 1.0, 16)
    lam = 1.2
    period = 3.0
    omega = 2.0 * np.pi / period
    phi = _sine_e2_forcing(grid)
    forcing = TimePeriodicField.from_modes(
        grid,
        period,
        [
            np.zeros((2,) + grid.shape, dtype=np.complex128),
            0.5 * phi.components.astype(np.complex128),
        ],
    )
    velocity, _ = solve_timeperiodic(forcing, OseenParams(lam))
    matrix = np.array(
        [
            [1.0, omega, -lam, 0.0],
            [-omega, 1.0, 0.0, -lam],
            [lam, 0.0, 1.0, omega],
            [0.0, lam, -omega, 1.0],
        ]
    )
    p, q, r, s = np.linalg.solve(matrix, np.array([1.0, 0.0, 0.0, 0.0]))
    x = grid.coordinates()[0] * np.ones(grid.shape)
    samples = velocity.sample_times(8)
    times = np.arange(8) * (period / 8)
    for j, t in enumerate(times):
        expected = (p * np.sin(x) + r * np.cos(x)) * np.cos(omega * t) + (
            q * np.sin(x) + s * np.cos(x)
        ) * np.sin(omega * t)
        assert np.max(np.abs(samples[j, 1] - expected)) <= 1e-12


def test_time_constant_forcing_has_no_oscillation(grid2):
    steady = trig_vector(grid2, 12)
    forcing = TimePeriodicField.from_steady(steady, period=2.0, max_mode=2)
    velocity, pressure = solve_timeperiodic(forcing, OseenParams(0.8))
    osc = project_oscillatory(velocity)
    assert np.max(np.abs(osc.modes)) <= 1e-14
    pair = solve_steady(steady, OseenParams(0.8))
    steady_part = project_steady(velocity)
    assert np.max(
        np.abs(steady_part.components - pair.velocity.components)
    ) <= 1e-13


def test_timeperiodic_linearity_and_zero_mode_consistency(grid2):
    from oseenlab.harness import random_timeperiodic_forcing

    params = OseenParams(1.4)
    fa = random_timeperiodic_forcing(grid2, 2.0, 2, (21,))
    fb = random_timeperiodic_forcing(grid2, 2.0, 2, (22,))
    ua, _ = solve_timeperiodic(fa, params)
    ub, _ = solve_timeperiodic(fb, params)
    combo, _ = solve_timeperiodic(fa * 0.75 + fb * 2.0, params)
    expected = 0.75 * ua.modes + 2.0 * ub.modes
    scale = np.max(np.abs(expected)) + 1.0
    assert np.max(np.abs(combo.modes - expected)) <= 1e-12 * scale
    # k = 0 block of the stack equals the steady solve of the time average
    pair = solve_steady(project_steady(fa), params)
    assert np.max(
        np.abs(ua.mode(0).real - pair.velocity.components)
    ) <= 1e-13 * scale


def test_projection_split_identity(grid2):
    from oseenlab.harness import random_timeperiodic_forcing

    field = random_timeperiodic_forcing(grid2, 2.0, 2, (23,))
    steady = project_steady(field)
    osc = project_oscillatory(field)
    recombined = TimePeriodicField.from_steady(
        steady, field.period, field.max_mode
    ) + osc
    assert np.max(np.abs(recombined.modes - field.modes)) <= 1e-15
    assert np.max(np.abs(osc.mode(0))) == 0.0
    # the steady projection is the time-grid average
    samples = field.sample_times(4 * field.max_mode + 4)
    average = np.mean(samples, axis=0)
    assert np.max(np.abs(steady.components - average)) <= 1e-13


# ---------------------------------------------------------------------------
# saddle-system cross-check


def test_mode_solutions_satisfy_saddle_system():
    # Every retained coefficient of (u, p) must satisfy the dim+1 square
    # block system assembled independently: momentum rows plus divergence.
    grid = GridSpec(3, np.pi, 16)
    f = trig_vector(grid, 13)
    lam = 1.7
    period = 2.0
    for k in (0, 1):
        omega = 2.0 * np.pi * k / period
        u_mode, p_mode = solve_mode(
            grid, f.components.astype(np.complex128), k, period, OseenParams(lam)
        )
        n = grid.points_per_axis
        f_hat = np.fft.fftn(f.components, axes=(1, 2, 3)) / n**3
        u_hat = np.fft.fftn(u_mode, axes=(1, 2, 3)) / n**3
        p_hat = np.fft.fftn(p_mode[0]) / n**3
        m = np.rint(np.fft.fftfreq(n) * n).astype(int)
        cut = grid.dealias_cutoff
        worst = 0.0
        checked = 0
        for i1 in range(n):
            for i2 in range(n):
                for i3 in range(n):
                    mm = np.array([m[i1], m[i2], m[i3]])
                    if np.max(np.abs(mm)) > cut or not np.any(mm):
                        continue
                    xi = mm / grid.half_period
                    ksq = float(xi @ xi)
                    system = np.zeros((4, 4), dtype=np.complex128)
                    system[:3, :3] = (ksq + 1j * (lam * xi[0] + omega)) * np.eye(3)
                    system[:3, 3] = 1j * xi
                    system[3, :3] = 1j * xi
                    rhs = np.array(
                        [f_hat[0, i1, i2, i3], f_hat[1, i1, i2, i3], f_hat[2, i1, i2, i3], 0.0],
                        dtype=np.complex128,
                    )
                    solution = np.linalg.solve(system, rhs)
                    produced = np.array(
                        [
                            u_hat[0, i1, i2, i3],
                            u_hat[1, i1, i2, i3],
                            u_hat[2, i1, i2, i3],
                            p_hat[i1, i2, i3],
                        ]
                    )
                    worst = max(worst, float(np.max(np.abs(produced - solution))))
                    checked += 1
        assert checked > 1000
        assert worst <= 1e-12


# ---------------------------------------------------------------------------
# residuals


def test_residual_of_exact_solution_is_tiny():
    grid = GridSpec(2, np.pi, 64)
    f = _channel_forcing(grid)
    params = OseenParams(2.0)
    pair = solve_steady(f, params)
    momentum, div = residual(pair, f, params)
    assert momentum <= 1e-10 * lq_norm(f, 2.0)
    assert div <= 1e-12


def test_residual_of_zero_pair_with_zero_forcing(grid2):
    pair = StokesPair(VectorField.zeros(grid2), ScalarField.zeros(grid2))
    momentum, div = residual(pair, VectorField.zeros(grid2), OseenParams(1.0))
    assert momentum == 0.0
    assert div == 0.0


def test_residual_scales_linearly_with_perturbation():
    grid = GridSpec(2, np.pi, 64)
    f = _channel_forcing(grid)
    params = OseenParams(2.0)
    pair = solve_steady(f, params)
    noise = trig_vector(grid, 99)
    values = []
    for eps in (1e-6, 1e-5):
        bumped = StokesPair(
            VectorField(grid, pair.velocity.components + eps * noise.components),
            pair.pressure,
        )
        momentum, _ = residual(bumped, f, params)
        values.append(momentum)
    assert values[1] / values[0] == pytest.approx(10.0, rel=0.05)


def test_timeperiodic_residual_of_exact_solution(grid2):
    from oseenlab.harness import random_timeperiodic_forcing

    forcing = random_timeperiodic_forcing(grid2, 2.0, 2, (24,))
    params = OseenParams(1.5)
    velocity, pressure = solve_timeperiodic(forcing, params)
    momentum, div = residual_timeperiodic(velocity, pressure, forcing, params)
    assert momentum <= 1e-10 * lq_norm(forcing, 2.0)
    assert div <= 1e-12


# ---------------------------------------------------------------------------
# obstacle masks


def test_ball_mask_geometry():
    grid = GridSpec(2, np.pi, 64)
    mask = ball_mask(grid, 0.8, 0.5)
    assert not mask.is_empty
    assert mask.cell_count > 0
    # indicated cells really lie inside the ball around the box center
    idx = np.argwhere(mask.indicator > 0.5)
    x = grid.axis_coordinates()
    for i, j in idx:
        dist = np.hypot(x[i] - grid.center[0], x[j] - grid.center[1])
        assert dist <= 0.8 + 1e-12


def test_ball_mask_validation():
    grid = GridSpec(2, np.pi, 16)
    with pytest.raises(ValueError, match="radius"):
        ball_mask(grid, -1.0, 0.5)
    with pytest.raises(ValueError, match="boundary"):
        ball_mask(grid, 0.99 * np.pi**2, 0.5)
    with pytest.raises(ValueError, match="penalization"):
        ball_mask(grid, 0.5, 0.0)
    with pytest.raises(ValueError, match="0/1"):
        ObstacleMask(grid, np.full(grid.shape, 0.5), 1.0)


def test_empty_mask_reduces_to_plain_solve():
    grid = GridSpec(2, np.pi, 64)
    f = _channel_forcing(grid)
    h = grid.spacing
    center = tuple(c + 0.5 * h for c in grid.center)
    mask = ball_mask(grid, 0.4 * h, 1.0, center=center)
    assert mask.is_empty
    pair, report = solve_exterior_penalized(f, OseenParams(2.0), mask)
    plain = solve_steady(f, OseenParams(2.0))
    assert np.array_equal(pair.velocity.components, plain.velocity.components)
    assert report.iterations == 1
    assert report.converged


def test_penalization_strength_drains_obstacle_speed():
    # Stronger penalization (smaller eta) leaves less speed on the obstacle.
    grid = GridSpec(2, np.pi, 64)
    f = _channel_forcing(grid)
    speeds = []
    for eta in (1.0, 0.5, 0.25):
        mask = ball_mask(grid, 0.8, eta)
        _, report = solve_exterior_penalized(f, OseenParams(2.0), mask)
        assert report.converged
        speeds.append(report.obstacle_max_speed)
    assert speeds[0] > speeds[1] > speeds[2]
    free = np.max(np.abs(solve_steady(f, OseenParams(2.0)).velocity.magnitude()))
    assert speeds[2] < free


def test_penalized_iteration_reports_divergence():
    # Richardson iteration preconditioned by the free solve contracts only
    # for moderate penalization; eta = 1e-2 overdrives it.
    grid = GridSpec(2, np.pi, 64)
    f = _channel_forcing(grid)
    mask = ball_mask(grid, 0.8, 1e-2)
    with pytest.raises(PenalizedConvergenceError) as excinfo:
        solve_exterior_penalized(f, OseenParams(2.0), mask)
    report = excinfo.value.report
    assert not report.converged
    assert report.iterations >= 3


def test_penalized_zero_velocity_forcing_converges():
    # Pure-gradient forcing has zero velocity; the update test must settle
    # on the forcing scale instead of chasing round-off.
    grid = GridSpec(2, np.pi, 64)
    x = grid.coordinates()
    f = VectorField(
        grid,
        np.stack(
            [np.sin(x[0] / np.pi) * np.ones(grid.shape), np.zeros(grid.shape)]
        ),
    )
    pair, report = solve_exterior_penalized(f, OseenParams(0.0), ball_mask(grid, 0.8, 1.0))
    assert report.converged
    assert np.max(np.abs(pair.velocity.components)) <= 1e-12


def test_penalized_solve_is_deterministic():
    grid = GridSpec(2, np.pi, 64)
    f = _channel_forcing(grid)
    mask = ball_mask(grid, 0.8, 0.5)
    first, _ = solve_exterior_penalized(f, OseenParams(2.0), mask)
    second, _ = solve_exterior_penalized(f, OseenParams(2.0), mask)
    assert np.array_equal(first.velocity.components, second.velocity.components)
    assert np.array_equal(first.pressure.values, second.pressure.values)


# ---------------------------------------------------------------------------
# wake signature


def test_obstacle_flow_wake_asymmetry():
    # Flow past the obstacle, driven by the drift-flow lifting load: with
    # drift the speed field skews downstream; without drift there is no
    # preferred side.
    grid = GridSpec(2, np.pi, 64)
    spec = default_cutoff(grid)

    def total_flow(lam: float) -> VectorField:
        lift = build_lifting(lam, spec, grid)
        load = (
            -lift.laplacian_field().components
            + lam * lift.drift_derivative().components
        )
        f = VectorField(grid, -load)
        mask = ball_mask(grid, 0.5 * spec.inner_radius, 0.5)
        pair, report = solve_exterior_penalized(f, OseenParams(lam), mask)
        assert report.converged
        return VectorField(grid, pair.velocity.components + lift.velocity.components)

    assert abs(wake_asymmetry(total_flow(0.0))) <= 1e-12
    assert wake_asymmetry(total_flow(2.0)) > 0.05


def test_wake_asymmetry_sign_convention():
    grid = GridSpec(2, np.pi, 32)
    x = grid.coordinates()[0] * np.ones(grid.shape)
    center = grid.center[0]
    bump = np.exp(-((x - center - 2.0) ** 2))
    downstream = VectorField(grid, np.stack([bump, np.zeros(grid.shape)]))
    assert wake_asymmetry(downstream) > 0.5
    mirrored = VectorField(grid, downstream.components[:, ::-1, :])
    assert wake_asymmetry(mirrored) < -0.5
    with pytest.raises(ValueError, match="axis"):
        wake_asymmetry(downstream, axis=3)


# ---------------------------------------------------------------------------
# iteration reporting


def test_contraction_rate_from_updates():
    assert np.isnan(contraction_rate_from_updates(()))
    assert np.isnan(contraction_rate_from_updates((0.5,)))
    assert contraction_rate_from_updates((1.0, 0.5, 0.2)) == pytest.approx(0.5)
    assert contraction_rate_from_updates((1.0, 0.25, 0.2)) == pytest.approx(0.8)


def test_solve_report_csv(tmp_path):
    grid = GridSpec(2, np.pi, 64)
    f = _channel_forcing(grid)
    _, report = solve_exterior_penalized(f, OseenParams(2.0), ball_mask(grid, 0.8, 0.5))
    path = tmp_path / "report.csv"
    report.to_csv(path)
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "lambda,grid_n,residual_momentum,residual_div,iterations,wall_time_seconds"
    values = lines[1].split(",")
    assert float(values[0]) == 2.0
    assert int(values[1]) == 64
    assert int(values[4]) == report.iterations
