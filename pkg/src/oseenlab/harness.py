"""Experiment drivers: deterministic sweeps, fitted constants, and reports.

Each runner consumes an :class:`ExperimentConfig`, performs a fully
deterministic sweep, and returns a :class:`ScalingResult` carrying the data
table, least-squares log-log slopes, fitted constants, and pass/fail check
records.  Randomness is confined to seeded generators whose draws attach to
spectral mode indices, so a seed reproduces the same continuum fields on any
grid fine enough to hold them.  Sweeps run sequentially on purpose: the
reports are meant to be byte-for-byte reproducible, and parallelism lives
inside the FFTs instead.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .exponents import (
    PROBLEM_TP,
    ExponentProfile,
    admissibility,
    exponents_Mdelta,
    gamma_interval,
    s_exponent,
    theta_exponent,
)
from .fields import (
    GridSpec,
    ScalarField,
    SpectralField,
    TimePeriodicField,
    VectorField,
    derivative,
    from_spectral,
    gradient,
)
from .lifting import CutoffSpec, build_lifting, default_cutoff, lifting_load
from .nonlinear import convective_product
from .norms import (
    lambda_norm,
    lq_norm,
    maxreg_norm,
    negative_norm_surrogate,
    sobolev_full_norm,
    sobolev_seminorm,
    spacetime_l2_plancherel,
)
from .oseen import (
    OseenParams,
    project_oscillatory,
    project_steady,
    solve_steady,
    solve_timeperiodic,
)
from .picard import (
    PicardConfig,
    driver_norm_timeperiodic,
    picard_steady,
    picard_timeperiodic,
    radius_schedule,
)

EXPERIMENT_MMS = "mms"
EXPERIMENT_SCALING_STEADY = "scaling-steady"
EXPERIMENT_SCALING_TP = "scaling-tp"
EXPERIMENT_BILINEAR = "bilinear"
EXPERIMENT_PICARD_STEADY = "picard-steady"
EXPERIMENT_PICARD_TP = "picard-tp"
EXPERIMENT_LIFTING = "lifting-check"

EXPERIMENTS = (
    EXPERIMENT_MMS,
    EXPERIMENT_SCALING_STEADY,
    EXPERIMENT_SCALING_TP,
    EXPERIMENT_BILINEAR,
    EXPERIMENT_PICARD_STEADY,
    EXPERIMENT_PICARD_TP,
    EXPERIMENT_LIFTING,
)

# Experiments that solve on the box at sweep drifts need the wake scale c/lam
# to fit inside the box, hence the floor lam >= c_wake / half_period.  The
# other experiments either solve at schedule-determined drifts (fixed-point
# runs), compare against exact manufactured solutions, or never solve at all,
# so their floor is off by default.
_DEFAULT_C_WAKE = {
    EXPERIMENT_SCALING_STEADY: 4.0,
    EXPERIMENT_SCALING_TP: 4.0,
    EXPERIMENT_MMS: 0.0,
    EXPERIMENT_BILINEAR: 0.0,
    EXPERIMENT_PICARD_STEADY: 0.0,
    EXPERIMENT_PICARD_TP: 0.0,
    EXPERIMENT_LIFTING: 0.0,
}


class WakeConstraintError(ValueError):
    """A requested drift lies below the wake-resolution floor of the box."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs for one experiment run.

    ``lambda_grid`` must be strictly increasing and confined to
    (0, lambda_ceiling]; for box-solving sweeps it must also respect the wake
    floor c_wake / half_period.  ``forcing_shell`` restricts random forcing
    to Euclidean mode radii inside the closed interval, ``drift_mode_cap``
    caps the |m_1| content, and ``mode_cap`` bounds the default cube of mode
    indices; all three exist so a field is the same continuum object on every
    grid that can hold it.
    """

    experiment: str
    grid: GridSpec
    lambda_grid: tuple[float, ...]
    q: float = 2.0
    r: float = 2.0
    period: float = 2.0 * math.pi
    time_modes: int = 1
    seed: int = 0
    sample_count: int = 100
    rho: float = 0.05
    gamma: float | None = None
    tol: float = 1e-10
    lambda_ceiling: float = 16.0
    c_wake: float | None = None
    inner_radius: float | None = None
    outer_radius: float | None = None
    mode_cap: int | None = None
    forcing_shell: tuple[float, float] | None = None
    drift_mode_cap: int | None = None
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}"
            )
        lams = tuple(float(x) for x in self.lambda_grid)
        if not lams:
            raise ValueError("lambda_grid must not be empty")
        if any(b <= a for a, b in zip(lams, lams[1:])):
            raise ValueError("lambda_grid must be strictly increasing")
        if not self.lambda_ceiling > 0:
            raise ValueError(
                f"lambda_ceiling must be positive, got {self.lambda_ceiling}"
            )
        if lams[0] <= 0 or lams[-1] > self.lambda_ceiling * (1.0 + 1e-12):
            raise ValueError(
                f"lambda_grid must lie in (0, {self.lambda_ceiling}], got "
                f"[{lams[0]}, {lams[-1]}]"
            )
        floor = self.wake_floor
        if lams[0] < floor * (1.0 - 1e-12):
            raise WakeConstraintError(
                f"smallest drift {lams[0]} is below the wake floor "
                f"{floor} = c_wake / half_period; enlarge the box or raise "
                "the sweep"
            )
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")
        if self.time_modes < 1:
            raise ValueError(f"time_modes must be >= 1, got {self.time_modes}")
        if self.sample_count < 1:
            raise ValueError(
                f"sample_count must be >= 1, got {self.sample_count}"
            )
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.gamma is not None and not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if (self.inner_radius is None) != (self.outer_radius is None):
            raise ValueError("inner_radius and outer_radius must be set together")
        if self.forcing_shell is not None:
            lo, hi = self.forcing_shell
            if not 0 < lo <= hi:
                raise ValueError(
                    f"forcing_shell must satisfy 0 < lo <= hi, got {self.forcing_shell}"
                )
        object.__setattr__(self, "lambda_grid", lams)

    @property
    def resolved_c_wake(self) -> float:
        if self.c_wake is not None:
            return float(self.c_wake)
        return _DEFAULT_C_WAKE[self.experiment]

    @property
    def wake_floor(self) -> float:
        return self.resolved_c_wake / self.grid.half_period

    def cutoff_spec(self) -> CutoffSpec:
        if self.inner_radius is not None:
            return CutoffSpec(self.inner_radius, self.outer_radius)
        return default_cutoff(self.grid)


@dataclass(frozen=True)
class CheckRecord:
    """One asserted inequality: value versus bound, with the verdict."""

    name: str
    value: float
    bound: float
    kind: str  # "le", "ge", or "lt"
    passed: bool

    def describe(self) -> str:
        op = {"le": "<=", "ge": ">=", "lt": "<"}[self.kind]
        verdict = "PASS" if self.passed else "FAIL"
        return f"{verdict} {self.name}: {self.value:.6g} {op} {self.bound:.6g}"


def _check_le(name: str, value: float, bound: float) -> CheckRecord:
    return CheckRecord(name, float(value), float(bound), "le", bool(value <= bound))


def _check_lt(name: str, value: float, bound: float) -> CheckRecord:
    return CheckRecord(name, float(value), float(bound), "lt", bool(value < bound))


def _check_ge(name: str, value: float, bound: float) -> CheckRecord:
    return CheckRecord(name, float(value), float(bound), "ge", bool(value >= bound))


@dataclass(frozen=True)
class ScalingResult:
    """Outcome of one experiment: table, slopes, constants, checks, flags."""

    experiment: str
    columns: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]
    slopes: dict[str, float]
    constants: dict[str, float]
    checks: tuple[CheckRecord, ...]
    flags: tuple[str, ...]

    def __post_init__(self) -> None:
        width = len(self.columns)
        for row in self.rows:
            if len(row) != width:
                raise ValueError(
                    f"row width {len(row)} does not match {width} columns"
                )

    @property
    def all_passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def column(self, name: str) -> np.ndarray:
        index = self.columns.index(name)
        return np.array([row[index] for row in self.rows])


# ---------------------------------------------------------------------------
# slope fitting


def loglog_slope(x, y) -> float:
    """Least-squares slope of log y against log x; NaN when undefined."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size or x.size < 2:
        return math.nan
    if np.any(x <= 0) or np.any(y <= 0) or not np.all(np.isfinite(y)):
        return math.nan
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def leave_one_out_shift(x, y) -> float:
    """Largest slope change when a single sweep point is removed."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    base = loglog_slope(x, y)
    if not math.isfinite(base) or x.size < 3:
        return math.nan
    worst = 0.0
    for i in range(x.size):
        keep = np.arange(x.size) != i
        shifted = loglog_slope(x[keep], y[keep])
        if not math.isfinite(shifted):
            return math.nan
        worst = max(worst, abs(shifted - base))
    return worst


def _require_sweep(cfg: ExperimentConfig, min_points: int = 5, decades: float = 1.0) -> None:
    lams = cfg.lambda_grid
    if len(lams) < min_points:
        raise ValueError(
            f"{cfg.experiment} needs at least {min_points} sweep points, got {len(lams)}"
        )
    span = math.log10(lams[-1] / lams[0])
    if span < decades * (1.0 - 1e-9):
        raise ValueError(
            f"{cfg.experiment} needs a sweep spanning >= {decades} decades, got {span:.3g}"
        )


def _require_experiment(cfg: ExperimentConfig, expected: str) -> None:
    if cfg.experiment != expected:
        raise ValueError(
            f"config names experiment {cfg.experiment!r}, runner expects {expected!r}"
        )


# ---------------------------------------------------------------------------
# seeded random fields, stable across grid refinement


def _default_mode_cap(grid: GridSpec) -> int:
    return min(4, max(1, grid.points_per_axis // 8))


def _mode_list(
    grid: GridSpec,
    mode_cap: int | None,
    shell: tuple[float, float] | None,
    drift_mode_cap: int | None,
) -> list[tuple[int, ...]]:
    """Half-lattice representatives of the requested mode set.

    One member of every conjugate pair {m, -m} is listed (first nonzero
    coordinate positive), in an enumeration order that depends only on the
    requested caps, never on the grid size.
    """
    cap = int(math.ceil(shell[1])) if shell is not None else (
        mode_cap if mode_cap is not None else _default_mode_cap(grid)
    )
    if cap < 1:
        raise ValueError(f"mode cap must be >= 1, got {cap}")
    if cap > grid.dealias_cutoff:
        raise ValueError(
            f"mode cap {cap} exceeds the grid's dealias cutoff "
            f"{grid.dealias_cutoff}; refine the grid"
        )
    modes: list[tuple[int, ...]] = []
    for m in itertools.product(range(-cap, cap + 1), repeat=grid.dim):
        if all(v == 0 for v in m):
            continue
        lead = next(v for v in m if v != 0)
        if lead < 0:
            continue
        if shell is not None:
            radius = math.sqrt(sum(v * v for v in m))
            if not shell[0] - 1e-9 <= radius <= shell[1] + 1e-9:
                continue
        if drift_mode_cap is not None and abs(m[0]) > drift_mode_cap:
            continue
        modes.append(m)
    if not modes:
        raise ValueError("the requested mode set is empty")
    return modes


def _coefficients_from_draws(
    grid: GridSpec, modes: list[tuple[int, ...]], draws: np.ndarray
) -> np.ndarray:
    """Hermitian coefficient array with Gaussian weights on the given modes."""
    coeff = np.zeros(grid.shape, dtype=np.complex128)
    n = grid.points_per_axis
    for m, (a, b) in zip(modes, draws):
        value = 0.5 * (a + 1j * b)
        coeff[tuple(v % n for v in m)] = value
        coeff[tuple(-v % n for v in m)] = np.conj(value)
    return coeff


def _normalized(field, amplitude: float):
    size = lq_norm(field, 2.0)
    if not size > 0:
        raise ValueError("random field degenerated to zero; change the seed")
    return field * (amplitude / size)


def random_scalar_field(
    grid: GridSpec,
    seed_key,
    *,
    mode_cap: int | None = None,
    shell: tuple[float, float] | None = None,
    drift_mode_cap: int | None = None,
    amplitude: float = 1.0,
) -> ScalarField:
    """Seeded zero-mean scalar field with unit-L2 normalization by default."""
    modes = _mode_list(grid, mode_cap, shell, drift_mode_cap)
    rng = np.random.default_rng(seed_key)
    coeff = _coefficients_from_draws(grid, modes, rng.standard_normal((len(modes), 2)))
    return _normalized(from_spectral(SpectralField(grid, coeff[None])), amplitude)


def random_divergence_free(
    grid: GridSpec,
    seed_key,
    *,
    mode_cap: int | None = None,
    shell: tuple[float, float] | None = None,
    drift_mode_cap: int | None = None,
    amplitude: float = 1.0,
) -> VectorField:
    """Seeded divergence-free velocity (stream function in 2-D, curl in 3-D)."""
    modes = _mode_list(grid, mode_cap, shell, drift_mode_cap)
    rng = np.random.default_rng(seed_key)
    if grid.dim == 2:
        psi = _coefficients_from_draws(
            grid, modes, rng.standard_normal((len(modes), 2))
        )
        parts = [
            psi * (1j * grid.wavenumber(1)),
            psi * (-1j * grid.wavenumber(0)),
        ]
    else:
        potential = [
            _coefficients_from_draws(
                grid, modes, rng.standard_normal((len(modes), 2))
            )
            for _ in range(3)
        ]
        w = [grid.wavenumber(axis) for axis in range(3)]
        parts = [
            1j * (w[1] * potential[2] - w[2] * potential[1]),
            1j * (w[2] * potential[0] - w[0] * potential[2]),
            1j * (w[0] * potential[1] - w[1] * potential[0]),
        ]
    field = from_spectral(SpectralField(grid, np.stack(parts)))
    return _normalized(field, amplitude)


def random_oscillatory(
    grid: GridSpec,
    period: float,
    time_modes: int,
    seed_key,
    *,
    mode_cap: int | None = None,
    shell: tuple[float, float] | None = None,
    drift_mode_cap: int | None = None,
    amplitude: float = 1.0,
) -> TimePeriodicField:
    """Seeded divergence-free time-periodic field with zero time average."""
    key = list(seed_key)
    nonneg = [np.zeros((grid.dim,) + grid.shape, dtype=np.complex128)]
    for k in range(1, time_modes + 1):
        re = random_divergence_free(
            grid, key + [k, 0], mode_cap=mode_cap, shell=shell,
            drift_mode_cap=drift_mode_cap,
        )
        im = random_divergence_free(
            grid, key + [k, 1], mode_cap=mode_cap, shell=shell,
            drift_mode_cap=drift_mode_cap,
        )
        nonneg.append(re.components + 1j * im.components)
    field = TimePeriodicField.from_modes(grid, period, nonneg)
    scale = amplitude / lq_norm(field, 2.0)
    return TimePeriodicField(grid, period, field.modes * scale)


def random_timeperiodic_forcing(
    grid: GridSpec,
    period: float,
    time_modes: int,
    seed_key,
    *,
    mode_cap: int | None = None,
    shell: tuple[float, float] | None = None,
    drift_mode_cap: int | None = None,
    amplitude: float = 1.0,
) -> TimePeriodicField:
    """Divergence-free forcing with both a steady part and oscillation."""
    key = list(seed_key)
    steady = random_divergence_free(
        grid, key + [0], mode_cap=mode_cap, shell=shell,
        drift_mode_cap=drift_mode_cap,
    )
    nonneg = [steady.components.astype(np.complex128)]
    for k in range(1, time_modes + 1):
        re = random_divergence_free(
            grid, key + [k, 0], mode_cap=mode_cap, shell=shell,
            drift_mode_cap=drift_mode_cap,
        )
        im = random_divergence_free(
            grid, key + [k, 1], mode_cap=mode_cap, shell=shell,
            drift_mode_cap=drift_mode_cap,
        )
        nonneg.append(0.5 * (re.components + 1j * im.components))
    field = TimePeriodicField.from_modes(grid, period, nonneg)
    scale = amplitude / lq_norm(field, 2.0)
    return TimePeriodicField(grid, period, field.modes * scale)


# ---------------------------------------------------------------------------
# differential helpers for manufactured solutions


def vector_laplacian(field: VectorField) -> VectorField:
    total = None
    for axis in range(1, field.grid.dim + 1):
        second = derivative(derivative(field, axis), axis)
        total = second if total is None else total + second
    return total


def oseen_apply(field: VectorField, lam: float) -> VectorField:
    """The steady drift operator -Laplacian + lam * d/dx_1 applied spectrally."""
    return -vector_laplacian(field) + derivative(field, 1) * lam


# ---------------------------------------------------------------------------
# fitted smallness constant

_FIT_CACHE: dict[tuple, float] = {}


def fit_smallness_constant(
    grid: GridSpec,
    profile: ExponentProfile,
    *,
    seed: int = 0,
    sample_count: int = 8,
    probe_drifts: tuple[float, ...] = (0.25, 1.0, 4.0),
    mode_cap: int | None = None,
) -> float:
    """Empirical constant shared by the linear and bilinear inequalities.

    The fit takes the maximum of (a) wake-norm over data-norm ratios of
    drift solves on random divergence-free forcing, and (b) drift-weighted
    bilinear ratios of convective products, across the probe drifts.  The
    result feeds the radius schedule; the fixed-point runs then verify the
    scheduled contraction empirically rather than trusting the fit.
    """
    key = (
        grid.dim,
        grid.points_per_axis,
        round(grid.half_period, 12),
        profile,
        seed,
        sample_count,
        tuple(probe_drifts),
        mode_cap,
    )
    cached = _FIT_CACHE.get(key)
    if cached is not None:
        return cached
    n, q, r = profile.n, profile.q, profile.r
    weight = 1.0 / (n + 1)
    samples = [
        random_divergence_free(grid, [seed, 101, i], mode_cap=mode_cap)
        for i in range(sample_count)
    ]
    best = 0.0
    for g in samples:
        g_data = lq_norm(g, q)
        g_neg = negative_norm_surrogate(g, r)
        for lam in probe_drifts:
            pair = solve_steady(g, OseenParams(lam=lam, lam_max=max(16.0, lam)))
            numerator = lambda_norm(pair.velocity, lam, q, r)
            denominator = g_data + lam ** (-profile.m_exponent * weight) * g_neg
            best = max(best, numerator / denominator)
    for i, v_one in enumerate(samples):
        v_two = samples[(i + 1) % len(samples)]
        product = convective_product(v_one, v_two)
        strong = lq_norm(product, q)
        weak = negative_norm_surrogate(product, r)
        for lam in probe_drifts:
            denominator = lambda_norm(v_one, lam, q, r) * lambda_norm(
                v_two, lam, q, r
            )
            best = max(
                best,
                strong * lam ** (profile.theta * weight) / denominator,
                weak * lam ** (profile.eta * weight) / denominator,
            )
    _FIT_CACHE[key] = best
    return best


# ---------------------------------------------------------------------------
# recovery of manufactured solutions


def _relative_l2(diff_field, reference_field) -> float:
    return lq_norm(diff_field, 2.0) / lq_norm(reference_field, 2.0)


def _relative_spacetime(diff_field, reference_field) -> float:
    return spacetime_l2_plancherel(diff_field) / spacetime_l2_plancherel(
        reference_field
    )


def _manufactured_timeperiodic(grid, lam, period, time_modes, seed):
    """Manufactured time-periodic solution, pressure, and matching forcing."""
    u_modes, p_modes, f_modes = [], [], []
    for k in range(time_modes + 1):
        omega = 2.0 * math.pi * k / period
        u_re = random_divergence_free(grid, [seed, 21, k, 0])
        p_re = random_scalar_field(grid, [seed, 22, k, 0])
        if k == 0:
            u_im = VectorField.zeros(grid)
            p_im = ScalarField.zeros(grid)
        else:
            u_im = random_divergence_free(grid, [seed, 21, k, 1])
            p_im = random_scalar_field(grid, [seed, 22, k, 1])
        f_re = oseen_apply(u_re, lam) + gradient(p_re) - u_im * omega
        f_im = oseen_apply(u_im, lam) + gradient(p_im) + u_re * omega
        u_modes.append(u_re.components + 1j * u_im.components)
        p_modes.append((p_re.values + 1j * p_im.values)[None])
        f_modes.append(f_re.components + 1j * f_im.components)
    u_star = TimePeriodicField.from_modes(grid, period, u_modes)
    p_star = TimePeriodicField.from_modes(grid, period, p_modes)
    forcing = TimePeriodicField.from_modes(grid, period, f_modes)
    return u_star, p_star, forcing


def run_mms(cfg: ExperimentConfig) -> ScalingResult:
    """Recover manufactured solutions through every solver path.

    Linear steady and time-periodic solves must match to near machine
    accuracy; the nonlinear steady fixed point, run at its scheduled drift
    with an amplitude below the data gate, must recover the manufactured
    velocity and pressure to 1e-7.
    """
    _require_experiment(cfg, EXPERIMENT_MMS)
    grid = cfg.grid
    rows = []
    for lam in cfg.lambda_grid:
        params = OseenParams(lam=lam, lam_max=max(cfg.lambda_ceiling, lam))
        u_star = random_divergence_free(grid, [cfg.seed, 1], mode_cap=cfg.mode_cap)
        p_star = random_scalar_field(grid, [cfg.seed, 2], mode_cap=cfg.mode_cap)
        forcing = oseen_apply(u_star, lam) + gradient(p_star)
        pair = solve_steady(forcing, params)
        steady_u_err = _relative_l2(pair.velocity - u_star, u_star)
        steady_p_err = _relative_l2(pair.pressure - p_star, p_star)

        u_tp, p_tp, f_tp = _manufactured_timeperiodic(
            grid, lam, cfg.period, cfg.time_modes, cfg.seed
        )
        velocity, pressure = solve_timeperiodic(f_tp, params)
        tp_u_err = _relative_spacetime(velocity - u_tp, u_tp)
        tp_p_err = _relative_spacetime(pressure - p_tp, p_tp)
        rows.append((lam, steady_u_err, steady_p_err, tp_u_err, tp_p_err))

    constants, checks = _mms_nonlinear(cfg)
    columns = (
        "lambda",
        "steady_velocity_error",
        "steady_pressure_error",
        "tp_velocity_error",
        "tp_pressure_error",
    )
    table = tuple(tuple(map(float, row)) for row in rows)
    result_checks = [
        _check_le(
            "steady_velocity_error_max", max(r[1] for r in table), 1e-11
        ),
        _check_le(
            "steady_pressure_error_max", max(r[2] for r in table), 1e-11
        ),
        _check_le("tp_velocity_error_max", max(r[3] for r in table), 1e-11),
        _check_le("tp_pressure_error_max", max(r[4] for r in table), 1e-11),
    ]
    result_checks.extend(checks)
    return ScalingResult(
        experiment=cfg.experiment,
        columns=columns,
        rows=table,
        slopes={},
        constants=constants,
        checks=tuple(result_checks),
        flags=(),
    )


def _mms_nonlinear(cfg: ExperimentConfig):
    """Manufactured recovery through the steady fixed-point driver."""
    grid = cfg.grid
    profile = ExponentProfile.build(grid.dim, cfg.q, cfg.r)
    gamma = cfg.gamma if cfg.gamma is not None else profile.gamma_midpoint()
    constant = fit_smallness_constant(grid, profile, seed=cfg.seed)
    pcfg = radius_schedule(
        cfg.rho, gamma, profile, constant, tol=cfg.tol, max_iter=60
    )
    u_unit = random_divergence_free(grid, [cfg.seed, 31], mode_cap=cfg.mode_cap)
    p_unit = random_scalar_field(grid, [cfg.seed, 32], mode_cap=cfg.mode_cap)
    linear_part = oseen_apply(u_unit, pcfg.lam) + gradient(p_unit)
    quadratic_part = convective_product(u_unit, u_unit)
    linear_size = lq_norm(linear_part, cfg.q) + negative_norm_surrogate(
        linear_part, cfg.r
    )
    quadratic_size = lq_norm(quadratic_part, cfg.q) + negative_norm_surrogate(
        quadratic_part, cfg.r
    )
    amplitude = 0.8 * min(
        pcfg.epsilon / (2.0 * linear_size),
        math.sqrt(pcfg.epsilon / (2.0 * quadratic_size)),
        pcfg.rho / (2.0 * lambda_norm(u_unit, pcfg.lam, cfg.q, cfg.r)),
    )
    for _ in range(60):
        forcing = linear_part * amplitude + quadratic_part * (amplitude**2)
        data_size = lq_norm(forcing, cfg.q) + negative_norm_surrogate(
            forcing, cfg.r
        )
        if data_size <= 0.95 * pcfg.epsilon:
            break
        amplitude *= 0.5
    else:
        raise RuntimeError("could not scale the manufactured data under the gate")
    lifting = build_lifting(0.0, cfg.cutoff_spec(), grid)
    pair, report = picard_steady(forcing, pcfg, lifting=lifting)
    u_star = u_unit * amplitude
    p_star = p_unit * amplitude
    velocity_error = _relative_l2(pair.velocity - u_star, u_star)
    pressure_error = _relative_l2(pair.pressure - p_star, p_star)
    constants = {
        "picard_lambda": pcfg.lam,
        "picard_epsilon": pcfg.epsilon,
        "picard_rho": pcfg.rho,
        "picard_amplitude": amplitude,
        "picard_data_size": data_size,
        "picard_iterations": float(report.iterations),
        "picard_velocity_error": velocity_error,
        "picard_pressure_error": pressure_error,
        "fitted_constant": constant,
    }
    checks = [
        _check_le("picard_velocity_error", velocity_error, 1e-7),
        _check_le("picard_pressure_error", pressure_error, 1e-7),
    ]
    return constants, checks


# ---------------------------------------------------------------------------
# a-priori estimate sweeps

_STEADY_COLUMNS = (
    "lambda",
    "seminorm_1r",
    "lq_s",
    "weighted_lq_s",
    "drift_negnorm_1r_surrogate",
    "pressure_lq_r",
    "rhs_line1",
    "ratio_line1",
    "seminorm_2q",
    "drift_lq_q",
    "pressure_gradient_lq_q",
    "rhs_line2",
    "ratio_line2",
)


def _steady_line_values(velocity, pressure, lam, cfg, m_exp, delta, f_lq, f_neg):
    """Both estimate lines for one steady solve, as a column-ordered tuple."""
    n = cfg.grid.dim
    weight = 1.0 / (n + 1)
    s = s_exponent(n, cfg.r)
    drift_derivative = derivative(velocity, 1)
    seminorm_1r = sobolev_seminorm(velocity, 1, cfg.r)
    lq_s = lq_norm(velocity, s)
    weighted_lq_s = lam ** ((1.0 + delta) * weight) * lq_s
    drift_neg = lam * negative_norm_surrogate(drift_derivative, cfg.r)
    pressure_lq_r = lq_norm(pressure, cfg.r)
    rhs_line1 = lam ** (-m_exp * weight) * f_neg
    lhs_line1 = seminorm_1r + weighted_lq_s + drift_neg + pressure_lq_r
    seminorm_2q = sobolev_seminorm(velocity, 2, cfg.q)
    drift_lq_q = lam * lq_norm(drift_derivative, cfg.q)
    pressure_grad = sobolev_seminorm(pressure, 1, cfg.q)
    rhs_line2 = f_lq + rhs_line1
    lhs_line2 = seminorm_2q + drift_lq_q + pressure_grad
    return (
        lam,
        seminorm_1r,
        lq_s,
        weighted_lq_s,
        drift_neg,
        pressure_lq_r,
        rhs_line1,
        lhs_line1 / rhs_line1,
        seminorm_2q,
        drift_lq_q,
        pressure_grad,
        rhs_line2,
        lhs_line2 / rhs_line2,
    )


def _steady_sweep_checks(cfg, columns, rows, slopes, m_exp, checks, flags, prefix=""):
    """Shared slope assertions for the steady estimate lines."""
    lams = [row[0] for row in rows]

    def col(name):
        return [row[columns.index(name)] for row in rows]

    checks.append(
        _check_ge(
            prefix + "weighted_lq_s_slope",
            slopes[prefix + "weighted_lq_s"],
            -0.15,
        )
    )
    if m_exp == 0:
        for line in ("ratio_line1", "ratio_line2"):
            checks.append(
                _check_le(
                    prefix + line + "_slope", slopes[prefix + line], 0.15
                )
            )
            checks.append(
                _check_le(
                    prefix + line + "_leverage",
                    leave_one_out_shift(lams, col(line)),
                    0.05,
                )
            )
    else:
        flags.append(
            prefix + "drift-amplified data weight (M != 0): estimate ratios "
            "scale with a positive drift power, so flatness is reported, "
            "not asserted"
        )


def run_scaling_steady(cfg: ExperimentConfig) -> ScalingResult:
    """Sweep the steady solver and test both a-priori estimate lines.

    The forcing is a fixed random divergence-free field plus a gradient
    part; the gradient part must leave the velocity untouched (checked at
    one sweep point) while making the pressure columns nontrivial.
    """
    _require_experiment(cfg, EXPERIMENT_SCALING_STEADY)
    _require_sweep(cfg)
    grid = cfg.grid
    n = grid.dim
    m_exp, delta = exponents_Mdelta(n, cfg.r)
    try:
        theta = theta_exponent(n, cfg.q, cfg.r)
    except ValueError:
        theta = None
    f_free = random_divergence_free(
        grid,
        [cfg.seed, 11],
        mode_cap=cfg.mode_cap,
        shell=cfg.forcing_shell,
        drift_mode_cap=cfg.drift_mode_cap,
    )
    g_scalar = random_scalar_field(grid, [cfg.seed, 12], mode_cap=cfg.mode_cap)
    forcing = f_free + gradient(g_scalar)
    f_lq = lq_norm(forcing, cfg.q)
    f_neg = negative_norm_surrogate(forcing, cfg.r)

    weight = 1.0 / (n + 1)
    columns = _STEADY_COLUMNS + ("lq_q", "seminorm_1q", "ratio_fullnorm")
    rows = []
    flags: list[str] = []
    for lam in cfg.lambda_grid:
        params = OseenParams(lam=lam, lam_max=max(cfg.lambda_ceiling, lam))
        pair = solve_steady(forcing, params)
        base = _steady_line_values(
            pair.velocity, pair.pressure, lam, cfg, m_exp, delta, f_lq, f_neg
        )
        lq_q = lq_norm(pair.velocity, cfg.q)
        seminorm_1q = sobolev_seminorm(pair.velocity, 1, cfg.q)
        if theta is None:
            ratio_full = math.nan
        else:
            lhs_full = (
                lam ** ((1.0 + delta) * theta * weight) * lq_q
                + lam ** ((1.0 + delta) * theta * weight / 2.0) * seminorm_1q
                + base[columns.index("seminorm_2q")]
            )
            ratio_full = lhs_full / base[columns.index("rhs_line2")]
        rows.append(base + (lq_q, seminorm_1q, ratio_full))
    table = tuple(tuple(map(float, row)) for row in rows)
    lams = [row[0] for row in table]
    slopes = {
        name: loglog_slope(lams, [row[i] for row in table])
        for i, name in enumerate(columns)
        if name != "lambda"
    }
    constants = {
        "constant_line1": max(row[columns.index("ratio_line1")] for row in table),
        "constant_line2": max(row[columns.index("ratio_line2")] for row in table),
        "m_exponent": float(m_exp),
        "delta": float(delta),
    }
    checks: list[CheckRecord] = []
    _steady_sweep_checks(cfg, columns, table, slopes, m_exp, checks, flags)
    if theta is None:
        flags.append(
            "full-norm line skipped: the interpolation exponent needs "
            "1/q <= 1/r - 1/(n+1)"
        )
    else:
        constants["constant_fullnorm"] = max(
            row[columns.index("ratio_fullnorm")] for row in table
        )
        if m_exp == 0:
            checks.append(
                _check_le(
                    "ratio_fullnorm_slope", slopes["ratio_fullnorm"], 0.15
                )
            )

    # A pure-gradient perturbation of the data must not move the velocity.
    lam_mid = cfg.lambda_grid[len(cfg.lambda_grid) // 2]
    params = OseenParams(lam=lam_mid, lam_max=max(cfg.lambda_ceiling, lam_mid))
    base_pair = solve_steady(forcing, params)
    extra = random_scalar_field(grid, [cfg.seed, 13], mode_cap=cfg.mode_cap)
    shifted_pair = solve_steady(forcing + gradient(extra), params)
    invariance = _relative_l2(
        shifted_pair.velocity - base_pair.velocity, base_pair.velocity
    )
    checks.append(_check_le("gradient_part_velocity_invariance", invariance, 1e-12))

    return ScalingResult(
        experiment=cfg.experiment,
        columns=columns,
        rows=table,
        slopes=slopes,
        constants=constants,
        checks=tuple(checks),
        flags=tuple(flags),
    )


def _bochner_gradient_norm(pressure: TimePeriodicField, q: float) -> float:
    """Space-time L^q norm of the spatial gradient of a scalar stack."""
    grid = pressure.grid
    nt = max(4 * pressure.max_mode + 8, 8)
    samples = pressure.sample_times(nt)
    powers = []
    for j in range(nt):
        field = ScalarField(grid, samples[j, 0])
        powers.append(sobolev_seminorm(field, 1, q) ** q)
    return float(np.mean(powers)) ** (1.0 / q)


def maxreg_norm_mode_sum(field: TimePeriodicField) -> float:
    """Plancherel evaluation of the maximal-regularity norm, q = 2 only.

    Parseval in time converts period averages into sums over time modes; the
    spatial pieces go through the same full-Sobolev code path on the real and
    imaginary parts of each mode, so this is an independent quadrature-free
    cross-check of :func:`oseenlab.norms.maxreg_norm`.
    """
    grid = field.grid
    spatial_total = 0.0
    dt_total = 0.0
    for k in range(-field.max_mode, field.max_mode + 1):
        mode = field.mode(k)
        re = VectorField(grid, mode.real)
        im = VectorField(grid, mode.imag)
        spatial_total += (
            sobolev_full_norm(re, 2, 2.0) ** 2 + sobolev_full_norm(im, 2, 2.0) ** 2
        )
        dt_total += field.omega(k) ** 2 * (
            lq_norm(re, 2.0) ** 2 + lq_norm(im, 2.0) ** 2
        )
    return math.sqrt(spatial_total) + math.sqrt(dt_total)


def run_scaling_tp(cfg: ExperimentConfig) -> ScalingResult:
    """Sweep the time-periodic solver: steady lines plus the oscillatory ratio.

    The time-averaged part of the solution must obey the steady estimate
    lines against the averaged forcing, while the oscillatory part's
    maximal-regularity norm over its forcing norm must stay flat in the
    drift (fitted slope within +-0.1).
    """
    _require_experiment(cfg, EXPERIMENT_SCALING_TP)
    _require_sweep(cfg)
    grid = cfg.grid
    n = grid.dim
    m_exp, delta = exponents_Mdelta(n, cfg.r)
    forcing_free = random_timeperiodic_forcing(
        grid,
        cfg.period,
        cfg.time_modes,
        [cfg.seed, 61],
        mode_cap=cfg.mode_cap,
        shell=cfg.forcing_shell,
        drift_mode_cap=cfg.drift_mode_cap,
    )
    # Gradient parts per time mode keep every pressure column nontrivial.
    grad_modes = []
    for k in range(cfg.time_modes + 1):
        g_re = random_scalar_field(grid, [cfg.seed, 62, k, 0], mode_cap=cfg.mode_cap)
        g_im = (
            ScalarField.zeros(grid)
            if k == 0
            else random_scalar_field(grid, [cfg.seed, 62, k, 1], mode_cap=cfg.mode_cap)
        )
        grad_modes.append(
            0.5 * (gradient(g_re).components + 1j * gradient(g_im).components)
        )
    gradient_part = TimePeriodicField.from_modes(grid, cfg.period, grad_modes)
    forcing = TimePeriodicField(
        grid, cfg.period, forcing_free.modes + gradient_part.modes
    )

    f_steady = project_steady(forcing)
    f_osc = project_oscillatory(forcing)
    f_steady_lq = lq_norm(f_steady, cfg.q)
    f_steady_neg = negative_norm_surrogate(f_steady, cfg.r)
    f_osc_lq = lq_norm(f_osc, cfg.q)
    osc_trivial = f_osc_lq <= 1e-13 * lq_norm(forcing, cfg.q)

    columns = _STEADY_COLUMNS + (
        "maxreg_12q_oscillatory",
        "oscillatory_pressure_gradient_lq_q",
        "oscillatory_forcing_lq_q",
        "ratio_oscillatory",
        "ratio_oscillatory_full",
    )
    rows = []
    plancherel_worst = 0.0
    for lam in cfg.lambda_grid:
        params = OseenParams(lam=lam, lam_max=max(cfg.lambda_ceiling, lam))
        velocity, pressure = solve_timeperiodic(forcing, params)
        v_mean = project_steady(velocity)
        p_mean = project_steady(pressure)
        base = _steady_line_values(
            v_mean, p_mean, lam, cfg, m_exp, delta, f_steady_lq, f_steady_neg
        )
        w_osc = project_oscillatory(velocity)
        p_osc = project_oscillatory(pressure)
        if osc_trivial:
            rows.append(base + (math.nan,) * 5)
            continue
        maxreg = maxreg_norm(w_osc, cfg.q)
        p_grad = _bochner_gradient_norm(p_osc, cfg.q)
        ratio = maxreg / f_osc_lq
        ratio_full = (maxreg + p_grad) / f_osc_lq
        rows.append(base + (maxreg, p_grad, f_osc_lq, ratio, ratio_full))
        if cfg.q == 2.0:
            cross = maxreg_norm_mode_sum(w_osc)
            plancherel_worst = max(
                plancherel_worst, abs(cross - maxreg) / maxreg
            )
    table = tuple(tuple(map(float, row)) for row in rows)
    lams = [row[0] for row in table]
    slopes = {
        name: loglog_slope(lams, [row[i] for row in table])
        for i, name in enumerate(columns)
        if name != "lambda"
    }
    constants = {
        "constant_line1": max(row[columns.index("ratio_line1")] for row in table),
        "constant_line2": max(row[columns.index("ratio_line2")] for row in table),
        "m_exponent": float(m_exp),
        "delta": float(delta),
    }
    checks: list[CheckRecord] = []
    flags: list[str] = []
    _steady_sweep_checks(cfg, columns, table, slopes, m_exp, checks, flags)
    if osc_trivial:
        flags.append(
            "oscillatory ratio skipped: the forcing has no oscillatory part"
        )
    else:
        constants["constant_oscillatory"] = max(
            row[columns.index("ratio_oscillatory")] for row in table
        )
        checks.append(
            _check_le(
                "oscillatory_ratio_slope_magnitude",
                abs(slopes["ratio_oscillatory"]),
                0.1,
            )
        )
        checks.append(
            _check_le(
                "oscillatory_ratio_leverage",
                leave_one_out_shift(
                    lams,
                    [row[columns.index("ratio_oscillatory")] for row in table],
                ),
                0.05,
            )
        )
        if cfg.q == 2.0:
            checks.append(
                _check_le(
                    "maxreg_plancherel_crosscheck", plancherel_worst, 1e-10
                )
            )
    return ScalingResult(
        experiment=cfg.experiment,
        columns=columns,
        rows=table,
        slopes=slopes,
        constants=constants,
        checks=tuple(checks),
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# bilinear convective estimates

_BILINEAR_NAMES = (
    "steady_strong",
    "steady_weak",
    "osc_strong",
    "osc_weak",
    "mixed_steady_osc",
    "mixed_osc_steady",
)


def run_bilinear_ensemble(cfg: ExperimentConfig) -> ScalingResult:
    """Fit the convective-estimate constants and drift exponents.

    A fixed ensemble of divergence-free pairs is reused across the whole
    sweep, so each raw ratio is a smooth deterministic function of the drift
    and the fitted exponents are minus (n+1) times its log-log slope.
    Steady denominators use the wake norm; oscillatory denominators use the
    maximal-regularity norm and carry no drift weight.
    """
    _require_experiment(cfg, EXPERIMENT_BILINEAR)
    _require_sweep(cfg)
    grid = cfg.grid
    n = grid.dim
    admissible, violated = admissibility(n, cfg.q, cfg.r, PROBLEM_TP)
    if not admissible:
        raise ValueError(
            "exponent pair outside the time-periodic window: " + "; ".join(violated)
        )
    theta_formula = theta_exponent(n, cfg.q, cfg.r)
    weight = 1.0 / (n + 1)
    count = cfg.sample_count
    flags: list[str] = []
    if count < 100:
        flags.append(
            f"ensemble has {count} pairs, below the 100-pair reporting floor"
        )
    mode_kwargs = dict(
        mode_cap=cfg.mode_cap,
        shell=cfg.forcing_shell,
        drift_mode_cap=cfg.drift_mode_cap,
    )
    v_one = [
        random_divergence_free(grid, [cfg.seed, 201, i], **mode_kwargs)
        for i in range(count)
    ]
    v_two = [
        random_divergence_free(grid, [cfg.seed, 202, i], **mode_kwargs)
        for i in range(count)
    ]
    w_one = [
        random_oscillatory(
            grid, cfg.period, cfg.time_modes, [cfg.seed, 203, i], **mode_kwargs
        )
        for i in range(count)
    ]
    w_two = [
        random_oscillatory(
            grid, cfg.period, cfg.time_modes, [cfg.seed, 204, i], **mode_kwargs
        )
        for i in range(count)
    ]
    s = s_exponent(n, cfg.r)

    def wake_pieces(v):
        return (
            sobolev_seminorm(v, 2, cfg.q) + sobolev_seminorm(v, 1, cfg.r),
            lq_norm(v, s),
        )

    v_one_pieces = [wake_pieces(v) for v in v_one]
    v_two_pieces = [wake_pieces(v) for v in v_two]
    w_one_norms = [maxreg_norm(w, cfg.q) for w in w_one]
    w_two_norms = [maxreg_norm(w, cfg.q) for w in w_two]

    numerators = np.empty((count, 6))
    for i in range(count):
        vv = convective_product(v_one[i], v_two[i])
        ww = convective_product(w_one[i], w_two[i])
        vw = convective_product(v_one[i], w_two[i])
        wv = convective_product(w_one[i], v_two[i])
        numerators[i] = (
            lq_norm(vv, cfg.q),
            negative_norm_surrogate(vv, cfg.r),
            lq_norm(ww, cfg.q),
            negative_norm_surrogate(project_steady(ww), cfg.r),
            lq_norm(vw, cfg.q),
            lq_norm(wv, cfg.q),
        )

    rows = []
    raw_history = {name: [] for name in _BILINEAR_NAMES}
    for lam in cfg.lambda_grid:
        lam_w = lam**weight
        den_one = np.array(
            [a + lam_w * b for a, b in v_one_pieces]
        )
        den_two = np.array(
            [a + lam_w * b for a, b in v_two_pieces]
        )
        w_one_arr = np.array(w_one_norms)
        w_two_arr = np.array(w_two_norms)
        denominators = np.column_stack(
            (
                den_one * den_two,
                den_one * den_two,
                w_one_arr * w_two_arr,
                w_one_arr * w_two_arr,
                den_one * w_two_arr,
                w_one_arr * den_two,
            )
        )
        ratios = numerators / denominators
        means = np.exp(np.mean(np.log(ratios), axis=0))
        maxima = np.max(ratios, axis=0)
        for name, value in zip(_BILINEAR_NAMES, means):
            raw_history[name].append(float(value))
        rows.append((lam, *map(float, means), *map(float, maxima)))

    columns = (
        ("lambda",)
        + tuple("raw_" + name for name in _BILINEAR_NAMES)
        + tuple("max_" + name for name in _BILINEAR_NAMES)
    )
    table = tuple(tuple(map(float, row)) for row in rows)
    lams = [row[0] for row in table]
    slopes = {
        name: loglog_slope(lams, [row[i] for row in table])
        for i, name in enumerate(columns)
        if name != "lambda"
    }
    fitted = {
        "fitted_theta": -(n + 1) * slopes["raw_steady_strong"],
        "fitted_eta": -(n + 1) * slopes["raw_steady_weak"],
        "fitted_zeta_steady_osc": -(n + 1) * slopes["raw_mixed_steady_osc"],
        "fitted_zeta_osc_steady": -(n + 1) * slopes["raw_mixed_osc_steady"],
    }

    def weighted_constant(index: int, exponent: float) -> float:
        worst = 0.0
        for row in table:
            lam = row[0]
            worst = max(
                worst,
                row[columns.index("max_" + _BILINEAR_NAMES[index])]
                * lam ** (exponent * weight),
            )
        return worst

    constants = {
        "theta_formula": theta_formula,
        **fitted,
        "constant_steady_strong": weighted_constant(0, theta_formula),
        "constant_steady_weak": weighted_constant(1, fitted["fitted_eta"]),
        "constant_osc_strong": max(
            row[columns.index("max_osc_strong")] for row in table
        ),
        "constant_osc_weak": max(
            row[columns.index("max_osc_weak")] for row in table
        ),
        "constant_mixed_steady_osc": weighted_constant(
            4, fitted["fitted_zeta_steady_osc"]
        ),
        "constant_mixed_osc_steady": weighted_constant(
            5, fitted["fitted_zeta_osc_steady"]
        ),
    }
    checks = [
        _check_ge("fitted_theta_lower", fitted["fitted_theta"], 0.0),
        _check_le("fitted_theta_upper", fitted["fitted_theta"], 2.0),
        _check_ge("fitted_eta_lower", fitted["fitted_eta"], 0.0),
        _check_le("fitted_eta_upper", fitted["fitted_eta"], 2.0),
        _check_ge(
            "fitted_zeta_steady_osc_lower", fitted["fitted_zeta_steady_osc"], 0.0
        ),
        _check_lt(
            "fitted_zeta_steady_osc_upper", fitted["fitted_zeta_steady_osc"], 1.0
        ),
        _check_ge(
            "fitted_zeta_osc_steady_lower", fitted["fitted_zeta_osc_steady"], 0.0
        ),
        _check_lt(
            "fitted_zeta_osc_steady_upper", fitted["fitted_zeta_osc_steady"], 1.0
        ),
    ]
    if abs(cfg.r - (n + 1) / 2.0) <= 1e-9:
        checks.append(
            _check_le(
                "fitted_eta_near_two", abs(fitted["fitted_eta"] - 2.0), 0.25
            )
        )
    return ScalingResult(
        experiment=cfg.experiment,
        columns=columns,
        rows=table,
        slopes=slopes,
        constants=constants,
        checks=tuple(checks),
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# boundary lifting diagnostics


def run_lifting_check(cfg: ExperimentConfig) -> ScalingResult:
    """Verify the boundary lifting: trace value, solenoidality, load scaling.

    On the inner ball the lifting must equal the uniform counterflow
    exactly; its divergence must vanish to roundoff; and the momentum load it
    injects, divided by lam * (1 + lam), must stay constant across the drift
    range (coefficient of variation at most 5%).
    """
    _require_experiment(cfg, EXPERIMENT_LIFTING)
    grid = cfg.grid
    spec = cfg.cutoff_spec()
    centered = [
        x - c for x, c in zip(np.meshgrid(*grid.coordinates(), indexing="ij"),
                              grid.center)
    ]
    radius = np.sqrt(sum(x * x for x in centered))
    interior = radius <= spec.inner_radius * (1.0 + 1e-12)
    rows = []
    for lam in cfg.lambda_grid:
        lifting = build_lifting(lam, spec, grid)
        load_lq, load_neg = lifting_load(lifting, cfg.q, cfg.r)
        ratio = (load_lq + load_neg) / (lam * (1.0 + lam))
        target = np.zeros((grid.dim,) + grid.shape)
        target[0] = -lam
        boundary_error = float(
            np.max(np.abs(lifting.velocity.components - target)[:, interior])
        )
        div_values = lifting.divergence_values()
        div_l2 = float(np.sqrt(np.mean(div_values**2) * grid.volume))
        rows.append((lam, load_lq, load_neg, ratio, boundary_error, div_l2))
    columns = (
        "lambda",
        "load_lq_q",
        "load_negnorm_1r_surrogate",
        "load_ratio",
        "boundary_error_max",
        "divergence_l2",
    )
    table = tuple(tuple(map(float, row)) for row in rows)
    ratios = np.array([row[3] for row in table])
    mean = float(np.mean(ratios))
    variation = float(np.std(ratios) / mean)
    max_deviation = float(np.max(np.abs(ratios - mean)) / mean)
    constants = {
        "load_ratio_mean": mean,
        "load_ratio_variation": variation,
        "load_ratio_max_deviation": max_deviation,
    }
    checks = (
        _check_le(
            "boundary_error_max", max(row[4] for row in table), 1e-10
        ),
        _check_le("divergence_l2_max", max(row[5] for row in table), 1e-10),
        _check_le("load_ratio_variation", variation, 0.05),
    )
    slopes = {
        name: loglog_slope(
            [row[0] for row in table],
            [row[i] for row in table],
        )
        for i, name in enumerate(columns)
        if name in ("load_lq_q", "load_negnorm_1r_surrogate", "load_ratio")
    }
    return ScalingResult(
        experiment=cfg.experiment,
        columns=columns,
        rows=table,
        slopes=slopes,
        constants=constants,
        checks=checks,
        flags=(),
    )


# ---------------------------------------------------------------------------
# fixed-point experiments

_PICARD_COLUMNS = (
    "rho",
    "lambda",
    "epsilon",
    "forcing_size",
    "iterations",
    "contraction_rate",
    "certificate",
    "solution_norm",
    "residual_momentum",
    "residual_div",
)


def _picard_schedule(cfg: ExperimentConfig):
    profile = ExponentProfile.build(cfg.grid.dim, cfg.q, cfg.r)
    gamma = cfg.gamma if cfg.gamma is not None else profile.gamma_midpoint()
    constant = fit_smallness_constant(cfg.grid, profile, seed=cfg.seed)
    base = radius_schedule(
        cfg.rho, gamma, profile, constant, tol=cfg.tol, max_iter=60
    )
    return profile, gamma, constant, base


def _picard_result(cfg, rows, checks, constants, flags):
    table = tuple(tuple(map(float, row)) for row in rows)
    rates = [row[_PICARD_COLUMNS.index("contraction_rate")] for row in table]
    for j in range(len(rates) - 1):
        checks.append(
            _check_lt(
                f"contraction_rate_decreases_{j + 1}", rates[j + 1], rates[j]
            )
        )
    return ScalingResult(
        experiment=cfg.experiment,
        columns=_PICARD_COLUMNS,
        rows=table,
        slopes={},
        constants=constants,
        checks=tuple(checks),
        flags=tuple(flags),
    )


def run_picard_steady(cfg: ExperimentConfig) -> ScalingResult:
    """Run the steady fixed-point construction on a shrinking radius ladder.

    The radius is scheduled once from the configured start, then the run is
    repeated at half and quarter radius; every run must contract at a rate
    below one half, the rates must decrease down the ladder, and a fresh
    application of the solution map must reproduce the fixed point within
    twice the stopping tolerance.
    """
    _require_experiment(cfg, EXPERIMENT_PICARD_STEADY)
    grid = cfg.grid
    profile, gamma, constant, base = _picard_schedule(cfg)
    lifting = build_lifting(0.0, cfg.cutoff_spec(), grid)
    direction = random_divergence_free(grid, [cfg.seed, 41], mode_cap=cfg.mode_cap)
    unit_size = lq_norm(direction, cfg.q) + negative_norm_surrogate(
        direction, cfg.r
    )
    rows = []
    checks: list[CheckRecord] = []
    for j, rho in enumerate((base.rho, base.rho / 2.0, base.rho / 4.0)):
        pcfg = PicardConfig.from_schedule(
            profile, rho, gamma, tol=cfg.tol, max_iter=60
        )
        forcing = direction * (0.5 * pcfg.epsilon / unit_size)
        forcing_size = lq_norm(forcing, cfg.q) + negative_norm_surrogate(
            forcing, cfg.r
        )
        pair, report = picard_steady(forcing, pcfg, lifting=lifting)
        solution_norm = lambda_norm(pair.velocity, pcfg.lam, cfg.q, cfg.r)
        rows.append(
            (
                rho,
                pcfg.lam,
                pcfg.epsilon,
                forcing_size,
                float(report.iterations),
                report.contraction_rate,
                report.final_residual,
                solution_norm,
                report.residual_momentum,
                report.residual_div,
            )
        )
        tag = f"rho_{j}"
        checks.append(
            _check_lt(f"contraction_rate_{tag}", report.contraction_rate, 0.5)
        )
        checks.append(
            _check_le(
                f"certificate_{tag}",
                report.final_residual,
                2.0 * cfg.tol * solution_norm,
            )
        )
        if j == 0:
            # A start elsewhere in the ball must reach the same fixed point.
            alt = random_divergence_free(grid, [cfg.seed, 42], mode_cap=cfg.mode_cap)
            alt = alt * (0.5 * rho / lambda_norm(alt, pcfg.lam, cfg.q, cfg.r))
            other_pair, _ = picard_steady(forcing, pcfg, lifting=lifting, initial=alt)
            distance = lambda_norm(
                other_pair.velocity - pair.velocity, pcfg.lam, cfg.q, cfg.r
            )
            checks.append(
                _check_le(
                    "initial_iterate_independence",
                    distance,
                    10.0 * cfg.tol * solution_norm,
                )
            )
    constants = {
        "fitted_constant": constant,
        "gamma": gamma,
        "scheduled_rho": base.rho,
        "scheduled_lambda": base.lam,
        "scheduled_epsilon": base.epsilon,
    }
    return _picard_result(cfg, rows, checks, constants, [])


def run_picard_tp(cfg: ExperimentConfig) -> ScalingResult:
    """Time-periodic analog of :func:`run_picard_steady`."""
    _require_experiment(cfg, EXPERIMENT_PICARD_TP)
    grid = cfg.grid
    profile, gamma, constant, base = _picard_schedule(cfg)
    lifting = build_lifting(0.0, cfg.cutoff_spec(), grid)
    direction = random_timeperiodic_forcing(
        grid, cfg.period, cfg.time_modes, [cfg.seed, 51], mode_cap=cfg.mode_cap
    )
    unit_size = lq_norm(direction, cfg.q) + negative_norm_surrogate(
        project_steady(direction), cfg.r
    )
    rows = []
    checks: list[CheckRecord] = []
    for j, rho in enumerate((base.rho, base.rho / 2.0, base.rho / 4.0)):
        pcfg = PicardConfig.from_schedule(
            profile, rho, gamma, tol=cfg.tol, max_iter=60
        )
        scale = 0.5 * pcfg.epsilon / unit_size
        forcing = TimePeriodicField(grid, cfg.period, direction.modes * scale)
        forcing_size = lq_norm(forcing, cfg.q) + negative_norm_surrogate(
            project_steady(forcing), cfg.r
        )
        (velocity, _pressure), report = picard_timeperiodic(
            forcing, pcfg, lifting=lifting
        )
        solution_norm = driver_norm_timeperiodic(velocity, pcfg.lam, cfg.q, cfg.r)
        rows.append(
            (
                rho,
                pcfg.lam,
                pcfg.epsilon,
                forcing_size,
                float(report.iterations),
                report.contraction_rate,
                report.final_residual,
                solution_norm,
                report.residual_momentum,
                report.residual_div,
            )
        )
        tag = f"rho_{j}"
        checks.append(
            _check_lt(f"contraction_rate_{tag}", report.contraction_rate, 0.5)
        )
        checks.append(
            _check_le(
                f"certificate_{tag}",
                report.final_residual,
                2.0 * cfg.tol * solution_norm,
            )
        )
        if j == 0:
            # A start elsewhere in the ball must reach the same fixed point.
            alt = random_timeperiodic_forcing(
                grid, cfg.period, direction.max_mode, [cfg.seed, 52],
                mode_cap=cfg.mode_cap,
            )
            alt_scale = 0.5 * rho / driver_norm_timeperiodic(
                alt, pcfg.lam, cfg.q, cfg.r
            )
            initial = TimePeriodicField(grid, cfg.period, alt.modes * alt_scale)
            (other_velocity, _), _report = picard_timeperiodic(
                forcing, pcfg, lifting=lifting, initial=initial
            )
            distance = driver_norm_timeperiodic(
                other_velocity - velocity, pcfg.lam, cfg.q, cfg.r
            )
            checks.append(
                _check_le(
                    "initial_iterate_independence",
                    distance,
                    10.0 * cfg.tol * solution_norm,
                )
            )
    constants = {
        "fitted_constant": constant,
        "gamma": gamma,
        "scheduled_rho": base.rho,
        "scheduled_lambda": base.lam,
        "scheduled_epsilon": base.epsilon,
    }
    return _picard_result(cfg, rows, checks, constants, [])


# ---------------------------------------------------------------------------
# exponent tables


def exponent_report(n: int, q: float, r: float) -> dict[str, object]:
    """All exponent values and admissibility verdicts for one configuration."""
    report: dict[str, object] = {"n": n, "q": q, "r": r}
    m_exp, delta = exponents_Mdelta(n, r)
    report["s"] = s_exponent(n, r)
    report["m_exponent"] = m_exp
    report["delta"] = delta
    try:
        theta = theta_exponent(n, q, r)
        report["theta"] = theta
    except ValueError as error:
        theta = None
        report["theta"] = None
        report["theta_reason"] = str(error)
    for problem in ("linear-full", "steady-nonlinear", "timeperiodic-nonlinear"):
        admissible, violated = admissibility(n, q, r, problem)
        report[f"admissible[{problem}]"] = admissible
        if violated:
            report[f"violated[{problem}]"] = "; ".join(violated)
    if theta is not None:
        try:
            report["gamma_interval"] = gamma_interval(
                n, m_exp, theta, 1.0 - 1e-6, 2.0
            )
        except ValueError as error:
            report["gamma_interval"] = None
            report["gamma_reason"] = str(error)
    return report


# ---------------------------------------------------------------------------
# dispatch and serialization

RUNNERS = {
    EXPERIMENT_MMS: run_mms,
    EXPERIMENT_SCALING_STEADY: run_scaling_steady,
    EXPERIMENT_SCALING_TP: run_scaling_tp,
    EXPERIMENT_BILINEAR: run_bilinear_ensemble,
    EXPERIMENT_PICARD_STEADY: run_picard_steady,
    EXPERIMENT_PICARD_TP: run_picard_tp,
    EXPERIMENT_LIFTING: run_lifting_check,
}


def run_experiment(cfg: ExperimentConfig) -> ScalingResult:
    """Dispatch a config to its runner."""
    return RUNNERS[cfg.experiment](cfg)


def _format_value(value: float) -> str:
    return f"{float(value):.17g}"


def emit_csv(result: ScalingResult, path) -> None:
    """Write the result table as CSV plus a plotting-tool twin.

    Floats carry 17 significant digits so parsing the file back reproduces
    them bit-exactly; an empty sweep writes the header line only.  A
    companion ``.dat`` file with a commented header and space-separated
    columns lands next to the CSV for plotting pipelines.
    """
    path = os.fspath(path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    lines = [",".join(result.columns)]
    lines.extend(
        ",".join(_format_value(value) for value in row) for row in result.rows
    )
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")
    dat_path = os.path.splitext(path)[0] + ".dat"
    dat_lines = ["# " + " ".join(result.columns)]
    dat_lines.extend(
        " ".join(_format_value(value) for value in row) for row in result.rows
    )
    with open(dat_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(dat_lines) + "\n")


def read_csv(path) -> tuple[tuple[str, ...], tuple[tuple[float, ...], ...]]:
    """Read back a table written by :func:`emit_csv`, floats bit-exact."""
    with open(path, "r", encoding="utf-8") as handle:
        lines = [line.rstrip("\n") for line in handle if line.strip()]
    columns = tuple(lines[0].split(","))
    rows = tuple(
        tuple(float(token) for token in line.split(",")) for line in lines[1:]
    )
    return columns, rows
