"""Contraction-driven fixed-point solvers for the nonlinear problem.

The steady driver iterates u <- solve(f + nonlinearity(u)) and measures
progress in the wake-weighted norm; the time-periodic driver does the same
with the mode-stack solver and measures progress in the decomposed norm
(wake-weighted norm of the time average plus maximal-regularity norm of
the oscillation).  Both enforce the small-data gate on the forcing, keep
every iterate inside the ball of radius rho, and re-derive a fixed-point
certificate from scratch after convergence.

The radius schedule ties the drift coefficient and the data budget to one
small parameter: lam = epsilon = rho^gamma, with rho halved until the two
smallness inequalities hold for the supplied fitted constant.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .exponents import (
    PROBLEM_STEADY,
    PROBLEM_TP,
    ExponentProfile,
    admissibility,
)
from .fields import GridSpec, ScalarField, TimePeriodicField, VectorField
from .lifting import LiftingField, build_lifting, default_cutoff
from .nonlinear import nonlinearity
from .norms import lambda_norm, lq_norm, maxreg_norm, negative_norm_surrogate
from .oseen import (
    OseenParams,
    SolveReport,
    StokesPair,
    contraction_rate_from_updates,
    residual,
    residual_timeperiodic,
    solve_steady,
    solve_timeperiodic,
)


class GateError(ValueError):
    """Forcing exceeds the small-data budget epsilon."""


class RadiusFloorError(ValueError):
    """Radius halving hit the floor before the smallness inequalities held."""


class RadiusEscapeError(RuntimeError):
    """An iterate left the radius-rho ball; carries the partial report."""

    def __init__(self, message: str, report: SolveReport) -> None:
        super().__init__(message)
        self.report = report


class PicardDivergenceError(RuntimeError):
    """Updates grew three times in a row; carries the partial report."""

    def __init__(self, message: str, report: SolveReport) -> None:
        super().__init__(message)
        self.report = report


class PicardConvergenceError(RuntimeError):
    """Iteration budget exhausted before the tolerance; carries the report."""

    def __init__(self, message: str, report: SolveReport) -> None:
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class PicardConfig:
    """Radius, schedule exponent, drift, data budget, and stopping control.

    Under the active schedule lam = epsilon = rho**gamma; configs built by
    hand may deviate, and ``schedule_consistent`` reports whether they do.
    """

    profile: ExponentProfile
    rho: float
    gamma: float
    lam: float
    epsilon: float
    tol: float = 1e-10
    max_iter: int = 60

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not self.gamma > 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")

    @property
    def schedule_consistent(self) -> bool:
        target = self.rho**self.gamma
        return (
            abs(self.lam - target) <= 1e-12 * max(target, 1.0)
            and abs(self.epsilon - target) <= 1e-12 * max(target, 1.0)
        )

    @classmethod
    def from_schedule(
        cls,
        profile: ExponentProfile,
        rho: float,
        gamma: float,
        tol: float = 1e-10,
        max_iter: int = 60,
    ) -> "PicardConfig":
        target = rho**gamma
        return cls(
            profile=profile,
            rho=rho,
            gamma=gamma,
            lam=target,
            epsilon=target,
            tol=tol,
            max_iter=max_iter,
        )


def smallness_terms(
    profile: ExponentProfile, rho: float, gamma: float, constant: float
) -> tuple[float, float]:
    """Left-hand sides of the two smallness inequalities at radius rho.

    The first must stay below rho (self-mapping), the second below 1/2
    (contraction).  All four schedule exponents are checked to exceed 1,
    which is what makes both sides vanish faster than rho as rho shrinks.
    """
    np1 = profile.n + 1
    exps = (
        gamma - gamma * profile.m_exponent / np1,
        2.0 - gamma * profile.theta / np1,
        2.0 - gamma * profile.zeta / np1,
        2.0 - gamma * (profile.m_exponent + profile.eta) / np1,
    )
    if min(exps) <= 1.0:
        raise ValueError(
            f"schedule exponents {exps} must all exceed 1; gamma {gamma} is "
            f"outside the admissible interval {profile.gamma_range}"
        )
    first = constant * sum(rho**e for e in exps)
    second = constant * sum(rho ** (e - 1.0) for e in exps[1:])
    return first, second


def radius_schedule(
    rho: float,
    gamma: float,
    profile: ExponentProfile,
    constant: float,
    tol: float = 1e-10,
    max_iter: int = 60,
    floor: float = 1e-8,
) -> PicardConfig:
    """Halve rho until both smallness inequalities hold, then build a config.

    ``constant`` is the fitted stand-in for the estimate constants; the
    returned config carries lam = epsilon = rho**gamma.  Raises
    :class:`RadiusFloorError` when rho reaches ``floor`` unsatisfied.
    """
    lower, upper = profile.gamma_range
    if not lower < gamma < upper:
        raise ValueError(
            f"gamma {gamma} outside the open interval ({lower}, {upper})"
        )
    if not constant > 0:
        raise ValueError(f"constant must be positive, got {constant}")
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho}")
    while rho >= floor:
        first, second = smallness_terms(profile, rho, gamma, constant)
        if first <= rho and second <= 0.5:
            return PicardConfig.from_schedule(
                profile, rho, gamma, tol=tol, max_iter=max_iter
            )
        rho *= 0.5
    raise RadiusFloorError(
        f"no radius above the floor {floor} satisfies the smallness "
        f"inequalities with constant {constant}"
    )


def driver_norm_timeperiodic(
    u: TimePeriodicField, lam: float, q: float, r: float
) -> float:
    """Wake-weighted norm of the time average plus maximal-regularity norm
    of the oscillation; the metric the time-periodic driver contracts in."""
    steady = u.steady_part()
    modes = u.modes.copy()
    modes[u.max_mode] = 0.0
    oscillation = TimePeriodicField(u.grid, u.period, modes)
    return lambda_norm(steady, lam, q, r) + maxreg_norm(oscillation, q)


def _resolve_lifting(
    lifting: LiftingField | None, grid: GridSpec, lam: float
) -> LiftingField:
    if lifting is None:
        return build_lifting(lam, default_cutoff(grid), grid)
    if lifting.grid != grid:
        raise ValueError("lifting lives on a different grid")
    # A lifting built at drift 0 is identically zero and encodes the
    # obstacle-free problem; it is valid at any drift.  Any other value
    # must match the config.
    if lifting.lambda_used != 0.0 and abs(lifting.lambda_used - lam) > 1e-12 * max(
        lam, 1.0
    ):
        raise ValueError(
            f"lifting was built for drift {lifting.lambda_used}, "
            f"config wants {lam}"
        )
    return lifting


def _check_admissible(profile: ExponentProfile, grid: GridSpec, problem: str) -> None:
    if profile.n != grid.dim:
        raise ValueError(
            f"profile dimension {profile.n} does not match grid dim {grid.dim}"
        )
    ok, violated = admissibility(profile.n, profile.q, profile.r, problem)
    if not ok:
        raise ValueError(
            f"(q, r) = ({profile.q}, {profile.r}) inadmissible for {problem}: "
            + "; ".join(violated)
        )


def _partial_report(
    cfg: PicardConfig,
    grid: GridSpec,
    updates: list[float],
    start: float,
) -> SolveReport:
    return SolveReport(
        lam=cfg.lam,
        grid_points=grid.points_per_axis,
        iterates=tuple(updates),
        contraction_rate=contraction_rate_from_updates(updates),
        final_residual=float("nan"),
        converged=False,
        residual_momentum=float("nan"),
        residual_div=float("nan"),
        wall_time_seconds=time.perf_counter() - start,
    )


def picard_steady(
    f: VectorField,
    cfg: PicardConfig,
    lifting: LiftingField | None = None,
    initial: VectorField | None = None,
) -> tuple[StokesPair, SolveReport]:
    """Fixed point of u = solve(f + nonlinearity(u)) for steady forcing.

    The default initial iterate is one linear solve of the forcing plus the
    u-independent part of the nonlinearity; any start inside the radius ball
    converges to the same fixed point at small data.
    """
    grid = f.grid
    profile = cfg.profile
    _check_admissible(profile, grid, PROBLEM_STEADY)
    q, r = profile.q, profile.r
    data_size = lq_norm(f, q) + negative_norm_surrogate(f, r)
    if data_size > cfg.epsilon * (1.0 + 1e-12):
        raise GateError(
            f"forcing size {data_size:.6e} exceeds the budget {cfg.epsilon:.6e}"
        )
    lifting = _resolve_lifting(lifting, grid, cfg.lam)
    params = OseenParams(lam=cfg.lam, lam_max=max(16.0, cfg.lam))
    start = time.perf_counter()

    if initial is None:
        forcing0 = f + nonlinearity(VectorField.zeros(grid), lifting, cfg.lam)
        pair = solve_steady(forcing0, params)
        u = pair.velocity
    else:
        if initial.grid != grid:
            raise ValueError("initial iterate lives on a different grid")
        pair = StokesPair(initial, ScalarField.zeros(grid))
        u = initial

    updates: list[float] = []
    grow_streak = 0
    converged = False
    norm_u = lambda_norm(u, cfg.lam, q, r)
    if norm_u > cfg.rho * (1.0 + 1e-9):
        raise RadiusEscapeError(
            f"initial iterate norm {norm_u:.6e} exceeds rho {cfg.rho:.6e}",
            _partial_report(cfg, grid, updates, start),
        )
    for _ in range(cfg.max_iter):
        pair_new = solve_steady(f + nonlinearity(u, lifting, cfg.lam), params)
        delta = lambda_norm(pair_new.velocity - u, cfg.lam, q, r)
        scale = lambda_norm(pair_new.velocity, cfg.lam, q, r)
        updates.append(delta)
        pair = pair_new
        u = pair_new.velocity
        if scale > cfg.rho * (1.0 + 1e-9):
            raise RadiusEscapeError(
                f"iterate norm {scale:.6e} left the ball of radius {cfg.rho:.6e}",
                _partial_report(cfg, grid, updates, start),
            )
        if delta <= cfg.tol * scale:
            converged = True
            break
        if len(updates) >= 2 and updates[-2] > 0 and delta >= updates[-2]:
            grow_streak += 1
            if grow_streak >= 3:
                raise PicardDivergenceError(
                    "update norms grew three times in a row",
                    _partial_report(cfg, grid, updates, start),
                )
        else:
            grow_streak = 0
    if not converged:
        raise PicardConvergenceError(
            f"no convergence within {cfg.max_iter} iterations",
            _partial_report(cfg, grid, updates, start),
        )

    forcing_star = f + nonlinearity(u, lifting, cfg.lam)
    certificate_pair = solve_steady(forcing_star, params)
    certificate = lambda_norm(certificate_pair.velocity - u, cfg.lam, q, r)
    res_mom, res_div = residual(pair, forcing_star, params)
    report = SolveReport(
        lam=cfg.lam,
        grid_points=grid.points_per_axis,
        iterates=tuple(updates),
        contraction_rate=contraction_rate_from_updates(updates),
        final_residual=certificate,
        converged=True,
        residual_momentum=res_mom,
        residual_div=res_div,
        wall_time_seconds=time.perf_counter() - start,
    )
    return pair, report


def picard_timeperiodic(
    f: TimePeriodicField,
    cfg: PicardConfig,
    lifting: LiftingField | None = None,
    initial: TimePeriodicField | None = None,
) -> tuple[tuple[TimePeriodicField, TimePeriodicField], SolveReport]:
    """Fixed point of the time-periodic problem; returns (velocity, pressure).

    Stopping, the radius ball, and the certificate all use the decomposed
    norm from :func:`driver_norm_timeperiodic`.
    """
    grid = f.grid
    profile = cfg.profile
    _check_admissible(profile, grid, PROBLEM_TP)
    q, r = profile.q, profile.r
    steady_forcing = f.steady_part()
    data_size = lq_norm(f, q) + negative_norm_surrogate(steady_forcing, r)
    if data_size > cfg.epsilon * (1.0 + 1e-12):
        raise GateError(
            f"forcing size {data_size:.6e} exceeds the budget {cfg.epsilon:.6e}"
        )
    lifting = _resolve_lifting(lifting, grid, cfg.lam)
    params = OseenParams(lam=cfg.lam, lam_max=max(16.0, cfg.lam))
    start = time.perf_counter()

    if initial is None:
        zero = TimePeriodicField(
            grid,
            f.period,
            np.zeros((2 * f.max_mode + 1, grid.dim) + grid.shape, dtype=complex),
        )
        forcing0 = f + nonlinearity(zero, lifting, cfg.lam)
        u, _ = solve_timeperiodic(forcing0, params)
    else:
        if initial.grid != grid or initial.period != f.period:
            raise ValueError("initial iterate is incompatible with the forcing")
        u = initial

    pressure = None
    updates: list[float] = []
    grow_streak = 0
    converged = False
    norm_u = driver_norm_timeperiodic(u, cfg.lam, q, r)
    if norm_u > cfg.rho * (1.0 + 1e-9):
        raise RadiusEscapeError(
            f"initial iterate norm {norm_u:.6e} exceeds rho {cfg.rho:.6e}",
            _partial_report(cfg, grid, updates, start),
        )
    for _ in range(cfg.max_iter):
        u_new, pressure = solve_timeperiodic(
            f + nonlinearity(u, lifting, cfg.lam), params
        )
        delta = driver_norm_timeperiodic(u_new - u, cfg.lam, q, r)
        scale = driver_norm_timeperiodic(u_new, cfg.lam, q, r)
        updates.append(delta)
        u = u_new
        if scale > cfg.rho * (1.0 + 1e-9):
            raise RadiusEscapeError(
                f"iterate norm {scale:.6e} left the ball of radius {cfg.rho:.6e}",
                _partial_report(cfg, grid, updates, start),
            )
        if delta <= cfg.tol * scale:
            converged = True
            break
        if len(updates) >= 2 and updates[-2] > 0 and delta >= updates[-2]:
            grow_streak += 1
            if grow_streak >= 3:
                raise PicardDivergenceError(
                    "update norms grew three times in a row",
                    _partial_report(cfg, grid, updates, start),
                )
        else:
            grow_streak = 0
    if not converged:
        raise PicardConvergenceError(
            f"no convergence within {cfg.max_iter} iterations",
            _partial_report(cfg, grid, updates, start),
        )

    forcing_star = f + nonlinearity(u, lifting, cfg.lam)
    u_check, pressure = solve_timeperiodic(forcing_star, params)
    certificate = driver_norm_timeperiodic(u_check - u, cfg.lam, q, r)
    res_mom, res_div = residual_timeperiodic(u, pressure, forcing_star, params)
    report = SolveReport(
        lam=cfg.lam,
        grid_points=grid.points_per_axis,
        iterates=tuple(updates),
        contraction_rate=contraction_rate_from_updates(updates),
        final_residual=certificate,
        converged=True,
        residual_momentum=res_mom,
        residual_div=res_div,
        wall_time_seconds=time.perf_counter() - start,
    )
    return (u, pressure), report
