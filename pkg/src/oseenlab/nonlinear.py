"""Quadratic momentum nonlinearity around the lifting, and its time split.

The nonlinearity of the perturbation u around the lifting field is

    -(u . grad)u - (u . grad)V - (V . grad)u - (V . grad)V
    + laplacian(V) - lam * d1(V).

Band-limited factors follow the truncate-multiply-truncate dealiasing
pattern.  The lifting V and its derivative arrays are exact closed-form
samples (not band-limited), so they enter products at full resolution and
only the product is re-truncated; the V-only terms are added raw.

Time-periodic input is multiplied in physical time: the field is sampled
on 4K+1 uniform instants (enough to hold the full quadratic band), the
pointwise nonlinearity is formed per instant, and the result is projected
back to |k| <= K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import GridSpec, TimePeriodicField, VectorField, _fftn, _ifftn
from .lifting import LiftingField


def _truncate_samples(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    return _ifftn(_fftn(values, grid.dim) * grid.dealias_mask, grid.dim).real


def _convective(grid: GridSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(a . grad) b with truncated inputs and a truncated product."""
    mask = grid.dealias_mask
    a_t = _ifftn(_fftn(a, grid.dim) * mask, grid.dim).real
    b_hat = _fftn(b, grid.dim) * mask
    acc = np.zeros(a.shape)
    for k in range(grid.dim):
        db = _ifftn(b_hat * (1j * grid.wavenumber(k)), grid.dim).real
        acc = acc + a_t[k] * db
    return _truncate_samples(grid, acc)


def _advect_lifting(grid: GridSpec, a: np.ndarray, jacobian: np.ndarray) -> np.ndarray:
    """(a . grad) V from the exact lifting jacobian."""
    a_t = _truncate_samples(grid, a)
    acc = np.zeros(a.shape)
    for k in range(grid.dim):
        acc = acc + a_t[k] * jacobian[:, k]
    return _truncate_samples(grid, acc)


def _lifting_advect(grid: GridSpec, lifting_values: np.ndarray, b: np.ndarray) -> np.ndarray:
    """(V . grad) b with the exact lifting samples."""
    b_hat = _fftn(b, grid.dim) * grid.dealias_mask
    acc = np.zeros(b.shape)
    for k in range(grid.dim):
        db = _ifftn(b_hat * (1j * grid.wavenumber(k)), grid.dim).real
        acc = acc + lifting_values[k] * db
    return _truncate_samples(grid, acc)


def _lifting_self_advection(lifting: LiftingField) -> np.ndarray:
    grid = lifting.grid
    values = lifting.velocity.components
    acc = np.zeros(values.shape)
    for k in range(grid.dim):
        acc = acc + values[k] * lifting.jacobian[:, k]
    return _truncate_samples(grid, acc)


def _lifting_only_terms(lifting: LiftingField, lam: float) -> np.ndarray:
    """-(V . grad)V + laplacian(V) - lam * d1(V), the u-independent forcing."""
    return (
        -_lifting_self_advection(lifting)
        + lifting.laplacian
        - lam * lifting.jacobian[:, 0]
    )


def _check_inputs(u_grid: GridSpec, lifting: LiftingField, lam: float) -> None:
    if u_grid != lifting.grid:
        raise ValueError("field and lifting live on different grids")
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")


def _quadratic_samples(
    grid: GridSpec, a: np.ndarray, lifting: LiftingField
) -> np.ndarray:
    """(a . grad)a + (a . grad)V + (V . grad)a for one physical sample."""
    return (
        _convective(grid, a, a)
        + _advect_lifting(grid, a, lifting.jacobian)
        + _lifting_advect(grid, lifting.velocity.components, a)
    )


def nonlinearity(
    u: VectorField | TimePeriodicField,
    lifting: LiftingField,
    lam: float | None = None,
) -> VectorField | TimePeriodicField:
    """Evaluate the nonlinearity; output matches the shape of ``u``.

    ``lam`` defaults to the drift coefficient the lifting was built with.
    """
    if lam is None:
        lam = lifting.lambda_used
    if isinstance(u, VectorField):
        _check_inputs(u.grid, lifting, lam)
        grid = u.grid
        quad = _quadratic_samples(grid, u.components, lifting)
        return VectorField(grid, -quad + _lifting_only_terms(lifting, lam))
    if isinstance(u, TimePeriodicField):
        _check_inputs(u.grid, lifting, lam)
        grid = u.grid
        if u.ncomp != grid.dim:
            raise ValueError("time-periodic input must be vector-valued")
        num_samples = 4 * u.max_mode + 1
        samples = u.sample_times(num_samples)
        conv = np.empty_like(samples)
        for j in range(num_samples):
            conv[j] = _quadratic_samples(grid, samples[j], lifting)
        quad_tp = TimePeriodicField.from_time_samples(
            grid, u.period, conv, u.max_mode
        )
        modes = -quad_tp.modes
        modes[u.max_mode] = modes[u.max_mode] + _lifting_only_terms(lifting, lam)
        return TimePeriodicField(grid, u.period, modes)
    raise TypeError(f"cannot evaluate the nonlinearity of {type(u).__name__}")


@dataclass(frozen=True)
class NonlinearitySplit:
    """Steady/oscillatory decomposition of the nonlinearity.

    ``steady_terms`` and ``oscillatory_terms`` hold the individual summands
    (signs included), keyed by structure; their sums are ``steady`` and
    ``oscillatory``.
    """

    steady: VectorField
    oscillatory: TimePeriodicField
    steady_terms: dict[str, VectorField]
    oscillatory_terms: dict[str, TimePeriodicField]


def _oscillatory_from_samples(
    grid: GridSpec, period: float, samples: np.ndarray, max_mode: int
) -> TimePeriodicField:
    tp = TimePeriodicField.from_time_samples(grid, period, samples, max_mode)
    modes = tp.modes.copy()
    modes[max_mode] = 0.0
    return TimePeriodicField(grid, period, modes)


def split_nonlinearity(
    u: TimePeriodicField, lifting: LiftingField, lam: float | None = None
) -> NonlinearitySplit:
    """Time-average part and zero-average part of the nonlinearity.

    With v the time average of u and w its oscillation, the steady part
    collects the seven time-constant summands and the oscillatory part the
    five zero-average ones; adding the two reproduces
    :func:`nonlinearity` up to round-off.
    """
    if lam is None:
        lam = lifting.lambda_used
    _check_inputs(u.grid, lifting, lam)
    grid = u.grid
    if u.ncomp != grid.dim:
        raise ValueError("time-periodic input must be vector-valued")
    max_mode = u.max_mode
    num_samples = 4 * max_mode + 1
    v = u.mode(0).real
    samples = u.sample_times(num_samples)
    w_samples = samples - v[None]

    lifting_values = lifting.velocity.components
    v_adv_v = _convective(grid, v, v)
    v_adv_lift = _advect_lifting(grid, v, lifting.jacobian)
    lift_adv_v = _lifting_advect(grid, lifting_values, v)
    lift_adv_lift = _lifting_self_advection(lifting)

    v_adv_w = np.empty_like(samples)
    w_adv_v = np.empty_like(samples)
    w_adv_w = np.empty_like(samples)
    w_adv_lift = np.empty_like(samples)
    lift_adv_w = np.empty_like(samples)
    for j in range(num_samples):
        w_j = w_samples[j]
        v_adv_w[j] = _convective(grid, v, w_j)
        w_adv_v[j] = _convective(grid, w_j, v)
        w_adv_w[j] = _convective(grid, w_j, w_j)
        w_adv_lift[j] = _advect_lifting(grid, w_j, lifting.jacobian)
        lift_adv_w[j] = _lifting_advect(grid, lifting_values, w_j)

    w_adv_w_tp = TimePeriodicField.from_time_samples(
        grid, u.period, w_adv_w, max_mode
    )
    w_adv_w_mean = w_adv_w_tp.mode(0).real
    w_adv_w_osc_modes = w_adv_w_tp.modes.copy()
    w_adv_w_osc_modes[max_mode] = 0.0

    steady_terms = {
        "v_adv_v": VectorField(grid, -v_adv_v),
        "w_adv_w_mean": VectorField(grid, -w_adv_w_mean),
        "v_adv_lift": VectorField(grid, -v_adv_lift),
        "lift_adv_v": VectorField(grid, -lift_adv_v),
        "lift_adv_lift": VectorField(grid, -lift_adv_lift),
        "lift_laplacian": VectorField(grid, lifting.laplacian.copy()),
        "lift_drift": VectorField(grid, -lam * lifting.jacobian[:, 0]),
    }
    oscillatory_terms = {
        "v_adv_w": -_oscillatory_from_samples(grid, u.period, v_adv_w, max_mode),
        "w_adv_v": -_oscillatory_from_samples(grid, u.period, w_adv_v, max_mode),
        "w_adv_w_osc": -TimePeriodicField(grid, u.period, w_adv_w_osc_modes),
        "w_adv_lift": -_oscillatory_from_samples(
            grid, u.period, w_adv_lift, max_mode
        ),
        "lift_adv_w": -_oscillatory_from_samples(
            grid, u.period, lift_adv_w, max_mode
        ),
    }

    steady = VectorField.zeros(grid)
    for term in steady_terms.values():
        steady = steady + term
    oscillatory = TimePeriodicField(
        grid, u.period, np.zeros((2 * max_mode + 1, grid.dim) + grid.shape, complex)
    )
    for term in oscillatory_terms.values():
        oscillatory = oscillatory + term
    return NonlinearitySplit(
        steady=steady,
        oscillatory=oscillatory,
        steady_terms=steady_terms,
        oscillatory_terms=oscillatory_terms,
    )


def convective_product(
    a: VectorField | TimePeriodicField,
    b: VectorField | TimePeriodicField,
) -> VectorField | TimePeriodicField:
    """Dealiased (a . grad) b for steady or time-periodic operands.

    Steady operands give a VectorField.  With a time-periodic operand the
    product is formed in physical time on exactly enough uniform instants to
    hold the combined band and returned with the summed mode count, so no
    time truncation happens here (unlike the nonlinearity operator, which
    projects back to the input band).
    """
    if a.grid != b.grid:
        raise ValueError("operands live on different grids")
    grid = a.grid
    a_tp = isinstance(a, TimePeriodicField)
    b_tp = isinstance(b, TimePeriodicField)
    if not a_tp and not b_tp:
        return VectorField(grid, _convective(grid, a.components, b.components))
    if a_tp and b_tp and a.period != b.period:
        raise ValueError("operands have different periods")
    period = a.period if a_tp else b.period
    k_out = (a.max_mode if a_tp else 0) + (b.max_mode if b_tp else 0)
    num_samples = 2 * k_out + 1
    shape = (num_samples, grid.dim) + grid.shape
    a_samples = a.sample_times(num_samples) if a_tp else np.broadcast_to(a.components, shape)
    b_samples = b.sample_times(num_samples) if b_tp else np.broadcast_to(b.components, shape)
    out = np.empty(shape)
    for j in range(num_samples):
        out[j] = _convective(grid, a_samples[j], b_samples[j])
    return TimePeriodicField.from_time_samples(grid, period, out, k_out)
