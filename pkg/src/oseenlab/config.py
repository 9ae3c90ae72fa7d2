"""INI-file experiment configuration.

One ``[experiment]`` section describes a run.  The drift sweep comes either
from an explicit comma-separated ``lambda_grid`` (which wins when both are
present) or from log-spaced ``lambda_min`` / ``lambda_max`` /
``lambda_points``.  Every other key has the library default.
"""

from __future__ import annotations

import configparser
import math

import numpy as np

from .fields import GridSpec
from .harness import ExperimentConfig

_SECTION = "experiment"

_KNOWN_KEYS = {
    "name",
    "dim",
    "points",
    "half_period",
    "q",
    "r",
    "lambda_grid",
    "lambda_min",
    "lambda_max",
    "lambda_points",
    "lambda_ceiling",
    "period",
    "time_modes",
    "seed",
    "samples",
    "rho",
    "gamma",
    "tol",
    "c_wake",
    "inner_radius",
    "outer_radius",
    "mode_cap",
    "forcing_shell",
    "drift_mode_cap",
    "out",
}


def log_spaced(lo: float, hi: float, count: int) -> tuple[float, ...]:
    """Logarithmically spaced sweep, endpoints exact."""
    if count < 2:
        raise ValueError(f"a sweep needs at least 2 points, got {count}")
    if not 0 < lo < hi:
        raise ValueError(f"need 0 < lambda_min < lambda_max, got [{lo}, {hi}]")
    values = np.exp(np.linspace(math.log(lo), math.log(hi), count))
    values[0], values[-1] = lo, hi
    return tuple(float(v) for v in values)


def _parse_lambda_grid(section) -> tuple[float, ...]:
    raw = section.get("lambda_grid", fallback=None)
    if raw:
        return tuple(float(token) for token in raw.split(",") if token.strip())
    if "lambda_min" not in section or "lambda_max" not in section:
        raise ValueError(
            "set either lambda_grid or lambda_min/lambda_max/lambda_points"
        )
    return log_spaced(
        section.getfloat("lambda_min"),
        section.getfloat("lambda_max"),
        section.getint("lambda_points", fallback=7),
    )


def parse_config(path) -> ExperimentConfig:
    """Load an :class:`~oseenlab.harness.ExperimentConfig` from an INI file."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(f"config file not found: {path}")
    if _SECTION not in parser:
        raise ValueError(f"config file needs an [{_SECTION}] section: {path}")
    section = parser[_SECTION]
    unknown = set(section) - _KNOWN_KEYS
    if unknown:
        raise ValueError(
            f"unknown config keys: {', '.join(sorted(unknown))}"
        )
    if "name" not in section:
        raise ValueError("the [experiment] section needs a 'name' key")
    grid = GridSpec(
        dim=section.getint("dim", fallback=3),
        half_period=section.getfloat("half_period", fallback=math.pi),
        points_per_axis=section.getint("points", fallback=32),
    )
    shell_raw = section.get("forcing_shell", fallback=None)
    shell = None
    if shell_raw:
        parts = [float(token) for token in shell_raw.split(",") if token.strip()]
        if len(parts) != 2:
            raise ValueError(
                f"forcing_shell needs two comma-separated radii, got {shell_raw!r}"
            )
        shell = (parts[0], parts[1])

    def optfloat(key):
        return section.getfloat(key) if key in section else None

    def optint(key):
        return section.getint(key) if key in section else None

    return ExperimentConfig(
        experiment=section["name"].strip(),
        grid=grid,
        lambda_grid=_parse_lambda_grid(section),
        q=section.getfloat("q", fallback=2.0),
        r=section.getfloat("r", fallback=2.0),
        period=section.getfloat("period", fallback=2.0 * math.pi),
        time_modes=section.getint("time_modes", fallback=1),
        seed=section.getint("seed", fallback=0),
        sample_count=section.getint("samples", fallback=100),
        rho=section.getfloat("rho", fallback=0.05),
        gamma=optfloat("gamma"),
        tol=section.getfloat("tol", fallback=1e-10),
        lambda_ceiling=section.getfloat("lambda_ceiling", fallback=16.0),
        c_wake=optfloat("c_wake"),
        inner_radius=optfloat("inner_radius"),
        outer_radius=optfloat("outer_radius"),
        mode_cap=optint("mode_cap"),
        forcing_shell=shell,
        drift_mode_cap=optint("drift_mode_cap"),
        output_path=section.get("out", fallback=None),
    )
