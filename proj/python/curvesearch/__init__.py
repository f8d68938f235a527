"""Derivative-free saddle-escape search: Python front end over the C++ core."""

from __future__ import annotations

import json
import pkgutil
from typing import Any, Mapping

# Lets an in-tree build directory supply the compiled _core module.
__path__ = pkgutil.extend_path(__path__, __name__)

from . import _core  # noqa: E402
from ._core import (  # noqa: E402
    ConfigError,
    Error,
    InvalidArgument,
    NumericalError,
    UnsupportedOracle,
    cap_lower_bound,
    cap_upper_bound,
    dfpi_alignment,
    escape_lower_bound,
    escape_probability_grid,
    integral_bounds_check,
    preset_names,
    sphere_cap_bounds_check,
)

__all__ = [
    "ConfigError",
    "Error",
    "InvalidArgument",
    "NumericalError",
    "UnsupportedOracle",
    "cap_lower_bound",
    "cap_upper_bound",
    "dfpi_alignment",
    "escape_lower_bound",
    "escape_probability_grid",
    "integral_bounds_check",
    "preset_names",
    "run_experiment",
    "sphere_cap_bounds_check",
]


def run_experiment(config: Mapping[str, Any] | str, threads: int = 1) -> list[dict]:
    """Run every (algorithm, seed) pair of a config.

    `config` is a config document as a mapping or JSON text. Each returned
    dict holds the run metadata, per-iteration columns and `final_x`.
    """
    text = config if isinstance(config, str) else json.dumps(config)
    return _core.run_experiment(text, threads)
