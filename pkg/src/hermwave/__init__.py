"""Hermite solvers for the scalar wave equation on staggered grids."""

from .boundary import BoundarySpec, BoundarySpec2D, ghost_data, ghost_data_2d
from .conservative import (
    bootstrap_first_half,
    conservative_update_1d,
    conservative_update_2d,
    full_step_conservative,
    pascal_table,
)
from .diagnostics import (
    ErrorReport,
    conservative_energy,
    conserved_pair,
    dissipative_energy,
    field_interpolant,
    fit_rate,
    l2_error_field,
    l2_error_field_2d,
    l2_errors_pair,
    seminorm_sq,
)
from .dissipative import (
    SchemeConfig,
    eval_series,
    expand_taylor,
    expand_taylor_2d,
    half_step_1d,
    half_step_2d,
)
from .driver import (
    ConfigError,
    NumericalError,
    RunConfig,
    make_config,
    parse_config,
    run_experiment,
    run_gaussian_1d,
    run_conservation_1d,
    run_planewave_2d,
)
from .grid import (
    DUAL,
    PRIMAL,
    Field1D,
    Field2D,
    FieldPair,
    Grid1D,
    Grid2D,
    TwoLevelState,
)
from .interp import apply_interp, apply_interp_2d, interp_matrix, interpolate_1d, interpolate_2d
from .poly import CellPolynomial, CellPolynomial2D, PiecewisePolynomial, shift

__version__ = "0.1.0"

__all__ = [
    "BoundarySpec", "BoundarySpec2D", "ghost_data", "ghost_data_2d",
    "bootstrap_first_half", "conservative_update_1d", "conservative_update_2d",
    "full_step_conservative", "pascal_table",
    "ErrorReport", "conservative_energy", "conserved_pair", "dissipative_energy",
    "field_interpolant", "fit_rate", "l2_error_field", "l2_error_field_2d",
    "l2_errors_pair", "seminorm_sq",
    "SchemeConfig", "eval_series", "expand_taylor", "expand_taylor_2d",
    "half_step_1d", "half_step_2d",
    "ConfigError", "NumericalError", "RunConfig", "make_config", "parse_config",
    "run_experiment", "run_gaussian_1d", "run_conservation_1d", "run_planewave_2d",
    "DUAL", "PRIMAL", "Field1D", "Field2D", "FieldPair", "Grid1D", "Grid2D",
    "TwoLevelState",
    "apply_interp", "apply_interp_2d", "interp_matrix", "interpolate_1d",
    "interpolate_2d",
    "CellPolynomial", "CellPolynomial2D", "PiecewisePolynomial", "shift",
]
