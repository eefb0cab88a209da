"""Report sections for the CEP pricing engine."""

from .provenance import file_sha256, get_header_lines, get_provenance
from .grid import format_capacity, format_spread, get_grid_columns, get_grid_rows, maturity_label
from .checks import SANITY_COLUMNS, get_sanity_row
from .series import (
    CPI_SERIES_COLUMNS,
    EMISSION_PATH_COLUMNS,
    NET_SERIES_COLUMNS,
    PROFILE_COLUMNS,
    SCENARIO_SERIES_COLUMNS,
    get_cpi_series,
    get_emission_path_series,
    get_net_series,
    get_permanence_columns,
    get_permanence_rows,
    get_profile_series,
    get_scenario_series,
)

__all__ = [
    # Provenance
    "file_sha256",
    "get_header_lines",
    "get_provenance",
    # Grid tables
    "format_capacity",
    "format_spread",
    "get_grid_columns",
    "get_grid_rows",
    "maturity_label",
    # Checks
    "SANITY_COLUMNS",
    "get_sanity_row",
    # Series
    "CPI_SERIES_COLUMNS",
    "EMISSION_PATH_COLUMNS",
    "NET_SERIES_COLUMNS",
    "PROFILE_COLUMNS",
    "SCENARIO_SERIES_COLUMNS",
    "get_cpi_series",
    "get_emission_path_series",
    "get_net_series",
    "get_permanence_columns",
    "get_permanence_rows",
    "get_profile_series",
    "get_scenario_series",
]
