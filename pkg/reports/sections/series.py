"""Plot-ready series sections: curves, CPI, emission profiles and permanence."""

from datetime import date
from typing import Mapping, Sequence

import numpy as np

from constants import NA_MARKER
from curves import InflationIndex, NetCostCurve, PriceCurve
from domain import DateGrid, add_months, decimal_year
from emissions import EmissionProfile
from permanence import PermanencePoint

SCENARIO_SERIES_COLUMNS = ["date", "scenario", "usd_per_tonne"]
NET_SERIES_COLUMNS = ["date", "technology", "bound", "usd_per_tonne"]
CPI_SERIES_COLUMNS = ["year", "level", "source"]
PROFILE_COLUMNS = ["case", "phase", "start", "end", "tonnes_per_year", "tonnes"]
EMISSION_PATH_COLUMNS = ["case", "date", "tonnes_per_year", "cumulative_tonnes"]
PERMANENCE_COLUMNS = ["date", "technology", "raw_cost", "permanence_add_on", "adjusted_cost"]
PERMANENCE_MC_COLUMNS = ["mc_add_on", "mc_stderr"]


def _anniversaries(as_of: date, years: int) -> list[date]:
    return [add_months(as_of, 12 * k) for k in range(years + 1)]


def get_scenario_series(curves: Mapping[str, PriceCurve], labels: Mapping[str, str], as_of: date, years: int) -> list[list[str]]:
    """Nominal price per scenario on each anniversary inside the curve horizon."""
    rows = []
    for name, curve in curves.items():
        for d in _anniversaries(as_of, years):
            if decimal_year(d) > curve.horizon_t:
                break
            rows.append([d.isoformat(), labels.get(name, name), f"{curve.price_t(decimal_year(d)):.2f}"])
    return rows


def get_net_series(net_curves: Sequence[NetCostCurve], as_of: date, years: int) -> list[list[str]]:
    rows = []
    for curve in net_curves:
        for d in _anniversaries(as_of, years):
            cost = curve.cost_t(decimal_year(d))
            rows.append([d.isoformat(), curve.technology, curve.bound, NA_MARKER if np.isnan(cost) else f"{cost:.2f}"])
    return rows


def get_cpi_series(index: InflationIndex) -> list[list[str]]:
    observed = index.observed_until if index.observed_until is not None else index.years[-1]
    return [[str(year), f"{level:.4f}", "history" if year <= observed else "swap-implied"] for year, level in index.factors]


def get_profile_series(profiles: Sequence[EmissionProfile]) -> list[list[str]]:
    """Emission steps per case, one row per phase."""
    rows = []
    for profile in profiles:
        for seg in profile.segments:
            rows.append([profile.case_id, seg.phase, seg.start.isoformat(), seg.end.isoformat(), f"{seg.rate:.1f}", f"{seg.tonnes:.1f}"])
    return rows


def get_emission_path_series(profiles: Sequence[EmissionProfile]) -> list[list[str]]:
    """Monthly emission rate and running total per case, first to last emission date."""
    rows = []
    for profile in profiles:
        grid = DateGrid.spanning(profile.start, profile.end)
        x = grid.times()
        for d, rate, total in zip(grid.dates(), profile.rate_t(x), profile.cumulative_t(x)):
            rows.append([profile.case_id, d.isoformat(), f"{rate:.1f}", f"{total:.1f}"])
    return rows


def get_permanence_columns(with_mc: bool) -> list[str]:
    return PERMANENCE_COLUMNS + (PERMANENCE_MC_COLUMNS if with_mc else [])


def get_permanence_rows(points: Sequence[PermanencePoint], with_mc: bool) -> list[list[str]]:
    rows = []
    for p in points:
        row = [p.date.isoformat(), p.technology, f"{p.raw_cost:.2f}", f"{p.add_on:.2f}", f"{p.adjusted_cost:.2f}"]
        if with_mc:
            row += [f"{p.mc_mean:.2f}", f"{p.mc_stderr:.2f}"]
        rows.append(row)
    return rows
