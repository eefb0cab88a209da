"""Scenario x technology x maturity tables (spreads and net-zero capacity)."""

from typing import Callable, Mapping, Sequence, Union

from constants import MATURITY_ALL, NA_MARKER
from domain import ScenarioId, TechnologyCase
from netzero import NetZeroSolution

Maturity = Union[int, str]


def maturity_label(maturity: Maturity) -> str:
    return MATURITY_ALL if maturity == MATURITY_ALL else f"{maturity}y"


def get_grid_columns(maturities: Sequence[Maturity]) -> list[str]:
    return ["case", "technology", "scenario"] + [maturity_label(m) for m in maturities]


def format_spread(bps: float) -> str:
    """Whole basis points."""
    return str(int(round(bps)))


def format_capacity(solution: NetZeroSolution) -> str:
    """MT/yr to 0.1, or NA when no capacity reaches net-zero."""
    if not solution.solved:
        return NA_MARKER
    return f"{solution.capacity:.1f}"


def get_grid_rows(
    cases: Sequence[TechnologyCase],
    scenarios: Sequence[ScenarioId],
    maturities: Sequence[Maturity],
    results: Mapping[tuple, object],
    formatter: Callable[[object], str],
) -> list[list[str]]:
    """One row per case and scenario, in the given order.

    ``results`` is keyed by (case_id, scenario name, maturity).
    """
    rows = []
    for case in cases:
        for scenario in scenarios:
            values = [formatter(results[(case.case_id, scenario.name, m)]) for m in maturities]
            rows.append([case.case_id, case.name, scenario.label] + values)
    return rows
