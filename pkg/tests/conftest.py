"""Shared fixtures: flat curves, a zero-inflation index and sample cases."""

from datetime import date
from pathlib import Path

import pytest

from curves import CarbonPriceCurve, InflationIndex, build_discount_curve
from domain import ScenarioId, TechnologyCase

REPO = Path(__file__).resolve().parent.parent
DATA = REPO / "data"

# Jan 1 start: anniversaries are whole decimal years apart
START = date(2022, 1, 1)


def flat_price_curve(price: float, index: InflationIndex, name: str = "Flat", horizon: date = date(2200, 1, 1)) -> CarbonPriceCurve:
    return CarbonPriceCurve(ScenarioId(name), ((date(2020, 1, 1), price),), index, horizon)


def make_case(**overrides) -> TechnologyCase:
    values = dict(
        case_id="01",
        name="Ultra-supercritical coal (USC)",
        size=650,
        capital_cost=2.552,
        develop=24,
        build=36,
        lifespan=40,
        capacity_factor=0.85,
        carbon_per_year=3.91,
        carbon_to_build=1.37,
    )
    values.update(overrides)
    return TechnologyCase(**values)


@pytest.fixture
def start() -> date:
    return START


@pytest.fixture
def zero_curve():
    return build_discount_curve(START, [(200, 0.0)])


@pytest.fixture
def flat_index() -> InflationIndex:
    """Zero inflation from 2010 onwards."""
    return InflationIndex(base_year=2010, factors=((2010, 100.0), (2011, 100.0)), tail_rate=0.0)


@pytest.fixture
def coal_case() -> TechnologyCase:
    return make_case()


@pytest.fixture
def repo_data() -> Path:
    return DATA
