import math
from datetime import date

import numpy as np
import pytest

from conftest import START, flat_price_curve
from curves import (
    DiscountCurve,
    NetCostCurve,
    NetTechnology,
    build_carbon_curve,
    build_discount_curve,
    build_inflation_index,
    build_net_cost_curve,
    cheapest_net,
    cheapest_net_t,
    inflation_adjust,
    load_cpi,
    load_net_table,
    load_rates,
    load_scenarios,
)
from domain import ScenarioId, decimal_year
from errors import CurveError, DataError, UnavailableError, ValidationError

FOREST = NetTechnology("Forest", 2021, 5, 50)
BECCS = NetTechnology("BECCS", 2050, 100, 200)
SOIL = NetTechnology("Soil carbon", 2050, 0, 100)


def two_percent_index():
    return build_inflation_index({2010: 100.0}, swaps=[(1, 0.02), (60, 0.02)])


# Discount curve


def test_discount_is_one_at_as_of():
    curve = build_discount_curve(START, [(10, 0.03)])
    assert curve.discount(START) == 1.0


def test_flat_curve_with_spread():
    curve = build_discount_curve(START, [(30, 0.0)], spread_bps=157)
    assert curve.discount(date(2027, 1, 1)) == pytest.approx(math.exp(-0.0157 * 5))
    assert curve.zero_rate(date(2027, 1, 1)) == pytest.approx(0.0157)


def test_log_linear_between_knots():
    curve = build_discount_curve(START, [(1, 0.01), (2, 0.02)])
    d = date(2023, 7, 2)
    tau = decimal_year(d) - 2022
    rt = np.interp(tau, [0, 1, 2], [0, 0.01, 0.04])
    assert curve.discount(d) == pytest.approx(math.exp(-rt))


def test_terminal_rate_held_flat():
    curve = build_discount_curve(START, [(5, 0.01), (10, 0.03)])
    assert curve.zero_rate(date(2042, 1, 1)) == pytest.approx(0.03)
    assert curve.zero_rate(date(2072, 1, 1)) == pytest.approx(0.03)


def test_forward_discount():
    curve = build_discount_curve(START, [(1, 0.01), (10, 0.02)])
    t, u = 2025.0, 2030.0
    assert curve.forward_discount_t(t, u) == pytest.approx(curve.discount_t(u) / curve.discount_t(t))


def test_with_spread_shifts_zero_rates():
    curve = build_discount_curve(START, [(1, 0.01), (10, 0.02)])
    d = date(2027, 1, 1)
    assert curve.with_spread(157).zero_rate(d) == pytest.approx(curve.zero_rate(d) + 0.0157)


def test_discount_before_as_of_raises():
    curve = build_discount_curve(START, [(10, 0.01)])
    with pytest.raises(CurveError):
        curve.discount(date(2021, 6, 1))


@pytest.mark.parametrize("rates", [[], [(2, 0.01), (1, 0.01)], [(0, 0.01)]])
def test_bad_tenors(rates):
    with pytest.raises(CurveError):
        build_discount_curve(START, rates)


def test_negative_forwards_are_allowed(caplog):
    curve = build_discount_curve(START, [(1, 0.03), (2, 0.005)])
    assert curve.discount(date(2024, 1, 1)) > curve.discount(date(2023, 1, 1))
    assert "negative forward" in caplog.text


def test_discount_curve_needs_knots():
    with pytest.raises(CurveError):
        DiscountCurve(START, ())


# Inflation index


def test_swap_projection():
    index = build_inflation_index({2010: 100.0, 2011: 102.0}, swaps=[(1, 0.02), (10, 0.02)])
    assert index.level(2021.0) == pytest.approx(102 * 1.02**10)
    assert index.observed_until == 2011
    # tail continues at the longest-tenor rate
    assert index.level(2031.0) == pytest.approx(102 * 1.02**20)


def test_level_is_log_linear_within_a_year():
    index = build_inflation_index({2010: 100.0, 2011: 102.0}, swaps=[(1, 0.02)])
    assert index.level(2011.5) == pytest.approx(102 * math.sqrt(1.02))


def test_level_before_first_year_raises():
    with pytest.raises(CurveError):
        two_percent_index().level(2009.0)


def test_inflation_adjust():
    index = two_percent_index()
    assert inflation_adjust(50, 2010, date(2020, 1, 1), index) == pytest.approx(50 * 1.02**10)
    with pytest.raises(CurveError):
        inflation_adjust(50, 2005, date(2020, 1, 1), index)


@pytest.mark.parametrize("target", [date(2011, 6, 1), date(2030, 1, 1), 2041.25])
def test_inflation_adjust_is_additive(target):
    index = build_inflation_index({2010: 100.0, 2011: 103.2, 2012: 105.3}, swaps=[(1, 0.03), (30, 0.02)])
    a, b = 37.5, 112.25
    combined = inflation_adjust(a + b, 2010, target, index)
    assert combined == pytest.approx(inflation_adjust(a, 2010, target, index) + inflation_adjust(b, 2010, target, index), rel=1e-12)


def test_swap_tenors_must_increase():
    with pytest.raises(DataError):
        build_inflation_index({2010: 100.0}, swaps=[(5, 0.02), (1, 0.02)])


# Carbon price curves


def test_single_knot_extrapolates_constant_real():
    index = two_percent_index()
    curve = build_carbon_curve([(2050, 50.0)], ScenarioId("X"), index, horizon=date(2100, 1, 1))
    x = 50 * 1.02**40
    assert curve.price(date(2050, 1, 1)) == pytest.approx(x)
    assert curve.price(date(2060, 1, 1)) == pytest.approx(x * 1.02**10)
    # held flat before the first knot
    assert curve.price(date(2030, 1, 1)) == pytest.approx(x)


def test_linear_between_knots(flat_index):
    curve = build_carbon_curve([(2030, 10.0), (2040, 30.0)], ScenarioId("X"), flat_index, horizon=date(2100, 1, 1))
    assert curve.price(date(2035, 1, 1)) == pytest.approx(20.0)
    assert curve.price_t(np.array([2030.0, 2040.0, 2050.0])) == pytest.approx([10.0, 30.0, 30.0])


def test_query_past_horizon_raises(flat_index):
    curve = flat_price_curve(10.0, flat_index, horizon=date(2050, 1, 1))
    with pytest.raises(CurveError):
        curve.price(date(2051, 1, 1))


def test_negative_price_rejected(flat_index):
    with pytest.raises(ValidationError):
        build_carbon_curve([(2030, -1.0)], ScenarioId("X"), flat_index, horizon=date(2100, 1, 1))


def test_unsorted_years_rejected(flat_index):
    with pytest.raises(DataError):
        build_carbon_curve([(2040, 1.0), (2030, 2.0)], ScenarioId("X"), flat_index, horizon=date(2100, 1, 1))


# NET cost curves


def test_emerging_net_multiplier(flat_index):
    curve = build_net_cost_curve(BECCS, "low", flat_index, START)
    assert curve.cost(date(2030, 1, 1)) == pytest.approx(600.0)
    assert curve.cost(date(2040, 1, 1)) == pytest.approx(350.0)
    assert curve.cost(date(2050, 1, 1)) == pytest.approx(100.0)
    assert curve.cost(date(2070, 1, 1)) == pytest.approx(100.0)


def test_emerging_net_unavailable_before_2030(flat_index):
    curve = build_net_cost_curve(BECCS, "high", flat_index, START)
    assert not curve.is_available(date(2029, 12, 1))
    assert math.isnan(curve.cost_t(2025.0))
    with pytest.raises(UnavailableError):
        curve.cost(date(2025, 1, 1))


def test_mature_net_available_now(flat_index):
    curve = build_net_cost_curve(FOREST, "mid", flat_index, START)
    assert curve.available_from == 2021
    assert curve.cost(START) == pytest.approx(27.5)


def test_net_cost_follows_inflation():
    index = two_percent_index()
    curve = build_net_cost_curve(FOREST, "high", index, START)
    assert curve.cost(date(2021, 1, 1)) == pytest.approx(50 * 1.02**10)


def test_net_cost_needs_2011_level():
    index = build_inflation_index({2015: 100.0})
    with pytest.raises(CurveError):
        NetCostCurve("Forest", "low", 2021, 5.0, index, available_from=2021)


def test_unknown_bound():
    with pytest.raises(ValidationError):
        FOREST.base_cost("median")


def test_cheapest_net(flat_index):
    curves = [build_net_cost_curve(t, "low", flat_index, START) for t in (FOREST, BECCS, SOIL)]
    assert cheapest_net(date(2025, 1, 1), curves) == ("Forest", pytest.approx(5.0))
    assert cheapest_net(date(2060, 1, 1), curves) == ("Soil carbon", pytest.approx(0.0))


def test_cheapest_net_ties_go_to_first_curve(flat_index):
    twin = NetTechnology("Forest twin", 2021, 5, 50)
    curves = [build_net_cost_curve(t, "low", flat_index, START) for t in (FOREST, twin)]
    assert cheapest_net(START, curves)[0] == "Forest"


def test_cheapest_net_nothing_available(flat_index):
    curves = [build_net_cost_curve(BECCS, "low", flat_index, START)]
    with pytest.raises(UnavailableError):
        cheapest_net(date(2025, 1, 1), curves)
    best, which = cheapest_net_t(np.array([2025.0, 2035.0]), curves)
    assert math.isnan(best[0]) and which[0] == -1
    assert which[1] == 0


# Loaders


def test_load_bundled_market_data(repo_data):
    scenarios = load_scenarios(repo_data / "scenarios.csv")
    assert [s.name for s in scenarios] == ["DelayedTransition", "NDC", "NetZero2050"]
    assert scenarios[ScenarioId("NDC")][0] == (2020, 15.0)
    assert len(load_rates(repo_data / "rates.csv")) == 9
    assert load_cpi(repo_data / "cpi.csv")[2010] == pytest.approx(218.1)
    assert [n.name for n in load_net_table(repo_data / "net_costs.csv")][0] == "Forest"


def test_missing_column(tmp_path):
    path = tmp_path / "rates.csv"
    path.write_text("tenor,zero_rate\n1,0.01\n")
    with pytest.raises(DataError):
        load_rates(path)


def test_missing_file(tmp_path):
    with pytest.raises(DataError):
        load_scenarios(tmp_path / "missing.csv")


def test_forest_is_cheapest_mid_bound_in_2050(repo_data, flat_index):
    curves = [build_net_cost_curve(t, "mid", flat_index, START) for t in load_net_table(repo_data / "net_costs.csv")]
    assert cheapest_net(date(2050, 1, 1), curves) == ("Forest", pytest.approx(27.5))
