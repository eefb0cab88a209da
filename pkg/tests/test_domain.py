from datetime import date
from decimal import Decimal

import pytest

from conftest import make_case
from domain import (
    DateGrid,
    Money,
    ScenarioId,
    add_months,
    decimal_year,
    load_technology_cases,
    technology_from_row,
    technology_to_row,
    validate_technology,
)
from errors import CurrencyMismatchError, DataError, ValidationError


def test_decimal_year_uses_actual_days():
    assert decimal_year(date(2022, 1, 1)) == 2022.0
    assert decimal_year(date(2022, 7, 2)) == pytest.approx(2022 + 182 / 365)
    assert decimal_year(date(2024, 12, 31)) == pytest.approx(2024 + 365 / 366)


def test_add_months_clips_to_month_end():
    assert add_months(date(2022, 1, 31), 1) == date(2022, 2, 28)
    assert add_months(date(2022, 1, 1), 24) == date(2024, 1, 1)


def test_add_months_fractional():
    # one month, then half of the 28 days of February
    assert add_months(date(2022, 1, 1), 1.5) == date(2022, 2, 15)


def test_add_months_rejects_negative():
    with pytest.raises(ValidationError) as exc:
        add_months(date(2022, 1, 1), -1)
    assert exc.value.field == "months"


def test_monthly_grid_spans_horizon():
    times = DateGrid(date(2022, 1, 1), horizon=1).times()
    assert len(times) == 13
    assert times[0] == 2022.0
    assert times[-1] == 2023.0


def test_grid_spanning_ends_on_stub():
    grid = DateGrid.spanning(date(2022, 1, 1), date(2022, 3, 15))
    assert grid.dates()[-1] == date(2022, 3, 15)
    assert len(grid.times()) == 4


@pytest.mark.parametrize("kwargs", [{"step": 0}, {"horizon": 0}, {"horizon": 1, "until": date(2021, 1, 1)}])
def test_grid_rejects_bad_parameters(kwargs):
    params = {"as_of": date(2022, 1, 1), "horizon": 1.0, **kwargs}
    with pytest.raises(ValidationError):
        DateGrid(**params)


def test_money_arithmetic_in_one_currency():
    total = Money.of("1.5", "XCE") + Money.of(2, "XCE") - Money.of("0.5", "XCE")
    assert total == Money(Decimal("3.0"), "XCE")
    assert (-total).amount == Decimal("-3.0")
    assert total.scale(2).amount == Decimal("6.0")


def test_money_rejects_mixed_currencies():
    with pytest.raises(CurrencyMismatchError):
        Money.of(1, "USD") + Money.of(1, "XCE")
    with pytest.raises(TypeError):
        Money.of(1, "USD") - Money.of(1, "XCE")


def test_xce_converts_to_usd_at_a_price():
    assert Money.of(1.5, "XCE").to_usd(10).amount == Decimal("15")
    with pytest.raises(CurrencyMismatchError):
        Money.of(1, "USD").to_usd(10)


@pytest.mark.parametrize("code", ["usd", "US", "XCEE", "U1D"])
def test_money_currency_must_be_three_uppercase_letters(code):
    with pytest.raises(ValidationError):
        Money.of(1, code)


def test_money_dict_round_trip():
    m = Money.of("1234.5678", "XCE")
    assert Money.from_dict(m.to_dict()) == m


def test_scenario_labels():
    assert ScenarioId("NDC").label == "NDCs"
    assert ScenarioId("NDC").builtin
    assert not ScenarioId("MyScenario").builtin
    assert ScenarioId("MyScenario").label == "MyScenario"
    with pytest.raises(ValidationError):
        ScenarioId(" ")


def test_deconstruction_defaults():
    case = make_case()
    assert case.deconstruct_carbon == pytest.approx(0.685)
    assert case.deconstruct_months == 18
    assert case.with_deconstruct_share(0.2).deconstruct_carbon == pytest.approx(0.274)


def test_validate_reports_first_violation():
    with pytest.raises(ValidationError) as exc:
        validate_technology(make_case(size=0, capacity_factor=2))
    assert exc.value.field == "size"
    with pytest.raises(ValidationError) as exc:
        validate_technology(make_case(capacity_factor=1.2))
    assert exc.value.field == "capacity_factor"


def test_build_carbon_needs_build_phase():
    with pytest.raises(ValidationError) as exc:
        validate_technology(make_case(build=0))
    assert exc.value.field == "build"


def test_row_round_trip():
    case = make_case(user_supplied=True)
    assert technology_from_row(technology_to_row(case)) == case


def test_row_missing_column():
    row = technology_to_row(make_case())
    del row["lifespan"]
    with pytest.raises(DataError):
        technology_from_row(row)


def test_load_bundled_technologies(repo_data):
    cases = load_technology_cases(repo_data / "technologies.csv")
    assert [c.case_id for c in cases] == ["01", "03", "08", "09", "12", "15", "17", "20", "24", "25"]
    by_id = {c.case_id: c for c in cases}
    assert by_id["01"].carbon_per_year == 3.91
    assert by_id["25"].user_supplied
    assert not by_id["24"].user_supplied
    assert all(c.renewable for c in cases if c.case_id in {"12", "15", "17", "20", "24", "25"})


def test_load_technologies_deconstruct_share(repo_data):
    cases = load_technology_cases(repo_data / "technologies.csv", deconstruct_share=0.0)
    assert all(c.deconstruct_carbon == 0 for c in cases)


def test_duplicate_case_ids(tmp_path, repo_data):
    lines = (repo_data / "technologies.csv").read_text().splitlines()
    path = tmp_path / "dup.csv"
    path.write_text("\n".join(lines + [lines[-1]]) + "\n")
    with pytest.raises(DataError):
        load_technology_cases(path)


def test_missing_technology_file(tmp_path):
    with pytest.raises(DataError):
        load_technology_cases(tmp_path / "nope.csv")
